import {
  LineFeature,
  PointFeature,
  PathProperties,
  RouteCollection,
} from "./types";

export interface PathLayer {
  id: number;
  label: string;
  kind: "route" | "ksp";
  color: string;
  visible: boolean;
  vertices: [number, number][];
  pylons: [number, number][];
  properties: PathProperties;
}

export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/** One server compute result split into per-path layers. */
export function layersFromCollection(
  doc: RouteCollection,
  kind: "route" | "ksp",
  firstId: number,
): PathLayer[] {
  const lines = doc.features.filter(
    (f): f is LineFeature => f.geometry.type === "LineString",
  );
  const points = doc.features.filter(
    (f): f is PointFeature => f.geometry.type === "Point",
  );
  return lines.map((line, i) => {
    const id = firstId + i;
    return {
      id,
      label: kind === "route" ? `route ${id}` : `alt ${line.properties.path_index + 1}`,
      kind,
      color: PALETTE[id % PALETTE.length],
      visible: true,
      vertices: line.geometry.coordinates,
      pylons: points
        .filter((p) => p.properties.path_index === line.properties.path_index)
        .map((p) => p.geometry.coordinates),
      properties: line.properties,
    };
  });
}

/**
 * Client-side session state. Route results accumulate for side-by-side
 * comparison; a ksp result replaces the previous ksp set wholesale.
 * Parameter edits mark everything stale until the next recompute.
 */
export class SessionState {
  scenarioId: string | null = null;
  layers: PathLayer[] = [];
  stale = false;
  pending = false;
  error: string | null = null;
  private nextId = 0;

  markStale(): void {
    if (this.layers.length > 0) this.stale = true;
  }

  beginRequest(): boolean {
    if (this.pending) return false; // single in-flight compute
    this.pending = true;
    this.error = null;
    return true;
  }

  failRequest(message: string): void {
    this.pending = false;
    this.error = message; // previous layers stay untouched
  }

  addRoute(doc: RouteCollection): PathLayer[] {
    const added = layersFromCollection(doc, "route", this.nextId);
    this.nextId += added.length;
    this.layers.push(...added);
    this.finish();
    return added;
  }

  replaceKsp(doc: RouteCollection): PathLayer[] {
    this.layers = this.layers.filter((l) => l.kind !== "ksp");
    const added = layersFromCollection(doc, "ksp", this.nextId);
    this.nextId += added.length;
    this.layers.push(...added);
    this.finish();
    return added;
  }

  setVisible(id: number, visible: boolean): void {
    const layer = this.layers.find((l) => l.id === id);
    if (layer) layer.visible = visible;
  }

  reset(scenarioId: string): void {
    this.scenarioId = scenarioId;
    this.layers = [];
    this.stale = false;
    this.pending = false;
    this.error = null;
    this.nextId = 0;
  }

  private finish(): void {
    this.pending = false;
    this.stale = false;
    this.error = null;
  }
}
