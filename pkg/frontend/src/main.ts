import { PlannerClient, RequestFailed } from "./api";
import { MapView } from "./map";
import { ParamPanel } from "./params";
import { SessionState } from "./state";
import { renderTable } from "./table";
import { Weight } from "./types";

interface LayerSpec {
  name: string;
  pylon_weight: Weight;
  cable_weight: Weight;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const client = new PlannerClient();
const state = new SessionState();
let panel: ParamPanel | null = null;
let mapView: MapView | null = null;

function showError(message: string | null): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message ?? "";
  banner.hidden = !message;
}

function refresh(): void {
  mapView?.draw(state.layers);
  renderTable(el("table-box"), state.layers, state.stale, (id, visible) => {
    state.setVisible(id, visible);
    refresh();
  });
  const buttons = [el<HTMLButtonElement>("route-btn"), el<HTMLButtonElement>("ksp-btn")];
  for (const b of buttons) b.disabled = state.pending || state.scenarioId === null;
  panel?.setDisabled(state.pending);
  showError(state.error);
}

async function loadRaster(scenarioId: string, rows: number, cols: number): Promise<void> {
  const img = new Image();
  await new Promise<void>((resolve, reject) => {
    img.onload = () => resolve();
    img.onerror = () => reject(new Error("heatmap fetch failed"));
    img.src = client.rasterUrl(scenarioId);
  });
  mapView = new MapView(el<HTMLCanvasElement>("map-canvas"));
  mapView.setRaster(img, cols, rows);
}

async function handleUpload(): Promise<void> {
  const input = el<HTMLInputElement>("scenario-files");
  const files = Array.from(input.files ?? []);
  const scenarioFile = files.find((f) => f.name.endsWith(".json"));
  if (!scenarioFile) {
    showError("select a scenario .json plus its grid files");
    return;
  }
  const grids = files.filter((f) => f !== scenarioFile);
  try {
    const doc = JSON.parse(await scenarioFile.text());
    const id = await client.uploadScenario(scenarioFile, grids);
    state.reset(id);
    const layerSpecs = (doc.layers ?? []) as LayerSpec[];
    panel = new ParamPanel(
      el("param-box"), layerSpecs, doc.w_c ?? 1, doc.theta_alpha_deg ?? 60,
    );
    panel.onChange = () => {
      state.markStale();
      refresh();
    };
    // grid shape for the canvas transform comes from the heatmap PNG
    const img = new Image();
    img.src = client.rasterUrl(id);
    await new Promise<void>((resolve) => {
      img.onload = () => resolve();
      img.onerror = () => resolve();
    });
    await loadRaster(id, img.naturalHeight || 1, img.naturalWidth || 1);
    refresh();
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}

async function compute(kind: "route" | "ksp"): Promise<void> {
  if (!state.scenarioId || !panel || !state.beginRequest()) return;
  refresh();
  try {
    if (kind === "route") {
      state.addRoute(
        await client.computeRoute(state.scenarioId, panel.overrides()),
      );
    } else {
      state.replaceKsp(
        await client.computeKsp(state.scenarioId, panel.kspParams(), panel.overrides()),
      );
    }
  } catch (err) {
    const msg =
      err instanceof RequestFailed && err.field
        ? `${err.field}: ${err.message}`
        : err instanceof Error
          ? err.message
          : String(err);
    state.failRequest(msg);
  }
  refresh();
}

export function init(): void {
  el<HTMLButtonElement>("upload-btn").addEventListener("click", () => void handleUpload());
  el<HTMLButtonElement>("route-btn").addEventListener("click", () => void compute("route"));
  el<HTMLButtonElement>("ksp-btn").addEventListener("click", () => void compute("ksp"));
  refresh();
}

if (typeof document !== "undefined" && document.getElementById("upload-btn")) {
  init();
}
