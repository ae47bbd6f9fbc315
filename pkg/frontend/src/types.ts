// Shared types for the planner UI. The server is the source of truth for
// every number shown; the client never recomputes costs.

export type Weight = number | "inf";

export interface LayerWeightOverride {
  pylon_weight?: Weight;
  cable_weight?: Weight;
}

export interface AngleCostSpec {
  kind: "zero" | "step" | "convex" | "concave";
  // convex / concave power law
  scale?: number;
  exponent?: number;
  // step
  breakpoints?: number[];
  levels?: number[];
}

export interface Overrides {
  weights?: Record<string, LayerWeightOverride>;
  w_c?: number;
  theta?: number;
  angle_cost?: AngleCostSpec;
}

export type KspMethod =
  | "k_shortest"
  | "find_ksp_max"
  | "find_ksp_mean"
  | "greedy_set"
  | "k_dispersion"
  | "corridor_penalizing";

export type KspMetric = "yau_hausdorff" | "mean_euclidean" | "jaccard";

export interface KspParams {
  k: number;
  method: KspMethod;
  metric: KspMetric;
  theta: number;
}

export interface PathProperties {
  path_index: number;
  total_cost: number;
  pylon_sum: number;
  cable_sum: number;
  angle_sum: number;
  pylon_count: number;
  max_angle: number;
}

export interface LineFeature {
  type: "Feature";
  geometry: { type: "LineString"; coordinates: [number, number][] };
  properties: PathProperties;
}

export interface PointFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: { path_index: number; pylon_index: number };
}

export interface RouteCollection {
  type: "FeatureCollection";
  features: (LineFeature | PointFeature)[];
  properties: { n: number; m: number; map_elements: number; truncated?: boolean };
}

export interface ApiError {
  code: number;
  message: string;
  field?: string;
}
