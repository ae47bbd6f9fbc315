import { LineFeature, PointFeature, RouteCollection } from "../src/types";

export function lineFeature(
  index: number,
  coords: [number, number][],
  cost: number,
): LineFeature {
  return {
    type: "Feature",
    geometry: { type: "LineString", coordinates: coords },
    properties: {
      path_index: index,
      total_cost: cost,
      pylon_sum: cost * 0.6,
      cable_sum: cost * 0.3,
      angle_sum: cost * 0.1,
      pylon_count: coords.length,
      max_angle: 30.0,
    },
  };
}

export function pointFeatures(
  index: number,
  coords: [number, number][],
): PointFeature[] {
  return coords.map((c, i) => ({
    type: "Feature",
    geometry: { type: "Point", coordinates: c },
    properties: { path_index: index, pylon_index: i },
  }));
}

export function collection(
  paths: { coords: [number, number][]; cost: number }[],
): RouteCollection {
  const features = paths.flatMap((p, i) => [
    lineFeature(i, p.coords, p.cost),
    ...pointFeatures(i, p.coords),
  ]);
  return {
    type: "FeatureCollection",
    features,
    properties: { n: 10, m: 20, map_elements: 40 },
  };
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
