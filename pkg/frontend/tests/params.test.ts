import { beforeEach, describe, expect, it } from "vitest";

import { ParamPanel, sliderToWeight, weightToSlider } from "../src/params";

const LAYERS = [
  { name: "terrain", pylon_weight: 3, cable_weight: 1 },
  { name: "water", pylon_weight: "inf" as const, cable_weight: 0.5 },
];

function makePanel(): ParamPanel {
  const box = document.createElement("div");
  document.body.appendChild(box);
  return new ParamPanel(box, LAYERS, 1.0, 60);
}

function control(panel: ParamPanel, key: string): HTMLInputElement {
  const el = panel.root.querySelector(`[data-control="${key}"]`);
  if (!el) throw new Error(`no control ${key}`);
  return el as HTMLInputElement;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("log slider mapping", () => {
  it("covers 0.01 to 100 and round-trips", () => {
    expect(sliderToWeight(0)).toBeCloseTo(0.01);
    expect(sliderToWeight(500)).toBeCloseTo(1.0);
    expect(sliderToWeight(1000)).toBeCloseTo(100);
    for (const w of [0.01, 0.1, 1, 7.5, 100]) {
      expect(sliderToWeight(weightToSlider(w))).toBeCloseTo(w, 1);
    }
  });
});

describe("ParamPanel", () => {
  it("marks inf layers with a checked toggle and disabled slider", () => {
    const panel = makePanel();
    const toggle = control(panel, "water:pylon_weight:inf");
    const slider = control(panel, "water:pylon_weight");
    expect(toggle.checked).toBe(true);
    expect(slider.disabled).toBe(true);
  });

  it("omits untouched weights from the override payload", () => {
    const panel = makePanel();
    expect(panel.overrides().weights).toBeUndefined();
  });

  it("reports an edited weight as an override", () => {
    const panel = makePanel();
    const slider = control(panel, "terrain:pylon_weight");
    slider.value = "1000";
    slider.dispatchEvent(new Event("input"));
    expect(panel.overrides().weights).toEqual({
      terrain: { pylon_weight: 100 },
    });
  });

  it("reports inf when the toggle is switched on", () => {
    const panel = makePanel();
    const toggle = control(panel, "terrain:cable_weight:inf");
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));
    expect(panel.overrides().weights).toEqual({
      terrain: { cable_weight: "inf" },
    });
    expect(control(panel, "terrain:cable_weight").disabled).toBe(true);
  });

  it("fires onChange for any edit", () => {
    const panel = makePanel();
    let edits = 0;
    panel.onChange = () => edits++;
    control(panel, "w_c").dispatchEvent(new Event("input"));
    control(panel, "theta").dispatchEvent(new Event("input"));
    control(panel, "ksp:k").dispatchEvent(new Event("input"));
    expect(edits).toBe(3);
  });

  it("switches the angle-cost kind via the radio group", () => {
    const panel = makePanel();
    expect(panel.overrides().angle_cost?.kind).toBe("convex");
    const zero = control(panel, "angle:zero");
    zero.checked = true;
    zero.dispatchEvent(new Event("change"));
    expect(panel.overrides().angle_cost).toEqual({ kind: "zero" });
  });

  it("collects diversity params for ksp", () => {
    const panel = makePanel();
    control(panel, "ksp:k").value = "5";
    const method = panel.root.querySelector(
      '[data-control="ksp:method"]',
    ) as HTMLSelectElement;
    method.value = "find_ksp_max";
    control(panel, "ksp:theta").value = "2.5";
    expect(panel.kspParams()).toEqual({
      k: 5,
      method: "find_ksp_max",
      metric: "yau_hausdorff",
      theta: 2.5,
    });
  });

  it("disables all controls while a request is pending", () => {
    const panel = makePanel();
    panel.setDisabled(true);
    const inputs = panel.root.querySelectorAll("input, select");
    for (const el of inputs) {
      expect((el as HTMLInputElement).disabled).toBe(true);
    }
    panel.setDisabled(false);
    // the inf-toggled slider must stay disabled
    expect(control(panel, "water:pylon_weight").disabled).toBe(true);
    expect(control(panel, "terrain:pylon_weight").disabled).toBe(false);
  });
});
