import { AngleCostSpec, KspParams, Overrides, Weight } from "./types";

// Weight sliders are logarithmic: position 0..1000 covers 0.01..100.
const SLIDER_STEPS = 1000;
const LOG_MIN = -2;
const LOG_MAX = 2;

export function sliderToWeight(pos: number): number {
  const t = Math.min(Math.max(pos / SLIDER_STEPS, 0), 1);
  const w = Math.pow(10, LOG_MIN + t * (LOG_MAX - LOG_MIN));
  return Number(w.toPrecision(3));
}

export function weightToSlider(w: number): number {
  const clamped = Math.min(Math.max(w, Math.pow(10, LOG_MIN)), Math.pow(10, LOG_MAX));
  const t = (Math.log10(clamped) - LOG_MIN) / (LOG_MAX - LOG_MIN);
  return Math.round(t * SLIDER_STEPS);
}

interface WeightControl {
  layer: string;
  which: "pylon_weight" | "cable_weight";
  slider: HTMLInputElement;
  infToggle: HTMLInputElement;
  readout: HTMLSpanElement;
  touched: boolean;
}

/**
 * Parameter panel: per-layer weight sliders with "inf" toggles, a cable
 * weight slider, angle-cost radio group, and the diversity controls.
 * Emits onChange whenever any value is edited.
 */
export class ParamPanel {
  readonly root: HTMLElement;
  onChange: (() => void) | null = null;

  private weightControls: WeightControl[] = [];
  private wcSlider!: HTMLInputElement;
  private wcReadout!: HTMLSpanElement;
  private thetaInput!: HTMLInputElement;
  private angleKind = "convex";
  private angleScale!: HTMLInputElement;
  private angleExponent!: HTMLInputElement;
  private kspK!: HTMLInputElement;
  private kspMethod!: HTMLSelectElement;
  private kspMetric!: HTMLSelectElement;
  private kspTheta!: HTMLInputElement;

  constructor(
    container: HTMLElement,
    layerWeights: { name: string; pylon_weight: Weight; cable_weight: Weight }[],
    initialWc: number,
    initialTheta: number,
  ) {
    this.root = container;
    container.innerHTML = "";
    const weightsBox = this.section("Layer weights");
    for (const lw of layerWeights) {
      this.addWeightControl(weightsBox, lw.name, "pylon_weight", lw.pylon_weight);
      this.addWeightControl(weightsBox, lw.name, "cable_weight", lw.cable_weight);
    }
    this.buildGlobalControls(initialWc, initialTheta);
    this.buildAngleControls();
    this.buildKspControls();
  }

  private section(title: string): HTMLElement {
    const box = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = title;
    box.appendChild(legend);
    this.root.appendChild(box);
    return box;
  }

  private notify(): void {
    this.onChange?.();
  }

  private addWeightControl(
    box: HTMLElement,
    layer: string,
    which: "pylon_weight" | "cable_weight",
    initial: Weight,
  ): void {
    const row = document.createElement("div");
    row.className = "weight-row";
    const label = document.createElement("label");
    label.textContent = `${layer} ${which === "pylon_weight" ? "pylon" : "cable"}`;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = String(SLIDER_STEPS);
    slider.dataset.control = `${layer}:${which}`;
    const infToggle = document.createElement("input");
    infToggle.type = "checkbox";
    infToggle.dataset.control = `${layer}:${which}:inf`;
    const readout = document.createElement("span");
    if (initial === "inf") {
      infToggle.checked = true;
      slider.disabled = true;
      slider.value = String(SLIDER_STEPS);
      readout.textContent = "inf";
    } else {
      slider.value = String(weightToSlider(initial));
      readout.textContent = String(initial);
    }
    const ctl: WeightControl = {
      layer, which, slider, infToggle, readout, touched: false,
    };
    slider.addEventListener("input", () => {
      ctl.touched = true;
      readout.textContent = String(sliderToWeight(Number(slider.value)));
      this.notify();
    });
    infToggle.addEventListener("change", () => {
      ctl.touched = true;
      slider.disabled = infToggle.checked;
      readout.textContent = infToggle.checked
        ? "inf"
        : String(sliderToWeight(Number(slider.value)));
      this.notify();
    });
    this.weightControls.push(ctl);
    row.append(label, slider, infToggle, readout);
    box.appendChild(row);
  }

  private buildGlobalControls(initialWc: number, initialTheta: number): void {
    const box = this.section("Route shape");
    const row = document.createElement("div");
    const label = document.createElement("label");
    label.textContent = "cable weight w_c";
    this.wcSlider = document.createElement("input");
    this.wcSlider.type = "range";
    this.wcSlider.min = "0";
    this.wcSlider.max = String(SLIDER_STEPS);
    this.wcSlider.value = String(weightToSlider(Math.max(initialWc, 0.01)));
    this.wcSlider.dataset.control = "w_c";
    this.wcReadout = document.createElement("span");
    this.wcReadout.textContent = String(initialWc);
    this.wcSlider.addEventListener("input", () => {
      this.wcReadout.textContent = String(sliderToWeight(Number(this.wcSlider.value)));
      this.notify();
    });
    row.append(label, this.wcSlider, this.wcReadout);
    box.appendChild(row);

    const thetaRow = document.createElement("div");
    const thetaLabel = document.createElement("label");
    thetaLabel.textContent = "max turn angle (deg)";
    this.thetaInput = document.createElement("input");
    this.thetaInput.type = "number";
    this.thetaInput.min = "1";
    this.thetaInput.max = "180";
    this.thetaInput.value = String(initialTheta);
    this.thetaInput.dataset.control = "theta";
    this.thetaInput.addEventListener("input", () => this.notify());
    thetaRow.append(thetaLabel, this.thetaInput);
    box.appendChild(thetaRow);
  }

  private buildAngleControls(): void {
    const box = this.section("Angle cost");
    for (const kind of ["zero", "step", "convex", "concave"]) {
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "angle-kind";
      radio.value = kind;
      radio.checked = kind === this.angleKind;
      radio.dataset.control = `angle:${kind}`;
      radio.addEventListener("change", () => {
        if (radio.checked) {
          this.angleKind = kind;
          this.notify();
        }
      });
      const label = document.createElement("label");
      label.append(radio, document.createTextNode(kind));
      box.appendChild(label);
    }
    this.angleScale = document.createElement("input");
    this.angleScale.type = "number";
    this.angleScale.value = "5";
    this.angleScale.dataset.control = "angle:scale";
    this.angleScale.addEventListener("input", () => this.notify());
    this.angleExponent = document.createElement("input");
    this.angleExponent.type = "number";
    this.angleExponent.value = "2";
    this.angleExponent.dataset.control = "angle:exponent";
    this.angleExponent.addEventListener("input", () => this.notify());
    const scaleLabel = document.createElement("label");
    scaleLabel.append(document.createTextNode("scale"), this.angleScale);
    const expLabel = document.createElement("label");
    expLabel.append(document.createTextNode("exponent"), this.angleExponent);
    box.append(scaleLabel, expLabel);
  }

  private buildKspControls(): void {
    const box = this.section("Alternatives");
    this.kspK = document.createElement("input");
    this.kspK.type = "number";
    this.kspK.min = "1";
    this.kspK.value = "3";
    this.kspK.dataset.control = "ksp:k";
    this.kspMethod = document.createElement("select");
    for (const m of [
      "k_shortest", "find_ksp_max", "find_ksp_mean",
      "greedy_set", "k_dispersion", "corridor_penalizing",
    ]) {
      const opt = document.createElement("option");
      opt.value = m;
      opt.textContent = m;
      this.kspMethod.appendChild(opt);
    }
    this.kspMethod.dataset.control = "ksp:method";
    this.kspMetric = document.createElement("select");
    for (const m of ["yau_hausdorff", "mean_euclidean", "jaccard"]) {
      const opt = document.createElement("option");
      opt.value = m;
      opt.textContent = m;
      this.kspMetric.appendChild(opt);
    }
    this.kspMetric.dataset.control = "ksp:metric";
    this.kspTheta = document.createElement("input");
    this.kspTheta.type = "number";
    this.kspTheta.min = "0";
    this.kspTheta.value = "0";
    this.kspTheta.dataset.control = "ksp:theta";
    for (const el of [this.kspK, this.kspTheta]) {
      el.addEventListener("input", () => this.notify());
    }
    for (const el of [this.kspMethod, this.kspMetric]) {
      el.addEventListener("change", () => this.notify());
    }
    const mk = (text: string, el: HTMLElement) => {
      const label = document.createElement("label");
      label.append(document.createTextNode(text), el);
      box.appendChild(label);
    };
    mk("k", this.kspK);
    mk("method", this.kspMethod);
    mk("metric", this.kspMetric);
    mk("diversity θ", this.kspTheta);
  }

  /** Current parameter set as /api/route override payload. */
  overrides(): Overrides {
    const weights: Record<string, Record<string, Weight>> = {};
    for (const ctl of this.weightControls) {
      if (!ctl.touched) continue; // untouched weights keep scenario values
      const value: Weight = ctl.infToggle.checked
        ? "inf"
        : sliderToWeight(Number(ctl.slider.value));
      weights[ctl.layer] = weights[ctl.layer] ?? {};
      weights[ctl.layer][ctl.which] = value;
    }
    const out: Overrides = {
      w_c: sliderToWeight(Number(this.wcSlider.value)),
      theta: Number(this.thetaInput.value),
      angle_cost: this.angleSpec(),
    };
    if (Object.keys(weights).length > 0) out.weights = weights;
    return out;
  }

  private angleSpec(): AngleCostSpec {
    if (this.angleKind === "zero") return { kind: "zero" };
    if (this.angleKind === "step") {
      return { kind: "step", breakpoints: [45, 90], levels: [0, 2, 8] };
    }
    return {
      kind: this.angleKind as "convex" | "concave",
      scale: Number(this.angleScale.value),
      exponent: Number(this.angleExponent.value),
    };
  }

  kspParams(): KspParams {
    return {
      k: Number(this.kspK.value),
      method: this.kspMethod.value as KspParams["method"],
      metric: this.kspMetric.value as KspParams["metric"],
      theta: Number(this.kspTheta.value),
    };
  }

  setDisabled(disabled: boolean): void {
    for (const el of this.root.querySelectorAll("input, select")) {
      const ctl = el as HTMLInputElement;
      if (ctl.dataset.control?.endsWith(":inf") || ctl.type !== "range") {
        ctl.disabled = disabled;
      } else {
        // keep inf-toggled sliders disabled even when the panel re-enables
        const owner = this.weightControls.find((w) => w.slider === ctl);
        ctl.disabled = disabled || (owner?.infToggle.checked ?? false);
      }
    }
  }
}
