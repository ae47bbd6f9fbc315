import { PathLayer } from "./state";

const COLUMNS: [string, (l: PathLayer) => string][] = [
  ["path", (l) => l.label],
  ["total cost", (l) => l.properties.total_cost.toFixed(4)],
  ["pylon cost", (l) => l.properties.pylon_sum.toFixed(4)],
  ["cable cost", (l) => l.properties.cable_sum.toFixed(4)],
  ["angle cost", (l) => l.properties.angle_sum.toFixed(4)],
  ["pylons", (l) => String(l.properties.pylon_count)],
  ["max turn", (l) => `${l.properties.max_angle.toFixed(1)}°`],
];

/**
 * Comparison table with one row per rendered polyline. Costs are printed
 * exactly as the server reported them; a visibility checkbox per row
 * toggles only that layer on the map.
 */
export function renderTable(
  container: HTMLElement,
  layers: PathLayer[],
  stale: boolean,
  onToggle: (id: number, visible: boolean) => void,
): void {
  container.innerHTML = "";
  container.classList.toggle("stale", stale);
  const table = document.createElement("table");
  const head = table.createTHead().insertRow();
  head.insertCell().textContent = "show";
  for (const [title] of COLUMNS) head.insertCell().textContent = title;
  const body = table.createTBody();
  for (const layer of layers) {
    const row = body.insertRow();
    row.dataset.layerId = String(layer.id);
    row.style.color = layer.color;
    const toggleCell = row.insertCell();
    const toggle = document.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = layer.visible;
    toggle.addEventListener("change", () => onToggle(layer.id, toggle.checked));
    toggleCell.appendChild(toggle);
    for (const [, render] of COLUMNS) {
      row.insertCell().textContent = render(layer);
    }
  }
  container.appendChild(table);
}
