import { PathLayer } from "./state";

/** Cell coordinates -> canvas pixels, preserving aspect ratio. */
export function cellTransform(
  gridWidth: number,
  gridHeight: number,
  canvasWidth: number,
  canvasHeight: number,
): (x: number, y: number) => [number, number] {
  const sx = canvasWidth / gridWidth;
  const sy = canvasHeight / gridHeight;
  const s = Math.min(sx, sy);
  // center a cell at its pixel midpoint
  return (x, y) => [(x + 0.5) * s, (y + 0.5) * s];
}

/**
 * Heatmap underlay plus route polylines and pylon markers on one canvas.
 * The PNG comes from the service; the client only scales it.
 */
export class MapView {
  private readonly canvas: HTMLCanvasElement;
  private image: HTMLImageElement | null = null;
  private gridWidth = 1;
  private gridHeight = 1;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
  }

  setRaster(image: HTMLImageElement, width: number, height: number): void {
    this.image = image;
    this.gridWidth = width;
    this.gridHeight = height;
  }

  draw(layers: PathLayer[]): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const toPx = cellTransform(
      this.gridWidth, this.gridHeight, this.canvas.width, this.canvas.height,
    );
    if (this.image) {
      const [right] = toPx(this.gridWidth - 0.5, 0);
      const [, bottom] = toPx(0, this.gridHeight - 0.5);
      ctx.imageSmoothingEnabled = false;
      ctx.drawImage(this.image, 0, 0, right, bottom);
    }
    for (const layer of layers) {
      if (!layer.visible || layer.vertices.length === 0) continue;
      ctx.strokeStyle = layer.color;
      ctx.lineWidth = 2;
      ctx.beginPath();
      layer.vertices.forEach(([x, y], i) => {
        const [px, py] = toPx(x, y);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
      ctx.fillStyle = layer.color;
      for (const [x, y] of layer.pylons) {
        const [px, py] = toPx(x, y);
        ctx.beginPath();
        ctx.arc(px, py, 3, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
  }
}
