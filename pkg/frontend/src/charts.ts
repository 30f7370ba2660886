/**
 * Strip charts: load vs limit and stick vs extremal control. Kept separate
 * from the cue so the cue-only experiment can hide them independently.
 * The buffer is pure data; drawing is a thin canvas pass.
 */

export interface Series {
  label: string;
  color: string;
  t: number[];
  v: number[];
}

export class StripChart {
  readonly windowS: number;
  readonly series: Series[] = [];

  constructor(windowS = 15) {
    this.windowS = windowS;
  }

  addSeries(label: string, color: string): number {
    this.series.push({ label, color, t: [], v: [] });
    return this.series.length - 1;
  }

  push(idx: number, t: number, v: number): void {
    const s = this.series[idx];
    s.t.push(t);
    s.v.push(v);
    const cutoff = t - this.windowS;
    while (s.t.length && s.t[0] < cutoff) {
      s.t.shift();
      s.v.shift();
    }
  }

  draw(ctx: CanvasRenderingContext2D, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    let tMax = -Infinity;
    let vMin = Infinity;
    let vMax = -Infinity;
    for (const s of this.series) {
      for (let i = 0; i < s.t.length; i++) {
        if (s.t[i] > tMax) tMax = s.t[i];
        if (s.v[i] < vMin) vMin = s.v[i];
        if (s.v[i] > vMax) vMax = s.v[i];
      }
    }
    if (!Number.isFinite(tMax)) return;
    if (vMax - vMin < 1e-9) {
      vMax += 1;
      vMin -= 1;
    }
    const pad = 0.08 * (vMax - vMin);
    vMin -= pad;
    vMax += pad;
    const tMin = tMax - this.windowS;
    const x = (t: number) => ((t - tMin) / this.windowS) * width;
    const y = (v: number) => height - ((v - vMin) / (vMax - vMin)) * height;
    for (const s of this.series) {
      ctx.strokeStyle = s.color;
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      for (let i = 0; i < s.t.length; i++) {
        if (i === 0) ctx.moveTo(x(s.t[i]), y(s.v[i]));
        else ctx.lineTo(x(s.t[i]), y(s.v[i]));
      }
      ctx.stroke();
    }
    ctx.fillStyle = "#9aa4b0";
    ctx.font = "11px system-ui";
    let lx = 6;
    for (const s of this.series) {
      ctx.fillStyle = s.color;
      ctx.fillText(s.label, lx, 14);
      lx += ctx.measureText(s.label).width + 14;
    }
  }
}
