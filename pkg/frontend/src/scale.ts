/** Axis scales and tick generation for linear and log10 axes. */

export interface Scale {
  toPixel(v: number): number;
  ticks(): { value: number; label: string }[];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const exp = Math.floor(Math.log10(a));
    const mant = v / 10 ** exp;
    return `${mant.toPrecision(2).replace(/\.0$/, "")}e${exp}`;
  }
  return `${Number(v.toPrecision(4))}`;
}

export function linearScale(lo: number, hi: number, p0: number, p1: number): Scale {
  const span = hi - lo || 1;
  const step = niceStep(span);
  const first = Math.ceil(lo / step) * step;
  return {
    toPixel: (v) => p0 + ((v - lo) / span) * (p1 - p0),
    ticks: () => {
      const out = [];
      for (let v = first; v <= hi + 1e-12 * span; v += step) {
        out.push({ value: v, label: fmt(Math.abs(v) < 1e-12 * span ? 0 : v) });
      }
      return out;
    },
  };
}

function niceStep(span: number): number {
  const raw = span / 5;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const nice = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return nice * mag;
}

export function logScale(lo: number, hi: number, p0: number, p1: number): Scale {
  if (lo <= 0 || hi <= 0) throw new Error("log scale needs positive bounds");
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  return {
    toPixel: (v) => p0 + ((Math.log10(v) - llo) / span) * (p1 - p0),
    ticks: () => {
      const out = [];
      const step = Math.max(1, Math.round(span / 6));
      for (let e = Math.ceil(llo); e <= Math.floor(lhi + 1e-12); e += step) {
        out.push({ value: 10 ** e, label: `1e${e}` });
      }
      return out;
    },
  };
}
