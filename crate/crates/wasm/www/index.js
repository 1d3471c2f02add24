// Generated by `wasm-bindgen --target web --out-dir www/pkg` (see README).
import init, { utilityCurve, responseMap, alphaSweep } from "./pkg/dpbw_wasm.js";

const ids = ["m", "m1", "m2", "a1", "a2", "xo"];
const $ = (id) => document.getElementById(id);

function call(f, ...args) {
  const v = JSON.parse(f(...args));
  if (v.error) throw new Error(v.error);
  return v;
}

// Axes with [x0, x1] x [y0, y1] mapped onto the canvas; returns the mapping.
function frame(canvas, x0, x1, y0, y1, xl, yl) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 42;
  ctx.clearRect(0, 0, W, H);
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (W - pad - 10);
  const sy = (y) => H - pad + -((y - y0) / (y1 - y0 || 1)) * (H - pad - 10);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, 10, W - pad - 10, H - pad - 10);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), pad, H - pad + 14);
  ctx.fillText(x1.toPrecision(3), W - 40, H - pad + 14);
  ctx.fillText(y0.toPrecision(4), 2, H - pad);
  ctx.fillText(y1.toPrecision(4), 2, 18);
  ctx.fillText(xl, W / 2 - 20, H - 8);
  ctx.save();
  ctx.translate(12, H / 2 + 20);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yl, 0, 0);
  ctx.restore();
  return { ctx, sx, sy };
}

function line(f, xs, ys, color, dash = []) {
  const { ctx, sx, sy } = f;
  ctx.strokeStyle = color;
  ctx.setLineDash(dash);
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  ctx.setLineDash([]);
}

function render() {
  const [m, m1, m2, a1, a2, xo] = ids.map((id) => parseFloat($(id).value));
  $("status").textContent = "";
  try {
    const c = call(utilityCurve, m, m1, m2, a1, a2, 0, xo, 200);
    const lo = Math.min(...c.utility, c.honest_utility), hi = Math.max(...c.utility, c.honest_utility);
    const f = frame($("curve"), 0, m1, lo, hi, "pool 1 infiltration", "utility");
    line(f, c.x_own, c.utility, "#1f5fbf");
    line(f, [0, m1], [c.honest_utility, c.honest_utility], "#999", [4, 4]);

    const r = call(responseMap, m, m1, m2, a1, a2, 80);
    const g = frame($("map"), 0, m1, 0, m2, "x1 (pool 1 in pool 2)", "x2");
    line(g, r.br1, r.x2, "#1f5fbf");
    line(g, r.x1, r.br2, "#c0392b");
    g.ctx.fillStyle = "#000";
    for (const [e1, e2] of r.equilibria) {
      g.ctx.beginPath();
      g.ctx.arc(g.sx(e1), g.sy(e2), 5, 0, 2 * Math.PI);
      g.ctx.fill();
    }
    $("eq").textContent =
      r.equilibria.map(([e1, e2]) => `x1 = ${e1.toPrecision(6)}, x2 = ${e2.toPrecision(6)}`).join("\n") +
      `\nPoA = ${r.poa}`;

    const s = call(alphaSweep, m, m1, m2, 0.5, 1.0, 26);
    const poa = s.map((p) => p.poa ?? NaN);
    const top = Math.max(1.0001, ...poa.filter(isFinite));
    const h = frame($("sweep"), 0.5, 1.0, 1, top, "alpha (both pools)", "PoA");
    line(h, s.map((p) => p.alpha), poa, "#27ae60");
    // last alpha at which the uniqueness bounds still hold
    const bound = s.filter((p) => p.uniqueness_bounds_hold).map((p) => p.alpha);
    if (bound.length) line(h, [Math.max(...bound), Math.max(...bound)], [1, top], "#999", [4, 4]);
  } catch (e) {
    $("status").textContent = e.message;
  }
}

await init();
ids.forEach((id) => $(id).addEventListener("input", render));
render();
