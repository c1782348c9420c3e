import init, { effectiveLimiter, starProfile, ishiiProfiles } from "./pkg/jhj_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const COLORS = ["#36c", "#c33", "#393", "#c90", "#93c", "#888"];

// series: [{ x: [...], y: [...], color }]
function plot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.x), ys = series.flatMap((s) => s.y).filter(Number.isFinite);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
  const sx = (x) => pad + (x - x0) / (x1 - x0) * (w - 2 * pad);
  const sy = (y) => h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad);

  ctx.strokeStyle = "#ccc";
  ctx.fillStyle = "#666";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad); ctx.lineTo(pad, h - pad); ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  ctx.fillText(y1.toFixed(3), 2, pad);
  ctx.fillText(y0.toFixed(3), 2, h - pad);
  ctx.fillText(x0.toFixed(2), pad, h - pad + 14);
  ctx.fillText(x1.toFixed(2), w - pad - 24, h - pad + 14);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    s.x.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.y[i])) : ctx.moveTo(sx(x), sy(s.y[i]))));
    ctx.stroke();
  }
}

function guarded(errId, f) {
  return () => {
    try {
      $(errId).textContent = "";
      f();
    } catch (e) {
      $(errId).textContent = String(e);
    }
  };
}

const drawLimiter = guarded("l-err", () => {
  const n = 101;
  const rows = effectiveLimiter(num("l-c"), num("l-w1"), num("l-w2"), num("l-b1"), num("l-b2"), -2, 2, n);
  const p = [], a0 = [], af = [];
  for (let k = 0; k < n; k++) {
    p.push(rows[3 * k]); a0.push(rows[3 * k + 1]); af.push(rows[3 * k + 2]);
  }
  plot($("l-plot"), [{ x: p, y: a0, color: "#888" }, { x: p, y: af, color: "#c33" }]);
});

const drawStar = guarded("s-err", () => {
  const b = $("s-b").value.split(",").map((v) => parseFloat(v)).filter(Number.isFinite);
  const t = num("s-t");
  $("s-tv").textContent = t.toFixed(2);
  const extent = 2, dx = 0.025;
  const values = starProfile(new Float64Array(b), num("s-a"), t, extent, dx);
  const m = values.length / b.length;
  const x = Array.from({ length: m }, (_, k) => k * dx);
  plot($("s-plot"), b.map((_, i) => ({ x, y: Array.from(values.slice(i * m, (i + 1) * m)), color: COLORS[i % COLORS.length] })));
});

const drawIshii = guarded("i-err", () => {
  const r = JSON.parse(ishiiProfiles(num("i-bl"), num("i-cl"), num("i-br"), num("i-cr"), num("i-t")));
  $("i-lim").textContent =
    `A_0 = ${r.a0.toFixed(4)}   A* = ${r.a_star.toFixed(4)}   A⁻ = ${r.a_minus.toFixed(4)}   A⁺ = ${r.a_plus.toFixed(4)}`;
  plot($("i-plot"), [
    { x: r.x, y: r.minimal, color: "#36c" },
    { x: r.x, y: r.maximal, color: "#c33" },
  ]);
});

await init();
for (const id of ["l-c", "l-w1", "l-w2", "l-b1", "l-b2"]) $(id).addEventListener("input", drawLimiter);
for (const id of ["s-b", "s-a", "s-t"]) $(id).addEventListener("input", drawStar);
for (const id of ["i-bl", "i-cl", "i-br", "i-cr", "i-t"]) $(id).addEventListener("change", drawIshii);
drawLimiter();
drawStar();
drawIshii();
