import init, { spectrum, gesp_fringe, sensitivity_curve } from "./pkg/vecmag_wasm.js";

const $ = (id) => document.getElementById(id);

// Draws [x0, y0, x1, y1, ...] series; each entry is { data, color }.
function plot(canvas, series, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  let [x0, x1, y0, y1] = [Infinity, -Infinity, 0, -Infinity];
  for (const { data } of series) {
    for (let i = 0; i < data.length; i += 2) {
      if (!Number.isFinite(data[i + 1])) continue;
      x0 = Math.min(x0, data[i]); x1 = Math.max(x1, data[i]);
      y0 = Math.min(y0, data[i + 1]); y1 = Math.max(y1, data[i + 1]);
    }
  }
  if (!(x1 > x0)) return;
  if (!(y1 > y0)) y1 = y0 + 1;
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 1.5 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 1.5 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad / 2, w - 1.5 * pad, h - 1.5 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad, h - pad + 14);
  ctx.fillText(y1.toPrecision(3), 2, pad / 2 + 8);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText(xlabel, w / 2, h - 6);
  ctx.fillText(ylabel, 2, h / 2);

  for (const { data, color } of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    let pen = false;
    for (let i = 0; i < data.length; i += 2) {
      const y = data[i + 1];
      if (!Number.isFinite(y)) { pen = false; continue; }
      pen ? ctx.lineTo(sx(data[i]), sy(y)) : ctx.moveTo(sx(data[i]), sy(y));
      pen = true;
    }
    ctx.stroke();
  }
}

function guarded(statusId, f) {
  return () => {
    $(statusId).textContent = "";
    try {
      f();
    } catch (e) {
      $(statusId).textContent = String(e.message ?? e);
    }
  };
}

const drawSpectrum = guarded("sp-status", () => {
  const theta = +$("sp-theta").value;
  $("sp-theta-val").textContent = theta.toFixed(2);
  const data = spectrum(theta, +$("sp-b").value, 601);
  plot($("sp-canvas"), [{ data, color: "#1565c0" }], "detuning / ω_Z", "P(F=2)");
});

const drawFringe = guarded("fr-status", () => {
  const n = +$("fr-n").value;
  const mu = +$("fr-mu").value;
  $("fr-mu-val").textContent = mu.toFixed(2);
  const variant = $("fr-variant").value;
  const span = Math.PI / 4;
  const plain = gesp_fringe(n, 0, "gesp-o", span, 401);
  const squeezed = gesp_fringe(n, mu, variant, span, 401);
  plot($("fr-canvas"), [{ data: plain, color: "#aaa" }, { data: squeezed, color: "#c62828" }], "φ (rad)", "upper fraction");
});

const drawCurve = guarded("cu-status", () => {
  const n = +$("cu-n").value;
  const data = sensitivity_curve(n, $("cu-variant").value, 0.05, 40);
  // plateau reference N/√2
  const plateau = [0.05, n / Math.SQRT2, Math.PI / 2, n / Math.SQRT2];
  plot($("cu-canvas"), [{ data, color: "#2e7d32" }, { data: plateau, color: "#bbb" }], "μ (rad)", "1/Δφ");
});

await init();
$("sp-theta").addEventListener("input", drawSpectrum);
$("sp-b").addEventListener("change", drawSpectrum);
for (const id of ["fr-n", "fr-mu", "fr-variant"]) $(id).addEventListener("input", drawFringe);
$("cu-run").addEventListener("click", drawCurve);
drawSpectrum();
drawFringe();
