// Built by `wasm-bindgen --target web --out-dir www/pkg`, see the README.
import init, { walk_svg, bb_trace, pi_convergence } from "./pkg/expmath_wasm.js";

const $ = (id) => document.getElementById(id);

function fail(el, e) {
  el.className = "err";
  el.textContent = String(e);
}

function drawWalk(ev) {
  ev?.preventDefault();
  const f = new FormData($("walk-form"));
  const info = $("walk-info");
  info.className = "";
  try {
    const t0 = performance.now();
    const svg = walk_svg(f.get("constant"), Number(f.get("base")), Number(f.get("count")), f.get("progress") === "on");
    $("walk-out").innerHTML = svg;
    info.textContent = `${f.get("count")} steps in ${(performance.now() - t0).toFixed(0)} ms`;
  } catch (e) {
    fail(info, e);
  }
}

function plotTraces(canvas, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pts = series.flatMap((s) => s.trace.map((t) => Math.log10(Math.max(t.grad_norm, 1e-300))));
  const lo = Math.min(...pts), hi = Math.max(...pts);
  const kmax = Math.max(...series.map((s) => s.trace.length - 1), 1);
  const x = (k) => 40 + (k / kmax) * (w - 50);
  const y = (v) => 10 + ((hi - v) / Math.max(hi - lo, 1e-9)) * (h - 40);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(40, 10);
  ctx.lineTo(40, h - 30);
  ctx.lineTo(w - 10, h - 30);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.fillText(`log₁₀‖∇F‖ ${hi.toFixed(1)}`, 44, 20);
  ctx.fillText(lo.toFixed(1), 4, h - 32);
  ctx.fillText(`iteration ${kmax}`, w - 90, h - 12);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.trace.forEach((t, i) => {
      const v = Math.log10(Math.max(t.grad_norm, 1e-300));
      i === 0 ? ctx.moveTo(x(t.k), y(v)) : ctx.lineTo(x(t.k), y(v));
    });
    ctx.stroke();
  }
}

function runBb(ev) {
  ev?.preventDefault();
  const f = new FormData($("bb-form"));
  const info = $("bb-info");
  info.className = "";
  try {
    const r = JSON.parse(bb_trace(Number(f.get("kappa")), f.get("variant"), Number(f.get("x1")), Number(f.get("x2")), 1e-8));
    info.innerHTML =
      `<span style="color:#c33">BB</span>: ${r.bb.iterations} iterations` +
      (r.bb.converged ? "" : " (not converged)") +
      `, <span style="color:#36c">steepest descent</span>: ${r.steepest_descent.iterations}` +
      (r.steepest_descent.converged ? "" : " (not converged)");
    plotTraces($("bb-plot"), [
      { trace: r.steepest_descent.trace, color: "#36c" },
      { trace: r.bb.trace, color: "#c33" },
    ]);
  } catch (e) {
    fail(info, e);
  }
}

function runPi(ev) {
  ev?.preventDefault();
  const f = new FormData($("pi-form"));
  const out = $("pi-value");
  out.className = "mono";
  try {
    const r = JSON.parse(pi_convergence(Number(f.get("iterations")), Number(f.get("digits"))));
    out.textContent = r.value;
    const rows = r.errors
      .map((e) => `<tr><td>${e.iteration}</td><td>${e.error}</td><td>${e.log10_error === null ? "" : e.log10_error.toFixed(1)}</td></tr>`)
      .join("");
    $("pi-table").innerHTML = `<tr><th>iteration</th><th>|π_k − π|</th><th>log₁₀</th></tr>${rows}`;
  } catch (e) {
    $("pi-table").innerHTML = "";
    fail(out, e);
  }
}

await init();
$("status").textContent = "";
$("walk-form").addEventListener("submit", drawWalk);
$("bb-form").addEventListener("submit", runBb);
$("pi-form").addEventListener("submit", runPi);
drawWalk();
runBb();
runPi();
