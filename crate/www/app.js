// Demo page wiring. Expects the wasm-bindgen bundle at ./pkg/, produced by
//   wasm-pack build crates/sievelab-wasm --target web --out-dir ../../www/pkg
import init, { tuple_report, mine_tuple, gap_histogram, series_window } from "./pkg/sievelab_wasm.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 6) => Number(x).toLocaleString("en-US", { maximumFractionDigits: d });

function parseJson(text, outEl) {
  const v = JSON.parse(text);
  if (v.error) {
    outEl.innerHTML = `<span class="err">error: ${v.error}</span>`;
    return null;
  }
  return v;
}

// ---- panel 1: tuple inspector ----------------------------------------

function renderTuple(v) {
  const badge = v.admissible
    ? `<span class="badge ok">admissible</span>`
    : `<span class="badge no">inadmissible</span>`;
  let rows = v.nu_table
    .map((r) => `<tr><td>${r.p}</td><td>${r.nu}</td><td>${r.saturated ? "✗ full" : "ok"}</td></tr>`)
    .join("");
  const table = v.nu_table.length
    ? `<table><tr><th>p</th><th>ν_p</th><th></th></tr>${rows}</table>`
    : "";
  const s = v.series;
  const series = v.admissible
    ? `S(H) ∈ [${fmt(s.lower, 9)}, ${fmt(s.upper, 9)}]  (width ${s.width.toExponential(2)}, P₀ = ${s.p0})`
    : "S(H) = 0 — some prime has every residue class covered";
  return `{${v.offsets.join(", ")}}  k = ${v.k}, diameter = ${v.diameter}  ${badge}\n${series}${table}`;
}

$("tuple-run").addEventListener("click", () => {
  const out = $("tuple-out");
  const v = parseJson(tuple_report($("tuple-offsets").value, Number($("tuple-p0").value)), out);
  if (v) out.innerHTML = renderTuple(v);
});

$("mine-run").addEventListener("click", () => {
  const out = $("tuple-out");
  const v = parseJson(mine_tuple(Number($("mine-k").value), Number($("mine-max").value)), out);
  if (!v) return;
  $("tuple-offsets").value = v.offsets.join(",");
  const full = parseJson(tuple_report($("tuple-offsets").value, Number($("tuple-p0").value)), out);
  if (full) out.innerHTML = `greedy pick, diameter ${v.diameter}:\n` + renderTuple(full);
});

// ---- canvas helpers ----------------------------------------------------

function clearCanvas(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

function axes(ctx, w, h, pad) {
  ctx.strokeStyle = "#2b333d";
  ctx.beginPath();
  ctx.moveTo(pad, 8);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - 8, h - pad);
  ctx.stroke();
}

// ---- panel 2: gap histogram -------------------------------------------

$("hist-run").addEventListener("click", () => {
  const out = $("hist-out");
  const v = parseJson(
    gap_histogram(
      Number($("hist-lo").value),
      Number($("hist-hi").value),
      Number($("hist-width").value),
      $("hist-norm").value
    ),
    out
  );
  if (!v) return;
  const canvas = $("hist-canvas");
  const ctx = clearCanvas(canvas);
  const { width: w, height: h } = canvas;
  const pad = 42;
  axes(ctx, w, h, pad);
  const bins = v.bins;
  const maxCount = Math.max(1, ...bins.map((b) => b.count));
  const bw = (w - pad - 10) / bins.length;
  ctx.fillStyle = "#58a6ff";
  bins.forEach((b, i) => {
    const bh = ((h - pad - 10) * b.count) / maxCount;
    ctx.fillRect(pad + i * bw + 0.5, h - pad - bh, Math.max(1, bw - 1), bh);
  });
  ctx.fillStyle = "#8b98a5";
  ctx.font = "11px monospace";
  ctx.fillText("0", pad - 8, h - pad + 14);
  const last = bins[bins.length - 1];
  ctx.fillText(fmt(last.hi, 2), w - 60, h - pad + 14);
  ctx.fillText(`max ${maxCount}`, pad + 6, 16);
  out.textContent =
    `${v.samples} gaps between consecutive primes in [${fmt(v.lo, 0)}, ${fmt(v.hi, 0)}], ` +
    `bin width ${v.bin_width}; mass check: ${bins.reduce((a, b) => a + b.count, 0)} = ${v.samples}`;
});

// ---- panel 3: series ratio window ---------------------------------------

$("series-run").addEventListener("click", () => {
  const out = $("series-out");
  const v = parseJson(
    series_window(
      $("series-offsets").value,
      Number($("series-m").value),
      Number($("series-len").value),
      Number($("series-p0").value)
    ),
    out
  );
  if (!v) return;
  const canvas = $("series-canvas");
  const ctx = clearCanvas(canvas);
  const { width: w, height: h } = canvas;
  const pad = 42;
  axes(ctx, w, h, pad);
  const pts = v.points;
  const maxR = Math.max(v.max_ratio, 1.05);
  const x = (i) => pad + ((w - pad - 10) * i) / Math.max(1, pts.length - 1);
  const y = (r) => h - pad - ((h - pad - 10) * r) / maxR;
  // mean line
  ctx.strokeStyle = "#3fb950";
  ctx.setLineDash([5, 4]);
  ctx.beginPath();
  ctx.moveTo(pad, y(v.mean));
  ctx.lineTo(w - 8, y(v.mean));
  ctx.stroke();
  ctx.setLineDash([]);
  // ratio dots
  ctx.fillStyle = "#58a6ff";
  pts.forEach((p, i) => {
    ctx.fillRect(x(i) - 1, y(p.ratio) - 1, 2, 2);
  });
  ctx.fillStyle = "#8b98a5";
  ctx.font = "11px monospace";
  ctx.fillText(`mean ${fmt(v.mean, 4)}`, pad + 6, y(v.mean) - 6);
  ctx.fillText(`${maxR.toFixed(2)}`, 6, 16);
  out.textContent =
    `S(H ∪ {m}) / S(H) over m ∈ [${fmt(v.m_start, 0)}, ${fmt(v.m_start + v.len, 0)}]  ` +
    `(P₀ = ${v.p0}); window mean ${fmt(v.mean, 6)} — the averages settle near 1`;
});

// ---- boot ----------------------------------------------------------------

init()
  .then(() => {
    $("tuple-run").click();
  })
  .catch((e) => {
    document.body.insertAdjacentHTML(
      "beforeend",
      `<section><span class="err">failed to load wasm module: ${e}.<br>
       Build it first: <code>wasm-pack build crates/sievelab-wasm --target web --out-dir ../../www/pkg</code></span></section>`
    );
  });
