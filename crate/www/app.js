import init, { score_set, distribution_bins, sample_citations } from "./pkg/citerank_wasm.js";

const $ = (id) => document.getElementById(id);

const COLORS = {
  p100: "#2563eb",
  p100prime: "#dc2626",
  percentile: "#64748b",
};

function setStatus(message) {
  $("status").textContent = message || "";
}

function fmt(value) {
  return value === null || value === undefined ? "—" : value.toFixed(2);
}

function renderTable(table) {
  const rows = table.rows
    .map(
      (r) => `<tr>
        <td>${r.citations}</td><td>${r.papers}</td>
        <td>${r.uniqueRank}</td><td>${r.tieAwareRank}</td>
        <td>${fmt(r.p100)}</td><td>${fmt(r.p100prime)}</td><td>${fmt(r.percentile)}</td>
      </tr>`
    )
    .join("");
  $("table").innerHTML = `<thead><tr>
      <th>citations</th><th>papers</th><th>rank i</th><th>rank j</th>
      <th>P100</th><th>P100&prime;</th><th>percentile</th>
    </tr></thead><tbody>${rows}</tbody>`;

  const note = table.degenerate
    ? " All papers share one citation count, so P100 and P100′ are undefined here."
    : "";
  $("summary").textContent =
    `${table.paperCount} papers, ${table.uniqueCount} distinct citation counts.` + note;
}

function chartFrame(canvas, margin) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return {
    ctx,
    x0: margin.left,
    y0: margin.top,
    w: canvas.width - margin.left - margin.right,
    h: canvas.height - margin.top - margin.bottom,
  };
}

function renderChart(table) {
  const canvas = $("chart");
  const { ctx, x0, y0, w, h } = chartFrame(canvas, {
    left: 56,
    right: 16,
    top: 12,
    bottom: 40,
  });
  const rows = table.rows;
  const xAt = (i) =>
    rows.length === 1 ? x0 + w / 2 : x0 + (w * i) / (rows.length - 1);
  const yAt = (v) => y0 + h - (h * v) / 100;

  ctx.font = "12px system-ui";
  ctx.strokeStyle = "#e4e9ee";
  ctx.fillStyle = "#5b6b7b";
  ctx.lineWidth = 1;
  for (let v = 0; v <= 100; v += 25) {
    ctx.beginPath();
    ctx.moveTo(x0, yAt(v));
    ctx.lineTo(x0 + w, yAt(v));
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(String(v), x0 - 8, yAt(v) + 4);
  }

  // Citation-count labels on the x axis, thinned when dense.
  const step = Math.max(1, Math.ceil(rows.length / 14));
  ctx.textAlign = "center";
  rows.forEach((r, i) => {
    if (i % step === 0 || i === rows.length - 1) {
      ctx.fillText(String(r.citations), xAt(i), y0 + h + 18);
    }
  });
  ctx.fillText("citations (distinct, ascending)", x0 + w / 2, y0 + h + 34);

  const drawSeries = (key) => {
    const points = rows
      .map((r, i) => ({ x: xAt(i), y: r[key] }))
      .filter((p) => p.y !== null && p.y !== undefined);
    if (!points.length) return;
    ctx.strokeStyle = COLORS[key];
    ctx.fillStyle = COLORS[key];
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((p, i) => {
      const y = yAt(p.y);
      if (i === 0) ctx.moveTo(p.x, y);
      else ctx.lineTo(p.x, y);
    });
    ctx.stroke();
    points.forEach((p) => {
      ctx.beginPath();
      ctx.arc(p.x, yAt(p.y), 3.2, 0, 2 * Math.PI);
      ctx.fill();
    });
  };
  drawSeries("percentile");
  drawSeries("p100");
  drawSeries("p100prime");
}

function renderHistogram(response) {
  const canvas = $("histogram");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const panelHeight = canvas.height / 2;
  response.series.forEach((series, index) => {
    drawHistogramPanel(ctx, series, {
      left: 56,
      right: 16,
      top: index * panelHeight + 14,
      height: panelHeight - 52,
    });
  });
}

function drawHistogramPanel(ctx, series, box) {
  const bins = series.bins;
  const w = ctx.canvas.width - box.left - box.right;
  const maxCount = Math.max(1, ...bins.map((b) => b.count));
  const barWidth = w / bins.length;

  ctx.font = "12px system-ui";
  ctx.fillStyle = "#1c2733";
  ctx.textAlign = "left";
  const total = bins.reduce((acc, b) => acc + b.count, 0);
  const label = series.name === "all_papers" ? "all papers" : "unique citations";
  ctx.fillText(`${label} (n = ${total})`, box.left, box.top + 4);

  const base = box.top + box.height;
  ctx.strokeStyle = "#e4e9ee";
  ctx.beginPath();
  ctx.moveTo(box.left, base + 0.5);
  ctx.lineTo(box.left + w, base + 0.5);
  ctx.stroke();

  ctx.fillStyle = series.name === "all_papers" ? "#93b4f5" : "#f0a3a3";
  ctx.strokeStyle = series.name === "all_papers" ? "#2563eb" : "#dc2626";
  bins.forEach((bin, i) => {
    const barHeight = ((box.height - 14) * bin.count) / maxCount;
    const x = box.left + i * barWidth;
    if (bin.count > 0) {
      ctx.fillRect(x + 0.5, base - barHeight, Math.max(1, barWidth - 1), barHeight);
      ctx.strokeRect(x + 0.5, base - barHeight, Math.max(1, barWidth - 1), barHeight);
    }
  });

  // Log-scale ticks on the shared x axis.
  ctx.fillStyle = "#5b6b7b";
  ctx.textAlign = "center";
  const tickStep = Math.max(1, Math.ceil(bins.length / 12));
  bins.forEach((bin, i) => {
    if (i % tickStep === 0) {
      ctx.fillText(bin.low.toFixed(2), box.left + i * barWidth, base + 16);
    }
  });
  const last = bins[bins.length - 1];
  ctx.fillText(last.high.toFixed(2), box.left + bins.length * barWidth, base + 16);
  ctx.fillText("log(citations + 1)", box.left + w / 2, base + 32);
}

function currentInput() {
  return $("citations").value;
}

function rescore() {
  try {
    const table = JSON.parse(score_set(currentInput()));
    renderTable(table);
    renderChart(table);
    rebin();
    setStatus("");
  } catch (err) {
    setStatus(String(err));
  }
}

function rebin() {
  try {
    const base = Number($("log-base").value);
    const width = Number($("bin-width").value);
    const response = JSON.parse(distribution_bins(currentInput(), base, width));
    renderHistogram(response);
    setStatus("");
  } catch (err) {
    setStatus(String(err));
  }
}

function sample() {
  try {
    const counts = JSON.parse(
      sample_citations(
        Number($("sample-n").value),
        Number($("sample-location").value),
        Number($("sample-shape").value),
        Number($("sample-seed").value)
      )
    );
    $("citations").value = counts.join(" ");
    rescore();
  } catch (err) {
    setStatus(String(err));
  }
}

init().then(() => {
  $("score").addEventListener("click", rescore);
  $("bin").addEventListener("click", rebin);
  $("sample").addEventListener("click", sample);
  $("citations").addEventListener("keydown", (event) => {
    if (event.key === "Enter" && (event.ctrlKey || event.metaKey)) rescore();
  });
  rescore();
}).catch((err) => setStatus(`failed to load wasm module: ${err}`));
