import init, { analyze, curve, sweep } from "./pkg/xdiscord_wasm.js";

const PRESETS = {
  bell: [0.5, 0, 0, 0.5, 1, 0],
  classical: [0.4, 0.3, 0.2, 0.1, 0, 0],
  oblate: [0.3, 0.2, 0.2, 0.3, 0.25 / 0.3, 0.25],
  counter: [0.6717, 0.125, 0.125, 0.0783, 0, 0.8],
  inflect: [0.6717, 0.125, 0.125, 0.0783, 0.2822, 0.2822],
};
const KIND_COLORS = {
  Horizontal: "#d8e8fb",
  Vertical: "#e6e6e6",
  TriangleUpper: "#fbd8d8",
  TriangleLower: "#f6e2c6",
};
const ids = ["a", "b", "c", "d", "s1", "s2"];
const $ = (id) => document.getElementById(id);
const fmt = (x) => (x === null || x === undefined ? "" : Number(x).toPrecision(8));

function diagonal() {
  const raw = ["a", "b", "c", "d"].map((k) => Number($(k).value));
  const sum = raw.reduce((s, x) => s + x, 0);
  return sum > 0 ? raw.map((x) => x / sum) : [0.25, 0.25, 0.25, 0.25];
}

function currentState() {
  const [a, b, c, d] = diagonal();
  const u = Number($("s1").value) * Math.sqrt(a * d);
  const v = Number($("s2").value) * Math.sqrt(b * c);
  return [a, b, c, d, u, v];
}

function showError(message) {
  $("error").textContent = message || "";
}

function frame(canvas, xmin, xmax, ymin, ymax, pad = 40) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const px = (x) => pad + ((x - xmin) / (xmax - xmin)) * w;
  const py = (y) => pad + h - ((y - ymin) / (ymax - ymin)) * h;
  return { ctx, px, py, pad, w, h };
}

function axes(f, xmin, xmax, ymin, ymax, xlabel, ylabel) {
  const { ctx, px, py } = f;
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(px(xmin), py(ymax), px(xmax) - px(xmin), py(ymin) - py(ymax));
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.fillText(fmt(xmin).slice(0, 7), px(xmin), py(ymin) + 16);
  ctx.fillText(fmt(xmax).slice(0, 7), px(xmax) - 40, py(ymin) + 16);
  ctx.fillText(fmt(ymin).slice(0, 7), 2, py(ymin));
  ctx.fillText(fmt(ymax).slice(0, 7), 2, py(ymax) + 10);
  ctx.fillText(xlabel, (px(xmin) + px(xmax)) / 2, py(ymin) + 30);
  ctx.fillText(ylabel, px(xmin) + 4, py(ymax) - 6);
}

function polyline(ctx, xs, ys, style, width = 2, dash = []) {
  ctx.strokeStyle = style;
  ctx.lineWidth = width;
  ctx.setLineDash(dash);
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(x, ys[i]) : ctx.moveTo(x, ys[i])));
  ctx.stroke();
  ctx.setLineDash([]);
}

function dot(ctx, x, y, r, fill) {
  ctx.fillStyle = fill;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
}

function drawDisk(analysis) {
  const f = frame($("disk"), -1.05, 1.05, -1.05, 1.05, 10);
  const { ctx, px, py } = f;
  const e = analysis.ellipse;
  const circle = [...Array(241).keys()].map((i) => (i / 240) * 2 * Math.PI);
  polyline(ctx, circle.map((t) => px(Math.sin(t))), circle.map((t) => py(Math.cos(t))), "#bbb", 1);
  polyline(ctx, [px(0), px(0)], [py(-1), py(1)], "#eee", 1);
  polyline(ctx, [px(-1), px(1)], [py(0), py(0)], "#eee", 1);
  polyline(
    ctx,
    circle.map((t) => px(e.l1 * Math.sin(t))),
    circle.map((t) => py(e.z0 + e.l3 * Math.cos(t))),
    "#1f5fbf",
    2,
  );
  const b = [px(0), py(e.z_b)];
  for (const c of analysis.result.decomposition.components) {
    polyline(ctx, [b[0], px(c.point.x)], [b[1], py(c.point.z)], "#c33", 1, [4, 3]);
    dot(ctx, px(c.point.x), py(c.point.z), 3 + 12 * Math.sqrt(c.weight), "rgba(204,51,51,0.8)");
  }
  dot(ctx, b[0], b[1], 4, "#000");
  ctx.fillStyle = "#000";
  ctx.fillText("B", b[0] + 6, b[1] - 6);
  ctx.fillText("x", px(1) - 10, py(0) - 4);
  ctx.fillText("z", px(0) + 4, py(1) + 10);
}

function drawCurve(data) {
  const ys = data.s_horizontal.concat(data.s_vertical, [data.s_bar_min]);
  let [ymin, ymax] = [Math.min(...ys), Math.max(...ys)];
  const margin = (ymax - ymin) * 0.08 || 0.01;
  [ymin, ymax] = [ymin - margin, ymax + margin];
  const [xmin, xmax] = [data.z[0], data.z[data.z.length - 1]];
  const f = frame($("curve"), xmin, xmax, ymin, ymax);
  const { ctx, px, py } = f;
  axes(f, xmin, xmax, ymin, ymax, "z", "bits");
  polyline(ctx, data.z.map(px), data.s_vertical.map(py), "#888", 1.5, [6, 4]);
  polyline(ctx, data.z.map(px), data.s_horizontal.map(py), "#1f5fbf", 2);
  // inflection points: sign changes of the second derivative
  for (let i = 1; i < data.d2.length; i++) {
    const [p, q] = [data.d2[i - 1], data.d2[i]];
    if (p !== null && q !== null && p * q < 0) dot(ctx, px(data.z[i]), py(data.s_horizontal[i]), 4, "#e08a00");
  }
  const sup = data.support;
  if (sup.length === 2) {
    polyline(ctx, sup.map((p) => px(p[0])), sup.map((p) => py(p[1])), "#c33", 2);
  }
  sup.forEach((p) => dot(ctx, px(p[0]), py(p[1]), 3.5, "#c33"));
  polyline(ctx, [px(data.z_b), px(data.z_b)], [py(ymin), py(ymax)], "#ccc", 1, [2, 3]);
  dot(ctx, px(data.z_b), py(data.s_bar_min), 4, "#000");
}

function clearCanvas(id, message) {
  const canvas = $(id);
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#666";
  ctx.fillText(message, 20, 30);
}

function report(analysis) {
  const r = analysis.result;
  const d = r.decomposition;
  const rows = [
    ["I", fmt(r.mutual_information)],
    ["C", fmt(r.classical_correlation)],
    ["Q", fmt(r.discord)],
    ["S_min", fmt(d.s_bar_min)],
    ["kind", d.kind],
    ["ellipse type", r.ellipse_class.type],
  ];
  if (d.z_star !== null) rows.push(["z*", fmt(d.z_star)], ["p*", fmt(d.p_star)]);
  const povm = analysis.povm.elements
    .map((e) => `<tr><td>${fmt(e.t)}</td><td>${fmt(e.n.x)}</td><td>${fmt(e.n.z)}</td></tr>`)
    .join("");
  $("report").innerHTML =
    rows.map(([k, v]) => `<tr><th>${k}</th><td colspan="2">${v}</td></tr>`).join("") +
    `<tr><th colspan="3">POVM t, n_x, n_z</th></tr>${povm}`;
}

function update() {
  const diag = diagonal();
  ["a", "b", "c", "d"].forEach((k, i) => ($(k).nextElementSibling.value = diag[i].toFixed(4)));
  ["s1", "s2"].forEach((k) => ($(k).nextElementSibling.value = Number($(k).value).toFixed(4)));
  const s = currentState();
  try {
    const analysis = JSON.parse(analyze(...s));
    showError("");
    report(analysis);
    drawDisk(analysis);
  } catch (err) {
    showError(String(err.message || err));
    return;
  }
  try {
    drawCurve(JSON.parse(curve(...s, 400)));
  } catch (err) {
    clearCanvas("curve", String(err.message || err));
  }
}

function runSweep() {
  const [a, b, c, d] = diagonal();
  let rows;
  try {
    rows = JSON.parse(
      sweep(a, b, c, d, $("k1").value, $("k2").value, Number($("kmin").value), Number($("kmax").value), Number($("kstep").value)),
    );
    showError("");
  } catch (err) {
    showError(String(err.message || err));
    return;
  }
  const ks = rows.map((r) => r.k);
  const ys = rows.flatMap((r) => [r.discord, r.classical_correlation]);
  const [xmin, xmax] = [ks[0], ks[ks.length - 1] === ks[0] ? ks[0] + 1e-9 : ks[ks.length - 1]];
  let [ymin, ymax] = [Math.min(0, ...ys), Math.max(...ys)];
  ymax += (ymax - ymin) * 0.08 || 0.01;
  const f = frame($("sweep"), xmin, xmax, ymin, ymax);
  const { ctx, px, py } = f;
  rows.forEach((r, i) => {
    const left = i ? (ks[i - 1] + r.k) / 2 : r.k;
    const right = i < rows.length - 1 ? (ks[i + 1] + r.k) / 2 : r.k;
    ctx.fillStyle = KIND_COLORS[r.kind];
    ctx.fillRect(px(left), py(ymax), Math.max(1, px(right) - px(left)), py(ymin) - py(ymax));
  });
  axes(f, xmin, xmax, ymin, ymax, "k", "bits");
  polyline(ctx, ks.map(px), rows.map((r) => py(r.discord)), "#000", 2);
  polyline(ctx, ks.map(px), rows.map((r) => py(r.classical_correlation)), "#1f5fbf", 1.5, [5, 3]);
  let y = py(ymax) + 14;
  for (const [kind, color] of Object.entries(KIND_COLORS)) {
    ctx.fillStyle = color;
    ctx.fillRect(px(xmax) - 110, y - 10, 12, 12);
    ctx.fillStyle = "#333";
    ctx.fillText(kind, px(xmax) - 94, y);
    y += 15;
  }
  ctx.fillText("Q solid, C dashed", px(xmin) + 6, py(ymax) + 14);
}

function loadPreset(name) {
  PRESETS[name].forEach((x, i) => ($(ids[i]).value = x));
  update();
}

await init();
ids.forEach((id) => $(id).addEventListener("input", update));
document.querySelectorAll("[data-preset]").forEach((b) => b.addEventListener("click", () => loadPreset(b.dataset.preset)));
$("run-sweep").addEventListener("click", runSweep);
loadPreset("counter");
runSweep();
