import init, { zipf, smooth, network } from "./pkg/paremio_demo.js";

const $ = (id) => document.getElementById(id);

const SAMPLE_COUNTS = [
  "hold your tongue\t2284", "time flies\t1500", "better late than never\t1020",
  "actions speak louder than words\t760", "the early bird catches the worm\t610",
  "all that glitters is not gold\t505", "look before you leap\t430",
  "practice makes perfect\t380", "haste makes waste\t335", "still waters run deep\t300",
].join("\n");

const SAMPLE_LEXICON = "time flies\nbetter late than never\nlook before you leap\nhaste makes waste";

const SAMPLE_DOCS = `letter-1
Time flies, my friend. Better late than never.

letter-2
Better late than never, though haste makes waste.

letter-3
Haste makes waste; look before you leap.

letter-4
Look before you leap.

letter-5
Time flies when you look before you leap.`;

function fail(el, e) {
  el.textContent = String(e);
  el.className = "out err";
}

function ok(el, text) {
  el.textContent = text;
  el.className = "out";
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
}

function runZipf() {
  const out = $("zipf-out");
  let view;
  try {
    view = JSON.parse(zipf($("zipf-counts").value, +$("zipf-from").value, +$("zipf-to").value, $("zipf-order").checked));
  } catch (e) {
    return fail(out, e);
  }
  const f = view.fit;
  ok(out, f
    ? `alpha ${f.alpha.toFixed(4)}  c ${f.c.toPrecision(6)}  r² ${f.r_squared.toFixed(4)}  ranks ${f.from}-${f.to}`
    : "fewer than three ranks; no fit");

  const cv = $("zipf-plot"), ctx = cv.getContext("2d"), pad = 30;
  axes(ctx, cv.width, cv.height, pad);
  if (!view.rows.length) return;
  const xs = view.rows.map((r) => Math.log10(r.rank));
  const ys = view.rows.map((r) => Math.log10(r.frequency));
  const xmax = Math.max(...xs) || 1, ymin = Math.min(...ys), ymax = Math.max(...ys);
  const sx = (x) => pad + (x / xmax) * (cv.width - 2 * pad);
  const sy = (y) => cv.height - pad - ((y - ymin) / (ymax - ymin || 1)) * (cv.height - 2 * pad);
  ctx.fillStyle = "#236";
  xs.forEach((x, i) => ctx.fillRect(sx(x) - 2, sy(ys[i]) - 2, 4, 4));
  if (f) {
    ctx.strokeStyle = "#c33";
    ctx.beginPath();
    const line = (r) => Math.log10(f.c) - f.alpha * Math.log10(r);
    ctx.moveTo(sx(Math.log10(f.from)), sy(line(f.from)));
    ctx.lineTo(sx(Math.log10(f.to)), sy(line(f.to)));
    ctx.stroke();
  }
}

function runSmooth() {
  const w = +$("smooth-window").value;
  $("smooth-w").textContent = w;
  const out = $("smooth-out");
  let view;
  try {
    view = JSON.parse(smooth($("smooth-values").value, w));
  } catch (e) {
    return fail(out, e);
  }
  ok(out, view.smoothed.map((v) => (v === null ? "-" : v.toFixed(3))).join("  "));

  const cv = $("smooth-plot"), ctx = cv.getContext("2d"), pad = 20;
  axes(ctx, cv.width, cv.height, pad);
  const all = view.raw.concat(view.smoothed).filter((v) => v !== null);
  if (!all.length) return;
  const lo = Math.min(...all), hi = Math.max(...all), n = view.raw.length;
  const sx = (i) => pad + (n > 1 ? i / (n - 1) : 0.5) * (cv.width - 2 * pad);
  const sy = (v) => cv.height - pad - ((v - lo) / (hi - lo || 1)) * (cv.height - 2 * pad);
  ctx.fillStyle = "#888";
  view.raw.forEach((v, i) => v !== null && ctx.fillRect(sx(i) - 2, sy(v) - 2, 4, 4));
  ctx.strokeStyle = "#236";
  ctx.beginPath();
  let pen = false;
  view.smoothed.forEach((v, i) => {
    if (v === null) { pen = false; return; }
    pen ? ctx.lineTo(sx(i), sy(v)) : ctx.moveTo(sx(i), sy(v));
    pen = true;
  });
  ctx.stroke();
}

function runNetwork() {
  const out = $("net-out");
  let view;
  try {
    view = JSON.parse(network($("net-lexicon").value, $("net-docs").value, $("net-norm").checked));
  } catch (e) {
    return fail(out, e);
  }
  const ranked = view.nodes.map((n, i) => [n, i]).sort((a, b) => b[0].betweenness - a[0].betweenness);
  ok(out, ranked.map(([n]) => `${n.betweenness.toFixed(4)}  ${n.label}  (${n.proverbs.join("; ")})`).join("\n")
    || "no document matched a phrase");

  const cv = $("net-plot"), ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const n = view.nodes.length, r = Math.min(cv.width, cv.height) / 2 - 50;
  const pos = view.nodes.map((_, i) => [
    cv.width / 2 + r * Math.cos((2 * Math.PI * i) / Math.max(n, 1)),
    cv.height / 2 + r * Math.sin((2 * Math.PI * i) / Math.max(n, 1)),
  ]);
  ctx.strokeStyle = "#aaa";
  for (const [a, b] of view.edges) {
    ctx.beginPath();
    ctx.moveTo(...pos[a]);
    ctx.lineTo(...pos[b]);
    ctx.stroke();
  }
  const top = Math.max(...view.nodes.map((v) => v.betweenness), 0) || 1;
  view.nodes.forEach((v, i) => {
    ctx.fillStyle = `hsl(210, 60%, ${75 - 45 * (v.betweenness / top)}%)`;
    ctx.beginPath();
    ctx.arc(...pos[i], 6 + 14 * (v.betweenness / top), 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#000";
    ctx.fillText(v.label, pos[i][0] + 12, pos[i][1] - 10);
  });
}

await init();
$("zipf-counts").value = SAMPLE_COUNTS;
$("smooth-values").value = "0.1 0.3 0.2 - 0.5 0.4 0.6 0.9 0.7 - - 0.8 1.1 0.9 1.3";
$("net-lexicon").value = SAMPLE_LEXICON;
$("net-docs").value = SAMPLE_DOCS;
$("zipf-run").onclick = runZipf;
$("smooth-window").oninput = runSmooth;
$("smooth-values").oninput = runSmooth;
$("net-run").onclick = runNetwork;
runZipf();
runSmooth();
runNetwork();
