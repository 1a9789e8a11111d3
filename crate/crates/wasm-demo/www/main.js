import init, { compare, positions, decision } from "./pkg/chipsplit_wasm_demo.js";

const money = (x) => x.toFixed(2);
const pct = (x) => (100 * x).toFixed(1) + "%";

function table(head, rows) {
  const cell = (tag) => (c) => `<${tag}>${c}</${tag}>`;
  return `<table><tr>${head.map(cell("th")).join("")}</tr>` +
    rows.map((r) => `<tr>${r.map(cell("td")).join("")}</tr>`).join("") + "</table>";
}

function show(section, raw, render) {
  const out = section.querySelector(".out");
  const v = JSON.parse(raw);
  out.innerHTML = v.error ? `<p class="error">${v.error.code}: ${v.error.message}</p>` : render(v);
}

function field(section, name) {
  return section.querySelector(`[name=${name}]`).value;
}

function badge(d) {
  if (d === null) return "n/a";
  const s = (d >= 0 ? "+" : "") + d.toFixed(1) + "%";
  return `<span class="${d > 0.05 ? "up" : d < -0.05 ? "down" : ""}">${s}</span>`;
}

function runCompare(s) {
  show(s, compare(field(s, "stacks"), field(s, "prizes")), (v) => {
    const n = v.icm.equity.length;
    const head = ["", ...Array.from({ length: n }, (_, i) => `player ${i + 1}`)];
    return table(head, [
      ["icm", ...v.icm.equity.map(money)],
      ["dcm", ...v.dcm.equity.map(money)],
      ["dcm vs icm", ...v.percent_diff.map(badge)],
    ]);
  });
}

function runPositions(s) {
  show(s, positions(field(s, "stacks"), field(s, "model")), (v) => {
    const n = v.positions.length;
    const head = ["position", ...Array.from({ length: n }, (_, i) => `player ${i + 1}`)];
    const rows = Array.from({ length: n }, (_, k) => [k + 1, ...v.positions.map((p) => (100 * p[k]).toFixed(2) + "%")]);
    return table(head, rows);
  });
}

// EV of calling is linear in hand equity, so the slider only re-evaluates
// e_win and e_lose from the last computed response.
let cached = null;

function renderDecision(s) {
  const e = field(s, "equity") / 100;
  s.querySelector(".eq").textContent = (100 * e).toFixed(1) + "%";
  if (!cached) return;
  show(s, cached, (v) => {
    const row = (r) => {
      const call = e * r.e_win + (1 - e) * r.e_lose;
      return [r.model, money(call), money(r.ev_fold), r.threshold === null ? "none" : pct(r.threshold), call > r.ev_fold ? "call" : "fold"];
    };
    return table(["model", "ev call", "ev fold", "break-even", "action"], [row(v.icm), row(v.dcm)]);
  });
}

function runDecision(s) {
  cached = decision(field(s, "prizes"), Number(field(s, "hero")), field(s, "fold"), field(s, "win"), field(s, "lose"), field(s, "equity") / 100);
  renderDecision(s);
}

await init();
for (const [id, run] of [["compare", runCompare], ["positions", runPositions], ["decision", runDecision]]) {
  const s = document.getElementById(id);
  for (const el of s.querySelectorAll("input, select")) {
    el.addEventListener(el.name === "equity" ? "input" : "change", () => (el.name === "equity" ? renderDecision(s) : run(s)));
  }
  run(s);
}
