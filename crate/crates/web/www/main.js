import init, { timing_diagram, correlation_curve, chsh_experiment } from "./pkg/bellframe_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const ALICE = "#c0392b";
const BOB = "#2471a3";
const CHSH_ANGLES = new Float64Array([0, Math.PI / 2, Math.PI / 4, -Math.PI / 4]);

function geometry() {
  return {
    alice_z: num("alice_z"),
    bob_z: num("bob_z"),
    alice_beta: num("alice_beta"),
    bob_beta: num("bob_beta"),
  };
}

function syncOutputs() {
  for (const out of document.querySelectorAll("output[for]")) {
    out.textContent = Number($(out.htmlFor).value).toFixed(2);
  }
}

function drawDiagram(g, info) {
  const cv = $("diagram");
  const ctx = cv.getContext("2d");
  const zMin = -2.5, zMax = 2.5, tMin = 0, tMax = 3;
  const X = (z) => ((z - zMin) / (zMax - zMin)) * cv.width;
  const Y = (t) => cv.height - ((t - tMin) / (tMax - tMin)) * cv.height;
  const line = (z1, t1, z2, t2, color, dash = []) => {
    ctx.strokeStyle = color;
    ctx.setLineDash(dash);
    ctx.beginPath();
    ctx.moveTo(X(z1), Y(t1));
    ctx.lineTo(X(z2), Y(t2));
    ctx.stroke();
    ctx.setLineDash([]);
  };
  const dot = (z, t, color, text) => {
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(X(z), Y(t), 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText(text, X(z) + 8, Y(t) - 8);
  };

  ctx.clearRect(0, 0, cv.width, cv.height);
  ctx.font = "12px system-ui";
  line(zMin, 0, zMax, 0, "#999");
  line(0, tMin, 0, tMax, "#ddd");
  ctx.fillStyle = "#666";
  ctx.fillText("z (light-seconds)", cv.width - 110, cv.height - 6);
  ctx.fillText("t (s)", X(0) + 4, 12);

  // apparatus worldlines z = z0 + beta (t - t0) through the events
  const worldline = (z0, t0, beta, color) => line(z0 + beta * (tMin - t0), tMin, z0 + beta * (tMax - t0), tMax, color, [2, 3]);
  // lines of simultaneity in a frame moving at beta: t - beta z = const
  const simultaneity = (z0, t0, beta, color) =>
    line(zMin, t0 + beta * (zMin - z0), zMax, t0 + beta * (zMax - z0), color, [8, 4]);

  if (info.error) {
    for (const [z, beta, color] of [[g.alice_z, g.alice_beta, ALICE], [g.bob_z, g.bob_beta, BOB]]) {
      const t = Math.abs(z);
      line(0, 0, z, t, "#f1c40f");
      worldline(z, t, beta, color);
    }
    return;
  }
  const a = info.alice_event, b = info.bob_event;
  line(0, 0, a.z, a.t, "#f1c40f");
  line(0, 0, b.z, b.t, "#f1c40f");
  worldline(a.z, a.t, g.alice_beta, ALICE);
  worldline(b.z, b.t, g.bob_beta, BOB);
  simultaneity(a.z, a.t, g.alice_beta, ALICE);
  simultaneity(b.z, b.t, g.bob_beta, BOB);
  dot(a.z, a.t, ALICE, "A");
  dot(b.z, b.t, BOB, "B");
}

function updateTiming() {
  syncOutputs();
  const g = geometry();
  const info = JSON.parse(timing_diagram(0, g.alice_z, g.bob_z, g.alice_beta, g.bob_beta));
  const text = $("timing_text");
  if (info.error) {
    text.innerHTML = `<span class="error">${info.error}</span>`;
  } else {
    const f = (x) => x.toFixed(4);
    const A = info.in_alice_frame, B = info.in_bob_frame;
    text.innerHTML = `
      <b>${info.class}</b><br>
      interval² = ${f(info.interval_squared)}<br>
      Alice's frame: t′<sub>A</sub> = ${f(A.alice_t)}, t′<sub>B</sub> = ${f(A.bob_t)}<br>
      Bob's frame: t′<sub>A</sub> = ${f(B.alice_t)}, t′<sub>B</sub> = ${f(B.bob_t)}<br>
      <small>dashed lines: simultaneity in each device's frame</small>`;
    $("curve_timing").value = info.class;
  }
  drawDiagram(g, info);
  updateCurve();
}

function updateCurve() {
  const cv = $("curve");
  const ctx = cv.getContext("2d");
  const pts = JSON.parse(
    correlation_curve($("curve_model").value, $("curve_timing").value, 25, Math.max(100, num("curve_trials") | 0), 7),
  );
  ctx.clearRect(0, 0, cv.width, cv.height);
  if (pts.error) {
    ctx.fillStyle = "#b00";
    ctx.fillText(pts.error, 10, 20);
    return;
  }
  const pad = 30;
  const X = (th) => pad + (th / Math.PI) * (cv.width - 2 * pad);
  const Y = (e) => cv.height / 2 - e * (cv.height / 2 - pad);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(pad, Y(0));
  ctx.lineTo(cv.width - pad, Y(0));
  ctx.stroke();
  ctx.fillStyle = "#666";
  ctx.font = "12px system-ui";
  ctx.fillText("+1", 4, Y(1) + 4);
  ctx.fillText("−1", 4, Y(-1) + 4);
  ctx.fillText("θ = b − a: 0 … π", cv.width / 2 - 40, cv.height - 6);

  // reference curves: singlet -cos θ and local -(1 - 2θ/π)
  const ref = (f, color) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    for (let k = 0; k <= 100; k++) {
      const th = (Math.PI * k) / 100;
      k ? ctx.lineTo(X(th), Y(f(th))) : ctx.moveTo(X(th), Y(f(th)));
    }
    ctx.stroke();
  };
  ref((th) => -Math.cos(th), "#d5b8f0");
  ref((th) => -(1 - (2 * th) / Math.PI), "#b8e0c8");

  ctx.fillStyle = "#333";
  for (const p of pts) {
    ctx.fillRect(X(p.theta) - 2, Y(p.estimate) - 2, 4, 4);
    ctx.beginPath();
    ctx.moveTo(X(p.theta), Y(p.estimate - 2 * p.stderr));
    ctx.lineTo(X(p.theta), Y(p.estimate + 2 * p.stderr));
    ctx.stroke();
  }
  ctx.fillStyle = "#8e44ad";
  ctx.fillText("quantum −cos θ", cv.width - 150, 16);
  ctx.fillStyle = "#27ae60";
  ctx.fillText("local −(1 − 2θ/π)", cv.width - 150, 30);
}

function runChsh() {
  const g = geometry();
  const out = $("chsh_out");
  const res = JSON.parse(
    chsh_experiment(
      $("chsh_model").value,
      0,
      g.alice_z,
      g.bob_z,
      g.alice_beta,
      g.bob_beta,
      CHSH_ANGLES,
      Math.max(1, num("chsh_trials") | 0),
      num("chsh_seed") >>> 0,
    ),
  );
  if (res.error) {
    out.innerHTML = `<p class="error">${res.error}</p>`;
    return;
  }
  const r = res.report;
  const rows = r.pairs
    .map(
      (p) => `<tr><td>${p.label}</td><td>${p.counts.n_pp}</td><td>${p.counts.n_pm}</td>
        <td>${p.counts.n_mp}</td><td>${p.counts.n_mm}</td>
        <td>${p.estimate.e_hat.toFixed(4)}</td><td>${p.estimate.stderr.toFixed(4)}</td></tr>`,
    )
    .join("");
  out.innerHTML = `
    <p>timing: <b>${r.timing_class}</b> &nbsp; S = ${r.chsh.s.toFixed(4)} ± ${r.chsh.stderr.toFixed(4)}
       &nbsp; <span class="badge ${res.verdict}">${res.verdict}</span>
       &nbsp; max |z| (no-signaling) = ${Math.max(...r.nosignaling.alice, ...r.nosignaling.bob).toFixed(2)}</p>
    <table><tr><th>pair</th><th>++</th><th>+−</th><th>−+</th><th>−−</th><th>E</th><th>σ</th></tr>${rows}</table>`;
}

function preset(values) {
  for (const [id, v] of Object.entries(values)) $(id).value = v;
  updateTiming();
}

await init();
for (const id of ["alice_z", "bob_z", "alice_beta", "bob_beta"]) $(id).addEventListener("input", updateTiming);
for (const id of ["curve_model", "curve_timing", "curve_trials"]) $(id).addEventListener("change", updateCurve);
$("chsh_run").addEventListener("click", runChsh);
$("preset_standard").addEventListener("click", () => preset({ alice_z: 0.9, bob_z: -1, alice_beta: 0, bob_beta: 0 }));
$("preset_bb").addEventListener("click", () => preset({ alice_z: -1, bob_z: 1, alice_beta: -0.1, bob_beta: 0.1 }));
updateTiming();
