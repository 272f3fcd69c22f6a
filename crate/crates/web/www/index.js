import init, { potential_svg, potential_summary, scan_svg, Simulation } from "./pkg/tunnelsim_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const status = (msg) => { $("status").textContent = msg; };

function drawPotential() {
  try {
    const [alpha, beta, eps, tau] = [num("alpha"), num("beta"), num("epsilon"), num("phase")];
    $("potential").innerHTML = potential_svg(alpha, beta, eps, tau, 16.0);
    const [a, b, h, xm] = potential_summary(alpha, beta, eps, tau);
    $("summary").textContent =
      `a = ${a.toFixed(6)}, b = ${b.toFixed(6)}, barrier = ${h.toFixed(4)}, minima = ±${xm.toFixed(4)}`;
    status("");
  } catch (e) {
    status(e.message ?? String(e));
  }
}

let sim = null;
let running = false;

function frame() {
  if (!running || sim === null) return;
  try {
    sim.advance(num("span"));
  } catch (e) {
    running = false;
    status(e.message ?? String(e));
    return;
  }
  $("field").innerHTML = sim.field_svg();
  $("history").innerHTML = sim.history_svg();
  $("readout").textContent =
    `tau = ${sim.tau().toFixed(1)}, P_right = ${sim.prob_right().toFixed(4)}, ` +
    `E = ${sim.energy().toFixed(3)}, transfer cycles = ${sim.transfer_cycles()}`;
  requestAnimationFrame(frame);
}

function start() {
  try {
    if (sim !== null) sim.free();
    sim = new Simulation(num("alpha"), num("beta"), num("epsilon"), parseInt($("npoints").value, 10), num("dtau"));
    status("");
  } catch (e) {
    sim = null;
    status(e.message ?? String(e));
    return;
  }
  running = true;
  requestAnimationFrame(frame);
}

function sweep() {
  status("sweeping...");
  setTimeout(() => {
    try {
      $("scan-plot").innerHTML = scan_svg(
        num("alpha"), num("beta"), num("eps-from"), num("eps-to"),
        parseInt($("eps-steps").value, 10), num("scan-tau"));
      status("");
    } catch (e) {
      status(e.message ?? String(e));
    }
  }, 0);
}

await init();
for (const id of ["alpha", "beta", "epsilon", "phase"]) $(id).addEventListener("input", drawPotential);
$("start").addEventListener("click", start);
$("stop").addEventListener("click", () => { running = !running; if (running) requestAnimationFrame(frame); });
$("scan").addEventListener("click", sweep);
drawPotential();
