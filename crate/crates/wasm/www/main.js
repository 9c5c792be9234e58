import init, { trace_phantom, cost_profile_svg, interpolation_strip } from "./pkg/georay_wasm.js";

const $ = (id) => document.getElementById(id);

function guard(fn, statId) {
  try {
    fn();
  } catch (e) {
    $(statId).textContent = `error: ${e.message ?? e}`;
  }
}

function trace() {
  guard(() => {
    $("trace-stat").textContent = "tracing…";
    const r = JSON.parse(trace_phantom(
      $("shape").value, $("metric").value, Number($("p").value), $("hybrid").checked,
      Number($("noise").value), Number($("seed").value),
    ));
    $("trace-out").innerHTML = r.svg;
    $("trace-stat").textContent = `hits ${r.hit_count}/${r.n_tracks} (${(100 * r.hit_fraction).toFixed(0)}%)`;
  }, "trace-stat");
}

function cost() {
  $("cost-out").innerHTML = cost_profile_svg($("method").value);
}

function strip() {
  guard(() => {
    const a = Number($("angle").value);
    $("angle-val").textContent = a;
    const r = JSON.parse(interpolation_strip(a));
    $("strip-out").innerHTML = r.svg;
    const fmt = (v) => v.map((x) => x.toFixed(2)).join(" ");
    $("strip-stat").textContent = `HA log-Euclidean: ${fmt(r.ha_loge)}\nHA spectral: ${fmt(r.ha_sq)}`;
  }, "strip-stat");
}

await init();
$("trace").addEventListener("click", trace);
$("method").addEventListener("change", cost);
$("angle").addEventListener("input", strip);
trace();
cost();
strip();
