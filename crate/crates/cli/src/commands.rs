use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use georay::experiments::{self, argmax_cost, default_cost_path};
use georay::geodesic::{field_point_to_region, RegionResult, TrackingMode, TrackingParams};
use georay::io::{read_envelope, read_field, read_signals, read_tracks, signal_files, track_files, TrackFile, TrackRecord};
use georay::phantom::{
    add_rician, fit_dti, fit_tensor4_field, gradient_scheme, planar_scheme, preset, simulate_signal, AcquisitionScheme,
    Phantom, Preset,
};
use georay::svg::{field_svg, line_plot, Series, TrackLayer};
use georay::tensor4::{track_crossing, Tensor4Field};
use georay::tensor_core::{BetaScaled, MetricScheme, SpdTensor};
use georay::tensor_field::{Grid, TensorField};
use serde::Serialize;

use crate::config::{load, AngleSweepConfig, CostProfileConfig, FitConfig, PhantomConfig, PlotConfig, TrackConfig};
use crate::output::Outputs;
use crate::{Common, ModeArg, SchemeArg};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn field_order(path: &Path) -> Result<u8> {
    let (env, _) = read_envelope(path).with_context(|| format!("reading {}", path.display()))?;
    env.order.ok_or_else(|| anyhow!("{} is not a tensor field", path.display()))
}

pub fn phantom(
    c: &Common,
    shape: Option<String>,
    angle: Option<f64>,
    noise: Option<f64>,
    orders: Vec<u8>,
    gradients: Option<usize>,
) -> Result<Vec<PathBuf>> {
    let mut cfg: PhantomConfig = load(c.config.as_deref())?;
    if let Some(s) = shape {
        cfg.shape = s.parse()?;
    }
    if let Some(a) = angle {
        cfg.angle = a;
    }
    if let Some(n) = noise {
        cfg.noise = n;
    }
    if !orders.is_empty() {
        cfg.orders = orders;
    }
    if let Some(n) = gradients {
        cfg.n_gradients = n;
    }
    if let Some(s) = c.seed {
        cfg.rng_seed = s;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    cfg.orders.sort_unstable();
    cfg.orders.dedup();
    ensure!(!cfg.orders.is_empty(), "at least one fit order is required");
    if let Some(o) = cfg.orders.iter().find(|o| !matches!(o, 2 | 4)) {
        bail!("fit order must be 2 or 4, got {o}");
    }
    ensure!(cfg.noise >= 0.0 && cfg.noise.is_finite(), "noise must be non-negative, got {}", cfg.noise);

    let mut preset = preset(cfg.shape, cfg.angle)?;
    if let Some(p) = cfg.phantom.clone() {
        preset.phantom = p;
    }
    let ph = preset.phantom.rasterize()?;
    let scheme = match ph.dim() {
        2 => planar_scheme(cfg.n_gradients, cfg.b, cfg.s0)?,
        _ => gradient_scheme(cfg.n_gradients, cfg.b, cfg.s0)?,
    };
    // order-4 signals carry the crossing information; a single order-2
    // request keeps the plain tensor model
    let model = if cfg.orders.contains(&4) { 4 } else { 2 };
    let signals = add_rician(&simulate_signal(&ph, &scheme, model)?, cfg.noise, cfg.rng_seed)?;

    let mut out = Outputs::new(&cfg.out);
    out.add_json("config.json", &cfg)?;
    out.add_json("preset.json", &preset)?;
    out.add_json("scheme.json", &scheme)?;
    out.extend(ph.bundle_files(&cfg.out, cfg.encoding)?);
    out.extend(signal_files(&out.path("signals.json"), &signals, cfg.encoding)?);
    for order in &cfg.orders {
        match order {
            2 => out.extend(georay::io::field_files(&out.path("fit2.json"), &fit_dti(&signals, &scheme)?, cfg.encoding)?),
            _ => out.extend(fit_tensor4_field(&signals, &scheme)?.files(&out.path("fit4.json"), cfg.encoding)?),
        }
    }
    out.commit()
}

pub fn fit(c: &Common, signals: Option<PathBuf>, scheme: Option<PathBuf>, order: Option<u8>) -> Result<Vec<PathBuf>> {
    let mut cfg: FitConfig = load(c.config.as_deref())?;
    if let Some(s) = signals {
        cfg.signals = s;
    }
    if let Some(s) = scheme {
        cfg.scheme = s;
    }
    if let Some(o) = order {
        cfg.order = o;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    ensure!(matches!(cfg.order, 2 | 4), "fit order must be 2 or 4, got {}", cfg.order);
    let scheme: AcquisitionScheme = read_json(&cfg.scheme)?;
    scheme.validate()?;
    let signals = read_signals(&cfg.signals).with_context(|| format!("reading {}", cfg.signals.display()))?;

    let mut out = Outputs::new(&cfg.out);
    if cfg.order == 2 {
        out.extend(georay::io::field_files(&out.path("fit2.json"), &fit_dti(&signals, &scheme)?, cfg.encoding)?);
    } else {
        out.extend(fit_tensor4_field(&signals, &scheme)?.files(&out.path("fit4.json"), cfg.encoding)?);
    }
    out.commit()
}

#[derive(Serialize)]
struct TrackSummary {
    metric: String,
    mode: TrackingMode,
    n_tracks: usize,
    hit_count: usize,
    hit_fraction: f64,
    mean_length: f64,
    mean_angular_deviation_deg: Option<f64>,
    terminations: BTreeMap<String, usize>,
}

fn summarize(r: &RegionResult, params: &TrackingParams, truth: Option<&Phantom>) -> Result<TrackSummary> {
    let mut terminations = BTreeMap::new();
    for t in &r.tracks {
        let key = serde_json::to_value(t.termination)?.as_str().unwrap_or_default().to_string();
        *terminations.entry(key).or_insert(0) += 1;
    }
    let n = r.tracks.len();
    Ok(TrackSummary {
        metric: params.scheme.label(),
        mode: params.mode,
        n_tracks: n,
        hit_count: r.hit_count,
        hit_fraction: r.hit_fraction(),
        mean_length: if n == 0 { 0.0 } else { r.tracks.iter().map(|t| t.length()).sum::<f64>() / n as f64 },
        mean_angular_deviation_deg: truth.and_then(|p| p.mean_angular_deviation(&r.tracks)),
        terminations,
    })
}

fn track_file(r: &RegionResult, params: &TrackingParams, grid: &Grid) -> TrackFile {
    TrackFile {
        params: *params,
        grid: grid.clone(),
        tracks: r.tracks.iter().zip(&r.hits).map(|(t, h)| TrackRecord::new(t, *h)).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn track(
    c: &Common,
    field: Option<PathBuf>,
    preset_path: Option<PathBuf>,
    metric: Option<SchemeArg>,
    p: Option<u32>,
    mode: Option<ModeArg>,
    step: Option<f64>,
) -> Result<Vec<PathBuf>> {
    let mut cfg: TrackConfig = load(c.config.as_deref())?;
    if field.is_some() {
        cfg.field = field;
    }
    if preset_path.is_some() {
        cfg.preset = preset_path;
    }
    let params = &mut cfg.params;
    if let Some(m) = metric {
        params.scheme = match m {
            SchemeArg::Inverse => MetricScheme::Inverse,
            SchemeArg::Adjugate => MetricScheme::Adjugate,
            SchemeArg::Beta => match params.scheme {
                MetricScheme::BetaScaled(b) => MetricScheme::BetaScaled(b),
                _ => MetricScheme::BetaScaled(BetaScaled::default()),
            },
        };
    }
    if let Some(p) = p {
        match &mut params.scheme {
            MetricScheme::BetaScaled(b) => b.p = p,
            _ => bail!("--p applies to the beta-scaled metric only"),
        }
    }
    if let Some(m) = mode {
        params.mode = match m {
            ModeArg::Pure => TrackingMode::Pure,
            ModeArg::Hybrid => TrackingMode::Hybrid,
        };
    }
    if let Some(h) = step {
        params.step_size = h;
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    let params = cfg.params;
    params.validate()?;

    let preset: Option<Preset> = cfg.preset.as_deref().map(read_json).transpose()?;
    let truth = preset.as_ref().map(|p| p.phantom.rasterize()).transpose()?;
    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("georay-out"));
    let mut out = Outputs::new(&out_dir);

    let order = match &cfg.field {
        Some(f) => field_order(f)?,
        None => 2,
    };
    if order == 4 {
        let path = cfg.field.as_ref().unwrap();
        let f4 = Tensor4Field::read(path).with_context(|| format!("reading {}", path.display()))?;
        let layers = cfg
            .layers
            .clone()
            .or_else(|| preset.as_ref().and_then(|p| p.layers.clone()))
            .ok_or_else(|| anyhow!("an order-4 field needs crossing layers (config `layers` or a cross preset)"))?;
        let results = track_crossing(&f4, &layers, &params)?;
        let mut summaries = Vec::new();
        for lt in &results {
            let name = format!("tracks_layer{}.json", lt.layer + 1);
            out.extend(track_files(&out.path(&name), &track_file(&lt.result, &params, f4.grid()))?);
            summaries.push(summarize(&lt.result, &params, truth.as_ref())?);
        }
        out.add_json("summary.json", &serde_json::json!({ "layers": summaries }))?;
        return out.commit();
    }

    let field: TensorField = match (&cfg.field, &truth) {
        (Some(f), _) => read_field(f).with_context(|| format!("reading {}", f.display()))?,
        (None, Some(t)) => t.dt_field.clone(),
        (None, None) => bail!("track needs --field or --preset"),
    };
    let seeds = cfg
        .seeds
        .clone()
        .or_else(|| preset.as_ref().map(|p| p.seeds.clone()))
        .ok_or_else(|| anyhow!("no seeds given (config `seeds` or --preset)"))?;
    let target = cfg
        .target
        .or_else(|| preset.as_ref().map(|p| p.target))
        .ok_or_else(|| anyhow!("no target given (config `target` or --preset)"))?;
    let result = field_point_to_region(&field, &seeds, &target, &params)?;
    out.extend(track_files(&out.path("tracks.json"), &track_file(&result, &params, field.grid()))?);
    out.add_json("summary.json", &summarize(&result, &params, truth.as_ref())?)?;
    out.commit()
}

fn fmt_row(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    cells.join(",") + "\n"
}

pub fn cost_profile(c: &Common, samples: Option<usize>) -> Result<Vec<PathBuf>> {
    let mut cfg: CostProfileConfig = load(c.config.as_deref())?;
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    ensure!(!cfg.schemes.is_empty(), "at least one metric scheme is required");
    ensure!(cfg.fiber.iter().all(|l| *l > 0.0 && l.is_finite()), "fiber eigenvalues must be positive");
    let (t1, t2) = match (&cfg.t1, &cfg.t2) {
        (Some(a), Some(b)) => (SpdTensor::from_unique(cfg.dim, a)?, SpdTensor::from_unique(cfg.dim, b)?),
        (None, None) => default_cost_path(),
        _ => bail!("give both t1 and t2, or neither"),
    };
    let profile = experiments::cost_profile(&t1, &t2, cfg.samples, &cfg.schemes, cfg.method)?;
    let labels: Vec<String> = cfg.schemes.iter().map(|s| s.label()).collect();

    let mut csv = String::from("t,ha,fa");
    for l in &labels {
        csv.push_str(&format!(",cost_{l}"));
    }
    csv.push('\n');
    for s in &profile {
        let mut row = vec![s.t, s.ha, s.fa];
        row.extend(&s.costs);
        csv.push_str(&fmt_row(&row));
    }
    let series: Vec<Series> = labels
        .iter()
        .enumerate()
        .map(|(k, l)| Series { name: l, points: profile.iter().map(|s| (s.t, s.costs[k])).collect() })
        .collect();
    let svg = line_plot("Riemannian cost along the path", "t", "cost (log10)", &series, true)?;

    let mut gaps = String::from("case,lambda,cost_inverse,cost_adjugate,cost_beta,beta_factor\n");
    for g in experiments::gap_cases(cfg.fiber)? {
        gaps.push_str(&format!("{},", g.case));
        gaps.push_str(&fmt_row(&[g.lambda, g.cost_inverse, g.cost_adjugate, g.cost_beta, g.beta_factor]));
    }
    let peaks: BTreeMap<&str, f64> =
        labels.iter().enumerate().map(|(k, l)| (l.as_str(), profile[argmax_cost(&profile, k).unwrap()].t)).collect();

    let mut out = Outputs::new(&cfg.out);
    out.add("cost_profile.csv", csv);
    out.add("cost_profile.svg", svg);
    out.add("gap_cases.csv", gaps);
    out.add_json("cost_peaks.json", &peaks)?;
    out.commit()
}

pub fn angle_sweep(c: &Common, angles: Vec<f64>, noise: Option<f64>) -> Result<Vec<PathBuf>> {
    let mut cfg: AngleSweepConfig = load(c.config.as_deref())?;
    if !angles.is_empty() {
        cfg.angles = angles;
    }
    if let Some(n) = noise {
        cfg.sweep.noise = n;
    }
    if let Some(s) = c.seed {
        cfg.sweep.rng_seed = s;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    ensure!(!cfg.angles.is_empty(), "no crossing angles given");
    if let Some(a) = cfg.angles.iter().find(|a| !(**a > 0.0 && **a < 180.0)) {
        bail!("crossing angles must lie in (0, 180), got {a}");
    }
    let errors = experiments::angle_sweep(&cfg.angles, &cfg.sweep)?;
    let mut csv = String::from("theta_deg,err_layer1_deg,err_layer2_deg\n");
    for e in &errors {
        csv.push_str(&fmt_row(&[e.theta_deg, e.err_layer1_deg, e.err_layer2_deg]));
    }
    let series = [
        Series { name: "layer 1 (T_xx)", points: errors.iter().map(|e| (e.theta_deg, e.err_layer1_deg)).collect() },
        Series { name: "layer 2 (T_yy)", points: errors.iter().map(|e| (e.theta_deg, e.err_layer2_deg)).collect() },
    ];
    let svg = line_plot("Diagonal-component orientation error", "crossing angle (deg)", "error (deg)", &series, false)?;
    let mut out = Outputs::new(&cfg.out);
    out.add("angle_sweep.csv", csv);
    out.add("angle_sweep.svg", svg);
    out.commit()
}

pub fn plot(c: &Common, field: Option<PathBuf>, tracks: Vec<PathBuf>) -> Result<Vec<PathBuf>> {
    let mut cfg: PlotConfig = load(c.config.as_deref())?;
    if field.is_some() {
        cfg.field = field;
    }
    if !tracks.is_empty() {
        cfg.tracks = tracks;
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    let path = cfg.field.clone().ok_or_else(|| anyhow!("plot needs --field"))?;
    let field = match field_order(&path)? {
        2 => read_field(&path)?,
        _ => Tensor4Field::read(&path)?.diagonal_sum_field()?,
    };
    let mut sets = Vec::new();
    for t in &cfg.tracks {
        let file = read_tracks(t).with_context(|| format!("reading {}", t.display()))?;
        ensure!(
            &file.grid == field.grid(),
            "grid of {} does not match the field {}",
            t.display(),
            path.display()
        );
        let label = t.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        sets.push((label, file.tracks.iter().map(|r| r.to_track()).collect::<Vec<_>>()));
    }
    let layers: Vec<TrackLayer> = sets.iter().map(|(l, t)| TrackLayer { label: l, tracks: t }).collect();
    let mut out = Outputs::new(&cfg.out.unwrap_or_else(|| PathBuf::from("georay-out")));
    out.add("plot.svg", field_svg(&field, &layers));
    out.commit()
}
