//! Browser bindings: trace a phantom, plot a cost profile and compare
//! interpolation schemes. Every function returns a string for the page to
//! insert directly.

use georay::experiments::{cost_profile, default_cost_path, standard_schemes};
use georay::geodesic::{field_point_to_region, TrackingMode, TrackingParams};
use georay::phantom::{add_rician, fit_dti, planar_scheme, preset, simulate_signal, PresetKind};
use georay::svg::{field_svg, line_plot, Series, TrackLayer};
use georay::tensor_core::{hilbert_anisotropy, BetaScaled, Mat3, MetricScheme, SpdTensor};
use georay::tensor_field::{loge_geodesic, sq_geodesic, Grid, InterpolationMethod, TensorField};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn scheme_from(name: &str, p: u32) -> Result<MetricScheme, JsError> {
    match name {
        "inverse" => Ok(MetricScheme::Inverse),
        "adjugate" => Ok(MetricScheme::Adjugate),
        "beta" => Ok(MetricScheme::BetaScaled(BetaScaled::with_p(p))),
        _ => Err(err(format!("unknown metric {name:?}"))),
    }
}

/// Trace the preset's seed region on a phantom, optionally re-fitted from
/// noisy signals. Returns JSON `{svg, hit_fraction, hit_count, n_tracks}`.
#[wasm_bindgen]
pub fn trace_phantom(shape: &str, metric: &str, p: u32, hybrid: bool, noise: f64, seed: u32) -> Result<String, JsError> {
    let kind: PresetKind = shape.parse().map_err(err)?;
    let pr = preset(kind, 90.0).map_err(err)?;
    let ph = pr.phantom.rasterize().map_err(err)?;
    let field = if noise > 0.0 {
        let scheme = planar_scheme(81, 1500.0, 1.0).map_err(err)?;
        let s = simulate_signal(&ph, &scheme, 2).map_err(err)?;
        fit_dti(&add_rician(&s, noise, seed as u64).map_err(err)?, &scheme).map_err(err)?
    } else {
        ph.dt_field.clone()
    };
    let params = TrackingParams {
        scheme: scheme_from(metric, p)?,
        mode: if hybrid { TrackingMode::Hybrid } else { TrackingMode::Pure },
        ..Default::default()
    };
    let r = field_point_to_region(&field, &pr.seeds, &pr.target, &params).map_err(err)?;
    let svg = field_svg(&field, &[TrackLayer { label: "tracks", tracks: &r.tracks }]);
    Ok(serde_json::json!({
        "svg": svg,
        "hit_fraction": r.hit_fraction(),
        "hit_count": r.hit_count,
        "n_tracks": r.tracks.len(),
    })
    .to_string())
}

/// Log-scale plot of the directional cost along the anisotropic to
/// isotropic to anisotropic path for the three metrics.
#[wasm_bindgen]
pub fn cost_profile_svg(method: &str) -> Result<String, JsError> {
    let method = match method {
        "euclidean" => InterpolationMethod::Euclidean,
        "log_euclidean" => InterpolationMethod::LogEuclidean,
        "spectral_quaternion" => InterpolationMethod::SpectralQuaternion,
        _ => return Err(err(format!("unknown interpolation {method:?}"))),
    };
    let (a, b) = default_cost_path();
    let schemes = standard_schemes();
    let s = cost_profile(&a, &b, 101, &schemes, method).map_err(err)?;
    let labels: Vec<String> = schemes.iter().map(|m| m.label()).collect();
    let series: Vec<Series> = labels
        .iter()
        .enumerate()
        .map(|(k, l)| Series { name: l, points: s.iter().map(|x| (x.t, x.costs[k])).collect() })
        .collect();
    line_plot("Riemannian cost along the path", "t", "cost (log10)", &series, true).map_err(err)
}

/// Glyph strip between a fiber tensor and its copy rotated by `angle_deg`:
/// log-Euclidean on the bottom row, spectral-quaternion on the top. Returns
/// JSON `{svg, ha_loge, ha_sq}` with the HA of each row.
#[wasm_bindgen]
pub fn interpolation_strip(angle_deg: f64) -> Result<String, JsError> {
    let t1 = SpdTensor::diag(&[1.7e-3, 0.3e-3]).map_err(err)?;
    let (c, s) = (angle_deg.to_radians().cos(), angle_deg.to_radians().sin());
    let r = Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
    let t2 = SpdTensor::new(2, r * t1.matrix() * r.transpose()).map_err(err)?;
    let n = 11;
    let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let loge: Vec<SpdTensor> = ts.iter().map(|t| loge_geodesic(&t2, &t1, *t)).collect();
    let sq: Vec<SpdTensor> = ts.iter().map(|t| sq_geodesic(&t1, &t2, *t)).collect();
    let grid = Grid::unit(&[n, 2]).map_err(err)?;
    let field = TensorField::new(grid, loge.iter().chain(&sq).copied().collect()).map_err(err)?;
    let ha = |v: &[SpdTensor]| v.iter().map(hilbert_anisotropy).collect::<Vec<_>>();
    Ok(serde_json::json!({ "svg": field_svg(&field, &[]), "ha_loge": ha(&loge), "ha_sq": ha(&sq) }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_keeps_spectral_anisotropy() {
        let v: serde_json::Value = serde_json::from_str(&interpolation_strip(80.0).unwrap()).unwrap();
        let sq: Vec<f64> = v["ha_sq"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let loge: Vec<f64> = v["ha_loge"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!(sq.iter().all(|h| (h - sq[0]).abs() < 1e-9));
        assert!(loge[5] < sq[0] - 0.1);
        assert_eq!(v["svg"].as_str().unwrap().matches("<ellipse").count(), 22);
    }

    #[test]
    fn line_phantom_trace() {
        let v: serde_json::Value = serde_json::from_str(&trace_phantom("line", "beta", 2, true, 0.0, 1).unwrap()).unwrap();
        assert_eq!(v["hit_fraction"], 1.0);
        assert!(cost_profile_svg("log_euclidean").unwrap().contains("<polyline"));
    }
}
