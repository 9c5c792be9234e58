use georay::geodesic::{field_point_to_region, Aabb, SeedRegion, TrackingMode, TrackingParams};
use georay::io::{read_field, read_signals, signal_files, write_field, write_files, Encoding};
use georay::phantom::{add_rician, fit_dti, fit_tensor4_field, planar_scheme, preset, simulate_signal, PresetKind};
use georay::tensor4::{track_crossing, Tensor4Field};
use georay::tensor_core::{BetaScaled, MetricScheme};
use georay::Error;

fn all_schemes() -> [MetricScheme; 3] {
    [MetricScheme::Inverse, MetricScheme::Adjugate, MetricScheme::BetaScaled(BetaScaled::default())]
}

#[test]
fn straight_fiber_is_always_hit() {
    let p = preset(PresetKind::Line, 0.0).unwrap();
    let field = p.phantom.rasterize().unwrap().dt_field;
    for scheme in all_schemes() {
        let params = TrackingParams { scheme, ..Default::default() };
        let r = field_point_to_region(&field, &p.seeds, &p.target, &params).unwrap();
        assert_eq!(r.hit_fraction(), 1.0, "{}", scheme.label());
        // pure geodesics drift off the fiber unless shot along it
        let pure = TrackingParams { mode: TrackingMode::Pure, ..params };
        let r = field_point_to_region(&field, &p.seeds, &p.target, &pure).unwrap();
        for (o, hit) in r.origins.iter().zip(&r.hits) {
            if o.1 == 0 {
                assert!(hit, "{} {o:?}", scheme.label());
            }
        }
    }
}

#[test]
fn fitted_field_tracks_like_truth() {
    let p = preset(PresetKind::Sshape, 0.0).unwrap();
    let ph = p.phantom.rasterize().unwrap();
    let scheme = planar_scheme(81, 1500.0, 1.0).unwrap();
    let fit = fit_dti(&simulate_signal(&ph, &scheme, 2).unwrap(), &scheme).unwrap();
    let params = TrackingParams::default();
    let a = field_point_to_region(&ph.dt_field, &p.seeds, &p.target, &params).unwrap();
    let b = field_point_to_region(&fit, &p.seeds, &p.target, &params).unwrap();
    assert_eq!(a.hits, b.hits);
    assert!(ph.mean_angular_deviation(&b.tracks).unwrap() < 5.0);
}

#[test]
fn tracking_is_deterministic() {
    let p = preset(PresetKind::Ushape, 0.0).unwrap();
    let field = p.phantom.rasterize().unwrap().dt_field;
    let params = TrackingParams { mode: TrackingMode::Pure, ..Default::default() };
    let a = field_point_to_region(&field, &p.seeds, &p.target, &params).unwrap();
    let b = field_point_to_region(&field, &p.seeds, &p.target, &params).unwrap();
    assert_eq!(a, b);
}

#[test]
fn out_of_bounds_seeds_are_listed() {
    let p = preset(PresetKind::Line, 0.0).unwrap();
    let field = p.phantom.rasterize().unwrap().dt_field;
    let seeds = SeedRegion { points: vec![[5.0, 19.5, 0.0], [-3.0, 2.0, 0.0], [80.0, 1.0, 0.0]], ..p.seeds };
    let target = Aabb { min: [30.0, 15.0, 0.0], max: [35.0, 25.0, 0.0] };
    match field_point_to_region(&field, &seeds, &target, &TrackingParams::default()) {
        Err(Error::SeedsOutOfBounds(bad)) => assert_eq!(bad, vec![[-3.0, 2.0, 0.0], [80.0, 1.0, 0.0]]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn noisy_volume_survives_disk() {
    let dir = tempfile::tempdir().unwrap();
    let p = preset(PresetKind::Arc, 0.0).unwrap();
    let ph = p.phantom.rasterize().unwrap();
    let scheme = planar_scheme(30, 1500.0, 1.0).unwrap();
    let s = add_rician(&simulate_signal(&ph, &scheme, 2).unwrap(), 0.1, 7).unwrap();
    for enc in [Encoding::Base64, Encoding::Sidecar] {
        let path = dir.path().join(format!("{enc:?}.json"));
        write_files(&signal_files(&path, &s, enc).unwrap()).unwrap();
        assert_eq!(read_signals(&path).unwrap(), s);
        let fit = fit_dti(&s, &scheme).unwrap();
        let fpath = dir.path().join(format!("{enc:?}-fit.json"));
        write_field(&fpath, &fit, enc).unwrap();
        assert_eq!(read_field(&fpath).unwrap(), fit);
    }
}

#[test]
fn crossing_layers_reach_their_targets() {
    let p = preset(PresetKind::Cross, 60.0).unwrap();
    let ph = p.phantom.rasterize().unwrap();
    let scheme = planar_scheme(81, 1500.0, 1.0).unwrap();
    let f4 = fit_tensor4_field(&simulate_signal(&ph, &scheme, 4).unwrap(), &scheme).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t4.json");
    write_files(&f4.files(&path, Encoding::Sidecar).unwrap()).unwrap();
    let back = Tensor4Field::read(&path).unwrap();
    assert_eq!(back, f4);
    let layers = track_crossing(&back, p.layers.as_ref().unwrap(), &TrackingParams::default()).unwrap();
    assert_eq!(layers.len(), 2);
    for l in &layers {
        assert!(l.result.hit_fraction() >= 0.8, "layer {} {}", l.layer, l.result.hit_fraction());
    }
}

#[test]
fn hybrid_follows_principal_axis() {
    use georay::tensor_field::interpolate;
    let p = preset(PresetKind::Sshape, 0.0).unwrap();
    let field = p.phantom.rasterize().unwrap().dt_field;
    let params = TrackingParams::default();
    let r = field_point_to_region(&field, &p.seeds, &p.target, &params).unwrap();
    let mut checked = 0;
    for t in &r.tracks {
        for k in 1..t.len() {
            let e = interpolate(&field, &t.vertices[k], params.method).unwrap().eig();
            if (e.values[0] - e.values[1]) <= 1e-9 * e.values[0] {
                continue;
            }
            let d = t.directions[k];
            assert!((d.dot(&e.principal()).abs() - 1.0).abs() < 1e-12);
            assert!(d.dot(&t.directions[k - 1]) > 0.0);
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn quartic_fit_separates_wide_crossings() {
    use georay::experiments::{angle_sweep, SweepParams};
    use georay::tensor4::odf_maxima;
    let scheme = planar_scheme(81, 1500.0, 1.0).unwrap();
    for theta in [40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 110.0] {
        let ph = preset(PresetKind::Cross, theta).unwrap().phantom.rasterize().unwrap();
        let f4 = fit_tensor4_field(&simulate_signal(&ph, &scheme, 4).unwrap(), &scheme).unwrap();
        let i = ph.coverage.iter().position(|c| c.len() == 2).unwrap();
        let maxima = odf_maxima(&f4.data()[i], 1.0);
        if theta < 70.0 {
            // a quartic profile merges narrow crossings into one lobe; the
            // diagonal blocks still separate them
            assert_eq!(maxima.len(), 1, "{theta}: {maxima:?}");
            let e = &angle_sweep(&[theta], &SweepParams::default()).unwrap()[0];
            assert!(e.err_layer1_deg < 10.0 && e.err_layer2_deg < 10.0);
            continue;
        }
        assert_eq!(maxima.len(), 2, "{theta}: {maxima:?}");
        for (_, t) in &ph.coverage[i] {
            let best = maxima.iter().map(|m| m.dot(t).abs().min(1.0).acos().to_degrees()).fold(f64::MAX, f64::min);
            assert!(best < 10.0, "{theta}: {best}");
        }
    }
}
