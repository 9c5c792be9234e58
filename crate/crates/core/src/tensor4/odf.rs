use super::Tensor4;
use crate::tensor_core::Vec3;

const MERGE_DEG: f64 = 5.0;

fn axis_angle_deg(a: &Vec3, b: &Vec3) -> f64 {
    a.dot(b).abs().min(1.0).acos().to_degrees()
}

/// `v` is a strict local maximum over `neighbours`, ignoring rounding-level
/// differences so flat profiles have no peaks.
fn is_peak(v: f64, neighbours: impl IntoIterator<Item = f64>) -> bool {
    let tol = 1e-12 * v.abs();
    let mut gt = false;
    for u in neighbours {
        if u > v + tol {
            return false;
        }
        gt |= v > u + tol;
    }
    gt
}

fn merge(mut cands: Vec<(f64, Vec3)>) -> Vec<Vec3> {
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut kept: Vec<Vec3> = Vec::new();
    for (_, d) in cands {
        if kept.iter().all(|k| axis_angle_deg(k, &d) > MERGE_DEG) {
            kept.push(d);
        }
    }
    kept
}

/// Local maxima of `D(g)` on a direction grid of `resolution_deg` spacing,
/// with antipodal pairs reported once and maxima closer than 5° merged.
/// Sorted by profile value, largest first.
pub fn odf_maxima(t: &Tensor4, resolution_deg: f64) -> Vec<Vec3> {
    let steps = (180.0 / resolution_deg).round().max(4.0) as usize;
    let res = std::f64::consts::PI / steps as f64;
    if t.dim() == 2 {
        // half circle suffices; the profile has period π
        let vals: Vec<(f64, Vec3)> = (0..steps)
            .map(|i| {
                let a = i as f64 * res;
                let g = Vec3::new(a.cos(), a.sin(), 0.0);
                (t.d_of_g(&g), g)
            })
            .collect();
        let cands = (0..steps)
            .filter(|&i| {
                is_peak(vals[i].0, [vals[(i + steps - 1) % steps].0, vals[(i + 1) % steps].0])
            })
            .map(|i| vals[i])
            .collect();
        return merge(cands);
    }

    // full sphere in (θ, φ); poles are single samples
    let n_phi = 2 * steps;
    let dir = |it: usize, ip: usize| {
        let (th, ph) = (it as f64 * res, ip as f64 * res);
        Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos())
    };
    let val: Vec<Vec<f64>> = (0..=steps)
        .map(|it| {
            let count = if it == 0 || it == steps { 1 } else { n_phi };
            (0..count).map(|ip| t.d_of_g(&dir(it, ip))).collect()
        })
        .collect();
    let at = |it: usize, ip: usize| if it == 0 || it == steps { val[it][0] } else { val[it][ip % n_phi] };
    let mut cands = Vec::new();
    for it in 0..=steps {
        if it == 0 || it == steps {
            let ring = if it == 0 { 1 } else { steps - 1 };
            let v = val[it][0];
            if is_peak(v, val[ring].iter().copied()) {
                cands.push((v, dir(it, 0)));
            }
            continue;
        }
        for ip in 0..n_phi {
            let v = val[it][ip];
            let neighbours = [-1i64, 0, 1]
                .into_iter()
                .flat_map(|dt| [-1i64, 0, 1].into_iter().map(move |dp| (dt, dp)))
                .filter(|&d| d != (0, 0))
                .map(|(dt, dp)| at((it as i64 + dt) as usize, (ip as i64 + dp + n_phi as i64) as usize));
            if is_peak(v, neighbours) {
                cands.push((v, dir(it, ip)));
            }
        }
    }
    merge(cands)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fiber_peak() {
        let t = Tensor4::outer(3, &Vec3::x()).unwrap();
        let m = odf_maxima(&t, 1.0);
        assert_eq!(m.len(), 1);
        assert!(m[0].x.abs() > 1.0 - 1e-9);
    }

    #[test]
    fn orthogonal_fibers() {
        for dim in [2, 3] {
            let t = Tensor4::outer(dim, &Vec3::x()).unwrap().add(&Tensor4::outer(dim, &Vec3::y()).unwrap()).unwrap();
            let m = odf_maxima(&t, 1.0);
            assert_eq!(m.len(), 2, "{dim}: {m:?}");
            let mut found = [false; 2];
            for d in &m {
                found[0] |= d.x.abs() > 0.9999;
                found[1] |= d.y.abs() > 0.9999;
            }
            assert_eq!(found, [true, true]);
        }
    }

    #[test]
    fn tilted_fiber_within_resolution() {
        let v = Vec3::new(0.3, 0.5, 0.8).normalize();
        let t = Tensor4::outer(3, &v).unwrap();
        let m = odf_maxima(&t, 1.0);
        assert_eq!(m.len(), 1);
        assert!(axis_angle_deg(&m[0], &v) < 1.0);
    }

    #[test]
    fn isotropic_has_no_peaks() {
        assert!(odf_maxima(&Tensor4::isotropic(2, 1.0).unwrap(), 1.0).is_empty());
    }
}
