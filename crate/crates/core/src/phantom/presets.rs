use serde::{Deserialize, Serialize};

use super::{FiberSpec, PhantomSpec, Shape, DEFAULT_BACKGROUND};
use crate::error::{Error, Result};
use crate::geodesic::{Aabb, SeedRegion};
use crate::tensor4::CrossingLayer;
use crate::tensor_core::Vec3;
use crate::tensor_field::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Line,
    Ushape,
    Sshape,
    Sine,
    Arc,
    Cross,
}

impl PresetKind {
    pub const ALL: [PresetKind; 6] =
        [PresetKind::Line, PresetKind::Ushape, PresetKind::Sshape, PresetKind::Sine, PresetKind::Arc, PresetKind::Cross];

    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Line => "line",
            PresetKind::Ushape => "ushape",
            PresetKind::Sshape => "sshape",
            PresetKind::Sine => "sine",
            PresetKind::Arc => "arc",
            PresetKind::Cross => "cross",
        }
    }
}

impl std::str::FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown phantom shape {s:?}")))
    }
}

/// A phantom with a seed region at one end of its first fiber and a target
/// box at the other. Crossing presets also carry one layer per fiber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub phantom: PhantomSpec,
    pub seeds: SeedRegion,
    pub target: Aabb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<[CrossingLayer; 2]>,
}

const N: usize = 40;
const MID: f64 = 19.5;

fn boxed(c: Vec3, half: f64) -> Aabb {
    Aabb { min: [c.x - half, c.y - half, 0.0], max: [c.x + half, c.y + half, 0.0] }
}

/// Four seed points across the fiber, centred on `p` and spread along `across`.
fn seeds_at(p: Vec3, axis: Vec3, across: Vec3) -> SeedRegion {
    let a = axis.normalize();
    let points = [-0.75, -0.25, 0.25, 0.75].iter().map(|o| p + across * *o).map(|q| [q.x, q.y, 0.0]).collect();
    SeedRegion {
        points,
        axis: [a.x, a.y, 0.0],
        radius: 1.0,
        sigma: 0.2,
        shots_per_point: 5,
        bidirectional: false,
    }
}

fn line_preset(from: Vec3, to: Vec3) -> (FiberSpec, SeedRegion, Aabb) {
    let u = (to - from).normalize();
    let perp = Vec3::new(-u.y, u.x, 0.0);
    let fiber = FiberSpec::new(Shape::Line { start: [from.x, from.y, 0.0], end: [to.x, to.y, 0.0] });
    let seeds = seeds_at(from + u * 3.0, u, perp);
    (fiber, seeds, boxed(to - u * 3.0, 2.0))
}

/// Built-in 40×40 planar phantoms with unit voxels. `angle_deg` is the
/// crossing angle and only affects [`PresetKind::Cross`].
pub fn preset(kind: PresetKind, angle_deg: f64) -> Result<Preset> {
    let grid = Grid::unit(&[N, N])?;
    let v = |x: f64, y: f64| Vec3::new(x, y, 0.0);
    let mut layers = None;
    let (fibers, seeds, target) = match kind {
        PresetKind::Line => {
            let (f, s, t) = line_preset(v(3.0, MID), v(36.0, MID));
            (vec![f], s, t)
        }
        PresetKind::Ushape => {
            let (cx, base, r, leg) = (MID, 3.0, 8.0, 20.0);
            let f = FiberSpec::new(Shape::UShape { center_x: cx, base_y: base, radius: r, leg });
            let seeds = seeds_at(v(cx - r, base + 2.0), Vec3::y(), Vec3::x());
            (vec![f], seeds, boxed(v(cx + r, base + 2.0), 2.0))
        }
        PresetKind::Sshape => {
            let (r, tail) = (7.0, 6.0);
            let f = FiberSpec::new(Shape::SShape { center: [MID, MID], radius: r, tail });
            let start = v(MID - tail, MID - 2.0 * r);
            let end = v(MID + tail, MID + 2.0 * r);
            let seeds = seeds_at(start + Vec3::x(), Vec3::x(), Vec3::y());
            (vec![f], seeds, boxed(end - Vec3::x() * 1.5, 2.0))
        }
        PresetKind::Sine => {
            let (x0, x1, a) = (3.0, 36.0, 6.0);
            let f = FiberSpec::new(Shape::Sine { x0, x1, y0: MID, amplitude: a });
            let c = f.shape.sample(0.05)?;
            let (_, t0) = c.nearest(&c.start());
            let p = c.points[c.points.len() / 33];
            let seeds = seeds_at(p, t0, Vec3::new(-t0.y, t0.x, 0.0));
            (vec![f], seeds, boxed(c.end() - Vec3::x() * 2.0, 2.0))
        }
        PresetKind::Arc => {
            let f = FiberSpec::new(Shape::Arc { center: [3.0, 3.0], radius: 30.0, start_deg: 0.0, end_deg: 90.0 });
            let seeds = seeds_at(v(33.0, 6.0), Vec3::y(), Vec3::x());
            (vec![f], seeds, boxed(v(6.0, 33.0), 2.0))
        }
        PresetKind::Cross => {
            if !(angle_deg > 0.0 && angle_deg < 180.0) {
                return Err(Error::InvalidParameter(format!("crossing angle must be in (0, 180), got {angle_deg}")));
            }
            let c = v(MID, MID);
            let dirs = [45.0 - angle_deg / 2.0, 45.0 + angle_deg / 2.0]
                .map(|a: f64| Vec3::new(a.to_radians().cos(), a.to_radians().sin(), 0.0));
            let parts = dirs.map(|d| line_preset(c - d * 18.0, c + d * 18.0));
            layers = Some(parts.clone().map(|(_, seeds, target)| CrossingLayer { seeds, target }));
            let [(f1, s1, t1), (f2, _, _)] = parts;
            (vec![f1, f2], s1, t1)
        }
    };
    Ok(Preset { phantom: PhantomSpec { grid, fibers, background: DEFAULT_BACKGROUND }, seeds, target, layers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_consistent() {
        for kind in PresetKind::ALL {
            let p = preset(kind, 60.0).unwrap();
            let ph = p.phantom.rasterize().unwrap();
            let g = ph.grid();
            for s in &p.seeds.points {
                let q = Vec3::from(*s);
                assert!(g.contains(&q), "{kind:?}");
                assert!(ph.truth_tangent(&q).is_some(), "{kind:?} seed {s:?} off fiber");
            }
            let t = &p.target;
            let centre = Vec3::new((t.min[0] + t.max[0]) / 2.0, (t.min[1] + t.max[1]) / 2.0, 0.0);
            assert!(g.contains(&centre));
            assert!(ph.curves[0].nearest(&centre).0 < 2.0, "{kind:?}");
            assert_eq!(kind.name().parse::<PresetKind>().unwrap(), kind);
        }
    }

    #[test]
    fn orthogonal_cross_is_axis_aligned() {
        let p = preset(PresetKind::Cross, 90.0).unwrap();
        let ph = p.phantom.rasterize().unwrap();
        let t1 = ph.truth_tangent(&Vec3::new(5.0, 19.0, 0.0)).unwrap();
        assert!(t1.x.abs() > 1.0 - 1e-9);
        assert!(p.layers.is_some());
        assert!(preset(PresetKind::Cross, 0.0).is_err());
    }
}
