use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_core::Vec3;

/// Planar fiber trajectories (z = 0). All lengths are physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Line {
        start: [f64; 3],
        end: [f64; 3],
    },
    /// Inverted U: two vertical legs of length `leg` rising from `base_y`,
    /// joined by a half circle of radius `radius` centred at `center_x`.
    UShape {
        center_x: f64,
        base_y: f64,
        radius: f64,
        leg: f64,
    },
    /// Two opposed half circles of radius `radius` stacked about `center`,
    /// with horizontal tails of length `tail` at both ends.
    SShape {
        center: [f64; 2],
        radius: f64,
        tail: f64,
    },
    /// One sine period from `x0` to `x1` about the line `y = y0`.
    Sine {
        x0: f64,
        x1: f64,
        y0: f64,
        amplitude: f64,
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        start_deg: f64,
        end_deg: f64,
    },
}

/// Densely sampled curve with unit tangents in traversal order.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub points: Vec<Vec3>,
    pub tangents: Vec<Vec3>,
}

impl Curve {
    pub fn start(&self) -> Vec3 {
        self.points[0]
    }

    pub fn end(&self) -> Vec3 {
        *self.points.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Distance to the closest sample and the tangent there.
    pub fn nearest(&self, p: &Vec3) -> (f64, Vec3) {
        let mut best = (f64::MAX, 0);
        for (i, q) in self.points.iter().enumerate() {
            let d = (q - p).norm_squared();
            if d < best.0 {
                best = (d, i);
            }
        }
        (best.0.sqrt(), self.tangents[best.1])
    }

    fn push_segment(&mut self, a: Vec3, b: Vec3, ds: f64) {
        let len = (b - a).norm();
        let t = (b - a) / len;
        let n = (len / ds).ceil().max(1.0) as usize;
        for i in 0..=n {
            if i == 0 && !self.points.is_empty() {
                continue;
            }
            self.points.push(a + (b - a) * (i as f64 / n as f64));
            self.tangents.push(t);
        }
    }

    /// Arc from angle `a0` to `a1` (radians, either direction).
    fn push_arc(&mut self, c: Vec3, r: f64, a0: f64, a1: f64, ds: f64) {
        let n = ((a1 - a0).abs() * r / ds).ceil().max(1.0) as usize;
        let sgn = (a1 - a0).signum();
        for i in 0..=n {
            if i == 0 && !self.points.is_empty() {
                continue;
            }
            let a = a0 + (a1 - a0) * (i as f64 / n as f64);
            self.points.push(c + Vec3::new(a.cos(), a.sin(), 0.0) * r);
            self.tangents.push(Vec3::new(-a.sin(), a.cos(), 0.0) * sgn);
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateCurve(format!("{name} must be positive, got {v}")))
    }
}

impl Shape {
    /// Sample the curve with spacing at most `ds`.
    pub fn sample(&self, ds: f64) -> Result<Curve> {
        let mut c = Curve { points: Vec::new(), tangents: Vec::new() };
        let p2 = |x: f64, y: f64| Vec3::new(x, y, 0.0);
        match *self {
            Shape::Line { start, end } => {
                let (a, b) = (Vec3::from(start), Vec3::from(end));
                if (b - a).norm() == 0.0 {
                    return Err(Error::DegenerateCurve("line has zero length".into()));
                }
                c.push_segment(a, b, ds);
            }
            Shape::UShape { center_x, base_y, radius, leg } => {
                positive("radius", radius)?;
                positive("leg", leg)?;
                let top = base_y + leg;
                c.push_segment(p2(center_x - radius, base_y), p2(center_x - radius, top), ds);
                c.push_arc(p2(center_x, top), radius, PI, 0.0, ds);
                c.push_segment(p2(center_x + radius, top), p2(center_x + radius, base_y), ds);
            }
            Shape::SShape { center, radius, tail } => {
                positive("radius", radius)?;
                let [cx, cy] = center;
                let bottom = p2(cx, cy - 2.0 * radius);
                if tail > 0.0 {
                    c.push_segment(bottom - Vec3::x() * tail, bottom, ds);
                }
                c.push_arc(p2(cx, cy - radius), radius, -FRAC_PI_2, FRAC_PI_2, ds);
                c.push_arc(p2(cx, cy + radius), radius, -FRAC_PI_2, -FRAC_PI_2 - PI, ds);
                if tail > 0.0 {
                    let top = p2(cx, cy + 2.0 * radius);
                    c.push_segment(top, top + Vec3::x() * tail, ds);
                }
            }
            Shape::Sine { x0, x1, y0, amplitude } => {
                if x1 <= x0 {
                    return Err(Error::DegenerateCurve(format!("sine needs x1 > x0, got {x0}..{x1}")));
                }
                let k = TAU / (x1 - x0);
                let arc_len = (x1 - x0) * (1.0 + (amplitude * k).abs());
                let n = (arc_len / ds).ceil().max(2.0) as usize;
                for i in 0..=n {
                    let x = x0 + (x1 - x0) * (i as f64 / n as f64);
                    let y = y0 + amplitude * (k * (x - x0)).sin();
                    c.points.push(p2(x, y));
                    c.tangents.push(Vec3::new(1.0, amplitude * k * (k * (x - x0)).cos(), 0.0).normalize());
                }
            }
            Shape::Arc { center, radius, start_deg, end_deg } => {
                positive("radius", radius)?;
                if start_deg == end_deg {
                    return Err(Error::DegenerateCurve("arc spans zero angle".into()));
                }
                c.push_arc(p2(center[0], center[1]), radius, start_deg.to_radians(), end_deg.to_radians(), ds);
            }
        }
        Ok(c)
    }
}
