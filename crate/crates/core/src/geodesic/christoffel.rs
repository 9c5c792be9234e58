use crate::tensor_core::{Mat3, SpdTensor, Vec3};

/// Connection coefficients `Γ^γ_{αβ}`, stored as `gamma[γ][α][β]`.
/// Entries beyond `dim` are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChristoffelSymbols {
    pub dim: usize,
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl ChristoffelSymbols {
    pub fn get(&self, upper: usize, a: usize, b: usize) -> f64 {
        self.gamma[upper][a][b]
    }

    /// `−Γ^γ_{αβ} v^α v^β`, the geodesic acceleration for velocity `v`.
    pub fn acceleration(&self, v: &Vec3) -> Vec3 {
        let mut out = Vec3::zeros();
        for c in 0..self.dim {
            let mut s = 0.0;
            for a in 0..self.dim {
                for b in 0..self.dim {
                    s += self.gamma[c][a][b] * v[a] * v[b];
                }
            }
            out[c] = -s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().flatten().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `Γ^γ_{αβ} = ½ g^{γσ} (∂_α g_{βσ} + ∂_β g_{ασ} − ∂_σ g_{αβ})` from the
/// metric and its partial derivatives `dg[α] = ∂g/∂x^α`.
pub fn christoffel(g: &SpdTensor, dg: &[Mat3; 3]) -> ChristoffelSymbols {
    let dim = g.dim();
    let ginv = g.inverse();
    let ginv = ginv.matrix();
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for c in 0..dim {
        for a in 0..dim {
            for b in a..dim {
                let mut s = 0.0;
                for k in 0..dim {
                    s += ginv[(c, k)] * (dg[a][(b, k)] + dg[b][(a, k)] - dg[k][(a, b)]);
                }
                gamma[c][a][b] = 0.5 * s;
                gamma[c][b][a] = 0.5 * s;
            }
        }
    }
    ChristoffelSymbols { dim, gamma }
}
