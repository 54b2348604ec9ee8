//! The dual connection and its limits.
//!
//! `koszul` evaluates `square_A B (C)`, the torsion-free metric dual
//! connection, from the six-term Koszul formula
//!
//! ```text
//! 2 square_A B (C) = A<B,C> + B<C,A> - C<A,B>
//!                    + <[A,B],C> - <[B,C],A> + <[C,A],B>
//! ```
//!
//! with every derivative taken exactly from jets. The dual connection is
//! regular on the degenerate hypersurface; the Levi-Civita derivative exists
//! only off it and is recovered through the inverse metric. Scalar fields
//! vanishing on `x1 = 0` admit a unique continuous extension of `f / tau`,
//! computed by `lhopital_limit` as the ratio of first transverse derivatives.

use crate::error::{Error, Result};
use crate::jet::Jet3;
use crate::linalg;
use crate::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};
use crate::sigma;

pub const VANISH_TOL: f64 = 1e-10;

/// First-class Christoffel symbols and their first partials at a point.
#[derive(Debug, Clone)]
pub struct ChristoffelTable {
    point: Vec<f64>,
    dim: usize,
    gamma: Vec<f64>,
    dgamma: Vec<f64>,
}

impl ChristoffelTable {
    /// `Gamma_{c,ab}` with 1-based coordinate indices.
    pub fn gamma(&self, c: usize, a: usize, b: usize) -> f64 {
        let m = self.dim;
        self.gamma[(c - 1) * m * m + (a - 1) * m + (b - 1)]
    }

    /// `d/dx^e Gamma_{c,ab}` with 1-based coordinate indices.
    pub fn dgamma(&self, e: usize, c: usize, a: usize, b: usize) -> f64 {
        let m = self.dim;
        self.dgamma[((e - 1) * m + (c - 1)) * m * m + (a - 1) * m + (b - 1)]
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }
}

/// All `Gamma_{c,ab} = (d_a g_bc + d_b g_ac - d_c g_ab) / 2` plus first
/// partials, from the metric jets.
pub fn christoffels(metric: &AdaptedMetric, p: &[f64]) -> Result<ChristoffelTable> {
    let m = metric.dim();
    let g = metric.metric_at(p)?;
    let mut gamma = vec![0.0; m * m * m];
    let mut dgamma = vec![0.0; m * m * m * m];
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                gamma[c * m * m + a * m + b] =
                    0.5 * (g[b][c].d1(a) + g[a][c].d1(b) - g[a][b].d1(c));
                for e in 0..m {
                    dgamma[(e * m + c) * m * m + a * m + b] =
                        0.5 * (g[b][c].d2(a, e) + g[a][c].d2(b, e) - g[a][b].d2(c, e));
                }
            }
        }
    }
    Ok(ChristoffelTable {
        point: p.to_vec(),
        dim: m,
        gamma,
        dgamma,
    })
}

fn inner_jet(g: &[Vec<Jet3>], u: &[Jet3], v: &[Jet3]) -> Jet3 {
    let m = g.len();
    let mut acc = Jet3::constant(m, 0.0);
    for i in 0..m {
        for j in 0..m {
            acc = &acc + &(&(&g[i][j] * &u[i]) * &v[j]);
        }
    }
    acc
}

fn dir_derivative(a: &[Jet3], f: &Jet3) -> Jet3 {
    let m = a.len();
    let mut acc = Jet3::constant(m, 0.0);
    for k in 0..m {
        acc = &acc + &(&a[k] * &f.derive(k));
    }
    acc
}

fn bracket(a: &[Jet3], b: &[Jet3]) -> Vec<Jet3> {
    let m = a.len();
    (0..m)
        .map(|c| {
            let mut acc = Jet3::constant(m, 0.0);
            for k in 0..m {
                acc = &acc + &(&a[k] * &b[c].derive(k));
                acc = &acc - &(&b[k] * &a[c].derive(k));
            }
            acc
        })
        .collect()
}

/// `square_A B (C)` as a jet, valid to order 2 in its derivatives.
pub fn koszul_jet(
    metric: &AdaptedMetric,
    p: &[f64],
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
    c: &VectorFieldSpec,
) -> Result<Jet3> {
    let g = metric.metric_at(p)?;
    let aj = a.jets_at(p)?;
    let bj = b.jets_at(p)?;
    let cj = c.jets_at(p)?;
    Ok(koszul_from_jets(&g, &aj, &bj, &cj))
}

pub(crate) fn koszul_from_jets(g: &[Vec<Jet3>], aj: &[Jet3], bj: &[Jet3], cj: &[Jet3]) -> Jet3 {
    let gbc = inner_jet(g, bj, cj);
    let gca = inner_jet(g, cj, aj);
    let gab = inner_jet(g, aj, bj);
    let mut acc = dir_derivative(aj, &gbc);
    acc = &acc + &dir_derivative(bj, &gca);
    acc = &acc - &dir_derivative(cj, &gab);
    acc = &acc + &inner_jet(g, &bracket(aj, bj), cj);
    acc = &acc - &inner_jet(g, &bracket(bj, cj), aj);
    acc = &acc + &inner_jet(g, &bracket(cj, aj), bj);
    acc.scale(0.5)
}

/// `square_A B (C)` at `p`; regular on and off the hypersurface.
pub fn koszul(
    metric: &AdaptedMetric,
    p: &[f64],
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
    c: &VectorFieldSpec,
) -> Result<f64> {
    Ok(koszul_jet(metric, p, a, b, c)?.value())
}

/// Levi-Civita covariant derivative off the hypersurface, through the
/// inverse metric: `(nabla_A B)^c = g^{cd} square_A B (d_d)`.
pub fn nabla_offsigma(
    metric: &AdaptedMetric,
    p: &[f64],
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    let m = metric.dim();
    if p[0] == 0.0 {
        return Err(Error::SingularMetric(p.to_vec()));
    }
    let gv = metric.metric_values_at(p)?;
    let ginv = linalg::invert(&gv).ok_or_else(|| Error::SingularMetric(p.to_vec()))?;
    let mut omega = vec![0.0; m];
    let g = metric.metric_at(p)?;
    let aj = a.jets_at(p)?;
    let bj = b.jets_at(p)?;
    for d in 0..m {
        let ej = VectorFieldSpec::coordinate(m, d + 1).jets_at(p)?;
        omega[d] = koszul_from_jets(&g, &aj, &bj, &ej).value();
    }
    Ok((0..m)
        .map(|c| (0..m).map(|d| ginv[c][d] * omega[d]).sum())
        .collect())
}

/// Unique continuous extension of `tau^{-1} f` on the hypersurface, for a
/// scalar field `f` (given as its jet at `p`) that vanishes there.
pub fn lhopital_limit(metric: &AdaptedMetric, p: &SigmaPoint, f: &Jet3) -> Result<f64> {
    if f.value().abs() > VANISH_TOL {
        return Err(Error::Precondition(format!(
            "f does not vanish on the hypersurface: residual {:.3e}",
            f.value()
        )));
    }
    let tau = metric.tau_at(p.coords())?;
    Ok(f.d1(0) / tau.d1(0))
}

/// Limit of the Levi-Civita derivative on the hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub enum NablaLimit {
    /// The limit vector in coordinates.
    Finite(Vec<f64>),
    /// No limit; carries the obstruction `II(A, B)` at the point.
    Divergent { obstruction: f64 },
}

impl NablaLimit {
    pub fn finite(&self) -> Option<&Vec<f64>> {
        match self {
            NablaLimit::Finite(v) => Some(v),
            NablaLimit::Divergent { .. } => None,
        }
    }
}

/// `nabla_A B` restricted to the hypersurface for canonical fields. The
/// radical component is the L'Hopital limit of `tau^{-1} square_A B (R)`;
/// the frame components are read off directly.
pub fn nabla_limit(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
) -> Result<NablaLimit> {
    let m = metric.dim();
    let q = p.coords();
    let g = metric.metric_at(q)?;
    let aj = a.jets_at(q)?;
    let bj = b.jets_at(q)?;
    let radical = VectorFieldSpec::coordinate(m, m).jets_at(q)?;
    let sq_r = koszul_from_jets(&g, &aj, &bj, &radical);
    if sq_r.value().abs() > VANISH_TOL {
        return Ok(NablaLimit::Divergent {
            obstruction: sq_r.value(),
        });
    }
    let frame = sigma::screen_frame(metric, p)?;
    let mut out = vec![0.0; m];
    // normal component: square_A B (N) times N = d_1
    let nj = VectorFieldSpec::coordinate(m, 1).jets_at(q)?;
    let n_comp = koszul_from_jets(&g, &aj, &bj, &nj).value();
    for k in 0..m {
        out[k] += n_comp * frame.n[k];
    }
    for v in &frame.screen {
        let vj = VectorFieldSpec::constant(v).jets_at(q)?;
        let comp = koszul_from_jets(&g, &aj, &bj, &vj).value();
        for k in 0..m {
            out[k] += comp * v[k];
        }
    }
    let r_comp = lhopital_limit(metric, p, &sq_r)?;
    for k in 0..m {
        out[k] += r_comp * frame.r[k];
    }
    Ok(NablaLimit::Finite(out))
}
