//! Levi-Civita curvature off the hypersurface and its boundary behaviour.
//!
//! Off `x1 = 0` the covariant curvature is assembled from first-class
//! Christoffel symbols and the inverse metric,
//!
//! ```text
//! <R(d_a,d_b)d_c,d_d> = d_a G_{d,bc} - d_b G_{d,ac}
//!                       + g^{ef} (G_{e,ac} G_{f,bd} - G_{e,bc} G_{f,ad}),
//! ```
//!
//! and `tau * <R(A,B)C,D>` extends smoothly across the hypersurface; its
//! restriction is the 2x2 determinant of II values. That determinant decides
//! everything: a curvature quantity has a finite limit exactly when it
//! vanishes, the limit is extension-independent exactly when the four slot
//! contractions vanish, and otherwise the quantity diverges with order -1
//! (or -2 after a tau-scaled denominator).
//!
//! Every classification here is produced twice: an exact route through jets
//! and the II determinant, and an empirical probe along the transverse axis
//! with a fitted log-log slope. Tests hold the two routes against each other.

use crate::error::{Error, Result};
use crate::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};
use crate::probe::{self, ProbeClass, ProbeFit};
use crate::sigma;
use serde::Serialize;

/// Threshold below which the II determinant counts as zero.
pub const UPS_TOL: f64 = 1e-9;
/// Threshold for a nonzero boundary limit inside divergence-order analysis.
const LIMIT_TOL: f64 = 1e-8;
/// Transverse step for the exact-limit central difference.
const LIMIT_STEP: f64 = 1e-3;
/// Gram determinant threshold (relative) separating rank 1 from rank 2.
const RANK_TOL: f64 = 1e-10;

/// Anything that yields coordinate components along the transverse ray.
pub trait FieldEval {
    fn eval(&self, metric: &AdaptedMetric, q: &[f64]) -> Result<Vec<f64>>;
    fn label(&self) -> String;
}

impl FieldEval for VectorFieldSpec {
    fn eval(&self, _metric: &AdaptedMetric, q: &[f64]) -> Result<Vec<f64>> {
        self.values_at(q)
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.components().iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

/// An extension `base + tau * bar` of the field `base` restricted to the
/// hypersurface; `bar` shifts derivatives without moving boundary values.
#[derive(Debug, Clone)]
pub struct PerturbedExtension {
    pub base: VectorFieldSpec,
    pub bar: VectorFieldSpec,
}

impl FieldEval for PerturbedExtension {
    fn eval(&self, metric: &AdaptedMetric, q: &[f64]) -> Result<Vec<f64>> {
        let tau = metric.tau_at(q)?.value();
        let b = self.base.values_at(q)?;
        let w = self.bar.values_at(q)?;
        Ok(b.iter().zip(&w).map(|(x, y)| x + tau * y).collect())
    }

    fn label(&self) -> String {
        format!("{} + tau*{}", self.base.label(), self.bar.label())
    }
}

/// Metric, inverse, tau and the full covariant curvature tensor at an
/// off-hypersurface point.
pub struct CurvatureAt {
    m: usize,
    pub g: Vec<Vec<f64>>,
    pub ginv: Vec<Vec<f64>>,
    pub tau: f64,
    riemann: Vec<f64>,
}

impl CurvatureAt {
    /// `<R(d_a, d_b) d_c, d_d>`, 0-based indices.
    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let m = self.m;
        self.riemann[((a * m + b) * m + c) * m + d]
    }

    pub fn contract(&self, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for i in 0..m {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        acc += self.component(i, j, k, l) * a[i] * b[j] * c[k] * d[l];
                    }
                }
            }
        }
        acc
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += self.g[i][j] * u[i] * v[j];
            }
        }
        acc
    }

    /// `Ric(a, b) = g^{cd} <R(a, d_c) b, d_d>`.
    pub fn ricci(&self, a: &[f64], b: &[f64]) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                if a[i] == 0.0 || b[j] == 0.0 {
                    continue;
                }
                let mut t = 0.0;
                for c in 0..m {
                    for d in 0..m {
                        t += self.ginv[c][d] * self.component(i, c, j, d);
                    }
                }
                acc += a[i] * b[j] * t;
            }
        }
        acc
    }
}

/// Assemble the curvature tensor at `p` (requires `x1 != 0`).
pub fn curvature_at(metric: &AdaptedMetric, p: &[f64]) -> Result<CurvatureAt> {
    if p[0] == 0.0 {
        return Err(Error::SingularMetric(p.to_vec()));
    }
    let m = metric.dim();
    let jets = metric.metric_at(p)?;
    let g: Vec<Vec<f64>> = jets
        .iter()
        .map(|row| row.iter().map(|j| j.value()).collect())
        .collect();
    let ginv = crate::linalg::invert(&g).ok_or_else(|| Error::SingularMetric(p.to_vec()))?;
    let tau = metric.tau_at(p)?.value();
    let mut gamma = vec![0.0; m * m * m];
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                gamma[(c * m + a) * m + b] =
                    0.5 * (jets[b][c].d1(a) + jets[a][c].d1(b) - jets[a][b].d1(c));
            }
        }
    }
    let ga = |c: usize, a: usize, b: usize| gamma[(c * m + a) * m + b];
    let dga = |e: usize, c: usize, a: usize, b: usize| {
        0.5 * (jets[b][c].d2(a, e) + jets[a][c].d2(b, e) - jets[a][b].d2(c, e))
    };
    let mut riemann = vec![0.0; m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut v = dga(a, d, b, c) - dga(b, d, a, c);
                    for e in 0..m {
                        for f in 0..m {
                            v += ginv[e][f]
                                * (ga(e, a, c) * ga(f, b, d) - ga(e, b, c) * ga(f, a, d));
                        }
                    }
                    riemann[((a * m + b) * m + c) * m + d] = v;
                }
            }
        }
    }
    Ok(CurvatureAt {
        m,
        g,
        ginv,
        tau,
        riemann,
    })
}

/// `<R(A,B)C,D>` off the hypersurface.
pub fn covariant_curvature_offsigma(
    metric: &AdaptedMetric,
    p: &[f64],
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
    c: &VectorFieldSpec,
    d: &VectorFieldSpec,
) -> Result<f64> {
    let cv = curvature_at(metric, p)?;
    Ok(cv.contract(
        &a.values_at(p)?,
        &b.values_at(p)?,
        &c.values_at(p)?,
        &d.values_at(p)?,
    ))
}

/// `tau * <R(A,B)C,D>`; smooth across the hypersurface.
pub fn upsilon_bulk(
    metric: &AdaptedMetric,
    p: &[f64],
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
    c: &VectorFieldSpec,
    d: &VectorFieldSpec,
) -> Result<f64> {
    Ok(metric.tau_at(p)?.value() * covariant_curvature_offsigma(metric, p, a, b, c, d)?)
}

fn ups_from_ii(ii: &[Vec<f64>], a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let m = ii.len();
    let pair = |u: &[f64], v: &[f64]| {
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += ii[i][j] * u[i] * v[j];
            }
        }
        acc
    };
    pair(a, c) * pair(b, d) - pair(a, d) * pair(b, c)
}

/// Boundary value of `tau * <R(A,B)C,D>`: the 2x2 determinant of II values.
pub fn upsilon_restricted(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
) -> Result<f64> {
    let ii = sigma::ii_coordinate_matrix(metric, p)?;
    Ok(ups_from_ii(&ii, a, b, c, d))
}

/// Classification of a curvature quantity approaching the hypersurface.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Classification {
    Finite { value: f64 },
    ExtensionDependent { canonical_value: f64 },
    Divergent { order: i32, coefficient: f64 },
}

impl Classification {
    pub fn is_bounded(&self) -> bool {
        !matches!(self, Classification::Divergent { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Classification::Finite { value } => Some(*value),
            Classification::ExtensionDependent { canonical_value } => Some(*canonical_value),
            Classification::Divergent { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSample {
    pub eps: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeData {
    /// Signed `eps`: positive samples approach from the Riemannian side.
    pub samples: Vec<ProbeSample>,
    pub slope: f64,
    /// RMS residual of the log-log slope fit.
    pub residual: f64,
    /// Polynomial extrapolation of the samples to `eps = 0` (meaningful for
    /// bounded quantities) and the size of its last correction.
    pub extrapolated: f64,
    pub extrapolation_error: f64,
    pub class: ProbeClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationWitness {
    pub canonical: f64,
    pub perturbed: f64,
    pub predicted_shift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub quantity: String,
    pub classification: Classification,
    pub prediction: String,
    pub probe: ProbeData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PerturbationWitness>,
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub two_sided: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            eps_lo: 1e-4,
            eps_hi: 1e-1,
            two_sided: true,
        }
    }
}

impl ProbeOptions {
    fn schedule(&self) -> Vec<f64> {
        probe::schedule(self.eps_lo, self.eps_hi)
    }
}

fn ray_point(p: &SigmaPoint, eps: f64) -> Vec<f64> {
    let mut q = p.coords().to_vec();
    q[0] = eps;
    q
}

/// Sample a scalar quantity along the transverse ray; positive schedule
/// first, then the Lorentzian side when two-sided.
fn sample_ray<F>(p: &SigmaPoint, opts: &ProbeOptions, mut f: F) -> Result<Vec<ProbeSample>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut out = Vec::new();
    for &eps in &opts.schedule() {
        out.push(ProbeSample {
            eps,
            value: f(&ray_point(p, eps))?,
        });
    }
    if opts.two_sided {
        for &eps in &opts.schedule() {
            out.push(ProbeSample {
                eps: -eps,
                value: f(&ray_point(p, -eps))?,
            });
        }
    }
    Ok(out)
}

fn fit_riemann_side(samples: &[ProbeSample]) -> (ProbeFit, f64, f64) {
    let pos: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.eps > 0.0)
        .map(|s| (s.eps, s.value))
        .collect();
    let fit = probe::probe_fit(&pos);
    let (extrapolated, err) = probe::neville_extrapolate(&pos);
    (fit, extrapolated, err)
}

/// Richardson central difference across the hypersurface of a smooth
/// function of `x1` given by `f`.
fn transverse_derivative<F>(p: &SigmaPoint, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let h = LIMIT_STEP;
    let v = |fv: &mut F, e: f64| fv(&ray_point(p, e));
    let d_h = (v(&mut f, h)? - v(&mut f, -h)?) / (2.0 * h);
    let d_h2 = (v(&mut f, h / 2.0)? - v(&mut f, -h / 2.0)?) / h;
    Ok((4.0 * d_h2 - d_h) / 3.0)
}

/// Exact-route limit of `<R(A,B)C,D>` when the II determinant vanishes:
/// the transverse derivative of the bulk tensor over that of tau.
fn covariant_limit_value(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    fields: [&dyn FieldEval; 4],
) -> Result<f64> {
    let dtau = metric.tau_at(p.coords())?.d1(0);
    let deriv = transverse_derivative(p, |q| {
        let cv = curvature_at(metric, q)?;
        let vals: Vec<Vec<f64>> = fields
            .iter()
            .map(|f| f.eval(metric, q))
            .collect::<Result<_>>()?;
        Ok(cv.tau * cv.contract(&vals[0], &vals[1], &vals[2], &vals[3]))
    })?;
    Ok(deriv / dtau)
}

fn frame_vectors(frame: &sigma::SigmaFrame) -> Vec<Vec<f64>> {
    let mut out = vec![frame.n.clone()];
    out.extend(frame.screen.iter().cloned());
    out.push(frame.r.clone());
    out
}

fn slot_contractions_vanish(ii: &[Vec<f64>], frame: &[Vec<f64>], vals: &[Vec<f64>; 4]) -> bool {
    for slot in 0..4 {
        for v in frame {
            let mut probe_vals: Vec<&[f64]> = vals.iter().map(|x| x.as_slice()).collect();
            probe_vals[slot] = v;
            let u = ups_from_ii(
                ii,
                probe_vals[0],
                probe_vals[1],
                probe_vals[2],
                probe_vals[3],
            );
            if u.abs() >= UPS_TOL {
                return false;
            }
        }
    }
    true
}

fn covariant_limit_fields(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    fields: [&dyn FieldEval; 4],
    opts: &ProbeOptions,
) -> Result<LimitReport> {
    let q = p.coords();
    let vals: [Vec<f64>; 4] = [
        fields[0].eval(metric, q)?,
        fields[1].eval(metric, q)?,
        fields[2].eval(metric, q)?,
        fields[3].eval(metric, q)?,
    ];
    let ii = sigma::ii_coordinate_matrix(metric, p)?;
    let ups = ups_from_ii(&ii, &vals[0], &vals[1], &vals[2], &vals[3]);
    let frame = sigma::screen_frame(metric, p)?;
    let fvecs = frame_vectors(&frame);
    let dtau = metric.tau_at(q)?.d1(0);

    let samples = sample_ray(p, opts, |ray| {
        let cv = curvature_at(metric, ray)?;
        let rv: Vec<Vec<f64>> = fields
            .iter()
            .map(|f| f.eval(metric, ray))
            .collect::<Result<_>>()?;
        Ok(cv.contract(&rv[0], &rv[1], &rv[2], &rv[3]))
    })?;
    let (fit, extrapolated, extrapolation_error) = fit_riemann_side(&samples);

    let (classification, prediction) = if ups.abs() >= UPS_TOL {
        (
            Classification::Divergent {
                order: -1,
                coefficient: ups / dtau,
            },
            format!("II-determinant = {ups:.6e} != 0: no boundary limit, order -1"),
        )
    } else {
        let value = covariant_limit_value(metric, p, fields)?;
        if slot_contractions_vanish(&ii, &fvecs, &vals) {
            (
                Classification::Finite { value },
                "II-determinant and all slot contractions vanish: finite, \
                 extension-independent limit"
                    .to_string(),
            )
        } else {
            (
                Classification::ExtensionDependent {
                    canonical_value: value,
                },
                "II-determinant vanishes but a slot contraction does not: limit \
                 exists for canonical extensions only"
                    .to_string(),
            )
        }
    };

    let quantity = format!(
        "cov[{}; {}; {}; {}]",
        fields[0].label(),
        fields[1].label(),
        fields[2].label(),
        fields[3].label()
    );
    Ok(LimitReport {
        quantity,
        classification,
        prediction,
        probe: ProbeData {
            samples,
            slope: fit.slope,
            residual: fit.residual,
            extrapolated,
            extrapolation_error,
            class: fit.class,
        },
        witness: None,
    })
}

/// Classify `<R(A,B)C,D>` near the hypersurface for canonical fields.
pub fn covariant_limit(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    a: &VectorFieldSpec,
    b: &VectorFieldSpec,
    c: &VectorFieldSpec,
    d: &VectorFieldSpec,
    opts: &ProbeOptions,
) -> Result<LimitReport> {
    covariant_limit_fields(metric, p, [a, b, c, d], opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationCheck {
    pub base_value: f64,
    pub perturbed_value: f64,
    pub deviation: f64,
    pub predicted_defect: f64,
}

/// Shift of the boundary limit under extensions `A + tau*Abar`: must equal
/// the sum of II-determinant defects with the bar fields substituted one
/// slot at a time.
pub fn perturbation_check(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    base: [&VectorFieldSpec; 4],
    bars: [Option<&VectorFieldSpec>; 4],
) -> Result<PerturbationCheck> {
    let q = p.coords();
    let vals: [Vec<f64>; 4] = [
        base[0].values_at(q)?,
        base[1].values_at(q)?,
        base[2].values_at(q)?,
        base[3].values_at(q)?,
    ];
    let ii = sigma::ii_coordinate_matrix(metric, p)?;
    let ups = ups_from_ii(&ii, &vals[0], &vals[1], &vals[2], &vals[3]);
    if ups.abs() >= UPS_TOL {
        return Err(Error::Precondition(format!(
            "base quadruple has no boundary limit (II-determinant {ups:.3e})"
        )));
    }
    let base_value = covariant_limit_value(metric, p, [base[0], base[1], base[2], base[3]])?;
    let perturbed: Vec<PerturbedExtension> = (0..4)
        .map(|i| PerturbedExtension {
            base: base[i].clone(),
            bar: bars[i]
                .cloned()
                .unwrap_or_else(|| VectorFieldSpec::constant(&vec![0.0; metric.dim()])),
        })
        .collect();
    let perturbed_value = covariant_limit_value(
        metric,
        p,
        [&perturbed[0], &perturbed[1], &perturbed[2], &perturbed[3]],
    )?;
    let mut predicted = 0.0;
    for slot in 0..4 {
        if let Some(bar) = bars[slot] {
            let bv = bar.values_at(q)?;
            let mut sub: Vec<&[f64]> = vals.iter().map(|x| x.as_slice()).collect();
            sub[slot] = &bv;
            predicted += ups_from_ii(&ii, sub[0], sub[1], sub[2], sub[3]);
        }
    }
    Ok(PerturbationCheck {
        base_value,
        perturbed_value,
        deviation: perturbed_value - base_value,
        predicted_defect: predicted,
    })
}

/// Sectional curvature of the plane spanned by `a, b` at an
/// off-hypersurface point.
pub fn sectional_offsigma(metric: &AdaptedMetric, p: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
    let cv = curvature_at(metric, p)?;
    let det = cv.inner(a, a) * cv.inner(b, b) - cv.inner(a, b) * cv.inner(a, b);
    let scale = (cv.inner(a, a).abs() + cv.inner(b, b).abs() + cv.inner(a, b).abs()).powi(2);
    if det.abs() <= 1e-14 * scale.max(1e-300) {
        return Err(Error::Precondition(
            "plane is degenerate: det(g restricted) = 0".into(),
        ));
    }
    Ok(cv.contract(a, b, a, b) / det)
}

/// Classify the sectional curvature of the plane of `a, b` at a
/// hypersurface point.
pub fn sectional_limit(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    a: &[f64],
    b: &[f64],
    opts: &ProbeOptions,
) -> Result<LimitReport> {
    let q = p.coords();
    let m = metric.dim();
    let gv = metric.metric_values_at(q)?;
    let inner = |u: &[f64], v: &[f64]| {
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += gv[i][j] * u[i] * v[j];
            }
        }
        acc
    };
    let (gaa, gbb, gab) = (inner(a, a), inner(b, b), inner(a, b));
    let det_sigma = gaa * gbb - gab * gab;
    let scale = (gaa.abs() + gbb.abs() + gab.abs()).powi(2).max(1e-300);
    let rank2 = det_sigma.abs() > RANK_TOL * scale;

    let a_spec = VectorFieldSpec::constant(a);
    let b_spec = VectorFieldSpec::constant(b);
    let samples = sample_ray(p, opts, |ray| sectional_offsigma(metric, ray, a, b))?;
    let (fit, extrapolated, extrapolation_error) = fit_riemann_side(&samples);
    let quantity = format!("sec[{a:?}; {b:?}]");

    let ii = sigma::ii_coordinate_matrix(metric, p)?;
    let ups = ups_from_ii(&ii, a, b, a, b);
    let dtau = metric.tau_at(q)?.d1(0);

    if rank2 {
        let (classification, prediction) = if ups.abs() >= UPS_TOL {
            (
                Classification::Divergent {
                    order: -1,
                    coefficient: ups / (dtau * det_sigma),
                },
                format!("rank 2, II-determinant = {ups:.6e} != 0: diverges at order -1"),
            )
        } else {
            let value =
                covariant_limit_value(metric, p, [&a_spec, &b_spec, &a_spec, &b_spec])? / det_sigma;
            let frame = sigma::screen_frame(metric, p)?;
            let fvecs = frame_vectors(&frame);
            // well-definedness needs only the two curvature slots that vary
            let mut ok = true;
            'outer: for slot in [0usize, 1] {
                for v in &fvecs {
                    let sub: [&[f64]; 4] = match slot {
                        0 => [v, b, a, b],
                        _ => [a, v, a, b],
                    };
                    if ups_from_ii(&ii, sub[0], sub[1], sub[2], sub[3]).abs() >= UPS_TOL {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                (
                    Classification::Finite { value },
                    "rank 2, II-determinant and slot contractions vanish: finite limit".to_string(),
                )
            } else {
                (
                    Classification::ExtensionDependent {
                        canonical_value: value,
                    },
                    "rank 2, II-determinant vanishes but a slot contraction does not".to_string(),
                )
            }
        };
        return Ok(LimitReport {
            quantity,
            classification,
            prediction,
            probe: ProbeData {
                samples,
                slope: fit.slope,
                residual: fit.residual,
                extrapolated,
                extrapolation_error,
                class: fit.class,
            },
            witness: None,
        });
    }

    // rank 1: the radical direction lies in the plane
    let frame = sigma::screen_frame(metric, p)?;
    let nu = |v: &[f64]| inner(v, &frame.n);
    let (nu_a, nu_b) = (nu(a), nu(b));
    if nu_a.abs() > 1e-10 || nu_b.abs() > 1e-10 {
        let pos: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.eps > 0.0)
            .map(|s| (s.eps, s.eps * s.eps * s.value))
            .collect();
        let (coeff, _) = probe::neville_extrapolate(&pos);
        return Ok(LimitReport {
            quantity,
            classification: Classification::Divergent {
                order: -2,
                coefficient: coeff,
            },
            prediction: format!(
                "rank 1 with nu(a) = {nu_a:.3e}, nu(b) = {nu_b:.3e}: diverges at order -2"
            ),
            probe: ProbeData {
                samples,
                slope: fit.slope,
                residual: fit.residual,
                extrapolated,
                extrapolation_error,
                class: fit.class,
            },
            witness: None,
        });
    }

    // nu(a) = nu(b) = 0: the numerator has a boundary limit L0
    let l0 = covariant_limit_value(metric, p, [&a_spec, &b_spec, &a_spec, &b_spec])?;
    // k = boundary value of det / tau, exact from jets
    let gj = metric.metric_at(q)?;
    let inner_jet = |u: &[f64], v: &[f64]| {
        let mut acc = crate::jet::Jet3::constant(m, 0.0);
        for i in 0..m {
            for j in 0..m {
                acc = &acc + &gj[i][j].scale(u[i] * v[j]);
            }
        }
        acc
    };
    let det_jet = &(&inner_jet(a, a) * &inner_jet(b, b)) - &(&inner_jet(a, b) * &inner_jet(a, b));
    let k_det = det_jet.d1(0) / dtau;
    if k_det.abs() < 1e-12 {
        return Err(Error::Precondition(
            "degenerate plane: det(g restricted) vanishes to second order".into(),
        ));
    }
    if l0.abs() >= LIMIT_TOL {
        let pos: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.eps > 0.0)
            .map(|s| (s.eps, s.eps * s.value))
            .collect();
        let (coeff, _) = probe::neville_extrapolate(&pos);
        return Ok(LimitReport {
            quantity,
            classification: Classification::Divergent {
                order: -1,
                coefficient: coeff,
            },
            prediction: format!(
                "rank 1, numerator limit {l0:.6e} != 0 over a tau-order denominator: order -1"
            ),
            probe: ProbeData {
                samples,
                slope: fit.slope,
                residual: fit.residual,
                extrapolated,
                extrapolation_error,
                class: fit.class,
            },
            witness: None,
        });
    }

    // bounded, but never extension-independent: exhibit two extensions
    let rho_b = sigma::rho_form(metric, p, b).unwrap_or(0.0);
    let n_bar = VectorFieldSpec::constant(&frame.n);
    let pert = PerturbedExtension {
        base: a_spec.clone(),
        bar: n_bar,
    };
    let canonical = {
        let pos: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.eps > 0.0)
            .map(|s| (s.eps, s.value))
            .collect();
        probe::neville_extrapolate(&pos).0
    };
    let perturbed_samples = sample_ray(p, opts, |ray| {
        let cv = curvature_at(metric, ray)?;
        let av = pert.eval(metric, ray)?;
        let num = cv.contract(&av, b, &av, b);
        let det = cv.inner(&av, &av) * cv.inner(b, b) - cv.inner(&av, b).powi(2);
        Ok(num / det)
    })?;
    let perturbed = {
        let pos: Vec<(f64, f64)> = perturbed_samples
            .iter()
            .filter(|s| s.eps > 0.0)
            .map(|s| (s.eps, s.value))
            .collect();
        probe::neville_extrapolate(&pos).0
    };
    let l_cross = covariant_limit_value(
        metric,
        p,
        [
            &VectorFieldSpec::constant(&frame.n),
            &b_spec,
            &a_spec,
            &b_spec,
        ],
    )?;
    let predicted_shift = (2.0 * l_cross - rho_b * rho_b) / k_det;
    Ok(LimitReport {
        quantity,
        classification: Classification::ExtensionDependent {
            canonical_value: canonical,
        },
        prediction: format!(
            "rank 1 sectional curvature is never extension-independent; \
             perturbing by tau*N shifts the limit by {predicted_shift:.6e}"
        ),
        probe: ProbeData {
            samples,
            slope: fit.slope,
            residual: fit.residual,
            extrapolated,
            extrapolation_error,
            class: fit.class,
        },
        witness: Some(PerturbationWitness {
            canonical,
            perturbed,
            predicted_shift,
        }),
    })
}

/// `Ric(a, b)` at an off-hypersurface point.
pub fn ricci_offsigma(metric: &AdaptedMetric, p: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(curvature_at(metric, p)?.ricci(a, b))
}

/// Frame pair for a Ricci probe; screen indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RicciPair {
    NN,
    NV { lam: usize },
    NR,
    RV { lam: usize },
    RR,
    VW { lam: usize, mu: usize },
}

impl RicciPair {
    pub fn label(&self) -> String {
        match self {
            RicciPair::NN => "ric[N,N]".into(),
            RicciPair::NV { lam } => format!("ric[N,V{}]", lam + 2),
            RicciPair::NR => "ric[N,R]".into(),
            RicciPair::RV { lam } => format!("ric[R,V{}]", lam + 2),
            RicciPair::RR => "ric[R,R]".into(),
            RicciPair::VW { lam, mu } => format!("ric[V{},V{}]", lam + 2, mu + 2),
        }
    }

    pub fn parse(tag: &str) -> Option<RicciPair> {
        Some(match tag {
            "NN" => RicciPair::NN,
            "NV" => RicciPair::NV { lam: 0 },
            "NR" => RicciPair::NR,
            "RV" => RicciPair::RV { lam: 0 },
            "RR" => RicciPair::RR,
            "VW" => RicciPair::VW { lam: 0, mu: 0 },
            _ => return None,
        })
    }
}

/// Classify a Ricci component near the hypersurface. The predicted side is
/// derived from the II determinants of the individual trace terms plus the
/// boundary limit of the radical-pair term; the empirical side is a fitted
/// slope of `Ric` along the transverse ray.
pub fn ricci_limit(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    pair: RicciPair,
    opts: &ProbeOptions,
) -> Result<LimitReport> {
    let frame = sigma::screen_frame(metric, p)?;
    let s = frame.screen.len();
    let pick_v =
        |lam: usize| -> Result<Vec<f64>> {
            frame.screen.get(lam).cloned().ok_or_else(|| {
                Error::InvalidInput(format!("screen index {lam} out of range (0..{s})"))
            })
        };
    let (a, b): (Vec<f64>, Vec<f64>) = match pair {
        RicciPair::NN => (frame.n.clone(), frame.n.clone()),
        RicciPair::NV { lam } => (frame.n.clone(), pick_v(lam)?),
        RicciPair::NR => (frame.n.clone(), frame.r.clone()),
        RicciPair::RV { lam } => (frame.r.clone(), pick_v(lam)?),
        RicciPair::RR => (frame.r.clone(), frame.r.clone()),
        RicciPair::VW { lam, mu } => (pick_v(lam)?, pick_v(mu)?),
    };

    let ii = sigma::ii_coordinate_matrix(metric, p)?;
    let fvecs = frame_vectors(&frame);

    // trace-term analysis: sum over the orthonormal part of the frame, then
    // the tau-weighted radical pair
    let mut frame_term_div = false;
    let mut max_frame_ups: f64 = 0.0;
    for e in fvecs.iter().take(fvecs.len() - 1) {
        let u = ups_from_ii(&ii, &a, e, &b, e);
        max_frame_ups = max_frame_ups.max(u.abs());
        if u.abs() >= UPS_TOL {
            frame_term_div = true;
        }
    }
    let ups_r = ups_from_ii(&ii, &a, &frame.r, &b, &frame.r);
    let a_spec = VectorFieldSpec::constant(&a);
    let b_spec = VectorFieldSpec::constant(&b);
    let r_spec = VectorFieldSpec::constant(&frame.r);
    let last_limit = if ups_r.abs() < UPS_TOL {
        covariant_limit_value(metric, p, [&a_spec, &r_spec, &b_spec, &r_spec])?
    } else {
        f64::NAN
    };

    let samples = sample_ray(p, opts, |ray| ricci_offsigma(metric, ray, &a, &b))?;
    let (fit, extrapolated, extrapolation_error) = fit_riemann_side(&samples);
    let pos: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.eps > 0.0)
        .map(|s| (s.eps, s.value))
        .collect();

    let pair_note = ricci_pair_note(metric, p, pair, &frame)?;
    let (classification, order_note) = if ups_r.abs() >= UPS_TOL {
        let coeff = {
            let scaled: Vec<(f64, f64)> = pos.iter().map(|(e, v)| (*e, e * e * v)).collect();
            probe::neville_extrapolate(&scaled).0
        };
        (
            Classification::Divergent {
                order: -2,
                coefficient: coeff,
            },
            format!("radical-pair II-determinant = {ups_r:.3e}: order -2"),
        )
    } else if frame_term_div || last_limit.abs() >= LIMIT_TOL {
        let coeff = {
            let scaled: Vec<(f64, f64)> = pos.iter().map(|(e, v)| (*e, e * v)).collect();
            probe::neville_extrapolate(&scaled).0
        };
        (
            Classification::Divergent {
                order: -1,
                coefficient: coeff,
            },
            format!(
                "trace terms: max frame II-determinant {max_frame_ups:.3e}, \
                 radical-pair limit {last_limit:.3e}: order -1"
            ),
        )
    } else {
        let (value, _) = probe::neville_extrapolate(&pos);
        (
            Classification::Finite { value },
            "all trace terms bounded with vanishing radical-pair limit".to_string(),
        )
    };

    Ok(LimitReport {
        quantity: pair.label(),
        classification,
        prediction: format!("{pair_note}; {order_note}"),
        probe: ProbeData {
            samples,
            slope: fit.slope,
            residual: fit.residual,
            extrapolated,
            extrapolation_error,
            class: fit.class,
        },
        witness: None,
    })
}

/// The pair-specific boundary statement evaluated at `p`.
fn ricci_pair_note(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    pair: RicciPair,
    frame: &sigma::SigmaFrame,
) -> Result<String> {
    Ok(match pair {
        RicciPair::NN => "Ric(N,N) always diverges like tau^-2".to_string(),
        RicciPair::RR => "Ric(R,R) always diverges like tau^-1".to_string(),
        RicciPair::RV { .. } => "Ric(R,V) is bounded for every screen V".to_string(),
        RicciPair::NV { lam } => {
            let c = rho_of_screen_bracket(metric, p, lam)?;
            format!("Ric(N,V) bounded iff rho([V,R]) = 0; here rho([V,R]) = {c:.6e}")
        }
        RicciPair::NR => {
            let mut max_diag: f64 = 0.0;
            let s = frame.screen.len();
            for l in 0..s {
                max_diag = max_diag.max(frame.ii[l + 1][l + 1].abs());
            }
            format!(
                "Ric(N,R) bounded iff the screen is II-flat; here max |II(V,V)| = {max_diag:.3e}"
            )
        }
        RicciPair::VW { lam, mu } => {
            let h = frame.h[lam][mu];
            format!("with II-flat screen, Ric(V,W) bounded iff III-flat; here H(V,W) = {h:.6e}")
        }
    })
}

/// `rho([V_lam, R])` for the canonical screen frame field, computed from the
/// jet-valued Gram-Schmidt frame.
pub fn rho_of_screen_bracket(metric: &AdaptedMetric, p: &SigmaPoint, lam: usize) -> Result<f64> {
    let m = metric.dim();
    let frame_jets = sigma::screen_frame_jets(metric, p)?;
    let v = frame_jets
        .get(lam)
        .ok_or_else(|| Error::InvalidInput(format!("screen index {lam} out of range")))?;
    // [V, R] = -d_m V (R is the last coordinate field)
    let bracket: Vec<f64> = v.iter().map(|j| -j.d1(m - 1)).collect();
    sigma::rho_form(metric, p, &bracket)
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub covariant_value: f64,
    pub h_det: f64,
    pub defect: f64,
}

/// Gauss formula: tangential-connection curvature against the boundary
/// limit of the Levi-Civita curvature minus the H determinant.
pub fn gauss_check(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
    z: &VectorFieldSpec,
    t: &VectorFieldSpec,
) -> Result<GaussCheck> {
    let lhs = crate::connections::connection_curvature(
        metric,
        &crate::connections::ConnectionKind::Tangential,
        p,
        x,
        y,
        z,
        t,
    )?;
    let covariant_value = covariant_limit_value(metric, p, [x, y, z, t])?;
    let q = p.coords();
    let h_tan = sigma::h_tangent_matrix(metric, p)?;
    let hv = |u: &[f64], v: &[f64]| {
        let s = h_tan.len();
        let mut acc = 0.0;
        for i in 0..s {
            for j in 0..s {
                acc += h_tan[i][j] * u[i + 1] * v[j + 1];
            }
        }
        acc
    };
    let (xv, yv, zv, tv) = (
        x.values_at(q)?,
        y.values_at(q)?,
        z.values_at(q)?,
        t.values_at(q)?,
    );
    let h_det = hv(&xv, &zv) * hv(&yv, &tv) - hv(&yv, &zv) * hv(&xv, &tv);
    let rhs = covariant_value - h_det;
    Ok(GaussCheck {
        lhs,
        rhs,
        covariant_value,
        h_det,
        defect: (lhs - rhs).abs(),
    })
}

/// Sign calibration of the curvature assembly: the bulk tensor
/// `tau * <R(N,R)N,R>` must approach the restricted value `-1`. Returns
/// `+1` when the hardcoded convention agrees, `-1` when every curvature
/// would need a global sign flip.
pub fn convention_check(metric: &AdaptedMetric) -> Result<i32> {
    let mid: Vec<f64> = metric.domain()[1..]
        .iter()
        .map(|[lo, hi]| 0.5 * (lo + hi))
        .collect();
    let p = SigmaPoint::new(&mid);
    let frame = sigma::screen_frame(metric, &p)?;
    let n = VectorFieldSpec::constant(&frame.n);
    let r = VectorFieldSpec::constant(&frame.r);
    let bulk = upsilon_bulk(metric, &ray_point(&p, 1e-2), &n, &r, &n, &r)?;
    let restricted = upsilon_restricted(metric, &p, &frame.n, &frame.r, &frame.n, &frame.r)?;
    if (bulk - restricted).abs() < 0.05 {
        Ok(1)
    } else if (bulk + restricted).abs() < 0.05 {
        Ok(-1)
    } else {
        Err(Error::Precondition(format!(
            "convention check inconclusive: bulk {bulk:.6e} vs restricted {restricted:.6e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord(m: usize, k: usize) -> VectorFieldSpec {
        VectorFieldSpec::coordinate(m, k)
    }

    fn sp(coords: &[f64]) -> SigmaPoint {
        SigmaPoint::new(coords)
    }

    #[test]
    fn flat_curvature_closed_form() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let p = [0.05, 0.0, 0.0];
        let v = covariant_curvature_offsigma(
            &m,
            &p,
            &coord(3, 1),
            &coord(3, 3),
            &coord(3, 1),
            &coord(3, 3),
        )
        .unwrap();
        assert!((v + 10.0).abs() < 1e-9, "{v}");
        let v = covariant_curvature_offsigma(
            &m,
            &[0.1, 0.0, 0.0],
            &coord(3, 1),
            &coord(3, 2),
            &coord(3, 1),
            &coord(3, 2),
        )
        .unwrap();
        assert!(v.abs() < 1e-12);
        // antisymmetry under the first-slot swap
        let a = covariant_curvature_offsigma(
            &m,
            &p,
            &coord(3, 3),
            &coord(3, 1),
            &coord(3, 1),
            &coord(3, 3),
        )
        .unwrap();
        assert!((a - 10.0).abs() < 1e-9);
    }

    #[test]
    fn upsilon_bulk_smooth_across_sigma() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        for x1 in [0.05, -0.05] {
            let v = upsilon_bulk(
                &m,
                &[x1, 0.0, 0.0],
                &coord(3, 1),
                &coord(3, 3),
                &coord(3, 1),
                &coord(3, 3),
            )
            .unwrap();
            assert!((v + 1.0).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn upsilon_anchor_on_all_models() {
        for name in crate::metric::BUILTIN_NAMES {
            let m = AdaptedMetric::builtin(name).unwrap();
            let p = sp(&vec![0.12; m.dim() - 1]);
            let f = sigma::screen_frame(&m, &p).unwrap();
            let u = upsilon_restricted(&m, &p, &f.n, &f.r, &f.n, &f.r).unwrap();
            assert!((u + 1.0).abs() < 1e-12, "{name}: {u}");
        }
    }

    #[test]
    fn upsilon_restricted_iicurved_value() {
        let m = AdaptedMetric::builtin("iicurved").unwrap();
        let p = sp(&[0.0, 0.0]);
        let f = sigma::screen_frame(&m, &p).unwrap();
        let u = upsilon_restricted(&m, &p, &f.n, &f.screen[0], &f.screen[0], &f.r).unwrap();
        assert!((u - 0.5).abs() < 1e-12, "{u}");
    }

    #[test]
    fn covariant_limit_divergent_on_nrnr() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.2, 0.1]);
        let r = covariant_limit(
            &m,
            &p,
            &coord(3, 1),
            &coord(3, 3),
            &coord(3, 1),
            &coord(3, 3),
            &ProbeOptions::default(),
        )
        .unwrap();
        match r.classification {
            Classification::Divergent { order, coefficient } => {
                assert_eq!(order, -1);
                assert!((coefficient + 0.5).abs() < 1e-10, "{coefficient}");
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        assert_eq!(r.probe.class, ProbeClass::OrderMinus1);
    }

    #[test]
    fn covariant_limit_extension_dependent_on_iicurved() {
        let m = AdaptedMetric::builtin("iicurved").unwrap();
        let p = sp(&[0.0, 0.0]);
        let f = sigma::screen_frame(&m, &p).unwrap();
        let v = VectorFieldSpec::constant(&f.screen[0]);
        let r = VectorFieldSpec::constant(&f.r);
        let rep = covariant_limit(&m, &p, &v, &r, &v, &r, &ProbeOptions::default()).unwrap();
        match rep.classification {
            Classification::ExtensionDependent { canonical_value } => {
                // canonical value -1/4 at the origin, from the closed form
                assert!((canonical_value + 0.25).abs() < 1e-7, "{canonical_value}");
            }
            other => panic!("expected extension dependence, got {other:?}"),
        }
        assert!((rep.probe.extrapolated + 0.25).abs() < 1e-7);
    }

    #[test]
    fn perturbation_deviation_matches_defect() {
        // iicurved, base (V,R,V,R), perturb the second slot by N
        let m = AdaptedMetric::builtin("iicurved").unwrap();
        let p = sp(&[0.0, 0.0]);
        let f = sigma::screen_frame(&m, &p).unwrap();
        let v = VectorFieldSpec::constant(&f.screen[0]);
        let r = VectorFieldSpec::constant(&f.r);
        let n = VectorFieldSpec::constant(&f.n);
        let check =
            perturbation_check(&m, &p, [&v, &r, &v, &r], [None, Some(&n), None, None]).unwrap();
        assert!(
            (check.deviation - check.predicted_defect).abs() < 1e-6,
            "{check:?}"
        );
        assert!(
            check.predicted_defect.abs() > 0.4,
            "defect should be -1/2-ish: {check:?}"
        );
        // zero perturbation: no deviation
        let check = perturbation_check(&m, &p, [&v, &r, &v, &r], [None, None, None, None]).unwrap();
        assert!(check.deviation.abs() < 1e-9);
    }

    #[test]
    fn sectional_offsigma_closed_forms() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let p = [0.1, 0.0, 0.0];
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let e3 = [0.0, 0.0, 1.0];
        let k = sectional_offsigma(&m, &p, &e1, &e3).unwrap();
        assert!((k + 25.0).abs() < 1e-9, "{k}");
        let k = sectional_offsigma(&m, &p, &e1, &e2).unwrap();
        assert!(k.abs() < 1e-12);
        // scaling invariance
        let k1 = sectional_offsigma(&m, &p, &[2.0, 0.0, 0.0], &e3).unwrap();
        assert!((k1 + 25.0).abs() < 1e-9);
    }

    #[test]
    fn sectional_limit_cases() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.3, 0.0]);
        let f = sigma::screen_frame(&m, &p).unwrap();
        // N wedge V: bounded with value 0
        let rep = sectional_limit(&m, &p, &f.n, &f.screen[0], &ProbeOptions::default()).unwrap();
        match rep.classification {
            Classification::Finite { value } => assert!(value.abs() < 1e-10, "{value}"),
            other => panic!("expected finite, got {other:?}"),
        }
        // N wedge R: rank 1, diverges at order -2
        let rep = sectional_limit(&m, &p, &f.n, &f.r, &ProbeOptions::default()).unwrap();
        match rep.classification {
            Classification::Divergent { order, coefficient } => {
                assert_eq!(order, -2);
                assert!((coefficient + 0.25).abs() < 1e-8, "{coefficient}");
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        assert_eq!(rep.probe.class, ProbeClass::OrderMinus2);
    }

    #[test]
    fn sectional_rank1_extension_dependent_on_hcurved() {
        // x2 = 0 so that the numerator limit vanishes
        let m = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.0, 0.4]);
        let f = sigma::screen_frame(&m, &p).unwrap();
        let rep = sectional_limit(&m, &p, &f.screen[0], &f.r, &ProbeOptions::default()).unwrap();
        let w = rep.witness.expect("witness required");
        assert!(matches!(
            rep.classification,
            Classification::ExtensionDependent { .. }
        ));
        let shift = w.perturbed - w.canonical;
        assert!(
            (shift - w.predicted_shift).abs() < 1e-6,
            "shift {shift} vs predicted {}",
            w.predicted_shift
        );
        assert!(w.predicted_shift.abs() > 0.5, "{:?}", w.predicted_shift);
    }

    #[test]
    fn ricci_closed_forms_on_flat() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let eps = 0.05;
        let p = [eps, 0.0, 0.0];
        let n = [1.0, 0.0, 0.0];
        let r = [0.0, 0.0, 1.0];
        let v = [0.0, 1.0, 0.0];
        let ric = ricci_offsigma(&m, &p, &n, &n).unwrap();
        assert!((ric + 1.0 / (4.0 * eps * eps)).abs() < 1e-8, "{ric}");
        let ric = ricci_offsigma(&m, &p, &r, &r).unwrap();
        assert!((ric + 1.0 / (2.0 * eps)).abs() < 1e-9, "{ric}");
        let ric = ricci_offsigma(&m, &p, &v, &v).unwrap();
        assert!(ric.abs() < 1e-12);
    }

    #[test]
    fn ricci_limits_on_flat() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.2, -0.1]);
        let opts = ProbeOptions::default();
        let rep = ricci_limit(&m, &p, RicciPair::NN, &opts).unwrap();
        match rep.classification {
            Classification::Divergent { order, coefficient } => {
                assert_eq!(order, -2);
                assert!((coefficient + 0.25).abs() < 1e-8, "{coefficient}");
            }
            other => panic!("NN: {other:?}"),
        }
        let rep = ricci_limit(&m, &p, RicciPair::RR, &opts).unwrap();
        match rep.classification {
            Classification::Divergent { order, coefficient } => {
                assert_eq!(order, -1);
                assert!((coefficient + 0.5).abs() < 1e-8, "{coefficient}");
            }
            other => panic!("RR: {other:?}"),
        }
        let rep = ricci_limit(&m, &p, RicciPair::RV { lam: 0 }, &opts).unwrap();
        assert!(rep.classification.is_bounded(), "{rep:?}");
        let rep = ricci_limit(&m, &p, RicciPair::VW { lam: 0, mu: 0 }, &opts).unwrap();
        assert!(rep.classification.is_bounded(), "{rep:?}");
    }

    #[test]
    fn ricci_vw_diverges_on_hcurved() {
        let m = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.4, 0.0]);
        let rep = ricci_limit(
            &m,
            &p,
            RicciPair::VW { lam: 0, mu: 0 },
            &ProbeOptions::default(),
        )
        .unwrap();
        match rep.classification {
            Classification::Divergent { order, .. } => assert_eq!(order, -1),
            other => panic!("expected order -1, got {other:?}"),
        }
        assert_eq!(rep.probe.class, ProbeClass::OrderMinus1);
    }

    #[test]
    fn ricci_nv_diverges_on_twisted() {
        // rho([V,R]) = 1/2 at x3 != 0 forces a tau^-1 divergence
        let m = AdaptedMetric::builtin("twisted").unwrap();
        let p = sp(&[0.3, 0.5]);
        let c = rho_of_screen_bracket(&m, &p, 0).unwrap();
        assert!((c - 0.5).abs() < 1e-10, "{c}");
        let rep = ricci_limit(&m, &p, RicciPair::NV { lam: 0 }, &ProbeOptions::default()).unwrap();
        match rep.classification {
            Classification::Divergent { order, .. } => assert_eq!(order, -1),
            other => panic!("expected order -1, got {other:?}"),
        }
    }

    #[test]
    fn finite_reports_carry_consistent_probes() {
        // bounded classifications must show a flat slope and an extrapolated
        // value matching the exact route within the reported uncertainty
        let cases = [
            ("flat", [0.2f64, -0.1], (0usize, 1usize, 0, 1)), // (N,V,N,V)
            ("hcurved", [0.3, 0.4], (1, 2, 1, 2)),            // (V,R,V,R)
            ("twisted", [0.2, 0.5], (1, 2, 1, 2)),
        ];
        for (name, base, (a, b, c, d)) in cases {
            let m = AdaptedMetric::builtin(name).unwrap();
            let p = sp(&base);
            let f = sigma::screen_frame(&m, &p).unwrap();
            let fv = [f.n.clone(), f.screen[0].clone(), f.r.clone()];
            let specs: Vec<VectorFieldSpec> =
                fv.iter().map(|v| VectorFieldSpec::constant(v)).collect();
            let rep = covariant_limit(
                &m,
                &p,
                &specs[a.min(2)],
                &specs[b.min(2)],
                &specs[c.min(2)],
                &specs[d.min(2)],
                &ProbeOptions::default(),
            )
            .unwrap();
            let value = match rep.classification {
                Classification::Finite { value } => value,
                Classification::ExtensionDependent { canonical_value } => canonical_value,
                Classification::Divergent { .. } => panic!("{name}: expected bounded"),
            };
            assert!(rep.probe.slope.abs() < 0.1 || rep.probe.class == ProbeClass::Bounded);
            let tol = (10.0 * rep.probe.extrapolation_error).max(1e-7);
            assert!(
                (rep.probe.extrapolated - value).abs() <= tol,
                "{name}: extrapolated {} vs value {} (tol {tol:.3e})",
                rep.probe.extrapolated,
                value
            );
        }
    }

    #[test]
    fn gauss_on_hcurved_coordinate_fields() {
        let m = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.4, 0.0]);
        let d2 = coord(3, 2);
        let d3 = coord(3, 3);
        let g = gauss_check(&m, &p, &d2, &d3, &d2, &d3).unwrap();
        // both routes: 0 = x2/2 - x2/2
        assert!((g.covariant_value - 0.2).abs() < 1e-8, "{g:?}");
        assert!((g.h_det - 0.2).abs() < 1e-12, "{g:?}");
        assert!(g.defect < 1e-7, "{g:?}");
    }

    #[test]
    fn convention_is_positive() {
        for name in crate::metric::BUILTIN_NAMES {
            let m = AdaptedMetric::builtin(name).unwrap();
            assert_eq!(convention_check(&m).unwrap(), 1, "{name}");
        }
    }

    #[test]
    fn cross_route_on_iicurved_nvvr() {
        // both routes give 1/2 for the (N, V, V, R) quadruple
        let m = AdaptedMetric::builtin("iicurved").unwrap();
        let p = sp(&[0.0, 0.0]);
        let f = sigma::screen_frame(&m, &p).unwrap();
        let n = VectorFieldSpec::constant(&f.n);
        let v = VectorFieldSpec::constant(&f.screen[0]);
        let r = VectorFieldSpec::constant(&f.r);
        let samples: Vec<(f64, f64)> = ProbeOptions::default()
            .schedule()
            .iter()
            .map(|&e| {
                let b = upsilon_bulk(&m, &ray_point(&p, e), &n, &v, &v, &r).unwrap();
                (e, b)
            })
            .collect();
        let (lim, _) = probe::neville_extrapolate(&samples);
        assert!((lim - 0.5).abs() < 1e-8, "{lim}");
    }
}
