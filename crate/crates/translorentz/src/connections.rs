//! Connections on the degenerate hypersurface.
//!
//! The screen connection-operator `D^S` solves `square_X A (v) = <D^S_X A, v>`
//! on the positive definite screen, the main connection adds the radical term
//! `X(rho(Y)) R`, and subtracting half of `d rho` yields the torsion-free
//! main admissible connection. Every admissible connection differs from it by
//! a symmetric offset `sigma(X,Y) R`. The tangential connection projects the
//! Levi-Civita limit tangentially and exists when II vanishes on tangent
//! pairs.
//!
//! Covariant curvatures use exact jets for the inner connection evaluations
//! and Richardson-extrapolated central differences (step 1e-4) for the outer
//! field derivatives.

use crate::dual;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet3;
use crate::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};
use crate::sigma;

const TANGENT_TOL: f64 = 1e-12;
const CURVATURE_STEP: f64 = 1e-4;

/// Symmetric offset `sigma` on tangent directions `2..m`, entries given as
/// scalar fields on the hypersurface.
#[derive(Debug, Clone)]
pub struct AdmissibleSpec {
    entries: Vec<Vec<Expr>>,
}

impl AdmissibleSpec {
    pub fn new(metric: &AdaptedMetric, entries: Vec<Vec<Expr>>) -> Result<Self> {
        let s = metric.dim() - 1;
        if entries.len() != s || entries.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidInput(format!(
                "sigma offset must be a {s}x{s} matrix over tangent directions"
            )));
        }
        for row in &entries {
            for e in row {
                if e.depends_on(0) {
                    return Err(Error::InvalidInput(format!(
                        "sigma entry depends on x1: {e}"
                    )));
                }
            }
        }
        let spec = AdmissibleSpec { entries };
        for p in metric.sigma_grid(3) {
            let q = p.coords();
            for i in 0..s {
                for j in i + 1..s {
                    let a = spec.entries[i][j].eval_jet(q)?.value();
                    let b = spec.entries[j][i].eval_jet(q)?.value();
                    if (a - b).abs() > 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "sigma offset is not symmetric at {q:?}: ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(spec)
    }

    pub fn parse(metric: &AdaptedMetric, rows: &[Vec<String>]) -> Result<Self> {
        let m = metric.dim();
        let entries = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| crate::expr::parse_expr(t, m).map_err(Error::from))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(metric, entries)
    }

    /// `sigma(X, Y)` at a hypersurface point for tangent vectors.
    pub fn value(&self, p: &SigmaPoint, x: &[f64], y: &[f64]) -> Result<f64> {
        let q = p.coords();
        let s = self.entries.len();
        let mut acc = 0.0;
        for i in 0..s {
            for j in 0..s {
                let sij = self.entries[i][j].eval_jet(q)?.value();
                acc += sij * x[i + 1] * y[j + 1];
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone)]
pub enum ConnectionKind {
    /// The screen connection-operator; not a connection on the hypersurface.
    ScreenOp,
    Main,
    MainAdmissible,
    Admissible(AdmissibleSpec),
    Tangential,
}

fn check_tangent(name: &str, f: &VectorFieldSpec, p: &SigmaPoint) -> Result<()> {
    let v0 = f.values_at(p.coords())?[0];
    if v0.abs() > TANGENT_TOL {
        return Err(Error::Precondition(format!(
            "{name} must be tangent to the hypersurface (first component {v0:.3e})"
        )));
    }
    Ok(())
}

/// `D^S_X A`: the unique screen vector with `<D^S_X A, v> = square_X A (v)`
/// for all screen `v`. Returned in coordinates.
pub fn screen_connection(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    a: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    check_tangent("X", x, p)?;
    let m = metric.dim();
    let q = p.coords();
    let frame = sigma::screen_frame(metric, p)?;
    let g = metric.metric_at(q)?;
    let xj = x.jets_at(q)?;
    let aj = a.jets_at(q)?;
    let mut out = vec![0.0; m];
    for v in &frame.screen {
        let vj = VectorFieldSpec::constant(v).jets_at(q)?;
        let comp = dual::koszul_from_jets(&g, &xj, &aj, &vj).value();
        for k in 0..m {
            out[k] += comp * v[k];
        }
    }
    Ok(out)
}

/// Tangential derivative `X(rho(Y))` at `p` from jets.
fn x_of_rho_y(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<f64> {
    let rho_y = sigma::rho_field_jet(metric, p, y)?;
    let xv = x.values_at(p.coords())?;
    let m = metric.dim();
    Ok((1..m).map(|i| xv[i] * rho_y.d1(i)).sum())
}

fn eval_unchecked(
    metric: &AdaptedMetric,
    kind: &ConnectionKind,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    let m = metric.dim();
    match kind {
        ConnectionKind::ScreenOp => screen_connection(metric, p, x, y),
        ConnectionKind::Main => {
            check_tangent("Y", y, p)?;
            let mut out = screen_connection(metric, p, x, y)?;
            out[m - 1] += x_of_rho_y(metric, p, x, y)?;
            Ok(out)
        }
        ConnectionKind::MainAdmissible => {
            let mut out = eval_unchecked(metric, &ConnectionKind::Main, p, x, y)?;
            out[m - 1] -= 0.5 * sigma::d_rho(metric, p, x, y)?;
            Ok(out)
        }
        ConnectionKind::Admissible(spec) => {
            let mut out = eval_unchecked(metric, &ConnectionKind::MainAdmissible, p, x, y)?;
            let xv = x.values_at(p.coords())?;
            let yv = y.values_at(p.coords())?;
            out[m - 1] += spec.value(p, &xv, &yv)?;
            Ok(out)
        }
        ConnectionKind::Tangential => {
            check_tangent("X", x, p)?;
            check_tangent("Y", y, p)?;
            let q = p.coords();
            let frame = sigma::screen_frame(metric, p)?;
            let g = metric.metric_at(q)?;
            let xj = x.jets_at(q)?;
            let yj = y.jets_at(q)?;
            let mut out = vec![0.0; m];
            for v in &frame.screen {
                let vj = VectorFieldSpec::constant(v).jets_at(q)?;
                let comp = dual::koszul_from_jets(&g, &xj, &yj, &vj).value();
                for k in 0..m {
                    out[k] += comp * v[k];
                }
            }
            let radical = VectorFieldSpec::coordinate(m, m).jets_at(q)?;
            let sq_r = dual::koszul_from_jets(&g, &xj, &yj, &radical);
            out[m - 1] += dual::lhopital_limit(metric, p, &sq_r)?;
            Ok(out)
        }
    }
}

fn require_ii_flat(metric: &AdaptedMetric) -> Result<()> {
    let flat = sigma::flatness(
        metric,
        &metric.sigma_grid(crate::metric::GRID_POINTS_PER_AXIS),
    )?;
    if !flat.ii_flat {
        return Err(Error::Precondition(format!(
            "tangential connection requires an II-flat hypersurface (max |II^S| = {:.3e})",
            flat.max_ii
        )));
    }
    Ok(())
}

/// Evaluate a connection at `p` on tangent fields, in coordinates.
pub fn connection_at(
    metric: &AdaptedMetric,
    kind: &ConnectionKind,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    if matches!(kind, ConnectionKind::Tangential) {
        require_ii_flat(metric)?;
    }
    eval_unchecked(metric, kind, p, x, y)
}

/// `D_tilde_X Y = D^S_X Y + X(rho(Y)) R`.
pub fn main_connection(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    eval_unchecked(metric, &ConnectionKind::Main, p, x, y)
}

/// `D_dot_X Y = D_tilde_X Y - 1/2 d rho(X,Y) R`, always admissible.
pub fn main_admissible_connection(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    eval_unchecked(metric, &ConnectionKind::MainAdmissible, p, x, y)
}

/// `D_X Y = D_dot_X Y + sigma(X,Y) R`.
pub fn admissible_connection(
    metric: &AdaptedMetric,
    spec: &AdmissibleSpec,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    eval_unchecked(metric, &ConnectionKind::Admissible(spec.clone()), p, x, y)
}

/// Tangential projection of the Levi-Civita limit; requires II-flatness.
pub fn tangential_connection(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    connection_at(metric, &ConnectionKind::Tangential, p, x, y)
}

/// `Tor(X,Y) = D_X Y - D_Y X - [X,Y]` at `p`.
pub fn torsion(
    metric: &AdaptedMetric,
    kind: &ConnectionKind,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<Vec<f64>> {
    if matches!(kind, ConnectionKind::ScreenOp) {
        return Err(Error::InvalidInput(
            "the screen operator is not a connection; torsion is undefined".into(),
        ));
    }
    let m = metric.dim();
    let dxy = connection_at(metric, kind, p, x, y)?;
    let dyx = connection_at(metric, kind, p, y, x)?;
    let br = x.bracket_jets(y, p.coords())?;
    Ok((0..m).map(|k| dxy[k] - dyx[k] - br[k].value()).collect())
}

/// Richardson-extrapolated central difference of `f` along hypersurface
/// axis `axis` (1-based tangent axis in `2..=m`).
fn sigma_derivative<F>(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    axis: usize,
    mut f: F,
) -> Result<Vec<f64>>
where
    F: FnMut(&SigmaPoint) -> Result<Vec<f64>>,
{
    let h = CURVATURE_STEP;
    let [lo, hi] = metric.domain()[axis - 1];
    let x = p.coords()[axis - 1];
    if x - h < lo || x + h > hi {
        return Err(Error::Precondition(format!(
            "finite-difference stencil leaves the box on axis {axis} at {x}"
        )));
    }
    let shift = |delta: f64| {
        let mut q = p.coords().to_vec();
        q[axis - 1] += delta;
        SigmaPoint::from_full(&q).expect("x1 untouched")
    };
    let m = metric.dim();
    let mut result = vec![0.0; m];
    let wp1 = f(&shift(h))?;
    let wm1 = f(&shift(-h))?;
    let wp2 = f(&shift(h / 2.0))?;
    let wm2 = f(&shift(-h / 2.0))?;
    for k in 0..m {
        let d_h = (wp1[k] - wm1[k]) / (2.0 * h);
        let d_h2 = (wp2[k] - wm2[k]) / h;
        result[k] = (4.0 * d_h2 - d_h) / 3.0;
    }
    Ok(result)
}

/// Covariant curvature `<D_X(D_Y Z) - D_Y(D_X Z) - D_[X,Y] Z, T>` at `p`.
pub fn connection_curvature(
    metric: &AdaptedMetric,
    kind: &ConnectionKind,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
    z: &VectorFieldSpec,
    t: &VectorFieldSpec,
) -> Result<f64> {
    if matches!(kind, ConnectionKind::ScreenOp) {
        return Err(Error::InvalidInput(
            "the screen operator is not a connection; curvature is undefined".into(),
        ));
    }
    if matches!(kind, ConnectionKind::Tangential) {
        require_ii_flat(metric)?;
    }
    let m = metric.dim();
    let q = p.coords();

    // connection coefficients D_{d_i} d_j at p, tangent pairs only
    let coords: Vec<VectorFieldSpec> = (2..=m).map(|k| VectorFieldSpec::coordinate(m, k)).collect();
    let mut coeff = vec![vec![vec![0.0; m]; m - 1]; m - 1];
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            coeff[i][j] = eval_unchecked(metric, kind, p, &coords[i], &coords[j])?;
        }
    }

    // D_A W for a numerically-known field W on the hypersurface
    let d_field =
        |a: &VectorFieldSpec, b: &VectorFieldSpec, c: &VectorFieldSpec| -> Result<Vec<f64>> {
            let av = a.values_at(q)?;
            let w_p = eval_unchecked(metric, kind, p, b, c)?;
            let mut out = vec![0.0; m];
            for i in 1..m {
                if av[i] == 0.0 {
                    continue;
                }
                let dw =
                    sigma_derivative(metric, p, i + 1, |s| eval_unchecked(metric, kind, s, b, c))?;
                for k in 0..m {
                    out[k] += av[i] * dw[k];
                }
                for j in 1..m {
                    for k in 0..m {
                        out[k] += av[i] * w_p[j] * coeff[i - 1][j - 1][k];
                    }
                }
            }
            Ok(out)
        };

    let term1 = d_field(x, y, z)?;
    let term2 = d_field(y, x, z)?;
    let br = x.bracket_jets(y, q)?;
    let br_values: Vec<f64> = br.iter().map(|j| j.value()).collect();
    let br_spec = VectorFieldSpec::constant(&br_values);
    let term3 = eval_unchecked(metric, kind, p, &br_spec, z)?;

    let gv = metric.metric_values_at(q)?;
    let tv = t.values_at(q)?;
    let mut acc = 0.0;
    for k in 0..m {
        let rk = term1[k] - term2[k] - term3[k];
        for l in 0..m {
            acc += gv[k][l] * rk * tv[l];
        }
    }
    Ok(acc)
}

/// Metric defect `X<Y,Z> - <D_X Y, Z> - <Y, D_X Z>` at `p`.
pub fn metric_defect(
    metric: &AdaptedMetric,
    kind: &ConnectionKind,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
    z: &VectorFieldSpec,
) -> Result<f64> {
    let m = metric.dim();
    let q = p.coords();
    let g = metric.metric_at(q)?;
    let yj = y.jets_at(q)?;
    let zj = z.jets_at(q)?;
    let mut inner = Jet3::constant(m, 0.0);
    for i in 0..m {
        for j in 0..m {
            inner = &inner + &(&(&g[i][j] * &yj[i]) * &zj[j]);
        }
    }
    let xv = x.values_at(q)?;
    let x_of_inner: f64 = (0..m).map(|i| xv[i] * inner.d1(i)).sum();
    let dxy = connection_at(metric, kind, p, x, y)?;
    let dxz = connection_at(metric, kind, p, x, z)?;
    let gv = metric.metric_values_at(q)?;
    let yv = y.values_at(q)?;
    let zv = z.values_at(q)?;
    let mut dot1 = 0.0;
    let mut dot2 = 0.0;
    for i in 0..m {
        for j in 0..m {
            dot1 += gv[i][j] * dxy[i] * zv[j];
            dot2 += gv[i][j] * yv[i] * dxz[j];
        }
    }
    Ok(x_of_inner - dot1 - dot2)
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
    fn screen_connection_examples() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.1, 0.4]);
        // D^S_{d2} R = 0 (II^S = 0 on the flat model)
        let v = screen_connection(&flat, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-14));
        // D^S_{d2} d2 = 0
        let v = screen_connection(&flat, &p, &coord(3, 2), &coord(3, 2)).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-14));
        // D^S_V N = -H^S(V) = 0.4 V on hcurved at x2 = 0.8
        let hc = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.8, 0.0]);
        let v = screen_connection(&hc, &p, &coord(3, 2), &coord(3, 1)).unwrap();
        assert!((v[1] - 0.4).abs() < 1e-13);
        assert!(v[0].abs() < 1e-14 && v[2].abs() < 1e-14);
    }

    #[test]
    fn main_connection_examples() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.3, -0.2]);
        let v = main_connection(&flat, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-14));
        // twisted: rho(d2) = x3/2, so D~_{d3} d2 = (1/2) R
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let p = sp(&[0.1, 0.7]);
        let v = main_connection(&tw, &p, &coord(3, 3), &coord(3, 2)).unwrap();
        assert!(v[0].abs() < 1e-13 && v[1].abs() < 1e-13);
        assert!((v[2] - 0.5).abs() < 1e-13);
        // rho(R) = 1 is constant, so the radical term vanishes for Y = R
        let v = main_connection(&tw, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        let w = screen_connection(&tw, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        for k in 0..3 {
            assert!((v[k] - w[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn torsion_identities() {
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let p = sp(&[0.3, 0.7]);
        let tor = torsion(&tw, &ConnectionKind::Main, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        assert!(tor[0].abs() < 1e-13 && tor[1].abs() < 1e-13);
        assert!((tor[2] + 0.5).abs() < 1e-13, "Tor = d rho(X,Y) R = -1/2 R");
        let tor = torsion(
            &tw,
            &ConnectionKind::MainAdmissible,
            &p,
            &coord(3, 2),
            &coord(3, 3),
        )
        .unwrap();
        assert!(tor.iter().all(|x| x.abs() < 1e-13));
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.2, 0.2]);
        let tor = torsion(&flat, &ConnectionKind::Main, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        assert!(tor.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn admissible_offsets() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let spec = AdmissibleSpec::parse(
            &flat,
            &[vec!["x2".into(), "0".into()], vec!["0".into(), "0".into()]],
        )
        .unwrap();
        let p = sp(&[0.6, 0.1]);
        let v = admissible_connection(&flat, &spec, &p, &coord(3, 2), &coord(3, 2)).unwrap();
        assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        assert!((v[2] - 0.6).abs() < 1e-14, "sigma(d2,d2) R = x2 R");
        // zero offset coincides with the main admissible connection
        let zero = AdmissibleSpec::parse(
            &flat,
            &[vec!["0".into(), "0".into()], vec!["0".into(), "0".into()]],
        )
        .unwrap();
        let a = admissible_connection(&flat, &zero, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        let b = main_admissible_connection(&flat, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn asymmetric_sigma_rejected() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let err = AdmissibleSpec::parse(
            &flat,
            &[vec!["0".into(), "x2".into()], vec!["x3".into(), "0".into()]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn screen_part_of_admissible_is_screen_operator() {
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let spec = AdmissibleSpec::parse(
            &tw,
            &[vec!["x2".into(), "1".into()], vec!["1".into(), "x3".into()]],
        )
        .unwrap();
        let p = sp(&[0.4, 0.2]);
        let x = VectorFieldSpec::parse(&["0", "1", "x2"], 3, true).unwrap();
        let y = VectorFieldSpec::parse(&["0", "x3", "1"], 3, true).unwrap();
        let d = admissible_connection(&tw, &spec, &p, &x, &y).unwrap();
        let ds = screen_connection(&tw, &p, &x, &y).unwrap();
        // screen components agree (radical direction may differ)
        let frame = sigma::screen_frame(&tw, &p).unwrap();
        let gv = tw.metric_values_at(p.coords()).unwrap();
        for v in &frame.screen {
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    a += gv[i][j] * d[i] * v[j];
                    b += gv[i][j] * ds[i] * v[j];
                }
            }
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tangential_connection_examples() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.2, -0.3]);
        // R is tangentially geodesic
        let v = tangential_connection(&flat, &p, &coord(3, 3), &coord(3, 3)).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-13));
        let v = tangential_connection(&flat, &p, &coord(3, 2), &coord(3, 3)).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-13));
        // matches the tangent part of the Levi-Civita limit on hcurved
        let hc = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.8, 0.0]);
        let v = tangential_connection(&hc, &p, &coord(3, 2), &coord(3, 2)).unwrap();
        let lim = dual::nabla_limit(&hc, &p, &coord(3, 2), &coord(3, 2)).unwrap();
        let full = lim.finite().unwrap();
        // nu-component (H(d2,d2) = -0.4) removed, rest equal
        assert!((full[0] + 0.4).abs() < 1e-12);
        assert!(v[0].abs() < 1e-13);
        for k in 1..3 {
            assert!((v[k] - full[k]).abs() < 1e-12);
        }
        // refuses models that are not II-flat
        let ic = AdaptedMetric::builtin("iicurved").unwrap();
        assert!(tangential_connection(&ic, &sp(&[0.0, 0.0]), &coord(3, 2), &coord(3, 2)).is_err());
    }

    #[test]
    fn tangential_two_routes_agree() {
        // Eq route: screen sum plus the L'Hopital radical part. Second route:
        // the main admissible connection minus the symmetric part of
        // tau^{-1} square_X R (Y) in the radical direction.
        for name in ["flat", "hcurved", "twisted", "dim4"] {
            let metric = AdaptedMetric::builtin(name).unwrap();
            let m = metric.dim();
            let p = sp(&vec![0.21; m - 1]);
            let fields: Vec<VectorFieldSpec> = (2..=m)
                .map(|k| coord(m, k))
                .chain([VectorFieldSpec::parse(
                    &vec!["0"; 1]
                        .into_iter()
                        .chain(vec!["x2"; m - 1])
                        .collect::<Vec<_>>(),
                    m,
                    true,
                )
                .unwrap()])
                .collect();
            let r_field = coord(m, m);
            for x in &fields {
                for y in &fields {
                    let route1 = tangential_connection(&metric, &p, x, y).unwrap();
                    let mut route2 = main_admissible_connection(&metric, &p, x, y).unwrap();
                    let g = metric.metric_at(p.coords()).unwrap();
                    let sim = |a: &VectorFieldSpec, b: &VectorFieldSpec| {
                        let aj = a.jets_at(p.coords()).unwrap();
                        let rj = r_field.jets_at(p.coords()).unwrap();
                        let bj = b.jets_at(p.coords()).unwrap();
                        let k = dual::koszul_from_jets(&g, &aj, &rj, &bj);
                        dual::lhopital_limit(&metric, &p, &k).unwrap()
                    };
                    route2[m - 1] -= 0.5 * (sim(x, y) + sim(y, x));
                    for k in 0..m {
                        assert!(
                            (route1[k] - route2[k]).abs() < 1e-10,
                            "{name}: component {k}: {} vs {}",
                            route1[k],
                            route2[k]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_vanishes_on_flat_model() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.1, 0.2]);
        for kind in [ConnectionKind::MainAdmissible, ConnectionKind::Tangential] {
            let k = connection_curvature(
                &flat,
                &kind,
                &p,
                &coord(3, 2),
                &coord(3, 3),
                &coord(3, 2),
                &coord(3, 2),
            )
            .unwrap();
            assert!(k.abs() < 1e-10, "{kind:?}: {k}");
        }
    }

    #[test]
    fn curvature_antisymmetric_in_xy() {
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let p = sp(&[0.3, 0.4]);
        let x = VectorFieldSpec::parse(&["0", "1", "x2"], 3, true).unwrap();
        let y = VectorFieldSpec::parse(&["0", "x3", "1"], 3, true).unwrap();
        let z = coord(3, 2);
        let t = coord(3, 2);
        let a =
            connection_curvature(&tw, &ConnectionKind::MainAdmissible, &p, &x, &y, &z, &t).unwrap();
        let b =
            connection_curvature(&tw, &ConnectionKind::MainAdmissible, &p, &y, &x, &z, &t).unwrap();
        assert!((a + b).abs() < 1e-6, "{a} vs {b}");
    }
}
