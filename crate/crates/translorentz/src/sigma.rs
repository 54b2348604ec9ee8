//! Canonical structures on the degenerate hypersurface.
//!
//! In adapted coordinates the main normal is `N = d_1` and the main radical
//! field is `R = d_m`. The two fundamental forms come out of the dual
//! connection as first-class Christoffel values,
//!
//! ```text
//! H_ij  = Gamma_{1,ij}|_{x1=0} = -1/2 d_1 g_ij,    i,j >= 2
//! II_ab = Gamma_{m,ab}|_{x1=0},
//! ```
//!
//! and the canonical screen distribution is the H-orthogonal complement of
//! `R` inside the tangent space of the hypersurface. The screen carries a
//! positive definite metric, so a Gram-Schmidt pass in fixed order gives a
//! deterministic orthonormal screen basis.

use crate::dual;
use crate::error::{Error, Result};
use crate::jet::Jet3;
use crate::linalg;
use crate::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};

pub const FLATNESS_TOL: f64 = 1e-9;
const TANGENT_TOL: f64 = 1e-12;

/// Frame and forms at a point of the hypersurface.
///
/// `h` lives on the tangent basis `[V_2, .., V_{m-1}, R]` and `ii` on the
/// full frame `[N, V_2, .., V_{m-1}, R]`.
#[derive(Debug, Clone)]
pub struct SigmaFrame {
    pub point: Vec<f64>,
    pub n: Vec<f64>,
    pub r: Vec<f64>,
    /// Pre-orthonormalization screen vectors `W_l = d_l - (g_l/2) d_m`.
    pub screen_raw: Vec<Vec<f64>>,
    /// g-orthonormal screen basis, Gram-Schmidt in index order.
    pub screen: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub ii: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub nu: f64,
    pub screen: Vec<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct Weingarten {
    pub h_screen: Vec<Vec<f64>>,
    pub ii_screen: Vec<Vec<f64>>,
    /// Eigenvalues sorted ascending.
    pub h_curvatures: Vec<f64>,
    pub ii_curvatures: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Flatness {
    pub ii_flat: bool,
    pub max_ii: f64,
    pub h_flat: bool,
    pub max_h: f64,
    pub iii_flat: bool,
}

/// `H(d_i, d_j)` for 1-based tangent indices `i, j in 2..=m`.
pub fn fundamental_h(metric: &AdaptedMetric, p: &SigmaPoint, i: usize, j: usize) -> Result<f64> {
    let m = metric.dim();
    if !(2..=m).contains(&i) || !(2..=m).contains(&j) {
        return Err(Error::InvalidInput(format!(
            "H indices must lie in 2..={m}, got ({i}, {j})"
        )));
    }
    let g = metric.metric_at(p.coords())?;
    Ok(gamma_from_jets(&g, 0, i - 1, j - 1))
}

/// `II(d_a, d_b)` for 1-based indices `a, b in 1..=m`.
pub fn fundamental_ii(metric: &AdaptedMetric, p: &SigmaPoint, a: usize, b: usize) -> Result<f64> {
    let m = metric.dim();
    if !(1..=m).contains(&a) || !(1..=m).contains(&b) {
        return Err(Error::InvalidInput(format!(
            "II indices must lie in 1..={m}, got ({a}, {b})"
        )));
    }
    let g = metric.metric_at(p.coords())?;
    Ok(gamma_from_jets(&g, m - 1, a - 1, b - 1))
}

/// `Gamma_{c,ab}` value from metric jets (0-based indices).
fn gamma_from_jets(g: &[Vec<Jet3>], c: usize, a: usize, b: usize) -> f64 {
    0.5 * (g[b][c].d1(a) + g[a][c].d1(b) - g[a][b].d1(c))
}

/// `H` on the coordinate tangent basis: entry `[i][j]` is `H(d_{i+2}, d_{j+2})`
/// (so the last row/column is the radical direction).
pub fn h_tangent_matrix(metric: &AdaptedMetric, p: &SigmaPoint) -> Result<Vec<Vec<f64>>> {
    let m = metric.dim();
    let g = metric.metric_at(p.coords())?;
    Ok((1..m)
        .map(|i| (1..m).map(|j| gamma_from_jets(&g, 0, i, j)).collect())
        .collect())
}

/// `II` on the full coordinate basis (m x m, 0-based).
pub fn ii_coordinate_matrix(metric: &AdaptedMetric, p: &SigmaPoint) -> Result<Vec<Vec<f64>>> {
    let m = metric.dim();
    let g = metric.metric_at(p.coords())?;
    Ok((0..m)
        .map(|a| (0..m).map(|b| gamma_from_jets(&g, m - 1, a, b)).collect())
        .collect())
}

fn inner_values(g: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    let m = g.len();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += g[i][j] * u[i] * v[j];
        }
    }
    acc
}

/// Canonical screen frame plus the two fundamental forms at `p`.
pub fn screen_frame(metric: &AdaptedMetric, p: &SigmaPoint) -> Result<SigmaFrame> {
    let m = metric.dim();
    let q = p.coords();
    let gv = metric.metric_values_at(q)?;
    let h_tan = h_tangent_matrix(metric, p)?;
    let ii_coord = ii_coordinate_matrix(metric, p)?;

    let mut n = vec![0.0; m];
    n[0] = 1.0;
    let mut r = vec![0.0; m];
    r[m - 1] = 1.0;

    // W_l = d_l + c_l d_m solves H(W_l, R) = 0, so c_l = H(d_l, R) since
    // H(R, R) = -1.
    let mut screen_raw = Vec::with_capacity(m - 2);
    for l in 1..m - 1 {
        let mut w = vec![0.0; m];
        w[l] = 1.0;
        w[m - 1] = h_tan[l - 1][m - 2] / (-h_tan[m - 2][m - 2]);
        screen_raw.push(w);
    }

    // Gram-Schmidt in index order against g restricted to the hypersurface.
    let mut screen: Vec<Vec<f64>> = Vec::with_capacity(m - 2);
    for w in &screen_raw {
        let mut u = w.clone();
        for v in &screen {
            let c = inner_values(&gv, &u, v);
            for k in 0..m {
                u[k] -= c * v[k];
            }
        }
        let norm2 = inner_values(&gv, &u, &u);
        if norm2 <= 0.0 {
            return Err(Error::NormalForm {
                message: "screen block not positive definite".into(),
                point: q.to_vec(),
            });
        }
        let inv = 1.0 / norm2.sqrt();
        for x in &mut u {
            *x *= inv;
        }
        screen.push(u);
    }

    // H on [V.., R], II on [N, V.., R]
    let tangent_basis: Vec<&Vec<f64>> = screen.iter().chain(std::iter::once(&r)).collect();
    let h = tangent_basis
        .iter()
        .map(|u| {
            tangent_basis
                .iter()
                .map(|v| contract_tangent(&h_tan, u, v))
                .collect()
        })
        .collect();
    let full_basis: Vec<&Vec<f64>> = std::iter::once(&n)
        .chain(screen.iter())
        .chain(std::iter::once(&r))
        .collect();
    let ii = full_basis
        .iter()
        .map(|u| {
            full_basis
                .iter()
                .map(|v| {
                    let mut acc = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            acc += ii_coord[a][b] * u[a] * v[b];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();

    Ok(SigmaFrame {
        point: q.to_vec(),
        n,
        r,
        screen_raw,
        screen,
        h,
        ii,
    })
}

fn contract_tangent(h_tan: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    let s = h_tan.len();
    let mut acc = 0.0;
    for i in 0..s {
        for j in 0..s {
            acc += h_tan[i][j] * u[i + 1] * v[j + 1];
        }
    }
    acc
}

/// Screen frame with coefficients carried as jets, for derivatives of
/// frame fields along the hypersurface. Only tangential partials of the
/// result are meaningful.
pub(crate) fn screen_frame_jets(metric: &AdaptedMetric, p: &SigmaPoint) -> Result<Vec<Vec<Jet3>>> {
    let m = metric.dim();
    let q = p.coords();
    let g = metric.metric_at(q)?;
    // H(d_i, R) as jets: -1/2 d_1 g_{i,m}
    let h_im: Vec<Jet3> = (1..m).map(|i| g[i][m - 1].derive(0).scale(-0.5)).collect();
    let h_mm = &h_im[m - 2];
    let mut raw: Vec<Vec<Jet3>> = Vec::with_capacity(m - 2);
    for l in 1..m - 1 {
        let mut w: Vec<Jet3> = (0..m).map(|_| Jet3::constant(m, 0.0)).collect();
        w[l] = Jet3::constant(m, 1.0);
        w[m - 1] = h_im[l - 1].div(&-h_mm).map_err(|_| Error::NormalForm {
            message: "H(R,R) vanishes".into(),
            point: q.to_vec(),
        })?;
        raw.push(w);
    }
    let inner = |u: &[Jet3], v: &[Jet3]| -> Jet3 {
        let mut acc = Jet3::constant(m, 0.0);
        for i in 0..m {
            for j in 0..m {
                acc = &acc + &(&(&g[i][j] * &u[i]) * &v[j]);
            }
        }
        acc
    };
    let mut frame: Vec<Vec<Jet3>> = Vec::with_capacity(m - 2);
    for w in &raw {
        let mut u = w.clone();
        for v in &frame {
            let c = inner(&u, v);
            for k in 0..m {
                u[k] = &u[k] - &(&c * &v[k]);
            }
        }
        let norm = inner(&u, &u).sqrt().map_err(|_| Error::NormalForm {
            message: "screen block not positive definite".into(),
            point: q.to_vec(),
        })?;
        for k in 0..m {
            u[k] = u[k].div(&norm).expect("norm is positive");
        }
        frame.push(u);
    }
    Ok(frame)
}

/// The raw screen generator `W_l = d_{l+2} - (g_{l+2}/2) d_m` as a vector
/// field spec (0-based screen index `l`).
pub fn screen_generator_field(metric: &AdaptedMetric, l: usize) -> Result<VectorFieldSpec> {
    use crate::expr::Expr;
    let m = metric.dim();
    if l >= m - 2 {
        return Err(Error::InvalidInput(format!(
            "screen index {l} out of range (0..{})",
            m - 2
        )));
    }
    let mut comps = vec![Expr::Num(0.0); m];
    comps[l + 1] = Expr::Num(1.0);
    comps[m - 1] = Expr::Div(
        Box::new(Expr::Neg(Box::new(metric.g_mix_exprs()[l].clone()))),
        Box::new(Expr::Num(2.0)),
    );
    let canonical = !comps.iter().any(|c| c.depends_on(0));
    VectorFieldSpec::new(comps, canonical)
}

/// Split a vector at `p` into normal, screen and radical parts.
pub fn decompose(metric: &AdaptedMetric, p: &SigmaPoint, a: &[f64]) -> Result<Decomposition> {
    let m = metric.dim();
    let frame = screen_frame(metric, p)?;
    let gv = metric.metric_values_at(p.coords())?;
    let nu = inner_values(&gv, a, &frame.n);
    let tangent: Vec<f64> = (0..m).map(|k| a[k] - nu * frame.n[k]).collect();
    let h_tan = h_tangent_matrix(metric, p)?;
    let rho = -contract_tangent(&h_tan, &tangent, &frame.r);
    let screen = frame
        .screen
        .iter()
        .map(|v| inner_values(&gv, a, v))
        .collect();
    Ok(Decomposition { nu, screen, rho })
}

impl Decomposition {
    /// Rebuild the coordinate vector from the parts in the given frame.
    pub fn reassemble(&self, frame: &SigmaFrame) -> Vec<f64> {
        let m = frame.n.len();
        let mut out = vec![0.0; m];
        for k in 0..m {
            out[k] += self.nu * frame.n[k] + self.rho * frame.r[k];
        }
        for (c, v) in self.screen.iter().zip(&frame.screen) {
            for k in 0..m {
                out[k] += c * v[k];
            }
        }
        out
    }
}

/// Weingarten screen maps and their principal curvatures.
pub fn weingarten(metric: &AdaptedMetric, p: &SigmaPoint) -> Result<Weingarten> {
    let frame = screen_frame(metric, p)?;
    let s = frame.screen.len();
    let h_screen: Vec<Vec<f64>> = (0..s)
        .map(|i| (0..s).map(|j| frame.h[i][j]).collect())
        .collect();
    let ii_screen: Vec<Vec<f64>> = (0..s)
        .map(|i| (0..s).map(|j| frame.ii[i + 1][j + 1]).collect())
        .collect();
    let h_curvatures = linalg::sym_eigenvalues(&h_screen);
    let ii_curvatures = linalg::sym_eigenvalues(&ii_screen);
    Ok(Weingarten {
        h_screen,
        ii_screen,
        h_curvatures,
        ii_curvatures,
    })
}

/// The 1-form `rho = -H(., R)` on a tangent vector at `p`.
pub fn rho_form(metric: &AdaptedMetric, p: &SigmaPoint, x: &[f64]) -> Result<f64> {
    if x[0].abs() > TANGENT_TOL {
        return Err(Error::Precondition(format!(
            "rho expects a tangent vector; normal component {}",
            x[0]
        )));
    }
    let h_tan = h_tangent_matrix(metric, p)?;
    let m = metric.dim();
    let mut r = vec![0.0; m];
    r[m - 1] = 1.0;
    Ok(-contract_tangent(&h_tan, x, &r))
}

/// `rho(Y)` as a jet along the hypersurface; tangential partials are the
/// derivatives of the restricted function.
pub(crate) fn rho_field_jet(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    y: &VectorFieldSpec,
) -> Result<Jet3> {
    let m = metric.dim();
    let q = p.coords();
    let g = metric.metric_at(q)?;
    let yj = y.jets_at(q)?;
    let mut acc = Jet3::constant(m, 0.0);
    for i in 1..m {
        let h_im = g[i][m - 1].derive(0).scale(-0.5);
        acc = &acc - &(&h_im * &yj[i]);
    }
    Ok(acc)
}

/// `d rho (X, Y) = X(rho(Y)) - Y(rho(X)) - rho([X, Y])` for tangent fields.
pub fn d_rho(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
) -> Result<f64> {
    let q = p.coords();
    let xv = x.values_at(q)?;
    let yv = y.values_at(q)?;
    if xv[0].abs() > TANGENT_TOL || yv[0].abs() > TANGENT_TOL {
        return Err(Error::Precondition(
            "d_rho expects tangent fields (zero first component)".into(),
        ));
    }
    let rho_y = rho_field_jet(metric, p, y)?;
    let rho_x = rho_field_jet(metric, p, x)?;
    let m = metric.dim();
    let mut acc = 0.0;
    for i in 1..m {
        acc += xv[i] * rho_y.d1(i) - yv[i] * rho_x.d1(i);
    }
    let br = x.bracket_jets(y, q)?;
    let br_values: Vec<f64> = br.iter().map(|j| j.value()).collect();
    acc -= rho_form(metric, p, &br_values)?;
    Ok(acc)
}

/// Flatness flags over a grid of hypersurface points.
pub fn flatness(metric: &AdaptedMetric, points: &[SigmaPoint]) -> Result<Flatness> {
    let mut max_ii: f64 = 0.0;
    let mut max_h: f64 = 0.0;
    for p in points {
        let frame = screen_frame(metric, p)?;
        let s = frame.screen.len();
        for i in 0..s {
            for j in 0..s {
                max_h = max_h.max(frame.h[i][j].abs());
                max_ii = max_ii.max(frame.ii[i + 1][j + 1].abs());
            }
        }
    }
    let ii_flat = max_ii < FLATNESS_TOL;
    let h_flat = max_h < FLATNESS_TOL;
    Ok(Flatness {
        ii_flat,
        max_ii,
        h_flat,
        max_h,
        iii_flat: ii_flat && h_flat,
    })
}

/// `III(X, Y, Z) = II(nabla_X Y |_Sigma, Z)`, defined when II vanishes on
/// tangent pairs.
pub fn third_form(
    metric: &AdaptedMetric,
    p: &SigmaPoint,
    x: &VectorFieldSpec,
    y: &VectorFieldSpec,
    z: &VectorFieldSpec,
) -> Result<f64> {
    let grid = metric.sigma_grid(crate::metric::GRID_POINTS_PER_AXIS);
    let flat = flatness(metric, &grid)?;
    if !flat.ii_flat {
        return Err(Error::Precondition(format!(
            "III requires an II-flat hypersurface (max |II^S| = {:.3e})",
            flat.max_ii
        )));
    }
    for (f, name) in [(x, "X"), (y, "Y"), (z, "Z")] {
        if !f.canonical() {
            return Err(Error::Precondition(format!("{name} must be canonical")));
        }
        if f.values_at(p.coords())?[0].abs() > TANGENT_TOL {
            return Err(Error::Precondition(format!("{name} must be tangent")));
        }
    }
    let lim = dual::nabla_limit(metric, p, x, y)?;
    let v = match lim {
        dual::NablaLimit::Finite(v) => v,
        dual::NablaLimit::Divergent { obstruction } => {
            return Err(Error::Precondition(format!(
                "nabla_X Y has no limit: II(X,Y) = {obstruction:.3e}"
            )))
        }
    };
    let ii_coord = ii_coordinate_matrix(metric, p)?;
    let zv = z.values_at(p.coords())?;
    let m = metric.dim();
    let mut acc = 0.0;
    for a in 0..m {
        for b in 0..m {
            acc += ii_coord[a][b] * v[a] * zv[b];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(coords: &[f64]) -> SigmaPoint {
        SigmaPoint::new(coords)
    }

    #[test]
    fn fundamental_h_values() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.2, 0.5]);
        assert!((fundamental_h(&flat, &p, 3, 3).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(fundamental_h(&flat, &p, 2, 3).unwrap(), 0.0);
        let hc = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.8, 0.0]);
        assert!((fundamental_h(&hc, &p, 2, 2).unwrap() + 0.4).abs() < 1e-14);
    }

    #[test]
    fn fundamental_ii_values() {
        let ic = AdaptedMetric::builtin("iicurved").unwrap();
        let p = sp(&[0.0, 0.0]);
        assert!((fundamental_ii(&ic, &p, 2, 2).unwrap() + 0.5).abs() < 1e-14);
        for name in crate::metric::BUILTIN_NAMES {
            let m = AdaptedMetric::builtin(name).unwrap();
            let p = sp(&vec![0.1; m.dim() - 1]);
            assert!(
                fundamental_ii(&m, &p, 1, 1).unwrap().abs() < 1e-14,
                "{name}"
            );
            assert!(
                (fundamental_ii(&m, &p, 1, m.dim()).unwrap() - 1.0).abs() < 1e-14,
                "{name}"
            );
        }
    }

    #[test]
    fn screen_frame_flat_and_twisted() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let f = screen_frame(&flat, &sp(&[0.1, 0.2])).unwrap();
        assert_eq!(f.screen, vec![vec![0.0, 1.0, 0.0]]);
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let f = screen_frame(&tw, &sp(&[0.2, 0.6])).unwrap();
        assert!((f.screen_raw[0][1] - 1.0).abs() < 1e-14);
        assert!((f.screen_raw[0][2] + 0.3).abs() < 1e-14);
    }

    #[test]
    fn screen_frame_dim4_diagonal() {
        let m = AdaptedMetric::builtin("dim4").unwrap();
        let f = screen_frame(&m, &sp(&[0.1, 0.2, 0.3])).unwrap();
        assert_eq!(f.screen.len(), 2);
        assert_eq!(f.screen[0], vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(f.screen[1], vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn frame_invariants_on_all_builtins() {
        for name in crate::metric::BUILTIN_NAMES {
            let metric = AdaptedMetric::builtin(name).unwrap();
            let p = sp(&vec![0.15; metric.dim() - 1]);
            let f = screen_frame(&metric, &p).unwrap();
            let s = f.screen.len();
            // H(R,R) = -1, II(N,N) = 0, II(N,R) = 1, II(X,R) = 0
            assert!((f.h[s][s] + 1.0).abs() < 1e-12, "{name}");
            assert!(f.ii[0][0].abs() < 1e-12, "{name}");
            assert!((f.ii[0][s + 1] - 1.0).abs() < 1e-12, "{name}");
            for i in 1..=s + 1 {
                assert!(f.ii[i][s + 1].abs() < 1e-12, "{name} index {i}");
            }
            // screen orthonormality and H(V, R) = 0
            let gv = metric.metric_values_at(p.coords()).unwrap();
            for i in 0..s {
                for j in 0..s {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((inner_values(&gv, &f.screen[i], &f.screen[j]) - want).abs() < 1e-12);
                }
                assert!(f.h[i][s].abs() < 1e-12, "{name}: H(V,R) != 0");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.0, 0.0]);
        let d = decompose(&flat, &p, &[1.0, 2.0, 3.0]).unwrap();
        assert!((d.nu - 1.0).abs() < 1e-14);
        assert!((d.screen[0] - 2.0).abs() < 1e-14);
        assert!((d.rho - 3.0).abs() < 1e-14);
        let d = decompose(&flat, &p, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((d.nu, d.screen[0], d.rho), (1.0, 0.0, 0.0));
        let d = decompose(&flat, &p, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!((d.nu, d.screen[0], d.rho), (0.0, 0.0, 1.0));
    }

    #[test]
    fn weingarten_values() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let w = weingarten(&flat, &sp(&[0.3, 0.3])).unwrap();
        assert_eq!(w.h_screen[0][0], 0.0);
        assert_eq!(w.ii_screen[0][0], 0.0);
        let hc = AdaptedMetric::builtin("hcurved").unwrap();
        let w = weingarten(&hc, &sp(&[0.8, 0.0])).unwrap();
        assert!((w.h_screen[0][0] + 0.4).abs() < 1e-14);
        assert!(w.ii_screen[0][0].abs() < 1e-14);
        let ic = AdaptedMetric::builtin("iicurved").unwrap();
        let w = weingarten(&ic, &sp(&[0.0, 0.0])).unwrap();
        assert!((w.ii_screen[0][0] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn rho_values() {
        let flat = AdaptedMetric::builtin("flat").unwrap();
        let p = sp(&[0.1, 0.5]);
        assert!((rho_form(&flat, &p, &[0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-14);
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let p = sp(&[0.2, 0.6]);
        assert!((rho_form(&tw, &p, &[0.0, 1.0, 0.0]).unwrap() - 0.3).abs() < 1e-14);
        assert!(rho_form(&tw, &p, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn drho_twisted() {
        let tw = AdaptedMetric::builtin("twisted").unwrap();
        let p = sp(&[0.2, 0.6]);
        let d2 = VectorFieldSpec::coordinate(3, 2);
        let d3 = VectorFieldSpec::coordinate(3, 3);
        let v = d_rho(&tw, &p, &d2, &d3).unwrap();
        assert!((v + 0.5).abs() < 1e-13);
        // antisymmetry
        let w = d_rho(&tw, &p, &d3, &d2).unwrap();
        assert!((v + w).abs() < 1e-13);
    }

    #[test]
    fn flatness_flags_per_model() {
        let cases = [
            ("flat", true, true, true),
            ("hcurved", true, false, false),
            ("iicurved", false, true, false),
            ("twisted", true, false, false),
            ("dim4", true, false, false),
        ];
        for (name, ii, h, iii) in cases {
            let m = AdaptedMetric::builtin(name).unwrap();
            let f = flatness(&m, &m.sigma_grid(5)).unwrap();
            assert_eq!((f.ii_flat, f.h_flat, f.iii_flat), (ii, h, iii), "{name}");
        }
    }

    #[test]
    fn third_form_values() {
        let hc = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.8, 0.0]);
        let d2 = VectorFieldSpec::coordinate(3, 2);
        let r = VectorFieldSpec::coordinate(3, 3);
        // III(.,.,R) = H
        let v = third_form(&hc, &p, &d2, &d2, &r).unwrap();
        assert!((v + 0.4).abs() < 1e-13);
        // III(V,R,R) = 0 and III(R,R,R) = -1
        let v = third_form(&hc, &p, &d2, &r, &r).unwrap();
        assert!(v.abs() < 1e-13);
        let v = third_form(&hc, &p, &r, &r, &r).unwrap();
        assert!((v + 1.0).abs() < 1e-13);
        // not defined on models that are not II-flat
        let ic = AdaptedMetric::builtin("iicurved").unwrap();
        assert!(third_form(&ic, &sp(&[0.0, 0.0]), &d2, &d2, &r).is_err());
    }

    #[test]
    fn third_form_vanishes_on_screen_output_slots() {
        // III(X, Y, V) = 0 for screen V on II-flat models
        let hc = AdaptedMetric::builtin("hcurved").unwrap();
        let p = sp(&[0.4, 0.2]);
        let d2 = VectorFieldSpec::coordinate(3, 2);
        let r = VectorFieldSpec::coordinate(3, 3);
        for x in [&d2, &r] {
            for y in [&d2, &r] {
                let v = third_form(&hc, &p, x, y, &d2).unwrap();
                assert!(v.abs() < 1e-12);
            }
        }
    }
}
