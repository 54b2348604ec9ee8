//! Named verification checks over a loaded metric, grouped into suites.
//!
//! Every check is a numeric statement with an explicit tolerance; the result
//! carries the measured defect so reports stay diffable. Checks that require
//! II-flatness report "not applicable" on models without it instead of
//! failing.

use crate::connections::{self, AdmissibleSpec, ConnectionKind};
use crate::dual;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::limits::{self, Classification, PerturbedExtension, ProbeOptions};
use crate::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};
use crate::probe::{self, ProbeClass};
use crate::sigma;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub defect: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn measured(name: &str, defect: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: defect <= tolerance,
            defect,
            tolerance,
            detail: detail.into(),
        }
    }

    fn not_applicable(name: &str, why: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: true,
            defect: 0.0,
            tolerance: 0.0,
            detail: format!("not applicable: {why}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Frames,
    Connections,
    Curvature,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "frames" => Suite::Frames,
            "connections" => Suite::Connections,
            "curvature" => Suite::Curvature,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

/// Worker count for the exhaustive frame-quadruple scan, from the
/// `TRANSLORENTZ_THREADS` environment variable (default 1).
pub fn thread_count() -> usize {
    std::env::var("TRANSLORENTZ_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|n| n.clamp(1, 64))
        .unwrap_or(1)
}

/// Run a suite with a deterministic seed; one result per named check.
pub fn run_suite(metric: &AdaptedMetric, suite: Suite, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut push = |r: std::result::Result<CheckResult, (String, Error)>| match r {
        Ok(c) => out.push(c),
        Err((name, e)) => out.push(CheckResult {
            name,
            passed: false,
            defect: f64::INFINITY,
            tolerance: 0.0,
            detail: format!("check aborted: {e}"),
        }),
    };
    let wrap =
        |name: &str, f: &dyn Fn() -> Result<CheckResult>| f().map_err(|e| (name.to_string(), e));
    let rng = |salt: u64| ChaCha8Rng::seed_from_u64(seed ^ salt);

    if matches!(suite, Suite::Frames | Suite::All) {
        push(wrap("frame_invariants", &|| {
            frame_invariants(metric, &mut rng(1))
        }));
        push(wrap("form_symmetry", &|| {
            form_symmetry(metric, &mut rng(2))
        }));
        push(wrap("decomposition_reassembly", &|| {
            decomposition_reassembly(metric, &mut rng(3))
        }));
        push(wrap("drho_bracket_identity", &|| {
            drho_bracket_identity(metric, &mut rng(4))
        }));
        push(wrap("tau_tangential_partials", &|| {
            tau_tangential_partials(metric, &mut rng(5))
        }));
        push(wrap("metric_rank", &|| metric_rank(metric, &mut rng(6))));
        push(wrap("xtau_quadratic_bound", &|| {
            xtau_quadratic_bound(metric, &mut rng(7))
        }));
    }
    if matches!(suite, Suite::Connections | Suite::All) {
        push(wrap("dual_metric_property", &|| {
            dual_metric_property(metric, &mut rng(10))
        }));
        push(wrap("dual_torsion_free", &|| {
            dual_torsion_free(metric, &mut rng(11))
        }));
        push(wrap("dual_levi_civita_compat", &|| {
            dual_levi_civita_compat(metric, &mut rng(12))
        }));
        push(wrap("screen_metric_property", &|| {
            screen_metric_property(metric, &mut rng(13))
        }));
        push(wrap("screen_koszul_compat", &|| {
            screen_koszul_compat(metric, &mut rng(14))
        }));
        push(wrap("weingarten_identities", &|| {
            weingarten_identities(metric, &mut rng(15))
        }));
        push(wrap("main_metricity_identity", &|| {
            main_metricity_identity(metric, &mut rng(16))
        }));
        push(wrap("torsion_main_is_drho", &|| {
            torsion_main_is_drho(metric, &mut rng(17))
        }));
        push(wrap("torsion_admissible_zero", &|| {
            torsion_admissible_zero(metric, &mut rng(18))
        }));
        push(wrap("admissible_screen_part", &|| {
            admissible_screen_part(metric, &mut rng(19))
        }));
        push(wrap("admissible_curvature", &|| {
            admissible_curvature(metric, &mut rng(20))
        }));
        push(wrap("tangential_metric_torsion", &|| {
            tangential_metric_torsion(metric, &mut rng(21))
        }));
        push(wrap("radical_geodesic", &|| {
            radical_geodesic(metric, &mut rng(22))
        }));
        push(wrap("nabla_rr_is_minus_n", &|| {
            nabla_rr_is_minus_n(metric, &mut rng(23))
        }));
        push(wrap("curvature_antisymmetry", &|| {
            curvature_antisymmetry(metric, &mut rng(24))
        }));
    }
    if matches!(suite, Suite::Curvature | Suite::All) {
        push(wrap("upsilon_symmetries", &|| {
            upsilon_symmetries(metric, &mut rng(30))
        }));
        push(wrap("route_agreement", &|| {
            route_agreement(metric, &mut rng(31))
        }));
        push(wrap("extends_consistency", &|| {
            extends_consistency(metric, &mut rng(32))
        }));
        push(wrap("remark_coverage", &|| {
            remark_coverage(metric, &mut rng(33))
        }));
        push(wrap("lhopital_extrapolation", &|| {
            lhopital_extrapolation(metric, &mut rng(34))
        }));
        push(wrap("divergence_orders", &|| {
            divergence_orders(metric, &mut rng(35))
        }));
        push(wrap("ricci_prediction_agreement", &|| {
            ricci_prediction_agreement(metric, &mut rng(36))
        }));
        push(wrap("gauss_formula", &|| {
            gauss_formula(metric, &mut rng(37))
        }));
        push(wrap("sectional_rank1", &|| {
            sectional_rank1(metric, &mut rng(38))
        }));
        push(wrap("ricci_not_well_defined", &|| {
            ricci_not_well_defined(metric, &mut rng(39))
        }));
        push(wrap("covariant_perturbation", &|| {
            covariant_perturbation(metric, &mut rng(40))
        }));
        push(wrap("convention", &|| convention(metric)));
        push(wrap("upsilon_anchor", &|| {
            upsilon_anchor(metric, &mut rng(41))
        }));
    }
    out
}

// ---------------------------------------------------------------- sampling

fn random_sigma_point(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> SigmaPoint {
    let coords: Vec<f64> = metric.domain()[1..]
        .iter()
        .map(|[lo, hi]| {
            let margin = 0.05 * (hi - lo);
            rng.gen_range(lo + margin..hi - margin)
        })
        .collect();
    SigmaPoint::new(&coords)
}

fn random_offsigma_point(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let p = random_sigma_point(metric, rng);
    let mut q = p.coords().to_vec();
    let hi = metric.domain()[0][1].min(-metric.domain()[0][0]).min(0.3);
    let mag = rng.gen_range(1e-3..hi);
    q[0] = if rng.gen_bool(0.5) { mag } else { -mag };
    q
}

fn random_poly(rng: &mut ChaCha8Rng, dim: usize, vars: std::ops::Range<usize>) -> Expr {
    let mut e = Expr::num(rng.gen_range(-1.0..1.0));
    for v in vars.clone() {
        if rng.gen_bool(0.6) {
            let c = Expr::num(rng.gen_range(-1.0..1.0));
            e = Expr::Add(
                Box::new(e),
                Box::new(Expr::Mul(Box::new(c), Box::new(Expr::Var(v)))),
            );
        }
    }
    if rng.gen_bool(0.5) {
        let a = rng.gen_range(vars.clone());
        let b = rng.gen_range(vars);
        let c = Expr::num(rng.gen_range(-1.0..1.0));
        let quad = Expr::Mul(
            Box::new(Expr::Mul(Box::new(c), Box::new(Expr::Var(a)))),
            Box::new(Expr::Var(b)),
        );
        e = Expr::Add(Box::new(e), Box::new(quad));
    }
    let _ = dim;
    e
}

/// Random field with all components free (not canonical in general).
fn random_field(rng: &mut ChaCha8Rng, dim: usize) -> VectorFieldSpec {
    let comps = (0..dim).map(|_| random_poly(rng, dim, 0..dim)).collect();
    VectorFieldSpec::new(comps, false).expect("non-canonical field")
}

/// Random canonical tangent field: zero first component, coefficients over
/// the hypersurface coordinates only.
fn random_tangent_field(rng: &mut ChaCha8Rng, dim: usize) -> VectorFieldSpec {
    let mut comps = vec![Expr::Num(0.0)];
    comps.extend((1..dim).map(|_| random_poly(rng, dim, 1..dim)));
    VectorFieldSpec::new(comps, true).expect("x1-free by construction")
}

/// Random screen-valued canonical field: combination of the raw screen
/// generators `W_l = d_l - (g_l/2) d_m` with polynomial coefficients.
fn random_screen_field(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<VectorFieldSpec> {
    let m = metric.dim();
    let mut comps = vec![Expr::Num(0.0); m];
    for l in 0..m - 2 {
        let a = random_poly(rng, m, 1..m);
        comps[l + 1] = Expr::Add(Box::new(comps[l + 1].clone()), Box::new(a.clone()));
        let gl = metric.g_mix_exprs()[l].clone();
        let tail = Expr::Div(
            Box::new(Expr::Neg(Box::new(Expr::Mul(Box::new(a), Box::new(gl))))),
            Box::new(Expr::Num(2.0)),
        );
        comps[m - 1] = Expr::Add(Box::new(comps[m - 1].clone()), Box::new(tail));
    }
    let canonical = !comps.iter().any(|c| c.depends_on(0));
    VectorFieldSpec::new(comps, canonical)
}

fn coord(m: usize, k: usize) -> VectorFieldSpec {
    VectorFieldSpec::coordinate(m, k)
}

fn inner(g: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    let m = g.len();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += g[i][j] * u[i] * v[j];
        }
    }
    acc
}

fn model_flatness(metric: &AdaptedMetric) -> Result<sigma::Flatness> {
    sigma::flatness(
        metric,
        &metric.sigma_grid(crate::metric::GRID_POINTS_PER_AXIS),
    )
}

// ------------------------------------------------------------------ frames

fn frame_invariants(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let p = random_sigma_point(metric, rng);
        let f = sigma::screen_frame(metric, &p)?;
        let gv = metric.metric_values_at(p.coords())?;
        let s = f.screen.len();
        defect = defect
            .max((inner(&gv, &f.n, &f.n) - 1.0).abs())
            .max(f.ii[0][0].abs())
            .max((f.h[s][s] + 1.0).abs())
            .max((f.ii[0][s + 1] - 1.0).abs());
        for i in 1..=s + 1 {
            defect = defect.max(f.ii[i][s + 1].abs());
        }
        for l in 0..s {
            defect = defect.max(f.h[l][s].abs());
            for mu in 0..s {
                let want = if l == mu { 1.0 } else { 0.0 };
                defect = defect.max((inner(&gv, &f.screen[l], &f.screen[mu]) - want).abs());
            }
        }
    }
    Ok(CheckResult::measured(
        "frame_invariants",
        defect,
        1e-10,
        "<N,N>=1, II(N,N)=0, H(R,R)=-1, II(N,R)=1, II(.,R)=0, orthonormal screen",
    ))
}

fn form_symmetry(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let h = sigma::h_tangent_matrix(metric, &p)?;
        let ii = sigma::ii_coordinate_matrix(metric, &p)?;
        for (mat, n) in [(&h, h.len()), (&ii, ii.len())] {
            for i in 0..n {
                for j in 0..n {
                    defect = defect.max((mat[i][j] - mat[j][i]).abs());
                }
            }
        }
    }
    Ok(CheckResult::measured(
        "form_symmetry",
        defect,
        1e-12,
        "H and II symmetric on coordinate bases",
    ))
}

fn decomposition_reassembly(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..5 {
        let p = random_sigma_point(metric, rng);
        let f = sigma::screen_frame(metric, &p)?;
        for _ in 0..10 {
            let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let d = sigma::decompose(metric, &p, &a)?;
            let back = d.reassemble(&f);
            for k in 0..m {
                defect = defect.max((back[k] - a[k]).abs());
            }
        }
    }
    Ok(CheckResult::measured(
        "decomposition_reassembly",
        defect,
        1e-10,
        "nu N + screen + rho R reproduces the input vector",
    ))
}

fn drho_bracket_identity(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut defect: f64 = 0.0;
    for _ in 0..8 {
        let p = random_sigma_point(metric, rng);
        let v = random_screen_field(metric, rng)?;
        let w = random_screen_field(metric, rng)?;
        let d = sigma::d_rho(metric, &p, &v, &w)?;
        let br = v.bracket_jets(&w, p.coords())?;
        let bv: Vec<f64> = br.iter().map(|j| j.value()).collect();
        let rho_br = sigma::rho_form(metric, &p, &bv)?;
        defect = defect.max((d + rho_br).abs());
    }
    Ok(CheckResult::measured(
        "drho_bracket_identity",
        defect,
        1e-8,
        "d rho(V,W) = -rho([V,W]) for screen fields",
    ))
}

fn tau_tangential_partials(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let tau = metric.tau_at(p.coords())?;
        for i in 1..m {
            defect = defect.max(tau.d1(i).abs());
        }
        defect = defect.max(tau.value().abs());
    }
    Ok(CheckResult::measured(
        "tau_tangential_partials",
        defect,
        1e-12,
        "tau and its tangential partials vanish on the hypersurface",
    ))
}

fn metric_rank(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let g = metric.metric_values_at(p.coords())?;
        let r = crate::linalg::sym_rank(&g, 1e-12);
        if r != m - 1 {
            ok = false;
            detail = format!("rank {r} != {} at {:?}", m - 1, p.coords());
            break;
        }
        let q = random_offsigma_point(metric, rng);
        let g = metric.metric_values_at(&q)?;
        let r = crate::linalg::sym_rank(&g, 1e-12);
        if r != m {
            ok = false;
            detail = format!("rank {r} != {m} at {q:?}");
            break;
        }
    }
    Ok(CheckResult {
        name: "metric_rank".into(),
        passed: ok,
        defect: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        detail: if ok {
            "rank m-1 on the hypersurface, m off it".into()
        } else {
            detail
        },
    })
}

fn xtau_quadratic_bound(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut worst_ratio: f64 = 0.0;
    let mut stable = true;
    for _ in 0..5 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, metric.dim());
        let mut ratios = Vec::new();
        for &eps in &probe::default_schedule() {
            let mut q = p.coords().to_vec();
            q[0] = eps;
            let tau = metric.tau_at(&q)?;
            let xv = x.values_at(&q)?;
            let xtau: f64 = (0..metric.dim()).map(|i| xv[i] * tau.d1(i)).sum();
            ratios.push(xtau.abs() / (eps * eps));
        }
        let max_r = ratios.iter().cloned().fold(0.0, f64::max);
        let min_r = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        worst_ratio = worst_ratio.max(max_r);
        if max_r > 1e-9 && max_r / min_r.max(1e-300) > 3.0 {
            stable = false;
        }
    }
    Ok(CheckResult {
        name: "xtau_quadratic_bound".into(),
        passed: stable && worst_ratio < 1e3,
        defect: worst_ratio,
        tolerance: 1e3,
        detail: format!("|X(tau)| <= C eps^2 with stable C (largest fitted C = {worst_ratio:.3e})"),
    })
}

// ------------------------------------------------------------- connections

fn dual_metric_property(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for k in 0..20 {
        let q = if k % 2 == 0 {
            random_sigma_point(metric, rng).coords().to_vec()
        } else {
            random_offsigma_point(metric, rng)
        };
        let a = random_field(rng, m);
        let b = random_field(rng, m);
        let c = random_field(rng, m);
        let g = metric.metric_at(&q)?;
        let aj = a.jets_at(&q)?;
        let bj = b.jets_at(&q)?;
        let cj = c.jets_at(&q)?;
        let k1 = dual::koszul_from_jets(&g, &aj, &bj, &cj).value();
        let k2 = dual::koszul_from_jets(&g, &aj, &cj, &bj).value();
        // A<B,C> from jets
        let mut gbc = crate::jet::Jet3::constant(m, 0.0);
        for i in 0..m {
            for j in 0..m {
                gbc = &gbc + &(&(&g[i][j] * &bj[i]) * &cj[j]);
            }
        }
        let a_of: f64 = (0..m).map(|i| aj[i].value() * gbc.d1(i)).sum();
        defect = defect.max((k1 + k2 - a_of).abs());
    }
    Ok(CheckResult::measured(
        "dual_metric_property",
        defect,
        1e-9,
        "square_A B(C) + square_A C(B) = A<B,C>",
    ))
}

fn dual_torsion_free(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for k in 0..20 {
        let q = if k % 2 == 0 {
            random_sigma_point(metric, rng).coords().to_vec()
        } else {
            random_offsigma_point(metric, rng)
        };
        let a = random_field(rng, m);
        let b = random_field(rng, m);
        let c = random_field(rng, m);
        let g = metric.metric_at(&q)?;
        let aj = a.jets_at(&q)?;
        let bj = b.jets_at(&q)?;
        let cj = c.jets_at(&q)?;
        let k1 = dual::koszul_from_jets(&g, &aj, &bj, &cj).value();
        let k2 = dual::koszul_from_jets(&g, &bj, &aj, &cj).value();
        let br = a.bracket_jets(&b, &q)?;
        let mut gbrc = 0.0;
        for i in 0..m {
            for j in 0..m {
                gbrc += g[i][j].value() * br[i].value() * cj[j].value();
            }
        }
        defect = defect.max((k1 - k2 - gbrc).abs());
    }
    Ok(CheckResult::measured(
        "dual_torsion_free",
        defect,
        1e-9,
        "square_A B(C) - square_B A(C) = <[A,B],C>",
    ))
}

fn dual_levi_civita_compat(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let q = random_offsigma_point(metric, rng);
        let a = random_field(rng, m);
        let b = random_field(rng, m);
        let c = random_field(rng, m);
        let nab = dual::nabla_offsigma(metric, &q, &a, &b)?;
        let gv = metric.metric_values_at(&q)?;
        let cv = c.values_at(&q)?;
        let lhs = inner(&gv, &nab, &cv);
        let rhs = dual::koszul(metric, &q, &a, &b, &c)?;
        defect = defect.max((lhs - rhs).abs());
    }
    Ok(CheckResult::measured(
        "dual_levi_civita_compat",
        defect,
        1e-9,
        "<nabla_A B, C> = square_A B(C) off the hypersurface",
    ))
}

fn screen_metric_property(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let v = random_screen_field(metric, rng)?;
        let w = random_screen_field(metric, rng)?;
        let dv = connections::screen_connection(metric, &p, &x, &v)?;
        let dw = connections::screen_connection(metric, &p, &x, &w)?;
        let gv = metric.metric_values_at(p.coords())?;
        let vv = v.values_at(p.coords())?;
        let wv = w.values_at(p.coords())?;
        let lhs = inner(&gv, &dv, &wv) + inner(&gv, &vv, &dw);
        // X<V,W> from jets
        let g = metric.metric_at(p.coords())?;
        let vj = v.jets_at(p.coords())?;
        let wj = w.jets_at(p.coords())?;
        let mut gvw = crate::jet::Jet3::constant(m, 0.0);
        for i in 0..m {
            for j in 0..m {
                gvw = &gvw + &(&(&g[i][j] * &vj[i]) * &wj[j]);
            }
        }
        let xv = x.values_at(p.coords())?;
        let rhs: f64 = (0..m).map(|i| xv[i] * gvw.d1(i)).sum();
        defect = defect.max((lhs - rhs).abs());
    }
    Ok(CheckResult::measured(
        "screen_metric_property",
        defect,
        1e-8,
        "<D^S_X V, W> + <V, D^S_X W> = X<V,W> on screen fields",
    ))
}

fn screen_koszul_compat(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let a = random_field(rng, m);
        let ds = connections::screen_connection(metric, &p, &x, &a)?;
        let frame = sigma::screen_frame(metric, &p)?;
        let gv = metric.metric_values_at(p.coords())?;
        for v in &frame.screen {
            let vs = VectorFieldSpec::constant(v);
            let k = dual::koszul(metric, p.coords(), &x, &a, &vs)?;
            defect = defect.max((inner(&gv, &ds, v) - k).abs());
        }
    }
    Ok(CheckResult::measured(
        "screen_koszul_compat",
        defect,
        1e-9,
        "<D^S_X A, V> = square_X A(V)",
    ))
}

fn weingarten_identities(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..8 {
        let p = random_sigma_point(metric, rng);
        let frame = sigma::screen_frame(metric, &p)?;
        let s = frame.screen.len();
        for l in 0..s {
            let v = VectorFieldSpec::constant(&frame.screen[l]);
            let dr = connections::screen_connection(metric, &p, &v, &coord(m, m))?;
            let dn = connections::screen_connection(metric, &p, &v, &coord(m, 1))?;
            // II^S(V) and H^S(V) expanded on the screen basis
            for k in 0..m {
                let mut ii_v = 0.0;
                let mut h_v = 0.0;
                for mu in 0..s {
                    ii_v += frame.ii[l + 1][mu + 1] * frame.screen[mu][k];
                    h_v += frame.h[l][mu] * frame.screen[mu][k];
                }
                defect = defect.max((dr[k] + ii_v).abs()).max((dn[k] + h_v).abs());
            }
        }
    }
    Ok(CheckResult::measured(
        "weingarten_identities",
        defect,
        1e-10,
        "II^S(V) = -D^S_V R and H^S(V) = -D^S_V N",
    ))
}

fn main_metricity_identity(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..8 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let y = random_tangent_field(rng, m);
        let z = random_tangent_field(rng, m);
        let lhs = connections::metric_defect(metric, &ConnectionKind::Main, &p, &x, &y, &z)?;
        let ii = sigma::ii_coordinate_matrix(metric, &p)?;
        let xv = x.values_at(p.coords())?;
        let yv = y.values_at(p.coords())?;
        let zv = z.values_at(p.coords())?;
        let rho_y = sigma::rho_form(metric, &p, &yv)?;
        let rho_z = sigma::rho_form(metric, &p, &zv)?;
        let pair = |u: &[f64], v: &[f64]| {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    acc += ii[i][j] * u[i] * v[j];
                }
            }
            acc
        };
        let rhs = rho_y * pair(&xv, &zv) + rho_z * pair(&xv, &yv);
        defect = defect.max((lhs - rhs).abs());
    }
    Ok(CheckResult::measured(
        "main_metricity_identity",
        defect,
        1e-8,
        "metric defect of the main connection equals II(X, rho(Y)Z + rho(Z)Y)",
    ))
}

fn torsion_main_is_drho(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..8 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let y = random_tangent_field(rng, m);
        let tor = connections::torsion(metric, &ConnectionKind::Main, &p, &x, &y)?;
        let d = sigma::d_rho(metric, &p, &x, &y)?;
        for k in 0..m {
            let want = if k == m - 1 { d } else { 0.0 };
            defect = defect.max((tor[k] - want).abs());
        }
    }
    Ok(CheckResult::measured(
        "torsion_main_is_drho",
        defect,
        1e-8,
        "Tor of the main connection is R tensor d rho",
    ))
}

fn torsion_admissible_zero(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..8 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let y = random_tangent_field(rng, m);
        let tor = connections::torsion(metric, &ConnectionKind::MainAdmissible, &p, &x, &y)?;
        for v in &tor {
            defect = defect.max(v.abs());
        }
    }
    Ok(CheckResult::measured(
        "torsion_admissible_zero",
        defect,
        1e-10,
        "the main admissible connection is torsion-free",
    ))
}

fn random_sigma_offset(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<AdmissibleSpec> {
    let m = metric.dim();
    let s = m - 1;
    let mut entries = vec![vec![Expr::Num(0.0); s]; s];
    for i in 0..s {
        for j in i..s {
            let e = random_poly(rng, m, 1..m);
            entries[i][j] = e.clone();
            entries[j][i] = e;
        }
    }
    AdmissibleSpec::new(metric, entries)
}

fn admissible_screen_part(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..6 {
        let p = random_sigma_point(metric, rng);
        let spec = random_sigma_offset(metric, rng)?;
        let x = random_tangent_field(rng, m);
        let y = random_tangent_field(rng, m);
        let d = connections::admissible_connection(metric, &spec, &p, &x, &y)?;
        let ds = connections::screen_connection(metric, &p, &x, &y)?;
        let frame = sigma::screen_frame(metric, &p)?;
        let gv = metric.metric_values_at(p.coords())?;
        for v in &frame.screen {
            defect = defect.max((inner(&gv, &d, v) - inner(&gv, &ds, v)).abs());
        }
    }
    Ok(CheckResult::measured(
        "admissible_screen_part",
        defect,
        1e-10,
        "(D_X Y)^S = D^S_X Y for admissible connections",
    ))
}

fn admissible_curvature(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let flat = model_flatness(metric)?;
    let mut defect: f64 = 0.0;
    for _ in 0..2 {
        let p = random_sigma_point(metric, rng);
        let s1 = random_sigma_offset(metric, rng)?;
        let s2 = random_sigma_offset(metric, rng)?;
        // coordinate tangent fields plus one non-coordinate screen field
        let mut fields: Vec<VectorFieldSpec> = (2..=m).map(|k| coord(m, k)).collect();
        fields.push(random_screen_field(metric, rng)?);
        let pick = |rng: &mut ChaCha8Rng| fields[rng.gen_range(0..fields.len())].clone();
        for _ in 0..2 {
            let (x, y, z, t) = (pick(rng), pick(rng), pick(rng), pick(rng));
            let k1 = connections::connection_curvature(
                metric,
                &ConnectionKind::Admissible(s1.clone()),
                &p,
                &x,
                &y,
                &z,
                &t,
            )?;
            let k2 = connections::connection_curvature(
                metric,
                &ConnectionKind::Admissible(s2.clone()),
                &p,
                &x,
                &y,
                &z,
                &t,
            )?;
            let diff = k1 - k2;
            let predicted = if flat.ii_flat {
                0.0
            } else {
                let ii = sigma::ii_coordinate_matrix(metric, &p)?;
                let pair = |u: &[f64], v: &[f64]| {
                    let mut acc = 0.0;
                    for i in 0..m {
                        for j in 0..m {
                            acc += ii[i][j] * u[i] * v[j];
                        }
                    }
                    acc
                };
                let q = p.coords();
                let (xv, yv, zv, tv) = (
                    x.values_at(q)?,
                    y.values_at(q)?,
                    z.values_at(q)?,
                    t.values_at(q)?,
                );
                let corr = |s: &AdmissibleSpec| -> Result<f64> {
                    Ok(-s.value(&p, &yv, &zv)? * pair(&xv, &tv)
                        + s.value(&p, &xv, &zv)? * pair(&yv, &tv))
                };
                corr(&s1)? - corr(&s2)?
            };
            defect = defect.max((diff - predicted).abs());
        }
    }
    Ok(CheckResult::measured(
        "admissible_curvature",
        defect,
        1e-6,
        if flat.ii_flat {
            "II-flat: all admissible connections share one covariant curvature"
        } else {
            "curvature difference equals the sigma/II determinant correction"
        },
    ))
}

fn tangential_metric_torsion(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let flat = model_flatness(metric)?;
    if !flat.ii_flat {
        return Ok(CheckResult::not_applicable(
            "tangential_metric_torsion",
            "hypersurface is not II-flat",
        ));
    }
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..6 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let y = random_tangent_field(rng, m);
        let z = random_tangent_field(rng, m);
        let md = connections::metric_defect(metric, &ConnectionKind::Tangential, &p, &x, &y, &z)?;
        defect = defect.max(md.abs());
        let tor = connections::torsion(metric, &ConnectionKind::Tangential, &p, &x, &y)?;
        for v in &tor {
            defect = defect.max(v.abs());
        }
    }
    Ok(CheckResult::measured(
        "tangential_metric_torsion",
        defect,
        1e-8,
        "the tangential connection is metric and torsion-free",
    ))
}

fn radical_geodesic(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let flat = model_flatness(metric)?;
    if !flat.ii_flat {
        return Ok(CheckResult::not_applicable(
            "radical_geodesic",
            "hypersurface is not II-flat",
        ));
    }
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let v = connections::tangential_connection(metric, &p, &coord(m, m), &coord(m, m))?;
        for x in &v {
            defect = defect.max(x.abs());
        }
    }
    Ok(CheckResult::measured(
        "radical_geodesic",
        defect,
        1e-10,
        "R is geodesic for the tangential connection",
    ))
}

fn nabla_rr_is_minus_n(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let lim = dual::nabla_limit(metric, &p, &coord(m, m), &coord(m, m))?;
        match lim {
            dual::NablaLimit::Finite(v) => {
                defect = defect.max((v[0] + 1.0).abs());
                for x in &v[1..] {
                    defect = defect.max(x.abs());
                }
            }
            dual::NablaLimit::Divergent { obstruction } => {
                return Ok(CheckResult {
                    name: "nabla_rr_is_minus_n".into(),
                    passed: false,
                    defect: obstruction.abs(),
                    tolerance: 1e-8,
                    detail: "II(R,R) unexpectedly nonzero".into(),
                })
            }
        }
    }
    Ok(CheckResult::measured(
        "nabla_rr_is_minus_n",
        defect,
        1e-8,
        "nabla_R R restricts to -N",
    ))
}

fn curvature_antisymmetry(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    let p = random_sigma_point(metric, rng);
    let x = random_tangent_field(rng, m);
    let y = random_tangent_field(rng, m);
    let z = random_tangent_field(rng, m);
    let t = random_tangent_field(rng, m);
    let kind = ConnectionKind::MainAdmissible;
    let a = connections::connection_curvature(metric, &kind, &p, &x, &y, &z, &t)?;
    let b = connections::connection_curvature(metric, &kind, &p, &y, &x, &z, &t)?;
    defect = defect.max((a + b).abs());
    Ok(CheckResult::measured(
        "curvature_antisymmetry",
        defect,
        1e-6,
        "covariant curvature is antisymmetric in (X, Y)",
    ))
}

// --------------------------------------------------------------- curvature

fn upsilon_symmetries(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..6 {
        let q = random_offsigma_point(metric, rng);
        let cv = limits::curvature_at(metric, &q)?;
        let vals: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let (a, b, c, d) = (&vals[0], &vals[1], &vals[2], &vals[3]);
        let base = cv.contract(a, b, c, d);
        defect = defect
            .max((cv.contract(b, a, c, d) + base).abs())
            .max((cv.contract(a, b, d, c) + base).abs())
            .max((cv.contract(c, d, a, b) - base).abs());
        let p = random_sigma_point(metric, rng);
        let ii_base = limits::upsilon_restricted(metric, &p, a, b, c, d)?;
        defect = defect
            .max((limits::upsilon_restricted(metric, &p, b, a, c, d)? + ii_base).abs())
            .max((limits::upsilon_restricted(metric, &p, a, b, d, c)? + ii_base).abs())
            .max((limits::upsilon_restricted(metric, &p, c, d, a, b)? - ii_base).abs());
    }
    Ok(CheckResult::measured(
        "upsilon_symmetries",
        defect,
        1e-9,
        "bulk and restricted tensors carry the curvature symmetries",
    ))
}

/// Frame vectors and, per frame quadruple, `(eps, value)` samples of the
/// curvature component along the transverse ray.
type QuadSamples = (Vec<Vec<f64>>, Vec<Vec<(f64, f64)>>);

/// Per-quadruple samples of `<R(E_a,E_b)E_c,E_d>` along the transverse ray,
/// shared across the exhaustive checks.
fn quad_samples(metric: &AdaptedMetric, p: &SigmaPoint) -> Result<QuadSamples> {
    let frame = sigma::screen_frame(metric, p)?;
    let mut fvecs = vec![frame.n.clone()];
    fvecs.extend(frame.screen.iter().cloned());
    fvecs.push(frame.r.clone());
    let f = fvecs.len();
    let quads = f * f * f * f;
    let sched = probe::default_schedule();
    let mut samples = vec![Vec::with_capacity(sched.len()); quads];
    for &eps in &sched {
        let mut q = p.coords().to_vec();
        q[0] = eps;
        let cv = limits::curvature_at(metric, &q)?;
        for (idx, s) in samples.iter_mut().enumerate() {
            let (a, b, c, d) = (
                idx / (f * f * f),
                (idx / (f * f)) % f,
                (idx / f) % f,
                idx % f,
            );
            s.push((eps, cv.contract(&fvecs[a], &fvecs[b], &fvecs[c], &fvecs[d])));
        }
    }
    Ok((fvecs, samples))
}

fn route_agreement(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut defect: f64 = 0.0;
    for _ in 0..3 {
        let p = random_sigma_point(metric, rng);
        let (fvecs, samples) = quad_samples(metric, &p)?;
        let f = fvecs.len();
        for (idx, s) in samples.iter().enumerate() {
            let (a, b, c, d) = (
                idx / (f * f * f),
                (idx / (f * f)) % f,
                (idx / f) % f,
                idx % f,
            );
            let bulk: Vec<(f64, f64)> = s
                .iter()
                .map(|&(eps, v)| {
                    let mut q = p.coords().to_vec();
                    q[0] = eps;
                    (eps, v * metric.tau_at(&q).unwrap().value())
                })
                .collect();
            let (lim, _) = probe::neville_extrapolate(&bulk);
            let restricted =
                limits::upsilon_restricted(metric, &p, &fvecs[a], &fvecs[b], &fvecs[c], &fvecs[d])?;
            defect = defect.max((lim - restricted).abs());
        }
    }
    Ok(CheckResult::measured(
        "route_agreement",
        defect,
        1e-6,
        "the bulk tensor extrapolates to the II determinant on every frame quadruple",
    ))
}

fn extends_consistency(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let threads = thread_count();
    let mut mismatches = Vec::new();
    let mut checked = 0usize;
    for _ in 0..2 {
        let p = random_sigma_point(metric, rng);
        let (fvecs, samples) = quad_samples(metric, &p)?;
        let f = fvecs.len();
        let classify = |idx: usize| -> Result<Option<String>> {
            let (a, b, c, d) = (
                idx / (f * f * f),
                (idx / (f * f)) % f,
                (idx / f) % f,
                idx % f,
            );
            let ups =
                limits::upsilon_restricted(metric, &p, &fvecs[a], &fvecs[b], &fvecs[c], &fvecs[d])?;
            let fit = probe::probe_fit(&samples[idx]);
            let probe_bounded = fit.class == ProbeClass::Bounded;
            let ups_zero = ups.abs() < limits::UPS_TOL;
            if probe_bounded != ups_zero {
                return Ok(Some(format!(
                    "quad ({a},{b},{c},{d}): |ups| = {:.3e}, probe slope {:.3}",
                    ups.abs(),
                    fit.slope
                )));
            }
            Ok(None)
        };
        let quads: Vec<usize> = (0..samples.len()).collect();
        checked += quads.len();
        if threads <= 1 {
            for idx in quads {
                if let Some(msg) = classify(idx)? {
                    mismatches.push(msg);
                }
            }
        } else {
            let chunks: Vec<&[usize]> = quads.chunks(quads.len().div_ceil(threads)).collect();
            let results: Vec<Result<Vec<String>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = chunks
                    .into_iter()
                    .map(|chunk| {
                        let classify = &classify;
                        scope.spawn(move || {
                            let mut local = Vec::new();
                            for &idx in chunk {
                                if let Some(msg) = classify(idx)? {
                                    local.push(msg);
                                }
                            }
                            Ok(local)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
            for r in results {
                mismatches.extend(r?);
            }
        }
    }
    Ok(CheckResult {
        name: "extends_consistency".into(),
        passed: mismatches.is_empty(),
        defect: mismatches.len() as f64,
        tolerance: 0.0,
        detail: if mismatches.is_empty() {
            format!("probe boundedness matches the II determinant on {checked} frame quadruples")
        } else {
            mismatches.join("; ")
        },
    })
}

fn remark_coverage(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..3 {
        let p = random_sigma_point(metric, rng);
        let frame = sigma::screen_frame(metric, &p)?;
        let n = VectorFieldSpec::constant(&frame.n);
        let r = VectorFieldSpec::constant(&frame.r);
        let opts = ProbeOptions::default();
        for v in &frame.screen {
            let vs = VectorFieldSpec::constant(v);
            for w in &frame.screen {
                let ws = VectorFieldSpec::constant(w);
                let rep = limits::covariant_limit(metric, &p, &n, &vs, &n, &ws, &opts)?;
                if !rep.classification.is_bounded() {
                    ok = false;
                    detail = format!("<R(N,V)N,W> not bounded: {}", rep.quantity);
                }
            }
            let rep = limits::covariant_limit(metric, &p, &n, &vs, &n, &r, &opts)?;
            if !rep.classification.is_bounded() {
                ok = false;
                detail = format!("<R(N,V)N,R> not bounded: {}", rep.quantity);
            }
        }
        let rep = limits::covariant_limit(metric, &p, &n, &r, &n, &r, &opts)?;
        if rep.classification.is_bounded() {
            ok = false;
            detail = "<R(N,R)N,R> unexpectedly bounded".into();
        }
    }
    Ok(CheckResult {
        name: "remark_coverage".into(),
        passed: ok,
        defect: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        detail: if ok {
            "<R(N,V)N,W>, <R(N,V)N,R> bounded; <R(N,R)N,R> divergent".into()
        } else {
            detail
        },
    })
}

fn lhopital_extrapolation(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let p = random_sigma_point(metric, rng);
        // random field vanishing on the hypersurface: x1 * poly
        let f = Expr::Mul(Box::new(Expr::Var(0)), Box::new(random_poly(rng, m, 0..m)));
        let j = f.eval_jet(p.coords())?;
        let exact = dual::lhopital_limit(metric, &p, &j)?;
        let samples: Vec<(f64, f64)> = probe::default_schedule()
            .iter()
            .map(|&eps| {
                let mut q = p.coords().to_vec();
                q[0] = eps;
                let fv = f.eval_jet(&q)?.value();
                let tau = metric.tau_at(&q)?.value();
                Ok((eps, fv / tau))
            })
            .collect::<Result<_>>()?;
        let (lim, _) = probe::neville_extrapolate(&samples);
        defect = defect.max((lim - exact).abs());
    }
    Ok(CheckResult::measured(
        "lhopital_extrapolation",
        defect,
        1e-6,
        "transverse-derivative quotient matches the extrapolated f/tau",
    ))
}

fn divergence_orders(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let p = random_sigma_point(metric, rng);
    let opts = ProbeOptions::default();
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    let nn = limits::ricci_limit(metric, &p, limits::RicciPair::NN, &opts)?;
    worst = worst.max((nn.probe.slope + 2.0).abs());
    detail.push(format!("Ric(N,N) slope {:.3}", nn.probe.slope));
    let rr = limits::ricci_limit(metric, &p, limits::RicciPair::RR, &opts)?;
    worst = worst.max((rr.probe.slope + 1.0).abs());
    detail.push(format!("Ric(R,R) slope {:.3}", rr.probe.slope));
    let frame = sigma::screen_frame(metric, &p)?;
    let knr = limits::sectional_limit(metric, &p, &frame.n, &frame.r, &opts)?;
    worst = worst.max((knr.probe.slope + 2.0).abs());
    detail.push(format!("K(N,R) slope {:.3}", knr.probe.slope));
    let knv = limits::sectional_limit(metric, &p, &frame.n, &frame.screen[0], &opts)?;
    if !knv.classification.is_bounded() {
        worst = worst.max(1.0);
    }
    detail.push(format!("K(N,V) {:?}", knv.classification));
    Ok(CheckResult::measured(
        "divergence_orders",
        worst,
        0.05,
        detail.join("; "),
    ))
}

fn ricci_prediction_agreement(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let p = random_sigma_point(metric, rng);
    let frame = sigma::screen_frame(metric, &p)?;
    let s = frame.screen.len();
    let opts = ProbeOptions::default();
    let mut pairs = vec![
        limits::RicciPair::NN,
        limits::RicciPair::NR,
        limits::RicciPair::RR,
    ];
    for lam in 0..s {
        pairs.push(limits::RicciPair::NV { lam });
        pairs.push(limits::RicciPair::RV { lam });
        for mu in 0..s {
            pairs.push(limits::RicciPair::VW { lam, mu });
        }
    }
    let mut bad = Vec::new();
    for pair in pairs {
        let rep = limits::ricci_limit(metric, &p, pair, &opts)?;
        let consistent = match rep.classification {
            Classification::Divergent { order: -2, .. } => {
                rep.probe.class == ProbeClass::OrderMinus2
            }
            Classification::Divergent { order: -1, .. } => {
                rep.probe.class == ProbeClass::OrderMinus1
            }
            Classification::Divergent { .. } => false,
            _ => rep.probe.class == ProbeClass::Bounded,
        };
        if !consistent {
            bad.push(format!(
                "{}: {:?} vs probe {:?} (slope {:.3})",
                rep.quantity, rep.classification, rep.probe.class, rep.probe.slope
            ));
        }
    }
    Ok(CheckResult {
        name: "ricci_prediction_agreement".into(),
        passed: bad.is_empty(),
        defect: bad.len() as f64,
        tolerance: 0.0,
        detail: if bad.is_empty() {
            "predicted classification matches the fitted slope for every pair".into()
        } else {
            bad.join("; ")
        },
    })
}

fn gauss_formula(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let flat = model_flatness(metric)?;
    if !flat.ii_flat {
        return Ok(CheckResult::not_applicable(
            "gauss_formula",
            "hypersurface is not II-flat",
        ));
    }
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let p = random_sigma_point(metric, rng);
        let x = random_tangent_field(rng, m);
        let y = random_tangent_field(rng, m);
        let z = random_tangent_field(rng, m);
        let t = random_tangent_field(rng, m);
        let g = limits::gauss_check(metric, &p, &x, &y, &z, &t)?;
        defect = defect.max(g.defect);
    }
    Ok(CheckResult::measured(
        "gauss_formula",
        defect,
        1e-6,
        "tangential curvature equals the curvature limit minus the H determinant",
    ))
}

fn sectional_rank1(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let p = random_sigma_point(metric, rng);
    let frame = sigma::screen_frame(metric, &p)?;
    let opts = ProbeOptions::default();
    let rep = limits::sectional_limit(metric, &p, &frame.screen[0], &frame.r, &opts)?;
    match (&rep.classification, &rep.witness) {
        (Classification::ExtensionDependent { .. }, Some(w)) => {
            let shift = w.perturbed - w.canonical;
            let defect = (shift - w.predicted_shift).abs();
            let passed = defect < 1e-6 && w.predicted_shift.abs() > 1e-8;
            Ok(CheckResult {
                name: "sectional_rank1".into(),
                passed,
                defect,
                tolerance: 1e-6,
                detail: format!(
                    "two extensions differ: shift {shift:.6e}, predicted {:.6e}",
                    w.predicted_shift
                ),
            })
        }
        (Classification::Divergent { order, .. }, _) => {
            let expect = match order {
                -1 => ProbeClass::OrderMinus1,
                -2 => ProbeClass::OrderMinus2,
                _ => ProbeClass::Unclassified,
            };
            let passed = rep.probe.class == expect;
            Ok(CheckResult {
                name: "sectional_rank1".into(),
                passed,
                defect: if passed { 0.0 } else { 1.0 },
                tolerance: 0.0,
                detail: format!(
                    "K(V,R) diverges at order {order}; probe {:?}",
                    rep.probe.class
                ),
            })
        }
        other => Ok(CheckResult {
            name: "sectional_rank1".into(),
            passed: false,
            defect: 1.0,
            tolerance: 0.0,
            detail: format!("unexpected classification {other:?}"),
        }),
    }
}

fn ricci_not_well_defined(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let flat = model_flatness(metric)?;
    if !flat.iii_flat {
        return Ok(CheckResult::not_applicable(
            "ricci_not_well_defined",
            "Ric(V,W) already diverges unless the hypersurface is III-flat",
        ));
    }
    let p = random_sigma_point(metric, rng);
    let frame = sigma::screen_frame(metric, &p)?;
    let v = VectorFieldSpec::constant(&frame.screen[0]);
    let n = VectorFieldSpec::constant(&frame.n);
    let pert = PerturbedExtension {
        base: v.clone(),
        bar: n,
    };
    let sched = probe::default_schedule();
    let mut canon = Vec::new();
    let mut pertd = Vec::new();
    for &eps in &sched {
        let mut q = p.coords().to_vec();
        q[0] = eps;
        let cv = limits::curvature_at(metric, &q)?;
        let vv = limits::FieldEval::eval(&v, metric, &q)?;
        let pv = limits::FieldEval::eval(&pert, metric, &q)?;
        canon.push((eps, cv.ricci(&vv, &vv)));
        pertd.push((eps, cv.ricci(&pv, &pv)));
    }
    let (c0, _) = probe::neville_extrapolate(&canon);
    let (c1, _) = probe::neville_extrapolate(&pertd);
    let shift = c1 - c0;
    Ok(CheckResult {
        name: "ricci_not_well_defined".into(),
        passed: shift.abs() > 1e-6,
        defect: 1.0 / shift.abs().max(1e-300),
        tolerance: 1e6,
        detail: format!(
            "Ric(V,V) limit moves from {c0:.6e} to {c1:.6e} under a tau*N extension shift"
        ),
    })
}

fn covariant_perturbation(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let m = metric.dim();
    let mut defect: f64 = 0.0;
    for _ in 0..4 {
        let p = random_sigma_point(metric, rng);
        let frame = sigma::screen_frame(metric, &p)?;
        let v = VectorFieldSpec::constant(&frame.screen[0]);
        let r = VectorFieldSpec::constant(&frame.r);
        let n = VectorFieldSpec::constant(&frame.n);
        let bars: Vec<Option<VectorFieldSpec>> = (0..4)
            .map(|_| {
                if rng.gen_bool(0.7) {
                    Some(if rng.gen_bool(0.5) {
                        n.clone()
                    } else {
                        random_field(rng, m)
                    })
                } else {
                    None
                }
            })
            .collect();
        let check = limits::perturbation_check(
            metric,
            &p,
            [&v, &r, &v, &r],
            [
                bars[0].as_ref(),
                bars[1].as_ref(),
                bars[2].as_ref(),
                bars[3].as_ref(),
            ],
        )?;
        defect = defect.max((check.deviation - check.predicted_defect).abs());
    }
    Ok(CheckResult::measured(
        "covariant_perturbation",
        defect,
        1e-6,
        "extension shift of the curvature limit equals the II-determinant defect",
    ))
}

fn convention(metric: &AdaptedMetric) -> Result<CheckResult> {
    let s = limits::convention_check(metric)?;
    Ok(CheckResult {
        name: "convention".into(),
        passed: s == 1,
        defect: if s == 1 { 0.0 } else { 2.0 },
        tolerance: 0.0,
        detail: format!("curvature sign calibration s = {s:+}"),
    })
}

fn upsilon_anchor(metric: &AdaptedMetric, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let p = random_sigma_point(metric, rng);
        let f = sigma::screen_frame(metric, &p)?;
        let u = limits::upsilon_restricted(metric, &p, &f.n, &f.r, &f.n, &f.r)?;
        defect = defect.max((u + 1.0).abs());
    }
    Ok(CheckResult::measured(
        "upsilon_anchor",
        defect,
        1e-10,
        "the (N,R,N,R) II determinant is -1 everywhere",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_suite_passes_on_flat() {
        let m = AdaptedMetric::builtin("flat").unwrap();
        let results = run_suite(&m, Suite::Frames, 42);
        for r in &results {
            assert!(
                r.passed,
                "{}: {} (defect {:.3e})",
                r.name, r.detail, r.defect
            );
        }
    }

    #[test]
    fn connections_suite_passes_on_twisted() {
        let m = AdaptedMetric::builtin("twisted").unwrap();
        let results = run_suite(&m, Suite::Connections, 42);
        for r in &results {
            assert!(
                r.passed,
                "{}: {} (defect {:.3e})",
                r.name, r.detail, r.defect
            );
        }
    }

    #[test]
    fn curvature_suite_passes_on_iicurved() {
        let m = AdaptedMetric::builtin("iicurved").unwrap();
        let results = run_suite(&m, Suite::Curvature, 42);
        for r in &results {
            assert!(
                r.passed,
                "{}: {} (defect {:.3e})",
                r.name, r.detail, r.defect
            );
        }
    }
}
