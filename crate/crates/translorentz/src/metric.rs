//! Metrics in adapted normal form.
//!
//! The hypersurface where the metric degenerates is fixed at `x1 = 0`. In the
//! coordinates used throughout, the metric is assembled from three blocks of
//! user-supplied scalar fields:
//!
//! ```text
//! g_11 = 1,   g_1i = 0 (i >= 2),
//! g_lm (screen block, l,mu in 2..m-1),
//! g_l,m = x1 * g_l,    g_mm = x1 * g_m  (= tau),
//! ```
//!
//! with `g_m = 2` identically on `x1 = 0`. The screen block restricted to
//! `x1 = 0` must be positive definite, which makes the signature Riemannian on
//! the side where `tau > 0` and Lorentzian on the other.

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::jet::Jet3;
use crate::linalg;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const BUILTIN_NAMES: [&str; 5] = ["flat", "hcurved", "iicurved", "twisted", "dim4"];

/// Raw configuration, as read from a TOML document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricConfig {
    pub dimension: usize,
    /// Per-axis `[lo, hi]`, axis `x1` first.
    #[serde(rename = "box")]
    pub domain: Vec<[f64; 2]>,
    /// Screen block; either the full square or the upper triangle as ragged
    /// rows (row `l` starting at the diagonal).
    pub g_screen: Vec<Vec<String>>,
    pub g_mix: Vec<String>,
    pub g_m: String,
    #[serde(default)]
    pub vector_fields: BTreeMap<String, VectorFieldConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorFieldConfig {
    pub components: Vec<String>,
    #[serde(default)]
    pub canonical: bool,
}

/// A point of the degenerate hypersurface: full coordinates with `x1 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPoint {
    coords: Vec<f64>,
}

impl SigmaPoint {
    /// From the hypersurface coordinates `(x2, .., xm)`.
    pub fn new(sigma_coords: &[f64]) -> Self {
        let mut coords = Vec::with_capacity(sigma_coords.len() + 1);
        coords.push(0.0);
        coords.extend_from_slice(sigma_coords);
        SigmaPoint { coords }
    }

    pub fn from_full(coords: &[f64]) -> Result<Self> {
        if coords.first() != Some(&0.0) {
            return Err(Error::Precondition(format!(
                "not a Sigma point: x1 = {:?}",
                coords.first()
            )));
        }
        Ok(SigmaPoint {
            coords: coords.to_vec(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Coefficients of a vector field in the coordinate basis.
#[derive(Debug, Clone)]
pub struct VectorFieldSpec {
    components: Vec<Expr>,
    canonical: bool,
}

impl VectorFieldSpec {
    /// `canonical` fields may not reference `x1`; this is checked here.
    pub fn new(components: Vec<Expr>, canonical: bool) -> Result<Self> {
        if canonical {
            for (k, c) in components.iter().enumerate() {
                if c.depends_on(0) {
                    return Err(Error::InvalidInput(format!(
                        "canonical field component {} depends on x1: {}",
                        k + 1,
                        c
                    )));
                }
            }
        }
        Ok(VectorFieldSpec {
            components,
            canonical,
        })
    }

    pub fn parse(components: &[&str], dim: usize, canonical: bool) -> Result<Self> {
        if components.len() != dim {
            return Err(Error::InvalidInput(format!(
                "field has {} components, expected {dim}",
                components.len()
            )));
        }
        let exprs = components
            .iter()
            .map(|s| parse_expr(s, dim))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(exprs, canonical)
    }

    /// The coordinate field along `axis` (1-based), e.g. `coordinate(3, 2)`
    /// is the second coordinate field of a 3-dimensional chart.
    pub fn coordinate(dim: usize, axis_1based: usize) -> Self {
        let components = (1..=dim)
            .map(|k| Expr::Num(if k == axis_1based { 1.0 } else { 0.0 }))
            .collect();
        VectorFieldSpec {
            components,
            canonical: true,
        }
    }

    /// Constant coefficients; the canonical extension of a single tangent
    /// vector expressed at one point.
    pub fn constant(values: &[f64]) -> Self {
        VectorFieldSpec {
            components: values.iter().map(|&v| Expr::num(v)).collect(),
            canonical: true,
        }
    }

    pub fn canonical(&self) -> bool {
        self.canonical
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn values_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.components
            .iter()
            .map(|c| Ok(c.eval_jet(p)?.value()))
            .collect()
    }

    pub fn jets_at(&self, p: &[f64]) -> Result<Vec<Jet3>> {
        self.components.iter().map(|c| Ok(c.eval_jet(p)?)).collect()
    }

    /// Lie bracket `[self, other]` coefficients as jets (valid to order 2).
    pub fn bracket_jets(&self, other: &VectorFieldSpec, p: &[f64]) -> Result<Vec<Jet3>> {
        let m = p.len();
        let a = self.jets_at(p)?;
        let b = other.jets_at(p)?;
        let mut out = Vec::with_capacity(m);
        for c in 0..m {
            let mut acc = Jet3::constant(m, 0.0);
            for k in 0..m {
                acc = &acc + &(&a[k] * &b[c].derive(k));
                acc = &acc - &(&b[k] * &a[c].derive(k));
            }
            out.push(acc);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Signature {
    Riemann,
    Lorentz,
}

/// A validated metric in adapted normal form.
#[derive(Debug, Clone)]
pub struct AdaptedMetric {
    dim: usize,
    domain: Vec<[f64; 2]>,
    g_screen: Vec<Vec<Expr>>,
    g_mix: Vec<Expr>,
    g_m: Expr,
    vector_fields: BTreeMap<String, VectorFieldSpec>,
}

pub const GRID_POINTS_PER_AXIS: usize = 5;
const GM_TOL: f64 = 1e-9;
const PD_TOL: f64 = 1e-10;

impl AdaptedMetric {
    /// Load and validate on the default `5^(m-1)` hypersurface grid.
    pub fn load(config: &MetricConfig) -> Result<Self> {
        Self::load_with_grid(config, GRID_POINTS_PER_AXIS)
    }

    /// Load with a custom number of validation points per hypersurface axis.
    pub fn load_with_grid(config: &MetricConfig, grid_points: usize) -> Result<Self> {
        let m = config.dimension;
        if m < 3 {
            return Err(Error::InvalidInput(format!(
                "dimension must be at least 3, got {m}"
            )));
        }
        if config.domain.len() != m {
            return Err(Error::InvalidInput(format!(
                "box must list {m} axes, got {}",
                config.domain.len()
            )));
        }
        for (k, [lo, hi]) in config.domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidInput(format!(
                    "box axis {} is empty: [{lo}, {hi}]",
                    k + 1
                )));
            }
        }
        if !(config.domain[0][0] <= 0.0 && 0.0 <= config.domain[0][1]) {
            return Err(Error::InvalidInput(
                "x1 range must contain 0 (the hypersurface)".into(),
            ));
        }
        let s = m - 2;
        // screen block: full square or ragged upper triangle
        let mut g_screen = vec![vec![Expr::Num(0.0); s]; s];
        let rows = &config.g_screen;
        if rows.len() != s {
            return Err(Error::InvalidInput(format!(
                "g_screen must have {s} rows, got {}",
                rows.len()
            )));
        }
        let ragged = (0..s).all(|i| rows[i].len() == s - i);
        let square = (0..s).all(|i| rows[i].len() == s);
        if !ragged && !square {
            return Err(Error::InvalidInput(
                "g_screen rows must form a square matrix or its upper triangle".into(),
            ));
        }
        for i in 0..s {
            for (off, text) in rows[i].iter().enumerate() {
                let j = if ragged { i + off } else { off };
                g_screen[i][j] = parse_expr(text, m)?;
            }
        }
        if ragged {
            for i in 0..s {
                for j in 0..i {
                    g_screen[i][j] = g_screen[j][i].clone();
                }
            }
        }
        if config.g_mix.len() != s {
            return Err(Error::InvalidInput(format!(
                "g_mix must have {s} entries, got {}",
                config.g_mix.len()
            )));
        }
        let g_mix = config
            .g_mix
            .iter()
            .map(|t| parse_expr(t, m))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let g_m = parse_expr(&config.g_m, m)?;
        let mut vector_fields = BTreeMap::new();
        for (name, vf) in &config.vector_fields {
            let refs: Vec<&str> = vf.components.iter().map(|s| s.as_str()).collect();
            vector_fields.insert(
                name.clone(),
                VectorFieldSpec::parse(&refs, m, vf.canonical)?,
            );
        }
        let metric = AdaptedMetric {
            dim: m,
            domain: config.domain.clone(),
            g_screen,
            g_mix,
            g_m,
            vector_fields,
        };
        metric.validate_on_grid(grid_points.max(2))?;
        Ok(metric)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: MetricConfig = toml::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("config deserialization: {e}")))?;
        Self::load(&config)
    }

    /// `builtin:<name>` or a filesystem path.
    pub fn from_source(source: &str) -> Result<Self> {
        if let Some(name) = source.strip_prefix("builtin:") {
            return Self::builtin(name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown builtin model '{name}'")));
        }
        let text = std::fs::read_to_string(source)
            .map_err(|e| Error::InvalidInput(format!("cannot read {source}: {e}")))?;
        Self::from_toml_str(&text)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let config = builtin_config(name)?;
        Some(Self::load(&config).expect("builtin models are valid by construction"))
    }

    fn validate_on_grid(&self, n: usize) -> Result<()> {
        let s = self.dim - 2;
        for p in self.sigma_grid(n) {
            let q = p.coords();
            let gm = self.g_m.eval_jet(q)?.value();
            if (gm - 2.0).abs() > GM_TOL {
                return Err(Error::NormalForm {
                    message: format!("g_m restricted to x1 = 0 must equal 2, found {gm}"),
                    point: q.to_vec(),
                });
            }
            let mut block = vec![vec![0.0; s]; s];
            for i in 0..s {
                for j in 0..s {
                    block[i][j] = self.g_screen[i][j].eval_jet(q)?.value();
                }
            }
            for i in 0..s {
                for j in i + 1..s {
                    if (block[i][j] - block[j][i]).abs() > 1e-12 {
                        return Err(Error::NormalForm {
                            message: format!(
                                "screen block not symmetric: g_{}{} != g_{}{}",
                                i + 2,
                                j + 2,
                                j + 2,
                                i + 2
                            ),
                            point: q.to_vec(),
                        });
                    }
                }
            }
            let eig = linalg::sym_eigenvalues(&block);
            if eig.first().copied().unwrap_or(0.0) <= PD_TOL {
                return Err(Error::NormalForm {
                    message: format!(
                        "screen block not positive definite on x1 = 0 (min eigenvalue {:.3e})",
                        eig.first().copied().unwrap_or(0.0)
                    ),
                    point: q.to_vec(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn vector_field(&self, name: &str) -> Option<&VectorFieldSpec> {
        self.vector_fields.get(name)
    }

    /// The mixed-block component functions `g_l` (index 0 is `g_2`).
    pub fn g_mix_exprs(&self) -> &[Expr] {
        &self.g_mix
    }

    pub fn vector_field_names(&self) -> impl Iterator<Item = &str> {
        self.vector_fields.keys().map(|s| s.as_str())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim
            && p.iter()
                .zip(&self.domain)
                .all(|(x, [lo, hi])| *lo <= *x && *x <= *hi)
    }

    /// Regular grid on the hypersurface slice of the box, `n` points per axis.
    pub fn sigma_grid(&self, n: usize) -> Vec<SigmaPoint> {
        let axes: Vec<Vec<f64>> = self.domain[1..]
            .iter()
            .map(|[lo, hi]| {
                (0..n)
                    .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                    .collect()
            })
            .collect();
        let mut points = vec![Vec::new()];
        for axis in &axes {
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for &v in axis {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            points = next;
        }
        points.iter().map(|p| SigmaPoint::new(p)).collect()
    }

    /// Entry `(a, b)` of the assembled metric as a jet (0-based indices).
    fn entry_jet(&self, a: usize, b: usize, p: &[f64]) -> Result<Jet3> {
        let m = self.dim;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let x1 = Jet3::variable(m, 0, p[0]);
        Ok(if a == 0 {
            Jet3::constant(m, if b == 0 { 1.0 } else { 0.0 })
        } else if b < m - 1 {
            self.g_screen[a - 1][b - 1].eval_jet(p)?
        } else if a < m - 1 {
            // g_{a,m} = x1 * g_a
            &x1 * &self.g_mix[a - 1].eval_jet(p)?
        } else {
            // g_mm = x1 * g_m = tau
            &x1 * &self.g_m.eval_jet(p)?
        })
    }

    /// Full metric matrix of order-3 jets at `p`.
    pub fn metric_at(&self, p: &[f64]) -> Result<Vec<Vec<Jet3>>> {
        let m = self.dim;
        if p.len() != m {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, expected {m}",
                p.len()
            )));
        }
        let mut g = Vec::with_capacity(m);
        for a in 0..m {
            let mut row = Vec::with_capacity(m);
            for b in 0..m {
                row.push(self.entry_jet(a, b, p)?);
            }
            g.push(row);
        }
        Ok(g)
    }

    pub fn metric_values_at(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let g = self.metric_at(p)?;
        Ok(g.iter()
            .map(|row| row.iter().map(|j| j.value()).collect())
            .collect())
    }

    /// Jet of `tau = x1 * g_m`.
    pub fn tau_at(&self, p: &[f64]) -> Result<Jet3> {
        let x1 = Jet3::variable(self.dim, 0, p[0]);
        Ok(&x1 * &self.g_m.eval_jet(p)?)
    }

    /// Eigenvalue signs of the metric at an off-hypersurface point.
    pub fn signature_probe(&self, p: &[f64]) -> Result<Signature> {
        if p[0] == 0.0 {
            return Err(Error::Precondition(
                "signature probe requires x1 != 0".into(),
            ));
        }
        let g = self.metric_values_at(p)?;
        let eig = linalg::sym_eigenvalues(&g);
        let negatives = eig.iter().filter(|&&e| e < -1e-12).count();
        let zeros = eig.iter().filter(|&&e| e.abs() <= 1e-12).count();
        if zeros > 0 {
            return Err(Error::NormalForm {
                message: "metric degenerates off the hypersurface".into(),
                point: p.to_vec(),
            });
        }
        match negatives {
            0 => Ok(Signature::Riemann),
            1 => Ok(Signature::Lorentz),
            k => Err(Error::NormalForm {
                message: format!("signature has {k} negative directions"),
                point: p.to_vec(),
            }),
        }
    }
}

fn builtin_config(name: &str) -> Option<MetricConfig> {
    let cfg = |dimension: usize,
               domain: Vec<[f64; 2]>,
               g_screen: Vec<Vec<&str>>,
               g_mix: Vec<&str>,
               g_m: &str| MetricConfig {
        dimension,
        domain,
        g_screen: g_screen
            .into_iter()
            .map(|r| r.into_iter().map(String::from).collect())
            .collect(),
        g_mix: g_mix.into_iter().map(String::from).collect(),
        g_m: g_m.to_string(),
        vector_fields: BTreeMap::new(),
    };
    Some(match name {
        "flat" => cfg(
            3,
            vec![[-0.3, 0.3], [-1.0, 1.0], [-1.0, 1.0]],
            vec![vec!["1"]],
            vec!["0"],
            "2",
        ),
        "hcurved" => cfg(
            3,
            vec![[-0.3, 0.3], [-0.5, 0.5], [-1.0, 1.0]],
            vec![vec!["1 + x1*x2"]],
            vec!["0"],
            "2",
        ),
        "iicurved" => cfg(
            3,
            vec![[-0.3, 0.3], [-1.0, 1.0], [-0.4, 1.0]],
            vec![vec!["1 + x3"]],
            vec!["0"],
            "2",
        ),
        "twisted" => cfg(
            3,
            vec![[-0.3, 0.3], [-1.0, 1.0], [-1.0, 1.0]],
            vec![vec!["1"]],
            vec!["x3"],
            "2",
        ),
        "dim4" => cfg(
            4,
            vec![[-0.3, 0.3], [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]],
            vec![vec!["1 + x1*x2", "0"], vec!["0", "1 + x1*x3"]],
            vec!["0", "0"],
            "2",
        ),
        _ => return None,
    })
}
