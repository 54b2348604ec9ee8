//! Order-3 forward-mode jets in `m` variables.
//!
//! A [`Jet3`] carries a value together with every mixed partial derivative up
//! to total order 3, stored once per nondecreasing index multiset. Arithmetic
//! propagates derivatives by the Leibniz rule, composition with the univariate
//! primitives (sin, cos, exp, log, sqrt, integer powers) by the chain rule to
//! order 3. Everything here is exact up to floating round-off; there is no
//! truncation beyond the fixed order.
//!
//! [`Jet3::derive`] lowers the order: the result's value is the requested
//! first partial, its first partials are the corresponding second partials,
//! and so on. Third-order data of a derived jet is zeroed, so quantities built
//! from derived jets are trusted one order less.

use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    /// A primitive was applied outside its domain.
    #[error("domain error: {op} of {subexpr}")]
    Domain { op: &'static str, subexpr: String },

    #[error("point has {got} components, expected {expected}")]
    DimMismatch { expected: usize, got: usize },
}

/// Domain failure inside raw jet arithmetic, before any expression context is
/// attached.
#[derive(Debug, Clone, Copy)]
pub struct JetDomainError {
    pub op: &'static str,
}

fn idx2(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * m - i * (i + 1) / 2 + j
}

fn idx3(m: usize, i: usize, j: usize, k: usize) -> usize {
    let mut t = [i, j, k];
    t.sort_unstable();
    let [i, j, k] = t;
    // block of first index i, then a 2-index offset in the remaining tail
    let mut off = 0;
    for r in 0..i {
        let n = m - r;
        off += n * (n + 1) / 2;
    }
    let n = m - i;
    let (j, k) = (j - i, k - i);
    off + j * n - j * (j + 1) / 2 + k
}

fn len2(m: usize) -> usize {
    m * (m + 1) / 2
}

fn len3(m: usize) -> usize {
    m * (m + 1) * (m + 2) / 6
}

/// Value plus all partial derivatives to total order 3 at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    dim: usize,
    v: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl Jet3 {
    pub fn constant(dim: usize, v: f64) -> Self {
        Jet3 {
            dim,
            v,
            d1: vec![0.0; dim],
            d2: vec![0.0; len2(dim)],
            d3: vec![0.0; len3(dim)],
        }
    }

    /// The coordinate function `x_axis` seeded at `value` (0-based axis).
    pub fn variable(dim: usize, axis: usize, value: f64) -> Self {
        let mut j = Jet3::constant(dim, value);
        j.d1[axis] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[idx2(self.dim, i, j)]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[idx3(self.dim, i, j, k)]
    }

    /// Jet of the partial derivative along `axis`. Valid one order lower.
    pub fn derive(&self, axis: usize) -> Jet3 {
        let m = self.dim;
        let mut out = Jet3::constant(m, self.d1[axis]);
        for i in 0..m {
            out.d1[i] = self.d2(axis, i);
        }
        for i in 0..m {
            for j in i..m {
                out.d2[idx2(m, i, j)] = self.d3(axis, i, j);
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Jet3 {
        let mut out = self.clone();
        out.v *= c;
        for x in &mut out.d1 {
            *x *= c;
        }
        for x in &mut out.d2 {
            *x *= c;
        }
        for x in &mut out.d3 {
            *x *= c;
        }
        out
    }

    /// Chain rule with `f = [f(u), f'(u), f''(u), f'''(u)]` at `u = self.v`.
    fn chain(&self, f: [f64; 4]) -> Jet3 {
        let m = self.dim;
        let u1 = &self.d1;
        let mut out = Jet3::constant(m, f[0]);
        for i in 0..m {
            out.d1[i] = f[1] * u1[i];
        }
        for i in 0..m {
            for j in i..m {
                out.d2[idx2(m, i, j)] = f[2] * u1[i] * u1[j] + f[1] * self.d2(i, j);
            }
        }
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    out.d3[idx3(m, i, j, k)] = f[3] * u1[i] * u1[j] * u1[k]
                        + f[2]
                            * (self.d2(i, j) * u1[k]
                                + self.d2(i, k) * u1[j]
                                + self.d2(j, k) * u1[i])
                        + f[1] * self.d3(i, j, k);
                }
            }
        }
        out
    }

    pub fn sin(&self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        self.chain([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        self.chain([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet3 {
        let e = self.v.exp();
        self.chain([e, e, e, e])
    }

    pub fn ln(&self) -> Result<Jet3, JetDomainError> {
        if self.v <= 0.0 {
            return Err(JetDomainError { op: "log" });
        }
        let u = self.v;
        Ok(self.chain([u.ln(), 1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u)]))
    }

    pub fn sqrt(&self) -> Result<Jet3, JetDomainError> {
        if self.v <= 0.0 {
            return Err(JetDomainError { op: "sqrt" });
        }
        let u = self.v;
        let r = u.sqrt();
        Ok(self.chain([r, 0.5 / r, -0.25 / (u * r), 3.0 / 8.0 / (u * u * r)]))
    }

    pub fn recip(&self) -> Result<Jet3, JetDomainError> {
        if self.v == 0.0 {
            return Err(JetDomainError { op: "division" });
        }
        let u = self.v;
        let u2 = u * u;
        Ok(self.chain([1.0 / u, -1.0 / u2, 2.0 / (u2 * u), -6.0 / (u2 * u2)]))
    }

    pub fn div(&self, rhs: &Jet3) -> Result<Jet3, JetDomainError> {
        Ok(self * &rhs.recip()?)
    }

    /// Integer power. Negative exponents require a nonzero base.
    pub fn powi(&self, n: i32) -> Result<Jet3, JetDomainError> {
        if n == 0 {
            return Ok(Jet3::constant(self.dim, 1.0));
        }
        if n < 0 && self.v == 0.0 {
            return Err(JetDomainError { op: "power" });
        }
        // d^r/du^r u^n = n(n-1)..(n-r+1) u^(n-r); the coefficient vanishes
        // before the exponent can go negative for u = 0.
        let dpow = |order: i32| -> f64 {
            let mut c = 1.0f64;
            let mut e = n;
            for _ in 0..order {
                c *= e as f64;
                e -= 1;
            }
            if c == 0.0 {
                0.0
            } else {
                c * self.v.powi(e)
            }
        };
        Ok(self.chain([dpow(0), dpow(1), dpow(2), dpow(3)]))
    }
}

impl Add for &Jet3 {
    type Output = Jet3;
    fn add(self, rhs: &Jet3) -> Jet3 {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        out.v += rhs.v;
        for (x, y) in out.d1.iter_mut().zip(&rhs.d1) {
            *x += y;
        }
        for (x, y) in out.d2.iter_mut().zip(&rhs.d2) {
            *x += y;
        }
        for (x, y) in out.d3.iter_mut().zip(&rhs.d3) {
            *x += y;
        }
        out
    }
}

impl Sub for &Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: &Jet3) -> Jet3 {
        self + &(-rhs)
    }
}

impl Neg for &Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for &Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: &Jet3) -> Jet3 {
        debug_assert_eq!(self.dim, rhs.dim);
        let m = self.dim;
        let (a, b) = (self, rhs);
        let mut out = Jet3::constant(m, a.v * b.v);
        for i in 0..m {
            out.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
        }
        for i in 0..m {
            for j in i..m {
                out.d2[idx2(m, i, j)] =
                    a.d2(i, j) * b.v + a.d1[i] * b.d1[j] + a.d1[j] * b.d1[i] + a.v * b.d2(i, j);
            }
        }
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    out.d3[idx3(m, i, j, k)] = a.d3(i, j, k) * b.v
                        + a.d2(i, j) * b.d1[k]
                        + a.d2(i, k) * b.d1[j]
                        + a.d2(j, k) * b.d1[i]
                        + a.d1[i] * b.d2(j, k)
                        + a.d1[j] * b.d2(i, k)
                        + a.d1[k] * b.d2(i, j)
                        + a.v * b.d3(i, j, k);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(dim: usize, axis: usize, v: f64) -> Jet3 {
        Jet3::variable(dim, axis, v)
    }

    #[test]
    fn bilinear_monomial_partials() {
        // x1*x2 at (2,3,0)
        let x1 = var(3, 0, 2.0);
        let x2 = var(3, 1, 3.0);
        let j = &x1 * &x2;
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.d1(0), 3.0);
        assert_eq!(j.d1(1), 2.0);
        assert_eq!(j.d2(0, 1), 1.0);
        for i in 0..3 {
            for jj in i..3 {
                for k in jj..3 {
                    assert_eq!(j.d3(i, jj, k), 0.0);
                }
            }
        }
    }

    #[test]
    fn cube_third_derivative() {
        // x3^3 at (0,0,2): d3=12, d33=12, d333=6
        let x3 = var(3, 2, 2.0);
        let j = x3.powi(3).unwrap();
        assert_eq!(j.value(), 8.0);
        assert_eq!(j.d1(2), 12.0);
        assert_eq!(j.d2(2, 2), 12.0);
        assert_eq!(j.d3(2, 2, 2), 6.0);
    }

    #[test]
    fn constant_has_zero_partials() {
        let j = Jet3::constant(4, 2.0);
        assert_eq!(j.value(), 2.0);
        assert!(j.d1.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn derive_shifts_orders() {
        // f = x1^2 * x2 at (1.5, -2): df/dx1 = 2 x1 x2
        let x1 = var(2, 0, 1.5);
        let x2 = var(2, 1, -2.0);
        let f = &x1.powi(2).unwrap() * &x2;
        let fx = f.derive(0);
        assert!((fx.value() - 2.0 * 1.5 * -2.0).abs() < 1e-14);
        assert!((fx.d1(0) - 2.0 * -2.0).abs() < 1e-14);
        assert!((fx.d1(1) - 2.0 * 1.5).abs() < 1e-14);
        assert!((fx.d2(0, 1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn transcendental_chain_matches_hand_values() {
        // f = sin(x1) * exp(x2) at (0.3, -0.1)
        let x1 = var(2, 0, 0.3);
        let x2 = var(2, 1, -0.1);
        let f = &x1.sin() * &x2.exp();
        let (s, c, e) = (0.3f64.sin(), 0.3f64.cos(), (-0.1f64).exp());
        assert!((f.value() - s * e).abs() < 1e-15);
        assert!((f.d1(0) - c * e).abs() < 1e-15);
        assert!((f.d2(0, 1) - c * e).abs() < 1e-15);
        assert!((f.d3(0, 0, 1) + s * e).abs() < 1e-15);
        assert!((f.d3(0, 1, 1) - c * e).abs() < 1e-15);
    }

    #[test]
    fn add_mul_associative_commutative_to_roundoff() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dim = 3;
        let rand_jet = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut j = Jet3::constant(dim, rng.gen_range(-2.0..2.0f64));
            for i in 0..dim {
                for jj in i..dim {
                    for k in jj..dim {
                        j.d3[idx3(dim, i, jj, k)] = rng.gen_range(-2.0..2.0);
                    }
                    j.d2[idx2(dim, i, jj)] = rng.gen_range(-2.0..2.0);
                }
                j.d1[i] = rng.gen_range(-2.0..2.0);
            }
            j
        };
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
        for _ in 0..50 {
            let (a, b, c) = (rand_jet(&mut rng), rand_jet(&mut rng), rand_jet(&mut rng));
            let lhs = &(&a * &b) * &c;
            let rhs = &a * &(&b * &c);
            let comm = &b * &a;
            let ab = &a * &b;
            let sum_l = &(&a + &b) + &c;
            let sum_r = &a + &(&b + &c);
            assert!(rel(lhs.v, rhs.v) < 1e-12);
            for i in 0..dim {
                for jj in i..dim {
                    for k in jj..dim {
                        assert!(rel(lhs.d3(i, jj, k), rhs.d3(i, jj, k)) < 1e-12);
                        assert!(rel(sum_l.d3(i, jj, k), sum_r.d3(i, jj, k)) < 1e-12);
                        assert!(rel(ab.d3(i, jj, k), comm.d3(i, jj, k)) < 1e-12);
                    }
                    assert!(rel(lhs.d2(i, jj), rhs.d2(i, jj)) < 1e-12);
                }
                assert!(rel(lhs.d1(i), rhs.d1(i)) < 1e-12);
            }
        }
    }

    #[test]
    fn domain_errors() {
        let z = Jet3::constant(2, 0.0);
        assert!(z.recip().is_err());
        assert!(z.ln().is_err());
        assert!(z.sqrt().is_err());
        assert!(z.powi(-1).is_err());
        let n = Jet3::constant(2, -1.0);
        assert!(n.ln().is_err());
        assert!(n.sqrt().is_err());
        assert!(n.powi(-2).is_ok());
    }
}
