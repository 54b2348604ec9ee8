//! Divergence-order fitting and limit extrapolation on geometric schedules.

use serde::Serialize;

/// Half-decade geometric schedule from `hi` down to `lo` (inclusive-ish).
pub fn schedule(lo: f64, hi: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let mut eps = Vec::new();
    let mut exp = hi.log10();
    let end = lo.log10() - 1e-9;
    while exp >= end {
        eps.push(10f64.powf(exp));
        exp -= 0.5;
    }
    eps
}

/// The default schedule `{1e-1, 10^-1.5, .., 1e-4}`.
pub fn default_schedule() -> Vec<f64> {
    schedule(1e-4, 1e-1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeClass {
    Bounded,
    OrderMinus1,
    OrderMinus2,
    Unclassified,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub class: ProbeClass,
}

const ZERO_FLOOR: f64 = 1e-12;

/// Least-squares fit of `log10 |value|` against `log10 eps` with the slope
/// bands: `(-0.1, 0.1)` bounded, `(-1.1, -0.9)` order -1, `(-2.1, -1.9)`
/// order -2, anything else unclassified. All-zero samples are bounded with
/// value 0.
pub fn probe_fit(samples: &[(f64, f64)]) -> ProbeFit {
    let max_abs = samples.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    if max_abs < ZERO_FLOOR {
        return ProbeFit {
            slope: 0.0,
            intercept: f64::NEG_INFINITY,
            residual: 0.0,
            class: ProbeClass::Bounded,
        };
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(e, v)| *e > 0.0 && v.abs() > 1e-300)
        .map(|(e, v)| (e.log10(), v.abs().log10()))
        .collect();
    if pts.len() < 3 {
        return ProbeFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            residual: f64::NAN,
            class: ProbeClass::Unclassified,
        };
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residual = (pts
        .iter()
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let class = if (-0.1..0.1).contains(&slope) {
        ProbeClass::Bounded
    } else if (-1.1..-0.9).contains(&slope) {
        ProbeClass::OrderMinus1
    } else if (-2.1..-1.9).contains(&slope) {
        ProbeClass::OrderMinus2
    } else {
        ProbeClass::Unclassified
    };
    ProbeFit {
        slope,
        intercept,
        residual,
        class,
    }
}

/// Neville polynomial extrapolation of `(eps, value)` samples to `eps = 0`.
/// Returns the extrapolated value and the magnitude of the last correction
/// as an error estimate.
pub fn neville_extrapolate(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 2);
    let xs: Vec<f64> = samples.iter().map(|(e, _)| *e).collect();
    let mut tab: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
    let mut last = tab[n - 1];
    for order in 1..n {
        for i in (order..n).rev() {
            let xi = xs[i];
            let xio = xs[i - order];
            tab[i] = (xio * tab[i] - xi * tab[i - 1]) / (xio - xi);
        }
        last = tab[n - 1];
    }
    let err = (last - tab[n - 2]).abs();
    (last, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_has_seven_half_decades() {
        let s = default_schedule();
        assert_eq!(s.len(), 7);
        assert!((s[0] - 1e-1).abs() < 1e-15);
        assert!((s[6] - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn fits_exact_power_laws() {
        let s = default_schedule();
        let q: Vec<(f64, f64)> = s.iter().map(|&e| (e, 1.0 / (4.0 * e * e))).collect();
        let fit = probe_fit(&q);
        assert!((fit.slope + 2.0).abs() < 1e-3, "{}", fit.slope);
        assert_eq!(fit.class, ProbeClass::OrderMinus2);

        let q: Vec<(f64, f64)> = s.iter().map(|&e| (e, -1.0 / (2.0 * e))).collect();
        let fit = probe_fit(&q);
        assert!((fit.slope + 1.0).abs() < 1e-3);
        assert_eq!(fit.class, ProbeClass::OrderMinus1);

        let q: Vec<(f64, f64)> = s.iter().map(|&e| (e, 3.0 + e)).collect();
        let fit = probe_fit(&q);
        assert!(fit.slope.abs() < 0.05);
        assert_eq!(fit.class, ProbeClass::Bounded);
    }

    #[test]
    fn all_zero_is_bounded() {
        let s: Vec<(f64, f64)> = default_schedule().iter().map(|&e| (e, 0.0)).collect();
        assert_eq!(probe_fit(&s).class, ProbeClass::Bounded);
    }

    #[test]
    fn linear_decay_is_not_silently_coerced() {
        let s = default_schedule();
        let q: Vec<(f64, f64)> = s.iter().map(|&e| (e, 2.0 * e)).collect();
        assert_eq!(probe_fit(&q).class, ProbeClass::Unclassified);
    }

    #[test]
    fn neville_recovers_smooth_limits() {
        let s = default_schedule();
        let q: Vec<(f64, f64)> = s
            .iter()
            .map(|&e| (e, 0.7 - 3.0 * e + 2.0 * e * e))
            .collect();
        let (v, err) = neville_extrapolate(&q);
        assert!((v - 0.7).abs() < 1e-10, "{v}");
        assert!(err < 1e-6);
    }
}
