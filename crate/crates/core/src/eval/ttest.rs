//! Two-tailed paired Student's t-test with Bonferroni correction.

use crate::error::{Error, Result};

/// Result of one paired test.
#[derive(Debug, Clone, Copy)]
pub struct TTestOutcome {
    pub t: f64,
    pub p: f64,
    /// p < 0.05 / comparisons.
    pub significant: bool,
}

/// Paired two-tailed t-test over per-query or per-run metric pairs.
/// `comparisons` is the Bonferroni divisor (>= 1).
///
/// All-zero differences give t = 0, p = 1. Zero variance with a non-zero
/// mean is an infinite t, reported as p = 0 and significant.
pub fn paired_t_test(pairs: &[(f64, f64)], comparisons: usize) -> Result<TTestOutcome> {
    if pairs.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "paired t-test needs >= 2 pairs, got {}",
            pairs.len()
        )));
    }
    if comparisons == 0 {
        return Err(Error::Config("comparisons must be >= 1".into()));
    }
    let n = pairs.len() as f64;
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let threshold = 0.05 / comparisons as f64;

    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestOutcome {
                t: 0.0,
                p: 1.0,
                significant: false,
            }
        } else {
            let t = if mean > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            TTestOutcome {
                t,
                p: 0.0,
                significant: true,
            }
        });
    }

    let t = mean / (var / n).sqrt();
    let dof = n - 1.0;
    // two-tailed p from the Student's t CDF via the regularized incomplete
    // beta: p = I_{v/(v+t^2)}(v/2, 1/2)
    let p = incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t)).clamp(0.0, 1.0);
    Ok(TTestOutcome {
        t,
        p,
        significant: p < threshold,
    })
}

/// Regularized incomplete beta function I_x(a, b) by continued fraction.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = gamma_ln(a + b) - gamma_ln(a) - gamma_ln(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// ln Gamma by the Lanczos approximation.
pub fn gamma_ln(x: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_7e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000_000_000_190_015;
    for c in COEFFS {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}
