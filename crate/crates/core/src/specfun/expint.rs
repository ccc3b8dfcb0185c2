use super::{domain, SpecfunError, EULER_GAMMA};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Exponential integral `Ei(x) = -∫_{-x}^∞ e^{-t}/t dt` (principal value for `x > 0`).
pub fn expint_ei(x: f64) -> Result<f64, SpecfunError> {
    if x == 0.0 || x.is_nan() {
        return Err(domain("expint_ei", format!("x = {x}")));
    }
    if x < 0.0 {
        return Ok(-e1(-x));
    }
    if x <= 40.0 {
        Ok(EULER_GAMMA + x.ln() + power_series(x))
    } else {
        Ok(asymptotic_ei(x))
    }
}

/// `E₁(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn expint_e1(x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) {
        return Err(domain("expint_e1", format!("x = {x} is not > 0")));
    }
    Ok(e1(x))
}

fn e1(y: f64) -> f64 {
    if y <= 1.0 {
        -EULER_GAMMA - y.ln() - power_series(-y)
    } else {
        continued_fraction(y)
    }
}

// Σ_{k≥1} x^k / (k·k!)
fn power_series(x: f64) -> f64 {
    let mut fact_term = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        fact_term *= x / kf;
        let term = fact_term / kf;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

// Modified Lentz evaluation of E₁(y) = e^{-y} / (y + 1 - 1²/(y + 3 - 2²/(y + 5 - …)))
fn continued_fraction(y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h * (-y).exp()
}

fn asymptotic_ei(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let next = term * k as f64 / x;
        if next.abs() > term.abs() || next < EPS * sum {
            break;
        }
        term = next;
        sum += term;
    }
    x.exp() / x * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // E1(1) = 0.21938393439552027368
        assert!((expint_ei(-1.0).unwrap() + 0.219_383_934_395_520_27).abs() < 1e-15);
        // Ei(1) = 1.89511781635593675547
        assert!((expint_ei(1.0).unwrap() - 1.895_117_816_355_936_8).abs() < 1e-14);
        // E1(0.1) = 1.82292395841939066610
        assert!((expint_ei(-0.1).unwrap() + 1.822_923_958_419_390_7).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_bound_at_minus_ten() {
        let v = expint_ei(-10.0).unwrap();
        assert!(v < 0.0);
        assert!(v.abs() < (-10.0f64).exp() / 10.0);
    }

    #[test]
    fn zero_is_rejected() {
        assert!(expint_ei(0.0).is_err());
        assert!(expint_e1(-1.0).is_err());
    }

    #[test]
    fn branch_seam_is_continuous() {
        let below = e1(1.0 - 1e-12);
        let above = e1(1.0 + 1e-12);
        assert!(((below - above) / below).abs() < 1e-11);
        let a = expint_ei(40.0).unwrap();
        let b = expint_ei(40.0 + 1e-9).unwrap();
        assert!(((a - b) / a).abs() < 1e-9);
    }

    #[test]
    fn monotone_and_negative_for_negative_arguments() {
        // Ei'(x) = e^x / x < 0, so Ei falls from 0 towards -inf as x rises to 0
        let mut prev = 0.0;
        let mut x = -50.0;
        while x < -0.01 {
            let v = expint_ei(x).unwrap();
            assert!(v < 0.0);
            assert!(v < prev, "not decreasing at {x}");
            prev = v;
            x += 0.173;
        }
    }
}
