use std::f64::consts::{FRAC_1_SQRT_2, PI};

const EPS: f64 = 1e-17;
const CF_THRESHOLD: f64 = 2.0;

/// Complementary error function.
pub fn erfc_c(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc_c(-x);
    }
    if x < CF_THRESHOLD {
        1.0 - erf_series(x)
    } else {
        (-x * x).exp() * tail_fraction(x) / PI.sqrt()
    }
}

/// Scaled complementary error function `e^{x²}·erfc(x)`, finite for large `x`.
pub fn erfcx(x: f64) -> f64 {
    if x < CF_THRESHOLD {
        (x * x).exp() * erfc_c(x)
    } else {
        tail_fraction(x) / PI.sqrt()
    }
}

/// Standard normal tail probability `Q(x) = erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc_c(x * FRAC_1_SQRT_2)
}

// erf(x) = 2x/√π · e^{-x²} · Σ (2x²)^n / (1·3·…·(2n+1)); all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..500 {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term < EPS * sum {
            break;
        }
    }
    2.0 * x / PI.sqrt() * (-x2).exp() * sum
}

// 1 / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + …)))), modified Lentz.
fn tail_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_points() {
        assert_eq!(erfc_c(0.0), 1.0);
        assert_eq!(q_function(0.0), 0.5);
    }

    #[test]
    fn reference_values() {
        // erfc(1) = 0.157299207050285130658...
        assert!((erfc_c(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
        // erfc(3) = 2.20904969985854413727e-5
        assert!(((erfc_c(3.0) - 2.209_049_699_858_544e-5) / 2.209_049_699_858_544e-5).abs() < 1e-13);
        // Q(1) = 0.158655253931457051...
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
    }

    #[test]
    fn seam_is_continuous() {
        let a = erfc_c(CF_THRESHOLD - 1e-12);
        let b = erfc_c(CF_THRESHOLD + 1e-12);
        assert!(((a - b) / a).abs() < 1e-11);
    }

    #[test]
    fn scaled_tail_is_finite() {
        let v = erfcx(1e8);
        assert!((v * 1e8 * PI.sqrt() - 1.0).abs() < 1e-12);
        assert!((erfcx(3.0) - (9.0f64).exp() * erfc_c(3.0)).abs() < 1e-14);
    }

    #[test]
    fn q_symmetry() {
        for i in -40..=40 {
            let x = i as f64 * 0.21;
            assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-15);
        }
    }
}
