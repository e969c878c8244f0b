//! Scalar math shims and small statistics helpers.
//!
//! Float transcendentals are not available in `core`; route them through
//! `std` when the feature is on and through `libm` otherwise. `erfc` has no
//! `std` equivalent and always comes from `libm`.

use alloc::vec::Vec;

#[cfg(feature = "std")]
pub(crate) fn exp(x: f64) -> f64 {
    x.exp()
}
#[cfg(not(feature = "std"))]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[cfg(feature = "std")]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}
#[cfg(not(feature = "std"))]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
pub(crate) fn ln_1p(x: f64) -> f64 {
    x.ln_1p()
}
#[cfg(not(feature = "std"))]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[cfg(feature = "std")]
pub(crate) fn sqrt(x: f64) -> f64 {
    x.sqrt()
}
#[cfg(not(feature = "std"))]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

pub(crate) fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

pub(crate) fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

pub(crate) fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Two-sided tail probability of a standard normal.
pub(crate) fn normal_two_sided_p(z: f64) -> f64 {
    erfc(abs(z) / core::f64::consts::SQRT_2)
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
pub(crate) fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    sqrt(ss / (xs.len() - 1) as f64)
}

/// Pearson correlation; `None` when either side has zero variance or fewer
/// than two points.
pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let ma = mean(a);
    let mb = mean(b);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some(sab / sqrt(saa * sbb))
}

/// log(1 + exp(-m)), stable for large |m|.
pub(crate) fn log1p_exp_neg(m: f64) -> f64 {
    if m > 0.0 {
        ln_1p(exp(-m))
    } else {
        -m + ln_1p(exp(m))
    }
}

/// Logistic sigmoid, stable for large |x|.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// Draw from N(0, 1) by the Marsaglia polar method (no trig needed).
pub(crate) fn standard_normal<R: rand_core::RngCore>(rng: &mut R) -> f64 {
    loop {
        let u = crate::sampling::unit_f64(rng) * 2.0 - 1.0;
        let v = crate::sampling::unit_f64(rng) * 2.0 - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * sqrt(-2.0 * ln(s) / s);
        }
    }
}

pub(crate) fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    (mean(xs), sample_std(xs))
}

/// Collects per-fold values into (mean, sample std) pairs.
pub(crate) fn aggregate(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    mean_and_std(&v)
}
