// Float helpers routed through libm so the crate builds without std.

#[inline]
pub(crate) fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

/// `|d|^p` with the common exponents special-cased.
#[inline]
pub(crate) fn abs_pow(d: f64, p: f64) -> f64 {
    let a = d.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        libm::pow(a, p)
    }
}

/// Inverse of [`abs_pow`] for a nonnegative accumulated sum.
#[inline]
pub(crate) fn root(s: f64, p: f64) -> f64 {
    let s = s.max(0.0);
    if p == 1.0 {
        s
    } else if p == 2.0 {
        libm::sqrt(s)
    } else {
        libm::pow(s, 1.0 / p)
    }
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}
