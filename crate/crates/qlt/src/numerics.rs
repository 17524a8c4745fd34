//! Scalar special functions, series truncation bounds and matrix norms.
//!
//! The exponential kernel `exp(x*y)` is approximated either by its Taylor
//! series or by the Chebyshev series `sum_k (2 - delta_k) I_k(x~) T_k(y~)`
//! with `x~ = y_max * x` and `y~ = y / y_max`. Both truncation tails decay
//! factorially; the bounds implemented here are the explicit right-hand
//! sides used to pick the truncation order `K` and to certify the
//! compiled block-encodings.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Which expansion of the exponential kernel a compilation plan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Plain Taylor series of `exp(x*y)`, valid for real and complex data.
    Taylor,
    /// Single Chebyshev (Jacobi-Anger) series, real coefficients only.
    Chebyshev,
    /// Double Chebyshev series over the real and imaginary parts of `y`,
    /// for complex-coefficient problems.
    DoubleChebyshev,
}

impl SeriesKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesKind::Taylor => "taylor",
            SeriesKind::Chebyshev => "chebyshev",
            SeriesKind::DoubleChebyshev => "double-chebyshev",
        }
    }
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A chosen truncation order together with the tail bound it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBound {
    /// Truncation order: terms `0..=k` are kept.
    pub k: usize,
    /// Value of the kind-appropriate tail bound at this order.
    pub bound: f64,
    /// The product `x_max * y_max` the bound was evaluated at.
    pub product: f64,
}

/// `q^m / m!` computed without overflowing intermediates.
///
/// Switches to log-domain once the exponent is large; below that a running
/// product keeps full relative accuracy.
fn power_over_factorial(q: f64, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if q == 0.0 {
        return 0.0;
    }
    if m > 120 {
        let ln_fact: f64 = (1..=m).map(|i| (i as f64).ln()).sum();
        return ((m as f64) * q.ln() - ln_fact).exp();
    }
    let mut t = 1.0;
    for i in 1..=m {
        t *= q / i as f64;
    }
    t
}

/// Tail bound of the order-`k` Taylor series of `exp(x*y)` over
/// `|x| <= x_max`, `|y| <= y_max`: `e^p * p^(K+1) / (K+1)!` with
/// `p = x_max * y_max`.
pub fn taylor_tail_bound(product: f64, k: usize) -> f64 {
    product.exp() * power_over_factorial(product, k + 1)
}

/// Tail bound of the order-`k` Chebyshev series:
/// `4 e^p (p/2)^(K+1) / (K+1)!`, requiring `K+1 >= p`.
pub fn chebyshev_tail_bound(product: f64, k: usize) -> Result<f64> {
    if ((k + 1) as f64) < product {
        return Err(Error::SideCondition { k_plus_1: k + 1, product });
    }
    Ok(4.0 * product.exp() * power_over_factorial(product / 2.0, k + 1))
}

/// Tail bound of the order-`k` double Chebyshev series used for complex
/// coefficients: `8 e^(5p/2) (p/2)^(K+1) / (K+1)!`, requiring `K+1 >= p`.
pub fn complex_double_tail_bound(product: f64, k: usize) -> Result<f64> {
    if ((k + 1) as f64) < product {
        return Err(Error::SideCondition { k_plus_1: k + 1, product });
    }
    Ok(8.0 * (2.5 * product).exp() * power_over_factorial(product / 2.0, k + 1))
}

/// Smallest truncation order whose tail bound reaches `eps`.
///
/// Linear scan from the smallest admissible order (for the Chebyshev kinds
/// the side condition `K+1 >= product` fixes the starting point). The scan
/// terminates because every bound decays factorially in `K`.
pub fn truncation_order(kind: SeriesKind, product: f64, eps: f64) -> Result<TruncationBound> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let start = match kind {
        SeriesKind::Taylor => 0usize,
        // K+1 >= product  <=>  K >= product - 1
        SeriesKind::Chebyshev | SeriesKind::DoubleChebyshev => {
            (product - 1.0).ceil().max(0.0) as usize
        }
    };
    let mut k = start;
    loop {
        let bound = match kind {
            SeriesKind::Taylor => taylor_tail_bound(product, k),
            SeriesKind::Chebyshev => chebyshev_tail_bound(product, k)?,
            SeriesKind::DoubleChebyshev => complex_double_tail_bound(product, k)?,
        };
        if bound <= eps {
            return Ok(TruncationBound { k, bound, product });
        }
        k += 1;
    }
}

const BESSEL_MAX_ARG: f64 = 50.0;

/// Modified Bessel function of the first kind `I_k(z)` for complex `z`,
/// `|z| <= 50`.
///
/// Ascending power series `sum_m (z/2)^(k+2m) / (m! (m+k)!)` with a
/// relative term cutoff of 1e-18; on this argument range the series is
/// stable and converges well before the iteration cap.
pub fn bessel_i(k: usize, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if !r.is_finite() || r > BESSEL_MAX_ARG {
        return Err(Error::BesselDomain(r));
    }
    let half = z / 2.0;
    // leading term (z/2)^k / k!
    let mut term = Complex64::new(1.0, 0.0);
    for i in 1..=k {
        term *= half / i as f64;
    }
    let half_sq = half * half;
    let mut acc = term;
    for m in 1..400usize {
        term *= half_sq / ((m * (m + k)) as f64);
        acc += term;
        if term.norm() <= 1e-18 * acc.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(acc)
}

/// Chebyshev polynomial `T_k(t) = cos(k * arccos(t))` on `[-1, 1]`.
///
/// Arguments are clamped within a 1e-12 rounding slack; anything further
/// outside is rejected.
pub fn chebyshev_t(k: usize, t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + 1e-12 {
        return Err(Error::ChebyshevDomain(t.abs()));
    }
    let t = t.clamp(-1.0, 1.0);
    Ok(((k as f64) * t.acos()).cos())
}

/// Normalization constant `I_{k,max} = e^p (p/2)^k / k!` dominating
/// `|I_k(x~)|` for every `|x~| <= p`.
pub fn i_k_max(k: usize, product: f64) -> f64 {
    product.exp() * power_over_factorial(product / 2.0, k)
}

const SVD_DIM_LIMIT: usize = 64;
const SPECTRAL_DIM_LIMIT: usize = 1 << 12;

/// Largest singular value of a complex matrix.
///
/// Dense SVD up to dimension 64; above that, power iteration on `M^H M`
/// with a 1e-12 relative convergence threshold.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::NonFiniteMatrix);
    }
    let dim = m.nrows().max(m.ncols());
    if dim > SPECTRAL_DIM_LIMIT {
        return Err(Error::MatrixTooLarge(dim, SPECTRAL_DIM_LIMIT));
    }
    if dim == 0 {
        return Ok(0.0);
    }
    if dim <= SVD_DIM_LIMIT {
        let svd = m.clone().svd(false, false);
        return Ok(svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s)));
    }
    // Power iteration on M^H M from a deterministic pseudo-random start.
    let n = m.ncols();
    let mut v = DMatrix::<Complex64>::from_fn(n, 1, |i, _| {
        let a = (i as f64 * 0.7390851332151607).sin();
        let b = (i as f64 * 1.202056903159594 + 0.5).cos();
        Complex64::new(a + 0.25, b)
    });
    let norm0 = v.column(0).norm();
    v /= Complex64::new(norm0, 0.0);
    let mut sigma = 0.0f64;
    for _ in 0..10_000 {
        let w = m * &v;
        let u = m.adjoint() * w;
        let norm = u.column(0).norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = norm.sqrt();
        v = u / Complex64::new(norm, 0.0);
        if (next - sigma).abs() <= 1e-12 * next.max(1.0) {
            return Ok(next);
        }
        sigma = next;
    }
    Ok(sigma)
}
