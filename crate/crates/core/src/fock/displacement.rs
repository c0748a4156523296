//! Matrix elements `⟨m|D(β)|n⟩` of the displacement operator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rescaling threshold for the Laguerre recurrence.
const BIG: f64 = 1e150;

/// `ln n!` for the whole range of cutoffs we care about.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` as `(sign, ln|value|)`.
fn laguerre_log(n: usize, k: usize, x: f64) -> (f64, f64) {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut cur = 1.0 + k - x;
    let mut log_scale = 0.0;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            log_scale += BIG.ln();
        }
    }
    if cur == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    (cur.signum(), cur.abs().ln() + log_scale)
}

/// `⟨m|D(β)|n⟩` from the associated-Laguerre closed form.
///
/// For `m ≥ n` this is `√(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²)`; the
/// other triangle follows from `⟨m|D(β)|n⟩ = ⟨n|D(−β)|m⟩*`. Factorials and
/// the polynomial are carried in log space, so large indices do not
/// overflow; a result that still is not finite is a range error.
pub fn displacement_matrix_element(m: usize, n: usize, beta: Complex64) -> Result<Complex64> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite("displacement amplitude"));
    }
    let (hi, lo, b) = if m >= n { (m, n, beta) } else { (n, m, -beta.conj()) };
    let k = hi - lo;
    let x = b.norm_sqr();
    let (sign, log_l) = laguerre_log(lo, k, x);
    if sign == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if k > 0 && x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let log_mag = 0.5 * (ln_factorial(lo) - ln_factorial(hi)) - 0.5 * x + log_l + if k > 0 { k as f64 * 0.5 * x.ln() } else { 0.0 };
    if !log_mag.is_finite() || log_mag > 700.0 {
        return Err(Error::Range { m, n });
    }
    let phase = if k > 0 { Complex64::from_polar(1.0, k as f64 * b.arg()) } else { Complex64::new(1.0, 0.0) };
    let v = phase * (sign * log_mag.exp());
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Range { m, n });
    }
    Ok(v)
}

/// Full `(N+1)×(N+1)` block of `D(β)`.
///
/// Each subdiagonal `k = m − n` follows from the Laguerre recurrence in `n`
/// applied to the normalized magnitudes
/// `g_n = √(n!/(n+k)!) |β|^k e^{−|β|²/2} L_n^{(k)}(|β|²)`, which stay bounded
/// by one, so no factorial ever overflows. The upper triangle is filled from
/// `⟨n|D(β)|n+k⟩ = (−1)^k ⟨n+k|D(β)|n⟩*`, making the block exactly unitary-
/// symmetric in that sense.
pub fn displacement_matrix(cutoff: usize, beta: Complex64) -> DMatrix<Complex64> {
    let dim = cutoff + 1;
    let mut d = DMatrix::<Complex64>::zeros(dim, dim);
    fill_displacement(d.as_mut_slice(), dim, beta);
    d
}

/// Column-major fill of [`displacement_matrix`] into `out` (length `dim²`).
pub(crate) fn fill_displacement(out: &mut [Complex64], dim: usize, beta: Complex64) {
    debug_assert_eq!(out.len(), dim * dim);
    let x = beta.norm_sqr();
    let at = |m: usize, n: usize| m + n * dim;
    let unit = if x > 0.0 { beta / x.sqrt() } else { Complex64::new(1.0, 0.0) };
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..dim {
        let kf = k as f64;
        let g0 = if k == 0 {
            (-0.5 * x).exp()
        } else if x > 0.0 {
            (-0.5 * x + 0.5 * kf * x.ln() - 0.5 * ln_factorial(k)).exp()
        } else {
            0.0
        };
        let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut prev = 0.0;
        let mut cur = g0;
        for n in 0..dim - k {
            let v = phase * cur;
            out[at(n + k, n)] = v;
            if k > 0 {
                out[at(n, n + k)] = v.conj() * parity;
            }
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0 + kf - x) * cur - (nf * (nf + kf)).sqrt() * prev)
                / ((nf + 1.0) * (nf + 1.0 + kf)).sqrt();
            prev = cur;
            cur = next;
        }
        phase *= unit;
    }
}
