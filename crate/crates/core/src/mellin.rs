//! Length functions `F(t) = 𝔧′(t + a)` on a compact support, their Mellin
//! transforms `(ℳF)(s) = ∫ t^{−s} F(t) dt`, and the Mellin-side entropy
//! asymptotics.

use crate::error::{invalid, Error, Result};
use crate::graph::{BondFamily, IndexFunction};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{CompensatedSum, Real};
use crate::special::binomial;

/// Exponents within this distance of `−1` use the logarithmic antiderivative.
pub const LOG_CASE_TOL: f64 = 1e-12;

/// `F(t) = 𝔧′(t + anchor)` for `t ∈ [ℓ_lo − anchor, ℓ_hi − anchor]`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthFunction<T> {
    jfun: IndexFunction,
    v: usize,
    anchor: T,
    lo: T,
    hi: T,
}

fn index_point<T: Real>(jfun: IndexFunction, j: usize) -> T {
    jfun.inverse(T::from_count(j))
}

impl<T: Real> LengthFunction<T> {
    /// Length function for an eigenvalue in interval `i`: anchored at
    /// `ℓ_{i+1}`, supported on `[ℓ_{i+2} − ℓ_{i+1}, ℓ_v − ℓ_{i+1}]`.
    pub fn new(family: &BondFamily<T>, v: usize, i: usize) -> Result<Self> {
        let jfun = family.index_inverse()?;
        if v < i + 2 {
            return Err(invalid("v", format!("need v >= i + 2 = {}, got {v}", i + 2)));
        }
        Self::anchored(jfun, v, index_point(jfun, i + 1), i + 2)
    }

    /// `F(t) = 𝔧′(t + anchor)` with support `[ℓ_lower − anchor, ℓ_v − anchor]`.
    pub fn anchored(jfun: IndexFunction, v: usize, anchor: T, lower: usize) -> Result<Self> {
        if lower == 0 || lower > v {
            return Err(invalid("lower", format!("index must lie in 1..={v}, got {lower}")));
        }
        Self::custom(jfun, v, anchor, index_point(jfun, lower), index_point(jfun, v))
    }

    /// Arbitrary `ℓ`-range `[ell_lo, ell_hi]`.
    pub fn custom(jfun: IndexFunction, v: usize, anchor: T, ell_lo: T, ell_hi: T) -> Result<Self> {
        if !(anchor.is_finite() && ell_lo.is_finite() && ell_hi.is_finite()) {
            return Err(invalid("anchor", "length-function data must be finite"));
        }
        Ok(Self {
            jfun,
            v,
            anchor,
            lo: ell_lo - anchor,
            hi: ell_hi - anchor,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn anchor(&self) -> T {
        self.anchor
    }

    pub fn index_function(&self) -> IndexFunction {
        self.jfun
    }

    /// Support `[lo, hi]` in the shifted variable.
    pub fn support(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, t: T) -> T {
        if t >= self.lo && t <= self.hi {
            self.jfun.derivative(t + self.anchor)
        } else {
            T::zero()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MellinMethod {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue<T> {
    pub s: T,
    pub value: T,
    pub method: MellinMethod,
    pub est_error: T,
}

/// `∫ t^{−s} F(t) dt` by adaptive quadrature in `u = log t`, to relative
/// tolerance `tol`.
pub fn mellin_numeric<T: Real>(f: &LengthFunction<T>, s: T, tol: T) -> Result<MellinValue<T>> {
    if !(tol > T::zero()) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let (lo, hi) = f.support();
    if hi <= lo {
        return Ok(MellinValue {
            s,
            value: T::zero(),
            method: MellinMethod::Quadrature,
            est_error: T::zero(),
        });
    }
    if lo <= T::zero() {
        if s >= T::one() {
            return Err(Error::Divergence(format!(
                "support starts at {lo}; t^(-{s}) is not integrable at 0"
            )));
        }
        return Err(Error::Domain(format!("support must lie in t > 0, starts at {lo}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let one_minus_s = T::one() - s;
    let jfun = f.index_function();
    let anchor = f.anchor();
    let integrand = |u: T| {
        let t = u.exp();
        (one_minus_s * u).exp() * jfun.derivative(t + anchor)
    };
    let panels = ((b - a).to_f64_lossy().ceil() as usize).clamp(4, 256);
    let r = integrate(integrand, a, b, panels, QuadOptions::relative(tol))?;
    Ok(MellinValue {
        s,
        value: r.value,
        method: MellinMethod::Quadrature,
        est_error: r.error,
    })
}

/// `∫_a^b t^p dt` for `0 < a ≤ b`.
fn power_integral<T: Real>(p: T, a: T, b: T) -> T {
    let e = p + T::one();
    if e.abs() <= T::lit(LOG_CASE_TOL) {
        (b / a).ln()
    } else {
        (b.powf(e) - a.powf(e)) / e
    }
}

/// `n ∫_{ell_lo − σ₁}^{ell_hi − σ₁} t^{−s} (t + σ₁)^{n−1} dt`, expanded binomially.
fn power_law_mellin<T: Real>(n: u32, s: T, sigma1: T, ell_lo: T, ell_hi: T) -> Result<T> {
    let a = ell_lo - sigma1;
    let b = ell_hi - sigma1;
    if !(a > T::zero()) {
        return Err(Error::Domain(format!(
            "lower integration bound {a} must be positive (ell_lo = {ell_lo}, sigma1 = {sigma1})"
        )));
    }
    if b <= a {
        return Ok(T::zero());
    }
    let mut acc = CompensatedSum::new();
    for k in 0..n {
        let c = binomial::<T>(n - 1, k) * sigma1.powi((n - 1 - k) as i32);
        acc.add(c * power_integral(T::from_count(k as usize) - s, a, b));
    }
    Ok(T::from_count(n as usize) * acc.value())
}

/// Closed-form `(ℳF)(s)` for `𝔧(t) = tⁿ`: `n Σ_k C(n−1,k) σ₁^{n−1−k} ∫ t^{k−s} dt`
/// over `[2^{1/n} − σ₁, v^{1/n} − σ₁]`.
pub fn mellin_closed_form<T: Real>(n: u32, v: usize, s: T, sigma1: T) -> Result<MellinValue<T>> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if v < 3 {
        return Err(invalid("v", format!("must be >= 3, got {v}")));
    }
    let jfun = IndexFunction { n };
    let value = power_law_mellin(n, s, sigma1, index_point(jfun, 2), index_point(jfun, v))?;
    Ok(MellinValue {
        s,
        value,
        method: MellinMethod::ClosedForm,
        est_error: T::zero(),
    })
}

/// Closed-form transform of any power-law length function.
pub fn mellin_closed_form_of<T: Real>(f: &LengthFunction<T>, s: T) -> Result<MellinValue<T>> {
    let (lo, hi) = f.support();
    let a = f.anchor();
    let value = power_law_mellin(f.index_function().n, s, a, lo + a, hi + a)?;
    Ok(MellinValue {
        s,
        value,
        method: MellinMethod::ClosedForm,
        est_error: T::zero(),
    })
}

/// `∫_2^v (t^{1/n} − 1 − σ)^{−2} dt` by quadrature (after `t = uⁿ`).
pub fn mellin_asymptotic_m1<T: Real>(n: u32, v: usize, sigma: T) -> Result<T> {
    if n < 2 {
        return Err(invalid("n", format!("must be >= 2, got {n}")));
    }
    if v <= 2 {
        return Ok(T::zero());
    }
    let jfun = IndexFunction { n };
    let lo: T = index_point(jfun, 2);
    let sigma1 = T::one() + sigma;
    if sigma1 >= lo {
        return Err(Error::Domain(format!(
            "integrand is singular: need sigma < 2^(1/n) - 1 = {}",
            lo - T::one()
        )));
    }
    let f = LengthFunction::custom(jfun, v, sigma1, lo, index_point(jfun, v))?;
    Ok(mellin_numeric(&f, T::lit(2.0), T::lit(1e-12))?.value)
}

/// Successive ratios `log (ℳF(v+1))(s) / log (ℳF(v))(s)` and whether they
/// plausibly tend to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<T> {
    pub ratios: Vec<(usize, T)>,
    /// `None` when fewer than three ratios are available.
    pub plausible: Option<bool>,
}

pub const STABILITY_WINDOW: usize = 3;
pub const STABILITY_TOL: f64 = 1e-3;

pub fn stability_check<T: Real>(family: &BondFamily<T>, s: T, v_list: &[usize]) -> Result<StabilityReport<T>> {
    let log_mellin = |v: usize| -> Result<T> {
        let f = LengthFunction::new(family, v, 0)?;
        let m = mellin_closed_form_of(&f, s)?.value;
        if !(m > T::zero()) {
            return Err(Error::Domain(format!("Mellin value {m} at v = {v} has no logarithm")));
        }
        Ok(m.ln())
    };
    let mut ratios = Vec::with_capacity(v_list.len());
    for &v in v_list {
        if v < 4 {
            return Err(invalid("v", format!("must be >= 4, got {v}")));
        }
        ratios.push((v, log_mellin(v + 1)? / log_mellin(v)?));
    }
    let plausible = (ratios.len() >= STABILITY_WINDOW).then(|| {
        let tail: Vec<T> = ratios[ratios.len() - STABILITY_WINDOW..]
            .iter()
            .map(|r| (r.1 - T::one()).abs())
            .collect();
        tail.iter().all(|&d| d <= T::lit(STABILITY_TOL)) && tail.windows(2).all(|w| w[1] <= w[0])
    });
    Ok(StabilityReport { ratios, plausible })
}

/// `(log (ℳF)(2q) − q log (ℳF)(2)) / (1 − q)` for the length function of the
/// renormalized sum `Σ_j (ℓ_j + σ)^{−2q}`, i.e. anchor `−σ` on `[ℓ_1, ℓ_v]`.
pub fn entropy_asymptotic<T: Real>(family: &BondFamily<T>, q: T, v: usize, sigma: T) -> Result<T> {
    if !(q > T::zero()) || q == T::one() {
        return Err(invalid("q", format!("need q > 0 and q != 1, got {q}")));
    }
    if v < 3 {
        return Err(invalid("v", format!("must be >= 3, got {v}")));
    }
    let f = LengthFunction::anchored(family.index_inverse()?, v, -sigma, 1)?;
    let two = T::lit(2.0);
    let mq = mellin_closed_form_of(&f, two * q)?.value;
    let m1 = mellin_closed_form_of(&f, two)?.value;
    Ok((mq.ln() - q * m1.ln()) / (T::one() - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box() {
        let f = LengthFunction::<f64>::custom(IndexFunction { n: 1 }, 2, 0.0, 1.0, 2.0).unwrap();
        let m = mellin_numeric(&f, 2.0, 1e-12).unwrap();
        assert!((m.value - 0.5).abs() < 1e-13);
        assert_eq!(m.method, MellinMethod::Quadrature);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(1.5), 1.0);
    }

    #[test]
    fn integer_family_base_interval() {
        let f = LengthFunction::new(&BondFamily::<f64>::Integer, 11, 0).unwrap();
        assert_eq!(f.support(), (1.0, 10.0));
        let m = mellin_numeric(&f, 2.0, 1e-12).unwrap();
        assert!((m.value - 0.9).abs() < 1e-12);
        let c = mellin_closed_form::<f64>(1, 11, 2.0, 1.0).unwrap();
        assert!((c.value - 0.9).abs() < 1e-14);
    }

    #[test]
    fn support_at_zero_diverges() {
        let f = LengthFunction::<f64>::custom(IndexFunction { n: 1 }, 2, 1.0, 1.0, 2.0).unwrap();
        assert!(matches!(mellin_numeric(&f, 2.0, 1e-10), Err(Error::Divergence(_))));
        assert!(matches!(mellin_closed_form::<f64>(2, 10, 2.0, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn log_case_matches_quadrature() {
        // n = 2, s = 2 hits k − s = −1
        let c = mellin_closed_form::<f64>(2, 1000, 2.0, 1.0).unwrap().value;
        let f = LengthFunction::new(&BondFamily::<f64>::PowerLaw { n: 2 }, 1000, 0).unwrap();
        let q = mellin_numeric(&f, 2.0, 1e-13).unwrap().value;
        assert!(((c - q) / q).abs() < 1e-10);
    }

    #[test]
    fn convergent_case_has_a_limit() {
        let a = mellin_closed_form::<f64>(3, 1_000_000, 4.0, 1.0).unwrap().value;
        let b = mellin_closed_form::<f64>(3, 1_000_000_000, 4.0, 1.0).unwrap().value;
        // remainder decays like v^{-1/3}
        assert!(((a - b) / b).abs() < 0.02);
        assert!(b - a > 0.0);
    }

    #[test]
    fn m1_degenerate_and_domain() {
        assert_eq!(mellin_asymptotic_m1::<f64>(3, 2, 0.0).unwrap(), 0.0);
        assert!(mellin_asymptotic_m1::<f64>(2, 100, 0.5).is_err());
    }

    #[test]
    fn stability_flags() {
        let r = stability_check(&BondFamily::<f64>::Integer, 2.0, &[10]).unwrap();
        assert_eq!(r.ratios.len(), 1);
        assert_eq!(r.plausible, None);
        let r = stability_check(&BondFamily::<f64>::Integer, 2.0, &[4000, 8000, 16_000]).unwrap();
        assert_eq!(r.plausible, Some(true));
        let r = stability_check(&BondFamily::<f64>::PowerLaw { n: 3 }, 4.0, &[1000, 10_000, 100_000]).unwrap();
        assert_eq!(r.plausible, Some(true));
        assert!(stability_check(&BondFamily::<f64>::Integer, 2.0, &[3]).is_err());
    }

    #[test]
    fn large_q_entropy_ratio() {
        // the O(1) offset decays slowly relative to log v; compare increments
        let fam = BondFamily::<f64>::PowerLaw { n: 3 };
        let (v1, v2) = (1_000_000_000usize, 1_000_000_000_000_000_000usize);
        let h1 = entropy_asymptotic(&fam, 50.0, v1, 0.3).unwrap();
        let h2 = entropy_asymptotic(&fam, 50.0, v2, 0.3).unwrap();
        let slope = (h2 - h1) / ((v2 as f64).ln() - (v1 as f64).ln());
        let want = (1.0 / 3.0) * 50.0 / 49.0;
        assert!((slope - want).abs() < 5e-3 * want, "slope {slope}");
    }
}
