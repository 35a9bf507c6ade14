//! Graph zeta functions, the Riemann zeta (Euler–Maclaurin, real `s > −3`),
//! the Epstein zeta of `x² + D·y²`, the functional-equation factor and the
//! ground-state fractal exponents built from them.

use crate::error::{invalid, Error, Result};
use crate::graph::{BondFamily, StarGraph};
use crate::scalar::{CompensatedSum, Real};
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaKind {
    GraphFinite,
    GraphLimit,
    Riemann,
    Epstein,
}

impl ZetaKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZetaKind::GraphFinite => "graph_finite",
            ZetaKind::GraphLimit => "graph_limit",
            ZetaKind::Riemann => "riemann",
            ZetaKind::Epstein => "epstein",
        }
    }
}

/// A zeta value together with how it was obtained.
///
/// `value` is within `tail_bound` of the exact series (zero for finite sums).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEvaluation<T> {
    pub s: T,
    pub value: T,
    pub kind: ZetaKind,
    /// Number of directly summed terms (Riemann) or lattice radius² (Epstein).
    pub truncation: Option<u64>,
    pub tail_bound: T,
}

/// `ζ_{G,v}(s) = Σ_j (ℓ_j / (L + εℓ_j))^{−s}`.
pub fn zeta_graph_finite<T: Real>(g: &StarGraph<T>, s: T) -> ZetaEvaluation<T> {
    let acc: CompensatedSum<T> = (0..g.v())
        .map(|j| {
            let l = g.ell()[j];
            (g.bond_length(j) / l).powf(s)
        })
        .collect();
    ZetaEvaluation {
        s,
        value: acc.value(),
        kind: ZetaKind::GraphFinite,
        truncation: Some(g.v() as u64),
        tail_bound: T::zero(),
    }
}

/// `ζ_G(s) = Σ_{j≥1} ℓ_j^{−s}` for a bond family with a `v`-independent limit.
pub fn zeta_graph_limit<T: Real>(family: &BondFamily<T>, s: T, tol: T) -> Result<ZetaEvaluation<T>> {
    family.validate()?;
    let inner = match *family {
        BondFamily::Integer => {
            if s <= T::one() {
                return Err(Error::Divergence(format!("sum of j^-s diverges for s = {s} <= 1")));
            }
            riemann_zeta_eval(s)?
        }
        BondFamily::PowerLaw { n } => {
            let nn = T::from_count(n as usize);
            if s <= nn {
                return Err(Error::Divergence(format!("sum of j^(-s/{n}) diverges for s = {s} <= {n}")));
            }
            riemann_zeta_eval(s / nn)?
        }
        BondFamily::LatticeNorms { d } => epstein_zeta(d, s, tol)?,
        BondFamily::ShiftedPower { .. } => {
            return Err(Error::UnsupportedFamily(
                "shifted power lengths grow with v and have no limiting zeta".into(),
            ))
        }
    };
    Ok(ZetaEvaluation {
        s,
        kind: ZetaKind::GraphLimit,
        ..inner
    })
}

// B_2, B_4, B_6, B_8 and the first omitted B_10
const BERNOULLI: [f64; 4] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
const BERNOULLI_10: f64 = 5.0 / 66.0;

fn rising<T: Real>(s: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, i| acc * (s + T::from_count(i)))
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_count(i))
}

fn em_remainder_bound<T: Real>(s: T, n: usize) -> T {
    let nt = T::from_count(n);
    (T::lit(BERNOULLI_10) / factorial::<T>(10) * rising(s, 9) * nt.powf(-s - T::lit(9.0))).abs()
}

/// Riemann zeta on the real line, `−3 < s`, `s ≠ 1`.
pub fn riemann_zeta<T: Real>(s: T) -> Result<T> {
    riemann_zeta_eval(s).map(|z| z.value)
}

/// Euler–Maclaurin: `N − 1` direct terms, the integral and boundary terms, and
/// Bernoulli corrections through `B_8`. The reported bound is the first omitted
/// correction, which dominates the remainder for real `s > −9`.
pub fn riemann_zeta_eval<T: Real>(s: T) -> Result<ZetaEvaluation<T>> {
    if !(s > T::lit(-3.0)) || !s.is_finite() {
        return Err(Error::Domain(format!("riemann_zeta supports s > -3, got {s}")));
    }
    if s == T::one() {
        return Err(Error::Divergence("riemann_zeta has a pole at s = 1".into()));
    }
    if s < T::zero() {
        // reflection avoids the cancellation between Σ n^{−s} and N^{1−s}/(s−1)
        let pi = T::PI();
        let partner = riemann_zeta_eval(T::one() - s)?;
        let factor = T::lit(2.0).powf(s) * pi.powf(s - T::one()) * (pi * s * T::lit(0.5)).sin() * gamma(T::one() - s);
        return Ok(ZetaEvaluation {
            s,
            value: factor * partner.value,
            kind: ZetaKind::Riemann,
            truncation: partner.truncation,
            tail_bound: factor.abs() * partner.tail_bound,
        });
    }
    let floor = T::epsilon() * T::lit(0.1);
    let mut n = 10usize;
    while n < 4096 && em_remainder_bound(s, n) > floor {
        n *= 2;
    }
    let nt = T::from_count(n);
    let mut acc = CompensatedSum::new();
    for k in 1..n {
        acc.add(T::from_count(k).powf(-s));
    }
    acc.add(nt.powf(T::one() - s) / (s - T::one()));
    acc.add(nt.powf(-s) * T::lit(0.5));
    for (i, &b) in BERNOULLI.iter().enumerate() {
        let p = 2 * (i + 1);
        acc.add(T::lit(b) / factorial::<T>(p) * rising(s, p - 1) * nt.powf(-s - T::from_count(p - 1)));
    }
    Ok(ZetaEvaluation {
        s,
        value: acc.value(),
        kind: ZetaKind::Riemann,
        truncation: Some(n as u64 - 1),
        tail_bound: em_remainder_bound(s, n),
    })
}

/// Rigorous bound on the deviation of the lattice tail beyond radius `R` from
/// its area approximation `π R^{2−2s} / (√D (s−1))`.
fn epstein_tail_error<T: Real>(d: T, s: T, r: T) -> T {
    let pi = T::PI();
    let two = T::lit(2.0);
    let c = (T::one() + d).sqrt() * T::lit(0.5);
    let lead = two * c * r.powf(T::one() - two * s) * (T::one() + two * s / (two * s - T::one()));
    let second = two * c * c * r.powf(-two * s);
    pi / d.sqrt() * (lead + second) + two * r.powf(-two * s)
}

fn epstein_tail_main<T: Real>(d: T, s: T, r: T) -> T {
    T::PI() * r.powf(T::lit(2.0) - T::lit(2.0) * s) / (d.sqrt() * (s - T::one()))
}

/// Direct lattice sum of `Q(x,y)^{−s}` over `0 < Q ≤ r2`.
fn epstein_partial<T: Real>(d: T, s: T, r2: T) -> T {
    let xmax = r2.sqrt().floor().to_u64().unwrap_or(0);
    let ymax = (r2 / d).sqrt().floor().to_u64().unwrap_or(0);
    let mut axes = CompensatedSum::new();
    for x in 1..=xmax {
        let xt = T::from_u64(x).unwrap();
        axes.add((xt * xt).powf(-s));
    }
    for y in 1..=ymax {
        let yt = T::from_u64(y).unwrap();
        axes.add((d * yt * yt).powf(-s));
    }
    let mut interior = CompensatedSum::new();
    for x in 1..=xmax {
        let xt = T::from_u64(x).unwrap();
        let x2 = xt * xt;
        let rest = r2 - x2;
        if rest < d {
            break;
        }
        let ylim = (rest / d).sqrt().floor().to_u64().unwrap_or(0);
        for y in 1..=ylim {
            let yt = T::from_u64(y).unwrap();
            interior.add((x2 + d * yt * yt).powf(-s));
        }
    }
    T::lit(2.0) * axes.value() + T::lit(4.0) * interior.value()
}

/// Epstein zeta `Σ_{(x,y)≠0} (x² + D y²)^{−s}` for `s > 1`.
///
/// Sums the lattice inside radius `R` (in the norm `√Q`), adds the area
/// approximation of the remaining tail, and reports a rigorous bound on what
/// that approximation can miss. `R` is grown until the bound is below
/// `tol·value`.
pub fn epstein_zeta<T: Real>(d: T, s: T, tol: T) -> Result<ZetaEvaluation<T>> {
    if !(d > T::zero() && d.is_finite()) {
        return Err(invalid("D", format!("must be positive, got {d}")));
    }
    if !(s > T::one()) {
        return Err(Error::Divergence(format!("Epstein sum diverges for s = {s} <= 1")));
    }
    if !(tol > T::zero()) {
        return Err(invalid("tol", "must be positive"));
    }
    // (±1, 0) contribute 2, so the value is at least 2
    let r0 = T::lit(4.0) * d.max(T::one()).sqrt();
    let estimate = epstein_partial(d, s, r0 * r0).max(T::lit(2.0));
    let target = tol * estimate;
    let mut r = r0;
    while epstein_tail_error(d, s, r) > target {
        r = r * T::lit(1.25);
        if r > T::lit(1e5) {
            return Err(Error::Domain(format!(
                "Epstein tolerance {tol} needs a lattice radius beyond 1e5 at s = {s}"
            )));
        }
    }
    let r2 = r * r;
    let value = epstein_partial(d, s, r2) + epstein_tail_main(d, s, r);
    Ok(ZetaEvaluation {
        s,
        value,
        kind: ZetaKind::Epstein,
        truncation: r2.floor().to_u64(),
        tail_bound: epstein_tail_error(d, s, r),
    })
}

/// `φ(s) = 2 (2π)^{−s} cos(πs/2) Γ(s)`, so that `ζ(1−s) = φ(s) ζ(s)`.
pub fn phi_factor<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero() && s <= T::lit(50.0)) {
        return Err(Error::Domain(format!("phi_factor supports 0 < s <= 50, got {s}")));
    }
    let two = T::lit(2.0);
    let pi = T::PI();
    Ok(two * (two * pi).powf(-s) * (pi * s / two).cos() * gamma(s))
}

/// `(log|ζ(2q)| − q log ζ(2)) / (1 − q)` from precomputed zeta values.
///
/// The modulus keeps the expression real where `ζ(2q) < 0` (`0 < 2q < 1`);
/// it is the real part of the principal logarithm.
pub fn exponent_from_zeta<T: Real>(zeta_2q: T, zeta_2: T, q: T) -> T {
    (zeta_2q.abs().ln() - q * zeta_2.ln()) / (T::one() - q)
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if !(q > T::zero() && q.is_finite()) || q == T::one() {
        return Err(invalid("q", format!("need q > 0 and q != 1, got {q}")));
    }
    Ok(())
}

/// `D_q(v) = (log ζ_{G,v}(2q) − q log ζ_{G,v}(2)) / (1 − q)`.
pub fn ground_state_exponent<T: Real>(g: &StarGraph<T>, q: T) -> Result<T> {
    check_q(q)?;
    let two = T::lit(2.0);
    let z2q = zeta_graph_finite(g, two * q).value;
    let z2 = zeta_graph_finite(g, two).value;
    Ok(exponent_from_zeta(z2q, z2, q))
}

/// `D_q = (log ζ_G(2q) − q log ζ_G(2)) / (1 − q)` for `q > 1/2`.
pub fn ground_state_exponent_limit<T: Real>(family: &BondFamily<T>, q: T, tol: T) -> Result<T> {
    check_q(q)?;
    if !(q > T::lit(0.5)) {
        return Err(Error::Divergence(format!("the limiting exponent needs q > 1/2, got {q}")));
    }
    let two = T::lit(2.0);
    let z2q = zeta_graph_limit(family, two * q, tol)?.value;
    let z2 = zeta_graph_limit(family, two, tol)?.value;
    Ok(exponent_from_zeta(z2q, z2, q))
}

/// Both sides of the `q ↦ 1/2 − q` symmetry of the Riemann-graph exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck<T> {
    pub q: T,
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
}

/// Compares `D_{1/2−q}` evaluated directly with
/// `D_q (1−q)/(1/2+q) + (log φ(2q) + (2q − 1/2) log ζ(2)) / (1/2 + q)`.
pub fn symmetry_check<T: Real>(q: T) -> Result<SymmetryCheck<T>> {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    if !(q >= T::lit(0.25) && q < half) {
        return Err(invalid("q", format!("symmetry check needs 1/4 <= q < 1/2, got {q}")));
    }
    let phi = phi_factor(two * q)?;
    if !(phi > T::zero()) {
        return Err(Error::Domain(format!("phi(2q) = {phi} is not positive")));
    }
    let zeta2 = riemann_zeta(two)?;
    let p = half - q;
    let lhs = exponent_from_zeta(riemann_zeta(two * p)?, zeta2, p);
    let d_q = exponent_from_zeta(riemann_zeta(two * q)?, zeta2, q);
    let rhs = d_q * (T::one() - q) / (half + q) + (phi.ln() + (two * q - half) * zeta2.ln()) / (half + q);
    Ok(SymmetryCheck {
        q,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn riemann_closed_forms() {
        assert!((riemann_zeta(2.0_f64).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0_f64).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(-1.0_f64).unwrap() + 1.0 / 12.0).abs() < 1e-14);
        assert!((riemann_zeta(0.0_f64).unwrap() + 0.5).abs() < 1e-14);
        assert!(riemann_zeta(-2.0_f64).unwrap().abs() < 1e-14);
        // ζ(1/2)
        assert!((riemann_zeta(0.5_f64).unwrap() + 1.460_354_508_809_586_8).abs() < 1e-13);
        assert!(matches!(riemann_zeta(1.0_f64), Err(Error::Divergence(_))));
        assert!(riemann_zeta(-3.5_f64).is_err());
    }

    #[test]
    fn graph_finite_examples() {
        let g = StarGraph::<f64>::from_lengths(vec![1.0, 2.0], 1.0, 0.0, 0.0).unwrap();
        assert!((zeta_graph_finite(&g, 2.0).value - 1.25).abs() < 1e-15);
        let g = StarGraph::<f64>::from_lengths(vec![1.0, 2.0], 1.0, 0.1, 0.0).unwrap();
        assert!((zeta_graph_finite(&g, 2.0).value - 1.57).abs() < 1e-14);
        let g = StarGraph::<f64>::from_lengths(vec![3.7], 1.0, 0.2, 0.0).unwrap();
        assert_eq!(zeta_graph_finite(&g, 0.0).value, 1.0);
    }

    #[test]
    fn graph_limit_examples() {
        let z = zeta_graph_limit(&BondFamily::Integer, 2.0_f64, 1e-12).unwrap();
        assert!((z.value - 1.644_934_066_8).abs() < 1e-10);
        let z = zeta_graph_limit(&BondFamily::PowerLaw { n: 2 }, 4.0_f64, 1e-12).unwrap();
        assert!((z.value - PI * PI / 6.0).abs() < 1e-13);
        assert!(matches!(
            zeta_graph_limit(&BondFamily::Integer, 1.0_f64, 1e-12),
            Err(Error::Divergence(_))
        ));
        assert!(zeta_graph_limit(&BondFamily::ShiftedPower { delta: 0.5_f64 }, 3.0, 1e-9).is_err());
    }

    #[test]
    fn phi_examples() {
        assert!((phi_factor(2.0_f64).unwrap() + 1.0 / (2.0 * PI * PI)).abs() < 1e-14);
        assert!((phi_factor(0.5_f64).unwrap() - 1.0).abs() < 1e-14);
        assert!(phi_factor(0.0_f64).is_err());
    }

    #[test]
    fn ground_state_examples() {
        let g = StarGraph::<f64>::from_lengths(vec![1.0, 2.0], 1.0, 0.0, 0.0).unwrap();
        let d = ground_state_exponent(&g, 2.0).unwrap();
        assert!((d - (2.0 * 1.25f64.ln() - 1.0625f64.ln())).abs() < 1e-14);
        assert!((d - 0.385_662).abs() < 1e-6);
        // uniform ratio ℓ/(L+εℓ) = 1 gives log v
        let g = StarGraph::<f64>::from_lengths(vec![2.0; 7], 1.0, 0.5, 0.0).unwrap();
        assert!((ground_state_exponent(&g, 3.0).unwrap() - 7f64.ln()).abs() < 1e-14);
        assert!(ground_state_exponent(&g, 1.0).is_err());
    }

    #[test]
    fn limit_exponent_examples() {
        let d = ground_state_exponent_limit(&BondFamily::Integer, 2.0_f64, 1e-12).unwrap();
        assert!((d - 2.5f64.ln()).abs() < 1e-13);
        let d = ground_state_exponent_limit(&BondFamily::Integer, 60.0_f64, 1e-12).unwrap();
        let z2 = PI * PI / 6.0;
        assert!((d - 60.0 / 59.0 * z2.ln()).abs() < 1e-12);
        assert!(ground_state_exponent_limit(&BondFamily::Integer, 0.6_f64, 1e-12).unwrap().is_finite());
        assert!(matches!(
            ground_state_exponent_limit(&BondFamily::Integer, 0.4_f64, 1e-12),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn symmetry_fixed_point() {
        let c = symmetry_check(0.25_f64).unwrap();
        assert!(c.residual < 1e-14);
        assert!(symmetry_check(0.5_f64).is_err());
        assert!(symmetry_check(0.2_f64).is_err());
    }

    #[test]
    fn epstein_rejects_divergent_region() {
        assert!(matches!(epstein_zeta(1.0_f64, 1.0, 1e-8), Err(Error::Divergence(_))));
    }
}
