//! Bond amplitudes, the bond probability measure `μ_k(i) ∝ sec²(k L_i)`,
//! moment sums `M_q`, Renyi entropies and fractal-exponent estimates.

use crate::error::{invalid, Error, Result};
use crate::graph::StarGraph;
use crate::scalar::{log_sum_exp, CompensatedSum, Real};
use crate::spectrum::{pole, pole_phase_distance, POLE_GUARD};

/// Orders at or above this use log-sum-exp accumulation.
pub const LOG_ACCUMULATION_Q: f64 = 8.0;

fn check_pole_guard<T: Real>(g: &StarGraph<T>, k: T) -> Result<()> {
    if !(k > T::zero() && k.is_finite()) {
        return Err(invalid("k", format!("must be positive, got {k}")));
    }
    for j in 0..g.v() {
        if pole_phase_distance(k, g.bond_length(j)) < T::lit(POLE_GUARD) {
            return Err(Error::PoleProximity {
                k: k.to_f64_lossy(),
                bond: j,
                guard: POLE_GUARD,
            });
        }
    }
    Ok(())
}

fn sec2<T: Real>(k: T, lj: T) -> T {
    let c = (k * lj).cos();
    T::one() / (c * c)
}

/// Maximal squared amplitude `A_i = 2 sec²(k L_i) / Σ_j L_j sec²(k L_j)` of the
/// normalized eigenfunction on bond `i` (0-based).
pub fn amplitude<T: Real>(g: &StarGraph<T>, k: T, i: usize) -> Result<T> {
    if i >= g.v() {
        return Err(invalid("i", format!("bond index {i} out of range for v = {}", g.v())));
    }
    check_pole_guard(g, k)?;
    let denom: CompensatedSum<T> = (0..g.v()).map(|j| g.bond_length(j) * sec2(k, g.bond_length(j))).collect();
    Ok(T::lit(2.0) * sec2(k, g.bond_length(i)) / denom.value())
}

/// Probability weights over the bonds.
#[derive(Debug, Clone, PartialEq)]
pub struct BondMeasure<T> {
    weights: Vec<T>,
    k: Option<T>,
}

impl<T: Real> BondMeasure<T> {
    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| !(w >= T::zero() && w.is_finite())) {
            return Err(invalid("weights", "need a nonempty list of nonnegative finite weights"));
        }
        let total: CompensatedSum<T> = weights.iter().copied().collect();
        let total = total.value();
        if !(total > T::zero()) {
            return Err(invalid("weights", "weights sum to zero"));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w / total).collect(),
            k: None,
        })
    }

    pub fn uniform(v: usize) -> Result<Self> {
        Self::from_weights(vec![T::one(); v])
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn k(&self) -> Option<T> {
        self.k
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `μ_k(i) = sec²(k L_i) / Σ_j sec²(k L_j)`.
pub fn measure_at<T: Real>(g: &StarGraph<T>, k: T) -> Result<BondMeasure<T>> {
    check_pole_guard(g, k)?;
    let w: Vec<T> = (0..g.v()).map(|j| sec2(k, g.bond_length(j))).collect();
    let mut mu = BondMeasure::from_weights(w)?;
    mu.k = Some(k);
    Ok(mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// `Σ |sec(k L_j)|^{2q}`.
    Exact,
    /// `Σ |(k − s_{m,j}) L_j|^{−2q}` with `s_{m,j}` the pole of bond `j` nearest to `k`.
    PoleApprox,
    /// `Σ (k − s_{0,j})^{−2q}` for `k` above every ground-cluster pole.
    GroundState,
}

/// Moment sum `M_q` together with its logarithm.
///
/// `log_m_q` is authoritative; `m_q` may overflow to `inf` for large `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport<T> {
    pub q: T,
    pub m_q: T,
    pub log_m_q: T,
    pub mode: MomentMode,
}

/// `log Σ exp(t)` over log-terms, compensated when `q` is moderate.
fn log_moment<T: Real>(q: T, log_terms: Vec<T>) -> T {
    if q >= T::lit(LOG_ACCUMULATION_Q) {
        log_sum_exp(&log_terms)
    } else {
        let acc: CompensatedSum<T> = log_terms.into_iter().map(|t| t.exp()).collect();
        acc.value().ln()
    }
}

fn report<T: Real>(q: T, log_m_q: T, mode: MomentMode) -> MomentReport<T> {
    MomentReport {
        q,
        m_q: log_m_q.exp(),
        log_m_q,
        mode,
    }
}

fn check_order<T: Real>(q: T) -> Result<()> {
    if !(q > T::zero() && q.is_finite()) {
        return Err(invalid("q", format!("must be positive, got {q}")));
    }
    Ok(())
}

/// Moment sum `M_q(k, L; v)` in the requested approximation.
pub fn moment_sum<T: Real>(g: &StarGraph<T>, k: T, q: T, mode: MomentMode) -> Result<MomentReport<T>> {
    check_order(q)?;
    let two_q = T::lit(2.0) * q;
    let log_terms: Vec<T> = match mode {
        MomentMode::Exact => {
            check_pole_guard(g, k)?;
            (0..g.v())
                .map(|j| -two_q * (k * g.bond_length(j)).cos().abs().ln())
                .collect()
        }
        MomentMode::PoleApprox => {
            if !(k > T::zero()) {
                return Err(invalid("k", format!("must be positive, got {k}")));
            }
            let pi = T::PI();
            let mut terms = Vec::with_capacity(g.v());
            for j in 0..g.v() {
                let lj = g.bond_length(j);
                let m = (k * lj / pi - T::lit(0.5)).round().max(T::zero()).to_usize().unwrap_or(0);
                let x = ((k - pole(g, m, j)) * lj).abs();
                if x == T::zero() {
                    return Err(Error::Divergence(format!("k = {k} coincides with a pole of bond {j}")));
                }
                terms.push(-two_q * x.ln());
            }
            terms
        }
        MomentMode::GroundState => {
            let mut terms = Vec::with_capacity(g.v());
            for j in 0..g.v() {
                let x = k - pole(g, 0, j);
                if x == T::zero() {
                    return Err(Error::Divergence(format!("k = {k} coincides with a pole of bond {j}")));
                }
                if x < T::zero() {
                    return Err(Error::Domain(format!(
                        "ground-state moments need k above every ground-cluster pole; k = {k} is below bond {j}'s"
                    )));
                }
                terms.push(-two_q * x.ln());
            }
            terms
        }
    };
    Ok(report(q, log_moment(q, log_terms), mode))
}

/// Moment sum after renormalizing a cluster so that pole spacings become
/// `|ℓ_j − ℓ_k|`: `Σ_j |σ + ℓ_j − ℓ_i|^{−2q}`.
///
/// The eigenvalue sits a renormalized distance `σ` above the pole of bond
/// `base_index` (1-based, as in `ℓ_1 … ℓ_v`); `base_index = 0` refers to the
/// unperturbed pole `(m + 1/2)π/L` with `ℓ_0 = 0`, above every pole of the cluster.
pub fn renormalized_moment_sum<T: Real>(ell: &[T], base_index: usize, sigma: T, q: T) -> Result<MomentReport<T>> {
    check_order(q)?;
    if base_index > ell.len() {
        return Err(invalid("base_index", format!("{base_index} exceeds v = {}", ell.len())));
    }
    if !sigma.is_finite() {
        return Err(invalid("sigma", "must be finite"));
    }
    let anchor = if base_index == 0 { T::zero() } else { ell[base_index - 1] };
    let two_q = T::lit(2.0) * q;
    let mut terms = Vec::with_capacity(ell.len());
    for (j, &l) in ell.iter().enumerate() {
        let x = (sigma + l - anchor).abs();
        if x == T::zero() {
            return Err(Error::Divergence(format!("renormalized distance to bond {} vanishes", j + 1)));
        }
        terms.push(-two_q * x.ln());
    }
    Ok(report(q, log_moment(q, terms), MomentMode::PoleApprox))
}

/// `log(support size)` when every positive weight is identical: then `H_q`
/// is exactly that value for all `q`, free of rounding.
fn flat_entropy<T: Real>(mu: &BondMeasure<T>) -> Option<T> {
    let mut support = mu.weights().iter().filter(|&&w| w > T::zero());
    let first = *support.next()?;
    let mut count = 1usize;
    for &w in support {
        if w != first {
            return None;
        }
        count += 1;
    }
    Some(T::from_count(count).ln())
}

/// Shannon entropy `−Σ μ log μ`.
pub fn shannon_entropy<T: Real>(mu: &BondMeasure<T>) -> T {
    if let Some(h) = flat_entropy(mu) {
        return h;
    }
    let acc: CompensatedSum<T> = mu
        .weights()
        .iter()
        .filter(|&&w| w > T::zero())
        .map(|&w| -w * w.ln())
        .collect();
    acc.value()
}

/// Renyi entropy `H_q = log(Σ μ_i^q) / (1 − q)`, with the Shannon limit at `q = 1`.
pub fn renyi_entropy<T: Real>(mu: &BondMeasure<T>, q: T) -> Result<T> {
    check_order(q)?;
    if q == T::one() {
        return Ok(shannon_entropy(mu));
    }
    if let Some(h) = flat_entropy(mu) {
        return Ok(h);
    }
    let logs: Vec<T> = mu
        .weights()
        .iter()
        .filter(|&&w| w > T::zero())
        .map(|&w| q * w.ln())
        .collect();
    Ok(log_sum_exp(&logs) / (T::one() - q))
}

/// `(log M_q − q log M_1) / (1 − q)`.
pub fn entropy_from_moments<T: Real>(m_q: &MomentReport<T>, m_1: &MomentReport<T>, q: T) -> Result<T> {
    if m_q.mode != m_1.mode {
        return Err(Error::ModeMismatch(format!("{:?} vs {:?}", m_q.mode, m_1.mode)));
    }
    if q == T::one() {
        return Err(invalid("q", "the moment form is singular at q = 1"));
    }
    Ok((m_q.log_m_q - q * m_1.log_m_q) / (T::one() - q))
}

/// Least-squares slope of `H_q` against `log v`.
pub fn fractal_exponent_estimate<T: Real>(points: &[(usize, T)]) -> Result<T> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 scan points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(invalid("v", "scan points must have strictly increasing v"));
    }
    let n = T::from_count(points.len());
    let xs: Vec<T> = points.iter().map(|p| T::from_count(p.0).ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = xs.iter().zip(points).map(|(&x, p)| (x - mx) * (p.1 - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
