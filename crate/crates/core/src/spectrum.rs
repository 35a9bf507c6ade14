//! Poles and roots of the spectral equation `Σ_j tan(k L_j) = c / k`, with
//! `c = 1/α`, and their organization into clusters around `(m + 1/2)π/L`.
//!
//! On every open interval between consecutive poles the secular function
//! `k ↦ Σ tan(k L_j) − c/k` increases strictly from `−∞` to `+∞` when `c ≥ 0`,
//! so each such interval holds exactly one eigenvalue. Negative couplings lose
//! this guarantee and are handled by a dense sign scan.

use crate::error::{invalid, Error, Result};
use crate::graph::{BondFamily, StarGraph};
use crate::root::{bracketed_root, RootOptions};
use crate::scalar::Real;

/// Phase distance from `π/2 (mod π)` below which `tan` is treated as singular.
pub const POLE_GUARD: f64 = 1e-12;

/// Relative merge tolerance for coincident poles.
pub const MERGE_REL_TOL: f64 = 1e-12;

/// `(m + 1/2)π / L_j` for bond `j` (0-based).
#[inline]
pub fn pole<T: Real>(g: &StarGraph<T>, m: usize, j: usize) -> T {
    (T::from_count(m) + T::lit(0.5)) * T::PI() / g.bond_length(j)
}

/// A (possibly merged) pole of `Z(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole<T> {
    pub k: T,
    pub m: usize,
    /// 0-based bond index of the representative bond.
    pub bond: usize,
    pub multiplicity: usize,
}

/// Sorted poles in a window of the spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleGrid<T> {
    pub poles: Vec<Pole<T>>,
    pub merge_tolerance: T,
}

impl<T: Real> PoleGrid<T> {
    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn values(&self) -> Vec<T> {
        self.poles.iter().map(|p| p.k).collect()
    }
}

fn merge_tolerance<T: Real>(k_max: T) -> T {
    T::lit(MERGE_REL_TOL) * k_max.max(T::one())
}

fn collect_poles<T: Real>(g: &StarGraph<T>, lo: T, hi: T, inclusive: bool) -> PoleGrid<T> {
    let pi = T::PI();
    let half = T::lit(0.5);
    let mut raw = Vec::new();
    for j in 0..g.v() {
        let lj = g.bond_length(j);
        let first = (lo * lj / pi - half).floor().max(T::zero()).to_usize().unwrap_or(0);
        let mut m = first;
        loop {
            let s = pole(g, m, j);
            let above_lo = if inclusive { s >= lo } else { s > lo };
            let below_hi = if inclusive { s <= hi } else { s < hi };
            if !below_hi && s > hi {
                break;
            }
            if above_lo && below_hi {
                raw.push(Pole {
                    k: s,
                    m,
                    bond: j,
                    multiplicity: 1,
                });
            }
            m += 1;
        }
    }
    raw.sort_by(|a, b| {
        a.k.partial_cmp(&b.k)
            .expect("finite poles")
            .then(b.bond.cmp(&a.bond))
    });
    let tol = merge_tolerance(hi);
    let mut poles: Vec<Pole<T>> = Vec::with_capacity(raw.len());
    for p in raw {
        match poles.last_mut() {
            Some(last) if p.k - last.k <= tol => last.multiplicity += 1,
            _ => poles.push(p),
        }
    }
    PoleGrid {
        poles,
        merge_tolerance: tol,
    }
}

/// All poles `(m + 1/2)π/L_j` strictly inside `(k_min, k_max)`, sorted and merged.
pub fn poles_in_range<T: Real>(g: &StarGraph<T>, k_min: T, k_max: T) -> Result<PoleGrid<T>> {
    if !(k_min >= T::zero() && k_max > k_min && k_max.is_finite()) {
        return Err(invalid("k range", format!("need 0 <= k_min < k_max, got ({k_min}, {k_max})")));
    }
    Ok(collect_poles(g, k_min, k_max, false))
}

/// Phase distance of `k L_j` from the nearest odd multiple of `π/2`.
pub(crate) fn pole_phase_distance<T: Real>(k: T, lj: T) -> T {
    let pi = T::PI();
    let x = k * lj - pi * T::lit(0.5);
    let r = x - (x / pi).round() * pi;
    r.abs()
}

/// `Z(k) = Σ_j tan(k L_j)`.
pub fn spectral_function<T: Real>(g: &StarGraph<T>, k: T) -> Result<T> {
    let guard = T::lit(POLE_GUARD);
    for j in 0..g.v() {
        let lj = g.bond_length(j);
        if pole_phase_distance(k, lj) < guard {
            return Err(Error::PoleProximity {
                k: k.to_f64_lossy(),
                bond: j,
                guard: POLE_GUARD,
            });
        }
    }
    Ok(z_unchecked(g, k))
}

#[inline]
fn z_unchecked<T: Real>(g: &StarGraph<T>, k: T) -> T {
    (0..g.v()).map(|j| (k * g.bond_length(j)).tan()).sum()
}

/// `Z(k) − c/k` without the pole guard.
#[inline]
pub fn secular<T: Real>(g: &StarGraph<T>, k: T) -> T {
    z_unchecked(g, k) - g.coupling_inverse() / k
}

/// `d/dk (Z(k) − c/k) = Σ L_j sec²(k L_j) + c/k²`.
pub fn secular_derivative<T: Real>(g: &StarGraph<T>, k: T) -> T {
    let s: T = (0..g.v())
        .map(|j| {
            let lj = g.bond_length(j);
            let c = (k * lj).cos();
            lj / (c * c)
        })
        .sum();
    s + g.coupling_inverse() / (k * k)
}

/// A root of the spectral equation with its cluster bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue<T> {
    pub k: T,
    /// Cluster index: `k ∈ (mπ/L, (m+1)π/L)`.
    pub m: usize,
    /// Number of cluster-`m` poles above `k` (`s_{m,i+1} < k < s_{m,i}`).
    pub interval_index: usize,
    /// `k` minus the nearest pole.
    pub sigma_raw: T,
    /// `|sigma_raw|·L²/(mε)` for `m ≥ 1`; `k − π/(2L)` for `m = 0`;
    /// `None` when `ε = 0` and `m ≥ 1`.
    pub sigma: Option<T>,
    /// `Z(k) − c/k` at the returned abscissa.
    pub residual: T,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions<T> {
    pub root: RootOptions<T>,
    /// Smallest inset from each pole, relative to the interval width.
    pub guard_rel: T,
    /// Samples per interval for the sign scan used when `c < 0`.
    pub scan_samples: usize,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            root: RootOptions::default(),
            guard_rel: T::lit(1e-9),
            scan_samples: 4096,
        }
    }
}

/// Eigenvalues `k ∈ (k_min, k_max)` of the spectral equation, sorted.
pub fn solve_spectrum<T: Real>(g: &StarGraph<T>, k_min: T, k_max: T) -> Result<Vec<Eigenvalue<T>>> {
    solve_spectrum_with(g, k_min, k_max, &SolverOptions::default())
}

pub fn solve_spectrum_with<T: Real>(
    g: &StarGraph<T>,
    k_min: T,
    k_max: T,
    opts: &SolverOptions<T>,
) -> Result<Vec<Eigenvalue<T>>> {
    if !(k_min >= T::zero() && k_max > k_min && k_max.is_finite()) {
        return Err(invalid("k range", format!("need 0 <= k_min < k_max, got ({k_min}, {k_max})")));
    }
    let breaks = interval_breaks(g, k_min, k_max);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= k_min || a >= k_max {
            continue;
        }
        let roots = if g.coupling_inverse() >= T::zero() {
            root_in_gap(g, a, b, opts)?.into_iter().collect()
        } else {
            roots_by_scan(g, a, b, opts)?
        };
        out.extend(
            roots
                .into_iter()
                .filter(|&k| k > k_min && k < k_max)
                .map(|k| annotate(g, k)),
        );
    }
    Ok(out)
}

/// Interval endpoints covering `(k_min, k_max)`: the pole at or below `k_min`
/// (or 0), every merged pole in between, and the first pole at or above `k_max`.
fn interval_breaks<T: Real>(g: &StarGraph<T>, k_min: T, k_max: T) -> Vec<T> {
    let pi = T::PI();
    let half = T::lit(0.5);
    let mut lower = T::zero();
    let mut upper = T::infinity();
    for j in 0..g.v() {
        let lj = g.bond_length(j);
        let mut m_lo = (k_min * lj / pi - half).floor();
        // adjust for rounding in the floor argument
        while m_lo >= T::zero() && pole(g, m_lo.to_usize().unwrap(), j) > k_min {
            m_lo = m_lo - T::one();
        }
        if m_lo >= T::zero() {
            lower = lower.max(pole(g, m_lo.to_usize().unwrap(), j));
        }
        let mut m_hi = (k_max * lj / pi - half).ceil().max(T::zero()).to_usize().unwrap();
        while m_hi > 0 && pole(g, m_hi - 1, j) >= k_max {
            m_hi -= 1;
        }
        while pole(g, m_hi, j) < k_max {
            m_hi += 1;
        }
        upper = upper.min(pole(g, m_hi, j));
    }
    let grid = collect_poles(g, lower, upper, true);
    let mut breaks = Vec::with_capacity(grid.len() + 1);
    if lower == T::zero() {
        breaks.push(T::zero());
    }
    breaks.extend(grid.poles.iter().map(|p| p.k));
    breaks
}

fn root_in_gap<T: Real>(g: &StarGraph<T>, a: T, b: T, opts: &SolverOptions<T>) -> Result<Option<T>> {
    let c = g.coupling_inverse();
    if a == T::zero() && c == T::zero() {
        // Z > 0 below the first pole; the only root is the trivial k = 0
        return Ok(None);
    }
    let width = b - a;
    let f = |k: T| secular(g, k);
    let floor = min_inset(a, b, opts);
    // shrink the inset geometrically: far from the poles first, then closer
    let mut inset = width * T::lit(0.25);
    loop {
        let lo = a + inset;
        let hi = b - inset;
        if lo < hi && lo > a && hi < b {
            let (flo, fhi) = (f(lo), f(hi));
            if flo < T::zero() && fhi > T::zero() {
                return bracketed_root(f, lo, hi, flo, fhi, opts.root).map(Some);
            }
        }
        if inset <= floor {
            break;
        }
        inset = (inset * T::lit(0.125)).max(floor);
    }
    Err(Error::NonBracketing {
        a: a.to_f64_lossy(),
        b: b.to_f64_lossy(),
    })
}

/// Smallest distance kept from a pole: `guard_rel` of the gap, but never
/// below a few ulps of the abscissa.
fn min_inset<T: Real>(a: T, b: T, opts: &SolverOptions<T>) -> T {
    ((b - a) * opts.guard_rel).max(T::epsilon() * T::lit(4.0) * a.abs().max(b.abs()))
}

fn roots_by_scan<T: Real>(g: &StarGraph<T>, a: T, b: T, opts: &SolverOptions<T>) -> Result<Vec<T>> {
    let n = opts.scan_samples.max(2);
    let width = b - a;
    let inset = min_inset(a, b, opts);
    let f = |k: T| secular(g, k);
    let mut roots = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for i in 0..=n {
        let t = T::from_count(i) / T::from_count(n);
        let x = (a + inset) + (width - inset - inset) * t;
        let fx = f(x);
        if let Some((px, pf)) = prev {
            if pf == T::zero() {
                roots.push(px);
            } else if pf.signum() != fx.signum() && fx != T::zero() {
                roots.push(bracketed_root(f, px, x, pf, fx, opts.root)?);
            }
        }
        prev = Some((x, fx));
    }
    Ok(roots)
}

/// Cluster index `m` with `k ∈ (mπ/L, (m+1)π/L)`.
pub fn cluster_index<T: Real>(g: &StarGraph<T>, k: T) -> usize {
    (k * g.base_length() / T::PI()).floor().max(T::zero()).to_usize().unwrap_or(0)
}

fn nearest_pole<T: Real>(g: &StarGraph<T>, k: T) -> T {
    let pi = T::PI();
    let mut best = T::infinity();
    let mut best_dist = T::infinity();
    for j in 0..g.v() {
        let lj = g.bond_length(j);
        let m = (k * lj / pi - T::lit(0.5)).round().max(T::zero()).to_usize().unwrap_or(0);
        for mm in [m.saturating_sub(1), m, m + 1] {
            let s = pole(g, mm, j);
            let d = (k - s).abs();
            if d < best_dist {
                best_dist = d;
                best = s;
            }
        }
    }
    best
}

fn annotate<T: Real>(g: &StarGraph<T>, k: T) -> Eigenvalue<T> {
    let m = cluster_index(g, k);
    let interval_index = (0..g.v()).filter(|&j| pole(g, m, j) > k).count();
    let sigma_raw = k - nearest_pole(g, k);
    let l = g.base_length();
    let sigma = if m == 0 {
        Some(k - T::PI() / (T::lit(2.0) * l))
    } else if g.epsilon() > T::zero() {
        Some(sigma_raw.abs() * l * l / (T::from_count(m) * g.epsilon()))
    } else {
        None
    };
    Eigenvalue {
        k,
        m,
        interval_index,
        sigma_raw,
        sigma,
        residual: secular(g, k),
    }
}

/// Eigenvalues and poles sharing the window `(mπ/L, (m+1)π/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    pub m: usize,
    pub window: (T, T),
    pub eigenvalues: Vec<Eigenvalue<T>>,
    pub poles: Vec<Pole<T>>,
}

/// Checks that every pole `s_{m,j}` stays within `π/(4L)` of `(m+1/2)π/L`.
pub fn check_cluster_separation<T: Real>(g: &StarGraph<T>, m: usize) -> Result<()> {
    let l = g.base_length();
    let center = (T::from_count(m) + T::lit(0.5)) * T::PI() / l;
    let limit = T::PI() / (T::lit(4.0) * l);
    // the longest bond has the most displaced pole
    let s = pole(g, m, g.v() - 1);
    let dev = (s - center).abs();
    if dev > limit {
        return Err(Error::ClusterOverlap {
            m,
            pole: s.to_f64_lossy(),
            deviation: dev.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Partitions eigenvalues by cluster window; each cluster carries its `v` poles.
pub fn cluster_decompose<T: Real>(g: &StarGraph<T>, eigenvalues: &[Eigenvalue<T>]) -> Result<Vec<Cluster<T>>> {
    let l = g.base_length();
    let pi = T::PI();
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| a.k.partial_cmp(&b.k).expect("finite eigenvalues"));
    for e in sorted {
        let m = cluster_index(g, e.k);
        if clusters.last().map(|c| c.m) != Some(m) {
            check_cluster_separation(g, m)?;
            let mut poles: Vec<Pole<T>> = (0..g.v())
                .rev()
                .map(|j| Pole {
                    k: pole(g, m, j),
                    m,
                    bond: j,
                    multiplicity: 1,
                })
                .collect();
            poles.dedup_by(|b, a| {
                if b.k - a.k <= merge_tolerance(b.k) {
                    a.multiplicity += 1;
                    true
                } else {
                    false
                }
            });
            clusters.push(Cluster {
                m,
                window: (T::from_count(m) * pi / l, T::from_count(m + 1) * pi / l),
                eigenvalues: Vec::new(),
                poles,
            });
        }
        clusters.last_mut().expect("pushed above").eigenvalues.push(e);
    }
    Ok(clusters)
}

/// Smallest eigenvalue of a cluster.
pub fn first_in_cluster<T: Real>(c: &Cluster<T>) -> Result<Eigenvalue<T>> {
    c.eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| a.k.partial_cmp(&b.k).expect("finite eigenvalues"))
        .ok_or(Error::EmptyCluster { m: c.m })
}

/// Couples the number of bonds and the perturbation scale to the cluster index:
/// `v(m) = round(m^p)`, `ε(v) = v^{−a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSchedule<T> {
    pub v_power: T,
    pub eps_exponent: T,
}

/// Largest admissible `(m+1)·ε·ℓ_v`, i.e. `k_max·ε·ℓ_v ≤ 0.1·π/L`.
pub const SEPARATION_LIMIT: f64 = 0.1;

impl<T: Real> ScanSchedule<T> {
    /// `p = n + 1` for power-law families (`p = 2` otherwise) and
    /// `a = g + 1/p + 1/2` with `ℓ_v ≍ v^g`, so `m·ℓ_v·ε → 0`.
    pub fn default_for(family: &BondFamily<T>) -> Self {
        let v_power = match *family {
            BondFamily::PowerLaw { n } => T::from_count(n as usize + 1),
            _ => T::lit(2.0),
        };
        Self {
            v_power,
            eps_exponent: family.growth_exponent() + T::one() / v_power + T::lit(0.5),
        }
    }

    pub fn v_of_m(&self, m: usize) -> usize {
        T::from_count(m).powf(self.v_power).round().to_usize().unwrap_or(usize::MAX).max(1)
    }

    pub fn m_of_v(&self, v: usize) -> usize {
        T::from_count(v).powf(T::one() / self.v_power).round().to_usize().unwrap_or(0).max(1)
    }

    pub fn epsilon_of_v(&self, v: usize) -> T {
        T::from_count(v).powf(-self.eps_exponent)
    }
}

/// `(m+1)·ε·ℓ_v ≤ 0.1`: the clusters up to `m` stay well separated.
pub fn separation_holds<T: Real>(m: usize, epsilon: T, ell_max: T) -> bool {
    T::from_count(m + 1) * epsilon * ell_max <= T::lit(SEPARATION_LIMIT)
}

/// One point of a `σ_m` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPoint<T> {
    pub m: usize,
    pub v: usize,
    pub epsilon: T,
    pub k: T,
    pub sigma: T,
    /// Running minimum of `σ` up to this point.
    pub running_min: T,
}

/// Renormalized offset `σ_m` of the first eigenvalue in each cluster `C_m`
/// along the schedule.
pub fn sigma_sequence<T: Real>(
    family: &BondFamily<T>,
    base_length: T,
    coupling_inverse: T,
    m_values: &[usize],
    schedule: &ScanSchedule<T>,
) -> Result<Vec<SigmaPoint<T>>> {
    let mut out: Vec<SigmaPoint<T>> = Vec::with_capacity(m_values.len());
    for &m in m_values {
        if m == 0 {
            return Err(Error::SigmaUndefined("the renormalization kL²/(mε) needs m >= 1".into()));
        }
        let v = schedule.v_of_m(m);
        if v < 2 {
            return Err(Error::SigmaUndefined(format!("m = {m} gives v = {v}; a single bond has no cluster")));
        }
        let eps = schedule.epsilon_of_v(v);
        let g = StarGraph::new(*family, v, base_length, eps, coupling_inverse)?;
        let e = first_eigenvalue_in_window(&g, m)?;
        let sigma = e
            .sigma
            .ok_or_else(|| Error::SigmaUndefined("epsilon = 0".into()))?;
        let running_min = out.last().map_or(sigma, |p| p.running_min.min(sigma));
        out.push(SigmaPoint {
            m,
            v,
            epsilon: eps,
            k: e.k,
            sigma,
            running_min,
        });
    }
    Ok(out)
}

/// First eigenvalue of cluster `m`, solving only the lowest gaps of the window.
pub fn first_eigenvalue_in_window<T: Real>(g: &StarGraph<T>, m: usize) -> Result<Eigenvalue<T>> {
    if !separation_holds(m, g.epsilon(), g.ell_max()) {
        return Err(Error::ClusterOverlap {
            m,
            pole: pole(g, m, g.v() - 1).to_f64_lossy(),
            deviation: (T::from_count(m + 1) * g.epsilon() * g.ell_max()).to_f64_lossy(),
        });
    }
    let l = g.base_length();
    let lo = T::from_count(m) * T::PI() / l;
    let hi_window = T::from_count(m + 1) * T::PI() / l;
    // poles of cluster m in ascending order: bond v-1 first
    let lowest = pole(g, m, g.v() - 1);
    let tol = merge_tolerance(lowest);
    let next = (0..g.v())
        .rev()
        .map(|j| pole(g, m, j))
        .find(|&s| s - lowest > tol)
        .unwrap_or(hi_window);
    let eig = solve_spectrum(g, lo, next)?;
    eig.into_iter()
        .next()
        .ok_or(Error::EmptyCluster { m })
}
