//! Star-graph geometry: bond-length families and the decomposition
//! `L_j = L + ε·ℓ_j`.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Rule generating the nondecreasing perturbation lengths `ℓ_1 ≤ ℓ_2 ≤ …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BondFamily<T> {
    /// `ℓ_j = j^{1/n}`.
    PowerLaw { n: u32 },
    /// `ℓ_j = (v + j)^δ`; depends on the number of bonds `v`.
    ShiftedPower { delta: T },
    /// `ℓ_j = j`.
    Integer,
    /// Sorted values `x² + D·y²` over `(x, y) ∈ ℤ² \ {0}`, with multiplicity.
    LatticeNorms { d: T },
}

impl<T: Real> BondFamily<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BondFamily::PowerLaw { n: 0 } => Err(invalid("n", "power-law exponent must be >= 1")),
            BondFamily::ShiftedPower { delta } if !(delta > T::zero() && delta.is_finite()) => {
                Err(invalid("delta", format!("must be positive, got {delta}")))
            }
            BondFamily::LatticeNorms { d } if !(d > T::zero() && d.is_finite()) => {
                Err(invalid("D", format!("must be positive, got {d}")))
            }
            _ => Ok(()),
        }
    }

    /// First `v` perturbation lengths, sorted nondecreasing.
    pub fn lengths(&self, v: usize) -> Result<Vec<T>> {
        self.validate()?;
        let ell = match *self {
            BondFamily::PowerLaw { n } => {
                let inv = T::one() / T::from_count(n as usize);
                (1..=v).map(|j| T::from_count(j).powf(inv)).collect()
            }
            BondFamily::ShiftedPower { delta } => {
                let vt = T::from_count(v);
                (1..=v).map(|j| (vt + T::from_count(j)).powf(delta)).collect()
            }
            BondFamily::Integer => (1..=v).map(T::from_count).collect(),
            BondFamily::LatticeNorms { d } => lattice_norms(d, v),
        };
        Ok(ell)
    }

    /// Smooth interpolating index function `𝔧` with `𝔧(ℓ_j) = j`, when the
    /// family has one.
    pub fn index_inverse(&self) -> Result<IndexFunction> {
        match *self {
            BondFamily::PowerLaw { n } if n >= 1 => Ok(IndexFunction { n }),
            BondFamily::Integer => Ok(IndexFunction { n: 1 }),
            BondFamily::PowerLaw { .. } => Err(invalid("n", "power-law exponent must be >= 1")),
            BondFamily::ShiftedPower { .. } => Err(Error::UnsupportedFamily(
                "shifted power lengths have no v-independent index function".into(),
            )),
            BondFamily::LatticeNorms { .. } => Err(Error::UnsupportedFamily(
                "lattice norm lengths have no smooth index function".into(),
            )),
        }
    }

    /// Growth exponent `g` with `ℓ_v ≍ v^g`.
    pub fn growth_exponent(&self) -> T {
        match *self {
            BondFamily::PowerLaw { n } => T::one() / T::from_count(n.max(1) as usize),
            BondFamily::ShiftedPower { delta } => delta,
            BondFamily::Integer | BondFamily::LatticeNorms { .. } => T::one(),
        }
    }
}

/// `𝔧(t) = tⁿ`; `n = 1` for the integer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexFunction {
    pub n: u32,
}

impl IndexFunction {
    pub fn value<T: Real>(&self, t: T) -> T {
        t.powi(self.n as i32)
    }

    pub fn derivative<T: Real>(&self, t: T) -> T {
        match self.n {
            1 => T::one(),
            n => T::from_count(n as usize) * t.powi(n as i32 - 1),
        }
    }

    /// `𝔧⁻¹(j) = j^{1/n}`.
    pub fn inverse<T: Real>(&self, j: T) -> T {
        match self.n {
            1 => j,
            n => j.powf(T::one() / T::from_count(n as usize)),
        }
    }
}

/// Enumerates `x² + D·y²` over the punctured lattice in increasing order and
/// keeps the first `v` values. Ties keep enumeration order.
fn lattice_norms<T: Real>(d: T, v: usize) -> Vec<T> {
    if v == 0 {
        return Vec::new();
    }
    // area of {Q <= r2} is pi*r2/sqrt(D); start near the expected radius
    let mut r2 = (T::lit(2.0) * T::from_count(v) * d.sqrt() / T::PI()).max(T::lit(4.0));
    loop {
        let mut values = Vec::new();
        let xmax = r2.sqrt().floor().to_i64().unwrap_or(0);
        let ymax = (r2 / d).sqrt().floor().to_i64().unwrap_or(0);
        for x in -xmax..=xmax {
            for y in -ymax..=ymax {
                if x == 0 && y == 0 {
                    continue;
                }
                let xt = T::from_i64(x).unwrap();
                let yt = T::from_i64(y).unwrap();
                let q = xt * xt + d * yt * yt;
                if q <= r2 {
                    values.push(q);
                }
            }
        }
        if values.len() >= v {
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite norms"));
            values.truncate(v);
            return values;
        }
        r2 = r2 * T::lit(2.0);
    }
}

/// Star graph with bond lengths `L_j = L + ε·ℓ_j`, sorted by increasing length.
#[derive(Debug, Clone, PartialEq)]
pub struct StarGraph<T> {
    base_length: T,
    epsilon: T,
    ell: Vec<T>,
    coupling_inverse: T,
    family: Option<BondFamily<T>>,
}

impl<T: Real> StarGraph<T> {
    /// Builds the graph from the first `v` lengths of `family`.
    pub fn new(family: BondFamily<T>, v: usize, base_length: T, epsilon: T, coupling_inverse: T) -> Result<Self> {
        if v == 0 {
            return Err(invalid("v", "a star graph needs at least one bond"));
        }
        let ell = family.lengths(v)?;
        let mut g = Self::from_lengths(ell, base_length, epsilon, coupling_inverse)?;
        g.family = Some(family);
        Ok(g)
    }

    /// Builds a graph from explicit perturbation lengths (sorted nondecreasing, positive).
    pub fn from_lengths(ell: Vec<T>, base_length: T, epsilon: T, coupling_inverse: T) -> Result<Self> {
        if ell.is_empty() {
            return Err(invalid("v", "a star graph needs at least one bond"));
        }
        if !(base_length > T::zero() && base_length.is_finite()) {
            return Err(invalid("L", format!("must be positive, got {base_length}")));
        }
        if !(epsilon >= T::zero() && epsilon.is_finite()) {
            return Err(invalid("epsilon", format!("must be nonnegative, got {epsilon}")));
        }
        if !coupling_inverse.is_finite() {
            return Err(invalid("coupling_inverse", "must be finite"));
        }
        if ell.iter().any(|&l| !(l > T::zero() && l.is_finite())) {
            return Err(invalid("ell", "perturbation lengths must be positive and finite"));
        }
        if ell.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("ell", "perturbation lengths must be sorted nondecreasing"));
        }
        Ok(Self {
            base_length,
            epsilon,
            ell,
            coupling_inverse,
            family: None,
        })
    }

    pub fn v(&self) -> usize {
        self.ell.len()
    }

    pub fn base_length(&self) -> T {
        self.base_length
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn coupling_inverse(&self) -> T {
        self.coupling_inverse
    }

    pub fn ell(&self) -> &[T] {
        &self.ell
    }

    pub fn family(&self) -> Option<&BondFamily<T>> {
        self.family.as_ref()
    }

    /// `ℓ_v`, the largest perturbation length.
    pub fn ell_max(&self) -> T {
        *self.ell.last().expect("nonempty")
    }

    /// Length of bond `j` (0-based).
    #[inline]
    pub fn bond_length(&self, j: usize) -> T {
        self.base_length + self.epsilon * self.ell[j]
    }

    /// `[L + ε·ℓ_j]` for all bonds.
    pub fn bond_lengths(&self) -> Vec<T> {
        (0..self.v()).map(|j| self.bond_length(j)).collect()
    }

    /// Same geometry with a different coupling.
    pub fn with_coupling_inverse(&self, coupling_inverse: T) -> Self {
        Self {
            coupling_inverse,
            ..self.clone()
        }
    }
}
