//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

// Kronrod abscissae on [0, 1] (symmetric rule), index 7 is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the 7-point rule living on the odd Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    /// Relative tolerance on the total error estimate.
    pub rel_tol: T,
    /// Absolute floor on the error (useful when the integral is ~0).
    pub abs_tol: T,
    pub max_panels: usize,
}

impl<T: Real> QuadOptions<T> {
    pub fn relative(rel_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol: T::zero(),
            max_panels: 20_000,
        }
    }
}

fn kronrod_panel<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let center = a + half;
    let fc = f(center);
    let mut k = T::lit(WGK[7]) * fc;
    let mut g = T::lit(WG[3]) * fc;
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        k = k + T::lit(WGK[i]) * (f1 + f2);
        if i % 2 == 1 {
            g = g + T::lit(WG[i / 2]) * (f1 + f2);
        }
    }
    let kv = k * half;
    let gv = g * half;
    (kv, (kv - gv).abs())
}

/// Integrates `f` over `[a, b]` by repeatedly halving the panel with the
/// largest error estimate, starting from `initial` equal panels.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    f: F,
    a: T,
    b: T,
    initial: usize,
    opts: QuadOptions<T>,
) -> Result<QuadResult<T>> {
    let n = initial.max(1);
    let edges: Vec<T> = (0..=n)
        .map(|i| a + (b - a) * T::from_count(i) / T::from_count(n))
        .collect();
    integrate_breakpoints(f, &edges, opts)
}

/// Same as [`integrate`] with caller-supplied initial panel edges (sorted).
pub fn integrate_breakpoints<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    edges: &[T],
    opts: QuadOptions<T>,
) -> Result<QuadResult<T>> {
    // (a, b, value, error)
    let mut panels: Vec<(T, T, T, T)> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = kronrod_panel(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    if panels.is_empty() {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            panels: 0,
        });
    }
    loop {
        let total: CompensatedSum<T> = panels.iter().map(|p| p.2).collect();
        let err: T = panels.iter().map(|p| p.3).sum();
        let value = total.value();
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol);
        if err <= target {
            return Ok(QuadResult {
                value,
                error: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= opts.max_panels || !value.is_finite() {
            return Err(Error::QuadratureFailed {
                tol: target.to_f64_lossy(),
                est: err.to_f64_lossy(),
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, p)| if p.3 > be { (i, p.3) } else { (bi, be) });
        let (a, b, _, _) = panels[idx];
        let mid = a + (b - a) * T::lit(0.5);
        if !(mid > a && mid < b) {
            return Err(Error::QuadratureFailed {
                tol: target.to_f64_lossy(),
                est: err.to_f64_lossy(),
            });
        }
        let (v1, e1) = kronrod_panel(&mut f, a, mid);
        let (v2, e2) = kronrod_panel(&mut f, mid, b);
        panels[idx] = (a, mid, v1, e1);
        panels.push((mid, b, v2, e2));
    }
}

/// Geometrically spaced edges on `[a, b]` with `0 < a < b`.
pub fn geometric_edges<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    let ratio = (b / a).ln();
    let mut edges: Vec<T> = (0..=n)
        .map(|i| a * (ratio * T::from_count(i) / T::from_count(n)).exp())
        .collect();
    edges[0] = a;
    edges[n] = b;
    edges
}
