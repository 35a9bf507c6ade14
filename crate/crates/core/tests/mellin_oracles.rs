use stargraph::graph::IndexFunction;
use stargraph::{
    entropy_asymptotic, mellin_asymptotic_m1, mellin_closed_form, mellin_closed_form_of, mellin_numeric,
    stability_check, BondFamily, LengthFunction,
};

#[test]
fn quadrature_agrees_with_closed_form() {
    for n in 1..=4u32 {
        let family = BondFamily::<f64>::PowerLaw { n };
        for s in [1.5, 2.0, 3.0, 4.0] {
            for v in [100usize, 1000] {
                let f = LengthFunction::new(&family, v, 0).unwrap();
                let quad = mellin_numeric(&f, s, 1e-12).unwrap();
                let exact = mellin_closed_form(n, v, s, 1.0).unwrap();
                let rel = ((quad.value - exact.value) / exact.value).abs();
                assert!(rel <= 1e-8, "n={n} s={s} v={v}: {} vs {}", quad.value, exact.value);
                assert!(quad.est_error <= 1e-12 * quad.value.abs());
                assert!(exact.value > 0.0);
            }
        }
    }
}

#[test]
fn closed_form_matches_brute_force_midpoint() {
    // plain midpoint rule in the original variable, many panels
    let (n, v, s, sigma1) = (3u32, 200usize, 2.5, 1.0);
    let a = 2f64.powf(1.0 / 3.0) - sigma1;
    let b = (v as f64).powf(1.0 / 3.0) - sigma1;
    let panels = 2_000_000;
    let h = (b - a) / panels as f64;
    let mid: f64 = (0..panels)
        .map(|i| {
            let t = a + (i as f64 + 0.5) * h;
            t.powf(-s) * n as f64 * (t + sigma1).powi(n as i32 - 1)
        })
        .sum::<f64>()
        * h;
    let exact = mellin_closed_form(n, v, s, sigma1).unwrap().value;
    assert!(((mid - exact) / exact).abs() < 1e-8);
}

/// `Σ_{j=lo}^{hi} (ℓ_j − shift)^{−2q}` over `ℓ_j = j^{1/n}`.
fn direct(n: u32, lo: usize, hi: usize, shift: f64, q: f64) -> f64 {
    (lo..=hi)
        .map(|j| ((j as f64).powf(1.0 / n as f64) - shift).powf(-2.0 * q))
        .sum()
}

fn ell(n: u32, j: usize) -> f64 {
    (j as f64).powf(1.0 / n as f64)
}

#[test]
fn shifted_sums_are_bracketed() {
    for n in [2u32, 3, 4] {
        for i in [1usize, 3, 10] {
            for q in [0.75, 1.0, 2.0] {
                let v = 5000;
                let gap = ell(n, i + 1) - ell(n, i);
                for frac in [0.1, 0.5, 0.9] {
                    let sigma = frac * gap;
                    let lower = direct(n, i + 3, v, ell(n, i), q);
                    let mid = direct(n, i + 3, v, ell(n, i) + sigma, q);
                    let upper = direct(n, i + 3, v, ell(n, i + 1), q);
                    assert!(lower <= mid && mid <= upper, "n={n} i={i} q={q} σ={sigma}");
                }
            }
        }
    }
}

#[test]
fn integral_sum_sandwich() {
    for n in [1u32, 2, 3, 4] {
        let family = BondFamily::<f64>::PowerLaw { n };
        for i in [0usize, 2, 7] {
            for q in [0.75, 1.0, 2.0, 3.0] {
                let v = 3000;
                let f = LengthFunction::new(&family, v, i).unwrap();
                let integral = mellin_numeric(&f, 2.0 * q, 1e-12).unwrap().value;
                let below = direct(n, i + 3, v, ell(n, i + 1), q);
                let above = direct(n, i + 2, v - 1, ell(n, i + 1), q);
                assert!(below <= integral && integral <= above, "n={n} i={i} q={q}: {below} {integral} {above}");
            }
        }
    }
}

#[test]
fn integer_family_length_function() {
    let f = LengthFunction::new(&BondFamily::<f64>::Integer, 11, 0).unwrap();
    assert!((mellin_numeric(&f, 2.0, 1e-12).unwrap().value - 0.9).abs() < 1e-12);
    let g = LengthFunction::new(&BondFamily::<f64>::Integer, 11, 3).unwrap();
    // support [1, 7] after shifting by ℓ_4 = 4
    assert_eq!(g.support(), (1.0, 7.0));
    assert!((mellin_closed_form_of(&g, 2.0).unwrap().value - 6.0 / 7.0).abs() < 1e-14);
}

#[test]
fn convergent_transform_settles() {
    let values: Vec<f64> = [1e4_f64, 1e6, 1e8, 1e10]
        .iter()
        .map(|&v| mellin_closed_form(3, v as usize, 4.0, 1.0).unwrap().value)
        .collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(diffs.iter().all(|&d| d > 0.0));
    // remainder ~ 3 v^{-1/3}: each factor 100 in v eventually cuts the
    // increment by 100^{1/3}; lower-order terms make early ratios larger
    let target = 100f64.powf(1.0 / 3.0);
    let ratios: Vec<f64> = diffs.windows(2).map(|w| w[0] / w[1]).collect();
    assert!(ratios[0] > ratios[1] && ratios[1] > target);
    assert!(ratios[1] - target < 0.2, "{ratios:?}");
}

#[test]
fn logarithmic_transform_grows_like_log_v() {
    // n = 2, s = 2: 2 log(b/a) + 2(1/a − 1/b) with a = √2 − 1, b = √v − 1
    for v in [1e3_f64, 1e6, 1e9] {
        let value = mellin_closed_form(2, v as usize, 2.0, 1.0).unwrap().value;
        let (a, b) = (2f64.sqrt() - 1.0, v.sqrt() - 1.0);
        let oracle = 2.0 * (b / a).ln() + 2.0 * (1.0 / a - 1.0 / b);
        assert!((value - oracle).abs() < 1e-11 * oracle);
    }
}

#[test]
fn m1_power_growth_for_n3() {
    let v = 1_000_000_000usize;
    let start = std::time::Instant::now();
    let value = mellin_asymptotic_m1(3, v, 0.0).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    let ratio = value / (3.0 * (v as f64).powf(1.0 / 3.0));
    assert!((0.95..=1.05).contains(&ratio), "{ratio}");
}

#[test]
fn m1_logarithmic_case_for_n2() {
    // the O(1) offset 2 log(1/a) + 2/a (a = √2 − 1) decays only like 1/log v;
    // check the exact offset and the monotone approach of value/log v to 1
    let a = 2f64.sqrt() - 1.0;
    let offset = 2.0 * (1.0 / a).ln() + 2.0 / a;
    let mut last = f64::INFINITY;
    for v in [1e4_f64, 1e6, 1e8] {
        let value = mellin_asymptotic_m1(2, v as usize, 0.0).unwrap();
        let b = v.sqrt() - 1.0;
        let oracle = 2.0 * (b / a).ln() + 2.0 * (1.0 / a - 1.0 / b);
        assert!((value - oracle).abs() < 1e-9 * oracle);
        assert!((value - v.ln() - offset).abs() < 5.0 / v.sqrt());
        let ratio = value / v.ln();
        assert!(ratio > 1.0 && ratio < last);
        last = ratio;
    }
}

#[test]
fn m1_matches_custom_length_function() {
    let sigma = 0.1;
    let jfun = IndexFunction { n: 4 };
    let lo = 2f64.powf(0.25);
    let f = LengthFunction::custom(jfun, 5000, 1.0 + sigma, lo, 5000f64.powf(0.25)).unwrap();
    let via_f = mellin_closed_form_of(&f, 2.0).unwrap().value;
    let m1 = mellin_asymptotic_m1(4, 5000, sigma).unwrap();
    assert!(((via_f - m1) / m1).abs() < 1e-10);
}

#[test]
fn stability_ratios_tend_to_one() {
    let r = stability_check(&BondFamily::<f64>::Integer, 2.0, &[10_000, 20_000, 40_000, 80_000]).unwrap();
    assert_eq!(r.plausible, Some(true));
    let r = stability_check(&BondFamily::<f64>::PowerLaw { n: 3 }, 4.0, &[10_000, 100_000, 1_000_000]).unwrap();
    assert_eq!(r.plausible, Some(true));
    assert!(r.ratios.iter().all(|&(_, x)| (x - 1.0).abs() < 1e-3));
    assert!(stability_check(&BondFamily::ShiftedPower { delta: 0.5 }, 2.0, &[100, 200, 300]).is_err());
}

#[test]
fn entropy_asymptotic_follows_direct_sums() {
    // Σ_j (ℓ_j + σ)^{−2q} entropy computed by brute force
    let (n, q, sigma) = (3u32, 2.0, 0.3);
    for v in [1000usize, 10_000, 100_000] {
        let mq = direct(n, 1, v, -sigma, q);
        let m1 = direct(n, 1, v, -sigma, 1.0);
        let h_direct = (mq.ln() - q * m1.ln()) / (1.0 - q);
        let h_mellin = entropy_asymptotic(&BondFamily::<f64>::PowerLaw { n }, q, v, sigma).unwrap();
        assert!((h_direct - h_mellin).abs() < 0.02 * (v as f64).ln(), "v={v}: {h_direct} vs {h_mellin}");
    }
}
