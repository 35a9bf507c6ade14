use proptest::prelude::*;
use stargraph::measure::{moment_sum, MomentMode};
use stargraph::{
    entropy_from_moments, measure_at, renyi_entropy, shannon_entropy, BondFamily, BondMeasure, StarGraph,
};
use std::f64::consts::PI;

fn family_strategy() -> impl Strategy<Value = BondFamily<f64>> {
    prop_oneof![
        (1u32..6).prop_map(|n| BondFamily::PowerLaw { n }),
        Just(BondFamily::Integer),
        (0.1f64..2.0).prop_map(|delta| BondFamily::ShiftedPower { delta }),
        (0.5f64..4.0).prop_map(|d| BondFamily::LatticeNorms { d }),
    ]
}

/// A graph and a wavenumber kept away from every pole.
fn graph_and_k() -> impl Strategy<Value = (StarGraph<f64>, f64)> {
    (family_strategy(), 1usize..60, 0.5f64..2.0, 0.0f64..0.05, 0.1f64..30.0).prop_filter_map(
        "k too close to a pole",
        |(family, v, base, eps, k)| {
            let g = StarGraph::new(family, v, base, eps, 0.0).ok()?;
            let clear = g.bond_lengths().iter().all(|&l| {
                let x = k * l / PI - 0.5;
                (x - x.round()).abs() > 1e-6
            });
            clear.then_some((g, k))
        },
    )
}

proptest! {
    #[test]
    fn lengths_sorted_positive(family in family_strategy(), v in 1usize..300) {
        let ell = family.lengths(v).unwrap();
        prop_assert_eq!(ell.len(), v);
        prop_assert!(ell.iter().all(|&l| l > 0.0 && l.is_finite()));
        prop_assert!(ell.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn measure_normalized((g, k) in graph_and_k()) {
        let mu = measure_at(&g, k).unwrap();
        let total: f64 = mu.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(mu.weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn moment_composition_matches_renyi((g, k) in graph_and_k(), q in 0.1f64..6.0) {
        prop_assume!((q - 1.0).abs() > 1e-3);
        let mq = moment_sum(&g, k, q, MomentMode::Exact).unwrap();
        let m1 = moment_sum(&g, k, 1.0, MomentMode::Exact).unwrap();
        let h_moments = entropy_from_moments(&mq, &m1, q).unwrap();
        let h_measure = renyi_entropy(&measure_at(&g, k).unwrap(), q).unwrap();
        prop_assert!((h_moments - h_measure).abs() <= 1e-10 * (1.0 + h_measure.abs()),
            "{} vs {}", h_moments, h_measure);
    }

    #[test]
    fn renyi_nonincreasing_and_bounded(w in prop::collection::vec(0.0f64..1.0, 1..40), q1 in 0.05f64..8.0, dq in 0.01f64..4.0) {
        prop_assume!(w.iter().any(|&x| x > 1e-6));
        let mu = BondMeasure::from_weights(w).unwrap();
        let h1 = renyi_entropy(&mu, q1).unwrap();
        let h2 = renyi_entropy(&mu, q1 + dq).unwrap();
        prop_assert!(h2 <= h1 + 1e-12);
        let log_v = (mu.len() as f64).ln();
        prop_assert!(h1 >= -1e-12 && h1 <= log_v + 1e-12);
    }

    #[test]
    fn shannon_is_the_q_to_one_limit(w in prop::collection::vec(0.01f64..1.0, 2..40)) {
        let mu = BondMeasure::from_weights(w).unwrap();
        let h = shannon_entropy(&mu);
        let below = renyi_entropy(&mu, 1.0 - 1e-6).unwrap();
        let above = renyi_entropy(&mu, 1.0 + 1e-6).unwrap();
        prop_assert!(below >= h - 1e-9 && above <= h + 1e-9);
        prop_assert!((below - h).abs() < 1e-5 && (above - h).abs() < 1e-5);
    }

    #[test]
    fn uniform_measure_gives_log_v(v in 1usize..500) {
        let mu = BondMeasure::<f64>::uniform(v).unwrap();
        for q in [0.5, 2.0, 5.0] {
            prop_assert!((renyi_entropy(&mu, q).unwrap() - (v as f64).ln()).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_precision_tracks_double((g, k) in graph_and_k()) {
        let g32 = StarGraph::<f32>::from_lengths(
            g.ell().iter().map(|&l| l as f32).collect(),
            g.base_length() as f32,
            g.epsilon() as f32,
            0.0,
        ).unwrap();
        let clear = g32.bond_lengths().iter().all(|&l| {
            let x = (k as f32) * l / std::f32::consts::PI - 0.5;
            (x - x.round()).abs() > 1e-2
        });
        prop_assume!(clear);
        let h64 = renyi_entropy(&measure_at(&g, k).unwrap(), 2.0).unwrap();
        let h32 = renyi_entropy(&measure_at(&g32, k as f32).unwrap(), 2.0).unwrap();
        prop_assert!((h64 - h32 as f64).abs() < 1e-2 * (1.0 + h64));
    }
}

#[test]
fn amplitude_is_the_normalized_peak_at_eigenvalues() {
    // ψ_j(x) = cos(k(x − L_j))/cos(kL_j) has |ψ_j|² peak sec²(kL_j) and
    // ∫|ψ_j|² = sec²(kL_j)(L_j/2 + sin(2kL_j)/(4k)); the sine terms sum to
    // Z(k)/(2k) = 0 at a Neumann eigenvalue, so A_i is the exact peak
    let g = StarGraph::new(BondFamily::Integer, 7, 1.0, 0.05, 0.0).unwrap();
    let lengths = g.bond_lengths();
    for e in stargraph::solve_spectrum(&g, 0.1, 12.0).unwrap() {
        let k: f64 = e.k;
        let norm: f64 = lengths
            .iter()
            .map(|&l| (l / 2.0 + (2.0 * k * l).sin() / (4.0 * k)) / (k * l).cos().powi(2))
            .sum();
        for (i, &l) in lengths.iter().enumerate() {
            let peak = 1.0 / (k * l).cos().powi(2) / norm;
            let a = stargraph::amplitude(&g, k, i).unwrap();
            assert!((a - peak).abs() <= 1e-9 * peak, "k = {k}, bond {i}: {a} vs {peak}");
        }
    }
}
