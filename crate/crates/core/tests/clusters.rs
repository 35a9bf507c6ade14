use stargraph::measure::{moment_sum, MomentMode};
use stargraph::spectrum::{first_eigenvalue_in_window, pole};
use stargraph::{cluster_decompose, sigma_sequence, solve_spectrum, BondFamily, ScanSchedule, StarGraph};
use std::f64::consts::PI;

#[test]
fn poles_shift_linearly_in_epsilon() {
    // s_{m,j} = (m+½)π/(L+εℓ_j) = (m+½)π/L · (1 − εℓ_j/L + O(ε²))
    let g = StarGraph::new(BondFamily::PowerLaw { n: 2 }, 50, 1.3, 1e-6, 0.0).unwrap();
    for m in [0usize, 5, 40] {
        for j in [0usize, 10, 49] {
            let base = (m as f64 + 0.5) * PI / 1.3;
            let shift = base - pole(&g, m, j);
            let first_order = base * 1e-6 * g.ell()[j] / 1.3;
            assert!((shift - first_order).abs() <= 1e-5 * first_order);
        }
    }
}

#[test]
fn pole_gaps_scale_with_length_gaps() {
    // s_{m,i} − s_{m,j} ≈ (m+½)π ε (ℓ_j − ℓ_i) / L²
    let (l, eps, m) = (1.0, 1e-7, 30usize);
    let g = StarGraph::new(BondFamily::Integer, 20, l, eps, 0.0).unwrap();
    for (i, j) in [(0usize, 1usize), (3, 17), (0, 19)] {
        let gap = pole(&g, m, i) - pole(&g, m, j);
        let want = (m as f64 + 0.5) * PI * eps * (g.ell()[j] - g.ell()[i]) / (l * l);
        assert!((gap - want).abs() <= 1e-4 * want);
    }
}

#[test]
fn one_eigenvalue_per_gap_inside_clusters() {
    let g = StarGraph::new(BondFamily::PowerLaw { n: 3 }, 12, 1.0, 1e-3, 0.5).unwrap();
    let eig = solve_spectrum(&g, 1e-6, 20.0 * PI).unwrap();
    let clusters = cluster_decompose(&g, &eig).unwrap();
    for c in &clusters {
        assert!(c.eigenvalues.iter().all(|e| e.k > c.window.0 && e.k < c.window.1));
        assert_eq!(c.poles.len(), 12);
        for w in c.poles.windows(2) {
            let inside = c.eigenvalues.iter().filter(|e| e.k > w[0].k && e.k < w[1].k).count();
            assert_eq!(inside, 1);
        }
    }
}

#[test]
fn pole_approximation_tracks_exact_moments() {
    // m ε ℓ_v / L ≤ 1e-3
    let v = 40;
    let m = 10;
    let eps = 1e-3 / (m as f64 * 40f64.sqrt());
    let g = StarGraph::new(BondFamily::PowerLaw { n: 2 }, v, 1.0, eps, 0.0).unwrap();
    let e = first_eigenvalue_in_window(&g, m).unwrap();
    for q in [0.5, 1.0, 2.0, 4.0] {
        let exact = moment_sum(&g, e.k, q, MomentMode::Exact).unwrap().log_m_q;
        let approx = moment_sum(&g, e.k, q, MomentMode::PoleApprox).unwrap().log_m_q;
        assert!(((exact - approx) / exact).abs() <= 1e-2, "q = {q}: {exact} vs {approx}");
    }
}

#[test]
fn sigma_scan_stays_positive() {
    let family = BondFamily::PowerLaw { n: 3 };
    let schedule = ScanSchedule::default_for(&family);
    let pts = sigma_sequence(&family, 1.0, 0.0, &[4, 5, 6, 8, 10], &schedule).unwrap();
    assert_eq!(pts.len(), 5);
    for p in &pts {
        assert!(p.sigma > 0.0);
        assert_eq!(p.v, schedule.v_of_m(p.m));
        assert!(p.k > p.m as f64 * PI && p.k < (p.m + 1) as f64 * PI);
    }
    assert!(pts.windows(2).all(|w| w[1].running_min <= w[0].running_min));
}
