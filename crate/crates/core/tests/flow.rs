use nalgebra::{Matrix2, Vector2};
use phaseflow::flow::*;
use phaseflow::fock::trace_distance_states;
use phaseflow::phasespace::{kolmogorov_distance_states, GaussianComponent, GaussianMixtureState, Ordering};
use phaseflow::qbm::CLParams;
use proptest::prelude::*;

fn params(kt: f64, gamma: f64, cutoff: f64) -> CLParams {
    CLParams::new(1.0, 1.0, gamma, cutoff, kt, 1.0).unwrap()
}

fn pair() -> (GaussianComponent, GaussianComponent) {
    coherent_pair(Vector2::new(4.0 / 2f64.sqrt(), 0.0), 1.0).unwrap()
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 * t_max / n as f64).collect()
}

fn present(s: &[Option<f64>]) -> Vec<f64> {
    s.iter().flatten().copied().collect()
}

fn overlapping_pair(scale: f64) -> (GaussianMixtureState, GaussianMixtureState) {
    let st = |q: f64| {
        let g = GaussianComponent::new(Vector2::new(q, 0.0), Matrix2::identity() * 1.2 * scale).unwrap();
        GaussianMixtureState::single(g, 1.0).unwrap()
    };
    (st(0.75), st(-0.75))
}

#[test]
fn unitary_dynamics_keeps_distances_constant() {
    let (a, b) = pair();
    let s = distance_series((&a, &b), &params(2.0, 0.0, 5.0), &grid(50.0, 50), &DEFAULT_ORDERINGS, &FlowOptions::default())
        .unwrap();
    let spread = |v: &[f64]| v.iter().fold(f64::MIN, |m, x| m.max(*x)) - v.iter().fold(f64::MAX, |m, x| m.min(*x));
    assert!(spread(&s.d_tr) < 2e-4);
    for k in 0..3 {
        let v = present(&s.d_kol[k]);
        assert!(v.is_empty() || spread(&v) < 2e-4);
    }
    // A coherent state stays coherent, so its P function never regularizes.
    assert!(s.kolmogorov(Ordering::P).unwrap().iter().all(Option::is_none));
}

#[test]
fn sandwich_holds_along_low_temperature_dynamics() {
    let (a, b) = pair();
    for (gamma, cutoff) in [(1.0, 1.0), (0.1, 100.0)] {
        let s = distance_series((&a, &b), &params(0.5, gamma, cutoff), &grid(20.0, 80), &DEFAULT_ORDERINGS, &FlowOptions::default())
            .unwrap();
        assert!(s.sandwich_violation() <= 5e-4, "{}", s.sandwich_violation());
        assert!(s.d_tr.iter().all(|d| (0.0..=1.0).contains(d)));
        let p = s.kolmogorov(Ordering::P).unwrap();
        // Absent at t = 0, and wherever the bath squeezes σ below ħ in some direction.
        assert!(p[0].is_none() && p.iter().any(Option::is_some));
    }
}

#[test]
fn high_temperature_closes_the_gap() {
    let (a, b) = pair();
    let s = distance_series((&a, &b), &params(20.0, 1.0, 1.0), &grid(20.0, 40), &DEFAULT_ORDERINGS, &FlowOptions::default())
        .unwrap();
    let w = s.kolmogorov(Ordering::WIGNER).unwrap();
    let gap = s.d_tr.iter().zip(w).map(|(t, w)| (t - w.unwrap()).abs()).fold(0.0, f64::max);
    assert!(gap <= 0.02, "{gap}");
}

#[test]
fn weak_coupling_scaling_limit_has_little_backflow() {
    let (a, b) = pair();
    let s = distance_series((&a, &b), &params(20.0, 0.1, 100.0), &grid(50.0, 500), &[], &FlowOptions::default()).unwrap();
    let n = nonmarkovianity(&s.d_tr).unwrap();
    assert!(n <= 1e-3, "{n}");
}

#[test]
fn backflow_is_stable_under_grid_refinement() {
    let (a, b) = pair();
    let p = params(2.0, 0.5, 1.0);
    let opts = FlowOptions::default();
    let coarse = distance_series((&a, &b), &p, &grid(250.0, 1000), &[], &opts).unwrap();
    let fine = distance_series((&a, &b), &p, &grid(250.0, 2000), &[], &opts).unwrap();
    let (nc, nf) = (nonmarkovianity(&coarse.d_tr).unwrap(), nonmarkovianity(&fine.d_tr).unwrap());
    assert!(nf > 0.05);
    assert!((nc - nf).abs() < 0.05 * nf, "{nc} vs {nf}");
}

#[test]
fn series_nodes_match_direct_evaluation() {
    let (a, b) = pair();
    let p = params(2.0, 1.0, 100.0);
    let t = [0.0, 0.7, 3.1];
    let s = distance_series((&a, &b), &p, &t, &[Ordering::WIGNER], &FlowOptions::default()).unwrap();
    for (i, &ti) in t.iter().enumerate() {
        let ea = phaseflow::qbm::evolve_state(&a, ti, &p).unwrap();
        let eb = phaseflow::qbm::evolve_state(&b, ti, &p).unwrap();
        let sa = GaussianMixtureState::single(ea, 1.0).unwrap();
        let sb = GaussianMixtureState::single(eb, 1.0).unwrap();
        let tr = trace_distance_states(&sa, &sb, &Default::default()).unwrap().value;
        let w = kolmogorov_distance_states(&sa, &sb, Ordering::WIGNER, &Default::default()).unwrap();
        assert!((s.d_tr[i] - tr).abs() < 1e-12);
        assert!((s.d_kol[0][i].unwrap() - w).abs() < 1e-12);
    }
}

#[test]
fn optimal_ordering_agrees_with_dense_sweep() {
    let (a, b) = overlapping_pair(1.0);
    let opts = FlowOptions::default();
    let r = optimal_ordering(&a, &b, DEFAULT_TOL_S, &opts).unwrap();
    assert_eq!(r.boundary, None);
    assert!(r.monotone);
    let d_tr = trace_distance_states(&a, &b, &opts.fock).unwrap().value;
    let f = |s: f64| kolmogorov_distance_states(&a, &b, Ordering::new(s).unwrap(), &opts.kolmogorov).unwrap() - d_tr;
    let oracle = (0..=200)
        .map(|k| -1.0 + 0.01 * k as f64)
        .find(|s| f(*s) > 0.0)
        .expect("sign change");
    assert!((r.s.value() - oracle).abs() <= 0.02, "{} vs {oracle}", r.s.value());
    assert!(f(r.s.value() - 0.05) < 0.0 && f(r.s.value() + 0.05) > 0.0);
}

#[test]
fn far_separated_mixtures_hit_the_boundary() {
    let mix = |q: f64| {
        let g1 = GaussianComponent::new(Vector2::new(q, 1.0), Matrix2::identity() * 1.5).unwrap();
        let g2 = GaussianComponent::new(Vector2::new(q, -1.0), Matrix2::new(1.3, 0.2, 0.2, 1.6)).unwrap();
        GaussianMixtureState::new(vec![(0.5, g1), (0.5, g2)], 1.0).unwrap()
    };
    let r = optimal_ordering(&mix(-20.0), &mix(20.0), DEFAULT_TOL_S, &FlowOptions::default()).unwrap();
    assert!(r.boundary.is_some());
    assert!(r.audit.iter().all(|f| f.abs() < 2e-4));
}

#[test]
fn classical_limit_probe_closes_the_gap() {
    let (a, b) = overlapping_pair(1.0);
    let opts = FlowOptions::default();
    let rows = classical_limit_probe(&a, &b, &[1.0, 10.0, 100.0], &opts).unwrap();
    let d_tr = trace_distance_states(&a, &b, &opts.fock).unwrap().value;
    let direct = PROBE_ORDERINGS
        .iter()
        .map(|s| (kolmogorov_distance_states(&a, &b, *s, &opts.kolmogorov).unwrap() - d_tr).abs())
        .fold(0.0, f64::max);
    assert!((rows[0].gap - direct).abs() < 1e-12);
    assert!(rows[2].gap <= 5e-3, "{}", rows[2].gap);
    assert!(rows[2].gap <= rows[1].gap && rows[1].gap <= rows[0].gap + 2e-4);
}

#[test]
fn kolmogorov_distance_is_monotone_in_ordering_along_dynamics() {
    let (a, b) = pair();
    let orders: Vec<Ordering> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|s| Ordering::new(*s).unwrap()).collect();
    let s = distance_series((&a, &b), &params(0.5, 1.0, 1.0), &grid(10.0, 20), &orders, &FlowOptions::default()).unwrap();
    for i in 0..s.len() {
        let col: Vec<f64> = s.d_kol.iter().filter_map(|c| c[i]).collect();
        assert!(col.windows(2).all(|w| w[1] >= w[0] - 2e-4), "{col:?}");
    }
}

proptest! {
    #[test]
    fn backflow_vanishes_exactly_for_nonincreasing_series(steps in prop::collection::vec(0.0..0.1f64, 1..40), start in 0.5..1.0f64) {
        let series: Vec<f64> = std::iter::once(start).chain(steps.iter().scan(start, |d, s| { *d -= s; Some(*d) })).collect();
        prop_assert_eq!(nonmarkovianity(&series).unwrap(), 0.0);
    }

    #[test]
    fn any_rise_gives_positive_backflow(values in prop::collection::vec(0.0..1.0f64, 2..40)) {
        let n = nonmarkovianity(&values).unwrap();
        let rises = values.windows(2).any(|w| w[1] > w[0]);
        prop_assert_eq!(n > 0.0, rises);
    }

    #[test]
    fn decreasing_tail_does_not_change_backflow(values in prop::collection::vec(0.0..1.0f64, 2..30), tail in prop::collection::vec(1e-3..0.1f64, 1..10)) {
        let mut extended = values.clone();
        let mut last = *values.last().unwrap();
        for t in tail {
            last -= t;
            extended.push(last);
        }
        prop_assert_eq!(nonmarkovianity(&values).unwrap(), nonmarkovianity(&extended).unwrap());
    }
}
