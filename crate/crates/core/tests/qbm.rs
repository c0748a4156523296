use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use phaseflow::phasespace::{sym_eigenvalues, GaussianComponent};
use phaseflow::qbm::*;
use proptest::prelude::*;

fn params(kt: f64, gamma: f64, cutoff: f64) -> CLParams {
    CLParams::new(1.0, 1.0, gamma, cutoff, kt, 1.0).unwrap()
}

const REGIMES: [(f64, f64); 4] = [(1.0, 100.0), (0.1, 100.0), (1.0, 1.0), (0.1, 1.0)];

#[test]
fn residue_form_matches_volterra_oracle() {
    let grid: Vec<f64> = (0..=500).map(|k| k as f64 * 0.1).collect();
    for (gamma, cutoff) in REGIMES {
        let p = params(1.0, gamma, cutoff);
        let gf = GreensFunction::new(&p).unwrap();
        let oracle = greens_function_volterra_oracle(&p, &grid, default_oracle_step(&p)).unwrap();
        let worst = grid.iter().zip(&oracle).map(|(t, g)| (gf.g(*t) - g).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-6, "γ={gamma} Ω={cutoff}: sup deviation {worst:e}");
    }
}

#[test]
fn volterra_oracle_converges() {
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.5).collect();
    for (gamma, cutoff) in [(1.0, 1.0), (0.1, 1.0)] {
        let p = params(1.0, gamma, cutoff);
        let h = default_oracle_step(&p);
        let a = greens_function_volterra_oracle(&p, &grid, h).unwrap();
        let b = greens_function_volterra_oracle(&p, &grid, h / 2.0).unwrap();
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-7, "{worst:e}");
    }
}

#[test]
fn scaling_limit_is_markovian() {
    // Ω ≫ ω₀: the memory kernel acts like 2γ δ(t) and G approaches the
    // damped oscillator e^{−γt} sin(ω̄t)/ω̄ with ω̄² = ω₀² − γ².
    let p = params(1.0, 0.1, 100.0);
    let gf = GreensFunction::new(&p).unwrap();
    let wbar = (1.0f64 - 0.01).sqrt();
    let worst = (0..=500)
        .map(|k| k as f64 * 0.1)
        .map(|t| (gf.g(t) - (-0.1 * t).exp() * (wbar * t).sin() / wbar).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn noise_kernel_basic_properties() {
    let p = params(1.5, 0.4, 3.0);
    for tau in [0.1, 0.7, 2.3] {
        let a = noise_kernel(tau, &p, 300.0).unwrap();
        let b = noise_kernel(-tau, &p, 300.0).unwrap();
        assert_eq!(a, b);
    }
    for (kt, gamma, cutoff) in [(0.0, 0.1, 1.0), (0.5, 1.0, 100.0), (20.0, 0.1, 1.0)] {
        let v = noise_kernel(0.0, &params(kt, gamma, cutoff), 1000.0 * cutoff.max(1.0)).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}

#[test]
fn noise_kernel_series_matches_quadrature() {
    // The spectrum falls off as K/ω, so the piece beyond the cutoff W is
    // K·∫_W^∞ cos(ωτ)/ω dω = −K·Ci(Wτ), added here from its asymptotic series.
    let p = params(1.0, 0.5, 2.0);
    let w: f64 = 4000.0;
    let k = noise_spectrum(1e7, &p) * 1e7;
    for tau in [0.5, 1.0, 3.0] {
        let x = w * tau;
        let tail = k * (-x.sin() / x + x.cos() / (x * x) + 2.0 * x.sin() / x.powi(3));
        let series = noise_kernel_series(tau, &p).unwrap();
        let quad = noise_kernel(tau, &p, w).unwrap() + tail;
        assert!((series - quad).abs() < 1e-7 * series.abs().max(1e-2), "τ={tau}: {series} vs {quad}");
    }
}

#[test]
fn noise_kernel_high_temperature_limit() {
    let p = params(20.0, 0.1, 1.0);
    for k in 0..=30 {
        let tau = k as f64 * 0.1;
        let classical = 2.0 * p.m0 * p.gamma * p.kt * p.cutoff / p.hbar * (-p.cutoff * tau).exp();
        let v = if tau == 0.0 { noise_kernel(0.0, &p, 100.0).unwrap() } else { noise_kernel_series(tau, &p).unwrap() };
        assert!((v - classical).abs() <= 0.03 * classical, "τ={tau}: {v} vs {classical}");
    }
}

/// `I_GG(t)` from a plain trapezoidal sum over frequency, written out
/// independently of the library's integrators.
fn igg_by_trapezoid(p: &CLParams, t: f64) -> f64 {
    let gf = GreensFunction::new(p).unwrap();
    let (z, r) = (gf.poles(), gf.residues());
    let h = 0.002;
    let top = 3000.0;
    let n = (top / h) as usize;
    let mut acc = 0.0;
    for k in 0..=n {
        let w = k as f64 * h;
        let mut a = num_complex::Complex64::default();
        for j in 0..3 {
            let s = z[j] + num_complex::Complex64::new(0.0, w);
            a += r[j] * ((s * t).exp() - 1.0) / s;
        }
        let x = p.hbar * w / (2.0 * p.kt);
        let coth = if x < 1e-8 { 1.0 / x } else { 1.0 / x.tanh() };
        let density = if w == 0.0 {
            2.0 * p.m0 * p.gamma / PI * 2.0 * p.kt / p.hbar
        } else {
            2.0 * p.m0 * p.gamma / PI * w * p.cutoff.powi(2) / (p.cutoff.powi(2) + w * w) * coth
        };
        let weight = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += weight * density * a.norm_sqr();
    }
    acc * h
}

#[test]
fn noise_integrals_match_independent_frequency_sum() {
    for (kt, gamma, cutoff, t) in [(1.0, 0.5, 1.0, 3.0), (0.3, 1.0, 1.0, 6.0), (4.0, 0.1, 5.0, 2.0)] {
        let p = params(kt, gamma, cutoff);
        let i = Propagator::new(&p).unwrap().noise_integrals(t).unwrap();
        let oracle = igg_by_trapezoid(&p, t);
        assert!((i.gg - oracle).abs() < 1e-6 * oracle, "{kt} {gamma} {cutoff}: {} vs {oracle}", i.gg);
    }
}

#[test]
fn series_and_quadrature_routes_agree() {
    for (kt, gamma, cutoff, t) in [(1.0, 0.5, 1.0, 3.0), (20.0, 1.0, 100.0, 0.5), (2.0, 1.0, 1.0, 30.0)] {
        let p = params(kt, gamma, cutoff);
        let prop = Propagator::new(&p).unwrap();
        let a = prop.noise_integrals(t).unwrap();
        let b = noise_integrals_quadrature(&p, prop.greens(), t, None).unwrap();
        let scale = a.gg.abs().max(a.dd.abs());
        for (x, y) in [(a.gg, b.gg), (a.dd, b.dd), (a.gd, b.gd)] {
            assert!((x - y).abs() < 1e-8 * scale, "{x} vs {y}");
        }
    }
}

#[test]
fn resonant_cutoff_is_handled() {
    // Ω = ν₁ = 2πkT/ħ puts a Matsubara pole on the Drude pole.
    let kt = 1.0 / (2.0 * PI);
    let p = params(kt, 0.5, 1.0);
    let near = params(kt * (1.0 + 1e-3), 0.5, 1.0);
    let a = Propagator::new(&p).unwrap().noise_integrals(4.0).unwrap();
    let b = Propagator::new(&near).unwrap().noise_integrals(4.0).unwrap();
    assert!((a.gg - b.gg).abs() < 1e-2 * a.gg);
    let q = noise_integrals_quadrature(&p, Propagator::new(&p).unwrap().greens(), 4.0, None).unwrap();
    assert!((a.gg - q.gg).abs() < 1e-7 * a.gg, "{} vs {}", a.gg, q.gg);
}

#[test]
fn equipartition_at_high_temperature() {
    let p = params(20.0, 0.1, 100.0);
    let g = GaussianComponent::coherent(Vector2::new(2.0, 0.0), 1.0).unwrap();
    let s = evolve_state(&g, 400.0, &p).unwrap();
    let (lo, hi) = sym_eigenvalues(&s.sigma());
    let target = 2.0 * p.kt / p.omega0;
    assert!((lo - target).abs() < 0.05 * target && (hi - target).abs() < 0.05 * target, "{lo} {hi}");
}

#[test]
fn undamped_dynamics_is_a_group() {
    let p = params(2.0, 0.0, 5.0);
    let g = GaussianComponent::new(Vector2::new(1.0, -0.5), Matrix2::new(2.0, 0.3, 0.3, 0.8)).unwrap();
    let (t1, t2) = (0.9, 2.3);
    let a = evolve_state(&evolve_state(&g, t1, &p).unwrap(), t2, &p).unwrap();
    let b = evolve_state(&g, t1 + t2, &p).unwrap();
    assert!((a.mu() - b.mu()).abs().max() < 1e-9);
    assert!((a.sigma() - b.sigma()).abs().max() < 1e-9);
    let vac = GaussianComponent::coherent(Vector2::new(1.0, 0.0), 1.0).unwrap();
    assert!((evolve_state(&vac, 5.0, &p).unwrap().sigma() - Matrix2::identity()).abs().max() < 1e-12);
}

#[test]
fn opposite_means_share_covariance() {
    let p = params(2.0, 1.0, 1.0);
    let a = GaussianComponent::coherent(Vector2::new(2.0, 0.5), 1.0).unwrap();
    let b = GaussianComponent::coherent(Vector2::new(-2.0, -0.5), 1.0).unwrap();
    for t in [0.5, 3.0, 12.0] {
        let (ea, eb) = (evolve_state(&a, t, &p).unwrap(), evolve_state(&b, t, &p).unwrap());
        assert_eq!(ea.sigma(), eb.sigma());
        assert!((ea.mu() + eb.mu()).abs().max() < 1e-15);
    }
}

#[test]
fn stationary_width_grows_with_temperature() {
    let grid: Vec<f64> = (0..=60).map(|k| k as f64 * 0.5).collect();
    let g = GaussianComponent::coherent(Vector2::new(2.0, 0.0), 1.0).unwrap();
    for (gamma, cutoff) in REGIMES {
        let mut last = 0.0;
        for kt in [0.5, 2.0, 20.0] {
            let tr = trajectory(&g, &grid, &params(kt, gamma, cutoff)).unwrap();
            let (lo, hi) = sym_eigenvalues(&tr.states[0].sigma());
            assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
            let (_, top) = sym_eigenvalues(&tr.states.last().unwrap().sigma());
            assert!(top > last, "γ={gamma} Ω={cutoff} kT={kt}");
            last = top;
        }
    }
}

#[test]
fn trajectory_matches_nodewise_evolution() {
    let p = params(0.5, 1.0, 100.0);
    let g = GaussianComponent::coherent(Vector2::new(2.0, 0.0), 1.0).unwrap();
    let grid = [0.0, 0.25, 1.0, 4.0];
    let tr = trajectory(&g, &grid, &p).unwrap();
    for (t, s) in grid.iter().zip(&tr.states) {
        assert_eq!(*s, evolve_state(&g, *t, &p).unwrap());
    }
    assert_eq!(trajectory(&g, &[0.0], &p).unwrap().states, vec![g]);
    assert!(trajectory(&g, &[0.0, 1.0, 0.5], &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn poles_are_stable(gamma in 1e-3..3.0f64, cutoff in 0.05..200.0f64, omega0 in 0.2..5.0f64) {
        let p = CLParams::new(omega0, 1.0, gamma, cutoff, 1.0, 1.0).unwrap();
        if let Ok(gf) = GreensFunction::new(&p) {
            for z in gf.poles() {
                prop_assert!(z.re <= 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heisenberg_floor(
        kt in 0.05..20.0f64,
        gamma in 0.05..1.5f64,
        cutoff in 0.5..100.0f64,
        t in 0.0..40.0f64,
        squeeze in 0.3..3.0f64,
    ) {
        let p = params(kt, gamma, cutoff);
        let g = GaussianComponent::new(Vector2::new(1.0, 0.0), Matrix2::new(squeeze, 0.0, 0.0, 1.0 / squeeze)).unwrap();
        let s = evolve_state(&g, t, &p).unwrap().sigma();
        prop_assert!(s.determinant() >= 1.0 - 1e-6, "det = {}", s.determinant());
    }
}
