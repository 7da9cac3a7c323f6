use proptest::prelude::*;
use swlw_core::coupling::CouplingSpec;
use swlw_core::grid::{dealias, divergence, gradient};
use swlw_core::magnetics::{divergence_sup, project_divfree};
use swlw_core::schrodinger::{linear_step, mass, nls_step_coupled};
use swlw_core::stepper::{advance, Physics, SimState, StepConfig};
use swlw_core::{Complex64, ComplexField, Grid, ScalarField, VectorField};

const TAU: f64 = std::f64::consts::TAU;

/// A few resolved Fourier modes with the given coefficients.
fn trig(g: &Grid, c: &[f64]) -> ScalarField {
    ScalarField::from_fn(g, |[x, y]| {
        c.iter()
            .enumerate()
            .map(|(j, a)| {
                let (k1, k2) = ((j % 3) as f64, (j / 3) as f64 + 1.0);
                a * (TAU * (k1 * x + k2 * y) + j as f64).sin()
            })
            .sum()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_round_trip(values in prop::collection::vec(-10.0f64..10.0, 64)) {
        let g = Grid::new(8).unwrap();
        let f = ScalarField::from_values(&g, values.clone()).unwrap();
        let back = g.inverse_real(&g.forward(&f));
        for (a, b) in back.values.iter().zip(&values) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_solenoidal_and_idempotent(a in coeffs(), b in coeffs()) {
        let g = Grid::new(16).unwrap();
        let h = VectorField::new(trig(&g, &a), trig(&g, &b));
        let p = project_divfree(&h);
        prop_assert!(divergence_sup(&p) < 1e-12);
        let pp = project_divfree(&p);
        prop_assert!(pp.sub(&p).max_abs() < 1e-13);
    }

    #[test]
    fn gradients_are_curl_free_and_projected_away(a in coeffs()) {
        let g = Grid::new(16).unwrap();
        let grad = gradient(&trig(&g, &a));
        let p = project_divfree(&grad);
        prop_assert!(p.max_abs() < 1e-10);
        prop_assert!(divergence(&grad).integral().abs() < 1e-12);
    }

    #[test]
    fn dealias_keeps_resolved_modes(a in coeffs()) {
        let g = Grid::new(16).unwrap();
        let f = trig(&g, &a);
        prop_assert!(dealias(&f).zip_map(&f, |x, y| x - y).max_abs() < 1e-13);
    }

    #[test]
    fn wave_mass_is_conserved(a in coeffs(), b in coeffs(), dt in 1e-4f64..1e-2) {
        let g = Grid::new(16).unwrap();
        let (re, im) = (trig(&g, &a), trig(&g, &b));
        let psi = ComplexField::from_values(
            &g,
            re.values.iter().zip(&im.values).map(|(&x, &y)| Complex64::new(x, y)).collect(),
        ).unwrap();
        let v = trig(&g, &a).map(|s| 1.0 + 0.2 * s.tanh());
        let spec = CouplingSpec::default();
        let m0 = mass(&psi);
        let stepped = nls_step_coupled(&psi, &v, &spec, dt).unwrap();
        prop_assert!((mass(&stepped) - m0).abs() <= 1e-12 * m0.max(1.0));
        let free = linear_step(&psi, dt);
        prop_assert!((mass(&free) - m0).abs() <= 1e-12 * m0.max(1.0));
    }

    #[test]
    fn linear_flow_is_reversible(a in coeffs(), tau in 0.0f64..0.1) {
        let g = Grid::new(16).unwrap();
        let psi = ComplexField::from_values(&g, trig(&g, &a).values.iter().map(|&x| Complex64::new(x, 0.5 * x)).collect()).unwrap();
        let back = linear_step(&linear_step(&psi, tau), -tau);
        prop_assert!(back.sub(&psi).max_abs() < 1e-12);
    }

    #[test]
    fn coupling_profiles_stay_bounded(v in 0.0f64..5.0, s in 0.0f64..10.0) {
        let spec = CouplingSpec::default();
        let g = spec.g(v).unwrap();
        let h = spec.h_prime(s).unwrap();
        prop_assert!(g.is_finite() && g >= 0.0);
        prop_assert!(h.is_finite());
        prop_assert!(spec.g(-v - 1e-9).is_err());
    }
}

fn random_state(n: usize, seed: f64) -> SimState {
    let g = Grid::new(n).unwrap();
    let rho = ScalarField::from_fn(&g, |[x, y]| 1.0 + 0.15 * (TAU * x + seed).sin() * (TAU * y).cos());
    let u = VectorField::from_fn(&g, |[x, y]| [0.3 * (TAU * y + seed).sin(), -0.2 * (TAU * x).cos()]);
    let h = project_divfree(&VectorField::from_fn(&g, |[x, y]| [0.2 * (TAU * y).cos(), 0.1 * (TAU * (x + y)).sin()]));
    let psi = ComplexField::from_fn(&g, |[x, y]| Complex64::from_polar(1.0 + 0.1 * (TAU * y).sin(), TAU * x));
    SimState::new(rho, u, h, psi).unwrap()
}

#[test]
fn step_conserves_mass_and_keeps_field_solenoidal() {
    let s = random_state(16, 0.3);
    let cfg = StepConfig {
        dt: 2e-3,
        ..Default::default()
    };
    let (next, report) = advance(&s, &Physics::default(), &cfg).unwrap();
    assert!((next.rho.integral() - s.rho.integral()).abs() < 1e-13);
    assert!((mass(&next.psi) - mass(&s.psi)).abs() < 1e-13);
    assert!(divergence_sup(&next.h) < 1e-10);
    assert!(report.iterations <= 8);
    assert!(report.max_ratio() < 0.5);
    assert!((next.t - 2e-3).abs() < 1e-16);
}

#[test]
fn step_is_deterministic() {
    let s = random_state(16, 1.1);
    let cfg = StepConfig {
        dt: 2e-3,
        ..Default::default()
    };
    let a = advance(&s, &Physics::default(), &cfg).unwrap().0;
    let b = advance(&s, &Physics::default(), &cfg).unwrap().0;
    assert_eq!(a.rho.values, b.rho.values);
    assert_eq!(a.u.0[0].values, b.u.0[0].values);
    assert_eq!(a.psi.values, b.psi.values);
}

#[test]
fn oversized_step_is_rejected() {
    let s = random_state(16, 0.0);
    let cfg = StepConfig {
        dt: 1.0,
        ..Default::default()
    };
    assert!(advance(&s, &Physics::default(), &cfg).is_err());
}
