mod common;

use common::*;
use nls2d::convergence::{reference_from, ExperimentConfig};
use nls2d::integrators::{integrate, lie_step, nonlinear_flow, StepperConfig};
use nls2d::norms::l2_norm;
use nls2d::spectral::{free_flow, project, FilterSpec, Mode};
use proptest::prelude::*;

#[test]
fn mass_trace_is_nonincreasing() {
    let u = rough(64, 0.3, 13);
    let cfg = StepperConfig::new(2f64.powi(-6), -1).unwrap();
    let run = integrate(&u, &cfg, 64, None).unwrap();
    assert_eq!(run.mass_trace.len(), 65);
    for w in run.mass_trace.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} -> {}", w[0], w[1]);
    }
    // the trace holds L2 norms, starting from the projected data
    let projected = project(&u, &FilterSpec::new(cfg.tau).unwrap());
    assert!((run.mass_trace[0] - l2_norm(&projected)).abs() <= 1e-13 * run.mass_trace[0]);
}

#[test]
fn conjugation_flips_the_sign_of_mu() {
    let u = rough(32, 0.5, 3);
    for dealias in [false, true] {
        let a = nonlinear_flow(&u, 0.125, -1, dealias).unwrap().conj();
        let b = nonlinear_flow(&u.conj(), 0.125, 1, dealias).unwrap();
        assert!(l2_norm(&a.sub(&b).unwrap()) <= 1e-14 * l2_norm(&u));
    }
    // a full step conjugates into the mu-flipped step with a backward free flow
    let p = FilterSpec::new(0.125).unwrap();
    let a = lie_step(&u, &StepperConfig::new(0.125, -1).unwrap())
        .unwrap()
        .conj();
    let nonlinear = nonlinear_flow(&project(&u, &p).conj(), 0.125, 1, false).unwrap();
    let b = free_flow(&project(&nonlinear, &p), -0.125);
    assert!(l2_norm(&a.sub(&b).unwrap()) <= 1e-13 * l2_norm(&u));
}

#[test]
fn reference_solution_is_exact_on_plane_waves() {
    for (k, c, mu) in [
        (Mode::new(2, -1), 0.7, -1),
        (Mode::new(-3, 0), 1.2, 1),
        (Mode::new(0, 0), 0.4, -1),
    ] {
        let u0 = plane_wave(64, k, c);
        let cfg = ExperimentConfig {
            mu,
            final_time: 0.5,
            ..ExperimentConfig::new(1.0, 7, 64)
        };
        let reference = reference_from(&u0, &cfg, 2f64.powi(-12)).unwrap();
        let exact = plane_wave_exact(64, k, c, mu, 0.5);
        assert!(l2_norm(&reference.sub(&exact).unwrap()) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_step_preserves_plane_waves(k1 in -6i64..6, k2 in -6i64..6, c in 0.1f64..2.0, j in 4i32..10, focusing in any::<bool>()) {
        let mu = if focusing { 1 } else { -1 };
        let tau = 2f64.powi(-j);
        let k = Mode::new(k1, k2);
        let cfg = StepperConfig::new(tau, mu).unwrap();
        let u0 = plane_wave(32, k, c);
        let run = integrate(&u0, &cfg, 4, None).unwrap();
        let filter = FilterSpec::new(tau).unwrap();
        let exact = if filter.keeps(k) { plane_wave_exact(32, k, c, mu, 4.0 * tau) } else { u0.scale(0.0.into()) };
        prop_assert!(l2_norm(&run.final_field.sub(&exact).unwrap()) <= 1e-12);
    }
}
