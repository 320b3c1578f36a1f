mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use psg::grid::{Field, TorusGrid};
use psg::models::{ModelKind, ModelSpec};
use psg::schemes::{
    bdf2_step, imex1_step, integrate_to, kickstart_bdf2, run, ObserverError, SchemeError,
    SchemeKind, SchemeState, StepObserver, StepRecord,
};
use psg::spectral::SpectralOps;

fn setup(n: usize) -> (TorusGrid, SpectralOps) {
    let g = TorusGrid::one_d(n).unwrap();
    (g, SpectralOps::new(g))
}

fn sg(kappa: f64) -> ModelSpec {
    ModelSpec::sine_gordon(kappa).unwrap()
}

fn assert_constant(f: &Field, want: f64, tol: f64) {
    for &v in f.values() {
        assert!((v - want).abs() <= tol, "{v} vs {want}");
    }
}

#[test]
fn zero_is_a_fixed_point() {
    let (g, ops) = setup(32);
    for scheme in [SchemeKind::Imex1, SchemeKind::Bdf2] {
        let s = integrate_to(&ops, Field::zeros(g), sg(0.3), scheme, 0.7, 10).unwrap();
        assert_eq!(s.u_curr().max_abs(), 0.0);
    }
}

#[test]
fn constant_reduction_imex1() {
    let (g, ops) = setup(32);
    for kind in [ModelKind::SineGordon, ModelKind::AllenCahn] {
        let model = ModelSpec::new(kind, 0.4).unwrap();
        for (a, tau) in [(0.3, 0.1), (-1.2, 0.5), (PI / 2.0, 1.0)] {
            let s0 = SchemeState::initial(SchemeKind::Imex1, model, tau, Field::constant(g, a)).unwrap();
            let s1 = imex1_step(&ops, &s0).unwrap();
            assert_constant(s1.u_curr(), a + tau * kind.reaction(a), 1e-14);
        }
    }
}

#[test]
fn constant_reduction_bdf2() {
    let (g, ops) = setup(32);
    for kind in [ModelKind::SineGordon, ModelKind::AllenCahn] {
        let model = ModelSpec::new(kind, 0.4).unwrap();
        for (a, tau) in [(0.3, 0.1), (-0.8, 0.5)] {
            let st = kickstart_bdf2(&ops, Field::constant(g, a), model, tau).unwrap();
            assert_constant(st.u_curr(), a + tau * kind.reaction(a), 1e-14);
            assert_constant(st.u_prev().unwrap(), a, 0.0);
            let b = st.u_curr().values()[0];
            let next = bdf2_step(&ops, &st).unwrap();
            let rhs = 2.0 * b - 0.5 * a + tau * (2.0 * kind.reaction(b) - kind.reaction(a));
            assert_constant(next.u_curr(), rhs / 1.5, 1e-14);
        }
    }
}

#[test]
fn bdf2_equal_levels_examples() {
    let (g, ops) = setup(32);
    let model = sg(0.2);
    let tau = 0.25;
    let u = Field::constant(g, PI);
    let s = kickstart_bdf2(&ops, u.clone(), model, tau).unwrap();
    let s = bdf2_step(&ops, &s).unwrap();
    assert_constant(s.u_curr(), PI, 1e-15);

    // Equal levels a: 2a - a/2 + τ(2 sin a - sin a) over 3/2.
    let a = 0.9;
    let c = Field::constant(g, a);
    let rhs = c.map(|v| 1.5 * v + tau * v.sin());
    let want = a + 2.0 * tau / 3.0 * a.sin();
    let got = ops.helmholtz_solve(&rhs, 0.2, 1.5, tau).unwrap();
    assert_constant(&got, want, 1e-14);
    let direct = psg::schemes::bdf2_update(&ops, &model, tau, &c, &c).unwrap();
    assert_constant(&direct, want, 1e-14);
}

#[test]
fn kickstart_examples() {
    let (g, ops) = setup(256);
    let s = kickstart_bdf2(&ops, Field::zeros(g), sg(0.1), 0.1).unwrap();
    assert_eq!(s.u_curr().max_abs(), 0.0);
    assert_eq!(s.step_index(), 1);

    let s = kickstart_bdf2(&ops, Field::constant(g, PI / 2.0), sg(0.1), 0.5).unwrap();
    assert_constant(s.u_curr(), PI / 2.0 + 0.5, 1e-14);

    let u0 = Field::from_fn(g, |x, _| PI * x.sin());
    let k = kickstart_bdf2(&ops, u0.clone(), sg(0.1), 0.1).unwrap();
    let i = imex1_step(&ops, &SchemeState::initial(SchemeKind::Imex1, sg(0.1), 0.1, u0.clone()).unwrap()).unwrap();
    assert!(k.u_curr().values().iter().zip(i.u_curr().values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!(k.u_prev().unwrap(), &u0);
}

#[test]
fn step_preconditions() {
    let (g, ops) = setup(16);
    let bdf = SchemeState::initial(SchemeKind::Bdf2, sg(0.3), 0.1, Field::zeros(g)).unwrap();
    assert!(matches!(bdf2_step(&ops, &bdf), Err(SchemeError::MissingPrevious(0))));
    assert!(matches!(imex1_step(&ops, &bdf), Err(SchemeError::WrongScheme { .. })));
    let imex = SchemeState::initial(SchemeKind::Imex1, sg(0.3), 0.1, Field::zeros(g)).unwrap();
    assert!(matches!(bdf2_step(&ops, &imex), Err(SchemeError::WrongScheme { .. })));
    assert!(matches!(
        SchemeState::initial(SchemeKind::Imex1, sg(0.3), 0.0, Field::zeros(g)),
        Err(SchemeError::InvalidTau(_))
    ));
    let bad = Field::new(g, vec![f64::NAN; 16]).unwrap();
    assert!(matches!(
        SchemeState::initial(SchemeKind::Imex1, sg(0.3), 0.1, bad),
        Err(SchemeError::NonFiniteInitial(_))
    ));
}

#[test]
fn run_rejects_zero_steps() {
    let (g, ops) = setup(16);
    let r = run(&ops, Field::zeros(g), sg(0.3), SchemeKind::Imex1, 0.1, 0, &mut []);
    assert!(matches!(r, Err(SchemeError::NoSteps)));
}

#[test]
fn run_reaches_final_time_and_decays() {
    let (g, ops) = setup(256);
    let u0 = Field::from_fn(g, |x, _| PI * x.sin());
    let rec = run(&ops, u0, sg(0.1), SchemeKind::Imex1, 0.1, 420, &mut []).unwrap();
    assert_eq!(rec.len(), 421);
    assert!((rec.last().unwrap().t - 42.0).abs() < 1e-12);
    for w in rec.windows(2) {
        assert!(w[1].energy <= w[0].energy + 1e-10 * (1.0 + w[0].energy.abs()));
    }
    assert!(rec.iter().all(|r| r.modified_energy.is_none()));
}

#[test]
fn bdf2_records_modified_energy_from_step_one() {
    let (g, ops) = setup(64);
    let u0 = Field::from_fn(g, |x, _| 2.0 * x.sin());
    let rec = run(&ops, u0, sg(0.3), SchemeKind::Bdf2, 0.1, 5, &mut []).unwrap();
    assert!(rec[0].modified_energy.is_none());
    assert!(rec[1..].iter().all(|r| r.modified_energy.unwrap() >= r.energy));
}

#[test]
fn run_is_deterministic() {
    let (g, ops) = setup(128);
    let u0 = common::smooth_field(&mut common::rng(3), g, 5, 3.0);
    let a = run(&ops, u0.clone(), sg(0.2), SchemeKind::Bdf2, 0.05, 50, &mut []).unwrap();
    let b = run(&ops, u0, sg(0.2), SchemeKind::Bdf2, 0.05, 50, &mut []).unwrap();
    assert_eq!(a, b);
}

struct FailAt(usize);

impl StepObserver for FailAt {
    fn observe(&mut self, state: &SchemeState, _: &StepRecord) -> Result<(), ObserverError> {
        if state.step_index() == self.0 {
            Err("disk full".into())
        } else {
            Ok(())
        }
    }
}

#[test]
fn observer_errors_propagate() {
    let (g, ops) = setup(16);
    let r = run(&ops, Field::zeros(g), sg(0.3), SchemeKind::Imex1, 0.1, 5, &mut [&mut FailAt(3)]);
    match r {
        Err(SchemeError::Observer { step, source }) => {
            assert_eq!(step, 3);
            assert_eq!(source.to_string(), "disk full");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn blow_up_names_first_bad_step() {
    let (g, ops) = setup(16);
    let model = ModelSpec::allen_cahn(0.1).unwrap();
    let r = run(&ops, Field::constant(g, 3.0), model, SchemeKind::Imex1, 10.0, 50, &mut []);
    match r {
        Err(SchemeError::NonFinite { step, .. }) => assert!(step >= 2 && step < 50, "step {step}"),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sine_gordon_is_odd(seed in any::<u64>(), bdf in any::<bool>(), tau in 0.01f64..1.0) {
        let (g, ops) = setup(64);
        let scheme = if bdf { SchemeKind::Bdf2 } else { SchemeKind::Imex1 };
        let u0 = common::smooth_field(&mut common::rng(seed), g, 6, 3.0);
        let a = integrate_to(&ops, u0.clone(), sg(0.3), scheme, tau, 10).unwrap();
        let b = integrate_to(&ops, -&u0, sg(0.3), scheme, tau, 10).unwrap();
        prop_assert!(a.u_curr().max_abs_diff(&-b.u_curr()) <= 1e-13);
    }

    #[test]
    fn stepping_commutes_with_shifts(seed in any::<u64>(), m in 0usize..64, bdf in any::<bool>(), ac in any::<bool>()) {
        let (g, ops) = setup(64);
        let scheme = if bdf { SchemeKind::Bdf2 } else { SchemeKind::Imex1 };
        let kind = if ac { ModelKind::AllenCahn } else { ModelKind::SineGordon };
        let model = ModelSpec::new(kind, 0.25).unwrap();
        let u0 = common::smooth_field(&mut common::rng(seed), g, 6, if ac { 1.0 } else { 3.0 });
        let a = integrate_to(&ops, u0.shift_x(m), model, scheme, 0.1, 10).unwrap();
        let b = integrate_to(&ops, u0, model, scheme, 0.1, 10).unwrap();
        prop_assert!(a.u_curr().max_abs_diff(&b.u_curr().shift_x(m)) <= 1e-12);
    }
}
