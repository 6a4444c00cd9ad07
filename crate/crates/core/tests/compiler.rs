mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use nalgebra::DMatrix;
use qhall::compiler::{
    calibrate_iswap, fidelity, idle_identity, refocus_pair, refocus_pair_on, synthesize, Budget,
    Param, ParamKind, TargetUnitary, Template, TemplateEvent,
};
use qhall::control::{program_unitary, ControlEvent, Program};
use qhall::model::{ChainSpec, CouplingCutoff};
use qhall::physics::{calibrate_prefactor, magnetic_length, NucleusSpec};
use qhall::scalar::C;

const PROTON_GAMMA: f64 = 2.675_221_9e8;

/// Equal spins at one magnetic length, `V` calibrated to the 1e-23 J anchor.
fn demo_chain(n: usize, cutoff: CouplingCutoff<f64>) -> ChainSpec<f64> {
    ChainSpec::uniform_line(
        NucleusSpec::new("H", 1, PROTON_GAMMA),
        n,
        magnetic_length(6.58).unwrap(),
        6.58,
        calibrate_prefactor(1e-23, 1.0, 6.58).unwrap(),
        cutoff,
    )
    .unwrap()
}

fn with_gammas(spec: &ChainSpec<f64>, gammas: &[f64]) -> ChainSpec<f64> {
    let mut s = spec.clone();
    for (nuc, &g) in s.nuclei.iter_mut().zip(gammas) {
        nuc.gyromagnetic_ratio = g;
    }
    s
}

fn identity_fidelity(p: &Program<f64>, spec: &ChainSpec<f64>) -> f64 {
    let u = program_unitary(p, spec).unwrap();
    let dim = u.nrows();
    fidelity(&u, &DMatrix::identity(dim, dim)).unwrap()
}

fn iswap_matrix() -> CMat {
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    CMat::from_row_slice(4, 4, &[l, o, o, o, o, o, i, o, o, i, o, o, o, o, o, l])
}

#[test]
fn cnot_from_two_iswaps_oracle() {
    let x = [1.0, 0.0, 0.0];
    let y = [0.0, 1.0, 0.0];
    let z = [0.0, 0.0, 1.0];
    let ry0 = rotation(y, FRAC_PI_2).kronecker(&pauli('I'));
    let rx1 = pauli('I').kronecker(&rotation(x, FRAC_PI_2));
    let rz = rotation(z, FRAC_PI_2).kronecker(&rotation(z, PI));
    let built = rz * rx1 * iswap_matrix() * ry0 * iswap_matrix();
    let cnot = TargetUnitary::<f64>::cnot(0, 1).unwrap().matrix;
    assert!(gate_fidelity(&built, &cnot) > 1.0 - 1e-14);

    // The same construction run through the machine with calibrated iSWAPs.
    let spec = demo_chain(2, CouplingCutoff::AllPairs);
    let iswap = calibrate_iswap(&spec, (0, 1)).unwrap().program.events;
    let mut events = iswap.clone();
    events.push(ControlEvent::y(0, FRAC_PI_2));
    events.extend(iswap);
    events.push(ControlEvent::x(1, FRAC_PI_2));
    events.push(ControlEvent::z(0, FRAC_PI_2));
    events.push(ControlEvent::z(1, PI));
    let u = program_unitary(&Program::with_events("cnot", events), &spec).unwrap();
    assert!(fidelity(&u, &cnot).unwrap() > 1.0 - 1e-10);
}

#[test]
fn iswap_calibration_closed_form() {
    for gamma in [0.0, PROTON_GAMMA] {
        let spec = with_gammas(&demo_chain(2, CouplingCutoff::AllPairs), &[gamma, gamma]);
        let r = calibrate_iswap(&spec, (0, 1)).unwrap();
        let j = spec.pair_coupling(0, 1).unwrap();
        assert_eq!(r.program.total_delay(), FRAC_PI_2 / j);
        assert!(1.0 - r.fidelity <= 1e-10);
        assert!(r.converged);
        let corrections = r
            .program
            .events
            .iter()
            .filter(|e| matches!(e, ControlEvent::Pulse { .. }))
            .count();
        assert_eq!(corrections, if gamma == 0.0 { 0 } else { 2 });
    }
}

#[test]
fn iswap_inside_a_chain() {
    let spec = demo_chain(4, CouplingCutoff::AllPairs);
    let r = calibrate_iswap(&spec, (2, 1)).unwrap();
    assert!(r.converged, "1 - F = {}", 1.0 - r.fidelity);
}

#[test]
fn detuned_iswap_is_flagged() {
    let base = demo_chain(2, CouplingCutoff::AllPairs);
    let j = base.pair_coupling(0, 1).unwrap();
    let spec = with_gammas(&base, &[PROTON_GAMMA, PROTON_GAMMA + j / 6.58]);
    let w = spec.larmor_frequencies();
    assert!(((w[1] - w[0]) - j).abs() < 1e-6 * j);
    let r = calibrate_iswap(&spec, (0, 1)).unwrap();
    assert!(!r.converged);
    assert!(r.fidelity < 0.99);
}

#[test]
fn refocus_equal_spins() {
    let spec = demo_chain(2, CouplingCutoff::AllPairs);
    let j = spec.pair_coupling(0, 1).unwrap();
    for jt in [0.1, 1.0, 10.0] {
        let p = refocus_pair(&spec, (0, 1), jt / j).unwrap();
        assert!(identity_fidelity(&p, &spec) >= 1.0 - 1e-9, "J tau = {jt}");
    }
    // No coupling at all: only the Zeeman corrections matter.
    let far = ChainSpec {
        cutoff: CouplingCutoff::Radius(1.0),
        ..spec
    };
    let p = refocus_pair(&far, (0, 1), 1e-9).unwrap();
    assert!(identity_fidelity(&p, &far) >= 1.0 - 1e-12);
}

#[test]
fn refocus_detuned_bound() {
    let base = demo_chain(2, CouplingCutoff::AllPairs);
    let j = base.pair_coupling(0, 1).unwrap();
    for jt in [0.05, 0.1, 0.2, 0.4] {
        for dt in [0.05, 0.1, 0.2, 0.4] {
            let tau = jt / j;
            let delta = dt / tau;
            let spec = with_gammas(&base, &[PROTON_GAMMA + delta / 6.58, PROTON_GAMMA]);
            let w = spec.larmor_frequencies();
            let d = w[0] - w[1];
            let p = refocus_pair(&spec, (0, 1), tau).unwrap();
            let infidelity = 1.0 - identity_fidelity(&p, &spec);
            let bound = (d * j * tau * tau).powi(2);
            assert!(infidelity > 0.0);
            assert!(
                infidelity <= bound,
                "J tau {jt}, delta tau {dt}: {infidelity} > {bound}"
            );
            let q = refocus_pair_on(&spec, (0, 1), tau, 1).unwrap();
            assert!((identity_fidelity(&q, &spec) - (1.0 - infidelity)).abs() < 1e-12);
        }
    }
}

#[test]
fn idle_identity_nn_chains() {
    for n in [3, 5] {
        let spec = demo_chain(n, CouplingCutoff::NearestNeighbor);
        let j = spec.pair_coupling(0, 1).unwrap();
        for jt in [0.1, 1.0, 3.0] {
            let idle = idle_identity(&spec, jt / j).unwrap();
            assert!(idle.warnings.is_empty());
            assert!(identity_fidelity(&idle.program, &spec) >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn idle_identity_all_pairs_residual() {
    let spec = demo_chain(3, CouplingCutoff::AllPairs);
    let j = spec.pair_coupling(0, 1).unwrap();
    let ratio = j / spec.pair_coupling(0, 2).unwrap();
    assert!((ratio - 2f64.sqrt() * 1f64.exp()).abs() < 1e-12);
    let idle = idle_identity(&spec, 0.1 / j).unwrap();
    assert_eq!(idle.warnings.len(), 1);
    let infidelity = 1.0 - identity_fidelity(&idle.program, &spec);
    // Unrefocused next-nearest rotation angle θ = J_02·τ; 1 - F ≈ θ²/4.
    let theta = 0.1 / ratio;
    assert!(infidelity > 1e-4);
    assert!((infidelity - theta * theta / 4.0).abs() < 0.1 * theta * theta / 4.0);
}

#[test]
fn single_pulse_template_is_exact() {
    let spec = demo_chain(2, CouplingCutoff::AllPairs);
    let target = TargetUnitary::rotation(1, [1.0, 0.0, 0.0], FRAC_PI_2).unwrap();
    let template = Template::new(
        "rx",
        vec![TemplateEvent::Rotation {
            target: 1,
            axis: [1.0, 0.0, 0.0],
            angle: Param::Free(0),
        }],
        vec![ParamKind::Angle],
    )
    .unwrap();
    let r = synthesize(&spec, &target, &template, &Budget::default()).unwrap();
    assert!(1.0 - r.fidelity < 1e-12);
    assert!(r.converged);
}

#[test]
fn cnot_synthesis_default_budget() {
    let spec = demo_chain(2, CouplingCutoff::AllPairs);
    let target = TargetUnitary::cnot(0, 1).unwrap();
    let template = Template::for_target(&spec, &target).unwrap();
    let budget = Budget::default();
    let a = synthesize(&spec, &target, &template, &budget).unwrap();
    assert!(a.converged);
    assert!(1.0 - a.fidelity < 1e-6);
    assert!((a.fidelity - a.optimizer_fidelity).abs() <= 1e-9);
    let b = synthesize(&spec, &target, &template, &budget).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cnot_synthesis_in_a_chain() {
    let spec = demo_chain(3, CouplingCutoff::AllPairs);
    let target = TargetUnitary::cnot(1, 2).unwrap();
    let template = Template::for_target(&spec, &target).unwrap();
    let r = synthesize(
        &spec,
        &target,
        &template,
        &Budget {
            seed: 3,
            ..Budget::default()
        },
    )
    .unwrap();
    assert!(r.converged, "1 - F = {}", 1.0 - r.fidelity);
}

#[test]
fn swap_needs_more_than_one_delay() {
    // Bare flip-flop delay: F(SWAP, U(Jt)) = sqrt(1 + sin²(Jt))/2 ≤ √2/2.
    let spec = with_gammas(&demo_chain(2, CouplingCutoff::AllPairs), &[0.0, 0.0]);
    let j = spec.pair_coupling(0, 1).unwrap();
    let swap = TargetUnitary::<f64>::swap(0, 1).unwrap().matrix;
    let mut best: f64 = 0.0;
    for k in 0..=2000 {
        let jt = 2.0 * PI * k as f64 / 2000.0;
        let u = program_unitary(
            &Program::with_events("d", vec![ControlEvent::delay(jt / j)]),
            &spec,
        )
        .unwrap();
        let f = fidelity(&u, &swap).unwrap();
        assert!((f - (1.0 + jt.sin().powi(2)).sqrt() / 2.0).abs() < 1e-12);
        best = best.max(f);
    }
    assert!(best < 0.7072);

    let target = TargetUnitary::swap(0, 1).unwrap();
    let template = Template::layered(&spec, (0, 1), 1).unwrap();
    let r = synthesize(&spec, &target, &template, &Budget::default()).unwrap();
    assert!(!r.converged);
    assert!(r.fidelity < 0.7072);
}

#[test]
fn tiny_budget_is_best_effort() {
    let spec = demo_chain(2, CouplingCutoff::AllPairs);
    let target = TargetUnitary::swap(0, 1).unwrap();
    let template = Template::for_target(&spec, &target).unwrap();
    let budget = Budget {
        max_evaluations: 1,
        restarts: 8,
        seed: 0,
    };
    let r = synthesize(&spec, &target, &template, &budget).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 1);
}

#[test]
fn fidelity_sanity() {
    let u = TargetUnitary::<f64>::iswap(0, 1).unwrap().matrix;
    assert!((fidelity(&DMatrix::identity(4, 4), &u).unwrap() - 0.5).abs() < 1e-15);
    for phi in [0.0f64, 0.3, 2.0, -5.0] {
        let v = u.map(|z| z * C::new(phi.cos(), phi.sin()));
        assert!((fidelity(&u, &v).unwrap() - 1.0).abs() < 1e-15);
    }
}
