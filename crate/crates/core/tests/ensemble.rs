mod common;

use std::f64::consts::PI;

use common::*;
use qhall::compiler::calibrate_iswap;
use qhall::control::{ControlEvent, Program};
use qhall::engine::StateVector;
use qhall::ensemble::{
    apply_t1_channel, majority_readout, run_ensemble, run_ensemble_with_noise, sample_replica,
    DisorderParams, NoiseParams, Observable,
};
use qhall::model::{ChainSpec, CouplingCutoff};
use qhall::physics::{calibrate_prefactor, magnetic_length, NucleusSpec};
use rand_distr::{Distribution, Normal};

fn demo_chain(n: usize) -> ChainSpec<f64> {
    ChainSpec::uniform_line(
        NucleusSpec::new("H", 1, 2.675e8),
        n,
        magnetic_length(6.58).unwrap(),
        6.58,
        calibrate_prefactor(1e-23, 1.0, 6.58).unwrap(),
        CouplingCutoff::AllPairs,
    )
    .unwrap()
}

fn jitter(sigma: f64) -> DisorderParams<f64> {
    DisorderParams {
        position_jitter_sigma: sigma,
        ..DisorderParams::none()
    }
}

fn coupling_disorder(sigma: f64) -> DisorderParams<f64> {
    DisorderParams {
        coupling_scale_sigma: sigma,
        ..DisorderParams::none()
    }
}

fn flip_then_iswap(spec: &ChainSpec<f64>) -> Program<f64> {
    let mut p = Program::with_events(
        "transfer",
        vec![ControlEvent::InitializePumped {}, ControlEvent::x(0, PI)],
    );
    p.extend(calibrate_iswap(spec, (0, 1)).unwrap().program.events);
    p
}

#[test]
fn position_jitter_has_requested_spread() {
    let spec = demo_chain(2);
    let sigma = 0.5;
    let mut displacements = Vec::new();
    for seed in 0..10_000 {
        let r = sample_replica(&spec, &jitter(sigma), seed).unwrap();
        for (p, q) in r.positions.iter().zip(&spec.positions) {
            displacements.push(p[0] - q[0]);
            displacements.push(p[1] - q[1]);
        }
    }
    let n = displacements.len() as f64;
    let mean = displacements.iter().sum::<f64>() / n;
    let std = (displacements
        .iter()
        .map(|d| (d - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0))
        .sqrt();
    assert!((std - sigma).abs() < 0.03 * sigma, "std {std}");
}

#[test]
fn jitter_shifts_mean_nearest_neighbour_coupling() {
    let spec = demo_chain(2);
    let nominal = spec.pair_coupling(0, 1).unwrap();
    let js: Vec<f64> = (0..10_000)
        .map(|s| {
            sample_replica(&spec, &jitter(1.0), s)
                .unwrap()
                .pair_coupling(0, 1)
                .unwrap()
        })
        .collect();
    let n = js.len() as f64;
    let mean = js.iter().sum::<f64>() / n;
    let se = (js.iter().map(|j| (j - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt();
    let shift = (mean - nominal) / nominal;
    println!("relative shift of mean NN coupling under 1 nm jitter: {shift:+.4e}");
    // The profile is convex along the chain but transverse jitter always
    // lengthens the bond; whichever wins, the shift must be resolvable.
    assert!((mean - nominal).abs() > 3.0 * se);
}

#[test]
fn coupling_disorder_degrades_transfer() {
    let spec = demo_chain(2);
    let sigma = 0.05;
    let program = flip_then_iswap(&spec);
    let report = run_ensemble(
        &program,
        &spec,
        &coupling_disorder(sigma),
        &Observable::z(1),
        2000,
        7,
    )
    .unwrap();

    // Oracle: <z1> = -cos(πδ) per replica, averaged over 1e5 direct draws of δ.
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut r = rng(99);
    let samples = 100_000;
    let oracle = (0..samples)
        .map(|_| loop {
            let d: f64 = normal.sample(&mut r);
            if d > -0.9 {
                break -(PI * d).cos();
            }
        })
        .sum::<f64>()
        / samples as f64;
    let closed = -(-(PI * sigma).powi(2) / 2.0).exp();
    assert!((oracle - closed).abs() < 1e-4);
    assert!(report.mean > -1.0);
    assert!((report.mean - oracle).abs() < 5.0 * report.std_error + 1e-4);
    let (lo, hi) = report
        .per_replica
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x.value), b.max(x.value))
        });
    assert!(lo <= report.mean && report.mean <= hi);
}

#[test]
fn zero_disorder_has_no_spread() {
    let spec = demo_chain(2);
    let report = run_ensemble(
        &flip_then_iswap(&spec),
        &spec,
        &DisorderParams::none(),
        &Observable::z(1),
        16,
        3,
    )
    .unwrap();
    assert_eq!(report.std_error, 0.0);
    assert!((report.mean + 1.0).abs() < 1e-12);
}

#[test]
fn ensembles_are_reproducible() {
    let spec = demo_chain(3);
    let d = DisorderParams {
        position_jitter_sigma: 0.3,
        coupling_scale_sigma: 0.02,
        readout_error: 0.0,
    };
    let p = flip_then_iswap(&spec);
    let obs = Observable::z_product(vec![0, 2]);
    let a = run_ensemble(&p, &spec, &d, &obs, 64, 11).unwrap();
    let b = run_ensemble(&p, &spec, &d, &obs, 64, 11).unwrap();
    assert_eq!(a, b);
    let c = run_ensemble(&p, &spec, &d, &obs, 64, 12).unwrap();
    assert_ne!(a.per_replica, c.per_replica);
}

#[test]
fn doubling_replicas_shrinks_std_error() {
    let spec = demo_chain(2);
    let p = flip_then_iswap(&spec);
    let d = coupling_disorder(0.1);
    let mut ratio_sum = 0.0;
    for seed in 0..10 {
        let small = run_ensemble(&p, &spec, &d, &Observable::z(1), 50, seed).unwrap();
        let large = run_ensemble(&p, &spec, &d, &Observable::z(1), 100, seed + 1000).unwrap();
        ratio_sum += large.std_error / small.std_error;
    }
    // Expected ratio 1/√2.
    assert!(ratio_sum / 10.0 < 0.85);
}

#[test]
fn majority_error_follows_binomial_tail_and_shrinks() {
    let spec = demo_chain(1);
    let prep = Program::with_events("pumped", vec![ControlEvent::InitializePumped {}]);
    let trials = 20_000;
    let mut previous = (1.0, 0.0);
    for r in (1..=15).step_by(2) {
        let errors = (0..trials)
            .filter(|&t| {
                let seed = (r as u64) << 32 | t as u64;
                majority_readout(&prep, &spec, 0, r, 0.1, seed)
                    .unwrap()
                    .majority_value
                    != Some(1)
            })
            .count();
        let p = binomial_upper_tail(r as u64, (r as u64).div_ceil(2), 0.1);
        assert!(
            within_sigma(errors, trials, p, 5.0),
            "R = {r}: {errors} errors, p = {p}"
        );
        let rate = errors as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            rate <= previous.0 + 3.0 * (sigma + previous.1),
            "R = {r} not monotone"
        );
        previous = (rate, sigma);
    }
}

#[test]
fn t1_reset_at_half_life() {
    let one = StateVector::<f64>::basis(1, 1).unwrap();
    let noise = NoiseParams::t1(600.0);
    let dt = 600.0 * 2f64.ln();
    let mut r = rng(31);
    let trials = 100_000;
    let resets = (0..trials)
        .filter(|_| {
            let out = apply_t1_channel(&one, dt, &noise, &mut r).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-15);
            out.probabilities()[0] > 0.5
        })
        .count();
    assert!(within_sigma(resets, trials, 0.5, 5.0));
}

#[test]
fn t1_through_the_interpreter() {
    let spec = demo_chain(1);
    let p = Program::with_events(
        "decay",
        vec![
            ControlEvent::InitializePumped {},
            ControlEvent::x(0, PI),
            ControlEvent::delay(1.0e3),
        ],
    );
    let noise = NoiseParams::t1(1.0e3 / 2f64.ln());
    let report = run_ensemble_with_noise(
        &p,
        &spec,
        &DisorderParams::none(),
        &Observable::z(0),
        20_001,
        5,
        &noise,
    )
    .unwrap();
    // Half the trajectories reset to +1, the rest stay at -1.
    assert!(report.mean.abs() < 5.0 * report.std_error);
}
