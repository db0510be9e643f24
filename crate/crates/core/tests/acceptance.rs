//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bellframe::cli;
use bellframe::harness::{
    self, chsh_settings, run_experiment, run_experiment_with, ExperimentConfig, RunOptions,
    EXPECTED_VERDICTS,
};
use bellframe::kinematics::{
    boost, classify_timing, interval_squared, ExperimentGeometry, InertialFrame, SpacetimeEvent, TimingClass,
    DEFAULT_EPSILON,
};
use bellframe::models::{ModelId, Setting};
use bellframe::statistics::{local_bound_bruteforce, timing_dependence_test};

const TSIRELSON: f64 = 2.0 * SQRT_2;
const MILLION: u64 = 1_000_000;

type Outcome = Result<String, String>;

fn setting(x: f64) -> Setting {
    Setting::new(x).unwrap()
}

fn config(model: ModelId, geometry: ExperimentGeometry, trials_per_pair: u64, seed: u64) -> ExperimentConfig {
    let (alice_settings, bob_settings) = chsh_settings();
    ExperimentConfig {
        geometry,
        model,
        alice_settings,
        bob_settings,
        trials_per_pair,
        seed,
        epsilon: DEFAULT_EPSILON,
    }
}

fn after_after() -> ExperimentGeometry {
    ExperimentGeometry { alice_beta: 0.1, bob_beta: -0.1, ..ExperimentGeometry::before_before() }
}

/// One geometry per timing class.
fn geometry_for(class: TimingClass) -> ExperimentGeometry {
    match class {
        TimingClass::AliceFirstConsistent => ExperimentGeometry::standard(),
        TimingClass::BobFirstConsistent => ExperimentGeometry::standard().swapped(),
        TimingClass::BeforeBefore => ExperimentGeometry::before_before(),
        TimingClass::AfterAfter => after_after(),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn local_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100 {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * 4.0 * PI - 2.0 * PI);
        let bound = local_bound_bruteforce(setting(q[0]), setting(q[1]), setting(q[2]), setting(q[3]));
        ensure(bound == 2, || format!("bound {bound} at {q:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("100 quadruples -> 2 in {elapsed:?}"))
}

fn quantum_chsh() -> Outcome {
    let start = Instant::now();
    let r = run_experiment(&config(ModelId::Quantum, ExperimentGeometry::standard(), MILLION, 42)).unwrap();
    let elapsed = start.elapsed();
    let dev = (r.chsh.s + TSIRELSON).abs();
    ensure(r.chsh.stderr < 0.003, || format!("stderr {}", r.chsh.stderr))?;
    ensure(dev < 3.0 * r.chsh.stderr, || format!("S = {} ± {}", r.chsh.s, r.chsh.stderr))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("S = {:.5} ± {:.5} ({elapsed:?})", r.chsh.s, r.chsh.stderr))
}

fn perfect_anticorrelation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let angles: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * TAU).collect();
    for (k, &angle) in angles.iter().enumerate() {
        let a = setting(angle);
        for model in ModelId::ALL {
            for (t, class) in TimingClass::ALL.into_iter().enumerate() {
                let c = harness::sample_counts(model, class, a, a, 100_000, 303, (k * 4 + t) as u32);
                ensure(c.n_pp == 0 && c.n_mm == 0 && c.total() == 100_000, || {
                    format!("{model} {class} a={angle}: {c:?}")
                })?;
            }
        }
    }
    Ok("E(a,a) = -1 exactly for 5 angles x 3 models x 4 classes".into())
}

fn local_never_violates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..50 {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * TAU);
        let cfg = ExperimentConfig {
            alice_settings: [setting(q[0]), setting(q[1])],
            bob_settings: [setting(q[2]), setting(q[3])],
            ..config(ModelId::Local, ExperimentGeometry::standard(), 100_000, 404 + k)
        };
        let r = run_experiment(&cfg).unwrap();
        let excess = r.chsh.s.abs() - 2.0 - 3.0 * r.chsh.stderr;
        worst = worst.max(excess);
        ensure(excess <= 0.0, || format!("S = {} ± {} at {q:?}", r.chsh.s, r.chsh.stderr))?;
    }
    Ok(format!("50 quadruples, max(|S| - 2 - 3σ) = {worst:.4}"))
}

fn nonlocal_model_in_ordered_configs() -> Outcome {
    let mut lines = Vec::new();
    let base = config(ModelId::SuarezScarani, ExperimentGeometry::standard(), MILLION, 55);
    for (cfg, class) in [
        (base.clone(), TimingClass::AliceFirstConsistent),
        (base.swapped(), TimingClass::BobFirstConsistent),
    ] {
        let r = run_experiment(&cfg).unwrap();
        ensure(r.timing_class == class, || format!("classified {}", r.timing_class))?;
        ensure((r.chsh.s + TSIRELSON).abs() < 3.0 * r.chsh.stderr, || {
            format!("{class}: S = {} ± {}", r.chsh.s, r.chsh.stderr)
        })?;
        lines.push(format!("{class}: S = {:.5} ± {:.5}", r.chsh.s, r.chsh.stderr));
    }
    Ok(lines.join("; "))
}

fn before_before_discriminates() -> Outcome {
    let bb = ExperimentGeometry::before_before();
    let ss = run_experiment(&config(ModelId::SuarezScarani, bb, MILLION, 66)).unwrap();
    ensure(ss.timing_class == TimingClass::BeforeBefore, || format!("classified {}", ss.timing_class))?;
    // closed-form local correlations at the CHSH angles: -1/2, -1/2, -1/2, +1/2
    let local_s: f64 = -0.5 - 0.5 - 0.5 - 0.5;
    ensure((ss.chsh.s.abs() - local_s.abs()).abs() < 3.0 * ss.chsh.stderr, || {
        format!("suarez-scarani S = {} ± {}", ss.chsh.s, ss.chsh.stderr)
    })?;
    ensure(!ss.chsh.violates_local_bound, || "suarez-scarani violates".into())?;
    let q = run_experiment(&config(ModelId::Quantum, bb, MILLION, 66)).unwrap();
    ensure(q.chsh.violates_local_bound && (q.chsh.s + TSIRELSON).abs() < 3.0 * q.chsh.stderr, || {
        format!("quantum S = {} ± {}", q.chsh.s, q.chsh.stderr)
    })?;
    for seed in 1..=10 {
        let suite = harness::run_discrimination_suite(MILLION, seed).unwrap();
        ensure(suite.matches_expected(), || format!("seed {seed}: {:?}", suite.verdicts()))?;
    }
    let pattern: Vec<String> = EXPECTED_VERDICTS
        .iter()
        .map(|(m, v)| format!("{m}: {}/{}", v[0], v[1]))
        .collect();
    Ok(format!(
        "SS S = {:.5} ± {:.5}, Q S = {:.5}; 10 seeds match [{}]",
        ss.chsh.s,
        ss.chsh.stderr,
        q.chsh.s,
        pattern.join(", ")
    ))
}

fn non_signaling() -> Outcome {
    let mut worst = 0.0f64;
    let mut cells = 0;
    for (i, model) in ModelId::ALL.into_iter().enumerate() {
        for (j, class) in TimingClass::ALL.into_iter().enumerate() {
            let seed = 700 + (i * 4 + j) as u64;
            let r = run_experiment(&config(model, geometry_for(class), MILLION, seed)).unwrap();
            ensure(r.timing_class == class, || format!("classified {}", r.timing_class))?;
            let z = r.nosignaling.max_abs();
            worst = worst.max(z);
            cells += 4;
            ensure(z < 4.0, || format!("{model} {class}: {:?}", r.nosignaling))?;
        }
    }
    Ok(format!("{cells} marginal z statistics, max |z| = {worst:.3}"))
}

fn frame_invariance() -> Outcome {
    let (a, b) = chsh_settings();
    let grid = [(a[0], b[0]), (a[0], b[1]), (a[1], b[0]), (a[1], b[1])];
    let noise = 3.0 / (MILLION as f64).sqrt();
    let q = timing_dependence_test(ModelId::Quantum, &grid, MILLION, 81).unwrap();
    let l = timing_dependence_test(ModelId::Local, &grid, MILLION, 82).unwrap();
    let ss = timing_dependence_test(ModelId::SuarezScarani, &grid, MILLION, 83).unwrap();
    ensure(q < noise, || format!("quantum TV {q}"))?;
    ensure(l < noise, || format!("local TV {l}"))?;
    ensure(ss >= 0.05, || format!("suarez-scarani TV {ss}"))?;
    Ok(format!("TV quantum {q:.5}, local {l:.5} (< {noise:.4}); suarez-scarani {ss:.5} (>= 0.05)"))
}

fn kinematics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst_interval = 0.0f64;
    let mut worst_scaled = 0.0f64;
    let mut worst_round_trip = 0.0f64;
    let mut over = 0;
    let mut over_null_ratio = 0.0f64;
    for _ in 0..10_000 {
        let mut ev = || SpacetimeEvent::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)).unwrap();
        let (e1, e2) = (ev(), ev());
        let beta = rng.random_range(-0.99..=0.99);
        let frame = InertialFrame::new(beta).unwrap();
        let s = interval_squared(e1, e2);
        let s_boosted = interval_squared(boost(e1, frame), boost(e2, frame));
        let rel = (s_boosted - s).abs() / s.abs();
        let (dt, dz) = (e2.t - e1.t, e2.z - e1.z);
        if rel >= 1e-12 {
            over += 1;
            over_null_ratio = over_null_ratio.max(s.abs() / (dt * dt + dz * dz));
        }
        worst_interval = worst_interval.max(rel);
        worst_scaled = worst_scaled.max((s_boosted - s).abs() / (dt * dt + dz * dz));
        let back = boost(boost(e1, frame), InertialFrame::new(-beta).unwrap());
        let scale = e1.t.abs().max(e1.z.abs()).max(1.0);
        worst_round_trip = worst_round_trip.max((back.t - e1.t).abs().max((back.z - e1.z).abs()) / scale);
    }
    ensure(worst_round_trip < 1e-12, || format!("round trip error {worst_round_trip:e}"))?;
    for (g, want) in [
        (ExperimentGeometry::before_before(), TimingClass::BeforeBefore),
        (ExperimentGeometry::standard(), TimingClass::AliceFirstConsistent),
        (after_after(), TimingClass::AfterAfter),
    ] {
        let got = classify_timing(&g, DEFAULT_EPSILON).unwrap();
        ensure(got == want, || format!("{g:?} -> {got}, want {want}"))?;
    }
    // checked last so the classification and round-trip checks above always run
    ensure(worst_interval < 1e-12, || {
        format!(
            "interval relative error {worst_interval:.2e} ({over}/10000 pairs >= 1e-12, \
             all with |s| / (dt^2 + dz^2) <= {over_null_ratio:.1e}; \
             error / (dt^2 + dz^2) max {worst_scaled:.2e})"
        )
    })?;
    Ok(format!(
        "interval rel err {worst_interval:.1e}, round trip {worst_round_trip:.1e}, 3 worked geometries classified"
    ))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(
        &config_path,
        r#"{
  "geometry": {"source_z": 0, "alice_z": -1, "bob_z": 1, "alice_beta": -0.1, "bob_beta": 0.1, "emission_t": 0},
  "model": "suarez-scarani",
  "alice_settings": [0, 1.5707963267948966],
  "bob_settings": [0.7853981633974483, -0.7853981633974483],
  "trials_per_pair": 100000,
  "seed": 2024,
  "epsilon": 1e-9
}"#,
    )
    .unwrap();
    let (out1, out2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    cli::cmd_run(&config_path, &out1, RunOptions::default()).map_err(|e| e.to_string())?;
    cli::cmd_run(&config_path, &out2, RunOptions { workers: Some(1) }).map_err(|e| e.to_string())?;
    let (csv1, csv2) = (std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    ensure(csv1 == csv2, || "CSV outputs differ".into())?;

    let cfg = config(ModelId::Quantum, ExperimentGeometry::standard(), 250_000, 77);
    let single = run_experiment_with(&cfg, RunOptions { workers: Some(1) }).unwrap();
    let sharded = run_experiment_with(&cfg, RunOptions { workers: Some(4) }).unwrap();
    ensure(single.pairs == sharded.pairs, || "sharded counts differ".into())?;
    Ok(format!("{} identical CSV bytes; 1 vs 4 workers identical counts", csv1.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("local bound is exactly 2", local_bound),
        ("quantum CHSH reaches -2√2", quantum_chsh),
        ("perfect anticorrelation at equal settings", perfect_anticorrelation),
        ("local model never violates", local_never_violates),
        ("nonlocal model matches quantum when time-ordered", nonlocal_model_in_ordered_configs),
        ("before-before removes the nonlocal model's violation", before_before_discriminates),
        ("non-signaling marginals", non_signaling),
        ("frame-invariance discriminator", frame_invariance),
        ("kinematics", kinematics),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {:>2}: {name} ({secs:.1}s) {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {:>2}: {name} ({secs:.1}s) {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
