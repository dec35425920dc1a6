//! Acceptance gate: each test drives one shipped guarantee end to end and
//! prints a single `ACCEPTANCE NN <name>: PASS` line on success (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use decaylab::numerics::golden_max;
use decaylab::obscheck::{
    check_kinetic_feedback_bound, check_observation_transfer, check_velocity_comparison,
    observation_functional,
};
use decaylab::seqlab::sample_instances;
use decaylab::wavesim::{energy_identity_residual, solve};
use decaylab::weight::linear_decay_multiplier;
use decaylab::{
    CoefficientField, DampingLaw, DataSet, DecayEnvelope, DecayKernel, Dynamics, EnvelopeSpec,
    GrowthFunc, GrowthSpec, InitialData, Scheme, SequenceInstance, WaveConfig, WeightSystem,
};

fn pass(number: u32, name: &str) {
    println!("ACCEPTANCE {number:02} {name}: PASS");
}

fn cubic_weight_system() -> WeightSystem {
    WeightSystem::new(DampingLaw::power(3.0, None).unwrap(), 1.0).unwrap()
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[test]
fn c01_weight_closed_form() {
    // g(x) = x^3 gives R(x) = x^2, conjugate y^2/4, and interior weight 4s
    // at normalization 1.
    let ws = cubic_weight_system();
    let top = 0.5 * ws.r0sq();
    for i in 0..1000 {
        let s = top * i as f64 / 999.0;
        let f = ws.weight_f(s).unwrap();
        let want = 4.0 * s;
        assert!(
            (f - want).abs() <= 1e-8 * want.max(1.0),
            "f({s}) = {f}, closed form {want}"
        );
    }
    pass(1, "interior weight matches the conjugate closed form");
}

#[test]
fn c02_fenchel_young_and_biconjugation() {
    let ws = cubic_weight_system();
    // y up to 4 covers both conjugate regimes (stationary below R'(r0^2) = 2,
    // boundary above).
    let mut violations = 0usize;
    for i in 0..256 {
        let x = ws.r0sq() * i as f64 / 255.0;
        let Some(r) = ws.eval_r(x).unwrap().finite() else { continue };
        for j in 0..256 {
            let y = 4.0 * j as f64 / 255.0;
            let conj = ws.conjugate_r(y).unwrap();
            // cushion only absorbs evaluation rounding; the inequality is exact
            if x * y > r + conj + 1e-10 * (x * y).max(1.0) {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0, "{violations} Fenchel-Young violations on the 256x256 grid");
    for i in 1..=256 {
        let x = ws.r0sq() * i as f64 / 256.0;
        let r = ws.eval_r(x).unwrap().finite().unwrap();
        let (_, best) = golden_max(|y| x * y - ws.conjugate_r(y).unwrap(), 0.0, 8.0, 1e-11);
        assert!(
            (best - r).abs() <= 1e-6 * r.max(1e-12),
            "biconjugate drifts at x = {x}: sup {best:e}, direct {r:e}"
        );
    }
    pass(2, "Fenchel-Young holds and biconjugation recovers the transform");
}

#[test]
fn c03_psi_fixed_point_and_identity_closed_form() {
    // psi fixes z0 = 1/m^{-1}(r) for every composite flavor.
    let env = EnvelopeSpec::new(2.0, 0.5, 1.0, 0.4, 0.5).unwrap();
    let composites = [
        GrowthSpec::identity(),
        GrowthSpec::weak_norm_ratio(GrowthFunc::power(1.0, 2.0).unwrap(), 0.25).unwrap(),
        GrowthSpec::energy_ratio(GrowthFunc::power(1.0, 1.0).unwrap()).unwrap(),
    ];
    for gs in composites {
        let kernel = DecayKernel::new(cubic_weight_system(), gs, &env).unwrap();
        let z0 = kernel.z0();
        let psi = kernel.psi(z0).unwrap();
        assert!((psi - z0).abs() <= 1e-10, "psi({z0}) = {psi}");
    }
    // Identity map at radius 1: K_r(tau) = 1/tau - 1, so psi(z) = 2z - 1.
    let env = EnvelopeSpec::new(2.0, 0.5, 1.0, 1.0, 1.5).unwrap();
    let kernel = DecayKernel::from_map(GrowthFunc::Identity, &env).unwrap();
    assert!((kernel.z0() - 1.0).abs() <= 1e-12);
    for i in 0..200 {
        let z = 1.0 + 49.0 * i as f64 / 199.0;
        let psi = kernel.psi(z).unwrap();
        let want = 2.0 * z - 1.0;
        assert!(
            (psi - want).abs() <= 1e-8 * want.max(1.0),
            "psi({z}) = {psi}, closed form {want}"
        );
    }
    pass(3, "psi fixes z0 and matches the identity-map closed form");
}

#[test]
fn c04_conservative_observation_identity() {
    // a = 1, T = 2: every sine mode completes full periods over the window,
    // so the observation functional equals twice the conserved energy.
    let field = CoefficientField::constant(1.0).unwrap();
    let law = DampingLaw::linear();
    for m in 1..=16 {
        let data = InitialData::single_mode(m, 1.0, 0.5);
        let config = WaveConfig {
            n: 64,
            dt: 0.25,
            t_final: 0.5,
            scheme: Scheme::Spectral,
            modes: 64,
            dynamics: Dynamics::Conservative,
            law: law.clone(),
            field: field.clone(),
            stride: 1,
        };
        let (_, trace) = solve(&config, &data, None).unwrap();
        let energy = trace.energies[0];
        let functional = observation_functional(&field, &data, 128, 2.0, 2560).unwrap().value;
        let want = 2.0 * energy;
        assert!(
            (functional - want).abs() <= 1e-6 * want,
            "mode {m}: functional {functional}, twice the energy {want}"
        );
    }
    pass(4, "conservative observation equals twice the energy");
}

#[test]
fn c05_energy_identity_second_order() {
    let law = DampingLaw::power(3.0, None).unwrap();
    let field = CoefficientField::constant(1.0).unwrap();
    let data = InitialData::single_mode(1, 0.0, 3.0);
    let residual_at = |dt: f64, stride: usize| {
        let config = WaveConfig {
            n: 1024,
            dt,
            t_final: 2.0,
            scheme: Scheme::Leapfrog,
            modes: 1024,
            dynamics: Dynamics::NonlinearDamped,
            law: law.clone(),
            field: field.clone(),
            stride,
        };
        let (_, trace) = solve(&config, &data, None).unwrap();
        energy_identity_residual(&trace)
    };
    // matched stride keeps the sampled times identical across the halving
    let coarse = residual_at(1.0 / 2048.0, 8);
    let fine = residual_at(1.0 / 4096.0, 16);
    assert!(coarse <= 1e-3, "residual {coarse} at dt = 1/2048");
    let ratio = coarse / fine;
    assert!(
        (3.0..=5.0).contains(&ratio),
        "halving dt scaled the residual by {ratio}, want second order"
    );
    pass(5, "energy identity residual is small and second order in dt");
}

#[test]
fn c06_comparison_chain_on_random_instances() {
    // A sequence strictly below the recurrence stays below the Euler
    // majorant, which stays below the comparison ODE, out to k = 1000.
    let instances = sample_instances(11, 200);
    assert_eq!(instances.len(), 200);
    for (i, inst) in instances.iter().enumerate() {
        let (_, escaped) = inst.euler_sequence(1000);
        assert!(escaped.is_none(), "instance {i} escaped its radius");
        let mut values = Vec::with_capacity(1001);
        let mut y = inst.e0();
        for _ in 0..=1000 {
            values.push(y);
            y = 0.95 * (y - inst.rho_t() * inst.map_value(y));
        }
        let report = inst.check_chain(&values).unwrap();
        assert!(report.premise_ok, "instance {i}: {:?}", report.premise_detail);
        assert!(
            report.first_violation.is_none(),
            "instance {i} violated the chain at index {:?}",
            report.first_violation
        );
    }
    pass(6, "comparison chain clean on 200 seeded instances");
}

#[test]
fn c07_explicit_bound_on_saturating_sequences() {
    // The mandated ratio maps coincide at p = 3 (2/(p-1) = 1); drive both
    // construction paths anyway.
    let maps = [GrowthFunc::Identity, GrowthFunc::power(1.0, 2.0 / (3.0 - 1.0)).unwrap()];
    for func in maps {
        let inst = SequenceInstance::from_growth(0.05, 1.0, 2.0, func).unwrap();
        let env = EnvelopeSpec::new(2.0, 0.5, 1.0, 0.3, 0.5).unwrap();
        let (values, escaped) = inst.euler_sequence(200);
        assert!(escaped.is_none());
        let report = inst.discretcont_bound(&env, &values).unwrap();
        assert!(report.premise_ok, "{:?}", report.premise_detail);
        assert!(
            report.threshold_time <= 4.0,
            "bound only takes effect at {}",
            report.threshold_time
        );
        for entry in &report.entries {
            if entry.time < 4.0 {
                continue;
            }
            let bound = entry.bound.expect("bound defined from 2T on");
            assert!(
                entry.value <= bound * (1.0 + 1e-9),
                "t = {}: value {} above bound {bound}",
                entry.time,
                entry.value
            );
        }
    }
    pass(7, "sequences saturating the recurrence obey the explicit bound");
}

#[test]
fn c08_envelope_slope_matches_the_power() {
    for (p, want) in [(2.0, -2.0), (3.0, -1.0), (5.0, -0.5)] {
        let ws = WeightSystem::new(DampingLaw::power(p, None).unwrap(), 1.0).unwrap();
        let spec = EnvelopeSpec::new(2.0, 0.5, 1.0, 0.4, 0.5).unwrap();
        let envelope = DecayEnvelope::new(ws, GrowthSpec::identity(), spec).unwrap();
        let points: Vec<(f64, f64)> = log_grid(1e3, 1e6, 31)
            .into_iter()
            .map(|t| {
                let value = envelope.eval(t).unwrap().value().expect("past threshold");
                (t.ln(), value.ln())
            })
            .collect();
        let slope = least_squares_slope(&points);
        assert!(
            (slope - want).abs() <= 0.05 * want.abs(),
            "p = {p}: slope {slope}, want {want}"
        );
    }
    pass(8, "log-log envelope slope tracks -2/(p - 1) within 5%");
}

#[test]
fn c09_logarithmic_envelope_and_linear_norm_shape() {
    // H(x) = exp(-2 x^{-1/2}): the companion envelope decays like
    // C / ln(1+t)^2, and the linear multiplier is exactly (ln(1+t)/2)^{-2}.
    let func = GrowthFunc::exp_neg_power(2.0, 0.5).unwrap();
    let gs = GrowthSpec::energy_ratio(func).unwrap();
    let spec = EnvelopeSpec::new(2.0, 0.5, 1.0, 0.4, 0.5).unwrap();
    let envelope = DecayEnvelope::new(cubic_weight_system(), gs.clone(), spec).unwrap();
    let grid = log_grid(1e2, 1e8, 61);
    let rescaled: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let value = envelope.eval(t).unwrap().value().expect("past threshold");
            value * (1.0 + t).ln().powi(2)
        })
        .collect();
    let max = rescaled.iter().copied().fold(f64::MIN, f64::max);
    let min = rescaled.iter().copied().fold(f64::MAX, f64::min);
    assert!(min > 0.0);
    assert!(
        max / min <= 100.0,
        "envelope leaves the factor-10 band around C/ln(1+t)^2: spread {}",
        max / min
    );
    for &t in &grid {
        let multiplier = linear_decay_multiplier(&gs, t, 1.0).unwrap();
        let shape = multiplier.sqrt() * (1.0 + t).ln();
        assert!(
            (shape - 2.0).abs() <= 1e-9 * 2.0,
            "t = {t}: sqrt multiplier * ln(1+t) = {shape}, want the constant 2"
        );
    }
    pass(9, "companion envelope and linear norm follow the log shapes");
}

#[test]
fn c10_lemma_constants_on_the_full_suite() {
    let law = DampingLaw::power(3.0, None).unwrap();
    let ws = WeightSystem::new(law.clone(), 1.0).unwrap();
    let field = CoefficientField::constant(1.0).unwrap();
    let mut data = DataSet::deterministic(8);
    for (label, datum) in DataSet::random(77, 50, 16).entries() {
        data.push(label.clone(), datum.clone());
    }
    let (grid, horizon, dt, samples) = (128, 2.0, 1.0 / 130.0, 1280);
    let mut failures = Vec::new();
    for (label, datum) in data.entries() {
        for report in [
            check_velocity_comparison(&law, &field, datum, horizon, grid, dt).unwrap(),
            check_observation_transfer(&law, &field, datum, horizon, grid, dt, samples).unwrap(),
            check_kinetic_feedback_bound(&ws, &field, datum, horizon, grid, dt).unwrap(),
        ] {
            if !report.pass {
                failures.push(format!("{label}: {} (margin {})", report.label, report.margin));
            }
        }
    }
    assert!(failures.is_empty(), "lemma inequalities failed:\n{}", failures.join("\n"));
    pass(10, "lemma constants hold on the deterministic plus random suite");
}

const COMPARE_CONFIG: &str = r#"task = "compare"
out = "out"
seed = 42

[law]
family = "power"
p = 3.0

[coefficient]
kind = "bump"
omega = [0.4, 0.6]
a0 = 1.0
amax = 1.0

[growth]
kind = "identity"
beta_obs = 0.5

[envelope]
horizon = 2.0
time_scale = 0.5
gain = 1.0
r = 0.4
eta = 0.5
beta = 1.0

[simulation]
n = 256
dt = 0.0019455252918287938
t_final = 12.0
scheme = "leapfrog"
stride = 64

[simulation.data]
kind = "single_mode"
mode = 1
position = 0.0
velocity = 3.0
"#;

#[test]
fn c11_end_to_end_compare_is_dominated_and_deterministic() {
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-compare");
    fs::create_dir_all(&base).unwrap();
    let config_path = base.join("compare.toml");
    fs::write(&config_path, COMPARE_CONFIG).unwrap();
    let out1 = base.join("run1");
    let out2 = base.join("run2");
    for out in [&out1, &out2] {
        if out.exists() {
            fs::remove_dir_all(out).unwrap();
        }
    }
    let run = |out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_decaylab"))
            .arg("compare")
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap()
    };
    let first = run(&out1);
    assert!(
        first.status.success(),
        "compare exited nonzero: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = run(&out2);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout, "stdout differs between reruns");

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("compare.json")).unwrap()).unwrap();
    assert_eq!(summary["holds"], serde_json::Value::Bool(true));
    assert!(summary["samples_checked"].as_u64().unwrap() > 0, "no samples past the threshold");
    assert_eq!(summary["vacuous"], serde_json::Value::Bool(false));

    let names = |dir: &Path| {
        let mut v: Vec<String> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    let files = names(&out1);
    assert_eq!(files, names(&out2));
    assert!(!files.is_empty());
    for name in &files {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
    pass(11, "localized compare run is dominated and byte-identical");
}
