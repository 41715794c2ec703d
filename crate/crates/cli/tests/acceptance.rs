//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. Tolerances are pinned next to each check.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinlab::chain::{chain_modes, ChainSpec};
use spinlab::correlations::{transfer_report, MeasuredSide};
use spinlab::kraus::{brute_force_channel, propagate_xstate, XState};
use spinlab::manybody::{
    best_concurrence, evolve, prepare_initial, reduced_density_0n, ChannelInit, SweepOptions,
};
use spinlab::schemes::{
    endbond_spectrum_prediction, evaluate_barrier_fields, evaluate_uniform, fit_power_law, rabi_modes,
    scheme_opt_one_bond, scheme_opt_two_bond, scheme_pst, scheme_weak_ends, KnobBounds, SchemeResult,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn random_xstate(rng: &mut ChaCha8Rng) -> XState {
    let raw: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.01..1.0));
    let s: f64 = raw.iter().sum();
    let p = raw.map(|x| x / s);
    let c14 = Complex64::from_polar((p[0] * p[3]).sqrt() * rng.random_range(0.0..1.0), rng.random_range(0.0..6.3));
    let c23 = Complex64::from_polar((p[1] * p[2]).sqrt() * rng.random_range(0.0..1.0), rng.random_range(0.0..6.3));
    XState::new(p[0], p[1], p[2], p[3], c14, c23).unwrap()
}

fn c1_kraus_oracle() -> Verdict {
    const TOL: f64 = 1e-10;
    let spec = ChainSpec::uniform(6).unwrap();
    let modes = chain_modes(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = rng.random_range(0.0..30.0);
        let rho = random_xstate(&mut rng);
        let kraus = propagate_xstate(&rho, modes.amplitude(t)).unwrap();
        let brute = brute_force_channel(&spec, &rho, t).unwrap();
        worst = worst.max(kraus.max_deviation(&brute));
    }
    verdict(worst <= TOL, format!("max deviation {worst:.3e} (tol {TOL:.0e}) over 50 pairs"))
}

fn c2_uniform_benchmark(u1000: &SchemeResult) -> Verdict {
    let n = 1000.0f64;
    let t_ref = n + 0.81 * n.cbrt();
    let c_ok = within(u1000.concurrence, 0.135, 0.010);
    let t_ok = within(u1000.t_star, t_ref, 2.0);
    verdict(
        c_ok && t_ok,
        format!(
            "C = {:.5} (want 0.135 +- 0.010: {}), t* = {:.3} (want {t_ref:.3} +- 2: {})",
            u1000.concurrence,
            ok(c_ok),
            u1000.t_star,
            ok(t_ok)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "off"
    }
}

fn c3_uniform_scaling() -> Verdict {
    let ns = [200, 400, 800, 1600];
    let rs: Vec<SchemeResult> = ns.iter().map(|&n| evaluate_uniform(n).unwrap()).collect();
    let c = fit_power_law(&ns, &rs.iter().map(|r| r.concurrence).collect::<Vec<_>>()).unwrap();
    let dt = fit_power_law(&ns, &rs.iter().map(|r| r.t_star - r.n_sites as f64).collect::<Vec<_>>()).unwrap();
    let e_ok = within(c.exponent, -1.0 / 3.0, 0.04);
    let a_ok = within(c.prefactor, 1.35, 0.15);
    let t_ok = within(dt.exponent, 1.0 / 3.0, 0.05);
    verdict(
        e_ok && a_ok && t_ok,
        format!(
            "C exponent {:.4} ({}), prefactor {:.4} (want 1.35 +- 0.15: {}), t-offset exponent {:.4} ({})",
            c.exponent,
            ok(e_ok),
            c.prefactor,
            ok(a_ok),
            dt.exponent,
            ok(t_ok)
        ),
    )
}

fn c4_pst() -> Verdict {
    let mut worst = 1.0f64;
    for n in [4, 10, 25, 50] {
        let u = chain_modes(&scheme_pst(n).unwrap()).unwrap().amplitude((n + 1) as f64).norm();
        worst = worst.min(u);
    }
    verdict(worst >= 1.0 - 1e-8, format!("min |u(N+1)| = {worst:.15}"))
}

fn c5_one_bond(one: &[(usize, SchemeResult)]) -> Verdict {
    let get = |n: usize| &one.iter().find(|(m, _)| *m == n).unwrap().1;
    let j100 = get(100).knobs["J1"];
    let r1000 = get(1000);
    let offset = r1000.t_star - 1000.0;
    let offset_ref = 1.89 * 1000f64.cbrt();
    let ns: Vec<usize> = one.iter().map(|(n, _)| *n).filter(|n| *n != 1000).collect();
    let js: Vec<f64> = one.iter().filter(|(n, _)| *n != 1000).map(|(_, r)| r.knobs["J1"]).collect();
    let fit = fit_power_law(&ns, &js).unwrap();
    let checks = [
        within(j100, 0.49, 0.05),
        within(r1000.concurrence, 0.89, 0.02),
        within(offset, offset_ref, 0.1 * offset_ref),
        within(fit.exponent, -1.0 / 6.0, 0.05),
    ];
    verdict(
        checks.iter().all(|b| *b),
        format!(
            "J1(100) = {j100:.4} ({}), C(1000) = {:.5} ({}), t*-N = {offset:.3} vs {offset_ref:.3} +- 10% ({}), J1 exponent {:.4} ({})",
            ok(checks[0]),
            r1000.concurrence,
            ok(checks[1]),
            ok(checks[2]),
            fit.exponent,
            ok(checks[3])
        ),
    )
}

fn c6_two_bond(one_1000: &SchemeResult) -> Verdict {
    let ns = [100, 200, 400, 800, 1600];
    let two: Vec<SchemeResult> = ns.iter().map(|&n| scheme_opt_two_bond(n, KnobBounds::default()).unwrap()).collect();
    let two_1000 = scheme_opt_two_bond(1000, KnobBounds::default()).unwrap();
    let j1 = fit_power_law(&ns, &two.iter().map(|r| r.knobs["J1"]).collect::<Vec<_>>()).unwrap();
    let j2 = fit_power_law(&ns, &two.iter().map(|r| r.knobs["J2"]).collect::<Vec<_>>()).unwrap();
    let gap = two_1000.concurrence - one_1000.concurrence;
    let checks = [gap > 0.01, within(j1.exponent, -1.0 / 3.0, 0.07), within(j2.exponent, -1.0 / 6.0, 0.07)];
    verdict(
        checks.iter().all(|b| *b),
        format!(
            "C two-bond {:.5} vs one-bond {:.5} ({}), J1 exponent {:.4} ({}), J2 exponent {:.4} ({})",
            two_1000.concurrence,
            one_1000.concurrence,
            ok(checks[0]),
            j1.exponent,
            ok(checks[1]),
            j2.exponent,
            ok(checks[2])
        ),
    )
}

fn c7_spectrum_prediction() -> Verdict {
    let p = endbond_spectrum_prediction(100, 0.49).unwrap();
    let (dw, dp) = p.max_deviation(&chain_modes(&scheme_weak_ends(100, 0.49).unwrap()).unwrap());
    verdict(dw <= 1e-2 && dp <= 1e-2, format!("max |d omega| = {dw:.3e}, max |d weight| = {dp:.3e} (tol 1e-2)"))
}

fn c8_rabi() -> Verdict {
    let modes = rabi_modes(&scheme_weak_ends(100, 0.01).unwrap()).unwrap();
    let weights = modes.weight_sum();
    let t_r = modes.rabi_time();
    let t_first = modes.first_maximum_time().unwrap();
    let ratio = t_first / t_r;
    let mut problems = Vec::new();
    for n in [10, 20] {
        let mut prev: Option<SchemeResult> = None;
        for dh in 0..=10 {
            let r = evaluate_barrier_fields(n, dh as f64).unwrap();
            if let Some(p) = &prev {
                if r.concurrence < p.concurrence {
                    problems.push(format!("N={n} C drops {:.6} -> {:.6} at dh={dh}", p.concurrence, r.concurrence));
                }
                if r.t_star <= p.t_star {
                    problems.push(format!("N={n} t* not increasing at dh={dh}"));
                }
            }
            prev = Some(r);
        }
    }
    let w_ok = weights > 0.99;
    let t_ok = within(ratio, 1.0, 0.05);
    verdict(
        w_ok && t_ok && problems.is_empty(),
        format!(
            "weak ends: weight sum {weights:.5} ({}), first max / (pi/dw) = {ratio:.4} ({}); barrier: {}",
            ok(w_ok),
            ok(t_ok),
            if problems.is_empty() { "monotone".to_string() } else { problems.join("; ") }
        ),
    )
}

fn rescaled(a: f64, u: f64) -> (f64, f64) {
    let r = transfer_report(&XState::werner(a).unwrap(), Complex64::new(u, 0.0), MeasuredSide::QubitN).unwrap();
    (r.rescaled_discord.unwrap(), r.rescaled_eof.unwrap())
}

fn c9_werner() -> Verdict {
    let mut worst = f64::INFINITY;
    for i in 1..=19 {
        let (d, e) = rescaled(0.4, 0.05 * i as f64);
        worst = worst.min(d - e);
    }
    let gap = |u: f64| {
        let (d, e) = rescaled(1.0, u);
        d - e
    };
    let (mut lo, mut hi) = (0.6, 0.8);
    let bracket = gap(lo).signum() != gap(hi).signum();
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if gap(mid).signum() == gap(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cross = 0.5 * (lo + hi);
    let cross_ok = bracket && within(cross, std::f64::consts::FRAC_1_SQRT_2, 1e-3);
    verdict(
        worst > 0.0 && cross_ok,
        format!("a=0.4 min(D~ - E~) = {worst:.4e}; a=1 crossover at |u| = {cross:.6} ({})", ok(cross_ok)),
    )
}

fn c10_manybody() -> Verdict {
    let spec8 = ChainSpec::uniform(8).unwrap();
    let modes = chain_modes(&spec8).unwrap();
    let prep = prepare_initial(&spec8, ChannelInit::Ferromagnetic, &XState::bell()).unwrap();
    let mut dev = 0.0f64;
    for t in [0.7, 3.1, 8.4, 11.9, 17.3] {
        let rho = reduced_density_0n(&evolve(&prep.branches[0].1, &spec8, t, 1e-12).unwrap());
        let kraus = propagate_xstate(&XState::bell(), modes.amplitude(t)).unwrap().to_matrix();
        dev = dev.max((rho - kraus).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let opts = SweepOptions::default();
    let c_at = |gamma: f64, delta: f64| {
        let spec = ChainSpec::new(vec![1.0; 9], vec![0.0; 10], gamma, delta).unwrap();
        best_concurrence(&spec, ChannelInit::Ferromagnetic, &opts).unwrap().0
    };
    let c0 = c_at(0.0, 0.0);
    let c_gamma = c_at(0.5, 0.0);
    let spread = [0.25, 0.5, 1.0].iter().map(|&d| (c_at(0.0, d) - c0).abs()).fold(0.0, f64::max);
    let checks = [dev <= 1e-8, c0 > c_gamma, spread <= 1e-8];
    verdict(
        checks.iter().all(|b| *b),
        format!(
            "N=8 Kraus match {dev:.3e} ({}); N=10 C(gamma=0) = {c0:.5} vs C(gamma=0.5) = {c_gamma:.5} ({}); max |C(Delta) - C(0)| = {spread:.3e} ({})",
            ok(checks[0]),
            ok(checks[1]),
            ok(checks[2])
        ),
    )
}

const SCENARIOS: [(&str, &str); 8] = [
    ("amplitude", r#"{"version":1,"command":"amplitude","chain":{"scheme":"pst","n":12},"time":{"start":0,"end":20,"samples":401}}"#),
    ("spectrum", r#"{"version":1,"command":"spectrum","chain":{"scheme":"weak_ends","n":40,"knobs":{"J1":0.3}}}"#),
    ("transfer", r#"{"version":1,"command":"transfer","chain":{"scheme":"uniform","n":60},"input_state":{"werner":0.8}}"#),
    ("transfer", r#"{"version":1,"command":"transfer","input_state":{"werner":0.4},"sweep":{"u_abs":[0.2,0.5,0.9]}}"#),
    ("optimize", r#"{"version":1,"command":"optimize","chain":{"scheme":"opt_one_bond","n":30}}"#),
    ("scaling", r#"{"version":1,"command":"scaling","scaling":{"scheme":"uniform","sizes":[20,40,80,160],"quantity":"c"}}"#),
    ("disorder", r#"{"version":1,"command":"disorder","chain":{"scheme":"pst","n":16},"disorder":{"model":"multiplicative","strength":0.05,"trials":24}}"#),
    ("manybody", r#"{"version":1,"command":"manybody","manybody":{"n":5,"axis":"gamma","values":[0,0.4],"h":0.5},"time":{"start":0,"end":8}}"#),
];

fn run_cli(command: &str, config: &Path, out: &Path, seed: u64, workers: usize) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_spinlab"))
        .args([command, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--seed", &seed.to_string(), "--workers", &workers.to_string()])
        .status()
        .unwrap();
    assert!(status.success(), "{command} failed");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c11_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    for (i, (command, json)) in SCENARIOS.iter().enumerate() {
        let config = dir.path().join(format!("s{i}.json"));
        std::fs::write(&config, json).unwrap();
        // Same output directory name, so the config echo is identical too.
        let a = run_cli(command, &config, &dir.path().join("run"), 7, 1);
        std::fs::rename(dir.path().join("run"), dir.path().join(format!("first{i}"))).unwrap();
        let b = run_cli(command, &config, &dir.path().join("run"), 7, 2);
        std::fs::rename(dir.path().join("run"), dir.path().join(format!("second{i}"))).unwrap();
        if a != b || a.is_empty() {
            mismatches.push(format!("scenario {i} ({command})"));
        }
    }
    verdict(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} scenarios byte-identical across reruns", SCENARIOS.len())
        } else {
            format!("differences in {}", mismatches.join(", "))
        },
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |id: usize, f: &mut dyn FnMut() -> Verdict| {
        let started = Instant::now();
        let v = f();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {status} [{:.1} s] {}", started.elapsed().as_secs_f64(), v.detail);
        if !v.pass {
            failures += 1;
        }
    };

    report(1, &mut c1_kraus_oracle);
    report(2, &mut || c2_uniform_benchmark(&evaluate_uniform(1000).unwrap()));
    report(3, &mut c3_uniform_scaling);
    report(4, &mut c4_pst);
    let mut one: Vec<(usize, SchemeResult)> = Vec::new();
    report(5, &mut || {
        one = [100, 200, 400, 800, 1000, 1600]
            .iter()
            .map(|&n| (n, scheme_opt_one_bond(n, KnobBounds::default()).unwrap()))
            .collect();
        c5_one_bond(&one)
    });
    let one_1000 = one.iter().find(|(n, _)| *n == 1000).unwrap().1.clone();
    report(6, &mut || c6_two_bond(&one_1000));
    report(7, &mut c7_spectrum_prediction);
    report(8, &mut c8_rabi);
    report(9, &mut c9_werner);
    report(10, &mut c10_manybody);
    report(11, &mut c11_determinism);

    println!("acceptance: {} of 11 criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
