//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{b_set, corpus, dirac_persistent, family, gamma, gen, r};
use orbitlab::conjugacy::{verify_persistent_conjugacy, verify_stable_conjugacy};
use orbitlab::forge::{build_named, build_periodic_core_example, singleton_ball_violation, PeriodicCoreConfig};
use orbitlab::harness::{random_bijection, sweep, SweepOptions};
use orbitlab::instance::Instance;
use orbitlab::measure::{
    persistent_measure_violation, verify_dirac_and_convexity, verify_full_persistence_biconditional, RationalMeasure,
};
use orbitlab::metric::validate_metric;
use orbitlab::report::Verdict;
use orbitlab::stability::{
    audit_witness, equicontinuity_modulus, gamma_set, perturbations, verify_closure_shadow,
    verify_stable_implies_persistent, ShadowingProfile, StabilityProfile,
};
use orbitlab::{Action, Provenance, Rational};

const EX: Provenance = Provenance::Exhaustive;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, start: Instant) -> Result<(), String> {
    let el = start.elapsed();
    ensure(el < budget, || format!("took {el:?}, budget {budget:?}"))
}

fn grid_eps() -> Vec<Rational> {
    ["1/4", "1/2", "1", "2"].iter().map(|s| r(s)).collect()
}

fn grid_delta() -> Vec<Rational> {
    ["0", "1/2", "1"].iter().map(|s| r(s)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut triples = 0usize;
    for (t, k) in [(2, 3), (3, 4), (5, 2)] {
        let cfg = PeriodicCoreConfig::new(t, k);
        let phi = build_periodic_core_example(&cfg).map_err(|e| format!("({t},{k}): {e}"))?;
        let s = phi.space();
        let n = s.len();
        ensure(n == t + 3 * k * t, || format!("({t},{k}): {n} points"))?;
        ensure(validate_metric(s.matrix()).unwrap().is_empty(), || {
            format!("({t},{k}): metric invalid")
        })?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    triples += 1;
                    ensure(s.dist(a, c) <= &(s.dist(a, b) + s.dist(b, c)), || {
                        format!("({t},{k}): triangle fails at {a},{b},{c}")
                    })?;
                }
            }
        }
        let f = gen(&phi);
        let mut seen = f.clone();
        seen.sort();
        ensure(seen == (0..n).collect::<Vec<_>>(), || "f is not a bijection".into())?;
        ensure(
            Action::new(s.clone(), orbitlab::GroupModel::Integers, vec![f]).is_ok(),
            || "f is not a valid integer action".into(),
        )?;
        let radii = |k: usize| {
            let k = k as i64;
            vec![
                Rational::new(1, k + 1),
                &Rational::new(1, k) - &Rational::new(1, k * (k + 1)),
            ]
        };
        if let Some((z, e)) = singleton_ball_violation(&cfg, &phi, radii).unwrap() {
            return Err(format!("({t},{k}): open ball at {z} of radius {e} is not a singleton"));
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{triples} triples checked"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut families = 0usize;
    let mut gammas = 0usize;
    for entry in corpus() {
        let phi = &entry.action;
        let (space, group, p) = (phi.space(), phi.group(), gen(phi));
        for d in grid_delta() {
            let ps = perturbations(phi, &d, entry.radius, EX).map_err(|e| e.to_string())?;
            let got: BTreeSet<Vec<usize>> = ps.iter().map(gen).collect();
            ensure(got.len() == ps.len(), || "duplicate perturbations".into())?;
            let want = family(space, group, &p, &d, entry.radius);
            ensure(got == want, || {
                format!("family mismatch for base {p:?} at δ={d}: {got:?} vs {want:?}")
            })?;
            families += 1;
            for psi in ps.iter() {
                let q = gen(psi);
                for x in 0..p.len() {
                    for e in grid_eps() {
                        let lib = gamma_set(phi, psi, x, &e, entry.radius).unwrap();
                        ensure(lib == gamma(space, group, &p, &q, x, &e, entry.radius), || {
                            format!("gamma mismatch base {p:?} psi {q:?} x={x} ε={e}")
                        })?;
                        gammas += 1;
                    }
                }
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{families} families and {gammas} shadowing sets agree"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut cells = 0usize;
    for entry in corpus() {
        let phi = &entry.action;
        for d in grid_delta() {
            let ps = perturbations(phi, &d, entry.radius, EX).unwrap();
            for e in grid_eps() {
                let p = ShadowingProfile::compute(phi, &e, &ps)
                    .unwrap()
                    .persistent_points()
                    .members;
                let oracle = dirac_persistent(phi, &e, &d, entry.radius);
                ensure(p == oracle, || {
                    format!(
                        "base {:?} at (ε={e}, δ={d}): {p:?} vs Dirac oracle {oracle:?}",
                        gen(phi)
                    )
                })?;
                let rec = verify_dirac_and_convexity(phi, &e, &d, entry.radius, EX, 5, cells as u64).unwrap();
                ensure(rec.passed(), || {
                    format!("dirac check failed: {:?}", rec.counterexamples)
                })?;
                cells += 1;
            }
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{cells} scales agree"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let entries = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut combos = 0usize;
    while combos < 200 {
        let entry = &entries[rng.gen_range(0..entries.len())];
        let phi = &entry.action;
        let e = grid_eps()[rng.gen_range(0..4)].clone();
        let d = grid_delta()[rng.gen_range(0..3)].clone();
        let persistent: Vec<usize> = dirac_persistent(phi, &e, &d, entry.radius).into_iter().collect();
        if persistent.is_empty() {
            continue;
        }
        let k = rng.gen_range(1..=persistent.len());
        let mut units = vec![1i64; k];
        for _ in 0..64 - k {
            units[rng.gen_range(0..k)] += 1;
        }
        let diracs: Vec<RationalMeasure> = (0..k)
            .map(|i| RationalMeasure::dirac(phi.len(), persistent[i]).unwrap())
            .collect();
        let parts: Vec<(Rational, &RationalMeasure)> = units
            .iter()
            .zip(&diracs)
            .map(|(&u, m)| (Rational::new(u, 64), m))
            .collect();
        let mu = RationalMeasure::convex_combination(&parts).unwrap();
        let ps = perturbations(phi, &d, entry.radius, EX).unwrap();
        let profile = ShadowingProfile::compute(phi, &e, &ps).unwrap();
        ensure(persistent_measure_violation(&mu, &profile).is_none(), || {
            format!("combination {:?} not persistent", mu.weights())
        })?;
        // oracle: the support lies in every B(ε, Φ, Ψ)
        let (space, group, p) = (phi.space(), phi.group(), gen(phi));
        for q in family(space, group, &p, &d, entry.radius) {
            let b = b_set(space, group, &p, &q, &e, entry.radius);
            ensure(mu.support().is_subset(&b), || "oracle disagrees".into())?;
        }
        combos += 1;
    }
    let mut biconditionals = 0usize;
    for entry in &entries {
        let phi = &entry.action;
        for d in grid_delta() {
            for e in grid_eps() {
                let rec = verify_full_persistence_biconditional(phi, &e, &d, entry.radius, EX, 10, 9).unwrap();
                ensure(rec.passed(), || {
                    format!("biconditional failed: {:?}", rec.counterexamples)
                })?;
                let all = dirac_persistent(phi, &e, &d, entry.radius).len() == phi.len();
                ensure(rec.details["p_is_whole_space"] == all, || {
                    "P = X disagrees with oracle".into()
                })?;
                biconditionals += 1;
            }
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{combos} combinations, {biconditionals} biconditionals"))
}

fn chain(
    phi: &Action,
    eps: &Rational,
    radius: usize,
    expect_delta: Option<&Rational>,
    label: &str,
) -> Result<(), String> {
    let rec = verify_stable_implies_persistent(phi, eps, radius, EX).map_err(|e| e.to_string())?;
    let eta: Rational = rec.details["eta"].as_str().unwrap().parse().unwrap();
    if let Some(d) = expect_delta {
        ensure(&eta == d, || format!("{label}: δ = {eta}, expected {d}"))?;
    }
    ensure(rec.verdict == Verdict::Pass, || {
        format!(
            "{label}: verdict {} (modulus(ε/2) = {eta}), counterexamples {:?}",
            rec.verdict, rec.counterexamples
        )
    })?;
    // independent re-audit of every witness and of the inclusion
    let ps = perturbations(phi, &eta, radius, EX).unwrap();
    let stable = StabilityProfile::compute(phi, &eta, &ps).unwrap();
    for (_, i, w) in &stable.witnesses {
        audit_witness(phi, &ps.actions[*i], w, &eta, radius).map_err(|e| format!("{label}: {e}"))?;
    }
    let persistent = ShadowingProfile::compute(phi, eps, &ps).unwrap().persistent();
    ensure(stable.set.members.is_subset(&persistent), || {
        format!("{label}: stable ⊄ persistent")
    })
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let c6 = build_named("C6").unwrap();
    let mut failures = Vec::new();
    for eps in ["1", "2"] {
        if let Err(e) = chain(&c6, &r(eps), 3, None, &format!("C6 ε={eps}")) {
            failures.push(e);
        }
    }
    let ex = build_periodic_core_example(&PeriodicCoreConfig::new(2, 3)).unwrap();
    if let Err(e) = chain(&ex, &r("1/4"), 1, Some(&r("1/8")), "periodic core (2,3) ε=1/4") {
        failures.push(e);
    }
    within(Duration::from_secs(120), start)?;
    if failures.is_empty() {
        Ok("C6 at ε ∈ {1, 2} and the periodic core at ε = 1/4 pass".into())
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("L3", r("1/2"), r("1"), 1, EX),
        ("C6", r("1/2"), r("1"), 3, Provenance::Sampled { seed: 6, count: 200 }),
    ];
    let mut runs = 0usize;
    for (name, e, d, radius, mode) in cases {
        let phi = build_named(name).unwrap();
        for seed in 0..5 {
            let bij = random_bijection(phi.len(), seed);
            for rec in [
                verify_stable_conjugacy(&phi, &e, &d, radius, mode, &bij).unwrap(),
                verify_persistent_conjugacy(&phi, &e, &d, radius, mode, &bij).unwrap(),
            ] {
                ensure(rec.verdict == Verdict::Pass, || {
                    format!("{name} {}: {} {:?}", rec.check, rec.verdict, rec.counterexamples)
                })?;
                runs += 1;
            }
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{runs} transports preserve the sets exactly"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let radii = vec![1, 2, 3];
    let mut audits = 0usize;
    let instances = [
        (Instance::named("L3").unwrap(), grid_eps(), grid_delta()),
        (Instance::named("C6").unwrap(), grid_eps(), grid_delta()),
        (
            Instance::periodic_core(&PeriodicCoreConfig::new(2, 3)).unwrap(),
            ["1/8", "1/4", "1/2"].iter().map(|s| r(s)).collect(),
            ["0", "1/8", "1/4"].iter().map(|s| r(s)).collect(),
        ),
    ];
    for (inst, epsilons, deltas) in instances {
        let rep = sweep(
            &inst,
            &SweepOptions {
                epsilons,
                deltas,
                radii: radii.clone(),
                mode: EX,
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(rep.violations.is_empty(), || {
            format!("violations: {:?}", rep.violations)
        })?;
        audits += rep.audits_run;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("{audits} monotonicity audits, no violations"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let c6 = build_named("C6").unwrap();
    let mut pass = 0usize;
    let mut vacuous = 0usize;
    for radius in [1, 2, 3] {
        for d in grid_delta() {
            for e in grid_eps() {
                let rec = verify_closure_shadow(&c6, &e, &d, radius, EX).unwrap();
                ensure(rec.passed(), || {
                    format!("(ε={e}, δ={d}, R={radius}): {:?}", rec.counterexamples)
                })?;
                // oracle: brute-force persistent sets and the modulus definition
                let eta = equicontinuity_modulus(&c6, &e.half(), radius).unwrap();
                let half = dirac_persistent(&c6, &e.half(), &d, radius);
                let full = dirac_persistent(&c6, &e, &d, radius);
                for &xp in &half {
                    for x in 0..6 {
                        if c6.space().dist(x, xp) <= &eta {
                            ensure(full.contains(&x), || format!("oracle: {x} near {xp} not persistent"))?;
                        }
                    }
                }
                match rec.verdict {
                    Verdict::Pass => pass += 1,
                    _ => vacuous += 1,
                }
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{pass} scales pass, {vacuous} vacuous (zero modulus)"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_orbitlab");
    let instances = [
        ("l3", Instance::named("L3").unwrap(), ["1/2", "1", "1"], "exhaustive"),
        ("c6", Instance::named("C6").unwrap(), ["2", "1", "3"], "sample"),
        (
            "core",
            Instance::periodic_core(&PeriodicCoreConfig::new(2, 3)).unwrap(),
            ["1/4", "1/8", "1"],
            "exhaustive",
        ),
    ];
    let mut runs = 0usize;
    for (name, inst, [e, d, radius], mode) in instances {
        let path = dir.path().join(format!("{name}.json"));
        inst.save(&path).unwrap();
        let mut outputs = Vec::new();
        for rep in 0..3 {
            let out = dir.path().join(format!("{name}-{rep}.json"));
            let status = Command::new(bin)
                .args(["verify", "--input"])
                .arg(&path)
                .args(["--epsilon", e, "--delta", d, "--radius", radius, "--mode", mode])
                .args(["--seed", "17", "--count", "50", "--trials", "30", "--out"])
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            ensure(status.code() == Some(0), || format!("{name}: exit {status}"))?;
            outputs.push(std::fs::read(&out).unwrap());
            runs += 1;
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{name}: reports differ")
        })?;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{runs} runs, byte-identical per instance"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("periodic-core example fidelity", criterion_1),
        (
            "exhaustive perturbations and shadowing sets match brute force",
            criterion_2,
        ),
        (
            "persistent points are the points with persistent Dirac measures",
            criterion_3,
        ),
        (
            "convexity of persistent measures and the full-persistence biconditional",
            criterion_4,
        ),
        ("stable points are persistent at the derived scale", criterion_5),
        ("conjugacy invariance of stable and persistent sets", criterion_6),
        ("sweep monotonicity audits", criterion_7),
        ("closure of persistent points under equicontinuity", criterion_8),
        ("deterministic verify reports", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {}: PASS  {name} ({msg}; {secs:.2}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({msg}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
