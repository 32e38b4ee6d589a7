use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orbitlab::action::Action;
use orbitlab::forge::{singleton_ball_violation, PeriodicCoreConfig};
use orbitlab::harness::{sweep, verify, SweepOptions, VerifyOptions};
use orbitlab::instance::Instance;
use orbitlab::measure::{is_almost_persistent, persistent_measure_violation, RationalMeasure};
use orbitlab::metric::validate_metric;
use orbitlab::perm::Perm;
use orbitlab::report::{CheckRecord, VerificationReport};
use orbitlab::stability::{
    b_set, equicontinuity_modulus, gamma_set, perturbations, pointwise_modulus, ShadowingProfile, StabilityProfile,
};
use orbitlab::{Error, Provenance, Rational};

#[derive(Parser)]
#[command(
    name = "orbitlab",
    version,
    about = "Stable and persistent points of finite group actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and summarize it
    Validate(InputArgs),
    /// Shadowing set of one point against a second action
    Gamma {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        epsilon: Rational,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Points whose orbit is shadowed by some orbit of a second action
    Bset {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        epsilon: Rational,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Points that fail to be shadowed under some nearby action
    Cset(ScaleCommand),
    /// Persistent points at one scale
    Persist(ScaleCommand),
    /// Topologically stable points at one scale, with witnesses
    Stable(ScaleCommand),
    /// Equicontinuity modulus for a given epsilon
    Modulus {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        epsilon: Rational,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Restrict to pairs through this point
        #[arg(long)]
        x: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Persistence of measures; Dirac measures unless --weights is given
    Measures {
        #[command(flatten)]
        scale: ScaleCommand,
        /// Comma-separated weights, one per point, e.g. "1/2,0,1/2"
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<Rational>>,
    },
    /// Run every verification check and write a report
    Verify {
        #[command(flatten)]
        scale: ScaleCommand,
        /// Random measures per measure check
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Record wall time per check (breaks byte-identical reports)
        #[arg(long)]
        timings: bool,
    },
    /// Build the periodic-core example, self-check it and save it
    Example318 {
        #[arg(long)]
        t: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the self-check report (default stdout)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Persistent and stable sets over a grid of scales
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<Rational>,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<Rational>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        radii: Vec<usize>,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Instance file
    #[arg(long, required_unless_present = "named", conflicts_with = "named")]
    input: Option<PathBuf>,
    /// Built-in instance: L3 or C6
    #[arg(long)]
    named: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled draws, counting the unperturbed action
    #[arg(long, default_value_t = 100)]
    count: usize,
}

#[derive(Args)]
struct ScaleCommand {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    epsilon: Rational,
    #[arg(long)]
    delta: Rational,
    #[arg(long, default_value_t = 1)]
    radius: usize,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PsiArgs {
    /// Second action: every generator of the first, followed by swapping A and B
    #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "psi_file")]
    psi_swap: Option<Vec<usize>>,
    /// Second action read from an instance file on the same space
    #[arg(long)]
    psi_file: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<Instance, Error> {
        match (&self.input, &self.named) {
            (Some(p), _) => Instance::load(p),
            (None, Some(n)) => Instance::named(n),
            (None, None) => Err(Error::Argument("--input or --named is required".into())),
        }
    }
}

impl ModeArgs {
    fn provenance(&self) -> Provenance {
        match self.mode {
            Mode::Exhaustive => Provenance::Exhaustive,
            Mode::Sample => Provenance::Sampled {
                seed: self.seed,
                count: self.count,
            },
        }
    }
}

impl OutArgs {
    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(p) => fs::write(p, format!("{text}\n"))?,
            None => stdout_line(text)?,
        }
        Ok(())
    }
}

fn stdout_line(text: &str) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

impl PsiArgs {
    fn build(&self, phi: &Action) -> Result<Action, Error> {
        if let Some(ab) = &self.psi_swap {
            let (a, b) = (ab[0], ab[1]);
            if a >= phi.len() || b >= phi.len() {
                return Err(Error::Argument(format!("swap ({a} {b}) out of range")));
            }
            let swap = Perm::transposition(phi.len(), a, b);
            let gens = phi
                .generator_maps()
                .iter()
                .map(|g| swap.after(g).images().to_vec())
                .collect();
            return Action::new(phi.space().clone(), phi.group(), gens);
        }
        if let Some(p) = &self.psi_file {
            let other = Instance::load(p)?.action;
            if !other.space().is_same(phi.space()) || other.group() != phi.group() {
                return Err(Error::Argument(format!(
                    "{} does not share the space and group of the input",
                    p.display()
                )));
            }
            return Ok(other);
        }
        Ok(phi.clone())
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

enum Outcome {
    Done,
    Failed,
}

fn scale_setup(s: &ScaleCommand) -> Result<(Instance, orbitlab::Perturbations), Error> {
    let inst = s.input.load()?;
    let ps = perturbations(&inst.action, &s.delta, s.radius, s.mode.provenance())?;
    Ok((inst, ps))
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Validate(input) => {
            let inst = input.load()?;
            let space = inst.action.space();
            let v = json!({
                "valid": true,
                "fingerprint": inst.fingerprint(),
                "points": space.len(),
                "group": inst.action.group(),
                "generators": inst.action.group().generator_names(),
                "diameter": space.diameter(),
                "distance_levels": space.levels().len(),
            });
            stdout_line(&pretty(&v))?;
        }
        Command::Gamma {
            input,
            x,
            epsilon,
            radius,
            psi,
            out,
        } => {
            let phi = input.load()?.action;
            let psi = psi.build(&phi)?;
            let g = gamma_set(&phi, &psi, x, &epsilon, radius)?;
            out.emit(&pretty(
                &json!({ "x": x, "epsilon": epsilon, "radius": radius, "gamma": g }),
            ))?;
        }
        Command::Bset {
            input,
            epsilon,
            radius,
            psi,
            out,
        } => {
            let phi = input.load()?.action;
            let psi = psi.build(&phi)?;
            let b = b_set(&phi, &psi, &epsilon, radius)?;
            out.emit(&pretty(&json!({ "epsilon": epsilon, "radius": radius, "b_set": b })))?;
        }
        Command::Cset(s) => {
            let (inst, ps) = scale_setup(&s)?;
            let set = ShadowingProfile::compute(&inst.action, &s.epsilon, &ps)?.c_points();
            s.out.emit(&pretty(&json!({ "c_set": set, "notes": ps.notes })))?;
        }
        Command::Persist(s) => {
            let (inst, ps) = scale_setup(&s)?;
            let set = ShadowingProfile::compute(&inst.action, &s.epsilon, &ps)?.persistent_points();
            s.out.emit(&pretty(&json!({ "persistent": set, "notes": ps.notes })))?;
        }
        Command::Stable(s) => {
            let (inst, ps) = scale_setup(&s)?;
            let prof = StabilityProfile::compute(&inst.action, &s.epsilon, &ps)?;
            let witnesses: Vec<Value> = prof
                .witnesses
                .iter()
                .map(|(x, i, w)| json!({ "x": x, "perturbation_index": i, "witness": w }))
                .collect();
            let failures: Vec<Value> = prof
                .failures
                .iter()
                .map(|(x, i, f)| json!({ "x": x, "perturbation_index": i, "anchors": f }))
                .collect();
            s.out.emit(&pretty(&json!({
                "stable": prof.set,
                "witnesses": witnesses,
                "failures": failures,
                "notes": ps.notes,
            })))?;
        }
        Command::Modulus {
            input,
            epsilon,
            radius,
            x,
            out,
        } => {
            let phi = input.load()?.action;
            let m = match x {
                Some(x) => pointwise_modulus(&phi, x, &epsilon, radius)?,
                None => equicontinuity_modulus(&phi, &epsilon, radius)?,
            };
            out.emit(&pretty(
                &json!({ "epsilon": epsilon, "radius": radius, "x": x, "modulus": m }),
            ))?;
        }
        Command::Measures { scale: s, weights } => {
            let (inst, ps) = scale_setup(&s)?;
            let phi = &inst.action;
            let profile = ShadowingProfile::compute(phi, &s.epsilon, &ps)?;
            let p = profile.persistent();
            let measures = match weights {
                Some(w) => vec![RationalMeasure::new(w)?],
                None => (0..phi.len())
                    .map(|x| RationalMeasure::dirac(phi.len(), x))
                    .collect::<Result<_, _>>()?,
            };
            for m in &measures {
                if m.len() != phi.len() {
                    return Err(Error::Argument(format!("{} weights for {} points", m.len(), phi.len())));
                }
            }
            let rows: Vec<Value> = measures
                .iter()
                .map(|m| {
                    let v = persistent_measure_violation(m, &profile);
                    json!({
                        "weights": m.weights(),
                        "persistent": v.is_none(),
                        "first_violating_perturbation": v.map(|i| json!({
                            "index": i,
                            "generators": ps.actions[i].gen_images(),
                        })),
                        "almost_persistent": is_almost_persistent(m, &p),
                    })
                })
                .collect();
            s.out.emit(&pretty(&json!({
                "scale": profile.scale,
                "provenance": profile.provenance,
                "persistent_points": p,
                "measures": rows,
            })))?;
        }
        Command::Verify {
            scale: s,
            trials,
            timings,
        } => {
            let inst = s.input.load()?;
            let opts = VerifyOptions {
                epsilon: s.epsilon.clone(),
                delta: s.delta.clone(),
                radius: s.radius,
                mode: s.mode.provenance(),
                trials,
                seed: s.mode.seed,
                timings,
            };
            let rep = verify(&inst, &opts)?;
            s.out.emit(&rep.to_json())?;
            if !rep.all_passed() {
                return Ok(Outcome::Failed);
            }
        }
        Command::Example318 { t, k, out, report } => {
            let cfg = PeriodicCoreConfig::new(t, k);
            let inst = Instance::periodic_core(&cfg)?;
            let rep = periodic_core_self_checks(&cfg, &inst)?;
            inst.save(&out)?;
            let text = rep.to_json();
            match report {
                Some(p) => fs::write(p, format!("{text}\n"))?,
                None => stdout_line(&text)?,
            }
            if !rep.all_passed() {
                return Ok(Outcome::Failed);
            }
        }
        Command::Sweep {
            input,
            epsilons,
            deltas,
            radii,
            mode,
            out,
        } => {
            let inst = input.load()?;
            let rep = sweep(
                &inst,
                &SweepOptions {
                    epsilons,
                    deltas,
                    radii,
                    mode: mode.provenance(),
                },
            )?;
            out.emit(&rep.to_json())?;
            if !rep.violations.is_empty() {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn periodic_core_self_checks(cfg: &PeriodicCoreConfig, inst: &Instance) -> Result<VerificationReport, Error> {
    let phi = &inst.action;
    let mut metric = CheckRecord::new("periodic_core_metric", "d is a metric on the truncated space");
    let violations = validate_metric(phi.space().matrix())?;
    metric.counterexamples = violations.iter().map(|v| json!(v)).collect();
    metric.details = json!({ "points": phi.len(), "triples_checked": phi.len().pow(3) });

    let mut balls = CheckRecord::new(
        "periodic_core_isolated_levels",
        "B(f^i(z), ε) = {f^i(z)} for z ∈ E, ε < 1/k",
    );
    let radii = |k: usize| {
        let k = k as i64;
        vec![
            Rational::new(1, k + 1),
            &Rational::new(1, k) - &Rational::new(1, k * (k + 1)),
        ]
    };
    if let Some((z, eps)) = singleton_ball_violation(cfg, phi, radii)? {
        balls.counterexamples.push(json!({ "point": z, "epsilon": eps }));
    }

    let mut cycles = CheckRecord::new("periodic_core_shift", "f(q(i,k,j)) = q(i,k,j+1 mod t)");
    let f = &phi.generator_maps()[0];
    for x in 0..phi.len() {
        let orbit = phi.orbit(x, cfg.t)?;
        if orbit.points.len() != cfg.t || f.pow(cfg.t as u64).apply(x) != x {
            cycles
                .counterexamples
                .push(json!({ "point": x, "orbit": orbit.points }));
        }
    }
    cycles.details = json!({ "period": cfg.t, "depth": cfg.k_max });

    let checks = vec![metric.conclude(false), balls.conclude(false), cycles.conclude(false)];
    Ok(VerificationReport::new(inst.fingerprint(), checks))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
