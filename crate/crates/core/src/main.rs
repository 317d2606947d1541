use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use posetmono::classify::{self, Evidence, Kind};
use posetmono::feasibility::{self, MapDistribution};
use posetmono::measures::{self, MeasureSystem};
use posetmono::poset::DEFAULT_MAP_BOUND;
use posetmono::rational::{self, Q};
use posetmono::transform::format_transform;
use posetmono::{enumerate, fixtures, format, glued, markov, rit, sampling, Error, Poset};

#[derive(Parser)]
#[command(name = "posetmono", version, about = "Stochastic and realizable monotonicity on finite posets")]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    /// Cap on the number of monotone maps any LP may enumerate.
    #[arg(long, default_value_t = DEFAULT_MAP_BOUND, global = true)]
    bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Acyclic, Y-glued bipartite, W-glued diamond, or Fails.
    Classify { poset: PathBuf },
    /// Massey's criterion for a generator, and monotonicity of its uniformized kernel.
    CheckSm {
        generator: PathBuf,
        /// Uniformization rate; defaults to twice the largest exit rate.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Whether a generator splits into jump rates on monotone maps.
    CheckRm { generator: PathBuf },
    /// Jump rates on monotone maps, with the uniformized kernel rebuilt from them.
    Decompose { generator: PathBuf },
    /// A sample path of the chain.
    Simulate {
        generator: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "10")]
        horizon: String,
        /// Initial state; defaults to the first state.
        #[arg(long)]
        start: Option<String>,
    },
    /// A law on monotone maps realizing `theta P + (1 - theta) I`.
    Realize { poset: PathBuf, system: PathBuf },
    /// Recursive inverse transforms for a system on a W-class poset.
    RealizeW {
        poset: PathBuf,
        system: PathBuf,
        /// Root of the tree; defaults to the first maximal element.
        #[arg(long)]
        root: Option<String>,
    },
    /// An ordered coupling of two measures.
    Couple { poset: PathBuf, first: PathBuf, second: PathBuf },
    /// The shipped counterexample systems.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
    /// Verdicts over every connected poset up to a size.
    Sweep {
        #[arg(long, default_value_t = 5)]
        max_elements: usize,
        /// Random stochastically monotone kernels to test per poset whose
        /// verdict is not Fails.
        #[arg(long, default_value_t = 0)]
        kernels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    Check,
}

struct Report {
    fields: Vec<(String, Value)>,
    ok: bool,
}

impl Report {
    fn new(command: String, digest: String) -> Report {
        Report {
            fields: vec![("command".into(), Value::String(command)), ("inputs".into(), Value::String(digest))],
            ok: true,
        }
    }

    fn text(&mut self, key: &str, value: impl Into<String>) {
        self.fields.push((key.into(), Value::String(value.into())));
    }

    fn q(&mut self, key: &str, value: &Q) {
        self.text(key, rational::format(value));
    }

    fn flag(&mut self, key: &str, value: bool) {
        self.fields.push((key.into(), Value::Bool(value)));
    }

    fn lines(&mut self, key: &str, lines: Vec<String>) {
        self.fields.push((key.into(), Value::Array(lines.into_iter().map(Value::String).collect())));
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let map: Map<String, Value> = self.fields.iter().cloned().collect();
                format!("{}\n", serde_json::to_string_pretty(&Value::Object(map)).unwrap())
            }
            OutputFormat::Text => {
                let mut out = String::new();
                for (key, value) in &self.fields {
                    match value {
                        Value::Array(items) => {
                            let _ = writeln!(out, "{key}:");
                            for item in items {
                                let _ = writeln!(out, "  {}", item.as_str().unwrap_or_default());
                            }
                        }
                        Value::String(s) => {
                            let _ = writeln!(out, "{key}: {s}");
                        }
                        other => {
                            let _ = writeln!(out, "{key}: {other}");
                        }
                    }
                }
                out
            }
        }
    }
}

struct Inputs {
    texts: Vec<String>,
    digest: String,
}

fn read_inputs(paths: &[&Path]) -> Result<Inputs, Error> {
    let mut hasher = Sha256::new();
    let mut texts = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        hasher.update((text.len() as u64).to_le_bytes());
        hasher.update(text.as_bytes());
        texts.push(text);
    }
    let digest = hasher.finalize().iter().fold(String::from("sha256:"), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    Ok(Inputs { texts, digest })
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, message } => Error::Io(format!("{}:{line}: {message}", path.display())),
        other => Error::Io(format!("{}: {other}", path.display())),
    }
}

fn names(p: &Poset, set: posetmono::ElementSet) -> String {
    format!("{{{}}}", p.set_names(set).join(" "))
}

fn map_line(dist: &MapDistribution, h: &posetmono::MonotoneMap, w: &Q) -> String {
    let image: Vec<String> = (0..dist.index().len())
        .map(|alpha| format!("{}->{}", dist.index().name(alpha), dist.support().name(h.image(alpha))))
        .collect();
    format!("{}: {}", rational::format(w), image.join(" "))
}

fn distribution_lines(dist: &MapDistribution) -> Vec<String> {
    dist.weights().map(|(h, w)| map_line(dist, h, w)).collect()
}

fn transform_lines(index: &Poset, support: &Poset, transforms: &[posetmono::transform::InverseTransform]) -> Vec<String> {
    let mut out = Vec::new();
    for (alpha, t) in transforms.iter().enumerate() {
        out.push(format!("{}:", index.name(alpha)));
        out.extend(format_transform(t, support).lines().map(|l| format!("  {l}")));
    }
    out
}

fn verdict_fields(report: &mut Report, p: &Poset) -> Result<Kind, Error> {
    let v = classify::verdict(p)?;
    report.text("kind", v.kind.as_str());
    match &v.evidence {
        Evidence::Acyclic => {}
        Evidence::YGlued(e) => {
            report.text("lower", e.lower.join(" "));
            report.text("upper", e.upper.join(" "));
            report.text("glued-at", e.extension.c.clone());
            report.text("piece-1", e.extension.s1.names().join(" "));
            report.text("piece-2", e.extension.s2.names().join(" "));
        }
        Evidence::WGlued(e) => {
            let d = &e.diamond;
            report.text("diamond", format!("a={} b={} c={} d={}", d.a, d.b, d.c, d.d));
            for (label, comp) in ["w-a", "w-b", "w-c", "w-d"].iter().zip(&e.components) {
                report.text(label, comp.join(" "));
            }
        }
        Evidence::Fails { has_acyclic_extension, violation } => {
            report.flag("acyclic-extension", *has_acyclic_extension);
            report.text("violation", violation.to_string());
        }
    }
    Ok(v.kind)
}

fn cmd_classify(report: &mut Report, inputs: &Inputs, path: &Path) -> Result<(), Error> {
    let p = format::parse_poset(&inputs.texts[0]).map_err(|e| in_file(path, e))?;
    report.ok = verdict_fields(report, &p)? != Kind::Fails;
    Ok(())
}

fn parse_q(text: &str, what: &str) -> Result<Q, Error> {
    rational::parse(text).map_err(|_| Error::Io(format!("--{what}: invalid rational `{text}`")))
}

fn cmd_check_sm(report: &mut Report, inputs: &Inputs, path: &Path, lambda: Option<&str>) -> Result<(), Error> {
    let g = format::parse_generator(&inputs.texts[0]).map_err(|e| in_file(path, e))?;
    let lambda = match lambda {
        Some(text) => parse_q(text, "lambda")?,
        None => g.default_rate(),
    };
    let massey = markov::massey_check(&g);
    let kernel = markov::uniformize(&g, &lambda)?;
    let uniformized = markov::kernel_is_stoch_monotone(&kernel);
    report.q("lambda", &lambda);
    report.flag("massey", massey);
    report.flag("uniformized-monotone", uniformized);
    report.ok = massey;
    Ok(())
}

fn decomposition(report: &mut Report, inputs: &Inputs, path: &Path, bound: usize, detail: bool) -> Result<(), Error> {
    let g = format::parse_generator(&inputs.texts[0]).map_err(|e| in_file(path, e))?;
    let p = g.states();
    match markov::decompose_generator(&g, bound)? {
        None => {
            report.text("decomposition", "infeasible");
            report.flag("massey", markov::massey_check(&g));
            report.ok = false;
        }
        Some(gamma) => {
            report.text("decomposition", "feasible");
            let lines = gamma
                .iter()
                .map(|(h, w)| {
                    let image: Vec<String> =
                        (0..p.len()).map(|x| format!("{}->{}", p.name(x), p.name(h.image(x)))).collect();
                    format!("{}: {}", rational::format(w), image.join(" "))
                })
                .collect();
            report.lines("rates", lines);
            if detail {
                let (lambda, rebuilt) = markov::kernel_of_rates(p, &gamma);
                let direct = markov::uniformize(&g, &lambda)?;
                report.q("lambda", &lambda);
                report.flag("kernel-identity", rebuilt == direct);
                report.ok = rebuilt == direct;
            }
        }
    }
    Ok(())
}

fn cmd_simulate(
    report: &mut Report,
    inputs: &Inputs,
    path: &Path,
    seed: u64,
    horizon: &str,
    start: Option<&str>,
) -> Result<(), Error> {
    let g = format::parse_generator(&inputs.texts[0]).map_err(|e| in_file(path, e))?;
    let p = g.states();
    let horizon = parse_q(horizon, "horizon")?;
    let x0 = match start {
        Some(name) => p.require(name)?,
        None => 0,
    };
    let path = markov::simulate_path(&g, x0, &horizon, seed);
    report.text("seed", seed.to_string());
    report.q("horizon", &horizon);
    // Jump times are reported as rationals rounded to 1e-6.
    let scale = 1_000_000f64;
    let lines = path
        .iter()
        .map(|e| {
            let t = rational::ratio((e.time * scale).round() as i64, scale as i64);
            format!("{} {}", rational::format(&t), p.name(e.state))
        })
        .collect();
    report.lines("path", lines);
    Ok(())
}

fn load_system(inputs: &Inputs, poset: &Path, system: &Path) -> Result<(Poset, MeasureSystem), Error> {
    let s = format::parse_poset(&inputs.texts[0]).map_err(|e| in_file(poset, e))?;
    let sys = format::parse_system(&inputs.texts[1], &s).map_err(|e| in_file(system, e))?;
    Ok((s, sys))
}

fn cmd_realize(report: &mut Report, inputs: &Inputs, poset: &Path, system: &Path, bound: usize) -> Result<(), Error> {
    let (s, sys) = load_system(inputs, poset, system)?;
    sys.common_total()?;
    let kind = verdict_fields(report, &s)?;
    if !measures::system_is_stoch_monotone(&sys)? {
        let (a, b, u) = measures::monotonicity_violation(&sys)?.expect("a violation exists");
        report.text(
            "not-monotone",
            format!("{} <= {} but up-set {} loses mass", sys.index().name(a), sys.index().name(b), names(&s, u)),
        );
        report.ok = false;
        return Ok(());
    }
    let (method, theta, dist) = match kind {
        Kind::Acyclic => ("recursive coupling", rational::one(), feasibility::realize_acyclic(&sys)?),
        Kind::YGluedBipartite => {
            let (theta, dist) = glued::y_glued_realize(&sys)?;
            ("bipartite extension", theta, dist)
        }
        Kind::WGluedDiamond => {
            let r = glued::w_glued_realize(&sys)?;
            report.q("theta-star", &r.theta_star);
            let diamond = if sys.index() == &s {
                s.induced(posetmono::ElementSet::from_indices(r.parts.corners()))
            } else {
                sys.index().clone()
            };
            report.lines("transforms", transform_lines(&diamond, &s, &r.transforms));
            match r.full {
                Some(dist) => ("glued inverse transforms", r.theta, dist),
                None => {
                    let dist = posetmono::transform::family_to_distribution(sys.index(), &s, &r.transforms);
                    ("glued inverse transforms", r.theta, dist)
                }
            }
        }
        Kind::Fails => {
            let (theta, dist) = feasibility::max_theta(&sys, bound)?;
            ("linear program", theta, dist)
        }
    };
    report.text("method", method);
    report.q("theta", &theta);
    report.lines("maps", distribution_lines(&dist));
    report.ok = !theta.is_zero();
    Ok(())
}

fn cmd_realize_w(
    report: &mut Report,
    inputs: &Inputs,
    poset: &Path,
    system: &Path,
    root: Option<&str>,
) -> Result<(), Error> {
    let (s, sys) = load_system(inputs, poset, system)?;
    let root = root.map(|r| s.require(r)).transpose()?;
    match rit::w_class_realize(&sys, root) {
        Err(Error::NotStochasticallyMonotone) => {
            report.text("result", "not stochastically monotone");
            report.ok = false;
        }
        Err(e) => return Err(e),
        Ok(r) => {
            report.text("root", s.name(r.tree.root()));
            let paths = r
                .index
                .nodes()
                .iter()
                .zip(&r.mu)
                .map(|(node, mu)| {
                    let path: Vec<&str> = node.path.iter().map(|&x| s.name(x)).collect();
                    format!("{} mu={}", path.join(" "), rational::format(mu))
                })
                .collect();
            report.lines("paths", paths);
            report.lines("transforms", transform_lines(sys.index(), &s, &r.transforms));
        }
    }
    Ok(())
}

fn cmd_couple(report: &mut Report, inputs: &Inputs, paths: [&Path; 3]) -> Result<(), Error> {
    let s = format::parse_poset(&inputs.texts[0]).map_err(|e| in_file(paths[0], e))?;
    let p1 = format::parse_measure(&inputs.texts[1], &s).map_err(|e| in_file(paths[1], e))?;
    let p2 = format::parse_measure(&inputs.texts[2], &s).map_err(|e| in_file(paths[2], e))?;
    if p1.total() != p2.total() {
        return Err(Error::MassMismatch(rational::format(&p1.total()), rational::format(&p2.total())));
    }
    if let Some(u) = measures::violating_up_set(&s, &p1, &p2)? {
        report.text("ordered", "no");
        report.text("witness", names(&s, u));
        report.ok = false;
        return Ok(());
    }
    let (method, coupling) = if classify::is_w_glued_diamond(&s).is_some() {
        let pair = glued::strassen_w_glued(&s, &p1, &p2)?;
        report.lines("lower", format_transform(&pair.lower, &s).lines().map(String::from).collect());
        report.lines("upper", format_transform(&pair.upper, &s).lines().map(String::from).collect());
        ("glued inverse transforms", pair.coupling)
    } else {
        ("linear program", feasibility::strassen_lp(&s, &p1, &p2)?.expect("ordered measures couple"))
    };
    report.text("ordered", "yes");
    report.text("method", method);
    let lines = coupling
        .weights
        .iter()
        .map(|((x, y), w)| format!("{} <= {}: {}", s.name(*x), s.name(*y), rational::format(w)))
        .collect();
    report.lines("coupling", lines);
    Ok(())
}

fn cmd_fixtures(report: &mut Report, action: &FixtureAction, bound: usize) -> Result<(), Error> {
    let all = fixtures::all_fixtures();
    match action {
        FixtureAction::List => {
            let lines = all
                .iter()
                .map(|f| format!("{} ({} elements): {}", f.name, f.host.len(), f.case))
                .collect();
            report.lines("fixtures", lines);
        }
        FixtureAction::Check => {
            let mut lines = Vec::new();
            for f in &all {
                let r = fixtures::check_fixture(f, bound)?;
                let pass = r.passed(f);
                report.ok &= pass;
                lines.push(format!(
                    "{} {}: monotone={} max-theta={} patterns={}",
                    if pass { "pass" } else { "FAIL" },
                    f.name,
                    r.full_stoch_monotone && r.system_stoch_monotone,
                    rational::format(&r.max_theta),
                    r.patterns_found
                ));
            }
            report.lines("fixtures", lines);
        }
    }
    Ok(())
}

fn cover_text(p: &Poset) -> String {
    let mut covers = p.cover_names();
    covers.sort();
    let covers: Vec<String> = covers.into_iter().map(|(x, y)| format!("{x}<{y}")).collect();
    if covers.is_empty() {
        "-".into()
    } else {
        covers.join(" ")
    }
}

/// Smallest `max_theta` over random kernels, or `None` when none were drawn.
fn kernel_probe(p: &Poset, kernels: usize, seed: u64, bound: usize) -> Result<Option<Q>, Error> {
    let mut rng = sampling::rng(seed);
    let mut least: Option<Q> = None;
    for _ in 0..kernels {
        let k = sampling::random_kernel(p, &mut rng);
        let (theta, _) = feasibility::max_theta(&k, bound)?;
        least = Some(match least {
            Some(q) if q <= theta => q,
            _ => theta,
        });
    }
    Ok(least)
}

fn cmd_sweep(report: &mut Report, max_elements: usize, kernels: usize, seed: u64, bound: usize) -> Result<(), Error> {
    if max_elements > 7 {
        return Err(Error::SizeLimit { bound: 7 });
    }
    let posets: Vec<Poset> = (1..=max_elements).flat_map(enumerate::connected_posets).collect();
    let rows: Vec<Result<(Kind, Option<Q>), Error>> = posets
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let kind = classify::verdict(p)?.kind;
            let least = if kind == Kind::Fails { None } else { kernel_probe(p, kernels, seed ^ i as u64, bound)? };
            Ok((kind, least))
        })
        .collect();
    let mut lines = Vec::new();
    let mut counts = std::collections::BTreeMap::<(usize, &str), usize>::new();
    for (p, row) in posets.iter().zip(rows) {
        let (kind, least) = row?;
        *counts.entry((p.len(), kind.as_str())).or_default() += 1;
        let probe = match &least {
            Some(q) => {
                report.ok &= !q.is_zero();
                format!(" min-theta={}", rational::format(q))
            }
            None => String::new(),
        };
        lines.push(format!("{} {} {}{probe}", p.len(), kind.as_str(), cover_text(p)));
    }
    report.text("max-elements", max_elements.to_string());
    report.text("posets", posets.len().to_string());
    report.lines("counts", counts.into_iter().map(|((n, k), c)| format!("{n} {k} {c}")).collect());
    report.lines("verdicts", lines);
    Ok(())
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let paths: Vec<&Path> = match &cli.command {
        Command::Classify { poset } => vec![poset],
        Command::CheckSm { generator, .. }
        | Command::CheckRm { generator }
        | Command::Decompose { generator }
        | Command::Simulate { generator, .. } => vec![generator],
        Command::Realize { poset, system } | Command::RealizeW { poset, system, .. } => vec![poset, system],
        Command::Couple { poset, first, second } => vec![poset, first, second],
        Command::Fixtures { .. } | Command::Sweep { .. } => vec![],
    }
    .into_iter()
    .map(PathBuf::as_path)
    .collect();
    let inputs = read_inputs(&paths)?;
    let mut report = Report::new(echo.join(" "), inputs.digest.clone());
    match &cli.command {
        Command::Classify { poset } => cmd_classify(&mut report, &inputs, poset)?,
        Command::CheckSm { generator, lambda } => cmd_check_sm(&mut report, &inputs, generator, lambda.as_deref())?,
        Command::CheckRm { generator } => decomposition(&mut report, &inputs, generator, cli.bound, false)?,
        Command::Decompose { generator } => decomposition(&mut report, &inputs, generator, cli.bound, true)?,
        Command::Simulate { generator, seed, horizon, start } => {
            cmd_simulate(&mut report, &inputs, generator, *seed, horizon, start.as_deref())?
        }
        Command::Realize { poset, system } => cmd_realize(&mut report, &inputs, poset, system, cli.bound)?,
        Command::RealizeW { poset, system, root } => {
            cmd_realize_w(&mut report, &inputs, poset, system, root.as_deref())?
        }
        Command::Couple { poset, first, second } => cmd_couple(&mut report, &inputs, [poset, first, second])?,
        Command::Fixtures { action } => cmd_fixtures(&mut report, action, cli.bound)?,
        Command::Sweep { max_elements, kernels, seed } => {
            cmd_sweep(&mut report, *max_elements, *kernels, *seed, cli.bound)?
        }
    }
    report.text("status", if report.ok { "holds" } else { "fails" });
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
