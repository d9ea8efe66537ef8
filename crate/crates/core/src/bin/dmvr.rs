use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dmvr::analysis::bounds_table;
use dmvr::experiments::{builtin_manifest, run_manifest, Manifest, BUILTINS};
use dmvr::sim::{write_summaries, TopologySpec, VoteSpec, DEFAULT_CUTOFF};
use dmvr::verify::{
    audit_trace, enumerate_states, equivalence_check, model_check, strict_profiles, Verdict,
};
use dmvr::{Error, Result, Scenario, Trajectory, Variant, VoteProfile};

#[derive(Parser)]
#[command(name = "dmvr", version, about = "Union/intersection gossip voting and ranking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (or several seeds of it) and print per-run CSV.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Number of consecutive seeds to run.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Write the full trajectory of the first run as JSON.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a sweep manifest (a TOML file or a builtin name) and write aggregate CSV.
    Sweep {
        /// Path to a manifest, or one of fig3, fig4, fig5a, fig5b, fig6, fig7.
        manifest: String,
        /// Override the replication count.
        #[arg(long)]
        reps: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; defaults to the manifest's `output`, else stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write every run's summary here.
        #[arg(long)]
        runs_out: Option<PathBuf>,
        /// Print the resolved manifest as TOML and exit.
        #[arg(long)]
        print_manifest: bool,
    },
    /// Print the closed-form expectations and bounds for the complete graph.
    Bounds {
        #[arg(long)]
        n: usize,
        /// Vote fractions, largest first, e.g. `0.5,0.3,0.2`.
        #[arg(long, value_delimiter = ',', required = true)]
        rho: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Exhaustive and replay checks.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Subcommand)]
enum Check {
    /// Check convergence with probability one on the complete graph.
    ModelCheck {
        /// Vote counts per choice; omit with --all.
        #[arg(long, value_delimiter = ',')]
        counts: Vec<u32>,
        #[arg(long, default_value = "compact-voting")]
        variant: Variant,
        /// Check every strictly ordered profile with n = 2..=max-n, K = 1..=max-k.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
    },
    /// Count and list the node states of a compact encoding.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "compact-voting")]
        variant: Variant,
        /// Print every reachable state.
        #[arg(long)]
        list: bool,
    },
    /// Run a logged scenario (or load a trajectory) and replay its invariants.
    Audit {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Audit a trajectory JSON written by `simulate --trajectory`.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Compare explicit and compact representations on shared randomness.
    Equivalence {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario TOML; the flags below are ignored when given.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// complete:N, ring:N, torus:RxC or edges:PATH
    #[arg(long, default_value = "complete:20")]
    topology: String,
    /// Vote counts per choice, e.g. `12,8`.
    #[arg(long, value_delimiter = ',', conflicts_with = "fractions")]
    counts: Vec<u32>,
    /// Vote fractions per choice, e.g. `0.6,0.4`.
    #[arg(long, value_delimiter = ',')]
    fractions: Vec<f64>,
    #[arg(long, default_value = "compact-voting")]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: f64,
}

fn parse_topology(s: &str) -> Result<TopologySpec> {
    let bad = || Error::Config(format!("topology `{s}`: expected complete:N, ring:N, torus:RxC or edges:PATH"));
    let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    Ok(match kind {
        "complete" => TopologySpec::Complete { n: num(arg)? },
        "ring" => TopologySpec::Ring { n: num(arg)? },
        "torus" => {
            let (r, c) = arg.split_once('x').ok_or_else(bad)?;
            TopologySpec::Torus {
                rows: num(r)?,
                cols: num(c)?,
            }
        }
        "edges" => TopologySpec::EdgeList { path: arg.into() },
        _ => return Err(bad()),
    })
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<Scenario> {
        if let Some(path) = &self.scenario {
            return Ok(toml::from_str(&std::fs::read_to_string(path)?)?);
        }
        let votes = match (self.counts.is_empty(), self.fractions.is_empty()) {
            (false, _) => VoteSpec::Counts(self.counts.clone()),
            (true, false) => VoteSpec::Fractions(self.fractions.clone()),
            (true, true) => VoteSpec::Fractions(vec![0.6, 0.4]),
        };
        let mut sc = Scenario::new(parse_topology(&self.topology)?, votes, self.variant, self.seed);
        sc.cutoff = self.cutoff;
        Ok(sc)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn simulate(sc: Scenario, runs: u64, trajectory: Option<PathBuf>, out: Option<PathBuf>) -> Result<bool> {
    let mut rows = Vec::new();
    for r in 0..runs {
        let mut s = sc.clone();
        s.seed = sc.seed.wrapping_add(r);
        if r > 0 || trajectory.is_none() {
            s.log_events = Some(false);
        }
        let t = s.run()?;
        if r == 0 {
            if let Some(path) = &trajectory {
                let f = BufWriter::new(File::create(path)?);
                serde_json::to_writer(f, &t).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        rows.push(t.summary());
    }
    write_summaries(output(out.as_deref())?, &rows)?;
    Ok(true)
}

fn sweep(
    name: &str,
    reps: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    runs_out: Option<PathBuf>,
    print_manifest: bool,
) -> Result<bool> {
    let mut m = if BUILTINS.contains(&name) && !Path::new(name).exists() {
        builtin_manifest(name)?
    } else {
        Manifest::read(name)?
    };
    if let Some(r) = reps {
        m = m.with_replications(r);
    }
    if let Some(s) = seed {
        m.base_seed = s;
    }
    if print_manifest {
        print!("{}", m.to_toml());
        return Ok(true);
    }
    let result = run_manifest(&m)?;
    let path = out.or_else(|| m.output.clone());
    result.write_csv(output(path.as_deref())?)?;
    if let Some(p) = runs_out {
        write_summaries(output(Some(&p))?, &result.runs)?;
    }
    if let Some(p) = path {
        eprintln!("{}: {} rows -> {}", m.id, result.rows.len(), p.display());
    }
    Ok(true)
}

fn bounds(n: usize, rho: &[f64], format: Format) -> Result<bool> {
    let rows = bounds_table(n, rho)?;
    let mut out = io::stdout().lock();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Table => {
            let width = rows.iter().map(|r| r.quantity.len()).max().unwrap_or(0);
            for r in &rows {
                writeln!(out, "{:<width$}  {:>14.6}", r.quantity, r.value)?;
            }
        }
    }
    Ok(true)
}

fn verify(check: Check) -> Result<bool> {
    match check {
        Check::ModelCheck {
            counts,
            variant,
            all,
            max_n,
            max_k,
        } => {
            let profiles: Vec<Vec<u32>> = if all {
                (1..=max_k)
                    .flat_map(|k| (2..=max_n).flat_map(move |n| strict_profiles(n, k)))
                    .collect()
            } else if counts.is_empty() {
                return Err(Error::Config("give --counts or --all".into()));
            } else {
                vec![counts]
            };
            let mut ok = true;
            for c in profiles {
                let r = model_check(&VoteProfile::from_counts(&c)?, variant)?;
                println!(
                    "{} {variant} counts={c:?} configurations={} transitions={} bottom={}",
                    r.verdict, r.configurations, r.transitions, r.bottom_components
                );
                if let Some(path) = &r.counterexample {
                    for (i, step) in path.iter().enumerate() {
                        println!("  {i:>3}: {step}");
                    }
                }
                ok &= r.verdict != Verdict::Fail;
            }
            Ok(ok)
        }
        Check::Enumerate { k, variant, list } => {
            let c = enumerate_states(k, variant)?;
            let reach = c.reachable.map_or("not computed".to_string(), |r| r.to_string());
            println!("{variant} K={k}: {} states, {reach} reachable from single votes", c.syntactic);
            if list {
                for s in &c.listing {
                    println!("  {s}");
                }
            }
            Ok(true)
        }
        Check::Audit {
            scenario,
            trajectory,
        } => {
            let t: Trajectory = match trajectory {
                Some(p) => serde_json::from_reader(io::BufReader::new(File::open(p)?))
                    .map_err(|e| Error::Config(e.to_string()))?,
                None => {
                    let mut sc = scenario.resolve()?;
                    sc.log_events = Some(true);
                    sc.run()?
                }
            };
            let r = audit_trace(&t)?;
            for f in &r.failures {
                println!("  {f}");
            }
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            println!("{verdict} audit: {} events, tau_x = {:?}", r.events, r.tau_x);
            Ok(r.passed())
        }
        Check::Equivalence { scenario, trials } => {
            let r = equivalence_check(&scenario.resolve()?, trials)?;
            println!(
                "{} {:?} pairing: {} trials, {} interactions, {} decided comparisons, {} transient readout disagreements",
                r.verdict, r.pairing, r.trials, r.interactions, r.decided_comparisons, r.transient_disagreements
            );
            if let Some(d) = &r.divergence {
                println!("  seed {} event {} node {}: {}", d.seed, d.event, d.node, d.detail);
            }
            Ok(r.verdict == Verdict::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            scenario,
            runs,
            trajectory,
            out,
        } => scenario.resolve().and_then(|sc| simulate(sc, runs, trajectory, out)),
        Command::Sweep {
            manifest,
            reps,
            seed,
            out,
            runs_out,
            print_manifest,
        } => sweep(&manifest, reps, seed, out, runs_out, print_manifest),
        Command::Bounds { n, rho, format } => bounds(n, &rho, format),
        Command::Verify { check } => verify(check),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dmvr: {e}");
            ExitCode::from(2)
        }
    }
}
