//! `hybrid-mas`: plan, analyse, simulate and verify multi-agent scenarios.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hybrid_mas::control::{epsilon_bounds, r_s};
use hybrid_mas::error::SimError;
use hybrid_mas::sim::{
    compile, run, run_batch, validate_scenario, verify, Compiled, EventTrace, RunOutcome,
    RunStatus, SatisfactionReport, Scenario, SimConfig, VerifyReport, FINITE_TRACE_NOTE,
};

/// Exit statuses; stable for scripts.
mod code {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 2;
    pub const INVARIANT: u8 = 3;
    pub const SYNTHESIS: u8 = 4;
    pub const IO: u8 = 5;
    pub const INCOMPLETE: u8 = 6;
}

#[derive(Parser, Debug)]
#[command(name = "hybrid-mas", version, about)]
struct Cli {
    /// Scenario file (JSON, or TOML with a .toml extension).
    #[arg(short, long, global = true, env = "HMAS_SCENARIO")]
    scenario: Option<PathBuf>,
    /// Directory for trace files.
    #[arg(short, long, global = true, env = "HMAS_OUT", default_value = "trace")]
    out: PathBuf,
    /// Master seed of the per-agent random streams.
    #[arg(long, global = true, env = "HMAS_SEED")]
    seed: Option<u64>,
    /// Simulated seconds.
    #[arg(long, global = true, env = "HMAS_HORIZON")]
    horizon: Option<f64>,
    /// Integration step in seconds.
    #[arg(long, global = true, env = "HMAS_DT")]
    dt: Option<f64>,
    /// Output style.
    #[arg(long, global = true, env = "HMAS_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize and print each agent's discrete plan.
    Plan,
    /// Print the analytic thresholds on eps.
    Bounds,
    /// Simulate the scenario and write events.csv and samples.csv.
    Run {
        /// Run this many consecutive seeds in parallel, each into
        /// `<out>/seed-<n>`.
        #[arg(long, env = "HMAS_BATCH")]
        batch: Option<u64>,
        /// Seconds simulated after every agent finished its plan.
        #[arg(long, env = "HMAS_SETTLE", default_value_t = 1.0)]
        settle: f64,
        /// Steps between sample rows.
        #[arg(long, env = "HMAS_SAMPLE_EVERY", default_value_t = 10)]
        sample_every: u64,
    },
    /// Re-check a recorded trace against the scenario.
    Verify {
        /// Trace directory; defaults to the output directory.
        #[arg(long, env = "HMAS_TRACE")]
        trace: Option<PathBuf>,
    },
    /// Check the scenario without planning or simulating.
    Validate,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::Io { .. } => code::IO,
            SimError::Format { .. } | SimError::Validation(_) => code::VALIDATION,
            SimError::Synthesis { .. } => code::SYNTHESIS,
            SimError::MalformedTrace { .. } => code::VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(c) => ExitCode::from(c),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let path = cli
        .scenario
        .as_deref()
        .ok_or_else(|| Failure::new(code::VALIDATION, "no scenario given (--scenario)"))?;
    let scenario = Scenario::load(path)?;
    match &cli.command {
        Command::Validate => cmd_validate(&scenario, cli.format),
        Command::Bounds => cmd_bounds(&scenario, cli.format),
        Command::Plan => cmd_plan(&compile(&scenario)?, cli.format),
        Command::Run {
            batch,
            settle,
            sample_every,
        } => {
            let c = compile(&scenario)?;
            let mut cfg = SimConfig::for_scenario(&c);
            cfg.dt = cli.dt.unwrap_or(cfg.dt);
            cfg.horizon = cli.horizon.unwrap_or(cfg.horizon);
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.settle = *settle;
            cfg.sample_every = *sample_every;
            cfg.validate().map_err(|m| Failure::new(code::VALIDATION, m))?;
            match batch {
                None => cmd_run(&c, &cfg, &cli.out, cli.format),
                Some(count) => cmd_batch(&c, &cfg, *count, &cli.out),
            }
        }
        Command::Verify { trace } => {
            let c = compile(&scenario)?;
            let mut cfg = SimConfig::for_scenario(&c);
            cfg.dt = cli.dt.unwrap_or(cfg.dt);
            cmd_verify(&c, trace.as_deref().unwrap_or(&cli.out), cfg.dt, cli.format)
        }
    }
}

fn json_out<T: serde::Serialize>(v: &T) -> Outcome {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::new(code::IO, e.to_string()))?;
    println!("{text}");
    Ok(code::OK)
}

fn cmd_validate(s: &Scenario, format: Format) -> Outcome {
    let rep = validate_scenario(s);
    if format == Format::Json {
        json_out(&serde_json::json!({
            "valid": rep.is_valid(),
            "violations": rep.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "notes": rep.notes,
        }))?;
    } else {
        for v in &rep.violations {
            println!("violation: {v}");
        }
        for n in &rep.notes {
            println!("note: {n}");
        }
        println!("{}", if rep.is_valid() { "valid" } else { "invalid" });
    }
    Ok(if rep.is_valid() { code::OK } else { code::VALIDATION })
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "unbounded".to_string()
    } else {
        format!("{v:.6e}")
    }
}

fn cmd_bounds(s: &Scenario, format: Format) -> Outcome {
    let p = s.control_params();
    let b = epsilon_bounds(&p).map_err(|e| Failure::new(code::VALIDATION, e.to_string()))?;
    let rs = r_s(p.eps, &p);
    if format == Format::Json {
        let mut m = serde_json::Map::new();
        m.insert("eps".into(), p.eps.into());
        m.insert("r_s".into(), rs.into());
        for (k, v) in b.entries() {
            let val = if v.is_finite() {
                serde_json::Value::from(v)
            } else {
                serde_json::Value::from("unbounded")
            };
            m.insert(k.into(), val);
        }
        return json_out(&m);
    }
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:>14}  eps={} respects it", "threshold", "value", p.eps);
    for (name, v) in b.entries().into_iter().skip(1) {
        let ok = if p.eps < v { "yes" } else { "NO" };
        let _ = writeln!(out, "{name:<10} {:>14}  {ok}", fmt_value(v));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "xi={}", b.xi);
    let _ = writeln!(out, "r_s(eps)={rs}");
    for (name, v) in b.entries().into_iter().skip(1) {
        let _ = writeln!(out, "{name}={}", if v.is_finite() { v.to_string() } else { "unbounded".into() });
    }
    let _ = writeln!(
        out,
        "note: eps_min is the literal minimum of the thresholds; values quoted elsewhere (such as 0.031) do not follow from it"
    );
    print!("{out}");
    Ok(code::OK)
}

fn cmd_plan(c: &Compiled, format: Format) -> Outcome {
    let plans: Vec<_> = c
        .missions
        .iter()
        .zip(&c.plans)
        .map(|(m, p)| p.to_serial(m))
        .collect();
    if format == Format::Json {
        return json_out(&plans);
    }
    for p in &plans {
        let step = |(region, services): &(String, Vec<String>)| {
            format!("({region},{{{}}})", services.join(","))
        };
        let prefix: Vec<String> = p.steps[..p.suffix_start].iter().map(step).collect();
        let suffix: Vec<String> = p.steps[p.suffix_start..].iter().map(step).collect();
        let mut line = prefix.concat();
        if !suffix.is_empty() {
            let _ = write!(line, "({})^w", suffix.concat());
        }
        println!("agent {}: {}  [{}]", p.agent, line, p.formula);
    }
    Ok(code::OK)
}

fn summarize(c: &Compiled, o: &RunOutcome, rep: &VerifyReport) -> (u8, String) {
    let dt = o.trace.dt;
    let mut out = String::new();
    let status = match &o.status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::Horizon => "horizon reached".to_string(),
        RunStatus::Violation { step, message } => {
            format!("invariant violated at t={:.3}: {message}", *step as f64 * dt)
        }
    };
    let _ = writeln!(out, "status: {status} (t={:.3})", o.end_step as f64 * dt);
    let _ = writeln!(out, "max edge distance: {:.4}", o.max_edge_dist);
    write_satisfaction(&mut out, &rep.satisfaction);
    for v in &rep.violations {
        let _ = writeln!(out, "violation: {v}");
    }
    let warnings = rep.warnings.len();
    if warnings > 0 {
        let _ = writeln!(out, "warnings: {warnings} (see events.csv)");
    }
    let code = if !rep.is_sound() || matches!(o.status, RunStatus::Violation { .. }) {
        code::INVARIANT
    } else if !rep.satisfaction.all_success() {
        let since = o.last_progress.map_or(0.0, |s| s as f64 * dt);
        let _ = writeln!(out, "no progress after t={since:.3}");
        code::INCOMPLETE
    } else {
        code::OK
    };
    let _ = c;
    (code, out)
}

fn write_satisfaction(out: &mut String, s: &SatisfactionReport) {
    for a in &s.agents {
        let _ = writeln!(
            out,
            "agent {}: {} after {} goal reaches  [{}]",
            a.id,
            a.verdict,
            a.word.len(),
            a.formula
        );
    }
    if s.agents.iter().any(|a| !a.cosafe) {
        let _ = writeln!(out, "completed rounds: {}", s.round_ends.len());
        let _ = writeln!(out, "note: {FINITE_TRACE_NOTE}");
    }
}

fn write_trace(o: &RunOutcome, dir: &Path) -> Result<(), Failure> {
    o.trace.write_dir(dir)?;
    Ok(())
}

fn cmd_run(c: &Compiled, cfg: &SimConfig, out: &Path, format: Format) -> Outcome {
    let o = run(c, cfg).map_err(|m| Failure::new(code::VALIDATION, m))?;
    write_trace(&o, out)?;
    let rep = verify(&o.trace, c).map_err(|m| Failure::new(code::INVARIANT, m))?;
    let (status, text) = summarize(c, &o, &rep);
    if format == Format::Json {
        json_out(&serde_json::json!({
            "exit": status,
            "end_t": o.end_step as f64 * cfg.dt,
            "last_progress_t": o.last_progress.map(|s| s as f64 * cfg.dt),
            "max_edge_dist": o.max_edge_dist,
            "rounds": rep.satisfaction.round_ends.len(),
            "verdicts": rep.satisfaction.agents.iter().map(|a| a.verdict.to_string()).collect::<Vec<_>>(),
            "violations": rep.violations,
        }))?;
    } else {
        print!("{text}");
        println!("trace written to {}", out.display());
    }
    Ok(status)
}

fn cmd_batch(c: &Compiled, cfg: &SimConfig, count: u64, out: &Path) -> Outcome {
    let cfgs: Vec<SimConfig> = (0..count)
        .map(|k| SimConfig {
            seed: cfg.seed + k,
            ..*cfg
        })
        .collect();
    let mut worst = code::OK;
    for (cfg, result) in cfgs.iter().zip(run_batch(c, &cfgs)) {
        let o = result.map_err(|m| Failure::new(code::VALIDATION, m))?;
        let dir = out.join(format!("seed-{}", cfg.seed));
        write_trace(&o, &dir)?;
        let rep = verify(&o.trace, c).map_err(|m| Failure::new(code::INVARIANT, m))?;
        let (status, _) = summarize(c, &o, &rep);
        println!(
            "seed {}: exit {status}, rounds {}, reaches {}, trace {}",
            cfg.seed,
            rep.satisfaction.round_ends.len(),
            rep.goal_reaches,
            dir.display()
        );
        worst = worst.max(status);
    }
    Ok(worst)
}

fn cmd_verify(c: &Compiled, dir: &Path, dt: f64, format: Format) -> Outcome {
    let trace = EventTrace::read_dir(dir, &c.ids(), dt)?;
    let rep = verify(&trace, c).map_err(|m| Failure::new(code::VALIDATION, m))?;
    let status = if rep.is_sound() { code::OK } else { code::INVARIANT };
    if format == Format::Json {
        return json_out(&serde_json::json!({
            "sound": rep.is_sound(),
            "violations": rep.violations,
            "warnings": rep.warnings.len(),
            "rounds": rep.satisfaction.round_ends.len(),
            "verdicts": rep.satisfaction.agents.iter().map(|a| a.verdict.to_string()).collect::<Vec<_>>(),
            "max_edge_dist": rep.max_edge_dist,
            "missed_detections": rep.missed_detections,
        }))
        .map(|_| status);
    }
    let mut out = String::new();
    write_satisfaction(&mut out, &rep.satisfaction);
    let _ = writeln!(out, "max edge distance: {:.4}", rep.max_edge_dist);
    let _ = writeln!(
        out,
        "goal reaches: {}, missed detections: {}, unexplained detections: {}",
        rep.goal_reaches, rep.missed_detections, rep.unexplained_detections
    );
    for v in &rep.violations {
        let _ = writeln!(out, "violation: {v}");
    }
    let _ = writeln!(out, "{}", if rep.is_sound() { "trace sound" } else { "invariant violation" });
    print!("{out}");
    Ok(status)
}
