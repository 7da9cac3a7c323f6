use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swlw::config::{parse_config, RunConfig};
use swlw::output::{OutputError, RunSink};
use swlw::scenario::build;
use swlw::verify::{thread_cap, Verifier, VerifyError, SUITES};
use swlw::mms;
use swlw_core::stepper::{run, RunError, SimState};

const OK: u8 = 0;
const FAILED: u8 = 1;
const CONFIG: u8 = 2;
const INVARIANT: u8 = 3;
const DIVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(name = "swlw", version, about = "Coupled compressible MHD and Schrödinger flow in Lagrangian coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured scenario and write diagnostics and snapshots.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Convergence tables for the configured scenario.
    Mms {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        levels: usize,
    },
}

fn solver_code(e: &swlw_core::Error) -> u8 {
    use swlw_core::Error::*;
    match e {
        InvariantViolated { .. } | NonPositiveDensity { .. } | NonPositiveVolume { .. } | DegenerateMap { .. } => INVARIANT,
        PicardDiverged { .. } | PicardNotConverged { .. } | InnerNotConverged { .. } | Cfl { .. } | NonFinite(_) => {
            DIVERGENCE
        }
        InvalidParameter { .. } | NegativeArgument { .. } => CONFIG,
        SizeMismatch { .. } => FAILED,
    }
}

fn load(path: &Path) -> Result<RunConfig, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        CONFIG
    })?;
    let parsed = parse_config(&text).map_err(|e| {
        eprintln!("error: {e}");
        CONFIG
    })?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.config)
}

fn simulate_one(config: &RunConfig, initial: SimState, dir: &Path) -> Result<(), u8> {
    let io = |e: OutputError| {
        eprintln!("error: {e}");
        FAILED
    };
    let mut sink = RunSink::create(dir, config.physics.clone(), &initial, config.output.snapshot_interval).map_err(io)?;
    fs::write(dir.join("config.ini"), config.to_ini()).map_err(|e| io(e.into()))?;
    match run(initial, config.t_end, &config.physics, &config.step, &mut sink) {
        Ok(summary) => {
            let path = sink.dump("final.bin", &summary.state, summary.steps).map_err(io)?;
            let last = sink.rows().last();
            eprintln!(
                "{}: {} steps to t = {}, energy {:e}, residual {:e}, final state {}",
                dir.display(),
                summary.steps,
                summary.state.t,
                last.map_or(f64::NAN, |r| r.energy),
                last.map_or(f64::NAN, |r| r.residual),
                path.display()
            );
            Ok(())
        }
        Err(RunError::Solver { error, step, state }) => {
            eprintln!("error at step {step} (t = {}): {error}", state.t);
            match sink.dump("failure.bin", &state, step) {
                Ok(p) => eprintln!("last accepted state written to {}", p.display()),
                Err(e) => eprintln!("could not write failure snapshot: {e}"),
            }
            Err(solver_code(&error))
        }
        Err(RunError::Sink(e)) => {
            eprintln!("error: {e}");
            Err(match e {
                OutputError::JrhoBounds { .. } => INVARIANT,
                OutputError::Solver(e) => solver_code(&e),
                _ => FAILED,
            })
        }
    }
}

fn simulate(config: &Path, out: Option<PathBuf>) -> Result<(), u8> {
    let config = load(config)?;
    let dir = out.or_else(|| config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let initial = build(&config.scenario, config.n).map_err(|e| {
        eprintln!("error: {e}");
        CONFIG
    })?;
    simulate_one(&config, initial.primary, &dir)?;
    if let Some(partner) = initial.partner {
        simulate_one(&config, partner, &dir.join("partner"))?;
    }
    Ok(())
}

fn verify_error(e: VerifyError) -> u8 {
    eprintln!("error: {e}");
    match e {
        VerifyError::UnknownSuite(_) => CONFIG,
        VerifyError::Run { error, .. } => solver_code(&error),
    }
}

fn verify(suite: &str) -> Result<(), u8> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let verifier = Verifier::with_threads(thread_cap());
    let mut passed = true;
    for name in names {
        let report = verifier.suite(name).map_err(verify_error)?;
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
        eprintln!("{}", report.summary());
        passed &= report.passed;
    }
    if passed {
        Ok(())
    } else {
        Err(FAILED)
    }
}

fn convergence(config: &Path, levels: usize) -> Result<(), u8> {
    let config = load(config)?;
    if levels < 2 {
        eprintln!("error: --levels must be at least 2");
        return Err(CONFIG);
    }
    let fail = |e: swlw_core::Error| {
        eprintln!("error: {e}");
        solver_code(&e)
    };
    let state = build(&config.scenario, config.n).map_err(fail)?.primary;
    let (dt, t) = (config.step.dt, config.t_end);
    let studies = vec![
        mms::spatial_study(config.n, levels).map_err(fail)?,
        mms::nls_study(&state, &config.physics, dt, t, levels).map_err(fail)?,
        mms::momentum_study(&state, &config.physics, dt, t, levels).map_err(fail)?,
        mms::coupled_study(&state, &config.physics, &config.step, t, levels).map_err(fail)?,
    ];
    for s in &studies {
        eprint!("{}", s.table());
    }
    println!("{}", serde_json::to_string(&studies).expect("tables serialize"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, out),
        Command::Verify { suite } => verify(&suite),
        Command::Mms { config, levels } => convergence(&config, levels),
    };
    ExitCode::from(result.err().unwrap_or(OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_failure_kind() {
        use swlw_core::Error::*;
        assert_eq!(solver_code(&InvariantViolated { what: "div H", value: 1.0 }), INVARIANT);
        assert_eq!(solver_code(&PicardDiverged { iterations: 3, ratios: vec![] }), DIVERGENCE);
        assert_eq!(solver_code(&Cfl { courant: 2.0, limit: 1.0 }), DIVERGENCE);
        assert_eq!(solver_code(&InvalidParameter { name: "dt", reason: "x" }), CONFIG);
    }
}
