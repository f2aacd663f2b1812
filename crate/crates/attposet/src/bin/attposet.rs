//! Command line front end. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use attposet::leonard::CaseSpec;
use attposet::poset::{save_cache, InstanceParams};
use attposet::suite::{obtain_poset, resolve_cache_path, run, ModeChoice, RunConfig, Suite};
use attposet::{Error, Result};

#[derive(Parser)]
#[command(
    name = "attposet",
    version,
    about = "Exact checks on attenuated space posets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the poset and check grade sizes.
    Enumerate(Common),
    /// Run a suite of checks.
    Verify(Common),
    /// Central characters, multiplicities and idempotents.
    Spectrum(Common),
    /// Quantum group module checks.
    Quantum(Common),
    /// Tridiagonal relations and Leonard pairs for one or all cases.
    Leonard(Common),
    /// Write the poset cache file.
    Cache(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    #[arg(long = "M", default_value_t = 1)]
    m: usize,
    /// poset, relations, spectrum, quantum, leonard or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// dense, matrix-free or auto.
    #[arg(long, default_value = "auto")]
    mode: String,
    #[arg(long, default_value_t = 5)]
    trials: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "dense-cap", default_value_t = attposet::algebra::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    /// Poset cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leonard case fixture; repeatable.
    #[arg(long = "case")]
    cases: Vec<PathBuf>,
    #[arg(long = "theta-power", default_value_t = 0, allow_hyphen_values = true)]
    theta_power: i64,
    #[arg(long = "omega-power", default_value_t = 0, allow_hyphen_values = true)]
    omega_power: i64,
}

enum Outcome {
    Pass,
    Fail,
}

fn config(c: &Common, suite: Suite) -> Result<RunConfig> {
    let params = InstanceParams::new(c.q, c.n, c.m)?;
    let mut cfg = RunConfig::new(params, suite);
    cfg.mode = ModeChoice::parse(&c.mode)?;
    cfg.trials = c.trials;
    cfg.seed = c.seed;
    cfg.dense_cap = c.dense_cap;
    cfg.cache = resolve_cache_path(c.cache.as_deref(), params);
    cfg.cases = c
        .cases
        .iter()
        .map(|p| CaseSpec::load(p, c.q))
        .collect::<Result<_>>()?;
    cfg.theta_power = (c.theta_power, c.omega_power);
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(cmd: Cmd) -> Result<Outcome> {
    let (common, suite) = match cmd {
        Cmd::Enumerate(c) => (c, Suite::Poset),
        Cmd::Verify(c) => {
            let s = Suite::parse(&c.suite)?;
            (c, s)
        }
        Cmd::Spectrum(c) => (c, Suite::Spectrum),
        Cmd::Quantum(c) => (c, Suite::Quantum),
        Cmd::Leonard(c) => (c, Suite::Leonard),
        Cmd::Cache(c) => {
            let params = InstanceParams::new(c.q, c.n, c.m)?;
            let path = resolve_cache_path(c.cache.as_deref(), params).ok_or_else(|| {
                Error::Invalid("cache needs --cache PATH or ATTPOSET_CACHE_DIR".into())
            })?;
            let p = obtain_poset(params, None)?;
            save_cache(&p, &path)?;
            println!(
                "wrote {} ({} elements, grades {:?})",
                path.display(),
                p.len(),
                p.grade_sizes()
            );
            return Ok(Outcome::Pass);
        }
    };
    let cfg = config(&common, suite)?;
    let report = run(&cfg)?;
    print!("{}", report.text_table());
    if let Some(out) = &common.out {
        let text = serde_json::to_string_pretty(&report.to_json(true)).expect("report serializes");
        write_out(out, &text)?;
    }
    Ok(if report.pass() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.cmd) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
