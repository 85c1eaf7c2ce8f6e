use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use supnorm::config::RunConfig;
use supnorm::exponents::derive_theorem_exponents;
use supnorm::suites;

#[derive(Parser)]
#[command(name = "supnorm", version, about = "Verification suites for the sup-norm toolkit")]
struct Cli {
    #[command(subcommand)]
    suite: Suite,
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true)]
    r: Option<u32>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    tmax: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for <suite>.json and <suite>.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value file, applied before the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Suite {
    Sl2,
    Archimedean,
    Padic,
    Volumes,
    Count,
    Amplify,
    Exponents,
    Bessel,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Sl2 => "sl2",
            Suite::Archimedean => "archimedean",
            Suite::Padic => "padic",
            Suite::Volumes => "volumes",
            Suite::Count => "count",
            Suite::Amplify => "amplify",
            Suite::Exponents => "exponents",
            Suite::Bessel => "bessel",
            Suite::All => "all",
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_text(&text).map_err(|e| e.to_string())?;
    }
    if let Some(p) = cli.p {
        cfg.p = Some(p);
    }
    cfg.r = cli.r.unwrap_or(cfg.r);
    cfg.n = cli.n.unwrap_or(cfg.n);
    cfg.tmax = cli.tmax.unwrap_or(cfg.tmax);
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.tol = cli.tol.unwrap_or(cfg.tol);
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let name = cli.suite.name();
    let report = match suites::run(name, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error in {name}: {e}");
            return ExitCode::from(1);
        }
    };
    if matches!(cli.suite, Suite::Exponents | Suite::All) {
        if let Ok(r) = derive_theorem_exponents() {
            println!("{}", r.table());
        }
    }
    print!("{}", report.summary());
    if let Some(dir) = &cli.out {
        let write = || -> std::io::Result<()> {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{name}.json")), report.to_json())?;
            std::fs::write(dir.join(format!("{name}.csv")), report.to_csv())
        };
        if let Err(e) = write() {
            eprintln!("error writing reports: {e}");
            return ExitCode::from(2);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
