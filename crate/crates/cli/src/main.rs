use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bethesep::{NormalizationMode, Verdict};
use bethesep_cli::analysis::{self, render};
use bethesep_cli::config::{self, AnalysisConfig, Overrides};
use bethesep_cli::{summary, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bethesep",
    version,
    about = "Bethe-ansatz spin states and their separability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Analysis configuration (JSON)
    config: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline; writes a JSON report
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random position samples
        #[arg(long)]
        samples: Option<usize>,
        /// zero-set | paper-literal:<M>[:local-dimension|party-count]
        #[arg(long, value_parser = config::parse_normalization)]
        normalization: Option<NormalizationMode>,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-adjoint / PT classification of the boundary condition
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// A single consistency residual
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        check: Check,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    YangBaxter,
    Inverse,
    Boundary,
}

fn load(path: &Path, overrides: &Overrides) -> anyhow::Result<(AnalysisConfig, String)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = config::parse(&text, overrides)
        .with_context(|| format!("invalid config {}", path.display()))?;
    Ok((cfg, text))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Analyze {
            common,
            seed,
            samples,
            normalization,
            out,
        } => {
            let ov = Overrides {
                tol: common.tol,
                seed,
                samples,
                normalization,
            };
            let (cfg, text) = load(&common.config, &ov)?;
            let report = analysis::analyze(&cfg, &text)?;
            let doc = render(&report);
            match out {
                Some(p) => {
                    std::fs::write(&p, doc).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{doc}"),
            }
            Ok(match report.verdict {
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
                _ => EXIT_OK,
            })
        }
        Command::Classify { common } => {
            let ov = Overrides {
                tol: common.tol,
                ..Default::default()
            };
            let (cfg, _) = load(&common.config, &ov)?;
            let c = analysis::classification(&cfg.boundary, cfg.tol)?.context(
                "spin-coupled conditions are not classified; see the fStructure block of 'analyze'",
            )?;
            print!("{}", summary::classification(&c));
            Ok(EXIT_OK)
        }
        Command::Verify { common, check } => {
            let ov = Overrides {
                tol: common.tol,
                ..Default::default()
            };
            let (cfg, _) = load(&common.config, &ov)?;
            let (text, worst) = match check {
                Check::YangBaxter => {
                    let r = analysis::yang_baxter_residual(&cfg)?.context(
                        "yang-baxter needs N >= 3 or an explicit 'yangBaxterMomenta' triple",
                    )?;
                    (summary::residual_line("yang-baxter", r, cfg.tol), r)
                }
                Check::Inverse => {
                    let r = analysis::inverse_residual(&cfg)?;
                    (summary::residual_line("inverse", r, cfg.tol), r)
                }
                Check::Boundary => {
                    let rs = analysis::boundary_residuals(&cfg)?;
                    let worst = rs.iter().map(|p| p.residual).fold(0.0, f64::max);
                    (summary::boundary_lines(&rs, cfg.tol), worst)
                }
            };
            print!("{text}");
            Ok(if worst <= cfg.tol {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
