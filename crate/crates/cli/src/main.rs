use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fmw_core::beta::BetaContext;
use fmw_core::checks::{self, Report, RunConfig};
use fmw_core::dot;
use fmw_core::fm::{compose_at, sample_with, Region, DEFAULT_RHO0};
use fmw_core::json::{self, AnyPoint};
use fmw_core::tree::NestedTree;
use fmw_core::w::{sample_w_with, w_compose_at};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Set to a non-empty value other than `0` for reports with every sub-suite
/// and the first failing trials.
const VERBOSE_VAR: &str = "FMW_VERBOSE";

/// Largest arity accepted by the checking and enumeration commands.
const MAX_CHECK_ARITY: usize = 6;

#[derive(Parser)]
#[command(name = "fmw", version, about = "Fulton-MacPherson operad, its W-construction, and the isomorphism between them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Space {
    Fm,
    W,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RegionArg {
    Interior,
    Collar,
    Boundary,
    Mixed,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Region {
        match r {
            RegionArg::Interior => Region::Interior,
            RegionArg::Collar => Region::Collar,
            RegionArg::Boundary => Region::Boundary,
            RegionArg::Mixed => Region::Mixed,
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_RHO0)]
    rho0: f64,
    /// Replaces every per-suite tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        if !(2..=MAX_CHECK_ARITY).contains(&self.k) {
            bail!("k must lie in 2..={MAX_CHECK_ARITY}, got {}", self.k);
        }
        let cfg = RunConfig {
            n: self.n,
            k: self.k,
            seed: self.seed,
            trials: self.trials,
            rho0: self.rho0,
            tolerance: self.tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw random points.
    Sample {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RegionArg::Interior)]
        region: RegionArg,
        #[arg(long, value_enum, default_value_t = Space::Fm)]
        space: Space,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_RHO0)]
        rho0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partial composition `a ∘_i b` of two points, read as a JSON array
    /// or from two files.
    Compose {
        #[arg(long)]
        i: usize,
        #[arg(long, value_enum, default_value_t = Space::Fm)]
        space: Space,
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply β to a point of F.
    Beta {
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply β⁻¹ to a point of WF.
    BetaInv {
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// β⁻¹∘β and β∘β⁻¹ on random samples.
    Roundtrip(RunArgs),
    /// Operad laws, collar exactness, morphism property and related suites.
    CheckAxioms(RunArgs),
    /// Equivariance of β, composition and the collar.
    CheckEquivariance(RunArgs),
    /// Branch agreement and continuity at the seams of β.
    CheckSeams(RunArgs),
    /// List all nested trees on k leaves.
    EnumerateStrata {
        #[arg(long)]
        k: usize,
    },
    /// Graphviz rendering of a tree, a point of F or a point of WF.
    ExportDot {
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: Option<&PathBuf>) -> anyhow::Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => Ok(other?),
        },
    }
}

fn verbose() -> bool {
    std::env::var(VERBOSE_VAR).is_ok_and(|v| !v.is_empty() && v != "0")
}

fn emit_report(report: &Report) -> anyhow::Result<ExitCode> {
    let shown = if verbose() { report.clone() } else { report.summary() };
    write_output(None, &serde_json::to_string(&shown)?)?;
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn read_fm(path: Option<&PathBuf>) -> anyhow::Result<fmw_core::fm::FmPoint> {
    match json::point_from_json(&read_input(path)?)? {
        AnyPoint::Fm(p) => Ok(p),
        AnyPoint::W(_) => bail!("expected a point of F, got a point of WF"),
    }
}

fn read_pair(inputs: &[PathBuf]) -> anyhow::Result<Vec<AnyPoint>> {
    let points = match inputs {
        [] => json::points_from_json(&read_input(None)?)?,
        [a, b] => {
            let pts = vec![
                json::point_from_json(&read_input(Some(a))?)?,
                json::point_from_json(&read_input(Some(b))?)?,
            ];
            json::check_common_rho0(&pts)?;
            pts
        }
        _ => bail!("compose takes two input files or a JSON array of two points on stdin"),
    };
    if points.len() != 2 {
        bail!("compose needs exactly two points, got {}", points.len());
    }
    Ok(points)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sample {
            n,
            k,
            seed,
            region,
            space,
            count,
            rho0,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut texts = Vec::with_capacity(count);
            for _ in 0..count {
                texts.push(match space {
                    Space::Fm => json::fm_to_json(&sample_with(&mut rng, n, k, rho0, region.into())?),
                    Space::W => json::w_to_json(&sample_w_with(&mut rng, n, k, rho0)?),
                });
            }
            let text = if count == 1 {
                texts.pop().unwrap_or_default()
            } else {
                format!("[{}]", texts.join(","))
            };
            write_output(out.as_ref(), &text)?;
        }
        Command::Compose { i, space, inputs, out } => {
            let pts = read_pair(&inputs)?;
            let text = match (space, &pts[0], &pts[1]) {
                (Space::Fm, AnyPoint::Fm(a), AnyPoint::Fm(b)) => json::fm_to_json(&compose_at(a, i, b)?),
                (Space::W, AnyPoint::W(a), AnyPoint::W(b)) => json::w_to_json(&w_compose_at(a, i, b)?),
                (Space::W, AnyPoint::Fm(a), AnyPoint::Fm(b)) => {
                    use fmw_core::w::WPoint;
                    json::w_to_json(&w_compose_at(&WPoint::single(a.clone()), i, &WPoint::single(b.clone()))?)
                }
                _ => bail!("inputs do not match --space {space:?}"),
            };
            write_output(out.as_ref(), &text)?;
        }
        Command::Beta { input, out } => {
            let p = read_fm(input.as_ref())?;
            let w = BetaContext::for_point(&p).beta(&p)?;
            write_output(out.as_ref(), &json::w_to_json(&w))?;
        }
        Command::BetaInv { input, out } => {
            let w = match json::point_from_json(&read_input(input.as_ref())?)? {
                AnyPoint::W(w) => w,
                AnyPoint::Fm(_) => bail!("expected a point of WF, got a point of F"),
            };
            let p = BetaContext::new(w.dim(), w.rho0())?.beta_inverse(&w)?;
            write_output(out.as_ref(), &json::fm_to_json(&p))?;
        }
        Command::Roundtrip(args) => return emit_report(&checks::roundtrip(&args.config()?)?),
        Command::CheckAxioms(args) => return emit_report(&checks::axioms(&args.config()?)?),
        Command::CheckEquivariance(args) => return emit_report(&checks::equivariance(&args.config()?)?),
        Command::CheckSeams(args) => return emit_report(&checks::seams(&args.config()?)?),
        Command::EnumerateStrata { k } => {
            if !(2..=MAX_CHECK_ARITY).contains(&k) {
                bail!("k must lie in 2..={MAX_CHECK_ARITY}, got {k}");
            }
            write_output(None, &serde_json::to_string(&checks::strata(k)?)?)?;
        }
        Command::ExportDot { input, out } => {
            let text = read_input(input.as_ref())?;
            let value: serde_json::Value = serde_json::from_str(&text).context("parsing JSON")?;
            let rendered = if value.is_array() {
                dot::tree_to_dot(&NestedTree::parse(&text)?)
            } else {
                match json::point_from_json(&text)? {
                    AnyPoint::Fm(p) => dot::fm_to_dot(&p),
                    AnyPoint::W(w) => dot::w_to_dot(&w),
                }
            };
            write_output(out.as_ref(), rendered.trim_end())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
