mod commands;
mod instance;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use g2strata::field_curve::registry;
use g2strata::Error;

#[derive(Parser, Debug)]
#[command(name = "g2strata", version, about = "Strata of surfaces with p_g = 2, q = 1, K^2 = 5 and their exact finite-field checks")]
pub struct Cli {
    /// Registry name or literal "p:a:b" curve spec.
    #[arg(long, global = true, default_value = registry::DEFAULT_CURVE)]
    pub curve: String,
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Redraws allowed before a genericity search gives up.
    #[arg(long, global = true, default_value_t = 256)]
    pub retries: u32,
    /// Largest extension degree used to find zeros of sections.
    #[arg(long, global = true, default_value_t = 2)]
    pub field_ext_max: usize,
    /// Registry file overriding the builtin curves.
    #[arg(long, global = true, env = registry::REGISTRY_ENV, hide_env_values = true)]
    pub registry: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Markdown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension of every stratum of the moduli space.
    Table,
    /// Decomposition type of V2(-2o), cross-checked through multiplication maps.
    Classify(ClassifyArgs),
    /// Sections of the sextic-coefficient bundle for one stratum.
    A6(A6Args),
    /// chi and K^2 of a genus-2 fibration, with optional singular-fibre counts.
    Invariants(InvariantsArgs),
    /// Critical points of the case-V fibration.
    Crit(CaseVArgs),
    /// Euler-number count over the singular fibres of the case-V fibration.
    ZsCheck(CaseVArgs),
    /// Bicanonical sections vanishing at every critical point.
    BkCheck(CaseVArgs),
    /// Automorphism pairs compatible with the case-V conic, and the fibre dimension.
    AutDim(AutArgs),
    /// Conic bundle invariant under translation by an order-3 kernel.
    Case1Conic(CaseOneArgs),
    /// Every acceptance check in one run.
    VerifyAll(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Build a seeded instance for this split label.
    #[arg(long, conflicts_with_all = ["p", "instance", "indec"])]
    pub label: Option<String>,
    /// Point p with V1 = O(p) + O(2o - p).
    #[arg(long, requires_all = ["tau", "pattern"])]
    pub p: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    /// Vanishing of f1 f2 f3 at tau, e.g. "0**".
    #[arg(long)]
    pub pattern: Option<String>,
    /// Indecomposable V1; needs --tau and --q.
    #[arg(long, requires_all = ["tau", "q"])]
    pub indec: bool,
    /// Cokernel point of the extension in the indecomposable case.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, requires = "indec")]
    pub im_v_in_w: bool,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct A6Args {
    #[arg(long)]
    pub label: String,
    /// Extra relation among u = p - o and v = tau - o, e.g. "2u-2v"; repeatable.
    #[arg(long = "relation")]
    pub relations: Vec<String>,
    /// Also list every subcase of the label.
    #[arg(long)]
    pub subcases: bool,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[arg(long)]
    pub degv1: i64,
    #[arg(long)]
    pub degtau: i64,
    #[arg(long)]
    pub b: i64,
    /// Arithmetic genus, for the K^2 count from singular fibres.
    #[arg(long, requires = "nu")]
    pub pa: Option<i64>,
    /// Fibre count such as "I1=1" or "V=1"; repeatable.
    #[arg(long, requires = "pa")]
    pub nu: Vec<String>,
    /// Geometric genus, for the lower bound on component dimensions.
    #[arg(long)]
    pub pg: Option<i64>,
}

#[derive(Args, Debug)]
pub struct CaseVArgs {
    /// Rational point of exact order 2; defaults to the first one.
    #[arg(long, conflicts_with = "instance")]
    pub tau: Option<String>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AutArgs {
    #[arg(long, default_value_t = 5)]
    pub p: u32,
}

#[derive(Args, Debug)]
pub struct CaseOneArgs {
    /// Rational point of order 3 generating the kernel; defaults to the first one.
    #[arg(long, conflicts_with = "instance")]
    pub kernel: Option<String>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Curves for the classifier and h^1-table checks.
    #[arg(long, value_delimiter = ',', default_values_t = ["b37".to_string(), "b61".to_string()])]
    pub oracle_curves: Vec<String>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Domain(_) | Error::Unsupported(_) | Error::InvalidExtension(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(path) = &cli.registry {
        // resolve() reads the override through the environment
        std::env::set_var(registry::REGISTRY_ENV, path);
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed: {}", out.failed.join("; "));
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
