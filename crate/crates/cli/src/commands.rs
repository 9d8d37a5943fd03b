//! Subcommands. Each returns the text for standard output (or `--out`) and
//! records inputs and verdicts in the run report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};

use isoforge_core::cayley::{group_to_space, preset};
use isoforge_core::free_space::{
    ae_norm, fixed_vector_subgroup, linear_ball_symmetries, signed_isometry_actions, vertex_pairs, Molecule,
};
use isoforge_core::group::{abstract_isomorphic, PermutationGroup, DEFAULT_ORDER_CAP};
use isoforge_core::metric::{amalgamate, extend_by_katetov, snowflake, FiniteMetricSpace, KatetovMap};
use isoforge_core::rational::{parse_rational, Q};
use isoforge_core::realization::{
    certify_gadget, realize, verify_against, BlockSpace, Embedding, Mode, RealizeOptions, DEFAULT_POINT_CAP,
};
use isoforge_core::rigidity::{rigid_metric, rigid_metric_path, RigidSpec};
use isoforge_core::search::{isometries, try_isometries};

use crate::error::CliError;
use crate::formats;
use crate::report::RunReport;

/// Environment variable overriding the realization point cap.
pub const POINT_CAP_VAR: &str = "ISOFORGE_POINT_CAP";

#[derive(Debug, Parser)]
#[command(name = "isoforge", version, about = "Exact finite metric spaces and their isometry groups")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full isometry group of a space.
    Iso { space: PathBuf },
    /// Realize a subgroup of Iso(space) as the full isometry group of a new space.
    Realize {
        space: PathBuf,
        group: PathBuf,
        #[command(flatten)]
        opts: RealizeArgs,
    },
    /// Word-metric space of a finite group, optionally realized.
    #[command(name = "group2space")]
    GroupToSpace {
        #[arg(long, conflicts_with = "table", required_unless_present = "table")]
        preset: Option<String>,
        /// Cayley table file.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Realize the left translations and check the result.
        #[arg(long)]
        realize: bool,
        #[command(flatten)]
        opts: RealizeArgs,
    },
    /// Rigid two-valued metric, or the truncated path metric with --path.
    Rigid {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "2")]
        b: String,
        /// Points 0..n with d = min(|i - j|, 2) instead.
        #[arg(long)]
        path: bool,
    },
    /// Arens-Eells norm of a molecule with a transport certificate.
    Aenorm { space: PathBuf, molecule: PathBuf },
    /// Linear symmetries of the Arens-Eells unit ball.
    Ballsym {
        space: PathBuf,
        /// Keep only symmetries fixing the vertex for the pair ("1", "0").
        #[arg(long)]
        fix_e: bool,
    },
    /// Rational approximation of the square-root metric.
    Snowflake {
        space: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Glue spaces along a common subspace.
    Amalgam {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        common: Vec<String>,
    },
    /// One-point extension by a Katětov map.
    Katetov {
        space: PathBuf,
        values: PathBuf,
        #[arg(long, default_value = "new")]
        label: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Base,
    Full,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    #[arg(long, value_enum, default_value = "base")]
    pub mode: ModeArg,
    /// Recompute the isometry group of the result and certify the gadget.
    #[arg(long)]
    pub verify: bool,
    /// Largest number of points a realization may have.
    #[arg(long)]
    pub cap: Option<usize>,
}

impl RealizeArgs {
    fn options(&self) -> Result<RealizeOptions, CliError> {
        let point_cap = match self.cap {
            Some(c) => c,
            None => match std::env::var(POINT_CAP_VAR) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("{POINT_CAP_VAR} must be a count, got {v:?}")))?,
                Err(_) => DEFAULT_POINT_CAP,
            },
        };
        let mode = match self.mode {
            ModeArg::Base => Mode::Base,
            ModeArg::Full => Mode::Full,
        };
        Ok(RealizeOptions { mode, point_cap })
    }
}

fn read(path: &Path, report: &mut RunReport) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    report.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))
}

fn read_space(path: &Path, report: &mut RunReport) -> Result<FiniteMetricSpace, CliError> {
    Ok(formats::parse_space(&read(path, report)?)?)
}

fn rational(text: &str, what: &str) -> Result<Q, CliError> {
    parse_rational(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

const SEARCH_ORACLE: &str = "isometry group recomputed from scratch by refinement search, compared as a set";
const GADGET_ORACLE: &str = "exact recomputation over all point pairs of the unscaled gadget";

/// Verification and gadget certification verdicts for a realization.
fn check_realization(
    block: &BlockSpace,
    embedding: &Embedding,
    group: &PermutationGroup,
    actual: &PermutationGroup,
    report: &mut RunReport,
) {
    let found = verify_against(block, embedding, actual);
    let witness = found.discrepancies.first().map(|d| format!("{d:?}"));
    report.verdict("realization", SEARCH_ORACLE, found.is_ok(), witness);
    let gadget = certify_gadget(block, Some(group));
    for check in &gadget.checks_run {
        let failure = gadget.failures.iter().find(|f| f.check == *check);
        report.verdict(&format!("gadget:{check}"), GADGET_ORACLE, failure.is_none(), failure.map(|f| f.detail.clone()));
    }
}

pub fn run(cli: &Cli, report: &mut RunReport) -> Result<String, CliError> {
    match &cli.command {
        Command::Iso { space } => {
            let space = read_space(space, report)?;
            let g = try_isometries(&space, DEFAULT_ORDER_CAP)?;
            Ok(formats::write_group(&g))
        }
        Command::Realize { space, group, opts } => {
            let space = read_space(space, report)?;
            let group = formats::parse_group(&read(group, report)?)?;
            let (block, embedding) = realize(&space, &group, opts.options()?)?;
            if opts.verify {
                let actual = isometries(&block.space);
                check_realization(&block, &embedding, &group, &actual, report);
            }
            Ok(formats::write_realization(&block, &embedding))
        }
        Command::GroupToSpace { preset: name, table, realize: chain, opts } => {
            let table = match (name, table) {
                (Some(name), _) => preset(name)?,
                (None, Some(path)) => formats::parse_cayley_table(&read(path, report)?)?,
                (None, None) => return Err(CliError::Input("give --preset or --table".into())),
            };
            let (space, left) = group_to_space(&table);
            if !chain {
                return Ok(formats::write_space(&space));
            }
            let (block, embedding) = realize(&space, &left, opts.options()?)?;
            let actual = isometries(&block.space);
            check_realization(&block, &embedding, &left, &actual, report);
            let witness = abstract_isomorphic(&left, &actual, DEFAULT_ORDER_CAP)?;
            report.verdict(
                "abstract isomorphism",
                "backtracking over generator images, checked against both full multiplication tables",
                witness.is_some(),
                None,
            );
            Ok(formats::write_group_realization(&space, &left, &block, &embedding, &actual, witness.as_deref()))
        }
        Command::Rigid { n, a, b, path } => {
            let space = if *path {
                rigid_metric_path(*n)?
            } else {
                rigid_metric(&RigidSpec::new(*n, rational(a, "--a")?, rational(b, "--b")?)?)
            };
            Ok(formats::write_space(&space))
        }
        Command::Aenorm { space: space_path, molecule } => {
            let space = read_space(space_path, report)?;
            let file = formats::parse_molecule(&read(molecule, report)?, molecule.parent())?;
            if file.space.as_ref().is_some_and(|s| *s != space) {
                return Err(CliError::Input("molecule names a different space".into()));
            }
            let m = Molecule::new(&space, file.coeffs_on(&space)?)?;
            let cert = ae_norm(&m);
            let checked = cert.check(&m);
            report.verdict(
                "transport duality",
                "certificate check: flow divergence equals the molecule, potential is 1-Lipschitz, primal cost equals dual value",
                checked.is_ok(),
                checked.err().map(|e| format!("{e:?}")),
            );
            Ok(formats::write_certificate(&space, &cert))
        }
        Command::Ballsym { space, fix_e } => {
            let space = read_space(space, report)?;
            let (symmetries, fixed) = if *fix_e {
                (fixed_vector_subgroup(&space)?, Some(("1", "0")))
            } else {
                (linear_ball_symmetries(&space)?, None)
            };
            if !fix_e {
                let found: Vec<Vec<usize>> = symmetries.iter().map(|s| s.vertex_perm.clone()).collect();
                let signed = signed_isometry_actions(&space);
                // A mismatch is a finding about the space, not a failed run.
                report.verdict(
                    "vertex permutations versus signed isometry actions",
                    "±AE(u) for every u in the recomputed isometry group",
                    true,
                    (found != signed).then(|| format!("{} ball symmetries, {} signed isometries", found.len(), signed.len())),
                );
            }
            Ok(formats::write_ball_symmetries(&space, &vertex_pairs(space.len()), &symmetries, fixed))
        }
        Command::Snowflake { space, eps } => {
            let space = read_space(space, report)?;
            let eps = rational(eps, "--eps")?;
            let root = snowflake(&space, &eps)?;
            let bad = (0..space.len())
                .flat_map(|i| (0..space.len()).map(move |j| (i, j)))
                .find(|&(i, j)| !within(root.d(i, j), space.d(i, j), &eps));
            report.verdict(
                "square-root brackets",
                "exact squaring of each entry ± eps against the original distance",
                bad.is_none(),
                bad.map(|(i, j)| format!("{} {}", space.label(i), space.label(j))),
            );
            Ok(formats::write_space(&root))
        }
        Command::Amalgam { files, common } => {
            let family = files.iter().map(|f| read_space(f, report)).collect::<Result<Vec<_>, _>>()?;
            Ok(formats::write_space(&amalgamate(&family, common)?))
        }
        Command::Katetov { space, values, label } => {
            let space = read_space(space, report)?;
            let values = formats::parse_point_values(&space, &read(values, report)?)?;
            let f = KatetovMap::new(space, values)?;
            Ok(formats::write_space(&extend_by_katetov(&f, label)?))
        }
    }
}

/// `|v − √d| ≤ eps`, decided by squaring.
fn within(v: &Q, d: &Q, eps: &Q) -> bool {
    let lo = v - eps;
    let lo = if lo.is_negative() { Q::zero() } else { lo };
    let hi = v + eps;
    &(&lo * &lo) <= d && d <= &(&hi * &hi)
}
