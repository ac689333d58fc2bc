use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use riskbench_core::curves::DecisionCurveSpec;
use riskbench_core::report::{BootstrapOptions, RunConfig};
use riskbench_core::{CostSpec, CsvSchema, MeasureId};

#[derive(Debug, Parser)]
#[command(
    name = "riskbench",
    version,
    about = "Evaluate binary-outcome risk predictions"
)]
pub struct Cli {
    /// Master seed for bootstrap and simulation streams.
    #[arg(long, global = true, env = "RISKBENCH_SEED")]
    pub seed: Option<u64>,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = "riskbench-out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute measures and curves for one set of predictions.
    Evaluate(EvalArgs),
    /// Fit a logistic recalibration and report before and after.
    Recalibrate(EvalArgs),
    /// Compare two sets of predictions for the same individuals.
    Compare(CompareArgs),
    /// Write curve files only.
    Curves(EvalArgs),
    /// Simulation studies.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Summary classification measures over a prevalence/sensitivity/specificity lattice.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// CSV file with one row per individual.
    #[arg(required_unless_present = "config")]
    pub input: Option<PathBuf>,

    /// Load a saved run configuration; --out and --seed still apply.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, default_value = "probability")]
    pub prob_col: String,
    #[arg(long, default_value = "outcome")]
    pub outcome_col: String,
    #[arg(long)]
    pub group_col: Option<String>,
    #[arg(long)]
    pub id_col: Option<String>,

    /// Decision threshold(s); the first is primary. Never chosen automatically.
    #[arg(long = "threshold", value_delimiter = ',')]
    pub thresholds: Vec<f64>,

    /// Decision-curve threshold range as LOW:HIGH.
    #[arg(long, default_value = "0.05:0.40")]
    pub dca_range: String,
    #[arg(long, default_value_t = 0.01)]
    pub dca_step: f64,
    /// Odd moving-average window for the decision curve; 1 disables smoothing.
    #[arg(long, default_value_t = 5)]
    pub smooth_window: usize,

    /// Costs of a false negative and a false positive as FN:FP.
    #[arg(long)]
    pub costs: Option<String>,

    /// Bootstrap replicates; no intervals unless given.
    #[arg(long)]
    pub boot_reps: Option<usize>,
    /// Seed for the bootstrap; overrides --seed.
    #[arg(long)]
    pub boot_seed: Option<u64>,
    #[arg(long, default_value_t = 0.95)]
    pub ci_level: f64,
    /// Resample events and non-events separately.
    #[arg(long)]
    pub stratified: bool,

    /// Clamp probabilities of exactly 0 or 1 to [eps, 1 - eps] for log-based measures.
    #[arg(long)]
    pub clamp_eps: Option<f64>,

    /// Number of equal-size groups for the grouped calibration curve and ECE.
    #[arg(long, default_value_t = 10)]
    pub groups: usize,
    /// Smoother span for the calibration curve, ICI and ECI.
    #[arg(long, default_value_t = 0.75)]
    pub span: f64,
    /// Report ECI without dividing by its null-model value.
    #[arg(long)]
    pub unnormalized_eci: bool,

    /// Also run a before/after recalibration comparison.
    #[arg(long)]
    pub recalibrate: bool,
    /// Calibration curve per subgroup (needs --group-col).
    #[arg(long)]
    pub subgroups: bool,

    /// Measures to report next to the core set, comma separated; default all.
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Second CSV; defaults to the first input.
    #[arg(long)]
    pub input_b: Option<PathBuf>,
    /// Probability column of the second model; defaults to --prob-col.
    #[arg(long)]
    pub prob_col_b: Option<String>,
    #[arg(long, default_value = "first")]
    pub label_a: String,
    #[arg(long, default_value = "second")]
    pub label_b: String,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Measures under eleven distortions of a known true model.
    Properness(PropernessArgs),
}

#[derive(Debug, Args)]
pub struct PropernessArgs {
    #[arg(long, default_value_t = 2000)]
    pub datasets: usize,
    /// Individuals per dataset.
    #[arg(long, default_value_t = 1000)]
    pub size: usize,
    /// Variant ids 1 to 11, comma separated; default all.
    #[arg(long, value_delimiter = ',')]
    pub variants: Vec<u8>,
    /// Square the linear predictor in variants 5 and 6 instead of doubling it.
    #[arg(long)]
    pub literal_square: bool,
    /// Factor of the shrink/inflate variants 7 to 9.
    #[arg(long, default_value_t = 0.1)]
    pub shrink_factor: f64,
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Expected-cost costs as FN:FP.
    #[arg(long, default_value = "9:1")]
    pub costs: String,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 20)]
    pub steps: u32,
    /// Keep sensitivity/specificity pairs with balanced accuracy below one half.
    #[arg(long)]
    pub no_filter: bool,
}

fn invalid(message: String) -> riskbench_core::Error {
    riskbench_core::Error::InvalidArgument(message)
}

pub fn parse_costs(text: &str) -> Result<CostSpec> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| invalid(format!("costs must look like FN:FP, got '{text}'")))?;
    let cost_fn: f64 = a
        .trim()
        .parse()
        .with_context(|| format!("bad cost '{a}'"))?;
    let cost_fp: f64 = b
        .trim()
        .parse()
        .with_context(|| format!("bad cost '{b}'"))?;
    Ok(CostSpec::new(cost_fn, cost_fp)?)
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| invalid(format!("range must look like LOW:HIGH, got '{text}'")))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

impl EvalArgs {
    /// Run configuration from the flags, or from --config with the global
    /// overrides applied.
    pub fn to_config(&self, cli: &Cli) -> Result<RunConfig> {
        if let Some(path) = &self.config {
            let mut c = RunConfig::load(path)?;
            c.out_dir = cli.out.clone();
            if let Some(s) = self.boot_seed.or(cli.seed) {
                c.seed = s;
            }
            return Ok(c);
        }
        let Some(input) = &self.input else {
            return Err(invalid("an input file or --config is required".into()).into());
        };
        let mut schema = CsvSchema::new(&self.prob_col, &self.outcome_col);
        schema.group = self.group_col.clone();
        schema.id = self.id_col.clone();
        let mut c = RunConfig::new(input, schema, &cli.out);
        c.thresholds = self.thresholds.clone();
        let (lower, upper) = parse_range(&self.dca_range)?;
        c.decision_curve = DecisionCurveSpec {
            lower,
            upper,
            step: self.dca_step,
            smooth_window: self.smooth_window,
        };
        c.costs = self.costs.as_deref().map(parse_costs).transpose()?;
        c.bootstrap = self.boot_reps.map(|replicates| BootstrapOptions {
            replicates,
            level: self.ci_level,
            stratified: self.stratified,
        });
        c.clamp_epsilon = self.clamp_eps;
        c.calibration.groups = self.groups;
        c.calibration.smoother.span = self.span;
        c.calibration.unnormalized_eci = self.unnormalized_eci;
        c.recalibrate = self.recalibrate;
        c.subgroups = self.subgroups;
        if !self.measures.is_empty() {
            let list = self
                .measures
                .iter()
                .map(|m| m.trim().parse::<MeasureId>())
                .collect::<riskbench_core::Result<Vec<_>>>()?;
            c.measures = Some(list);
        }
        if let Some(s) = self.boot_seed.or(cli.seed) {
            c.seed = s;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_pairs() {
        let c = parse_costs("9:1").unwrap();
        assert_eq!((c.cost_fn, c.cost_fp), (9.0, 1.0));
        assert!(parse_costs("9").is_err());
        assert!(parse_costs("-1:1").is_err());
    }

    #[test]
    fn flags_build_a_config() {
        let cli = Cli::parse_from([
            "riskbench",
            "--seed",
            "7",
            "evaluate",
            "data.csv",
            "--threshold",
            "0.1,0.2",
            "--costs",
            "9:1",
            "--boot-reps",
            "200",
            "--measures",
            "brier,f1",
        ]);
        let Command::Evaluate(args) = &cli.command else {
            panic!("wrong subcommand")
        };
        let c = args.to_config(&cli).unwrap();
        assert_eq!(c.thresholds, vec![0.1, 0.2]);
        assert_eq!(c.seed, 7);
        assert_eq!(c.bootstrap.unwrap().replicates, 200);
        assert_eq!(c.measures, Some(vec![MeasureId::Brier, MeasureId::F1]));
        c.validate().unwrap();
    }
}
