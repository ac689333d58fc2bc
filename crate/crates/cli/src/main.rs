mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use riskbench_core::lab::{
    classification_grid_study, run_properness_study, GridSpec, SimulationSpec, VariantId,
};
use riskbench_core::report::{
    evaluate_sample, load_sample, run_compare, run_evaluate, run_recalibrate, ComparisonReport,
    EvaluationReport, RunConfig,
};

use args::{
    parse_costs, Cli, Command, CompareArgs, EvalArgs, GridArgs, PropernessArgs, SimulateCommand,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;

/// Raised when a report was written but part of it could not be computed.
#[derive(Debug)]
struct Incomplete(String);

impl std::fmt::Display for Incomplete {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Incomplete {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<riskbench_core::Error>() {
            return if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_COMPUTATION
            };
        }
        if cause.downcast_ref::<Incomplete>().is_some() {
            return EXIT_COMPUTATION;
        }
        if cause.downcast_ref::<std::num::ParseFloatError>().is_some() {
            return EXIT_VALIDATION;
        }
    }
    EXIT_COMPUTATION
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("could not start the worker pool")?;
    }
    match &cli.command {
        Command::Evaluate(a) => evaluate(cli, a),
        Command::Recalibrate(a) => {
            let mut config = a.to_config(cli)?;
            config.recalibrate = true;
            recalibrate(&config)
        }
        Command::Compare(a) => compare(cli, a),
        Command::Curves(a) => curves(cli, a),
        Command::Simulate(SimulateCommand::Properness(a)) => properness(cli, a),
        Command::Grid(a) => grid(cli, a),
    }
}

/// Failures of the core set, or of measures the user asked for by name.
fn check_complete(report: &EvaluationReport, label: &str) -> Result<()> {
    for w in &report.warnings {
        eprintln!("warning ({label}): {w}");
    }
    let mut missing: Vec<String> = report.core_failures.clone();
    if let Some(list) = &report.config.measures {
        missing.extend(
            report
                .failures()
                .filter(|e| list.contains(&e.measure))
                .map(|e| format!("{}: {}", e.key, e.error.as_deref().unwrap_or_default())),
        );
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Incomplete(format!(
            "report written, but incomplete: {}",
            missing.join("; ")
        ))
        .into())
    }
}

fn print_summary(report: &EvaluationReport) {
    println!(
        "n = {}, events = {}, prevalence = {:.4}",
        report.sample.n, report.sample.events, report.sample.prevalence
    );
    for e in &report.measures.0 {
        if let Some(v) = e.value {
            match &e.ci {
                Some(ci) => println!(
                    "  {:<28} {v:>10.4}  ({:.4}, {:.4})",
                    e.key, ci.lower, ci.upper
                ),
                None => println!("  {:<28} {v:>10.4}", e.key),
            }
        }
    }
}

fn evaluate(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let config = a.to_config(cli)?;
    if config.recalibrate {
        return recalibrate(&config);
    }
    let report = run_evaluate(&config)?;
    print_summary(&report);
    println!(
        "report: {}",
        config
            .out_dir
            .join(riskbench_core::report::REPORT_FILE)
            .display()
    );
    check_complete(&report, "evaluate")
}

fn finish_comparison(r: &ComparisonReport) -> Result<()> {
    println!(
        "{:<28} {:>10} {:>10} {:>10}",
        "measure", r.labels[0], r.labels[1], "delta"
    );
    for d in &r.deltas {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        let flag = if d.improved == Some(true) { " *" } else { "" };
        println!(
            "{:<28} {:>10} {:>10} {:>10}{flag}",
            d.key,
            cell(d.first),
            cell(d.second),
            cell(d.delta)
        );
    }
    println!(
        "all strictly proper measures improved: {}",
        if r.all_strictly_proper_improved {
            "yes"
        } else {
            "no"
        }
    );
    check_complete(&r.first, &r.labels[0])?;
    check_complete(&r.second, &r.labels[1])
}

fn recalibrate(config: &RunConfig) -> Result<()> {
    let r = run_recalibrate(config)?;
    if let Some(m) = r.recalibration {
        println!(
            "recalibration: intercept {:.6}, slope {:.6}",
            m.intercept, m.slope
        );
    }
    finish_comparison(&r)
}

fn compare(cli: &Cli, a: &CompareArgs) -> Result<()> {
    let config = a.eval.to_config(cli)?;
    let first = load_sample(&config)?;
    let mut other = config.clone();
    if let Some(p) = &a.input_b {
        other.input = p.clone();
    }
    if let Some(col) = &a.prob_col_b {
        other.schema.probability = col.clone();
    }
    let second = load_sample(&other)?;
    let r = run_compare(
        &config,
        &first,
        &second,
        [a.label_a.as_str(), a.label_b.as_str()],
    )?;
    finish_comparison(&r)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("could not write {}", path.display()))
}

fn curves(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let mut config = a.to_config(cli)?;
    config.measures = Some(Vec::new());
    let sample = load_sample(&config)?;
    let report = evaluate_sample(&config, &sample, Some(&config.out_dir))?;
    let manifest = serde_json::to_string_pretty(&report.curves)? + "\n";
    write(&config.out_dir.join("curves.json"), &manifest)?;
    for f in &report.curves {
        println!("{}", config.out_dir.join(&f.csv).display());
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn properness(cli: &Cli, a: &PropernessArgs) -> Result<()> {
    let mut spec = SimulationSpec {
        n_datasets: a.datasets,
        n_per_dataset: a.size,
        threshold: a.threshold,
        literal_square: a.literal_square,
        shrink_factor: a.shrink_factor,
        ..Default::default()
    };
    spec.ec_costs = parse_costs(&a.costs)?;
    if let Some(s) = cli.seed {
        spec.master_seed = s;
    }
    if !a.variants.is_empty() {
        spec.variants = a
            .variants
            .iter()
            .map(|&v| VariantId::new(v))
            .collect::<riskbench_core::Result<_>>()?;
    }
    let study = run_properness_study(&spec)?;
    let out = &cli.out;
    fs::create_dir_all(out).with_context(|| format!("could not create {}", out.display()))?;
    let open = |name: &str| -> Result<std::io::BufWriter<fs::File>> {
        let path = out.join(name);
        let f = fs::File::create(&path)
            .with_context(|| format!("could not create {}", path.display()))?;
        Ok(std::io::BufWriter::new(f))
    };
    study.write_main_table(open("variant_means.csv")?)?;
    study.write_threshold_table(open("variant_means_by_threshold.csv")?)?;
    study.write_detail(open("variant_detail.csv")?)?;
    study.write_risk_values(open("risk_values.csv")?)?;
    study.write_risk_summary(open("risk_summary.csv")?)?;
    study.write_risk_density(open("risk_density.csv")?)?;
    let meta = serde_json::json!({
        "spec": study.spec,
        "true_prevalence": study.true_prevalence,
        "mean_observed_prevalence": study.mean_prevalence(),
    });
    write(
        &out.join("study.json"),
        &(serde_json::to_string_pretty(&meta)? + "\n"),
    )?;
    println!(
        "{} datasets x {} individuals, {} variants; tables in {}",
        spec.n_datasets,
        spec.n_per_dataset,
        spec.variants.len(),
        out.display()
    );
    Ok(())
}

fn grid(cli: &Cli, a: &GridArgs) -> Result<()> {
    let spec = GridSpec {
        steps: a.steps,
        filter_balanced: !a.no_filter,
        ..Default::default()
    };
    let study = classification_grid_study(&spec)?;
    let out = &cli.out;
    fs::create_dir_all(out).with_context(|| format!("could not create {}", out.display()))?;
    let mut buf = Vec::new();
    study.write_combinations(&mut buf)?;
    write(
        &out.join("grid_combinations.csv"),
        std::str::from_utf8(&buf)?,
    )?;
    buf.clear();
    study.write_spearman(&mut buf)?;
    write(&out.join("grid_spearman.csv"), std::str::from_utf8(&buf)?)?;
    buf.clear();
    study.write_profiles(&mut buf)?;
    write(&out.join("grid_profiles.csv"), std::str::from_utf8(&buf)?)?;
    println!(
        "{} combinations ({} at prevalence 0.5) in {}",
        study.points.len(),
        study.count_at_prevalence(0.5),
        out.display()
    );
    Ok(())
}
