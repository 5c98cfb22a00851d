//! Command-line front end: seeded, reproducible runs of the threshold
//! diagnostics, tail fits, risk measures, vulnerability ranking, and bond
//! pricing pipeline. Exit codes: 0 success, 1 model/domain failure,
//! 2 IO/schema/config failure.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use floodrisk::catbond::calibrate::{
    calibrate_kappa, sensitivity_sweep, SweepParameter, SweepPoint,
};
use floodrisk::catbond::pricing::price_bond;
use floodrisk::config::{
    validate_inputs_for, ModelChoice, PipelineConfig, RankMethod, SweepParameterName, WeightScheme,
};
use floodrisk::data::{
    self, default_orientations, empirical_quantile, load_counts_csv, load_indicators_csv,
    load_loss_csv, normalize_cpi, IndicatorTable,
};
use floodrisk::error::Error;
use floodrisk::evt::{
    self, fit_exponential, fit_gpd, fit_poisson_frequency, fit_pp, gev_gpd_link, lr_test,
    ExcessSample, FitResult, FittedParams, GevParams, GpdParams,
};
use floodrisk::mcdm::{
    assign_tiers, entropy_weights, gra_coefficients, gra_grade, normalize_minmax, topsis_rank,
    DecisionMatrix, RankMethod as ScoreMethod, RankResult, TierPartition, WeightVector,
};
use floodrisk::risk::{
    backtest_spillover, build_compensation_table, cvar, expected_annual_loss, var, BacktestResult,
    CompensationLayer, ReferenceComparison, TailModel, REFERENCE_CVAR, REFERENCE_VAR,
};
use floodrisk::{Result, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "floodrisk",
    version,
    about = "Flood-loss tail modelling, risk measures, vulnerability ranking, and catastrophe-bond pricing"
)]
struct Cli {
    /// TOML configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master RNG seed (required for stochastic commands).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format written to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Pp,
    Gpd,
    Exp,
}

impl From<ModelArg> for ModelChoice {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Pp => ModelChoice::Pp,
            ModelArg::Gpd => ModelChoice::Gpd,
            ModelArg::Exp => ModelChoice::Exp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gra,
    Topsis,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Equal,
    Entropy,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Kappa,
    Shape,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold-selection diagnostics: mean residual life, parameter
    /// stability scan, and QQ points at the chosen threshold.
    Diagnose,
    /// Fit the exponential, generalized Pareto, and point-process tail
    /// models plus the annual event-frequency model.
    Fit {
        /// Model highlighted as selected in the report.
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Threshold as an empirical quantile of the losses.
        #[arg(long)]
        threshold_quantile: Option<f64>,
        /// Threshold as an absolute loss value.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// VaR/CVaR, return levels, back-test, compensation layers, and the
    /// published-value consistency report.
    Risk {
        /// Basis for the tail measures: the PP fit mapped to GPD, or the
        /// direct GPD fit.
        #[arg(long, value_enum)]
        basis: Option<ModelArg>,
    },
    /// Rank provinces by flood vulnerability and assign premium tiers.
    Rank {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
    },
    /// Monte Carlo price of the catastrophe bond.
    Price {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        n_paths: Option<usize>,
        /// Annual coupon spread R.
        #[arg(long)]
        spread: Option<f64>,
    },
    /// Calibrate the distortion parameter to a target price.
    Calibrate {
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        n_paths: Option<usize>,
        #[arg(long)]
        spread: Option<f64>,
    },
    /// Price the bond across a kappa or severity-shape grid.
    Sweep {
        #[arg(long, value_enum)]
        parameter: Option<SweepArg>,
        #[arg(long)]
        n_paths: Option<usize>,
        #[arg(long)]
        spread: Option<f64>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = Some(out.clone());
    }
    let out_dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    if !out_dir.is_dir() {
        std::fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
            path: out_dir.display().to_string(),
            source,
        })?;
    }

    match cli.command {
        Command::Diagnose => cmd_diagnose(&config, &out_dir, cli.format),
        Command::Fit {
            model,
            threshold_quantile,
            threshold,
        } => {
            if let Some(m) = model {
                config.fit.model = m.into();
            }
            if threshold_quantile.is_some() || threshold.is_some() {
                config.threshold.quantile = threshold_quantile;
                config.threshold.absolute = threshold;
            }
            cmd_fit(&config, &out_dir, cli.format)
        }
        Command::Risk { basis } => {
            if let Some(b) = basis {
                config.risk.basis = b.into();
            }
            cmd_risk(&config, &out_dir, cli.format)
        }
        Command::Rank { method, weights } => {
            if let Some(m) = method {
                config.mcdm.method = match m {
                    MethodArg::Gra => RankMethod::Gra,
                    MethodArg::Topsis => RankMethod::Topsis,
                };
            }
            if let Some(w) = weights {
                config.mcdm.weights = match w {
                    WeightsArg::Equal => WeightScheme::Equal,
                    WeightsArg::Entropy => WeightScheme::Entropy,
                };
            }
            cmd_rank(&config, &out_dir, cli.format)
        }
        Command::Price {
            kappa,
            n_paths,
            spread,
        } => {
            apply_bond_flags(&mut config, kappa, n_paths, spread);
            cmd_price(&config, &out_dir, cli.format)
        }
        Command::Calibrate {
            target,
            n_paths,
            spread,
        } => {
            apply_bond_flags(&mut config, None, n_paths, spread);
            if let Some(t) = target {
                config.calibrate.target = t;
            }
            cmd_calibrate(&config, &out_dir, cli.format)
        }
        Command::Sweep {
            parameter,
            n_paths,
            spread,
        } => {
            apply_bond_flags(&mut config, None, n_paths, spread);
            if let Some(p) = parameter {
                config.sweep.parameter = match p {
                    SweepArg::Kappa => SweepParameterName::Kappa,
                    SweepArg::Shape => SweepParameterName::Shape,
                };
            }
            cmd_sweep(&config, &out_dir, cli.format)
        }
    }
}

fn apply_bond_flags(
    config: &mut PipelineConfig,
    kappa: Option<f64>,
    n_paths: Option<usize>,
    spread: Option<f64>,
) {
    if let Some(k) = kappa {
        config.bond.kappa = k;
    }
    if let Some(n) = n_paths {
        config.bond.n_paths = n;
    }
    if let Some(r) = spread {
        config.bond.spread = r;
    }
}

/// Loss sample after optional CPI normalization, sorted ascending.
fn load_losses(config: &PipelineConfig) -> Result<Vec<f64>> {
    let records = load_loss_csv(&config.inputs.losses, &config.inputs.loss_columns)?;
    let records = match (&config.inputs.cpi, config.inputs.base_year) {
        (Some(cpi_path), Some(base_year)) => {
            let cpi = data::load_cpi_csv(cpi_path)?;
            normalize_cpi(&records, &cpi, base_year)?
        }
        _ => records,
    };
    let mut losses: Vec<f64> = records.iter().map(|r| r.loss).collect();
    losses.sort_by(f64::total_cmp);
    Ok(losses)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit_json<T: Serialize>(report: &T, path: &Path, format: Format) -> Result<()> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Schema(format!("serialization: {e}")))?;
    write_text(path, &(json.clone() + "\n"))?;
    if format == Format::Json {
        println!("{json}");
    }
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>], echo: bool) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_text(path, &text)?;
    if echo {
        print!("{text}");
        std::io::stdout().flush().ok();
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// diagnose

fn cmd_diagnose(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    validate_inputs_for(config, "diagnose")?;
    config.threshold.validate()?;
    let losses = load_losses(config)?;

    // Grid from the sample minimum up to the 95% quantile, which keeps
    // enough exceedances per point for the interval estimates.
    let lo = losses[0];
    let hi = empirical_quantile(&losses, 0.95)?;
    let grid: Vec<f64> = (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect();

    let mrl = evt::mean_residual_life(&losses, &grid)?;
    let stability = evt::param_stability_scan(&losses, &grid, config.fit.min_exceedances);

    let u = config.threshold.resolve(&losses)?;
    let sample = ExcessSample::new(losses.clone(), u);
    let gpd = fit_gpd(&sample)?;
    let gpd_params = match gpd.params {
        FittedParams::Gpd(p) => p,
        _ => unreachable!(),
    };
    let excesses: Vec<f64> = losses.iter().filter(|&&x| x > u).map(|&x| x - u).collect();
    let qq = evt::qq_points(&excesses, &gpd_params);

    write_csv(
        &out_dir.join("mrl.csv"),
        &[
            "threshold",
            "mean_excess",
            "ci_lo",
            "ci_hi",
            "n_exceedances",
        ],
        &mrl.iter()
            .map(|p| {
                vec![
                    p.threshold.to_string(),
                    p.mean_excess.to_string(),
                    p.lo.to_string(),
                    p.hi.to_string(),
                    p.n_u.to_string(),
                ]
            })
            .collect::<Vec<_>>(),
        format == Format::Csv,
    )?;
    write_csv(
        &out_dir.join("stability.csv"),
        &[
            "threshold",
            "n_exceedances",
            "shape",
            "shape_lo",
            "shape_hi",
            "modified_scale",
            "modified_scale_lo",
            "modified_scale_hi",
            "converged",
        ],
        &stability
            .iter()
            .map(|p| {
                vec![
                    p.threshold.to_string(),
                    p.n_u.to_string(),
                    p.shape.to_string(),
                    p.shape_lo.to_string(),
                    p.shape_hi.to_string(),
                    p.modified_scale.to_string(),
                    p.modified_scale_lo.to_string(),
                    p.modified_scale_hi.to_string(),
                    p.converged.to_string(),
                ]
            })
            .collect::<Vec<_>>(),
        false,
    )?;
    write_csv(
        &out_dir.join("qq.csv"),
        &["empirical", "model"],
        &qq.iter()
            .map(|(e, m)| vec![e.to_string(), m.to_string()])
            .collect::<Vec<_>>(),
        false,
    )?;

    #[derive(Serialize)]
    struct DiagnoseReport {
        schema_version: &'static str,
        n: usize,
        threshold: f64,
        n_exceedances: usize,
        outputs: Vec<String>,
    }
    let report = DiagnoseReport {
        schema_version: SCHEMA_VERSION,
        n: losses.len(),
        threshold: u,
        n_exceedances: sample.n_u(),
        outputs: ["mrl.csv", "stability.csv", "qq.csv"]
            .iter()
            .map(|f| out_dir.join(f).display().to_string())
            .collect(),
    };
    emit_json(&report, &out_dir.join("diagnose.json"), format)
}

// ---------------------------------------------------------------------------
// fit

#[derive(Serialize)]
struct FrequencyReport {
    lambda: f64,
    gof_pvalue: f64,
    naive_ks_pvalue: f64,
    ks_statistic: f64,
    seed: u64,
}

#[derive(Serialize)]
struct FitReport {
    schema_version: &'static str,
    threshold: f64,
    n: usize,
    n_exceedances: usize,
    blocks: f64,
    selected_model: ModelChoice,
    exponential: FitResult,
    gpd: FitResult,
    pp: FitResult,
    /// GPD implied by the PP fit through the parameter link.
    pp_linked_gpd: GpdParams,
    /// p-value of the likelihood-ratio test of GPD against its
    /// exponential submodel (1 df).
    lr_gpd_vs_exp_pvalue: f64,
    frequency: Option<FrequencyReport>,
}

fn resolved_fits(
    config: &PipelineConfig,
    losses: &[f64],
) -> Result<(
    f64,
    ExcessSample,
    FitResult,
    FitResult,
    FitResult,
    GpdParams,
    f64,
)> {
    let u = config.threshold.resolve(losses)?;
    let sample = ExcessSample::new(losses.to_vec(), u);
    let exp = fit_exponential(&sample)?;
    let gpd = fit_gpd(&sample)?;
    let blocks = config.fit.blocks.resolve(losses.len())?;
    let pp = fit_pp(losses, u, blocks)?;
    let gev = match pp.params {
        FittedParams::Gev(g) => g,
        _ => unreachable!(),
    };
    let linked = gev_gpd_link(&gev, u)?;
    Ok((u, sample, exp, gpd, pp, linked, blocks))
}

fn cmd_fit(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    validate_inputs_for(config, "fit")?;
    config.threshold.validate()?;
    let seed = config.require_seed()?;
    let losses = load_losses(config)?;
    let (u, sample, exp, gpd, pp, linked, blocks) = resolved_fits(config, &losses)?;
    let lr_p = lr_test(&gpd, &exp, 1)?;

    let frequency = match &config.inputs.exceedance_counts {
        Some(path) => {
            let counts: Vec<u64> = load_counts_csv(path)?.into_iter().map(|(_, c)| c).collect();
            let rate = fit_poisson_frequency(&counts, seed)?;
            Some(FrequencyReport {
                lambda: rate.lambda,
                gof_pvalue: rate.gof_pvalue,
                naive_ks_pvalue: rate.naive_ks_pvalue,
                ks_statistic: rate.ks_statistic,
                seed,
            })
        }
        None => None,
    };

    let report = FitReport {
        schema_version: SCHEMA_VERSION,
        threshold: u,
        n: losses.len(),
        n_exceedances: sample.n_u(),
        blocks,
        selected_model: config.fit.model,
        exponential: exp,
        gpd,
        pp,
        pp_linked_gpd: linked,
        lr_gpd_vs_exp_pvalue: lr_p,
        frequency,
    };
    if format == Format::Csv {
        let rows = fit_csv_rows(&report);
        write_csv(
            &out_dir.join("fit.csv"),
            &["quantity", "value"],
            &rows,
            true,
        )?;
    }
    emit_json(&report, &out_dir.join("fit.json"), format)
}

fn fit_csv_rows(r: &FitReport) -> Vec<Vec<String>> {
    let mut rows = vec![
        vec!["threshold".into(), r.threshold.to_string()],
        vec!["n_exceedances".into(), r.n_exceedances.to_string()],
        vec!["exp_aic".into(), r.exponential.aic.to_string()],
        vec!["gpd_aic".into(), r.gpd.aic.to_string()],
        vec!["pp_aic".into(), r.pp.aic.to_string()],
    ];
    if let Some(f) = &r.frequency {
        rows.push(vec!["lambda".into(), f.lambda.to_string()]);
    }
    rows
}

// ---------------------------------------------------------------------------
// risk

#[derive(Serialize)]
struct RiskRow {
    level: f64,
    var: f64,
    cvar: f64,
    return_period_years: f64,
}

#[derive(Serialize)]
struct RiskReport {
    schema_version: &'static str,
    basis: ModelChoice,
    threshold: f64,
    gpd: GpdParams,
    lambda: f64,
    rows: Vec<RiskRow>,
    expected_annual_loss: f64,
    /// Computed measures next to the published reference values, with
    /// relative deviations (the published table is not reproducible from
    /// the published formulas; see README).
    reference_comparison: Vec<ReferenceComparison>,
    /// Empirical exceedance counts of the published VaR values.
    backtest: Vec<BacktestResult>,
    compensation: Vec<CompensationLayer>,
}

fn cmd_risk(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    validate_inputs_for(config, "risk")?;
    config.threshold.validate()?;
    config.risk.validate()?;
    let losses = load_losses(config)?;
    let (u, sample, _exp, gpd_fit, pp_fit, linked, _blocks) = resolved_fits(config, &losses)?;

    let (gpd, gev) = match config.risk.basis {
        ModelChoice::Pp => {
            let gev = match pp_fit.params {
                FittedParams::Gev(g) => g,
                _ => unreachable!(),
            };
            (linked, gev)
        }
        ModelChoice::Gpd => {
            let p = match gpd_fit.params {
                FittedParams::Gpd(p) => p,
                _ => unreachable!(),
            };
            // GEV equivalent of the direct GPD fit at unit rate, used only
            // by the mean formulas, which depend on it through the link.
            let gev = GevParams {
                location: u,
                scale: p.scale,
                shape: p.shape,
            };
            (p, gev)
        }
        ModelChoice::Exp => unreachable!("rejected by RiskConfig::validate"),
    };

    let lambda =
        match config.risk.lambda {
            Some(l) if l > 0.0 => l,
            Some(l) => {
                return Err(Error::Config(format!(
                    "risk.lambda must be positive: got {l}"
                )))
            }
            None => match &config.inputs.exceedance_counts {
                Some(path) => {
                    let counts = load_counts_csv(path)?;
                    let total: u64 = counts.iter().map(|&(_, c)| c).sum();
                    total as f64 / counts.len() as f64
                }
                None => return Err(Error::Config(
                    "risk needs an annual event rate: set risk.lambda or inputs.exceedance_counts"
                        .into(),
                )),
            },
        };

    // Config levels are significance (upper tail) probabilities; the
    // measures take the complementary confidence level.
    let model = TailModel {
        gpd,
        tail_prob: sample.tail_prob(),
        lambda,
    };
    let mut rows = Vec::with_capacity(config.risk.levels.len());
    for &q in &config.risk.levels {
        let v = var(1.0 - q, &model)?;
        let c = cvar(1.0 - q, &model, &gev)?;
        rows.push(RiskRow {
            level: q,
            var: v,
            cvar: c,
            return_period_years: 1.0 / (lambda * q),
        });
    }
    let eal = expected_annual_loss(&model, &gev)?;

    let mut reference_comparison = Vec::new();
    for &(q, ref_var) in REFERENCE_VAR.iter() {
        reference_comparison.push(ReferenceComparison::new(
            &format!("var_{q}"),
            ref_var,
            var(1.0 - q, &model)?,
        ));
    }
    for &(q, ref_cvar) in REFERENCE_CVAR.iter() {
        reference_comparison.push(ReferenceComparison::new(
            &format!("cvar_{q}"),
            ref_cvar,
            cvar(1.0 - q, &model, &gev)?,
        ));
    }

    let backtest = backtest_spillover(&losses, &REFERENCE_VAR);
    // the layered scheme has four takers, so it is built from the four
    // lowest confidence levels; further levels only add report rows
    let mut confidence: Vec<f64> = config.risk.levels.iter().map(|&q| 1.0 - q).collect();
    confidence.sort_by(f64::total_cmp);
    confidence.truncate(4);
    let compensation = build_compensation_table(&model, &gev, &confidence)?;

    let report = RiskReport {
        schema_version: SCHEMA_VERSION,
        basis: config.risk.basis,
        threshold: u,
        gpd,
        lambda,
        rows,
        expected_annual_loss: eal,
        reference_comparison,
        backtest,
        compensation,
    };
    if format == Format::Csv {
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| vec![r.level.to_string(), r.var.to_string(), r.cvar.to_string()])
            .collect();
        write_csv(
            &out_dir.join("risk.csv"),
            &["level", "var", "cvar"],
            &rows,
            true,
        )?;
    }
    emit_json(&report, &out_dir.join("risk.json"), format)
}

// ---------------------------------------------------------------------------
// rank

#[derive(Serialize)]
struct ComparisonColumn {
    label: &'static str,
    result: RankResult,
}

#[derive(Serialize)]
struct RankReport {
    schema_version: &'static str,
    method: ScoreMethod,
    weight_scheme: WeightScheme,
    weights: Vec<f64>,
    result: RankResult,
    tiers: TierPartition,
    /// Side-by-side rankings under the standard method/weight combinations,
    /// including the exposure-only variant over the first six criteria.
    comparison: Vec<ComparisonColumn>,
}

fn ranking_comparison(
    matrix: &DecisionMatrix,
    normalized: &DecisionMatrix,
    zeta: f64,
    amplitude: f64,
) -> Result<Vec<ComparisonColumn>> {
    let coeffs = gra_coefficients(normalized, zeta)?;
    let entropy = entropy_weights(normalized, amplitude)?;
    let mut columns = vec![
        ComparisonColumn {
            label: "gra_equal",
            result: gra_grade(matrix, &coeffs, &WeightVector::equal(matrix.p()))?,
        },
        ComparisonColumn {
            label: "gra_entropy",
            result: gra_grade(matrix, &coeffs, &entropy)?,
        },
        ComparisonColumn {
            label: "topsis_entropy",
            result: topsis_rank(matrix, &entropy)?,
        },
    ];
    // exposure-only variant: equal weights over the first six criteria
    if matrix.p() > 6 {
        let sub = DecisionMatrix::new(
            matrix.alternatives.clone(),
            matrix.criteria[..6].to_vec(),
            matrix.values.iter().map(|r| r[..6].to_vec()).collect(),
            matrix.orientations[..6].to_vec(),
        )?;
        let sub_norm = normalize_minmax(&sub)?;
        let sub_coeffs = gra_coefficients(&sub_norm, zeta)?;
        columns.push(ComparisonColumn {
            label: "gra_exposure_equal",
            result: gra_grade(&sub, &sub_coeffs, &WeightVector::equal(6))?,
        });
    }
    Ok(columns)
}

fn cmd_rank(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    validate_inputs_for(config, "rank")?;
    config.mcdm.validate()?;
    let table: IndicatorTable =
        load_indicators_csv(config.inputs.indicators.as_ref().expect("validated"))?;
    let orientations = config
        .mcdm
        .orientations
        .clone()
        .unwrap_or_else(|| default_orientations().to_vec());
    let criteria: Vec<String> = (1..=orientations.len()).map(|j| format!("X{j}")).collect();
    let matrix = DecisionMatrix::new(
        table.provinces.clone(),
        criteria,
        table.values.iter().map(|r| r.to_vec()).collect(),
        orientations,
    )?;

    let normalized = normalize_minmax(&matrix)?;
    let weights = match config.mcdm.weights {
        WeightScheme::Equal => WeightVector::equal(matrix.p()),
        WeightScheme::Entropy => entropy_weights(&normalized, config.mcdm.amplitude)?,
    };
    let result = match config.mcdm.method {
        RankMethod::Gra => {
            let coeffs = gra_coefficients(&normalized, config.mcdm.zeta)?;
            gra_grade(&matrix, &coeffs, &weights)?
        }
        RankMethod::Topsis => topsis_rank(&matrix, &weights)?,
    };
    let tiers = assign_tiers(&result, &config.mcdm.tier_breaks)?;

    let mut rows = Vec::with_capacity(result.alternatives.len());
    for i in result.by_rank() {
        rows.push(vec![
            result.alternatives[i].clone(),
            result.scores[i].to_string(),
            result.ranks[i].to_string(),
            format!("{:?}", tiers.tiers[i]),
        ]);
    }
    write_csv(
        &out_dir.join("rank.csv"),
        &["province", "score", "rank", "tier"],
        &rows,
        format == Format::Csv,
    )?;

    let comparison = ranking_comparison(
        &matrix,
        &normalized,
        config.mcdm.zeta,
        config.mcdm.amplitude,
    )?;
    let report = RankReport {
        schema_version: SCHEMA_VERSION,
        method: result.method,
        weight_scheme: config.mcdm.weights,
        weights: weights.w.clone(),
        result,
        tiers,
        comparison,
    };
    emit_json(&report, &out_dir.join("rank.json"), format)
}

// ---------------------------------------------------------------------------
// price / calibrate / sweep

#[derive(Serialize)]
struct PriceReport {
    schema_version: &'static str,
    price: f64,
    std_error: f64,
    kappa: f64,
    spread: f64,
    n_paths: usize,
    seed: u64,
    config: floodrisk::config::BondConfig,
}

fn cmd_price(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    config.bond.validate()?;
    let seed = config.require_seed()?;
    let r = price_bond(
        &config.bond.terms(),
        &config.bond.trigger_model(),
        &config.bond.rates(),
        config.bond.kappa,
        config.bond.n_paths,
        seed,
    )?;
    let report = PriceReport {
        schema_version: SCHEMA_VERSION,
        price: r.price,
        std_error: r.std_error,
        kappa: r.kappa,
        spread: config.bond.spread,
        n_paths: r.n_paths,
        seed,
        config: config.bond.clone(),
    };
    if format == Format::Csv {
        let rows = vec![
            vec!["price".into(), report.price.to_string()],
            vec!["std_error".into(), report.std_error.to_string()],
            vec!["kappa".into(), report.kappa.to_string()],
            vec!["spread".into(), report.spread.to_string()],
        ];
        write_csv(
            &out_dir.join("price.csv"),
            &["quantity", "value"],
            &rows,
            true,
        )?;
    }
    emit_json(&report, &out_dir.join("price.json"), format)
}

#[derive(Serialize)]
struct CalibrateReport {
    schema_version: &'static str,
    kappa: f64,
    price: f64,
    target: f64,
    iterations: usize,
    spread: f64,
    n_paths: usize,
    seed: u64,
}

fn cmd_calibrate(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    config.bond.validate()?;
    let seed = config.require_seed()?;
    let r = calibrate_kappa(
        &config.bond.terms(),
        &config.bond.trigger_model(),
        &config.bond.rates(),
        config.calibrate.target,
        config.calibrate.bracket,
        config.bond.n_paths,
        seed,
    )?;
    let report = CalibrateReport {
        schema_version: SCHEMA_VERSION,
        kappa: r.kappa,
        price: r.price,
        target: r.target,
        iterations: r.iterations,
        spread: config.bond.spread,
        n_paths: r.n_paths,
        seed,
    };
    if format == Format::Csv {
        let rows = vec![
            vec!["kappa".into(), report.kappa.to_string()],
            vec!["price".into(), report.price.to_string()],
            vec!["target".into(), report.target.to_string()],
        ];
        write_csv(
            &out_dir.join("calibrate.csv"),
            &["quantity", "value"],
            &rows,
            true,
        )?;
    }
    emit_json(&report, &out_dir.join("calibrate.json"), format)
}

#[derive(Serialize)]
struct SweepReport {
    schema_version: &'static str,
    parameter: SweepParameterName,
    kappa: f64,
    spread: f64,
    n_paths: usize,
    seed: u64,
    points: Vec<SweepPoint>,
}

fn cmd_sweep(config: &PipelineConfig, out_dir: &Path, format: Format) -> Result<()> {
    config.bond.validate()?;
    config.sweep.validate()?;
    let seed = config.require_seed()?;
    let parameter = match config.sweep.parameter {
        SweepParameterName::Kappa => SweepParameter::Kappa,
        SweepParameterName::Shape => SweepParameter::Shape,
    };
    let points = sensitivity_sweep(
        parameter,
        &config.sweep.grid,
        &config.bond.terms(),
        &config.bond.trigger_model(),
        &config.bond.rates(),
        config.bond.kappa,
        config.bond.n_paths,
        seed,
    )?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                p.value.to_string(),
                p.price.map(|v| v.to_string()).unwrap_or_default(),
                p.std_error.map(|v| v.to_string()).unwrap_or_default(),
                p.flagged.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(
        &out_dir.join("sweep.csv"),
        &["value", "price", "std_error", "flagged"],
        &rows,
        format == Format::Csv,
    )?;

    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        parameter: config.sweep.parameter,
        kappa: config.bond.kappa,
        spread: config.bond.spread,
        n_paths: config.bond.n_paths,
        seed,
        points,
    };
    emit_json(&report, &out_dir.join("sweep.json"), format)
}
