//! Command implementations: each builds a table from a grid, dispatching
//! grid points to a worker pool and buffering rows in grid order.

use rayon::prelude::*;

use ceo_bounds::bound::{BoundResult, FormulaId};
use ceo_bounds::density::{smoothed_entropy_power, NumericConfig, Smoothed, SourceSummary};
use ceo_bounds::jscc::{
    agents_needed_analog, agents_needed_digital, fit_scaling_laws, scaling_sweep, JsccScenario,
};
use ceo_bounds::region::{
    ceo_sum_rate_lower, formula as region_formula, gap_bounds, inner_sum_rate, outer_min_sum_rate,
    rate_loss_lower, region_check, CeoProblem, OptimizerConfig,
};
use ceo_bounds::remote::{
    epi_remote_lower_from_stats, epi_remote_upper, remote_explicit_from_stats, remote_sandwich,
    shannon_bounds, RemoteInstance,
};
use ceo_bounds::Error;

use crate::config::FileConfig;
use crate::rows::{Cell, Table};
use crate::CliError;

const LN_2: f64 = std::f64::consts::LN_2;

pub struct Ctx {
    pub file: FileConfig,
    pub ncfg: NumericConfig<f64>,
    pub ocfg: OptimizerConfig<f64>,
    pub seed: u64,
    pub bits: bool,
    pub d_grid: Vec<f64>,
    pub m_grid: Vec<usize>,
    pub s_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub samples: u64,
}

impl Ctx {
    fn rate(&self, nats: f64) -> f64 {
        if self.bits {
            nats / LN_2
        } else {
            nats
        }
    }

    fn rate_col(&self, base: &str) -> String {
        if self.bits {
            base.replace("nats", "bits")
        } else {
            base.to_string()
        }
    }

    fn require_d(&self) -> Result<&[f64], CliError> {
        if self.d_grid.is_empty() {
            return Err(CliError::Config("distortion grid is empty".into()));
        }
        Ok(&self.d_grid)
    }

    fn require_m(&self) -> Result<&[usize], CliError> {
        if self.m_grid.is_empty() {
            return Err(CliError::Config("agent-count grid is empty".into()));
        }
        Ok(&self.m_grid)
    }
}

fn numerical(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(_) | Error::TabulatedFormat(_) | Error::TooManyAgents { .. } => {
            CliError::Config(e.to_string())
        }
        other => CliError::Numerical(other.to_string()),
    }
}

fn bound_explain(b: &BoundResult<f64>) -> String {
    format!(
        "{} — {}; domain: {}",
        b.formula.id(),
        b.formula.describe(),
        b.domain_note
    )
}

/// Smoothed entropy/entropy-power/Fisher ladder of the source.
pub fn entropy(ctx: &Ctx) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    if ctx.s_grid.is_empty() {
        return Err(CliError::Config("smoothing grid is empty".into()));
    }
    let entropy_col = ctx.rate_col("entropy_nats");
    let mut table = Table::new(&[
        "s",
        &entropy_col,
        "entropy_power",
        "fisher_information",
        "valid",
        "formula_id",
    ]);
    let rows: Vec<_> = ctx
        .s_grid
        .par_iter()
        .map(|&s| {
            Smoothed::new(&density, s)
                .and_then(|sm| sm.stats(&ctx.ncfg))
                .map(|st| (s, st))
        })
        .collect();
    for row in rows {
        match row {
            Ok((s, st)) => table.push(
                vec![
                    Cell::Float(s),
                    Cell::Float(ctx.rate(st.entropy)),
                    Cell::Float(st.entropy_power),
                    Cell::Float(st.fisher),
                    Cell::Bool(true),
                    Cell::Text(FormulaId::SmoothedEntropyPower.id().into()),
                ],
                true,
                format!(
                    "{} — {}; domain: s >= 0",
                    FormulaId::SmoothedEntropyPower.id(),
                    FormulaId::SmoothedEntropyPower.describe()
                ),
            ),
            Err(e) => return Err(numerical(e)),
        }
    }
    Ok(table)
}

fn push_bound(table: &mut Table, ctx: &Ctx, d: f64, b: &BoundResult<f64>) {
    table.push(
        vec![
            Cell::Float(d),
            Cell::Text(b.formula.id().into()),
            Cell::Text(b.kind.to_string()),
            Cell::Float(ctx.rate(b.value)),
            Cell::Bool(b.valid),
        ],
        b.valid,
        bound_explain(b),
    );
}

/// All point-to-point bounds over the distortion grid.
pub fn remote_bounds(ctx: &Ctx) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    let noise = ctx.file.noise_vars(1)?[0];
    let rdf = ctx.file.rdf_hook(&density)?;
    let d_grid = ctx.require_d()?;
    let inst = RemoteInstance::new(&density, noise, &ctx.ncfg).map_err(numerical)?;
    let summary = inst.source;

    let value_col = ctx.rate_col("value_nats");
    let mut table = Table::new(&["d", "bound_id", "kind", &value_col, "valid"]);
    for &d in d_grid {
        let (sh_lo, sh_hi) = shannon_bounds(&summary, d).map_err(numerical)?;
        let (sw_lo, sw_hi) = remote_sandwich(&inst.stats, d);
        let (ex_lo, ex_hi) = remote_explicit_from_stats(&inst, d);
        let epi_lo = epi_remote_lower_from_stats(&inst, d, &rdf);
        let epi_hi = epi_remote_upper(&density, noise, d);
        for b in [&sh_lo, &sh_hi, &sw_lo, &sw_hi, &ex_lo, &ex_hi, &epi_lo, &epi_hi] {
            push_bound(&mut table, ctx, d, b);
        }
    }
    Ok(table)
}

/// Sum-rate bounds over the (m, d) grid.
pub fn ceo_bounds(ctx: &Ctx) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    let rdf = ctx.file.rdf_hook(&density)?;
    let d_grid = ctx.require_d()?.to_vec();
    let m_grid = ctx.require_m()?.to_vec();

    struct Point {
        m: usize,
        d: f64,
        bounds: Vec<(BoundResult<f64>, Option<Vec<f64>>)>,
    }

    let points: Result<Vec<Point>, CliError> = m_grid
        .par_iter()
        .flat_map(|&m| d_grid.par_iter().map(move |&d| (m, d)))
        .map(|(m, d)| {
            let noise_vars = ctx.file.noise_vars(m)?;
            let problem = CeoProblem::new(density.clone(), noise_vars, rdf.clone(), d)
                .map_err(numerical)?;
            let prep = problem.prepare(&ctx.ncfg).map_err(numerical)?;
            let mut bounds = Vec::new();
            match ceo_sum_rate_lower(&prep) {
                Ok(b) => bounds.push((b, None)),
                Err(Error::InvalidParameter(msg)) => bounds.push((
                    invalid_bound(FormulaId::CeoSumRateLower, &msg),
                    None,
                )),
                Err(e) => return Err(numerical(e)),
            }
            match inner_sum_rate(&prep) {
                Ok(b) => bounds.push((b, None)),
                Err(e @ Error::DistortionUnreachable { .. }) => bounds.push((
                    invalid_bound(FormulaId::CeoInnerSumRate, &e.to_string()),
                    None,
                )),
                Err(e) => return Err(numerical(e)),
            }
            match outer_min_sum_rate(&prep, &ctx.ocfg) {
                Ok(sol) => {
                    let witness = sol.witness_r.clone();
                    bounds.push((sol.bound(), Some(witness)));
                }
                Err(e @ Error::Infeasible { .. }) => bounds.push((
                    invalid_bound(FormulaId::CeoOuterMinSumRate, &e.to_string()),
                    None,
                )),
                Err(e) => return Err(numerical(e)),
            }
            Ok(Point { m, d, bounds })
        })
        .collect();

    let value_col = ctx.rate_col("value_nats");
    let mut table = Table::new(&["m", "D", "bound_id", &value_col, "valid", "witness_r"]);
    for point in points? {
        for (b, witness) in point.bounds {
            table.push(
                vec![
                    Cell::Int(point.m as u64),
                    Cell::Float(point.d),
                    Cell::Text(b.formula.id().into()),
                    Cell::Float(ctx.rate(b.value)),
                    Cell::Bool(b.valid),
                    Cell::Text(join_witness(witness.as_deref())),
                ],
                b.valid,
                bound_explain(&b),
            );
        }
    }
    Ok(table)
}

fn invalid_bound(formula: FormulaId, note: &str) -> BoundResult<f64> {
    BoundResult::out_of_domain(
        formula,
        match formula {
            FormulaId::CeoInnerSumRate => ceo_bounds::bound::BoundKind::Upper,
            _ => ceo_bounds::bound::BoundKind::Lower,
        },
        note,
    )
}

fn join_witness(witness: Option<&[f64]>) -> String {
    witness
        .map(|w| {
            w.iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default()
}

/// Membership verdicts for a fixed rate vector over the distortion grid.
pub fn region_check_cmd(ctx: &Ctx, rates_flag: Option<&[f64]>) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    let rdf = ctx.file.rdf_hook(&density)?;
    let rates: Vec<f64> = rates_flag
        .map(|r| r.to_vec())
        .or_else(|| ctx.file.region.rates.clone())
        .ok_or_else(|| CliError::Config("region-check needs --rates or [region] rates".into()))?;
    if rates.is_empty() {
        return Err(CliError::Config("rates list is empty".into()));
    }
    let d_grid = ctx.require_d()?;
    let m = rates.len();
    let noise_vars = ctx.file.noise_vars(m)?;

    let mut table = Table::new(&["m", "D", "rates", "verdict", "witness_r", "sum_rate"]);
    for &d in d_grid {
        let problem = CeoProblem::new(density.clone(), noise_vars.clone(), rdf.clone(), d)
            .map_err(numerical)?;
        let prep = problem.prepare(&ctx.ncfg).map_err(numerical)?;
        let query = region_check(&prep, &rates, &ctx.ocfg).map_err(numerical)?;
        let sum: f64 = rates.iter().sum();
        table.push(
            vec![
                Cell::Int(m as u64),
                Cell::Float(d),
                Cell::Text(join_witness(Some(&rates))),
                Cell::Text(query.verdict.to_string()),
                Cell::Text(join_witness(query.witness_r.as_deref())),
                Cell::Float(ctx.rate(sum)),
            ],
            true,
            format!(
                "region membership of ({}) against the subset outer bound and the \
                 Gaussian-auxiliary inner bound at D = {d}",
                join_witness(Some(&rates))
            ),
        );
    }
    Ok(table)
}

/// Rate-loss lower bound over the (m, alpha) grid.
pub fn rate_loss(ctx: &Ctx, alpha_flag: Option<&[f64]>) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    let noise = ctx.file.noise_vars(1)?[0];
    let m_grid = ctx.require_m()?;
    let alphas: Vec<f64> = alpha_flag
        .map(|a| a.to_vec())
        .unwrap_or_else(|| ctx.alpha_grid.clone());
    if alphas.is_empty() {
        return Err(CliError::Config("alpha grid is empty".into()));
    }

    let value_col = ctx.rate_col("value_nats");
    let mut table = Table::new(&["m", "alpha", "bound_id", &value_col, "valid"]);
    for &m in m_grid {
        for &alpha in &alphas {
            match rate_loss_lower(&density, noise, m, alpha, &ctx.ncfg) {
                Ok(b) => table.push(
                    vec![
                        Cell::Int(m as u64),
                        Cell::Float(alpha),
                        Cell::Text(b.formula.id().into()),
                        Cell::Float(ctx.rate(b.value)),
                        Cell::Bool(b.valid),
                    ],
                    b.valid,
                    bound_explain(&b),
                ),
                Err(e @ Error::AlphaOutOfRange { .. }) => table.push(
                    vec![
                        Cell::Int(m as u64),
                        Cell::Float(alpha),
                        Cell::Text(FormulaId::RateLossLower.id().into()),
                        Cell::Float(0.0),
                        Cell::Bool(false),
                    ],
                    false,
                    format!("{} — {}", FormulaId::RateLossLower.id(), e),
                ),
                Err(e) => return Err(numerical(e)),
            }
        }
    }
    Ok(table)
}

/// Empirical upper-lower gap against the two gap bounds, sweeping m.
pub fn gap_sweep(ctx: &Ctx) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    let noise = ctx.file.noise_vars(1)?[0];
    let m_grid = ctx.require_m()?;
    let d_grid = ctx.require_d()?;
    let summary = SourceSummary::of(&density, &ctx.ncfg).map_err(numerical)?;

    let mut table = Table::new(&[
        "m",
        "d",
        "empirical_gap",
        "gap_bound_scaled",
        "gap_bound_const",
        "dominated",
        "valid",
    ]);
    for &m in m_grid {
        let n_ym = smoothed_entropy_power(&density, noise / m as f64, &ctx.ncfg)
            .map_err(numerical)?
            .entropy_power;
        let var_ym = summary.variance + noise / m as f64;
        for &d in d_grid {
            let scaled_d = d / m as f64;
            let lower =
                region_formula::ceo_lower_mse(summary.entropy_power, n_ym, noise, m, scaled_d);
            let upper = region_formula::ceo_upper_mse(summary.variance, var_ym, noise, m, scaled_d);
            let empirical = upper - lower;
            match gap_bounds(&density, noise, m, (0.5 * summary.variance).min(d), d, &ctx.ncfg) {
                Ok((constant, scaled)) => {
                    let dominated = empirical <= scaled + 1e-9;
                    table.push(
                        vec![
                            Cell::Int(m as u64),
                            Cell::Float(d),
                            Cell::Float(ctx.rate(empirical)),
                            Cell::Float(ctx.rate(scaled)),
                            Cell::Float(ctx.rate(constant)),
                            Cell::Bool(dominated),
                            Cell::Bool(true),
                        ],
                        true,
                        format!(
                            "{} — {}; domain: d = {d} > var(Z) = {noise}, M > d/var(X)",
                            FormulaId::GapScaledDistortion.id(),
                            FormulaId::GapScaledDistortion.describe()
                        ),
                    );
                }
                Err(Error::InvalidParameter(msg)) => table.push(
                    vec![
                        Cell::Int(m as u64),
                        Cell::Float(d),
                        Cell::Float(ctx.rate(empirical)),
                        Cell::MaybeFloat(None),
                        Cell::MaybeFloat(None),
                        Cell::Bool(false),
                        Cell::Bool(false),
                    ],
                    false,
                    format!("{} — {}", FormulaId::GapScaledDistortion.id(), msg),
                ),
                Err(e) => return Err(numerical(e)),
            }
        }
    }
    Ok(table)
}

/// Digital floor vs analog distortion across agent counts, with the
/// Monte Carlo confirmation column.
pub fn jscc_sweep(ctx: &Ctx) -> Result<Table, CliError> {
    let density = ctx.file.density()?;
    let m_grid = ctx.require_m()?;
    let template = JsccScenario {
        density,
        m: m_grid[0],
        obs_noise_var: ctx.file.jscc.obs_noise_var.or(ctx.file.channel.noise_var).unwrap_or(1.0),
        power: ctx.file.jscc.power.unwrap_or(1.0),
        channel_noise_var: ctx.file.jscc.channel_noise_var.unwrap_or(1.0),
        samples: ctx.samples,
        seed: ctx.seed,
    };
    let rows = scaling_sweep(&template, m_grid, &ctx.ncfg).map_err(numerical)?;

    let mut table = Table::new(&[
        "m",
        "digital_floor",
        "analog_closed",
        "analog_sim_mean",
        "analog_sim_stderr",
        "samples",
        "seed",
    ]);
    for row in &rows {
        table.push(
            vec![
                Cell::Int(row.m as u64),
                Cell::Float(row.digital_floor),
                Cell::Float(row.analog_closed_form),
                Cell::Float(row.analog_simulated.mean),
                Cell::MaybeFloat(row.analog_simulated.stderr),
                Cell::Int(row.analog_simulated.n),
                Cell::Int(ctx.seed),
            ],
            true,
            format!(
                "{} vs {}; per-symbol amplify-and-forward with matched linear decoder",
                FormulaId::JsccDigitalFloor.id(),
                FormulaId::JsccAnalogClosedForm.id()
            ),
        );
    }

    // Companion analysis on stderr: scaling-law fits and the agent counts
    // needed to reach the configured target distortion.
    let fit = fit_scaling_laws(&rows);
    eprintln!(
        "# scaling fits: digital ~ {:.6}/ln(m), analog ~ {:.6}/m",
        fit.c_digital, fit.c_analog
    );
    if let Some(target) = ctx.file.jscc.target_d {
        let kappa = ceo_bounds::density::kappa_value(&template.density, &ctx.ncfg)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let n_x = template
            .density
            .entropy_power(&ctx.ncfg)
            .map_err(numerical)?;
        let md = agents_needed_digital(
            n_x,
            kappa,
            template.obs_noise_var,
            template.power,
            template.channel_noise_var,
            target,
        );
        let ma = agents_needed_analog(
            template.density.variance(),
            template.obs_noise_var,
            template.power,
            template.channel_noise_var,
            target,
        );
        match (md, ma) {
            (Some(md), Some(ma)) => eprintln!(
                "# agents needed for D <= {target}: digital {md}, analog {ma}, ratio {:.1}",
                md as f64 / ma as f64
            ),
            _ => eprintln!("# agents needed for D <= {target}: out of search range"),
        }
    }
    Ok(table)
}
