//! Subcommand implementations. Each returns a CSV table.

use ffc_core::{
    analytic_metrics, helstrom_correct, mixed_after_ad, optimal_point, pareto_scan,
    protection_curve, protection_lower_bound, protocol_metrics, pure_correct, simulate,
    transmitted_ensemble, McConfig, ParetoPoint, StrengthTriple,
};

use crate::config::{Params, DEFAULT_CURVE_GRID, DEFAULT_LATTICE_GRID};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_num, fmt_opt, Table};

/// Closed form and pipeline must agree to this.
pub const CONSISTENCY_TOL: f64 = 1e-10;

pub const COLUMNS: [&str; 12] = [
    "kind",
    "theta",
    "q_plus",
    "r",
    "p",
    "p1",
    "p2",
    "p_success",
    "p_correct",
    "p_sc",
    "baseline_mix",
    "baseline_pure",
];

const MC_COLUMNS: [&str; 4] = ["shots", "kept", "stderr_success", "stderr_correct"];

/// Signal and channel parameters shared by a group of rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Setting {
    pub theta: f64,
    pub q_plus: f64,
    pub r: f64,
}

impl Setting {
    pub fn from_params(p: &Params) -> Self {
        Self {
            theta: p.theta(),
            q_plus: p.q_plus(),
            r: p.r(),
        }
    }

    pub fn baselines(&self) -> CliResult<(f64, f64)> {
        Ok((
            mixed_after_ad(self.theta, self.q_plus, self.r)?,
            pure_correct(self.theta, self.q_plus)?,
        ))
    }
}

/// One output line in the common column layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub kind: &'static str,
    pub setting: Setting,
    pub strengths: Option<StrengthTriple>,
    pub p_success: f64,
    pub p_correct: f64,
    pub baseline_mix: f64,
    pub baseline_pure: f64,
}

impl Row {
    pub fn new(
        kind: &'static str,
        setting: Setting,
        strengths: Option<StrengthTriple>,
        p_success: f64,
        p_correct: f64,
    ) -> CliResult<Self> {
        let (baseline_mix, baseline_pure) = setting.baselines()?;
        Ok(Self {
            kind,
            setting,
            strengths,
            p_success,
            p_correct,
            baseline_mix,
            baseline_pure,
        })
    }

    fn from_point(kind: &'static str, setting: Setting, pt: &ParetoPoint) -> CliResult<Self> {
        Self::new(
            kind,
            setting,
            Some(pt.strengths),
            pt.p_success,
            pt.p_correct,
        )
    }

    pub fn cells(&self) -> Vec<String> {
        let s = self.strengths;
        vec![
            self.kind.to_string(),
            fmt_num(self.setting.theta),
            fmt_num(self.setting.q_plus),
            fmt_num(self.setting.r),
            fmt_opt(s.map(|s| s.p)),
            fmt_opt(s.map(|s| s.p1)),
            fmt_opt(s.map(|s| s.p2)),
            fmt_num(self.p_success),
            fmt_num(self.p_correct),
            fmt_num(self.p_success * self.p_correct),
            fmt_num(self.baseline_mix),
            fmt_num(self.baseline_pure),
        ]
    }
}

pub fn table_of(rows: &[Row]) -> Table {
    let mut t = Table::new(COLUMNS);
    for row in rows {
        t.push(row.cells());
    }
    t
}

fn check(label: &str, closed: f64, pipeline: f64) -> CliResult<()> {
    let diff = (closed - pipeline).abs();
    if diff > CONSISTENCY_TOL || !diff.is_finite() {
        return Err(CliError::Consistency(format!(
            "{label}: closed form {closed} vs pipeline {pipeline} (difference {diff:e})"
        )));
    }
    Ok(())
}

fn strengths(p: &Params) -> CliResult<StrengthTriple> {
    Ok(StrengthTriple::new(p.p(), p.p1(), p.p2())?)
}

/// Pipeline metrics at `s`, cross-checked against the closed forms.
fn checked_point(set: Setting, s: StrengthTriple) -> CliResult<ParetoPoint> {
    let m = protocol_metrics(set.theta, set.q_plus, set.r, &s)?;
    let a = analytic_metrics(set.theta, set.q_plus, set.r, &s)?;
    check("p_correct", a.p_correct, m.p_correct)?;
    check("p_success", a.p_success, m.p_success)?;
    Ok(ParetoPoint::from_metrics(s, &m))
}

/// Conventional scheme: Helstrom measurement after the channel.
pub fn helstrom(params: &Params) -> CliResult<Table> {
    let set = Setting::from_params(params);
    let row = Row::new("conventional", set, None, 1.0, set.baselines()?.0)?;
    let ensemble = transmitted_ensemble(set.theta, set.q_plus, set.r)?;
    check(
        "p_correct",
        row.baseline_mix,
        helstrom_correct(&ensemble).p_correct,
    )?;
    Ok(table_of(&[row]))
}

pub fn protocol(params: &Params) -> CliResult<Table> {
    let set = Setting::from_params(params);
    let pt = checked_point(set, strengths(params)?)?;
    Ok(table_of(&[Row::from_point("protocol", set, &pt)?]))
}

/// Pre-measurement strengths for a protection curve: the admissible part of
/// `k/(n−1)`, led by the lower bound itself. `p = 1` never succeeds and is left out.
pub fn protection_grid(r: f64, n: usize) -> Vec<f64> {
    let lo = protection_lower_bound(r);
    let last = (n - 1) as f64;
    let mut grid = vec![lo];
    grid.extend(
        (0..n)
            .map(|k| k as f64 / last)
            .filter(|&p| p > lo && p < 1.0),
    );
    grid
}

pub fn protection_rows(set: Setting, grid: &[f64]) -> CliResult<Vec<Row>> {
    let curve = protection_curve(set.theta, set.q_plus, set.r, grid)?;
    curve
        .iter()
        .map(|pt| {
            let a = analytic_metrics(set.theta, set.q_plus, set.r, &pt.strengths)?;
            check("p_correct", a.p_correct, pt.p_correct)?;
            check("p_success", a.p_success, pt.p_success)?;
            Row::from_point("protect", set, pt)
        })
        .collect()
}

/// Protection strategy: a single point when `--p` is given, otherwise a curve.
pub fn protect(params: &Params) -> CliResult<Table> {
    let set = Setting::from_params(params);
    let grid = match params.p {
        Some(p) => vec![p],
        None => protection_grid(set.r, params.grid_or(DEFAULT_CURVE_GRID)?),
    };
    Ok(table_of(&protection_rows(set, &grid)?))
}

pub fn frontier_rows(set: Setting, grid_n: usize, cloud: bool) -> CliResult<Vec<Row>> {
    let scan = pareto_scan(set.theta, set.q_plus, set.r, grid_n)?;
    let mut rows = Vec::new();
    if cloud {
        for pt in &scan.cloud {
            rows.push(Row::from_point("cloud", set, pt)?);
        }
    }
    for pt in &scan.frontier {
        rows.push(Row::from_point("frontier", set, pt)?);
    }
    Ok(rows)
}

pub fn pareto(params: &Params, cloud: bool) -> CliResult<Table> {
    let set = Setting::from_params(params);
    let grid_n = params.grid_or(DEFAULT_LATTICE_GRID)?;
    Ok(table_of(&frontier_rows(set, grid_n, cloud)?))
}

pub fn optimal_row(set: Setting) -> CliResult<Row> {
    let opt = optimal_point(set.theta, set.q_plus)?;
    let m = protocol_metrics(set.theta, set.q_plus, set.r, &opt.strengths)?;
    if !opt.degenerate {
        check("p_correct_opt", opt.p_correct_opt, m.p_correct)?;
    }
    check("p_success_opt", opt.p_success_opt, m.p_success)?;
    Row::new(
        "optimal",
        set,
        Some(opt.strengths),
        opt.p_success_opt,
        opt.p_correct_opt,
    )
}

pub fn optimal(params: &Params) -> CliResult<Table> {
    Ok(table_of(&[optimal_row(Setting::from_params(params))?]))
}

/// Monte Carlo estimate next to the exact pipeline values.
pub fn monte_carlo(params: &Params) -> CliResult<Table> {
    let set = Setting::from_params(params);
    let s = strengths(params)?;
    let exact = checked_point(set, s)?;
    let est = simulate(&McConfig {
        shots: params.shots(),
        seed: params.seed(),
        theta: set.theta,
        q_plus: set.q_plus,
        r: set.r,
        strengths: s,
    })?;

    let mut t = Table::new(COLUMNS.iter().chain(MC_COLUMNS.iter()).copied());
    let mut exact_cells = Row::from_point("exact", set, &exact)?.cells();
    exact_cells.extend(std::iter::repeat_n(String::new(), MC_COLUMNS.len()));
    t.push(exact_cells);

    let mut cells = Row::new("mc", set, Some(s), est.p_success_hat, 0.0)?.cells();
    let pc = COLUMNS.iter().position(|&c| c == "p_correct").unwrap();
    cells[pc] = fmt_opt(est.p_correct_hat);
    cells[pc + 1] = fmt_opt(est.p_correct_hat.map(|c| c * est.p_success_hat));
    cells.extend([
        est.shots.to_string(),
        est.kept.to_string(),
        fmt_num(est.stderr_success),
        fmt_opt(est.stderr_correct),
    ]);
    t.push(cells);
    Ok(t)
}
