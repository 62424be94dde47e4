//! Data behind the protection curves and trade-off diagrams.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::commands::{
    frontier_rows, optimal_row, protection_grid, protection_rows, Row, Setting, COLUMNS,
};
use crate::config::{Params, DEFAULT_CURVE_GRID, DEFAULT_LATTICE_GRID};
use crate::error::{CliError, CliResult};
use crate::format::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        }
    }

    fn layout(self) -> FigureLayout {
        use FigureId::*;
        let (sweep, q_plus) = match self {
            Fig2 | Fig6 => (Sweep::Theta, 0.5),
            Fig3 | Fig7 => (Sweep::Damping, 0.5),
            Fig4 | Fig8 => (Sweep::Theta, 1.0 / 3.0),
            Fig5 | Fig9 => (Sweep::Damping, 1.0 / 3.0),
        };
        let kind = match self {
            Fig2 | Fig3 | Fig4 | Fig5 => Kind::Protection,
            Fig6 | Fig7 | Fig8 | Fig9 => Kind::Frontier,
        };
        FigureLayout {
            sweep,
            q_plus,
            kind,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown figure '{s}', expected one of fig2..fig9"))
    }
}

#[derive(Clone, Copy, Debug)]
enum Sweep {
    /// θ ∈ {π/16, 4π/16, 6π/16} at r = 0.7.
    Theta,
    /// r ∈ {0.1, 0.5, 0.9} at θ = 6π/16.
    Damping,
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Protection,
    Frontier,
}

struct FigureLayout {
    sweep: Sweep,
    q_plus: f64,
    kind: Kind,
}

const THETA_SERIES: [(u32, &str); 3] =
    [(1, "theta=pi/16"), (4, "theta=4pi/16"), (6, "theta=6pi/16")];
const R_SERIES: [(f64, &str); 3] = [(0.1, "r=0.1"), (0.5, "r=0.5"), (0.9, "r=0.9")];

/// Series settings. Flags override the parameters a figure does not sweep.
fn series(layout: &FigureLayout, params: &Params) -> Vec<(&'static str, Setting)> {
    let q_plus = params.q_plus.unwrap_or(layout.q_plus);
    match layout.sweep {
        Sweep::Theta => THETA_SERIES
            .iter()
            .map(|&(k, label)| {
                let theta = f64::from(k) * PI / 16.0;
                let r = params.r.unwrap_or(0.7);
                (label, Setting { theta, q_plus, r })
            })
            .collect(),
        Sweep::Damping => R_SERIES
            .iter()
            .map(|&(r, label)| {
                let theta = params.theta.unwrap_or(6.0 * PI / 16.0);
                (label, Setting { theta, q_plus, r })
            })
            .collect(),
    }
}

pub fn figure_data(id: FigureId, params: &Params) -> CliResult<Table> {
    let layout = id.layout();
    let mut header = vec!["figure".to_string(), "series".to_string()];
    header.extend(COLUMNS.iter().map(|c| c.to_string()));
    let mut table = Table::new(header);
    for (label, set) in series(&layout, params) {
        let rows: Vec<Row> = match layout.kind {
            Kind::Protection => {
                let n = params.grid_or(DEFAULT_CURVE_GRID)?;
                protection_rows(set, &protection_grid(set.r, n))?
            }
            Kind::Frontier => {
                let n = params.grid_or(DEFAULT_LATTICE_GRID)?;
                let mut rows = frontier_rows(set, n, false)?;
                rows.push(optimal_row(set)?);
                rows
            }
        };
        for row in rows {
            let mut cells = vec![id.name().to_string(), label.to_string()];
            cells.extend(row.cells());
            table.push(cells);
        }
    }
    if table.rows.is_empty() {
        return Err(CliError::Consistency(format!("{id} produced no rows")));
    }
    Ok(table)
}
