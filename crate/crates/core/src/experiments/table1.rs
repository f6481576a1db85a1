//! Case I grid: Y in control, X mean shifted, AIB charts monitored with the
//! stale auxiliary mean.

use serde::Serialize;

use crate::charts::{make_limits, ChartKind};
use crate::error::{Error, Result};
use crate::oracles::{ewma_arl_markov, shewhart_arl_exact, standardized_shift, DEFAULT_STATES};
use crate::runlength::{estimate_runlength, RunLengthSummary, SimulationConfig};
use crate::stochastics::{ProcessModel, ShiftScenario, StreamKey};

pub const RHO_LEVELS: [f64; 4] = [0.05, 0.25, 0.50, 0.75];
pub const DELTA_X_LEVELS: [f64; 3] = [0.25, 0.50, 1.00];

/// Smallest replication count accepted by [`reproduce_table1`].
pub const MIN_TABLE1_REPS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartColumn {
    pub kind: ChartKind,
    pub lambda: f64,
    pub limit_multiplier: f64,
}

pub const CHART_COLUMNS: [ChartColumn; 5] = [
    ChartColumn { kind: ChartKind::Shewhart, lambda: 1.0, limit_multiplier: 2.807 },
    ChartColumn { kind: ChartKind::Ewma, lambda: 0.05, limit_multiplier: 2.216 },
    ChartColumn { kind: ChartKind::Ewma, lambda: 0.10, limit_multiplier: 2.454 },
    ChartColumn { kind: ChartKind::Ewma, lambda: 0.20, limit_multiplier: 2.636 },
    ChartColumn { kind: ChartKind::Ewma, lambda: 0.50, limit_multiplier: 2.777 },
];

/// Reference ARLs indexed `[rho][delta_x][column]`.
pub const REFERENCE_ARL: [[[f64; 5]; 3]; 4] = [
    [
        [200.4, 199.5, 198.4, 200.1, 199.9],
        [198.2, 193.9, 194.6, 196.7, 198.6],
        [198.1, 177.8, 183.2, 188.8, 195.0],
    ],
    [
        [197.5, 166.9, 173.0, 182.5, 190.9],
        [186.3, 111.6, 124.6, 142.7, 168.6],
        [153.4, 52.4, 60.3, 74.9, 110.7],
    ],
    [
        [184.1, 101.8, 113.9, 131.9, 161.6],
        [145.3, 45.4, 51.4, 65.0, 100.4],
        [75.6, 18.3, 18.3, 21.0, 35.9],
    ],
    [
        [145.8, 46.6, 52.9, 66.7, 101.8],
        [77.6, 18.6, 18.9, 21.8, 36.9],
        [21.3, 8.1, 7.3, 6.9, 8.9],
    ],
];

/// Relative tolerance against the reference value.
pub const REL_TOLERANCE: f64 = 0.05;
/// Alternative tolerance in standard errors of the simulated ARL.
pub const SE_TOLERANCE: f64 = 3.0;

/// Position of one cell in the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellIndex {
    pub rho: usize,
    pub delta_x: usize,
    pub column: usize,
}

impl CellIndex {
    pub fn all() -> impl Iterator<Item = CellIndex> {
        (0..RHO_LEVELS.len()).flat_map(|r| {
            (0..DELTA_X_LEVELS.len())
                .flat_map(move |d| (0..CHART_COLUMNS.len()).map(move |c| CellIndex { rho: r, delta_x: d, column: c }))
        })
    }

    /// Row-major position, used to derive the cell seed.
    pub fn ordinal(&self) -> u64 {
        ((self.rho * DELTA_X_LEVELS.len() + self.delta_x) * CHART_COLUMNS.len() + self.column) as u64
    }

    pub fn rho(&self) -> f64 {
        RHO_LEVELS[self.rho]
    }

    pub fn delta_x(&self) -> f64 {
        DELTA_X_LEVELS[self.delta_x]
    }

    pub fn column(&self) -> ChartColumn {
        CHART_COLUMNS[self.column]
    }

    pub fn reference_arl(&self) -> f64 {
        REFERENCE_ARL[self.rho][self.delta_x][self.column]
    }

    /// Simulation setup for this cell (unit-scale model, `n = 1`).
    pub fn config(&self, reps: u64, master_seed: u64) -> Result<SimulationConfig> {
        let model = ProcessModel::standard(self.rho())?;
        let col = self.column();
        let spec = make_limits(col.kind, col.lambda, col.limit_multiplier, &model)?;
        let scenario = ShiftScenario::independent(0.0, self.delta_x());
        let seed = StreamKey::new(master_seed, self.ordinal()).child_seed();
        Ok(SimulationConfig::new(model, scenario, spec).reps(reps).seed(seed))
    }

    /// Closed-form (Shewhart) or Markov-chain (EWMA) ARL for this cell.
    pub fn oracle_arl(&self) -> Result<f64> {
        let model = ProcessModel::standard(self.rho())?;
        let s = standardized_shift(&model, &ShiftScenario::independent(0.0, self.delta_x()))?;
        let col = self.column();
        match col.kind {
            ChartKind::Shewhart => Ok(shewhart_arl_exact(col.limit_multiplier, s)),
            ChartKind::Ewma => ewma_arl_markov(col.lambda, col.limit_multiplier, s, DEFAULT_STATES),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Cell {
    pub index: CellIndex,
    pub rho: f64,
    pub delta_x: f64,
    pub column: ChartColumn,
    pub summary: RunLengthSummary,
    pub reference_arl: f64,
}

impl Table1Cell {
    pub fn tolerance(&self) -> f64 {
        (REL_TOLERANCE * self.reference_arl).max(SE_TOLERANCE * self.summary.se_arl)
    }

    pub fn passes(&self) -> bool {
        (self.summary.arl - self.reference_arl).abs() <= self.tolerance()
    }
}

/// Simulates one cell.
pub fn simulate_cell(index: CellIndex, reps: u64, master_seed: u64) -> Result<Table1Cell> {
    let summary = estimate_runlength(&index.config(reps, master_seed)?)?;
    Ok(Table1Cell {
        index,
        rho: index.rho(),
        delta_x: index.delta_x(),
        column: index.column(),
        summary,
        reference_arl: index.reference_arl(),
    })
}

/// Simulates all 60 cells in row-major order (rho, delta_x, chart).
pub fn reproduce_table1(reps: u64, master_seed: u64) -> Result<Vec<Table1Cell>> {
    if reps < MIN_TABLE1_REPS {
        return Err(Error::InvalidConfig(format!("table reproduction needs reps >= {MIN_TABLE1_REPS}, got {reps}")));
    }
    reproduce_table1_unchecked(reps, master_seed)
}

/// [`reproduce_table1`] without the minimum replication guard; for quick
/// previews and tests.
pub fn reproduce_table1_unchecked(reps: u64, master_seed: u64) -> Result<Vec<Table1Cell>> {
    CellIndex::all().map(|idx| simulate_cell(idx, reps, master_seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_order() {
        let cells: Vec<_> = CellIndex::all().collect();
        assert_eq!(cells.len(), 60);
        for (i, c) in cells.iter().enumerate() {
            assert_eq!(c.ordinal(), i as u64);
        }
        assert_eq!(cells[0].reference_arl(), 200.4);
        assert_eq!(cells[59].reference_arl(), 8.9);
        let c = CellIndex { rho: 3, delta_x: 2, column: 0 };
        assert_eq!((c.rho(), c.delta_x(), c.reference_arl()), (0.75, 1.0, 21.3));
    }

    #[test]
    fn cells_get_distinct_seeds() {
        let mut seeds: Vec<_> = CellIndex::all().map(|c| c.config(10, 7).unwrap().master_seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 60);
    }

    #[test]
    fn too_few_reps_rejected() {
        assert!(matches!(reproduce_table1(100, 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn oracle_matches_reference_within_two_percent() {
        for c in CellIndex::all() {
            let o = c.oracle_arl().unwrap();
            let r = c.reference_arl();
            assert!((o - r).abs() / r < 0.02, "{c:?}: oracle {o} vs reference {r}");
        }
    }
}
