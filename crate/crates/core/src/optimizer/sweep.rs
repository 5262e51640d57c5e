//! Optimum per unit-width ratio bin.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::design::Topology;

use super::{enumerate, finish, DesignEvaluation, Problem, SearchOptions, SearchStats, SeriesIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub topology: Topology,
    pub bin_lo: u32,
    pub bin_hi: u32,
    pub best: Option<DesignEvaluation>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn rows_for(&self, topology: Topology) -> impl Iterator<Item = &SweepRow> + '_ {
        self.rows.iter().filter(move |r| r.topology == topology)
    }

    pub fn row(&self, topology: Topology, bin_lo: u32) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.topology == topology && r.bin_lo == bin_lo)
    }
}

/// Optimum of each topology in every bin `[g, g + 1]` for `g` in `lo..hi`.
/// The ratio term of the cost is off; the bin bounds replace it.
pub fn sweep(problem: &Problem, topologies: &[Topology], lo: u32, hi: u32, options: &SearchOptions) -> SweepResult {
    let mut rows = Vec::new();
    for &t in topologies {
        let series = (t == Topology::Dspg).then(|| SeriesIndex::build(problem));
        for g in lo..hi {
            let start = Instant::now();
            let bin = problem.clone().with_ratio_range(g as f64, (g + 1) as f64);
            let local = match &series {
                Some(index) => index.search(&bin, options),
                None => enumerate::search(&bin, t, options),
            };
            let out = finish(&bin, t, local, start);
            rows.push(SweepRow {
                topology: t,
                bin_lo: g,
                bin_hi: g + 1,
                best: out.best,
                stats: out.stats,
            });
        }
    }
    SweepResult { rows }
}
