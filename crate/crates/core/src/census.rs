//! Informativeness census over a family of IOD graphs.
//!
//! The family has fixed input and output wiring into a set of
//! intermediates, plus a set of variable intermediate-to-intermediate slots;
//! every subset of the slots is one graph. Graphs are tallied by the number
//! of slots in use.
//!
//! The exhaustive sweep keeps the intermediate adjacency as one `u64` row
//! per node and walks each shard in Gray-code order, so consecutive graphs
//! differ by a single flipped bit. Shards (fixed high-order slot bits) are
//! independent and run in parallel; tallies are summed afterwards.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::Informativeness;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::IodGraph;

pub const DEFAULT_BUDGET: u64 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusMode {
    Exhaustive,
    /// `per_edge_count` uniformly drawn graphs for every edge count,
    /// independently and with replacement.
    Sample { per_edge_count: u64, seed: u64 },
}

/// Indices are zero-based: inputs `0..num_inputs`, intermediates
/// `0..num_intermediates`, outputs `0..num_outputs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub num_intermediates: usize,
    /// `(input, intermediate)` links present in every graph.
    pub input_wiring: Vec<(usize, usize)>,
    /// `(intermediate, output)` links present in every graph.
    pub output_wiring: Vec<(usize, usize)>,
    /// `(intermediate, intermediate)` links that vary.
    pub variable_slots: Vec<(usize, usize)>,
    pub mode: CensusMode,
    /// Largest universe an exhaustive run may enumerate.
    pub budget: u64,
}

/// Config file form; anything omitted takes its default.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSpec {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub num_intermediates: usize,
    pub input_wiring: Option<Vec<(usize, usize)>>,
    pub output_wiring: Option<Vec<(usize, usize)>>,
    pub variable_slots: Option<Vec<(usize, usize)>>,
    pub mode: Option<CensusMode>,
    pub budget: Option<u64>,
}

impl CensusSpec {
    pub fn into_config(self) -> Result<CensusConfig> {
        let mut c = CensusConfig::standard(self.num_inputs, self.num_outputs, self.num_intermediates);
        if let Some(w) = self.input_wiring {
            c.input_wiring = w;
        }
        if let Some(w) = self.output_wiring {
            c.output_wiring = w;
        }
        if let Some(s) = self.variable_slots {
            c.variable_slots = s;
        }
        if let Some(m) = self.mode {
            c.mode = m;
        }
        if let Some(b) = self.budget {
            c.budget = b;
        }
        c.validate()?;
        Ok(c)
    }
}

impl CensusConfig {
    /// Input `j` feeds intermediate `j`, output `k` is fed by intermediate
    /// `num_inputs + k` (both modulo the intermediate count), and every
    /// ordered intermediate pair, self-loops included, is a variable slot.
    /// With at least `num_inputs + num_outputs` intermediates the input and
    /// output sides start out disconnected.
    pub fn standard(num_inputs: usize, num_outputs: usize, num_intermediates: usize) -> Self {
        let m = num_intermediates;
        let (input_wiring, output_wiring) = if m == 0 {
            (Vec::new(), Vec::new())
        } else {
            (
                (0..num_inputs).map(|j| (j, j % m)).collect(),
                (0..num_outputs).map(|k| ((num_inputs + k) % m, k)).collect(),
            )
        };
        CensusConfig {
            num_inputs,
            num_outputs,
            num_intermediates,
            input_wiring,
            output_wiring,
            variable_slots: (0..m).flat_map(|s| (0..m).map(move |d| (s, d))).collect(),
            mode: CensusMode::Exhaustive,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn sampled(mut self, per_edge_count: u64, seed: u64) -> Self {
        self.mode = CensusMode::Sample { per_edge_count, seed };
        self
    }

    pub fn slot_count(&self) -> usize {
        self.variable_slots.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_inputs == 0 || self.num_outputs == 0 {
            return bad("need at least one input and one output".into());
        }
        if self.num_intermediates > 64 {
            return bad("at most 64 intermediates are supported".into());
        }
        if self.variable_slots.len() > 63 {
            return bad("at most 63 variable slots are supported".into());
        }
        let m = self.num_intermediates;
        for &(i, n) in &self.input_wiring {
            if i >= self.num_inputs || n >= m {
                return bad(format!("input wiring ({i}, {n}) out of range"));
            }
        }
        for &(n, o) in &self.output_wiring {
            if n >= m || o >= self.num_outputs {
                return bad(format!("output wiring ({n}, {o}) out of range"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &(s, d) in &self.variable_slots {
            if s >= m || d >= m {
                return bad(format!("slot ({s}, {d}) out of range"));
            }
            if !seen.insert((s, d)) {
                return bad(format!("slot ({s}, {d}) listed twice"));
            }
        }
        Ok(())
    }

    /// Graph for one slot subset (bit `b` of `mask` selects slot `b`). Ids
    /// are `i1..`, `n1..`, `o1..`.
    pub fn graph_for(&self, mask: u64) -> IodGraph {
        let mut b = IodGraph::builder();
        for j in 0..self.num_inputs {
            b = b.input(format!("i{}", j + 1));
        }
        for n in 0..self.num_intermediates {
            b = b.intermediate(format!("n{}", n + 1));
        }
        for k in 0..self.num_outputs {
            b = b.output(format!("o{}", k + 1));
        }
        for &(j, n) in &self.input_wiring {
            b = b.edge(format!("i{}", j + 1), format!("n{}", n + 1));
        }
        for &(n, k) in &self.output_wiring {
            b = b.edge(format!("n{}", n + 1), format!("o{}", k + 1));
        }
        for (bit, &(s, d)) in self.variable_slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                b = b.edge(format!("n{}", s + 1), format!("n{}", d + 1));
            }
        }
        b.build().expect("census graphs are valid by construction")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub k: usize,
    pub total: u64,
    pub non: u64,
    pub partial: u64,
    pub very: u64,
    pub full: u64,
}

impl CensusRow {
    fn add(&mut self, level: Informativeness) {
        self.total += 1;
        match level {
            Informativeness::Non => self.non += 1,
            Informativeness::Partial => self.partial += 1,
            Informativeness::Very => self.very += 1,
            Informativeness::Full => self.full += 1,
        }
    }

    fn merge(&mut self, other: &CensusRow) {
        self.total += other.total;
        self.non += other.non;
        self.partial += other.partial;
        self.very += other.very;
        self.full += other.full;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub rows: Vec<CensusRow>,
    /// `(per_edge_count, seed)` when the table comes from sampling.
    pub sampled: Option<(u64, u64)>,
}

impl CensusTable {
    fn empty(slots: usize) -> Self {
        CensusTable {
            rows: (0..=slots).map(|k| CensusRow { k, ..Default::default() }).collect(),
            sampled: None,
        }
    }

    fn merge(&mut self, other: &CensusTable) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.merge(b);
        }
    }

    pub fn grand_total(&self) -> u64 {
        self.rows.iter().map(|r| r.total).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some((n, seed)) = self.sampled {
            writeln!(out, "# sampled per_edge_count={n} seed={seed}").unwrap();
        }
        out.push_str("k,total,non,partial,very,full\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{}", r.k, r.total, r.non, r.partial, r.very, r.full).unwrap();
        }
        out
    }
}

/// The configuration compiled to bit masks over intermediates.
#[derive(Clone, Debug)]
pub struct CompiledCensus {
    /// Intermediates each input feeds.
    input_seeds: Vec<u64>,
    /// Intermediates feeding each output.
    output_feeds: Vec<u64>,
    /// `(source, dest bit)` per slot.
    slots: Vec<(usize, u64)>,
    nodes: usize,
}

impl CompiledCensus {
    pub fn new(config: &CensusConfig) -> Result<Self> {
        config.validate()?;
        let mut input_seeds = vec![0u64; config.num_inputs];
        for &(j, n) in &config.input_wiring {
            input_seeds[j] |= 1 << n;
        }
        let mut output_feeds = vec![0u64; config.num_outputs];
        for &(n, k) in &config.output_wiring {
            output_feeds[k] |= 1 << n;
        }
        Ok(CompiledCensus {
            input_seeds,
            output_feeds,
            slots: config.variable_slots.iter().map(|&(s, d)| (s, 1u64 << d)).collect(),
            nodes: config.num_intermediates,
        })
    }

    fn rows_for(&self, mask: u64) -> Vec<u64> {
        let mut rows = vec![0u64; self.nodes];
        for (bit, &(s, d)) in self.slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                rows[s] |= d;
            }
        }
        rows
    }

    fn closure(rows: &[u64], seed: u64) -> u64 {
        let mut reach = seed;
        let mut frontier = seed;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                next |= rows[f.trailing_zeros() as usize];
                f &= f - 1;
            }
            frontier = next & !reach;
            reach |= next;
        }
        reach
    }

    fn classify_rows(&self, rows: &[u64]) -> Informativeness {
        let mut any = false;
        let mut all = true;
        let mut every_input = true;
        for &seed in &self.input_seeds {
            let reach = Self::closure(rows, seed);
            let mut some = false;
            for &feed in &self.output_feeds {
                if reach & feed != 0 {
                    some = true;
                } else {
                    all = false;
                }
            }
            any |= some;
            every_input &= some;
        }
        if !any {
            Informativeness::Non
        } else if all {
            Informativeness::Full
        } else if every_input {
            Informativeness::Very
        } else {
            Informativeness::Partial
        }
    }

    pub fn classify_mask(&self, mask: u64) -> Informativeness {
        self.classify_rows(&self.rows_for(mask))
    }

    fn sweep_shard(&self, high: u64, low_bits: u32, table: &mut CensusTable) {
        let mut mask = high << low_bits;
        let mut rows = self.rows_for(mask);
        table.rows[mask.count_ones() as usize].add(self.classify_rows(&rows));
        for g in 1..(1u64 << low_bits) {
            let bit = g.trailing_zeros() as usize;
            mask ^= 1 << bit;
            let (s, d) = self.slots[bit];
            rows[s] ^= d;
            table.rows[mask.count_ones() as usize].add(self.classify_rows(&rows));
        }
    }
}

/// Progress callback: `(graphs done, graphs total)`.
pub type Progress<'a> = &'a (dyn Fn(u64, u64) + Sync);

pub fn run_census(config: &CensusConfig) -> Result<CensusTable> {
    run_census_with(config, Execution::Parallel, None)
}

pub fn run_census_with(config: &CensusConfig, exec: Execution, progress: Option<Progress<'_>>) -> Result<CensusTable> {
    let compiled = CompiledCensus::new(config)?;
    let slots = config.slot_count();
    match config.mode {
        CensusMode::Exhaustive => {
            let universe = 1u64 << slots;
            if universe > config.budget {
                return Err(Error::BudgetExceeded {
                    required: universe as u128,
                    budget: config.budget as u128,
                });
            }
            let high_bits = slots.saturating_sub(12).min(10) as u32;
            let low_bits = slots as u32 - high_bits;
            let done = AtomicU64::new(0);
            let shards = exec.map_indices(1usize << high_bits, |h| {
                let mut t = CensusTable::empty(slots);
                compiled.sweep_shard(h as u64, low_bits, &mut t);
                let d = done.fetch_add(1 << low_bits, Ordering::Relaxed) + (1 << low_bits);
                if let Some(p) = progress {
                    p(d, universe);
                }
                t
            });
            let mut table = CensusTable::empty(slots);
            for s in &shards {
                table.merge(s);
            }
            Ok(table)
        }
        CensusMode::Sample { per_edge_count, seed } => {
            let total = per_edge_count * (slots as u64 + 1);
            let done = AtomicU64::new(0);
            let rows = exec.map_indices(slots + 1, |k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let mut row = CensusRow { k, ..Default::default() };
                for _ in 0..per_edge_count {
                    let mask = index::sample(&mut rng, slots, k).into_iter().fold(0u64, |m, b| m | 1 << b);
                    row.add(compiled.classify_mask(mask));
                }
                let d = done.fetch_add(per_edge_count, Ordering::Relaxed) + per_edge_count;
                if let Some(p) = progress {
                    p(d, total);
                }
                row
            });
            Ok(CensusTable {
                rows,
                sampled: Some((per_edge_count, seed)),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::informativeness;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn small_universe_totals_and_oracle() {
        let config = CensusConfig::standard(2, 1, 3);
        let table = run_census(&config).unwrap();
        assert_eq!(table.rows.len(), 10);
        for r in &table.rows {
            assert_eq!(r.total, binomial(9, r.k as u64));
            assert_eq!(r.total, r.non + r.partial + r.very + r.full);
        }
        // compare every member against the graph-level classifier
        let compiled = CompiledCensus::new(&config).unwrap();
        let mut oracle = CensusTable::empty(9);
        for mask in 0..(1u64 << 9) {
            let level = informativeness(&config.graph_for(mask));
            assert_eq!(compiled.classify_mask(mask), level, "mask {mask:#b}");
            oracle.rows[mask.count_ones() as usize].add(level);
        }
        assert_eq!(table.rows, oracle.rows);
    }

    #[test]
    fn sequential_matches_parallel() {
        let config = CensusConfig::standard(3, 2, 4);
        let a = run_census_with(&config, Execution::Sequential, None).unwrap();
        let b = run_census_with(&config, Execution::Parallel, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.grand_total(), 1 << 16);
    }

    #[test]
    fn empty_universe() {
        let config = CensusConfig::standard(1, 1, 0);
        let table = run_census(&config).unwrap();
        assert_eq!(table.to_csv(), "k,total,non,partial,very,full\n0,1,1,0,0,0\n");
    }

    #[test]
    fn budget_is_enforced() {
        let mut config = CensusConfig::standard(3, 2, 5);
        config.budget = 1 << 20;
        assert!(matches!(
            run_census(&config),
            Err(Error::BudgetExceeded {
                required: 33_554_432,
                ..
            })
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        let config = CensusConfig::standard(3, 2, 5).sampled(20, 42);
        let a = run_census(&config).unwrap();
        let b = run_census_with(&config, Execution::Sequential, None).unwrap();
        assert_eq!(a, b);
        assert!(a.to_csv().starts_with("# sampled per_edge_count=20 seed=42\n"));
        assert!(a.rows.iter().all(|r| r.total == 20));
        // k = 0 and k = 25 have one member each, so every draw is that graph
        assert_eq!(a.rows[0].non, 20);
        assert_eq!(a.rows[25].full, 20);
    }

    #[test]
    fn invalid_configs() {
        let mut c = CensusConfig::standard(2, 2, 3);
        c.variable_slots.push((0, 0));
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = CensusConfig::standard(2, 2, 3);
        c.input_wiring.push((5, 0));
        assert!(c.validate().is_err());
    }

    #[test]
    fn spec_file_defaults() {
        let spec: CensusSpec =
            serde_json::from_str(r#"{"num_inputs":3,"num_outputs":2,"num_intermediates":5}"#).unwrap();
        let c = spec.into_config().unwrap();
        assert_eq!(c, CensusConfig::standard(3, 2, 5));
        assert_eq!(c.slot_count(), 25);
        assert_eq!(c.input_wiring, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(c.output_wiring, vec![(3, 0), (4, 1)]);
    }
}
