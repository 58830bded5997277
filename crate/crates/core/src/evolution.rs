//! A small generational loop that uses crossover as its only operator.
//!
//! Each generation fills every population slot by tournament-selecting an
//! input parent and an output parent and crossing them; when no compatible
//! crossover is found the fitter parent is cloned instead. Every slot draws
//! from its own derived seed, so results do not depend on scheduling.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{informativeness, Informativeness};
use crate::crossover::{crossover, CrossoverStrategy, NodeNaming, ParentRole};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{GraphDocument, IodGraph, NodeRole};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fitness {
    /// 0 for non-informative up to 3 for fully informative.
    InformativenessRank,
    /// Fraction of the listed `(input, output)` pairs connected by a path.
    TargetReachability(Vec<(String, String)>),
}

impl Fitness {
    pub fn score(&self, graph: &IodGraph) -> f64 {
        match self {
            Fitness::InformativenessRank => informativeness(graph).rank() as f64,
            Fitness::TargetReachability(pairs) => {
                if pairs.is_empty() {
                    return 1.0;
                }
                let hit = pairs
                    .iter()
                    .filter(|(i, o)| graph.reachable_from_ids(&[i.as_str()]).is_ok_and(|r| r.contains(o)))
                    .count();
                hit as f64 / pairs.len() as f64
            }
        }
    }
}

fn default_tournament() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub fitness: Fitness,
    #[serde(default = "default_tournament")]
    pub tournament_size: usize,
    #[serde(default)]
    pub strategy: CrossoverStrategy,
    pub seed: u64,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population must hold at least two graphs".into()));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidConfig("tournament size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub non: usize,
    pub partial: usize,
    pub very: usize,
    pub full: usize,
}

impl Distribution {
    fn of(population: &[IodGraph]) -> Self {
        let mut d = Distribution::default();
        for g in population {
            match informativeness(g) {
                Informativeness::Non => d.non += 1,
                Informativeness::Partial => d.partial += 1,
                Informativeness::Very => d.very += 1,
                Informativeness::Full => d.full += 1,
            }
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub distribution: Distribution,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub crossovers: usize,
    pub clones: usize,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub history: Vec<GenerationRecord>,
    pub population: Vec<IodGraph>,
}

impl Evolution {
    /// One compact JSON object per generation, newline-terminated.
    pub fn history_json_lines(&self) -> String {
        let mut out = String::new();
        for rec in &self.history {
            out.push_str(&serde_json::to_string(rec).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

/// SplitMix64 finaliser, used to derive independent per-slot seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn slot_seed(seed: u64, generation: usize, slot: usize) -> u64 {
    mix(mix(seed ^ mix(generation as u64)) ^ slot as u64)
}

fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64], size: usize) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.gen_range(0..fitness.len());
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Under qualified naming children carry primed output ids; map outputs back
/// to their parent ids and give intermediates fresh `n*` ids so repeated
/// crossover does not keep growing names. Left untouched if that would
/// clash.
fn relabel(doc: GraphDocument, origin: &BTreeMap<String, crate::crossover::Origin>) -> GraphDocument {
    let mut rename = BTreeMap::new();
    let mut taken = HashSet::new();
    let mut next = 0usize;
    for node in &doc.nodes {
        let new = match node.role {
            NodeRole::Input => node.id.clone(),
            NodeRole::Output => match origin.get(&node.id) {
                Some(o) if o.parent == ParentRole::Output => o.id.clone(),
                _ => node.id.clone(),
            },
            NodeRole::Intermediate => {
                next += 1;
                format!("n{next}")
            }
        };
        if !taken.insert(new.clone()) {
            return doc;
        }
        rename.insert(node.id.clone(), new);
    }
    GraphDocument {
        format_version: doc.format_version,
        nodes: doc
            .nodes
            .iter()
            .map(|n| crate::graph::Node {
                id: rename[&n.id].clone(),
                ..n.clone()
            })
            .collect(),
        edges: doc
            .edges
            .iter()
            .map(|(s, d)| (rename[s].clone(), rename[d].clone()))
            .collect(),
    }
}

pub fn evolve(initial: &[IodGraph], config: &EvolutionConfig, exec: Execution) -> Result<Evolution> {
    config.validate()?;
    if initial.is_empty() {
        return Err(Error::InvalidConfig("initial population is empty".into()));
    }
    let mut population: Vec<IodGraph> = initial.iter().cycle().take(config.population_size).cloned().collect();
    let mut fitness = exec.map(&population, |g| config.fitness.score(g));
    let record = |generation, population: &[IodGraph], fitness: &[f64], crossovers, clones| GenerationRecord {
        generation,
        distribution: Distribution::of(population),
        best_fitness: fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
        crossovers,
        clones,
    };
    let mut history = vec![record(0, &population, &fitness, 0, 0)];

    for generation in 1..=config.generations {
        let offspring = exec.map_indices(config.population_size, |slot| {
            let seed = slot_seed(config.seed, generation, slot);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = tournament(&mut rng, &fitness, config.tournament_size);
            let b = tournament(&mut rng, &fitness, config.tournament_size);
            match crossover(&population[a], &population[b], &config.strategy, seed) {
                Ok(rec) => {
                    let doc = match config.strategy.naming {
                        NodeNaming::Qualified => relabel(rec.child, &rec.origin),
                        NodeNaming::Raw => rec.child,
                    };
                    let child = IodGraph::from_document(&doc).expect("crossover children are valid");
                    (child, true)
                }
                Err(_) => {
                    let fitter = if fitness[b] > fitness[a] { b } else { a };
                    (population[fitter].clone(), false)
                }
            }
        });
        let crossovers = offspring.iter().filter(|(_, x)| *x).count();
        population = offspring.into_iter().map(|(g, _)| g).collect();
        fitness = exec.map(&population, |g| config.fitness.score(g));
        history.push(record(
            generation,
            &population,
            &fitness,
            crossovers,
            config.population_size - crossovers,
        ));
    }
    Ok(Evolution { history, population })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::satisfies_no_dangling_nodes;
    use crate::constructions;
    use crate::crossover::{MatchingSpec, PartitionStrategy};
    use crate::graph::validate;

    fn config(generations: usize, seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            population_size: 8,
            generations,
            fitness: Fitness::InformativenessRank,
            tournament_size: 2,
            strategy: CrossoverStrategy::default(),
            seed,
        }
    }

    #[test]
    fn zero_generations_reports_initial_population() {
        let pop = vec![
            constructions::perceptron(2, 2, 2),
            constructions::partially_informative_example(),
        ];
        let ev = evolve(&pop, &config(0, 1), Execution::Parallel).unwrap();
        assert_eq!(ev.history.len(), 1);
        let d = ev.history[0].distribution;
        assert_eq!((d.full, d.very, d.partial, d.non), (4, 0, 4, 0));
    }

    #[test]
    fn fully_informative_ndn_population_stays_informative() {
        let pop = vec![constructions::perceptron(2, 3, 2)];
        for seed in 0..4 {
            let ev = evolve(&pop, &config(4, seed), Execution::Parallel).unwrap();
            for rec in &ev.history {
                assert!(rec.best_fitness >= Informativeness::Partial.rank() as f64);
                assert_eq!(rec.distribution.non, 0);
            }
            for g in &ev.population {
                assert!(validate(&g.to_document()).is_ok());
                assert!(satisfies_no_dangling_nodes(g));
            }
        }
    }

    #[test]
    fn seeds_determine_history() {
        let pop = vec![constructions::perceptron(2, 3, 2), constructions::perceptron(2, 2, 2)];
        let a = evolve(&pop, &config(3, 5), Execution::Parallel).unwrap();
        let b = evolve(&pop, &config(3, 5), Execution::Sequential).unwrap();
        assert_eq!(a.history_json_lines(), b.history_json_lines());
        assert_eq!(a.population, b.population);
    }

    #[test]
    fn worked_example_parents_produce_its_child() {
        let fx = constructions::crossover_example_pair();
        let strategy = CrossoverStrategy {
            partitions: PartitionStrategy::Explicit {
                input_psi: fx.input_partition.psi_ids(&fx.input_parent),
                output_psi: fx.output_partition.psi_ids(&fx.output_parent),
            },
            matching: MatchingSpec::explicit(fx.membrane.clone()),
            naming: NodeNaming::Raw,
        };
        let expected = fx.child(NodeNaming::Raw).unwrap();
        let mut produced = 0;
        for seed in 0..16 {
            let cfg = EvolutionConfig {
                population_size: 2,
                generations: 1,
                fitness: Fitness::InformativenessRank,
                tournament_size: 1,
                strategy: strategy.clone(),
                seed,
            };
            let ev = evolve(&[fx.input_parent.clone(), fx.output_parent.clone()], &cfg, Execution::Parallel).unwrap();
            for g in &ev.population {
                if *g == expected {
                    produced += 1;
                } else {
                    assert!(*g == fx.input_parent || *g == fx.output_parent);
                }
            }
        }
        assert!(produced > 0);
    }

    #[test]
    fn target_reachability_fitness() {
        let g = constructions::partially_informative_example();
        let f = Fitness::TargetReachability(vec![("I1".into(), "O1".into()), ("I2".into(), "O2".into())]);
        assert_eq!(f.score(&g), 0.5);
    }

    #[test]
    fn rejects_tiny_population() {
        let mut c = config(1, 0);
        c.population_size = 1;
        assert!(matches!(
            evolve(&[constructions::perceptron(1, 1, 1)], &c, Execution::Parallel),
            Err(Error::InvalidConfig(_))
        ));
    }
}
