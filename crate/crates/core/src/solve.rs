//! The whole pipeline: cut graph, disk, topologies, drawings, best multicut.

use std::time::{Duration, Instant};

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutgraph::{build_cut_graph, cut_to_disk, DiskSchema};
use crate::dp::{
    abstract_graph, naive_place_topology, path_decomposition, place_topology, witnesses, AbstractDualGraph, CostTables,
};
use crate::embed::{EmbeddedGraph, VertexId, Weight};
use crate::error::{Error, Result};
use crate::oracle::{brute_force_multicut, is_multicut, Certificate, MulticutResult, BRUTE_FORCE_EDGES};
use crate::topology::{enumerate_skeletons, expand_shapes, validate_topology, Bounds, Limits};
use crate::trace_faces;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DpMode {
    Pathdec,
    Naive,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub bounds: Bounds,
    pub dp: DpMode,
    /// Compare against exhaustive search when the instance is small enough.
    pub oracle: bool,
    /// Re-run with doubled bounds and keep the better answer.
    pub escalate: bool,
    /// Worker threads; 1 runs serially.
    pub jobs: usize,
    /// Largest number of topologies examined before giving up.
    pub max_topologies: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            bounds: Bounds::default(),
            dp: DpMode::Pathdec,
            oracle: false,
            escalate: false,
            jobs: 1,
            max_topologies: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub genus: u32,
    pub terminals: usize,
    pub cut_edges: usize,
    pub overlay_faces: usize,
    pub skeletons: usize,
    pub topologies: usize,
    /// Topologies the unfiltered enumeration could produce at most.
    pub topology_cap: u128,
    pub valid: usize,
    pub solved: usize,
    pub best_topology: Option<usize>,
    pub max_width: usize,
    pub escalated: bool,
    pub oracle_weight: Option<Weight>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub result: MulticutResult,
    pub stats: SolveStats,
}

fn catalan(n: usize) -> u128 {
    (0..n).fold(1u128, |c, i| c * 2 * (2 * i as u128 + 1) / (i as u128 + 2))
}

/// Weighted count of non-crossing partitions of `n` points in a row into
/// blocks of size at least two, a block of size `b` standing for its
/// `catalan(b - 2)` tree shapes.
fn forest_count(n: usize) -> u128 {
    let mut f = vec![0u128; n + 1];
    f[0] = 1;
    for m in 1..=n {
        // block of the first point has size b; the remaining m - b points
        // fill b slots (after each block point)
        let mut total = 0u128;
        for b in 2..=m {
            let w = if b == 2 { 1 } else { catalan(b - 2) };
            // slots[j] = ways to put j points into the slots seen so far
            let mut slots = vec![0u128; m - b + 1];
            slots[0] = 1;
            for _ in 0..b {
                let mut next = vec![0u128; m - b + 1];
                for (j, &x) in slots.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for k in 0..=m - b - j {
                        next[j + k] = next[j + k].saturating_add(x.saturating_mul(f[k]));
                    }
                }
                slots = next;
            }
            total = total.saturating_add(w.saturating_mul(slots[m - b]));
        }
        f[m] = total;
    }
    f[n]
}

fn topology_cap(schema: &DiskSchema, limits: &Limits) -> u128 {
    crate::topology::count_vectors(schema.num_kedges(), limits)
        .iter()
        .map(|c| forest_count(2 * c.iter().sum::<usize>()))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Topologies drawn between two checks of the pruning bound. Fixed, so the
/// statistics do not depend on the number of workers.
const BATCH: usize = 16;

struct Candidate {
    index: usize,
    weight: Weight,
    placement: Vec<usize>,
}

fn place(c: &AbstractDualGraph, ct: &CostTables, mode: DpMode) -> Result<(Weight, Vec<usize>, usize)> {
    let pd = path_decomposition(c);
    let (w, p) = match mode {
        DpMode::Pathdec => place_topology(c, &pd, ct)?,
        DpMode::Naive => naive_place_topology(c, ct)?,
    };
    Ok((w, p, pd.width))
}

fn run(g: &EmbeddedGraph, config: &SolverConfig, bounds: Bounds) -> Result<Solution> {
    let start = Instant::now();
    let faces = trace_faces(g)?;
    let k = build_cut_graph(g, &faces)?;
    let (_, schema) = cut_to_disk(g, &faces, &k)?;
    let limits = bounds.limits_for_schema(faces.euler_genus as usize, g.terminals().len(), &schema);
    let mut stats = SolveStats {
        genus: faces.euler_genus,
        terminals: g.terminals().len(),
        cut_edges: schema.num_kedges(),
        overlay_faces: schema.num_faces,
        topology_cap: topology_cap(&schema, &limits),
        ..Default::default()
    };
    let skeletons = enumerate_skeletons(&schema, &limits, Some((g.pairs(), g.terminals())))?;
    stats.skeletons = skeletons.len();
    let mut tops = Vec::new();
    for sk in &skeletons {
        tops.extend(expand_shapes(sk));
        if tops.len() > config.max_topologies {
            return Err(Error::Resource(format!("more than {} topologies", config.max_topologies)));
        }
    }
    stats.topologies = tops.len();
    debug!("{} skeletons, {} topologies", stats.skeletons, stats.topologies);
    let weights: Vec<Weight> = (0..g.num_edges()).map(|e| g.weight(e)).collect();
    let ct = CostTables::new(&schema, &weights);
    // every topology's drawing costs at least its bound; the optimum is
    // the least drawing cost, so topologies are tried by increasing bound
    let mut queue = Vec::new();
    for (index, top) in tops.iter().enumerate() {
        if validate_topology(top, &schema, g.pairs())? {
            let c = abstract_graph(top, &schema)?;
            queue.push((ct.forest_bound(&c), index, c));
        }
    }
    stats.valid = queue.len();
    queue.sort_by_key(|q| (q.0, q.1));
    let work = |(_, index, c): &(Weight, usize, AbstractDualGraph)| -> Result<(Candidate, usize)> {
        let (weight, placement, width) = place(c, &ct, config.dp)?;
        Ok((Candidate { index: *index, weight, placement }, width))
    };
    let pool = if config.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| Error::Resource(e.to_string()))?,
        )
    } else {
        None
    };
    let mut best: Option<Candidate> = None;
    for batch in queue.chunks(BATCH) {
        let live: Vec<_> = batch.iter().filter(|q| best.as_ref().is_none_or(|b| q.0 <= b.weight)).collect();
        if live.is_empty() {
            break;
        }
        let outcomes: Vec<(Candidate, usize)> = match &pool {
            Some(pool) => pool.install(|| live.par_iter().map(|q| work(q)).collect::<Result<_>>())?,
            None => live.iter().map(|q| work(q)).collect::<Result<_>>()?,
        };
        for (cand, width) in outcomes {
            stats.solved += 1;
            stats.max_width = stats.max_width.max(width);
            if best.as_ref().is_none_or(|b| (cand.weight, cand.index) < (b.weight, b.index)) {
                best = Some(cand);
            }
        }
    }
    let best = best.ok_or_else(|| {
        Error::Topology("no valid topology within the bounds; raise the bound multipliers".into())
    })?;
    let c = &queue.iter().find(|q| q.1 == best.index).expect("best comes from the queue").2;
    let drawing = witnesses(&ct, c, best.placement, best.weight)?;
    let mut edges = drawing.crossed.clone();
    edges.sort_unstable();
    edges.dedup();
    let top = &tops[best.index];
    if !is_multicut(g, g.pairs(), &edges)? {
        return Err(Error::Contract(format!(
            "topology {} ({}) drew a dual whose crossed edges are not a multicut",
            best.index,
            top.canonical_encoding()
        )));
    }
    stats.best_topology = Some(best.index);
    let mut result = MulticutResult::new(g, edges);
    result.certificate = Some(Certificate {
        topology: best.index,
        encoding: top.canonical_encoding(),
        sequences: drawing.realised.iter().map(|s| s.iter().map(|e| (e.edge, e.copy)).collect()).collect(),
    });
    stats.elapsed = start.elapsed();
    Ok(Solution { result, stats })
}

/// Minimum multicut of `g` for its terminal pairs.
pub fn solve_multicut(g: &EmbeddedGraph, config: &SolverConfig) -> Result<Solution> {
    let start = Instant::now();
    let mut used: Vec<VertexId> = g.pairs().iter().flat_map(|&(a, b)| [a, b]).collect();
    used.sort_unstable();
    used.dedup();
    let mut sol = if used.is_empty() {
        Solution { result: MulticutResult::new(g, vec![]), stats: SolveStats::default() }
    } else {
        let h = g.with_terminals(used, g.pairs().to_vec())?;
        let mut sol = run(&h, config, config.bounds)?;
        if config.escalate {
            let wider = run(&h, config, config.bounds.doubled())?;
            if wider.result.weight < sol.result.weight {
                warn!(
                    "doubling the bounds improved the optimum from {} to {}",
                    sol.result.weight, wider.result.weight
                );
                sol = wider;
            }
            sol.stats.escalated = true;
        }
        sol
    };
    if config.oracle && g.num_edges() <= BRUTE_FORCE_EDGES {
        let bf = brute_force_multicut(g)?;
        sol.stats.oracle_weight = Some(bf.weight);
        if bf.weight != sol.result.weight {
            return Err(Error::Contract(format!(
                "solver found weight {} but exhaustive search found {}",
                sol.result.weight, bf.weight
            )));
        }
    }
    sol.stats.elapsed = start.elapsed();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn cap_counts_small_cases() {
        // two points: one arc; four points: two ways to pair plus one tree
        assert_eq!(forest_count(2), 1);
        assert_eq!(forest_count(3), 1);
        assert_eq!(forest_count(4), 2 + 2);
    }

    #[test]
    fn empty_pairs_cost_nothing() {
        let g = generate::cube().with_terminals(vec![0, 1], vec![]).unwrap();
        let s = solve_multicut(&g, &SolverConfig::default()).unwrap();
        assert_eq!((s.result.weight, s.result.edges.len()), (0, 0));
    }

    #[test]
    fn triangle_example() {
        let g = generate::from_coordinates(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], &[(0, 1), (1, 2), (2, 0)])
            .with_weights(&[1, 2, 3])
            .unwrap()
            .with_terminals(vec![0, 1], vec![(0, 1)])
            .unwrap();
        let s = solve_multicut(&g, &SolverConfig { oracle: true, ..Default::default() }).unwrap();
        assert_eq!((s.result.weight, s.result.edges.clone()), (3, vec![0, 1]));
    }
}
