//! Association-strength normalization and modularity clustering.
//!
//! Clusters maximize modularity with a resolution parameter `γ`:
//!
//! ```text
//! Q = 1/(2m) · Σ_{i,j same cluster} (w_ij − γ·s_i·s_j / 2m),   w_ii = 0
//! ```
//!
//! where the sum runs over ordered pairs (diagonal included), `s_i` is node
//! strength and `m` the total edge weight. The optimizer is local moving with
//! aggregation: nodes are visited in a seeded shuffled order and moved to the
//! cluster with the largest strictly positive gain; converged clusters are
//! collapsed into super-nodes and the process repeats until nothing moves.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::collabgraph::{CollabGraph, CountryPair};
use crate::error::{Error, Result};
use crate::ingest::CountryCode;
use crate::scalar::Scalar;
use crate::weighted::WeightedGraph;

/// Edge weights replaced by association strength `2m·w_ij / (s_i·s_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGraph<T> {
    pub nodes: BTreeMap<CountryCode, u64>,
    pub edges: BTreeMap<CountryPair, T>,
}

impl<T: Scalar> NormalizedGraph<T> {
    pub fn weighted(&self) -> WeightedGraph<T> {
        WeightedGraph::new(self.nodes.keys().copied(), self.edges.iter().map(|(p, a)| (p.lo(), p.hi(), a.clone())))
    }

    pub fn strength(&self, a: CountryCode, b: CountryCode) -> T {
        CountryPair::new(a, b).and_then(|p| self.edges.get(&p)).cloned().unwrap_or_else(T::zero)
    }
}

pub fn normalize<T: Scalar>(graph: &CollabGraph) -> Result<NormalizedGraph<T>> {
    let total: u64 = graph.edges().values().sum();
    if total == 0 {
        return Err(Error::argument("cannot normalize a graph without edges"));
    }
    let mut strength: BTreeMap<CountryCode, u64> = BTreeMap::new();
    for (p, w) in graph.edges() {
        *strength.entry(p.lo()).or_default() += w;
        *strength.entry(p.hi()).or_default() += w;
    }
    let two_m = T::from_count(2 * total);
    let edges = graph
        .edges()
        .iter()
        .map(|(p, w)| {
            let denom = T::from_count(strength[&p.lo()]) * T::from_count(strength[&p.hi()]);
            (*p, two_m.clone() * T::from_count(*w) / denom)
        })
        .collect();
    Ok(NormalizedGraph { nodes: graph.nodes().clone(), edges })
}

pub type Assignment = BTreeMap<CountryCode, usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering<T> {
    /// Dense ids from 0, numbered by each cluster's lowest country code.
    pub assignment: Assignment,
    pub resolution: T,
    pub quality: T,
}

impl<T> Clustering<T> {
    pub fn cluster_count(&self) -> usize {
        self.assignment.values().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self) -> Vec<Vec<CountryCode>> {
        let mut groups = vec![Vec::new(); self.cluster_count()];
        for (c, id) in &self.assignment {
            groups[*id].push(*c);
        }
        groups
    }
}

/// Modularity of `assignment` on the raw co-authorship weights.
pub fn quality_score<T: Scalar>(graph: &CollabGraph, assignment: &Assignment, resolution: &T) -> Result<T> {
    modularity(&graph.weighted::<T>(), assignment, resolution)
}

/// Modularity over any weighted view. A graph without edges scores zero.
pub fn modularity<T: Scalar>(graph: &WeightedGraph<T>, assignment: &Assignment, resolution: &T) -> Result<T> {
    let labels: Vec<usize> = graph
        .labels()
        .iter()
        .map(|c| assignment.get(c).copied().ok_or_else(|| Error::argument(format!("node {c} is not assigned"))))
        .collect::<Result<_>>()?;
    let two_m = graph.total_weight() * T::from_count(2);
    if two_m.is_zero() {
        return Ok(T::zero());
    }
    let mut inside = T::zero();
    for (i, j, w) in graph.edges() {
        if labels[*i] == labels[*j] {
            inside += w.clone() * T::from_count(2);
        }
    }
    let mut totals: BTreeMap<usize, T> = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        *totals.entry(*label).or_insert_with(T::zero) += graph.strength(i);
    }
    let null = totals.into_values().fold(T::zero(), |acc, t| acc + t.clone() * t) / two_m.clone();
    Ok((inside - resolution.clone() * null) / two_m)
}

/// Record of one optimizer run; every entry of `gains` is strictly positive.
#[derive(Debug, Clone, Default)]
pub struct ClusterTrace<T> {
    pub gains: Vec<T>,
    /// Number of aggregation levels visited.
    pub levels: usize,
}

pub fn cluster<T: Scalar>(graph: &CollabGraph, resolution: T, seed: u64) -> Clustering<T> {
    cluster_weighted(&graph.weighted::<T>(), resolution, seed).0
}

/// One level of the aggregation hierarchy.
struct Level<T> {
    /// Ordered-pair weight inside each super-node (twice its internal edge weight).
    internal: Vec<T>,
    adj: Vec<Vec<(usize, T)>>,
    strength: Vec<T>,
    /// Lowest original index inside each super-node; original indices follow code order.
    key: Vec<usize>,
}

const MAX_PASSES: usize = 10_000;

pub fn cluster_weighted<T: Scalar>(
    graph: &WeightedGraph<T>,
    resolution: T,
    seed: u64,
) -> (Clustering<T>, ClusterTrace<T>) {
    let n = graph.len();
    let mut trace = ClusterTrace { gains: Vec::new(), levels: 0 };
    let mut membership: Vec<usize> = (0..n).collect();
    let two_m = graph.total_weight() * T::from_count(2);

    if n > 0 && !two_m.is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut level = Level {
            internal: vec![T::zero(); n],
            adj: (0..n).map(|i| graph.neighbors(i).to_vec()).collect(),
            strength: (0..n).map(|i| graph.strength(i)).collect(),
            key: (0..n).collect(),
        };
        loop {
            trace.levels += 1;
            let communities = local_moving(&level, &resolution, &two_m, &mut rng, &mut trace.gains);
            let count = communities.iter().max().map_or(0, |m| m + 1);
            for m in membership.iter_mut() {
                *m = communities[*m];
            }
            if count == level.adj.len() {
                break;
            }
            level = aggregate(&level, &communities, count);
        }
    }

    let assignment = dense_assignment(graph.labels(), &membership);
    let quality = modularity(graph, &assignment, &resolution).expect("every node is assigned");
    (Clustering { assignment, resolution, quality }, trace)
}

/// Gain of inserting an isolated node of strength `k` with `k_in` weight into a
/// community of total strength `tot`, in units of Q.
fn insertion_gain<T: Scalar>(k_in: &T, k: &T, tot: &T, resolution: &T, two_m: &T) -> T {
    let two = T::from_count(2);
    two.clone() * k_in.clone() / two_m.clone()
        - resolution.clone() * (two * k.clone() * tot.clone() + k.clone() * k.clone()) / (two_m.clone() * two_m.clone())
}

/// Returns dense community labels for the level's nodes, numbered by lowest key.
fn local_moving<T: Scalar>(
    level: &Level<T>,
    resolution: &T,
    two_m: &T,
    rng: &mut ChaCha8Rng,
    gains: &mut Vec<T>,
) -> Vec<usize> {
    let n = level.adj.len();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot: Vec<T> = level.strength.clone();
    let mut members: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([level.key[i]])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let floor = T::improvement_floor();

    for _ in 0..MAX_PASSES {
        order.shuffle(rng);
        let mut moved = false;
        for &i in &order {
            let own = comm[i];
            let k = level.strength[i].clone();
            let mut links: BTreeMap<usize, T> = BTreeMap::new();
            for (j, w) in &level.adj[i] {
                *links.entry(comm[*j]).or_insert_with(T::zero) += w.clone();
            }
            tot[own] -= k.clone();
            members[own].remove(&level.key[i]);

            let zero = T::zero();
            let stay = insertion_gain(links.get(&own).unwrap_or(&zero), &k, &tot[own], resolution, two_m);
            // (gain, tie key, community); `None` community is a fresh singleton
            let mut best: Option<(T, usize, Option<usize>)> = None;
            let mut consider = |gain: T, key: usize, target: Option<usize>| {
                let better = match &best {
                    None => true,
                    Some((g, bk, _)) => gain > *g || (gain == *g && key < *bk),
                };
                if better {
                    best = Some((gain, key, target));
                }
            };
            for (c, k_in) in &links {
                if *c != own {
                    let key = *members[*c].first().expect("linked community is non-empty");
                    consider(insertion_gain(k_in, &k, &tot[*c], resolution, two_m), key, Some(*c));
                }
            }
            if !members[own].is_empty() {
                consider(insertion_gain(&zero, &k, &zero, resolution, two_m), level.key[i], None);
            }

            let mut target = own;
            if let Some((gain, _, choice)) = best {
                let improvement = gain - stay;
                if improvement > floor {
                    target = choice.unwrap_or_else(|| {
                        (0..n).find(|c| members[*c].is_empty() && *c != own).expect("an empty community exists")
                    });
                    gains.push(improvement);
                    moved = true;
                }
            }
            comm[i] = target;
            tot[target] += k;
            members[target].insert(level.key[i]);
        }
        if !moved {
            break;
        }
    }

    let mut keyed: Vec<(usize, usize)> =
        members.iter().enumerate().filter_map(|(c, m)| m.first().map(|k| (*k, c))).collect();
    keyed.sort();
    let mut relabel = vec![usize::MAX; n];
    for (dense, (_, c)) in keyed.into_iter().enumerate() {
        relabel[c] = dense;
    }
    comm.into_iter().map(|c| relabel[c]).collect()
}

fn aggregate<T: Scalar>(level: &Level<T>, communities: &[usize], count: usize) -> Level<T> {
    let mut internal = vec![T::zero(); count];
    let mut strength = vec![T::zero(); count];
    let mut key = vec![usize::MAX; count];
    let mut links: Vec<BTreeMap<usize, T>> = vec![BTreeMap::new(); count];
    for (i, &c) in communities.iter().enumerate() {
        internal[c] += level.internal[i].clone();
        strength[c] += level.strength[i].clone();
        key[c] = key[c].min(level.key[i]);
        for (j, w) in &level.adj[i] {
            let d = communities[*j];
            if d == c {
                internal[c] += w.clone();
            } else {
                *links[c].entry(d).or_insert_with(T::zero) += w.clone();
            }
        }
    }
    Level { internal, adj: links.into_iter().map(|m| m.into_iter().collect()).collect(), strength, key }
}

fn dense_assignment(labels: &[CountryCode], membership: &[usize]) -> Assignment {
    // labels are sorted, so first appearance order is lowest-code order
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    labels
        .iter()
        .zip(membership)
        .map(|(c, m)| {
            let next = ids.len();
            (*c, *ids.entry(*m).or_insert(next))
        })
        .collect()
}

/// Normalized mutual information `2·I(A;B) / (H(A) + H(B))`; 1 when both partitions are trivial.
pub fn normalized_mutual_information(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "partitions must cover the same items");
    let n = a.len() as f64;
    if a.is_empty() {
        return 1.0;
    }
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut pa: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pb: BTreeMap<usize, f64> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        *joint.entry((*x, *y)).or_default() += 1.0;
        *pa.entry(*x).or_default() += 1.0;
        *pb.entry(*y).or_default() += 1.0;
    }
    let entropy = |p: &BTreeMap<usize, f64>| -p.values().map(|c| (c / n) * (c / n).ln()).sum::<f64>();
    let (ha, hb) = (entropy(&pa), entropy(&pb));
    if ha + hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|((x, y), c)| {
            let pxy = c / n;
            pxy * (pxy / ((pa[x] / n) * (pb[y] / n))).ln()
        })
        .sum();
    2.0 * mi / (ha + hb)
}
