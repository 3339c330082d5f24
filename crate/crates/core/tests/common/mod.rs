//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use collabmap::collabgraph::{CollabGraph, CountryPair};
use collabmap::ingest::{CountryCode, DocType, PublicationRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cc(i: usize) -> CountryCode {
    CountryCode::from_index(i)
}

pub fn pair(a: CountryCode, b: CountryCode) -> CountryPair {
    CountryPair::new(a, b).expect("distinct countries")
}

/// Random records over `countries` codes and the years `2000..2000+years`.
pub fn random_records(rng: &mut ChaCha8Rng, records: usize, countries: usize, years: i32) -> Vec<PublicationRecord> {
    (0..records)
        .map(|i| {
            let k = rng.random_range(1..=countries.min(5));
            let set: Vec<CountryCode> = (0..k).map(|_| cc(rng.random_range(0..countries))).collect();
            let doc_type = DocType::ALL[rng.random_range(0..DocType::ALL.len())];
            let year = 2000 + rng.random_range(0..years);
            let mut r = PublicationRecord::new(format!("R{i:06}"), year, doc_type, set);
            if rng.random_bool(0.5) {
                r.fields
                    .insert(["Medicine", "Physics", "Chemistry", "Soil Science"][rng.random_range(0..4)].to_string());
            }
            r
        })
        .collect()
}

pub struct CountOracle {
    pub nodes: BTreeMap<CountryCode, u64>,
    pub edges: BTreeMap<CountryPair, u64>,
    pub node_yearly: BTreeMap<CountryCode, BTreeMap<i32, u64>>,
    pub yearly: BTreeMap<CountryPair, BTreeMap<i32, u64>>,
}

/// Counts by enumerating every candidate pair of the country universe and
/// scanning all records for each one.
pub fn count_oracle(records: &[PublicationRecord]) -> CountOracle {
    let universe: BTreeSet<CountryCode> = records.iter().flat_map(|r| r.countries.iter().copied()).collect();
    let universe: Vec<CountryCode> = universe.into_iter().collect();
    let mut o = CountOracle {
        nodes: BTreeMap::new(),
        edges: BTreeMap::new(),
        node_yearly: BTreeMap::new(),
        yearly: BTreeMap::new(),
    };
    for c in &universe {
        for r in records.iter().filter(|r| r.countries.contains(c)) {
            *o.nodes.entry(*c).or_default() += 1;
            *o.node_yearly.entry(*c).or_default().entry(r.year).or_default() += 1;
        }
    }
    for (i, a) in universe.iter().enumerate() {
        for b in &universe[i + 1..] {
            for r in records {
                if r.countries.contains(a) && r.countries.contains(b) {
                    *o.edges.entry(pair(*a, *b)).or_default() += 1;
                    *o.yearly.entry(pair(*a, *b)).or_default().entry(r.year).or_default() += 1;
                }
            }
        }
    }
    o
}

/// Aggregate-only graph from explicit weights; outputs are the incident sums
/// (at least 1), which always satisfy the graph invariants.
pub fn graph_from_weights(n: usize, weights: &BTreeMap<(usize, usize), u64>) -> CollabGraph {
    let mut nodes: BTreeMap<CountryCode, u64> = (0..n).map(|i| (cc(i), 0)).collect();
    let mut edges = BTreeMap::new();
    for ((i, j), w) in weights {
        *nodes.get_mut(&cc(*i)).unwrap() += w;
        *nodes.get_mut(&cc(*j)).unwrap() += w;
        edges.insert(pair(cc(*i), cc(*j)), *w);
    }
    for v in nodes.values_mut() {
        *v = (*v).max(1);
    }
    CollabGraph::from_totals(nodes, edges).expect("valid by construction")
}

/// Erdős–Rényi style weighted graph on `n` nodes.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> BTreeMap<(usize, usize), u64> {
    let mut w = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                w.insert((i, j), rng.random_range(1..=max_w));
            }
        }
    }
    w
}

/// Random graph with full yearly series, built from pairwise records.
pub fn random_series_graph(rng: &mut ChaCha8Rng, n: usize, years: i32) -> CollabGraph {
    let mut node_yearly: BTreeMap<CountryCode, BTreeMap<i32, u64>> = BTreeMap::new();
    let mut yearly: BTreeMap<CountryPair, BTreeMap<i32, u64>> = BTreeMap::new();
    for i in 0..n {
        let solo: BTreeMap<i32, u64> = (0..years).map(|y| (2000 + y, rng.random_range(1..4))).collect();
        node_yearly.insert(cc(i), solo);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !rng.random_bool(0.4) {
                continue;
            }
            let scale = rng.random_range(1..12);
            let mut series = BTreeMap::new();
            for y in 0..years {
                let c = rng.random_range(0..scale);
                if c > 0 {
                    series.insert(2000 + y, c);
                    *node_yearly.get_mut(&cc(i)).unwrap().get_mut(&(2000 + y)).unwrap() += c;
                    *node_yearly.get_mut(&cc(j)).unwrap().get_mut(&(2000 + y)).unwrap() += c;
                }
            }
            if !series.is_empty() {
                yearly.insert(pair(cc(i), cc(j)), series);
            }
        }
    }
    let range = collabmap::ingest::YearRange::new(2000, 2000 + years - 1).unwrap();
    CollabGraph::from_yearly(node_yearly, yearly, Some(range)).expect("valid by construction")
}

/// Planted partition: `blocks` equal groups, dense inside and sparse across.
/// Returns the graph and the ground-truth block of each node in code order.
pub fn planted_blocks(seed: u64, n: usize, blocks: usize) -> (CollabGraph, Vec<usize>) {
    let mut rng = rng(seed);
    let mut label: Vec<usize> = (0..n).map(|i| i * blocks / n).collect();
    label.shuffle(&mut rng);
    let mut w = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let same = label[i] == label[j];
            let (p, max) = if same { (0.5, 6) } else { (0.04, 2) };
            if rng.random_bool(p) {
                w.insert((i, j), rng.random_range(1..=max));
            }
        }
    }
    (graph_from_weights(n, &w), label)
}

/// Ring objective `Σ w_ij · hop(i, j)` computed from positions directly.
pub fn ring_objective(order: &[CountryCode], g: &CollabGraph) -> u64 {
    let n = order.len();
    let pos: BTreeMap<CountryCode, usize> = order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    g.edges()
        .iter()
        .map(|(p, w)| {
            let d = pos[&p.lo()].abs_diff(pos[&p.hi()]);
            w * d.min(n - d) as u64
        })
        .sum()
}

fn permutations(items: &mut Vec<CountryCode>, k: usize, visit: &mut dyn FnMut(&[CountryCode])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Exhaustive ring optimum with the first node pinned.
pub fn ring_optimum(g: &CollabGraph) -> u64 {
    let codes: Vec<CountryCode> = g.nodes().keys().copied().collect();
    if codes.len() < 3 {
        return ring_objective(&codes, g);
    }
    let mut rest = codes[1..].to_vec();
    let mut best = u64::MAX;
    permutations(&mut rest, 0, &mut |perm| {
        let mut order = vec![codes[0]];
        order.extend_from_slice(perm);
        best = best.min(ring_objective(&order, g));
    });
    best
}

/// Betweenness by listing every shortest path explicitly.
pub fn betweenness_oracle(g: &CollabGraph) -> BTreeMap<CountryCode, f64> {
    let codes: Vec<CountryCode> = g.nodes().keys().copied().collect();
    let n = codes.len();
    let idx: BTreeMap<CountryCode, usize> = codes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut adj = vec![Vec::new(); n];
    for p in g.edges().keys() {
        adj[idx[&p.lo()]].push(idx[&p.hi()]);
        adj[idx[&p.hi()]].push(idx[&p.lo()]);
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for t in s + 1..n {
            if dist[t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for &w in &adj[last] {
                    if dist[w] == dist[last] + 1 && dist[w] <= dist[t] {
                        let mut next = path.clone();
                        next.push(w);
                        stack.push(next);
                    }
                }
            }
            for path in &paths {
                for v in &path[1..path.len() - 1] {
                    score[*v] += 1.0 / paths.len() as f64;
                }
            }
        }
    }
    codes.into_iter().zip(score).collect()
}

/// Modularity by summing over every ordered node pair.
pub fn modularity_oracle(g: &CollabGraph, assignment: &BTreeMap<CountryCode, usize>, gamma: f64) -> f64 {
    let codes: Vec<CountryCode> = g.nodes().keys().copied().collect();
    let w = |a: CountryCode, b: CountryCode| if a == b { 0.0 } else { g.weight(a, b) as f64 };
    let s: Vec<f64> = codes.iter().map(|a| codes.iter().map(|b| w(*a, *b)).sum()).collect();
    let two_m: f64 = s.iter().sum();
    let mut q = 0.0;
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            if assignment[a] == assignment[b] {
                q += w(*a, *b) - gamma * s[i] * s[j] / two_m;
            }
        }
    }
    q / two_m
}
