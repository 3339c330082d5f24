//! Circular seriation and planar stress layout.
//!
//! The ring objective is `Σ w_ij · d_ring(i, j)` with `d_ring` the hop distance
//! between positions on a cycle. The map objective is `Σ a_ij · ‖x_i − x_j‖²`
//! under the constraint that the mean pairwise distance is 1; it is minimized
//! through the equivalent unconstrained form `Σ a_ij d_ij² − Σ d_ij` by
//! majorization, then rescaled.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clustering::{Assignment, NormalizedGraph};
use crate::collabgraph::CollabGraph;
use crate::error::{Error, Result};
use crate::ingest::CountryCode;
use crate::scalar::Scalar;
use crate::weighted::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct CircularOrder<T> {
    pub order: Vec<CountryCode>,
    pub objective: T,
}

fn ring_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

fn ring_cost<T: Scalar>(graph: &WeightedGraph<T>, position: &[usize]) -> T {
    let n = position.len();
    graph.edges().iter().fold(T::zero(), |acc, (i, j, w)| {
        acc + w.clone() * T::from_count(ring_distance(position[*i], position[*j], n) as u64)
    })
}

/// Weighted ring-distance sum of `order` over `graph`.
pub fn seriation_objective<T: Scalar>(order: &[CountryCode], graph: &CollabGraph) -> Result<T> {
    let wg = graph.weighted::<T>();
    let position = positions(order, &wg)?;
    Ok(ring_cost(&wg, &position))
}

fn positions<T: Scalar>(order: &[CountryCode], wg: &WeightedGraph<T>) -> Result<Vec<usize>> {
    let mut position = vec![usize::MAX; wg.len()];
    if order.len() != wg.len() {
        return Err(Error::argument("ring order is not a permutation of the graph nodes"));
    }
    for (pos, c) in order.iter().enumerate() {
        match wg.index_of(*c) {
            Some(i) if position[i] == usize::MAX => position[i] = pos,
            _ => return Err(Error::argument(format!("ring order repeats or invents node {c}"))),
        }
    }
    Ok(position)
}

/// Nodes sorted by the Fiedler vector of the weighted Laplacian; ties by code.
fn spectral_rank<T: Scalar>(wg: &WeightedGraph<T>) -> Vec<f64> {
    let n = wg.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (i, j, w) in wg.edges() {
        let w = w.approx();
        lap[(*i, *j)] -= w;
        lap[(*j, *i)] -= w;
        lap[(*i, *i)] += w;
        lap[(*j, *j)] += w;
    }
    let eig = SymmetricEigen::new(lap);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]).then(a.cmp(b)));
    let fiedler = eig.eigenvectors.column(idx[1]).clone_owned();
    // fix the sign: largest-magnitude entry positive
    let pivot = (0..n).max_by(|a, b| fiedler[*a].abs().total_cmp(&fiedler[*b].abs()).then(b.cmp(a))).unwrap();
    let sign = if fiedler[pivot] < 0.0 { -1.0 } else { 1.0 };
    (0..n).map(|i| sign * fiedler[i]).collect()
}

fn spectral_start<T: Scalar>(wg: &WeightedGraph<T>, clustering: Option<&Assignment>) -> Vec<usize> {
    let rank = spectral_rank(wg);
    let n = wg.len();
    let group = |i: usize| -> usize {
        clustering
            .and_then(|a| a.get(&wg.labels()[i]).copied())
            // nodes outside the clustering form their own groups after all clusters
            .unwrap_or(usize::MAX / 2 + i)
    };
    let mut group_mean: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (i, r) in rank.iter().enumerate() {
        let e = group_mean.entry(group(i)).or_insert((0.0, 0));
        e.0 += r;
        e.1 += 1;
    }
    let mean = |g: usize| group_mean[&g].0 / group_mean[&g].1 as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ga, gb) = (group(a), group(b));
        mean(ga).total_cmp(&mean(gb)).then(ga.cmp(&gb)).then(rank[a].total_cmp(&rank[b])).then(a.cmp(&b))
    });
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Reverse,
    Swap,
    /// Take the node at one position and reinsert it at another.
    Shift,
}

/// Spectral-start ordering plus the local-search refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriationRun<T> {
    pub start: CircularOrder<T>,
    pub result: CircularOrder<T>,
}

pub fn circular_order<T: Scalar>(graph: &CollabGraph, clustering: Option<&Assignment>, seed: u64) -> CircularOrder<T> {
    circular_order_traced(graph, clustering, seed).result
}

/// Spectral seriation followed by ring 2-opt.
///
/// Moves are segment reversals, pairwise swaps and single-node shifts; only
/// strictly improving moves are accepted and the search stops after a full
/// pass without one. The seed rotates where each pass begins scanning.
pub fn circular_order_traced<T: Scalar>(
    graph: &CollabGraph,
    clustering: Option<&Assignment>,
    seed: u64,
) -> SeriationRun<T> {
    let wg = graph.weighted::<T>();
    let n = wg.len();
    let mut ring = spectral_start(&wg, clustering);
    let mut position = vec![0; n];
    let place = |ring: &[usize], position: &mut [usize]| {
        for (p, i) in ring.iter().enumerate() {
            position[*i] = p;
        }
    };
    place(&ring, &mut position);
    let start_cost = ring_cost(&wg, &position);
    let labels = |ring: &[usize]| ring.iter().map(|i| wg.labels()[*i]).collect::<Vec<_>>();
    let start = CircularOrder { order: labels(&ring), objective: start_cost.clone() };

    let mut cost = start_cost;
    let floor = T::improvement_floor();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moves: Vec<(Move, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
        .flat_map(|(i, j)| {
            let pair = if i < j { vec![(Move::Reverse, i, j), (Move::Swap, i, j)] } else { vec![] };
            pair.into_iter().chain(std::iter::once((Move::Shift, i, j)))
        })
        .filter(|(kind, i, j)| !(*kind == Move::Reverse && *i == 0 && *j == n - 1))
        .collect();
    if n >= 4 {
        loop {
            let offset = rng.random_range(0..moves.len());
            let mut improved = false;
            for k in 0..moves.len() {
                let (kind, i, j) = moves[(offset + k) % moves.len()];
                let mut candidate = ring.clone();
                match kind {
                    Move::Reverse => candidate[i..=j].reverse(),
                    Move::Swap => candidate.swap(i, j),
                    Move::Shift => {
                        let node = candidate.remove(i);
                        candidate.insert(j, node);
                    }
                }
                place(&candidate, &mut position);
                let c = ring_cost(&wg, &position);
                if cost.clone() - c.clone() > floor {
                    ring = candidate;
                    cost = c;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
    SeriationRun { start, result: CircularOrder { order: labels(&ring), objective: cost } }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapCoordinates<F> {
    pub coords: BTreeMap<CountryCode, (F, F)>,
    /// `Σ a_ij ‖x_i − x_j‖²` at the returned coordinates.
    pub stress: F,
    /// Unconstrained objective after each accepted iterate, non-increasing.
    pub trace: Vec<F>,
}

#[derive(Debug, Clone, Copy)]
pub struct MapOptions {
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self { seed: 0, tol: 1e-6, max_iter: 1000 }
    }
}

/// Stress of arbitrary coordinates; nodes missing from `coords` are an error.
pub fn map_stress<F: Float + Scalar>(coords: &BTreeMap<CountryCode, (F, F)>, ngraph: &NormalizedGraph<F>) -> Result<F> {
    let mut total = F::zero();
    for (p, a) in &ngraph.edges {
        let (Some(u), Some(v)) = (coords.get(&p.lo()), coords.get(&p.hi())) else {
            return Err(Error::argument(format!("coordinates missing for {:?}", p)));
        };
        let (dx, dy) = (u.0 - v.0, u.1 - v.1);
        total += *a * (dx * dx + dy * dy);
    }
    Ok(total)
}

fn pair_weights<F: Float + Scalar>(wg: &WeightedGraph<F>) -> DMatrix<f64> {
    let n = wg.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, j, w) in wg.edges() {
        a[(*i, *j)] = w.approx();
        a[(*j, *i)] = w.approx();
    }
    if !connected(wg) {
        // Disconnected maps are unbounded; a faint uniform attraction holds components together.
        let positive: Vec<f64> = wg.edges().iter().map(|(_, _, w)| w.approx()).collect();
        let base = if positive.is_empty() { 1.0 } else { positive.iter().sum::<f64>() / positive.len() as f64 };
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    a[(i, j)] += 1e-3 * base;
                }
            }
        }
    }
    a
}

fn connected<T: Scalar>(wg: &WeightedGraph<T>) -> bool {
    let n = wg.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for (w, _) in wg.neighbors(v) {
            if !seen[*w] {
                seen[*w] = true;
                stack.push(*w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn objective(a: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut v = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = ((x[(i, 0)] - x[(j, 0)]).powi(2) + (x[(i, 1)] - x[(j, 1)]).powi(2)).sqrt();
            v += a[(i, j)] * d * d - d;
        }
    }
    v
}

fn mean_distance(x: &DMatrix<f64>) -> f64 {
    let n = x.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += ((x[(i, 0)] - x[(j, 0)]).powi(2) + (x[(i, 1)] - x[(j, 1)]).powi(2)).sqrt();
        }
    }
    total / (n * (n - 1) / 2) as f64
}

/// Centers, aligns the principal axis with x, and fixes reflections so that the
/// first node has x ≥ 0 and the first node off the x-axis has y > 0.
fn canonicalize(x: &mut DMatrix<f64>) {
    let n = x.nrows();
    for c in 0..2 {
        let mean = x.column(c).sum() / n as f64;
        x.column_mut(c).add_scalar_mut(-mean);
    }
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        sxx += x[(i, 0)] * x[(i, 0)];
        syy += x[(i, 1)] * x[(i, 1)];
        sxy += x[(i, 0)] * x[(i, 1)];
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (s, c) = theta.sin_cos();
    for i in 0..n {
        let (px, py) = (x[(i, 0)], x[(i, 1)]);
        x[(i, 0)] = c * px + s * py;
        x[(i, 1)] = -s * px + c * py;
    }
    let eps = 1e-12;
    if x[(0, 0)] < -eps {
        x.column_mut(0).neg_mut();
    }
    if let Some(i) = (0..n).find(|i| x[(*i, 1)].abs() > eps) {
        if x[(i, 1)] < 0.0 {
            x.column_mut(1).neg_mut();
        }
    }
}

/// Stress-minimizing 2-D map of a normalized graph.
pub fn map_layout<F: Float + Scalar>(ngraph: &NormalizedGraph<F>, opts: &MapOptions) -> Result<MapCoordinates<F>> {
    let wg = ngraph.weighted();
    let n = wg.len();
    if n < 2 {
        return Err(Error::argument("map layout needs at least two nodes"));
    }
    let a = pair_weights(&wg);
    let mut system = DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                system[(i, j)] -= a[(i, j)];
                system[(i, i)] += a[(i, j)];
            }
        }
    }
    let solver = system.lu().try_inverse().ok_or_else(|| Error::argument("layout system is singular"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::<f64>::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
    let mut value = objective(&a, &x);
    let mut trace = vec![F::from_f64(value).unwrap()];
    for _ in 0..opts.max_iter {
        let mut b = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = ((x[(i, 0)] - x[(j, 0)]).powi(2) + (x[(i, 1)] - x[(j, 1)]).powi(2)).sqrt();
                if d > 0.0 {
                    b[(i, j)] = -1.0 / d;
                    b[(i, i)] += 1.0 / d;
                }
            }
        }
        let next = (&solver * (b * &x)) * 0.5;
        let next_value = objective(&a, &next);
        if next_value.is_nan() || next_value > value {
            break;
        }
        let decrease = (value - next_value) / value.abs().max(f64::MIN_POSITIVE);
        x = next;
        value = next_value;
        trace.push(F::from_f64(value).unwrap());
        if decrease < opts.tol {
            break;
        }
    }

    let scale = mean_distance(&x);
    if scale > 0.0 {
        x /= scale;
    }
    canonicalize(&mut x);
    let coords: BTreeMap<CountryCode, (F, F)> = wg
        .labels()
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, (F::from_f64(x[(i, 0)]).unwrap(), F::from_f64(x[(i, 1)]).unwrap())))
        .collect();
    let stress = map_stress(&coords, ngraph)?;
    Ok(MapCoordinates { coords, stress, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::normalize;
    use crate::collabgraph::CountryPair;
    use crate::scalar::{rational_from_count, Rational};

    fn cc(i: usize) -> CountryCode {
        CountryCode::from_index(i)
    }

    fn graph(n: usize, edges: &[(usize, usize, u64)]) -> CollabGraph {
        let mut nodes: BTreeMap<CountryCode, u64> = (0..n).map(|i| (cc(i), 1)).collect();
        let mut es = BTreeMap::new();
        for (a, b, w) in edges {
            *nodes.get_mut(&cc(*a)).unwrap() += w;
            *nodes.get_mut(&cc(*b)).unwrap() += w;
            es.insert(CountryPair::new(cc(*a), cc(*b)).unwrap(), *w);
        }
        CollabGraph::from_totals(nodes, es).unwrap()
    }

    #[test]
    fn objective_worked_example() {
        let g = graph(4, &[(0, 1, 2), (0, 2, 1)]);
        let order = [cc(0), cc(1), cc(2), cc(3)];
        assert_eq!(seriation_objective::<Rational>(&order, &g).unwrap(), rational_from_count(4));
        let reversed: Vec<_> = order.iter().rev().copied().collect();
        assert_eq!(seriation_objective::<Rational>(&reversed, &g).unwrap(), rational_from_count(4));
        assert!(seriation_objective::<f64>(&order[..3], &g).is_err());
        assert!(seriation_objective::<f64>(&[cc(0), cc(0), cc(2), cc(3)], &g).is_err());
    }

    #[test]
    fn adjacent_single_edge() {
        let g = graph(5, &[(3, 4, 7)]);
        let order: Vec<_> = (0..5).map(cc).collect();
        assert_eq!(seriation_objective::<f64>(&order, &g).unwrap(), 7.0);
    }

    #[test]
    fn small_rings_are_all_equivalent() {
        let g = graph(3, &[(0, 1, 2), (1, 2, 5), (0, 2, 1)]);
        let c = circular_order::<f64>(&g, None, 0);
        assert_eq!(c.objective, 8.0);
        assert_eq!(c.order.len(), 3);
    }

    #[test]
    fn zero_weight_graph() {
        let g = graph(6, &[]);
        let c = circular_order::<f64>(&g, None, 1);
        assert_eq!(c.objective, 0.0);
        assert_eq!(c.order.len(), 6);
    }

    #[test]
    fn clusters_stay_contiguous_in_the_start() {
        let g = graph(6, &[(0, 3, 5), (3, 5, 5), (1, 2, 5), (2, 4, 5), (0, 1, 1)]);
        let assignment: Assignment =
            [(0, 0), (3, 0), (5, 0), (1, 1), (2, 1), (4, 1)].into_iter().map(|(i, c)| (cc(i), c)).collect();
        let run = circular_order_traced::<f64>(&g, Some(&assignment), 0);
        let groups: Vec<usize> = run.start.order.iter().map(|c| assignment[c]).collect();
        let changes = groups.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 1);
        assert!(run.result.objective <= run.start.objective);
    }

    #[test]
    fn two_node_map_is_forced() {
        let g = graph(2, &[(0, 1, 3)]);
        let ng = normalize::<f64>(&g).unwrap();
        let m = map_layout(&ng, &MapOptions::default()).unwrap();
        let (a, b) = (m.coords[&cc(0)], m.coords[&cc(1)]);
        assert!((a.0 - 0.5).abs() < 1e-9 && (b.0 + 0.5).abs() < 1e-9, "{a:?} {b:?}");
        assert!(a.1.abs() < 1e-9 && b.1.abs() < 1e-9);
        assert!((m.stress - 2.0).abs() < 1e-9);
        assert!(map_layout(
            &normalize::<f64>(&graph(1, &[]))
                .unwrap_or(NormalizedGraph { nodes: [(cc(0), 1)].into_iter().collect(), edges: BTreeMap::new() }),
            &MapOptions::default()
        )
        .is_err());
    }

    #[test]
    fn disconnected_map_stays_bounded() {
        let g = graph(4, &[(0, 1, 3), (2, 3, 3)]);
        let ng = normalize::<f64>(&g).unwrap();
        let m = map_layout(&ng, &MapOptions::default()).unwrap();
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.coords.values().all(|(x, y)| x.is_finite() && y.is_finite()));
    }
}
