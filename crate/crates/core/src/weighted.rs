//! Index-based weighted graph used internally by the numeric algorithms.

use std::collections::BTreeMap;

use crate::ingest::CountryCode;
use crate::scalar::Scalar;

/// Undirected graph over dense indices `0..n`, labels sorted by country code.
#[derive(Debug, Clone)]
pub struct WeightedGraph<T> {
    labels: Vec<CountryCode>,
    index: BTreeMap<CountryCode, usize>,
    /// `(i, j, w)` with `i < j`, `w > 0`, sorted.
    edges: Vec<(usize, usize, T)>,
    adj: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> WeightedGraph<T> {
    /// Zero weights are dropped; duplicate pairs are summed.
    pub fn new(
        labels: impl IntoIterator<Item = CountryCode>,
        edges: impl IntoIterator<Item = (CountryCode, CountryCode, T)>,
    ) -> Self {
        let mut labels: Vec<CountryCode> = labels.into_iter().collect();
        labels.sort();
        labels.dedup();
        let index: BTreeMap<CountryCode, usize> = labels.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut merged: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (a, b, w) in edges {
            let (i, j) = (index[&a], index[&b]);
            assert!(i != j, "self-pair {a}");
            let key = (i.min(j), i.max(j));
            *merged.entry(key).or_insert_with(T::zero) += w;
        }
        let edges: Vec<(usize, usize, T)> =
            merged.into_iter().filter(|(_, w)| *w > T::zero()).map(|((i, j), w)| (i, j, w)).collect();
        let mut adj = vec![Vec::new(); labels.len()];
        for (i, j, w) in &edges {
            adj[*i].push((*j, w.clone()));
            adj[*j].push((*i, w.clone()));
        }
        for list in &mut adj {
            list.sort_by_key(|(j, _)| *j);
        }
        Self { labels, index, edges, adj }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[CountryCode] {
        &self.labels
    }

    pub fn index_of(&self, code: CountryCode) -> Option<usize> {
        self.index.get(&code).copied()
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, T)] {
        &self.adj[i]
    }

    pub fn strength(&self, i: usize) -> T {
        self.adj[i].iter().fold(T::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// Sum of edge weights, each undirected edge once.
    pub fn total_weight(&self) -> T {
        self.edges.iter().fold(T::zero(), |acc, (_, _, w)| acc + w.clone())
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        match self.adj[i].binary_search_by_key(&j, |(k, _)| *k) {
            Ok(pos) => self.adj[i][pos].1.clone(),
            Err(_) => T::zero(),
        }
    }
}
