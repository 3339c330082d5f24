//! Country co-authorship graphs under whole counting.
//!
//! A paper adds one unit to each of its countries and one unit to every
//! unordered pair of its countries, independent of how many authors each
//! country contributed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{CountryCode, CountryTable, PublicationRecord, YearRange};
use crate::scalar::Scalar;
use crate::weighted::WeightedGraph;

/// Unordered pair of distinct countries, stored with `lo < hi`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryPair {
    lo: CountryCode,
    hi: CountryCode,
}

impl CountryPair {
    /// `None` for a self-pair.
    pub fn new(a: CountryCode, b: CountryCode) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(&self) -> CountryCode {
        self.lo
    }

    pub fn hi(&self) -> CountryCode {
        self.hi
    }

    pub fn contains(&self, c: CountryCode) -> bool {
        self.lo == c || self.hi == c
    }
}

impl fmt::Debug for CountryPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Which countries are materialized as nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Scope {
    #[default]
    All,
    Only(BTreeSet<CountryCode>),
}

impl Scope {
    pub fn includes(&self, c: CountryCode) -> bool {
        match self {
            Scope::All => true,
            Scope::Only(set) => set.contains(&c),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollabGraph {
    pub(crate) nodes: BTreeMap<CountryCode, u64>,
    pub(crate) node_yearly: BTreeMap<CountryCode, BTreeMap<i32, u64>>,
    pub(crate) edges: BTreeMap<CountryPair, u64>,
    pub(crate) yearly: BTreeMap<CountryPair, BTreeMap<i32, u64>>,
    pub(crate) year_range: Option<YearRange>,
}

impl CollabGraph {
    pub fn nodes(&self) -> &BTreeMap<CountryCode, u64> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<CountryPair, u64> {
        &self.edges
    }

    pub fn yearly(&self) -> &BTreeMap<CountryPair, BTreeMap<i32, u64>> {
        &self.yearly
    }

    pub fn node_yearly(&self) -> &BTreeMap<CountryCode, BTreeMap<i32, u64>> {
        &self.node_yearly
    }

    pub fn year_range(&self) -> Option<YearRange> {
        self.year_range
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn output(&self, c: CountryCode) -> u64 {
        self.nodes.get(&c).copied().unwrap_or(0)
    }

    pub fn output_in(&self, c: CountryCode, year: i32) -> u64 {
        self.node_yearly.get(&c).and_then(|m| m.get(&year)).copied().unwrap_or(0)
    }

    pub fn weight(&self, a: CountryCode, b: CountryCode) -> u64 {
        CountryPair::new(a, b).and_then(|p| self.edges.get(&p)).copied().unwrap_or(0)
    }

    pub fn weight_in(&self, a: CountryCode, b: CountryCode, year: i32) -> u64 {
        CountryPair::new(a, b).and_then(|p| self.yearly.get(&p)).and_then(|m| m.get(&year)).copied().unwrap_or(0)
    }

    /// Assembles a graph from aggregate counts only, without yearly series.
    pub fn from_totals(nodes: BTreeMap<CountryCode, u64>, edges: BTreeMap<CountryPair, u64>) -> Result<Self> {
        let g = CollabGraph { nodes, edges, ..Default::default() };
        g.validate()?;
        Ok(g)
    }

    /// Assembles a graph from full per-year series; totals are derived.
    pub fn from_yearly(
        node_yearly: BTreeMap<CountryCode, BTreeMap<i32, u64>>,
        yearly: BTreeMap<CountryPair, BTreeMap<i32, u64>>,
        year_range: Option<YearRange>,
    ) -> Result<Self> {
        let sum = |m: &BTreeMap<i32, u64>| m.values().sum::<u64>();
        let g = CollabGraph {
            nodes: node_yearly.iter().map(|(c, m)| (*c, sum(m))).collect(),
            edges: yearly.iter().map(|(p, m)| (*p, sum(m))).filter(|(_, w)| *w > 0).collect(),
            node_yearly,
            yearly,
            year_range,
        };
        g.validate()?;
        Ok(g)
    }

    /// True when per-year series are present.
    pub fn has_series(&self) -> bool {
        self.year_range.is_some()
    }

    /// Checks the structural invariants; graphs built by this module always pass.
    pub fn validate(&self) -> Result<()> {
        for (pair, w) in &self.edges {
            let (a, b) = (self.nodes.get(&pair.lo), self.nodes.get(&pair.hi));
            let (Some(a), Some(b)) = (a, b) else {
                return Err(Error::argument(format!("edge {pair:?} references a missing node")));
            };
            if *w == 0 {
                return Err(Error::argument(format!("edge {pair:?} has zero weight")));
            }
            if *w > (*a).min(*b) {
                return Err(Error::argument(format!("edge {pair:?} exceeds endpoint output")));
            }
        }
        if let Some(range) = self.year_range {
            let in_range = |m: &BTreeMap<i32, u64>| m.keys().all(|y| range.contains(*y));
            for (pair, w) in &self.edges {
                let series = self.yearly.get(pair);
                if series.map(|m| m.values().sum::<u64>()) != Some(*w) || !series.is_some_and(in_range) {
                    return Err(Error::argument(format!("yearly series of {pair:?} disagrees with total")));
                }
            }
            if self.yearly.keys().any(|p| !self.edges.contains_key(p)) {
                return Err(Error::argument("yearly series for an absent edge"));
            }
            for (c, n) in &self.nodes {
                let series = self.node_yearly.get(c);
                if series.map(|m| m.values().sum::<u64>()) != Some(*n) || !series.is_some_and(in_range) {
                    return Err(Error::argument(format!("yearly output of {c} disagrees with total")));
                }
            }
        } else if !self.yearly.is_empty() || !self.node_yearly.is_empty() {
            return Err(Error::argument("yearly series without a year range"));
        }
        Ok(())
    }

    fn add_record(&mut self, record: &PublicationRecord, scope: &Scope) {
        let year = record.year;
        self.year_range = Some(match self.year_range {
            Some(r) => r.union(&YearRange::new(year, year).unwrap()),
            None => YearRange::new(year, year).unwrap(),
        });
        let members: Vec<CountryCode> = record.countries.iter().copied().filter(|c| scope.includes(*c)).collect();
        for c in &members {
            *self.nodes.entry(*c).or_default() += 1;
            *self.node_yearly.entry(*c).or_default().entry(year).or_default() += 1;
        }
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let pair = CountryPair { lo: *a, hi: *b };
                *self.edges.entry(pair).or_default() += 1;
                *self.yearly.entry(pair).or_default().entry(year).or_default() += 1;
            }
        }
    }

    /// Commutative, associative merge of partial counts.
    pub fn merge(mut self, other: CollabGraph) -> CollabGraph {
        fn add_series<K: Ord + Copy>(
            into: &mut BTreeMap<K, BTreeMap<i32, u64>>,
            from: BTreeMap<K, BTreeMap<i32, u64>>,
        ) {
            for (k, series) in from {
                let target = into.entry(k).or_default();
                for (y, n) in series {
                    *target.entry(y).or_default() += n;
                }
            }
        }
        for (c, n) in other.nodes {
            *self.nodes.entry(c).or_default() += n;
        }
        for (p, n) in other.edges {
            *self.edges.entry(p).or_default() += n;
        }
        add_series(&mut self.node_yearly, other.node_yearly);
        add_series(&mut self.yearly, other.yearly);
        self.year_range = match (self.year_range, other.year_range) {
            (Some(a), Some(b)) => Some(a.union(&b)),
            (a, b) => a.or(b),
        };
        self
    }

    /// Dense view with edge weights converted to `T`.
    pub fn weighted<T: Scalar>(&self) -> WeightedGraph<T> {
        WeightedGraph::new(self.nodes.keys().copied(), self.edges.iter().map(|(p, w)| (p.lo, p.hi, T::from_count(*w))))
    }

    /// The same graph restricted to `keep`, dropping edges that leave it.
    pub fn subgraph(&self, keep: &BTreeSet<CountryCode>) -> CollabGraph {
        let edge_kept = |p: &CountryPair| keep.contains(&p.lo) && keep.contains(&p.hi);
        CollabGraph {
            nodes: self.nodes.iter().filter(|(c, _)| keep.contains(c)).map(|(c, n)| (*c, *n)).collect(),
            node_yearly: self
                .node_yearly
                .iter()
                .filter(|(c, _)| keep.contains(c))
                .map(|(c, m)| (*c, m.clone()))
                .collect(),
            edges: self.edges.iter().filter(|(p, _)| edge_kept(p)).map(|(p, n)| (*p, *n)).collect(),
            yearly: self.yearly.iter().filter(|(p, _)| edge_kept(p)).map(|(p, m)| (*p, m.clone())).collect(),
            year_range: self.year_range,
        }
    }
}

/// Builds the whole-count graph. Every record contributes its full country set to
/// pair formation, but only countries inside `scope` are materialized.
pub fn build_graph(records: &[PublicationRecord], scope: &Scope) -> CollabGraph {
    let mut g = CollabGraph::default();
    for r in records {
        g.add_record(r, scope);
    }
    g
}

/// Parallel construction over record chunks; bit-identical to [`build_graph`].
pub fn build_graph_par(records: &[PublicationRecord], scope: &Scope) -> CollabGraph {
    records.par_chunks(4096).map(|chunk| build_graph(chunk, scope)).reduce(CollabGraph::default, CollabGraph::merge)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownCountryPolicy {
    /// Drop the whole record and report it.
    #[default]
    Reject,
    /// Keep the record; the unknown code is reported as a synthetic entry.
    KeepSynthetic,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// `(record id, first unknown code)` for each rejected record.
    pub rejected: Vec<(String, CountryCode)>,
    pub synthetic: BTreeSet<CountryCode>,
}

/// [`build_graph`] with every country checked against a registry.
pub fn build_graph_checked(
    records: &[PublicationRecord],
    scope: &Scope,
    table: &CountryTable,
    policy: UnknownCountryPolicy,
) -> (CollabGraph, BuildReport) {
    let mut report = BuildReport::default();
    let mut g = CollabGraph::default();
    for r in records {
        let unknown: Vec<CountryCode> = r.countries.iter().copied().filter(|c| !table.contains(*c)).collect();
        match (unknown.first(), policy) {
            (None, _) => g.add_record(r, scope),
            (Some(c), UnknownCountryPolicy::Reject) => report.rejected.push((r.id.clone(), *c)),
            (Some(_), UnknownCountryPolicy::KeepSynthetic) => {
                report.synthetic.extend(unknown);
                g.add_record(r, scope);
            }
        }
    }
    (g, report)
}

/// Number of records whose country set contains all of `countries`, optionally in one year.
pub fn joint_count(records: &[PublicationRecord], countries: &BTreeSet<CountryCode>, year: Option<i32>) -> Result<u64> {
    if countries.len() < 2 {
        return Err(Error::argument("joint count needs at least two countries"));
    }
    Ok(records.iter().filter(|r| year.is_none_or(|y| r.year == y) && countries.is_subset(&r.countries)).count() as u64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DomesticSplit {
    pub total: u64,
    pub domestic: u64,
    pub international: u64,
}

/// Splits records touching `region` into wholly-in-region and mixed.
pub fn domestic_split(records: &[PublicationRecord], region: &BTreeSet<CountryCode>) -> DomesticSplit {
    let mut split = DomesticSplit::default();
    for r in records {
        if !r.countries.iter().any(|c| region.contains(c)) {
            continue;
        }
        split.total += 1;
        if r.countries.is_subset(region) {
            split.domestic += 1;
        } else {
            split.international += 1;
        }
    }
    split
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    #[default]
    TotalOverWindow,
    PerYearMinimum,
}

impl ThresholdMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdMode::TotalOverWindow => "total-over-window",
            ThresholdMode::PerYearMinimum => "per-year-minimum",
        }
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total-over-window" => Ok(ThresholdMode::TotalOverWindow),
            "per-year-minimum" => Ok(ThresholdMode::PerYearMinimum),
            _ => Err(Error::argument(format!("unknown threshold mode {s:?}"))),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdPolicy {
    pub mode: ThresholdMode,
    pub window_years: u32,
    pub min_total: u64,
    pub min_per_year: u64,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        Self { mode: ThresholdMode::TotalOverWindow, window_years: 5, min_total: 25, min_per_year: 5 }
    }
}

impl ThresholdPolicy {
    pub fn window(&self, end_year: i32) -> Result<YearRange> {
        if self.window_years == 0 {
            return Err(Error::argument("threshold window must be at least one year"));
        }
        YearRange::new(end_year - self.window_years as i32 + 1, end_year)
    }

    /// Whether a pair with this yearly series survives over `window`. A pair
    /// needs at least one joint paper in the window regardless of thresholds.
    pub fn admits(&self, series: &BTreeMap<i32, u64>, window: YearRange) -> bool {
        let counts: Vec<u64> = window.years().map(|y| series.get(&y).copied().unwrap_or(0)).collect();
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return false;
        }
        match self.mode {
            ThresholdMode::TotalOverWindow => total >= self.min_total,
            ThresholdMode::PerYearMinimum => counts.iter().all(|&n| n >= self.min_per_year),
        }
    }
}

/// Keeps edges meeting `policy` over the window ending at `end_year`, then drops
/// nodes left without edges. Surviving edges and nodes keep their full counts.
pub fn apply_threshold(graph: &CollabGraph, policy: &ThresholdPolicy, end_year: i32) -> Result<CollabGraph> {
    let window = policy.window(end_year)?;
    let range = graph.year_range.ok_or_else(|| Error::argument("graph has no yearly series to threshold"))?;
    if !range.covers(&window) {
        return Err(Error::argument(format!("threshold window {window} lies outside graph years {range}")));
    }
    let kept: BTreeSet<CountryPair> =
        graph.yearly.iter().filter(|(_, s)| policy.admits(s, window)).map(|(p, _)| *p).collect();
    let live: BTreeSet<CountryCode> = kept.iter().flat_map(|p| [p.lo, p.hi]).collect();
    Ok(CollabGraph {
        nodes: graph.nodes.iter().filter(|(c, _)| live.contains(c)).map(|(c, n)| (*c, *n)).collect(),
        node_yearly: graph.node_yearly.iter().filter(|(c, _)| live.contains(c)).map(|(c, m)| (*c, m.clone())).collect(),
        edges: graph.edges.iter().filter(|(p, _)| kept.contains(p)).map(|(p, n)| (*p, *n)).collect(),
        yearly: graph.yearly.iter().filter(|(p, _)| kept.contains(p)).map(|(p, m)| (*p, m.clone())).collect(),
        year_range: graph.year_range,
    })
}
