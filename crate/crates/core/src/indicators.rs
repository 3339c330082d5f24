//! Scalar bibliometric indicators.
//!
//! Every ratio is held as an exact [`Rational`]; rounding happens only when an
//! [`IndicatorValue`] is rendered, and always half away from zero.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::Zero;

use crate::collabgraph::{CollabGraph, DomesticSplit};
use crate::error::{Error, Result};
use crate::ingest::{CountryCode, CountryTable, PublicationRecord};
use crate::scalar::{format_fixed, ratio, rational_from_count, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Denominator {
    Count(u64),
    /// Billion constant USD.
    Monetary(Rational),
}

/// How a value is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplayRule {
    /// Percent, `decimals` fractional digits.
    Percent { decimals: u32 },
    /// Plain ratio, `decimals` fractional digits.
    Ratio { decimals: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorValue {
    pub numerator: u64,
    pub denominator: Denominator,
    /// Exactly `numerator / denominator`.
    pub value: Rational,
    pub display: DisplayRule,
}

impl IndicatorValue {
    fn from_counts(numerator: u64, denominator: u64, display: DisplayRule) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::undefined(format!("{numerator}/0")));
        }
        Ok(Self {
            numerator,
            denominator: Denominator::Count(denominator),
            value: ratio(numerator, denominator),
            display,
        })
    }

    /// The number as printed in tables, without a percent sign.
    pub fn rendered(&self) -> String {
        match self.display {
            DisplayRule::Percent { decimals } => format_fixed(&(&self.value * rational_from_count(100)), decimals),
            DisplayRule::Ratio { decimals } => format_fixed(&self.value, decimals),
        }
    }
}

impl fmt::Display for IndicatorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.display {
            DisplayRule::Percent { .. } => write!(f, "{}%", self.rendered()),
            DisplayRule::Ratio { .. } => f.write_str(&self.rendered()),
        }
    }
}

/// Joint papers of `country` and `partner` in `year` as a share of `country`'s output that year.
pub fn partner_percent(
    graph: &CollabGraph,
    country: CountryCode,
    partner: CountryCode,
    year: i32,
) -> Result<IndicatorValue> {
    let output = graph.output_in(country, year);
    if output == 0 {
        return Err(Error::undefined(format!("{country} has no output in {year}")));
    }
    IndicatorValue::from_counts(graph.weight_in(country, partner, year), output, DisplayRule::Percent { decimals: 0 })
}

/// Articles and reviews as a share of every document type published in `year`.
pub fn substantive_share(records: &[PublicationRecord], year: i32) -> Result<IndicatorValue> {
    let (all, substantive) = records
        .iter()
        .filter(|r| r.year == year)
        .fold((0, 0), |(a, s), r| (a + 1, s + r.doc_type.is_substantive() as u64));
    if all == 0 {
        return Err(Error::undefined(format!("no records in {year}")));
    }
    IndicatorValue::from_counts(substantive, all, DisplayRule::Percent { decimals: 1 })
}

pub fn domestic_share(split: &DomesticSplit) -> Result<IndicatorValue> {
    if split.total == 0 {
        return Err(Error::undefined("no in-region papers"));
    }
    IndicatorValue::from_counts(split.domestic, split.total, DisplayRule::Percent { decimals: 0 })
}

/// Papers per billion constant USD of GDP.
pub fn gdp_index(graph: &CollabGraph, table: &CountryTable, country: CountryCode, year: i32) -> Result<IndicatorValue> {
    let gdp = table.gdp(country, year).ok_or_else(|| Error::undefined(format!("no GDP for {country} in {year}")))?;
    if gdp.is_zero() {
        return Err(Error::Undefined {
            reason: format!("zero GDP for {country} in {year}"),
            anomaly: Some(format!("{country} reports output against a collapsed GDP; index is anomalous")),
        });
    }
    let output = graph.output_in(country, year);
    Ok(IndicatorValue {
        numerator: output,
        denominator: Denominator::Monetary(gdp.clone()),
        value: rational_from_count(output) / gdp,
        display: DisplayRule::Ratio { decimals: 2 },
    })
}

/// Countries with a defined GDP index in `year`, highest first; ties by code.
pub fn gdp_ranking(graph: &CollabGraph, table: &CountryTable, year: i32) -> Vec<(CountryCode, IndicatorValue)> {
    let mut ranked: Vec<_> =
        graph.nodes().keys().filter_map(|c| gdp_index(graph, table, *c, year).ok().map(|v| (*c, v))).collect();
    ranked.sort_by(|(ca, a), (cb, b)| b.value.cmp(&a.value).then(ca.cmp(cb)));
    ranked
}

pub fn field_world_share(country_count: u64, world_count: u64) -> Result<IndicatorValue> {
    IndicatorValue::from_counts(country_count, world_count, DisplayRule::Percent { decimals: 2 })
}

/// Region-wide totals: papers with at least one `region` address, and for each
/// partner the papers that also carry that partner.
pub fn region_partner_totals(
    records: &[PublicationRecord],
    region: &BTreeSet<CountryCode>,
    partners: &[CountryCode],
) -> (u64, Vec<u64>) {
    let mut total = 0;
    let mut per_partner = vec![0; partners.len()];
    for r in records.iter().filter(|r| r.countries.iter().any(|c| region.contains(c))) {
        total += 1;
        for (slot, p) in per_partner.iter_mut().zip(partners) {
            if r.countries.contains(p) {
                *slot += 1;
            }
        }
    }
    (total, per_partner)
}

pub type CentralityMap<T> = BTreeMap<CountryCode, T>;

/// Unnormalized shortest-path betweenness on the unweighted skeleton (an edge
/// exists iff its weight is positive). Each unordered source/target pair is
/// counted once; ties among equal-length paths split the credit evenly.
pub fn betweenness<T: Scalar>(graph: &CollabGraph) -> CentralityMap<T> {
    let skeleton = graph.weighted::<T>();
    let n = skeleton.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| skeleton.neighbors(i).iter().map(|(j, _)| *j).collect()).collect();
    let mut score = vec![T::zero(); n];
    for s in 0..n {
        let mut order = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![T::zero(); n];
        let mut dist: Vec<Option<usize>> = vec![None; n];
        sigma[s] = T::one();
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v].unwrap();
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
                if dist[w] == Some(dv + 1) {
                    let sv = sigma[v].clone();
                    sigma[w] += sv;
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![T::zero(); n];
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                let share = sigma[v].clone() / sigma[w].clone() * (T::one() + delta[w].clone());
                delta[v] += share;
            }
            if w != s {
                score[w] += delta[w].clone();
            }
        }
    }
    let half = T::one() / T::from_count(2);
    skeleton.labels().iter().zip(score).map(|(c, b)| (*c, b * half.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collabgraph::{build_graph, CountryPair, Scope};
    use crate::ingest::{CountryEntry, DocType, Region};
    use crate::scalar::parse_decimal;

    fn cc(s: &str) -> CountryCode {
        CountryCode::new(s).unwrap()
    }

    fn graph_from_edges(edges: &[(&str, &str, u64)]) -> CollabGraph {
        let mut nodes = BTreeMap::new();
        let mut es = BTreeMap::new();
        for (a, b, w) in edges {
            *nodes.entry(cc(a)).or_insert(0) += w;
            *nodes.entry(cc(b)).or_insert(0) += w;
            es.insert(CountryPair::new(cc(a), cc(b)).unwrap(), *w);
        }
        CollabGraph::from_totals(nodes, es).unwrap()
    }

    fn egypt_year(total: u64, with_partner: u64, partner: &str) -> CollabGraph {
        let mut recs = Vec::new();
        for i in 0..total {
            let cs: &[&str] = if i < with_partner { &["EG", partner] } else { &["EG"] };
            recs.push(PublicationRecord::new(i.to_string(), 2000, DocType::Article, cs.iter().map(|c| cc(c))));
        }
        build_graph(&recs, &Scope::All)
    }

    #[test]
    fn partner_percent_rounds_half_away_from_zero() {
        let g = egypt_year(2577, 286, "US");
        assert_eq!(partner_percent(&g, cc("EG"), cc("US"), 2000).unwrap().rendered(), "11");
        let g = egypt_year(7416, 1093, "SA");
        let v = partner_percent(&g, cc("EG"), cc("SA"), 2000).unwrap();
        assert_eq!(v.to_string(), "15%");
        assert_eq!(v.value, ratio(1093, 7416));
        let g = egypt_year(100, 0, "SA");
        assert_eq!(partner_percent(&g, cc("EG"), cc("SA"), 2000).unwrap().rendered(), "0");
        assert!(matches!(partner_percent(&g, cc("EG"), cc("SA"), 2001), Err(Error::Undefined { .. })));
    }

    #[test]
    fn partner_percents_are_not_normalized() {
        let recs: Vec<_> = (0..10)
            .map(|i| PublicationRecord::new(i.to_string(), 2000, DocType::Article, [cc("EG"), cc("US"), cc("SA")]))
            .collect();
        let g = build_graph(&recs, &Scope::All);
        let sum = partner_percent(&g, cc("EG"), cc("US"), 2000).unwrap().value
            + partner_percent(&g, cc("EG"), cc("SA"), 2000).unwrap().value;
        assert_eq!(sum, rational_from_count(2));
    }

    #[test]
    fn shares() {
        let split = DomesticSplit { total: 11678, domestic: 6319, international: 5359 };
        assert_eq!(domestic_share(&split).unwrap().rendered(), "54");
        let all = DomesticSplit { total: 5, domestic: 5, international: 0 };
        assert_eq!(domestic_share(&all).unwrap().rendered(), "100");
        let none = DomesticSplit { total: 5, domestic: 0, international: 5 };
        assert_eq!(domestic_share(&none).unwrap().rendered(), "0");
        assert!(domestic_share(&DomesticSplit::default()).is_err());

        assert_eq!(field_world_share(155, 10_000).unwrap().to_string(), "1.55%");
        assert_eq!(field_world_share(0, 7).unwrap().rendered(), "0.00");
        assert_eq!(field_world_share(5, 500).unwrap().rendered(), "1.00");
        assert!(field_world_share(1, 0).is_err());
    }

    #[test]
    fn substantive_share_saturates_and_requires_records() {
        let recs: Vec<_> =
            (0..4).map(|i| PublicationRecord::new(i.to_string(), 2000, DocType::Article, [cc("EG")])).collect();
        assert_eq!(substantive_share(&recs, 2000).unwrap().rendered(), "100.0");
        assert!(substantive_share(&recs, 2001).is_err());
    }

    #[test]
    fn gdp_index_cases() {
        let recs: Vec<_> = (0..100)
            .map(|i| PublicationRecord::new(i.to_string(), 2008, DocType::Article, [cc("TN"), cc("ZW")]))
            .collect();
        let g = build_graph(&recs, &Scope::All);
        let mut table = CountryTable::default();
        let mut gdp = BTreeMap::new();
        gdp.insert(2008, parse_decimal("10").unwrap());
        table.entries.insert(cc("TN"), CountryEntry { name: "Tunisia".into(), region: Region::North, gdp });
        let mut gdp = BTreeMap::new();
        gdp.insert(2008, parse_decimal("0").unwrap());
        table.entries.insert(cc("ZW"), CountryEntry { name: "Zimbabwe".into(), region: Region::Southern, gdp });

        let v = gdp_index(&g, &table, cc("TN"), 2008).unwrap();
        assert_eq!(v.value, rational_from_count(10));
        assert_eq!(v.rendered(), "10.00");
        assert!(matches!(gdp_index(&g, &table, cc("TN"), 2009), Err(Error::Undefined { anomaly: None, .. })));
        assert!(matches!(gdp_index(&g, &table, cc("ZW"), 2008), Err(Error::Undefined { anomaly: Some(_), .. })));
        assert_eq!(gdp_ranking(&g, &table, 2008).len(), 1);
    }

    #[test]
    fn star_and_path_betweenness() {
        let star = graph_from_edges(&[("SS", "AA", 1), ("SS", "BB", 4), ("SS", "CC", 2)]);
        let b = betweenness::<Rational>(&star);
        assert_eq!(b[&cc("SS")], rational_from_count(3));
        assert!(b[&cc("AA")].is_zero() && b[&cc("BB")].is_zero() && b[&cc("CC")].is_zero());

        let path = graph_from_edges(&[("AA", "BB", 1), ("BB", "CC", 1)]);
        let b = betweenness::<Rational>(&path);
        assert_eq!(b[&cc("BB")], rational_from_count(1));
        assert!(b[&cc("AA")].is_zero());
    }

    #[test]
    fn betweenness_splits_equal_paths() {
        // 4-cycle: each node lies on one of two shortest paths for its opposite pair
        let cycle = graph_from_edges(&[("AA", "BB", 1), ("BB", "CC", 1), ("CC", "DD", 1), ("DD", "AA", 1)]);
        let b = betweenness::<Rational>(&cycle);
        for c in ["AA", "BB", "CC", "DD"] {
            assert_eq!(b[&cc(c)], ratio(1, 2));
        }
    }

    #[test]
    fn region_totals_count_each_paper_once() {
        let region: BTreeSet<_> = [cc("EG"), cc("ZA")].into_iter().collect();
        let recs = vec![
            PublicationRecord::new("a", 2000, DocType::Article, [cc("EG"), cc("ZA"), cc("US")]),
            PublicationRecord::new("b", 2000, DocType::Article, [cc("EG"), cc("FR")]),
            PublicationRecord::new("c", 2000, DocType::Article, [cc("US"), cc("FR")]),
        ];
        assert_eq!(region_partner_totals(&recs, &region, &[cc("US"), cc("FR")]), (2, vec![1, 1]));
    }
}
