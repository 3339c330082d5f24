//! Deterministic emitters: SVG figures, GraphML/Pajek exchange files, CSV/JSON tables.
//!
//! Every emitter is a pure function of its inputs. Coordinates are printed with
//! two fixed decimals and every collection is traversed in sorted order, so the
//! same inputs always produce the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::clustering::Assignment;
use crate::collabgraph::{CollabGraph, CountryPair};
use crate::error::{Error, Result};
use crate::indicators::partner_percent;
use crate::ingest::{CountryCode, YearRange};
use crate::layout::{CircularOrder, MapCoordinates};

/// Fixed ordered palette; cluster `k` uses entry `k % len`.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939",
];

#[derive(Debug, Clone)]
pub struct RenderSpec {
    /// Edges drawn on the map, heaviest first.
    pub edge_limit: usize,
    pub label_scale: f64,
    /// Square canvas side in pixels.
    pub canvas: f64,
    /// Radius of the largest node; areas scale with output.
    pub max_node_radius: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { edge_limit: 1000, label_scale: 1.0, canvas: 800.0, max_node_radius: 24.0 }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn svg_open(out: &mut String, spec: &RenderSpec) {
    let side = num(spec.canvas);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">"
    );
    let _ = writeln!(out, "<rect width=\"{side}\" height=\"{side}\" fill=\"#ffffff\"/>");
}

/// Circular "wheel": nodes evenly spaced in ring order, one chord per edge.
pub fn emit_wheel<T>(order: &CircularOrder<T>, graph: &CollabGraph, spec: &RenderSpec) -> String {
    let n = order.order.len();
    let center = spec.canvas / 2.0;
    let radius = spec.canvas * 0.38;
    let angle = |k: usize| std::f64::consts::TAU * k as f64 / n.max(1) as f64 - std::f64::consts::FRAC_PI_2;
    let place: BTreeMap<CountryCode, (f64, f64, f64)> = order
        .order
        .iter()
        .enumerate()
        .map(|(k, c)| (*c, (center + radius * angle(k).cos(), center + radius * angle(k).sin(), angle(k))))
        .collect();

    let mut out = String::new();
    svg_open(&mut out, spec);
    let _ = writeln!(
        out,
        "<circle class=\"rim\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>",
        num(center),
        num(center),
        num(radius)
    );

    let mut chords: Vec<(u64, CountryPair)> = graph
        .edges()
        .iter()
        .filter(|(p, _)| place.contains_key(&p.lo()) && place.contains_key(&p.hi()))
        .map(|(p, w)| (*w, *p))
        .collect();
    chords.sort();
    let heaviest = chords.last().map_or(1, |(w, _)| *w).max(1) as f64;
    out.push_str("<g id=\"chords\" fill=\"none\" stroke=\"#4a6fa5\" stroke-opacity=\"0.6\">\n");
    for (w, p) in &chords {
        let (x1, y1, _) = place[&p.lo()];
        let (x2, y2, _) = place[&p.hi()];
        let width = 0.5 + 5.5 * (*w as f64) / heaviest;
        let _ = writeln!(
            out,
            "<path class=\"chord\" data-pair=\"{}-{}\" d=\"M {} {} Q {} {} {} {}\" stroke-width=\"{}\"/>",
            p.lo(),
            p.hi(),
            num(x1),
            num(y1),
            num(center),
            num(center),
            num(x2),
            num(y2),
            num(width)
        );
    }
    out.push_str("</g>\n<g id=\"nodes\">\n");
    let font = num(12.0 * spec.label_scale);
    for c in &order.order {
        let (x, y, a) = place[c];
        let (lx, ly) = (center + (radius + 18.0) * a.cos(), center + (radius + 18.0) * a.sin());
        let _ =
            writeln!(out, "<circle class=\"node\" cx=\"{}\" cy=\"{}\" r=\"4.00\" fill=\"#333333\"/>", num(x), num(y));
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"{font}\" text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>",
            num(lx),
            num(ly),
            escape(c.as_str())
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Planar map: positions from `coords`, fill by cluster, area ∝ output, top-N edges.
pub fn emit_map<F: Copy + Into<f64>>(
    coords: &MapCoordinates<F>,
    clustering: &Assignment,
    graph: &CollabGraph,
    spec: &RenderSpec,
) -> String {
    let points: BTreeMap<CountryCode, (f64, f64)> =
        coords.coords.iter().map(|(c, (x, y))| (*c, ((*x).into(), (*y).into()))).collect();
    let extent = points.values().fold(0.0f64, |m, (x, y)| m.max(x.abs()).max(y.abs()));
    let margin = spec.max_node_radius + 20.0;
    let half = spec.canvas / 2.0;
    let scale = if extent > 0.0 { (half - margin) / extent } else { 0.0 };
    // SVG y grows downward
    let screen = |(x, y): (f64, f64)| (half + scale * x, half - scale * y);

    let mut out = String::new();
    svg_open(&mut out, spec);

    let mut edges: Vec<(u64, CountryPair)> = graph
        .edges()
        .iter()
        .filter(|(p, _)| points.contains_key(&p.lo()) && points.contains_key(&p.hi()))
        .map(|(p, w)| (*w, *p))
        .collect();
    edges.sort_by(|(wa, pa), (wb, pb)| wb.cmp(wa).then(pa.cmp(pb)));
    edges.truncate(spec.edge_limit);
    let heaviest = edges.first().map_or(1, |(w, _)| *w).max(1) as f64;
    out.push_str("<g id=\"edges\" stroke=\"#999999\" stroke-opacity=\"0.5\">\n");
    for (w, p) in edges.iter().rev() {
        let (x1, y1) = screen(points[&p.lo()]);
        let (x2, y2) = screen(points[&p.hi()]);
        let _ = writeln!(
            out,
            "<line class=\"edge\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke-width=\"{}\"/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            num(0.5 + 3.5 * (*w as f64) / heaviest)
        );
    }
    out.push_str("</g>\n<g id=\"nodes\" stroke=\"#ffffff\">\n");
    let largest = graph.nodes().values().copied().max().unwrap_or(1).max(1) as f64;
    let font = num(11.0 * spec.label_scale);
    for (c, p) in &points {
        let (x, y) = screen(*p);
        let r = spec.max_node_radius * (graph.output(*c) as f64 / largest).sqrt();
        let fill = clustering.get(c).map_or("#bbbbbb", |k| PALETTE[k % PALETTE.len()]);
        let _ = writeln!(
            out,
            "<circle class=\"node\" data-country=\"{c}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            num(x),
            num(y),
            num(r)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"{font}\" text-anchor=\"middle\">{}</text>",
            num(x),
            num(y - r - 3.0),
            escape(c.as_str())
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    GraphMl,
    Pajek,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphml" => Ok(GraphFormat::GraphMl),
            "pajek" => Ok(GraphFormat::Pajek),
            _ => Err(Error::argument(format!("unsupported graph format {s:?}"))),
        }
    }
}

fn series_text(series: &BTreeMap<i32, u64>) -> String {
    series.iter().map(|(y, n)| format!("{y}:{n}")).collect::<Vec<_>>().join(" ")
}

fn parse_series(text: &str, format: &'static str) -> Result<BTreeMap<i32, u64>> {
    text.split_whitespace()
        .map(|item| {
            let (y, n) = item
                .split_once(':')
                .ok_or_else(|| Error::Import { format, reason: format!("bad series item {item:?}") })?;
            match (y.parse(), n.parse()) {
                (Ok(y), Ok(n)) => Ok((y, n)),
                _ => Err(Error::Import { format, reason: format!("bad series item {item:?}") }),
            }
        })
        .collect()
}

/// Serializes a graph (and optional cluster ids) losslessly.
///
/// GraphML carries the full per-year series; Pajek carries names, outputs,
/// aggregate weights and clusters.
pub fn export_graph(graph: &CollabGraph, clustering: Option<&Assignment>, format: GraphFormat) -> String {
    match format {
        GraphFormat::GraphMl => export_graphml(graph, clustering),
        GraphFormat::Pajek => export_pajek(graph, clustering),
    }
}

fn export_graphml(graph: &CollabGraph, clustering: Option<&Assignment>) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"years\" for=\"graph\" attr.name=\"years\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"output\" for=\"node\" attr.name=\"output\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"output_yearly\" for=\"node\" attr.name=\"output_yearly\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"weight_yearly\" for=\"edge\" attr.name=\"weight_yearly\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    if let Some(range) = graph.year_range() {
        let _ = writeln!(out, "    <data key=\"years\">{range}</data>");
    }
    for (c, n) in graph.nodes() {
        let _ = write!(out, "    <node id=\"{c}\"><data key=\"output\">{n}</data>");
        if let Some(series) = graph.node_yearly().get(c) {
            let _ = write!(out, "<data key=\"output_yearly\">{}</data>", series_text(series));
        }
        if let Some(k) = clustering.and_then(|a| a.get(c)) {
            let _ = write!(out, "<data key=\"cluster\">{k}</data>");
        }
        out.push_str("</node>\n");
    }
    for (i, (p, w)) in graph.edges().iter().enumerate() {
        let _ = write!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data>",
            p.lo(),
            p.hi()
        );
        if let Some(series) = graph.yearly().get(p) {
            let _ = write!(out, "<data key=\"weight_yearly\">{}</data>", series_text(series));
        }
        out.push_str("</edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn export_pajek(graph: &CollabGraph, clustering: Option<&Assignment>) -> String {
    let n = graph.node_count();
    let index: BTreeMap<CountryCode, usize> = graph.nodes().keys().enumerate().map(|(i, c)| (*c, i + 1)).collect();
    let mut out = format!("*Network collabmap\n*Vertices {n}\n");
    for (c, i) in &index {
        let _ = writeln!(out, "{i} \"{c}\"");
    }
    out.push_str("*Edges\n");
    for (p, w) in graph.edges() {
        let _ = writeln!(out, "{} {} {w}", index[&p.lo()], index[&p.hi()]);
    }
    let _ = writeln!(out, "*Vector output\n*Vertices {n}");
    for v in graph.nodes().values() {
        let _ = writeln!(out, "{v}");
    }
    if let Some(a) = clustering {
        let _ = writeln!(out, "*Partition cluster\n*Vertices {n}");
        for c in graph.nodes().keys() {
            match a.get(c) {
                Some(k) => {
                    let _ = writeln!(out, "{k}");
                }
                None => out.push_str("-1\n"),
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportedGraph {
    pub graph: CollabGraph,
    pub clustering: Option<Assignment>,
}

pub fn import_graph(text: &str, format: GraphFormat) -> Result<ImportedGraph> {
    match format {
        GraphFormat::GraphMl => import_graphml(text),
        GraphFormat::Pajek => import_pajek(text),
    }
}

fn import_graphml(text: &str) -> Result<ImportedGraph> {
    const FMT: &str = "graphml";
    let err = |reason: String| Error::Import { format: FMT, reason };
    let doc = roxmltree::Document::parse(text).map_err(|e| err(e.to_string()))?;
    let root = doc.root_element();
    let keys: BTreeMap<&str, &str> = root
        .children()
        .filter(|n| n.has_tag_name("key"))
        .filter_map(|k| Some((k.attribute("id")?, k.attribute("attr.name")?)))
        .collect();
    let data = |node: roxmltree::Node| -> BTreeMap<String, String> {
        node.children()
            .filter(|c| c.has_tag_name("data"))
            .filter_map(|d| {
                let key = d.attribute("key")?;
                Some((keys.get(key).copied().unwrap_or(key).to_string(), d.text().unwrap_or("").trim().to_string()))
            })
            .collect()
    };
    let g = root.children().find(|n| n.has_tag_name("graph")).ok_or_else(|| err("no <graph> element".into()))?;
    let year_range =
        data(g).get("years").map(|s| s.parse::<YearRange>()).transpose().map_err(|e| err(e.to_string()))?;

    let mut nodes = BTreeMap::new();
    let mut node_yearly = BTreeMap::new();
    let mut clusters = Assignment::new();
    for n in g.children().filter(|n| n.has_tag_name("node")) {
        let id = n.attribute("id").ok_or_else(|| err("node without id".into()))?;
        let code = CountryCode::new(id).ok_or_else(|| err(format!("node id {id:?} is not a country code")))?;
        let d = data(n);
        let output = d.get("output").ok_or_else(|| err(format!("node {id} lacks output")))?;
        nodes.insert(code, output.parse::<u64>().map_err(|e| err(e.to_string()))?);
        if let Some(s) = d.get("output_yearly") {
            node_yearly.insert(code, parse_series(s, FMT)?);
        }
        if let Some(k) = d.get("cluster") {
            clusters.insert(code, k.parse::<usize>().map_err(|e| err(e.to_string()))?);
        }
    }
    let mut edges = BTreeMap::new();
    let mut yearly = BTreeMap::new();
    for e in g.children().filter(|n| n.has_tag_name("edge")) {
        let end = |name: &str| -> Result<CountryCode> {
            let v = e.attribute(name).ok_or_else(|| err(format!("edge without {name}")))?;
            CountryCode::new(v).ok_or_else(|| err(format!("edge endpoint {v:?} is not a country code")))
        };
        let pair = CountryPair::new(end("source")?, end("target")?).ok_or_else(|| err("self-loop edge".into()))?;
        let d = data(e);
        let w = d.get("weight").ok_or_else(|| err("edge lacks weight".into()))?;
        *edges.entry(pair).or_insert(0) += w.parse::<u64>().map_err(|e| err(e.to_string()))?;
        if let Some(s) = d.get("weight_yearly") {
            yearly.insert(pair, parse_series(s, FMT)?);
        }
    }
    let graph = match year_range {
        Some(range) => {
            let g = CollabGraph::from_yearly(node_yearly, yearly, Some(range))?;
            if g.nodes() != &nodes || g.edges() != &edges {
                return Err(err("yearly series disagree with totals".into()));
            }
            g
        }
        None => CollabGraph::from_totals(nodes, edges)?,
    };
    Ok(ImportedGraph { graph, clustering: (!clusters.is_empty()).then_some(clusters) })
}

fn import_pajek(text: &str) -> Result<ImportedGraph> {
    const FMT: &str = "pajek";
    let err = |reason: String| Error::Import { format: FMT, reason };
    #[derive(PartialEq)]
    enum Section {
        None,
        Vertices,
        Edges,
        Vector,
        Partition,
    }
    let mut section = Section::None;
    let mut pending: Option<Section> = None;
    let mut labels: Vec<CountryCode> = Vec::new();
    let mut edges = BTreeMap::new();
    let mut outputs: Vec<u64> = Vec::new();
    let mut clusters: Vec<i64> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%')) {
        if let Some(header) = line.strip_prefix('*') {
            let lower = header.to_ascii_lowercase();
            section = if lower.starts_with("vertices") {
                pending.take().unwrap_or(Section::Vertices)
            } else if lower.starts_with("edges") {
                Section::Edges
            } else if lower.starts_with("vector") {
                pending = Some(Section::Vector);
                Section::None
            } else if lower.starts_with("partition") {
                pending = Some(Section::Partition);
                Section::None
            } else {
                Section::None
            };
            continue;
        }
        match section {
            Section::Vertices => {
                let label =
                    line.split('"').nth(1).ok_or_else(|| err(format!("vertex line without quoted label: {line:?}")))?;
                labels.push(
                    CountryCode::new(label).ok_or_else(|| err(format!("label {label:?} is not a country code")))?,
                );
            }
            Section::Edges => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let (Some(a), Some(b), Some(w)) = (parts.first(), parts.get(1), parts.get(2)) else {
                    return Err(err(format!("edge line needs source, target and weight: {line:?}")));
                };
                let vertex = |s: &str| -> Result<CountryCode> {
                    let i: usize = s.parse().map_err(|_| err(format!("bad vertex index {s:?}")))?;
                    labels.get(i.wrapping_sub(1)).copied().ok_or_else(|| err(format!("vertex {i} out of range")))
                };
                let pair = CountryPair::new(vertex(a)?, vertex(b)?).ok_or_else(|| err("self-loop edge".into()))?;
                *edges.entry(pair).or_insert(0) += w.parse::<u64>().map_err(|_| err(format!("bad weight {w:?}")))?;
            }
            Section::Vector => outputs.push(line.parse().map_err(|_| err(format!("bad output {line:?}")))?),
            Section::Partition => clusters.push(line.parse().map_err(|_| err(format!("bad cluster {line:?}")))?),
            Section::None => {}
        }
    }
    if outputs.len() != labels.len() {
        return Err(err("output vector does not match vertex count".into()));
    }
    let nodes: BTreeMap<CountryCode, u64> = labels.iter().copied().zip(outputs).collect();
    let clustering = if clusters.is_empty() {
        None
    } else if clusters.len() != labels.len() {
        return Err(err("partition does not match vertex count".into()));
    } else {
        Some(labels.iter().zip(clusters).filter(|(_, k)| *k >= 0).map(|(c, k)| (*c, k as usize)).collect())
    };
    Ok(ImportedGraph { graph: CollabGraph::from_totals(nodes, edges)?, clustering })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(u64),
    /// A number already rendered with its fixed precision.
    Fixed(String),
    Text(String),
    Missing,
}

impl Cell {
    pub fn text(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Fixed(s) | Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::argument(format!("unsupported table format {s:?}"))),
        }
    }
}

pub fn emit_table(table: &Table, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::text)).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
        TableFormat::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, serde_json::Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(col, cell)| {
                            let v = match cell {
                                Cell::Int(n) => serde_json::Value::from(*n),
                                Cell::Fixed(s) | Cell::Text(s) => serde_json::Value::from(s.clone()),
                                Cell::Missing => serde_json::Value::Null,
                            };
                            (col.clone(), v)
                        })
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({ "columns": table.columns, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

fn require_nodes(graph: &CollabGraph, codes: &[CountryCode]) -> Result<()> {
    match codes.iter().find(|c| !graph.nodes().contains_key(c)) {
        Some(c) => Err(Error::argument(format!("country {c} is not in the graph"))),
        None => Ok(()),
    }
}

/// Countries by partner: each row gives a country's output and its joint counts
/// with every partner. Absent links are blank. `totals` adds a leading region row.
pub fn partner_matrix(
    graph: &CollabGraph,
    rows: &[CountryCode],
    partners: &[CountryCode],
    totals: Option<(&str, u64, &[u64])>,
) -> Result<Table> {
    require_nodes(graph, rows)?;
    require_nodes(graph, partners)?;
    let mut columns = vec!["Country".to_string(), "Total".to_string()];
    columns.extend(partners.iter().map(|p| p.to_string()));
    let mut out = Vec::new();
    if let Some((label, total, per_partner)) = totals {
        let mut row = vec![Cell::Text(label.to_string()), Cell::Int(total)];
        row.extend(per_partner.iter().map(|n| Cell::Int(*n)));
        out.push(row);
    }
    for c in rows {
        let mut row = vec![Cell::Text(c.to_string()), Cell::Int(graph.output(*c))];
        row.extend(partners.iter().map(|p| match graph.weight(*c, *p) {
            0 => Cell::Missing,
            w => Cell::Int(w),
        }));
        out.push(row);
    }
    Ok(Table { columns, rows: out })
}

/// Year-by-year output of `focus`, its joint papers with each partner and the
/// partner share as an integer percent. `triples` supplies the multi-partner
/// column; a year absent from it renders blank.
pub fn yearly_series(
    graph: &CollabGraph,
    focus: CountryCode,
    partners: &[CountryCode],
    years: &[i32],
    triples: Option<&BTreeMap<i32, u64>>,
) -> Result<Table> {
    require_nodes(graph, &[focus])?;
    require_nodes(graph, partners)?;
    let mut columns = vec!["Year".to_string(), format!("{focus} total")];
    for p in partners {
        columns.push(format!("{focus} + {p}"));
        columns.push(format!("{p} as % {focus}"));
    }
    if triples.is_some() {
        columns.push("Triple co-authors".to_string());
    }
    let mut rows = Vec::new();
    for &year in years {
        let mut row = vec![Cell::Int(year as u64), Cell::Int(graph.output_in(focus, year))];
        for p in partners {
            row.push(Cell::Int(graph.weight_in(focus, *p, year)));
            row.push(match partner_percent(graph, focus, *p, year) {
                Ok(v) => Cell::Fixed(v.rendered()),
                Err(_) => Cell::Missing,
            });
        }
        if let Some(t) = triples {
            row.push(t.get(&year).map_or(Cell::Missing, |n| Cell::Int(*n)));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
