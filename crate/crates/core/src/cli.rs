//! Command-line pipeline.
//!
//! Exit codes: 0 success, 1 pipeline error, 2 usage or file error. Diagnostics
//! go to stderr; data goes to files under `--out`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::clustering::{cluster, normalize, Assignment, Clustering};
use crate::collabgraph::{
    apply_threshold, build_graph, build_graph_checked, domestic_split, joint_count, CollabGraph, Scope, ThresholdMode,
    ThresholdPolicy, UnknownCountryPolicy,
};
use crate::error::Error;
use crate::fixtures;
use crate::indicators::{betweenness, domestic_share, gdp_ranking, region_partner_totals, substantive_share};
use crate::ingest::{
    filter_records, parse_country_table, parse_records, write_records, CountryCode, CountryTable, DocType,
    ParseOptions, PublicationRecord, ValidationReport, YearRange,
};
use crate::layout::{circular_order, map_layout, CircularOrder, MapCoordinates, MapOptions};
use crate::render::{
    emit_map, emit_table, emit_wheel, export_graph, partner_matrix, yearly_series, Cell, GraphFormat, RenderSpec,
    Table, TableFormat,
};
use crate::scalar::{format_fixed, Rational};

#[derive(Debug, Parser)]
#[command(name = "collabmap", version, about = "Country co-authorship networks from publication records")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and filter records; write the selected records and a validation report
    Ingest,
    /// Build the co-authorship graph and the threshold-filtered persistent network
    Graph,
    /// Shares, partner tables, yearly series, betweenness and GDP index
    Indicators,
    /// Modularity clustering of the regional and persistent networks
    Cluster,
    /// Ring ordering of the persistent network and a 2-D map of the regional network
    Layout,
    /// SVG figures
    Render,
    /// Plain-text summary report
    Report,
    /// Every stage
    All,
    /// Write the bundled demo corpus and country table
    Fixture,
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// Flat `key = value` file; flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    records: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    countries: Option<PathBuf>,
    /// Inclusive year range, `A:B`
    #[arg(long, global = true, value_name = "A:B")]
    years: Option<String>,
    /// Comma-separated document types
    #[arg(long = "doc-types", global = true, value_name = "LIST")]
    doc_types: Option<String>,
    /// total-over-window | per-year-minimum
    #[arg(long = "threshold-mode", global = true, value_name = "MODE")]
    threshold_mode: Option<String>,
    #[arg(long = "min-total", global = true, value_name = "N")]
    min_total: Option<String>,
    #[arg(long = "min-per-year", global = true, value_name = "N")]
    min_per_year: Option<String>,
    /// Threshold window length in years
    #[arg(long, global = true, value_name = "N")]
    window: Option<String>,
    #[arg(long, global = true, value_name = "R")]
    resolution: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<String>,
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Comma-separated subset of svg,graphml,pajek,csv,json
    #[arg(long, global = true, value_name = "LIST")]
    emit: Option<String>,
    /// Country for the yearly-series and partner tables
    #[arg(long, global = true, value_name = "CODE")]
    focus: Option<String>,
    /// Comma-separated partner countries
    #[arg(long, global = true, value_name = "LIST")]
    partners: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    File(String),
    Pipeline(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::File { .. } | Error::Io(_) => CliError::File(e.to_string()),
            e => CliError::Pipeline(e),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Emission {
    Svg,
    GraphMl,
    Pajek,
    Csv,
    Json,
}

impl Emission {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "svg" => Emission::Svg,
            "graphml" => Emission::GraphMl,
            "pajek" => Emission::Pajek,
            "csv" => Emission::Csv,
            "json" => Emission::Json,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub records: Option<PathBuf>,
    pub countries: Option<PathBuf>,
    pub years: Option<YearRange>,
    pub doc_types: BTreeSet<DocType>,
    pub threshold: ThresholdPolicy,
    pub resolution: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub emit: BTreeSet<Emission>,
    pub focus: Option<CountryCode>,
    pub partners: Vec<CountryCode>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            records: None,
            countries: None,
            years: None,
            doc_types: DocType::research_types(),
            threshold: ThresholdPolicy::default(),
            resolution: 1.0,
            seed: 0,
            out: PathBuf::from("out"),
            emit: [Emission::Svg, Emission::GraphMl, Emission::Pajek, Emission::Csv, Emission::Json].into(),
            focus: None,
            partners: Vec::new(),
        }
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl PipelineConfig {
    /// Applies one `key = value` setting; keys mirror the field names.
    fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let usage = |what: &str| CliError::Usage(format!("invalid {what}: {value:?}"));
        let number = |what: &str| value.trim().parse::<u64>().map_err(|_| usage(what));
        match key {
            "records" => self.records = Some(PathBuf::from(value)),
            "countries" => self.countries = Some(PathBuf::from(value)),
            "years" => self.years = Some(value.parse().map_err(|_| usage("year range"))?),
            "doc_types" => {
                self.doc_types = list(value)
                    .map(|t| t.parse::<DocType>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| usage("document types"))?;
                if self.doc_types.is_empty() {
                    return Err(usage("document types"));
                }
            }
            "threshold_mode" => {
                self.threshold.mode = value.parse::<ThresholdMode>().map_err(|_| usage("threshold mode"))?
            }
            "min_total" => self.threshold.min_total = number("minimum total")?,
            "min_per_year" => self.threshold.min_per_year = number("minimum per year")?,
            "window" => {
                let w = number("window")?;
                if w == 0 || w > 1000 {
                    return Err(usage("window"));
                }
                self.threshold.window_years = w as u32;
            }
            "resolution" => {
                let r: f64 = value.trim().parse().map_err(|_| usage("resolution"))?;
                if !(r.is_finite() && r > 0.0) {
                    return Err(usage("resolution"));
                }
                self.resolution = r;
            }
            "seed" => self.seed = number("seed")?,
            "out" => self.out = PathBuf::from(value),
            "emit" => {
                self.emit = list(value)
                    .map(|e| Emission::parse(e).ok_or_else(|| usage("emission")))
                    .collect::<CliResult<_>>()?;
            }
            "focus" => self.focus = Some(CountryCode::new(value.trim()).ok_or_else(|| usage("focus country"))?),
            "partners" => {
                self.partners = list(value)
                    .map(|c| CountryCode::new(c).ok_or_else(|| usage("partner list")))
                    .collect::<CliResult<_>>()?;
            }
            other => return Err(CliError::Usage(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    fn load_file(&mut self, path: &Path) -> CliResult<()> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::File(format!("cannot read {}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn from_flags(flags: &Flags) -> CliResult<Self> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &flags.config {
            cfg.load_file(path)?;
        }
        let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.to_string_lossy().into_owned());
        let overrides: [(&str, Option<String>); 14] = [
            ("records", path_str(&flags.records)),
            ("countries", path_str(&flags.countries)),
            ("years", flags.years.clone()),
            ("doc_types", flags.doc_types.clone()),
            ("threshold_mode", flags.threshold_mode.clone()),
            ("min_total", flags.min_total.clone()),
            ("min_per_year", flags.min_per_year.clone()),
            ("window", flags.window.clone()),
            ("resolution", flags.resolution.clone()),
            ("seed", flags.seed.clone()),
            ("out", path_str(&flags.out)),
            ("emit", flags.emit.clone()),
            ("focus", flags.focus.clone()),
            ("partners", flags.partners.clone()),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        Ok(cfg)
    }

    fn wants(&self, e: Emission) -> bool {
        self.emit.contains(&e)
    }
}

/// Everything derived from the inputs, computed on demand.
struct Pipeline {
    cfg: PipelineConfig,
    report: ValidationReport,
    /// Year-filtered, all document types.
    in_years: Vec<PublicationRecord>,
    /// Year- and type-filtered.
    selected: Vec<PublicationRecord>,
    years: Option<YearRange>,
    table: Option<CountryTable>,
    /// Records dropped for naming a country missing from the table.
    unknown: Vec<(String, CountryCode)>,
}

struct Networks {
    full: CollabGraph,
    regional: CollabGraph,
    persistent: CollabGraph,
    end_year: i32,
}

struct Clusters {
    regional: Clustering<f64>,
    persistent: Clustering<f64>,
}

struct Layouts {
    wheel: CircularOrder<f64>,
    map: Option<MapCoordinates<f64>>,
}

impl Pipeline {
    fn load(cfg: PipelineConfig) -> CliResult<Self> {
        let path = cfg.records.clone().ok_or_else(|| CliError::Usage("--records is required".into()))?;
        let file = fs::File::open(&path)
            .map_err(|e| CliError::File(format!("cannot open records file {}: {e}", path.display())))?;
        let (records, report) = parse_records(BufReader::new(file), &ParseOptions::default())
            .map_err(|e| CliError::File(format!("cannot read records file {}: {e}", path.display())))?;
        let table = match &cfg.countries {
            Some(p) => {
                let f = fs::File::open(p)
                    .map_err(|e| CliError::File(format!("cannot open country table {}: {e}", p.display())))?;
                Some(parse_country_table(f)?)
            }
            None => None,
        };
        let span = records.iter().map(|r| r.year).min().zip(records.iter().map(|r| r.year).max());
        let years = cfg.years.or_else(|| span.map(|(a, b)| YearRange::new(a, b).expect("min <= max")));
        let all_types: BTreeSet<DocType> = DocType::ALL.into_iter().collect();
        let mut in_years = match years {
            Some(y) => filter_records(&records, &all_types, y),
            None => Vec::new(),
        };
        let mut unknown = Vec::new();
        if let Some(table) = &table {
            unknown = build_graph_checked(&in_years, &Scope::All, table, UnknownCountryPolicy::Reject).1.rejected;
            let dropped: BTreeSet<&str> = unknown.iter().map(|(id, _)| id.as_str()).collect();
            in_years.retain(|r| !dropped.contains(r.id.as_str()));
        }
        let selected = in_years.iter().filter(|r| cfg.doc_types.contains(&r.doc_type)).cloned().collect();
        Ok(Self { cfg, report, in_years, selected, years, table, unknown })
    }

    fn region(&self) -> Option<BTreeSet<CountryCode>> {
        self.table.as_ref().map(CountryTable::african)
    }

    fn networks(&self) -> CliResult<Networks> {
        let full = build_graph(&self.selected, &Scope::All);
        let regional = match self.region() {
            Some(region) => build_graph(&self.selected, &Scope::Only(region)),
            None => full.clone(),
        };
        let years =
            self.years.ok_or_else(|| CliError::Pipeline(Error::argument("no records in the selected years")))?;
        let end_year = years.end();
        let mut regional = regional;
        // the threshold window is checked against the configured span, not just the years with data
        regional.year_range = Some(years);
        let persistent = apply_threshold(&regional, &self.cfg.threshold, end_year)?;
        Ok(Networks { full, regional, persistent, end_year })
    }

    fn clusters(&self, nets: &Networks) -> Clusters {
        Clusters {
            regional: cluster(&nets.regional, self.cfg.resolution, self.cfg.seed),
            persistent: cluster(&nets.persistent, self.cfg.resolution, self.cfg.seed),
        }
    }

    fn layouts(&self, nets: &Networks, clusters: &Clusters) -> CliResult<Layouts> {
        let wheel = circular_order::<f64>(&nets.persistent, Some(&clusters.persistent.assignment), self.cfg.seed);
        let map = if nets.regional.node_count() >= 2 && nets.regional.edge_count() > 0 {
            let ng = normalize::<f64>(&nets.regional)?;
            Some(map_layout(&ng, &MapOptions { seed: self.cfg.seed, ..Default::default() })?)
        } else {
            None
        };
        Ok(Layouts { wheel, map })
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.cfg.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::File(format!("cannot write {}: {e}", path.display())))
    }

    fn write_table(&self, stem: &str, table: &Table) -> CliResult<()> {
        if self.cfg.wants(Emission::Csv) {
            self.write(&format!("{stem}.csv"), &emit_table(table, TableFormat::Csv))?;
        }
        if self.cfg.wants(Emission::Json) {
            self.write(&format!("{stem}.json"), &emit_table(table, TableFormat::Json))?;
        }
        Ok(())
    }

    fn write_graph(&self, stem: &str, graph: &CollabGraph, clustering: Option<&Assignment>) -> CliResult<()> {
        if self.cfg.wants(Emission::GraphMl) {
            self.write(&format!("{stem}.graphml"), &export_graph(graph, clustering, GraphFormat::GraphMl))?;
        }
        if self.cfg.wants(Emission::Pajek) {
            self.write(&format!("{stem}.net"), &export_graph(graph, clustering, GraphFormat::Pajek))?;
        }
        Ok(())
    }

    fn stage_ingest(&self) -> CliResult<()> {
        let mut buf = Vec::new();
        write_records(&self.selected, &mut buf).map_err(Error::from)?;
        self.write("records.tsv", &String::from_utf8(buf).expect("records are utf-8"))?;
        let rejects = Table {
            columns: vec!["Line".into(), "Reason".into()],
            rows: self
                .report
                .rejects
                .iter()
                .map(|r| vec![Cell::Int(r.line as u64), Cell::Text(r.reason.token().into())])
                .collect(),
        };
        self.write_table("rejects", &rejects)?;
        if self.table.is_some() {
            let unknown = Table {
                columns: vec!["Id".into(), "Country".into()],
                rows: self
                    .unknown
                    .iter()
                    .map(|(id, c)| vec![Cell::Text(id.clone()), Cell::Text(c.to_string())])
                    .collect(),
            };
            self.write_table("unknown_countries", &unknown)?;
        }
        let summary = Table {
            columns: vec!["Read".into(), "Kept".into(), "Rejected".into(), "Unknown country".into(), "Selected".into()],
            rows: vec![vec![
                Cell::Int(self.report.records_read as u64),
                Cell::Int(self.report.records_kept as u64),
                Cell::Int(self.report.rejects.len() as u64),
                Cell::Int(self.unknown.len() as u64),
                Cell::Int(self.selected.len() as u64),
            ]],
        };
        self.write_table("ingest", &summary)
    }

    fn stage_graph(&self, nets: &Networks) -> CliResult<()> {
        self.write_graph("graph", &nets.full, None)?;
        if self.table.is_some() {
            self.write_graph("regional", &nets.regional, None)?;
        }
        self.write_graph("persistent", &nets.persistent, None)
    }

    fn yearly_table(&self, nets: &Networks) -> CliResult<Option<Table>> {
        let Some(focus) = self.cfg.focus else { return Ok(None) };
        let years: Vec<i32> = self.years.map(|y| y.years().collect()).unwrap_or_default();
        let triples = if self.cfg.partners.len() >= 2 {
            // the triple column counts papers shared by the focus and its first two partners
            let set: BTreeSet<CountryCode> =
                std::iter::once(focus).chain(self.cfg.partners.iter().take(2).copied()).collect();
            let counts = years
                .iter()
                .map(|y| joint_count(&self.selected, &set, Some(*y)).map(|n| (*y, n)))
                .collect::<Result<Vec<_>, _>>()?;
            // like absent links in the partner matrix, a zero count renders blank
            let counts: BTreeMap<i32, u64> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
            Some(counts)
        } else {
            None
        };
        Ok(Some(yearly_series(&nets.full, focus, &self.cfg.partners, &years, triples.as_ref())?))
    }

    fn shares_table(&self) -> Table {
        let region = self.region();
        let mut rows = Vec::new();
        for year in self.years.map(|y| y.years().collect::<Vec<_>>()).unwrap_or_default() {
            let mut row = vec![Cell::Int(year as u64)];
            row.push(match substantive_share(&self.in_years, year) {
                Ok(v) => Cell::Fixed(v.rendered()),
                Err(_) => Cell::Missing,
            });
            match &region {
                Some(region) => {
                    let substantive: Vec<PublicationRecord> = self
                        .in_years
                        .iter()
                        .filter(|r| r.year == year && r.doc_type.is_substantive())
                        .cloned()
                        .collect();
                    let split = domestic_split(&substantive, region);
                    row.push(Cell::Int(split.total));
                    row.push(Cell::Int(split.domestic));
                    row.push(match domestic_share(&split) {
                        Ok(v) => Cell::Fixed(v.rendered()),
                        Err(_) => Cell::Missing,
                    });
                }
                None => row.extend([Cell::Missing, Cell::Missing, Cell::Missing]),
            }
            rows.push(row);
        }
        Table {
            columns: ["Year", "Substantive %", "Regional papers", "Domestic", "Domestic %"].map(String::from).to_vec(),
            rows,
        }
    }

    fn stage_indicators(&self, nets: &Networks) -> CliResult<()> {
        self.write_table("shares", &self.shares_table())?;
        if let Some(t) = self.yearly_table(nets)? {
            self.write_table("yearly_series", &t)?;
        }
        if !self.cfg.partners.is_empty() {
            let region = self.region().unwrap_or_else(|| {
                nets.full.nodes().keys().copied().filter(|c| !self.cfg.partners.contains(c)).collect()
            });
            let mut rows: Vec<CountryCode> = nets.full.nodes().keys().copied().filter(|c| region.contains(c)).collect();
            rows.sort_by(|a, b| nets.full.output(*b).cmp(&nets.full.output(*a)).then(a.cmp(b)));
            let partners: Vec<CountryCode> =
                self.cfg.partners.iter().copied().filter(|p| nets.full.nodes().contains_key(p)).collect();
            let (total, per_partner) = region_partner_totals(&self.selected, &region, &partners);
            let t = partner_matrix(&nets.full, &rows, &partners, Some(("Region total", total, &per_partner)))?;
            self.write_table("partners", &t)?;
        }
        let scores = betweenness::<Rational>(&nets.persistent);
        let mut ranked: Vec<(CountryCode, Rational)> = scores.into_iter().collect();
        ranked.sort_by(|(ca, a), (cb, b)| b.cmp(a).then(ca.cmp(cb)));
        let t = Table {
            columns: vec!["Country".into(), "Betweenness".into()],
            rows: ranked
                .iter()
                .map(|(c, b)| vec![Cell::Text(c.to_string()), Cell::Fixed(format_fixed(b, 4))])
                .collect(),
        };
        self.write_table("betweenness", &t)?;
        if let Some(table) = &self.table {
            let t = Table {
                columns: vec!["Country".into(), "Output".into(), "GDP".into(), "Papers per billion USD".into()],
                rows: gdp_ranking(&nets.regional, table, nets.end_year)
                    .into_iter()
                    .map(|(c, v)| {
                        let gdp = match &v.denominator {
                            crate::indicators::Denominator::Monetary(g) => format_fixed(g, 3),
                            crate::indicators::Denominator::Count(n) => n.to_string(),
                        };
                        vec![
                            Cell::Text(c.to_string()),
                            Cell::Int(v.numerator),
                            Cell::Fixed(gdp),
                            Cell::Fixed(v.rendered()),
                        ]
                    })
                    .collect(),
            };
            self.write_table("gdp_index", &t)?;
        }
        Ok(())
    }

    fn stage_cluster(&self, nets: &Networks, clusters: &Clusters) -> CliResult<()> {
        let mut rows = Vec::new();
        for (name, c) in [("regional", &clusters.regional), ("persistent", &clusters.persistent)] {
            for (code, id) in &c.assignment {
                rows.push(vec![Cell::Text(name.into()), Cell::Text(code.to_string()), Cell::Int(*id as u64)]);
            }
        }
        self.write_table(
            "clusters",
            &Table { columns: vec!["Network".into(), "Country".into(), "Cluster".into()], rows },
        )?;
        self.write_graph("persistent_clustered", &nets.persistent, Some(&clusters.persistent.assignment))
    }

    fn stage_layout(&self, layouts: &Layouts) -> CliResult<()> {
        let t = Table {
            columns: vec!["Position".into(), "Country".into()],
            rows: layouts
                .wheel
                .order
                .iter()
                .enumerate()
                .map(|(i, c)| vec![Cell::Int(i as u64), Cell::Text(c.to_string())])
                .collect(),
        };
        self.write_table("wheel_order", &t)?;
        if let Some(map) = &layouts.map {
            let t = Table {
                columns: vec!["Country".into(), "X".into(), "Y".into()],
                rows: map
                    .coords
                    .iter()
                    .map(|(c, (x, y))| {
                        vec![Cell::Text(c.to_string()), Cell::Fixed(fixed6(*x)), Cell::Fixed(fixed6(*y))]
                    })
                    .collect(),
            };
            self.write_table("map_coords", &t)?;
        }
        Ok(())
    }

    fn stage_render(&self, nets: &Networks, clusters: &Clusters, layouts: &Layouts) -> CliResult<()> {
        if !self.cfg.wants(Emission::Svg) {
            return Ok(());
        }
        let spec = RenderSpec::default();
        self.write("wheel.svg", &emit_wheel(&layouts.wheel, &nets.persistent, &spec))?;
        if let Some(map) = &layouts.map {
            self.write("map.svg", &emit_map(map, &clusters.regional.assignment, &nets.regional, &spec))?;
        }
        Ok(())
    }

    fn stage_report(&self, nets: &Networks, clusters: &Clusters, layouts: &Layouts) -> CliResult<()> {
        let mut r = String::from("# collabmap report\n\n");
        let p = &self.cfg.threshold;
        let _ = writeln!(r, "Records read: {}", self.report.records_read);
        let _ = writeln!(r, "Records kept: {}", self.report.records_kept);
        let _ = writeln!(r, "Records rejected: {}", self.report.rejects.len());
        if self.table.is_some() {
            let _ = writeln!(r, "Records with unknown countries: {}", self.unknown.len());
        }
        let _ = writeln!(r, "Records selected: {}", self.selected.len());
        if let Some(y) = self.years {
            let _ = writeln!(r, "Years: {y}");
        }
        let types: Vec<&str> = self.cfg.doc_types.iter().map(|t| t.as_str()).collect();
        let _ = writeln!(r, "Document types: {}", types.join(","));
        let _ = writeln!(r, "\n## Networks\n");
        let _ = writeln!(r, "All countries: {} nodes, {} links", nets.full.node_count(), nets.full.edge_count());
        let _ = writeln!(r, "Regional: {} nodes, {} links", nets.regional.node_count(), nets.regional.edge_count());
        let _ = writeln!(
            r,
            "Persistent ({}, window {} ending {}, min total {}, min per year {}): {} nodes, {} links",
            p.mode,
            p.window_years,
            nets.end_year,
            p.min_total,
            p.min_per_year,
            nets.persistent.node_count(),
            nets.persistent.edge_count()
        );
        let _ = writeln!(r, "\n## Clusters (resolution {}, seed {})\n", self.cfg.resolution, self.cfg.seed);
        for (name, c) in [("Regional", &clusters.regional), ("Persistent", &clusters.persistent)] {
            let groups: Vec<String> =
                c.members().iter().map(|m| m.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" ")).collect();
            let _ = writeln!(r, "{name}: {} clusters, quality {}", c.cluster_count(), fixed6(c.quality));
            for (i, g) in groups.iter().enumerate() {
                let _ = writeln!(r, "- {i}: {g}");
            }
        }
        let _ = writeln!(r, "\n## Layouts\n");
        let order: Vec<&str> = layouts.wheel.order.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(r, "Wheel order: {}", order.join(" "));
        let _ = writeln!(r, "Wheel objective: {}", layouts.wheel.objective);
        if let Some(m) = &layouts.map {
            let _ = writeln!(r, "Map stress: {} after {} iterations", fixed6(m.stress), m.trace.len() - 1);
        }
        if let Some(t) = self.yearly_table(nets)? {
            let _ = writeln!(r, "\n## Yearly series\n");
            r.push_str(&markdown(&t));
        }
        let _ = writeln!(r, "\n## Shares\n");
        r.push_str(&markdown(&self.shares_table()));
        self.write("report.md", &r)
    }
}

fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn markdown(t: &Table) -> String {
    let mut s = format!("| {} |\n", t.columns.join(" | "));
    s.push_str(&format!("|{}\n", "---|".repeat(t.columns.len())));
    for row in &t.rows {
        s.push_str(&format!("| {} |\n", row.iter().map(Cell::text).collect::<Vec<_>>().join(" | ")));
    }
    s
}

fn write_fixture(cfg: &PipelineConfig) -> CliResult<()> {
    let mut buf = Vec::new();
    write_records(&fixtures::demo_records(cfg.seed), &mut buf).map_err(Error::from)?;
    let path = cfg.out.join("records.tsv");
    fs::write(&path, buf).map_err(|e| CliError::File(format!("cannot write {}: {e}", path.display())))?;
    let path = cfg.out.join("countries.csv");
    fs::write(&path, fixtures::country_table_csv(&fixtures::demo_country_table()))
        .map_err(|e| CliError::File(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: Cli) -> CliResult<()> {
    let cfg = PipelineConfig::from_flags(&cli.flags)?;
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::File(format!("cannot create {}: {e}", cfg.out.display())))?;
    if let Command::Fixture = cli.command {
        return write_fixture(&cfg);
    }
    let pipe = Pipeline::load(cfg)?;
    match cli.command {
        Command::Ingest => pipe.stage_ingest(),
        Command::Graph => pipe.stage_graph(&pipe.networks()?),
        Command::Indicators => pipe.stage_indicators(&pipe.networks()?),
        Command::Cluster => {
            let nets = pipe.networks()?;
            pipe.stage_cluster(&nets, &pipe.clusters(&nets))
        }
        Command::Layout => {
            let nets = pipe.networks()?;
            let clusters = pipe.clusters(&nets);
            pipe.stage_layout(&pipe.layouts(&nets, &clusters)?)
        }
        Command::Render => {
            let nets = pipe.networks()?;
            let clusters = pipe.clusters(&nets);
            let layouts = pipe.layouts(&nets, &clusters)?;
            pipe.stage_render(&nets, &clusters, &layouts)
        }
        Command::Report => {
            let nets = pipe.networks()?;
            let clusters = pipe.clusters(&nets);
            let layouts = pipe.layouts(&nets, &clusters)?;
            pipe.stage_report(&nets, &clusters, &layouts)
        }
        Command::All => {
            pipe.stage_ingest()?;
            let nets = pipe.networks()?;
            pipe.stage_graph(&nets)?;
            pipe.stage_indicators(&nets)?;
            let clusters = pipe.clusters(&nets);
            pipe.stage_cluster(&nets, &clusters)?;
            let layouts = pipe.layouts(&nets, &clusters)?;
            pipe.stage_layout(&layouts)?;
            pipe.stage_render(&nets, &clusters, &layouts)?;
            pipe.stage_report(&nets, &clusters, &layouts)
        }
        Command::Fixture => unreachable!(),
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("collabmap: {msg}");
            2
        }
        Err(CliError::File(msg)) => {
            eprintln!("collabmap: {msg}");
            2
        }
        Err(CliError::Pipeline(e)) => {
            eprintln!("collabmap: {e}");
            1
        }
    }
}
