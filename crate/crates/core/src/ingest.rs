//! Publication records and the country registry.
//!
//! Records arrive one per line as `id<TAB>year<TAB>doc_type<TAB>countries<TAB>fields`.
//! Malformed lines are rejected individually and logged in a
//! [`ValidationReport`]; only I/O failures abort a parse.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{parse_decimal, Rational};

/// ISO-3166 alpha-2 code, stored as two uppercase ASCII letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 2]);

impl CountryCode {
    pub fn new(code: &str) -> Option<Self> {
        match code.as_bytes() {
            [a, b] if a.is_ascii_uppercase() && b.is_ascii_uppercase() => Some(Self([*a, *b])),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &str {
        // Both bytes are ASCII uppercase by construction.
        std::str::from_utf8(&self.0).unwrap()
    }

    /// Code number `i` in `AA, AB, ..., ZZ` order; used by generators.
    pub fn from_index(i: usize) -> Self {
        assert!(i < 26 * 26, "country index out of range");
        Self([b'A' + (i / 26) as u8, b'A' + (i % 26) as u8])
    }
}

impl FromStr for CountryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s).ok_or_else(|| Error::argument(format!("invalid country code {s:?}")))
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DocType {
    Article,
    Review,
    Note,
    Proceedings,
    Other,
}

impl DocType {
    pub const ALL: [DocType; 5] =
        [DocType::Article, DocType::Review, DocType::Note, DocType::Proceedings, DocType::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::Note => "note",
            DocType::Proceedings => "proceedings",
            DocType::Other => "other",
        }
    }

    /// Articles and reviews.
    pub fn is_substantive(self) -> bool {
        matches!(self, DocType::Article | DocType::Review)
    }

    /// The article/note/review set used to delineate research papers.
    pub fn research_types() -> BTreeSet<DocType> {
        [DocType::Article, DocType::Note, DocType::Review].into_iter().collect()
    }
}

impl FromStr for DocType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DocType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::argument(format!("unknown document type {s:?}")))
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive calendar-year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct YearRange {
    start: i32,
    end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::argument(format!("empty year range {start}:{end}")));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn end(&self) -> i32 {
        self.end
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn covers(&self, other: &YearRange) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.start..=self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn union(&self, other: &YearRange) -> YearRange {
        YearRange { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

impl Default for YearRange {
    fn default() -> Self {
        Self { start: 1900, end: 2100 }
    }
}

impl FromStr for YearRange {
    type Err = Error;

    /// `A:B`, or a single year.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::argument(format!("invalid year range {s:?}, expected A:B"));
        match s.split_once(':') {
            Some((a, b)) => YearRange::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let y = s.trim().parse().map_err(|_| bad())?;
                YearRange::new(y, y)
            }
        }
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub id: String,
    pub year: i32,
    pub doc_type: DocType,
    pub countries: BTreeSet<CountryCode>,
    pub fields: BTreeSet<String>,
}

impl PublicationRecord {
    pub fn new(
        id: impl Into<String>,
        year: i32,
        doc_type: DocType,
        countries: impl IntoIterator<Item = CountryCode>,
    ) -> Self {
        Self { id: id.into(), year, doc_type, countries: countries.into_iter().collect(), fields: BTreeSet::new() }
    }

    /// One line of the record format, without the trailing newline.
    pub fn to_line(&self) -> String {
        let countries: Vec<&str> = self.countries.iter().map(CountryCode::as_str).collect();
        let fields: Vec<&str> = self.fields.iter().map(String::as_str).collect();
        format!("{}\t{}\t{}\t{}\t{}", self.id, self.year, self.doc_type, countries.join(","), fields.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RejectReason {
    FieldCount,
    EmptyId,
    DuplicateId,
    BadYear,
    YearOutOfRange,
    BadDocType,
    NoCountries,
    BadCountry,
    BadField,
    NotUtf8,
}

impl RejectReason {
    pub fn token(self) -> &'static str {
        match self {
            RejectReason::FieldCount => "field-count",
            RejectReason::EmptyId => "empty-id",
            RejectReason::DuplicateId => "duplicate-id",
            RejectReason::BadYear => "bad-year",
            RejectReason::YearOutOfRange => "year-out-of-range",
            RejectReason::BadDocType => "bad-doc-type",
            RejectReason::NoCountries => "no-countries",
            RejectReason::BadCountry => "bad-country",
            RejectReason::BadField => "bad-field",
            RejectReason::NotUtf8 => "not-utf8",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    /// 1-based physical line number.
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub records_read: usize,
    pub records_kept: usize,
    pub rejects: Vec<Reject>,
}

impl ValidationReport {
    pub fn reconciles(&self) -> bool {
        self.records_kept + self.rejects.len() == self.records_read
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub valid_years: YearRange,
}

fn parse_line(line: &str, opts: &ParseOptions) -> std::result::Result<PublicationRecord, RejectReason> {
    let parts: Vec<&str> = line.split('\t').collect();
    // A missing trailing fields column is tolerated; any other count is not.
    let (id, year, doc_type, countries, fields) = match parts.as_slice() {
        [id, year, doc, countries] => (*id, *year, *doc, *countries, ""),
        [id, year, doc, countries, fields] => (*id, *year, *doc, *countries, *fields),
        _ => return Err(RejectReason::FieldCount),
    };
    if id.is_empty() {
        return Err(RejectReason::EmptyId);
    }
    let year: i32 = year.parse().map_err(|_| RejectReason::BadYear)?;
    if !opts.valid_years.contains(year) {
        return Err(RejectReason::YearOutOfRange);
    }
    let doc_type: DocType = doc_type.parse().map_err(|_| RejectReason::BadDocType)?;
    if countries.is_empty() {
        return Err(RejectReason::NoCountries);
    }
    let countries = countries
        .split(',')
        .map(|c| CountryCode::new(c).ok_or(RejectReason::BadCountry))
        .collect::<std::result::Result<BTreeSet<_>, _>>()?;
    let fields = if fields.is_empty() {
        BTreeSet::new()
    } else {
        fields
            .split(',')
            .map(|f| if f.is_empty() { Err(RejectReason::BadField) } else { Ok(f.to_string()) })
            .collect::<std::result::Result<BTreeSet<_>, _>>()?
    };
    Ok(PublicationRecord { id: id.to_string(), year, doc_type, countries, fields })
}

/// Reads the line-delimited record format. Blank lines are skipped and not counted.
pub fn parse_records<R: BufRead>(
    mut reader: R,
    opts: &ParseOptions,
) -> Result<(Vec<PublicationRecord>, ValidationReport)> {
    let mut records = Vec::new();
    let mut report = ValidationReport::default();
    let mut seen_ids = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let outcome = match std::str::from_utf8(&buf) {
            Ok(text) => {
                let text = text.trim_end_matches(['\n', '\r']);
                if text.trim().is_empty() {
                    continue;
                }
                parse_line(text, opts)
            }
            Err(_) => Err(RejectReason::NotUtf8),
        };
        report.records_read += 1;
        match outcome {
            Ok(record) if !seen_ids.insert(record.id.clone()) => {
                report.rejects.push(Reject { line: line_no, reason: RejectReason::DuplicateId })
            }
            Ok(record) => records.push(record),
            Err(reason) => report.rejects.push(Reject { line: line_no, reason }),
        }
    }
    report.records_kept = records.len();
    Ok((records, report))
}

pub fn parse_records_str(text: &str) -> (Vec<PublicationRecord>, ValidationReport) {
    parse_records(text.as_bytes(), &ParseOptions::default()).expect("in-memory reads cannot fail")
}

pub fn write_records<W: Write>(records: &[PublicationRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

/// Records whose type is in `doc_types` and whose year lies in `years`, in input order.
pub fn filter_records(
    records: &[PublicationRecord],
    doc_types: &BTreeSet<DocType>,
    years: YearRange,
) -> Vec<PublicationRecord> {
    records.iter().filter(|r| doc_types.contains(&r.doc_type) && years.contains(r.year)).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    North,
    West,
    East,
    Central,
    Southern,
    NonAfrican,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::North => "north",
            Region::West => "west",
            Region::East => "east",
            Region::Central => "central",
            Region::Southern => "southern",
            Region::NonAfrican => "non-african",
        }
    }

    pub fn is_african(self) -> bool {
        self != Region::NonAfrican
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Region::North, Region::West, Region::East, Region::Central, Region::Southern, Region::NonAfrican]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::argument(format!("unknown region {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountryEntry {
    pub name: String,
    pub region: Region,
    /// Constant billion USD. Absent years are missing, not zero.
    pub gdp: BTreeMap<i32, Rational>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountryTable {
    pub entries: BTreeMap<CountryCode, CountryEntry>,
}

impl CountryTable {
    pub fn get(&self, code: CountryCode) -> Option<&CountryEntry> {
        self.entries.get(&code)
    }

    pub fn contains(&self, code: CountryCode) -> bool {
        self.entries.contains_key(&code)
    }

    pub fn gdp(&self, code: CountryCode, year: i32) -> Option<&Rational> {
        self.entries.get(&code).and_then(|e| e.gdp.get(&year))
    }

    /// Codes of every country tagged with an African region.
    pub fn african(&self) -> BTreeSet<CountryCode> {
        self.entries.iter().filter(|(_, e)| e.region.is_african()).map(|(c, _)| *c).collect()
    }
}

const COUNTRY_HEADER: [&str; 5] = ["code", "name", "region", "year", "gdp"];

/// Reads `code,name,region,year,gdp` rows. Rows sharing a code merge into one entry;
/// `year` and `gdp` may both be empty to register a country without GDP data.
pub fn parse_country_table<R: Read>(reader: R) -> Result<CountryTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header_err = |reason: String| Error::CountryTable { line: 1, reason };
    let headers = rdr.headers().map_err(|e| header_err(e.to_string()))?.clone();
    if headers.iter().ne(COUNTRY_HEADER.iter().copied()) {
        return Err(header_err(format!("expected header {}", COUNTRY_HEADER.join(","))));
    }
    let mut table = CountryTable::default();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let bad = |reason: String| Error::CountryTable { line, reason };
        let row = row.map_err(|e| bad(e.to_string()))?;
        if row.len() != 5 {
            return Err(bad(format!("expected 5 columns, found {}", row.len())));
        }
        let code = CountryCode::new(&row[0]).ok_or_else(|| bad(format!("invalid code {:?}", &row[0])))?;
        let name = row[1].to_string();
        let region: Region = row[2].parse().map_err(|_| bad(format!("unknown region {:?}", &row[2])))?;
        let entry = table.entries.entry(code).or_insert_with(|| CountryEntry {
            name: name.clone(),
            region,
            gdp: BTreeMap::new(),
        });
        if entry.name != name || entry.region != region {
            return Err(Error::DuplicateCode { code });
        }
        match (&row[3], &row[4]) {
            ("", "") => {}
            (year, gdp) => {
                let year: i32 = year.parse().map_err(|_| bad(format!("invalid year {year:?}")))?;
                let value = parse_decimal(gdp).ok_or_else(|| bad(format!("invalid GDP {gdp:?}")))?;
                if value < Rational::from_integer(0.into()) {
                    return Err(Error::NegativeGdp { code, year });
                }
                if let Some(prev) = entry.gdp.insert(year, value.clone()) {
                    if prev != value {
                        return Err(bad(format!("conflicting GDP for {code} in {year}")));
                    }
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn cc(s: &str) -> CountryCode {
        CountryCode::new(s).unwrap()
    }

    #[test]
    fn duplicate_countries_collapse() {
        let (recs, report) = parse_records_str("W1\t2011\tarticle\tGH,GH,NG\t\n");
        assert_eq!(report.rejects, vec![]);
        assert_eq!(recs[0].countries, [cc("GH"), cc("NG")].into_iter().collect());
    }

    #[test]
    fn empty_country_list_rejected() {
        let (recs, report) = parse_records_str("W1\t2011\tarticle\t\tChemistry\n");
        assert!(recs.is_empty());
        assert_eq!(report.rejects, vec![Reject { line: 1, reason: RejectReason::NoCountries }]);
        assert!(report.reconciles());
    }

    #[test]
    fn reject_reasons() {
        let text = "\
W1\t2011\tarticle\tEG,SA,US\tChemistry
W2\t20x1\tarticle\tEG\t
W3\t1850\tarticle\tEG\t
W4\t2011\tletter\tEG\t

W5\t2011\tarticle\teg\t
W6\t2011\tarticle
W1\t2012\treview\tEG\t
\t2012\treview\tEG\t
W7\t2012\treview\tEG\ta,,b
W8\t2012\treview\tEG,\t
";
        let (recs, report) = parse_records_str(text);
        assert_eq!(recs.len(), 1);
        let got: Vec<(usize, &str)> = report.rejects.iter().map(|r| (r.line, r.reason.token())).collect();
        assert_eq!(
            got,
            vec![
                (2, "bad-year"),
                (3, "year-out-of-range"),
                (4, "bad-doc-type"),
                (6, "bad-country"),
                (7, "field-count"),
                (8, "duplicate-id"),
                (9, "empty-id"),
                (10, "bad-field"),
                (11, "bad-country"),
            ]
        );
        assert_eq!(report.records_read, 10);
        assert!(report.reconciles());
    }

    #[test]
    fn non_utf8_line_is_rejected_not_fatal() {
        let bytes = b"W1\t2011\tarticle\tEG\t\n\xff\xfe\n";
        let (recs, report) = parse_records(&bytes[..], &ParseOptions::default()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(report.rejects[0].reason, RejectReason::NotUtf8);
    }

    #[test]
    fn crlf_and_missing_fields_column() {
        let (recs, report) = parse_records_str("W1\t2011\tnote\tKE,TZ\r\n");
        assert!(report.rejects.is_empty());
        assert_eq!(recs[0].doc_type, DocType::Note);
        assert!(recs[0].fields.is_empty());
    }

    #[test]
    fn country_table_rows_merge() {
        let text = "code,name,region,year,gdp\nZA,South Africa,southern,2008,287.1\nZA,South Africa,southern,2009,290\nEG,Egypt,north,,\n";
        let t = parse_country_table(text.as_bytes()).unwrap();
        assert_eq!(t.gdp(cc("ZA"), 2008), Some(&ratio(2871, 10)));
        assert_eq!(t.gdp(cc("ZA"), 2009), Some(&ratio(290, 1)));
        assert_eq!(t.gdp(cc("ZA"), 2010), None);
        assert!(t.contains(cc("EG")));
        assert_eq!(t.gdp(cc("EG"), 2008), None);
        assert_eq!(t.african().len(), 2);
    }

    #[test]
    fn quoted_names_with_commas() {
        let text = "code,name,region,year,gdp\nCD,\"Congo, Dem. Rep.\",central,2008,11.7\n";
        let t = parse_country_table(text.as_bytes()).unwrap();
        assert_eq!(t.get(cc("CD")).unwrap().name, "Congo, Dem. Rep.");
    }

    #[test]
    fn country_table_errors() {
        let dup = "code,name,region,year,gdp\nEG,Egypt,north,2008,1\nEG,Misr,north,2009,2\n";
        match parse_country_table(dup.as_bytes()) {
            Err(Error::DuplicateCode { code }) => assert_eq!(code, cc("EG")),
            other => panic!("expected duplicate-code error, got {other:?}"),
        }
        let neg = "code,name,region,year,gdp\nZW,Zimbabwe,southern,2008,-5\n";
        assert!(matches!(parse_country_table(neg.as_bytes()), Err(Error::NegativeGdp { year: 2008, .. })));
        let region = "code,name,region,year,gdp\nZW,Zimbabwe,middle,2008,5\n";
        assert!(matches!(parse_country_table(region.as_bytes()), Err(Error::CountryTable { line: 2, .. })));
        let header = "code,name,year,gdp\n";
        assert!(matches!(parse_country_table(header.as_bytes()), Err(Error::CountryTable { line: 1, .. })));
    }

    #[test]
    fn filter_keeps_research_types() {
        let recs = vec![
            PublicationRecord::new("a", 2005, DocType::Article, [cc("EG")]),
            PublicationRecord::new("b", 2005, DocType::Proceedings, [cc("EG")]),
        ];
        let kept = filter_records(&recs, &DocType::research_types(), YearRange::new(2000, 2012).unwrap());
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "a");
        let all: BTreeSet<_> = DocType::ALL.into_iter().collect();
        assert_eq!(filter_records(&recs, &all, YearRange::default()), recs);
    }

    #[test]
    fn year_range_parsing() {
        assert_eq!("2000:2012".parse::<YearRange>().unwrap(), YearRange::new(2000, 2012).unwrap());
        assert_eq!("2011".parse::<YearRange>().unwrap().len(), 1);
        assert!("2012:2000".parse::<YearRange>().is_err());
        assert!("x:1".parse::<YearRange>().is_err());
    }
}
