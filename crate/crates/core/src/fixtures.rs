//! Bundled record generators that reproduce published aggregate counts.
//!
//! The source bibliographic database is not redistributable, so these build
//! synthetic record streams whose aggregates equal the published totals
//! exactly: Egypt's yearly output and its joint output with the USA and Saudi
//! Arabia for 2000–2012, and the document-type and domestic mix of Africa's
//! output in 2000.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{CountryCode, CountryEntry, CountryTable, DocType, PublicationRecord, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgyptYear {
    pub year: i32,
    pub egypt_total: u64,
    pub egypt_usa: u64,
    pub usa_percent: u64,
    /// Egypt + USA + Saudi Arabia; the 2002 cell is unpublished.
    pub triple: Option<u64>,
    pub saudi_percent: u64,
    pub egypt_saudi: u64,
}

const fn row(
    year: i32,
    total: u64,
    usa: u64,
    usa_pct: u64,
    triple: Option<u64>,
    saudi_pct: u64,
    saudi: u64,
) -> EgyptYear {
    EgyptYear {
        year,
        egypt_total: total,
        egypt_usa: usa,
        usa_percent: usa_pct,
        triple,
        saudi_percent: saudi_pct,
        egypt_saudi: saudi,
    }
}

/// Egypt's output and collaboration with the USA and Saudi Arabia, 2000–2012 (2012 partial).
pub const EGYPT_SERIES: [EgyptYear; 13] = [
    row(2000, 2577, 286, 11, Some(2), 4, 95),
    row(2001, 2707, 227, 8, Some(3), 3, 94),
    row(2002, 2894, 295, 10, None, 4, 115),
    row(2003, 3238, 312, 10, Some(7), 6, 181),
    row(2004, 3212, 318, 10, Some(4), 5, 169),
    row(2005, 3338, 326, 10, Some(3), 5, 164),
    row(2006, 3847, 358, 9, Some(6), 5, 190),
    row(2007, 4280, 424, 10, Some(8), 5, 199),
    row(2008, 4710, 439, 9, Some(15), 6, 261),
    row(2009, 5725, 597, 10, Some(20), 7, 416),
    row(2010, 6281, 708, 11, Some(33), 10, 614),
    row(2011, 7416, 823, 11, Some(55), 15, 1093),
    row(2012, 4386, 428, 10, Some(47), 19, 832),
];

fn code(s: &str) -> CountryCode {
    CountryCode::new(s).expect("fixture codes are valid")
}

/// Records whose Egypt, Egypt+USA, Egypt+Saudi and triple counts match
/// [`EGYPT_SERIES`] year by year. The unpublished 2002 triple count is generated as zero.
pub fn egypt_series_records() -> Vec<PublicationRecord> {
    let (eg, us, sa) = (code("EG"), code("US"), code("SA"));
    let mut out = Vec::new();
    for r in EGYPT_SERIES {
        let triple = r.triple.unwrap_or(0);
        let groups = [
            (triple, vec![eg, us, sa]),
            (r.egypt_usa - triple, vec![eg, us]),
            (r.egypt_saudi - triple, vec![eg, sa]),
            (r.egypt_total + triple - r.egypt_usa - r.egypt_saudi, vec![eg]),
        ];
        let mut k = 0;
        for (count, countries) in groups {
            for _ in 0..count {
                out.push(PublicationRecord::new(
                    format!("EG{}-{k:05}", r.year),
                    r.year,
                    DocType::Article,
                    countries.clone(),
                ));
                k += 1;
            }
        }
    }
    out
}

/// Africa in 2000: 13,271 papers, 11,678 of them articles or reviews, of which
/// 6,319 have only African addresses.
pub fn africa_2000_records() -> Vec<PublicationRecord> {
    const TOTAL: usize = 13_271;
    const SUBSTANTIVE: usize = 11_678;
    const DOMESTIC: usize = 6_319;
    let african = ["ZA", "EG", "NG", "KE", "TN", "MA", "DZ", "TZ"].map(code);
    let partners = ["US", "FR", "GB", "DE"].map(code);
    let others = [DocType::Proceedings, DocType::Note, DocType::Other];
    (0..TOTAL)
        .map(|i| {
            let doc_type = if i < SUBSTANTIVE {
                if i % 10 == 0 {
                    DocType::Review
                } else {
                    DocType::Article
                }
            } else {
                others[i % others.len()]
            };
            let home = african[i % african.len()];
            let countries = if !(DOMESTIC..SUBSTANTIVE).contains(&i) {
                vec![home, african[(i / african.len() + 1) % african.len()]]
            } else {
                vec![home, partners[i % partners.len()]]
            };
            PublicationRecord::new(format!("AF2000-{i:05}"), 2000, doc_type, countries)
        })
        .collect()
}

/// Regional groups used by the background network of the demo corpus.
pub const DEMO_GROUPS: [&[&str]; 4] = [
    &["DZ", "MA", "TN"],
    &["BJ", "CM", "SN", "TG"],
    &["ET", "GH", "GM", "KE", "NG", "TZ", "UG"],
    &["BW", "GA", "MW", "ZA", "ZW"],
];

/// [`egypt_series_records`] plus a seeded background of intra-African
/// collaboration with four planted regional groups. Background records never
/// involve Egypt, so the Egypt series is unchanged.
pub fn demo_records(seed: u64) -> Vec<PublicationRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = egypt_series_records();
    let groups: Vec<Vec<CountryCode>> = DEMO_GROUPS.iter().map(|g| g.iter().map(|c| code(c)).collect()).collect();
    let everyone: Vec<CountryCode> = groups.iter().flatten().copied().collect();
    let partners = ["US", "FR", "GB", "DE", "SA"].map(code);
    for year in 2000..=2012 {
        for k in 0..400 {
            let group = &groups[rng.random_range(0..groups.len())];
            let a = group[rng.random_range(0..group.len())];
            let mut countries = vec![a];
            let roll: f64 = rng.random();
            if roll < 0.75 {
                countries.push(group[rng.random_range(0..group.len())]);
            } else if roll < 0.80 {
                countries.push(everyone[rng.random_range(0..everyone.len())]);
            }
            if rng.random_bool(0.3) {
                countries.push(partners[rng.random_range(0..partners.len())]);
            }
            let doc_type = if rng.random_bool(0.9) { DocType::Article } else { DocType::Proceedings };
            out.push(PublicationRecord::new(format!("BG{year}-{k:04}"), year, doc_type, countries));
        }
    }
    out
}

/// Names and regions for every country the generators use. No GDP data.
pub fn demo_country_table() -> CountryTable {
    let rows: [(&str, &str, Region); 30] = [
        ("DZ", "Algeria", Region::North),
        ("EG", "Egypt", Region::North),
        ("LY", "Libya", Region::North),
        ("MA", "Morocco", Region::North),
        ("TN", "Tunisia", Region::North),
        ("BJ", "Benin", Region::West),
        ("GH", "Ghana", Region::West),
        ("GM", "Gambia", Region::West),
        ("NG", "Nigeria", Region::West),
        ("SN", "Senegal", Region::West),
        ("TG", "Togo", Region::West),
        ("ET", "Ethiopia", Region::East),
        ("KE", "Kenya", Region::East),
        ("TZ", "Tanzania", Region::East),
        ("UG", "Uganda", Region::East),
        ("CM", "Cameroon", Region::Central),
        ("GA", "Gabon", Region::Central),
        ("BW", "Botswana", Region::Southern),
        ("MW", "Malawi", Region::Southern),
        ("ZA", "South Africa", Region::Southern),
        ("ZW", "Zimbabwe", Region::Southern),
        ("SD", "Sudan", Region::North),
        ("US", "United States", Region::NonAfrican),
        ("FR", "France", Region::NonAfrican),
        ("GB", "United Kingdom", Region::NonAfrican),
        ("DE", "Germany", Region::NonAfrican),
        ("SA", "Saudi Arabia", Region::NonAfrican),
        ("CA", "Canada", Region::NonAfrican),
        ("CN", "China", Region::NonAfrican),
        ("BR", "Brazil", Region::NonAfrican),
    ];
    CountryTable {
        entries: rows
            .into_iter()
            .map(|(c, name, region)| (code(c), CountryEntry { name: name.to_string(), region, gdp: BTreeMap::new() }))
            .collect(),
    }
}

/// The demo table in `code,name,region,year,gdp` form.
pub fn country_table_csv(table: &CountryTable) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["code", "name", "region", "year", "gdp"]).expect("in-memory write");
    for (c, e) in &table.entries {
        if e.gdp.is_empty() {
            w.write_record([c.as_str(), &e.name, e.region.as_str(), "", ""]).expect("in-memory write");
        }
        for (year, gdp) in &e.gdp {
            let value = crate::scalar::format_fixed(gdp, 3);
            w.write_record([c.as_str(), &e.name, e.region.as_str(), &year.to_string(), &value])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
