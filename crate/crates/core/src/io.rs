//! CSV and JSON artifacts.
//!
//! CSV files open with one comment line naming the producer and the run:
//!
//! ```text
//! # sphere-dist 0.1.0 metric=euclidean seed=42 pairs=1000000 mass_scale=39.47841760435743
//! l,cdf
//! 0,0
//! ...
//! ```
//!
//! Histograms use the columns `bin_lo,bin_hi,mass`. Numbers are written in
//! shortest round-trip form, so parsing an artifact gives back the exact
//! values. JSON artifacts wrap their payload in an [`Artifact`] envelope.
//! No artifact carries a timestamp.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::distribution::{DensityHistogram, EmpiricalDistribution};
use crate::error::{Error, Result};
use crate::geometry::Metric;

pub const TOOL: &str = "sphere-dist";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The run description carried by the comment line of a CSV artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvHeader {
    pub version: String,
    pub metric: Metric,
    pub seed: u64,
    pub pairs: usize,
    pub mass_scale: f64,
}

impl CsvHeader {
    pub fn of(dist: &EmpiricalDistribution) -> Self {
        CsvHeader {
            version: VERSION.to_string(),
            metric: dist.metric(),
            seed: dist.seed(),
            pairs: dist.pair_count(),
            mass_scale: dist.mass_scale(),
        }
    }

    fn line(&self) -> String {
        format!(
            "# {TOOL} {} metric={} seed={} pairs={} mass_scale={}\n",
            self.version, self.metric, self.seed, self.pairs, self.mass_scale
        )
    }

    fn parse(line: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse {
            line: 1,
            column: 1,
            message: m,
        };
        let mut words = line
            .strip_prefix('#')
            .ok_or_else(|| bad("missing '#' header line".into()))?
            .split_whitespace();
        if words.next() != Some(TOOL) {
            return Err(bad(format!("header does not name {TOOL}")));
        }
        let version = words.next().ok_or_else(|| bad("missing version".into()))?.to_string();
        let (mut metric, mut seed, mut pairs, mut mass) = (None, None, None, None);
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| bad(format!("bad header field '{w}'")))?;
            let field = |e: &dyn std::fmt::Display| bad(format!("bad {k} '{v}': {e}"));
            match k {
                "metric" => metric = Some(v.parse::<Metric>().map_err(|e| field(&e))?),
                "seed" => seed = Some(v.parse::<u64>().map_err(|e| field(&e))?),
                "pairs" => pairs = Some(v.parse::<usize>().map_err(|e| field(&e))?),
                "mass_scale" => mass = Some(v.parse::<f64>().map_err(|e| field(&e))?),
                _ => return Err(bad(format!("unknown header field '{k}'"))),
            }
        }
        let missing = |k: &str| bad(format!("header lacks {k}"));
        Ok(CsvHeader {
            version,
            metric: metric.ok_or_else(|| missing("metric"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            pairs: pairs.ok_or_else(|| missing("pairs"))?,
            mass_scale: mass.ok_or_else(|| missing("mass_scale"))?,
        })
    }
}

/// A parsed `l,cdf` file.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfTable {
    pub header: CsvHeader,
    pub rows: Vec<(f64, f64)>,
}

/// A parsed `bin_lo,bin_hi,mass` file.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramTable {
    pub header: CsvHeader,
    pub rows: Vec<(f64, f64, f64)>,
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        column: 1,
        message: e.to_string(),
    }
}

fn write_table<R: Serialize>(header: &CsvHeader, columns: &[&str], rows: &[R]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(columns).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut out = header.line();
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

fn read_table<R: DeserializeOwned>(text: &str, columns: &[&str]) -> Result<(CsvHeader, Vec<R>)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let header = CsvHeader::parse(first)?;
    let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let found = r.headers().map_err(csv_error)?.clone();
    if found.iter().ne(columns.iter().copied()) {
        return Err(Error::Parse {
            line: 2,
            column: 1,
            message: format!("expected columns {}, found {}", columns.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()
        .map_err(|e| {
            let mut err = csv_error(e);
            if let Error::Parse { line, .. } = &mut err {
                *line += 1;
            }
            err
        })?;
    Ok((header, rows))
}

/// CDF of `dist` evaluated on `grid`.
pub fn cdf_csv(dist: &EmpiricalDistribution, grid: &[f64]) -> Result<String> {
    let rows: Vec<(f64, f64)> = grid.iter().map(|&l| (l, dist.cdf(l))).collect();
    write_table(&CsvHeader::of(dist), &["l", "cdf"], &rows)
}

pub fn parse_cdf_csv(text: &str) -> Result<CdfTable> {
    let (header, rows) = read_table(text, &["l", "cdf"])?;
    Ok(CdfTable { header, rows })
}

pub fn histogram_csv(dist: &EmpiricalDistribution, hist: &DensityHistogram) -> Result<String> {
    let rows: Vec<(f64, f64, f64)> = hist
        .bin_edges
        .windows(2)
        .zip(&hist.bin_masses)
        .map(|(e, &m)| (e[0], e[1], m))
        .collect();
    write_table(&CsvHeader::of(dist), &["bin_lo", "bin_hi", "mass"], &rows)
}

pub fn parse_histogram_csv(text: &str) -> Result<HistogramTable> {
    let (header, rows) = read_table(text, &["bin_lo", "bin_hi", "mass"])?;
    Ok(HistogramTable { header, rows })
}

/// Envelope of every JSON artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub seed: u64,
    pub data: T,
}

impl<T> Artifact<T> {
    pub fn new(kind: &str, seed: u64, data: T) -> Self {
        Artifact {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            kind: kind.to_string(),
            seed,
            data,
        }
    }
}

pub fn to_json<T: Serialize>(artifact: &Artifact<T>) -> String {
    let mut s = serde_json::to_string_pretty(artifact).expect("artifacts serialize");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<Artifact<T>> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{estimate_self, histogram, uniform_grid, EstimateOptions};
    use crate::geometry::SpaceSpec;
    use crate::region::Region;

    fn sample() -> EmpiricalDistribution {
        estimate_self(
            &Region::Full,
            &SpaceSpec::sphere(2),
            Metric::Euclidean,
            5000,
            3,
            &EstimateOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn cdf_csv_round_trips() {
        let d = sample();
        let grid = uniform_grid(2.0, 33);
        let text = cdf_csv(&d, &grid).unwrap();
        assert!(text.starts_with("# sphere-dist "));
        assert_eq!(text.lines().nth(1), Some("l,cdf"));
        let t = parse_cdf_csv(&text).unwrap();
        assert_eq!(t.header, CsvHeader::of(&d));
        assert_eq!(t.rows.len(), 33);
        for (l, c) in &t.rows {
            assert_eq!(*c, d.cdf(*l));
        }
    }

    #[test]
    fn histogram_csv_round_trips() {
        let d = sample();
        let h = histogram(&d, 20).unwrap();
        let t = parse_histogram_csv(&histogram_csv(&d, &h).unwrap()).unwrap();
        let masses: Vec<f64> = t.rows.iter().map(|r| r.2).collect();
        assert_eq!(masses, h.bin_masses);
        assert_eq!(t.rows[19].1, 2.0);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(parse_cdf_csv("l,cdf\n0,0\n").is_err());
        let head = "# sphere-dist 0.1.0 metric=euclidean seed=1 pairs=2 mass_scale=1\n";
        assert!(parse_cdf_csv(&format!("{head}x,cdf\n")).is_err());
        match parse_cdf_csv(&format!("{head}l,cdf\n0,0\n1,oops\n")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let no_seed = "# sphere-dist 0.1.0 metric=euclidean pairs=2 mass_scale=1\nl,cdf\n";
        assert!(parse_cdf_csv(no_seed).is_err());
    }

    #[test]
    fn json_envelope_round_trips() {
        let a = Artifact::new("numbers", 9, vec![1.5, 0.1 + 0.2]);
        let back: Artifact<Vec<f64>> = from_json(&to_json(&a)).unwrap();
        assert_eq!(back, a);
        assert!(from_json::<Vec<f64>>("{").is_err());
    }
}
