//! Rendering of results as aligned tables, JSON or CSV.
//!
//! Output depends only on the value being rendered, so identical inputs
//! give byte-identical text. Tables and CSV show exact fractions with a
//! decimal approximation beside them.

use std::fmt::{self, Display};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::IdentityReport;
use crate::dist::{Dist, NatDist};
use crate::error::{Error, Result};
use crate::firstfull::PointsShare;
use crate::negative::TraceRow;
use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::parse(
                0,
                format!("unknown format {other:?}; expected table, json or csv"),
            )),
        }
    }
}

impl Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Clone, Copy)]
enum Align {
    Left,
    Right,
}

fn table(headers: &[&str], align: &[Align], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .zip(align)
            .map(|((c, &w), a)| match a {
                Align::Left => format!("{c:<w$}"),
                Align::Right => format!("{c:>w$}"),
            })
            .collect();
        let mut s = padded.join("  ").trim_end().to_string();
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn six(r: &Rational) -> String {
    format!("{:.6}", r.approx())
}

fn prob_row(label: String, p: &Rational) -> Vec<String> {
    vec![label, p.to_string(), six(p)]
}

fn csv_row(label: String, p: &Rational) -> Vec<String> {
    vec![label, p.numer().to_string(), p.denom().to_string(), p.approx().to_string()]
}

const PROB_ALIGN: [Align; 3] = [Align::Left, Align::Right, Align::Right];

/// A finite distribution, one row per outcome.
pub fn dist<T: Ord + Clone + Serialize + Display>(d: &Dist<T>, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Csv => {
            let rows: Vec<_> = d.iter().map(|(t, p)| csv_row(t.to_string(), p)).collect();
            csv(&["outcome", "num", "den", "approx"], &rows)
        }
        Format::Table => {
            let mut rows: Vec<_> = d.iter().map(|(t, p)| prob_row(t.to_string(), p)).collect();
            rows.push(prob_row("total".into(), &d.total()));
            table(&["outcome", "probability", "approx"], &PROB_ALIGN, &rows)
        }
    }
}

/// A distribution on the naturals. CSV has one row per explicit entry,
/// ready for plotting; table and JSON also report the residual mass.
pub fn natdist(d: &NatDist, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Csv => {
            let rows: Vec<_> = d.entries().iter().map(|(k, p)| csv_row(k.to_string(), p)).collect();
            csv(&["k", "num", "den", "approx"], &rows)
        }
        Format::Table => {
            let mut rows: Vec<_> = d.entries().iter().map(|(k, p)| prob_row(k.to_string(), p)).collect();
            rows.push(prob_row(format!("> {}", d.k_max()), d.residual()));
            table(&["k", "probability", "approx"], &PROB_ALIGN, &rows)
        }
    }
}

/// Step-by-step run of a negative automaton.
pub fn trace(rows: &[TraceRow], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.step.to_string(),
                        r.absorbed.to_string(),
                        r.continuing.to_string(),
                        r.positions.to_string(),
                    ]
                })
                .collect();
            csv(&["step", "absorbed", "continuing", "positions"], &rows)
        }
        Format::Table => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.step.to_string(),
                        r.absorbed.to_string(),
                        six(&r.absorbed),
                        r.continuing.to_string(),
                        six(&r.continuing),
                        r.positions.to_string(),
                    ]
                })
                .collect();
            let align = [Align::Right; 6];
            table(&["step", "absorbed", "approx", "continuing", "approx", "positions"], &align, &rows)
        }
    }
}

/// Win chances of both players and the share of the stake owed to `A`.
pub fn points(p: &PointsShare, format: Format) -> String {
    match format {
        Format::Json => json(p),
        Format::Csv => {
            let mut rows: Vec<_> = p.rho.iter().map(|(c, q)| csv_row(c.to_string(), q)).collect();
            rows.push(csv_row("share_A".into(), &p.share));
            csv(&["outcome", "num", "den", "approx"], &rows)
        }
        Format::Table => {
            let mut rows: Vec<_> = p.rho.iter().map(|(c, q)| prob_row(c.to_string(), q)).collect();
            rows.push(prob_row("share of A".into(), &p.share));
            table(&["player", "value", "approx"], &PROB_ALIGN, &rows)
        }
    }
}

/// Results of a check suite; CSV of an empty list is just the header.
pub fn reports(rs: &[IdentityReport], format: Format) -> String {
    let cells = |r: &IdentityReport| {
        vec![
            r.identity.clone(),
            r.params.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.holds.to_string(),
            r.note.clone().unwrap_or_default(),
        ]
    };
    let headers = ["identity", "params", "lhs", "rhs", "holds", "note"];
    match format {
        Format::Json => json(rs),
        Format::Csv => csv(&headers, &rs.iter().map(cells).collect::<Vec<_>>()),
        Format::Table => {
            let mut rows: Vec<_> = rs.iter().map(cells).collect();
            let failed = rs.iter().filter(|r| !r.holds).count();
            rows.push(vec![format!("{} checks, {failed} failed", rs.len())]);
            let mut align = [Align::Left; 6];
            align[2] = Align::Right;
            align[3] = Align::Right;
            table(&headers, &align, &rows)
        }
    }
}

#[derive(Deserialize)]
struct DistJson<T> {
    outcomes: Vec<OutcomeJson<T>>,
}

#[derive(Deserialize)]
struct OutcomeJson<T> {
    outcome: T,
    num: String,
    den: String,
}

/// Reads back a distribution written by [`dist`] in JSON format.
pub fn dist_from_json<T: Ord + Clone + DeserializeOwned>(text: &str) -> Result<Dist<T>> {
    let doc: DistJson<T> = serde_json::from_str(text).map_err(|e| Error::parse(e.column(), e.to_string()))?;
    let pairs = doc
        .outcomes
        .into_iter()
        .map(|o| {
            let p: Rational = format!("{}/{}", o.num, o.den).parse()?;
            Ok((o.outcome, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Dist::from_pairs(pairs)
}
