//! Literal parsing, CSV/JSON writers and their matching readers.
//!
//! CSV files start with `# key: value` metadata lines, then a header row.

use std::io::{BufRead, Read, Write};
use std::ops::RangeInclusive;

use serde_json::Value;

use crate::conjectures::ConjectureReport;
use crate::discrepancy::{normalized, OrderRow, Trajectory};
use crate::error::{Error, Result};

/// Ordered `key: value` pairs written ahead of CSV headers.
pub type Metadata = Vec<(String, String)>;

/// A count such as `1000`, `1_000`, `2^20` or `10^6`.
pub fn parse_count(text: &str) -> Result<u64> {
    let t = text.trim().replace('_', "");
    let bad = || Error::Parse(format!("not a count: {text:?}"));
    if let Some((base, exp)) = t.split_once('^') {
        let base: u64 = base.parse().map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        return base
            .checked_pow(exp)
            .ok_or_else(|| Error::Parse(format!("{text:?} overflows")));
    }
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    t.parse().map_err(|_| bad())
}

fn split_range(text: &str) -> Option<(&str, &str)> {
    let t = text.trim();
    // skip a leading sign so "-3..2" splits at the dots
    let from = usize::from(t.starts_with('-'));
    let at = t[from..].find("..")? + from;
    let (a, b) = (&t[..at], &t[at + 2..]);
    Some((a, b.strip_prefix('=').unwrap_or(b)))
}

/// Inclusive order range `a..b` (also `a..=b`), or a single order `k`.
pub fn parse_order_range(text: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::Parse(format!("not an order range: {text:?}"));
    let num = |s: &str| -> Result<u32> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    let (a, b) = match split_range(text) {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let k = num(text)?;
            (k, k)
        }
    };
    if a > b {
        return Err(Error::Parse(format!("empty order range {text:?}")));
    }
    Ok(a..=b)
}

/// Inclusive integer range `a..b` with optional signs, or a single integer.
pub fn parse_int_range(text: &str) -> Result<RangeInclusive<i64>> {
    let bad = || Error::Parse(format!("not an integer range: {text:?}"));
    let num = |s: &str| -> Result<i64> { s.trim().parse().map_err(|_| bad()) };
    let (a, b) = match split_range(text) {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let z = num(text)?;
            (z, z)
        }
    };
    if a > b {
        return Err(Error::Parse(format!("empty range {text:?}")));
    }
    Ok(a..=b)
}

pub fn write_metadata<W: Write>(out: &mut W, meta: &Metadata) -> Result<()> {
    for (k, v) in meta {
        if k.contains(['\n', ':']) || v.contains('\n') {
            return Err(Error::InvalidArgument(format!(
                "metadata entry {k:?} is not single-line"
            )));
        }
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

/// Splits leading `# key: value` lines from the CSV body.
pub fn split_metadata(text: &str) -> Result<(Metadata, &str)> {
    let mut meta = Vec::new();
    let mut rest = text;
    while let Some(line) = rest.strip_prefix('#') {
        let (line, tail) = line.split_once('\n').unwrap_or((line, ""));
        let line = line.trim_end_matches('\r');
        let (k, v) = line
            .trim_start()
            .split_once(": ")
            .or_else(|| line.trim_start().strip_suffix(':').map(|k| (k, "")))
            .ok_or_else(|| Error::Parse(format!("bad metadata line {line:?}")))?;
        meta.push((k.to_string(), v.to_string()));
        rest = tail;
    }
    Ok((meta, rest))
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

// ---------------------------------------------------------------- trajectory

/// Column names for a trajectory over `letters`.
pub fn trajectory_header(letters: &[char]) -> Vec<String> {
    let mut h: Vec<String> = ["step", "rank", "label", "letter"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(letters.iter().map(|c| format!("count_{c}")));
    if letters.len() == 2 {
        h.push("D".into());
        h.push("normalized_D".into());
    }
    h
}

pub fn write_trajectory_csv<W: Write>(mut out: W, meta: &Metadata, traj: &Trajectory) -> Result<()> {
    write_metadata(&mut out, meta)?;
    let letters = &traj.summary.letters;
    let mut w = csv_writer(out);
    w.write_record(trajectory_header(letters))?;
    for c in &traj.checkpoints {
        let mut rec = vec![
            c.step.to_string(),
            c.rank.to_string(),
            c.label.to_string(),
            c.letter.to_string(),
        ];
        rec.extend(c.counts.iter().map(|n| n.to_string()));
        if letters.len() == 2 {
            rec.push(cell(c.d));
            rec.push(cell(c.normalized_d));
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub step: u64,
    pub rank: u64,
    pub label: i64,
    pub letter: char,
    pub counts: Vec<u64>,
    pub d: Option<i64>,
    pub normalized_d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub meta: Metadata,
    pub letters: Vec<char>,
    pub rows: Vec<TrajectoryRow>,
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let s = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {name}")))?;
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {name} value {s:?} on line {}", line_of(rec))))
}

fn opt_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<Option<T>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(rec, i, name).map(Some),
    }
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_reader(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().from_reader(body.as_bytes())
}

pub fn read_trajectory_csv<R: Read>(mut input: R) -> Result<TrajectoryTable> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (meta, body) = split_metadata(&text)?;
    let mut r = csv_reader(body);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.len() < 6 || header[..4] != ["step", "rank", "label", "letter"] {
        return Err(Error::Parse("not a trajectory header".into()));
    }
    let letters: Vec<char> = header[4..]
        .iter()
        .take_while(|h| h.starts_with("count_"))
        .map(|h| {
            let mut cs = h["count_".len()..].chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Parse(format!("bad count column {h:?}"))),
            }
        })
        .collect::<Result<_>>()?;
    if letters.len() < 2 || trajectory_header(&letters) != header {
        return Err(Error::Parse("trajectory header does not match its letters".into()));
    }
    let m = letters.len();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let letter: String = field(&rec, 3, "letter")?;
        let mut lc = letter.chars();
        let letter = match (lc.next(), lc.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::Parse(format!("bad letter {letter:?}"))),
        };
        let counts = (0..m)
            .map(|i| field(&rec, 4 + i, &header[4 + i]))
            .collect::<Result<_>>()?;
        let (d, normalized_d) = if m == 2 {
            (opt_field(&rec, 6, "D")?, opt_field(&rec, 7, "normalized_D")?)
        } else {
            (None, None)
        };
        rows.push(TrajectoryRow {
            step: field(&rec, 0, "step")?,
            rank: field(&rec, 1, "rank")?,
            label: field(&rec, 2, "label")?,
            letter,
            counts,
            d,
            normalized_d,
        });
    }
    Ok(TrajectoryTable { meta, letters, rows })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

/// Internal consistency of a trajectory table.
pub fn validate_trajectory(t: &TrajectoryTable) -> Result<()> {
    let fail = |msg: String| Err(Error::Inconsistency(msg));
    let mut prev: Option<&TrajectoryRow> = None;
    for row in &t.rows {
        if !t.letters.contains(&row.letter) {
            return fail(format!("step {}: letter {} not in alphabet", row.step, row.letter));
        }
        if row.counts.iter().sum::<u64>() != row.step {
            return fail(format!("step {}: counts do not sum to the step", row.step));
        }
        if row.step == 0 || row.rank == 0 {
            return fail("steps and ranks start at 1".into());
        }
        if let Some(p) = prev {
            if row.step <= p.step || row.rank <= p.rank || row.counts.iter().zip(&p.counts).any(|(a, b)| a < b) {
                return fail(format!("step {}: rows are not increasing", row.step));
            }
            if row.step - p.step > row.rank - p.rank {
                return fail(format!("step {}: more primes than ranks", row.step));
            }
        }
        if t.letters.len() == 2 {
            let d = row.counts[0] as i64 - row.counts[1] as i64;
            if row.d != Some(d) {
                return fail(format!("step {}: D column disagrees with counts", row.step));
            }
            match (row.normalized_d, normalized(d, row.step)) {
                (Some(a), Some(b)) if close(a, b) => {}
                _ => return fail(format!("step {}: normalized_D disagrees", row.step)),
            }
        }
        prev = Some(row);
    }
    Ok(())
}

// ---------------------------------------------------------------- order table

pub const ORDER_TABLE_HEADER: [&str; 7] = ["k", "n", "count_A", "count_B", "D", "max_D", "ratio"];

pub fn write_order_table_csv<W: Write>(mut out: W, meta: &Metadata, rows: &[OrderRow]) -> Result<()> {
    write_metadata(&mut out, meta)?;
    let mut w = csv_writer(out);
    w.write_record(ORDER_TABLE_HEADER)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.n.to_string(),
            r.count_a.to_string(),
            r.count_b.to_string(),
            r.d.to_string(),
            r.max_d.to_string(),
            cell(r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_order_table_csv<R: Read>(mut input: R) -> Result<(Metadata, Vec<OrderRow>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (meta, body) = split_metadata(&text)?;
    let mut r = csv_reader(body);
    if r.headers()?.iter().ne(ORDER_TABLE_HEADER) {
        return Err(Error::Parse("not an order table header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(OrderRow {
            k: field(&rec, 0, "k")?,
            n: field(&rec, 1, "n")?,
            count_a: field(&rec, 2, "count_A")?,
            count_b: field(&rec, 3, "count_B")?,
            d: field(&rec, 4, "D")?,
            max_d: field(&rec, 5, "max_D")?,
            ratio: opt_field(&rec, 6, "ratio")?,
        });
    }
    Ok((meta, rows))
}

pub fn validate_order_table(rows: &[OrderRow]) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        let fail = |what: &str| Err(Error::Inconsistency(format!("order {}: {what}", r.k)));
        if r.k >= 64 || r.n != 1u64 << r.k {
            return fail("n is not 2^k");
        }
        if r.d != r.count_a as i64 - r.count_b as i64 {
            return fail("D disagrees with counts");
        }
        if r.max_d < r.d {
            return fail("max_D below D");
        }
        let ratio = (r.count_b > 0).then(|| r.count_a as f64 / r.count_b as f64);
        match (r.ratio, ratio) {
            (None, None) => {}
            (Some(a), Some(b)) if close(a, b) => {}
            _ => return fail("ratio disagrees with counts"),
        }
        if let Some(p) = i.checked_sub(1).map(|j| &rows[j]) {
            if r.k != p.k + 1 || r.count_a < p.count_a || r.count_b < p.count_b || r.max_d < p.max_d {
                return fail("rows are not consecutive and monotone");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- evidence and reports

fn json_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes JSON object rows as CSV, columns in the key order of the first row.
pub fn write_rows_csv<W: Write>(mut out: W, meta: &Metadata, rows: &[Value]) -> Result<()> {
    write_metadata(&mut out, meta)?;
    let mut w = csv_writer(out);
    let Some(first) = rows.first().and_then(Value::as_object) else {
        w.flush()?;
        return Ok(());
    };
    let columns: Vec<&String> = first.keys().collect();
    w.write_record(&columns)?;
    for row in rows {
        let obj = row
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("evidence row is not an object".into()))?;
        if obj.len() != columns.len() {
            return Err(Error::InvalidArgument("evidence rows have differing columns".into()));
        }
        let rec = columns
            .iter()
            .map(|c| {
                obj.get(*c)
                    .map(json_cell)
                    .ok_or_else(|| Error::InvalidArgument(format!("evidence row lacks column {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a generic CSV into header and string rows.
pub fn read_rows_csv<R: Read>(mut input: R) -> Result<(Metadata, Vec<String>, Vec<Vec<String>>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (meta, body) = split_metadata(&text)?;
    if body.trim().is_empty() {
        return Ok((meta, Vec::new(), Vec::new()));
    }
    let mut r = csv_reader(body);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(Error::from)
        })
        .collect::<Result<_>>()?;
    Ok((meta, header, rows))
}

pub fn write_report_json<W: Write>(mut out: W, report: &ConjectureReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Parses a report and checks that its verdict follows from its evidence.
pub fn read_report_json<R: Read>(input: R) -> Result<ConjectureReport> {
    let report: ConjectureReport = serde_json::from_reader(input)?;
    report.validate()?;
    Ok(report)
}

/// Kind of artifact recognized by [`validate_artifact`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Trajectory,
    OrderTable,
    Report,
    Csv,
    Json,
}

/// Recognizes and checks any file the tool writes.
pub fn validate_artifact(text: &str) -> Result<ArtifactKind> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let value: Value = serde_json::from_str(text)?;
        if value.get("verdict").is_some() && value.get("evidence").is_some() {
            read_report_json(text.as_bytes())?;
            return Ok(ArtifactKind::Report);
        }
        return Ok(ArtifactKind::Json);
    }
    let (_, body) = split_metadata(text)?;
    let first = body.lines().next().unwrap_or("");
    if first.starts_with("step,rank,label,letter,") {
        validate_trajectory(&read_trajectory_csv(text.as_bytes())?)?;
        Ok(ArtifactKind::Trajectory)
    } else if first == ORDER_TABLE_HEADER.join(",") {
        validate_order_table(&read_order_table_csv(text.as_bytes())?.1)?;
        Ok(ArtifactKind::OrderTable)
    } else {
        let (_, header, rows) = read_rows_csv(text.as_bytes())?;
        if rows.iter().any(|r| r.len() != header.len()) {
            return Err(Error::Parse("ragged CSV".into()));
        }
        Ok(ArtifactKind::Csv)
    }
}

/// Reads a whole file or stdin (`-`).
pub fn read_input(path: &str) -> Result<String> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().lock().read_to_string(&mut text)?;
    } else {
        std::fs::File::open(path)?.read_to_string(&mut text)?;
    }
    Ok(text)
}

/// Non-empty lines of a reader, for line-oriented formats.
pub fn lines<R: BufRead>(input: R) -> Result<Vec<String>> {
    input
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| l.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("2^20").unwrap(), 1 << 20);
        assert_eq!(parse_count("10^6").unwrap(), 1_000_000);
        assert_eq!(parse_count("1_000").unwrap(), 1000);
        assert_eq!(parse_count(" 17 ").unwrap(), 17);
        assert!(parse_count("2^64").is_err());
        assert!(parse_count("-1").is_err());
        assert!(parse_count("").is_err());
        assert!(parse_count("x^2").is_err());
        assert!(parse_count("+5").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_order_range("10..24").unwrap(), 10..=24);
        assert_eq!(parse_order_range("0..=0").unwrap(), 0..=0);
        assert_eq!(parse_order_range("7").unwrap(), 7..=7);
        assert!(parse_order_range("5..4").is_err());
        assert!(parse_order_range("-1..4").is_err());
        assert!(parse_order_range("a..b").is_err());
        assert_eq!(parse_int_range("-2..2").unwrap(), -2..=2);
        assert_eq!(parse_int_range("-5..-3").unwrap(), -5..=-3);
        assert_eq!(parse_int_range("-4").unwrap(), -4..=-4);
        assert!(parse_int_range("3..-3").is_err());
    }

    #[test]
    fn metadata_round_trip() {
        let meta: Metadata = vec![("tool".into(), "x 1.0".into()), ("empty".into(), "".into())];
        let mut out = Vec::new();
        write_metadata(&mut out, &meta).unwrap();
        out.extend_from_slice(b"a,b\n1,2\n");
        let text = String::from_utf8(out).unwrap();
        let (back, body) = split_metadata(&text).unwrap();
        assert_eq!(back, meta);
        assert_eq!(body, "a,b\n1,2\n");
        assert!(write_metadata(&mut Vec::new(), &vec![("a:b".into(), "c".into())]).is_err());
    }

    #[test]
    fn generic_rows() {
        let rows = vec![
            serde_json::json!({"a": 1, "b": null, "c": "x", "d": [1, 2]}),
            serde_json::json!({"a": 2, "b": 0.5, "c": "y", "d": []}),
        ];
        let mut out = Vec::new();
        write_rows_csv(&mut out, &Vec::new(), &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "a,b,c,d\n1,,x,\"[1,2]\"\n2,0.5,y,[]\n");
        let (_, header, body) = read_rows_csv(text.as_bytes()).unwrap();
        assert_eq!(header, ["a", "b", "c", "d"]);
        assert_eq!(body[0][3], "[1,2]");
        assert_eq!(validate_artifact(&text).unwrap(), ArtifactKind::Csv);
    }
}
