//! CSV emission and re-parsing for the sweep, comparison, and delayed-trace
//! outputs.
//!
//! Format: UTF-8, comma-separated, exactly one header row, full double
//! precision (17 significant digits, `1.2345678901234567e0` style, which
//! round-trips bitwise). Leading lines of the form `# key = value` carry
//! run metadata (located reference detuning, model, cutoff, …); every plot
//! is rendered from the parsed CSV alone, so these lines are the only place
//! run context lives. Failed points leave their numeric cells empty (parsed
//! back as NaN) and describe the failure in the trailing `error` column.

use std::collections::BTreeMap;

use crate::run::{CompareRow, SweepPoint};

/// Formats a float with 17 significant digits; round-trips bitwise through
/// `str::parse::<f64>()`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A numeric CSV cell: empty for NaN (failed points), [`fmt17`] otherwise.
fn cell(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        fmt17(x)
    }
}

/// Error text made safe for a comma-separated cell.
fn error_cell(e: &Option<String>) -> String {
    match e {
        None => String::new(),
        Some(msg) => msg.replace([',', '\n', '\r'], ";"),
    }
}

fn parse_cell(raw: &str) -> Result<f64, String> {
    if raw.is_empty() {
        return Ok(f64::NAN);
    }
    raw.parse::<f64>().map_err(|_| format!("bad numeric cell `{raw}`"))
}

fn parse_error_cell(raw: &str) -> Option<String> {
    if raw.is_empty() {
        None
    } else {
        Some(raw.to_owned())
    }
}

/// Run metadata carried in leading `# key = value` lines.
pub type Metadata = BTreeMap<String, String>;

fn write_metadata(out: &mut String, meta: &[(&str, String)]) {
    for (k, v) in meta {
        out.push_str("# ");
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
}

/// Metadata, header fields, and data rows of a parsed CSV file.
type SplitCsv<'a> = (Metadata, Vec<&'a str>, Vec<Vec<&'a str>>);

/// Splits CSV text into metadata, the header row, and data rows.
fn split_csv(text: &str) -> Result<SplitCsv<'_>, String> {
    let mut meta = Metadata::new();
    let mut header: Option<Vec<&str>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.insert(k.trim().to_owned(), v.trim().to_owned());
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if header.is_none() {
            header = Some(fields);
        } else {
            rows.push(fields);
        }
    }
    let header = header.ok_or("missing header row")?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                row.len(),
                header.len()
            ));
        }
    }
    Ok((meta, header, rows))
}

fn expect_header(got: &[&str], want: &[&str]) -> Result<(), String> {
    if got != want {
        return Err(format!(
            "unexpected header `{}` (expected `{}`)",
            got.join(","),
            want.join(",")
        ));
    }
    Ok(())
}

pub const SWEEP_HEADER: [&str; 8] = [
    "theta",
    "delta_c",
    "n_ss",
    "pairs_ss",
    "g2_numeric",
    "g2_perturbative",
    "residual",
    "error",
];

/// Renders a `g²(0)` sweep as CSV text.
pub fn write_sweep_csv(meta: &[(&str, String)], rows: &[SweepPoint]) -> String {
    let mut out = String::new();
    write_metadata(&mut out, meta);
    out.push_str(&SWEEP_HEADER.join(","));
    out.push('\n');
    for r in rows {
        let fields = [
            cell(r.theta),
            cell(r.delta_c),
            cell(r.n_ss),
            cell(r.pairs_ss),
            cell(r.g2_numeric),
            cell(r.g2_perturbative),
            cell(r.residual),
            error_cell(&r.error),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses sweep CSV text back into metadata and rows.
pub fn parse_sweep_csv(text: &str) -> Result<(Metadata, Vec<SweepPoint>), String> {
    let (meta, header, raw_rows) = split_csv(text)?;
    expect_header(&header, &SWEEP_HEADER)?;
    let mut rows = Vec::with_capacity(raw_rows.len());
    for f in raw_rows {
        rows.push(SweepPoint {
            theta: parse_cell(f[0])?,
            delta_c: parse_cell(f[1])?,
            n_ss: parse_cell(f[2])?,
            pairs_ss: parse_cell(f[3])?,
            g2_numeric: parse_cell(f[4])?,
            g2_perturbative: parse_cell(f[5])?,
            residual: parse_cell(f[6])?,
            error: parse_error_cell(f[7]),
        });
    }
    Ok((meta, rows))
}

pub const COMPARE_HEADER: [&str; 6] = [
    "theta",
    "delta_c",
    "g2_spin",
    "g2_boson_kbar",
    "g2_boson_kbarprime",
    "error",
];

/// Renders a model-comparison sweep as CSV text.
pub fn write_compare_csv(meta: &[(&str, String)], rows: &[CompareRow]) -> String {
    let mut out = String::new();
    write_metadata(&mut out, meta);
    out.push_str(&COMPARE_HEADER.join(","));
    out.push('\n');
    for r in rows {
        let fields = [
            cell(r.theta),
            cell(r.delta_c),
            cell(r.g2_spin),
            cell(r.g2_boson_kbar),
            cell(r.g2_boson_kbarprime),
            error_cell(&r.error),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses comparison CSV text back into metadata and rows.
pub fn parse_compare_csv(text: &str) -> Result<(Metadata, Vec<CompareRow>), String> {
    let (meta, header, raw_rows) = split_csv(text)?;
    expect_header(&header, &COMPARE_HEADER)?;
    let mut rows = Vec::with_capacity(raw_rows.len());
    for f in raw_rows {
        rows.push(CompareRow {
            theta: parse_cell(f[0])?,
            delta_c: parse_cell(f[1])?,
            g2_spin: parse_cell(f[2])?,
            g2_boson_kbar: parse_cell(f[3])?,
            g2_boson_kbarprime: parse_cell(f[4])?,
            error: parse_error_cell(f[5]),
        });
    }
    Ok((meta, rows))
}

pub const TAU_HEADER: [&str; 2] = ["tau", "g2"];

/// Renders a delayed-correlation trace as CSV text.
pub fn write_tau_csv(meta: &[(&str, String)], taus: &[f64], values: &[f64]) -> String {
    let mut out = String::new();
    write_metadata(&mut out, meta);
    out.push_str(&TAU_HEADER.join(","));
    out.push('\n');
    for (t, v) in taus.iter().zip(values) {
        out.push_str(&cell(*t));
        out.push(',');
        out.push_str(&cell(*v));
        out.push('\n');
    }
    out
}

/// Parses trace CSV text back into metadata and `(τ, g²)` columns.
pub fn parse_tau_csv(text: &str) -> Result<(Metadata, Vec<f64>, Vec<f64>), String> {
    let (meta, header, raw_rows) = split_csv(text)?;
    expect_header(&header, &TAU_HEADER)?;
    let mut taus = Vec::with_capacity(raw_rows.len());
    let mut values = Vec::with_capacity(raw_rows.len());
    for f in raw_rows {
        taus.push(parse_cell(f[0])?);
        values.push(parse_cell(f[1])?);
    }
    Ok((meta, taus, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<SweepPoint> {
        vec![
            SweepPoint {
                theta: -8.0,
                delta_c: -14.142,
                n_ss: 1.25e-7,
                pairs_ss: 3.5e-15,
                g2_numeric: 0.224,
                g2_perturbative: 0.2241,
                residual: 1e-16,
                error: None,
            },
            SweepPoint {
                theta: -7.95,
                delta_c: -14.092,
                n_ss: f64::NAN,
                pairs_ss: f64::NAN,
                g2_numeric: f64::NAN,
                g2_perturbative: f64::NAN,
                residual: f64::NAN,
                error: Some("solver broke, badly".into()),
            },
        ]
    }

    #[test]
    fn seventeen_digit_cells_round_trip_bitwise() {
        for x in [
            0.1 + 0.2,
            -6.142336789012345,
            1.0 / 3.0,
            6.02e23,
            -0.0,
            f64::MIN_POSITIVE,
        ] {
            let parsed: f64 = fmt17(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn sweep_csv_round_trips_including_failures() {
        let meta = [("model", "spin".to_owned()), ("cutoff", "6".to_owned())];
        let text = write_sweep_csv(&meta, &sample_rows());
        let (m, rows) = parse_sweep_csv(&text).unwrap();
        assert_eq!(m.get("model").unwrap(), "spin");
        assert_eq!(m.get("cutoff").unwrap(), "6");
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].g2_numeric, 0.224);
        assert!(rows[1].n_ss.is_nan());
        // Commas in failure text are sanitized so the column count is stable.
        assert_eq!(rows[1].error.as_deref(), Some("solver broke; badly"));
    }

    #[test]
    fn tau_csv_round_trips_with_metadata() {
        let meta = [
            ("theta", fmt17(-4.9)),
            ("predicted_oscillation_period", fmt17(1.73)),
        ];
        let text = write_tau_csv(&meta, &[0.0, 0.5, 1.0], &[0.2, 1.4, 0.9]);
        let (m, taus, values) = parse_tau_csv(&text).unwrap();
        let period: f64 = m.get("predicted_oscillation_period").unwrap().parse().unwrap();
        assert_eq!(period, 1.73);
        assert_eq!(taus, vec![0.0, 0.5, 1.0]);
        assert_eq!(values, vec![0.2, 1.4, 0.9]);
    }

    #[test]
    fn unexpected_headers_are_rejected() {
        assert!(parse_sweep_csv("a,b\n1,2\n").is_err());
        assert!(parse_tau_csv("tau,g2,extra\n1,2,3\n").is_err());
        assert!(parse_sweep_csv("").is_err());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let text = format!("{}\n1,2\n", SWEEP_HEADER.join(","));
        assert!(parse_sweep_csv(&text).is_err());
    }
}
