//! CSV output with fixed 12-significant-digit floats.

use crate::CliError;

/// Formats like C's `%.12g`.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can push the exponent up (9.99999999999951 → 10)
    let sci = format!("{:.11e}", x);
    let exp_actual: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(exp);
    if (-5..12).contains(&exp_actual) {
        let decimals = (11 - exp_actual).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let (mantissa, e) = sci.split_once('e').expect("scientific format");
        let e: i32 = e.parse().expect("exponent");
        format!("{}e{}{:02}", trim_zeros(mantissa.to_owned()), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => fmt_sig12(*f),
        }
    }
}

pub fn write_csv(header: &[&str], rows: &[Vec<Cell>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Parses a CSV produced by [`write_csv`] and writes it back out.
pub fn reserialize(text: &str) -> Result<String, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(r.headers()?)?;
    for rec in r.records() {
        let rec = rec?;
        // parse every field as a number to make sure the text is what we think it is
        for field in rec.iter() {
            field
                .parse::<f64>()
                .map_err(|e| CliError::Io(format!("non-numeric field '{field}': {e}")))?;
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}
