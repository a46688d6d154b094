//! Tabular results rendered as CSV or as an aligned text table.

use crate::CliError;

/// Digits kept for every floating point cell.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => f.write_str(&format_significant(*x)),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, in positional
/// notation for moderate exponents and scientific notation otherwise.
pub fn format_significant(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = mantissa.parse::<f64>().expect("mantissa") * 10f64.powi(exp);
    format!("{rounded:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form lines appended below the text table.
    pub notes: Vec<String>,
    /// Invariant violations; a nonempty list turns the exit code into 4.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer =
            csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Config(e.to_string());
        writer.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::to_string)).map_err(io)?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV cells are UTF-8"))
    }

    pub fn to_table(&self) -> String {
        let cells: Vec<Vec<String>> =
            self.rows.iter().map(|row| row.iter().map(Cell::to_string).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                cells
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain(std::iter::once(self.header[c].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: &[String]| {
            let padded: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        out += &(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n");
        for row in &cells {
            out += &line(row);
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for note in &self.notes {
                out += note;
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_significant(2.0 * std::f64::consts::SQRT_2), "2.82842712");
        assert_eq!(format_significant(0.5), "0.500000000");
        assert_eq!(format_significant(12.0), "12.0000000");
        assert_eq!(format_significant(9.9999999999), "10.0000000");
        assert_eq!(format_significant(-0.001234567891), "-0.00123456789");
        assert_eq!(format_significant(1.5e-9), "1.50000000e-9");
        assert_eq!(format_significant(0.0), "0");
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let mut r = Report::new(["k", "s_value", "violated"]);
        r.push(vec![1usize.into(), 2.0.into(), true.into()]);
        assert_eq!(r.to_csv().unwrap(), "k,s_value,violated\n1,2.00000000,true\n");
    }

    #[test]
    fn table_aligns_columns() {
        let mut r = Report::new(["k", "value"]);
        r.push(vec![10usize.into(), Cell::text("x")]);
        let t = r.to_table();
        assert!(t.starts_with(" k  value\n--  -----\n10      x\n"));
    }
}
