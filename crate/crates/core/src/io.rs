//! Plain-text output helpers shared by the report writers.

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Minimal CSV writer: header on construction, comma-separated rows.
#[derive(Debug, Clone)]
pub struct Csv {
    out: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { out: format!("{}\n", header.join(",")), columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "CSV row width must match the header");
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
