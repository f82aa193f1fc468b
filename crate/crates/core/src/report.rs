//! Deterministic text and JSON reports.
//!
//! Numbers are printed with 12 significant digits; values below `1e-12` in
//! magnitude print as `0`, so `-0` never appears.

use serde::Serialize;

use crate::statevec::Amplitude;

const SIGNIFICANT_DIGITS: usize = 12;
const ZERO_SNAP: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub sections: Vec<Section>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Note {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub notes: Vec<Note>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            ..Section::default()
        }
    }

    pub fn note(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.notes.push(Note {
            key: key.into(),
            value: value.into(),
        });
        self
    }

    pub fn columns<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.columns = names.into_iter().map(Into::into).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn note_value(&self, key: &str) -> Option<&str> {
        self.notes
            .iter()
            .find(|n| n.key == key)
            .map(|n| n.value.as_str())
    }

    fn render(&self, out: &mut String) {
        out.push_str("== ");
        out.push_str(&self.title);
        out.push_str(" ==\n");
        for n in &self.notes {
            out.push_str(&n.key);
            out.push_str(": ");
            out.push_str(&n.value);
            out.push('\n');
        }
        if self.columns.is_empty() {
            return;
        }
        let ncols = self
            .rows
            .iter()
            .map(Vec::len)
            .chain(std::iter::once(self.columns.len()))
            .max()
            .unwrap_or(0);
        let mut widths = vec![0usize; ncols];
        for line in std::iter::once(&self.columns).chain(&self.rows) {
            for (i, cell) in line.iter().enumerate() {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        for line in std::iter::once(&self.columns).chain(&self.rows) {
            let mut text = String::new();
            for (i, cell) in line.iter().enumerate() {
                if i > 0 {
                    text.push_str("  ");
                }
                text.push_str(cell);
                let pad = widths[i] - cell.chars().count();
                text.extend(std::iter::repeat_n(' ', pad));
            }
            out.push_str(text.trim_end());
            out.push('\n');
        }
    }
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    /// Sections separated by one blank line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            s.render(&mut out);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// `x` with 12 significant digits, trailing zeros removed.
///
/// Magnitudes in `[1e-5, 1e12)` print positionally, others in exponent form
/// such as `1.5e-7`.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < ZERO_SNAP {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `a`, `bi`, `a+bi` or `a-bi`, each part through [`format_real`].
pub fn format_complex(z: Amplitude) -> String {
    let re = format_real(z.re);
    let im = format_real(z.im.abs());
    if im == "0" {
        return re;
    }
    let neg = z.im < 0.0;
    if re == "0" {
        return if neg {
            format!("-{im}i")
        } else {
            format!("{im}i")
        };
    }
    format!("{re}{}{im}i", if neg { '-' } else { '+' })
}
