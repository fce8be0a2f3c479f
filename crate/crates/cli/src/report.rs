//! Text and CSV rendering.

use su11::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
}

/// Formats with 12 significant digits in the style of C's `%.12g`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), num)
}

pub fn complex(z: C64) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
    }
}

/// Rounds to the value that [`num`] prints, so printed and evaluated agree.
pub fn snap(v: f64) -> f64 {
    num(v).parse().unwrap_or(v)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Fields(Vec<(String, String)>),
    Table { header: Vec<String>, rows: Vec<Vec<String>> },
    /// Free text; table output only.
    Note(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn fields(&mut self, f: Vec<(&str, String)>) {
        self.sections.push(Section::Fields(f.into_iter().map(|(k, v)| (k.to_string(), v)).collect()));
    }

    pub fn table(&mut self, header: Vec<String>, rows: Vec<Vec<String>>) {
        self.sections.push(Section::Table { header, rows });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.sections.push(Section::Note(s.into()));
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut blocks: Vec<String> = Vec::new();
        for s in &self.sections {
            let block = match (s, format) {
                (Section::Fields(f), OutputFormat::Table) => {
                    let w = f.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                    f.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
                }
                (Section::Fields(f), OutputFormat::Csv) => {
                    let mut out = String::from("key,value\n");
                    for (k, v) in f {
                        out.push_str(&format!("{},{}\n", csv_cell(k), csv_cell(v)));
                    }
                    out
                }
                (Section::Table { header, rows }, OutputFormat::Table) => aligned(header, rows),
                (Section::Table { header, rows }, OutputFormat::Csv) => {
                    let line = |r: &[String]| r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",") + "\n";
                    std::iter::once(line(header)).chain(rows.iter().map(|r| line(r))).collect()
                }
                (Section::Note(n), OutputFormat::Table) => format!("{n}\n"),
                (Section::Note(_), OutputFormat::Csv) => continue,
            };
            blocks.push(block);
        }
        blocks.join("\n")
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).chain([header[c].chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |r: &[String]| {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        cells.join("  ") + "\n"
    };
    std::iter::once(line(header)).chain(rows.iter().map(|r| line(r))).collect()
}
