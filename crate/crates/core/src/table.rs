//! Fixed-format numeric output shared by the CSV writers.

/// Every float in CSV and JSON reports uses this format: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Minimal CSV builder; fields never contain separators, so no quoting is needed.
#[derive(Debug, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn with_header(cols: &[&str]) -> Self {
        let mut c = Csv::default();
        c.row(cols.iter().map(|s| s.to_string()));
        c
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let line: Vec<String> = fields.into_iter().collect();
        self.out.push_str(&line.join(","));
        self.out.push('\n');
    }

    pub fn comment(&mut self, text: &str) {
        self.out.push_str("# ");
        self.out.push_str(text);
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_format() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        let mut c = Csv::with_header(&["a", "b"]);
        c.row(vec!["1".into(), "2".into()]);
        c.comment("done");
        assert_eq!(c.finish(), "a,b\n1,2\n# done\n");
    }
}
