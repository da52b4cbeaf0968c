//! CSV artifacts.
//!
//! Every CSV file opens with one comment line, `# fpl <version> <command>
//! <params as JSON>`, followed by a header row. Plot files use the columns
//! `x,y,series`.

use crate::record::ResultRecord;

fn echo_line(rec: &ResultRecord) -> String {
    let params = serde_json::to_string(&rec.params).expect("params serialize");
    format!("# fpl {} {} {params}\n", rec.version, rec.command)
}

fn render_rows(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields.to_vec());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, rec: &ResultRecord) -> String {
        echo_line(rec) + &render_rows(&self.header, &self.rows)
    }
}

/// Points keyed for `(x, y, series)` plotting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotSeries {
    pub points: Vec<(f64, f64, String)>,
}

impl PlotSeries {
    pub fn push(&mut self, x: f64, y: f64, series: &str) {
        self.points.push((x, y, series.to_string()));
    }

    pub fn render(&self, rec: &ResultRecord) -> String {
        let header = ["x", "y", "series"].map(String::from);
        let rows: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|(x, y, s)| vec![x.to_string(), y.to_string(), s.clone()])
            .collect();
        echo_line(rec) + &render_rows(&header, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_then_header() {
        let mut rec = ResultRecord::new("bv", serde_json::Map::new());
        rec.params.insert("X".into(), 10.into());
        let mut c = Csv::new(&["q", "deviation"]);
        c.row(&["1".into(), "0.5".into()]);
        let text = c.render(&rec);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            format!("# fpl {} bv {{\"X\":10}}", crate::record::VERSION)
        );
        assert_eq!(&lines[1..], ["q,deviation", "1,0.5"]);
        let mut p = PlotSeries::default();
        p.push(1.0, 2.5, "a,b");
        assert!(p.render(&rec).ends_with("x,y,series\n1,2.5,\"a,b\"\n"));
    }
}
