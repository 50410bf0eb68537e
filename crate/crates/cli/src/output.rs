//! Tables rendered as CSV or as a single JSON object.

use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Num(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::UInt(x)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// 15 significant digits, shortest of fixed and exponent forms, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.14e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let e: i32 = exp.parse().unwrap();
    if (-5..15).contains(&e) {
        let decimals = (14 - e).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mant.to_string()), e)
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::UInt(u) => u.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::UInt(u) => json!(u),
            Cell::Num(x) => {
                let r: f64 = fmt_num(*x).parse().unwrap_or(*x);
                serde_json::Number::from_f64(r)
                    .map(Value::Number)
                    .unwrap_or(Value::String(fmt_num(*x)))
            }
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, command: &str) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (h, c) in self.header.iter().zip(r) {
                    m.insert((*h).to_string(), c.json());
                }
                Value::Object(m)
            })
            .collect();
        let v = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "columns": self.header,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&v).unwrap();
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(17.0 / 35.0), "0.485714285714286");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666666667");
        assert_eq!(fmt_num(-0.25), "-0.25");
        assert_eq!(fmt_num(1.5e-9), "1.5e-9");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(0.0), "0");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Int(3), Cell::Num(0.5)]);
        assert_eq!(t.to_csv(), "a,b\n3,0.5\n");
        t.push(vec!["x,y".into(), Cell::Empty]);
        assert!(t.to_csv().ends_with("\"x,y\",\n"));
        let v: Value = serde_json::from_str(&t.to_json("x")).unwrap();
        assert_eq!(v["schema_version"], json!(1));
        assert_eq!(v["rows"][0]["b"], json!(0.5));
    }
}
