//! Named numeric series emitted by the analyses, serializable to JSON and
//! plot-ready CSV.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub n: u64,
    /// None marks an undefined value (e.g. a zero-denominator ratio).
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub values: Vec<Point>,
}

impl Series {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            values: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, n: u64, value: Option<f64>) {
        self.values.push(Point { n, value });
    }

    fn qualified_name(&self) -> String {
        if self.params.is_empty() {
            return self.name.clone();
        }
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}[{}]", self.name, params.join(","))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub schema_version: String,
    pub series: Vec<Series>,
}

impl StatReport {
    pub fn new(series: Vec<Series>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            series,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per (n, name, value); undefined values print as NaN.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "n,name,value")?;
        for series in &self.series {
            let name = csv_quote(&series.qualified_name());
            for point in &series.values {
                match point.value {
                    Some(v) => writeln!(out, "{},{},{}", point.n, name, v)?,
                    None => writeln!(out, "{},{},NaN", point.n, name)?,
                }
            }
        }
        Ok(())
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_block_names() {
        let mut series = Series::new("ratio").with_param("block", "(0,1)");
        series.push(100, Some(1.0));
        series.push(200, None);
        let report = StatReport::new(vec![series]);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,name,value\n100,\"ratio[block=(0,1)]\",1\n200,\"ratio[block=(0,1)]\",NaN\n"
        );
    }

    #[test]
    fn json_has_schema_version() {
        let report = StatReport::new(vec![]);
        assert!(report.to_json().contains("\"schema_version\": \"1\""));
    }
}
