//! Report schema shared by all subcommands, and its json/csv/md renderings.

use serde::Serialize;
use serde_json::{Map, Value};

/// Bumped whenever a field is renamed or its meaning changes.
pub const REPORT_SCHEMA: &str = "qsphere-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Expected and obtained values, so a failure carries its own diff.
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: Value) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub job: String,
    pub config: Value,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub result: Value,
}

impl Report {
    pub fn new(job: &str, config: Value, checks: Vec<Check>, result: Value) -> Self {
        Report {
            schema: REPORT_SCHEMA,
            job: job.to_string(),
            config,
            passed: checks.iter().all(|c| c.passed),
            checks,
            result,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Md => self.to_markdown(),
        }
    }

    fn rows(&self) -> Vec<(String, String, String)> {
        let mut rows = vec![
            ("report".into(), "schema".into(), self.schema.into()),
            ("report".into(), "job".into(), self.job.clone()),
            ("report".into(), "passed".into(), self.passed.to_string()),
        ];
        flatten("config", "", &self.config, &mut rows);
        for c in &self.checks {
            rows.push((
                "check".into(),
                c.name.clone(),
                if c.passed { "pass" } else { "FAIL" }.into(),
            ));
        }
        flatten("result", "", &self.result, &mut rows);
        rows
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "key", "value"])
            .expect("in-memory write");
        for (a, b, c) in self.rows() {
            w.write_record([a, b, c]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
    }

    fn to_markdown(&self) -> String {
        let mut out = format!(
            "# {} ({})\n\nOverall: **{}**\n\n",
            self.job,
            self.schema,
            if self.passed { "pass" } else { "FAIL" }
        );
        out.push_str("| check | status | detail |\n|---|---|---|\n");
        for c in &self.checks {
            out.push_str(&format!(
                "| {} | {} | `{}` |\n",
                escape_md(&c.name),
                if c.passed { "pass" } else { "FAIL" },
                escape_md(&c.detail.to_string())
            ));
        }
        out.push_str("\n| key | value |\n|---|---|\n");
        for (section, key, value) in self.rows() {
            if section == "check" || section == "report" {
                continue;
            }
            out.push_str(&format!(
                "| {section}.{} | {} |\n",
                escape_md(&key),
                escape_md(&value)
            ));
        }
        out
    }
}

fn escape_md(s: &str) -> String {
    s.replace('|', "\\|")
}

fn flatten(section: &str, prefix: &str, v: &Value, out: &mut Vec<(String, String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(section, &join(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(section, &join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((section.into(), prefix.into(), s.clone())),
        Value::Null => out.push((section.into(), prefix.into(), String::new())),
        other => out.push((section.into(), prefix.into(), other.to_string())),
    }
}

/// Builds a JSON object from `(key, value)` pairs in the given order.
pub fn object<I, K>(pairs: I) -> Value
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.into(), v);
    }
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report::new(
            "demo",
            json!({"q": "1/2"}),
            vec![
                Check::new("ok", true, json!({"got": 1})),
                Check::new("bad", false, json!(null)),
            ],
            json!({"values": [1.5, "x|y"], "nested": {"a": true}}),
        )
    }

    #[test]
    fn overall_status_follows_checks() {
        assert!(!sample().passed);
        assert!(Report::new("x", json!({}), vec![], json!({})).passed);
    }

    #[test]
    fn csv_flattens_paths() {
        let csv = sample().render(Format::Csv);
        assert!(csv.starts_with("section,key,value\n"));
        assert!(csv.contains("result,values.0,1.5\n"));
        assert!(csv.contains("result,nested.a,true\n"));
        assert!(csv.contains("check,bad,FAIL\n"));
    }

    #[test]
    fn markdown_escapes_pipes() {
        let md = sample().render(Format::Md);
        assert!(md.contains("x\\|y"));
        assert!(md.contains("Overall: **FAIL**"));
    }
}
