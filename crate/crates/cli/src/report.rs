//! Report records and their text and jsonl renderings.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Value,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Value => "VALUE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub kind: String,
    pub verdict: Verdict,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checked: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<u64>,
}

impl Record {
    /// `RESULT <id> PASS|FAIL|VALUE <payload>`.
    pub fn text_line(&self) -> String {
        let mut s = format!("RESULT {} {}", self.id, self.verdict.as_str());
        if !self.value.is_empty() {
            s.push(' ');
            s.push_str(&self.value);
        }
        if let Some(e) = &self.expected {
            s.push_str(&format!(" expected={e}"));
        }
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness={w}"));
        }
        if let Some(n) = self.checked {
            s.push_str(&format!(" checked={n}"));
        }
        if let Some(t) = self.time_ms {
            s.push_str(&format!(" time_ms={t}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    /// Suites in first-run order with their descriptions.
    pub suites: Vec<(String, String)>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| r.verdict == Verdict::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# scenario {}\n# seed {}\n", self.scenario, self.seed);
        for (name, description) in &self.suites {
            out.push_str(&format!("# suite {name}: {description}\n"));
        }
        for r in &self.records {
            out.push_str(&r.text_line());
            out.push('\n');
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_and_json_agree() {
        let r = Record {
            id: "q".into(),
            kind: "forces".into(),
            verdict: Verdict::Value,
            value: "refuted".into(),
            witness: Some("a".into()),
            expected: None,
            checked: None,
            time_ms: None,
        };
        assert_eq!(r.text_line(), "RESULT q VALUE refuted witness=a");
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"verdict\":\"VALUE\""));
        let back: Record = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
