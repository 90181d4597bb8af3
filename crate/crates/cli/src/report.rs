use std::io::Write;

use serde::Serialize;

use crate::{CliError, CliResult, ReportFormat};

/// Outcome of one `match-*` run, with everything needed to repeat it.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub engine: String,
    pub inputs: Vec<String>,
    pub answer: bool,
    /// Reported end positions; text engines only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ends: Option<Vec<usize>>,
    pub seed: u64,
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub double: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tracks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit_gates: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gates: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    pub reproduce: String,
}

impl Report {
    pub fn new(command: &str, engine: &str, inputs: Vec<String>, seed: u64) -> Report {
        Report {
            command: command.into(),
            engine: engine.into(),
            inputs,
            answer: false,
            ends: None,
            seed,
            rng: smlg_core::rng::RNG_NAME.into(),
            c: None,
            k_range: None,
            double: None,
            pad: None,
            tracks: None,
            marked: None,
            rounds: None,
            circuit_gates: None,
            gates: None,
            invariants: None,
            wall_ms: None,
            reproduce: String::new(),
        }
    }

    /// `yes` followed by the end positions, or `no`.
    pub fn answer_line(&self) -> String {
        let mut line = String::from(if self.answer { "yes" } else { "no" });
        for e in self.ends.iter().flatten() {
            line.push(' ');
            line.push_str(&e.to_string());
        }
        line
    }

    pub fn write(&self, format: ReportFormat, out: &mut dyn Write) -> CliResult<()> {
        let io = |e: std::io::Error| CliError::io(format!("writing report: {e}"));
        match format {
            ReportFormat::Json => {
                let s = serde_json::to_string_pretty(self)
                    .map_err(|e| CliError::io(format!("encoding report: {e}")))?;
                writeln!(out, "{s}").map_err(io)
            }
            ReportFormat::Human => {
                writeln!(out, "{}", self.answer_line()).map_err(io)?;
                let value = serde_json::to_value(self)
                    .map_err(|e| CliError::io(format!("encoding report: {e}")))?;
                if let serde_json::Value::Object(map) = value {
                    for (k, v) in map {
                        if matches!(k.as_str(), "answer" | "ends") {
                            continue;
                        }
                        let v = match v {
                            serde_json::Value::String(s) => s,
                            serde_json::Value::Array(a) => a
                                .iter()
                                .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                                .collect::<Vec<_>>()
                                .join(" "),
                            other => other.to_string(),
                        };
                        writeln!(out, "{k}: {v}").map_err(io)?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answer_line_lists_ends() {
        let mut r = Report::new("match-text", "naive", vec![], 0);
        assert_eq!(r.answer_line(), "no");
        r.answer = true;
        r.ends = Some(vec![3, 8]);
        assert_eq!(r.answer_line(), "yes 3 8");
    }

    #[test]
    fn human_report_skips_unset_fields() {
        let mut r = Report::new("match-dag", "dp", vec!["g".into(), "p".into()], 9);
        r.answer = true;
        let mut buf = Vec::new();
        r.write(ReportFormat::Human, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("yes\n"));
        assert!(s.contains("inputs: g p\n"));
        assert!(s.contains("seed: 9\n"));
        assert!(!s.contains("gates"));
        assert!(!s.contains("answer"));
    }

    #[test]
    fn json_report_round_trips_fields() {
        let mut r = Report::new("match-dag", "quantum-sim", vec![], 1);
        r.gates = Some(40);
        let mut buf = Vec::new();
        r.write(ReportFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["gates"], 40);
        assert_eq!(v["rng"], smlg_core::rng::RNG_NAME);
        assert!(v.get("wall_ms").is_none());
    }
}
