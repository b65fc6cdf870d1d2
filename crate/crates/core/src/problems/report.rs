use serde::{Deserialize, Serialize};

use crate::template::TemplateKind;

/// Outcome of one synthesis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub solved: bool,
    pub generations: usize,
    /// Wall-clock time; excluded from output unless timing is requested.
    pub seconds: f64,
    #[serde(with = "template_name")]
    pub template: TemplateKind,
    pub train_error: f64,
    pub validation_error: Option<f64>,
    /// The best genome in genome-file format.
    pub genome: String,
}

mod template_name {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::template::TemplateKind;

    pub fn serialize<S: Serializer>(k: &TemplateKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(k.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<TemplateKind, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: String,
    pub runs: usize,
    pub successes: usize,
    pub records: Vec<RunRecord>,
}

/// Column order of the CSV report. `seconds` is appended when timing is on.
pub const CSV_COLUMNS: [&str; 4] = ["problem", "seed", "solved", "generations"];

impl RunReport {
    pub fn new(problem: &str, records: Vec<RunRecord>) -> Self {
        RunReport {
            problem: problem.to_string(),
            runs: records.len(),
            successes: records.iter().filter(|r| r.solved).count(),
            records,
        }
    }

    fn write_csv(&self, timing: bool, header: bool) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let mut cols: Vec<&str> = CSV_COLUMNS.to_vec();
        if timing {
            cols.push("seconds");
        }
        if header {
            w.write_record(&cols).expect("in-memory write");
        }
        for r in &self.records {
            let mut row =
                vec![self.problem.clone(), r.seed.to_string(), r.solved.to_string(), r.generations.to_string()];
            if timing {
                row.push(format!("{:.3}", r.seconds));
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// CSV rows without the header, for appending to an existing report.
    pub fn csv_rows(&self, timing: bool) -> String {
        self.write_csv(timing, false)
    }

    pub fn to_csv(&self, timing: bool) -> String {
        self.write_csv(timing, true)
    }

    /// Pretty JSON mirror of the report, including rendered genomes.
    pub fn to_json(&self, timing: bool) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !timing {
            if let Some(records) = v.get_mut("records").and_then(|r| r.as_array_mut()) {
                for r in records {
                    if let Some(obj) = r.as_object_mut() {
                        obj.remove("seconds");
                    }
                }
            }
        }
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}
