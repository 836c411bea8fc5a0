//! CSV event input.
//!
//! Rows are `score,label` with label `0` or `1` (`1` = positive). Lines
//! starting with `#` are skipped, as is a leading header row.

use std::io::Read;

use csv::{ReaderBuilder, StringRecord, StringRecordsIntoIter, Trim};

use super::CliError;
use crate::model::{Label, LabeledScore};

pub struct EventReader<R: Read> {
    records: StringRecordsIntoIter<R>,
    seen_data: bool,
}

impl<R: Read> EventReader<R> {
    pub fn new(input: R) -> Self {
        let reader = ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(Trim::All)
            .flexible(true)
            .from_reader(input);
        EventReader {
            records: reader.into_records(),
            seen_data: false,
        }
    }
}

fn parse_record(record: &StringRecord) -> Result<LabeledScore, String> {
    if record.len() != 2 {
        return Err(format!("expected 2 fields, found {}", record.len()));
    }
    let score: f64 = record[0]
        .parse()
        .map_err(|_| format!("invalid score {:?}", &record[0]))?;
    let label = match &record[1] {
        "0" => Label::Negative,
        "1" => Label::Positive,
        other => return Err(format!("invalid label {other:?}, expected 0 or 1")),
    };
    LabeledScore::new(score, label).map_err(|e| e.to_string())
}

fn looks_like_header(record: &StringRecord) -> bool {
    record.len() == 2 && record[0].parse::<f64>().is_err() && !matches!(&record[1], "0" | "1")
}

impl<R: Read> Iterator for EventReader<R> {
    type Item = Result<LabeledScore, CliError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let record = match self.records.next()? {
                Ok(r) => r,
                Err(e) => {
                    let row = e.position().map_or(0, |p| p.line());
                    return Some(Err(match e.kind() {
                        csv::ErrorKind::Io(_) => CliError::Io(e.to_string()),
                        _ => CliError::Malformed {
                            row,
                            message: e.to_string(),
                        },
                    }));
                }
            };
            let row = record.position().map_or(0, |p| p.line());
            if !self.seen_data {
                self.seen_data = true;
                if looks_like_header(&record) {
                    continue;
                }
            }
            return Some(parse_record(&record).map_err(|message| CliError::Malformed { row, message }));
        }
    }
}

/// Reads a whole stream into memory.
pub fn read_events<R: Read>(input: R) -> Result<Vec<LabeledScore>, CliError> {
    EventReader::new(input).collect()
}
