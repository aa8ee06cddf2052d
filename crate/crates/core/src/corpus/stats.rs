//! Corpus size aggregation per language.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::model::{Language, LaughterSegment, VideoRecord, Word};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub videos: usize,
    /// Exact summed duration; `hours` is derived from it.
    pub duration_s: f64,
    pub hours: f64,
    pub words: usize,
    pub laughter: usize,
}

impl StatsRow {
    fn finish(&mut self) {
        self.hours = (self.duration_s / 3600.0 * 10.0).round() / 10.0;
    }

    fn add(&mut self, other: &StatsRow) {
        self.videos += other.videos;
        self.duration_s += other.duration_s;
        self.words += other.words;
        self.laughter += other.laughter;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub languages: BTreeMap<Language, StatsRow>,
    pub total: StatsRow,
}

/// Checks that every word and laughter segment references a manifest video
/// and ends within that video's duration.
pub fn validate_references(
    manifest: &[VideoRecord],
    words: &[Word],
    laughter: &[LaughterSegment],
) -> Result<()> {
    let durations: HashMap<&str, f64> = manifest
        .iter()
        .map(|v| (v.video_id.as_str(), v.duration_s))
        .collect();
    let mut dangling = BTreeSet::new();
    let mut overrun = BTreeSet::new();
    let ends = words
        .iter()
        .map(|w| (w.video_id.as_str(), w.end_s))
        .chain(laughter.iter().map(|l| (l.video_id.as_str(), l.end_s)));
    for (id, end) in ends {
        match durations.get(id) {
            None => {
                dangling.insert(id.to_string());
            }
            Some(&d) if end > d + 1e-9 => {
                overrun.insert(id.to_string());
            }
            Some(_) => {}
        }
    }
    if !dangling.is_empty() {
        let ids: Vec<_> = dangling.into_iter().collect();
        return Err(Error::Validation(format!(
            "records reference video ids missing from the manifest: {}",
            ids.join(", ")
        )));
    }
    if !overrun.is_empty() {
        let ids: Vec<_> = overrun.into_iter().collect();
        return Err(Error::Validation(format!(
            "records end after the manifest duration of: {}",
            ids.join(", ")
        )));
    }
    Ok(())
}

pub fn corpus_stats(
    manifest: &[VideoRecord],
    words: &[Word],
    laughter: &[LaughterSegment],
) -> Result<StatsReport> {
    validate_references(manifest, words, laughter)?;
    let lang_of: HashMap<&str, Language> = manifest
        .iter()
        .map(|v| (v.video_id.as_str(), v.language))
        .collect();

    let mut rows: BTreeMap<Language, StatsRow> = BTreeMap::new();
    for v in manifest {
        let row = rows.entry(v.language).or_default();
        row.videos += 1;
        row.duration_s += v.duration_s;
    }
    for w in words {
        rows.entry(lang_of[w.video_id.as_str()]).or_default().words += 1;
    }
    for l in laughter {
        rows.entry(lang_of[l.video_id.as_str()]).or_default().laughter += 1;
    }

    let mut total = StatsRow::default();
    for row in rows.values_mut() {
        row.finish();
        total.add(row);
    }
    total.finish();
    Ok(StatsReport {
        languages: rows,
        total,
    })
}

impl StatsReport {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<8} {:>8} {:>8} {:>10} {:>9}",
            "language", "videos", "hours", "words", "laughter"
        );
        let mut line = |name: &str, r: &StatsRow| {
            let _ = writeln!(
                s,
                "{:<8} {:>8} {:>8.1} {:>10} {:>9}",
                name, r.videos, r.hours, r.words, r.laughter
            );
        };
        for (lang, row) in &self.languages {
            line(lang.code(), row);
        }
        line("total", &self.total);
        s
    }
}
