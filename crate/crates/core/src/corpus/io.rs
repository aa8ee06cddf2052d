//! JSON-Lines readers and writers for every record stream.
//!
//! Readers normalise timestamps to the millisecond grid and reject any record
//! that breaks a type invariant, naming the offending field and line.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::model::{LabeledSequence, LaughterSegment, LaughterSource, Split, VideoRecord, Word};
use crate::error::{Error, Result};

/// Parses one JSON value per non-blank line, pairing each with its 1-based line.
pub fn parse_jsonl<T: DeserializeOwned, R: BufRead>(reader: R, path: &Path) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<(usize, T)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(BufReader::new(file), path)
}

pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, records: &[T]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn loc(path: &Path, line: usize) -> String {
    format!("{}:{}", path.display(), line)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVideoRecord {
    video_id: String,
    language: String,
    channel: String,
    duration_s: f64,
    split: Split,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<VideoRecord>> {
    let path = path.as_ref();
    let raw: Vec<(usize, RawVideoRecord)> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (line, r) in raw {
        let at = loc(path, line);
        if r.video_id.is_empty() {
            return Err(Error::schema(at, "video_id", "empty"));
        }
        let language = r
            .language
            .parse()
            .map_err(|e: Error| Error::schema(&at, "language", e.to_string()))?;
        if !r.duration_s.is_finite() || r.duration_s < 0.0 {
            return Err(Error::schema(at, "duration_s", format!("{} is negative", r.duration_s)));
        }
        if !seen.insert(r.video_id.clone()) {
            return Err(Error::Validation(format!("{at}: duplicate video_id {:?}", r.video_id)));
        }
        out.push(VideoRecord {
            video_id: r.video_id,
            language,
            channel: r.channel,
            duration_s: r.duration_s,
            split: r.split,
        });
    }
    Ok(out)
}

pub fn write_manifest(path: impl AsRef<Path>, records: &[VideoRecord]) -> Result<()> {
    write_jsonl(path, records)
}

/// Checks per-video ordering: `idx` strictly increasing, `start_s` non-decreasing.
/// `locate` maps a position in `words` to a human-readable location.
pub fn validate_word_order(words: &[Word], locate: impl Fn(usize) -> String) -> Result<()> {
    let mut last: HashMap<&str, (usize, f64)> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        w.validate().map_err(|(f, m)| Error::schema(locate(i), f, m))?;
        if let Some(&(idx, start)) = last.get(w.video_id.as_str()) {
            if w.idx <= idx {
                return Err(Error::schema(
                    locate(i),
                    "idx",
                    format!("{} does not increase after {idx} in video {}", w.idx, w.video_id),
                ));
            }
            if w.start_s < start {
                return Err(Error::schema(
                    locate(i),
                    "start_s",
                    format!("{} decreases after {start} in video {}", w.start_s, w.video_id),
                ));
            }
        }
        last.insert(&w.video_id, (w.idx, w.start_s));
    }
    Ok(())
}

pub fn read_words(path: impl AsRef<Path>) -> Result<Vec<Word>> {
    let path = path.as_ref();
    let raw: Vec<(usize, Word)> = read_jsonl(path)?;
    let lines: Vec<usize> = raw.iter().map(|(l, _)| *l).collect();
    let words: Vec<Word> = raw
        .into_iter()
        .map(|(_, mut w)| {
            w.normalize();
            w
        })
        .collect();
    validate_word_order(&words, |i| loc(path, lines[i]))?;
    Ok(words)
}

pub fn write_words(path: impl AsRef<Path>, words: &[Word]) -> Result<()> {
    write_jsonl(path, words)
}

/// Rejects invalid segments and overlapping manual annotations within a video.
/// Touching endpoints are not an overlap.
pub fn validate_laughter(segments: &[LaughterSegment], locate: impl Fn(usize) -> String) -> Result<()> {
    let mut manual: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        s.validate().map_err(|(f, m)| Error::schema(locate(i), f, m))?;
        if s.source == LaughterSource::Manual {
            manual.entry(&s.video_id).or_default().push(i);
        }
    }
    let mut videos: Vec<_> = manual.into_iter().collect();
    videos.sort_by(|a, b| a.0.cmp(b.0));
    for (video, mut idxs) in videos {
        idxs.sort_by(|&a, &b| segments[a].start_s.total_cmp(&segments[b].start_s));
        for pair in idxs.windows(2) {
            let (a, b) = (&segments[pair[0]], &segments[pair[1]]);
            if b.start_s < a.end_s {
                return Err(Error::schema(
                    locate(pair[1]),
                    "start_s",
                    format!(
                        "manual laughter [{}, {}] overlaps [{}, {}] in video {video}",
                        b.start_s, b.end_s, a.start_s, a.end_s
                    ),
                ));
            }
        }
    }
    Ok(())
}

pub fn read_laughter(path: impl AsRef<Path>) -> Result<Vec<LaughterSegment>> {
    let path = path.as_ref();
    let raw: Vec<(usize, LaughterSegment)> = read_jsonl(path)?;
    let lines: Vec<usize> = raw.iter().map(|(l, _)| *l).collect();
    let segs: Vec<LaughterSegment> = raw
        .into_iter()
        .map(|(_, mut s)| {
            s.normalize();
            s
        })
        .collect();
    validate_laughter(&segs, |i| loc(path, lines[i]))?;
    Ok(segs)
}

pub fn write_laughter(path: impl AsRef<Path>, segments: &[LaughterSegment]) -> Result<()> {
    write_jsonl(path, segments)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<LabeledSequence>> {
    let path = path.as_ref();
    let raw: Vec<(usize, LabeledSequence)> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (line, seq) in raw {
        seq.validate()
            .map_err(|(f, m)| Error::schema(loc(path, line), f, m))?;
        if !seen.insert(seq.video_id.clone()) {
            return Err(Error::Validation(format!(
                "{}: duplicate video_id {:?}",
                loc(path, line),
                seq.video_id
            )));
        }
        out.push(seq);
    }
    Ok(out)
}

pub fn write_dataset(path: impl AsRef<Path>, sequences: &[LabeledSequence]) -> Result<()> {
    write_jsonl(path, sequences)
}

/// Lowercase hex SHA-256 of a file's bytes.
pub fn file_digest(path: impl AsRef<Path>) -> Result<String> {
    use sha2::{Digest, Sha256};
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn ensure_parent(path: &Path) -> Result<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(path.to_path_buf())
}
