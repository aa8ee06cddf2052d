//! Record types, on-disk schemas and corpus statistics.

mod io;
mod model;
mod stats;

pub use io::{
    ensure_parent, file_digest, load_manifest, parse_jsonl, read_dataset, read_jsonl,
    read_laughter, read_words, validate_laughter, validate_word_order, write_dataset, write_json,
    write_jsonl, write_laughter, write_manifest, write_words,
};
pub use model::{
    round_ms, LabeledSequence, Language, LaughterSegment, LaughterSource, Split, VideoRecord, Word,
};
pub(crate) use model::{ser_ms, ser_opt_ms};
pub use stats::{corpus_stats, validate_references, StatsReport, StatsRow};

use std::collections::BTreeMap;

/// Groups records by video id, preserving input order within each group.
pub fn group_by_video<'a, T, F>(items: &'a [T], key: F) -> BTreeMap<&'a str, Vec<&'a T>>
where
    F: Fn(&'a T) -> &'a str,
{
    let mut map: BTreeMap<&str, Vec<&T>> = BTreeMap::new();
    for it in items {
        map.entry(key(it)).or_default().push(it);
    }
    map
}
