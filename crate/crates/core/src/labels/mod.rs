//! Word-level sequence labels and training dataset emission.

mod emit;
mod scheme;

pub use emit::{
    assemble_dataset, emit_dataset, label_corpus, DatasetMeta, EmitOutput, LabelCounts,
    LabelReport, WordLabel,
};
pub use scheme::{label_words, label_words_until, LabelScheme, LabelingConfig, WordLabels};
