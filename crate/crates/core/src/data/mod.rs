//! Corpus ingestion, present/absent splitting, target assembly, and the
//! synthetic verification corpus.

mod record;
mod sample;
pub mod synth;

pub use record::{read_records, write_records, RawRecord};
pub use sample::{
    assemble_sample, contiguous_subsequence, decode_ids, prepare_source, split_keyphrases,
    AssembleOptions, PreparedSource, RejectReason, TrainingSample,
};
