//! Evaluation arithmetic: word error rates, relative improvements,
//! correlation, donor ranking and token/phone correspondence.

mod correspondence;
mod ranking;
mod stats;
mod wer;

pub use correspondence::{
    phone_token_correspondence, read_phone_intervals, CorrespondenceTable, PhoneInterval, NO_PHONE,
};
pub use ranking::{rank_donors, read_donor_entries, DonorEntry, DonorReport, RankedDonor};
pub use stats::{format_werr, pearson, werr};
pub use wer::{corpus_wer, read_transcripts, tokenize_words, wer, WerOptions, WerResult};
