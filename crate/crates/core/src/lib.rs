//! Pure logic for multilingual multiple-choice exam answering: item records,
//! option-label normalization, prompt rendering, request keys, retry timing
//! and scoring. No IO; `alloc` only.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod answer_norm;
pub mod backoff;
pub mod caption;
mod digest;
pub mod eval;
pub mod item;
pub mod label;
pub mod prompt;
pub mod request;
pub mod script;
pub mod table;

pub use answer_norm::{
    canonicalize_options, extract_answer_letter, normalize_marker, strip_and_validate_strict,
    OptionBlock, OptionsError,
};
pub use caption::{Caption, CaptionWarning};
pub use digest::sha256_hex;
pub use eval::{Accuracy, Percent, Predictions};
pub use item::{Dataset, ExamItem, ItemType, Split};
pub use label::{AnswerLetter, ExtractionMethod, OptionLabel};
pub use prompt::{PromptTemplate, RenderedPrompt, TemplateSet};
pub use request::{ModelRequest, Role, Temperature};
pub use script::{Language, Script};
pub use table::Table;
