//! IO, model backends, pipeline orchestration and reporting around
//! `mcqa-core`.

pub mod augment;
pub mod cache;
pub mod cli;
pub mod client;
pub mod config;
pub mod dataset;
pub mod http;
pub mod mock;
pub mod output;
pub mod pipeline;
pub mod pool;
