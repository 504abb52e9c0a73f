//! The five pipeline commands. Each reads its inputs, fans per-record work
//! out to a worker pool and writes every artifact through one writer.

pub mod evaluate;
pub mod package;
pub mod stats;
pub mod synth;
pub mod validate;

use crate::error::{PipelineError, Result};

/// A worker pool with `workers` threads, or rayon's default when `None`.
pub fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    if workers == Some(0) {
        return Err(PipelineError::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| PipelineError::Data(format!("cannot start worker pool: {}", e)))
}
