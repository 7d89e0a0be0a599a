//! Crate-level error type wrapping the per-stage errors.

use thiserror::Error;

use crate::dataset::DatasetError;
use crate::eval::EvalError;
use crate::features::FeatureError;
use crate::forest::ForestError;
use crate::ingest::IngestError;
use crate::preprocess::PreprocessError;

/// Any error the pipeline can produce, tagged by stage.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("preprocess: {0}")]
    Preprocess(#[from] PreprocessError),
    #[error("features: {0}")]
    Features(#[from] FeatureError),
    #[error("dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("forest: {0}")]
    Forest(#[from] ForestError),
    #[error("eval: {0}")]
    Eval(#[from] EvalError),
}

impl PipelineError {
    /// True for errors that indicate a broken internal invariant rather
    /// than bad input data.
    pub fn is_internal(&self) -> bool {
        match self {
            PipelineError::Forest(e) => e.is_internal(),
            PipelineError::Eval(EvalError::Forest(e)) => e.is_internal(),
            _ => false,
        }
    }
}
