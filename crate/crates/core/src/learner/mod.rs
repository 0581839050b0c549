//! Classifier, label noise, dataset ingestion and the selection training loop.

mod data;
pub mod idx;
mod mlp;
mod noise;
mod train;

pub use data::{load_csv, make_blobs, Dataset};
pub use idx::{load_idx, IdxError};
pub use mlp::{argmax, softmax_in_place, Gradient, Mlp, Scratch, DEFAULT_HIDDEN};
pub use noise::{
    default_pair_map, inject_asymmetric_noise, inject_symmetric_noise, LabelNoiseSpec, NoiseKind,
};
pub use train::{
    evaluate, risk_vector, taks_train, train_epoch, train_fixed_selection, EpochMetrics, Evaluation,
    TrainConfig, TrainOutcome,
};
