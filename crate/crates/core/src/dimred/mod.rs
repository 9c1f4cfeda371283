//! Dimensionality reduction: PCA and t-SNE.

mod pca;
mod tsne;

pub use pca::{pca_fit, FeatureLoadings, PcaModel, PcaScores};
pub use tsne::{
    kl_divergence, tsne_affinities, tsne_conditional_affinities, tsne_embed, MomentumSchedule,
    TsneConfig, TsneEmbedding,
};
pub(crate) use tsne::{kl_gradient, kl_objective};
