//! Hand-crafted account attributes: the 43-feature registry, extraction from
//! account graphs, and min-max normalization with persisted statistics.

mod extract;
mod normalize;
mod registry;

pub use extract::{extract_attributes, AttributeVector};
pub use normalize::{normalize_minmax, NormStats};
pub use registry::{registry, Category, FeatureDef, FEATURE_COUNT};
