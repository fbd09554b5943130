mod build;
mod certificate;

pub use build::{
    build, build_from_objective, build_polynomial, build_rank_one_polynomial, build_rank_one_rational,
    build_with_supports, supports, Attempt, BuildConfig, Shape,
};
pub use certificate::{render_poly, Certificate, Metadata, CERTIFICATE_VERSION};
