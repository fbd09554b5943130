//! Univariate approximations of `sqrt` and their composition with
//! multilinear polynomials.

mod chebyshev;
mod minimax;
mod newman;
mod rank_one;
mod simplex;
mod truncate;
mod unipoly;

pub use chebyshev::{chebyshev_error_bound, chebyshev_sqrt, ChebyshevSqrt};
pub use minimax::{half_integer_points, minimax_sqrt_at_points, MinimaxResult};
pub use newman::{newman_error_bound, newman_sqrt};
pub use rank_one::{
    poly_start_degree, rank_one_poly_certificate, rank_one_rational_certificate,
    rational_degree_bound, rational_linf_error, scaled_newman, RankOneRational,
};
pub use truncate::{
    default_rho_schedule, minimal_support_len, parse_rho, rho_truncate, truncated_len, Rho,
};
pub use unipoly::{compose, UniPoly, UniRational};
