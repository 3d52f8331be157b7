//! Exact probabilities for drawing coloured balls from an urn into tubes.
//!
//! Draws come in three modes: multinomial (the ball is returned),
//! hypergeometric (the ball is removed) and Pólya (the ball is returned
//! together with a copy). On top of the draw distributions the crate
//! computes which tube fills first ([`firstfull`]) and how many draws it
//! takes to fill all tubes ([`negative`]), each along two independent
//! routes: closed-form sums and iteration of a small probabilistic
//! automaton ([`mmo`]). All arithmetic is on exact rationals.
//!
//! ```
//! use urntubes::{mnff, parse_distribution, parse_multiset, Rational, TubeConfig};
//!
//! let coin = parse_distribution("1/3 R + 2/3 B").unwrap();
//! let tubes = TubeConfig::new(parse_multiset("2R + 3B").unwrap()).unwrap();
//! let d = mnff(&coin, &tubes).unwrap();
//! assert_eq!(d.prob(&"R".parse().unwrap()), Rational::ratio(11, 27));
//! ```

pub mod analysis;
pub mod cli;
pub mod dist;
pub mod draws;
pub mod emit;
pub mod error;
pub mod firstfull;
pub mod mmo;
pub mod multiset;
pub mod negative;
pub mod numeric;
pub mod parse;
pub mod suites;

pub use dist::{flrn, Dist, NatDist, Predicate};
pub use draws::{
    binomial_pmf, draw_pmf, hypergeometric_pmf, multinomial_pmf, negbinomial_pmf, polya_pmf, sequence_oracle,
    DrawMode, Urn,
};
pub use error::{Error, Result};
pub use firstfull::{first_full, hgff, mnff, plff, points_grid, points_share, PointsShare, TubeConfig};
pub use mmo::{first_full_via_mmo, Mmo, Step};
pub use multiset::{Color, Multiset};
pub use negative::{negative, negative_tail_bound, nhg, nmn, npl, Cutoff};
pub use numeric::Rational;
pub use parse::{parse_distribution, parse_multiset};
