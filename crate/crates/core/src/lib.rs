//! Minimum Steiner stars, minimum stars and maximum matchings for finite
//! point sets in R^d, with the analytic constants that bound the ratio
//! between the minimum star and the minimum Steiner star.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod pointfile;
pub mod quad;
pub mod search;
pub mod stars;
pub mod verify;
pub mod weber;

pub use error::{Error, Result};
pub use geometry::{Configuration, Point, WeberFrame};
pub use matching::MatchingResult;
pub use search::{SearchResult, SearchSpec};
pub use stars::{RatioReport, StarSummary};
pub use weber::WeberResult;
