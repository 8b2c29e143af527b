//! The two worked examples, bundled as market files with named matchings.
//!
//! Example 1 is a many-to-one market with five firms and six workers;
//! Example 2 is a substitutable many-to-many market with seven firms and
//! ten workers. Preference tails that the tables leave open are filled with
//! the smallest completion that keeps every firm substitutable.

use crate::error::Result;
use crate::io::{market_from_json, LoadedMarket};

pub const EXAMPLE1_JSON: &str = include_str!("../assets/example1.json");
pub const EXAMPLE2_JSON: &str = include_str!("../assets/example2.json");

pub fn example1() -> Result<LoadedMarket> {
    market_from_json(EXAMPLE1_JSON)
}

pub fn example2() -> Result<LoadedMarket> {
    market_from_json(EXAMPLE2_JSON)
}

/// Bundled example by name: `example1` or `example2`.
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "example1" => Some(EXAMPLE1_JSON),
        "example2" => Some(EXAMPLE2_JSON),
        _ => None,
    }
}
