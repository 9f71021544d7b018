//! Reference algorithms used to normalize solver accuracy.

pub mod gw;
pub mod local_search;

pub use gw::{gw_solve, BmRelaxation, GwParams, GwResult};
pub use local_search::{is_one_flip_optimal, local_search_best, LocalSearchParams, LocalSearchResult};
