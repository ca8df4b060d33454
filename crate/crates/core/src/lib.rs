//! One-clock alternating timed automata, the timed logics RatMTL, FRatMTL
//! and μRatMTL, forward QkMSO, and executable translations between them.
//!
//! Every translation comes with an evaluator on each side so that results can
//! be checked against each other on concrete timed words.

pub mod ata;
pub mod automata;
pub mod compile;
pub mod decompile;
pub mod difftest;
pub mod error;
pub mod fixpoint;
pub mod fixtures;
pub mod gen;
pub mod interval;
pub mod logic;
pub mod qkmso;
pub mod region;
pub mod structure;
pub mod tf;
pub mod untiming;
pub mod word;

pub use ata::Ata;
pub use error::{Error, Result};
pub use interval::Interval;
pub use region::Region;
pub use tf::Tf;
pub use word::{Rational, TimedWord};
