//! Harness around `flatcode-core`: seedable Monte Carlo simulations for the
//! delay, independence, and partial-decoding behavior of the three flat
//! protocols, plus CSV/JSON emission used by the `flatcode` binary.

pub mod output;
pub mod sim;
