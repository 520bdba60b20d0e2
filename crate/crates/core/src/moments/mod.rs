//! Subset moments m_d = (1/n) E tr((X'X)^d): Monte Carlo, exact tuple
//! enumeration, the erasure Welch bound, and the asymptotic recursion.

pub mod asymptotic;
pub mod exact;
pub mod partitions;

pub use asymptotic::{asymptotic_moment, recursion, MomentPolynomial, XPoly};
pub use exact::{
    all_subsets_moment, crossing_decay_probe, empirical_moment, ewb_bound, ewb_delta, exact_expected_moment,
    ExactMoment,
};
pub use partitions::{catalan, contract_cycle, enumerate_noncrossing_partitions, narayana, Partition};
