//! Segment utilization and multicast capacity of a bidirectional WDM packet
//! ring with a single hotspot.
//!
//! The crate offers three independent ways to obtain the probability that a
//! random packet uses a given ring segment:
//!
//! * [`analytics`]: closed-form bounds and large-ring approximations for the
//!   three critical segments, the capacity `C_M` and the routing thresholds.
//! * [`sim`]: a seeded, parallel Monte Carlo packet simulator with a
//!   confidence-interval stopping rule.
//! * [`oracle`]: exact enumeration for small rings.
//!
//! Numerical code is generic over [`Scalar`]; the aliases below fix the
//! common choices.

pub mod analytics;
pub mod binomial;
pub mod error;
pub mod fanout;
pub mod gaps;
pub mod oracle;
pub mod ring;
pub mod routing;
pub mod scalar;
pub mod sim;
pub mod traffic;

pub use analytics::{
    bounds_segment_1_1, bounds_segment_l_l, bounds_segment_n_l, max_utilization_sp, oc_upper_bound,
    recommend_routing, thresholds, CapacityReport, CriticalBounds, Recommendation, Threshold,
};
pub use error::{Error, Result};
pub use fanout::{
    wavelength_fanout_pmf, FanoutPmf, FanoutPreset, TrafficClass, WavelengthFanoutPmf,
};
pub use gaps::{expected_largest_gap, gap_pmf, largest_gap_pmf, GapTable, LargestGapPmf};
pub use oracle::{
    exact_expected_clg, exact_gap_start_distribution, exact_utilization, ExactUtilization,
};
pub use ring::{Direction, RingTopology, SegmentId};
pub use routing::{route_one_copy, route_shortest_path, Packet, RoutingDecision, Strategy};
pub use scalar::Scalar;
pub use sim::{
    estimate_capacity, estimate_utilization, sample_packet, SimCapacity, StopRule,
    UtilizationMatrix,
};
pub use traffic::TrafficModel;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type TrafficModelF64 = TrafficModel<f64>;
pub type TrafficModelF32 = TrafficModel<f32>;
pub type TrafficModelExact = TrafficModel<Rational>;

pub type FanoutPmfF64 = FanoutPmf<f64>;
pub type FanoutPmfExact = FanoutPmf<Rational>;

pub type GapTableF64 = GapTable<f64>;
pub type GapTableExact = GapTable<Rational>;

pub type CriticalBoundsF64 = CriticalBounds<f64>;
pub type CapacityReportF64 = CapacityReport<f64>;
pub type CapacityReportExact = CapacityReport<Rational>;

pub type ExactUtilizationRational = ExactUtilization<Rational>;
pub type ExactUtilizationF64 = ExactUtilization<f64>;
