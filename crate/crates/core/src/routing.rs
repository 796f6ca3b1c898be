//! Per-wavelength routing of a multicast packet.
//!
//! On every wavelength that carries at least one destination the packet is
//! sent as at most two copies leaving the sender: one clockwise, one
//! counterclockwise. A route is described by the two hop counts and the node
//! where the untraversed arc (the chosen largest gap) starts.

use std::fmt;

use rand::Rng;

use crate::fanout::TrafficClass;
use crate::ring::{Direction, RingTopology, SegmentId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Skip a largest gap of the active set on every wavelength.
    ShortestPath,
    /// Shortest path for uniform and hotspot-destination packets; a single
    /// copy per wavelength for hotspot-source packets.
    OneCopy,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::ShortestPath => "sp",
            Strategy::OneCopy => "oc",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub traffic_class: TrafficClass,
    pub sender: usize,
    /// Destination nodes in increasing order.
    pub fanout_set: Vec<usize>,
}

impl Packet {
    /// Checks the class constraints on sender and destinations.
    pub fn is_valid(&self, topology: &RingTopology) -> bool {
        let n = topology.n_nodes();
        let hot = topology.hotspot();
        let in_range = |x: usize| (1..=n).contains(&x);
        if !in_range(self.sender)
            || self.fanout_set.is_empty()
            || self.fanout_set.len() >= n
            || !self
                .fanout_set
                .iter()
                .all(|&d| in_range(d) && d != self.sender)
            || !self.fanout_set.windows(2).all(|w| w[0] < w[1])
        {
            return false;
        }
        match self.traffic_class {
            TrafficClass::Uniform => true,
            TrafficClass::HotspotDest => self.sender != hot && self.fanout_set.contains(&hot),
            TrafficClass::HotspotSrc => self.sender == hot,
        }
    }
}

/// Routing on one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WavelengthRoute {
    pub wavelength: usize,
    /// Segments `S+1, ..., S+cw_hops` clockwise.
    pub cw_hops: usize,
    /// Segments `S, S-1, ..., S-ccw_hops+1` counterclockwise.
    pub ccw_hops: usize,
    /// First node of the untraversed arc.
    pub gap_start: usize,
    /// Hop length of the untraversed arc.
    pub gap_len: usize,
}

impl WavelengthRoute {
    /// Every segment the route traverses.
    pub fn segments(&self, topology: &RingTopology, sender: usize) -> Vec<SegmentId> {
        let s = sender as i64;
        let cw =
            (1..=self.cw_hops as i64).map(|k| SegmentId::cw(topology.wrap(s + k), self.wavelength));
        let ccw = (0..self.ccw_hops as i64)
            .map(|k| SegmentId::ccw(topology.wrap(s - k), self.wavelength));
        cw.chain(ccw).collect()
    }

    pub fn uses(&self, topology: &RingTopology, sender: usize, segment: SegmentId) -> bool {
        if segment.wavelength != self.wavelength {
            return false;
        }
        match segment.direction {
            Direction::Clockwise => {
                let d = topology.cw_distance(sender, segment.index);
                d >= 1 && d <= self.cw_hops
            }
            Direction::Counterclockwise => {
                topology.cw_distance(segment.index, sender) < self.ccw_hops
            }
        }
    }
}

/// Routes of one packet, one entry per wavelength that has destinations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingDecision {
    pub sender: usize,
    pub routes: Vec<WavelengthRoute>,
}

impl RoutingDecision {
    pub fn route(&self, wavelength: usize) -> Option<&WavelengthRoute> {
        self.routes.iter().find(|r| r.wavelength == wavelength)
    }

    pub fn uses(&self, topology: &RingTopology, segment: SegmentId) -> bool {
        self.route(segment.wavelength)
            .is_some_and(|r| r.uses(topology, self.sender, segment))
    }
}

/// Equally likely routes on one wavelength.
///
/// `dists` holds the clockwise distances from the sender to the destinations
/// homed on `wavelength`, strictly increasing and non-empty.
pub(crate) fn candidates(
    topology: &RingTopology,
    strategy: Strategy,
    class: TrafficClass,
    sender: usize,
    wavelength: usize,
    dists: &[usize],
    out: &mut Vec<WavelengthRoute>,
) {
    out.clear();
    if strategy == Strategy::OneCopy && class == TrafficClass::HotspotSrc {
        one_copy_candidates(topology, wavelength, dists, out);
    } else {
        largest_gap_candidates(topology, sender, wavelength, dists, out);
    }
}

fn largest_gap_candidates(
    topology: &RingTopology,
    sender: usize,
    wavelength: usize,
    dists: &[usize],
    out: &mut Vec<WavelengthRoute>,
) {
    let n = topology.n_nodes();
    let mut best = 0;
    let mut prev = 0;
    for &d in dists.iter().chain(std::iter::once(&n)) {
        let len = d - prev;
        if len > best {
            best = len;
            out.clear();
        }
        if len == best {
            out.push(WavelengthRoute {
                wavelength,
                cw_hops: prev,
                ccw_hops: n - d,
                gap_start: topology.wrap((sender + prev) as i64),
                gap_len: len,
            });
        }
        prev = d;
    }
}

/// Hotspot-source packets under one-copy routing.
///
/// The `k`-th home node of `λ` clockwise from the hotspot sits at distance
/// `λ + (k - 1)Λ`. A clockwise copy passes `k_max` home nodes, a
/// counterclockwise copy `η* - k_min + 1`, where `η*` excludes the hotspot
/// itself. The copy passing fewer home nodes is sent; ties go either way.
fn one_copy_candidates(
    topology: &RingTopology,
    wavelength: usize,
    dists: &[usize],
    out: &mut Vec<WavelengthRoute>,
) {
    let n = topology.n_nodes();
    let lambda = topology.n_wavelengths();
    let eta_star = if wavelength == lambda {
        topology.nodes_per_wavelength() - 1
    } else {
        topology.nodes_per_wavelength()
    };
    let first = dists[0];
    let last = dists[dists.len() - 1];
    let k_min = (first - wavelength) / lambda + 1;
    let k_max = (last - wavelength) / lambda + 1;
    let cw_count = k_max;
    let ccw_count = eta_star + 1 - k_min;
    if cw_count <= ccw_count {
        out.push(WavelengthRoute {
            wavelength,
            cw_hops: last,
            ccw_hops: 0,
            gap_start: last,
            gap_len: n - last,
        });
    }
    if ccw_count <= cw_count {
        out.push(WavelengthRoute {
            wavelength,
            cw_hops: 0,
            ccw_hops: n - first,
            gap_start: n,
            gap_len: first,
        });
    }
}

/// Reusable buffers for routing packets one wavelength at a time.
#[derive(Debug, Default)]
pub(crate) struct Router {
    by_wavelength: Vec<Vec<usize>>,
    cands: Vec<WavelengthRoute>,
}

impl Router {
    pub(crate) fn new(topology: &RingTopology) -> Self {
        Router {
            by_wavelength: vec![Vec::new(); topology.n_wavelengths()],
            cands: Vec::new(),
        }
    }

    /// Routes `packet`, calling `emit` once per wavelength with destinations.
    pub(crate) fn route<R: Rng + ?Sized>(
        &mut self,
        topology: &RingTopology,
        strategy: Strategy,
        class: TrafficClass,
        sender: usize,
        fanout_set: &[usize],
        rng: &mut R,
        mut emit: impl FnMut(WavelengthRoute),
    ) {
        for bucket in &mut self.by_wavelength {
            bucket.clear();
        }
        for &d in fanout_set {
            self.by_wavelength[topology.home_of(d) - 1].push(topology.cw_distance(sender, d));
        }
        for (idx, dists) in self.by_wavelength.iter_mut().enumerate() {
            if dists.is_empty() {
                continue;
            }
            dists.sort_unstable();
            candidates(
                topology,
                strategy,
                class,
                sender,
                idx + 1,
                dists,
                &mut self.cands,
            );
            let pick = if self.cands.len() == 1 {
                0
            } else {
                rng.gen_range(0..self.cands.len())
            };
            emit(self.cands[pick]);
        }
    }
}

fn route_with<R: Rng + ?Sized>(
    topology: &RingTopology,
    strategy: Strategy,
    packet: &Packet,
    rng: &mut R,
) -> RoutingDecision {
    let mut router = Router::new(topology);
    let mut routes = Vec::new();
    router.route(
        topology,
        strategy,
        packet.traffic_class,
        packet.sender,
        &packet.fanout_set,
        rng,
        |r| routes.push(r),
    );
    RoutingDecision {
        sender: packet.sender,
        routes,
    }
}

/// Shortest-path routing: skip one largest gap of `F_λ ∪ {S}`, chosen
/// uniformly among ties.
pub fn route_shortest_path<R: Rng + ?Sized>(
    topology: &RingTopology,
    packet: &Packet,
    rng: &mut R,
) -> RoutingDecision {
    route_with(topology, Strategy::ShortestPath, packet, rng)
}

/// One-copy routing.
pub fn route_one_copy<R: Rng + ?Sized>(
    topology: &RingTopology,
    packet: &Packet,
    rng: &mut R,
) -> RoutingDecision {
    route_with(topology, Strategy::OneCopy, packet, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cands(
        ring: &RingTopology,
        strategy: Strategy,
        class: TrafficClass,
        sender: usize,
        dests: &[usize],
    ) -> Vec<WavelengthRoute> {
        let mut dists: Vec<usize> = dests.iter().map(|&d| ring.cw_distance(sender, d)).collect();
        dists.sort_unstable();
        let lambda = ring.home_of(dests[0]);
        let mut out = Vec::new();
        candidates(ring, strategy, class, sender, lambda, &dists, &mut out);
        out
    }

    #[test]
    fn broadcast_from_hotspot_has_four_equal_gaps() {
        let ring = RingTopology::new(16, 4).unwrap();
        let c = cands(
            &ring,
            Strategy::ShortestPath,
            TrafficClass::HotspotSrc,
            16,
            &[4, 8, 12],
        );
        assert_eq!(c.len(), 4);
        let using_4 = c
            .iter()
            .filter(|r| r.uses(&ring, 16, SegmentId::cw(4, 4)))
            .count();
        assert_eq!(using_4, 3);
        assert!(c.iter().all(|r| r.gap_len == 4));
    }

    #[test]
    fn unicast_takes_shorter_arc() {
        let ring = RingTopology::new(16, 4).unwrap();
        let c = cands(
            &ring,
            Strategy::ShortestPath,
            TrafficClass::Uniform,
            3,
            &[7],
        );
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].cw_hops, c[0].ccw_hops), (4, 0));
        assert_eq!(c[0].gap_start, 7);

        let c = cands(
            &ring,
            Strategy::ShortestPath,
            TrafficClass::Uniform,
            3,
            &[15],
        );
        assert_eq!((c[0].cw_hops, c[0].ccw_hops), (0, 4));
        assert_eq!(c[0].gap_start, 3);

        let c = cands(
            &ring,
            Strategy::ShortestPath,
            TrafficClass::Uniform,
            3,
            &[11],
        );
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn segments_match_uses() {
        let ring = RingTopology::new(12, 3).unwrap();
        let r = WavelengthRoute {
            wavelength: 2,
            cw_hops: 3,
            ccw_hops: 2,
            gap_start: 0,
            gap_len: 0,
        };
        let segs = r.segments(&ring, 11);
        assert_eq!(
            segs,
            vec![
                SegmentId::cw(12, 2),
                SegmentId::cw(1, 2),
                SegmentId::cw(2, 2),
                SegmentId::ccw(11, 2),
                SegmentId::ccw(10, 2)
            ]
        );
        for s in ring.all_segments() {
            assert_eq!(r.uses(&ring, 11, s), segs.contains(&s), "{s}");
        }
    }

    #[test]
    fn one_copy_picks_nearest_side() {
        let ring = RingTopology::new(32, 4).unwrap();
        // Home nodes of λ = 1 clockwise from 32: 1, 5, 9, ..., 29.
        let c = cands(&ring, Strategy::OneCopy, TrafficClass::HotspotSrc, 32, &[1]);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].cw_hops, c[0].ccw_hops), (1, 0));
        let c = cands(
            &ring,
            Strategy::OneCopy,
            TrafficClass::HotspotSrc,
            32,
            &[29],
        );
        assert_eq!((c[0].cw_hops, c[0].ccw_hops), (0, 3));
        // Both ends: clockwise passes all 8, counterclockwise passes all 8.
        let c = cands(
            &ring,
            Strategy::OneCopy,
            TrafficClass::HotspotSrc,
            32,
            &[1, 29],
        );
        assert_eq!(c.len(), 2);
        // Hotspot wavelength: 4, 8, ..., 28 (7 nodes).
        let c = cands(
            &ring,
            Strategy::OneCopy,
            TrafficClass::HotspotSrc,
            32,
            &[4, 28],
        );
        assert_eq!(c.len(), 2);
        let c = cands(
            &ring,
            Strategy::OneCopy,
            TrafficClass::HotspotSrc,
            32,
            &[16],
        );
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn one_copy_leaves_other_classes_alone() {
        let ring = RingTopology::new(16, 4).unwrap();
        let a = cands(
            &ring,
            Strategy::OneCopy,
            TrafficClass::Uniform,
            2,
            &[5, 9, 13],
        );
        let b = cands(
            &ring,
            Strategy::ShortestPath,
            TrafficClass::Uniform,
            2,
            &[5, 9, 13],
        );
        assert_eq!(a, b);
    }

    #[test]
    fn decision_covers_every_destination() {
        let ring = RingTopology::new(16, 4).unwrap();
        let packet = Packet {
            traffic_class: TrafficClass::Uniform,
            sender: 6,
            fanout_set: vec![1, 2, 8, 12, 16],
        };
        assert!(packet.is_valid(&ring));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for strategy in [Strategy::ShortestPath, Strategy::OneCopy] {
            let d = route_with(&ring, strategy, &packet, &mut rng);
            for &dest in &packet.fanout_set {
                let lambda = ring.home_of(dest);
                let r = d.route(lambda).unwrap();
                let dist = ring.cw_distance(6, dest);
                assert!(dist <= r.cw_hops || ring.n_nodes() - dist <= r.ccw_hops);
            }
            assert!(d.route(3).is_none());
        }
    }

    #[test]
    fn packet_validation() {
        let ring = RingTopology::new(8, 2).unwrap();
        let p = |class, sender, f: &[usize]| Packet {
            traffic_class: class,
            sender,
            fanout_set: f.to_vec(),
        };
        assert!(p(TrafficClass::HotspotDest, 3, &[8]).is_valid(&ring));
        assert!(!p(TrafficClass::HotspotDest, 3, &[7]).is_valid(&ring));
        assert!(!p(TrafficClass::HotspotSrc, 3, &[7]).is_valid(&ring));
        assert!(!p(TrafficClass::Uniform, 3, &[3]).is_valid(&ring));
        assert!(!p(TrafficClass::Uniform, 3, &[]).is_valid(&ring));
    }
}
