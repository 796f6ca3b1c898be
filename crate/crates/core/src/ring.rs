//! Ring topology, node/wavelength indexing and segment identities.
//!
//! Nodes are numbered `1..=N` clockwise; node `N` is the hotspot and is also
//! accepted as node `0` at the API boundary. Node `n` receives on wavelength
//! `((n - 1) mod Λ) + 1`, so wavelength `λ` is the drop wavelength of
//! `M_λ = {λ, λ + Λ, ..., λ + (η - 1)Λ}`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Clockwise => "cw",
            Direction::Counterclockwise => "ccw",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A directed ring segment on one wavelength.
///
/// Clockwise segment `n` carries traffic from node `n - 1` to node `n`;
/// counterclockwise segment `n` carries traffic from node `n` to node `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentId {
    pub direction: Direction,
    pub index: usize,
    pub wavelength: usize,
}

impl SegmentId {
    pub fn cw(index: usize, wavelength: usize) -> Self {
        SegmentId {
            direction: Direction::Clockwise,
            index,
            wavelength,
        }
    }

    pub fn ccw(index: usize, wavelength: usize) -> Self {
        SegmentId {
            direction: Direction::Counterclockwise,
            index,
            wavelength,
        }
    }
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}@{}", self.direction, self.index, self.wavelength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingTopology {
    n_nodes: usize,
    n_wavelengths: usize,
}

impl RingTopology {
    pub fn new(n_nodes: usize, n_wavelengths: usize) -> Result<Self> {
        if n_wavelengths == 0 {
            return Err(Error::InvalidTopology(
                "need at least one wavelength".into(),
            ));
        }
        if n_nodes < 2 {
            return Err(Error::InvalidTopology(format!(
                "need at least two nodes, got {n_nodes}"
            )));
        }
        if n_nodes % n_wavelengths != 0 {
            return Err(Error::InvalidTopology(format!(
                "N = {n_nodes} is not a multiple of Λ = {n_wavelengths}"
            )));
        }
        Ok(RingTopology {
            n_nodes,
            n_wavelengths,
        })
    }

    /// `N`.
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// `Λ`.
    pub fn n_wavelengths(&self) -> usize {
        self.n_wavelengths
    }

    /// `η = N / Λ`.
    pub fn nodes_per_wavelength(&self) -> usize {
        self.n_nodes / self.n_wavelengths
    }

    pub fn hotspot(&self) -> usize {
        self.n_nodes
    }

    /// Maps `0` to `N` and validates the range.
    pub fn normalize(&self, node: usize) -> Result<usize> {
        match node {
            0 => Ok(self.n_nodes),
            n if n <= self.n_nodes => Ok(n),
            n => Err(Error::NodeOutOfRange {
                node: n,
                n_nodes: self.n_nodes,
            }),
        }
    }

    pub fn check_wavelength(&self, wavelength: usize) -> Result<()> {
        if wavelength == 0 || wavelength > self.n_wavelengths {
            Err(Error::WavelengthOutOfRange {
                wavelength,
                n_wavelengths: self.n_wavelengths,
            })
        } else {
            Ok(())
        }
    }

    pub fn home_wavelength(&self, node: usize) -> Result<usize> {
        let node = self.normalize(node)?;
        Ok(self.home_of(node))
    }

    /// Unchecked variant of [`home_wavelength`](Self::home_wavelength) for
    /// nodes already known to lie in `1..=N`.
    #[inline]
    pub(crate) fn home_of(&self, node: usize) -> usize {
        (node - 1) % self.n_wavelengths + 1
    }

    /// Nodes homed on `wavelength`, in clockwise order starting after the hotspot.
    pub fn home_nodes(&self, wavelength: usize) -> impl Iterator<Item = usize> {
        let step = self.n_wavelengths;
        (0..self.nodes_per_wavelength()).map(move |k| wavelength + k * step)
    }

    /// `⌊n⌋_λ`: the nearest node homed on `λ` at or counterclockwise of `node`.
    pub fn shift_down(&self, node: usize, wavelength: usize) -> Result<usize> {
        let node = self.normalize(node)?;
        self.check_wavelength(wavelength)?;
        let lambda = self.n_wavelengths as i64;
        let offset = node as i64 - wavelength as i64;
        Ok(self.wrap(offset.div_euclid(lambda) * lambda + wavelength as i64))
    }

    /// `⌈n⌉_λ`: the nearest node homed on `λ` at or clockwise of `node`.
    pub fn shift_up(&self, node: usize, wavelength: usize) -> Result<usize> {
        let node = self.normalize(node)?;
        self.check_wavelength(wavelength)?;
        let lambda = self.n_wavelengths as i64;
        let offset = node as i64 - wavelength as i64;
        let up = -((-offset).div_euclid(lambda));
        Ok(self.wrap(up * lambda + wavelength as i64))
    }

    /// Incoming segments of the nodes homed on `wavelength`: clockwise
    /// `λ + kΛ` and counterclockwise `λ + 1 + kΛ`.
    pub fn critical_segments(&self, wavelength: usize) -> Result<Vec<SegmentId>> {
        self.check_wavelength(wavelength)?;
        let cw = self
            .home_nodes(wavelength)
            .map(|n| SegmentId::cw(n, wavelength));
        let ccw = self
            .home_nodes(wavelength)
            .map(|n| SegmentId::ccw(self.wrap(n as i64 + 1), wavelength));
        Ok(cw.chain(ccw).collect())
    }

    /// Clockwise hop count from `from` to `to`.
    #[inline]
    pub fn cw_distance(&self, from: usize, to: usize) -> usize {
        (to + self.n_nodes - from) % self.n_nodes
    }

    #[inline]
    pub(crate) fn wrap(&self, node: i64) -> usize {
        let n = self.n_nodes as i64;
        let r = node.rem_euclid(n);
        if r == 0 {
            self.n_nodes
        } else {
            r as usize
        }
    }

    /// Every directed segment on every wavelength, clockwise first.
    pub fn all_segments(&self) -> impl Iterator<Item = SegmentId> + '_ {
        [Direction::Clockwise, Direction::Counterclockwise]
            .into_iter()
            .flat_map(move |direction| {
                (1..=self.n_wavelengths).flat_map(move |wavelength| {
                    (1..=self.n_nodes).map(move |index| SegmentId {
                        direction,
                        index,
                        wavelength,
                    })
                })
            })
    }
}
