use crate::error::{Error, Result};
use crate::fanout::{FanoutPmf, FanoutPreset, TrafficClass};
use crate::scalar::Scalar;

/// Traffic mix `(α, β, γ)` and the fanout pmf of each class.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub fanout_uniform: FanoutPmf<T>,
    pub fanout_hotspot_dest: FanoutPmf<T>,
    pub fanout_hotspot_src: FanoutPmf<T>,
}

impl<T: Scalar> TrafficModel<T> {
    pub fn new(
        alpha: T,
        beta: T,
        gamma: T,
        fanout_uniform: FanoutPmf<T>,
        fanout_hotspot_dest: FanoutPmf<T>,
        fanout_hotspot_src: FanoutPmf<T>,
    ) -> Result<Self> {
        for (name, w) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
            if *w < T::zero() {
                return Err(Error::InvalidTraffic(format!(
                    "{name} = {} is negative",
                    w.to_f64_lossy()
                )));
            }
        }
        let total = alpha.clone() + beta.clone() + gamma.clone();
        if !total.approx_eq(&T::one(), &T::normalization_tolerance()) {
            return Err(Error::InvalidTraffic(format!(
                "alpha + beta + gamma = {:.12}, not 1",
                total.to_f64_lossy()
            )));
        }
        let n = fanout_uniform.n_nodes();
        if fanout_hotspot_dest.n_nodes() != n || fanout_hotspot_src.n_nodes() != n {
            return Err(Error::InvalidTraffic(
                "fanout pmfs built for different ring sizes".into(),
            ));
        }
        Ok(TrafficModel {
            alpha,
            beta,
            gamma,
            fanout_uniform,
            fanout_hotspot_dest,
            fanout_hotspot_src,
        })
    }

    /// Same fanout pmf for all three classes.
    pub fn with_common_fanout(alpha: T, beta: T, gamma: T, fanout: FanoutPmf<T>) -> Result<Self> {
        Self::new(alpha, beta, gamma, fanout.clone(), fanout.clone(), fanout)
    }

    /// Mix with each class drawn from a named preset.
    pub fn from_presets(
        n_nodes: usize,
        (alpha, beta, gamma): (T, T, T),
        uniform: FanoutPreset,
        hotspot_dest: FanoutPreset,
        hotspot_src: FanoutPreset,
    ) -> Result<Self> {
        Self::new(
            alpha,
            beta,
            gamma,
            uniform.build(n_nodes)?,
            hotspot_dest.build(n_nodes)?,
            hotspot_src.build(n_nodes)?,
        )
    }

    pub fn n_nodes(&self) -> usize {
        self.fanout_uniform.n_nodes()
    }

    pub fn weight(&self, class: TrafficClass) -> &T {
        match class {
            TrafficClass::Uniform => &self.alpha,
            TrafficClass::HotspotDest => &self.beta,
            TrafficClass::HotspotSrc => &self.gamma,
        }
    }

    pub fn fanout(&self, class: TrafficClass) -> &FanoutPmf<T> {
        match class {
            TrafficClass::Uniform => &self.fanout_uniform,
            TrafficClass::HotspotDest => &self.fanout_hotspot_dest,
            TrafficClass::HotspotSrc => &self.fanout_hotspot_src,
        }
    }

    pub fn to_f64(&self) -> TrafficModel<f64> {
        TrafficModel {
            alpha: self.alpha.to_f64_lossy(),
            beta: self.beta.to_f64_lossy(),
            gamma: self.gamma.to_f64_lossy(),
            fanout_uniform: self.fanout_uniform.to_f64(),
            fanout_hotspot_dest: self.fanout_hotspot_dest.to_f64(),
            fanout_hotspot_src: self.fanout_hotspot_src.to_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_must_sum_to_one() {
        let f = FanoutPmf::<f64>::point(8, 1).unwrap();
        assert!(TrafficModel::with_common_fanout(0.5, 0.5, 0.1, f.clone()).is_err());
        assert!(TrafficModel::with_common_fanout(1.1, -0.1, 0.0, f.clone()).is_err());
        assert!(TrafficModel::with_common_fanout(0.2, 0.2, 0.6, f).is_ok());
    }

    #[test]
    fn ring_sizes_must_agree() {
        let a = FanoutPmf::<f64>::point(8, 1).unwrap();
        let b = FanoutPmf::<f64>::point(12, 1).unwrap();
        assert!(TrafficModel::new(1.0, 0.0, 0.0, a.clone(), b, a).is_err());
    }
}
