//! Subcarrier-dependent sensing: ranging accuracy from the allocated
//! bandwidth and noisy position observations.
//!
//! Allocating `k` of the `K` available subcarriers to the sensing waveform
//! gives an effective bandwidth of `k B / K`, and the best achievable
//! ranging variance scales with the inverse square of that bandwidth:
//!
//! ```text
//! sigma_r^2(k) = c^2 K^2 / (8 pi^2 gamma k^2 B^2)
//! ```
//!
//! with `c` the speed of light and `gamma` the post-processing SNR. Bearing
//! accuracy comes from the antenna array and does not depend on `k`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gaussian::{sample_gaussian, GaussianBelief, ObsMatrix, ObsVector};
use crate::model::UavState;
use crate::{Error, Result};

/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn default_k_total() -> usize {
    64
}
fn default_bandwidth_hz() -> f64 {
    200e6
}
fn default_gamma() -> f64 {
    10.0
}
fn default_sigma_theta_sq() -> f64 {
    let five_deg = 5.0_f64.to_radians();
    five_deg * five_deg
}

/// Radar-link parameters shared by every slot of an episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingParams {
    /// Number of subcarriers available for sensing.
    #[serde(default = "default_k_total")]
    pub k_total: usize,
    /// Total bandwidth of the `k_total` subcarriers (Hz).
    #[serde(default = "default_bandwidth_hz")]
    pub bandwidth_hz: f64,
    /// Post-processing SNR (linear).
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Bearing-measurement variance (rad^2).
    #[serde(default = "default_sigma_theta_sq")]
    pub sigma_theta_sq: f64,
    /// Emit noise-free measurements while keeping the planner's noise model
    /// unchanged.
    #[serde(default)]
    pub zero_noise: bool,
}

impl Default for SensingParams {
    fn default() -> Self {
        Self {
            k_total: default_k_total(),
            bandwidth_hz: default_bandwidth_hz(),
            gamma: default_gamma(),
            sigma_theta_sq: default_sigma_theta_sq(),
            zero_noise: false,
        }
    }
}

impl SensingParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_total == 0 {
            return Err(Error::NonPositive { name: "k_total", value: 0.0 });
        }
        if self.bandwidth_hz <= 0.0 {
            return Err(Error::NonPositive { name: "bandwidth_hz", value: self.bandwidth_hz });
        }
        if self.gamma <= 0.0 {
            return Err(Error::NonPositive { name: "gamma", value: self.gamma });
        }
        if self.sigma_theta_sq <= 0.0 {
            return Err(Error::NonPositive { name: "sigma_theta_sq", value: self.sigma_theta_sq });
        }
        Ok(())
    }
}

/// Number of subcarriers allocated to sensing in one slot (`1..=k_total`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubcarrierAllocation(pub usize);

impl SubcarrierAllocation {
    /// Build a validated allocation.
    pub fn new(k: usize, params: &SensingParams) -> Result<Self> {
        if k == 0 || k > params.k_total {
            return Err(Error::Config(format!(
                "subcarrier allocation {k} outside 1..={}",
                params.k_total
            )));
        }
        Ok(Self(k))
    }

    pub fn get(&self) -> usize {
        self.0
    }
}

/// Noisy range/bearing observation of the UAV position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Measured radial distance (m).
    pub range: f64,
    /// Measured azimuth (rad).
    pub bearing: f64,
}

impl Observation {
    pub fn as_vector(&self) -> ObsVector {
        ObsVector::new(self.range, self.bearing)
    }

    pub fn from_vector(v: &ObsVector) -> Self {
        Self { range: v[0], bearing: v[1] }
    }
}

/// Best achievable ranging variance with `k` subcarriers (m^2).
pub fn ranging_variance(k: SubcarrierAllocation, params: &SensingParams) -> f64 {
    let kk = params.k_total as f64 / k.get() as f64;
    let c_over_b = SPEED_OF_LIGHT / params.bandwidth_hz;
    (kk * c_over_b).powi(2) / (8.0 * std::f64::consts::PI.powi(2) * params.gamma)
}

/// Measurement-noise covariance `R(k) = diag(sigma_r^2(k), sigma_theta^2)`.
pub fn obs_covariance(k: SubcarrierAllocation, params: &SensingParams) -> ObsMatrix {
    ObsMatrix::from_diagonal(&ObsVector::new(ranging_variance(k, params), params.sigma_theta_sq))
}

/// Observe the true position through the sensing channel with `k`
/// subcarriers allocated.
pub fn observe<R: Rng>(
    x_true: &UavState,
    k: SubcarrierAllocation,
    params: &SensingParams,
    rng: &mut R,
) -> Result<Observation> {
    let mean = ObsVector::new(x_true.rho, x_true.psi);
    let cov = if params.zero_noise { ObsMatrix::zeros() } else { obs_covariance(k, params) };
    let v = sample_gaussian(rng, &GaussianBelief::new(mean, cov))?;
    Ok(Observation::from_vector(&v))
}
