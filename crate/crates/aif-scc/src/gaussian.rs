//! Dense SPD linear algebra and Gaussian sampling shared by every other
//! module.
//!
//! Everything here is sized at compile time: states are 4-dimensional,
//! controls and observations 2-dimensional. Beliefs and messages are all
//! Gaussians in covariance parameterization, so the kernel reduces to
//! Cholesky-backed SPD inversion, symmetrization (drift control over long
//! recursions), and seeded sampling.

use nalgebra::{Cholesky, SMatrix, SVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// 4-D state vector (radial distance, azimuth, radial velocity, angular velocity).
pub type StateVector = nalgebra::Vector4<f64>;
/// 4x4 state-space matrix.
pub type StateMatrix = nalgebra::Matrix4<f64>;
/// 2-D control vector (radial and angular acceleration).
pub type ControlVector = nalgebra::Vector2<f64>;
/// 2x2 control-space matrix.
pub type ControlMatrix = nalgebra::Matrix2<f64>;
/// 2-D observation vector (range, azimuth).
pub type ObsVector = nalgebra::Vector2<f64>;
/// 2x2 observation-noise covariance.
pub type ObsMatrix = nalgebra::Matrix2<f64>;
/// 4x2 input matrix mapping accelerations into the state.
pub type InputMatrix = nalgebra::SMatrix<f64, 4, 2>;
/// 2x4 measurement matrix selecting the observed state components.
pub type MeasurementMatrix = nalgebra::SMatrix<f64, 2, 4>;

/// Relative tolerance for covariance symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A Gaussian distribution in mean/covariance form.
///
/// Serves as belief over states (`N = 4`), controls (`N = 2`), and as the
/// representation of every Gaussian message in the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBelief<const N: usize> {
    pub mean: SVector<f64, N>,
    pub cov: SMatrix<f64, N, N>,
}

/// Belief over the 4-D UAV state.
pub type StateBelief = GaussianBelief<4>;
/// Belief over the 2-D control input.
pub type ControlBelief = GaussianBelief<2>;

impl<const N: usize> GaussianBelief<N> {
    pub fn new(mean: SVector<f64, N>, cov: SMatrix<f64, N, N>) -> Self {
        Self { mean, cov }
    }

    /// Check the belief invariants: finite entries, covariance symmetric
    /// within [`SYMMETRY_TOL`] (relative) and positive definite.
    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().any(|v| !v.is_finite()) || self.cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotSpd {
                context: "belief has non-finite entries",
            });
        }
        let scale = self.cov.amax().max(1.0);
        for i in 0..N {
            for j in (i + 1)..N {
                if (self.cov[(i, j)] - self.cov[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NotSpd {
                        context: "covariance not symmetric",
                    });
                }
            }
        }
        Cholesky::new(self.cov).ok_or(Error::NotSpd {
            context: "covariance not positive definite",
        })?;
        Ok(())
    }
}

/// Invert a symmetric positive definite matrix via Cholesky.
///
/// The result is explicitly symmetrized so repeated inversions do not
/// accumulate asymmetry.
pub fn spd_inverse<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<SMatrix<f64, N, N>> {
    let chol = Cholesky::new(*m).ok_or(Error::NotSpd {
        context: "spd_inverse",
    })?;
    Ok(symmetrize(&chol.inverse()))
}

/// Replace a nearly-symmetric matrix by its symmetric part `(m + m^T) / 2`.
pub fn symmetrize<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (m + m.transpose()) * 0.5
}

/// Draw one sample from a Gaussian belief.
///
/// Returns `mean + L z` where `L L^T = cov` and `z` is a vector of
/// independent standard normals drawn in index order, so the output is a
/// pure function of the RNG state. An exactly-zero covariance returns the
/// mean (degenerate distribution); any other non-PD covariance is an error.
pub fn sample_gaussian<const N: usize, R: Rng>(
    rng: &mut R,
    belief: &GaussianBelief<N>,
) -> Result<SVector<f64, N>> {
    if belief.cov.iter().all(|&v| v == 0.0) {
        return Ok(belief.mean);
    }
    let chol = Cholesky::new(belief.cov).ok_or(Error::NotSpd {
        context: "sample_gaussian",
    })?;
    let z = SVector::<f64, N>::from_fn(|_, _| rng.sample(StandardNormal));
    Ok(belief.mean + chol.l() * z)
}

/// Seeded random source with independent substreams.
///
/// One root seed is split into per-purpose streams so that, e.g., changing
/// the sensing policy cannot perturb the process-noise realization of a
/// paired run.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Substream tags used by the closed loop.
pub mod streams {
    /// Process noise driving the true dynamics.
    pub const PROCESS: u64 = 1;
    /// Measurement noise on the range/azimuth observation.
    pub const MEASUREMENT: u64 = 2;
    /// Policy-internal randomness (random-sensing baseline).
    pub const POLICY: u64 = 3;
}
