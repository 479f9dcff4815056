//! Harris graphical construction of heat-bath Glauber dynamics.
//!
//! Every torus site carries a rate-1 Poisson clock with i.i.d. uniform
//! marks. A trajectory is a deterministic function of the initial state and
//! this noise, so symmetries of the dynamics become exact couplings obtained
//! by transforming the noise.

mod coupling;
mod evolve;
mod noise;
mod rule;

pub use coupling::{check_antisymmetric_coupling, check_covariance, CouplingIdentity, CouplingReport};
pub use evolve::{evolve, Replay, Trajectory, UpdateEvent};
pub use noise::{generate_noise, site_stream, transform_noise, NoiseStream, Provenance, Ring, MAX_SIDE};
pub use rule::{heat_bath_prob, UpdateRule};
