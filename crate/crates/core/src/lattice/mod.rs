//! Torus geometry: spin configurations, symmetry actions, integer
//! sublattices with their cosets, and exact block magnetization.

mod config;
mod sublattice;

pub use config::{block_magnetization, Block, Magnetization, Spin, SpinConfig, Vector2};
pub use sublattice::{
    enumerate_cosets, minimal_torus_side, Coset, CosetPartition, SublatticeSpec,
};

/// `result_i = s * config_{i - v}` with `s = -1` when `flip` is set.
pub fn apply_symmetry(config: &SpinConfig, translation: Vector2, flip: bool) -> SpinConfig {
    config.apply_symmetry(translation, flip)
}
