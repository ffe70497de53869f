//! Numerical model of a cold-atom vector magnetometer with echo spin squeezing.
//!
//! Layout:
//!
//! - [`field`]: constants, field configuration, Zeeman kinematics
//! - [`pulse`]: four-level Blackman-pulse dynamics and spectra
//! - [`ramsey`]: Ramsey fringes, projection noise and field sensitivity
//! - [`squeeze`]: Dicke-manifold simulation of one-axis twisting and echo protocols
//! - [`cavity`]: driven lossy cavity, coherent-state eigenladder, twisting strength
//! - [`estimate`]: recovering `B` and `θ` from spectra; second-pass planning
//!
//! All angles are radians, fields tesla, frequencies rad/s.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod error;
pub mod estimate;
pub mod field;
pub mod ode;
pub mod optimize;
pub mod pulse;
pub mod ramsey;
pub mod squeeze;
pub mod trace;

pub use error::{Error, Result};

pub(crate) mod par {
    //! Order-preserving map over a slice; parallel when the `parallel`
    //! feature is on. Output never depends on the thread count.

    #[cfg(feature = "parallel")]
    pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        F: Fn(&T) -> U,
    {
        items.iter().map(f).collect()
    }
}
