//! Explicit arithmetic-lattice objects in exact arithmetic.
//!
//! * [`numutil`]: Jacobsthal shifts and coprime rational approximation.
//! * [`hyperbolic`]: upper half-plane and disk geometry, isometric circles.
//! * [`gamma0`]: Ford domains and certified generating sets of `Gamma_0(Q)`.
//! * [`ssgraph`]: supersingular `l`-isogeny graphs over `F_{p^2}`.
//! * [`spectral`]: eigendata, Hecke and non-backtracking walk identities,
//!   diameter certificates.
//! * [`quatlat`]: indefinite quaternion orders, unit balls and covering radii.

pub mod gamma0;
pub mod hyperbolic;
pub mod numutil;
pub mod quatlat;
pub mod spectral;
pub mod ssgraph;

pub use gamma0::{BoundaryCircle, FordBoundary, LatticeElement, Word};
pub use hyperbolic::{DiskMotion, IsometricCircle, Motion, RealMotion, UHPoint};
pub use numutil::{ApproxResult, Rational};
pub use quatlat::{EichlerOrderData, QuatAlgebra, UnitBallResult};
pub use spectral::{SpectrumBundle, WalkCounts};
pub use ssgraph::{Fp2, Fp2Elem, SSGraph};
