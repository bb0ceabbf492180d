//! Runge–Kutta integrators for ODEs on symmetric spaces.
//!
//! Steps are taken in the tangent space at the current point with the
//! geodesic exponential, inverse parallel transport and `dExp⁻¹`, so every
//! step lands exactly on the manifold. Three geometries are provided: the
//! sphere [`sphere::Sphere`], hyperbolic space in the hyperboloid model
//! [`hyperbolic::Hyperboloid`] and SPD matrices [`spd::SpdManifold`].
//!
//! ```
//! use symmflow_core::prelude::*;
//!
//! let sphere = Sphere::new(2);
//! let rk4 = builtin_tableau("rk4").unwrap();
//! let omega = Vector::new(vec![0.0, 0.0, 1.0]);
//! let field = |y: &SpherePoint| {
//!     let y = y.as_vector();
//!     Vector::new(vec![
//!         omega[1] * y[2] - omega[2] * y[1],
//!         omega[2] * y[0] - omega[0] * y[2],
//!         omega[0] * y[1] - omega[1] * y[0],
//!     ])
//! };
//! let y0 = SpherePoint::new(Vector::new(vec![1.0, 0.0, 0.0])).unwrap();
//! let (traj, _) = integrate(&sphere, &rk4, &field, &y0, 0.1, 10, StepOptions::default()).unwrap();
//! let end = traj.last().unwrap().as_vector();
//! assert!((end[0] - 1f64.cos()).abs() < 1e-6);
//! ```

pub mod error;
pub mod hyperbolic;
pub mod linalg;
pub mod series;
pub mod space;
pub mod spd;
pub mod sphere;
pub mod tableau;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::hyperbolic::{chi_integrate, chi_step, HyperPoint, Hyperboloid};
    pub use crate::linalg::{mat_exp, minkowski, spd_sqrt, sym_eig, Matrix, SymMatrix, Vector};
    pub use crate::series::{DexpinvPolicy, DexpinvSeries};
    pub use crate::space::{cssi_step, integrate, StepOptions, StepRecord, SymmetricSpace, Tangent};
    pub use crate::spd::{csgi_integrate, csgi_step, SpdManifold, SpdPoint, SqrtPolicy};
    pub use crate::sphere::{csi_integrate, csi_step, Sphere, SpherePoint};
    pub use crate::tableau::{builtin_tableau, BuiltinTableau, ButcherTableau};
}
