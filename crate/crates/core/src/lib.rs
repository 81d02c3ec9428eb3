pub mod corpus;
pub mod error;
pub mod fan;
pub mod io;
pub mod linalg;
pub mod matroid;
pub mod mixedvol;
pub mod poly;
pub mod set;

pub use error::{Error, Result};
pub use fan::{bergman_fan, Cone, MinkowskiWeight, Ray, SimplicialFan};
pub use matroid::{Chain, Flat, FlatLattice, Matroid};
pub use mixedvol::{Genericity, VolPolynomial};
pub use poly::{Rational, RationalPoly, VarId};
pub use set::ElementSet;
