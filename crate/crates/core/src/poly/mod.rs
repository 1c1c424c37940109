//! Exact polynomial arithmetic, resultants and real root isolation.

pub mod bivar;
pub mod interval;
pub mod linalg;
pub mod quotient;
pub mod roots;
pub mod upoly;

pub use bivar::{resultant, resultant_y, subresultant1_y, BiPoly};
pub use interval::RatInterval;
pub use roots::{real_roots, real_roots_in, RealAlg};
pub use quotient::QuotientRing;
pub use upoly::{rat, ratio, QPoly};
