pub mod aberth;
pub mod multipoly;
pub mod resultant;
pub mod zeta;

pub use aberth::{aberth_from, roots_aberth, Root, UniPolyC};
pub use multipoly::{int, rat, Monomial, MultiPoly};
pub use resultant::{discriminant, resultant};
pub use zeta::ZetaRational;
