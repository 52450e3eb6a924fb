//! Rational homology and intersection rings of 3-dimensional graph manifolds.

pub mod cli;
pub mod consum;
pub mod exactlin;
pub mod homology;
pub mod intersection;
pub mod plumbing;
pub mod random;
pub mod trivector;
