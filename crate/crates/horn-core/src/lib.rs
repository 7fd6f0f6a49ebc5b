//! Elliptic multiplicative Horn problem in PU(2,1).

pub mod angle;
pub mod horn_low;
pub mod isometry;
pub mod linalg;
pub mod oracle;
pub mod parse;
pub mod polytopes;
pub mod slice;
pub mod walls;
