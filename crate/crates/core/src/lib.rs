//! Structure groupoids of quasifold atlases, their counting-measure
//! convolution algebras, equivalence bimodules between atlases, and the
//! affine lifting algorithms, all over exact ℚ + ℚα arithmetic.

pub mod numbers;
pub mod groupoid;
pub mod atlas;
pub mod algebra;
pub mod mrw;
pub mod lifting;
