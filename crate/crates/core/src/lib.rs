//! Exact symbolic computation for extended affine Hecke algebras and their
//! categorification by graded bimodules.
//!
//! The crate is organised in layers, each usable on its own:
//!
//! * [`rootdata`]: rank-≤2 root data (A1, A1xA1, A2, B2, G2) over a weight or
//!   root lattice, with root systems, finite Weyl groups, and the extended
//!   affine story (fundamental group, dominance order).
//! * [`affweyl`]: the extended affine Weyl group as pairs `t_λ · w`, word
//!   problems, lengths, positive lifts, and braid words.
//! * [`hecke`]: the extended affine Hecke algebra in the Bernstein
//!   presentation over `Z[v, v^{-1}]` (`q = v²`), plus its antispherical
//!   module.
//! * [`polyalg`]: the graded polynomial algebra the bimodule category lives
//!   over, with the affine Weyl action and Demazure operators.
//! * [`bimod`]: graded bimodules presented by commuting matrices, tensor
//!   product, graph bimodules, the elementary bimodules `R_i`, standard
//!   filtrations, and the antispherical quotient category.
//! * [`homotopy`]: bounded complexes of bimodules, Rouquier complexes,
//!   convolution, minimal models, and isomorphism testing.
//! * [`decat`]: class maps from bimodules and complexes back to the Hecke
//!   algebra and the antispherical module, with cross-checks.
//!
//! All arithmetic is exact: Laurent polynomials over `i128` / `BigInt` on the
//! algebra side and arbitrary-precision rationals on the bimodule side.
//! Results are deterministic; every map iterates in key order.

pub mod affweyl;
pub mod bimod;
pub mod decat;
pub mod hecke;
pub mod homotopy;
pub mod laurent;
pub mod polyalg;
pub mod rootdata;

mod guide;

pub use rootdata::{Lattice, RootDatum, RootSystemType};
