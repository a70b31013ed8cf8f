//! Exact computation of intersection-cohomology tables, tau invariants, and
//! perverse signatures for even-dimensional spaces whose singular set is
//! resolved by a fibration: the end of the space looks like a mapping
//! cylinder of a fiber bundle Y -> B with fiber F, and the singular space is
//! obtained by coning off the fibers.
//!
//! Everything runs over exact rational arithmetic. Closed-form answers
//! (truncation tables, shift amounts, signature contributions) are always
//! paired with brute-force oracles (mechanical page-turning, simplicial
//! cup-product pairings) so the two routes can be checked against each other.
//!
//! Module map:
//! - [`exactlin`]: dense rational matrices, fraction-free elimination,
//!   kernels, images, quotients, Sylvester signatures.
//! - [`complexes`]: finite cochain complexes, cohomology, tensor products,
//!   mapping cones.
//! - [`simplicial`]: simplicial pairs, simplicial cohomology, cup products,
//!   the interior intersection form, and concrete fixtures.
//! - [`ssq`]: first-quadrant multiplicative spectral data, page turning,
//!   limit records.
//! - [`perversity`]: cutoff calculus for extended perversities and the
//!   weight-to-shift dictionary.
//! - [`cone_end`]: truncation tables for the coned end (closed form and
//!   oracle), middle-degree image, tau invariants, end signature, and the
//!   block Gram assembly.
//! - [`assemble`]: gluing interior and end into global signatures, duality
//!   and consistency verifiers, Novikov additivity checks.
//! - [`corpus`]: seeded random generators for bundle-like spectral data,
//!   used by the randomized verification suites.
//! - [`cli`]: the document format and the command-line front end.

pub mod assemble;
pub mod cli;
pub mod complexes;
pub mod cone_end;
pub mod corpus;
pub mod exactlin;
pub mod perversity;
pub mod simplicial;
pub mod ssq;
