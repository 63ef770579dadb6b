//! Holomorphs of cyclic groups, their regular subgroups, and normality of
//! circulant graphs.
//!
//! Throughout, `Z_n` is written additively: the translation `a^t` of the
//! multiplicative notation is the residue `t`, and automorphisms act as
//! multipliers.

pub mod holomorph;
pub mod numtheory;
pub mod permgroup;
pub mod regular_classify;
pub mod circulant;
pub mod verify;
