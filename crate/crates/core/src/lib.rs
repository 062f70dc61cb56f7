//! The Lambek calculus `L*`, its extension `!L*` with a relevant modality,
//! and `L*` with Buszkowski rules: proof search, proof checking, cut
//! elimination, grammar encodings and a categorial parser.

pub mod calculus;
pub mod encoding;
pub mod formula;
pub mod grammar;
pub mod lingparse;
pub mod prover;
pub mod syntax;
