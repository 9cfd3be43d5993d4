//! Arithmetic of SL2 over Fp[t] and its congruence quotients: expander
//! diagnostics on Cayley graphs, exact random-walk measures, and sieve
//! experiment drivers.

pub mod cayley;
pub mod cli;
pub mod par;
pub mod polyring;
pub mod quotient;
pub mod sieve;
pub mod sl2;
pub mod walker;
