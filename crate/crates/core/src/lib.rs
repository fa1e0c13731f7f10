//! Capacity-equivocation and secrecy capacity regions of generalized multiple
//! access channels with one confidential message set.
//!
//! User 1 sends a common message `W0` and a private message `W1` that must be
//! kept from user 2; user 2 helps with `W0`. The crate covers the
//! deterministic example, the binary GMAC with a BSC tap and the Gaussian
//! GMAC, together with an exact oracle for short explicit codes.
//!
//! All information quantities are in bits.

pub mod channels;
pub mod cli;
pub mod curves;
pub mod entropy;
pub mod error;
pub mod lemmas;
pub mod oracle;
pub mod regions;

pub use error::{Error, Result};
