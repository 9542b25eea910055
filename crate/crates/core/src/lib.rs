//! Protocol library for cryptographically sealed random-pattern tickets.
//!
//! A printed ticket carries a physically random marker pattern whose digital
//! image, together with issuer metadata and provider data, is packed into a
//! fixed 704-byte code and protected by an elliptic-curve signature. A
//! trusted center distributes the set of currently valid signing keys and,
//! when printers sign locally, a log of reported issuance transactions, so
//! that offline readers can reject forged, backdated or unreported tickets
//! while keeping legitimate pre-theft tickets valid.
//!
//! Module map:
//!
//! - [`codec`] - bit-exact encoding of the 704-byte payload.
//! - [`crypto`] - EC-Schnorr and ECDSA suites over P-256, keys, nonces,
//!   pattern hashing.
//! - [`trust`] - trusted-center state machine, key revocation, signed
//!   key-list and transaction-list documents.
//! - [`devices`] - printer issuance and the reader's offline validation
//!   decision procedure.
//! - [`simnet`] - deterministic in-process transport with authenticated
//!   envelopes, plus a scripted scenario runner.
//!
//! The crate is `no_std` (with `alloc`); file handling and the command-line
//! frontend live in the companion `ticketseal` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod arith;
mod curve;

pub mod codec;
pub mod crypto;
pub mod devices;
pub mod simnet;
pub mod trust;

pub use codec::{MarkerPattern, ProviderData, SignatureField, TicketMetadata, TicketPayload};
pub use crypto::{NonceSource, PrivateKey, PublicKey};
pub use devices::{ReaderTrustStore, RejectReason, ValidationVerdict};
pub use trust::{SigningMode, TrustedCenter};
