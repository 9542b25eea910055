//! Shared test support. The oracle submodule is a from-first-principles
//! reference implementation and must stay independent of the library's own
//! arithmetic: big-integer modular math, affine coordinates, plain
//! double-and-add, and a self-contained SHA-256.

// each test binary uses a different subset of the oracle
#![allow(dead_code)]

pub mod oracle;
