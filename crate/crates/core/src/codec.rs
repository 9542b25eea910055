//! Bit-exact encoding and decoding of the 704-byte ticket payload.
//!
//! Layout, all offsets inclusive, all integers big-endian:
//!
//! ```text
//! 0        version        (1B, = 0x01)
//! 1        suite_id       (1B)
//! 2-3      tc_id          (2B)
//! 4-7      printer_id     (4B)
//! 8-15     ticket_id      (8B)
//! 16-19    issue_ts       (4B)
//! 20-23    validity_start (4B)
//! 24-27    validity_end   (4B)
//! 28-59    provider data  (32B, opaque)
//! 60-571   marker pattern (512B, opaque)
//! 572      signature length L (1B, 1 <= L <= 131)
//! 573-703  signature value (L bytes) + zero padding (131 - L bytes)
//! ```
//!
//! Bytes 0..=571 form the signed region: everything except the signature
//! field itself. Re-encoding a decoded payload reproduces the input exactly.

use alloc::vec::Vec;
use core::fmt;

use crate::crypto;

pub const CODE_LEN: usize = 704;
pub const METADATA_LEN: usize = 28;
pub const PROVIDER_LEN: usize = 32;
pub const PATTERN_LEN: usize = 512;
pub const SIGNATURE_FIELD_LEN: usize = 132;
pub const MAX_SIGNATURE_LEN: usize = 131;
pub const SIGNED_REGION_LEN: usize = 572;

pub const OFFSET_VERSION: usize = 0;
pub const OFFSET_SUITE: usize = 1;
pub const OFFSET_TC_ID: usize = 2;
pub const OFFSET_PRINTER_ID: usize = 4;
pub const OFFSET_TICKET_ID: usize = 8;
pub const OFFSET_ISSUE_TS: usize = 16;
pub const OFFSET_VALIDITY_START: usize = 20;
pub const OFFSET_VALIDITY_END: usize = 24;
pub const OFFSET_PROVIDER: usize = 28;
pub const OFFSET_PATTERN: usize = 60;
pub const OFFSET_SIG_LEN: usize = 572;
pub const OFFSET_SIG: usize = 573;

pub const FORMAT_VERSION: u8 = 1;

// the byte budget partitions exactly
const _: () = assert!(METADATA_LEN + PROVIDER_LEN + PATTERN_LEN + SIGNATURE_FIELD_LEN == CODE_LEN);
const _: () = assert!(OFFSET_PROVIDER == METADATA_LEN);
const _: () = assert!(OFFSET_PATTERN == METADATA_LEN + PROVIDER_LEN);
const _: () = assert!(OFFSET_SIG_LEN == SIGNED_REGION_LEN);
const _: () = assert!(OFFSET_SIG + MAX_SIGNATURE_LEN == CODE_LEN);

/// A component given to the encoder with the wrong size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentSizeError {
    Pattern { got: usize },
    Provider { got: usize },
    Signature { got: usize },
}

impl fmt::Display for ComponentSizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentSizeError::Pattern { got } => {
                write!(f, "marker pattern must be exactly {PATTERN_LEN} bytes, got {got}")
            }
            ComponentSizeError::Provider { got } => {
                write!(f, "provider data must be exactly {PROVIDER_LEN} bytes, got {got}")
            }
            ComponentSizeError::Signature { got } => {
                write!(f, "signature must be 1..={MAX_SIGNATURE_LEN} bytes, got {got}")
            }
        }
    }
}

impl core::error::Error for ComponentSizeError {}

/// A raw buffer that is not a well-formed payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureError {
    Length { got: usize },
    Version { got: u8 },
    UnknownSuite { got: u8 },
    SignatureLength { got: u8 },
    Padding { offset: usize },
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::Length { got } => {
                write!(f, "payload must be {CODE_LEN} bytes, got {got}")
            }
            StructureError::Version { got } => {
                write!(f, "unsupported format version {got}")
            }
            StructureError::UnknownSuite { got } => {
                write!(f, "unknown crypto suite 0x{got:02x}")
            }
            StructureError::SignatureLength { got } => {
                write!(f, "signature length byte {got} outside 1..={MAX_SIGNATURE_LEN}")
            }
            StructureError::Padding { offset } => {
                write!(f, "nonzero signature padding at offset {offset}")
            }
        }
    }
}

impl core::error::Error for StructureError {}

/// The physically random marker pigment pattern, treated as 512 opaque bytes.
#[derive(Clone, PartialEq, Eq)]
pub struct MarkerPattern([u8; PATTERN_LEN]);

impl MarkerPattern {
    pub fn new(bytes: [u8; PATTERN_LEN]) -> Self {
        MarkerPattern(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, ComponentSizeError> {
        let arr: [u8; PATTERN_LEN] = bytes
            .try_into()
            .map_err(|_| ComponentSizeError::Pattern { got: bytes.len() })?;
        Ok(MarkerPattern(arr))
    }

    pub fn as_bytes(&self) -> &[u8; PATTERN_LEN] {
        &self.0
    }
}

impl fmt::Debug for MarkerPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MarkerPattern({:02x}{:02x}{:02x}{:02x}.., {} bytes)",
            self.0[0],
            self.0[1],
            self.0[2],
            self.0[3],
            self.0.len()
        )
    }
}

/// Opaque ticket-provider data; never interpreted by this library.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct ProviderData([u8; PROVIDER_LEN]);

impl ProviderData {
    pub fn new(bytes: [u8; PROVIDER_LEN]) -> Self {
        ProviderData(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, ComponentSizeError> {
        let arr: [u8; PROVIDER_LEN] = bytes
            .try_into()
            .map_err(|_| ComponentSizeError::Provider { got: bytes.len() })?;
        Ok(ProviderData(arr))
    }

    pub fn as_bytes(&self) -> &[u8; PROVIDER_LEN] {
        &self.0
    }
}

impl fmt::Debug for ProviderData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ProviderData({:02x}{:02x}{:02x}{:02x}.., {} bytes)",
            self.0[0],
            self.0[1],
            self.0[2],
            self.0[3],
            self.0.len()
        )
    }
}

/// The 28-byte metadata block at the head of every payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TicketMetadata {
    pub version: u8,
    pub suite_id: u8,
    pub tc_id: u16,
    pub printer_id: u32,
    pub ticket_id: u64,
    pub issue_ts: u32,
    pub validity_start: u32,
    pub validity_end: u32,
}

impl TicketMetadata {
    pub fn to_bytes(&self) -> [u8; METADATA_LEN] {
        let mut out = [0u8; METADATA_LEN];
        out[OFFSET_VERSION] = self.version;
        out[OFFSET_SUITE] = self.suite_id;
        out[OFFSET_TC_ID..OFFSET_PRINTER_ID].copy_from_slice(&self.tc_id.to_be_bytes());
        out[OFFSET_PRINTER_ID..OFFSET_TICKET_ID].copy_from_slice(&self.printer_id.to_be_bytes());
        out[OFFSET_TICKET_ID..OFFSET_ISSUE_TS].copy_from_slice(&self.ticket_id.to_be_bytes());
        out[OFFSET_ISSUE_TS..OFFSET_VALIDITY_START].copy_from_slice(&self.issue_ts.to_be_bytes());
        out[OFFSET_VALIDITY_START..OFFSET_VALIDITY_END]
            .copy_from_slice(&self.validity_start.to_be_bytes());
        out[OFFSET_VALIDITY_END..METADATA_LEN].copy_from_slice(&self.validity_end.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8; METADATA_LEN]) -> Self {
        let be16 = |r: core::ops::Range<usize>| u16::from_be_bytes(bytes[r].try_into().unwrap());
        let be32 = |r: core::ops::Range<usize>| u32::from_be_bytes(bytes[r].try_into().unwrap());
        let be64 = |r: core::ops::Range<usize>| u64::from_be_bytes(bytes[r].try_into().unwrap());
        TicketMetadata {
            version: bytes[OFFSET_VERSION],
            suite_id: bytes[OFFSET_SUITE],
            tc_id: be16(OFFSET_TC_ID..OFFSET_PRINTER_ID),
            printer_id: be32(OFFSET_PRINTER_ID..OFFSET_TICKET_ID),
            ticket_id: be64(OFFSET_TICKET_ID..OFFSET_ISSUE_TS),
            issue_ts: be32(OFFSET_ISSUE_TS..OFFSET_VALIDITY_START),
            validity_start: be32(OFFSET_VALIDITY_START..OFFSET_VALIDITY_END),
            validity_end: be32(OFFSET_VALIDITY_END..METADATA_LEN),
        }
    }

    /// validity_start <= validity_end and issue_ts <= validity_end.
    /// Issuance paths require this; decoding does not re-check it, since the
    /// structural rules alone define well-formedness of raw buffers.
    pub fn times_consistent(&self) -> bool {
        self.validity_start <= self.validity_end && self.issue_ts <= self.validity_end
    }
}

/// Variable-size signature (1..=131 bytes), stored length-prefixed and
/// zero-padded into a fixed 132-byte field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureField(Vec<u8>);

impl SignatureField {
    pub fn new(bytes: &[u8]) -> Result<Self, ComponentSizeError> {
        if bytes.is_empty() || bytes.len() > MAX_SIGNATURE_LEN {
            return Err(ComponentSizeError::Signature { got: bytes.len() });
        }
        Ok(SignatureField(bytes.to_vec()))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor enforces 1..=131 bytes
    }
}

/// A decoded 704-byte code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TicketPayload {
    pub metadata: TicketMetadata,
    pub provider: ProviderData,
    pub pattern: MarkerPattern,
    pub signature: SignatureField,
}

impl TicketPayload {
    pub fn encode(&self) -> [u8; CODE_LEN] {
        encode_payload(&self.metadata, &self.provider, &self.pattern, &self.signature)
    }

    pub fn decode(raw: &[u8]) -> Result<Self, StructureError> {
        decode_payload(raw)
    }
}

/// Serialize the signed region: metadata, provider data and pattern.
pub fn encode_signed_region(
    meta: &TicketMetadata,
    provider: &ProviderData,
    pattern: &MarkerPattern,
) -> [u8; SIGNED_REGION_LEN] {
    let mut out = [0u8; SIGNED_REGION_LEN];
    out[..METADATA_LEN].copy_from_slice(&meta.to_bytes());
    out[OFFSET_PROVIDER..OFFSET_PATTERN].copy_from_slice(provider.as_bytes());
    out[OFFSET_PATTERN..SIGNED_REGION_LEN].copy_from_slice(pattern.as_bytes());
    out
}

/// Assemble the full 704-byte code. Component sizes are enforced by the
/// component types themselves, so assembly cannot fail.
pub fn encode_payload(
    meta: &TicketMetadata,
    provider: &ProviderData,
    pattern: &MarkerPattern,
    sig: &SignatureField,
) -> [u8; CODE_LEN] {
    let mut out = [0u8; CODE_LEN];
    out[..SIGNED_REGION_LEN].copy_from_slice(&encode_signed_region(meta, provider, pattern));
    out[OFFSET_SIG_LEN] = sig.len() as u8;
    out[OFFSET_SIG..OFFSET_SIG + sig.len()].copy_from_slice(sig.as_bytes());
    out
}

/// Decode and structurally validate a raw buffer.
///
/// Rejects, in order: wrong length, wrong version, unknown suite, signature
/// length byte outside 1..=131, and nonzero padding after the signature.
pub fn decode_payload(raw: &[u8]) -> Result<TicketPayload, StructureError> {
    let raw: &[u8; CODE_LEN] = raw
        .try_into()
        .map_err(|_| StructureError::Length { got: raw.len() })?;
    if raw[OFFSET_VERSION] != FORMAT_VERSION {
        return Err(StructureError::Version {
            got: raw[OFFSET_VERSION],
        });
    }
    if crypto::suite_by_id(raw[OFFSET_SUITE]).is_none() {
        return Err(StructureError::UnknownSuite {
            got: raw[OFFSET_SUITE],
        });
    }
    let sig_len = raw[OFFSET_SIG_LEN];
    if sig_len == 0 || sig_len as usize > MAX_SIGNATURE_LEN {
        return Err(StructureError::SignatureLength { got: sig_len });
    }
    let sig_end = OFFSET_SIG + sig_len as usize;
    if let Some(i) = (sig_end..CODE_LEN).find(|&i| raw[i] != 0) {
        return Err(StructureError::Padding { offset: i });
    }

    let mut meta_bytes = [0u8; METADATA_LEN];
    meta_bytes.copy_from_slice(&raw[..METADATA_LEN]);
    Ok(TicketPayload {
        metadata: TicketMetadata::from_bytes(&meta_bytes),
        provider: ProviderData::from_slice(&raw[OFFSET_PROVIDER..OFFSET_PATTERN]).unwrap(),
        pattern: MarkerPattern::from_slice(&raw[OFFSET_PATTERN..SIGNED_REGION_LEN]).unwrap(),
        signature: SignatureField::new(&raw[OFFSET_SIG..sig_end]).unwrap(),
    })
}

/// The bytes covered by the digital signature: offsets 0..=571.
pub fn signed_region(raw: &[u8]) -> Result<&[u8], StructureError> {
    if raw.len() != CODE_LEN {
        return Err(StructureError::Length { got: raw.len() });
    }
    Ok(&raw[..SIGNED_REGION_LEN])
}
