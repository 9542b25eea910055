//! Trusted-center state machine: key registry with revocation, transaction
//! log, central ticket signing, and signed canonical documents.
//!
//! Two deployment variants exist. In central mode only the center holds a
//! ticket-signing key and every signature request passes through it, which is
//! what lets it pin the issue timestamp. In distributed mode printers sign
//! locally but must report every issuance; the center's exported transaction
//! list is what keeps legitimate pre-theft tickets alive after a revocation.
//!
//! Documents are line-based UTF-8 with lowercase hex, signed by the center's
//! root key over every byte that precedes the trailing `sig=` line. Equal
//! state always serializes and signs to identical bytes, so exports can be
//! compared, cached and diffed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::codec::{
    self, ComponentSizeError, MarkerPattern, ProviderData, SignatureField, TicketMetadata,
    CODE_LEN,
};
use crate::crypto::{
    pattern_hash_full, suite_sign, suite_verify, CryptoError, NonceSource, PrivateKey, PublicKey,
    SIGNATURE_LEN,
};
use crate::curve::AffinePoint;

pub const KEYLIST_FORMAT: &str = "keylist.v1";
pub const TXLIST_FORMAT: &str = "txlist.v1";

/// key_id reserved for the center's own ticket-signing key.
pub const TC_KEY_ID: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigningMode {
    Central,
    Distributed,
}

impl SigningMode {
    pub fn token(self) -> &'static str {
        match self {
            SigningMode::Central => "central",
            SigningMode::Distributed => "distributed",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "central" => Some(SigningMode::Central),
            "distributed" => Some(SigningMode::Distributed),
            _ => None,
        }
    }
}

impl fmt::Display for SigningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KeyRole {
    /// Ticket-signing key held by the center itself (central mode).
    TcTicketSigning,
    /// Ticket-signing key held by a printer (distributed mode).
    PrinterTicketSigning,
    /// Communication key; authenticates envelopes, never signs tickets.
    Comms,
}

impl KeyRole {
    fn doc_token(self) -> Option<&'static str> {
        match self {
            KeyRole::TcTicketSigning => Some("tc"),
            KeyRole::PrinterTicketSigning => Some("printer"),
            KeyRole::Comms => None,
        }
    }

    fn from_doc_token(token: &str) -> Option<Self> {
        match token {
            "tc" => Some(KeyRole::TcTicketSigning),
            "printer" => Some(KeyRole::PrinterTicketSigning),
            _ => None,
        }
    }
}

/// One registered key: identity, role, the bare public point and its
/// registration/revocation times. Suites are not recorded here; a ticket
/// names the suite that interprets the point in its own metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRecord {
    pub key_id: u32,
    pub role: KeyRole,
    pub public_point: [u8; 64],
    pub registered_at: u64,
    pub revoked_at: Option<u64>,
}

impl KeyRecord {
    pub fn is_revoked(&self) -> bool {
        self.revoked_at.is_some()
    }

    fn is_revoked_at(&self, now: u64) -> bool {
        matches!(self.revoked_at, Some(t) if t <= now)
    }
}

/// Signed catalog of trusted ticket-signing keys and the deployment mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyListDocument {
    pub tc_id: u16,
    pub issued_at: u64,
    pub signing_mode: SigningMode,
    /// Ticket-signing entries only, sorted by (key_id, registered_at).
    pub entries: Vec<KeyRecord>,
    pub signature: [u8; SIGNATURE_LEN],
}

/// One issuance reported to the center (full-width pattern hash).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionRecord {
    pub printer_id: u32,
    pub ticket_id: u64,
    pub issue_ts: u32,
    pub validity_end: u32,
    pub pattern_hash: [u8; 32],
    pub reported_at: u64,
}

/// One exported transaction as readers store it: the hash is truncated and
/// the report time is no longer needed once the export filter has run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionEntry {
    pub printer_id: u32,
    pub ticket_id: u64,
    pub issue_ts: u32,
    pub validity_end: u32,
    pub pattern_hash: Vec<u8>,
}

/// Signed list of pre-revocation transactions from revoked printers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionListDocument {
    pub tc_id: u16,
    pub issued_at: u64,
    pub truncation: u8,
    /// Sorted by (printer_id, ticket_id), no duplicates.
    pub records: Vec<TransactionEntry>,
    pub signature: [u8; SIGNATURE_LEN],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrustError {
    DuplicateKey { key_id: u32 },
    UnknownKey { key_id: u32 },
    AlreadyRevoked { key_id: u32 },
    RefusedRevoked { key_id: u32 },
    ModeMismatch,
    SkewRejected { issue_ts: u32, now: u64 },
    RangeError { value: usize },
    ReservedKeyId { key_id: u32 },
    TimestampOrder { key_id: u32 },
    PrinterIdMismatch { claimed: u32, authenticated: u32 },
    Crypto(CryptoError),
    ComponentSize(ComponentSizeError),
}

impl fmt::Display for TrustError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrustError::DuplicateKey { key_id } => {
                write!(f, "key {key_id} already registered and unrevoked")
            }
            TrustError::UnknownKey { key_id } => write!(f, "key {key_id} not registered"),
            TrustError::AlreadyRevoked { key_id } => write!(f, "key {key_id} already revoked"),
            TrustError::RefusedRevoked { key_id } => {
                write!(f, "refused: key {key_id} is revoked")
            }
            TrustError::ModeMismatch => write!(f, "operation not available in this signing mode"),
            TrustError::SkewRejected { issue_ts, now } => {
                write!(f, "issue timestamp {issue_ts} too far from center time {now}")
            }
            TrustError::RangeError { value } => {
                write!(f, "truncation {value} outside 1..=32")
            }
            TrustError::ReservedKeyId { key_id } => write!(f, "key id {key_id} is reserved"),
            TrustError::TimestampOrder { key_id } => {
                write!(f, "revocation of key {key_id} predates its registration")
            }
            TrustError::PrinterIdMismatch {
                claimed,
                authenticated,
            } => write!(
                f,
                "metadata names printer {claimed} but the request came from {authenticated}"
            ),
            TrustError::Crypto(e) => write!(f, "crypto failure: {e}"),
            TrustError::ComponentSize(e) => write!(f, "component size: {e}"),
        }
    }
}

impl core::error::Error for TrustError {}

impl From<CryptoError> for TrustError {
    fn from(e: CryptoError) -> Self {
        TrustError::Crypto(e)
    }
}

impl From<ComponentSizeError> for TrustError {
    fn from(e: ComponentSizeError) -> Self {
        TrustError::ComponentSize(e)
    }
}

/// A document that fails to parse as its canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DocumentError {
    pub line: usize,
    pub reason: &'static str,
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed document at line {}: {}", self.line, self.reason)
    }
}

impl core::error::Error for DocumentError {}

fn doc_err(line: usize, reason: &'static str) -> DocumentError {
    DocumentError { line, reason }
}

/// Sign canonical document bytes with the center's root key. Nonces are
/// derived deterministically so equal state exports byte-identical documents.
pub fn sign_document_bytes(
    root: &PrivateKey,
    bytes: &[u8],
) -> Result<[u8; SIGNATURE_LEN], CryptoError> {
    let mut nonce = NonceSource::deterministic(0);
    suite_sign(root, bytes, &mut nonce)
}

// ---------------------------------------------------------------------------
// canonical serialization
// ---------------------------------------------------------------------------

fn push_hex_line(out: &mut String, prefix: &str, bytes: &[u8]) {
    out.push_str(prefix);
    out.push_str(&hex::encode(bytes));
    out.push('\n');
}

/// Strict lowercase fixed-width hex field.
fn parse_hex_field(s: &str, bytes: usize, line: usize) -> Result<Vec<u8>, DocumentError> {
    if s.len() != bytes * 2 {
        return Err(doc_err(line, "hex field has wrong width"));
    }
    if !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(doc_err(line, "hex field not lowercase hex"));
    }
    hex::decode(s).map_err(|_| doc_err(line, "invalid hex"))
}

/// Canonical decimal: no sign, no leading zeros.
fn parse_decimal(s: &str, line: usize) -> Result<u64, DocumentError> {
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) {
        return Err(doc_err(line, "non-canonical decimal"));
    }
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(doc_err(line, "non-decimal character"));
    }
    s.parse().map_err(|_| doc_err(line, "decimal overflow"))
}

fn parse_decimal_u32(s: &str, line: usize) -> Result<u32, DocumentError> {
    let v = parse_decimal(s, line)?;
    u32::try_from(v).map_err(|_| doc_err(line, "value does not fit 32 bits"))
}

fn strip_field<'a>(part: &'a str, key: &str, line: usize) -> Result<&'a str, DocumentError> {
    part.strip_prefix(key)
        .ok_or(doc_err(line, "unexpected field name"))
}

fn point_checked(bytes: &[u8], line: usize) -> Result<[u8; 64], DocumentError> {
    let arr: [u8; 64] = bytes
        .try_into()
        .map_err(|_| doc_err(line, "public key has wrong width"))?;
    if AffinePoint::from_xy_bytes(&arr).is_none() {
        return Err(doc_err(line, "public key not on the curve"));
    }
    Ok(arr)
}

impl KeyListDocument {
    /// Every canonical byte that the trailing signature covers.
    pub fn signed_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        let _ = writeln!(out, "format={KEYLIST_FORMAT}");
        let _ = writeln!(out, "tc={:04x}", self.tc_id);
        let _ = writeln!(out, "issued={}", self.issued_at);
        let _ = writeln!(out, "mode={}", self.signing_mode);
        for entry in &self.entries {
            let role = entry.role.doc_token().unwrap_or("printer");
            let _ = write!(
                out,
                "key id={:08x} role={role} pub={}",
                entry.key_id,
                hex::encode(entry.public_point)
            );
            let _ = write!(out, " reg={}", entry.registered_at);
            match entry.revoked_at {
                Some(t) => {
                    let _ = writeln!(out, " rev={t}");
                }
                None => {
                    let _ = writeln!(out, " rev=-");
                }
            }
        }
        out.into_bytes()
    }

    /// Full canonical document, signature line included.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = self.signed_bytes();
        let mut sig_line = String::new();
        push_hex_line(&mut sig_line, "sig=", &self.signature);
        out.extend_from_slice(sig_line.as_bytes());
        out
    }

    pub fn verify(&self, root: &PublicKey) -> bool {
        suite_verify(root, &self.signed_bytes(), &self.signature)
    }

    /// Build, order and sign a key list. Entries are sorted by
    /// (key_id, registered_at); at most one unrevoked entry may exist per
    /// key_id, and central mode requires exactly one center entry and no
    /// printer entries.
    pub fn build(
        tc_id: u16,
        issued_at: u64,
        signing_mode: SigningMode,
        mut entries: Vec<KeyRecord>,
        root: &PrivateKey,
    ) -> Result<Self, TrustError> {
        entries.sort_by_key(|e| (e.key_id, e.registered_at));
        let mut doc = KeyListDocument {
            tc_id,
            issued_at,
            signing_mode,
            entries,
            signature: [0; SIGNATURE_LEN],
        };
        doc.check_shape().map_err(|_| TrustError::ModeMismatch)?;
        doc.signature = sign_document_bytes(root, &doc.signed_bytes())?;
        Ok(doc)
    }

    fn check_shape(&self) -> Result<(), &'static str> {
        let mut unrevoked: BTreeMap<u32, usize> = BTreeMap::new();
        let mut tc_entries = 0usize;
        let mut printer_entries = 0usize;
        for entry in &self.entries {
            match entry.role {
                KeyRole::TcTicketSigning => tc_entries += 1,
                KeyRole::PrinterTicketSigning => printer_entries += 1,
                KeyRole::Comms => return Err("comms keys do not belong in a key list"),
            }
            if entry.revoked_at.is_none() {
                *unrevoked.entry(entry.key_id).or_insert(0) += 1;
            }
            if let Some(rev) = entry.revoked_at {
                if rev < entry.registered_at {
                    return Err("revocation predates registration");
                }
            }
        }
        if unrevoked.values().any(|&n| n > 1) {
            return Err("multiple unrevoked entries for one key id");
        }
        match self.signing_mode {
            SigningMode::Central => {
                if tc_entries != 1 || printer_entries != 0 {
                    return Err("central mode lists exactly one center key and no printers");
                }
            }
            SigningMode::Distributed => {
                if tc_entries != 0 {
                    return Err("distributed mode lists printer keys only");
                }
            }
        }
        Ok(())
    }

    pub fn parse(raw: &[u8]) -> Result<Self, DocumentError> {
        let text = core::str::from_utf8(raw).map_err(|_| doc_err(0, "not utf-8"))?;
        let mut lines = DocLines::new(text)?;

        lines.expect_exact("format=keylist.v1", "wrong format line")?;
        let tc_hex = lines.prefixed("tc=")?;
        let tc_bytes = parse_hex_field(tc_hex, 2, lines.current)?;
        let tc_id = u16::from_be_bytes([tc_bytes[0], tc_bytes[1]]);
        let issued_at = parse_decimal(lines.prefixed("issued=")?, lines.current)?;
        let mode_token = lines.prefixed("mode=")?;
        let signing_mode = SigningMode::from_token(mode_token)
            .ok_or(doc_err(lines.current, "unknown signing mode"))?;

        let mut entries = Vec::new();
        loop {
            let line_no = lines.current + 1;
            let line = lines.next().ok_or(doc_err(line_no, "missing sig line"))?;
            if let Some(rest) = line.strip_prefix("sig=") {
                let sig = parse_hex_field(rest, SIGNATURE_LEN, lines.current)?;
                lines.expect_end()?;
                let doc = KeyListDocument {
                    tc_id,
                    issued_at,
                    signing_mode,
                    entries,
                    signature: sig.try_into().unwrap(),
                };
                doc.check_shape().map_err(|r| doc_err(lines.current, r))?;
                return Ok(doc);
            }
            let body = line
                .strip_prefix("key ")
                .ok_or(doc_err(lines.current, "expected key or sig line"))?;
            let mut parts = body.split(' ');
            let ln = lines.current;
            let id_part = strip_field(parts.next().unwrap_or(""), "id=", ln)?;
            let id_bytes = parse_hex_field(id_part, 4, ln)?;
            let key_id = u32::from_be_bytes(id_bytes.try_into().unwrap());
            let role_part = strip_field(parts.next().ok_or(doc_err(ln, "missing role"))?, "role=", ln)?;
            let role = KeyRole::from_doc_token(role_part).ok_or(doc_err(ln, "unknown role"))?;
            let pub_part = strip_field(parts.next().ok_or(doc_err(ln, "missing pub"))?, "pub=", ln)?;
            let public_point = point_checked(&parse_hex_field(pub_part, 64, ln)?, ln)?;
            let reg_part = strip_field(parts.next().ok_or(doc_err(ln, "missing reg"))?, "reg=", ln)?;
            let registered_at = parse_decimal(reg_part, ln)?;
            let rev_part = strip_field(parts.next().ok_or(doc_err(ln, "missing rev"))?, "rev=", ln)?;
            let revoked_at = if rev_part == "-" {
                None
            } else {
                Some(parse_decimal(rev_part, ln)?)
            };
            if parts.next().is_some() {
                return Err(doc_err(ln, "trailing fields on key line"));
            }
            if let Some(prev) = entries.last() {
                let prev_key: (u32, u64) = (prev.key_id, prev.registered_at);
                if prev_key >= (key_id, registered_at) {
                    return Err(doc_err(ln, "entries not in canonical order"));
                }
            }
            entries.push(KeyRecord {
                key_id,
                role,
                public_point,
                registered_at,
                revoked_at,
            });
        }
    }
}

impl TransactionListDocument {
    pub fn signed_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        let _ = writeln!(out, "format={TXLIST_FORMAT}");
        let _ = writeln!(out, "tc={:04x}", self.tc_id);
        let _ = writeln!(out, "issued={}", self.issued_at);
        let _ = writeln!(out, "trunc={}", self.truncation);
        for r in &self.records {
            let _ = writeln!(
                out,
                "tx printer={:08x} ticket={:016x} issue={} end={} ph={}",
                r.printer_id,
                r.ticket_id,
                r.issue_ts,
                r.validity_end,
                hex::encode(&r.pattern_hash)
            );
        }
        out.into_bytes()
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = self.signed_bytes();
        let mut sig_line = String::new();
        push_hex_line(&mut sig_line, "sig=", &self.signature);
        out.extend_from_slice(sig_line.as_bytes());
        out
    }

    pub fn verify(&self, root: &PublicKey) -> bool {
        suite_verify(root, &self.signed_bytes(), &self.signature)
    }

    pub fn build(
        tc_id: u16,
        issued_at: u64,
        truncation: u8,
        mut records: Vec<TransactionEntry>,
        root: &PrivateKey,
    ) -> Result<Self, TrustError> {
        if !(1..=32).contains(&truncation) {
            return Err(TrustError::RangeError {
                value: truncation as usize,
            });
        }
        if records
            .iter()
            .any(|r| r.pattern_hash.len() != truncation as usize)
        {
            return Err(TrustError::RangeError {
                value: truncation as usize,
            });
        }
        records.sort_by_key(|r| (r.printer_id, r.ticket_id));
        records.dedup_by_key(|r| (r.printer_id, r.ticket_id));
        let mut doc = TransactionListDocument {
            tc_id,
            issued_at,
            truncation,
            records,
            signature: [0; SIGNATURE_LEN],
        };
        doc.signature = sign_document_bytes(root, &doc.signed_bytes())?;
        Ok(doc)
    }

    pub fn parse(raw: &[u8]) -> Result<Self, DocumentError> {
        let text = core::str::from_utf8(raw).map_err(|_| doc_err(0, "not utf-8"))?;
        let mut lines = DocLines::new(text)?;

        lines.expect_exact("format=txlist.v1", "wrong format line")?;
        let tc_hex = lines.prefixed("tc=")?;
        let tc_bytes = parse_hex_field(tc_hex, 2, lines.current)?;
        let tc_id = u16::from_be_bytes([tc_bytes[0], tc_bytes[1]]);
        let issued_at = parse_decimal(lines.prefixed("issued=")?, lines.current)?;
        let trunc_v = parse_decimal(lines.prefixed("trunc=")?, lines.current)?;
        if !(1..=32).contains(&trunc_v) {
            return Err(doc_err(lines.current, "truncation outside 1..=32"));
        }
        let truncation = trunc_v as u8;

        let mut records: Vec<TransactionEntry> = Vec::new();
        loop {
            let line_no = lines.current + 1;
            let line = lines.next().ok_or(doc_err(line_no, "missing sig line"))?;
            if let Some(rest) = line.strip_prefix("sig=") {
                let sig = parse_hex_field(rest, SIGNATURE_LEN, lines.current)?;
                lines.expect_end()?;
                return Ok(TransactionListDocument {
                    tc_id,
                    issued_at,
                    truncation,
                    records,
                    signature: sig.try_into().unwrap(),
                });
            }
            let body = line
                .strip_prefix("tx ")
                .ok_or(doc_err(lines.current, "expected tx or sig line"))?;
            let mut parts = body.split(' ');
            let ln = lines.current;
            let printer_part = strip_field(parts.next().unwrap_or(""), "printer=", ln)?;
            let printer_id =
                u32::from_be_bytes(parse_hex_field(printer_part, 4, ln)?.try_into().unwrap());
            let ticket_part =
                strip_field(parts.next().ok_or(doc_err(ln, "missing ticket"))?, "ticket=", ln)?;
            let ticket_id =
                u64::from_be_bytes(parse_hex_field(ticket_part, 8, ln)?.try_into().unwrap());
            let issue_part =
                strip_field(parts.next().ok_or(doc_err(ln, "missing issue"))?, "issue=", ln)?;
            let issue_ts = parse_decimal_u32(issue_part, ln)?;
            let end_part = strip_field(parts.next().ok_or(doc_err(ln, "missing end"))?, "end=", ln)?;
            let validity_end = parse_decimal_u32(end_part, ln)?;
            let ph_part = strip_field(parts.next().ok_or(doc_err(ln, "missing ph"))?, "ph=", ln)?;
            let pattern_hash = parse_hex_field(ph_part, truncation as usize, ln)?;
            if parts.next().is_some() {
                return Err(doc_err(ln, "trailing fields on tx line"));
            }
            if let Some(prev) = records.last() {
                if (prev.printer_id, prev.ticket_id) >= (printer_id, ticket_id) {
                    return Err(doc_err(ln, "records not in canonical order"));
                }
            }
            records.push(TransactionEntry {
                printer_id,
                ticket_id,
                issue_ts,
                validity_end,
                pattern_hash,
            });
        }
    }
}

/// Line cursor over a canonical document; requires a trailing newline and
/// forbids empty interior lines.
struct DocLines<'a> {
    remaining: &'a str,
    current: usize,
}

impl<'a> DocLines<'a> {
    fn new(text: &'a str) -> Result<Self, DocumentError> {
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(doc_err(0, "missing trailing newline"));
        }
        Ok(DocLines {
            remaining: text,
            current: 0,
        })
    }

    fn next(&mut self) -> Option<&'a str> {
        if self.remaining.is_empty() {
            return None;
        }
        self.current += 1;
        let (line, rest) = self.remaining.split_once('\n')?;
        self.remaining = rest;
        Some(line)
    }

    fn expect_exact(&mut self, expected: &str, reason: &'static str) -> Result<(), DocumentError> {
        let next_no = self.current + 1;
        match self.next() {
            Some(line) if line == expected => Ok(()),
            _ => Err(doc_err(next_no, reason)),
        }
    }

    fn prefixed(&mut self, prefix: &'static str) -> Result<&'a str, DocumentError> {
        let next_no = self.current + 1;
        self.next()
            .and_then(|l| l.strip_prefix(prefix))
            .ok_or(doc_err(next_no, "missing expected header line"))
    }

    fn expect_end(&mut self) -> Result<(), DocumentError> {
        if self.remaining.is_empty() {
            Ok(())
        } else {
            Err(doc_err(self.current + 1, "content after sig line"))
        }
    }
}

// ---------------------------------------------------------------------------
// the trusted center itself
// ---------------------------------------------------------------------------

/// What the center does with a sign request whose issue timestamp strays
/// more than `max_skew_secs` from its own clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewPolicy {
    pub max_skew_secs: u32,
    pub reject: bool,
}

impl Default for SkewPolicy {
    fn default() -> Self {
        SkewPolicy {
            max_skew_secs: 60,
            reject: false,
        }
    }
}

struct RegistryEntry {
    record: KeyRecord,
    suite_id: u8,
}

/// The ticket provider's secure server: key registry, transaction log and
/// the root of trust for every document readers consume.
///
/// Mutations are expected to be externally serialized (one logical writer);
/// exports are pure reads.
pub struct TrustedCenter {
    tc_id: u16,
    mode: SigningMode,
    skew: SkewPolicy,
    root_key: PrivateKey,
    ticket_key: Option<PrivateKey>,
    registry: Vec<RegistryEntry>,
    log: Vec<TransactionRecord>,
    nonce: NonceSource,
}

impl TrustedCenter {
    /// Central mode requires the center's own ticket-signing key;
    /// distributed mode forbids it.
    pub fn new(
        tc_id: u16,
        mode: SigningMode,
        root_key: PrivateKey,
        ticket_key: Option<PrivateKey>,
        skew: SkewPolicy,
        nonce: NonceSource,
        now: u64,
    ) -> Result<Self, TrustError> {
        let mut tc = TrustedCenter {
            tc_id,
            mode,
            skew,
            root_key,
            ticket_key: None,
            registry: Vec::new(),
            log: Vec::new(),
            nonce,
        };
        match (mode, ticket_key) {
            (SigningMode::Central, Some(key)) => {
                tc.registry.push(RegistryEntry {
                    record: KeyRecord {
                        key_id: TC_KEY_ID,
                        role: KeyRole::TcTicketSigning,
                        public_point: key.public_key().to_xy_bytes(),
                        registered_at: now,
                        revoked_at: None,
                    },
                    suite_id: key.suite_id(),
                });
                tc.ticket_key = Some(key);
            }
            (SigningMode::Distributed, None) => {}
            _ => return Err(TrustError::ModeMismatch),
        }
        Ok(tc)
    }

    pub fn tc_id(&self) -> u16 {
        self.tc_id
    }

    pub fn mode(&self) -> SigningMode {
        self.mode
    }

    pub fn root_public(&self) -> PublicKey {
        self.root_key.public_key()
    }

    fn find_active(&self, key_id: u32, role: KeyRole) -> Option<&RegistryEntry> {
        self.registry
            .iter()
            .find(|e| e.record.key_id == key_id && e.record.role == role && !e.record.is_revoked())
    }

    /// Register a printer's ticket-signing key (distributed mode only).
    pub fn register_printer(
        &mut self,
        printer_id: u32,
        public_key: &PublicKey,
        now: u64,
    ) -> Result<(), TrustError> {
        if self.mode != SigningMode::Distributed {
            return Err(TrustError::ModeMismatch);
        }
        self.register(printer_id, KeyRole::PrinterTicketSigning, public_key, now)
    }

    /// Register a device's communication key (printers and readers, any mode).
    pub fn register_comms(
        &mut self,
        actor_id: u32,
        public_key: &PublicKey,
        now: u64,
    ) -> Result<(), TrustError> {
        self.register(actor_id, KeyRole::Comms, public_key, now)
    }

    fn register(
        &mut self,
        key_id: u32,
        role: KeyRole,
        public_key: &PublicKey,
        now: u64,
    ) -> Result<(), TrustError> {
        if key_id == TC_KEY_ID {
            return Err(TrustError::ReservedKeyId { key_id });
        }
        if self.find_active(key_id, role).is_some() {
            return Err(TrustError::DuplicateKey { key_id });
        }
        self.registry.push(RegistryEntry {
            record: KeyRecord {
                key_id,
                role,
                public_point: public_key.to_xy_bytes(),
                registered_at: now,
                revoked_at: None,
            },
            suite_id: public_key.suite_id(),
        });
        Ok(())
    }

    /// Revoke every key held under `key_id` (ticket-signing and comms).
    /// Once set, a revocation time never changes.
    pub fn revoke(&mut self, key_id: u32, revoked_at: u64) -> Result<(), TrustError> {
        if key_id == TC_KEY_ID {
            // the center's own keys are the trust anchor
            return Err(TrustError::ReservedKeyId { key_id });
        }
        let mut saw_any = false;
        let mut revoked_any = false;
        for entry in &mut self.registry {
            if entry.record.key_id != key_id {
                continue;
            }
            saw_any = true;
            if entry.record.is_revoked() {
                continue;
            }
            if revoked_at < entry.record.registered_at {
                return Err(TrustError::TimestampOrder { key_id });
            }
            entry.record.revoked_at = Some(revoked_at);
            revoked_any = true;
        }
        if !saw_any {
            return Err(TrustError::UnknownKey { key_id });
        }
        if !revoked_any {
            return Err(TrustError::AlreadyRevoked { key_id });
        }
        Ok(())
    }

    /// Central-mode signing: authenticate the requesting printer, pin the
    /// issue timestamp to the center's clock, sign, log the transaction and
    /// return the fully assembled 704-byte code.
    pub fn central_sign(
        &mut self,
        meta: TicketMetadata,
        provider: &ProviderData,
        pattern: &MarkerPattern,
        requesting_printer: u32,
        now: u64,
    ) -> Result<[u8; CODE_LEN], TrustError> {
        if self.mode != SigningMode::Central {
            return Err(TrustError::ModeMismatch);
        }
        if meta.printer_id != requesting_printer {
            return Err(TrustError::PrinterIdMismatch {
                claimed: meta.printer_id,
                authenticated: requesting_printer,
            });
        }
        self.require_unrevoked(requesting_printer, KeyRole::Comms, now)?;

        let ticket_key = self.ticket_key.as_ref().expect("central mode has a ticket key");
        let (payload, record) = central_sign_payload(
            ticket_key,
            meta,
            provider,
            pattern,
            now,
            self.skew,
            &mut self.nonce,
        )?;
        self.log.push(record);
        Ok(payload)
    }

    fn require_unrevoked(&self, key_id: u32, role: KeyRole, now: u64) -> Result<(), TrustError> {
        match self
            .registry
            .iter()
            .filter(|e| e.record.key_id == key_id && e.record.role == role)
            .max_by_key(|e| e.record.registered_at)
        {
            None => Err(TrustError::UnknownKey { key_id }),
            Some(e) if e.record.is_revoked_at(now) => Err(TrustError::RefusedRevoked { key_id }),
            Some(_) => Ok(()),
        }
    }

    /// Accept a reported issuance (distributed mode only). The report time
    /// is stamped by the center, not the printer.
    pub fn record_transaction(
        &mut self,
        mut record: TransactionRecord,
        now: u64,
    ) -> Result<(), TrustError> {
        if self.mode != SigningMode::Distributed {
            return Err(TrustError::ModeMismatch);
        }
        self.require_unrevoked(record.printer_id, KeyRole::PrinterTicketSigning, now)?;
        record.reported_at = now;
        self.log.push(record);
        Ok(())
    }

    /// Export the signed key list: all ticket-signing keys, revoked entries
    /// included so readers learn revocation times.
    pub fn export_keylist(&self, now: u64) -> Result<KeyListDocument, TrustError> {
        let entries: Vec<KeyRecord> = self
            .registry
            .iter()
            .filter(|e| e.record.role != KeyRole::Comms)
            .map(|e| e.record.clone())
            .collect();
        KeyListDocument::build(self.tc_id, now, self.mode, entries, &self.root_key)
    }

    /// Export the signed transaction list: only records from printers whose
    /// ticket-signing key is revoked, and only those reported strictly
    /// before the revocation. Unrevoked printers need no exception list, and
    /// unreported tickets stay invalid.
    pub fn export_transactions(
        &self,
        truncation: u8,
        now: u64,
    ) -> Result<TransactionListDocument, TrustError> {
        if !(1..=32).contains(&truncation) {
            return Err(TrustError::RangeError {
                value: truncation as usize,
            });
        }
        let revocations: BTreeMap<u32, u64> = self
            .registry
            .iter()
            .filter(|e| e.record.role == KeyRole::PrinterTicketSigning)
            .filter_map(|e| e.record.revoked_at.map(|t| (e.record.key_id, t)))
            .collect();
        let records = filter_exceptional_transactions(&self.log, &revocations, truncation);
        TransactionListDocument::build(self.tc_id, now, truncation, records, &self.root_key)
    }

    /// Transactions reported so far (test and diagnostics surface).
    pub fn transaction_log(&self) -> &[TransactionRecord] {
        &self.log
    }

    /// All registered key records, every role.
    pub fn key_records(&self) -> impl Iterator<Item = &KeyRecord> {
        self.registry.iter().map(|e| &e.record)
    }

    /// Comms key for an actor, revoked or not: envelopes from a revoked
    /// printer still authenticate, they are just no longer authorized.
    pub fn comms_public(&self, actor_id: u32) -> Option<PublicKey> {
        self.registry
            .iter()
            .filter(|e| e.record.key_id == actor_id && e.record.role == KeyRole::Comms)
            .max_by_key(|e| e.record.registered_at)
            .and_then(|e| PublicKey::from_xy_bytes(e.suite_id, &e.record.public_point).ok())
    }
}

/// The center-side signing step of variant A, independent of registry
/// state: pin the issue timestamp, sign the code content with the center's
/// ticket key and produce both the assembled payload and the transaction
/// record to log.
///
/// A claimed timestamp outside the skew window is overwritten with `now`
/// (or refused under a rejecting policy) - the center controlling the
/// timestamp is what makes backdating impossible in this mode.
pub fn central_sign_payload(
    ticket_key: &PrivateKey,
    mut meta: TicketMetadata,
    provider: &ProviderData,
    pattern: &MarkerPattern,
    now: u64,
    skew: SkewPolicy,
    nonce: &mut NonceSource,
) -> Result<([u8; CODE_LEN], TransactionRecord), TrustError> {
    if (meta.issue_ts as u64).abs_diff(now) > skew.max_skew_secs as u64 {
        if skew.reject {
            return Err(TrustError::SkewRejected {
                issue_ts: meta.issue_ts,
                now,
            });
        }
        meta.issue_ts = now as u32;
    }

    let region = codec::encode_signed_region(&meta, provider, pattern);
    let sig = suite_sign(ticket_key, &region, nonce)?;
    let field = SignatureField::new(&sig)?;
    let payload = codec::encode_payload(&meta, provider, pattern, &field);
    let record = TransactionRecord {
        printer_id: meta.printer_id,
        ticket_id: meta.ticket_id,
        issue_ts: meta.issue_ts,
        validity_end: meta.validity_end,
        pattern_hash: pattern_hash_full(pattern),
        reported_at: now,
    };
    Ok((payload, record))
}

/// The reader-memory-saving filter: keep only transactions of revoked
/// printers that were reported strictly before the revocation, truncate the
/// hashes, sort and drop duplicate (printer, ticket) pairs (first report
/// wins).
pub fn filter_exceptional_transactions(
    log: &[TransactionRecord],
    revocations: &BTreeMap<u32, u64>,
    truncation: u8,
) -> Vec<TransactionEntry> {
    let mut out: BTreeMap<(u32, u64), TransactionEntry> = BTreeMap::new();
    for record in log {
        let Some(&revoked_at) = revocations.get(&record.printer_id) else {
            continue;
        };
        if record.reported_at >= revoked_at {
            continue;
        }
        out.entry((record.printer_id, record.ticket_id))
            .or_insert_with(|| TransactionEntry {
                printer_id: record.printer_id,
                ticket_id: record.ticket_id,
                issue_ts: record.issue_ts,
                validity_end: record.validity_end,
                pattern_hash: record.pattern_hash[..truncation as usize].to_vec(),
            });
    }
    out.into_values().collect()
}
