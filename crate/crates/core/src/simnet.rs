//! Deterministic in-process protocol harness.
//!
//! Device-to-center traffic travels in authenticated envelopes: every message
//! is signed by the sender's communication key and carries a strictly
//! increasing counter, so receivers detect forgery and replay. Transport is
//! plain function calls; loss and latency are not modeled.
//!
//! On top of that sits a scripted scenario runner. A scenario declares a
//! signing mode, printers and readers, then drives issuance, theft,
//! revocation, synchronization and validation from a single seeded RNG, so a
//! script always produces the same report byte for byte.
//!
//! Script grammar, one directive per line, `#` starts a comment:
//!
//! ```text
//! seed <u64>
//! clock <unix>
//! advance <seconds>
//! mode central|distributed
//! printer <name>
//! reader <name>
//! issue <printer> <ticket-name> start=<unix> end=<unix>
//! steal <printer>
//! rogue-issue <printer> <ticket-name> claim=<unix> start=<unix> end=<unix>
//! revoke <printer>
//! sync <reader> [trunc=<n>]
//! validate <reader> <ticket-name>
//! expect <reader> <ticket-name> accept|accept-exceptional|reject:<reason>
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::codec::{
    self, MarkerPattern, ProviderData, TicketMetadata, CODE_LEN, METADATA_LEN, PATTERN_LEN,
    PROVIDER_LEN, SIGNED_REGION_LEN,
};
use crate::crypto::{
    keypair_generate, suite_sign, suite_verify, CryptoError, NonceSource, PrivateKey, PublicKey,
    SIGNATURE_LEN, SUITE_EC_SCHNORR,
};
use crate::devices::{
    printer_issue, rogue_issue, IssueError, ReaderTrustStore, RejectReason, TcChannel,
    ValidationVerdict,
};
use crate::trust::{SigningMode, SkewPolicy, TransactionRecord, TrustedCenter, TrustError};

/// Sender id the trusted center uses on its own envelopes.
pub const TC_ACTOR_ID: u32 = 0;

// ---------------------------------------------------------------------------
// clock
// ---------------------------------------------------------------------------

/// Monotone simulation clock; every timestamp in a scenario derives from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimClock {
    now: u64,
}

impl SimClock {
    pub fn new(start: u64) -> Self {
        SimClock { now: start }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn advance(&mut self, seconds: u64) {
        self.now = self.now.saturating_add(seconds);
    }

    /// Jump to an absolute time; the clock never moves backwards.
    pub fn set(&mut self, t: u64) -> Result<(), u64> {
        if t < self.now {
            return Err(self.now);
        }
        self.now = t;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// authenticated envelopes
// ---------------------------------------------------------------------------

/// One authenticated message: signed by the sender's comms key over
/// (sender_id || counter || body_type || body).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub sender_id: u32,
    pub counter: u64,
    pub body_type: u8,
    pub body: Vec<u8>,
    pub signature: [u8; SIGNATURE_LEN],
}

fn envelope_signing_bytes(sender_id: u32, counter: u64, body_type: u8, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(13 + body.len());
    out.extend_from_slice(&sender_id.to_be_bytes());
    out.extend_from_slice(&counter.to_be_bytes());
    out.push(body_type);
    out.extend_from_slice(body);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelError {
    UnknownSender { sender_id: u32 },
    BadEnvelopeSignature,
    ReplayDetected { sender_id: u32, counter: u64 },
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::UnknownSender { sender_id } => {
                write!(f, "no trusted comms key for sender {sender_id}")
            }
            ChannelError::BadEnvelopeSignature => write!(f, "envelope signature invalid"),
            ChannelError::ReplayDetected { sender_id, counter } => {
                write!(f, "replayed counter {counter} from sender {sender_id}")
            }
        }
    }
}

impl core::error::Error for ChannelError {}

/// Tracks the highest counter seen per sender and rejects anything not
/// strictly greater.
#[derive(Debug, Default, Clone)]
pub struct ReplayFilter {
    last: BTreeMap<u32, u64>,
}

impl ReplayFilter {
    pub fn new() -> Self {
        ReplayFilter::default()
    }

    pub fn check_and_update(&mut self, sender_id: u32, counter: u64) -> Result<(), ChannelError> {
        let last = self.last.entry(sender_id).or_insert(0);
        if counter <= *last {
            return Err(ChannelError::ReplayDetected { sender_id, counter });
        }
        *last = counter;
        Ok(())
    }
}

/// Build and sign an envelope.
pub fn channel_send(
    comms_key: &PrivateKey,
    nonce: &mut NonceSource,
    sender_id: u32,
    counter: u64,
    body_type: u8,
    body: Vec<u8>,
) -> Result<Envelope, CryptoError> {
    let signature = suite_sign(
        comms_key,
        &envelope_signing_bytes(sender_id, counter, body_type, &body),
        nonce,
    )?;
    Ok(Envelope {
        sender_id,
        counter,
        body_type,
        body,
        signature,
    })
}

/// Authenticate an envelope and deliver its body: the sender must be known,
/// the signature must verify, and the counter must move strictly forward.
/// The replay filter only advances for authentic envelopes.
pub fn channel_receive<'a>(
    lookup: impl FnOnce(u32) -> Option<PublicKey>,
    filter: &mut ReplayFilter,
    envelope: &'a Envelope,
) -> Result<&'a [u8], ChannelError> {
    let key = lookup(envelope.sender_id).ok_or(ChannelError::UnknownSender {
        sender_id: envelope.sender_id,
    })?;
    let bytes = envelope_signing_bytes(
        envelope.sender_id,
        envelope.counter,
        envelope.body_type,
        &envelope.body,
    );
    if !suite_verify(&key, &bytes, &envelope.signature) {
        return Err(ChannelError::BadEnvelopeSignature);
    }
    filter.check_and_update(envelope.sender_id, envelope.counter)?;
    Ok(&envelope.body)
}

// ---------------------------------------------------------------------------
// wire protocol between devices and the center
// ---------------------------------------------------------------------------

mod wire {
    pub const CENTRAL_SIGN_REQUEST: u8 = 1;
    pub const CENTRAL_SIGN_OK: u8 = 2;
    pub const CENTRAL_SIGN_ERR: u8 = 3;
    pub const REPORT_TRANSACTION: u8 = 4;
    pub const REPORT_OK: u8 = 5;
    pub const REPORT_ERR: u8 = 6;
    pub const SYNC_REQUEST: u8 = 7;
    pub const SYNC_DOCUMENTS: u8 = 8;
}

/// Lossy wire form of a refusal: code byte plus two u64 parameters.
fn encode_trust_error(e: &TrustError) -> Vec<u8> {
    let (code, a, b): (u8, u64, u64) = match e {
        TrustError::RefusedRevoked { key_id } => (1, *key_id as u64, 0),
        TrustError::UnknownKey { key_id } => (2, *key_id as u64, 0),
        TrustError::ModeMismatch => (3, 0, 0),
        TrustError::SkewRejected { issue_ts, now } => (4, *issue_ts as u64, *now),
        TrustError::DuplicateKey { key_id } => (5, *key_id as u64, 0),
        TrustError::AlreadyRevoked { key_id } => (6, *key_id as u64, 0),
        TrustError::PrinterIdMismatch {
            claimed,
            authenticated,
        } => (7, *claimed as u64, *authenticated as u64),
        _ => (0xff, 0, 0),
    };
    let mut out = Vec::with_capacity(17);
    out.push(code);
    out.extend_from_slice(&a.to_be_bytes());
    out.extend_from_slice(&b.to_be_bytes());
    out
}

fn decode_trust_error(body: &[u8]) -> IssueError {
    if body.len() != 17 {
        return IssueError::Channel("malformed refusal");
    }
    let a = u64::from_be_bytes(body[1..9].try_into().unwrap());
    let b = u64::from_be_bytes(body[9..17].try_into().unwrap());
    let err = match body[0] {
        1 => TrustError::RefusedRevoked { key_id: a as u32 },
        2 => TrustError::UnknownKey { key_id: a as u32 },
        3 => TrustError::ModeMismatch,
        4 => TrustError::SkewRejected {
            issue_ts: a as u32,
            now: b,
        },
        5 => TrustError::DuplicateKey { key_id: a as u32 },
        6 => TrustError::AlreadyRevoked { key_id: a as u32 },
        7 => TrustError::PrinterIdMismatch {
            claimed: a as u32,
            authenticated: b as u32,
        },
        _ => return IssueError::Channel("center reported an internal failure"),
    };
    IssueError::Refused(err)
}

fn encode_report_body(record: &TransactionRecord) -> Vec<u8> {
    let mut out = Vec::with_capacity(52);
    out.extend_from_slice(&record.printer_id.to_be_bytes());
    out.extend_from_slice(&record.ticket_id.to_be_bytes());
    out.extend_from_slice(&record.issue_ts.to_be_bytes());
    out.extend_from_slice(&record.validity_end.to_be_bytes());
    out.extend_from_slice(&record.pattern_hash);
    out
}

fn decode_report_body(body: &[u8]) -> Option<TransactionRecord> {
    if body.len() != 52 {
        return None;
    }
    Some(TransactionRecord {
        printer_id: u32::from_be_bytes(body[0..4].try_into().unwrap()),
        ticket_id: u64::from_be_bytes(body[4..12].try_into().unwrap()),
        issue_ts: u32::from_be_bytes(body[12..16].try_into().unwrap()),
        validity_end: u32::from_be_bytes(body[16..20].try_into().unwrap()),
        pattern_hash: body[20..52].try_into().unwrap(),
        reported_at: 0,
    })
}

// ---------------------------------------------------------------------------
// simulated actors
// ---------------------------------------------------------------------------

/// A device's end of the secure channel: comms key, send counter and replay
/// protection for center responses. The center's comms key is preinstalled
/// and trusted a priori.
pub struct Endpoint {
    id: u32,
    comms_key: PrivateKey,
    counter: u64,
    nonce: NonceSource,
    tc_comms: PublicKey,
    tc_filter: ReplayFilter,
}

impl Endpoint {
    pub fn new(id: u32, comms_key: PrivateKey, nonce: NonceSource, tc_comms: PublicKey) -> Self {
        Endpoint {
            id,
            comms_key,
            counter: 0,
            nonce,
            tc_comms,
            tc_filter: ReplayFilter::new(),
        }
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn comms_key(&self) -> &PrivateKey {
        &self.comms_key
    }

    fn send(&mut self, body_type: u8, body: Vec<u8>) -> Result<Envelope, CryptoError> {
        self.counter += 1;
        channel_send(
            &self.comms_key,
            &mut self.nonce,
            self.id,
            self.counter,
            body_type,
            body,
        )
    }

    fn open<'a>(&mut self, envelope: &'a Envelope) -> Result<&'a [u8], ChannelError> {
        let tc_comms = self.tc_comms;
        channel_receive(
            |id| (id == TC_ACTOR_ID).then_some(tc_comms),
            &mut self.tc_filter,
            envelope,
        )
    }
}

/// The trusted center plus its network face.
pub struct SimTc {
    pub tc: TrustedCenter,
    comms_key: PrivateKey,
    counter: u64,
    nonce: NonceSource,
    replay: ReplayFilter,
}

impl SimTc {
    pub fn new(tc: TrustedCenter, comms_key: PrivateKey, nonce: NonceSource) -> Self {
        SimTc {
            tc,
            comms_key,
            counter: 0,
            nonce,
            replay: ReplayFilter::new(),
        }
    }

    pub fn comms_public(&self) -> PublicKey {
        self.comms_key.public_key()
    }

    fn respond(&mut self, body_type: u8, body: Vec<u8>) -> Result<Envelope, ChannelError> {
        self.counter += 1;
        channel_send(
            &self.comms_key,
            &mut self.nonce,
            TC_ACTOR_ID,
            self.counter,
            body_type,
            body,
        )
        .map_err(|_| ChannelError::BadEnvelopeSignature)
    }

    /// Authenticate one incoming envelope and dispatch it. Envelopes from
    /// revoked devices still authenticate (the key is genuine); whether the
    /// request is still authorized is the center's decision, so the refusal
    /// arrives as a signed response instead of transport silence.
    pub fn handle(&mut self, envelope: &Envelope, now: u64) -> Result<Envelope, ChannelError> {
        let tc = &self.tc;
        let body = channel_receive(
            |sender| tc.comms_public(sender),
            &mut self.replay,
            envelope,
        )?
        .to_vec();
        let sender = envelope.sender_id;

        match envelope.body_type {
            wire::CENTRAL_SIGN_REQUEST => {
                let (ok, body) = self.handle_central_sign(&body, sender, now);
                self.respond(
                    if ok { wire::CENTRAL_SIGN_OK } else { wire::CENTRAL_SIGN_ERR },
                    body,
                )
            }
            wire::REPORT_TRANSACTION => {
                let result = match decode_report_body(&body) {
                    Some(record) => self.tc.record_transaction(record, now),
                    None => Err(TrustError::ModeMismatch),
                };
                match result {
                    Ok(()) => self.respond(wire::REPORT_OK, Vec::new()),
                    Err(e) => self.respond(wire::REPORT_ERR, encode_trust_error(&e)),
                }
            }
            wire::SYNC_REQUEST => {
                let truncation = if body.len() == 1 { body[0] } else { 32 };
                let docs = self
                    .tc
                    .export_keylist(now)
                    .and_then(|kl| Ok((kl, self.tc.export_transactions(truncation, now)?)));
                match docs {
                    Ok((keylist, txlist)) => {
                        let kl = keylist.canonical_bytes();
                        let tx = txlist.canonical_bytes();
                        let mut body = Vec::with_capacity(4 + kl.len() + tx.len());
                        body.extend_from_slice(&(kl.len() as u32).to_be_bytes());
                        body.extend_from_slice(&kl);
                        body.extend_from_slice(&tx);
                        self.respond(wire::SYNC_DOCUMENTS, body)
                    }
                    Err(e) => self.respond(wire::REPORT_ERR, encode_trust_error(&e)),
                }
            }
            _ => self.respond(wire::REPORT_ERR, encode_trust_error(&TrustError::ModeMismatch)),
        }
    }

    fn handle_central_sign(&mut self, body: &[u8], sender: u32, now: u64) -> (bool, Vec<u8>) {
        if body.len() != SIGNED_REGION_LEN {
            return (
                false,
                encode_trust_error(&TrustError::ComponentSize(
                    codec::ComponentSizeError::Pattern { got: body.len() },
                )),
            );
        }
        let meta_bytes: [u8; METADATA_LEN] = body[..METADATA_LEN].try_into().unwrap();
        let meta = TicketMetadata::from_bytes(&meta_bytes);
        let provider =
            ProviderData::from_slice(&body[METADATA_LEN..METADATA_LEN + PROVIDER_LEN]).unwrap();
        let pattern = MarkerPattern::from_slice(&body[METADATA_LEN + PROVIDER_LEN..]).unwrap();
        match self.tc.central_sign(meta, &provider, &pattern, sender, now) {
            Ok(payload) => (true, payload.to_vec()),
            Err(e) => (false, encode_trust_error(&e)),
        }
    }
}

/// Printer channel that tunnels requests through authenticated envelopes.
pub struct SimChannel<'a> {
    pub tc: &'a mut SimTc,
    pub endpoint: &'a mut Endpoint,
    pub now: u64,
}

impl TcChannel for SimChannel<'_> {
    fn central_sign(
        &mut self,
        meta: TicketMetadata,
        provider: &ProviderData,
        pattern: &MarkerPattern,
    ) -> Result<Vec<u8>, IssueError> {
        let body = codec::encode_signed_region(&meta, provider, pattern).to_vec();
        let request = self
            .endpoint
            .send(wire::CENTRAL_SIGN_REQUEST, body)
            .map_err(|_| IssueError::Channel("envelope signing failed"))?;
        let response = self
            .tc
            .handle(&request, self.now)
            .map_err(|_| IssueError::Channel("request rejected in transit"))?;
        let body = self
            .endpoint
            .open(&response)
            .map_err(|_| IssueError::Channel("response rejected"))?;
        match response.body_type {
            wire::CENTRAL_SIGN_OK if body.len() == CODE_LEN => Ok(body.to_vec()),
            wire::CENTRAL_SIGN_ERR => Err(decode_trust_error(body)),
            _ => Err(IssueError::Channel("unexpected response")),
        }
    }

    fn report(&mut self, record: TransactionRecord) -> Result<(), IssueError> {
        let request = self
            .endpoint
            .send(wire::REPORT_TRANSACTION, encode_report_body(&record))
            .map_err(|_| IssueError::Channel("envelope signing failed"))?;
        let response = self
            .tc
            .handle(&request, self.now)
            .map_err(|_| IssueError::Channel("request rejected in transit"))?;
        let body = self
            .endpoint
            .open(&response)
            .map_err(|_| IssueError::Channel("response rejected"))?;
        match response.body_type {
            wire::REPORT_OK => Ok(()),
            wire::REPORT_ERR => Err(decode_trust_error(body)),
            _ => Err(IssueError::Channel("unexpected response")),
        }
    }
}

/// A reader plus its network face.
pub struct SimReader {
    pub store: ReaderTrustStore,
    pub endpoint: Endpoint,
}

impl SimReader {
    /// Request fresh documents at the given truncation and install them.
    /// Returns (key entries, transactions) on success.
    pub fn sync(
        &mut self,
        tc: &mut SimTc,
        truncation: u8,
        now: u64,
    ) -> Result<(usize, usize), String> {
        let request = self
            .endpoint
            .send(wire::SYNC_REQUEST, alloc::vec![truncation])
            .map_err(|e| format!("envelope signing failed: {e}"))?;
        let response = tc
            .handle(&request, now)
            .map_err(|e| format!("request rejected: {e}"))?;
        let body = self
            .endpoint
            .open(&response)
            .map_err(|e| format!("response rejected: {e}"))?;
        if response.body_type != wire::SYNC_DOCUMENTS {
            return Err("center refused the sync request".to_string());
        }
        if body.len() < 4 {
            return Err("malformed sync response".to_string());
        }
        let kl_len = u32::from_be_bytes(body[..4].try_into().unwrap()) as usize;
        if body.len() < 4 + kl_len {
            return Err("malformed sync response".to_string());
        }
        let keylist = &body[4..4 + kl_len];
        let txlist = &body[4 + kl_len..];
        self.store
            .sync(keylist, txlist, now)
            .map_err(|e| e.to_string())?;
        let entries = self.store.keylist().map(|k| k.entries.len()).unwrap_or(0);
        Ok((entries, self.store.transaction_count()))
    }
}

// ---------------------------------------------------------------------------
// scenario scripts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedVerdict {
    Accept,
    AcceptExceptional,
    Reject(RejectReason),
}

impl ExpectedVerdict {
    pub fn from_token(token: &str) -> Option<Self> {
        if let Some(reason) = token.strip_prefix("reject:") {
            return RejectReason::from_token(reason).map(ExpectedVerdict::Reject);
        }
        match token {
            "accept" => Some(ExpectedVerdict::Accept),
            "accept-exceptional" => Some(ExpectedVerdict::AcceptExceptional),
            _ => None,
        }
    }

    pub fn matches(&self, verdict: &ValidationVerdict) -> bool {
        match (self, verdict) {
            (ExpectedVerdict::Accept, ValidationVerdict::Accept) => true,
            (ExpectedVerdict::AcceptExceptional, ValidationVerdict::AcceptExceptional { .. }) => {
                true
            }
            (ExpectedVerdict::Reject(want), ValidationVerdict::Reject(got)) => want == got,
            _ => false,
        }
    }
}

impl fmt::Display for ExpectedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedVerdict::Accept => f.write_str("accept"),
            ExpectedVerdict::AcceptExceptional => f.write_str("accept-exceptional"),
            ExpectedVerdict::Reject(r) => write!(f, "reject:{r}"),
        }
    }
}

/// Script-facing spelling of a verdict.
pub fn verdict_token(verdict: &ValidationVerdict) -> String {
    match verdict {
        ValidationVerdict::Accept => "accept".to_string(),
        ValidationVerdict::AcceptExceptional { .. } => "accept-exceptional".to_string(),
        ValidationVerdict::Reject(r) => format!("reject:{r}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Seed(u64),
    Clock(u64),
    Advance(u64),
    Mode(SigningMode),
    Printer(String),
    Reader(String),
    Issue {
        printer: String,
        ticket: String,
        start: u32,
        end: u32,
    },
    Steal(String),
    RogueIssue {
        printer: String,
        ticket: String,
        claim: u32,
        start: u32,
        end: u32,
    },
    Revoke(String),
    Sync {
        reader: String,
        truncation: Option<u8>,
    },
    Validate {
        reader: String,
        ticket: String,
    },
    Expect {
        reader: String,
        ticket: String,
        expected: ExpectedVerdict,
    },
}

/// A malformed or unexecutable script line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "script line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for ScriptError {}

fn script_err(line: usize, message: impl fmt::Display) -> ScriptError {
    ScriptError {
        line,
        message: message.to_string(),
    }
}

/// A parsed scenario: directives with their source line numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub directives: Vec<(usize, Directive)>,
}

fn parse_kv<'a>(token: &'a str, key: &str, line: usize) -> Result<&'a str, ScriptError> {
    token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| script_err(line, format!("expected {key}=<value>")))
}

fn parse_u64(s: &str, line: usize, what: &str) -> Result<u64, ScriptError> {
    s.parse()
        .map_err(|_| script_err(line, format!("invalid {what}: {s}")))
}

fn parse_u32(s: &str, line: usize, what: &str) -> Result<u32, ScriptError> {
    s.parse()
        .map_err(|_| script_err(line, format!("invalid {what}: {s}")))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut directives = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let cmd = tokens.next().unwrap();
            let mut next = |what: &str| {
                tokens
                    .next()
                    .ok_or_else(|| script_err(line, format!("missing {what}")))
            };
            let directive = match cmd {
                "seed" => Directive::Seed(parse_u64(next("seed value")?, line, "seed")?),
                "clock" => Directive::Clock(parse_u64(next("time")?, line, "time")?),
                "advance" => Directive::Advance(parse_u64(next("seconds")?, line, "seconds")?),
                "mode" => {
                    let token = next("mode")?;
                    Directive::Mode(
                        SigningMode::from_token(token)
                            .ok_or_else(|| script_err(line, format!("unknown mode: {token}")))?,
                    )
                }
                "printer" => Directive::Printer(next("printer name")?.to_string()),
                "reader" => Directive::Reader(next("reader name")?.to_string()),
                "issue" => {
                    let printer = next("printer name")?.to_string();
                    let ticket = next("ticket name")?.to_string();
                    let start = parse_u32(parse_kv(next("start")?, "start", line)?, line, "start")?;
                    let end = parse_u32(parse_kv(next("end")?, "end", line)?, line, "end")?;
                    Directive::Issue {
                        printer,
                        ticket,
                        start,
                        end,
                    }
                }
                "steal" => Directive::Steal(next("printer name")?.to_string()),
                "rogue-issue" => {
                    let printer = next("printer name")?.to_string();
                    let ticket = next("ticket name")?.to_string();
                    let claim = parse_u32(parse_kv(next("claim")?, "claim", line)?, line, "claim")?;
                    let start = parse_u32(parse_kv(next("start")?, "start", line)?, line, "start")?;
                    let end = parse_u32(parse_kv(next("end")?, "end", line)?, line, "end")?;
                    Directive::RogueIssue {
                        printer,
                        ticket,
                        claim,
                        start,
                        end,
                    }
                }
                "revoke" => Directive::Revoke(next("printer name")?.to_string()),
                "sync" => {
                    let reader = next("reader name")?.to_string();
                    let truncation = match tokens.next() {
                        None => None,
                        Some(t) => {
                            let v = parse_u32(parse_kv(t, "trunc", line)?, line, "truncation")?;
                            if !(1..=32).contains(&v) {
                                return Err(script_err(line, "truncation outside 1..=32"));
                            }
                            Some(v as u8)
                        }
                    };
                    Directive::Sync { reader, truncation }
                }
                "validate" => Directive::Validate {
                    reader: next("reader name")?.to_string(),
                    ticket: next("ticket name")?.to_string(),
                },
                "expect" => {
                    let reader = next("reader name")?.to_string();
                    let ticket = next("ticket name")?.to_string();
                    let token = next("expected verdict")?;
                    let expected = ExpectedVerdict::from_token(token)
                        .ok_or_else(|| script_err(line, format!("unknown verdict: {token}")))?;
                    Directive::Expect {
                        reader,
                        ticket,
                        expected,
                    }
                }
                other => return Err(script_err(line, format!("unknown directive: {other}"))),
            };
            if let Some(extra) = tokens.next() {
                return Err(script_err(line, format!("unexpected token: {extra}")));
            }
            directives.push((line, directive));
        }
        Ok(Scenario { directives })
    }
}

// ---------------------------------------------------------------------------
// scenario runner
// ---------------------------------------------------------------------------

/// One checked expectation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationResult {
    pub line: usize,
    pub reader: String,
    pub ticket: String,
    pub expected: ExpectedVerdict,
    pub actual: String,
    pub passed: bool,
}

/// One recorded validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictRecord {
    pub reader: String,
    pub ticket: String,
    pub verdict: ValidationVerdict,
}

/// Outcome of a scenario run. Two runs of the same script render the same
/// report byte for byte.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioReport {
    pub events: Vec<String>,
    pub expectations: Vec<ExpectationResult>,
    pub verdicts: Vec<VerdictRecord>,
}

impl ScenarioReport {
    pub fn all_passed(&self) -> bool {
        self.expectations.iter().all(|e| e.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.expectations.iter().filter(|e| e.passed).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            let _ = writeln!(out, "{event}");
        }
        let _ = writeln!(
            out,
            "expectations: {}/{} passed",
            self.passed_count(),
            self.expectations.len()
        );
        out
    }
}

struct StoredTicket {
    payload: Vec<u8>,
    pattern: MarkerPattern,
}

struct SimPrinter {
    id: u32,
    ticket_key: Option<PrivateKey>,
    sign_nonce: NonceSource,
    endpoint: Endpoint,
    next_ticket_id: u64,
    stolen: bool,
}

struct Runner {
    clock: SimClock,
    rng: ChaCha20Rng,
    mode: SigningMode,
    tc: Option<SimTc>,
    printers: BTreeMap<String, SimPrinter>,
    readers: BTreeMap<String, SimReader>,
    tickets: BTreeMap<String, StoredTicket>,
    verdicts: BTreeMap<(String, String), ValidationVerdict>,
    next_actor_id: u32,
    report: ScenarioReport,
}

const SIM_TC_ID: u16 = 1;

impl Runner {
    fn new() -> Self {
        Runner {
            clock: SimClock::new(0),
            rng: ChaCha20Rng::seed_from_u64(0),
            mode: SigningMode::Distributed,
            tc: None,
            printers: BTreeMap::new(),
            readers: BTreeMap::new(),
            tickets: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            next_actor_id: 1,
            report: ScenarioReport::default(),
        }
    }

    fn gen_key(&mut self) -> PrivateKey {
        let mut entropy = [0u8; 32];
        self.rng.fill_bytes(&mut entropy);
        let mut source = NonceSource::random_from_entropy(entropy);
        keypair_generate(SUITE_EC_SCHNORR, &mut source)
            .expect("suite is registered")
            .0
    }

    fn gen_nonce_source(&mut self) -> NonceSource {
        NonceSource::deterministic(self.rng.next_u64())
    }

    fn gen_pattern(&mut self) -> MarkerPattern {
        let mut bytes = [0u8; PATTERN_LEN];
        self.rng.fill_bytes(&mut bytes);
        MarkerPattern::new(bytes)
    }

    fn gen_provider(&mut self) -> ProviderData {
        let mut bytes = [0u8; PROVIDER_LEN];
        self.rng.fill_bytes(&mut bytes);
        ProviderData::new(bytes)
    }

    fn event(&mut self, text: String) {
        self.report.events.push(text);
    }

    fn ensure_tc(&mut self, line: usize) -> Result<(), ScriptError> {
        if self.tc.is_some() {
            return Ok(());
        }
        let root_key = self.gen_key();
        let ticket_key = match self.mode {
            SigningMode::Central => Some(self.gen_key()),
            SigningMode::Distributed => None,
        };
        let tc_nonce = self.gen_nonce_source();
        let tc = TrustedCenter::new(
            SIM_TC_ID,
            self.mode,
            root_key,
            ticket_key,
            SkewPolicy::default(),
            tc_nonce,
            self.clock.now(),
        )
        .map_err(|e| script_err(line, e))?;
        let comms_key = self.gen_key();
        let envelope_nonce = self.gen_nonce_source();
        self.tc = Some(SimTc::new(tc, comms_key, envelope_nonce));
        self.event(format!(
            "center up mode={} tc={:04x} t={}",
            self.mode,
            SIM_TC_ID,
            self.clock.now()
        ));
        Ok(())
    }

    fn run(mut self, scenario: &Scenario) -> Result<ScenarioReport, ScriptError> {
        for (line, directive) in &scenario.directives {
            self.execute(*line, directive)?;
        }
        Ok(self.report)
    }

    fn execute(&mut self, line: usize, directive: &Directive) -> Result<(), ScriptError> {
        match directive {
            Directive::Seed(seed) => {
                self.rng = ChaCha20Rng::seed_from_u64(*seed);
                self.event(format!("seed {seed}"));
            }
            Directive::Clock(t) => {
                self.clock
                    .set(*t)
                    .map_err(|now| script_err(line, format!("clock would move back from {now}")))?;
                self.event(format!("clock {t}"));
            }
            Directive::Advance(d) => {
                self.clock.advance(*d);
                self.event(format!("advance {d} -> t={}", self.clock.now()));
            }
            Directive::Mode(mode) => {
                if self.tc.is_some() {
                    return Err(script_err(line, "mode must precede any actors"));
                }
                self.mode = *mode;
                self.event(format!("mode {mode}"));
            }
            Directive::Printer(name) => self.add_printer(line, name)?,
            Directive::Reader(name) => self.add_reader(line, name)?,
            Directive::Issue {
                printer,
                ticket,
                start,
                end,
            } => self.issue(line, printer, ticket, *start, *end)?,
            Directive::Steal(name) => {
                let printer = self
                    .printers
                    .get_mut(name)
                    .ok_or_else(|| script_err(line, format!("unknown printer: {name}")))?;
                printer.stolen = true;
                let id = printer.id;
                self.event(format!("steal {name} id={id} t={}", self.clock.now()));
            }
            Directive::RogueIssue {
                printer,
                ticket,
                claim,
                start,
                end,
            } => self.rogue(line, printer, ticket, *claim, *start, *end)?,
            Directive::Revoke(name) => {
                let id = self
                    .printers
                    .get(name)
                    .ok_or_else(|| script_err(line, format!("unknown printer: {name}")))?
                    .id;
                self.ensure_tc(line)?;
                let now = self.clock.now();
                self.tc
                    .as_mut()
                    .unwrap()
                    .tc
                    .revoke(id, now)
                    .map_err(|e| script_err(line, e))?;
                self.event(format!("revoke {name} id={id} t={now}"));
            }
            Directive::Sync { reader, truncation } => {
                let truncation = truncation.unwrap_or(32);
                let now = self.clock.now();
                let tc = self
                    .tc
                    .as_mut()
                    .ok_or_else(|| script_err(line, "no center exists yet"))?;
                let sim_reader = self
                    .readers
                    .get_mut(reader)
                    .ok_or_else(|| script_err(line, format!("unknown reader: {reader}")))?;
                match sim_reader.sync(tc, truncation, now) {
                    Ok((keys, txs)) => self.event(format!(
                        "sync {reader} trunc={truncation} keys={keys} tx={txs} t={now}"
                    )),
                    Err(e) => self.event(format!("sync {reader} failed: {e}")),
                }
            }
            Directive::Validate { reader, ticket } => {
                let now = self.clock.now();
                let sim_reader = self
                    .readers
                    .get(reader)
                    .ok_or_else(|| script_err(line, format!("unknown reader: {reader}")))?;
                let stored = self
                    .tickets
                    .get(ticket)
                    .ok_or_else(|| script_err(line, format!("unknown ticket: {ticket}")))?;
                let verdict = sim_reader
                    .store
                    .validate(&stored.payload, &stored.pattern, now);
                let token = verdict_token(&verdict);
                self.verdicts
                    .insert((reader.clone(), ticket.clone()), verdict.clone());
                self.report.verdicts.push(VerdictRecord {
                    reader: reader.clone(),
                    ticket: ticket.clone(),
                    verdict,
                });
                self.event(format!("validate {reader} {ticket} -> {token} t={now}"));
            }
            Directive::Expect {
                reader,
                ticket,
                expected,
            } => {
                let verdict = self
                    .verdicts
                    .get(&(reader.clone(), ticket.clone()))
                    .ok_or_else(|| {
                        script_err(line, format!("{ticket} was never validated by {reader}"))
                    })?;
                let actual = verdict_token(verdict);
                let passed = expected.matches(verdict);
                self.report.expectations.push(ExpectationResult {
                    line,
                    reader: reader.clone(),
                    ticket: ticket.clone(),
                    expected: *expected,
                    actual: actual.clone(),
                    passed,
                });
                self.event(format!(
                    "expect {reader} {ticket} {expected}: {}",
                    if passed { "pass" } else { "FAIL" }
                ));
            }
        }
        Ok(())
    }

    fn add_printer(&mut self, line: usize, name: &str) -> Result<(), ScriptError> {
        if self.printers.contains_key(name) {
            return Err(script_err(line, format!("printer {name} already exists")));
        }
        self.ensure_tc(line)?;
        let id = self.next_actor_id;
        self.next_actor_id += 1;
        let comms_key = self.gen_key();
        let ticket_key = match self.mode {
            SigningMode::Distributed => Some(self.gen_key()),
            SigningMode::Central => None,
        };
        let endpoint_nonce = self.gen_nonce_source();
        let sign_nonce = self.gen_nonce_source();
        let now = self.clock.now();
        let tc = self.tc.as_mut().unwrap();
        tc.tc
            .register_comms(id, &comms_key.public_key(), now)
            .map_err(|e| script_err(line, e))?;
        if let Some(ticket_key) = &ticket_key {
            tc.tc
                .register_printer(id, &ticket_key.public_key(), now)
                .map_err(|e| script_err(line, e))?;
        }
        let endpoint = Endpoint::new(id, comms_key, endpoint_nonce, tc.comms_public());
        self.printers.insert(
            name.to_string(),
            SimPrinter {
                id,
                ticket_key,
                sign_nonce,
                endpoint,
                next_ticket_id: 1,
                stolen: false,
            },
        );
        self.event(format!("printer {name} id={id} t={now}"));
        Ok(())
    }

    fn add_reader(&mut self, line: usize, name: &str) -> Result<(), ScriptError> {
        if self.readers.contains_key(name) {
            return Err(script_err(line, format!("reader {name} already exists")));
        }
        self.ensure_tc(line)?;
        let id = self.next_actor_id;
        self.next_actor_id += 1;
        let comms_key = self.gen_key();
        let endpoint_nonce = self.gen_nonce_source();
        let now = self.clock.now();
        let tc = self.tc.as_mut().unwrap();
        tc.tc
            .register_comms(id, &comms_key.public_key(), now)
            .map_err(|e| script_err(line, e))?;
        let endpoint = Endpoint::new(id, comms_key, endpoint_nonce, tc.comms_public());
        let store = ReaderTrustStore::new(tc.tc.root_public());
        self.readers.insert(name.to_string(), SimReader { store, endpoint });
        self.event(format!("reader {name} id={id} t={now}"));
        Ok(())
    }

    fn issue(
        &mut self,
        line: usize,
        printer_name: &str,
        ticket_name: &str,
        start: u32,
        end: u32,
    ) -> Result<(), ScriptError> {
        if self.tickets.contains_key(ticket_name) {
            return Err(script_err(line, format!("ticket {ticket_name} already exists")));
        }
        self.ensure_tc(line)?;
        let pattern = self.gen_pattern();
        let provider = self.gen_provider();
        let now = self.clock.now();
        let mode = self.mode;
        let printer = self
            .printers
            .get_mut(printer_name)
            .ok_or_else(|| script_err(line, format!("unknown printer: {printer_name}")))?;
        let ticket_id = printer.next_ticket_id;
        let meta = TicketMetadata {
            version: codec::FORMAT_VERSION,
            suite_id: SUITE_EC_SCHNORR,
            tc_id: SIM_TC_ID,
            printer_id: printer.id,
            ticket_id,
            issue_ts: now as u32,
            validity_start: start,
            validity_end: end,
        };
        if !meta.times_consistent() {
            return Err(script_err(line, "validity window inconsistent with issue time"));
        }
        let signing_key = match (&printer.ticket_key, mode) {
            (Some(key), SigningMode::Distributed) => key.clone(),
            (_, SigningMode::Central) => printer.endpoint.comms_key().clone(),
            (None, SigningMode::Distributed) => {
                return Err(script_err(line, "printer has no ticket key"))
            }
        };
        let tc = self.tc.as_mut().unwrap();
        let mut channel = SimChannel {
            tc,
            endpoint: &mut printer.endpoint,
            now,
        };
        match printer_issue(
            &signing_key,
            meta,
            &provider,
            &pattern,
            mode,
            &mut channel,
            &mut printer.sign_nonce,
        ) {
            Ok(payload) => {
                printer.next_ticket_id += 1;
                self.tickets
                    .insert(ticket_name.to_string(), StoredTicket { payload, pattern });
                self.event(format!(
                    "issue {ticket_name} printer={printer_name} id={ticket_id} t={now} ok"
                ));
            }
            Err(e) => {
                printer.next_ticket_id += 1;
                self.event(format!(
                    "issue {ticket_name} printer={printer_name} id={ticket_id} t={now} failed: {e}"
                ));
            }
        }
        Ok(())
    }

    fn rogue(
        &mut self,
        line: usize,
        printer_name: &str,
        ticket_name: &str,
        claim: u32,
        start: u32,
        end: u32,
    ) -> Result<(), ScriptError> {
        if self.tickets.contains_key(ticket_name) {
            return Err(script_err(line, format!("ticket {ticket_name} already exists")));
        }
        let pattern = self.gen_pattern();
        let provider = self.gen_provider();
        let now = self.clock.now();
        let printer = self
            .printers
            .get_mut(printer_name)
            .ok_or_else(|| script_err(line, format!("unknown printer: {printer_name}")))?;
        let ticket_id = printer.next_ticket_id;
        printer.next_ticket_id += 1;
        // a thief holds the ticket key in distributed mode, otherwise only
        // the comms key - either way the payload is signed with what's there
        let stolen_key = printer
            .ticket_key
            .clone()
            .unwrap_or_else(|| printer.endpoint.comms_key().clone());
        let meta = TicketMetadata {
            version: codec::FORMAT_VERSION,
            suite_id: SUITE_EC_SCHNORR,
            tc_id: SIM_TC_ID,
            printer_id: printer.id,
            ticket_id,
            issue_ts: claim,
            validity_start: start,
            validity_end: end,
        };
        match rogue_issue(&stolen_key, meta, &provider, &pattern, &mut printer.sign_nonce) {
            Ok(payload) => {
                self.tickets
                    .insert(ticket_name.to_string(), StoredTicket { payload, pattern });
                self.event(format!(
                    "rogue-issue {ticket_name} printer={printer_name} id={ticket_id} claim={claim} t={now}"
                ));
            }
            Err(e) => {
                self.event(format!(
                    "rogue-issue {ticket_name} printer={printer_name} failed: {e}"
                ));
            }
        }
        Ok(())
    }
}

/// Parse and execute a scenario script against fresh actors.
pub fn scenario_run(script: &str) -> Result<ScenarioReport, ScriptError> {
    let scenario = Scenario::parse(script)?;
    Runner::new().run(&scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::U256;
    use alloc::vec;

    fn key(v: u64) -> PrivateKey {
        let bytes = U256::new([v, 0, 0, 0]).to_be_bytes();
        PrivateKey::from_be_bytes(SUITE_EC_SCHNORR, &bytes).unwrap()
    }

    const THEFT_SCRIPT: &str = "\
# distributed signing: theft, revocation, exceptional acceptance
seed 42
clock 1700000000
mode distributed
printer kiosk1
reader gate1
issue kiosk1 T1 start=1700000000 end=1763072000
advance 86400
steal kiosk1
rogue-issue kiosk1 T2 claim=1700000500 start=1700000500 end=1763072500
advance 3600
revoke kiosk1
advance 3600
sync gate1 trunc=32
validate gate1 T1
validate gate1 T2
expect gate1 T1 accept-exceptional
expect gate1 T2 reject:RevokedNoTransaction
";

    #[test]
    fn envelope_round_trip() {
        let sender = key(5);
        let mut nonce = NonceSource::deterministic(1);
        let env = channel_send(&sender, &mut nonce, 9, 1, 7, vec![1, 2, 3]).unwrap();
        let mut filter = ReplayFilter::new();
        let body = channel_receive(
            |id| (id == 9).then(|| sender.public_key()),
            &mut filter,
            &env,
        )
        .unwrap();
        assert_eq!(body, &[1, 2, 3]);
    }

    #[test]
    fn envelope_replay_is_detected() {
        let sender = key(5);
        let mut nonce = NonceSource::deterministic(1);
        let env = channel_send(&sender, &mut nonce, 9, 1, 7, vec![1]).unwrap();
        let mut filter = ReplayFilter::new();
        let lookup = |id: u32| (id == 9).then(|| sender.public_key());
        assert!(channel_receive(lookup, &mut filter, &env).is_ok());
        assert_eq!(
            channel_receive(lookup, &mut filter, &env).unwrap_err(),
            ChannelError::ReplayDetected {
                sender_id: 9,
                counter: 1
            }
        );
        // older counters are also replays
        let env0 = channel_send(&sender, &mut nonce, 9, 0, 7, vec![1]).unwrap();
        assert!(matches!(
            channel_receive(lookup, &mut filter, &env0).unwrap_err(),
            ChannelError::ReplayDetected { .. }
        ));
    }

    #[test]
    fn envelope_unknown_sender_and_bad_signature() {
        let sender = key(5);
        let wrong = key(6);
        let mut nonce = NonceSource::deterministic(1);
        let env = channel_send(&sender, &mut nonce, 9, 1, 7, vec![1]).unwrap();
        let mut filter = ReplayFilter::new();
        assert_eq!(
            channel_receive(|_| None, &mut filter, &env).unwrap_err(),
            ChannelError::UnknownSender { sender_id: 9 }
        );
        assert_eq!(
            channel_receive(|_| Some(wrong.public_key()), &mut filter, &env).unwrap_err(),
            ChannelError::BadEnvelopeSignature
        );
        // a forged envelope must not advance the replay filter
        let good = channel_receive(
            |id| (id == 9).then(|| sender.public_key()),
            &mut filter,
            &env,
        );
        assert!(good.is_ok());
    }

    #[test]
    fn tampered_envelope_body_rejected() {
        let sender = key(5);
        let mut nonce = NonceSource::deterministic(1);
        let mut env = channel_send(&sender, &mut nonce, 9, 1, 7, vec![1, 2, 3]).unwrap();
        env.body[1] ^= 0xff;
        let mut filter = ReplayFilter::new();
        assert_eq!(
            channel_receive(
                |id| (id == 9).then(|| sender.public_key()),
                &mut filter,
                &env
            )
            .unwrap_err(),
            ChannelError::BadEnvelopeSignature
        );
    }

    #[test]
    fn clock_is_monotone() {
        let mut clock = SimClock::new(100);
        clock.advance(50);
        assert_eq!(clock.now(), 150);
        assert!(clock.set(150).is_ok());
        assert!(clock.set(149).is_err());
        assert!(clock.set(200).is_ok());
    }

    #[test]
    fn canonical_theft_scenario_passes() {
        let report = scenario_run(THEFT_SCRIPT).unwrap();
        assert!(report.all_passed(), "report:\n{}", report.render());
        assert_eq!(report.expectations.len(), 2);
        assert_eq!(report.verdicts.len(), 2);
        assert!(matches!(
            report.verdicts[0].verdict,
            ValidationVerdict::AcceptExceptional { .. }
        ));
        assert_eq!(
            report.verdicts[1].verdict,
            ValidationVerdict::Reject(RejectReason::RevokedNoTransaction)
        );
    }

    #[test]
    fn scenario_runs_are_deterministic() {
        let a = scenario_run(THEFT_SCRIPT).unwrap();
        let b = scenario_run(THEFT_SCRIPT).unwrap();
        assert_eq!(a.render(), b.render());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_script_is_an_empty_report() {
        let report = scenario_run("").unwrap();
        assert!(report.all_passed());
        assert!(report.events.is_empty());
        assert!(report.verdicts.is_empty());
        assert_eq!(report.render(), "expectations: 0/0 passed\n");
    }

    #[test]
    fn expired_ticket_fails_an_accept_expectation() {
        let script = "\
seed 1
clock 1000
mode distributed
printer p1
reader r1
issue p1 T1 start=1000 end=2000
sync r1
advance 5000
validate r1 T1
expect r1 T1 accept
";
        let report = scenario_run(script).unwrap();
        assert!(!report.all_passed());
        assert_eq!(report.expectations[0].actual, "reject:Expired");
    }

    #[test]
    fn central_mode_scenario() {
        let script = "\
seed 7
clock 5000
mode central
printer booth
reader gate
issue booth T1 start=5000 end=9000
sync gate
validate gate T1
expect gate T1 accept
# revocation cuts the printer off but leaves issued tickets valid
revoke booth
issue booth T2 start=5000 end=9000
sync gate
validate gate T1
expect gate T1 accept
";
        let report = scenario_run(script).unwrap();
        assert!(report.all_passed(), "report:\n{}", report.render());
        // T2 must have failed: the center refused the revoked printer
        assert!(report
            .events
            .iter()
            .any(|e| e.starts_with("issue T2") && e.contains("failed")));
        assert!(!report.events.iter().any(|e| e == "issue T2 ok"));
    }

    #[test]
    fn script_errors_carry_line_numbers() {
        let err = scenario_run("seed 1\nbogus directive\n").unwrap_err();
        assert_eq!(err.line, 2);

        let err = scenario_run("validate nobody T1\n").unwrap_err();
        assert_eq!(err.line, 1);

        let err = scenario_run("clock 100\nclock 50\n").unwrap_err();
        assert_eq!(err.line, 2);

        let err = scenario_run("printer p1\nmode central\n").unwrap_err();
        assert_eq!(err.line, 2);

        let err = scenario_run("seed 1\nprinter p1\nexpect r1 T1 accept\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn expect_before_validate_is_a_script_error() {
        let script = "\
seed 1
clock 1000
printer p1
reader r1
issue p1 T1 start=1000 end=2000
expect r1 T1 accept
";
        let err = scenario_run(script).unwrap_err();
        assert_eq!(err.line, 6);
    }

    #[test]
    fn report_after_steal_before_revoke_is_exceptional() {
        // the residual window: a thief who keeps reporting stays valid
        // until the revocation lands
        let script = "\
seed 9
clock 1000
mode distributed
printer p1
reader r1
issue p1 T1 start=1000 end=99999
steal p1
advance 60
issue p1 T2 start=1000 end=99999
advance 60
revoke p1
sync r1
validate r1 T1
validate r1 T2
expect r1 T1 accept-exceptional
expect r1 T2 accept-exceptional
";
        let report = scenario_run(script).unwrap();
        assert!(report.all_passed(), "report:\n{}", report.render());
    }

    #[test]
    fn unsynced_reader_rejects_everything() {
        let script = "\
seed 3
clock 1000
printer p1
reader r1
issue p1 T1 start=1000 end=2000
validate r1 T1
expect r1 T1 reject:UnknownSigner
";
        let report = scenario_run(script).unwrap();
        assert!(report.all_passed(), "report:\n{}", report.render());
    }
}
