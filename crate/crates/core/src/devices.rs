//! Printer and reader state machines: ticket issuance in both signing
//! variants, trust-store synchronization and the complete offline validation
//! decision procedure.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::codec::{
    self, ComponentSizeError, MarkerPattern, ProviderData, SignatureField, TicketMetadata,
};
use crate::crypto::{
    pattern_hash, pattern_hash_full, suite_sign, suite_verify, CryptoError, NonceSource,
    PrivateKey, PublicKey,
};
use crate::trust::{
    KeyListDocument, KeyRecord, KeyRole, SigningMode, TransactionEntry, TransactionListDocument,
    TransactionRecord, TrustError,
};

/// Why an issuance attempt produced no ticket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueError {
    /// The channel to the trusted center failed; in distributed mode an
    /// unreported ticket is invalid, so nothing is emitted.
    Channel(&'static str),
    /// The center refused the request (revoked key, wrong mode, skew, ...).
    Refused(TrustError),
    ComponentSize(ComponentSizeError),
    Crypto(CryptoError),
}

impl fmt::Display for IssueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueError::Channel(reason) => write!(f, "center unreachable: {reason}"),
            IssueError::Refused(e) => write!(f, "center refused: {e}"),
            IssueError::ComponentSize(e) => write!(f, "{e}"),
            IssueError::Crypto(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for IssueError {}

impl From<TrustError> for IssueError {
    fn from(e: TrustError) -> Self {
        IssueError::Refused(e)
    }
}

impl From<CryptoError> for IssueError {
    fn from(e: CryptoError) -> Self {
        IssueError::Crypto(e)
    }
}

impl From<ComponentSizeError> for IssueError {
    fn from(e: ComponentSizeError) -> Self {
        IssueError::ComponentSize(e)
    }
}

/// A printer's connection to its trusted center. The simulation net backs
/// this with authenticated envelopes; tests may wire it directly.
pub trait TcChannel {
    /// Central mode: submit the raw code content and get back the complete
    /// signed 704-byte code (the center may have pinned the issue time).
    fn central_sign(
        &mut self,
        meta: TicketMetadata,
        provider: &ProviderData,
        pattern: &MarkerPattern,
    ) -> Result<Vec<u8>, IssueError>;

    /// Distributed mode: report one issuance. The center stamps the report
    /// time itself.
    fn report(&mut self, record: TransactionRecord) -> Result<(), IssueError>;
}

/// Local signing primitive shared by ordinary distributed issuance and
/// rogue issuance: sign the code content with `key` and assemble the
/// payload. Reporting, when required, is the caller's job.
pub fn sign_ticket_payload(
    key: &PrivateKey,
    meta: &TicketMetadata,
    provider: &ProviderData,
    pattern: &MarkerPattern,
    nonce: &mut NonceSource,
) -> Result<Vec<u8>, IssueError> {
    if meta.suite_id != key.suite_id() {
        return Err(IssueError::Crypto(CryptoError::WrongSuite {
            expected: meta.suite_id,
            got: key.suite_id(),
        }));
    }
    let region = codec::encode_signed_region(meta, provider, pattern);
    let sig = suite_sign(key, &region, nonce)?;
    let field = SignatureField::new(&sig)?;
    Ok(codec::encode_payload(meta, provider, pattern, &field).to_vec())
}

/// Issue one ticket.
///
/// Central mode delegates signing to the center over the channel; the
/// printer's own key plays no part in the ticket. Distributed mode signs
/// locally with `printer_key` and then reports the transaction - if the
/// report cannot be delivered the issuance fails and no payload is returned,
/// because an unreported ticket would never survive a later revocation.
pub fn printer_issue(
    printer_key: &PrivateKey,
    meta: TicketMetadata,
    provider: &ProviderData,
    pattern: &MarkerPattern,
    mode: SigningMode,
    channel: &mut dyn TcChannel,
    nonce: &mut NonceSource,
) -> Result<Vec<u8>, IssueError> {
    match mode {
        SigningMode::Central => channel.central_sign(meta, provider, pattern),
        SigningMode::Distributed => {
            let payload = sign_ticket_payload(printer_key, &meta, provider, pattern, nonce)?;
            channel.report(TransactionRecord {
                printer_id: meta.printer_id,
                ticket_id: meta.ticket_id,
                issue_ts: meta.issue_ts,
                validity_end: meta.validity_end,
                pattern_hash: pattern_hash_full(pattern),
                reported_at: 0, // stamped by the center
            })?;
            Ok(payload)
        }
    }
}

/// What a stolen printer does: sign locally with attacker-chosen metadata
/// (typically a backdated issue timestamp) and never report. This is the
/// adversary the scenario suite exercises.
pub fn rogue_issue(
    stolen_key: &PrivateKey,
    meta: TicketMetadata,
    provider: &ProviderData,
    pattern: &MarkerPattern,
    nonce: &mut NonceSource,
) -> Result<Vec<u8>, IssueError> {
    sign_ticket_payload(stolen_key, &meta, provider, pattern, nonce)
}

/// The reader's verdict on one scanned ticket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationVerdict {
    Accept,
    /// The signer is revoked but a matching pre-theft transaction vouches
    /// for the ticket.
    AcceptExceptional { matched: TransactionEntry },
    Reject(RejectReason),
}

impl ValidationVerdict {
    pub fn is_accept(&self) -> bool {
        !matches!(self, ValidationVerdict::Reject(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    InvalidStructure,
    PatternMismatch,
    UnknownSigner,
    BadSignature,
    RevokedNoTransaction,
    NotYetValid,
    Expired,
}

impl RejectReason {
    pub fn token(self) -> &'static str {
        match self {
            RejectReason::InvalidStructure => "InvalidStructure",
            RejectReason::PatternMismatch => "PatternMismatch",
            RejectReason::UnknownSigner => "UnknownSigner",
            RejectReason::BadSignature => "BadSignature",
            RejectReason::RevokedNoTransaction => "RevokedNoTransaction",
            RejectReason::NotYetValid => "NotYetValid",
            RejectReason::Expired => "Expired",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Some(match token {
            "InvalidStructure" => RejectReason::InvalidStructure,
            "PatternMismatch" => RejectReason::PatternMismatch,
            "UnknownSigner" => RejectReason::UnknownSigner,
            "BadSignature" => RejectReason::BadSignature,
            "RevokedNoTransaction" => RejectReason::RevokedNoTransaction,
            "NotYetValid" => RejectReason::NotYetValid,
            "Expired" => RejectReason::Expired,
            _ => return None,
        })
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A rejected synchronization attempt; the previous store is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DocumentRejected {
    pub reason: &'static str,
}

impl fmt::Display for DocumentRejected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "document rejected: {}", self.reason)
    }
}

impl core::error::Error for DocumentRejected {}

/// Everything a reader trusts: the preinstalled center root key, the last
/// verified key list and the last verified transaction list.
#[derive(Debug, Clone)]
pub struct ReaderTrustStore {
    tc_root: PublicKey,
    keylist: Option<KeyListDocument>,
    transactions: BTreeMap<(u32, u64), TransactionEntry>,
    truncation: u8,
    last_sync: u64,
}

impl ReaderTrustStore {
    /// A fresh store trusts only the preinstalled root key; until the first
    /// sync every ticket fails signer resolution.
    pub fn new(tc_root: PublicKey) -> Self {
        ReaderTrustStore {
            tc_root,
            keylist: None,
            transactions: BTreeMap::new(),
            truncation: 32,
            last_sync: 0,
        }
    }

    pub fn keylist(&self) -> Option<&KeyListDocument> {
        self.keylist.as_ref()
    }

    pub fn transaction_count(&self) -> usize {
        self.transactions.len()
    }

    pub fn truncation(&self) -> u8 {
        self.truncation
    }

    pub fn last_sync(&self) -> u64 {
        self.last_sync
    }

    /// Install a fresh key list and transaction list, all or nothing. Both
    /// documents must parse as canonical bytes, verify under the root key
    /// and agree on the issuing center; otherwise the store is untouched.
    pub fn sync(
        &mut self,
        keylist_raw: &[u8],
        txlist_raw: &[u8],
        now: u64,
    ) -> Result<(), DocumentRejected> {
        let keylist = KeyListDocument::parse(keylist_raw)
            .map_err(|_| DocumentRejected { reason: "key list malformed" })?;
        let txlist = TransactionListDocument::parse(txlist_raw)
            .map_err(|_| DocumentRejected { reason: "transaction list malformed" })?;
        self.sync_documents(keylist, Some(txlist), now)
    }

    /// Like [`ReaderTrustStore::sync`] but over already-parsed documents. A
    /// missing transaction list installs an empty transaction set, which is
    /// the state of a reader that has never received one: tickets from
    /// revoked signers then have nothing to vouch for them.
    pub fn sync_documents(
        &mut self,
        keylist: KeyListDocument,
        txlist: Option<TransactionListDocument>,
        now: u64,
    ) -> Result<(), DocumentRejected> {
        if !keylist.verify(&self.tc_root) {
            return Err(DocumentRejected { reason: "key list signature invalid" });
        }
        if let Some(txlist) = &txlist {
            if !txlist.verify(&self.tc_root) {
                return Err(DocumentRejected { reason: "transaction list signature invalid" });
            }
            if txlist.tc_id != keylist.tc_id {
                return Err(DocumentRejected { reason: "documents from different centers" });
            }
        }

        match txlist {
            Some(txlist) => {
                self.transactions = txlist
                    .records
                    .into_iter()
                    .map(|r| ((r.printer_id, r.ticket_id), r))
                    .collect();
                self.truncation = txlist.truncation;
            }
            None => {
                self.transactions = BTreeMap::new();
                self.truncation = 32;
            }
        }
        self.keylist = Some(keylist);
        self.last_sync = now;
        Ok(())
    }

    /// Resolve the key expected to have signed this ticket. Central mode
    /// trusts only the center's entry; distributed mode looks up the
    /// printer's entry, preferring the unrevoked one and falling back to the
    /// most recently registered revoked entry.
    fn resolve_signer(&self, meta: &TicketMetadata) -> Option<&KeyRecord> {
        let keylist = self.keylist.as_ref()?;
        match keylist.signing_mode {
            SigningMode::Central => {
                if meta.tc_id != keylist.tc_id {
                    return None;
                }
                keylist
                    .entries
                    .iter()
                    .find(|e| e.role == KeyRole::TcTicketSigning)
            }
            SigningMode::Distributed => {
                let printer_entries = keylist
                    .entries
                    .iter()
                    .filter(|e| {
                        e.role == KeyRole::PrinterTicketSigning && e.key_id == meta.printer_id
                    });
                let mut latest_revoked = None;
                for entry in printer_entries {
                    if !entry.is_revoked() {
                        return Some(entry);
                    }
                    if latest_revoked
                        .map(|p: &KeyRecord| p.registered_at < entry.registered_at)
                        .unwrap_or(true)
                    {
                        latest_revoked = Some(entry);
                    }
                }
                latest_revoked
            }
        }
    }

    /// The complete offline decision procedure, returning at the first
    /// failing step:
    ///
    /// 1. structural decode;
    /// 2. scanned pattern equals the embedded pattern byte for byte;
    /// 3. signer key resolution from the synced key list;
    /// 4. signature verification over the signed region, with the suite the
    ///    metadata names;
    /// 5. for a revoked signer, a matching reported transaction
    ///    (ids, issue time, validity end and truncated pattern hash);
    /// 6. validity window, boundaries inclusive;
    /// 7. accept - exceptionally, if step 5 had to vouch for the ticket.
    pub fn validate(
        &self,
        raw: &[u8],
        scanned_pattern: &MarkerPattern,
        now: u64,
    ) -> ValidationVerdict {
        use ValidationVerdict::Reject;

        // 1. structure
        let Ok(payload) = codec::decode_payload(raw) else {
            return Reject(RejectReason::InvalidStructure);
        };
        let meta = payload.metadata;

        // 2. physical pattern vs embedded pattern
        if scanned_pattern != &payload.pattern {
            return Reject(RejectReason::PatternMismatch);
        }

        // 3. signer resolution
        let Some(entry) = self.resolve_signer(&meta) else {
            return Reject(RejectReason::UnknownSigner);
        };

        // 4. signature over the signed region
        let Ok(region) = codec::signed_region(raw) else {
            return Reject(RejectReason::InvalidStructure);
        };
        let Ok(public) = PublicKey::from_xy_bytes(meta.suite_id, &entry.public_point) else {
            return Reject(RejectReason::BadSignature);
        };
        if !suite_verify(&public, region, payload.signature.as_bytes()) {
            return Reject(RejectReason::BadSignature);
        }

        // 5. revoked signer: only a reported pre-theft transaction vouches
        let mut matched = None;
        if entry.is_revoked() {
            let Some(tx) = self.transactions.get(&(meta.printer_id, meta.ticket_id)) else {
                return Reject(RejectReason::RevokedNoTransaction);
            };
            let Ok(hash) = pattern_hash(&payload.pattern, self.truncation as usize) else {
                return Reject(RejectReason::RevokedNoTransaction);
            };
            if tx.issue_ts != meta.issue_ts
                || tx.validity_end != meta.validity_end
                || tx.pattern_hash != hash
            {
                return Reject(RejectReason::RevokedNoTransaction);
            }
            matched = Some(tx.clone());
        }

        // 6. validity window, boundaries inclusive
        if now < meta.validity_start as u64 {
            return Reject(RejectReason::NotYetValid);
        }
        if now > meta.validity_end as u64 {
            return Reject(RejectReason::Expired);
        }

        // 7. verdict
        match matched {
            Some(tx) => ValidationVerdict::AcceptExceptional { matched: tx },
            None => ValidationVerdict::Accept,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::U256;
    use crate::crypto::{keypair_generate, SUITE_EC_SCHNORR};
    use crate::trust::{SkewPolicy, TrustedCenter};
    use alloc::vec;

    fn key(v: u64) -> PrivateKey {
        let bytes = U256::new([v, 0, 0, 0]).to_be_bytes();
        PrivateKey::from_be_bytes(SUITE_EC_SCHNORR, &bytes).unwrap()
    }

    fn meta(printer: u32, ticket: u64, issue: u32, start: u32, end: u32) -> TicketMetadata {
        TicketMetadata {
            version: 1,
            suite_id: SUITE_EC_SCHNORR,
            tc_id: 1,
            printer_id: printer,
            ticket_id: ticket,
            issue_ts: issue,
            validity_start: start,
            validity_end: end,
        }
    }

    fn pattern(seed: u8) -> MarkerPattern {
        let mut bytes = [0u8; 512];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = seed.wrapping_add(i as u8).wrapping_mul(31);
        }
        MarkerPattern::new(bytes)
    }

    /// Channel wired straight into an in-process center.
    struct DirectChannel<'a> {
        tc: &'a mut TrustedCenter,
        printer_id: u32,
        now: u64,
        online: bool,
    }

    impl TcChannel for DirectChannel<'_> {
        fn central_sign(
            &mut self,
            meta: TicketMetadata,
            provider: &ProviderData,
            pattern: &MarkerPattern,
        ) -> Result<Vec<u8>, IssueError> {
            if !self.online {
                return Err(IssueError::Channel("offline"));
            }
            Ok(self
                .tc
                .central_sign(meta, provider, pattern, self.printer_id, self.now)?
                .to_vec())
        }

        fn report(&mut self, record: TransactionRecord) -> Result<(), IssueError> {
            if !self.online {
                return Err(IssueError::Channel("offline"));
            }
            self.tc.record_transaction(record, self.now)?;
            Ok(())
        }
    }

    struct World {
        tc: TrustedCenter,
        printer_key: PrivateKey,
        nonce: NonceSource,
    }

    fn distributed_world() -> World {
        let mut tc = TrustedCenter::new(
            1,
            SigningMode::Distributed,
            key(1001),
            None,
            SkewPolicy::default(),
            NonceSource::deterministic(1),
            100,
        )
        .unwrap();
        let printer_key = key(7);
        tc.register_printer(7, &printer_key.public_key(), 100).unwrap();
        World {
            tc,
            printer_key,
            nonce: NonceSource::deterministic(2),
        }
    }

    fn issue_distributed(world: &mut World, ticket: u64, issue: u32, end: u32) -> Vec<u8> {
        let mut channel = DirectChannel {
            tc: &mut world.tc,
            printer_id: 7,
            now: issue as u64,
            online: true,
        };
        printer_issue(
            &world.printer_key,
            meta(7, ticket, issue, issue, end),
            &ProviderData::new([3u8; 32]),
            &pattern(ticket as u8),
            SigningMode::Distributed,
            &mut channel,
            &mut world.nonce,
        )
        .unwrap()
    }

    fn synced_store(world: &World, now: u64) -> ReaderTrustStore {
        let mut store = ReaderTrustStore::new(world.tc.root_public());
        let kl = world.tc.export_keylist(now).unwrap().canonical_bytes();
        let tx = world.tc.export_transactions(32, now).unwrap().canonical_bytes();
        store.sync(&kl, &tx, now).unwrap();
        store
    }

    #[test]
    fn distributed_issue_signs_and_reports() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        let region = codec::signed_region(&payload).unwrap();
        let decoded = codec::decode_payload(&payload).unwrap();
        assert!(suite_verify(
            &world.printer_key.public_key(),
            region,
            decoded.signature.as_bytes()
        ));
        assert_eq!(world.tc.transaction_log().len(), 1);
        assert_eq!(world.tc.transaction_log()[0].ticket_id, 1);
        assert_eq!(
            world.tc.transaction_log()[0].pattern_hash,
            pattern_hash_full(&pattern(1))
        );
    }

    #[test]
    fn distributed_issue_with_unreachable_center_fails() {
        let mut world = distributed_world();
        let mut channel = DirectChannel {
            tc: &mut world.tc,
            printer_id: 7,
            now: 200,
            online: false,
        };
        let err = printer_issue(
            &world.printer_key,
            meta(7, 1, 200, 200, 9000),
            &ProviderData::new([0u8; 32]),
            &pattern(1),
            SigningMode::Distributed,
            &mut channel,
            &mut world.nonce,
        )
        .unwrap_err();
        assert_eq!(err, IssueError::Channel("offline"));
        assert!(world.tc.transaction_log().is_empty());
    }

    #[test]
    fn central_issue_verifies_under_center_key_not_printer_key() {
        let tc_ticket_key = key(1002);
        let mut tc = TrustedCenter::new(
            1,
            SigningMode::Central,
            key(1001),
            Some(tc_ticket_key.clone()),
            SkewPolicy::default(),
            NonceSource::deterministic(1),
            100,
        )
        .unwrap();
        let printer_comms = key(7);
        tc.register_comms(7, &printer_comms.public_key(), 100).unwrap();
        let mut nonce = NonceSource::deterministic(2);
        let mut channel = DirectChannel {
            tc: &mut tc,
            printer_id: 7,
            now: 200,
            online: true,
        };
        let payload = printer_issue(
            &printer_comms,
            meta(7, 1, 200, 200, 9000),
            &ProviderData::new([0u8; 32]),
            &pattern(1),
            SigningMode::Central,
            &mut channel,
            &mut nonce,
        )
        .unwrap();
        let region = codec::signed_region(&payload).unwrap();
        let decoded = codec::decode_payload(&payload).unwrap();
        assert!(suite_verify(
            &tc_ticket_key.public_key(),
            region,
            decoded.signature.as_bytes()
        ));
        assert!(!suite_verify(
            &printer_comms.public_key(),
            region,
            decoded.signature.as_bytes()
        ));
    }

    #[test]
    fn valid_unrevoked_ticket_accepts() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        let store = synced_store(&world, 300);
        assert_eq!(
            store.validate(&payload, &pattern(1), 500),
            ValidationVerdict::Accept
        );
    }

    #[test]
    fn fresh_store_knows_no_signers() {
        let world = distributed_world();
        let mut w = distributed_world();
        let payload = issue_distributed(&mut w, 1, 200, 9000);
        let store = ReaderTrustStore::new(world.tc.root_public());
        assert_eq!(
            store.validate(&payload, &pattern(1), 500),
            ValidationVerdict::Reject(RejectReason::UnknownSigner)
        );
    }

    #[test]
    fn revoked_with_reported_transaction_is_exceptional() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        world.tc.revoke(7, 1000).unwrap();
        let store = synced_store(&world, 1100);
        match store.validate(&payload, &pattern(1), 1200) {
            ValidationVerdict::AcceptExceptional { matched } => {
                assert_eq!(matched.printer_id, 7);
                assert_eq!(matched.ticket_id, 1);
            }
            v => panic!("expected exceptional acceptance, got {v:?}"),
        }
    }

    #[test]
    fn revoked_unreported_backdated_ticket_is_rejected() {
        let mut world = distributed_world();
        issue_distributed(&mut world, 1, 200, 9000);
        world.tc.revoke(7, 1000).unwrap();
        // rogue ticket claiming a pre-theft issue time, never reported
        let rogue = rogue_issue(
            &world.printer_key,
            meta(7, 2, 150, 150, 9000),
            &ProviderData::new([0u8; 32]),
            &pattern(2),
            &mut world.nonce,
        )
        .unwrap();
        let store = synced_store(&world, 1100);
        assert_eq!(
            store.validate(&rogue, &pattern(2), 1200),
            ValidationVerdict::Reject(RejectReason::RevokedNoTransaction)
        );
    }

    #[test]
    fn revoked_with_empty_transaction_store_always_rejects() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        world.tc.revoke(7, 150).unwrap(); // before the report: nothing exported
        let store = synced_store(&world, 1100);
        assert_eq!(store.transaction_count(), 0);
        assert_eq!(
            store.validate(&payload, &pattern(1), 500),
            ValidationVerdict::Reject(RejectReason::RevokedNoTransaction)
        );
    }

    #[test]
    fn transaction_match_requires_equal_times_and_hash() {
        let mut world = distributed_world();
        issue_distributed(&mut world, 1, 200, 9000);
        world.tc.revoke(7, 1000).unwrap();
        let store = synced_store(&world, 1100);

        // same ids, different validity end: forged extension attempt
        let forged = rogue_issue(
            &world.printer_key,
            meta(7, 1, 200, 200, 90_000),
            &ProviderData::new([3u8; 32]),
            &pattern(1),
            &mut world.nonce,
        )
        .unwrap();
        assert_eq!(
            store.validate(&forged, &pattern(1), 500),
            ValidationVerdict::Reject(RejectReason::RevokedNoTransaction)
        );

        // same ids and times, different pattern
        let swapped = rogue_issue(
            &world.printer_key,
            meta(7, 1, 200, 200, 9000),
            &ProviderData::new([3u8; 32]),
            &pattern(99),
            &mut world.nonce,
        )
        .unwrap();
        assert_eq!(
            store.validate(&swapped, &pattern(99), 500),
            ValidationVerdict::Reject(RejectReason::RevokedNoTransaction)
        );
    }

    #[test]
    fn unsigned_or_garbage_signatures_reject() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        let store = synced_store(&world, 300);

        let decoded = codec::decode_payload(&payload).unwrap();
        let zeroed = codec::encode_payload(
            &decoded.metadata,
            &decoded.provider,
            &decoded.pattern,
            &SignatureField::new(&[0u8; 64]).unwrap(),
        );
        assert_eq!(
            store.validate(&zeroed, &pattern(1), 500),
            ValidationVerdict::Reject(RejectReason::BadSignature)
        );

        let mut flipped = payload.clone();
        flipped[600] ^= 0x01;
        assert_eq!(
            store.validate(&flipped, &pattern(1), 500),
            ValidationVerdict::Reject(RejectReason::BadSignature)
        );
    }

    #[test]
    fn structure_pattern_and_window_rejections_in_order() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        let store = synced_store(&world, 300);

        assert_eq!(
            store.validate(&payload[..703], &pattern(1), 500),
            ValidationVerdict::Reject(RejectReason::InvalidStructure)
        );
        assert_eq!(
            store.validate(&payload, &pattern(2), 500),
            ValidationVerdict::Reject(RejectReason::PatternMismatch)
        );
        // window boundaries: start-1 / start / end / end+1
        assert_eq!(
            store.validate(&payload, &pattern(1), 199),
            ValidationVerdict::Reject(RejectReason::NotYetValid)
        );
        assert_eq!(
            store.validate(&payload, &pattern(1), 200),
            ValidationVerdict::Accept
        );
        assert_eq!(
            store.validate(&payload, &pattern(1), 9000),
            ValidationVerdict::Accept
        );
        assert_eq!(
            store.validate(&payload, &pattern(1), 9001),
            ValidationVerdict::Reject(RejectReason::Expired)
        );
    }

    #[test]
    fn unknown_printer_id_is_unknown_signer() {
        let mut world = distributed_world();
        issue_distributed(&mut world, 1, 200, 9000);
        let store = synced_store(&world, 300);
        // signed by a key the list has never seen
        let stranger = key(999);
        let mut nonce = NonceSource::deterministic(5);
        let foreign = rogue_issue(
            &stranger,
            meta(424242, 1, 200, 200, 9000),
            &ProviderData::new([0u8; 32]),
            &pattern(5),
            &mut nonce,
        )
        .unwrap();
        assert_eq!(
            store.validate(&foreign, &pattern(5), 500),
            ValidationVerdict::Reject(RejectReason::UnknownSigner)
        );
    }

    #[test]
    fn rogue_ticket_under_central_mode_has_no_signer() {
        let mut tc = TrustedCenter::new(
            1,
            SigningMode::Central,
            key(1001),
            Some(key(1002)),
            SkewPolicy::default(),
            NonceSource::deterministic(1),
            100,
        )
        .unwrap();
        let comms = key(7);
        tc.register_comms(7, &comms.public_key(), 100).unwrap();
        let mut store = ReaderTrustStore::new(tc.root_public());
        let kl = tc.export_keylist(300).unwrap().canonical_bytes();
        let tx = tc.export_transactions(32, 300).unwrap().canonical_bytes();
        store.sync(&kl, &tx, 300).unwrap();

        // attacker holds only the comms key; the key list has no printer
        // entries, so the signature is checked against the center's key
        let mut nonce = NonceSource::deterministic(5);
        let rogue = rogue_issue(
            &comms,
            meta(7, 1, 200, 200, 9000),
            &ProviderData::new([0u8; 32]),
            &pattern(5),
            &mut nonce,
        )
        .unwrap();
        assert_eq!(
            store.validate(&rogue, &pattern(5), 500),
            ValidationVerdict::Reject(RejectReason::BadSignature)
        );
    }

    #[test]
    fn sync_is_atomic_and_rejects_tampering() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        let mut store = ReaderTrustStore::new(world.tc.root_public());
        let kl = world.tc.export_keylist(300).unwrap().canonical_bytes();
        let tx = world.tc.export_transactions(32, 300).unwrap().canonical_bytes();
        store.sync(&kl, &tx, 300).unwrap();
        assert_eq!(store.last_sync(), 300);

        // corrupt one byte of the new transaction list: whole sync refused,
        // previous state retained
        world.tc.revoke(7, 1000).unwrap();
        let kl2 = world.tc.export_keylist(1100).unwrap().canonical_bytes();
        let mut tx2 = world.tc.export_transactions(32, 1100).unwrap().canonical_bytes();
        let mid = tx2.len() / 2;
        tx2[mid] ^= 0x01;
        assert!(store.sync(&kl2, &tx2, 1100).is_err());
        assert_eq!(store.last_sync(), 300);
        // printer 7 still unrevoked in the retained key list
        assert_eq!(
            store.validate(&payload, &pattern(1), 500),
            ValidationVerdict::Accept
        );
    }

    #[test]
    fn sync_rejects_documents_signed_by_a_non_root_key() {
        let world = distributed_world();
        let mut store = ReaderTrustStore::new(world.tc.root_public());
        let forged_root = key(4444);
        let kl = KeyListDocument::build(1, 300, SigningMode::Distributed, vec![], &forged_root)
            .unwrap()
            .canonical_bytes();
        let tx = TransactionListDocument::build(1, 300, 32, vec![], &forged_root)
            .unwrap()
            .canonical_bytes();
        assert!(store.sync(&kl, &tx, 300).is_err());
        assert!(store.keylist().is_none());
    }

    #[test]
    fn exceptional_acceptance_is_monotone_in_truncation() {
        // a ticket vouched for at full hash width is vouched for at every
        // narrower width, because stored hashes are prefixes
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        world.tc.revoke(7, 1000).unwrap();
        for truncation in 1..=32u8 {
            let mut store = ReaderTrustStore::new(world.tc.root_public());
            let kl = world.tc.export_keylist(1100).unwrap().canonical_bytes();
            let tx = world
                .tc
                .export_transactions(truncation, 1100)
                .unwrap()
                .canonical_bytes();
            store.sync(&kl, &tx, 1100).unwrap();
            assert!(
                matches!(
                    store.validate(&payload, &pattern(1), 1200),
                    ValidationVerdict::AcceptExceptional { .. }
                ),
                "truncation {truncation}"
            );
        }
    }

    #[test]
    fn verdicts_are_deterministic() {
        let mut world = distributed_world();
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        world.tc.revoke(7, 1000).unwrap();
        let store = synced_store(&world, 1100);
        let first = store.validate(&payload, &pattern(1), 500);
        for _ in 0..5 {
            assert_eq!(store.validate(&payload, &pattern(1), 500), first);
        }
    }

    #[test]
    fn wrong_suite_key_cannot_sign_metadata_naming_another_suite() {
        let mut world = distributed_world();
        let mut bad_meta = meta(7, 1, 200, 200, 9000);
        bad_meta.suite_id = crate::crypto::SUITE_ECDSA;
        let err = rogue_issue(
            &world.printer_key,
            bad_meta,
            &ProviderData::new([0u8; 32]),
            &pattern(1),
            &mut world.nonce,
        )
        .unwrap_err();
        assert!(matches!(err, IssueError::Crypto(CryptoError::WrongSuite { .. })));
    }

    #[test]
    fn keypair_generate_roundtrip_in_issue_flow() {
        // a freshly generated key, not a tiny test scalar
        let mut src = NonceSource::random_from_entropy([7u8; 32]);
        let (printer_key, printer_pub) = keypair_generate(SUITE_EC_SCHNORR, &mut src).unwrap();
        let mut tc = TrustedCenter::new(
            1,
            SigningMode::Distributed,
            key(1001),
            None,
            SkewPolicy::default(),
            NonceSource::deterministic(1),
            100,
        )
        .unwrap();
        tc.register_printer(7, &printer_pub, 100).unwrap();
        let mut world = World {
            tc,
            printer_key,
            nonce: NonceSource::deterministic(2),
        };
        let payload = issue_distributed(&mut world, 1, 200, 9000);
        let store = synced_store(&world, 300);
        assert_eq!(
            store.validate(&payload, &pattern(1), 500),
            ValidationVerdict::Accept
        );
    }
}
