//! Command-line frontend for the ticketseal protocol library.
//!
//! The commands are stateless: the trusted center's durable state lives in
//! ordinary files (key files, the `txlog.v1` transaction log, and the signed
//! key-list / transaction-list documents), so a whole deployment can be
//! driven from a shell script. Exit codes: 0 success, 1 verification
//! verdict was negative, 2 usage error, 3 I/O or format error.

mod files;

use std::path::{Path, PathBuf};
use std::process::exit;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rand_core::{RngCore, SeedableRng};

use ticketseal_core::codec::{MarkerPattern, ProviderData, TicketMetadata, PATTERN_LEN};
use ticketseal_core::crypto::{keypair_generate, pattern_hash_full, NonceSource};
use ticketseal_core::devices::{sign_ticket_payload, ReaderTrustStore, ValidationVerdict};
use ticketseal_core::simnet::scenario_run;
use ticketseal_core::trust::{
    central_sign_payload, filter_exceptional_transactions, KeyListDocument, KeyRecord, KeyRole,
    SigningMode, SkewPolicy, TransactionListDocument, TransactionRecord, TrustError, TC_KEY_ID,
};

#[derive(Parser)]
#[command(
    name = "ticketseal",
    version,
    about = "Sign, distribute and validate random-pattern ticket codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    /// Printer ticket-signing key (distributed deployments).
    Printer,
    /// The center's own ticket-signing key (central deployments).
    Tc,
    /// Communication key for the authenticated device channel.
    Comms,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Central,
    Distributed,
}

impl From<ModeArg> for SigningMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Central => SigningMode::Central,
            ModeArg::Distributed => SigningMode::Distributed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a keypair and write <out>.priv and <out>.pub.
    Keygen {
        /// Crypto suite id, two hex digits (01 = EC-Schnorr, 02 = ECDSA).
        #[arg(long, default_value = "01")]
        suite: String,
        /// Intended use of the key; purely a label for the deployment.
        #[arg(long, value_enum, default_value = "printer")]
        role: RoleArg,
        /// Output path prefix.
        #[arg(long)]
        out: PathBuf,
        /// Derive the key deterministically from this seed instead of OS entropy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build or verify signed key-list documents.
    Keylist {
        #[command(subcommand)]
        action: KeylistAction,
    },
    /// Issue a ticket signed locally by a printer key (distributed mode).
    #[command(group(ArgGroup::new("pattern_src").required(true).args(["pattern", "random_pattern"])))]
    Issue {
        /// Printer private key file.
        #[arg(long)]
        key: PathBuf,
        /// Trusted-center id, four hex digits.
        #[arg(long)]
        tc: String,
        #[arg(long)]
        printer: u32,
        #[arg(long)]
        ticket: u64,
        /// Issue timestamp (Unix seconds).
        #[arg(long)]
        issue: u32,
        #[arg(long)]
        start: u32,
        #[arg(long)]
        end: u32,
        /// 32-byte provider data file; zeroed when omitted.
        #[arg(long)]
        provider: Option<PathBuf>,
        /// 512-byte marker pattern file.
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Generate the marker pattern pseudo-randomly instead.
        #[arg(long)]
        random_pattern: bool,
        /// Seed for --random-pattern; OS entropy when omitted.
        #[arg(long, requires = "random_pattern")]
        seed: Option<u64>,
        /// Write the marker pattern (the simulated physical scan) here.
        #[arg(long)]
        pattern_out: Option<PathBuf>,
        /// Report the issuance by appending to this transaction log.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Report timestamp for --log; defaults to --issue.
        #[arg(long)]
        now: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Write the ticket as hex text instead of raw binary.
        #[arg(long)]
        hex: bool,
    },
    /// Sign a ticket as the trusted center (central mode), pinning the
    /// issue timestamp to --now.
    #[command(group(ArgGroup::new("pattern_src").required(true).args(["pattern", "random_pattern"])))]
    SignCentral {
        /// The center's ticket-signing private key file.
        #[arg(long)]
        tc_key: PathBuf,
        #[arg(long)]
        tc: String,
        #[arg(long)]
        printer: u32,
        #[arg(long)]
        ticket: u64,
        /// Claimed issue timestamp; overwritten with --now outside the skew window.
        #[arg(long)]
        issue: u32,
        #[arg(long)]
        start: u32,
        #[arg(long)]
        end: u32,
        /// The center's clock (Unix seconds).
        #[arg(long)]
        now: u64,
        /// Widest tolerated |issue - now| before the policy applies.
        #[arg(long, default_value_t = 60)]
        max_skew: u32,
        /// Refuse out-of-skew requests instead of overwriting the timestamp.
        #[arg(long)]
        reject_skew: bool,
        #[arg(long)]
        provider: Option<PathBuf>,
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        random_pattern: bool,
        #[arg(long, requires = "random_pattern")]
        seed: Option<u64>,
        #[arg(long)]
        pattern_out: Option<PathBuf>,
        /// Append the signing transaction to this log.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        hex: bool,
    },
    /// Record one reported issuance in a transaction log.
    Report {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        printer: u32,
        #[arg(long)]
        ticket: u64,
        #[arg(long)]
        issue: u32,
        #[arg(long)]
        end: u32,
        /// The reported 512-byte marker pattern (hashed into the log).
        #[arg(long)]
        pattern: PathBuf,
        /// Report arrival time (Unix seconds).
        #[arg(long)]
        now: u64,
    },
    /// Mark a key revoked in a key-list document and re-sign it.
    Revoke {
        #[arg(long)]
        keylist: PathBuf,
        /// Key id to revoke.
        #[arg(long)]
        key: u32,
        /// Revocation time (Unix seconds).
        #[arg(long)]
        at: u64,
        /// Issue time of the re-signed document; defaults to --at.
        #[arg(long)]
        issued: Option<u64>,
        #[arg(long)]
        root_key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export or verify signed transaction-list documents.
    Txlist {
        #[command(subcommand)]
        action: TxlistAction,
    },
    /// Validate a ticket offline against synced documents.
    Verify {
        #[arg(long)]
        ticket: PathBuf,
        /// Scanned 512-byte pattern; the embedded pattern when omitted
        /// (a perfect scan).
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        keylist: PathBuf,
        /// Optional transaction list for exceptional acceptance.
        #[arg(long)]
        txlist: Option<PathBuf>,
        /// The preinstalled center root public key.
        #[arg(long)]
        root_pub: PathBuf,
        /// Validation time; the system clock when omitted.
        #[arg(long)]
        now: Option<u64>,
    },
    /// Run scenario scripts.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum KeylistAction {
    /// Assemble, sort and sign a key list from public key files.
    Build {
        /// Trusted-center id, four hex digits.
        #[arg(long)]
        tc: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Document issue time (Unix seconds).
        #[arg(long)]
        issued: u64,
        #[arg(long)]
        root_key: PathBuf,
        /// Printer entry as <id>:<pubfile>:<registered>[:<revoked>]; repeatable.
        #[arg(long = "printer-key")]
        printer_keys: Vec<String>,
        /// Center ticket-signing entry as <pubfile>:<registered>[:<revoked>].
        #[arg(long)]
        tc_key: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a key-list document against the root public key.
    Verify {
        #[arg(long)]
        root_pub: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum TxlistAction {
    /// Filter a transaction log against a key list's revocations and sign
    /// the exceptional-transaction document.
    Export {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        keylist: PathBuf,
        /// Pattern-hash truncation in bytes (1..=32).
        #[arg(long, default_value_t = 32)]
        trunc: u8,
        #[arg(long)]
        issued: u64,
        #[arg(long)]
        root_key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a transaction-list document against the root public key.
    Verify {
        #[arg(long)]
        root_pub: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    /// Execute a scenario script and report its expectations.
    Run { file: PathBuf },
}

/// Did a verification-style command accept or reject?
enum Outcome {
    Pass,
    Reject,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => exit(0),
        Ok(Outcome::Reject) => exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            exit(3);
        }
    }
}

fn parse_hex_u8(s: &str, what: &str) -> Result<u8> {
    hex::decode(s)
        .ok()
        .filter(|b| b.len() == 1)
        .map(|b| b[0])
        .ok_or_else(|| anyhow!("{what} must be two hex digits, got {s:?}"))
}

fn parse_hex_u16(s: &str, what: &str) -> Result<u16> {
    hex::decode(s)
        .ok()
        .filter(|b| b.len() == 2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .ok_or_else(|| anyhow!("{what} must be four hex digits, got {s:?}"))
}

fn entropy_nonce_source() -> Result<NonceSource> {
    let mut entropy = [0u8; 32];
    getrandom::getrandom(&mut entropy).context("gathering OS entropy")?;
    Ok(NonceSource::random_from_entropy(entropy))
}

fn load_pattern(
    pattern: Option<&Path>,
    random_pattern: bool,
    seed: Option<u64>,
) -> Result<MarkerPattern> {
    if let Some(path) = pattern {
        return files::read_pattern(path);
    }
    debug_assert!(random_pattern);
    let mut bytes = [0u8; PATTERN_LEN];
    match seed {
        Some(seed) => rand_chacha::ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut bytes),
        None => getrandom::getrandom(&mut bytes).context("gathering OS entropy")?,
    }
    Ok(MarkerPattern::new(bytes))
}

fn load_provider(path: Option<&Path>) -> Result<ProviderData> {
    match path {
        Some(p) => files::read_provider(p),
        None => Ok(ProviderData::new([0u8; 32])),
    }
}

fn system_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn check_metadata(meta: &TicketMetadata) -> Result<()> {
    if !meta.times_consistent() {
        bail!(
            "inconsistent times: issue={} start={} end={}",
            meta.issue_ts,
            meta.validity_start,
            meta.validity_end
        );
    }
    Ok(())
}

/// `<id>:<pubfile>:<registered>[:<revoked>]`
fn parse_printer_entry(entry: &str) -> Result<KeyRecord> {
    let parts: Vec<&str> = entry.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        bail!("--printer-key expects <id>:<pubfile>:<registered>[:<revoked>], got {entry:?}");
    }
    let key_id: u32 = parts[0]
        .parse()
        .with_context(|| format!("printer id in {entry:?}"))?;
    if key_id == TC_KEY_ID {
        bail!("printer id 0 is reserved for the center");
    }
    let public = files::read_public_key(Path::new(parts[1]))?;
    Ok(KeyRecord {
        key_id,
        role: KeyRole::PrinterTicketSigning,
        public_point: public.to_xy_bytes(),
        registered_at: parts[2]
            .parse()
            .with_context(|| format!("registration time in {entry:?}"))?,
        revoked_at: match parts.get(3) {
            Some(t) => {
                Some(t.parse().with_context(|| format!("revocation time in {entry:?}"))?)
            }
            None => None,
        },
    })
}

/// `<pubfile>:<registered>[:<revoked>]`
fn parse_tc_entry(entry: &str) -> Result<KeyRecord> {
    let parts: Vec<&str> = entry.split(':').collect();
    if parts.len() != 2 && parts.len() != 3 {
        bail!("--tc-key expects <pubfile>:<registered>[:<revoked>], got {entry:?}");
    }
    let public = files::read_public_key(Path::new(parts[0]))?;
    Ok(KeyRecord {
        key_id: TC_KEY_ID,
        role: KeyRole::TcTicketSigning,
        public_point: public.to_xy_bytes(),
        registered_at: parts[1]
            .parse()
            .with_context(|| format!("registration time in {entry:?}"))?,
        revoked_at: match parts.get(2) {
            Some(t) => {
                Some(t.parse().with_context(|| format!("revocation time in {entry:?}"))?)
            }
            None => None,
        },
    })
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Keygen {
            suite,
            role,
            out,
            seed,
        } => {
            let suite_id = parse_hex_u8(&suite, "--suite")?;
            let mut source = match seed {
                Some(seed) => NonceSource::deterministic(seed),
                None => entropy_nonce_source()?,
            };
            let (private, public) = keypair_generate(suite_id, &mut source)
                .map_err(|e| anyhow!("key generation failed: {e}"))?;
            let priv_path = out.with_extension("priv");
            let pub_path = out.with_extension("pub");
            files::write_private_key(&priv_path, &private)?;
            files::write_public_key(&pub_path, &public)?;
            let role = match role {
                RoleArg::Printer => "printer",
                RoleArg::Tc => "tc",
                RoleArg::Comms => "comms",
            };
            println!(
                "wrote {} and {} (suite={suite_id:02x}, role={role})",
                priv_path.display(),
                pub_path.display()
            );
            Ok(Outcome::Pass)
        }

        Command::Keylist { action } => run_keylist(action),
        Command::Txlist { action } => run_txlist(action),

        Command::Issue {
            key,
            tc,
            printer,
            ticket,
            issue,
            start,
            end,
            provider,
            pattern,
            random_pattern,
            seed,
            pattern_out,
            log,
            now,
            out,
            hex,
        } => {
            let signing_key = files::read_private_key(&key)?;
            let meta = TicketMetadata {
                version: 1,
                suite_id: signing_key.suite_id(),
                tc_id: parse_hex_u16(&tc, "--tc")?,
                printer_id: printer,
                ticket_id: ticket,
                issue_ts: issue,
                validity_start: start,
                validity_end: end,
            };
            check_metadata(&meta)?;
            let pattern_bytes = load_pattern(pattern.as_deref(), random_pattern, seed)?;
            let provider = load_provider(provider.as_deref())?;
            let mut nonce = entropy_nonce_source()?;
            let payload =
                sign_ticket_payload(&signing_key, &meta, &provider, &pattern_bytes, &mut nonce)
                    .map_err(|e| anyhow!("signing failed: {e}"))?;
            match &log {
                Some(log) => {
                    files::append_txlog(
                        log,
                        &TransactionRecord {
                            printer_id: printer,
                            ticket_id: ticket,
                            issue_ts: issue,
                            validity_end: end,
                            pattern_hash: pattern_hash_full(&pattern_bytes),
                            reported_at: now.unwrap_or(issue as u64),
                        },
                    )?;
                }
                None => eprintln!(
                    "warning: issuance not reported to any transaction log (--log); \
                     this ticket will not survive a revocation of printer {printer}"
                ),
            }
            if let Some(pattern_out) = pattern_out {
                files::write_pattern(&pattern_out, &pattern_bytes)?;
            }
            files::write_ticket(&out, &payload, hex)?;
            println!("wrote {}", out.display());
            Ok(Outcome::Pass)
        }

        Command::SignCentral {
            tc_key,
            tc,
            printer,
            ticket,
            issue,
            start,
            end,
            now,
            max_skew,
            reject_skew,
            provider,
            pattern,
            random_pattern,
            seed,
            pattern_out,
            log,
            out,
            hex,
        } => {
            let ticket_key = files::read_private_key(&tc_key)?;
            let meta = TicketMetadata {
                version: 1,
                suite_id: ticket_key.suite_id(),
                tc_id: parse_hex_u16(&tc, "--tc")?,
                printer_id: printer,
                ticket_id: ticket,
                issue_ts: issue,
                validity_start: start,
                validity_end: end,
            };
            let pattern_bytes = load_pattern(pattern.as_deref(), random_pattern, seed)?;
            let provider = load_provider(provider.as_deref())?;
            let mut nonce = entropy_nonce_source()?;
            let skew = SkewPolicy {
                max_skew_secs: max_skew,
                reject: reject_skew,
            };
            let (payload, record) = central_sign_payload(
                &ticket_key,
                meta,
                &provider,
                &pattern_bytes,
                now,
                skew,
                &mut nonce,
            )
            .map_err(|e| anyhow!("central signing refused: {e}"))?;
            if record.issue_ts != issue {
                eprintln!(
                    "note: claimed issue time {issue} outside the {max_skew}s window, \
                     pinned to {}",
                    record.issue_ts
                );
            }
            check_metadata(&TicketMetadata {
                issue_ts: record.issue_ts,
                ..meta
            })?;
            if let Some(log) = &log {
                files::append_txlog(log, &record)?;
            }
            if let Some(pattern_out) = pattern_out {
                files::write_pattern(&pattern_out, &pattern_bytes)?;
            }
            files::write_ticket(&out, &payload, hex)?;
            println!("wrote {}", out.display());
            Ok(Outcome::Pass)
        }

        Command::Report {
            log,
            printer,
            ticket,
            issue,
            end,
            pattern,
            now,
        } => {
            let pattern = files::read_pattern(&pattern)?;
            files::append_txlog(
                &log,
                &TransactionRecord {
                    printer_id: printer,
                    ticket_id: ticket,
                    issue_ts: issue,
                    validity_end: end,
                    pattern_hash: pattern_hash_full(&pattern),
                    reported_at: now,
                },
            )?;
            println!("recorded printer={printer} ticket={ticket} in {}", log.display());
            Ok(Outcome::Pass)
        }

        Command::Revoke {
            keylist,
            key,
            at,
            issued,
            root_key,
            out,
        } => {
            let root = files::read_private_key(&root_key)?;
            let raw = std::fs::read(&keylist)
                .with_context(|| format!("reading {}", keylist.display()))?;
            let doc = KeyListDocument::parse(&raw)
                .map_err(|e| anyhow!("{}: {e}", keylist.display()))?;
            if !doc.verify(&root.public_key()) {
                bail!("{}: not signed by the given root key", keylist.display());
            }
            let mut entries = doc.entries;
            let mut hit = false;
            for entry in &mut entries {
                if entry.key_id == key && entry.revoked_at.is_none() {
                    entry.revoked_at = Some(at);
                    hit = true;
                }
            }
            if !hit {
                bail!("key {key} has no unrevoked entry in {}", keylist.display());
            }
            let rebuilt = KeyListDocument::build(
                doc.tc_id,
                issued.unwrap_or(at),
                doc.signing_mode,
                entries,
                &root,
            )
            .map_err(|e| anyhow!("rebuilding key list: {e}"))?;
            std::fs::write(&out, rebuilt.canonical_bytes())
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} (key {key} revoked at {at})", out.display());
            Ok(Outcome::Pass)
        }

        Command::Verify {
            ticket,
            pattern,
            keylist,
            txlist,
            root_pub,
            now,
        } => {
            let root = files::read_public_key(&root_pub)?;
            let keylist_raw = std::fs::read(&keylist)
                .with_context(|| format!("reading {}", keylist.display()))?;
            let keylist_doc = KeyListDocument::parse(&keylist_raw)
                .map_err(|e| anyhow!("{}: {e}", keylist.display()))?;
            let txlist_doc = match &txlist {
                Some(path) => {
                    let raw = std::fs::read(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Some(
                        TransactionListDocument::parse(&raw)
                            .map_err(|e| anyhow!("{}: {e}", path.display()))?,
                    )
                }
                None => None,
            };
            let now = now.unwrap_or_else(system_now);
            let mut store = ReaderTrustStore::new(root);
            store
                .sync_documents(keylist_doc, txlist_doc, now)
                .map_err(|e| anyhow!("trust store sync failed: {e}"))?;

            let raw = files::read_ticket(&ticket)?;
            let scanned = match &pattern {
                Some(path) => files::read_pattern(path)?,
                None => ticketseal_core::codec::decode_payload(&raw)
                    .map(|p| p.pattern)
                    .unwrap_or_else(|_| MarkerPattern::new([0u8; PATTERN_LEN])),
            };
            match store.validate(&raw, &scanned, now) {
                ValidationVerdict::Accept => {
                    println!("ACCEPT");
                    Ok(Outcome::Pass)
                }
                ValidationVerdict::AcceptExceptional { matched } => {
                    println!(
                        "ACCEPT-EXCEPTIONAL tx={}/{}",
                        matched.printer_id, matched.ticket_id
                    );
                    Ok(Outcome::Pass)
                }
                ValidationVerdict::Reject(reason) => {
                    println!("REJECT {reason}");
                    Ok(Outcome::Reject)
                }
            }
        }

        Command::Scenario {
            action: ScenarioAction::Run { file },
        } => {
            let script = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let report = scenario_run(&script).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            print!("{}", report.render());
            if report.all_passed() {
                Ok(Outcome::Pass)
            } else {
                Ok(Outcome::Reject)
            }
        }
    }
}

fn run_keylist(action: KeylistAction) -> Result<Outcome> {
    match action {
        KeylistAction::Build {
            tc,
            mode,
            issued,
            root_key,
            printer_keys,
            tc_key,
            out,
        } => {
            let root = files::read_private_key(&root_key)?;
            let mut entries = Vec::new();
            for spec in &printer_keys {
                entries.push(parse_printer_entry(spec)?);
            }
            if let Some(spec) = &tc_key {
                entries.push(parse_tc_entry(spec)?);
            }
            let doc = KeyListDocument::build(
                parse_hex_u16(&tc, "--tc")?,
                issued,
                mode.into(),
                entries,
                &root,
            )
            .map_err(|e| match e {
                TrustError::ModeMismatch => anyhow!(
                    "entries do not fit the mode: central needs exactly one --tc-key and \
                     no --printer-key, distributed needs only --printer-key entries"
                ),
                other => anyhow!("building key list: {other}"),
            })?;
            std::fs::write(&out, doc.canonical_bytes())
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} ({} entries)", out.display(), doc.entries.len());
            Ok(Outcome::Pass)
        }
        KeylistAction::Verify { root_pub, input } => {
            let root = files::read_public_key(&root_pub)?;
            let raw =
                std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            match KeyListDocument::parse(&raw) {
                Err(e) => {
                    println!("INVALID {e}");
                    Ok(Outcome::Reject)
                }
                Ok(doc) if !doc.verify(&root) => {
                    println!("INVALID signature does not verify under the root key");
                    Ok(Outcome::Reject)
                }
                Ok(doc) => {
                    println!(
                        "VALID tc={:04x} mode={} entries={} issued={}",
                        doc.tc_id,
                        doc.signing_mode,
                        doc.entries.len(),
                        doc.issued_at
                    );
                    Ok(Outcome::Pass)
                }
            }
        }
    }
}

fn run_txlist(action: TxlistAction) -> Result<Outcome> {
    match action {
        TxlistAction::Export {
            log,
            keylist,
            trunc,
            issued,
            root_key,
            out,
        } => {
            let root = files::read_private_key(&root_key)?;
            let records = files::read_txlog(&log)?;
            let raw = std::fs::read(&keylist)
                .with_context(|| format!("reading {}", keylist.display()))?;
            let doc = KeyListDocument::parse(&raw)
                .map_err(|e| anyhow!("{}: {e}", keylist.display()))?;
            if !doc.verify(&root.public_key()) {
                bail!("{}: not signed by the given root key", keylist.display());
            }
            let revocations = doc
                .entries
                .iter()
                .filter(|e| e.role == KeyRole::PrinterTicketSigning)
                .filter_map(|e| e.revoked_at.map(|t| (e.key_id, t)))
                .collect();
            let exported = filter_exceptional_transactions(&records, &revocations, trunc);
            let count = exported.len();
            let txdoc = TransactionListDocument::build(doc.tc_id, issued, trunc, exported, &root)
                .map_err(|e| anyhow!("building transaction list: {e}"))?;
            std::fs::write(&out, txdoc.canonical_bytes())
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} ({count} exceptional transactions)", out.display());
            Ok(Outcome::Pass)
        }
        TxlistAction::Verify { root_pub, input } => {
            let root = files::read_public_key(&root_pub)?;
            let raw =
                std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            match TransactionListDocument::parse(&raw) {
                Err(e) => {
                    println!("INVALID {e}");
                    Ok(Outcome::Reject)
                }
                Ok(doc) if !doc.verify(&root) => {
                    println!("INVALID signature does not verify under the root key");
                    Ok(Outcome::Reject)
                }
                Ok(doc) => {
                    println!(
                        "VALID tc={:04x} trunc={} records={} issued={}",
                        doc.tc_id,
                        doc.truncation,
                        doc.records.len(),
                        doc.issued_at
                    );
                    Ok(Outcome::Pass)
                }
            }
        }
    }
}
