//! File formats the command line reads and writes.
//!
//! Key files are two-line hex text (`suite=` then `priv=` or `pub=`).
//! Ticket files are either raw 704-byte binary or 1408 lowercase hex
//! characters with an optional trailing newline, auto-detected by length.
//! The transaction log (`txlog.v1`) is the center's unsigned working log of
//! reported issuances with full-width pattern hashes; signed transaction
//! lists are exported from it.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ticketseal_core::codec::{MarkerPattern, ProviderData, CODE_LEN, PATTERN_LEN, PROVIDER_LEN};
use ticketseal_core::crypto::{PrivateKey, PublicKey};
use ticketseal_core::trust::TransactionRecord;

pub const TXLOG_HEADER: &str = "format=txlog.v1";

fn parse_suite_line(line: Option<&str>, path: &Path) -> Result<u8> {
    let line = line.with_context(|| format!("{}: missing suite line", path.display()))?;
    let hex_id = line
        .strip_prefix("suite=")
        .with_context(|| format!("{}: expected suite=<hex2>", path.display()))?;
    let bytes = hex::decode(hex_id)
        .ok()
        .filter(|b| b.len() == 1)
        .with_context(|| format!("{}: suite id must be two hex digits", path.display()))?;
    Ok(bytes[0])
}

pub fn write_private_key(path: &Path, key: &PrivateKey) -> Result<()> {
    let text = format!(
        "suite={:02x}\npriv={}\n",
        key.suite_id(),
        hex::encode(key.to_be_bytes())
    );
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_private_key(path: &Path) -> Result<PrivateKey> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let suite_id = parse_suite_line(lines.next(), path)?;
    let value = lines
        .next()
        .and_then(|l| l.strip_prefix("priv="))
        .with_context(|| format!("{}: expected priv=<hex64>", path.display()))?;
    let bytes: [u8; 32] = hex::decode(value)
        .ok()
        .and_then(|b| b.try_into().ok())
        .with_context(|| format!("{}: private scalar must be 64 hex digits", path.display()))?;
    PrivateKey::from_be_bytes(suite_id, &bytes)
        .with_context(|| format!("{}: invalid private key", path.display()))
}

pub fn write_public_key(path: &Path, key: &PublicKey) -> Result<()> {
    let text = format!(
        "suite={:02x}\npub={}\n",
        key.suite_id(),
        hex::encode(key.to_xy_bytes())
    );
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_public_key(path: &Path) -> Result<PublicKey> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let suite_id = parse_suite_line(lines.next(), path)?;
    let value = lines
        .next()
        .and_then(|l| l.strip_prefix("pub="))
        .with_context(|| format!("{}: expected pub=<hex128>", path.display()))?;
    let bytes: [u8; 64] = hex::decode(value)
        .ok()
        .and_then(|b| b.try_into().ok())
        .with_context(|| format!("{}: public key must be 128 hex digits", path.display()))?;
    PublicKey::from_xy_bytes(suite_id, &bytes)
        .with_context(|| format!("{}: invalid public key", path.display()))
}

/// Raw binary or hex text, auto-detected by length: exactly 704 bytes is the
/// binary form, 1408 hex characters (optional trailing newline) the text
/// form. Anything else passes through unchanged so that structural
/// validation, not file handling, produces the rejection.
pub fn read_ticket(path: &Path) -> Result<Vec<u8>> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if raw.len() == CODE_LEN {
        return Ok(raw);
    }
    if let Ok(text) = std::str::from_utf8(&raw) {
        let text = text.trim_end_matches(['\r', '\n']);
        if text.len() == CODE_LEN * 2 {
            if let Ok(bytes) = hex::decode(text) {
                return Ok(bytes);
            }
        }
    }
    Ok(raw)
}

pub fn write_ticket(path: &Path, payload: &[u8], as_hex: bool) -> Result<()> {
    if as_hex {
        let mut text = hex::encode(payload);
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    } else {
        fs::write(path, payload).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn read_pattern(path: &Path) -> Result<MarkerPattern> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    MarkerPattern::from_slice(&raw)
        .with_context(|| format!("{}: pattern must be exactly {PATTERN_LEN} bytes", path.display()))
}

pub fn write_pattern(path: &Path, pattern: &MarkerPattern) -> Result<()> {
    fs::write(path, pattern.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

pub fn read_provider(path: &Path) -> Result<ProviderData> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    ProviderData::from_slice(&raw).with_context(|| {
        format!("{}: provider data must be exactly {PROVIDER_LEN} bytes", path.display())
    })
}

pub fn read_txlog(path: &Path) -> Result<Vec<TransactionRecord>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some(TXLOG_HEADER) {
        bail!("{}: not a {TXLOG_HEADER} file", path.display());
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        records.push(
            parse_txlog_line(line)
                .with_context(|| format!("{} line {line_no}: malformed record", path.display()))?,
        );
    }
    Ok(records)
}

fn parse_txlog_line(line: &str) -> Result<TransactionRecord> {
    let body = line.strip_prefix("rec ").context("expected rec line")?;
    let mut printer = None;
    let mut ticket = None;
    let mut issue = None;
    let mut end = None;
    let mut ph = None;
    let mut reported = None;
    for part in body.split(' ') {
        let (k, v) = part.split_once('=').context("expected key=value")?;
        match k {
            "printer" => printer = Some(u32::from_str_radix(v, 16)?),
            "ticket" => ticket = Some(u64::from_str_radix(v, 16)?),
            "issue" => issue = Some(v.parse::<u32>()?),
            "end" => end = Some(v.parse::<u32>()?),
            "ph" => {
                let bytes: [u8; 32] = hex::decode(v)
                    .ok()
                    .and_then(|b| b.try_into().ok())
                    .context("pattern hash must be 64 hex digits")?;
                ph = Some(bytes);
            }
            "reported" => reported = Some(v.parse::<u64>()?),
            other => bail!("unknown field {other}"),
        }
    }
    Ok(TransactionRecord {
        printer_id: printer.context("missing printer")?,
        ticket_id: ticket.context("missing ticket")?,
        issue_ts: issue.context("missing issue")?,
        validity_end: end.context("missing end")?,
        pattern_hash: ph.context("missing ph")?,
        reported_at: reported.context("missing reported")?,
    })
}

fn format_txlog_line(record: &TransactionRecord) -> String {
    format!(
        "rec printer={:08x} ticket={:016x} issue={} end={} ph={} reported={}\n",
        record.printer_id,
        record.ticket_id,
        record.issue_ts,
        record.validity_end,
        hex::encode(record.pattern_hash),
        record.reported_at
    )
}

/// Append one record, creating the log with its header first if needed.
pub fn append_txlog(path: &Path, record: &TransactionRecord) -> Result<()> {
    let mut content = if path.exists() {
        let existing =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if !existing.starts_with(TXLOG_HEADER) {
            bail!("{}: not a {TXLOG_HEADER} file", path.display());
        }
        existing
    } else {
        format!("{TXLOG_HEADER}\n")
    };
    content.push_str(&format_txlog_line(record));
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}
