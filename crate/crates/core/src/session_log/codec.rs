use super::{LogError, LogHeader, SessionEvent, SessionLog, LOG_FORMAT, SCHEMA_VERSION};

/// Header line, then one compact JSON object per event, each LF-terminated.
pub fn serialize_log(log: &SessionLog) -> String {
    let mut out = serde_json::to_string(log.header()).expect("header serializes");
    out.push('\n');
    for event in log.events() {
        out.push_str(&serde_json::to_string(event).expect("event serializes"));
        out.push('\n');
    }
    out
}

fn parse_error(line: usize, err: &serde_json::Error) -> LogError {
    LogError::Parse { line, column: err.column(), message: err.to_string() }
}

pub fn deserialize_log(bytes: &[u8]) -> Result<SessionLog, LogError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        LogError::Parse { line, column: 0, message: format!("invalid UTF-8: {e}") }
    })?;

    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let header_line = match lines.next() {
        Some((_, l)) if !l.is_empty() => l,
        _ => {
            return Err(LogError::Parse { line: 1, column: 0, message: "missing header line".into() });
        }
    };
    // Check the version before the full header so older or newer layouts get a
    // version error rather than a field error.
    let raw: serde_json::Value = serde_json::from_str(header_line).map_err(|e| parse_error(1, &e))?;
    if let Some(found) = raw.get("schema_version").and_then(|v| v.as_u64()) {
        if found != u64::from(SCHEMA_VERSION) {
            return Err(LogError::SchemaVersionMismatch { found: found as u32, expected: SCHEMA_VERSION });
        }
    }
    let header: LogHeader = serde_json::from_value(raw).map_err(|e| parse_error(1, &e))?;
    if header.format != LOG_FORMAT {
        return Err(LogError::Parse {
            line: 1,
            column: 0,
            message: format!("unexpected format `{}`", header.format),
        });
    }

    let mut log = SessionLog::new(header);
    while let Some((line, content)) = lines.next() {
        if content.is_empty() && lines.peek().is_none() {
            break;
        }
        if !text.ends_with('\n') && lines.peek().is_none() {
            // A final line without its terminator was cut off mid-write.
            return Err(LogError::Parse {
                line,
                column: content.len(),
                message: "truncated final line".into(),
            });
        }
        let event: SessionEvent = serde_json::from_str(content).map_err(|e| parse_error(line, &e))?;
        log.append(event)?;
    }
    Ok(log)
}
