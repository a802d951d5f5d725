//! The scheme file format: line-oriented UTF-8 text.
//!
//! ```text
//! pir-scheme v1
//! field <p>
//! servers <S>
//! messages <M>
//! sublength <Lw>
//! rows <r_1> ... <r_S>
//! keys <K>
//! realization <m> <f>
//! <one line per stacked query row: M*Lw integers in [0, p)>
//! ...
//! ```
//!
//! Realization blocks appear in message-major, then key-major order: all keys
//! of message 1 first. The serializer is canonical (single spaces, trailing
//! newline), and the parser accepts exactly that shape, so
//! parse(serialize(t)) == t and regenerated files are byte-identical.

use thiserror::Error;

use crate::field::FieldSpec;
use crate::matrix::FpMatrix;
use crate::scheme::{SchemeError, SchemeParams, SchemeTable};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

/// Serializes a table into the canonical file text.
pub fn serialize_scheme(table: &SchemeTable) -> String {
    let params = table.params();
    let mut out = String::new();
    out.push_str("pir-scheme v1\n");
    out.push_str(&format!("field {}\n", params.field().modulus()));
    out.push_str(&format!("servers {}\n", params.servers()));
    out.push_str(&format!("messages {}\n", params.messages()));
    out.push_str(&format!("sublength {}\n", params.sub_length()));
    let rows: Vec<String> = params
        .rows_per_server()
        .iter()
        .map(|r| r.to_string())
        .collect();
    out.push_str(&format!("rows {}\n", rows.join(" ")));
    out.push_str(&format!("keys {}\n", table.key_count()));
    for m in 1..=params.messages() {
        for f in 0..table.key_count() {
            out.push_str(&format!("realization {m} {f}\n"));
            let q = table.query(m, f).expect("indices are in range");
            for r in 0..q.rows() {
                let row: Vec<String> = q.row(r).iter().map(|v| v.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    total: usize,
}

impl<'a> Lines<'a> {
    fn new(input: &'a str) -> Self {
        Lines {
            iter: input.lines().enumerate(),
            total: input.lines().count(),
        }
    }

    fn next(&mut self, expecting: &str) -> Result<(usize, &'a str), FormatError> {
        match self.iter.next() {
            Some((idx, line)) => Ok((idx + 1, line)),
            None => Err(FormatError::new(
                self.total + 1,
                format!("unexpected end of file, expected {expecting}"),
            )),
        }
    }
}

fn directive<'a>(lines: &mut Lines<'a>, name: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
    let (number, line) = lines.next(&format!("`{name}` directive"))?;
    let mut parts = line.split(' ');
    let head = parts.next().unwrap_or("");
    if head != name {
        return Err(FormatError::new(
            number,
            format!("expected `{name}` directive, found `{head}`"),
        ));
    }
    let args: Vec<&str> = parts.collect();
    if args.iter().any(|a| a.is_empty()) {
        return Err(FormatError::new(number, "malformed spacing"));
    }
    Ok((number, args))
}

fn parse_count(line: usize, text: &str, what: &str) -> Result<usize, FormatError> {
    text.parse::<usize>()
        .map_err(|_| FormatError::new(line, format!("invalid {what}: `{text}`")))
}

fn one_arg<'a>(line: usize, args: &[&'a str], name: &str) -> Result<&'a str, FormatError> {
    if args.len() != 1 {
        return Err(FormatError::new(
            line,
            format!("`{name}` takes exactly one value"),
        ));
    }
    Ok(args[0])
}

/// Parses the canonical file text back into a table.
///
/// Every violation — unknown directives, wrong counts, out-of-range entries,
/// misordered realizations — is reported with its line number. Scheme-level
/// construction errors (duplicate realizations) are reported on the first
/// line of the offending block.
pub fn parse_scheme(input: &str) -> Result<SchemeTable, FormatError> {
    let mut lines = Lines::new(input);
    let (number, header) = lines.next("`pir-scheme v1` header")?;
    if header != "pir-scheme v1" {
        return Err(FormatError::new(number, "expected `pir-scheme v1` header"));
    }
    let (line, args) = directive(&mut lines, "field")?;
    let modulus = parse_count(line, one_arg(line, &args, "field")?, "field modulus")?;
    let field =
        FieldSpec::new(modulus as u64).map_err(|e| FormatError::new(line, e.to_string()))?;
    let (line, args) = directive(&mut lines, "servers")?;
    let servers = parse_count(line, one_arg(line, &args, "servers")?, "server count")?;
    let (line, args) = directive(&mut lines, "messages")?;
    let messages = parse_count(line, one_arg(line, &args, "messages")?, "message count")?;
    let (line, args) = directive(&mut lines, "sublength")?;
    let sub_length = parse_count(line, one_arg(line, &args, "sublength")?, "sublength")?;
    let (line, args) = directive(&mut lines, "rows")?;
    let rows_per_server: Vec<usize> = args
        .iter()
        .map(|a| parse_count(line, a, "row count"))
        .collect::<Result<_, _>>()?;
    let params = SchemeParams::new(field, servers, messages, sub_length, rows_per_server)
        .map_err(|e| FormatError::new(line, e.to_string()))?;
    let (line, args) = directive(&mut lines, "keys")?;
    let key_count = parse_count(line, one_arg(line, &args, "keys")?, "key count")?;
    if key_count == 0 {
        return Err(FormatError::new(line, "key count must be positive"));
    }

    let mut queries = Vec::with_capacity(messages * key_count);
    let mut first_block_line = 0;
    for m in 1..=messages {
        for f in 0..key_count {
            let (line, args) = directive(&mut lines, "realization")?;
            if first_block_line == 0 {
                first_block_line = line;
            }
            if args.len() != 2 {
                return Err(FormatError::new(
                    line,
                    "`realization` takes a message index and a key index",
                ));
            }
            let got_m = parse_count(line, args[0], "message index")?;
            let got_f = parse_count(line, args[1], "key index")?;
            if (got_m, got_f) != (m, f) {
                return Err(FormatError::new(
                    line,
                    format!("expected realization {m} {f}, found {got_m} {got_f}"),
                ));
            }
            let mut rows = Vec::with_capacity(params.total_rows());
            for _ in 0..params.total_rows() {
                let (line, text) = lines.next("a query row")?;
                let row: Vec<u32> = text
                    .split(' ')
                    .map(|v| {
                        v.parse::<u32>()
                            .map_err(|_| FormatError::new(line, format!("invalid entry `{v}`")))
                    })
                    .collect::<Result<_, _>>()?;
                if row.len() != params.width() {
                    return Err(FormatError::new(
                        line,
                        format!("expected {} entries, found {}", params.width(), row.len()),
                    ));
                }
                if let Some(&bad) = row.iter().find(|&&v| v >= field.modulus()) {
                    return Err(FormatError::new(
                        line,
                        format!("entry {bad} is outside [0, {})", field.modulus()),
                    ));
                }
                rows.push(row);
            }
            queries.push(
                FpMatrix::from_rows(field, rows)
                    .map_err(|e| FormatError::new(line, e.to_string()))?,
            );
        }
    }
    if let Some((idx, line)) = lines.iter.next() {
        return Err(FormatError::new(
            idx + 1,
            format!("unexpected trailing content `{line}`"),
        ));
    }
    SchemeTable::new(params, key_count, queries).map_err(|e| match e {
        SchemeError::DuplicateRealization { .. } => {
            FormatError::new(first_block_line, e.to_string())
        }
        other => FormatError::new(first_block_line, other.to_string()),
    })
}
