//! word2vec binary/text and headerless (GloVe-style) text codecs.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

use super::{validate_token, EmbeddingSet};

type Records = (Vec<String>, Vec<f32>, usize);

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut fields = line.split_whitespace();
    let parse = |field: Option<&str>| -> Result<usize> {
        field
            .ok_or_else(|| Error::MalformedHeader(line.to_owned()))?
            .parse()
            .map_err(|_| Error::MalformedHeader(line.to_owned()))
    };
    let vocab = parse(fields.next())?;
    let dim = parse(fields.next())?;
    if fields.next().is_some() {
        return Err(Error::MalformedHeader(line.to_owned()));
    }
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if vocab == 0 {
        return Err(Error::EmptySet);
    }
    Ok((vocab, dim))
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<(usize, usize)> {
    let mut line = Vec::new();
    reader.read_until(b'\n', &mut line)?;
    let line = String::from_utf8(line)
        .map_err(|_| Error::MalformedHeader("header is not valid UTF-8".into()))?;
    parse_header(line.trim_end_matches(['\n', '\r']))
}

fn eof_to_count(err: io::Error, expected: usize, found: usize) -> Error {
    if err.kind() == io::ErrorKind::UnexpectedEof {
        Error::CountMismatch { expected, found }
    } else {
        Error::Io(err)
    }
}

pub(super) fn read_binary<R: BufRead>(reader: &mut R) -> Result<Records> {
    let (vocab, dim) = read_header(reader)?;
    let mut tokens = Vec::with_capacity(vocab);
    let mut vectors = Vec::with_capacity(vocab.saturating_mul(dim).min(1 << 28));
    let mut raw = vec![0u8; dim * 4];
    let mut token = Vec::new();

    for record in 0..vocab {
        // Some writers end every record with 0x0A, others do not.
        if reader.fill_buf()?.first() == Some(&b'\n') {
            reader.consume(1);
        }
        token.clear();
        reader.read_until(b' ', &mut token)?;
        if token.pop() != Some(b' ') {
            return Err(Error::CountMismatch {
                expected: vocab,
                found: record,
            });
        }
        let text = String::from_utf8(std::mem::take(&mut token)).map_err(|_| {
            Error::MalformedRecord {
                record,
                reason: "token is not valid UTF-8".into(),
            }
        })?;
        validate_token(&text)?;
        reader
            .read_exact(&mut raw)
            .map_err(|e| eof_to_count(e, vocab, record))?;
        vectors.extend(
            raw.chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
        );
        tokens.push(text);
    }

    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            break;
        }
        if buf.iter().any(|b| !b.is_ascii_whitespace()) {
            return Err(Error::TrailingData(vocab));
        }
        let len = buf.len();
        reader.consume(len);
    }
    Ok((tokens, vectors, dim))
}

fn parse_row(fields: &mut std::str::SplitWhitespace<'_>, record: usize, out: &mut Vec<f32>) -> Result<usize> {
    let mut n = 0;
    for field in fields {
        let value: f32 = field.parse().map_err(|_| Error::MalformedRecord {
            record,
            reason: format!("not a number: {field:?}"),
        })?;
        out.push(value);
        n += 1;
    }
    Ok(n)
}

pub(super) fn read_text<R: BufRead>(reader: &mut R, with_header: bool) -> Result<Records> {
    let declared = if with_header {
        Some(read_header(reader)?)
    } else {
        None
    };
    let mut dim = declared.map(|(_, dim)| dim);
    let mut tokens = Vec::new();
    let mut vectors = Vec::new();

    for line in reader.lines() {
        let line = line?;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else {
            continue;
        };
        let record = tokens.len();
        if let Some((vocab, _)) = declared {
            if record == vocab {
                return Err(Error::TrailingData(vocab));
            }
        }
        let n = parse_row(&mut fields, record, &mut vectors)?;
        match dim {
            Some(d) if d != n => {
                return Err(Error::MalformedRecord {
                    record,
                    reason: format!("expected {d} values, found {n}"),
                })
            }
            Some(_) => {}
            None if n == 0 => return Err(Error::ZeroDimension),
            None => dim = Some(n),
        }
        validate_token(token)?;
        tokens.push(token.to_owned());
    }

    if let Some((vocab, _)) = declared {
        if tokens.len() != vocab {
            return Err(Error::CountMismatch {
                expected: vocab,
                found: tokens.len(),
            });
        }
    }
    let dim = dim.ok_or(Error::EmptySet)?;
    Ok((tokens, vectors, dim))
}

pub(super) fn write_binary<W: Write>(set: &EmbeddingSet, writer: &mut W) -> Result<()> {
    writeln!(writer, "{} {}", set.len(), set.dim())?;
    let mut raw = Vec::with_capacity(set.dim() * 4);
    for (i, token) in set.tokens().iter().enumerate() {
        raw.clear();
        for x in set.vector(i) {
            raw.extend_from_slice(&x.to_le_bytes());
        }
        writer.write_all(token.as_bytes())?;
        writer.write_all(b" ")?;
        writer.write_all(&raw)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// `f32`'s `Display` is the shortest string that parses back to the same
/// bits, so text files round-trip exactly.
pub(super) fn write_text<W: Write>(set: &EmbeddingSet, writer: &mut W, with_header: bool) -> Result<()> {
    if with_header {
        writeln!(writer, "{} {}", set.len(), set.dim())?;
    }
    for (i, token) in set.tokens().iter().enumerate() {
        writer.write_all(token.as_bytes())?;
        for x in set.vector(i) {
            write!(writer, " {x}")?;
        }
        writer.write_all(b"\n")?;
    }
    Ok(())
}
