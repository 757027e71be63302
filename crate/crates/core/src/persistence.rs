//! The `SCNW` network file and the text message/query formats.
//!
//! Network file layout, all integers little-endian:
//!
//! | offset | size | field                   |
//! |--------|------|-------------------------|
//! | 0      | 4    | magic `b"SCNW"`         |
//! | 4      | 2    | version, `1`            |
//! | 6      | 4    | clusters `c`            |
//! | 10     | 4    | neurons per cluster `l` |
//! | 14     | 8    | stored message count    |
//! | 22     | ...  | link payload            |
//!
//! The payload holds the `c(c-1)` blocks in lexicographic `(src, dst)` order,
//! skipping `src == dst`. Each block is `l` rows of `ceil(l/8)` bytes; bit `k`
//! of byte `b` in a row is target neuron `8b + k`. Pad bits are zero.
//!
//! Text files hold one message per line: `c` decimal symbols separated by
//! single spaces. Query lines may use `?` for an erased cluster. Blank lines
//! and lines starting with `#` are skipped.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::bits::WORD_BITS;
use crate::error::{Error, Result};
use crate::model::{LinkStore, Message, NetworkParams, PartialMessage, SubMessage};

pub const MAGIC: [u8; 4] = *b"SCNW";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 22;

/// Payload size in bytes for a `c`-cluster, `l`-neuron network.
pub fn payload_len(params: &NetworkParams) -> usize {
    let c = params.clusters();
    let l = params.neurons();
    c * (c - 1) * l * l.div_ceil(8)
}

pub fn save_network(store: &LinkStore, mut out: impl Write) -> Result<()> {
    let params = store.params();
    let (c, l) = (params.clusters(), params.neurons());
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(c as u32).to_le_bytes());
    header.extend_from_slice(&(l as u32).to_le_bytes());
    header.extend_from_slice(&store.stored_count().to_le_bytes());
    out.write_all(&header)?;

    let row_bytes = l.div_ceil(8);
    let mut row = vec![0u8; row_bytes];
    for a in 0..c {
        for b in (0..c).filter(|&b| b != a) {
            for r in 0..l {
                let words = store.read_row_unchecked(a, r, b).words();
                for (i, byte) in row.iter_mut().enumerate() {
                    *byte = (words[i * 8 / WORD_BITS] >> (i * 8 % WORD_BITS)) as u8;
                }
                out.write_all(&row)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn load_network(mut input: impl Read) -> Result<LinkStore> {
    let mut header = [0u8; HEADER_LEN];
    read_exact_or_truncated(&mut input, &mut header)?;
    let magic: [u8; 4] = header[0..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u16::from_le_bytes(header[4..6].try_into().expect("2 bytes"));
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let c = u32::from_le_bytes(header[6..10].try_into().expect("4 bytes")) as usize;
    let l = u32::from_le_bytes(header[10..14].try_into().expect("4 bytes")) as usize;
    let stored_count = u64::from_le_bytes(header[14..22].try_into().expect("8 bytes"));
    let params = NetworkParams::new(c, l)?;

    let mut store = LinkStore::new(params);
    store.set_stored_count(stored_count);
    let row_bytes = l.div_ceil(8);
    let pad_mask = match l % 8 {
        0 => 0u8,
        r => !((1u8 << r) - 1),
    };
    let mut row = vec![0u8; row_bytes];
    for a in 0..c {
        for b in (0..c).filter(|&b| b != a) {
            for r in 0..l {
                read_exact_or_truncated(&mut input, &mut row)?;
                if row[row_bytes - 1] & pad_mask != 0 {
                    return Err(Error::NonzeroPadding { a, b, row: r });
                }
                let words = store.row_words_mut(a, r, b);
                for (i, &byte) in row.iter().enumerate() {
                    words[i * 8 / WORD_BITS] |= u64::from(byte) << (i * 8 % WORD_BITS);
                }
            }
        }
    }
    let mut probe = [0u8; 1];
    if input.read(&mut probe)? != 0 {
        return Err(Error::TrailingBytes);
    }
    store.check_symmetry()?;
    Ok(store)
}

fn read_exact_or_truncated(input: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Truncated,
        _ => Error::Io(e),
    })
}

pub fn save_network_file(store: &LinkStore, path: impl AsRef<Path>) -> Result<()> {
    save_network(store, BufWriter::new(File::create(path)?))
}

pub fn load_network_file(path: impl AsRef<Path>) -> Result<LinkStore> {
    load_network(BufReader::new(File::open(path)?))
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn tokens(line: &str) -> std::str::Split<'_, char> {
    line.trim_end_matches(['\r', '\n']).split(' ')
}

fn parse_symbol(token: &str, cluster: usize, params: &NetworkParams) -> Result<usize> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::MalformedToken { token: token.into() });
    }
    let symbol: usize = token.parse().map_err(|_| Error::MalformedToken { token: token.into() })?;
    if symbol >= params.neurons() {
        return Err(Error::SymbolOutOfRange { cluster, symbol, neurons: params.neurons() });
    }
    Ok(symbol)
}

/// Parse one message line. Comment and blank lines yield `None`.
pub fn parse_message_line(line: &str, params: &NetworkParams) -> Result<Option<Message>> {
    if is_skipped(line) {
        return Ok(None);
    }
    let symbols =
        tokens(line).enumerate().map(|(cluster, t)| parse_symbol(t, cluster, params)).collect::<Result<Vec<_>>>()?;
    Message::new(params, symbols).map(Some)
}

/// Parse one query line; `?` marks an erased cluster.
pub fn parse_query_line(line: &str, params: &NetworkParams) -> Result<Option<PartialMessage>> {
    if is_skipped(line) {
        return Ok(None);
    }
    let entries = tokens(line)
        .enumerate()
        .map(|(cluster, t)| match t {
            "?" => Ok(SubMessage::Erased),
            _ => parse_symbol(t, cluster, params).map(SubMessage::Known),
        })
        .collect::<Result<Vec<_>>>()?;
    PartialMessage::new(params, entries).map(Some)
}

pub fn read_messages(input: impl BufRead, params: &NetworkParams) -> Result<Vec<Message>> {
    let mut out = Vec::new();
    for line in input.lines() {
        if let Some(m) = parse_message_line(&line?, params)? {
            out.push(m);
        }
    }
    Ok(out)
}

pub fn read_queries(input: impl BufRead, params: &NetworkParams) -> Result<Vec<PartialMessage>> {
    let mut out = Vec::new();
    for line in input.lines() {
        if let Some(q) = parse_query_line(&line?, params)? {
            out.push(q);
        }
    }
    Ok(out)
}

pub fn write_messages<'m>(messages: impl IntoIterator<Item = &'m Message>, mut out: impl Write) -> Result<()> {
    for m in messages {
        writeln!(out, "{m}")?;
    }
    out.flush()?;
    Ok(())
}
