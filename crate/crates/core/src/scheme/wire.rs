//! Packet files: a text header line naming `(q, l, kdim, M, V)`, then the
//! packets, either one line of decimal symbols each or as fixed-width
//! big-endian integers.

use std::io::{BufRead, Write};

use super::{PublicParams, SchemeError, TaggedPacket};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireMode {
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketHeader {
    pub q: u32,
    pub l: usize,
    pub kdim: usize,
    pub m: usize,
    pub v: usize,
}

impl PacketHeader {
    fn line(&self, mode: WireMode) -> String {
        let tag = match mode {
            WireMode::Text => "text",
            WireMode::Binary => "binary",
        };
        format!(
            "subtag-packets {tag} q={} l={} kdim={} M={} V={}\n",
            self.q, self.l, self.kdim, self.m, self.v
        )
    }

    fn parse(line: &str) -> Result<(Self, WireMode), SchemeError> {
        let bad = || SchemeError::Malformed(format!("bad header line {line:?}"));
        let mut words = line.split_whitespace();
        if words.next() != Some("subtag-packets") {
            return Err(bad());
        }
        let mode = match words.next() {
            Some("text") => WireMode::Text,
            Some("binary") => WireMode::Binary,
            _ => return Err(bad()),
        };
        let mut field = |key: &str| -> Result<u64, SchemeError> {
            let w = words.next().ok_or_else(bad)?;
            w.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)
        };
        let header = PacketHeader {
            q: field("q")? as u32,
            l: field("l")? as usize,
            kdim: field("kdim")? as usize,
            m: field("M")? as usize,
            v: field("V")? as usize,
        };
        Ok((header, mode))
    }
}

/// Bytes per symbol in binary mode: the fewest that hold `q - 1`.
fn symbol_width(q: u32) -> usize {
    let bits = 32 - (q - 1).leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

pub fn write_packets(
    pp: &PublicParams,
    packets: &[TaggedPacket],
    mode: WireMode,
    out: &mut impl Write,
) -> std::io::Result<()> {
    out.write_all(pp.header().line(mode).as_bytes())?;
    let width = symbol_width(pp.q());
    for p in packets {
        let symbols = p.to_symbols(pp);
        match mode {
            WireMode::Text => {
                let words: Vec<String> = symbols.iter().map(u32::to_string).collect();
                writeln!(out, "{}", words.join(" "))?;
            }
            WireMode::Binary => {
                for s in symbols {
                    out.write_all(&s.to_be_bytes()[4 - width..])?;
                }
            }
        }
    }
    Ok(())
}

/// Reads a packet file, rejecting headers that disagree with `pp`.
pub fn read_packets(pp: &PublicParams, input: &mut impl BufRead) -> Result<Vec<TaggedPacket>, SchemeError> {
    let io = |e: std::io::Error| SchemeError::Malformed(e.to_string());
    let mut line = String::new();
    input.read_line(&mut line).map_err(io)?;
    let (header, mode) = PacketHeader::parse(line.trim_end())?;
    if header != pp.header() {
        return Err(SchemeError::Malformed(format!(
            "header {header:?} does not match parameters {:?}",
            pp.header()
        )));
    }
    let len = pp.packet_len();
    match mode {
        WireMode::Text => {
            let mut out = Vec::new();
            for line in input.lines() {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                let symbols = line
                    .split_whitespace()
                    .map(|w| w.parse::<u32>().map_err(|e| SchemeError::Malformed(format!("{w:?}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(TaggedPacket::from_symbols(pp, &symbols)?);
            }
            Ok(out)
        }
        WireMode::Binary => {
            let width = symbol_width(pp.q());
            let mut bytes = Vec::new();
            input.read_to_end(&mut bytes).map_err(io)?;
            if bytes.len() % (width * len) != 0 {
                return Err(SchemeError::Malformed(format!(
                    "{} payload bytes is not a whole number of packets",
                    bytes.len()
                )));
            }
            bytes
                .chunks(width * len)
                .map(|chunk| {
                    let symbols: Vec<u32> = chunk
                        .chunks(width)
                        .map(|b| b.iter().fold(0u32, |acc, &x| acc << 8 | x as u32))
                        .collect();
                    TaggedPacket::from_symbols(pp, &symbols)
                })
                .collect()
        }
    }
}
