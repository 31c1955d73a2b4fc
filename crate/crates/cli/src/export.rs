//! Graph export. Vertices are the packed base-p coordinate vectors of group
//! elements; a pair (x, y) of a product group is x * p^f + y.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cayley_srg::constructions::ConnectionSet;
use cayley_srg::{Error, FieldCtx, Result};

/// Largest graph exported without --force.
pub const EXPORT_LIMIT: u64 = 100_000;

pub struct CayleyGraph<'a> {
    ctx: &'a FieldCtx,
    product: bool,
    v: u64,
    connection: Vec<u64>,
}

impl<'a> CayleyGraph<'a> {
    pub fn new(ctx: &'a FieldCtx, set: &ConnectionSet) -> Result<CayleyGraph<'a>> {
        if !set.is_symmetric() {
            return Err(Error::NotSymmetric("D is not closed under negation".into()));
        }
        let v = u64::try_from(set.vertex_count()).map_err(|_| Error::TooLarge(u64::MAX))?;
        Ok(CayleyGraph {
            ctx,
            product: set.is_product(),
            v,
            connection: set.elements(ctx)?,
        })
    }

    pub fn vertex_count(&self) -> u64 {
        self.v
    }

    pub fn degree(&self) -> u64 {
        self.connection.len() as u64
    }

    pub fn edge_count(&self) -> u64 {
        self.v * self.degree() / 2
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        if self.product {
            let w = self.ctx.order() + 1;
            self.ctx.add_packed(x / w, y / w) * w + self.ctx.add_packed(x % w, y % w)
        } else {
            self.ctx.add_packed(x, y)
        }
    }

    pub fn neighbours(&self, u: u64) -> impl Iterator<Item = u64> + '_ {
        self.connection.iter().map(move |&d| self.add(u, d))
    }

    /// Edges u < v, in increasing order of u.
    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.v).flat_map(move |u| {
            let mut up: Vec<u64> = self.neighbours(u).filter(|&w| w > u).collect();
            up.sort_unstable();
            up.into_iter().map(move |w| (u, w))
        })
    }
}

pub fn check_size(v: u64, force: bool) -> Result<()> {
    if v > EXPORT_LIMIT && !force {
        return Err(Error::TooLarge(v));
    }
    Ok(())
}

pub fn write_edgelist(g: &CayleyGraph, hash: &str, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "# cayley-srg edgelist v={} e={} set={hash}", g.v, g.edge_count())?;
    for (u, w) in g.edges() {
        writeln!(out, "{u} {w}")?;
    }
    Ok(())
}

fn size_header(n: u64) -> Vec<u8> {
    let six = |k: u32| ((n >> (6 * k)) & 63) as u8 + 63;
    match n {
        0..=62 => vec![n as u8 + 63],
        63..=258_047 => vec![126, six(2), six(1), six(0)],
        _ => {
            let mut h = vec![126, 126];
            h.extend((0..6).rev().map(six));
            h
        }
    }
}

/// Upper triangle in column order: x(0,1), x(0,2), x(1,2), x(0,3), ...
pub fn write_graph6(g: &CayleyGraph, out: &mut impl Write) -> io::Result<()> {
    out.write_all(&size_header(g.v))?;
    let (mut byte, mut bits) = (0u8, 0u32);
    let mut column = Vec::new();
    for j in 1..g.v {
        column.clear();
        column.extend(g.neighbours(j).filter(|&i| i < j));
        column.sort_unstable();
        let mut next = column.iter().peekable();
        for i in 0..j {
            let bit = next.next_if(|&&c| c == i).is_some();
            byte = byte << 1 | bit as u8;
            bits += 1;
            if bits == 6 {
                out.write_all(&[byte + 63])?;
                (byte, bits) = (0, 0);
            }
        }
    }
    if bits > 0 {
        out.write_all(&[(byte << (6 - bits)) + 63])?;
    }
    out.write_all(b"\n")
}

#[derive(Serialize, Deserialize)]
pub struct JsonGraph {
    pub format: String,
    pub v: u64,
    pub set: String,
    pub edges: Vec<(u64, u64)>,
}

pub fn write_json(g: &CayleyGraph, hash: &str, out: &mut impl Write) -> io::Result<()> {
    let graph = JsonGraph {
        format: "cayley-srg-graph/1".into(),
        v: g.v,
        set: hash.into(),
        edges: g.edges().collect(),
    };
    serde_json::to_writer(&mut *out, &graph)?;
    out.write_all(b"\n")
}

/// A graph read back from an export.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGraph {
    pub v: u64,
    pub edges: Vec<(u64, u64)>,
}

impl ParsedGraph {
    pub fn degrees(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.v as usize];
        for &(u, w) in &self.edges {
            d[u as usize] += 1;
            d[w as usize] += 1;
        }
        d
    }

    /// SHA-256 of the sorted "u v" lines with u < v.
    pub fn edge_hash(&self) -> String {
        let mut edges: Vec<(u64, u64)> = self.edges.iter().map(|&(u, w)| (u.min(w), u.max(w))).collect();
        edges.sort_unstable();
        let mut h = Sha256::new();
        for (u, w) in edges {
            h.update(format!("{u} {w}\n"));
        }
        hex::encode(h.finalize())
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_edgelist(input: impl BufRead) -> Result<ParsedGraph> {
    let mut v = None;
    let mut edges = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if let Some(header) = line.strip_prefix('#') {
            if let Some(n) = header.split_whitespace().find_map(|w| w.strip_prefix("v=")) {
                v = Some(n.parse().map_err(|_| parse_err(format!("bad vertex count {n:?}")))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<u64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(w)), None) => edges.push((u, w)),
            _ => return Err(parse_err(format!("bad edge line {line:?}"))),
        }
    }
    let v = v.unwrap_or_else(|| edges.iter().map(|&(u, w)| u.max(w) + 1).max().unwrap_or(0));
    if edges.iter().any(|&(u, w)| u >= v || w >= v) {
        return Err(parse_err("edge endpoint out of range"));
    }
    Ok(ParsedGraph { v, edges })
}

pub fn parse_graph6(text: &str) -> Result<ParsedGraph> {
    let bytes = text.trim_end().strip_prefix(">>graph6<<").unwrap_or(text.trim_end()).as_bytes();
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(parse_err("graph6 bytes must lie in 63..=126"));
    }
    let group = |s: &[u8]| s.iter().fold(0u64, |acc, &b| acc << 6 | (b - 63) as u64);
    let (n, body) = match bytes {
        [126, 126, rest @ ..] if rest.len() >= 6 => (group(&rest[..6]), &rest[6..]),
        [126, rest @ ..] if rest.len() >= 3 => (group(&rest[..3]), &rest[3..]),
        [b, rest @ ..] if *b < 126 => ((b - 63) as u64, rest),
        _ => return Err(parse_err("truncated graph6 header")),
    };
    let total = n * n.saturating_sub(1) / 2;
    if body.len() as u64 != total.div_ceil(6) {
        return Err(parse_err(format!("expected {} data bytes, found {}", total.div_ceil(6), body.len())));
    }
    let mut edges = Vec::new();
    let (mut i, mut j) = (0u64, 1u64);
    for k in 0..total {
        let b = body[(k / 6) as usize] - 63;
        if (b >> (5 - k % 6)) & 1 == 1 {
            edges.push((i, j));
        }
        i += 1;
        if i == j {
            (i, j) = (0, j + 1);
        }
    }
    Ok(ParsedGraph { v: n, edges })
}

pub fn parse_json(text: &str) -> Result<ParsedGraph> {
    let g: JsonGraph = serde_json::from_str(text)?;
    Ok(ParsedGraph { v: g.v, edges: g.edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_headers() {
        assert_eq!(size_header(62), vec![125]);
        assert_eq!(size_header(63), vec![126, 63, 63, 126]);
        assert_eq!(size_header(258_048).len(), 8);
    }

    #[test]
    fn small_graph6_strings() {
        // The path 0-1-2 and the triangle.
        let path = ParsedGraph { v: 3, edges: vec![(0, 1), (1, 2)] };
        assert_eq!(parse_graph6("Bg").unwrap(), ParsedGraph { v: 3, edges: vec![(0, 1), (1, 2)] });
        assert_eq!(parse_graph6("Bw").unwrap().edges.len(), 3);
        assert_eq!(path.degrees(), vec![1, 2, 1]);
        assert!(parse_graph6("B").is_err());
    }

    #[test]
    fn edgelist_without_header() {
        let g = parse_edgelist("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(g.v, 3);
        assert!(parse_edgelist("0 x\n".as_bytes()).is_err());
    }
}
