//! Text formats for set functions, set families, graphs and path
//! decompositions.
//!
//! All four formats are line oriented: an optional `#` starts a comment,
//! blank lines are skipped, and the first significant line is a header
//! naming the object and its dimensions. Parsers are total: any input
//! either parses or yields a [`Error::Parse`] with the offending line
//! number, never a panic. These entry points are fuzzed (see the
//! `fuzz/` directory).
//!
//! ```text
//! setfn n=4 q=2          family n=6 s=2       graph n=5      pathdecomp
//! 0,1: 3                 0,1                  0 1            0,1
//! 1,3: -2                2,3                  1 2            1,2
//! ```
//!
//! Set-function entries may be sparse; missing subsets are zero. The
//! empty subset (q = 0) is written as a bare `:`.

use std::collections::HashSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::packing::SetFamily;
use crate::setcore::{SetFunction, Subset};
use crate::subgraph::{Graph, PathDecomposition};

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses `tag k1=v1 k2=v2 ...` headers, returning the values in key
/// order.
fn parse_header(line_no: usize, line: &str, tag: &str, keys: &[&str]) -> Result<Vec<u32>> {
    let mut tokens = line.split_whitespace();
    match tokens.next() {
        Some(t) if t == tag => {}
        other => {
            return Err(parse_err(
                line_no,
                format!("expected header '{tag} ...', found '{}'", other.unwrap_or("")),
            ))
        }
    }
    let mut values = vec![None; keys.len()];
    for token in tokens {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("malformed header field '{token}'")))?;
        let slot = keys
            .iter()
            .position(|&k| k == key)
            .ok_or_else(|| parse_err(line_no, format!("unknown header field '{key}'")))?;
        if values[slot].is_some() {
            return Err(parse_err(line_no, format!("duplicate header field '{key}'")));
        }
        values[slot] = Some(
            value
                .parse::<u32>()
                .map_err(|_| parse_err(line_no, format!("bad value for '{key}': '{value}'")))?,
        );
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| parse_err(line_no, format!("missing header field '{}'", keys[i]))))
        .collect()
}

fn parse_members(line_no: usize, text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| parse_err(line_no, format!("bad element '{}'", tok.trim())))
        })
        .collect()
}

/// Parses the `setfn` format.
pub fn parse_set_function(text: &str) -> Result<SetFunction> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected 'setfn n=<n> q=<q>'"))?;
    let dims = parse_header(line_no, header, "setfn", &["n", "q"])?;
    let (n, q) = (dims[0], dims[1]);
    let mut f = SetFunction::zeros(n, q).map_err(|e| parse_err(line_no, e.to_string()))?;
    let mut seen: HashSet<u64> = HashSet::new();
    for (line_no, line) in lines {
        let (lhs, rhs) = line
            .split_once(':')
            .ok_or_else(|| parse_err(line_no, "expected 'e1,e2,...: value'"))?;
        let members = parse_members(line_no, lhs)?;
        let sub = Subset::from_members(&members).map_err(|e| parse_err(line_no, e.to_string()))?;
        if sub.size() != q {
            return Err(parse_err(
                line_no,
                format!("subset has {} elements, expected q = {q}", sub.size()),
            ));
        }
        if !seen.insert(sub.bits()) {
            return Err(parse_err(line_no, "duplicate subset entry"));
        }
        let value = BigInt::from_str(rhs.trim())
            .map_err(|_| parse_err(line_no, format!("bad integer value '{}'", rhs.trim())))?;
        f.set(sub, value).map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    Ok(f)
}

/// Writes the `setfn` format; zero entries are omitted.
pub fn write_set_function(f: &SetFunction) -> String {
    let mut out = format!("setfn n={} q={}\n", f.n(), f.q());
    for (sub, v) in f.iter() {
        if v.is_zero() {
            continue;
        }
        let members: Vec<String> = sub.members().iter().map(|e| e.to_string()).collect();
        out.push_str(&format!("{}: {}\n", members.join(","), v));
    }
    out
}

/// Parses the `family` format.
pub fn parse_set_family(text: &str) -> Result<SetFamily> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected 'family n=<n> s=<s>'"))?;
    let dims = parse_header(line_no, header, "family", &["n", "s"])?;
    let (n, s) = (dims[0], dims[1]);
    let mut members = Vec::new();
    for (line_no, line) in lines {
        let elems = parse_members(line_no, line)?;
        let sub = Subset::from_members(&elems).map_err(|e| parse_err(line_no, e.to_string()))?;
        if sub.size() != s {
            return Err(parse_err(
                line_no,
                format!("member has {} elements, expected s = {s}", sub.size()),
            ));
        }
        members.push(sub);
    }
    // Distinctness and range are family invariants; report them at the
    // whole-file level (line 0 marks the file, not one line).
    SetFamily::new(n, s, members).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_set_family(fam: &SetFamily) -> String {
    let mut out = format!("family n={} s={}\n", fam.n(), fam.s());
    for m in fam.members() {
        let members: Vec<String> = m.members().iter().map(|e| e.to_string()).collect();
        out.push_str(&members.join(","));
        out.push('\n');
    }
    out
}

/// Parses the `graph` format: one `u v` edge per line.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected 'graph n=<n>'"))?;
    let dims = parse_header(line_no, header, "graph", &["n"])?;
    let n = dims[0];
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(parse_err(line_no, "expected 'u v'")),
        };
        let u: u32 = u
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad vertex '{u}'")))?;
        let v: u32 = v
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad vertex '{v}'")))?;
        edges.push((u, v));
    }
    Graph::new(n, &edges).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("graph n={}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses the `pathdecomp` format: one bag per line.
pub fn parse_path_decomposition(text: &str) -> Result<PathDecomposition> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected 'pathdecomp'"))?;
    if header != "pathdecomp" {
        return Err(parse_err(line_no, "expected header 'pathdecomp'"));
    }
    let mut bags = Vec::new();
    for (line_no, line) in lines {
        let members = parse_members(line_no, line)?;
        if members.is_empty() {
            return Err(parse_err(line_no, "empty bag"));
        }
        let bag = Subset::from_members(&members).map_err(|e| parse_err(line_no, e.to_string()))?;
        bags.push(bag);
    }
    Ok(PathDecomposition::from_subsets(bags))
}

pub fn write_path_decomposition(pd: &PathDecomposition) -> String {
    let mut out = String::from("pathdecomp\n");
    for bag in pd.bags() {
        let members: Vec<String> = bag.members().iter().map(|e| e.to_string()).collect();
        out.push_str(&members.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn setfn_roundtrip_and_sparseness() {
        let text = "setfn n=4 q=2\n# comment\n0,1: 3\n\n1,3: -2\n";
        let f = parse_set_function(text).unwrap();
        assert_eq!(
            f.value(Subset::from_members(&[0, 1]).unwrap()).unwrap(),
            &BigInt::from(3)
        );
        assert_eq!(
            f.value(Subset::from_members(&[2, 3]).unwrap()).unwrap(),
            &BigInt::zero()
        );
        let rt = parse_set_function(&write_set_function(&f)).unwrap();
        assert_eq!(rt, f);
    }

    #[test]
    fn setfn_empty_subset_entry() {
        let f = parse_set_function("setfn n=3 q=0\n: 17\n").unwrap();
        assert_eq!(f.value(Subset::EMPTY).unwrap(), &BigInt::from(17));
        let rt = parse_set_function(&write_set_function(&f)).unwrap();
        assert_eq!(rt, f);
    }

    #[test]
    fn setfn_errors_carry_line_numbers() {
        let err = parse_set_function("setfn n=4 q=2\n0,1: 3\n0,1: 4\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
        let err = parse_set_function("setfn n=4 q=2\n0: 3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = parse_set_function("setfn n=4 q=2\n0,9: 3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = parse_set_function("nope n=4 q=2\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn family_roundtrip() {
        let text = "family n=6 s=2\n0,1\n2,3\n4,5\n";
        let fam = parse_set_family(text).unwrap();
        assert_eq!(fam.members().len(), 3);
        let rt = parse_set_family(&write_set_family(&fam)).unwrap();
        assert_eq!(rt, fam);
    }

    #[test]
    fn family_rejects_duplicates() {
        assert!(parse_set_family("family n=6 s=2\n0,1\n1,0\n").is_err());
    }

    #[test]
    fn graph_roundtrip_and_errors() {
        let g = parse_graph("graph n=4\n0 1\n2 3\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
        let rt = parse_graph(&write_graph(&g)).unwrap();
        assert_eq!(rt, g);
        assert!(parse_graph("graph n=4\n0\n").is_err());
        assert!(parse_graph("graph n=4\n0 0\n").is_err());
        assert!(parse_graph("graph n=2\n0 5\n").is_err());
    }

    #[test]
    fn pathdecomp_roundtrip() {
        let pd = parse_path_decomposition("pathdecomp\n0,1\n1,2\n").unwrap();
        assert_eq!(pd.bags().len(), 2);
        let rt = parse_path_decomposition(&write_path_decomposition(&pd)).unwrap();
        assert_eq!(rt, pd);
        assert!(parse_path_decomposition("pathdecomp\n\n,\n").is_err());
    }

    #[test]
    fn oversized_tables_are_rejected_not_allocated() {
        let err = parse_set_function("setfn n=64 q=32\n").unwrap_err();
        assert!(err.to_string().contains("table limit"));
    }

    proptest! {
        #[test]
        fn setfn_roundtrip_random(entries in proptest::collection::btree_map(0u64..15, -1000i64..1000, 0..10)) {
            let mut f = SetFunction::zeros(6, 2).unwrap();
            for (rank, v) in entries {
                let sub = crate::setcore::unrank_subset(rank, 6, 2).unwrap();
                f.set(sub, BigInt::from(v)).unwrap();
            }
            let rt = parse_set_function(&write_set_function(&f)).unwrap();
            prop_assert_eq!(rt, f);
        }

        #[test]
        fn parsers_never_panic(text in "\\PC*") {
            let _ = parse_set_function(&text);
            let _ = parse_set_family(&text);
            let _ = parse_graph(&text);
            let _ = parse_path_decomposition(&text);
        }
    }
}
