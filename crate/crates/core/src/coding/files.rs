//! Input files. The first meaningful line is a tag naming the schema:
//!
//! * `network`: TOML with `omega`, `source`, `edges = [{ from, to }, ...]`
//!   and `[[nodes]]` tables (`id`, `kind`, optional `matrix` of 0/1 rows).
//! * `lrc`: TOML with `ell`, `eta`, `omega`, `surviving` and `source_matrix`.
//! * `system`: `n = ..`, `v = ..`, then `[rank-block k] zeta=a..b` and
//!   `[nonrank]` sections holding one polynomial per line.
//!
//! `#` starts a comment line in every schema.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::boolpoly::{BoolPoly, PolyError, VarId};
use crate::coding::lrc::LrcSpec;
use crate::coding::network::{NetworkSpec, Node, NodeKind};
use crate::coding::system::{PolySystem, RankBlock};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("missing header line (expected network, lrc or system)")]
    MissingHeader,
    #[error("line {line}: unknown input kind {tag:?} (expected network, lrc or system)")]
    UnknownKind { line: usize, tag: String },
    #[error("{0}")]
    Toml(String),
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Network(NetworkSpec),
    Lrc(LrcSpec),
    System(PolySystem),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    omega: usize,
    source: String,
    edges: Vec<EdgeEntry>,
    nodes: Vec<NodeEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    from: String,
    to: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: String,
    kind: String,
    matrix: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LrcFile {
    ell: usize,
    eta: usize,
    omega: usize,
    surviving: Vec<usize>,
    source_matrix: Vec<String>,
}

fn bit_rows(rows: &[String], what: &str) -> Result<Vec<Vec<bool>>, InputError> {
    rows.iter()
        .map(|r| {
            r.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(InputError::Toml(format!("{what}: row {r:?} must contain only 0 and 1"))),
                })
                .collect()
        })
        .collect()
}

fn parse_kind(s: &str) -> Result<NodeKind, InputError> {
    Ok(match s {
        "general" => NodeKind::General,
        "routing" => NodeKind::Routing,
        "broadcast" => NodeKind::Broadcast,
        "constant" => NodeKind::Constant,
        "user" => NodeKind::User,
        _ => {
            return Err(InputError::Toml(format!(
                "unknown node kind {s:?} (expected general, routing, broadcast, constant or user)"
            )))
        }
    })
}

/// Parses any supported input from text.
pub fn parse_instance(text: &str) -> Result<Instance, InputError> {
    let mut lines = text.lines().enumerate();
    let (tag_line, tag) = loop {
        match lines.next() {
            None => return Err(InputError::MissingHeader),
            Some((i, l)) => {
                let t = l.trim();
                if !t.is_empty() && !t.starts_with('#') {
                    break (i, t.to_string());
                }
            }
        }
    };
    // blank out everything up to the tag so reported line numbers stay true
    let body: String =
        text.lines().enumerate().map(|(i, l)| if i <= tag_line { "" } else { l }).collect::<Vec<_>>().join("\n");
    match tag.as_str() {
        "network" => parse_network(&body).map(Instance::Network),
        "lrc" => parse_lrc(&body).map(Instance::Lrc),
        "system" => parse_system(&body, 0).map(Instance::System),
        _ => Err(InputError::UnknownKind { line: tag_line + 1, tag }),
    }
}

pub fn read_instance(path: &Path) -> Result<Instance, InputError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.display().to_string(), source: e })?;
    parse_instance(&text)
}

fn parse_network(body: &str) -> Result<NetworkSpec, InputError> {
    let f: NetworkFile = toml::from_str(body).map_err(|e| InputError::Toml(e.to_string()))?;
    let nodes = f
        .nodes
        .into_iter()
        .map(|n| {
            let matrix = n.matrix.as_deref().map(|m| bit_rows(m, &n.id)).transpose()?;
            Ok(Node { kind: parse_kind(&n.kind)?, id: n.id, matrix })
        })
        .collect::<Result<Vec<_>, InputError>>()?;
    Ok(NetworkSpec {
        omega: f.omega,
        source: f.source,
        nodes,
        edges: f.edges.into_iter().map(|e| (e.from, e.to)).collect(),
    })
}

fn parse_lrc(body: &str) -> Result<LrcSpec, InputError> {
    let f: LrcFile = toml::from_str(body).map_err(|e| InputError::Toml(e.to_string()))?;
    Ok(LrcSpec {
        ell: f.ell,
        eta: f.eta,
        omega: f.omega,
        surviving: f.surviving,
        source_matrix: bit_rows(&f.source_matrix, "source_matrix")?,
    })
}

enum Section {
    Header,
    Block(usize),
    Nonrank,
}

/// Parses the body of a `system` file; `line_offset` is added to reported lines.
#[allow(clippy::type_complexity)]
pub fn parse_system(body: &str, line_offset: usize) -> Result<PolySystem, InputError> {
    let mut n = None;
    let mut v = None;
    // (header line, zeta range, polynomials)
    let mut blocks: Vec<(usize, Option<(usize, usize)>, Vec<BoolPoly>)> = Vec::new();
    let mut nonrank = Vec::new();
    let mut section = Section::Header;
    for (i, raw) in body.lines().enumerate() {
        let line_no = i + 1 + line_offset;
        let err = |reason: String| InputError::Syntax { line: line_no, reason };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let (head, tail) = rest.split_once(']').ok_or_else(|| err("unterminated section header".into()))?;
            let head = head.trim();
            if head == "nonrank" {
                section = Section::Nonrank;
                continue;
            }
            let Some(label) = head.strip_prefix("rank-block") else {
                return Err(err(format!("unknown section [{head}]")));
            };
            label.trim().parse::<usize>().map_err(|_| err(format!("bad block label in [{head}]")))?;
            let range = match tail.trim() {
                "" => None,
                spec => {
                    let r = spec
                        .strip_prefix("zeta")
                        .map(|s| s.trim_start())
                        .and_then(|s| s.strip_prefix('='))
                        .and_then(|s| s.trim().split_once(".."))
                        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                        .ok_or_else(|| err(format!("expected zeta=a..b, got {spec:?}")))?;
                    Some(r)
                }
            };
            blocks.push((line_no, range, Vec::new()));
            section = Section::Block(blocks.len() - 1);
            continue;
        }
        match section {
            Section::Header => {
                let (key, value) =
                    line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
                let value: usize = value.trim().parse().map_err(|_| err(format!("bad number {:?}", value.trim())))?;
                match key.trim() {
                    "n" => n = Some(value),
                    "v" => v = Some(value),
                    k => return Err(err(format!("unknown key {k:?}"))),
                }
            }
            Section::Block(b) => blocks[b].2.push(line.parse().map_err(|e| err(format!("{e}")))?),
            Section::Nonrank => nonrank.push(line.parse().map_err(|e| err(format!("{e}")))?),
        }
    }
    let missing = |k: &str| InputError::Syntax { line: line_offset + 1, reason: format!("missing {k} = ...") };
    let n = n.ok_or_else(|| missing("n"))?;
    let v = v.ok_or_else(|| missing("v"))?;
    let single = blocks.len() == 1;
    let rank_blocks = blocks
        .into_iter()
        .map(|(line, range, polys)| {
            let (a, b) = match range {
                Some(r) => r,
                None if single => (n + 1, n + v),
                None => {
                    return Err(InputError::Syntax {
                        line,
                        reason: "zeta=a..b is required when there are several rank blocks".into(),
                    })
                }
            };
            if a < n + 1 || b > n + v || a > b {
                return Err(InputError::Syntax {
                    line,
                    reason: format!("zeta range {a}..{b} outside {}..{}", n + 1, n + v),
                });
            }
            let outside = |i: usize| i > n && (i < a || i > b);
            if let Some(i) = polys.iter().flat_map(|f| f.vars()).map(|x| x.index()).find(|&i| outside(i)) {
                return Err(InputError::Syntax {
                    line,
                    reason: format!("x{i} is neither an x-variable nor in zeta={a}..{b}"),
                });
            }
            let local =
                |x: VarId| if x.index() > n { VarId::new(x.index() + n + 1 - a).expect("smaller index") } else { x };
            let polys = polys.iter().map(|f| f.rename(local)).collect();
            Ok(RankBlock { zeta_base: a - 1, width: b + 1 - a, polys })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolySystem::new(n, v, rank_blocks, nonrank))
}

/// Writes a system in the text format accepted by [`parse_instance`].
/// Fails when the global ζ numbering exceeds the variable limit.
pub fn write_system(p: &PolySystem) -> Result<String, PolyError> {
    let mut out = format!("system\nn = {}\nv = {}\n", p.n, p.v);
    for (k, b) in p.rank_blocks.iter().enumerate() {
        out.push_str(&format!("[rank-block {}] zeta={}..{}\n", k + 1, b.zeta_base + 1, b.zeta_base + b.width));
        for f in &p.global_block(k)? {
            out.push_str(&format!("{f}\n"));
        }
    }
    if !p.nonrank.is_empty() {
        out.push_str("[nonrank]\n");
        for f in &p.nonrank {
            out.push_str(&format!("{f}\n"));
        }
    }
    Ok(out)
}

/// Reads an assignment given either as a 0/1 string (`x1` first) or as a
/// whitespace/comma separated list of the variables equal to one.
pub fn parse_assignment(text: &str, n: usize) -> Result<Vec<bool>, InputError> {
    let cleaned: Vec<&str> = text.lines().map(|l| l.trim()).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let joined = cleaned.join(" ");
    let compact: String = joined.chars().filter(|c| !c.is_whitespace()).collect();
    if !compact.is_empty() && compact.chars().all(|c| c == '0' || c == '1') {
        if compact.len() != n {
            return Err(InputError::Syntax {
                line: 1,
                reason: format!("assignment has {} bits, expected {n}", compact.len()),
            });
        }
        return Ok(compact.chars().map(|c| c == '1').collect());
    }
    let mut values = vec![false; n];
    for token in joined.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let idx: usize = token
            .strip_prefix('x')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| InputError::Syntax { line: 1, reason: format!("bad variable {token:?}") })?;
        if idx == 0 || idx > n {
            return Err(InputError::Syntax { line: 1, reason: format!("variable {token} outside x1..x{n}") });
        }
        values[idx - 1] = true;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_round_trip() {
        let text = "system\nn = 6\nv = 3\n[rank-block 1]\nx1*x7 + x1*x2*x4*x6*x9 + x2*x4*x6*x9\nx2*x7 + x5*x7 + x8 + x3*x4*x6*x9\nx3*x6*x7 + x5*x8\n[nonrank]\nx5 + 1\n";
        let Instance::System(s) = parse_instance(text).unwrap() else { panic!("wrong kind") };
        assert_eq!((s.n, s.v), (6, 3));
        assert_eq!(s.rank_blocks[0].zeta_base, 6);
        assert!(s.is_tilde_linear());
        let Instance::System(again) = parse_instance(&write_system(&s).unwrap()).unwrap() else { panic!("wrong kind") };
        assert_eq!(again, s);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_instance("# c\nsystem\nn = 2\nv = 1\n[rank-block 1]\nx1*x3 +\n").unwrap_err();
        assert!(matches!(err, InputError::Syntax { line: 6, .. }), "{err}");
        let err = parse_instance("system\nn = 2\nv = 2\n[rank-block 1]\nx3\n[rank-block 2]\nx4\n").unwrap_err();
        assert!(matches!(err, InputError::Syntax { line: 4, .. }), "{err}");
        assert!(matches!(parse_instance("graph\n"), Err(InputError::UnknownKind { line: 1, .. })));
        assert!(matches!(parse_instance("\n# only comments\n"), Err(InputError::MissingHeader)));
        let err =
            parse_instance("network\nomega = 2\nsource = \"s\"\nedges = []\n[[nodes]]\nid = \"s\"\nkind = \"weird\"\n")
                .unwrap_err();
        assert!(err.to_string().contains("unknown node kind"));
    }

    #[test]
    fn network_and_lrc_files() {
        let net = "network\nomega = 1\nsource = \"s\"\nedges = [{ from = \"s\", to = \"u\" }]\n[[nodes]]\nid = \"s\"\nkind = \"constant\"\nmatrix = [\"1\"]\n[[nodes]]\nid = \"u\"\nkind = \"user\"\n";
        let Instance::Network(spec) = parse_instance(net).unwrap() else { panic!("wrong kind") };
        assert_eq!(spec.edges, vec![("s".to_string(), "u".to_string())]);
        assert_eq!(spec.nodes[0].matrix, Some(vec![vec![true]]));

        let lrc = "lrc\nell = 5\neta = 3\nomega = 2\nsurviving = [1, 3, 5]\nsource_matrix = [\"11100\", \"00111\"]\n";
        let Instance::Lrc(l) = parse_instance(lrc).unwrap() else { panic!("wrong kind") };
        assert_eq!(l.surviving, vec![1, 3, 5]);
        assert_eq!(l.source_matrix[1], vec![false, false, true, true, true]);
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("101", 3).unwrap(), vec![true, false, true]);
        assert_eq!(parse_assignment("x1, x3\n", 4).unwrap(), vec![true, false, true, false]);
        assert!(parse_assignment("10", 3).is_err());
        assert!(parse_assignment("x5", 3).is_err());
        assert_eq!(parse_assignment("", 2).unwrap(), vec![false, false]);
    }
}
