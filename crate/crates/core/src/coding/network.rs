//! Linear network coding instances compiled into polynomial systems.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::boolpoly::{BoolPoly, VarId, MAX_VARS};
use crate::coding::system::{zeta_combination, PolySystem, RankBlock};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("graph has a cycle through {0:?}")]
    Cycle(String),
    #[error("source {0:?} must not have incoming edges")]
    SourceHasInEdges(String),
    #[error("user node {0:?} has outgoing edges")]
    UserHasOutEdges(String),
    #[error("node {id:?}: matrix must be {rows}x{cols}")]
    MatrixShape { id: String, rows: usize, cols: usize },
    #[error("node {0:?} is not a user node")]
    NotUser(String),
    #[error("user {user:?} has {have} incoming edges but needs at least {omega}")]
    InsufficientInDegree { user: String, have: usize, omega: usize },
    #[error("{0} variables exceed the supported maximum of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("invalid LRC parameters: {0}")]
    LrcParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    General,
    Routing,
    Broadcast,
    Constant,
    User,
}

impl NodeKind {
    pub fn is_optimized(self) -> bool {
        matches!(self, NodeKind::General | NodeKind::Routing | NodeKind::Broadcast)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Local encoding matrix of a constant node, `|In| x |Out|`.
    pub matrix: Option<Vec<Vec<bool>>>,
}

/// A single-source multicast network. The source may be of any non-user
/// kind; its inputs are `omega` imaginary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    pub omega: usize,
    pub source: String,
    pub nodes: Vec<Node>,
    /// Edge list; positions fix the in- and out-edge orders.
    pub edges: Vec<(String, String)>,
}

/// An input edge of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InEdge {
    /// The `i`-th source symbol (0-based).
    Imaginary(usize),
    /// Index into the edge list.
    Real(usize),
}

/// Validated adjacency of a [`NetworkSpec`].
#[derive(Debug, Clone)]
pub struct Topology {
    pub source: usize,
    pub ins: Vec<Vec<InEdge>>,
    pub outs: Vec<Vec<usize>>,
    pub edge_ends: Vec<(usize, usize)>,
    /// Nodes in topological order.
    pub order: Vec<usize>,
}

impl NetworkSpec {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Checks structure and returns the derived adjacency.
    pub fn topology(&self) -> Result<Topology, CodingError> {
        let mut index = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if index.insert(node.id.as_str(), i).is_some() {
                return Err(CodingError::DuplicateNode(node.id.clone()));
            }
        }
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| CodingError::UnknownNode(id.to_string()));
        let source = lookup(&self.source)?;
        let mut ins: Vec<Vec<InEdge>> = vec![Vec::new(); self.nodes.len()];
        let mut outs: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        ins[source] = (0..self.omega).map(InEdge::Imaginary).collect();
        let mut graph: DiGraph<usize, ()> = DiGraph::new();
        let handles: Vec<NodeIndex> = (0..self.nodes.len()).map(|i| graph.add_node(i)).collect();
        let mut edge_ends = Vec::with_capacity(self.edges.len());
        for (k, (from, to)) in self.edges.iter().enumerate() {
            let (a, b) = (lookup(from)?, lookup(to)?);
            if b == source {
                return Err(CodingError::SourceHasInEdges(self.source.clone()));
            }
            outs[a].push(k);
            ins[b].push(InEdge::Real(k));
            graph.add_edge(handles[a], handles[b], ());
            edge_ends.push((a, b));
        }
        let order = toposort(&graph, None)
            .map_err(|c| CodingError::Cycle(self.nodes[graph[c.node_id()]].id.clone()))?
            .into_iter()
            .map(|h| graph[h])
            .collect();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.kind == NodeKind::User && !outs[i].is_empty() {
                return Err(CodingError::UserHasOutEdges(node.id.clone()));
            }
            if node.kind == NodeKind::Constant {
                let (rows, cols) = (ins[i].len(), outs[i].len());
                let ok = match &node.matrix {
                    Some(m) => m.len() == rows && m.iter().all(|r| r.len() == cols),
                    None => cols == 0,
                };
                if !ok {
                    return Err(CodingError::MatrixShape { id: node.id.clone(), rows, cols });
                }
            }
        }
        Ok(Topology { source, ins, outs, edge_ends, order })
    }

    pub fn users(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| n.kind == NodeKind::User).map(|(i, _)| i)
    }
}

/// How broadcast nodes are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BroadcastMode {
    /// One variable per in-edge, shared by all out-edges.
    #[default]
    Identify,
    /// One variable per coefficient plus equality constraints.
    Equations,
}

impl std::str::FromStr for BroadcastMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identify" => Ok(BroadcastMode::Identify),
            "equations" => Ok(BroadcastMode::Equations),
            _ => Err(format!("unknown broadcast mode {s:?} (expected identify or equations)")),
        }
    }
}

/// Assignment of variables to the coefficients `g_{e_in, e_out}` of optimized nodes.
///
/// Nodes are numbered in node-list order; within a node, out-edges in edge
/// order, and for each out-edge its in-edges in order. Identified broadcast
/// nodes get one variable per in-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    pub mode: BroadcastMode,
    pub n: usize,
    forward: HashMap<(InEdge, usize), VarId>,
    /// For each variable (0-based), the coefficient pairs it stands for.
    pub pairs: Vec<Vec<(InEdge, usize)>>,
}

impl VarMap {
    pub fn build(spec: &NetworkSpec, topo: &Topology, mode: BroadcastMode) -> Result<Self, CodingError> {
        let mut forward = HashMap::new();
        let mut pairs: Vec<Vec<(InEdge, usize)>> = Vec::new();
        for (t, node) in spec.nodes.iter().enumerate() {
            if !node.kind.is_optimized() {
                continue;
            }
            if node.kind == NodeKind::Broadcast && mode == BroadcastMode::Identify {
                if topo.outs[t].is_empty() {
                    continue;
                }
                for &i in &topo.ins[t] {
                    pairs.push(topo.outs[t].iter().map(|&o| (i, o)).collect());
                }
            } else {
                for &o in &topo.outs[t] {
                    for &i in &topo.ins[t] {
                        pairs.push(vec![(i, o)]);
                    }
                }
            }
        }
        if pairs.len() > MAX_VARS {
            return Err(CodingError::TooManyVariables(pairs.len()));
        }
        for (k, ps) in pairs.iter().enumerate() {
            let v = VarId::new(k + 1).expect("checked above");
            for &p in ps {
                forward.insert(p, v);
            }
        }
        Ok(VarMap { mode, n: pairs.len(), forward, pairs })
    }

    pub fn var(&self, input: InEdge, output: usize) -> Option<VarId> {
        self.forward.get(&(input, output)).copied()
    }
}

/// A matrix of polynomials, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<BoolPoly>>,
}

impl SymbolicMatrix {
    pub fn from_columns(rows: usize, columns: &[Vec<BoolPoly>]) -> Self {
        let entries = (0..rows).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect();
        SymbolicMatrix { rows, cols: columns.len(), entries }
    }

    pub fn column(&self, j: usize) -> Vec<BoolPoly> {
        self.entries.iter().map(|row| row[j].clone()).collect()
    }
}

/// The local coefficient `g_{input, output}` at `node` as a polynomial.
fn coefficient(
    spec: &NetworkSpec,
    topo: &Topology,
    vm: &VarMap,
    node: usize,
    input: InEdge,
    output: usize,
) -> BoolPoly {
    match spec.nodes[node].kind {
        NodeKind::Constant => {
            let r = topo.ins[node].iter().position(|&e| e == input).expect("input of node");
            let c = topo.outs[node].iter().position(|&e| e == output).expect("output of node");
            BoolPoly::constant(spec.nodes[node].matrix.as_ref().expect("validated")[r][c])
        }
        _ => BoolPoly::var(vm.var(input, output).expect("mapped coefficient")),
    }
}

/// Global encoding vector of every real edge, indexed by edge position.
pub fn global_encoding_vectors(spec: &NetworkSpec, vm: &VarMap) -> Result<Vec<Vec<BoolPoly>>, CodingError> {
    let topo = spec.topology()?;
    Ok(propagate(spec, &topo, vm))
}

pub(crate) fn propagate(spec: &NetworkSpec, topo: &Topology, vm: &VarMap) -> Vec<Vec<BoolPoly>> {
    let omega = spec.omega;
    let mut f: Vec<Vec<BoolPoly>> = vec![Vec::new(); spec.edges.len()];
    let basis = |i: usize| (0..omega).map(|r| BoolPoly::constant(r == i)).collect::<Vec<_>>();
    for &t in &topo.order {
        for &o in &topo.outs[t] {
            let mut col = vec![BoolPoly::zero(); omega];
            for &i in &topo.ins[t] {
                let g = coefficient(spec, topo, vm, t, i, o);
                if g.is_zero() {
                    continue;
                }
                let incoming = match i {
                    InEdge::Imaginary(k) => basis(k),
                    InEdge::Real(e) => f[e].clone(),
                };
                for (acc, x) in col.iter_mut().zip(incoming.iter()) {
                    *acc = acc.add(&g.mul(x));
                }
            }
            f[o] = col;
        }
    }
    f
}

/// `F_u`: the global encoding vectors of the user's in-edges as columns.
pub fn receive_matrix(spec: &NetworkSpec, vm: &VarMap, user: &str) -> Result<SymbolicMatrix, CodingError> {
    let topo = spec.topology()?;
    let u = spec.node_index(user).ok_or_else(|| CodingError::UnknownNode(user.to_string()))?;
    if spec.nodes[u].kind != NodeKind::User {
        return Err(CodingError::NotUser(user.to_string()));
    }
    let f = propagate(spec, &topo, vm);
    Ok(receive_from(&topo, &f, u, spec.omega))
}

fn receive_from(topo: &Topology, f: &[Vec<BoolPoly>], u: usize, omega: usize) -> SymbolicMatrix {
    let cols: Vec<Vec<BoolPoly>> = topo.ins[u]
        .iter()
        .map(|e| match e {
            InEdge::Real(k) => f[*k].clone(),
            InEdge::Imaginary(_) => unreachable!("users are not sources"),
        })
        .collect();
    SymbolicMatrix::from_columns(omega, &cols)
}

/// `ζ · M` with `ζ` at indices `zeta_base+1 ..= zeta_base+rows`: one
/// polynomial per column.
pub fn rank_constraint_polys(m: &SymbolicMatrix, zeta_base: usize) -> Vec<BoolPoly> {
    (0..m.cols).map(|j| zeta_combination(&m.column(j), zeta_base)).collect()
}

/// For each routing node and out-edge: pairwise products and the sum plus one.
pub fn routing_constraints(spec: &NetworkSpec, vm: &VarMap) -> Result<Vec<BoolPoly>, CodingError> {
    let topo = spec.topology()?;
    Ok(routing_from(spec, &topo, vm))
}

fn routing_from(spec: &NetworkSpec, topo: &Topology, vm: &VarMap) -> Vec<BoolPoly> {
    let mut out = Vec::new();
    for (t, node) in spec.nodes.iter().enumerate() {
        if node.kind != NodeKind::Routing {
            continue;
        }
        for &o in &topo.outs[t] {
            let vars: Vec<BoolPoly> =
                topo.ins[t].iter().map(|&i| BoolPoly::var(vm.var(i, o).expect("mapped"))).collect();
            for a in 0..vars.len() {
                for b in a + 1..vars.len() {
                    out.push(vars[a].mul(&vars[b]));
                }
            }
            out.push(vars.iter().fold(BoolPoly::one(), |acc, x| acc.add(x)));
        }
    }
    out
}

/// Equality constraints between consecutive out-edges of each broadcast
/// in-edge. Empty under [`BroadcastMode::Identify`].
pub fn broadcast_constraints(spec: &NetworkSpec, vm: &VarMap) -> Result<Vec<BoolPoly>, CodingError> {
    let topo = spec.topology()?;
    Ok(broadcast_from(spec, &topo, vm))
}

fn broadcast_from(spec: &NetworkSpec, topo: &Topology, vm: &VarMap) -> Vec<BoolPoly> {
    let mut out = Vec::new();
    if vm.mode == BroadcastMode::Identify {
        return out;
    }
    for (t, node) in spec.nodes.iter().enumerate() {
        if node.kind != NodeKind::Broadcast {
            continue;
        }
        for &i in &topo.ins[t] {
            for w in topo.outs[t].windows(2) {
                let a = BoolPoly::var(vm.var(i, w[0]).expect("mapped"));
                let b = BoolPoly::var(vm.var(i, w[1]).expect("mapped"));
                out.push(a.add(&b));
            }
        }
    }
    out
}

/// A compiled network instance.
#[derive(Debug, Clone)]
pub struct LncProblem {
    pub spec: NetworkSpec,
    pub topology: Topology,
    pub varmap: VarMap,
    /// Users in node order; user `k` owns rank block `k`.
    pub users: Vec<usize>,
    pub system: PolySystem,
}

/// One full-rank block per user (fresh ζ each) plus routing and broadcast
/// constraints.
pub fn build_lnc_problem(spec: &NetworkSpec, mode: BroadcastMode) -> Result<LncProblem, CodingError> {
    let topo = spec.topology()?;
    let vm = VarMap::build(spec, &topo, mode)?;
    let omega = spec.omega;
    let n = vm.n;
    let users: Vec<usize> = spec.users().collect();
    for &u in &users {
        if topo.ins[u].len() < omega {
            return Err(CodingError::InsufficientInDegree {
                user: spec.nodes[u].id.clone(),
                have: topo.ins[u].len(),
                omega,
            });
        }
    }
    let v = users.len() * omega;
    if n + omega > MAX_VARS {
        return Err(CodingError::TooManyVariables(n + omega));
    }
    let f = propagate(spec, &topo, &vm);
    let blocks = users
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let m = receive_from(&topo, &f, u, omega);
            RankBlock { zeta_base: n + k * omega, width: omega, polys: rank_constraint_polys(&m, n) }
        })
        .collect();
    let mut nonrank = routing_from(spec, &topo, &vm);
    nonrank.extend(broadcast_from(spec, &topo, &vm));
    let system = PolySystem::new(n, v, blocks, nonrank);
    Ok(LncProblem { spec: spec.clone(), topology: topo, varmap: vm, users, system })
}

/// Size of the structured search space: `2^(in*out)` per general node,
/// `in^out` per routing node and `2^in` per broadcast node with outputs.
pub fn search_space_size(spec: &NetworkSpec) -> Result<BigUint, CodingError> {
    let topo = spec.topology()?;
    let mut size = BigUint::one();
    for (t, node) in spec.nodes.iter().enumerate() {
        let (i, o) = (topo.ins[t].len() as u32, topo.outs[t].len() as u32);
        match node.kind {
            NodeKind::General => size <<= i * o,
            NodeKind::Routing => size *= BigUint::from(i).pow(o),
            NodeKind::Broadcast if o > 0 => size <<= i,
            _ => {}
        }
    }
    Ok(size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    fn node(id: &str, kind: NodeKind, matrix: Option<&[&str]>) -> Node {
        Node {
            id: id.into(),
            kind,
            matrix: matrix.map(|rows| rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect()),
        }
    }

    fn edges(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    pub(crate) fn butterfly() -> NetworkSpec {
        NetworkSpec {
            omega: 2,
            source: "s".into(),
            nodes: vec![
                node("s", NodeKind::Constant, Some(&["10", "01"])),
                node("t1", NodeKind::Constant, Some(&["11"])),
                node("t2", NodeKind::Constant, Some(&["11"])),
                node("t3", NodeKind::Constant, Some(&["1", "1"])),
                node("t4", NodeKind::Constant, Some(&["11"])),
                node("u1", NodeKind::User, None),
                node("u2", NodeKind::User, None),
            ],
            edges: edges(&[
                ("s", "t1"),
                ("s", "t2"),
                ("t1", "t3"),
                ("t1", "u1"),
                ("t2", "t3"),
                ("t2", "u2"),
                ("t3", "t4"),
                ("t4", "u1"),
                ("t4", "u2"),
            ]),
        }
    }

    pub(crate) fn mixed_network() -> NetworkSpec {
        NetworkSpec {
            omega: 3,
            source: "s".into(),
            nodes: vec![
                node("s", NodeKind::Routing, None),
                node("t1", NodeKind::General, None),
                node("t2", NodeKind::General, None),
                node("t3", NodeKind::Broadcast, None),
                node("t4", NodeKind::Routing, None),
                node("u1", NodeKind::User, None),
                node("u2", NodeKind::User, None),
            ],
            edges: edges(&[
                ("s", "t1"),
                ("t1", "u1"),
                ("s", "t4"),
                ("t1", "t3"),
                ("s", "t3"),
                ("s", "t2"),
                ("t2", "t3"),
                ("t2", "u2"),
                ("t3", "u1"),
                ("t3", "t4"),
                ("t3", "u2"),
                ("t4", "u1"),
                ("t4", "u2"),
            ]),
        }
    }

    fn vm(spec: &NetworkSpec, mode: BroadcastMode) -> VarMap {
        VarMap::build(spec, &spec.topology().unwrap(), mode).unwrap()
    }

    fn edge(spec: &NetworkSpec, a: &str, b: &str) -> usize {
        spec.edges.iter().position(|(x, y)| x == a && y == b).unwrap()
    }

    #[test]
    fn butterfly_vectors() {
        let spec = butterfly();
        let m = vm(&spec, BroadcastMode::Identify);
        assert_eq!(m.n, 0);
        let f = global_encoding_vectors(&spec, &m).unwrap();
        assert_eq!(f[edge(&spec, "t3", "t4")], vec![BoolPoly::one(), BoolPoly::one()]);
        assert_eq!(f[edge(&spec, "t4", "u1")], vec![BoolPoly::one(), BoolPoly::one()]);
        let fu = receive_matrix(&spec, &m, "u1").unwrap();
        let c = |b: bool| BoolPoly::constant(b);
        assert_eq!(fu.entries, vec![vec![c(true), c(true)], vec![c(false), c(true)]]);
        assert_eq!(rank_constraint_polys(&fu, 0), vec![p("x1"), p("x2 + x1")]);
        assert!(matches!(receive_matrix(&spec, &m, "t1"), Err(CodingError::NotUser(_))));
        assert_eq!(search_space_size(&spec).unwrap(), BigUint::one());
    }

    #[test]
    fn mixed_network_vectors() {
        let spec = mixed_network();
        let m = vm(&spec, BroadcastMode::Equations);
        assert_eq!(m.n, 29);
        let f = global_encoding_vectors(&spec, &m).unwrap();
        let col = |a, b| f[edge(&spec, a, b)].clone();
        assert_eq!(col("t1", "u1"), vec![p("x1*x13"), p("x2*x13"), p("x3*x13")]);
        assert_eq!(
            col("t3", "u1"),
            vec![
                p("x1*x14*x17 + x10*x15*x19 + x18*x7"),
                p("x2*x14*x17 + x11*x15*x19 + x18*x8"),
                p("x3*x14*x17 + x12*x15*x19 + x18*x9"),
            ]
        );
        assert_eq!(
            col("t4", "u1"),
            vec![
                p("x26*x4 + x27*x1*x14*x20 + x27*x10*x15*x22 + x27*x21*x7"),
                p("x26*x5 + x27*x11*x15*x22 + x27*x14*x2*x20 + x27*x21*x8"),
                p("x26*x6 + x27*x12*x15*x22 + x27*x14*x20*x3 + x27*x21*x9"),
            ]
        );
        assert_eq!(col("t2", "u2"), vec![p("x10*x16"), p("x11*x16"), p("x12*x16")]);
        assert_eq!(
            col("t3", "u2"),
            vec![
                p("x1*x14*x23 + x10*x15*x25 + x24*x7"),
                p("x11*x15*x25 + x14*x2*x23 + x24*x8"),
                p("x12*x15*x25 + x14*x23*x3 + x24*x9"),
            ]
        );
        assert_eq!(
            col("t4", "u2"),
            vec![
                p("x28*x4 + x29*x1*x14*x20 + x29*x10*x15*x22 + x29*x21*x7"),
                p("x28*x5 + x29*x11*x15*x22 + x29*x14*x2*x20 + x29*x21*x8"),
                p("x28*x6 + x29*x12*x15*x22 + x29*x14*x20*x3 + x29*x21*x9"),
            ]
        );
        let fu = receive_matrix(&spec, &m, "u1").unwrap();
        assert_eq!(fu.column(0), col("t1", "u1"));
        assert_eq!(fu.column(2), col("t4", "u1"));
    }

    #[test]
    fn mixed_network_constraints() {
        let spec = mixed_network();
        let m = vm(&spec, BroadcastMode::Equations);
        let routing = routing_constraints(&spec, &m).unwrap();
        assert_eq!(&routing[..4], &[p("x1*x2"), p("x1*x3"), p("x2*x3"), p("x1 + x2 + x3 + 1")]);
        assert_eq!(&routing[16..], &[p("x26*x27"), p("x26 + x27 + 1"), p("x28*x29"), p("x28 + x29 + 1")]);
        assert_eq!(routing.len(), 20);
        let bc = broadcast_constraints(&spec, &m).unwrap();
        assert_eq!(
            bc,
            vec![p("x17 + x20"), p("x20 + x23"), p("x18 + x21"), p("x21 + x24"), p("x19 + x22"), p("x22 + x25")]
        );
        assert!(broadcast_constraints(&spec, &vm(&spec, BroadcastMode::Identify)).unwrap().is_empty());
        assert_eq!(search_space_size(&spec).unwrap(), BigUint::from(41_472u32));
    }

    #[test]
    fn identify_mode_shares_broadcast_variables() {
        let spec = mixed_network();
        let m = vm(&spec, BroadcastMode::Identify);
        assert_eq!(m.n, 23);
        let t3 = spec.node_index("t3").unwrap();
        let topo = spec.topology().unwrap();
        let first_in = topo.ins[t3][0];
        let vars: Vec<VarId> = topo.outs[t3].iter().map(|&o| m.var(first_in, o).unwrap()).collect();
        assert!(vars.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn problem_layout() {
        let prob = build_lnc_problem(&mixed_network(), BroadcastMode::Equations).unwrap();
        assert_eq!((prob.system.n, prob.system.v), (29, 6));
        assert_eq!(prob.system.rank_blocks[1].zeta_base, 32);
        assert!(prob.system.is_tilde_linear());
        assert_eq!(prob.system.nonrank.len(), 26);
    }

    #[test]
    fn structural_errors() {
        let mut spec = butterfly();
        spec.edges.push(("t4".into(), "t1".into()));
        assert!(matches!(spec.topology(), Err(CodingError::Cycle(_))));

        let mut spec = butterfly();
        spec.edges.retain(|(a, b)| !(a == "t4" && b == "u1"));
        spec.nodes[4].matrix = Some(vec![vec![true]]);
        assert!(matches!(
            build_lnc_problem(&spec, BroadcastMode::Identify),
            Err(CodingError::InsufficientInDegree { have: 1, omega: 2, .. })
        ));

        let mut spec = butterfly();
        spec.nodes[1].matrix = Some(vec![vec![true]]);
        assert!(matches!(spec.topology(), Err(CodingError::MatrixShape { .. })));

        let mut spec = butterfly();
        spec.edges.push(("u1".into(), "u2".into()));
        assert!(matches!(spec.topology(), Err(CodingError::UserHasOutEdges(_))));

        let source_only = NetworkSpec {
            omega: 2,
            source: "s".into(),
            nodes: vec![node("s", NodeKind::Constant, None)],
            edges: vec![],
        };
        let m = vm(&source_only, BroadcastMode::Identify);
        assert!(global_encoding_vectors(&source_only, &m).unwrap().is_empty());
    }
}
