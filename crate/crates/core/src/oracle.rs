//! Brute-force ground truth for feasible sets.
//!
//! Nothing here goes through the decomposition engine. Dense enumeration
//! evaluates the constraint matrices pointwise and checks their rank;
//! the structured enumerator walks the per-node choices of a network and
//! propagates encoding vectors numerically.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::bcsfr::FeasibleSetResult;
use crate::boolpoly::{BoolPoly, VarId};
use crate::charset::CharSetError;
use crate::coding::network::{InEdge, NetworkSpec, NodeKind, Topology, VarMap};
use crate::coding::system::PolySystem;

/// Largest `n` the dense enumerator accepts.
pub const DENSE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
    #[error("system has an x̃-variable term outside its rank blocks")]
    Malformed,
    #[error(transparent)]
    CharSet(#[from] CharSetError),
}

/// A dense GF(2) matrix with rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        F2Matrix { rows, cols, words, bits: vec![0; rows * words] }
    }

    /// Builds from rows of 0/1 characters.
    pub fn from_strs(rows: &[&str]) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (r, s) in rows.iter().enumerate() {
            for (c, ch) in s.chars().enumerate() {
                m.set(r, c, ch == '1');
            }
        }
        m
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.bits[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }
}

/// Row rank over GF(2) by elimination on packed rows.
pub fn rank_f2(m: &F2Matrix) -> usize {
    let w = m.words;
    let mut rows: Vec<&[u64]> = m.bits.chunks(w).collect();
    let mut owned: Vec<Vec<u64>> = rows.drain(..).map(|r| r.to_vec()).collect();
    let mut rank = 0;
    for c in 0..m.cols {
        let (word, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..owned.len()).find(|&r| owned[r][word] & bit != 0) else { continue };
        owned.swap(rank, p);
        let pivot = owned[rank].clone();
        for (r, row) in owned.iter_mut().enumerate() {
            if r != rank && row[word] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == owned.len() {
            break;
        }
    }
    rank
}

/// Rank of a set of column vectors packed as `u64` (at most 64 rows).
fn rank_of_vectors(vectors: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &v in vectors {
        let mut x = v;
        while x != 0 {
            let top = 63 - x.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = x;
                rank += 1;
                break;
            }
            x ^= basis[top];
        }
    }
    rank
}

/// A point of the x-space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn from_bits(bits: u128, n: usize) -> Self {
        Assignment { values: (0..n).map(|i| bits >> i & 1 == 1).collect() }
    }

    pub fn to_bits(&self) -> u128 {
        self.values.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as u128) << i)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.values {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// Pointwise feasibility checks for a system: each rank block becomes a
/// numeric matrix whose entry `(k, j)` is the cofactor of `ζ_k` in the
/// `j`-th polynomial.
pub struct SystemOracle {
    n: usize,
    blocks: Vec<Vec<Vec<BoolPoly>>>,
    nonrank: Vec<BoolPoly>,
}

impl SystemOracle {
    pub fn new(p: &PolySystem) -> Result<Self, OracleError> {
        let mut blocks = Vec::new();
        for b in &p.rank_blocks {
            let mut rows = Vec::with_capacity(b.width);
            let mut rebuilt = vec![BoolPoly::zero(); b.polys.len()];
            for k in 0..b.width {
                let z = VarId::new(p.n + k + 1).expect("index in range");
                let row: Vec<BoolPoly> = b.polys.iter().map(|f| f.split_on(z).0).collect();
                for (acc, c) in rebuilt.iter_mut().zip(&row) {
                    *acc = acc.add(&c.mul(&BoolPoly::var(z)));
                }
                rows.push(row);
            }
            if rebuilt != b.polys {
                return Err(OracleError::Malformed);
            }
            blocks.push(rows);
        }
        Ok(SystemOracle { n: p.n, blocks, nonrank: p.nonrank.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The evaluated matrix of block `b` at `x`.
    pub fn block_matrix(&self, b: usize, x: u128) -> F2Matrix {
        let rows = &self.blocks[b];
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (k, row) in rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.eval_bits(x) {
                    m.set(k, j, true);
                }
            }
        }
        m
    }

    /// First failing constraint at `x`, if any.
    pub fn violation(&self, x: u128) -> Option<Violation> {
        if let Some(j) = self.nonrank.iter().position(|h| h.eval_bits(x)) {
            return Some(Violation::Nonrank(j));
        }
        for b in 0..self.blocks.len() {
            let m = self.block_matrix(b, x);
            let r = rank_f2(&m);
            if r < m.rows() {
                return Some(Violation::RankDeficit { block: b, rank: r, needed: m.rows() });
            }
        }
        None
    }

    pub fn is_feasible(&self, x: u128) -> bool {
        self.violation(x).is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Nonrank(usize),
    RankDeficit { block: usize, rank: usize, needed: usize },
}

/// Exhaustive feasible set over all of `F_2^n`.
pub fn feasible_oracle_dense(p: &PolySystem) -> Result<BTreeSet<u128>, OracleError> {
    if p.n > DENSE_LIMIT {
        return Err(OracleError::Budget(format!("dense enumeration needs n <= {DENSE_LIMIT}, got {}", p.n)));
    }
    let oracle = SystemOracle::new(p)?;
    let total: u64 = 1 << p.n;
    let chunk: u64 = 1 << 10;
    Ok((0..total.div_ceil(chunk))
        .into_par_iter()
        .flat_map_iter(|c| {
            let oracle = &oracle;
            (c * chunk..((c + 1) * chunk).min(total)).filter(move |&x| oracle.is_feasible(x as u128))
        })
        .map(|x| x as u128)
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

/// The feasible set straight from its definition: `(x, 0)` is a common
/// zero and no nonzero `ζ` completes `x` to a zero. Costs `2^(n+v)`.
pub fn fss_definitional(p: &PolySystem) -> Result<BTreeSet<u128>, OracleError> {
    if p.n + p.v > DENSE_LIMIT {
        return Err(OracleError::Budget(format!("definitional check needs n + v <= {DENSE_LIMIT}")));
    }
    let polys = p.all_polys().map_err(|_| OracleError::Malformed)?;
    let zero = |pt: u128| polys.iter().all(|f| !f.eval_bits(pt));
    let mut out = BTreeSet::new();
    for x in 0u128..1 << p.n {
        if !zero(x) {
            continue;
        }
        if (1u128..1 << p.v).all(|z| !zero(x | z << p.n)) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// One mixed-radix digit of the structured space.
enum Digit {
    /// A free coefficient variable.
    Free(VarId),
    /// A routing out-edge: value `i` selects the `i`-th in-edge.
    Route(Vec<VarId>),
    /// A broadcast in-edge: all listed variables take the same value.
    Shared(Vec<VarId>),
}

impl Digit {
    fn radix(&self) -> u64 {
        match self {
            Digit::Route(vars) => vars.len() as u64,
            _ => 2,
        }
    }

    fn apply(&self, value: u64, x: &mut u128) {
        let set = |x: &mut u128, v: VarId| *x |= 1u128 << (v.index() - 1);
        match self {
            Digit::Free(v) if value == 1 => set(x, *v),
            Digit::Route(vars) => set(x, vars[value as usize]),
            Digit::Shared(vars) if value == 1 => vars.iter().for_each(|v| set(x, *v)),
            _ => {}
        }
    }
}

/// Enumerates only routing- and broadcast-consistent coefficient choices
/// and checks every user's received matrix numerically.
pub struct StructuredOracle<'a> {
    spec: &'a NetworkSpec,
    topo: &'a Topology,
    vm: &'a VarMap,
    digits: Vec<Digit>,
    users: Vec<usize>,
}

impl<'a> StructuredOracle<'a> {
    pub fn new(spec: &'a NetworkSpec, topo: &'a Topology, vm: &'a VarMap) -> Result<Self, OracleError> {
        if spec.omega > 64 {
            return Err(OracleError::Budget("structured oracle supports omega <= 64".into()));
        }
        let mut digits = Vec::new();
        for (t, node) in spec.nodes.iter().enumerate() {
            let var = |i: InEdge, o: usize| vm.var(i, o).expect("mapped coefficient");
            match node.kind {
                NodeKind::General => {
                    for &o in &topo.outs[t] {
                        for &i in &topo.ins[t] {
                            digits.push(Digit::Free(var(i, o)));
                        }
                    }
                }
                NodeKind::Routing => {
                    for &o in &topo.outs[t] {
                        digits.push(Digit::Route(topo.ins[t].iter().map(|&i| var(i, o)).collect()));
                    }
                }
                NodeKind::Broadcast if !topo.outs[t].is_empty() => {
                    for &i in &topo.ins[t] {
                        let mut vars: Vec<VarId> = topo.outs[t].iter().map(|&o| var(i, o)).collect();
                        vars.dedup();
                        digits.push(Digit::Shared(vars));
                    }
                }
                _ => {}
            }
        }
        let users = spec.users().collect();
        Ok(StructuredOracle { spec, topo, vm, digits, users })
    }

    /// Number of candidate points, if it fits in 64 bits.
    pub fn space_size(&self) -> Option<u64> {
        self.digits.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.radix()))
    }

    fn point(&self, mut index: u64) -> u128 {
        let mut x = 0u128;
        for d in &self.digits {
            let r = d.radix();
            d.apply(index % r, &mut x);
            index /= r;
        }
        x
    }

    fn coefficient(&self, t: usize, i: InEdge, o: usize, x: u128) -> bool {
        let node = &self.spec.nodes[t];
        match node.kind {
            NodeKind::Constant => {
                let r = self.topo.ins[t].iter().position(|&e| e == i).expect("input");
                let c = self.topo.outs[t].iter().position(|&e| e == o).expect("output");
                node.matrix.as_ref().expect("validated")[r][c]
            }
            _ => {
                let v = self.vm.var(i, o).expect("mapped");
                x >> (v.index() - 1) & 1 == 1
            }
        }
    }

    /// True when every user can decode at the coefficient choice `x`.
    pub fn admissible(&self, x: u128) -> bool {
        let mut f = vec![0u64; self.spec.edges.len()];
        for &t in &self.topo.order {
            for &o in &self.topo.outs[t] {
                let mut col = 0u64;
                for &i in &self.topo.ins[t] {
                    if self.coefficient(t, i, o, x) {
                        col ^= match i {
                            InEdge::Imaginary(k) => 1 << k,
                            InEdge::Real(e) => f[e],
                        };
                    }
                }
                f[o] = col;
            }
        }
        self.users.iter().all(|&u| {
            let cols: Vec<u64> = self.topo.ins[u]
                .iter()
                .map(|e| match e {
                    InEdge::Real(k) => f[*k],
                    InEdge::Imaginary(k) => 1 << k,
                })
                .collect();
            rank_of_vectors(&cols) == self.spec.omega
        })
    }

    /// All admissible points of the structured space, and the space size.
    pub fn enumerate(&self, budget: u64) -> Result<(BTreeSet<u128>, u64), OracleError> {
        let total = self
            .space_size()
            .filter(|&s| s <= budget)
            .ok_or_else(|| OracleError::Budget(format!("structured space exceeds {budget} points")))?;
        let found: Vec<u128> =
            (0..total).into_par_iter().map(|i| self.point(i)).filter(|&x| self.admissible(x)).collect();
        Ok((found.into_iter().collect(), total))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub oracle_count: u64,
    pub solution_count: BigUint,
    /// Smallest oracle point not covered by the charsets.
    pub missing: Option<u128>,
    /// Smallest charset zero the oracle rejects.
    pub extra: Option<u128>,
    /// Some point lies in two charsets.
    pub overlap: Option<u128>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.missing.is_none()
            && self.extra.is_none()
            && self.overlap.is_none()
            && self.solution_count == BigUint::from(self.oracle_count)
    }
}

/// Compares an oracle set against the enumerated zeros of `result`.
pub fn compare_oracle_vs_cs(oracle: &BTreeSet<u128>, result: &FeasibleSetResult) -> Result<OracleReport, OracleError> {
    let mut covered = BTreeSet::new();
    let mut overlap = None;
    for t in &result.charsets {
        for z in t.enumerate_zeros(None)? {
            if !covered.insert(z) && overlap.is_none() {
                overlap = Some(z);
            }
        }
    }
    Ok(OracleReport {
        oracle_count: oracle.len() as u64,
        solution_count: result.solution_count.clone(),
        missing: oracle.difference(&covered).next().copied(),
        extra: covered.difference(oracle).next().copied(),
        overlap,
    })
}
