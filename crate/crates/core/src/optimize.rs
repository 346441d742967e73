//! Counting, objective evaluation, exact minimization over characteristic
//! sets, and weighted MaxSAT export for sets too large to search.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::bcsfr::FeasibleSetResult;
use crate::boolpoly::{BoolPoly, Monomial};
use crate::charset::CharSet;
use crate::coding::system::PolySystem;
use crate::oracle::{Assignment, OracleError, SystemOracle};

pub const DEFAULT_MAX_DF: u32 = 24;
pub const DEFAULT_WITNESS_CAP: usize = 1000;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("infeasible")]
    Infeasible,
    #[error("charset {} has df {df} > {max_df}; use export-wcnf and an external MaxSAT solver", .index + 1)]
    DfTooLarge { index: usize, df: u32, max_df: u32 },
    #[error("objective has {have} weights, expected {want}")]
    WeightCount { have: usize, want: usize },
    #[error("no charset with index {0}")]
    NoSuchCharset(usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// `f(x) = Σ w_i x_i`, summed over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub weights: Vec<u64>,
}

impl Objective {
    pub fn unit(n: usize) -> Self {
        Objective { weights: vec![1; n] }
    }

    pub fn value(&self, x: u128) -> u64 {
        self.weights.iter().enumerate().filter(|(i, _)| x >> i & 1 == 1).map(|(_, w)| w).sum()
    }

    fn check(&self, n: usize) -> Result<(), OptimizeError> {
        if self.weights.len() != n {
            return Err(OptimizeError::WeightCount { have: self.weights.len(), want: n });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: u64,
    /// Optimal points, at most the witness cap.
    pub witnesses: Vec<Assignment>,
    pub witness_count: BigUint,
}

pub fn count_solutions(r: &FeasibleSetResult) -> BigUint {
    r.charsets.iter().map(CharSet::zero_count).fold(BigUint::zero(), |a, b| a + b)
}

/// Per-charset search state: free variables in decision order and, for
/// each depth, the solved equations whose tails become fully known there.
struct Search<'a> {
    weights: &'a [u64],
    free: Vec<usize>,
    settle: Vec<Vec<(usize, &'a BoolPoly)>>,
    cap: usize,
    best: u64,
    witnesses: Vec<u128>,
    count: u64,
}

impl<'a> Search<'a> {
    fn new(t: &'a CharSet, weights: &'a [u64], cap: usize) -> Self {
        let mut free: Vec<usize> = t.fvs().into_iter().map(|v| v.index() - 1).collect();
        free.sort_by_key(|&i| std::cmp::Reverse(weights[i]));
        let mut pos = vec![usize::MAX; weights.len()];
        for (d, &i) in free.iter().enumerate() {
            pos[i] = d;
        }
        let mut settle = vec![Vec::new(); free.len() + 1];
        for (eq, (v, _)) in t.equations().iter().zip(t.solved_form()) {
            let support = eq.support() & !Monomial::var(v).bits();
            let depth = (0..128).filter(|b| support >> b & 1 == 1).map(|b| pos[b] + 1).max().unwrap_or(0);
            settle[depth].push((v.index() - 1, eq));
        }
        Search { weights, free, settle, cap, best: u64::MAX, witnesses: Vec::new(), count: 0 }
    }

    /// Sets the led variables settled at `depth`, returning their added cost.
    fn settle_at(&self, depth: usize, x: &mut u128) -> u64 {
        let mut cost = 0;
        for &(c, eq) in &self.settle[depth] {
            // x_c + U vanishes with x_c = 0 exactly when U = 0
            if eq.eval_bits(*x & !(1 << c)) {
                *x |= 1 << c;
                cost += self.weights[c];
            }
        }
        cost
    }

    fn run(&mut self) {
        let mut x = 0u128;
        let cost = self.settle_at(0, &mut x);
        self.dfs(0, x, cost);
    }

    fn dfs(&mut self, depth: usize, x: u128, cost: u64) {
        if cost > self.best {
            return;
        }
        if depth == self.free.len() {
            if cost < self.best {
                self.best = cost;
                self.witnesses.clear();
                self.count = 0;
            }
            self.count += 1;
            if self.witnesses.len() < self.cap {
                self.witnesses.push(x);
            }
            return;
        }
        let i = self.free[depth];
        for bit in [false, true] {
            let mut y = if bit { x | 1 << i } else { x };
            let mut c = cost + if bit { self.weights[i] } else { 0 };
            c += self.settle_at(depth + 1, &mut y);
            self.dfs(depth + 1, y, c);
        }
    }
}

/// Exact minimum of `obj` over the union of the charsets' zero sets.
pub fn minimize(r: &FeasibleSetResult, obj: &Objective, max_df: u32) -> Result<Optimum, OptimizeError> {
    minimize_capped(r, obj, max_df, DEFAULT_WITNESS_CAP)
}

pub fn minimize_capped(
    r: &FeasibleSetResult,
    obj: &Objective,
    max_df: u32,
    cap: usize,
) -> Result<Optimum, OptimizeError> {
    obj.check(r.n)?;
    if r.charsets.is_empty() {
        return Err(OptimizeError::Infeasible);
    }
    if let Some((index, t)) = r.charsets.iter().enumerate().find(|(_, t)| t.df() > max_df) {
        return Err(OptimizeError::DfTooLarge { index, df: t.df(), max_df });
    }
    let per: Vec<(u64, Vec<u128>, u64)> = r
        .charsets
        .par_iter()
        .map(|t| {
            let mut s = Search::new(t, &obj.weights, cap);
            s.run();
            (s.best, s.witnesses, s.count)
        })
        .collect();
    let value = per.iter().map(|p| p.0).min().expect("nonempty");
    let mut witnesses = Vec::new();
    let mut count = BigUint::zero();
    for (v, w, c) in per {
        if v == value {
            count += c;
            witnesses.extend(w.into_iter().take(cap - witnesses.len()).map(|x| Assignment::from_bits(x, r.n)));
        }
    }
    Ok(Optimum { value, witnesses, witness_count: count })
}

/// Feasibility through the oracle's rank and non-rank checks, plus the objective.
pub fn verify_assignment(p: &PolySystem, a: &Assignment, obj: &Objective) -> Result<(bool, u64), OptimizeError> {
    obj.check(p.n)?;
    if a.len() != p.n {
        return Err(OptimizeError::WeightCount { have: a.len(), want: p.n });
    }
    let x = a.to_bits();
    Ok((SystemOracle::new(p)?.is_feasible(x), obj.value(x)))
}

/// Definition of an auxiliary WCNF variable.
#[derive(Debug, Clone, PartialEq, Eq)]
enum AuxDef {
    And(Vec<i64>),
    Xor(i64, i64),
}

/// A weighted CNF encoding of one characteristic set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wcnf {
    pub num_vars: usize,
    pub n: usize,
    pub hard: Vec<Vec<i64>>,
    pub soft: Vec<(u64, Vec<i64>)>,
    pub top: u64,
    defs: Vec<AuxDef>,
}

impl Wcnf {
    /// Encodes `x_c + U = 0` for every equation. Variables `1..=n` are the
    /// x-variables; auxiliaries follow.
    pub fn encode(t: &CharSet, obj: &Objective) -> Wcnf {
        let n = t.total_vars();
        let mut w = Wcnf {
            num_vars: n,
            n,
            hard: Vec::new(),
            soft: Vec::new(),
            top: 1 + obj.weights.iter().sum::<u64>(),
            defs: Vec::new(),
        };
        for (c, tail) in t.solved_form() {
            let mut lits = vec![c.index() as i64];
            let mut parity = false;
            for m in tail.terms() {
                match m.degree() {
                    0 => parity ^= true,
                    1 => lits.push(m.vars().next().expect("degree one").index() as i64),
                    _ => lits.push(w.and(m.vars().map(|v| v.index() as i64).collect())),
                }
            }
            w.xor_equals(lits, parity);
        }
        for (i, &wt) in obj.weights.iter().enumerate() {
            if wt > 0 {
                w.soft.push((wt, vec![-(i as i64 + 1)]));
            }
        }
        w
    }

    fn fresh(&mut self, def: AuxDef) -> i64 {
        self.num_vars += 1;
        self.defs.push(def);
        self.num_vars as i64
    }

    fn and(&mut self, vars: Vec<i64>) -> i64 {
        let a = self.fresh(AuxDef::And(vars.clone()));
        for &v in &vars {
            self.hard.push(vec![-a, v]);
        }
        let mut big: Vec<i64> = vars.iter().map(|v| -v).collect();
        big.push(a);
        self.hard.push(big);
        a
    }

    /// Constrains the XOR of `lits` to `parity`, folding pairs into
    /// auxiliaries until at most three remain.
    fn xor_equals(&mut self, mut lits: Vec<i64>, parity: bool) {
        while lits.len() > 3 {
            let (a, b) = (lits[0], lits[1]);
            let t = self.fresh(AuxDef::Xor(a, b));
            self.xor_clauses(&[a, b, t], false);
            lits.splice(0..2, [t]);
        }
        self.xor_clauses(&lits, parity);
    }

    /// Forbids every assignment of `lits` whose parity differs from `parity`.
    fn xor_clauses(&mut self, lits: &[i64], parity: bool) {
        let k = lits.len();
        for s in 0u32..1 << k {
            if (s.count_ones() % 2 == 1) != parity {
                self.hard.push(lits.iter().enumerate().map(|(j, &l)| if s >> j & 1 == 1 { -l } else { l }).collect());
            }
        }
    }

    /// Extends an x-point to all variables by evaluating the definitions.
    pub fn extend(&self, x: u128) -> Vec<bool> {
        let mut val = vec![false; self.num_vars + 1];
        for (i, v) in val.iter_mut().enumerate().take(self.n + 1).skip(1) {
            *v = x >> (i - 1) & 1 == 1;
        }
        let lit = |val: &[bool], l: i64| val[l.unsigned_abs() as usize] == (l > 0);
        for (k, d) in self.defs.iter().enumerate() {
            val[self.n + k + 1] = match d {
                AuxDef::And(vs) => vs.iter().all(|&l| lit(&val, l)),
                AuxDef::Xor(a, b) => lit(&val, *a) ^ lit(&val, *b),
            };
        }
        val
    }

    /// True when `val` (indexed from 1) satisfies every hard clause.
    pub fn hard_satisfied(&self, val: &[bool]) -> bool {
        self.hard.iter().all(|cl| cl.iter().any(|&l| val[l.unsigned_abs() as usize] == (l > 0)))
    }

    /// Total weight of falsified soft clauses.
    pub fn cost(&self, val: &[bool]) -> u64 {
        self.soft
            .iter()
            .filter(|(_, cl)| !cl.iter().any(|&l| val[l.unsigned_abs() as usize] == (l > 0)))
            .map(|(w, _)| w)
            .sum()
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        let clauses = self.hard.len() + self.soft.len();
        writeln!(s, "p wcnf {} {} {}", self.num_vars, clauses, self.top).unwrap();
        for cl in &self.hard {
            write_clause(&mut s, self.top, cl);
        }
        for (w, cl) in &self.soft {
            write_clause(&mut s, *w, cl);
        }
        s
    }

    pub fn sidecar(&self) -> String {
        (1..=self.n).map(|i| format!("orig x{i} -> wcnf {i}\n")).collect()
    }
}

fn write_clause(s: &mut String, weight: u64, lits: &[i64]) {
    write!(s, "{weight}").unwrap();
    for l in lits {
        write!(s, " {l}").unwrap();
    }
    s.push_str(" 0\n");
}

/// Writes `charset_<k>.wcnf` and `charset_<k>.map` into `dir` for the
/// chosen charset, or for all of them.
pub fn export_wcnf(
    r: &FeasibleSetResult,
    obj: &Objective,
    target: Option<usize>,
    dir: &Path,
) -> Result<Vec<PathBuf>, OptimizeError> {
    obj.check(r.n)?;
    let indices: Vec<usize> = match target {
        Some(k) if k < r.charsets.len() => vec![k],
        Some(k) => return Err(OptimizeError::NoSuchCharset(k)),
        None => (0..r.charsets.len()).collect(),
    };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| OptimizeError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    for k in indices {
        let w = Wcnf::encode(&r.charsets[k], obj);
        let file = dir.join(format!("charset_{}.wcnf", k + 1));
        std::fs::write(&file, w.to_dimacs()).map_err(io(&file))?;
        let map = dir.join(format!("charset_{}.map", k + 1));
        std::fs::write(&map, w.sidecar()).map_err(io(&map))?;
        written.push(file);
    }
    Ok(written)
}
