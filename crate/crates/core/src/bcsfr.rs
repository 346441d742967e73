//! Feasible-set decomposition for full-rank constraint systems and its
//! incremental driver.
//!
//! The engine works on x̃-linear systems over `n` x-variables and `v`
//! auxiliary ζ variables. A branch is kept in two working sets: `q`, the
//! polynomials still to process, and `t`, the solved equations `x_c + U`.
//! Substitution is eager, so no variable led in `t` occurs anywhere else.
//!
//! Branches that cannot end with every ζ forced to zero are pruned early:
//! a ζ equation that became `x_k + 1`, or a ζ level that no polynomial can
//! lead any more.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::boolpoly::{BoolPoly, CsOrder, Monomial, PolyError, VarId, MAX_VARS};
use crate::charset::{normalize, select, sort_canonically, substitute_all, CharSet, SelectPolicy};
use crate::coding::system::{mask_upto, PolySystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BcsfrError {
    #[error("input is not x̃-linear: {0}")]
    NotTildeLinear(String),
    #[error("parts disagree on the number of x-variables ({0} vs {1})")]
    MismatchedN(usize, usize),
    #[error("single-shot decomposition needs n + v <= {MAX_VARS}, got {0}; use the incremental driver")]
    TooWide(usize),
    #[error("no non-constant polynomial to choose from")]
    NothingToChoose,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Selection among monic polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChoosePolicy {
    /// Lowest class, then smallest printed form.
    #[default]
    Det,
    Cso1,
    Cso2,
    /// Uniform among candidates, from a seeded stream.
    Random(u64),
}

impl std::str::FromStr for ChoosePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "det0" | "det" => Ok(ChoosePolicy::Det),
            "cso1" => Ok(ChoosePolicy::Cso1),
            "cso2" => Ok(ChoosePolicy::Cso2),
            _ => match s.strip_prefix("rand:") {
                Some(seed) => seed.parse().map(ChoosePolicy::Random).map_err(|_| format!("bad seed in {s:?}")),
                None => Err(format!("unknown choose policy {s:?} (expected cso1, cso2, det0 or rand:<seed>)")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    #[default]
    Dfs,
    Bfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BcsfrConfig {
    pub choose_policy_monic: ChoosePolicy,
    pub enable_fast_monomial_path: bool,
    pub branch_order: BranchOrder,
    pub trace: bool,
}

impl Default for BcsfrConfig {
    fn default() -> Self {
        BcsfrConfig {
            choose_policy_monic: ChoosePolicy::Det,
            enable_fast_monomial_path: true,
            branch_order: BranchOrder::Dfs,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BcsfrStats {
    pub branches: u64,
    pub splits: u64,
    pub fast_paths: u64,
    pub pruned_contradiction: u64,
    pub pruned_tilde_one: u64,
    pub pruned_level_gap: u64,
    pub inadmissible: u64,
    pub emitted: u64,
    /// Non-monic selections whose initial involves an x̃ variable.
    pub tilde_initials: u64,
}

impl BcsfrStats {
    fn absorb(&mut self, o: &BcsfrStats) {
        self.branches += o.branches;
        self.splits += o.splits;
        self.fast_paths += o.fast_paths;
        self.pruned_contradiction += o.pruned_contradiction;
        self.pruned_tilde_one += o.pruned_tilde_one;
        self.pruned_level_gap += o.pruned_level_gap;
        self.inadmissible += o.inadmissible;
        self.emitted += o.emitted;
        self.tilde_initials += o.tilde_initials;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSetResult {
    /// Truncated charsets over the x-variables, canonically sorted.
    pub charsets: Vec<CharSet>,
    pub n: usize,
    pub solution_count: BigUint,
    pub stats: BcsfrStats,
    pub trace: Vec<String>,
}

impl FeasibleSetResult {
    pub fn from_charsets(mut charsets: Vec<CharSet>, n: usize) -> Self {
        sort_canonically(&mut charsets);
        let solution_count = charsets.iter().map(|t| t.zero_count()).fold(BigUint::zero(), |a, b| a + b);
        FeasibleSetResult { charsets, n, solution_count, stats: BcsfrStats::default(), trace: Vec::new() }
    }
}

/// Which selection rule of the algorithm to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChooseMode {
    /// Among monic polynomials: the deterministic surrogate policy.
    Monic,
    First,
    Second,
}

/// Picks a non-constant member of `q` according to `mode`.
pub fn choose(q: &[BoolPoly], mode: ChooseMode) -> Result<BoolPoly, BcsfrError> {
    let policy = match mode {
        ChooseMode::Monic => SelectPolicy::LowestClass,
        ChooseMode::First => SelectPolicy::Cso(CsOrder::First),
        ChooseMode::Second => SelectPolicy::Cso(CsOrder::Second),
    };
    select(q.iter(), policy).cloned().ok_or(BcsfrError::NothingToChoose)
}

/// `x_c + U` is monic exactly when the smallest term holding `x_c` is `x_c`
/// itself; with descending term order that term comes first.
#[inline]
fn is_monic(f: &BoolPoly) -> bool {
    f.terms().first().map(|m| m.bits().is_power_of_two()).unwrap_or(false)
        && f.terms().get(1).map(|m| m.bits() < f.terms()[0].bits()).unwrap_or(true)
}

enum Outcome {
    Emit(CharSet),
    Pruned,
}

struct Engine<'a> {
    n: usize,
    total: usize,
    cfg: &'a BcsfrConfig,
    rng: Option<ChaCha8Rng>,
    stats: BcsfrStats,
    trace: Vec<String>,
}

impl<'a> Engine<'a> {
    fn new(n: usize, v: usize, cfg: &'a BcsfrConfig, stream: u64) -> Self {
        let rng = match cfg.choose_policy_monic {
            ChoosePolicy::Random(seed) => {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(stream);
                Some(r)
            }
            _ => None,
        };
        Engine { n, total: n + v, cfg, rng, stats: BcsfrStats::default(), trace: Vec::new() }
    }

    fn log(&mut self, line: impl FnOnce() -> String) {
        if self.cfg.trace {
            self.trace.push(line());
        }
    }

    fn choose_monic<'q>(&mut self, q: &'q [BoolPoly]) -> Option<&'q BoolPoly> {
        let monic = q.iter().filter(|f| is_monic(f));
        match self.cfg.choose_policy_monic {
            ChoosePolicy::Det => select(monic, SelectPolicy::LowestClass),
            ChoosePolicy::Cso1 => select(monic, SelectPolicy::Cso(CsOrder::First)),
            ChoosePolicy::Cso2 => select(monic, SelectPolicy::Cso(CsOrder::Second)),
            ChoosePolicy::Random(_) => {
                // q is kept sorted, so the candidate order is reproducible
                let cands: Vec<&BoolPoly> = monic.collect();
                if cands.is_empty() {
                    return None;
                }
                let i = self.rng.as_mut().expect("seeded").gen_range(0..cands.len());
                Some(cands[i])
            }
        }
    }

    fn tilde_one(&self, t: &[BoolPoly]) -> bool {
        t.iter().any(|e| {
            e.term_count() == 2
                && e.terms()[1].is_one()
                && e.terms()[0].degree() == 1
                && e.cls().map(|v| v.index() > self.n).unwrap_or(false)
        })
    }

    /// Returns the prune reason, if any.
    fn dead(&self, q: &[BoolPoly], t: &[BoolPoly]) -> Option<&'static str> {
        if q.iter().any(|f| f.is_one()) || t.iter().any(|f| f.is_one()) {
            Some("contradiction")
        } else if self.tilde_one(t) {
            Some("tilde-one")
        } else {
            None
        }
    }

    fn prune(&mut self, reason: &'static str) -> Outcome {
        match reason {
            "contradiction" => self.stats.pruned_contradiction += 1,
            "tilde-one" => self.stats.pruned_tilde_one += 1,
            _ => self.stats.pruned_level_gap += 1,
        }
        self.log(|| format!("PRUNE reason={reason}"));
        Outcome::Pruned
    }

    fn eliminate(q: &mut Vec<BoolPoly>, t: &mut Vec<BoolPoly>, c: VarId, u: &BoolPoly) {
        substitute_all(q, c, u);
        substitute_all(t, c, u);
        t.push(BoolPoly::var(c).add(u));
        normalize(q);
    }

    fn run(&mut self, input: Vec<BoolPoly>) -> Vec<CharSet> {
        let mut worklist: VecDeque<Vec<BoolPoly>> = VecDeque::from([input]);
        let mut out = Vec::new();
        while let Some(q) = match self.cfg.branch_order {
            BranchOrder::Dfs => worklist.pop_back(),
            BranchOrder::Bfs => worklist.pop_front(),
        } {
            self.stats.branches += 1;
            if let Outcome::Emit(t) = self.branch(q, &mut worklist) {
                self.stats.emitted += 1;
                self.log(|| format!("EMIT df={}", t.df()));
                out.push(t);
            }
        }
        out
    }

    fn branch(&mut self, mut q: Vec<BoolPoly>, worklist: &mut VecDeque<Vec<BoolPoly>>) -> Outcome {
        normalize(&mut q);
        let mut t: Vec<BoolPoly> = Vec::new();
        if q.iter().any(|f| f.is_one()) {
            return self.prune("contradiction");
        }
        loop {
            // reduction by monic polynomials
            while let Some(f) = self.choose_monic(&q).cloned() {
                let c = f.cls().expect("monic polynomial");
                let u = f.add(&BoolPoly::var(c));
                q.retain(|g| *g != f);
                Self::eliminate(&mut q, &mut t, c, &u);
                if let Some(reason) = self.dead(&q, &t) {
                    return self.prune(reason);
                }
            }
            if q.is_empty() {
                break;
            }
            let f = match self.select_next(&q, &t) {
                Some(f) => f,
                None => return self.prune("level-gap"),
            };
            let cf = f.canonical_form().expect("non-constant selection");
            let (c, init, tail) = (cf.leading_var, cf.initial, cf.tail);
            q.retain(|g| *g != f);
            if !init.is_one() {
                self.stats.splits += 1;
                if init.support() & !mask_upto(self.n) != 0 {
                    self.stats.tilde_initials += 1;
                }
                self.log(|| format!("SPLIT var={} I={}", c.index(), init));
            }
            let single_monomial = init.term_count() == 1 && !init.is_one();
            if self.cfg.enable_fast_monomial_path && tail.is_one() && single_monomial {
                self.stats.fast_paths += 1;
                for k in init.terms()[0].vars() {
                    Self::eliminate(&mut q, &mut t, k, &BoolPoly::one());
                }
            } else if !init.is_one() {
                if !tail.is_one() {
                    let mut sibling = q.clone();
                    sibling.extend(t.iter().cloned());
                    sibling.push(init.clone());
                    sibling.push(tail.clone());
                    worklist.push_back(sibling);
                }
                q.push(init.add_one());
            }
            Self::eliminate(&mut q, &mut t, c, &tail);
            if let Some(reason) = self.dead(&q, &t) {
                return self.prune(reason);
            }
        }
        t.sort_by_key(|e| e.cls());
        let full = CharSet::from_sorted_unchecked(t, self.total, self.n);
        if full.is_admissible() {
            Outcome::Emit(full.truncate())
        } else {
            self.stats.inadmissible += 1;
            Outcome::Pruned
        }
    }

    /// Next polynomial to split on, or `None` when a ζ level can no longer be led.
    fn select_next(&self, q: &[BoolPoly], t: &[BoolPoly]) -> Option<BoolPoly> {
        let n = self.n;
        let low = q.iter().filter(|f| f.cls().map(|v| v.index() <= n).unwrap_or(false));
        if let Some(f) = select(low, SelectPolicy::Cso(CsOrder::First)) {
            return Some(f.clone());
        }
        let led: u128 = t.iter().filter_map(|e| e.cls()).fold(0, |m, v| m | Monomial::var(v).bits());
        for k in (n + 1..=self.total).rev() {
            if led >> (k - 1) & 1 == 1 {
                continue;
            }
            let level = q.iter().filter(|f| f.cls().map(|v| v.index() == k).unwrap_or(false));
            return select(level, SelectPolicy::Cso(CsOrder::Second)).cloned();
        }
        None
    }
}

fn check_input(p: &PolySystem) -> Result<(), BcsfrError> {
    match p.tilde_linear_violation() {
        Some(msg) => Err(BcsfrError::NotTildeLinear(msg)),
        None => Ok(()),
    }
}

/// Decomposes the feasible set of `p` into truncated characteristic sets.
pub fn bcsfr(p: &PolySystem, cfg: &BcsfrConfig) -> Result<FeasibleSetResult, BcsfrError> {
    check_input(p)?;
    let mut engine = Engine::new(p.n, p.v, cfg, 0);
    let charsets = engine.run(p.all_polys().map_err(|_| BcsfrError::TooWide(p.n + p.v))?);
    let mut r = FeasibleSetResult::from_charsets(charsets, p.n);
    r.stats = engine.stats;
    r.trace = engine.trace;
    Ok(r)
}

/// Folds [`bcsfr`] over the parts: each charset of the previous round is
/// joined with the next part and decomposed again.
pub fn inc_bcsfr(parts: &[PolySystem], cfg: &BcsfrConfig) -> Result<FeasibleSetResult, BcsfrError> {
    let Some(first) = parts.first() else {
        return Err(BcsfrError::NothingToChoose);
    };
    let n = first.n;
    for p in parts {
        if p.n != n {
            return Err(BcsfrError::MismatchedN(n, p.n));
        }
        check_input(p)?;
    }
    let mut current = vec![CharSet::empty(n, n)];
    let mut stats = BcsfrStats::default();
    let mut trace = Vec::new();
    for (round, part) in parts.iter().enumerate() {
        let polys = part.all_polys()?;
        let results: Vec<(Vec<CharSet>, BcsfrStats, Vec<String>)> = current
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let mut input = polys.clone();
                input.extend(t.equations().iter().cloned());
                let stream = ((round as u64) << 32) | i as u64;
                let mut engine = Engine::new(n, part.v, cfg, stream);
                let out = engine.run(input);
                (out, engine.stats, engine.trace)
            })
            .collect();
        let mut next = Vec::new();
        for (out, s, tr) in results {
            next.extend(out);
            stats.absorb(&s);
            trace.extend(tr);
        }
        sort_canonically(&mut next);
        current = next;
        if current.is_empty() {
            break;
        }
    }
    let mut r = FeasibleSetResult::from_charsets(current, n);
    r.stats = stats;
    r.trace = trace;
    Ok(r)
}
