//! Monic characteristic sets and the basic zero-orthogonal decomposition.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::boolpoly::{BoolPoly, CsOrder, CsoKeys, Monomial, PolyError, VarId, MAX_VARS};

/// Largest degree of freedom `enumerate_zeros` accepts without an explicit limit.
pub const ENUMERATION_BOUND: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharSetError {
    #[error("equation {0} is not monic")]
    NotMonic(String),
    #[error("leading variables must strictly increase (x{prev} then x{next})")]
    NotIncreasing { prev: usize, next: usize },
    #[error("tail of the x{lead} equation uses the led variable x{var}")]
    LedVariableInTail { lead: usize, var: usize },
    #[error("variable x{var} exceeds the context of {total} variables")]
    OutOfContext { var: usize, total: usize },
    #[error("enumeration too large: df {df} exceeds bound {bound}")]
    EnumerationTooLarge { df: u32, bound: u32 },
    #[error("enumeration budget of {0} points exceeded")]
    BudgetExceeded(u64),
    #[error("polynomial is not in the set")]
    NotInSet,
    #[error("cannot parse charset file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A monic triangular system `x_{c_1} + U_1, ..., x_{c_k} + U_k` with
/// `c_1 < ... < c_k` and every tail written in the free variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharSet {
    equations: Vec<BoolPoly>,
    total_vars: usize,
    n_split: usize,
}

impl CharSet {
    pub fn empty(total_vars: usize, n_split: usize) -> Self {
        CharSet { equations: Vec::new(), total_vars, n_split }
    }

    /// Validates and sorts the given equations by leading variable.
    pub fn new(mut equations: Vec<BoolPoly>, total_vars: usize, n_split: usize) -> Result<Self, CharSetError> {
        equations.retain(|e| !e.is_zero());
        let mut leads = Vec::with_capacity(equations.len());
        for e in &equations {
            let cf = e.canonical_form().map_err(|_| CharSetError::NotMonic(e.to_string()))?;
            if !cf.is_monic() {
                return Err(CharSetError::NotMonic(e.to_string()));
            }
            if cf.cls() > total_vars {
                return Err(CharSetError::OutOfContext { var: cf.cls(), total: total_vars });
            }
            leads.push(cf.cls());
        }
        let mut order: Vec<usize> = (0..equations.len()).collect();
        order.sort_by_key(|&i| leads[i]);
        let equations: Vec<BoolPoly> = order.iter().map(|&i| equations[i].clone()).collect();
        for w in order.windows(2) {
            if leads[w[0]] >= leads[w[1]] {
                return Err(CharSetError::NotIncreasing { prev: leads[w[0]], next: leads[w[1]] });
            }
        }
        let led_mask = order.iter().fold(0u128, |m, &i| m | 1u128 << (leads[i] - 1));
        for e in &equations {
            let lead = e.cls().expect("validated").index();
            let tail_support = e.support() & !(1u128 << (lead - 1));
            if tail_support & led_mask != 0 {
                let var = Monomial::from_bits(tail_support & led_mask).vars().next().unwrap();
                return Err(CharSetError::LedVariableInTail { lead, var: var.index() });
            }
        }
        Ok(CharSet { equations, total_vars, n_split })
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_sorted_unchecked(equations: Vec<BoolPoly>, total_vars: usize, n_split: usize) -> Self {
        CharSet { equations, total_vars, n_split }
    }

    pub fn equations(&self) -> &[BoolPoly] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn total_vars(&self) -> usize {
        self.total_vars
    }

    pub fn n_split(&self) -> usize {
        self.n_split
    }

    pub fn leading_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.equations.iter().map(|e| e.cls().expect("non-constant equation"))
    }

    fn led_mask(&self) -> u128 {
        self.leading_vars().fold(0, |m, v| m | Monomial::var(v).bits())
    }

    /// Degree of freedom: number of variables not led by any equation.
    pub fn df(&self) -> u32 {
        (self.total_vars - self.equations.len()) as u32
    }

    /// Free variables in ascending order.
    pub fn fvs(&self) -> Vec<VarId> {
        let led = self.led_mask();
        (1..=self.total_vars)
            .filter_map(|i| VarId::new(i).ok())
            .filter(|v| led & Monomial::var(*v).bits() == 0)
            .collect()
    }

    pub fn zero_count(&self) -> BigUint {
        BigUint::one() << self.df()
    }

    /// The equation `x_c + U` as the pair `(x_c, U)`.
    pub fn solved_form(&self) -> impl Iterator<Item = (VarId, BoolPoly)> + '_ {
        self.equations.iter().map(|e| {
            let v = e.cls().expect("non-constant equation");
            (v, e.add(&BoolPoly::var(v)))
        })
    }

    /// True when every `x_{n+j}` is led by an equation with tail exactly 0.
    pub fn is_admissible(&self) -> bool {
        let mut zero_tail = 0u128;
        for (v, tail) in self.solved_form() {
            if tail.is_zero() {
                zero_tail |= Monomial::var(v).bits();
            }
        }
        (self.n_split + 1..=self.total_vars).all(|i| zero_tail >> (i - 1) & 1 == 1)
    }

    /// Keeps the equations led by an x-variable and drops the rest of the context.
    pub fn truncate(&self) -> CharSet {
        let equations = self
            .equations
            .iter()
            .filter(|e| e.cls().map(|v| v.index() <= self.n_split).unwrap_or(false))
            .cloned()
            .collect();
        CharSet { equations, total_vars: self.n_split, n_split: self.n_split }
    }

    /// Membership test for a point given as a bit mask over `total_vars`.
    pub fn contains_point(&self, ones: u128) -> bool {
        self.equations.iter().all(|e| !e.eval_bits(ones))
    }

    /// Zeros as bit masks (bit `i - 1` is `x_i`), ordered by the free-variable counter.
    pub fn enumerate_zeros(&self, limit: Option<u64>) -> Result<impl Iterator<Item = u128> + '_, CharSetError> {
        let df = self.df();
        if limit.is_none() && df > ENUMERATION_BOUND {
            return Err(CharSetError::EnumerationTooLarge { df, bound: ENUMERATION_BOUND });
        }
        let free: Vec<u128> = self.fvs().into_iter().map(|v| Monomial::var(v).bits()).collect();
        let solved: Vec<(u128, BoolPoly)> = self.solved_form().map(|(v, t)| (Monomial::var(v).bits(), t)).collect();
        let total: u128 = if df >= 127 { u128::MAX } else { 1u128 << df };
        let cap = limit.map(|l| (l as u128).min(total)).unwrap_or(total);
        Ok((0..cap).map(move |counter| {
            let mut ones = 0u128;
            for (k, bit) in free.iter().enumerate() {
                if counter >> k & 1 == 1 {
                    ones |= bit;
                }
            }
            // tails only read free variables, so one pass suffices
            let base = ones;
            for (bit, tail) in &solved {
                if tail.eval_bits(base) {
                    ones |= bit;
                }
            }
            ones
        }))
    }

    /// Canonical sort key: length, then printed form.
    pub fn sort_key(&self) -> (usize, String) {
        (self.equations.len(), self.to_string())
    }
}

impl fmt::Display for CharSet {
    /// Equations one per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.equations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Sorts charsets by length, then printed form.
pub fn sort_canonically(charsets: &mut [CharSet]) {
    charsets.sort_by_cached_key(|t| t.sort_key());
}

/// Serializes charsets in the block text format.
pub fn write_charsets(charsets: &[CharSet]) -> String {
    let mut out = String::new();
    for (k, t) in charsets.iter().enumerate() {
        if k > 0 {
            out.push_str("----\n");
        }
        out.push_str(&format!("charset k={} df={}\n", k + 1, t.df()));
        for e in t.equations() {
            out.push_str(&e.to_string());
            out.push('\n');
        }
    }
    out
}

/// Parses the block text format produced by [`write_charsets`].
pub fn parse_charsets(text: &str, total_vars: usize, n_split: usize) -> Result<Vec<CharSet>, CharSetError> {
    let mut out = Vec::new();
    let mut current: Option<(usize, Vec<BoolPoly>)> = None;
    let flush = |cur: Option<(usize, Vec<BoolPoly>)>, out: &mut Vec<CharSet>| -> Result<(), CharSetError> {
        if let Some((line, eqs)) = cur {
            let t = CharSet::new(eqs, total_vars, n_split)
                .map_err(|e| CharSetError::Parse { line, reason: e.to_string() })?;
            out.push(t);
        }
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "----" {
            flush(current.take(), &mut out)?;
            continue;
        }
        if line.starts_with("charset") {
            flush(current.take(), &mut out)?;
            current = Some((line_no, Vec::new()));
            continue;
        }
        let poly: BoolPoly =
            line.parse().map_err(|e: PolyError| CharSetError::Parse { line: line_no, reason: e.to_string() })?;
        current.get_or_insert_with(|| (line_no, Vec::new())).1.push(poly);
    }
    flush(current, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    /// Zero-orthogonal.
    Zocd,
    /// Zero- and projection-orthogonal.
    Zxocd,
    /// Truncated feasible set description.
    Fss,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionResult {
    pub charsets: Vec<CharSet>,
    pub kind: DecompositionKind,
    pub n: usize,
    pub v: usize,
}

impl DecompositionResult {
    pub fn zero_count(&self) -> BigUint {
        self.charsets.iter().map(|t| t.zero_count()).fold(BigUint::zero(), |a, b| a + b)
    }
}

/// A pending branch of a decomposition.
#[derive(Debug, Clone, Default)]
pub struct Branch {
    /// Polynomials still to be processed (`Q`).
    pub pending: Vec<BoolPoly>,
    /// Resolved equations `x_c + U` (`T`).
    pub resolved: Vec<BoolPoly>,
    /// Initials decided so far, with `true` meaning `I = 1` was taken.
    pub provenance: Vec<(BoolPoly, bool)>,
}

/// Normalizes a working set: drops zeros and duplicates.
pub(crate) fn normalize(set: &mut Vec<BoolPoly>) {
    set.retain(|p| !p.is_zero());
    set.sort_unstable();
    set.dedup();
}

fn dedup_keep_zero(mut set: Vec<BoolPoly>) -> Vec<BoolPoly> {
    set.sort_unstable();
    set.dedup();
    set
}

/// Splits `f = I x_c + U` into the `I = 0` branch `{I, U}` and the `I = 1`
/// branch `{I + 1, x_c + U}`. Duplicates and zeros are dropped.
pub fn initial_decompose_poly(f: &BoolPoly) -> Result<(Vec<BoolPoly>, Vec<BoolPoly>), PolyError> {
    let cf = f.canonical_form()?;
    let mut t1 = vec![cf.initial.clone(), cf.tail.clone()];
    let mut t2 = vec![cf.initial.add_one(), BoolPoly::var(cf.leading_var).add(&cf.tail)];
    normalize(&mut t1);
    normalize(&mut t2);
    Ok((t1, t2))
}

/// `(Q0, Q1, {x_c + U})` from [`initial_decompose_set`].
pub type SplitSets = (Vec<BoolPoly>, Vec<BoolPoly>, Vec<BoolPoly>);

/// Three-way split of a set on `f`: `(Q0, Q1, {x_c + U})`, where `Q0` keeps
/// `I` and `U` and `Q1` carries `I + 1` with `x_c = U` substituted.
pub fn initial_decompose_set(q: &[BoolPoly], f: &BoolPoly) -> Result<SplitSets, CharSetError> {
    if !q.contains(f) {
        return Err(CharSetError::NotInSet);
    }
    let cf = f.canonical_form()?;
    let rest: Vec<BoolPoly> = q.iter().filter(|p| *p != f).cloned().collect();
    let mut q0 = rest.clone();
    q0.push(cf.initial.clone());
    q0.push(cf.tail.clone());
    let mut q1 = vec![cf.initial.add_one()];
    q1.extend(rest);
    let q1 = q1.iter().map(|p| p.substitute(cf.leading_var, &cf.tail)).collect::<Result<Vec<_>, _>>()?;
    let upart = vec![BoolPoly::var(cf.leading_var).add(&cf.tail)];
    Ok((dedup_keep_zero(q0), dedup_keep_zero(q1), upart))
}

/// Selection policy for [`bcs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectPolicy {
    Cso(CsOrder),
    /// Lowest class, then smallest printed form.
    LowestClass,
}

impl Default for SelectPolicy {
    fn default() -> Self {
        SelectPolicy::Cso(CsOrder::First)
    }
}

/// Picks the maximal polynomial under `policy`; ties go to the lowest class,
/// then the smallest printed form. Constants are skipped.
pub(crate) fn select<'a, I>(candidates: I, policy: SelectPolicy) -> Option<&'a BoolPoly>
where
    I: IntoIterator<Item = &'a BoolPoly>,
{
    let mut best: Option<(&BoolPoly, CsoKeys, String)> = None;
    for f in candidates {
        let Ok(keys) = CsoKeys::of(f) else { continue };
        let replace = match &best {
            None => true,
            Some((_, bk, bs)) => {
                let primary = match policy {
                    SelectPolicy::Cso(order) => keys.compare(bk, order),
                    SelectPolicy::LowestClass => std::cmp::Ordering::Equal,
                };
                match primary {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => match keys.cls.cmp(&bk.cls) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => f.to_string() < *bs,
                    },
                }
            }
        };
        if replace {
            let s = f.to_string();
            best = Some((f, keys, s));
        }
    }
    best.map(|(f, _, _)| f)
}

/// Substitutes `x_c = u` in every member of `set`.
pub(crate) fn substitute_all(set: &mut [BoolPoly], c: VarId, u: &BoolPoly) {
    for p in set.iter_mut() {
        if p.contains_var(c) {
            *p = p.substitute_unchecked(c, u);
        }
    }
}

/// Zero-orthogonal decomposition of `p` into monic characteristic sets over
/// `n + v` variables. On x̃-linear input the x-projections are also disjoint.
pub fn bcs(p: &[BoolPoly], n: usize, v: usize, policy: SelectPolicy) -> Result<DecompositionResult, CharSetError> {
    let total = n + v;
    for f in p {
        if let Some(c) = f.cls() {
            if c.index() > total {
                return Err(CharSetError::OutOfContext { var: c.index(), total });
            }
        }
    }
    let mut worklist = vec![Branch { pending: p.to_vec(), ..Default::default() }];
    let mut out = Vec::new();
    while let Some(mut branch) = worklist.pop() {
        let mut spawned = Vec::new();
        normalize(&mut branch.pending);
        let mut dead = branch.pending.iter().any(|f| f.is_one());
        while !dead && !branch.pending.is_empty() {
            let f = select(branch.pending.iter(), policy).expect("non-constant member").clone();
            let cf = f.canonical_form()?;
            branch.pending.retain(|g| *g != f);
            if !cf.is_monic() {
                let mut q0 = branch.pending.clone();
                q0.extend(branch.resolved.iter().cloned());
                q0.push(cf.initial.clone());
                q0.push(cf.tail.clone());
                let mut prov = branch.provenance.clone();
                prov.push((cf.initial.clone(), false));
                spawned.push(Branch { pending: q0, resolved: Vec::new(), provenance: prov });
                branch.pending.push(cf.initial.add_one());
                branch.provenance.push((cf.initial.clone(), true));
            }
            substitute_all(&mut branch.pending, cf.leading_var, &cf.tail);
            substitute_all(&mut branch.resolved, cf.leading_var, &cf.tail);
            branch.resolved.push(BoolPoly::var(cf.leading_var).add(&cf.tail));
            normalize(&mut branch.pending);
            dead = branch.pending.iter().any(|g| g.is_one()) || branch.resolved.iter().any(|g| g.is_one());
        }
        // LIFO: the most recent split is explored first
        worklist.extend(spawned);
        if !dead {
            let mut eqs = branch.resolved;
            eqs.retain(|e| !e.is_zero());
            eqs.sort_by_key(|e| e.cls());
            out.push(CharSet::from_sorted_unchecked(eqs, total, n));
        }
    }
    sort_canonically(&mut out);
    Ok(DecompositionResult { charsets: out, kind: DecompositionKind::Zxocd, n, v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthogonalityMode {
    /// Zero sets in the full space.
    Zero,
    /// Projections onto the x-variables.
    Projection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub points_checked: u64,
    /// First overlapping pair `(i, j)` with `i < j`, and the shared point.
    pub violation: Option<(usize, usize, u128)>,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks pairwise disjointness by enumerating every charset's zeros.
pub fn verify_orthogonal(
    r: &DecompositionResult,
    mode: OrthogonalityMode,
    budget: u64,
) -> Result<OrthogonalityReport, CharSetError> {
    let mut total: u64 = 0;
    for t in &r.charsets {
        let df = t.df();
        if df >= 63 {
            return Err(CharSetError::BudgetExceeded(budget));
        }
        total = total.saturating_add(1u64 << df);
        if total > budget {
            return Err(CharSetError::BudgetExceeded(budget));
        }
    }
    let mask: u128 = match mode {
        OrthogonalityMode::Zero => u128::MAX,
        OrthogonalityMode::Projection if r.n >= MAX_VARS => u128::MAX,
        OrthogonalityMode::Projection => (1u128 << r.n) - 1,
    };
    let mut owner: HashMap<u128, usize> = HashMap::new();
    let mut checked = 0u64;
    for (i, t) in r.charsets.iter().enumerate() {
        // a projection may repeat within one charset; only cross-charset hits count
        for z in t.enumerate_zeros(Some(u64::MAX))? {
            checked += 1;
            let key = z & mask;
            match owner.get(&key) {
                Some(&j) if j != i => {
                    return Ok(OrthogonalityReport { points_checked: checked, violation: Some((j, i, key)) })
                }
                Some(_) => {}
                None => {
                    owner.insert(key, i);
                }
            }
        }
    }
    Ok(OrthogonalityReport { points_checked: checked, violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    fn ps(items: &[&str]) -> Vec<BoolPoly> {
        let mut v: Vec<BoolPoly> = items.iter().map(|s| p(s)).collect();
        v.sort();
        v
    }

    fn cs(items: &[&str], total: usize, n: usize) -> CharSet {
        CharSet::new(items.iter().map(|s| p(s)).collect(), total, n).unwrap()
    }

    #[test]
    fn initial_decompose_poly_examples() {
        let (t1, t2) = initial_decompose_poly(&p("x2*x3 + x1 + 1")).unwrap();
        assert_eq!(t1, ps(&["x2", "x1 + 1"]));
        assert_eq!(t2, ps(&["x2 + 1", "x3 + x1 + 1"]));
        let (t1, t2) = initial_decompose_poly(&p("x1*x4 + x1")).unwrap();
        assert_eq!(t1, ps(&["x1"]));
        assert_eq!(t2, ps(&["x1 + 1", "x4 + x1"]));
        let (t1, t2) = initial_decompose_poly(&p("x5")).unwrap();
        assert_eq!(t1, ps(&["1"]));
        assert_eq!(t2, ps(&["x5"]));
        assert!(initial_decompose_poly(&BoolPoly::one()).is_err());
    }

    #[test]
    fn initial_decompose_set_examples() {
        let q = ps(&["x2*x3 + x1 + 1", "x1*x2*x4 + x1"]);
        let (q0, q1, u) = initial_decompose_set(&q, &p("x2*x3 + x1 + 1")).unwrap();
        assert_eq!(q0, ps(&["x2", "x1 + 1", "x1*x2*x4 + x1"]));
        assert_eq!(u, ps(&["x3 + x1 + 1"]));
        assert_eq!(q1, ps(&["x2 + 1", "x1*x2*x4 + x1"]));

        let (q0, q1, u) = initial_decompose_set(&ps(&["x1*x4 + x1"]), &p("x1*x4 + x1")).unwrap();
        assert_eq!(q0, ps(&["x1"]));
        assert_eq!(u, ps(&["x4 + x1"]));
        assert_eq!(q1, ps(&["x1 + 1"]));

        let (q0, q1, u) = initial_decompose_set(&ps(&["x1"]), &p("x1")).unwrap();
        assert!(q0.iter().any(|f| f.is_one()));
        assert_eq!(u, ps(&["x1"]));
        assert_eq!(q1, vec![BoolPoly::zero()]);

        assert_eq!(initial_decompose_set(&ps(&["x1"]), &p("x2")), Err(CharSetError::NotInSet));
    }

    #[test]
    fn bcs_two_branch_example() {
        let r = bcs(&ps(&["x2*x3 + x1 + 1", "x1*x2*x4 + x1"]), 4, 0, SelectPolicy::default()).unwrap();
        assert_eq!(
            r.charsets,
            vec![cs(&["x1", "x2 + 1", "x3 + 1"], 4, 4), cs(&["x1 + 1", "x2 + 1", "x3", "x4 + 1"], 4, 4)]
        );
    }

    #[test]
    fn bcs_degenerate_inputs() {
        let r = bcs(&[], 3, 0, SelectPolicy::default()).unwrap();
        assert_eq!(r.charsets, vec![CharSet::empty(3, 3)]);
        let r = bcs(&[BoolPoly::one()], 3, 0, SelectPolicy::default()).unwrap();
        assert!(r.charsets.is_empty());
    }

    #[test]
    fn counting_and_enumeration() {
        let t = cs(&["x1", "x2 + 1", "x3 + 1"], 4, 4);
        assert_eq!(t.df(), 1);
        assert_eq!(t.fvs(), vec![VarId::new(4).unwrap()]);
        assert_eq!(t.zero_count(), BigUint::from(2u32));
        let zs: Vec<u128> = t.enumerate_zeros(None).unwrap().collect();
        assert_eq!(zs, vec![0b0110, 0b1110]);

        let t = cs(&["x1 + 1", "x2 + 1", "x3", "x4 + 1"], 4, 4);
        assert_eq!(t.enumerate_zeros(None).unwrap().collect::<Vec<_>>(), vec![0b1011]);

        let t = CharSet::empty(1, 1);
        assert_eq!(t.enumerate_zeros(None).unwrap().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(CharSet::empty(70, 70).zero_count(), BigUint::one() << 70u32);
        assert!(matches!(CharSet::empty(30, 30).enumerate_zeros(None), Err(CharSetError::EnumerationTooLarge { .. })));
        assert_eq!(CharSet::empty(30, 30).enumerate_zeros(Some(5)).unwrap().count(), 5);
    }

    #[test]
    fn admissibility_and_truncation() {
        let t = cs(&["x1", "x2 + 1", "x3 + 1", "x4 + 1", "x5 + 1", "x6 + 1", "x7", "x8", "x9"], 9, 6);
        assert!(t.is_admissible());
        assert_eq!(t.truncate(), cs(&["x1", "x2 + 1", "x3 + 1", "x4 + 1", "x5 + 1", "x6 + 1"], 6, 6));
        let t = cs(&["x3 + 1", "x6 + 1", "x7", "x9 + x2*x8"], 9, 6);
        assert!(!t.is_admissible());
        let t = cs(&["x1", "x7", "x8"], 9, 6);
        assert!(!t.is_admissible());
        assert!(CharSet::empty(4, 4).is_admissible());
        assert_eq!(CharSet::empty(4, 4).truncate(), CharSet::empty(4, 4));
    }

    #[test]
    fn validation_rejects_malformed_sets() {
        assert!(matches!(CharSet::new(vec![p("x1*x2 + 1")], 3, 3), Err(CharSetError::NotMonic(_))));
        assert!(matches!(
            CharSet::new(vec![p("x2 + x1"), p("x1 + 1")], 3, 3),
            Err(CharSetError::LedVariableInTail { lead: 2, var: 1 })
        ));
        assert!(matches!(CharSet::new(vec![p("x2 + x1"), p("x2")], 3, 3), Err(CharSetError::NotIncreasing { .. })));
        assert!(matches!(CharSet::new(vec![p("x5")], 3, 3), Err(CharSetError::OutOfContext { .. })));
    }

    #[test]
    fn orthogonality_checks() {
        let r = bcs(&ps(&["x2*x3 + x1 + 1", "x1*x2*x4 + x1"]), 4, 0, SelectPolicy::default()).unwrap();
        assert!(verify_orthogonal(&r, OrthogonalityMode::Zero, 1 << 10).unwrap().passed());
        let t = cs(&["x1", "x2 + 1"], 3, 3);
        let dup = DecompositionResult { charsets: vec![t.clone(), t], kind: DecompositionKind::Zocd, n: 3, v: 0 };
        let rep = verify_orthogonal(&dup, OrthogonalityMode::Zero, 1 << 10).unwrap();
        assert_eq!(rep.violation.map(|(i, j, _)| (i, j)), Some((0, 1)));
        assert!(matches!(verify_orthogonal(&dup, OrthogonalityMode::Zero, 2), Err(CharSetError::BudgetExceeded(2))));
    }

    #[test]
    fn text_format_round_trip() {
        let ts = vec![cs(&["x1", "x2 + 1", "x3 + 1"], 4, 4), cs(&["x1 + 1", "x4 + x2*x3"], 4, 4)];
        let text = write_charsets(&ts);
        assert!(text.starts_with("charset k=1 df=1\nx1\nx2 + 1\nx3 + 1\n----\ncharset k=2 df=2\n"));
        assert_eq!(parse_charsets(&text, 4, 4).unwrap(), ts);
        assert!(matches!(parse_charsets("charset k=1 df=0\nx1 +\n", 4, 4), Err(CharSetError::Parse { line: 2, .. })));
    }
}
