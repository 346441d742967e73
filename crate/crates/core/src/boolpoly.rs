//! Multilinear polynomials over GF(2) in algebraic normal form.
//!
//! A [`Monomial`] is a set of variables packed into a 128-bit word (bit `i - 1`
//! stands for `x_i`), so idempotent products are a single `|`. A [`BoolPoly`]
//! is a sorted, duplicate-free list of monomials. Terms are kept in descending
//! numeric order of their words, which is the same as descending leading
//! variable, then lexicographically descending variable sets, with the
//! constant monomial last.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest variable index a monomial can hold.
pub const MAX_VARS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("no leading variable: polynomial is the constant {0}")]
    Constant(u8),
    #[error("non-triangular substitution: replacement for x{0} contains x{0}")]
    NonTriangular(usize),
    #[error("variable x{0} is not assigned")]
    Unassigned(usize),
    #[error("variable index {0} out of range 1..={MAX_VARS}")]
    VarOutOfRange(usize),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A 1-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    pub fn new(index: usize) -> Result<Self, PolyError> {
        if index == 0 || index > MAX_VARS {
            return Err(PolyError::VarOutOfRange(index));
        }
        Ok(VarId(index as u32))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    fn bit(self) -> u128 {
        1u128 << (self.0 - 1)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A product of distinct variables. The empty product is the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_bits(bits: u128) -> Self {
        Monomial(bits)
    }

    pub fn var(v: VarId) -> Self {
        Monomial(v.bit())
    }

    pub fn from_vars<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        Monomial(vars.into_iter().fold(0, |acc, v| acc | v.bit()))
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, v: VarId) -> bool {
        self.0 & v.bit() != 0
    }

    /// Highest variable in the monomial.
    pub fn leading(self) -> Option<VarId> {
        if self.0 == 0 {
            None
        } else {
            Some(VarId(128 - self.0.leading_zeros()))
        }
    }

    /// Idempotent product: `x * x = x`.
    pub fn product(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    pub fn without(self, v: VarId) -> Monomial {
        Monomial(self.0 & !v.bit())
    }

    /// Variables in ascending index order.
    pub fn vars(self) -> impl Iterator<Item = VarId> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let tz = rest.trailing_zeros();
            rest &= rest - 1;
            Some(VarId(tz + 1))
        })
    }

    /// True when every variable of the monomial is set in `ones`.
    #[inline]
    pub fn eval_bits(self, ones: u128) -> bool {
        self.0 & !ones == 0
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// A Boolean polynomial in algebraic normal form.
///
/// Immutable after construction; every operation returns a reduced polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BoolPoly {
    // strictly descending
    terms: Vec<Monomial>,
}

impl PartialOrd for BoolPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BoolPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        // leading terms first; longer polynomial wins on a common prefix
        self.terms.cmp(&other.terms)
    }
}

impl BoolPoly {
    pub fn zero() -> Self {
        BoolPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        BoolPoly { terms: vec![Monomial::ONE] }
    }

    pub fn constant(value: bool) -> Self {
        if value {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn var(v: VarId) -> Self {
        BoolPoly { terms: vec![Monomial::var(v)] }
    }

    /// `x_index`; panics on an index outside `1..=MAX_VARS`.
    pub fn x(index: usize) -> Self {
        Self::var(VarId::new(index).expect("variable index in range"))
    }

    pub fn monomial(m: Monomial) -> Self {
        BoolPoly { terms: vec![m] }
    }

    /// Builds a polynomial from arbitrary terms; repeated monomials cancel in pairs.
    pub fn from_terms<I: IntoIterator<Item = Monomial>>(terms: I) -> Self {
        let mut terms: Vec<Monomial> = terms.into_iter().collect();
        Self::reduce(&mut terms);
        BoolPoly { terms }
    }

    fn reduce(terms: &mut Vec<Monomial>) {
        terms.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = 0;
        let mut i = 0;
        while i < terms.len() {
            let m = terms[i];
            let mut j = i + 1;
            while j < terms.len() && terms[j] == m {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                terms[out] = m;
                out += 1;
            }
            i = j;
        }
        terms.truncate(out);
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || self.is_one()
    }

    /// Total degree; 0 for constants.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Union of all variables as a bit mask.
    pub fn support(&self) -> u128 {
        self.terms.iter().fold(0, |acc, m| acc | m.0)
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.support() & v.bit() != 0
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        Monomial(self.support()).vars()
    }

    /// Class of the polynomial: the highest variable index occurring in it.
    pub fn cls(&self) -> Option<VarId> {
        // the first term carries the highest top bit
        self.terms.first().and_then(|m| m.leading())
    }

    pub fn add(&self, other: &BoolPoly) -> BoolPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        BoolPoly { terms: out }
    }

    pub fn add_one(&self) -> BoolPoly {
        self.add(&BoolPoly::one())
    }

    pub fn mul(&self, other: &BoolPoly) -> BoolPoly {
        if self.is_zero() || other.is_zero() {
            return BoolPoly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.product(*b));
            }
        }
        Self::reduce(&mut terms);
        BoolPoly { terms }
    }

    pub fn mul_monomial(&self, m: Monomial) -> BoolPoly {
        if m.is_one() {
            return self.clone();
        }
        Self::from_terms(self.terms.iter().map(|t| t.product(m)))
    }

    /// Splits `self = cofactor * x_v + rest` with neither part containing `x_v`.
    pub fn split_on(&self, v: VarId) -> (BoolPoly, BoolPoly) {
        let mut with = Vec::new();
        let mut rest = Vec::new();
        for m in &self.terms {
            if m.contains(v) {
                with.push(m.without(v));
            } else {
                rest.push(*m);
            }
        }
        // removing x_v can break ordering and create duplicates
        Self::reduce(&mut with);
        (BoolPoly { terms: with }, BoolPoly { terms: rest })
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm, PolyError> {
        let leading_var = match self.cls() {
            Some(v) => v,
            None => return Err(PolyError::Constant(self.is_one() as u8)),
        };
        let (initial, tail) = self.split_on(leading_var);
        Ok(CanonicalForm { initial, leading_var, tail })
    }

    /// Replaces every `x_v` by `u`. `u` must not itself contain `x_v`.
    pub fn substitute(&self, v: VarId, u: &BoolPoly) -> Result<BoolPoly, PolyError> {
        if u.contains_var(v) {
            return Err(PolyError::NonTriangular(v.index()));
        }
        Ok(self.substitute_unchecked(v, u))
    }

    pub(crate) fn substitute_unchecked(&self, v: VarId, u: &BoolPoly) -> BoolPoly {
        if self.support() & v.bit() == 0 {
            return self.clone();
        }
        let (cofactor, rest) = self.split_on(v);
        cofactor.mul(u).add(&rest)
    }

    /// Applies a variable renaming. The map must be injective on the support.
    pub fn rename<F: Fn(VarId) -> VarId>(&self, f: F) -> BoolPoly {
        Self::from_terms(self.terms.iter().map(|m| Monomial::from_vars(m.vars().map(&f))))
    }

    /// Evaluates with every variable set in `ones` equal to 1 and all others 0.
    #[inline]
    pub fn eval_bits(&self, ones: u128) -> bool {
        self.terms.iter().filter(|m| m.eval_bits(ones)).count() % 2 == 1
    }

    /// Evaluates under an explicit assignment that must cover every variable.
    pub fn evaluate(&self, assignment: &HashMap<VarId, bool>) -> Result<bool, PolyError> {
        let mut ones = 0u128;
        for v in self.vars() {
            match assignment.get(&v) {
                Some(true) => ones |= v.bit(),
                Some(false) => {}
                None => return Err(PolyError::Unassigned(v.index())),
            }
        }
        Ok(self.eval_bits(ones))
    }
}

impl fmt::Display for BoolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for BoolPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PolyError::Parse { text: s.to_string(), reason: reason.to_string() };
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms = Vec::new();
        for term in trimmed.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let mut m = Monomial::ONE;
            let mut zero = false;
            for factor in term.split('*') {
                let factor = factor.trim();
                match factor {
                    "1" => {}
                    "0" => zero = true,
                    _ => {
                        let digits = factor.strip_prefix('x').ok_or_else(|| err(&format!("bad factor {factor:?}")))?;
                        let idx: usize = digits.parse().map_err(|_| err(&format!("bad variable {factor:?}")))?;
                        m = m.product(Monomial::var(VarId::new(idx)?));
                    }
                }
            }
            if !zero {
                terms.push(m);
            }
        }
        Ok(BoolPoly::from_terms(terms))
    }
}

/// `f = initial * x_c + tail`, where `x_c` is the leading variable of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub initial: BoolPoly,
    pub leading_var: VarId,
    pub tail: BoolPoly,
}

impl CanonicalForm {
    /// Total degree of the initial.
    pub fn tdeg(&self) -> u32 {
        self.initial.degree()
    }

    pub fn initial_terms(&self) -> usize {
        self.initial.term_count()
    }

    pub fn tail_terms(&self) -> usize {
        self.tail.term_count()
    }

    pub fn cls(&self) -> usize {
        self.leading_var.index()
    }

    pub fn is_monic(&self) -> bool {
        self.initial.is_one()
    }

    pub fn reconstruct(&self) -> BoolPoly {
        self.initial.mul(&BoolPoly::var(self.leading_var)).add(&self.tail)
    }

    fn keys(&self) -> CsoKeys {
        CsoKeys {
            cls: self.cls(),
            tdeg: self.tdeg(),
            initial_terms: self.initial_terms(),
            tail_terms: self.tail_terms(),
        }
    }
}

/// Which characteristic-set order to compare under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsOrder {
    /// Prefers simple initials; the class only breaks the last tie.
    First,
    /// Prefers the highest class, then simple initials.
    Second,
}

/// Outcome of comparing two polynomials under a CS order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsoOrdering {
    Greater,
    Less,
    Equivalent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct CsoKeys {
    pub cls: usize,
    pub tdeg: u32,
    pub initial_terms: usize,
    pub tail_terms: usize,
}

impl CsoKeys {
    pub(crate) fn of(f: &BoolPoly) -> Result<CsoKeys, PolyError> {
        Ok(f.canonical_form()?.keys())
    }

    /// `Greater` means `self` is preferred (`self ≻ other`).
    pub(crate) fn compare(&self, other: &CsoKeys, order: CsOrder) -> Ordering {
        use std::cmp::Reverse;
        match order {
            CsOrder::First => (Reverse(self.tdeg), Reverse(self.initial_terms), Reverse(self.tail_terms), self.cls)
                .cmp(&(Reverse(other.tdeg), Reverse(other.initial_terms), Reverse(other.tail_terms), other.cls)),
            CsOrder::Second => (self.cls, Reverse(self.tdeg), Reverse(self.initial_terms), Reverse(self.tail_terms))
                .cmp(&(other.cls, Reverse(other.tdeg), Reverse(other.initial_terms), Reverse(other.tail_terms))),
        }
    }
}

/// Compares `f` and `g` under the first or second CS order.
pub fn compare_cso(f: &BoolPoly, g: &BoolPoly, order: CsOrder) -> Result<CsoOrdering, PolyError> {
    let (a, b) = (CsoKeys::of(f)?, CsoKeys::of(g)?);
    Ok(match a.compare(&b, order) {
        Ordering::Greater => CsoOrdering::Greater,
        Ordering::Less => CsoOrdering::Less,
        Ordering::Equal => CsoOrdering::Equivalent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(p("x1 + 1").add(&p("x1")), BoolPoly::one());
        let f = p("x2*x3 + x1");
        assert!(f.add(&f).is_zero());
        assert_eq!(f.add(&BoolPoly::one()), p("x2*x3 + x1 + 1"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("x1").mul(&p("x1")), p("x1"));
        assert_eq!(p("x1 + 1").mul(&p("x2*x4*x6*x9")), p("x1*x2*x4*x6*x9 + x2*x4*x6*x9"));
        assert!(BoolPoly::zero().mul(&p("x3 + x2")).is_zero());
    }

    #[test]
    fn canonical_form_examples() {
        let cf = p("x2*x3 + x1 + 1").canonical_form().unwrap();
        assert_eq!((cf.initial.clone(), cf.cls(), cf.tail.clone()), (p("x2"), 3, p("x1 + 1")));
        let cf = p("x1*x2*x4 + x1").canonical_form().unwrap();
        assert_eq!((cf.initial.clone(), cf.cls(), cf.tail.clone()), (p("x1*x2"), 4, p("x1")));
        let cf = p("x5").canonical_form().unwrap();
        assert_eq!((cf.initial.clone(), cf.cls(), cf.tail.clone()), (BoolPoly::one(), 5, BoolPoly::zero()));
        assert_eq!(BoolPoly::one().canonical_form(), Err(PolyError::Constant(1)));
        assert_eq!(BoolPoly::zero().canonical_form(), Err(PolyError::Constant(0)));
    }

    #[test]
    fn substitute_examples() {
        let v = |i| VarId::new(i).unwrap();
        assert_eq!(p("x1*x2*x4 + x1").substitute(v(2), &BoolPoly::one()).unwrap(), p("x1*x4 + x1"));
        assert_eq!(p("x2 + 1").substitute(v(3), &p("x1 + 1")).unwrap(), p("x2 + 1"));
        assert!(p("x1 + 1").substitute(v(1), &BoolPoly::one()).unwrap().is_zero());
        assert_eq!(p("x3 + x2").substitute(v(3), &p("x3 + x1")), Err(PolyError::NonTriangular(3)));
    }

    #[test]
    fn cso_examples() {
        let f1 = p("x2*x3 + x1 + 1");
        let f2 = p("x1*x2*x4 + x1");
        assert_eq!(compare_cso(&f1, &f2, CsOrder::First).unwrap(), CsoOrdering::Greater);
        assert_eq!(compare_cso(&f1, &f2, CsOrder::Second).unwrap(), CsoOrdering::Less);
        let g2 = p("x1*x4 + x4 + x1");
        assert_eq!(compare_cso(&f1, &g2, CsOrder::First).unwrap(), CsoOrdering::Greater);
        assert_eq!(compare_cso(&f1, &g2, CsOrder::Second).unwrap(), CsoOrdering::Less);
        assert_eq!(compare_cso(&f1, &p("x2*x3 + x2 + x1"), CsOrder::First).unwrap(), CsoOrdering::Equivalent);
        assert!(compare_cso(&BoolPoly::one(), &f1, CsOrder::First).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let a: HashMap<VarId, bool> =
            [(1, true), (2, true), (3, false)].into_iter().map(|(i, b)| (VarId::new(i).unwrap(), b)).collect();
        assert!(!p("x2*x3 + x1 + 1").evaluate(&a).unwrap());
        assert!(BoolPoly::one().evaluate(&HashMap::new()).unwrap());
        assert!(!p("x1 + x2").evaluate(&a).unwrap());
        assert_eq!(p("x4 + x1").evaluate(&a), Err(PolyError::Unassigned(4)));
    }

    #[test]
    fn printing_is_deterministic() {
        assert_eq!(p("1 + x1 + x3*x2").to_string(), "x2*x3 + x1 + 1");
        assert_eq!(p("x1*x4 + x2*x3 + x4").to_string(), "x1*x4 + x4 + x2*x3");
        assert_eq!(BoolPoly::zero().to_string(), "0");
        assert_eq!(p("x1 + x1").to_string(), "0");
        assert!("x0".parse::<BoolPoly>().is_err());
        assert!("y1".parse::<BoolPoly>().is_err());
        assert!("x1 + ".parse::<BoolPoly>().is_err());
    }

    fn poly_strategy(max_var: usize) -> impl Strategy<Value = BoolPoly> {
        let mask = (1u128 << max_var) - 1;
        prop::collection::vec(any::<u128>().prop_map(move |b| Monomial::from_bits(b & mask)), 0..8)
            .prop_map(BoolPoly::from_terms)
    }

    fn non_constant(max_var: usize) -> impl Strategy<Value = BoolPoly> {
        poly_strategy(max_var).prop_filter("non-constant", |f| !f.is_constant())
    }

    proptest! {
        #[test]
        fn ring_laws(f in poly_strategy(6), g in poly_strategy(6), h in poly_strategy(6)) {
            prop_assert_eq!(f.add(&g), g.add(&f));
            prop_assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
            prop_assert_eq!(f.add(&BoolPoly::zero()), f.clone());
            prop_assert_eq!(f.mul(&g), g.mul(&f));
            prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
            prop_assert_eq!(f.mul(&BoolPoly::one()), f.clone());
            prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
            prop_assert_eq!(f.mul(&f), f.clone());
            prop_assert!(f.add(&f).is_zero());
        }

        #[test]
        fn canonical_form_round_trip(f in non_constant(8)) {
            let cf = f.canonical_form().unwrap();
            prop_assert_eq!(cf.reconstruct(), f.clone());
            prop_assert!(!cf.initial.contains_var(cf.leading_var));
            prop_assert!(!cf.tail.contains_var(cf.leading_var));
            prop_assert_eq!(cf.leading_var.index(), f.vars().map(|v| v.index()).max().unwrap());
        }

        #[test]
        fn substitute_eliminates(f in poly_strategy(8), u in poly_strategy(8), c in 1usize..=8) {
            let v = VarId::new(c).unwrap();
            let (_, u) = u.split_on(v);
            let r = f.substitute(v, &u).unwrap();
            prop_assert!(!r.contains_var(v));
            // agrees with pointwise evaluation
            for ones in 0u128..256 {
                let forced = if u.eval_bits(ones) { ones | (1 << (c - 1)) } else { ones & !(1 << (c - 1)) };
                prop_assert_eq!(r.eval_bits(ones), f.eval_bits(forced));
            }
        }

        #[test]
        fn cso_is_a_strict_weak_order(f in non_constant(6), g in non_constant(6), h in non_constant(6)) {
            for order in [CsOrder::First, CsOrder::Second] {
                let fg = compare_cso(&f, &g, order).unwrap();
                let gf = compare_cso(&g, &f, order).unwrap();
                let flip = match fg { CsoOrdering::Greater => CsoOrdering::Less, CsoOrdering::Less => CsoOrdering::Greater, e => e };
                prop_assert_eq!(gf, flip);
                let gh = compare_cso(&g, &h, order).unwrap();
                if fg == CsoOrdering::Greater && gh == CsoOrdering::Greater {
                    prop_assert_eq!(compare_cso(&f, &h, order).unwrap(), CsoOrdering::Greater);
                }
                let (a, b) = (f.canonical_form().unwrap(), g.canonical_form().unwrap());
                let same_keys = a.cls() == b.cls() && a.tdeg() == b.tdeg()
                    && a.initial_terms() == b.initial_terms() && a.tail_terms() == b.tail_terms();
                prop_assert_eq!(fg == CsoOrdering::Equivalent, same_keys);
            }
        }

        #[test]
        fn print_parse_round_trip(f in poly_strategy(20)) {
            prop_assert_eq!(f.to_string().parse::<BoolPoly>().unwrap(), f);
        }
    }
}
