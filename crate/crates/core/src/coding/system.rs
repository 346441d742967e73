//! x̃-linear polynomial systems: full-rank blocks plus plain constraints in x.

use crate::boolpoly::{BoolPoly, Monomial, PolyError, VarId, MAX_VARS};

/// One full-rank constraint `ζ · A(x)`: the polynomials are the entries of
/// the row vector, each linear in `ζ_1..ζ_width`.
///
/// Polynomials are stored in local numbering, with `ζ_k` written as
/// `x_{n+k}`. In the whole system the block occupies the global indices
/// `zeta_base + 1 ..= zeta_base + width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBlock {
    pub zeta_base: usize,
    pub width: usize,
    pub polys: Vec<BoolPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    pub n: usize,
    pub v: usize,
    pub rank_blocks: Vec<RankBlock>,
    pub nonrank: Vec<BoolPoly>,
}

impl PolySystem {
    pub fn new(n: usize, v: usize, rank_blocks: Vec<RankBlock>, nonrank: Vec<BoolPoly>) -> Self {
        PolySystem { n, v, rank_blocks, nonrank }
    }

    /// Checks the structural requirements: nonrank polynomials use only x,
    /// blocks occupy disjoint ranges inside `n+1..=n+v`, and every term of a
    /// rank polynomial holds exactly one ζ.
    pub fn is_tilde_linear(&self) -> bool {
        self.tilde_linear_violation().is_none()
    }

    /// Describes the first violation of [`PolySystem::is_tilde_linear`].
    pub fn tilde_linear_violation(&self) -> Option<String> {
        let x_mask = mask_upto(self.n);
        for h in &self.nonrank {
            if h.support() & !x_mask != 0 {
                return Some(format!("nonrank polynomial {h} uses x̃ variables"));
            }
        }
        let mut ranges: Vec<(usize, usize)> = Vec::new();
        for (k, b) in self.rank_blocks.iter().enumerate() {
            let (lo, hi) = (b.zeta_base, b.zeta_base + b.width);
            if lo < self.n || hi > self.n + self.v {
                return Some(format!("rank block {} lies outside x{}..x{}", k + 1, self.n + 1, self.n + self.v));
            }
            if ranges.iter().any(|&(a, z)| lo < z && a < hi) {
                return Some(format!("rank block {} overlaps an earlier block", k + 1));
            }
            ranges.push((lo, hi));
            let zm = mask_upto(self.n + b.width) & !x_mask;
            for f in &b.polys {
                for m in f.terms() {
                    let bits = m.bits();
                    if bits & !(x_mask | zm) != 0 || (bits & zm).count_ones() != 1 {
                        return Some(format!("rank polynomial {f} has term {m} not linear in its ζ block"));
                    }
                }
            }
        }
        None
    }

    /// The polynomials of block `k` with ζ moved to its global indices.
    pub fn global_block(&self, k: usize) -> Result<Vec<BoolPoly>, PolyError> {
        let b = &self.rank_blocks[k];
        if b.zeta_base + b.width > MAX_VARS {
            return Err(PolyError::VarOutOfRange(b.zeta_base + b.width));
        }
        let n = self.n;
        let shift = |v: VarId| {
            if v.index() > n {
                VarId::new(v.index() - n + b.zeta_base).expect("checked above")
            } else {
                v
            }
        };
        Ok(b.polys.iter().map(|f| f.rename(shift)).collect())
    }

    /// All polynomials in global numbering, rank blocks first. Fails when
    /// `n + v` exceeds the variable limit.
    pub fn all_polys(&self) -> Result<Vec<BoolPoly>, PolyError> {
        let mut out = Vec::new();
        for k in 0..self.rank_blocks.len() {
            out.extend(self.global_block(k)?);
        }
        out.extend(self.nonrank.iter().cloned());
        Ok(out)
    }

    /// One system per rank block, its ζ block at `n+1..=n+width`; the
    /// nonrank polynomials go with the first part.
    pub fn parts(&self) -> Vec<PolySystem> {
        if self.rank_blocks.is_empty() {
            return vec![PolySystem::new(self.n, 0, Vec::new(), self.nonrank.clone())];
        }
        self.rank_blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let block = RankBlock { zeta_base: self.n, width: b.width, polys: b.polys.clone() };
                let nonrank = if k == 0 { self.nonrank.clone() } else { Vec::new() };
                PolySystem::new(self.n, b.width, vec![block], nonrank)
            })
            .collect()
    }

    /// Concatenates parts over the same x-variables, giving each block fresh ζ.
    pub fn combine(parts: &[PolySystem]) -> Option<PolySystem> {
        let n = parts.first()?.n;
        let mut blocks = Vec::new();
        let mut nonrank = Vec::new();
        let mut base = n;
        for p in parts {
            if p.n != n {
                return None;
            }
            for b in &p.rank_blocks {
                blocks.push(RankBlock { zeta_base: base, width: b.width, polys: b.polys.clone() });
                base += b.width;
            }
            nonrank.extend(p.nonrank.iter().cloned());
        }
        Some(PolySystem::new(n, base - n, blocks, nonrank))
    }
}

pub(crate) fn mask_upto(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// `Σ_k ζ_k · column_k` helper: row vector times a matrix of polynomials.
pub(crate) fn zeta_combination(column: &[BoolPoly], zeta_base: usize) -> BoolPoly {
    let mut acc = BoolPoly::zero();
    for (k, entry) in column.iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let z = Monomial::var(VarId::new(zeta_base + k + 1).expect("index in range"));
        acc = acc.add(&entry.mul_monomial(z));
    }
    acc
}
