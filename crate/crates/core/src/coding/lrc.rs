//! Repair of locally repairable codes as a network coding problem on a
//! layered graph: source, storage nodes, repair nodes, and one user per
//! `eta`-subset of the available units.

use crate::coding::network::{build_lnc_problem, BroadcastMode, CodingError, LncProblem, NetworkSpec, Node, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrcSpec {
    pub ell: usize,
    pub eta: usize,
    pub omega: usize,
    /// Surviving storage units, 1-based.
    pub surviving: Vec<usize>,
    /// `omega x ell` matrix of stored combinations.
    pub source_matrix: Vec<Vec<bool>>,
}

impl LrcSpec {
    pub fn validate(&self) -> Result<(), CodingError> {
        let bad = |m: String| Err(CodingError::LrcParameters(m));
        if self.omega == 0 || self.omega > self.eta || self.eta > self.ell {
            return bad(format!("need 0 < omega <= eta <= ell, got {}, {}, {}", self.omega, self.eta, self.ell));
        }
        let mut seen = vec![false; self.ell + 1];
        for &i in &self.surviving {
            if i == 0 || i > self.ell {
                return bad(format!("surviving unit {i} outside 1..={}", self.ell));
            }
            if std::mem::replace(&mut seen[i], true) {
                return bad(format!("surviving unit {i} listed twice"));
            }
        }
        if self.source_matrix.len() != self.omega || self.source_matrix.iter().any(|r| r.len() != self.ell) {
            return bad(format!("source matrix must be {}x{}", self.omega, self.ell));
        }
        Ok(())
    }

    fn is_surviving(&self, i: usize) -> bool {
        self.surviving.contains(&i)
    }

    fn surviving_sorted(&self) -> Vec<usize> {
        let mut a = self.surviving.clone();
        a.sort_unstable();
        a
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The layered graph: `s`, `v1..v_ell`, `t_j` for every failed unit, and a
/// user per `eta`-subset of the pool (`v_i` for surviving `i`, else `t_i`).
pub fn build_lrc_layered_graph(l: &LrcSpec) -> Result<NetworkSpec, CodingError> {
    l.validate()?;
    let failed: Vec<usize> = (1..=l.ell).filter(|&i| !l.is_surviving(i)).collect();
    let pool: Vec<String> =
        (1..=l.ell).map(|i| if l.is_surviving(i) { format!("v{i}") } else { format!("t{i}") }).collect();
    let subsets = combinations(l.ell, l.eta);

    let mut edges: Vec<(String, String)> = (1..=l.ell).map(|i| ("s".to_string(), format!("v{i}"))).collect();
    for &j in &failed {
        for &i in &l.surviving_sorted() {
            edges.push((format!("v{i}"), format!("t{j}")));
        }
    }
    for (k, subset) in subsets.iter().enumerate() {
        for &m in subset {
            edges.push((pool[m].clone(), format!("u{}", k + 1)));
        }
    }
    let out_degree = |id: &str| edges.iter().filter(|(a, _)| a == id).count();

    let mut nodes = vec![Node { id: "s".into(), kind: NodeKind::Constant, matrix: Some(l.source_matrix.clone()) }];
    for i in 1..=l.ell {
        let id = format!("v{i}");
        let width = if l.is_surviving(i) { out_degree(&id) } else { 0 };
        nodes.push(Node { id, kind: NodeKind::Constant, matrix: Some(vec![vec![true; width]]) });
    }
    for &j in &failed {
        nodes.push(Node { id: format!("t{j}"), kind: NodeKind::Broadcast, matrix: None });
    }
    for k in 1..=subsets.len() {
        nodes.push(Node { id: format!("u{k}"), kind: NodeKind::User, matrix: None });
    }
    Ok(NetworkSpec { omega: l.omega, source: "s".into(), nodes, edges })
}

/// Compiles the layered graph with identified broadcast columns, giving
/// `|failed| * |surviving|` variables and one rank block per user.
pub fn build_lrc_problem(l: &LrcSpec) -> Result<LncProblem, CodingError> {
    let spec = build_lrc_layered_graph(l)?;
    build_lnc_problem(&spec, BroadcastMode::Identify)
}
