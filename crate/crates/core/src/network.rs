//! Symmetric weighted networks with optional self-loops.
//!
//! A link (i, j) with weight a_ij > 0 is stored mirrored in both adjacency
//! lists, so the structure is symmetric by construction; a self-loop is
//! stored once in its node's list and contributes its weight once to the
//! node strength k_i = sum_j a_ij. Absent links mean a_ij = 0 and are never
//! stored.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Bound on `to_dense`; the dense mirror exists for oracle checks at small n,
/// not for production-size networks.
pub const DENSE_MIRROR_MAX_NODES: usize = 2000;

/// One undirected weighted link in canonical orientation (i <= j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

impl Link {
    pub fn is_loop(&self) -> bool {
        self.i == self.j
    }
}

/// Immutable symmetric weighted network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    /// Mirrored neighbor lists; self-loop appears once in its own list.
    adj: Vec<Vec<(usize, f64)>>,
    /// Cached strengths k_i, summed in adjacency-list order.
    strengths: Vec<f64>,
}

impl Network {
    /// Builds a network from undirected links, each given exactly once.
    /// Node ids must lie in 0..n, weights must be finite and > 0, and no
    /// link may repeat (a_ij = a_ji is one link, not two).
    pub fn from_links(n: usize, links: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("node count must be >= 1".into()));
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(links.len());
        for &(i, j, w) in links {
            if i >= n {
                return Err(Error::NodeOutOfRange { node: i, n });
            }
            if j >= n {
                return Err(Error::NodeOutOfRange { node: j, n });
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidWeight { i, j, weight: w });
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::DuplicateLink(key.0, key.1));
            }
            if i == j {
                adj[i].push((i, w));
            } else {
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
        // Canonical neighbor order; local averages and the strength cache
        // then sum in the same fixed order, which keeps runs bit-reproducible.
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        let strengths = adj
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();
        Ok(Self { n, adj, strengths })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of stored links, self-loops included.
    pub fn link_count(&self) -> usize {
        self.links().count()
    }

    /// Neighbors of `i` with link weights; a self-loop shows up as (i, w).
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// Strength k_i (cached row sum).
    pub fn strength(&self, i: usize) -> f64 {
        self.strengths[i]
    }

    /// The strength vector g = (k_1 ... k_n); self-loop weight counted once.
    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// Total strength K = sum_i k_i.
    pub fn total_strength(&self) -> f64 {
        self.strengths.iter().sum()
    }

    /// Degree of `i` counting proper (non-loop) links only.
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&(j, _)| j != i).count()
    }

    /// Iterates links in canonical (i <= j) orientation, each exactly once,
    /// ordered by (i, j).
    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| j >= i)
                .map(move |&(j, weight)| Link { i, j, weight })
        })
    }

    /// The weight a_ij, or 0.0 when the link is absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adj[i]
            .iter()
            .find(|&&(k, _)| k == j)
            .map_or(0.0, |&(_, w)| w)
    }

    /// Local weighted average <x_j>^i_j = sum_j a_ij x_j / k_i. A self-loop
    /// includes x_i itself in the average.
    pub fn local_average(&self, x: &[f64], i: usize) -> Result<f64> {
        if i >= self.n {
            return Err(Error::NodeOutOfRange { node: i, n: self.n });
        }
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                got: x.len(),
                expected: self.n,
            });
        }
        let k = self.strengths[i];
        if k <= 0.0 {
            return Err(Error::ZeroStrength(i));
        }
        let acc: f64 = self.adj[i].iter().map(|&(j, w)| w * x[j]).sum();
        Ok(acc / k)
    }

    /// True iff every node is reachable from node 0 over stored links;
    /// self-loops are ignored for reachability. A single node is trivially
    /// connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(i) = stack.pop() {
            for &(j, _) in &self.adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
        reached == self.n
    }

    /// Checks the stored structure against the model requirements and
    /// returns every violation found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, list) in self.adj.iter().enumerate() {
            for &(j, w) in list {
                if !w.is_finite() {
                    violations.push(Violation::NonFiniteWeight { i, j });
                } else if w <= 0.0 {
                    violations.push(Violation::NonPositiveWeight { i, j });
                }
                if i != j {
                    let mirrored = self.adj[j].iter().any(|&(k, wk)| k == i && wk == w);
                    if !mirrored {
                        violations.push(Violation::AsymmetricPair { i, j });
                    }
                }
            }
        }
        for i in 0..self.n {
            if !(self.strengths[i] > 0.0) {
                violations.push(Violation::ZeroStrength { node: i });
            }
            let recomputed: f64 = self.adj[i].iter().map(|&(_, w)| w).sum();
            let tol = 4.0 * f64::EPSILON * recomputed.abs().max(1.0);
            if (recomputed - self.strengths[i]).abs() > tol {
                violations.push(Violation::StrengthCacheMismatch { node: i });
            }
        }
        ValidationReport { violations }
    }

    /// Dense adjacency matrix mirror, for oracle tests at small n only.
    /// Panics above [`DENSE_MIRROR_MAX_NODES`].
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        assert!(
            self.n <= DENSE_MIRROR_MAX_NODES,
            "dense mirror limited to n <= {DENSE_MIRROR_MAX_NODES}"
        );
        let mut a = vec![vec![0.0; self.n]; self.n];
        for Link { i, j, weight } in self.links() {
            a[i][j] = weight;
            if i != j {
                a[j][i] = weight;
            }
        }
        a
    }

    /// Serializes to the edge-list text format (see [`read_edge_list`]):
    /// a `n=<count>` header followed by one `i<TAB>j<TAB>weight` line per
    /// link in canonical (i <= j) order. Weights print in shortest
    /// round-trip form, so read(write(net)) reproduces the network exactly.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n={}", self.n);
        for Link { i, j, weight } in self.links() {
            let _ = writeln!(out, "{i}\t{j}\t{weight}");
        }
        out
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }
}

/// Parses the edge-list format: UTF-8 text, `#` comment lines, a first
/// non-comment line `n=<count>`, then one `i<TAB>j<TAB>weight` line per
/// undirected link with i <= j (self-loops as i == j), each link exactly once.
pub fn parse_edge_list(text: &str, origin: &str) -> Result<Network> {
    let mut n: Option<usize> = None;
    let mut links: Vec<(usize, usize, f64)> = Vec::new();
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match n {
            None => {
                let decl = line
                    .strip_prefix("n=")
                    .ok_or_else(|| err(lineno, format!("expected `n=<count>`, got `{line}`")))?;
                let count: usize = decl
                    .parse()
                    .map_err(|_| err(lineno, format!("invalid node count `{decl}`")))?;
                n = Some(count);
            }
            Some(_) => {
                let mut fields = line.split('\t');
                let mut next = |name: &str| {
                    fields
                        .next()
                        .ok_or_else(|| err(lineno, format!("missing {name} field")))
                };
                let i: usize = next("i")?
                    .parse()
                    .map_err(|_| err(lineno, "invalid node id".into()))?;
                let j: usize = next("j")?
                    .parse()
                    .map_err(|_| err(lineno, "invalid node id".into()))?;
                let w: f64 = next("weight")?
                    .parse()
                    .map_err(|_| err(lineno, "invalid weight".into()))?;
                if fields.next().is_some() {
                    return Err(err(lineno, "trailing fields".into()));
                }
                if i > j {
                    return Err(err(lineno, format!("link ({i}, {j}) must satisfy i <= j")));
                }
                links.push((i, j, w));
            }
        }
    }
    let n = n.ok_or_else(|| err(0, "missing `n=<count>` header".into()))?;
    Network::from_links(n, &links)
}

pub fn read_edge_list(path: &Path) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, &path.display().to_string())
}

/// A single model-requirement violation found by [`Network::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroStrength { node: usize },
    NonFiniteWeight { i: usize, j: usize },
    NonPositiveWeight { i: usize, j: usize },
    AsymmetricPair { i: usize, j: usize },
    StrengthCacheMismatch { node: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ZeroStrength { node } => write!(f, "zero strength at node {node}"),
            Violation::NonFiniteWeight { i, j } => write!(f, "non-finite weight on ({i}, {j})"),
            Violation::NonPositiveWeight { i, j } => {
                write!(f, "non-positive weight on ({i}, {j})")
            }
            Violation::AsymmetricPair { i, j } => write!(f, "asymmetric storage for ({i}, {j})"),
            Violation::StrengthCacheMismatch { node } => {
                write!(f, "cached strength mismatch at node {node}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-node scalar states (dimensionless). All entries are finite by
/// construction; length compatibility with a network is checked at use sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState(idx));
        }
        Ok(Self(values))
    }

    /// All-equal state v * h.
    pub fn homogeneous(n: usize, v: f64) -> Self {
        Self(vec![v; n])
    }

    /// I.i.d. uniform states on [lo, hi).
    pub fn sample_uniform<R: rand::Rng>(n: usize, range: (f64, f64), rng: &mut R) -> Self {
        let (lo, hi) = range;
        Self((0..n).map(|_| lo + rng.gen::<f64>() * (hi - lo)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for StateVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_star() -> Network {
        Network::from_links(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap()
    }

    #[test]
    fn two_node_net_is_valid() {
        let net = Network::from_links(2, &[(0, 1, 1.0)]).unwrap();
        assert!(net.validate().is_valid());
        assert_eq!(net.weight(0, 1), 1.0);
        assert_eq!(net.weight(1, 0), 1.0);
    }

    #[test]
    fn isolated_node_reports_zero_strength() {
        let net = Network::from_links(3, &[(0, 1, 1.0)]).unwrap();
        let report = net.validate();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .contains(&Violation::ZeroStrength { node: 2 }));
    }

    #[test]
    fn asymmetric_input_is_unrepresentable() {
        // (0,1) and (1,0) name the same undirected link; a second weight for
        // it is a duplicate, not an asymmetric entry.
        let err = Network::from_links(2, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateLink(0, 1)));
    }

    #[test]
    fn construction_rejects_bad_weights() {
        assert!(matches!(
            Network::from_links(2, &[(0, 1, 0.0)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            Network::from_links(2, &[(0, 1, -2.0)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            Network::from_links(2, &[(0, 1, f64::NAN)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            Network::from_links(2, &[(0, 2, 1.0)]),
            Err(Error::NodeOutOfRange { .. })
        ));
        assert!(Network::from_links(0, &[]).is_err());
    }

    #[test]
    fn strengths_star_and_dyad() {
        assert_eq!(unit_star().strengths(), &[3.0, 1.0, 1.0, 1.0]);
        let dyad = Network::from_links(2, &[(0, 1, 2.5)]).unwrap();
        assert_eq!(dyad.strengths(), &[2.5, 2.5]);
    }

    #[test]
    fn self_loop_counts_once_in_strength() {
        let net = Network::from_links(1, &[(0, 0, 4.0)]).unwrap();
        assert_eq!(net.strength(0), 4.0);
        assert_eq!(net.degree(0), 0);
        assert_eq!(net.link_count(), 1);
    }

    #[test]
    fn local_average_star_center() {
        let net = unit_star();
        let x = [9.0, 1.0, 2.0, 3.0];
        assert_relative_eq!(net.local_average(&x, 0).unwrap(), 2.0);
    }

    #[test]
    fn local_average_of_constant_is_constant() {
        let net = unit_star();
        let x = [7.25; 4];
        for i in 0..4 {
            assert_relative_eq!(net.local_average(&x, i).unwrap(), 7.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn local_average_includes_self_loop() {
        // dyad a_01 = 3 plus self-loop a_00 = 1, x = (0, 4):
        // (1*0 + 3*4) / 4 = 3.
        let net = Network::from_links(2, &[(0, 1, 3.0), (0, 0, 1.0)]).unwrap();
        let x = [0.0, 4.0];
        assert_relative_eq!(net.local_average(&x, 0).unwrap(), 3.0);
    }

    #[test]
    fn local_average_out_of_range() {
        let net = unit_star();
        assert!(net.local_average(&[0.0; 4], 7).is_err());
        assert!(net.local_average(&[0.0; 3], 0).is_err());
    }

    #[test]
    fn connectivity_cases() {
        let path = Network::from_links(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(path.is_connected());
        let dyads = Network::from_links(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!dyads.is_connected());
        let lone = Network::from_links(1, &[(0, 0, 1.0)]).unwrap();
        assert!(lone.is_connected());
    }

    #[test]
    fn edge_list_round_trip_is_exact() {
        let net = Network::from_links(
            3,
            &[(0, 1, 0.1 + 0.2), (1, 2, 10.0 / 3.0), (2, 2, 1e-12)],
        )
        .unwrap();
        let text = net.to_edge_list_string();
        let back = parse_edge_list(&text, "mem").unwrap();
        assert_eq!(net, back);
        assert_eq!(text, back.to_edge_list_string());
    }

    #[test]
    fn edge_list_parses_comments_and_rejects_bad_lines() {
        let good = "# comment\nn=2\n0\t1\t2.5\n";
        let net = parse_edge_list(good, "mem").unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.weight(0, 1), 2.5);

        assert!(parse_edge_list("0\t1\t1.0\n", "mem").is_err());
        assert!(parse_edge_list("n=2\n1\t0\t1.0\n", "mem").is_err());
        assert!(parse_edge_list("n=2\n0\t1\n", "mem").is_err());
        assert!(parse_edge_list("n=2\n0\t1\tx\n", "mem").is_err());
    }

    #[test]
    fn state_vector_rejects_non_finite() {
        assert!(StateVector::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(StateVector::new(vec![0.0, 1.0]).is_ok());
    }
}
