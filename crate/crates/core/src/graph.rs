//! Finite directed multigraphs, their adjacency data and path enumeration.

use crate::linalg::{nullspace, Matrix};
use crate::scalar::{C, Q};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    UndeclaredVertex { edge: String, vertex: String },
    #[error("empty graph")]
    Empty,
    #[error("constructor size must be at least 1")]
    ZeroSize,
    #[error("graph has a sink at `{0}`")]
    Sink(String),
    #[error("spectral radius is irrational, isolated in [{lo}, {hi}]")]
    IrrationalRadius { lo: Q, hi: Q },
    #[error("graph contains a cycle")]
    Cycle,
    #[error("unknown graph reference `{0}`")]
    UnknownRef(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    /// Partition recorded by `disjoint_union`; parsed graphs fall back to weak components.
    pub partition: Option<Vec<Component>>,
}

/// A path `e1 e2 ... en`, or the length-0 path at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn vertex(v: usize) -> Path {
        Path { start: v, edges: vec![] }
    }
    pub fn edge(g: &Graph, e: usize) -> Path {
        Path { start: g.edges[e].src, edges: vec![e] }
    }
    pub fn len(&self) -> usize {
        self.edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
    pub fn source(&self) -> usize {
        self.start
    }
    pub fn range(&self, g: &Graph) -> usize {
        self.edges.last().map_or(self.start, |&e| g.edges[e].dst)
    }
    /// Concatenation; `None` when the paths do not compose.
    pub fn concat(&self, other: &Path, g: &Graph) -> Option<Path> {
        if self.range(g) != other.start {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path { start: self.start, edges })
    }
    /// `other = self · rest` gives `Some(rest)`.
    pub fn strip_prefix(&self, other: &Path, g: &Graph) -> Option<Path> {
        if self.start != other.start || self.len() > other.len() || other.edges[..self.len()] != self.edges[..] {
            return None;
        }
        Some(Path { start: self.range(g), edges: other.edges[self.len()..].to_vec() })
    }
    pub fn label(&self, g: &Graph) -> String {
        if self.edges.is_empty() {
            g.vertices[self.start].clone()
        } else {
            self.edges.iter().map(|&e| g.edges[e].id.as_str()).collect::<Vec<_>>().join(" ")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Radius {
    Exact(Q),
    Interval(Q, Q),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerronData {
    pub rho: Q,
    pub eigenvector: Vec<Q>,
    pub strictly_positive: bool,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, String)>) -> Result<Graph, GraphError> {
        let mut text = String::new();
        for v in &vertices {
            text.push_str(&format!("vertex {v}\n"));
        }
        for (e, s, d) in &edges {
            text.push_str(&format!("edge {e} {s} {d}\n"));
        }
        parse_graph(&text)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }
    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].src == v).collect()
    }
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].dst == v).collect()
    }
    pub fn is_sink(&self, v: usize) -> bool {
        self.edges.iter().all(|e| e.src != v)
    }
    pub fn is_source_vertex(&self, v: usize) -> bool {
        !self.is_sink(v)
    }
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.is_sink(v)).collect()
    }
    pub fn no_isolated_vertices(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.edges.iter().any(|e| e.src == v || e.dst == v))
    }

    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.vertices.len();
        let mut a = vec![vec![0u64; n]; n];
        for e in &self.edges {
            a[e.src][e.dst] += 1;
        }
        a
    }

    /// Recorded partition, or weakly connected components in order of first vertex.
    pub fn components(&self) -> Vec<Component> {
        if let Some(p) = &self.partition {
            return p.clone();
        }
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut verts = vec![];
            while let Some(v) = stack.pop() {
                verts.push(v);
                for e in &self.edges {
                    let w = if e.src == v {
                        e.dst
                    } else if e.dst == v {
                        e.src
                    } else {
                        continue;
                    };
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            verts.sort_unstable();
            let edges = (0..self.edges.len()).filter(|&e| comp[self.edges[e].src] == id).collect();
            out.push(Component { vertices: verts, edges });
        }
        out
    }

    /// Component index of every edge.
    pub fn edge_component(&self) -> Vec<usize> {
        let mut out = vec![0; self.edges.len()];
        for (i, c) in self.components().iter().enumerate() {
            for &e in &c.edges {
                out[e] = i;
            }
        }
        out
    }
    pub fn vertex_component(&self) -> Vec<usize> {
        let mut out = vec![0; self.vertices.len()];
        for (i, c) in self.components().iter().enumerate() {
            for &v in &c.vertices {
                out[v] = i;
            }
        }
        out
    }

    /// Induced subgraph on one component, ids unchanged.
    pub fn component_graph(&self, c: &Component) -> Graph {
        let vmap: HashMap<usize, usize> = c.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Graph {
            vertices: c.vertices.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges: c
                .edges
                .iter()
                .map(|&e| Edge { id: self.edges[e].id.clone(), src: vmap[&self.edges[e].src], dst: vmap[&self.edges[e].dst] })
                .collect(),
            partition: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            s.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            s.push_str(&format!("edge {} {} {}\n", e.id, self.vertices[e.src], self.vertices[e.dst]));
        }
        s
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut vindex = HashMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let syntax = |msg: &str| GraphError::Syntax { line: ln + 1, msg: msg.to_string() };
        match toks[0] {
            "vertex" => {
                if toks.len() != 2 {
                    return Err(syntax("expected `vertex <id>`"));
                }
                if !seen.insert(toks[1].to_string()) {
                    return Err(GraphError::DuplicateId(toks[1].to_string()));
                }
                vindex.insert(toks[1].to_string(), vertices.len());
                vertices.push(toks[1].to_string());
            }
            "edge" => {
                if toks.len() != 4 {
                    return Err(syntax("expected `edge <id> <src> <dst>`"));
                }
                if !seen.insert(toks[1].to_string()) {
                    return Err(GraphError::DuplicateId(toks[1].to_string()));
                }
                let look = |v: &str| {
                    vindex.get(v).copied().ok_or_else(|| GraphError::UndeclaredVertex { edge: toks[1].to_string(), vertex: v.to_string() })
                };
                edges.push(Edge { id: toks[1].to_string(), src: look(toks[2])?, dst: look(toks[3])? });
            }
            other => return Err(syntax(&format!("unknown declaration `{other}`"))),
        }
    }
    if vertices.is_empty() {
        return Err(GraphError::Empty);
    }
    Ok(Graph { vertices, edges, partition: None })
}

/// `L_n`: one vertex with `n` loops.
pub fn loop_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::ZeroSize);
    }
    Ok(Graph {
        vertices: vec!["v1".into()],
        edges: (1..=n).map(|i| Edge { id: format!("e{i}"), src: 0, dst: 0 }).collect(),
        partition: None,
    })
}

/// `P_n`: vertices `v1..v{n+1}`, edges `e{i}{i+1}`.
pub fn path_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::ZeroSize);
    }
    Ok(Graph {
        vertices: (1..=n + 1).map(|i| format!("v{i}")).collect(),
        edges: (1..=n).map(|i| Edge { id: format!("e{}{}", i, i + 1), src: i - 1, dst: i }).collect(),
        partition: None,
    })
}

/// `So_2`: a source vertex emitting one edge to each of two sinks (`v1 <- v2 -> v3`).
pub fn source_graph_2() -> Graph {
    Graph {
        vertices: vec!["v1".into(), "v2".into(), "v3".into()],
        edges: vec![Edge { id: "e1".into(), src: 1, dst: 0 }, Edge { id: "e2".into(), src: 1, dst: 2 }],
        partition: None,
    }
}

/// Ids become `id^k` for part `k` (1-based).
pub fn disjoint_union(parts: &[Graph]) -> Result<Graph, GraphError> {
    if parts.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut g = Graph { vertices: vec![], edges: vec![], partition: Some(vec![]) };
    for (k, p) in parts.iter().enumerate() {
        let voff = g.vertices.len();
        let eoff = g.edges.len();
        g.vertices.extend(p.vertices.iter().map(|v| format!("{v}^{}", k + 1)));
        g.edges.extend(p.edges.iter().map(|e| Edge { id: format!("{}^{}", e.id, k + 1), src: e.src + voff, dst: e.dst + voff }));
        g.partition.as_mut().unwrap().push(Component {
            vertices: (voff..voff + p.vertices.len()).collect(),
            edges: (eoff..eoff + p.edges.len()).collect(),
        });
    }
    Ok(g)
}

pub fn enumerate_paths(g: &Graph, length: usize) -> Vec<Path> {
    let mut cur: Vec<Path> = (0..g.num_vertices()).map(Path::vertex).collect();
    for _ in 0..length {
        let mut next = Vec::new();
        for p in &cur {
            let r = p.range(g);
            for e in g.out_edges(r) {
                let mut q = p.clone();
                q.edges.push(e);
                next.push(q);
            }
        }
        cur = next;
    }
    cur
}

/// Resolves `L<n>`, `P<n>`, `So2` and `+`-joined unions of those.
pub fn graph_from_shortcut(s: &str) -> Result<Graph, GraphError> {
    let parts: Vec<&str> = s.split('+').map(str::trim).collect();
    let one = |p: &str| -> Result<Graph, GraphError> {
        if p == "So2" {
            return Ok(source_graph_2());
        }
        let num = |t: &str| t.parse::<usize>().map_err(|_| GraphError::UnknownRef(s.to_string()));
        if let Some(n) = p.strip_prefix('L') {
            return loop_graph(num(n)?);
        }
        if let Some(n) = p.strip_prefix('P') {
            return path_graph(num(n)?);
        }
        Err(GraphError::UnknownRef(s.to_string()))
    };
    if parts.len() == 1 {
        return one(parts[0]);
    }
    let gs = parts.into_iter().map(one).collect::<Result<Vec<_>, _>>()?;
    disjoint_union(&gs)
}

// ---- spectral data ----

fn poly_eval(p: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn poly_trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(Q::is_zero) {
        p.pop();
    }
}

fn poly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let f = &r[r.len() - 1] / &lead;
        for (i, c) in b.iter().enumerate() {
            r[i + k] = &r[i + k] - &(&f * c);
        }
        r.pop();
        if r.is_empty() {
            return vec![Q::zero()];
        }
        poly_trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    r
}

fn derivative(p: &[Q]) -> Vec<Q> {
    if p.len() <= 1 {
        return vec![Q::zero()];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * &Q::int(i as i64)).collect()
}

fn sturm_chain(p: &[Q]) -> Vec<Vec<Q>> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    loop {
        let n = chain.len();
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[Vec<Q>], x: &Q) -> usize {
    let signs: Vec<bool> = chain.iter().map(|p| poly_eval(p, x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Characteristic polynomial det(xI - A), coefficients low to high (Faddeev-LeVerrier).
pub fn char_poly(a: &[Vec<u64>]) -> Vec<Q> {
    let n = a.len();
    let am = Matrix::from_fn(n, n, |i, j| C::int(a[i][j] as i64));
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = am.mul(&m);
        for i in 0..n {
            next.data[i][i] = &next.data[i][i] + &C::real(coeffs[n - k + 1].clone());
        }
        m = next;
        let tr = (0..n).fold(Q::zero(), |acc, i| &acc + &am.mul(&m).data[i][i].re);
        coeffs[n - k] = -(&tr / &Q::int(k as i64));
    }
    coeffs
}

fn largest_real_root(p: &[Q], bound: &Q) -> Radius {
    let chain = sturm_chain(p);
    let count_above = |x: &Q| sign_changes(&chain, x) - sign_changes(&chain, bound);
    // integer candidates first: the polynomial is monic with integer coefficients
    let hi_int = bound.numer() / bound.denom();
    let mut k: i64 = num_traits::ToPrimitive::to_i64(&hi_int).unwrap_or(i64::MAX);
    while k >= 0 {
        let x = Q::int(k);
        if poly_eval(p, &x).is_zero() {
            let above = count_above(&x);
            if above == 0 {
                return Radius::Exact(x);
            }
            break;
        }
        k -= 1;
    }
    let mut lo = Q::zero();
    let mut hi = bound.clone();
    let eps = Q::new(1, 1 << 30);
    while &hi - &lo > eps {
        let mid = &(&lo + &hi) / &Q::int(2);
        if count_above(&mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Radius::Interval(lo, hi)
}

pub fn spectral_radius(g: &Graph) -> Radius {
    let a = g.adjacency();
    let p = char_poly(&a);
    let bound = a.iter().map(|r| r.iter().sum::<u64>()).max().unwrap_or(0) + 1;
    largest_real_root(&p, &Q::int(bound as i64))
}

pub fn perron(g: &Graph) -> Result<PerronData, GraphError> {
    if let Some(v) = g.sinks().first() {
        return Err(GraphError::Sink(g.vertices[*v].clone()));
    }
    let rho = match spectral_radius(g) {
        Radius::Exact(r) => r,
        Radius::Interval(lo, hi) => return Err(GraphError::IrrationalRadius { lo, hi }),
    };
    let a = g.adjacency();
    let n = a.len();
    let m = Matrix::from_fn(n, n, |i, j| {
        let mut x = C::int(a[i][j] as i64);
        if i == j {
            x = &x - &C::real(rho.clone());
        }
        x
    });
    let mut sum = vec![Q::zero(); n];
    for mut v in nullspace(&m) {
        if v.iter().any(|x| x.re.is_negative()) {
            v = v.into_iter().map(|x| -x).collect();
        }
        if v.iter().all(|x| !x.re.is_negative()) {
            for i in 0..n {
                sum[i] = &sum[i] + &v[i].re;
            }
        }
    }
    let total = sum.iter().fold(Q::zero(), |a, b| &a + b);
    let eigenvector: Vec<Q> = sum.iter().map(|x| x / &total).collect();
    let strictly_positive = eigenvector.iter().all(Q::is_positive);
    Ok(PerronData { rho, eigenvector, strictly_positive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let g = parse_graph("vertex v1\nedge e1 v1 v1\nedge e2 v1 v1\n").unwrap();
        assert_eq!(g.adjacency(), vec![vec![2]]);
        assert_eq!(parse_graph("edge e1 v1 v2"), Err(GraphError::UndeclaredVertex { edge: "e1".into(), vertex: "v1".into() }));
        assert_eq!(parse_graph("# nothing\n\n"), Err(GraphError::Empty));
        assert_eq!(parse_graph("vertex a\nvertex a"), Err(GraphError::DuplicateId("a".into())));
    }

    #[test]
    fn constructors() {
        assert_eq!(loop_graph(3).unwrap().adjacency(), vec![vec![3]]);
        let p1 = path_graph(1).unwrap();
        assert_eq!((p1.num_vertices(), p1.num_edges()), (2, 1));
        assert_eq!(path_graph(2).unwrap().adjacency(), vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(loop_graph(0), Err(GraphError::ZeroSize));
        let u = disjoint_union(&[loop_graph(2).unwrap(), loop_graph(3).unwrap()]).unwrap();
        assert_eq!(u.adjacency(), vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(u.edges[2].id, "e1^2");
    }

    #[test]
    fn paths() {
        assert_eq!(enumerate_paths(&loop_graph(2).unwrap(), 2).len(), 4);
        let l3 = enumerate_paths(&loop_graph(3).unwrap(), 0);
        assert_eq!(l3, vec![Path::vertex(0)]);
        let u = disjoint_union(&[path_graph(1).unwrap(), path_graph(2).unwrap()]).unwrap();
        let p2 = enumerate_paths(&u, 2);
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[0].label(&u), "e12^2 e23^2");
        let fig = disjoint_union(&[path_graph(1).unwrap(), source_graph_2()]).unwrap();
        assert!(enumerate_paths(&fig, 2).is_empty());
    }

    #[test]
    fn perron_examples() {
        let l3 = perron(&loop_graph(3).unwrap()).unwrap();
        assert_eq!((l3.rho.clone(), l3.eigenvector.clone(), l3.strictly_positive), (Q::int(3), vec![Q::one()], true));
        let l22 = perron(&graph_from_shortcut("L2+L2").unwrap()).unwrap();
        assert_eq!(l22.eigenvector, vec![Q::new(1, 2), Q::new(1, 2)]);
        assert_eq!(l22.rho, Q::int(2));
        let l23 = perron(&graph_from_shortcut("L2+L3").unwrap()).unwrap();
        assert_eq!(l23.eigenvector, vec![Q::zero(), Q::one()]);
        assert!(!l23.strictly_positive);
        assert!(matches!(perron(&path_graph(1).unwrap()), Err(GraphError::Sink(_))));
    }

    #[test]
    fn irrational_radius_is_bracketed() {
        // adjacency [[1,1],[1,0]] has radius the golden ratio
        let g = parse_graph("vertex a\nvertex b\nedge x a a\nedge y a b\nedge z b a").unwrap();
        match perron(&g) {
            Err(GraphError::IrrationalRadius { lo, hi }) => {
                assert!(lo.to_f64() < 1.618034 && hi.to_f64() > 1.618033);
            }
            other => panic!("{other:?}"),
        }
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (1usize..4, proptest::collection::vec((0usize..4, 0usize..4), 1..6)).prop_map(|(n, es)| Graph {
            vertices: (0..n).map(|i| format!("v{i}")).collect(),
            edges: es.iter().enumerate().map(|(i, (s, d))| Edge { id: format!("e{i}"), src: s % n, dst: d % n }).collect(),
            partition: None,
        })
    }

    fn mat_pow_sum(a: &[Vec<u64>], k: usize) -> u64 {
        let n = a.len();
        let mut m: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect();
        for _ in 0..k {
            m = (0..n).map(|i| (0..n).map(|j| (0..n).map(|l| m[i][l] * a[l][j]).sum()).collect()).collect();
        }
        m.iter().flatten().sum()
    }

    proptest! {
        #[test]
        fn path_count_matches_adjacency_powers(g in small_graph(), k in 0usize..5) {
            prop_assert_eq!(enumerate_paths(&g, k).len() as u64, mat_pow_sum(&g.adjacency(), k));
        }

        #[test]
        fn union_adjacency_is_block_diagonal(gs in proptest::collection::vec(small_graph(), 1..4)) {
            let u = disjoint_union(&gs).unwrap();
            let a = u.adjacency();
            let mut off = 0;
            for g in &gs {
                let b = g.adjacency();
                for i in 0..b.len() {
                    for j in 0..a.len() {
                        let expect = if j >= off && j < off + b.len() { b[i][j - off] } else { 0 };
                        prop_assert_eq!(a[off + i][j], expect);
                    }
                }
                off += b.len();
            }
        }

        #[test]
        fn perron_vector_is_eigenvector(g in small_graph()) {
            if let Ok(p) = perron(&g) {
                let a = g.adjacency();
                for i in 0..a.len() {
                    let lhs = (0..a.len()).fold(Q::zero(), |acc, j| &acc + &(&Q::int(a[i][j] as i64) * &p.eigenvector[j]));
                    prop_assert_eq!(lhs, &p.rho * &p.eigenvector[i]);
                }
            }
        }
    }
}
