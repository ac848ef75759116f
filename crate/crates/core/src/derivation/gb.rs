//! Degree-truncated two-sided ideal membership in a free algebra.
//!
//! Every polynomial carries a sugar: an upper bound on the degree of the products
//! `u·r·v` it was assembled from. Processing critical pairs in order of sugar and
//! only reducing by multiples whose sugar fits emulates the homogenized computation,
//! so after completion to sugar `D` a polynomial of degree at most `D` reduces to zero
//! exactly when it lies in `span{u r v : |u| + deg r + |v| ≤ D}`.

use crate::scalar::C;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type Letter = u16;
pub type LWord = Vec<Letter>;

/// Word with degree-then-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub LWord);

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}
impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Terms sorted by decreasing monomial.
pub type Poly = Vec<(LWord, C)>;

pub fn poly_from_map(m: BTreeMap<Mono, C>) -> Poly {
    m.into_iter().rev().map(|(w, c)| (w.0, c)).collect()
}

pub fn poly_degree(p: &Poly) -> usize {
    p.iter().map(|(w, _)| w.len()).max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Src {
    Base(usize),
    Elem(usize),
}

/// `Σ c · u · src · v`.
pub type Origin = Vec<(C, LWord, Src, LWord)>;

#[derive(Debug, Clone)]
pub struct Element {
    pub poly: Poly,
    pub sugar: usize,
    pub origin: Origin,
}

impl Element {
    pub fn lead(&self) -> &LWord {
        &self.poly[0].0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Task {
    Base(usize),
    /// `a·g_i·b − c·g_j·d`, both with leading word `a L_i b = c L_j d`.
    Pair { lcm: Mono, i: usize, a: LWord, b: LWord, j: usize, c: LWord, d: LWord },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbError {
    #[error("ideal basis exceeded {0} stored monomials")]
    Resource(usize),
}

#[derive(Debug, Clone)]
pub struct Gb {
    pub budget: usize,
    pub cap: usize,
    pub base: Vec<Poly>,
    pub elems: Vec<Element>,
    leads: HashMap<LWord, Vec<usize>>,
    queue: BTreeSet<(usize, u8, Task)>,
    stored: usize,
    pub pairs_processed: usize,
}

fn mul_words(a: &[Letter], w: &[Letter], b: &[Letter]) -> LWord {
    let mut v = Vec::with_capacity(a.len() + w.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(w);
    v.extend_from_slice(b);
    v
}

fn add_multiple(acc: &mut BTreeMap<Mono, C>, c: &C, a: &[Letter], p: &Poly, b: &[Letter]) {
    for (w, d) in p {
        let key = Mono(mul_words(a, w, b));
        let v = c * d;
        match acc.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl Gb {
    pub fn new(budget: usize, cap: usize) -> Gb {
        Gb { budget, cap, base: vec![], elems: vec![], leads: HashMap::new(), queue: BTreeSet::new(), stored: 0, pairs_processed: 0 }
    }

    /// Queues a generator of the ideal; returns its base index.
    pub fn add_base(&mut self, p: Poly) -> usize {
        let idx = self.base.len();
        let deg = poly_degree(&p);
        self.base.push(p);
        if deg <= self.budget {
            self.queue.insert((deg, 0, Task::Base(idx)));
        }
        idx
    }

    /// Finds `u·g·v = w` with `sugar(g) + |u| + |v| ≤ limit`.
    fn find_reducer(&self, w: &[Letter], limit: usize) -> Option<(usize, usize, usize)> {
        let n = w.len();
        for len in (1..=n).rev() {
            let slack = n - len;
            for start in 0..=slack {
                if let Some(ids) = self.leads.get(&w[start..start + len]) {
                    for &k in ids {
                        if self.elems[k].sugar + slack <= limit {
                            return Some((k, start, start + len));
                        }
                    }
                }
            }
        }
        None
    }

    /// Full reduction; returns the remainder and the multiples subtracted.
    pub fn reduce(&self, mut acc: BTreeMap<Mono, C>, limit: usize) -> (Poly, Origin) {
        let mut rem = BTreeMap::new();
        let mut steps = Vec::new();
        while let Some((w, c)) = acc.pop_last() {
            match self.find_reducer(&w.0, limit) {
                Some((k, s, e)) => {
                    let a = w.0[..s].to_vec();
                    let b = w.0[e..].to_vec();
                    let g = &self.elems[k].poly;
                    // leading coefficient is one
                    add_multiple(&mut acc, &-c.clone(), &a, &g[1..].to_vec(), &b);
                    steps.push((c, a, Src::Elem(k), b));
                }
                None => {
                    rem.insert(w, c);
                }
            }
        }
        (poly_from_map(rem), steps)
    }

    fn task_poly(&self, t: &Task) -> (BTreeMap<Mono, C>, Origin) {
        let mut acc = BTreeMap::new();
        match t {
            Task::Base(i) => {
                add_multiple(&mut acc, &C::one(), &[], &self.base[*i], &[]);
                (acc, vec![(C::one(), vec![], Src::Base(*i), vec![])])
            }
            Task::Pair { i, a, b, j, c, d, .. } => {
                add_multiple(&mut acc, &C::one(), a, &self.elems[*i].poly, b);
                add_multiple(&mut acc, &C::int(-1), c, &self.elems[*j].poly, d);
                (acc, vec![(C::one(), a.clone(), Src::Elem(*i), b.clone()), (C::int(-1), c.clone(), Src::Elem(*j), d.clone())])
            }
        }
    }

    fn push_pair(&mut self, sugar: usize, t: Task) {
        if sugar <= self.budget {
            self.queue.insert((sugar, 1, t));
        }
    }

    fn new_pairs(&mut self, n: usize) {
        let ln = self.elems[n].lead().clone();
        let sn = self.elems[n].sugar;
        for k in 0..=n {
            let lk = self.elems[k].lead().clone();
            let sk = self.elems[k].sugar;
            // suffix of L_n equals prefix of L_k, and the mirrored case
            for (x, y, sx, sy, ix, iy) in [(&ln, &lk, sn, sk, n, k), (&lk, &ln, sk, sn, k, n)] {
                for t in 1..x.len().min(y.len()) {
                    if x[x.len() - t..] == y[..t] {
                        let tail = y[t..].to_vec();
                        let head = x[..x.len() - t].to_vec();
                        let lcm = Mono(mul_words(&head, y, &[]));
                        let sugar = (sx + tail.len()).max(sy + head.len());
                        self.push_pair(sugar, Task::Pair { lcm, i: ix, a: vec![], b: tail, j: iy, c: head, d: vec![] });
                    }
                }
                if k == n {
                    break;
                }
            }
            if k == n {
                continue;
            }
            // one leading word inside the other
            for (big, small, sb, ss, ib, is) in [(&ln, &lk, sn, sk, n, k), (&lk, &ln, sk, sn, k, n)] {
                if small.len() > big.len() {
                    continue;
                }
                for p in 0..=big.len() - small.len() {
                    if big[p..p + small.len()] == small[..] {
                        let a = big[..p].to_vec();
                        let b = big[p + small.len()..].to_vec();
                        let sugar = sb.max(ss + a.len() + b.len());
                        self.push_pair(sugar, Task::Pair { lcm: Mono(big.clone()), i: ib, a: vec![], b: vec![], j: is, c: a, d: b });
                    }
                }
            }
        }
    }

    /// Processes queued work up to sugar `upto` (clamped to the budget).
    pub fn complete_to(&mut self, upto: usize) -> Result<(), GbError> {
        let upto = upto.min(self.budget);
        while let Some(first) = self.queue.first() {
            if first.0 > upto {
                break;
            }
            let (sugar, _, task) = self.queue.pop_first().unwrap();
            self.pairs_processed += 1;
            let (acc, mut origin) = self.task_poly(&task);
            let (rem, steps) = self.reduce(acc, sugar);
            if rem.is_empty() {
                continue;
            }
            for (c, a, s, b) in steps {
                origin.push((-c, a, s, b));
            }
            let inv = rem[0].1.recip();
            let poly: Poly = rem.into_iter().map(|(w, c)| (w, &c * &inv)).collect();
            let origin: Origin = origin.into_iter().map(|(c, a, s, b)| (&c * &inv, a, s, b)).collect();
            self.stored += poly.len();
            if self.stored > self.cap {
                return Err(GbError::Resource(self.cap));
            }
            let idx = self.elems.len();
            let lead = poly[0].0.clone();
            self.elems.push(Element { poly, sugar, origin });
            let ids = self.leads.entry(lead).or_default();
            ids.push(idx);
            ids.sort_by_key(|&k| self.elems[k].sugar);
            self.new_pairs(idx);
        }
        Ok(())
    }

    pub fn complete(&mut self) -> Result<(), GbError> {
        self.complete_to(self.budget)
    }

    /// Expresses element `k` as `Σ c · u · base_i · v`.
    pub fn flatten(&self, k: usize, memo: &mut HashMap<usize, BTreeMap<(LWord, usize, LWord), C>>) -> BTreeMap<(LWord, usize, LWord), C> {
        if let Some(m) = memo.get(&k) {
            return m.clone();
        }
        let mut out = BTreeMap::new();
        for (c, a, s, b) in self.elems[k].origin.clone() {
            let inner = match s {
                Src::Base(i) => BTreeMap::from([((vec![], i, vec![]), C::one())]),
                Src::Elem(j) => self.flatten(j, memo),
            };
            for ((u, i, v), d) in inner {
                let key = (mul_words(&a, &u, &[]), i, mul_words(&v, &b, &[]));
                let e = out.entry(key.clone()).or_insert_with(C::zero);
                *e += &(&c * &d);
                if e.is_zero() {
                    out.remove(&key);
                }
            }
        }
        memo.insert(k, out.clone());
        out
    }

    /// Certificate for a fully reduced target given its reduction steps.
    pub fn certificate(&self, steps: &Origin) -> BTreeMap<(LWord, usize, LWord), C> {
        let mut memo = HashMap::new();
        let mut out: BTreeMap<(LWord, usize, LWord), C> = BTreeMap::new();
        for (c, a, s, b) in steps {
            let inner = match s {
                Src::Base(i) => BTreeMap::from([((vec![], *i, vec![]), C::one())]),
                Src::Elem(j) => self.flatten(*j, &mut memo),
            };
            for ((u, i, v), d) in inner {
                let key = (mul_words(a, &u, &[]), i, mul_words(&v, b, &[]));
                let e = out.entry(key.clone()).or_insert_with(C::zero);
                *e += &(c * &d);
                if e.is_zero() {
                    out.remove(&key);
                }
            }
        }
        out
    }

    /// Re-expands a certificate against the base polynomials.
    pub fn expand(&self, cert: &BTreeMap<(LWord, usize, LWord), C>) -> Poly {
        let mut acc = BTreeMap::new();
        for ((u, i, v), c) in cert {
            add_multiple(&mut acc, c, u, &self.base[*i], v);
        }
        poly_from_map(acc)
    }

    pub fn stored_monomials(&self) -> usize {
        self.stored
    }
}
