//! B-spheres, canonical keys, Hanf types and the overlap coloring.
//!
//! Spheres are connected (every node is within distance B of the center) and
//! every relation is an injective partial function. A breadth-first traversal
//! from the center that visits, for each symbol in declared order, the
//! successor and then the predecessor therefore assigns the same numbering to
//! any two isomorphic spheres. That numbering is the canonical form; the key
//! is its byte encoding.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{edge_style, escape, DwGraph};
use crate::signature::Signature;
use crate::word::{Alphabet, DataWord, Label, Partition};

/// Spheres above this many nodes are refused by default.
pub const DEFAULT_SIZE_BOUND: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SphereError {
    #[error("sphere around position {center} has {size} nodes, bound is {bound}")]
    TooLarge {
        center: usize,
        size: usize,
        bound: usize,
    },
    #[error("position {0} out of range")]
    OutOfRange(usize),
    #[error("(2|S|+2)^B overflows for B={radius}, |S|={symbols}")]
    Overflow { radius: usize, symbols: usize },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Byte string identifying a sphere up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<u8>);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.0))
    }
}

impl CanonicalKey {
    /// Short prefix of the hex form for tables.
    pub fn short(&self) -> String {
        let h = self.to_string();
        let digest = h.bytes().fold(0xcbf2_9ce4_8422_2325u64, |acc, b| {
            (acc ^ b as u64).wrapping_mul(0x100_0000_01b3)
        });
        format!("{digest:016x}")[..10].to_string()
    }
}

/// A sphere in canonical numbering; node 0 is the center.
#[derive(Clone, Debug)]
pub struct CanonSphere {
    alphabet: Arc<Alphabet>,
    symbols: Arc<[String]>,
    radius: usize,
    labels: Vec<Label>,
    parts: Vec<Partition>,
    next: Vec<Vec<Option<u16>>>,
    prev: Vec<Vec<Option<u16>>>,
    dist: Vec<Vec<u16>>,
    key: CanonicalKey,
}

impl PartialEq for CanonSphere {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for CanonSphere {}

impl PartialOrd for CanonSphere {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonSphere {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl Hash for CanonSphere {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl CanonSphere {
    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn center(&self) -> usize {
        0
    }

    pub fn label(&self, x: usize) -> Label {
        self.labels[x]
    }

    pub fn partition(&self, x: usize) -> &Partition {
        &self.parts[x]
    }

    pub fn next(&self, s: usize, x: usize) -> Option<usize> {
        self.next[s][x].map(usize::from)
    }

    pub fn prev(&self, s: usize, x: usize) -> Option<usize> {
        self.prev[s][x].map(usize::from)
    }

    /// Distance inside the sphere.
    pub fn dist(&self, x: usize, y: usize) -> usize {
        self.dist[x][y] as usize
    }

    /// Symbols (by index) for which `x` has a predecessor in the sphere.
    pub fn ptype(&self, x: usize) -> Vec<usize> {
        (0..self.symbols.len())
            .filter(|&s| self.prev[s][x].is_some())
            .collect()
    }

    pub fn edges(&self, s: usize) -> Vec<(usize, usize)> {
        self.next[s]
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.map(|y| (x, y as usize)))
            .collect()
    }

    /// DOT rendering; the center is double-circled and `active`, if given, bold.
    pub fn to_dot(&self, name: &str, active: Option<usize>, positions: Option<&[usize]>) -> String {
        let mut s = format!("digraph \"{}\" {{\n  rankdir=LR;\n", escape(name));
        for x in 0..self.len() {
            let mut attrs = vec![format!(
                "label=\"{}:{}/{}\"",
                positions.map_or(x, |p| p[x]),
                escape(self.alphabet.name(self.labels[x])),
                self.parts[x]
            )];
            if x == 0 {
                attrs.push("shape=doublecircle".into());
            }
            if active == Some(x) {
                attrs.push("style=bold".into());
            }
            let _ = writeln!(s, "  v{x} [{}];", attrs.join(", "));
        }
        for (k, sym) in self.symbols.iter().enumerate() {
            for (x, y) in self.edges(k) {
                let _ = writeln!(
                    s,
                    "  v{x} -> v{y} [label=\"{}\", style={}];",
                    escape(sym),
                    edge_style(sym, k)
                );
            }
        }
        s.push_str("}\n");
        s
    }
}

/// `B-Sph(w, i)` together with the word positions of its canonical nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sphere {
    pub center: usize,
    /// `positions[x]` is the word position of canonical node `x`.
    pub positions: Vec<usize>,
    pub canon: Arc<CanonSphere>,
}

impl Sphere {
    pub fn key(&self) -> &CanonicalKey {
        self.canon.key()
    }

    /// Canonical node of word position `i`, if inside the sphere.
    pub fn node_of(&self, i: usize) -> Option<usize> {
        self.positions.iter().position(|&p| p == i)
    }

    /// Node set as sorted word positions.
    pub fn node_set(&self) -> Vec<usize> {
        let mut v = self.positions.clone();
        v.sort_unstable();
        v
    }

    /// Edges of symbol `s` as word positions, sorted.
    pub fn edges(&self, s: usize) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .canon
            .edges(s)
            .into_iter()
            .map(|(x, y)| (self.positions[x], self.positions[y]))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn to_dot(&self, name: &str, active: Option<usize>) -> String {
        self.canon.to_dot(name, active, Some(&self.positions))
    }
}

/// Deterministic traversal order from `root` over the nodes accepted by
/// `inside`; returns the visited nodes in order.
fn bfs_order(g: &DwGraph, root: usize, inside: &dyn Fn(usize) -> bool) -> Vec<usize> {
    let mut order = vec![root];
    let mut seen = vec![false; g.len() + 1];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for s in 0..g.symbol_count() {
            for v in g.next(s, u).into_iter().chain(g.prev(s, u)) {
                if !seen[v] && inside(v) {
                    seen[v] = true;
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
    }
    order
}

struct Encoded {
    labels: Vec<Label>,
    parts: Vec<Partition>,
    next: Vec<Vec<Option<u16>>>,
    prev: Vec<Vec<Option<u16>>>,
    bytes: Vec<u8>,
}

/// Encodes the substructure induced by `order` (already canonical).
fn encode(g: &DwGraph, order: &[usize], header: &[u8]) -> Encoded {
    let n = order.len();
    let mut index = vec![u16::MAX; g.len() + 1];
    for (x, &p) in order.iter().enumerate() {
        index[p] = x as u16;
    }
    let syms = g.symbol_count();
    let mut next = vec![vec![None; n]; syms];
    let mut prev = vec![vec![None; n]; syms];
    let mut bytes = header.to_vec();
    bytes.extend_from_slice(&(n as u16).to_le_bytes());
    bytes.push(syms as u8);
    bytes.push(g.alphabet().m() as u8);
    for (x, &p) in order.iter().enumerate() {
        bytes.extend_from_slice(&g.label(p).0.to_le_bytes());
        bytes.extend_from_slice(g.partition(p).rgs());
        for s in 0..syms {
            let y = g.next(s, p).map(|q| index[q]).filter(|&y| y != u16::MAX);
            next[s][x] = y;
            if let Some(y) = y {
                prev[s][y as usize] = Some(x as u16);
            }
            bytes.extend_from_slice(&y.unwrap_or(u16::MAX).to_le_bytes());
        }
    }
    Encoded {
        labels: order.iter().map(|&p| g.label(p)).collect(),
        parts: order.iter().map(|&p| g.partition(p).clone()).collect(),
        next,
        prev,
        bytes,
    }
}

fn all_pairs(next: &[Vec<Option<u16>>], prev: &[Vec<Option<u16>>], n: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::with_capacity(n);
    for src in 0..n {
        let mut d = vec![u16::MAX; n];
        d[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for s in 0..next.len() {
                for v in next[s][u].into_iter().chain(prev[s][u]) {
                    let v = v as usize;
                    if d[v] == u16::MAX {
                        d[v] = d[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        out.push(d);
    }
    out
}

/// `B-Sph(w, i)` with the default size bound.
pub fn extract_sphere(g: &DwGraph, i: usize, radius: usize) -> Result<Sphere, SphereError> {
    extract_sphere_bounded(g, i, radius, DEFAULT_SIZE_BOUND)
}

pub fn extract_sphere_bounded(
    g: &DwGraph,
    i: usize,
    radius: usize,
    bound: usize,
) -> Result<Sphere, SphereError> {
    if i == 0 || i > g.len() {
        return Err(SphereError::OutOfRange(i));
    }
    let dist = g.distances_from(i, Some(radius));
    let order = bfs_order(g, i, &|v| dist[v].is_some());
    if order.len() > bound {
        return Err(SphereError::TooLarge {
            center: i,
            size: order.len(),
            bound,
        });
    }
    let header = (radius as u16).to_le_bytes();
    let enc = encode(g, &order, &header);
    let n = order.len();
    let dist = all_pairs(&enc.next, &enc.prev, n);
    let canon = CanonSphere {
        alphabet: g.alphabet().clone(),
        symbols: g.symbols().iter().cloned().collect(),
        radius,
        labels: enc.labels,
        parts: enc.parts,
        next: enc.next,
        prev: enc.prev,
        dist,
        key: CanonicalKey(enc.bytes),
    };
    Ok(Sphere {
        center: i,
        positions: order,
        canon: Arc::new(canon),
    })
}

/// Isomorphism-complete key of the whole graph: per component the least
/// rooted encoding, then the sorted multiset of component keys.
pub fn graph_key(g: &DwGraph) -> Vec<Vec<u8>> {
    let mut comps = Vec::new();
    for comp in g.components() {
        let member = |v: usize| comp.binary_search(&v).is_ok();
        let best = comp
            .iter()
            .map(|&root| encode(g, &bfs_order(g, root, &member), &[]).bytes)
            .min()
            .unwrap();
        comps.push(best);
    }
    comps.sort();
    comps
}

/// `(2|S|+2)^B`.
pub fn max_sphere_size(radius: usize, symbols: usize) -> Result<u64, SphereError> {
    let base = (2 * symbols as u64)
        .checked_add(2)
        .ok_or(SphereError::Overflow { radius, symbols })?;
    let exp = u32::try_from(radius).map_err(|_| SphereError::Overflow { radius, symbols })?;
    base.checked_pow(exp)
        .ok_or(SphereError::Overflow { radius, symbols })
}

/// `(2|S|+1)·maxSize²+1`, the size of the color palette.
pub fn color_bound(radius: usize, symbols: usize) -> Result<u64, SphereError> {
    let size = max_sphere_size(radius, symbols)?;
    size.checked_mul(size)
        .and_then(|s2| s2.checked_mul(2 * symbols as u64 + 1))
        .and_then(|v| v.checked_add(1))
        .ok_or(SphereError::Overflow { radius, symbols })
}

/// All B-spheres of a graph, indexed by position - 1.
pub fn all_spheres(g: &DwGraph, radius: usize) -> Result<Vec<Sphere>, SphereError> {
    (1..=g.len())
        .map(|i| extract_sphere(g, i, radius))
        .collect()
}

/// Counts of canonical sphere classes truncated at the threshold. A stored
/// count equal to `threshold` means "at least `threshold`".
#[derive(Clone, Debug)]
pub struct HanfType {
    pub radius: usize,
    pub threshold: usize,
    counts: BTreeMap<CanonicalKey, usize>,
    spheres: BTreeMap<CanonicalKey, Arc<CanonSphere>>,
}

impl PartialEq for HanfType {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius
            && self.threshold == other.threshold
            && self.counts == other.counts
    }
}

impl Eq for HanfType {}

impl Hash for HanfType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.radius.hash(state);
        self.threshold.hash(state);
        self.counts.hash(state);
    }
}

impl HanfType {
    pub fn from_spheres<'a>(
        radius: usize,
        threshold: usize,
        spheres: impl IntoIterator<Item = &'a Arc<CanonSphere>>,
    ) -> HanfType {
        let mut counts = BTreeMap::new();
        let mut reps = BTreeMap::new();
        for s in spheres {
            let c = counts.entry(s.key().clone()).or_insert(0);
            *c = (*c + 1).min(threshold);
            reps.entry(s.key().clone()).or_insert_with(|| s.clone());
        }
        HanfType {
            radius,
            threshold,
            counts,
            spheres: reps,
        }
    }

    pub fn counts(&self) -> &BTreeMap<CanonicalKey, usize> {
        &self.counts
    }

    pub fn count(&self, key: &CanonicalKey) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn sphere(&self, key: &CanonicalKey) -> Option<&Arc<CanonSphere>> {
        self.spheres.get(key)
    }

    /// Truth of the atom `S ≤ n`; `None` when the truncation hides the answer.
    pub fn atom_le(&self, key: &CanonicalKey, n: usize) -> Option<bool> {
        let c = self.count(key);
        if c < self.threshold {
            Some(c <= n)
        } else if n < self.threshold {
            Some(false)
        } else {
            None
        }
    }

    /// Stable textual key: `B:t:` followed by `hexkey*count` entries.
    pub fn type_key(&self) -> String {
        let entries = self
            .counts
            .iter()
            .map(|(k, c)| format!("{k}*{c}"))
            .collect::<Vec<_>>();
        format!("{}:{}:{}", self.radius, self.threshold, entries.join(","))
    }
}

/// `hanf_type(sig, w, B, t)`.
pub fn hanf_type(
    sig: &Signature,
    w: &DataWord,
    radius: usize,
    threshold: usize,
) -> Result<HanfType, SphereError> {
    let g = crate::graph::build_graph(sig, w)?;
    hanf_type_of_graph(&g, radius, threshold)
}

pub fn hanf_type_of_graph(
    g: &DwGraph,
    radius: usize,
    threshold: usize,
) -> Result<HanfType, SphereError> {
    let spheres = all_spheres(g, radius)?;
    Ok(HanfType::from_spheres(
        radius,
        threshold.max(1),
        spheres.iter().map(|s| &s.canon),
    ))
}

/// Pairs `(i, i')`, `i < i'`, with isomorphic B-spheres and `dist ≤ 2B+1`.
pub fn overlap_edges(g: &DwGraph, spheres: &[Sphere], radius: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 1..=g.len() {
        for j in g.ball(i, 2 * radius + 1) {
            if j > i && spheres[i - 1].key() == spheres[j - 1].key() {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Greedy coloring of the overlap graph in ascending position order; entry
/// `i-1` is the color of position `i`, colors start at 1.
pub fn overlap_coloring(g: &DwGraph, radius: usize) -> Result<Vec<u32>, SphereError> {
    let spheres = all_spheres(g, radius)?;
    Ok(coloring_from(g, &spheres, radius))
}

pub(crate) fn coloring_from(g: &DwGraph, spheres: &[Sphere], radius: usize) -> Vec<u32> {
    let n = g.len();
    let mut adj = vec![Vec::new(); n + 1];
    for (i, j) in overlap_edges(g, spheres, radius) {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut color = vec![0u32; n + 1];
    for i in 1..=n {
        let used: Vec<u32> = adj[i]
            .iter()
            .map(|&j| color[j])
            .filter(|&c| c > 0)
            .collect();
        color[i] = (1..).find(|c| !used.contains(c)).unwrap();
    }
    color.split_off(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn fig1() -> DwGraph {
        let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        let w = DataWord::parse_compact(ab, "(r,8)(r,5)(r,3)(r,4)(a,3)(a,4)(a,5)(a,4)").unwrap();
        build_graph(&Signature::succ_cls1(), &w).unwrap()
    }

    #[test]
    fn fig1_sphere_around_4() {
        let s = extract_sphere(&fig1(), 4, 1).unwrap();
        assert_eq!(s.node_set(), vec![3, 4, 5, 6]);
        assert_eq!(s.edges(0), vec![(3, 4), (4, 5), (5, 6)]);
        assert_eq!(s.edges(1), vec![(3, 5), (4, 6)]);
        assert_eq!(s.positions[0], 4);
        assert_eq!(extract_sphere(&fig1(), 1, 3).unwrap().canon.len(), 8);
        assert_eq!(extract_sphere(&fig1(), 6, 0).unwrap().node_set(), vec![6]);
    }

    #[test]
    fn distinct_keys_for_3_and_4() {
        let g = fig1();
        let a = extract_sphere(&g, 3, 1).unwrap();
        let b = extract_sphere(&g, 4, 1).unwrap();
        assert_ne!(a.key(), b.key());
    }

    #[test]
    fn sizes() {
        assert_eq!(max_sphere_size(0, 2).unwrap(), 1);
        assert_eq!(max_sphere_size(1, 2).unwrap(), 6);
        assert_eq!(max_sphere_size(2, 2).unwrap(), 36);
        assert_eq!(color_bound(1, 2).unwrap(), 5 * 36 + 1);
        assert!(max_sphere_size(100, 3).is_err());
    }

    #[test]
    fn hanf_type_radius_zero() {
        let t = hanf_type_of_graph(&fig1(), 0, 2).unwrap();
        assert_eq!(t.counts().len(), 2);
        assert!(t.counts().values().all(|&c| c == 2));
    }

    #[test]
    fn coloring_of_two_requests() {
        let ab = Arc::new(Alphabet::new(["r", "a"], 1).unwrap());
        // Rooted spheres of (r,1)(r,2) differ (outgoing vs incoming succ edge).
        let w = DataWord::parse_compact(ab.clone(), "(r,1)(r,2)").unwrap();
        let g = build_graph(&Signature::succ_cls1(), &w).unwrap();
        assert_eq!(overlap_coloring(&g, 1).unwrap(), vec![1, 1]);
        let w = DataWord::parse_compact(ab, "(r,1)(r,2)(r,3)(r,4)").unwrap();
        let g = build_graph(&Signature::succ_cls1(), &w).unwrap();
        assert_eq!(overlap_coloring(&g, 1).unwrap(), vec![1, 1, 2, 1]);
        assert_eq!(overlap_coloring(&fig1(), 1).unwrap(), vec![1; 8]);
    }

    #[test]
    fn size_bound_enforced() {
        assert!(matches!(
            extract_sphere_bounded(&fig1(), 1, 3, 4),
            Err(SphereError::TooLarge { size: 8, .. })
        ));
    }
}
