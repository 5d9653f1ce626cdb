//! Conflict, offset-conflict, shift, product and explicit graphs.
//!
//! A graph is available in two forms. A [`GraphSpec`] answers adjacency
//! queries through [`adjacent`] without materializing anything, and
//! [`build_graph`] turns a spec into an explicit [`Graph`] with vertices in
//! canonical (lexicographic) order when the vertex count fits the caps.
//!
//! Maximal independent sets of conflict graphs are in bijection with label
//! functions `f: universe -> [m]`: the set `I(f)` collects every tuple whose
//! `i`-th element is labelled `i`. [`maximal_independent_sets`] enumerates
//! them through that correspondence; [`Graph::maximal_independent_sets`] is
//! the generic Bron-Kerbosch enumerator used as the independent check.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Caps, Error, Result};

/// A universe position.
pub type Element = BigUint;

/// A strictly increasing tuple of universe positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(Vec<Element>);

impl Tuple {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidVertex(format!(
                "tuple {} is not strictly increasing",
                fmt_elements(&elements)
            )));
        }
        Ok(Tuple(elements))
    }

    pub fn from_u64(elements: &[u64]) -> Result<Self> {
        Tuple::new(elements.iter().map(|&e| BigUint::from(e)).collect())
    }

    pub fn elements(&self) -> &[Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Elements as machine words, when they all fit.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.0.iter().map(|e| e.to_u64()).collect()
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_elements(&self.0))
    }
}

fn fmt_elements(elements: &[Element]) -> String {
    let parts: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(","))
}

/// A vertex of any studied graph: a tuple, or a pair for product graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Tuple(Tuple),
    Pair(Box<Vertex>, Box<Vertex>),
}

impl Vertex {
    pub fn tuple(elements: &[u64]) -> Result<Self> {
        Ok(Vertex::Tuple(Tuple::from_u64(elements)?))
    }

    pub fn pair(a: Vertex, b: Vertex) -> Self {
        Vertex::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_tuple(&self) -> Option<&Tuple> {
        match self {
            Vertex::Tuple(t) => Some(t),
            Vertex::Pair(..) => None,
        }
    }

    /// Product vertices flattened into one element sequence. For a k-fold
    /// conflict product over disjoint ranges this is the length-`km` tuple.
    pub fn flatten(&self) -> Vec<Element> {
        match self {
            Vertex::Tuple(t) => t.0.clone(),
            Vertex::Pair(a, b) => {
                let mut out = a.flatten();
                out.extend(b.flatten());
                out
            }
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Tuple(t) => write!(f, "{t}"),
            Vertex::Pair(a, b) => write!(f, "<{a},{b}>"),
        }
    }
}

/// An explicit graph given by its vertex list and edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSpec {
    vertices: Vec<Vertex>,
    edges: BTreeSet<(usize, usize)>,
}

impl ExplicitSpec {
    /// Vertices are re-sorted into canonical order; edges refer to positions
    /// in the list as given.
    pub fn new(vertices: Vec<Vertex>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = vertices.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
        if order.windows(2).any(|w| vertices[w[0]] == vertices[w[1]]) {
            return Err(Error::InvalidSpec("duplicate vertex in explicit graph".into()));
        }
        let mut new_index = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut edge_set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidSpec(format!(
                    "edge ({a},{b}) references a missing vertex (graph has {n})"
                )));
            }
            if a == b {
                return Err(Error::InvalidSpec(format!("self-loop at vertex {a}")));
            }
            let (x, y) = (new_index[a], new_index[b]);
            edge_set.insert((x.min(y), x.max(y)));
        }
        let mut sorted = vertices;
        sorted.sort();
        Ok(ExplicitSpec {
            vertices: sorted,
            edges: edge_set,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Description of a graph from one of the studied families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSpec {
    /// Size-`m` subsets of `[offset+1, offset+width]`, adjacent when they
    /// share an element at different positions.
    Conflict {
        m: usize,
        width: BigUint,
        offset: BigUint,
    },
    /// Size-`n` subsets of `[u]`, `(a_1..a_n)` adjacent to `(a_2..a_{n+1})`.
    Shift { n: usize, u: BigUint },
    /// Vertex set `V1 x V2`, adjacent when adjacent in either coordinate.
    Product(Box<GraphSpec>, Box<GraphSpec>),
    Explicit(Arc<ExplicitSpec>),
}

impl GraphSpec {
    pub fn conflict(m: usize, width: u64) -> Result<Self> {
        Self::offset_conflict(m, BigUint::from(width), BigUint::zero())
    }

    pub fn offset_conflict(m: usize, width: BigUint, offset: BigUint) -> Result<Self> {
        let spec = GraphSpec::Conflict { m, width, offset };
        spec.validate()?;
        Ok(spec)
    }

    pub fn shift(n: usize, u: u64) -> Result<Self> {
        let spec = GraphSpec::Shift {
            n,
            u: BigUint::from(u),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn explicit(vertices: Vec<Vertex>, edges: &[(usize, usize)]) -> Result<Self> {
        Ok(GraphSpec::Explicit(Arc::new(ExplicitSpec::new(vertices, edges)?)))
    }

    /// Explicit graph on vertices `(1)..(n)` with 0-based edge endpoints.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let vertices = (1..=n as u64)
            .map(|i| Vertex::tuple(&[i]))
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(vertices, edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::numbered(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSpec(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|a| (a, (a + 1) % n)).collect();
        Self::numbered(n, &edges)
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::numbered(n, &[])
    }

    /// `G1 ∨ G2`.
    pub fn product(a: GraphSpec, b: GraphSpec) -> GraphSpec {
        GraphSpec::Product(Box::new(a), Box::new(b))
    }

    /// Product of `k` offset conflict graphs over the disjoint ranges
    /// `[jM+1, (j+1)M]`, `j = 0..k`.
    pub fn k_fold_conflict(m: usize, width: u64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("k-fold product needs k >= 1".into()));
        }
        let w = BigUint::from(width);
        let mut spec = Self::offset_conflict(m, w.clone(), BigUint::zero())?;
        for j in 1..k {
            let next = Self::offset_conflict(m, w.clone(), &w * BigUint::from(j))?;
            spec = Self::product(spec, next);
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GraphSpec::Conflict { m, width, .. } => {
                if *m == 0 {
                    return Err(Error::InvalidSpec("conflict graph needs m >= 1".into()));
                }
                if *width < BigUint::from(*m) {
                    return Err(Error::InvalidSpec(format!(
                        "conflict graph needs M >= m (M = {width}, m = {m})"
                    )));
                }
                Ok(())
            }
            GraphSpec::Shift { n, u } => {
                if *n == 0 {
                    return Err(Error::InvalidSpec("shift graph needs n >= 1".into()));
                }
                if *u < BigUint::from(*n) {
                    return Err(Error::InvalidSpec(format!(
                        "shift graph needs u >= n (u = {u}, n = {n})"
                    )));
                }
                Ok(())
            }
            GraphSpec::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            GraphSpec::Explicit(_) => Ok(()),
        }
    }

    /// Number of vertices, exactly.
    pub fn vertex_count(&self) -> BigUint {
        match self {
            GraphSpec::Conflict { m, width, .. } => binomial(width, *m),
            GraphSpec::Shift { n, u } => binomial(u, *n),
            GraphSpec::Product(a, b) => a.vertex_count() * b.vertex_count(),
            GraphSpec::Explicit(e) => BigUint::from(e.vertices.len()),
        }
    }

    /// Checks that `v` is a vertex of this graph.
    pub fn check_vertex(&self, v: &Vertex) -> Result<()> {
        match (self, v) {
            (GraphSpec::Conflict { m, width, offset }, Vertex::Tuple(t)) => {
                check_tuple(t, *m, &(offset + BigUint::one()), &(offset + width))
            }
            (GraphSpec::Shift { n, u }, Vertex::Tuple(t)) => {
                check_tuple(t, *n, &BigUint::one(), u)
            }
            (GraphSpec::Product(a, b), Vertex::Pair(x, y)) => {
                a.check_vertex(x)?;
                b.check_vertex(y)
            }
            (GraphSpec::Explicit(e), v) => match e.index_of(v) {
                Some(_) => Ok(()),
                None => Err(Error::InvalidVertex(format!("{v} is not in the explicit graph"))),
            },
            (_, v) => Err(Error::InvalidVertex(format!(
                "{v} has the wrong shape for this graph family"
            ))),
        }
    }

    /// All vertices in canonical order.
    pub fn vertices(&self, caps: &Caps) -> Result<Vec<Vertex>> {
        self.validate()?;
        caps.check_vertices(&self.vertex_count())?;
        Ok(self.vertices_unchecked())
    }

    fn vertices_unchecked(&self) -> Vec<Vertex> {
        match self {
            GraphSpec::Conflict { m, width, offset } => {
                let w = width.to_u64().expect("width checked against cap");
                combinations(w, *m)
                    .map(|c| {
                        Vertex::Tuple(Tuple(
                            c.into_iter().map(|x| offset + BigUint::from(x)).collect(),
                        ))
                    })
                    .collect()
            }
            GraphSpec::Shift { n, u } => {
                let u = u.to_u64().expect("universe checked against cap");
                combinations(u, *n)
                    .map(|c| Vertex::Tuple(Tuple(c.into_iter().map(BigUint::from).collect())))
                    .collect()
            }
            GraphSpec::Product(a, b) => {
                let va = a.vertices_unchecked();
                let vb = b.vertices_unchecked();
                let mut out = Vec::with_capacity(va.len() * vb.len());
                for x in &va {
                    for y in &vb {
                        out.push(Vertex::pair(x.clone(), y.clone()));
                    }
                }
                out
            }
            GraphSpec::Explicit(e) => e.vertices.clone(),
        }
    }
}

fn check_tuple(t: &Tuple, len: usize, lo: &BigUint, hi: &BigUint) -> Result<()> {
    if t.len() != len {
        return Err(Error::InvalidVertex(format!(
            "{t} has length {}, expected {len}",
            t.len()
        )));
    }
    if let (Some(first), Some(last)) = (t.0.first(), t.0.last()) {
        if first < lo || last > hi {
            return Err(Error::InvalidVertex(format!("{t} leaves the universe [{lo}, {hi}]")));
        }
    }
    Ok(())
}

/// Adjacency through the implicit predicate of `spec`.
pub fn adjacent(spec: &GraphSpec, v: &Vertex, w: &Vertex) -> Result<bool> {
    spec.check_vertex(v)?;
    spec.check_vertex(w)?;
    Ok(adjacent_unchecked(spec, v, w))
}

fn adjacent_unchecked(spec: &GraphSpec, v: &Vertex, w: &Vertex) -> bool {
    if v == w {
        return false;
    }
    match (spec, v, w) {
        (GraphSpec::Conflict { .. }, Vertex::Tuple(a), Vertex::Tuple(b)) => {
            tuples_conflict(&a.0, &b.0)
        }
        (GraphSpec::Shift { .. }, Vertex::Tuple(a), Vertex::Tuple(b)) => {
            is_shift(&a.0, &b.0) || is_shift(&b.0, &a.0)
        }
        (GraphSpec::Product(sa, sb), Vertex::Pair(a1, a2), Vertex::Pair(b1, b2)) => {
            adjacent_unchecked(sa, a1, b1) || adjacent_unchecked(sb, a2, b2)
        }
        (GraphSpec::Explicit(e), v, w) => match (e.index_of(v), e.index_of(w)) {
            (Some(a), Some(b)) => e.has_edge(a, b),
            _ => false,
        },
        _ => false,
    }
}

/// True iff some element occurs at different positions in the two sorted
/// tuples.
pub fn tuples_conflict(a: &[Element], b: &[Element]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if i != j {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

/// `b` is the successor shift of `a`: `b = (a_2, ..., a_n, c)`.
fn is_shift(a: &[Element], b: &[Element]) -> bool {
    a.len() == b.len() && a[1..] == b[..b.len() - 1]
}

/// An explicit undirected simple graph. Vertices are in canonical order, so
/// vertex `i` is `vertices()[i]` and DIMACS id `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Edges are normalized to `(low, high)`, sorted and deduplicated.
    pub fn from_edges(vertices: Vec<Vertex>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidSpec(format!("bad edge ({a},{b}) for {n} vertices")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &list {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        Ok(Graph {
            vertices,
            edges: list,
            neighbors,
        })
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    /// Neighborhoods as bitsets.
    pub fn adjacency_bitsets(&self) -> Vec<FixedBitSet> {
        let n = self.order();
        self.neighbors
            .iter()
            .map(|nb| {
                let mut set = FixedBitSet::with_capacity(n);
                for &w in nb {
                    set.insert(w);
                }
                set
            })
            .collect()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| a != b && !self.is_adjacent(a, b)))
    }

    /// Independent and not extendable by any vertex.
    pub fn is_maximal_independent(&self, set: &[usize]) -> bool {
        if !self.is_independent(set) {
            return false;
        }
        let mut covered = FixedBitSet::with_capacity(self.order());
        for &v in set {
            covered.insert(v);
            for &w in &self.neighbors[v] {
                covered.insert(w);
            }
        }
        covered.count_ones(..) == self.order()
    }

    /// All maximal independent sets as sorted index lists, in lexicographic
    /// order. Bron-Kerbosch with pivoting, run on the complement graph.
    pub fn maximal_independent_sets(&self, caps: &Caps) -> Result<Vec<Vec<usize>>> {
        let n = self.order();
        let adj = self.adjacency_bitsets();
        // Non-neighbors excluding the vertex itself.
        let non_adj: Vec<FixedBitSet> = (0..n)
            .map(|v| {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert_range(..);
                s.difference_with(&adj[v]);
                s.set(v, false);
                s
            })
            .collect();
        let mut p = FixedBitSet::with_capacity(n);
        p.insert_range(..);
        let x = FixedBitSet::with_capacity(n);
        let mut out = Vec::new();
        let mut r = Vec::new();
        bron_kerbosch(&non_adj, &mut r, p, x, &mut out, caps.max_independent_sets)?;
        for set in &mut out {
            set.sort_unstable();
        }
        out.sort();
        Ok(out)
    }

    /// Subgraph induced by `keep` (indices in canonical order), preserving
    /// relative order.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut map = vec![usize::MAX; self.order()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let vertices = keep.iter().map(|&i| self.vertices[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| map[a] != usize::MAX && map[b] != usize::MAX)
            .map(|&(a, b)| (map[a], map[b]));
        Graph::from_edges(vertices, edges)
    }

    /// DIMACS edge format with 1-based ids in canonical order.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p edge {} {}\n", self.order(), self.edge_count()));
        for &(a, b) in &self.edges {
            out.push_str(&format!("e {} {}\n", a + 1, b + 1));
        }
        out
    }

    /// Parses DIMACS edge format; vertex `i` becomes the tuple `(i)`.
    pub fn from_dimacs(text: &str) -> Result<Graph> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let bad = || Error::InvalidSpec(format!("DIMACS line {}: {line:?}", lineno + 1));
            match parts.next() {
                None | Some("c") => {}
                Some("p") => {
                    let _kind = parts.next().ok_or_else(bad)?;
                    n = Some(parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?);
                }
                Some("e") => {
                    let a: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                    let b: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                    if a == 0 || b == 0 {
                        return Err(bad());
                    }
                    edges.push((a - 1, b - 1));
                }
                Some(_) => return Err(bad()),
            }
        }
        let n = n.ok_or_else(|| Error::InvalidSpec("DIMACS input lacks a problem line".into()))?;
        let vertices = (1..=n as u64)
            .map(|i| Vertex::tuple(&[i]))
            .collect::<Result<Vec<_>>>()?;
        Graph::from_edges(vertices, edges)
    }
}

fn bron_kerbosch(
    nbr: &[FixedBitSet],
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
    limit: u64,
) -> Result<()> {
    if p.is_clear() && x.is_clear() {
        if out.len() as u64 >= limit {
            return Err(Error::cap("max_independent_sets", out.len() + 1, limit));
        }
        out.push(r.clone());
        return Ok(());
    }
    let pivot = p
        .union(&x)
        .max_by_key(|&u| p.intersection(&nbr[u]).count())
        .expect("p or x is nonempty");
    let candidates: Vec<usize> = p.difference(&nbr[pivot]).collect();
    for v in candidates {
        r.push(v);
        let np = p.intersection(&nbr[v]).collect::<FixedBitSet>();
        let nx = x.intersection(&nbr[v]).collect::<FixedBitSet>();
        bron_kerbosch(nbr, r, grow(np, nbr.len()), grow(nx, nbr.len()), out, limit)?;
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
    Ok(())
}

fn grow(mut s: FixedBitSet, n: usize) -> FixedBitSet {
    s.grow(n);
    s
}

/// Builds the explicit graph of `spec`.
pub fn build_graph(spec: &GraphSpec, caps: &Caps) -> Result<Graph> {
    let vertices = spec.vertices(caps)?;
    let edges = match spec {
        GraphSpec::Conflict { .. } => conflict_edges(&vertices),
        GraphSpec::Shift { .. } => shift_edges(&vertices),
        GraphSpec::Product(a, b) => {
            let ga = build_graph(a, caps)?;
            let gb = build_graph(b, caps)?;
            product_edges(&ga, &gb)
        }
        GraphSpec::Explicit(e) => e.edges.iter().copied().collect(),
    };
    Graph::from_edges(vertices, edges)
}

/// Edges from an element index: two occurrences at different positions.
fn conflict_edges(vertices: &[Vertex]) -> Vec<(usize, usize)> {
    use std::collections::HashMap;
    let mut occurrences: HashMap<&Element, Vec<(usize, usize)>> = HashMap::new();
    for (idx, v) in vertices.iter().enumerate() {
        if let Vertex::Tuple(t) = v {
            for (pos, e) in t.0.iter().enumerate() {
                occurrences.entry(e).or_default().push((idx, pos));
            }
        }
    }
    let mut edges = Vec::new();
    for occ in occurrences.values() {
        for (i, &(a, pa)) in occ.iter().enumerate() {
            for &(b, pb) in &occ[i + 1..] {
                if pa != pb {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    edges
}

fn shift_edges(vertices: &[Vertex]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (idx, v) in vertices.iter().enumerate() {
        let Vertex::Tuple(t) = v else { continue };
        // Successors share the suffix as a prefix; they sit in a contiguous
        // block of the lexicographic order.
        let prefix = &t.0[1..];
        let start = vertices.partition_point(|w| match w {
            Vertex::Tuple(u) => &u.0[..u.0.len() - 1] < prefix,
            _ => true,
        });
        for (j, w) in vertices.iter().enumerate().skip(start) {
            let Vertex::Tuple(u) = w else { break };
            if &u.0[..u.0.len() - 1] != prefix {
                break;
            }
            if j != idx {
                edges.push((idx.min(j), idx.max(j)));
            }
        }
    }
    edges
}

fn product_edges(a: &Graph, b: &Graph) -> Vec<(usize, usize)> {
    let nb = b.order();
    let n = a.order() * nb;
    let mut edges = Vec::new();
    for x in 0..n {
        let (x1, x2) = (x / nb, x % nb);
        for y in x + 1..n {
            let (y1, y2) = (y / nb, y % nb);
            if a.is_adjacent(x1, y1) || b.is_adjacent(x2, y2) {
                edges.push((x, y));
            }
        }
    }
    edges
}

/// A total map from the universe interval to indices `1..=m`, materialized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelFunction {
    start: Element,
    labels: Vec<usize>,
}

/// Anything that labels universe elements with indices. Huge universes use
/// closures as element-wise oracles.
pub trait Labeling {
    fn label(&self, e: &Element) -> usize;
}

impl<F: Fn(&Element) -> usize> Labeling for F {
    fn label(&self, e: &Element) -> usize {
        self(e)
    }
}

impl Labeling for LabelFunction {
    /// Elements outside the domain get label 0, which matches no index.
    fn label(&self, e: &Element) -> usize {
        self.get(e).unwrap_or(0)
    }
}

impl LabelFunction {
    /// `labels[j]` is the label of `start + j`.
    pub fn new(start: Element, labels: Vec<usize>) -> Self {
        LabelFunction { start, labels }
    }

    /// Labels for `1..=labels.len()`.
    pub fn from_labels(labels: &[usize]) -> Self {
        LabelFunction::new(BigUint::one(), labels.to_vec())
    }

    pub fn start(&self) -> &Element {
        &self.start
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn width(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, e: &Element) -> Option<usize> {
        if e < &self.start {
            return None;
        }
        let off = (e - &self.start).to_usize()?;
        self.labels.get(off).copied()
    }

    /// Every function from `[start, start + width)` to `1..=m`, in
    /// lexicographic order of the label vector.
    pub fn all(m: usize, start: Element, width: usize, caps: &Caps) -> Result<LabelFunctions> {
        let count = BigUint::from(m).pow(width as u32);
        caps.check_label_functions(&count)?;
        Ok(LabelFunctions {
            m,
            start,
            current: if m == 0 && width > 0 { None } else { Some(vec![1; width]) },
        })
    }
}

/// Iterator returned by [`LabelFunction::all`].
pub struct LabelFunctions {
    m: usize,
    start: Element,
    current: Option<Vec<usize>>,
}

impl Iterator for LabelFunctions {
    type Item = LabelFunction;

    fn next(&mut self) -> Option<LabelFunction> {
        let cur = self.current.take()?;
        let out = LabelFunction::new(self.start.clone(), cur.clone());
        let mut next = cur;
        let mut pos = next.len();
        loop {
            if pos == 0 {
                return Some(out);
            }
            pos -= 1;
            if next[pos] < self.m {
                next[pos] += 1;
                for slot in &mut next[pos + 1..] {
                    *slot = 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
    }
}

fn conflict_params(spec: &GraphSpec) -> Result<(usize, &BigUint, &BigUint)> {
    match spec {
        GraphSpec::Conflict { m, width, offset } => Ok((*m, width, offset)),
        _ => Err(Error::InvalidSpec("operation needs a conflict-family graph".into())),
    }
}

/// `I(f) = { v : f(v_i) = i for all i }`, in canonical order.
pub fn independent_set_of(f: &LabelFunction, spec: &GraphSpec, caps: &Caps) -> Result<Vec<Vertex>> {
    spec.validate()?;
    let (m, width, offset) = conflict_params(spec)?;
    caps.check_vertices(&spec.vertex_count())?;
    let lo = offset + BigUint::one();
    let w = width.to_usize().expect("width checked against cap");
    if f.start != lo || f.width() != w {
        return Err(Error::InvalidParams(format!(
            "label function covers [{}, +{}), graph universe is [{lo}, +{w})",
            f.start,
            f.width()
        )));
    }
    // Positions grouped by label; tuples pick increasing positions from
    // classes 1, 2, ..., m in turn.
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for (pos, &label) in f.labels.iter().enumerate() {
        if (1..=m).contains(&label) {
            classes[label].push(pos);
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(m);
    extend_tuples(&classes, 1, m, None, &mut chosen, &mut |c: &[usize]| {
        out.push(Vertex::Tuple(Tuple(
            c.iter().map(|&p| &lo + BigUint::from(p)).collect(),
        )));
    });
    Ok(out)
}

fn extend_tuples(
    classes: &[Vec<usize>],
    index: usize,
    m: usize,
    after: Option<usize>,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if index > m {
        emit(chosen);
        return;
    }
    let class = &classes[index];
    let first = match after {
        Some(a) => class.partition_point(|&p| p <= a),
        None => 0,
    };
    for &p in &class[first..] {
        chosen.push(p);
        extend_tuples(classes, index + 1, m, Some(p), chosen, emit);
        chosen.pop();
    }
}

/// Maximal independent sets of `spec`, each sorted, listed in lexicographic
/// order of their canonical index lists.
///
/// Conflict graphs go through label functions: every `I(f)` is computed,
/// non-maximal ones are dropped and duplicates merged. Other families use
/// the generic enumerator on the explicit graph.
pub fn maximal_independent_sets(spec: &GraphSpec, caps: &Caps) -> Result<Vec<Vec<Vertex>>> {
    let graph = build_graph(spec, caps)?;
    let index_sets = match spec {
        GraphSpec::Conflict { .. } => maximal_sets_via_labels(spec, &graph, caps)?,
        _ => graph.maximal_independent_sets(caps)?,
    };
    Ok(index_sets
        .into_iter()
        .map(|set| set.into_iter().map(|i| graph.vertices[i].clone()).collect())
        .collect())
}

/// Label-function route for conflict graphs, as canonical index lists.
pub fn maximal_sets_via_labels(spec: &GraphSpec, graph: &Graph, caps: &Caps) -> Result<Vec<Vec<usize>>> {
    let (m, width, offset) = conflict_params(spec)?;
    let w = width
        .to_usize()
        .ok_or_else(|| Error::cap("max_label_functions", format!("{m}^{width}"), caps.max_label_functions))?;
    let mut found = BTreeSet::new();
    for f in LabelFunction::all(m, offset + BigUint::one(), w, caps)? {
        let set = independent_set_of(&f, spec, caps)?;
        let idx: Vec<usize> = set
            .iter()
            .map(|v| graph.index_of(v).expect("I(f) lies in the vertex set"))
            .collect();
        if !idx.is_empty() && graph.is_maximal_independent(&idx) {
            found.insert(idx);
        }
        if found.len() as u64 > caps.max_independent_sets {
            return Err(Error::cap("max_independent_sets", found.len(), caps.max_independent_sets));
        }
    }
    Ok(found.into_iter().collect())
}

/// `C(n, k)` exactly.
pub fn binomial(n: &BigUint, k: usize) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// `k`-subsets of `1..=n` in lexicographic order.
pub fn combinations(n: u64, k: usize) -> impl Iterator<Item = Vec<u64>> {
    let mut current: Option<Vec<u64>> = if (k as u64) <= n {
        Some((1..=k as u64).collect())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            let max_here = n - (k - 1 - i) as u64;
            if next[i] < max_here {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}
