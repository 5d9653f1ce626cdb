//! Exact chromatic and fractional chromatic numbers with certificates.
//!
//! [`chromatic_number`] runs a DSATUR branch and bound for increasing color
//! counts. [`fractional_chromatic_number`] solves the covering LP over all
//! maximal independent sets in exact rational arithmetic and returns both a
//! primal [`FractionalColoring`] and a dual [`DualWitness`] of equal value.
//!
//! The verifiers ([`verify_primal`], [`verify_dual`], [`verify_coloring`])
//! share no code with the solvers: dual feasibility is checked through a
//! separate maximum-weight independent set search.

mod lp;

use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::graphs::Graph;
use crate::rational::{to_pq, Rational};
use crate::{Caps, Error, Result};

/// Hard limit of the bitmask solvers.
pub const MAX_EXACT_VERTICES: usize = 128;

fn masks(graph: &Graph, caps: &Caps) -> Result<Vec<u128>> {
    let n = graph.order();
    if n == 0 {
        return Err(Error::InvalidParams("graph has no vertices".into()));
    }
    let limit = caps.max_coloring_vertices.min(MAX_EXACT_VERTICES as u64);
    if n as u64 > limit {
        return Err(Error::cap("max_coloring_vertices", n, limit));
    }
    Ok((0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u128, |m, &w| m | (1u128 << w)))
        .collect())
}

/// Why no proper coloring with fewer colors exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimality {
    /// A clique of size `chi`.
    Clique { vertices: Vec<usize> },
    /// Exhaustive search for a `(chi - 1)`-coloring visited `nodes` nodes.
    Exhausted { colors: usize, nodes: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChromaticResult {
    pub chi: usize,
    /// Color of each vertex, `0..chi`.
    pub coloring: Vec<usize>,
    pub optimality: Optimality,
}

/// Exact chromatic number with a proper coloring and an optimality proof.
pub fn chromatic_number(graph: &Graph, caps: &Caps) -> Result<ChromaticResult> {
    let adj = masks(graph, caps)?;
    let clique = greedy_clique(&adj);
    let (ub, mut best) = dsatur_greedy(&adj);
    let mut last_failure = None;
    for k in clique.len()..ub {
        let mut search = Search::new(&adj, k);
        if search.run() {
            return Ok(ChromaticResult {
                chi: k,
                coloring: search.colors,
                optimality: optimality(&clique, k, last_failure),
            });
        }
        last_failure = Some(search.nodes);
    }
    canonical_colors(&mut best);
    Ok(ChromaticResult {
        chi: ub,
        coloring: best,
        optimality: optimality(&clique, ub, last_failure),
    })
}

fn optimality(clique: &[usize], chi: usize, last_failure: Option<u64>) -> Optimality {
    match last_failure {
        Some(nodes) if clique.len() < chi => Optimality::Exhausted {
            colors: chi - 1,
            nodes,
        },
        _ => Optimality::Clique {
            vertices: clique.to_vec(),
        },
    }
}

fn greedy_clique(adj: &[u128]) -> Vec<usize> {
    let n = adj.len();
    let mut best = vec![0];
    for start in 0..n {
        let mut clique = vec![start];
        let mut cand = adj[start];
        while cand != 0 {
            let v = bits(cand)
                .max_by_key(|&v| ((adj[v] & cand).count_ones(), std::cmp::Reverse(v)))
                .expect("nonempty");
            clique.push(v);
            cand &= adj[v];
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best.sort_unstable();
    best
}

fn dsatur_greedy(adj: &[u128]) -> (usize, Vec<usize>) {
    let n = adj.len();
    let mut colors = vec![usize::MAX; n];
    let mut used = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v] == usize::MAX)
            .max_by_key(|&v| {
                let sat = saturation_of(adj[v], &colors);
                (sat, adj[v].count_ones(), std::cmp::Reverse(v))
            })
            .expect("uncolored vertex remains");
        let taken: u128 = bits(adj[v])
            .filter(|&w| colors[w] != usize::MAX)
            .fold(0, |m, w| m | (1u128 << colors[w]));
        let c = (!taken).trailing_zeros() as usize;
        colors[v] = c;
        used = used.max(c + 1);
    }
    (used, colors)
}

fn saturation_of(nbrs: u128, colors: &[usize]) -> u32 {
    bits(nbrs)
        .filter(|&w| colors[w] != usize::MAX)
        .fold(0u128, |m, w| m | (1u128 << colors[w]))
        .count_ones()
}

/// Renumbers colors by first appearance in vertex order.
fn canonical_colors(colors: &mut [usize]) {
    let mut map = std::collections::HashMap::new();
    for c in colors.iter_mut() {
        let next = map.len();
        *c = *map.entry(*c).or_insert(next);
    }
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

/// Backtracking k-coloring with DSATUR branching. New colors are opened
/// only in increasing order.
struct Search<'a> {
    adj: &'a [u128],
    k: usize,
    colors: Vec<usize>,
    class: Vec<u128>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(adj: &'a [u128], k: usize) -> Self {
        Search {
            adj,
            k,
            colors: vec![usize::MAX; adj.len()],
            class: vec![0; k],
            nodes: 0,
        }
    }

    fn run(&mut self) -> bool {
        if self.k == 0 {
            return false;
        }
        self.step(full_mask(self.adj.len()), 0)
    }

    fn step(&mut self, uncolored: u128, used: usize) -> bool {
        if uncolored == 0 {
            return true;
        }
        self.nodes += 1;
        let mut pick = usize::MAX;
        let mut key = (0u32, 0u32);
        let mut forbidden_pick = 0u128;
        for v in bits(uncolored) {
            let mut forbidden = 0u128;
            for c in 0..used {
                if self.class[c] & self.adj[v] != 0 {
                    forbidden |= 1 << c;
                }
            }
            let sat = forbidden.count_ones();
            if sat as usize >= self.k {
                return false;
            }
            let k = (sat, (self.adj[v] & uncolored).count_ones());
            if pick == usize::MAX || k > key {
                pick = v;
                key = k;
                forbidden_pick = forbidden;
            }
        }
        let v = pick;
        let rest = uncolored & !(1u128 << v);
        let limit = (used + 1).min(self.k);
        for c in 0..limit {
            if forbidden_pick & (1 << c) != 0 {
                continue;
            }
            self.colors[v] = c;
            self.class[c] |= 1u128 << v;
            if self.step(rest, used.max(c + 1)) {
                return true;
            }
            self.class[c] &= !(1u128 << v);
            self.colors[v] = usize::MAX;
        }
        false
    }
}

/// True iff `colors` assigns every vertex a color and no edge is
/// monochromatic.
pub fn verify_coloring(graph: &Graph, colors: &[usize]) -> bool {
    colors.len() == graph.order() && graph.edges().iter().all(|&(a, b)| colors[a] != colors[b])
}

/// Independent sets with non-negative rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalColoring {
    /// Sorted 0-based vertex indices and weight.
    pub entries: Vec<(Vec<usize>, Rational)>,
}

impl FractionalColoring {
    /// Total weight over all listed sets.
    pub fn value(&self) -> Rational {
        self.entries.iter().map(|(_, w)| w).sum()
    }
}

impl Serialize for FractionalColoring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            set: Vec<usize>,
            weight: String,
        }
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|(set, w)| Entry {
                set: set.iter().map(|v| v + 1).collect(),
                weight: to_pq(w),
            })
            .collect();
        let mut st = s.serialize_struct("FractionalColoring", 2)?;
        st.serialize_field("value", &to_pq(&self.value()))?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Vertex weights aligned with the graph's vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualWitness {
    pub weights: Vec<Rational>,
}

impl DualWitness {
    pub fn value(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn uniform(n: usize) -> Self {
        DualWitness {
            weights: vec![Rational::new(1.into(), (n as i64).into()); n],
        }
    }

    pub fn point_mass(n: usize, v: usize) -> Self {
        let mut weights = vec![Rational::zero(); n];
        weights[v] = Rational::one();
        DualWitness { weights }
    }

    /// `y / sum(y)`: the distribution form.
    pub fn normalized(&self) -> Result<DualWitness> {
        let total = self.value();
        if !total.is_positive() {
            return Err(Error::NotNormalized("witness has zero total weight".into()));
        }
        Ok(DualWitness {
            weights: self.weights.iter().map(|w| w / &total).collect(),
        })
    }
}

impl Serialize for DualWitness {
    /// Keys are 1-based vertex ids.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.weights.len()))?;
        for (i, w) in self.weights.iter().enumerate() {
            map.serialize_entry(&(i + 1).to_string(), &to_pq(w))?;
        }
        map.end()
    }
}

/// Output of [`fractional_chromatic_number`].
#[derive(Clone, Debug)]
pub struct FractionalResult {
    pub chi_f: Rational,
    pub primal: FractionalColoring,
    pub dual: DualWitness,
    pub maximal_sets: usize,
    pub pivots: usize,
}

/// Exact `χ_f` from the covering LP over every maximal independent set.
pub fn fractional_chromatic_number(graph: &Graph, caps: &Caps) -> Result<FractionalResult> {
    if graph.order() == 0 {
        return Err(Error::InvalidParams("graph has no vertices".into()));
    }
    let sets = graph.maximal_independent_sets(caps)?;
    let sol = lp::solve_cover(graph.order(), &sets)?;
    let entries: Vec<(Vec<usize>, Rational)> = sets
        .iter()
        .zip(&sol.x)
        .filter(|(_, w)| w.is_positive())
        .map(|(s, w)| (s.clone(), w.clone()))
        .collect();
    let primal = FractionalColoring { entries };
    let dual = DualWitness { weights: sol.y };
    if primal.value() != sol.value || dual.value() != sol.value {
        return Err(Error::Internal(format!(
            "LP certificates disagree: primal {}, dual {}",
            to_pq(&primal.value()),
            to_pq(&dual.value())
        )));
    }
    Ok(FractionalResult {
        chi_f: sol.value,
        primal,
        dual,
        maximal_sets: sets.len(),
        pivots: sol.pivots,
    })
}

/// Both numbers with all certificates.
#[derive(Clone, Debug)]
pub struct ChiReport {
    pub chi: usize,
    pub chi_f: Rational,
    pub primal: FractionalColoring,
    pub dual: DualWitness,
    pub coloring: Vec<usize>,
    pub optimality: Optimality,
    pub maximal_sets: usize,
}

impl Serialize for ChiReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ChiReport", 7)?;
        st.serialize_field("chi", &self.chi)?;
        st.serialize_field("chi_f", &to_pq(&self.chi_f))?;
        st.serialize_field("maximal_independent_sets", &self.maximal_sets)?;
        st.serialize_field("primal", &self.primal)?;
        st.serialize_field("dual", &self.dual)?;
        st.serialize_field("coloring", &self.coloring.iter().map(|c| c + 1).collect::<Vec<_>>())?;
        st.serialize_field("optimality", &self.optimality)?;
        st.end()
    }
}

pub fn chi_report(graph: &Graph, caps: &Caps) -> Result<ChiReport> {
    let frac = fractional_chromatic_number(graph, caps)?;
    let chrom = chromatic_number(graph, caps)?;
    if frac.chi_f > Rational::from_integer(chrom.chi.into()) {
        return Err(Error::Internal("chi_f exceeds chi".into()));
    }
    Ok(ChiReport {
        chi: chrom.chi,
        chi_f: frac.chi_f,
        primal: frac.primal,
        dual: frac.dual,
        coloring: chrom.coloring,
        optimality: chrom.optimality,
        maximal_sets: frac.maximal_sets,
    })
}

/// Checks every set is independent, weights are non-negative and each
/// vertex is covered with weight at least 1. Returns the value.
pub fn verify_primal(graph: &Graph, x: &FractionalColoring) -> Result<Rational> {
    let n = graph.order();
    let mut cover = vec![Rational::zero(); n];
    for (set, w) in &x.entries {
        if w.is_negative() {
            return Err(Error::Infeasible("negative weight".into()));
        }
        if set.iter().any(|&v| v >= n) {
            return Err(Error::Infeasible("set references a missing vertex".into()));
        }
        if !graph.is_independent(set) {
            return Err(Error::Infeasible(format!("set {set:?} is not independent")));
        }
        for &v in set {
            cover[v] += w;
        }
    }
    if let Some(v) = cover.iter().position(|c| c < &Rational::one()) {
        return Err(Error::Infeasible(format!(
            "vertex {} covered with weight {}",
            v + 1,
            to_pq(&cover[v])
        )));
    }
    Ok(x.value())
}

/// Checks `y >= 0` and that no independent set has weight above 1, using a
/// maximum-weight independent set search. Returns the value.
pub fn verify_dual(graph: &Graph, y: &DualWitness, caps: &Caps) -> Result<Rational> {
    if y.weights.len() != graph.order() {
        return Err(Error::Infeasible("witness length differs from vertex count".into()));
    }
    if y.weights.iter().any(|w| w.is_negative()) {
        return Err(Error::Infeasible("negative vertex weight".into()));
    }
    let (best, set) = max_weight_independent_set(graph, &y.weights, caps)?;
    if best > Rational::one() {
        return Err(Error::Infeasible(format!(
            "independent set {:?} has weight {}",
            set.iter().map(|v| v + 1).collect::<Vec<_>>(),
            to_pq(&best)
        )));
    }
    Ok(y.value())
}

/// Exact maximum-weight independent set for non-negative weights.
pub fn max_weight_independent_set(graph: &Graph, weights: &[Rational], caps: &Caps) -> Result<(Rational, Vec<usize>)> {
    let adj = masks(graph, caps)?;
    let all = full_mask(adj.len());
    let mut best = (Rational::zero(), 0u128);
    mwis(&adj, weights, all, Rational::zero(), 0, &mut best);
    Ok((best.0, bits(best.1).collect()))
}

fn mwis(adj: &[u128], w: &[Rational], cand: u128, acc: Rational, chosen: u128, best: &mut (Rational, u128)) {
    if acc > best.0 {
        *best = (acc.clone(), chosen);
    }
    if cand == 0 {
        return;
    }
    let bound: Rational = bits(cand).map(|v| &w[v]).sum();
    if &acc + bound <= best.0 {
        return;
    }
    // Branch on the candidate with most candidate neighbors.
    let v = bits(cand)
        .max_by_key(|&v| ((adj[v] & cand).count_ones(), std::cmp::Reverse(v)))
        .expect("nonempty");
    let without = cand & !(1u128 << v);
    mwis(adj, w, without & !adj[v], &acc + &w[v], chosen | (1u128 << v), best);
    if adj[v] & cand != 0 {
        mwis(adj, w, without, acc, chosen, best);
    }
}

/// `(max_I μ(I))^{-1}` over maximal independent sets, for a distribution μ.
pub fn evaluate_dual_witness(graph: &Graph, mu: &DualWitness, caps: &Caps) -> Result<Rational> {
    if mu.weights.len() != graph.order() {
        return Err(Error::InvalidParams("witness length differs from vertex count".into()));
    }
    if mu.weights.iter().any(|w| w.is_negative()) || mu.value() != Rational::one() {
        return Err(Error::NotNormalized(format!(
            "weights must be non-negative and sum to 1, sum is {}",
            to_pq(&mu.value())
        )));
    }
    let sets = graph.maximal_independent_sets(caps)?;
    let best = sets
        .iter()
        .map(|s| s.iter().map(|&v| &mu.weights[v]).sum::<Rational>())
        .max()
        .expect("a nonempty graph has a maximal independent set");
    Ok(Rational::one() / best)
}

/// Product vertex `(i1, i2)` of `G1 ∨ G2` has index `i1 * |V2| + i2`.
pub fn product_index(i1: usize, i2: usize, n2: usize) -> usize {
    i1 * n2 + i2
}

/// `y(u1, u2) = y1(u1) * y2(u2)`, after checking both inputs are feasible.
pub fn compose_product_dual(
    g1: &Graph,
    y1: &DualWitness,
    g2: &Graph,
    y2: &DualWitness,
    caps: &Caps,
) -> Result<DualWitness> {
    verify_dual(g1, y1, caps)?;
    verify_dual(g2, y2, caps)?;
    let mut weights = Vec::with_capacity(y1.weights.len() * y2.weights.len());
    for a in &y1.weights {
        for b in &y2.weights {
            weights.push(a * b);
        }
    }
    Ok(DualWitness { weights })
}

/// `x(I1 × I2) = x1(I1) * x2(I2)`, after checking both inputs are feasible.
pub fn compose_product_primal(
    g1: &Graph,
    x1: &FractionalColoring,
    g2: &Graph,
    x2: &FractionalColoring,
) -> Result<FractionalColoring> {
    verify_primal(g1, x1)?;
    verify_primal(g2, x2)?;
    let n2 = g2.order();
    let mut entries = Vec::new();
    for (s1, w1) in &x1.entries {
        for (s2, w2) in &x2.entries {
            let mut set: Vec<usize> = s1
                .iter()
                .flat_map(|&a| s2.iter().map(move |&b| product_index(a, b, n2)))
                .collect();
            set.sort_unstable();
            entries.push((set, w1 * w2));
        }
    }
    Ok(FractionalColoring { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_graph, GraphSpec};
    use crate::rational::ratio;

    fn g(spec: GraphSpec) -> Graph {
        build_graph(&spec, &Caps::default()).unwrap()
    }

    #[test]
    fn chromatic_examples() {
        let caps = Caps::default();
        assert_eq!(chromatic_number(&g(GraphSpec::complete(4).unwrap()), &caps).unwrap().chi, 4);
        let c5 = chromatic_number(&g(GraphSpec::cycle(5).unwrap()), &caps).unwrap();
        assert_eq!(c5.chi, 3);
        assert!(matches!(c5.optimality, Optimality::Exhausted { colors: 2, .. }));
        assert_eq!(chromatic_number(&g(GraphSpec::conflict(2, 4).unwrap()), &caps).unwrap().chi, 2);
        assert_eq!(chromatic_number(&g(GraphSpec::edgeless(3).unwrap()), &caps).unwrap().chi, 1);
    }

    #[test]
    fn empty_graph_rejected() {
        let empty = g(GraphSpec::edgeless(0).unwrap());
        assert!(chromatic_number(&empty, &Caps::default()).is_err());
        assert!(fractional_chromatic_number(&empty, &Caps::default()).is_err());
    }

    #[test]
    fn fractional_examples() {
        let caps = Caps::default();
        let k3 = fractional_chromatic_number(&g(GraphSpec::complete(3).unwrap()), &caps).unwrap();
        assert_eq!(k3.chi_f, ratio(3, 1));
        let c5 = fractional_chromatic_number(&g(GraphSpec::cycle(5).unwrap()), &caps).unwrap();
        assert_eq!(c5.chi_f, ratio(5, 2));
        let edgeless = fractional_chromatic_number(&g(GraphSpec::edgeless(4).unwrap()), &caps).unwrap();
        assert_eq!(edgeless.chi_f, ratio(1, 1));
    }

    #[test]
    fn certificates_verify() {
        let caps = Caps::default();
        let graph = g(GraphSpec::cycle(7).unwrap());
        let r = fractional_chromatic_number(&graph, &caps).unwrap();
        assert_eq!(r.chi_f, ratio(7, 3));
        assert_eq!(verify_primal(&graph, &r.primal).unwrap(), r.chi_f);
        assert_eq!(verify_dual(&graph, &r.dual, &caps).unwrap(), r.chi_f);
    }

    #[test]
    fn verifiers_reject_bad_certificates() {
        let caps = Caps::default();
        let graph = g(GraphSpec::cycle(5).unwrap());
        let not_independent = FractionalColoring {
            entries: vec![(vec![0, 1], ratio(5, 1))],
        };
        assert!(verify_primal(&graph, &not_independent).is_err());
        let undercover = FractionalColoring {
            entries: vec![(vec![0, 2], ratio(1, 1))],
        };
        assert!(verify_primal(&graph, &undercover).is_err());
        let heavy = DualWitness {
            weights: vec![ratio(3, 5); 5],
        };
        assert!(verify_dual(&graph, &heavy, &caps).is_err());
    }

    #[test]
    fn dual_witness_examples() {
        let caps = Caps::default();
        let c5 = g(GraphSpec::cycle(5).unwrap());
        assert_eq!(evaluate_dual_witness(&c5, &DualWitness::uniform(5), &caps).unwrap(), ratio(5, 2));
        let k3 = g(GraphSpec::complete(3).unwrap());
        assert_eq!(evaluate_dual_witness(&k3, &DualWitness::uniform(3), &caps).unwrap(), ratio(3, 1));
        assert_eq!(evaluate_dual_witness(&c5, &DualWitness::point_mass(5, 2), &caps).unwrap(), ratio(1, 1));
        let bad = DualWitness {
            weights: vec![ratio(1, 5); 4].into_iter().chain([ratio(1, 2)]).collect(),
        };
        assert!(matches!(evaluate_dual_witness(&c5, &bad, &caps), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn product_composition_k3_k2() {
        let caps = Caps::default();
        let k3 = g(GraphSpec::complete(3).unwrap());
        let k2 = g(GraphSpec::complete(2).unwrap());
        let r3 = fractional_chromatic_number(&k3, &caps).unwrap();
        let r2 = fractional_chromatic_number(&k2, &caps).unwrap();
        let prod = g(GraphSpec::product(GraphSpec::complete(3).unwrap(), GraphSpec::complete(2).unwrap()));
        let y = compose_product_dual(&k3, &r3.dual, &k2, &r2.dual, &caps).unwrap();
        assert_eq!(verify_dual(&prod, &y, &caps).unwrap(), ratio(6, 1));
        let x = compose_product_primal(&k3, &r3.primal, &k2, &r2.primal).unwrap();
        assert_eq!(verify_primal(&prod, &x).unwrap(), ratio(6, 1));
    }

    #[test]
    fn product_composition_rejects_infeasible_input() {
        let caps = Caps::default();
        let k2 = g(GraphSpec::complete(2).unwrap());
        let bad = DualWitness {
            weights: vec![ratio(1, 1), ratio(1, 1)],
        };
        let ok = DualWitness::point_mass(2, 0);
        assert!(compose_product_dual(&k2, &ok, &k2, &ok, &caps).is_ok());
        let e2 = g(GraphSpec::edgeless(2).unwrap());
        assert!(compose_product_dual(&e2, &bad, &k2, &ok, &caps).is_err());
    }

    #[test]
    fn json_uses_one_based_ids_and_pq() {
        let caps = Caps::default();
        let r = chi_report(&g(GraphSpec::complete(2).unwrap()), &caps).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["chi_f"], "2/1");
        assert_eq!(v["dual"]["1"], "1/1");
        let sets: Vec<_> = v["primal"]["entries"].as_array().unwrap().iter().map(|e| e["set"].clone()).collect();
        assert!(sets.contains(&serde_json::json!([1])));
    }
}
