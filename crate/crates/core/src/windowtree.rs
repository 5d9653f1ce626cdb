//! Window trees, sparse-node pruning and root-to-leaf sampling paths.
//!
//! A tree of arity `r` and depth `k` splits a root window into `r` equal
//! contiguous children, recursively, down to level `k`. Node `j` at level
//! `ℓ` covers `[start + j·len_ℓ, start + (j+1)·len_ℓ)` with
//! `len_ℓ = root_len / r^ℓ`; its children are `j·r .. j·r + r` at level
//! `ℓ + 1`.
//!
//! Pruning walks the levels top-down. A node whose density is at most `τ`
//! and whose ancestors all survived is directly pruned; everything below a
//! pruned node is indirectly pruned.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::graphs::Labeling;
use crate::harddist::{self, sample, window_geometry, SamplerParams};
use crate::rational::{from_counts, to_pq, Rational};
use crate::stats::Estimate;
use crate::{Caps, Error, Result};

/// The contiguous interval `[start, start + len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub start: u64,
    pub len: u64,
}

impl Window {
    pub fn new(start: u64, len: u64) -> Self {
        Window { start, len }
    }

    /// Last element.
    pub fn end(&self) -> u64 {
        self.start + self.len - 1
    }

    pub fn contains(&self, x: u64) -> bool {
        x >= self.start && x - self.start < self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowTreeSpec {
    pub arity: u64,
    pub depth: usize,
    pub root: Window,
}

impl WindowTreeSpec {
    pub fn new(arity: u64, depth: usize, root_start: u64, root_len: u64) -> Result<Self> {
        if arity < 1 {
            return Err(Error::InvalidParams("arity must be at least 1".into()));
        }
        if root_start == 0 {
            return Err(Error::InvalidParams("windows start at 1 or later".into()));
        }
        let leaves = arity
            .checked_pow(depth as u32)
            .ok_or_else(|| Error::InvalidParams(format!("{arity}^{depth} leaves overflow")))?;
        if root_len == 0 || root_len % leaves != 0 {
            return Err(Error::InvalidParams(format!(
                "root length {root_len} is not a positive multiple of {arity}^{depth}"
            )));
        }
        Ok(WindowTreeSpec {
            arity,
            depth,
            root: Window::new(root_start, root_len),
        })
    }

    pub fn level_len(&self, level: usize) -> u64 {
        self.root.len / self.arity.pow(level as u32)
    }

    pub fn level_count(&self, level: usize) -> u64 {
        self.arity.pow(level as u32)
    }

    pub fn leaf_count(&self) -> u64 {
        self.level_count(self.depth)
    }

    pub fn node_count(&self) -> u64 {
        (0..=self.depth).map(|l| self.level_count(l)).sum()
    }

    pub fn window(&self, level: usize, index: u64) -> Window {
        let len = self.level_len(level);
        Window::new(self.root.start + index * len, len)
    }
}

/// A materialized window tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowTree {
    spec: WindowTreeSpec,
    levels: Vec<Vec<Window>>,
}

pub fn build_tree(spec: &WindowTreeSpec, caps: &Caps) -> Result<WindowTree> {
    let nodes = spec.node_count();
    if nodes > caps.max_tree_nodes {
        return Err(Error::cap("max_tree_nodes", nodes, caps.max_tree_nodes));
    }
    let levels = (0..=spec.depth)
        .map(|l| (0..spec.level_count(l)).map(|j| spec.window(l, j)).collect())
        .collect();
    Ok(WindowTree {
        spec: spec.clone(),
        levels,
    })
}

impl WindowTree {
    pub fn spec(&self) -> &WindowTreeSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.spec.depth
    }

    pub fn arity(&self) -> u64 {
        self.spec.arity
    }

    pub fn root(&self) -> Window {
        self.spec.root
    }

    pub fn level(&self, level: usize) -> &[Window] {
        &self.levels[level]
    }

    pub fn children(&self, level: usize, index: u64) -> &[Window] {
        let r = self.spec.arity as usize;
        let from = index as usize * r;
        &self.levels[level + 1][from..from + r]
    }
}

fn count_label(window: Window, f: &impl Labeling, i: usize) -> u64 {
    (window.start..=window.end())
        .filter(|&e| f.label(&BigUint::from(e)) == i)
        .count() as u64
}

/// `|{e in window : f(e) = i}| / |window|`.
pub fn density(window: Window, f: &impl Labeling, i: usize, caps: &Caps) -> Result<Rational> {
    if window.len == 0 {
        return Err(Error::InvalidParams("density of an empty window".into()));
    }
    if window.len > caps.max_window {
        return Err(Error::cap("max_window", window.len, caps.max_window));
    }
    Ok(from_counts(count_label(window, f, i), window.len))
}

/// Prefix counts of label `i` over a root window, for O(1) node densities.
struct Prefix {
    start: u64,
    counts: Vec<u64>,
}

impl Prefix {
    fn new(root: Window, f: &impl Labeling, i: usize, caps: &Caps) -> Result<Self> {
        if root.len > caps.max_window {
            return Err(Error::cap("max_window", root.len, caps.max_window));
        }
        let mut counts = Vec::with_capacity(root.len as usize + 1);
        counts.push(0);
        let mut acc = 0;
        for e in root.start..=root.end() {
            if f.label(&BigUint::from(e)) == i {
                acc += 1;
            }
            counts.push(acc);
        }
        Ok(Prefix {
            start: root.start,
            counts,
        })
    }

    fn hits(&self, w: Window) -> u64 {
        let a = (w.start - self.start) as usize;
        self.counts[a + w.len as usize] - self.counts[a]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Kept,
    Direct,
    Indirect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStats {
    pub level: usize,
    pub total: u64,
    pub directly_pruned: u64,
    pub indirectly_pruned: u64,
    /// Directly pruned over nodes without a pruned ancestor; 0 when every
    /// node of the level lies under a pruned ancestor.
    pub p: Rational,
}

impl Serialize for LevelStats {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LevelStats", 5)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("directly_pruned", &self.directly_pruned)?;
        st.serialize_field("indirectly_pruned", &self.indirectly_pruned)?;
        st.serialize_field("p", &to_pq(&self.p))?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneResult {
    pub index: usize,
    pub tau: Rational,
    /// `marks[ℓ][j]` for node `j` at level `ℓ`.
    pub marks: Vec<Vec<Mark>>,
    pub levels: Vec<LevelStats>,
    pub root_density: Rational,
}

impl PruneResult {
    pub fn mark(&self, level: usize, index: u64) -> Mark {
        self.marks[level][index as usize]
    }

    /// Unpruned leaves over all leaves.
    pub fn kept_leaf_fraction(&self) -> Rational {
        let leaves = self.marks.last().expect("at least the root level");
        let kept = leaves.iter().filter(|&&m| m == Mark::Kept).count() as u64;
        from_counts(kept, leaves.len() as u64)
    }

    /// `Π_ℓ (1 - p_ℓ)`.
    pub fn survival_product(&self) -> Rational {
        self.levels
            .iter()
            .fold(Rational::one(), |acc, l| acc * (Rational::one() - &l.p))
    }
}

impl Serialize for PruneResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PruneResult", 6)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("tau", &to_pq(&self.tau))?;
        st.serialize_field("root_density", &to_pq(&self.root_density))?;
        st.serialize_field("levels", &self.levels)?;
        st.serialize_field("kept_leaf_fraction", &to_pq(&self.kept_leaf_fraction()))?;
        st.serialize_field("survival_product", &to_pq(&self.survival_product()))?;
        st.end()
    }
}

/// Prunes every node with density at most `tau` for label `i`.
pub fn prune(tree: &WindowTree, f: &impl Labeling, i: usize, tau: &Rational, caps: &Caps) -> Result<PruneResult> {
    if tau <= &Rational::zero() || tau >= &Rational::one() {
        return Err(Error::InvalidParams(format!("tau = {} outside (0, 1)", to_pq(tau))));
    }
    let prefix = Prefix::new(tree.root(), f, i, caps)?;
    let spec = tree.spec();
    let r = spec.arity as usize;
    let mut marks: Vec<Vec<Mark>> = Vec::with_capacity(spec.depth + 1);
    let mut levels = Vec::with_capacity(spec.depth + 1);
    for level in 0..=spec.depth {
        let len = spec.level_len(level);
        let row: Vec<Mark> = tree.levels[level]
            .iter()
            .enumerate()
            .map(|(j, w)| {
                if level > 0 && marks[level - 1][j / r] != Mark::Kept {
                    return Mark::Indirect;
                }
                let hits = from_counts(prefix.hits(*w), len);
                if &hits <= tau {
                    Mark::Direct
                } else {
                    Mark::Kept
                }
            })
            .collect();
        let total = row.len() as u64;
        let direct = row.iter().filter(|&&m| m == Mark::Direct).count() as u64;
        let indirect = row.iter().filter(|&&m| m == Mark::Indirect).count() as u64;
        let open = total - indirect;
        let p = if open == 0 {
            Rational::zero()
        } else {
            from_counts(direct, open)
        };
        levels.push(LevelStats {
            level,
            total,
            directly_pruned: direct,
            indirectly_pruned: indirect,
            p,
        });
        marks.push(row);
    }
    Ok(PruneResult {
        index: i,
        tau: tau.clone(),
        marks,
        levels,
        root_density: from_counts(prefix.hits(tree.root()), tree.root().len),
    })
}

/// Root-to-leaf path `α_0, ..., α_k` and the element drawn from the leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplingPath {
    /// Node index at each level; `nodes[0] == 0`.
    pub nodes: Vec<u64>,
    pub sample: u64,
}

impl SamplingPath {
    /// The path taking child `choices[ℓ]` below level `ℓ`, then element
    /// `offset` of the leaf.
    pub fn from_choices(spec: &WindowTreeSpec, choices: &[u64], offset: u64) -> Result<Self> {
        if choices.len() != spec.depth {
            return Err(Error::InvalidParams(format!(
                "{} choices for a depth-{} tree",
                choices.len(),
                spec.depth
            )));
        }
        if choices.iter().any(|&c| c >= spec.arity) || offset >= spec.level_len(spec.depth) {
            return Err(Error::InvalidParams("choice outside the node's children".into()));
        }
        let mut nodes = vec![0u64];
        for &c in choices {
            let parent = *nodes.last().expect("root");
            nodes.push(parent * spec.arity + c);
        }
        let leaf = spec.window(spec.depth, *nodes.last().expect("leaf"));
        Ok(SamplingPath {
            nodes,
            sample: leaf.start + offset,
        })
    }

    /// The path through the nodes whose windows contain `x`.
    pub fn to_element(spec: &WindowTreeSpec, x: u64) -> Result<Self> {
        if !spec.root.contains(x) {
            return Err(Error::InvalidParams(format!("{x} is outside the root window")));
        }
        let nodes = (0..=spec.depth)
            .map(|l| (x - spec.root.start) / spec.level_len(l))
            .collect();
        Ok(SamplingPath { nodes, sample: x })
    }

    /// Consecutive nodes are parent and child and the sample lies in the
    /// leaf.
    pub fn is_valid(&self, spec: &WindowTreeSpec) -> bool {
        self.nodes.len() == spec.depth + 1
            && self.nodes[0] == 0
            && self.nodes.windows(2).all(|w| w[1] / spec.arity == w[0])
            && spec
                .window(spec.depth, *self.nodes.last().expect("nonempty"))
                .contains(self.sample)
    }
}

/// Uniform child at every level, then a uniform element of the leaf.
pub fn sample_path(spec: &WindowTreeSpec, seed: u64) -> SamplingPath {
    let mut rng = harddist::rng(seed);
    sample_path_with(spec, &mut rng)
}

pub fn sample_path_with(spec: &WindowTreeSpec, rng: &mut impl Rng) -> SamplingPath {
    let choices: Vec<u64> = (0..spec.depth).map(|_| rng.gen_range(0..spec.arity)).collect();
    let offset = rng.gen_range(0..spec.level_len(spec.depth));
    SamplingPath::from_choices(spec, &choices, offset).expect("choices drawn in range")
}

/// None of `α_0, ..., α_{z-1}` is pruned.
pub fn event_no_prune_on_prefix(path: &SamplingPath, prune: &PruneResult, z: usize) -> Result<bool> {
    if z > path.nodes.len() {
        return Err(Error::InvalidParams(format!(
            "prefix length {z} exceeds the path length {}",
            path.nodes.len()
        )));
    }
    Ok(path.nodes[..z]
        .iter()
        .enumerate()
        .all(|(level, &j)| prune.mark(level, j) == Mark::Kept))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case1Outcome {
    /// `Π(1 - p_ℓ) <= δ`.
    pub hypothesis: bool,
    /// The implication `hypothesis => density(root) <= δ + τ`.
    pub holds: bool,
    pub survival_product: Rational,
    pub root_density: Rational,
}

/// If at most a `δ` fraction of leaves survives pruning at threshold `τ`,
/// the root density is at most `δ + τ`.
pub fn case1_inequality_check(
    tree: &WindowTree,
    f: &impl Labeling,
    i: usize,
    tau: &Rational,
    delta: &Rational,
    caps: &Caps,
) -> Result<Case1Outcome> {
    let pr = prune(tree, f, i, tau, caps)?;
    let survival = pr.survival_product();
    let hypothesis = &survival <= delta;
    let holds = !hypothesis || pr.root_density <= delta + tau;
    Ok(Case1Outcome {
        hypothesis,
        holds,
        survival_product: survival,
        root_density: pr.root_density,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinalWindowReport {
    pub trials: u64,
    /// Trials in which no node on the path prefix `α_0..α_{Z_i - 1}` was
    /// pruned.
    pub conditioned: u64,
    /// Conditioned trials with `density(Win_m, i) < threshold`.
    pub below_threshold: u64,
    pub estimate: Option<Estimate>,
    pub note: Option<String>,
}

/// For each trial: sample a trace, build the window tree of iteration `i`
/// (arity `r_i`, depth `k`, root `Win_i`), prune it with threshold `tau`,
/// and, when the path to `X_i` avoids pruned nodes on its first `Z_i`
/// levels, test whether the last window `Win_m` has density below
/// `threshold` for label `i`.
#[allow(clippy::too_many_arguments)]
pub fn final_window_experiment(
    params: &SamplerParams,
    f: &impl Labeling,
    i: usize,
    tau: &Rational,
    threshold: &Rational,
    trials: u64,
    seed: u64,
    caps: &Caps,
) -> Result<FinalWindowReport> {
    params.validate()?;
    if i == 0 || i > params.m {
        return Err(Error::InvalidParams(format!("index {i} outside 1..={}", params.m)));
    }
    let root_len = harddist::pow2(&params.s0)?;
    if root_len > BigUint::from(caps.max_window) {
        return Err(Error::cap("max_window", root_len, caps.max_window));
    }
    let mut master = harddist::rng(seed);
    let mut conditioned = 0;
    let mut below = 0;
    for _ in 0..trials {
        let trace = sample(params, master.gen())?;
        let windows = trace.windows();
        let (x_prev, s_prev) = &windows[i - 1];
        let geometry = window_geometry(params, i, s_prev)?;
        let arity = geometry.ratio()?.to_u64().expect("bounded by the root window");
        let len = harddist::pow2(s_prev)?.to_u64().expect("bounded by the root window");
        let start = x_prev.to_u64().expect("bounded") + 1;
        let spec = WindowTreeSpec::new(arity, params.k as usize, start, len)?;
        let tree = build_tree(&spec, caps)?;
        let pr = prune(&tree, f, i, tau, caps)?;
        let x_i = trace.iterations[i - 1].x.to_u64().expect("bounded");
        let path = SamplingPath::to_element(&spec, x_i)?;
        let z = trace.iterations[i - 1].z as usize;
        if !event_no_prune_on_prefix(&path, &pr, z)? {
            continue;
        }
        conditioned += 1;
        let (x_last, s_last) = &windows[params.m - 1];
        let last = Window::new(
            x_last.to_u64().expect("bounded") + 1,
            harddist::pow2(s_last)?.to_u64().expect("bounded"),
        );
        if &density(last, f, i, caps)? < threshold {
            below += 1;
        }
    }
    let (estimate, note) = if conditioned == 0 {
        (None, Some("conditioning event never occurred".to_string()))
    } else {
        (Some(Estimate::new(below, conditioned, 0.99)), None)
    };
    Ok(FinalWindowReport {
        trials,
        conditioned,
        below_threshold: below,
        estimate,
        note,
    })
}
