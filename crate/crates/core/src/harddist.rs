//! The iterated-window hard input distribution.
//!
//! Iteration `i` of the sampler draws `Y_i` uniformly from `[1, 2^{S_{i-1}}]`
//! and `Z_i` uniformly from `[1, k-1]`, then sets
//!
//! ```text
//! X_i = X_{i-1} + Y_i
//! S_i = S_{i-1} - k^{m-i+1} * Z_i
//! ```
//!
//! starting from `X_0 = 0` and `S_0 = s0`. `X_i` is therefore uniform on the
//! window `[X_{i-1} + 1, X_{i-1} + 2^{S_{i-1}}]`. All values are arbitrary
//! precision; the exponents reach `27^4` bits for `m = 3` with the default
//! constants.
//!
//! For tiny parameters [`enumerate_distribution`] lists every outcome with
//! its exact probability, which is the oracle for the adversary and success
//! probability computations.

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graphs::{Element, LabelFunction, Labeling, Vertex};
use crate::rational::{to_pq, Rational};
use crate::stats::Estimate;
use crate::{Caps, Error, Result};

/// Name of the generator behind every seeded draw in this crate.
pub const RNG_NAME: &str = "chacha8";

/// Largest exponent the sampler will materialize as `2^s`.
pub const MAX_EXPONENT_BITS: u64 = 1 << 26;

/// Reporting constant for the success-probability bound `m^{-ηm}`.
pub const ETA: f64 = 0.01;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

mod dec {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerParams {
    #[serde(with = "dec")]
    pub m: usize,
    #[serde(with = "dec")]
    pub k: u64,
    #[serde(with = "dec")]
    pub s0: BigUint,
}

impl SamplerParams {
    pub fn new(m: usize, k: u64, s0: BigUint) -> Result<Self> {
        let p = SamplerParams { m, k, s0 };
        p.validate()?;
        Ok(p)
    }

    /// `k = m^m`, `S0 = k^{m+1}`.
    pub fn default_constants(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!(
                "default constants need m >= 2 (k = m^m must be at least 2), got m = {m}"
            )));
        }
        let k = (m as u64)
            .checked_pow(m as u32)
            .ok_or_else(|| Error::InvalidParams(format!("k = {m}^{m} overflows")))?;
        let s0 = BigUint::from(k).pow(m as u32 + 1);
        Self::new(m, k, s0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k must be at least 2, got {}", self.k)));
        }
        let floor = BigUint::from(self.k).pow(self.m as u32 + 1);
        if self.s0 < floor {
            return Err(Error::InvalidParams(format!(
                "S0 = {} is below k^(m+1) = {floor}",
                self.s0
            )));
        }
        Ok(())
    }

    /// `k^{m-i+1}`, the exponent decrement per unit of `Z_i`.
    pub fn step(&self, i: usize) -> BigUint {
        BigUint::from(self.k).pow((self.m - i + 1) as u32)
    }
}

/// The window-length ladder of iteration `i`, stored as exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowGeometry {
    pub i: usize,
    #[serde(with = "dec")]
    pub s_prev: BigUint,
    /// `log2 r_i = k^{m-i+1}`.
    #[serde(with = "dec")]
    pub ratio_exponent: BigUint,
    /// `log2 w_{i,j} = s_prev - j * k^{m-i+1}` for `j = 0..=k`.
    #[serde(serialize_with = "ser_dec_vec")]
    pub exponents: Vec<BigUint>,
}

fn ser_dec_vec<S: serde::Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl WindowGeometry {
    /// `w_{i,j}` materialized.
    pub fn width(&self, j: usize) -> Result<BigUint> {
        pow2(&self.exponents[j])
    }

    pub fn widths(&self) -> Result<Vec<BigUint>> {
        (0..self.exponents.len()).map(|j| self.width(j)).collect()
    }

    pub fn ratio(&self) -> Result<BigUint> {
        pow2(&self.ratio_exponent)
    }
}

pub(crate) fn pow2(e: &BigUint) -> Result<BigUint> {
    match e.to_u64() {
        Some(e) if e <= MAX_EXPONENT_BITS => Ok(BigUint::one() << e),
        _ => Err(Error::InvalidParams(format!("2^{e} is too large to materialize"))),
    }
}

/// Ladder and ratio for iteration `i` given `s_{i-1}`.
pub fn window_geometry(params: &SamplerParams, i: usize, s_prev: &BigUint) -> Result<WindowGeometry> {
    params.validate()?;
    if i == 0 || i > params.m {
        return Err(Error::InvalidParams(format!("iteration {i} outside 1..={}", params.m)));
    }
    let step = params.step(i);
    let need = &step * BigUint::from(params.k);
    if s_prev < &need {
        return Err(Error::ExponentUnderflow(format!(
            "s_prev = {s_prev} is below k^(m-i+2) = {need}"
        )));
    }
    let exponents = (0..=params.k)
        .map(|j| s_prev - &step * BigUint::from(j))
        .collect();
    Ok(WindowGeometry {
        i,
        s_prev: s_prev.clone(),
        ratio_exponent: step,
        exponents,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(with = "dec")]
    pub y: BigUint,
    #[serde(with = "dec")]
    pub z: u64,
    #[serde(with = "dec")]
    pub x: BigUint,
    #[serde(with = "dec")]
    pub s: BigUint,
}

/// One run of the sampler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTrace {
    #[serde(with = "dec")]
    pub seed: u64,
    pub params: SamplerParams,
    pub iterations: Vec<TraceStep>,
}

impl SampleTrace {
    /// `(X_1, ..., X_m)`.
    pub fn tuple(&self) -> Vec<BigUint> {
        self.iterations.iter().map(|t| t.x.clone()).collect()
    }

    /// `(x_{i-1}, s_{i-1})` for `i = 1..=m`: `Win_i` starts at `x_{i-1} + 1`
    /// and has length `2^{s_{i-1}}`.
    pub fn windows(&self) -> Vec<(BigUint, BigUint)> {
        let mut out = Vec::with_capacity(self.iterations.len());
        let mut x = BigUint::zero();
        let mut s = self.params.s0.clone();
        for t in &self.iterations {
            out.push((x.clone(), s.clone()));
            x = t.x.clone();
            s = t.s.clone();
        }
        out
    }

    /// `f(X_i) = i` for every `i`.
    pub fn hits(&self, f: &impl Labeling) -> bool {
        self.iterations.iter().enumerate().all(|(i, t)| f.label(&t.x) == i + 1)
    }
}

/// Draws one trace. Deterministic in `seed`.
pub fn sample(params: &SamplerParams, seed: u64) -> Result<SampleTrace> {
    params.validate()?;
    if params.s0 > BigUint::from(MAX_EXPONENT_BITS) {
        return Err(Error::InvalidParams(format!(
            "S0 = {} exceeds the sampler limit of {MAX_EXPONENT_BITS} bits",
            params.s0
        )));
    }
    let mut rng = rng(seed);
    Ok(sample_with(params, seed, &mut rng))
}

fn sample_with(params: &SamplerParams, seed: u64, rng: &mut impl Rng) -> SampleTrace {
    let mut x = BigUint::zero();
    let mut s = params.s0.clone();
    let mut iterations = Vec::with_capacity(params.m);
    for i in 1..=params.m {
        let bits = s.to_u64().expect("exponent bounded by S0");
        let y = rng.gen_biguint(bits) + 1u32;
        let z = rng.gen_range(1..params.k);
        x += &y;
        s -= params.step(i) * BigUint::from(z);
        iterations.push(TraceStep {
            y,
            z,
            x: x.clone(),
            s: s.clone(),
        });
    }
    SampleTrace {
        seed,
        params: params.clone(),
        iterations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Structure,
    Range,
    Consistency,
    Step,
    Monotonicity,
    Boundedness,
    Floor,
    WindowSize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub iteration: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks every structural property of a trace and lists what fails.
pub fn verify_trace(trace: &SampleTrace, params: &SamplerParams) -> TraceCheck {
    let mut v = Vec::new();
    let mut push = |iteration: usize, kind: ViolationKind, detail: String| {
        v.push(Violation { iteration, kind, detail });
    };
    if trace.params != *params {
        push(0, ViolationKind::Structure, "trace was drawn with different parameters".into());
    }
    let m = params.m;
    if trace.iterations.len() != m {
        push(
            0,
            ViolationKind::Structure,
            format!("{} iterations, expected {m}", trace.iterations.len()),
        );
        return TraceCheck { ok: false, violations: v };
    }
    let k = BigUint::from(params.k);
    let mut xs = vec![BigUint::zero()];
    let mut ss = vec![params.s0.clone()];
    for (idx, t) in trace.iterations.iter().enumerate() {
        let i = idx + 1;
        let (x_prev, s_prev) = (&xs[idx], &ss[idx]);
        let step = params.step(i);
        if t.y.is_zero() || (&t.y - 1u32).bits() > s_prev.to_u64().unwrap_or(u64::MAX) {
            push(i, ViolationKind::Range, format!("y = {} outside [1, 2^{s_prev}]", t.y));
        }
        if t.z < 1 || t.z >= params.k {
            push(i, ViolationKind::Range, format!("z = {} outside [1, {}]", t.z, params.k - 1));
        }
        if t.x != x_prev + &t.y {
            push(i, ViolationKind::Consistency, "x differs from x_prev + y".into());
        }
        let dec = &step * BigUint::from(t.z);
        if s_prev < &dec || t.s != s_prev - &dec {
            push(
                i,
                ViolationKind::Step,
                format!("s = {} differs from s_prev - k^(m-i+1) z", t.s),
            );
        }
        if t.x <= *x_prev {
            push(i, ViolationKind::Monotonicity, format!("x_{i} does not exceed x_{}", i - 1));
        }
        // |Win_{i+1}| = 2^{s_i} must be one of w_{i,1}, ..., w_{i,k-1}.
        let on_ladder = (1..params.k).any(|j| {
            let d = &step * BigUint::from(j);
            s_prev >= &d && t.s == s_prev - d
        });
        if !on_ladder {
            push(i, ViolationKind::WindowSize, format!("2^{} is not on the ladder", t.s));
        }
        xs.push(t.x.clone());
        ss.push(t.s.clone());
    }
    let x_m = &xs[m];
    let s_m = &ss[m];
    for i in 0..=m {
        let room = match pow2(&ss[i]) {
            Ok(p) => p * BigUint::from(m - i),
            Err(_) => continue,
        };
        if *x_m > &xs[i] + room {
            push(i, ViolationKind::Boundedness, format!("X_m exceeds X_{i} + (m-{i}) 2^S_{i}"));
        }
        if i < m {
            let drop = k.pow((m - i + 1) as u32);
            if ss[i] >= drop && *s_m < &ss[i] - &drop {
                push(i, ViolationKind::Floor, format!("S_m below S_{i} - k^(m-{i}+1)"));
            }
        }
    }
    TraceCheck {
        ok: v.is_empty(),
        violations: v,
    }
}

/// A finite distribution over strictly increasing `m`-tuples in
/// `[1, universe]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitTupleDistribution {
    m: usize,
    universe: u64,
    entries: Vec<(Vec<u64>, Rational)>,
}

impl ExplicitTupleDistribution {
    /// Merges repeated tuples, drops zero mass and sorts by tuple.
    pub fn new(m: usize, universe: u64, entries: Vec<(Vec<u64>, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
        for (t, p) in entries {
            if t.len() != m {
                return Err(Error::InvalidParams(format!("tuple {t:?} does not have length {m}")));
            }
            if t.windows(2).any(|w| w[0] >= w[1]) || t.first() == Some(&0) || t.last() > Some(&universe) {
                return Err(Error::InvalidParams(format!(
                    "tuple {t:?} is not increasing within [1, {universe}]"
                )));
            }
            if p < Rational::zero() {
                return Err(Error::InvalidParams("negative probability".into()));
            }
            *merged.entry(t).or_insert_with(Rational::zero) += p;
        }
        let entries: Vec<_> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: Rational = entries.iter().map(|(_, p)| p).sum();
        if total != Rational::one() {
            return Err(Error::NotNormalized(format!("probabilities sum to {}", to_pq(&total))));
        }
        Ok(ExplicitTupleDistribution { m, universe, entries })
    }

    /// Uniform over the given tuples.
    pub fn uniform(m: usize, universe: u64, tuples: Vec<Vec<u64>>) -> Result<Self> {
        let n = tuples.len() as i64;
        if n == 0 {
            return Err(Error::InvalidParams("empty support".into()));
        }
        let p = Rational::new(1.into(), n.into());
        Self::new(m, universe, tuples.into_iter().map(|t| (t, p.clone())).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn entries(&self) -> &[(Vec<u64>, Rational)] {
        &self.entries
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Support tuples as graph vertices.
    pub fn support(&self) -> Vec<Vertex> {
        self.entries
            .iter()
            .map(|(t, _)| Vertex::tuple(t).expect("validated increasing"))
            .collect()
    }

    /// Probability mass of a set of vertices.
    pub fn mass_of(&self, set: &[Vertex]) -> Rational {
        let wanted: std::collections::BTreeSet<Vec<u64>> = set
            .iter()
            .filter_map(|v| v.as_tuple().and_then(|t| t.to_u64()))
            .collect();
        self.entries
            .iter()
            .filter(|(t, _)| wanted.contains(t))
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability of each value of `X_i` (1-based `i`).
    pub fn marginal(&self, i: usize) -> BTreeMap<u64, Rational> {
        let mut out: BTreeMap<u64, Rational> = BTreeMap::new();
        for (t, p) in &self.entries {
            *out.entry(t[i - 1]).or_insert_with(Rational::zero) += p;
        }
        out
    }
}

/// Number of `(Y, Z)` outcomes with the final `Z_m` summed out.
pub fn outcome_count(params: &SamplerParams) -> BigUint {
    fn go(p: &SamplerParams, i: usize, s: &BigUint) -> BigUint {
        let Ok(here) = pow2(s) else {
            return BigUint::one() << MAX_EXPONENT_BITS;
        };
        if i == p.m {
            return here;
        }
        let step = p.step(i);
        let mut total = BigUint::zero();
        for z in 1..p.k {
            total += go(p, i + 1, &(s - &step * BigUint::from(z)));
        }
        here * total
    }
    go(params, 1, &params.s0)
}

/// Exact law of `(X_1, ..., X_m)`.
pub fn enumerate_distribution(params: &SamplerParams, caps: &Caps) -> Result<ExplicitTupleDistribution> {
    params.validate()?;
    if params.s0 > BigUint::from(64u32) {
        return Err(Error::cap("max_outcomes", format!("2^{}", params.s0), caps.max_outcomes));
    }
    caps.check_outcomes(&outcome_count(params))?;
    let m = params.m;
    let s0 = params.s0.to_u64().expect("checked above");
    let steps: Vec<u64> = (1..=m).map(|i| params.step(i).to_u64().expect("step below S0")).collect();

    // Exponent paths (s_0, ..., s_{m-1}) with their multiplicity.
    let mut paths: Vec<Vec<u64>> = vec![vec![s0]];
    for i in 1..m {
        paths = paths
            .into_iter()
            .flat_map(|path| {
                let s = *path.last().expect("nonempty");
                let step = steps[i - 1];
                (1..params.k).map(move |z| {
                    let mut p = path.clone();
                    p.push(s - step * z);
                    p
                })
            })
            .collect();
    }
    let max_bits: u64 = paths.iter().map(|p| p.iter().sum::<u64>()).max().expect("one path");
    let mut weights: BTreeMap<Vec<u64>, u128> = BTreeMap::new();
    let mut universe = 0u64;
    for path in &paths {
        let weight = 1u128 << (max_bits - path.iter().sum::<u64>());
        let mut tuple = Vec::with_capacity(m);
        let reach: u64 = path.iter().map(|&s| 1u64 << s).sum();
        universe = universe.max(reach);
        enumerate_path(path, 0, 0, &mut tuple, &mut |t| {
            *weights.entry(t.to_vec()).or_insert(0) += weight;
        });
    }
    let denom = BigUint::from(params.k - 1).pow((m - 1) as u32) << max_bits;
    let denom = num_bigint::BigInt::from(denom);
    let entries = weights
        .into_iter()
        .map(|(t, w)| (t, Rational::new(w.into(), denom.clone())))
        .collect();
    ExplicitTupleDistribution::new(m, universe, entries)
}

fn enumerate_path(path: &[u64], depth: usize, x: u64, tuple: &mut Vec<u64>, emit: &mut impl FnMut(&[u64])) {
    if depth == path.len() {
        emit(tuple);
        return;
    }
    for y in 1..=(1u64 << path[depth]) {
        tuple.push(x + y);
        enumerate_path(path, depth + 1, x + y, tuple, emit);
        tuple.pop();
    }
}

/// `Pr[f(X_i) = i for all i]`.
pub fn success_probability(dist: &ExplicitTupleDistribution, f: &impl Labeling) -> Rational {
    dist.entries
        .iter()
        .filter(|(t, _)| t.iter().enumerate().all(|(i, &x)| f.label(&BigUint::from(x)) == i + 1))
        .map(|(_, p)| p)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryResult {
    pub max: Rational,
    /// First maximizer in lexicographic order of label vectors.
    pub argmax: LabelFunction,
    pub functions_checked: u64,
}

/// Maximum success probability over every label function on
/// `[1, universe]`, by brute force.
pub fn adversary_bound_exact(dist: &ExplicitTupleDistribution, caps: &Caps) -> Result<AdversaryResult> {
    let width = usize::try_from(dist.universe)
        .map_err(|_| Error::cap("max_label_functions", format!("{}^{}", dist.m, dist.universe), caps.max_label_functions))?;
    let count = BigUint::from(dist.m).pow(dist.universe.min(u32::MAX as u64) as u32);
    caps.check_label_functions(&count)?;
    let mut best: Option<(Rational, LabelFunction)> = None;
    let mut checked = 0u64;
    for f in LabelFunction::all(dist.m, BigUint::one(), width, caps)? {
        checked += 1;
        let labels = f.labels();
        let p: Rational = dist
            .entries
            .iter()
            .filter(|(t, _)| t.iter().enumerate().all(|(i, &x)| labels[(x - 1) as usize] == i + 1))
            .map(|(_, p)| p)
            .sum();
        if best.as_ref().map_or(true, |(b, _)| p > *b) {
            best = Some((p, f));
        }
    }
    let (max, argmax) = best.expect("at least one label function");
    Ok(AdversaryResult {
        max,
        argmax,
        functions_checked: checked,
    })
}

/// Monte-Carlo estimate of `Pr[f(X_i) = i for all i]` with a 99% Wilson
/// interval. Trial `t` uses the `t`-th output of a generator seeded with
/// `seed`, so the result does not depend on thread scheduling.
pub fn monte_carlo_success<F>(params: &SamplerParams, f: &F, trials: u64, seed: u64) -> Result<Estimate>
where
    F: Labeling + Sync,
{
    params.validate()?;
    if params.s0 > BigUint::from(MAX_EXPONENT_BITS) {
        return Err(Error::InvalidParams(format!("S0 = {} is too large to sample", params.s0)));
    }
    let mut master = rng(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.next_u64()).collect();
    let hits = seeds
        .par_iter()
        .filter(|&&s| {
            let mut r = rng(s);
            sample_with(params, s, &mut r).hits(f)
        })
        .count() as u64;
    Ok(Estimate::new(hits, trials, 0.99))
}

/// Labels `e` with `1 + #{cuts below e}`, capped at `m`. The cuts sit at the
/// largest value each `X_i` can reach when every `Z` equals 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdAdversary {
    pub cuts: Vec<BigUint>,
}

impl ThresholdAdversary {
    pub fn along_unit_ladder(params: &SamplerParams) -> Result<Self> {
        params.validate()?;
        let mut cuts = Vec::with_capacity(params.m.saturating_sub(1));
        let mut reach = BigUint::zero();
        let mut s = params.s0.clone();
        for i in 1..params.m {
            reach += pow2(&s)?;
            cuts.push(reach.clone());
            s -= params.step(i);
        }
        Ok(ThresholdAdversary { cuts })
    }
}

impl Labeling for ThresholdAdversary {
    fn label(&self, e: &Element) -> usize {
        1 + self.cuts.iter().filter(|c| *c < e).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn small(m: usize, k: u64, s0: u32) -> SamplerParams {
        SamplerParams::new(m, k, BigUint::from(s0)).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SamplerParams::new(2, 2, BigUint::from(7u32)).is_err());
        assert!(SamplerParams::new(2, 1, BigUint::from(100u32)).is_err());
        let d = SamplerParams::default_constants(3).unwrap();
        assert_eq!((d.k, d.s0.clone()), (27, BigUint::from(531_441u32)));
        assert!(SamplerParams::default_constants(1).is_err());
    }

    #[test]
    fn geometry_examples() {
        let p = small(2, 2, 8);
        let g = window_geometry(&p, 1, &BigUint::from(8u32)).unwrap();
        assert_eq!(g.widths().unwrap(), vec![256u32, 16, 1].into_iter().map(BigUint::from).collect::<Vec<_>>());
        assert_eq!(g.ratio().unwrap(), BigUint::from(16u32));
        let g = window_geometry(&p, 2, &BigUint::from(4u32)).unwrap();
        assert_eq!(g.widths().unwrap(), vec![16u32, 4, 1].into_iter().map(BigUint::from).collect::<Vec<_>>());
        assert_eq!(g.ratio().unwrap(), BigUint::from(4u32));
        assert!(matches!(
            window_geometry(&p, 2, &BigUint::from(3u32)),
            Err(Error::ExponentUnderflow(_))
        ));
        assert!(window_geometry(&p, 3, &BigUint::from(8u32)).is_err());
    }

    #[test]
    fn sample_support_bounds() {
        let p = small(2, 2, 8);
        for seed in 0..200 {
            let t = sample(&p, seed).unwrap();
            let (x1, x2) = (&t.iterations[0].x, &t.iterations[1].x);
            assert!(*x1 >= BigUint::one() && *x1 <= BigUint::from(256u32));
            assert!(*x2 > *x1 && *x2 <= x1 + 16u32);
            assert_eq!(t.iterations[0].s, BigUint::from(4u32));
            assert!(verify_trace(&t, &p).ok);
        }
        assert_eq!(sample(&p, 9).unwrap(), sample(&p, 9).unwrap());
    }

    #[test]
    fn verify_flags_hand_built_violations() {
        let p = small(2, 2, 8);
        let mut t = sample(&p, 1).unwrap();
        t.iterations[1].x = t.iterations[0].x.clone();
        let check = verify_trace(&t, &p);
        assert!(!check.ok);
        assert!(check.violations.iter().any(|v| v.kind == ViolationKind::Monotonicity));

        let mut t = sample(&p, 1).unwrap();
        t.iterations[0].s = p.s0.clone();
        let check = verify_trace(&t, &p);
        assert!(check.violations.iter().any(|v| v.kind == ViolationKind::Step));
    }

    #[test]
    fn trace_json_uses_decimal_strings() {
        let t = sample(&small(1, 2, 4), 3).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["seed"], "3");
        assert_eq!(v["params"]["s0"], "4");
        assert!(v["iterations"][0]["y"].is_string());
        let back: SampleTrace = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn single_draw_is_uniform() {
        let d = enumerate_distribution(&small(1, 2, 8), &Caps::default()).unwrap();
        assert_eq!(d.entries().len(), 256);
        assert!(d.entries().iter().all(|(_, p)| *p == ratio(1, 256)));
    }

    #[test]
    fn worked_instance() {
        let d = enumerate_distribution(&small(2, 2, 8), &Caps::default()).unwrap();
        assert_eq!(d.total(), ratio(1, 1));
        let f = |e: &BigUint| if *e <= BigUint::from(256u32) { 1 } else { 2 };
        assert_eq!(success_probability(&d, &f), ratio(17, 512));
        assert_eq!(success_probability(&d, &|_: &BigUint| 1), ratio(0, 1));
    }

    #[test]
    fn enumeration_cap() {
        let caps = Caps {
            max_outcomes: 1000,
            ..Caps::default()
        };
        assert!(matches!(
            enumerate_distribution(&small(2, 2, 8), &caps),
            Err(Error::CapExceeded { cap: "max_outcomes", .. })
        ));
    }

    #[test]
    fn adversary_examples() {
        let caps = Caps::default();
        let point = ExplicitTupleDistribution::uniform(2, 6, vec![vec![2, 5]]).unwrap();
        let r = adversary_bound_exact(&point, &caps).unwrap();
        assert_eq!(r.max, ratio(1, 1));
        assert_eq!((r.argmax.labels()[1], r.argmax.labels()[4]), (1, 2));
        let two = ExplicitTupleDistribution::uniform(2, 3, vec![vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(adversary_bound_exact(&two, &caps).unwrap().max, ratio(1, 2));
    }

    #[test]
    fn distribution_validation() {
        assert!(ExplicitTupleDistribution::uniform(2, 3, vec![vec![2, 1]]).is_err());
        assert!(ExplicitTupleDistribution::uniform(2, 3, vec![vec![1, 4]]).is_err());
        assert!(matches!(
            ExplicitTupleDistribution::new(1, 3, vec![(vec![1], ratio(1, 2))]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let p = small(2, 2, 8);
        let never = |_: &BigUint| 1usize;
        let e = monte_carlo_success(&p, &never, 500, 4).unwrap();
        assert_eq!(e.successes, 0);
        let f = |e: &BigUint| if *e <= BigUint::from(256u32) { 1 } else { 2 };
        assert_eq!(
            monte_carlo_success(&p, &f, 2000, 11).unwrap(),
            monte_carlo_success(&p, &f, 2000, 11).unwrap()
        );
    }

    #[test]
    fn threshold_adversary_cuts() {
        let a = ThresholdAdversary::along_unit_ladder(&small(2, 2, 8)).unwrap();
        assert_eq!(a.cuts, vec![BigUint::from(256u32)]);
        assert_eq!(a.label(&BigUint::from(256u32)), 1);
        assert_eq!(a.label(&BigUint::from(257u32)), 2);
    }
}
