//! MMPHF schemes with bit-exact size accounting.
//!
//! An index built for `S ⊆ [u]` answers `query(q)` with the number of
//! members strictly below `q` whenever `q ∈ S`, and with some value in
//! `[0, n-1]` otherwise. Two concrete schemes are provided:
//!
//! * `explicit-set` stores the combinatorial rank of `S` among all
//!   `n`-subsets of `[u]` in `⌈log2 C(u, n)⌉` bits.
//! * `rank-map` stores a seeded hash-and-displace table with `⌈log2 n⌉` bits
//!   of rank per slot.
//!
//! `broken-constant` answers 0 for everything and exists to show that the
//! coloring checks catch an incorrect scheme.
//!
//! Because members `e` of adjacent conflict-graph vertices have different
//! ranks, a correct scheme must give adjacent vertices different payloads;
//! [`extract_coloring`] turns that into an explicit proper coloring.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::coloring::{chromatic_number, fractional_chromatic_number};
use crate::graphs::{binomial, build_graph, GraphSpec, Vertex};
use crate::magnitude::{ceil_log2, is_power_of_two, Magnitude};
use crate::rational::{exact_log2, from_counts, to_f64, to_pq, Rational};
use crate::{Caps, Error, Result};

/// Scheme id byte plus a 64-bit key count.
pub const HEADER_BITS: u64 = 8 + 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySet {
    elements: Vec<u64>,
    u: u64,
}

impl KeySet {
    pub fn new(elements: Vec<u64>, u: u64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParams("key set must be nonempty".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("keys must be strictly increasing".into()));
        }
        if elements[0] == 0 || *elements.last().expect("nonempty") > u {
            return Err(Error::InvalidParams(format!("keys must lie in [1, {u}]")));
        }
        Ok(KeySet { elements, u })
    }

    /// The elements of a tuple vertex, over universe `[1, u]`.
    pub fn from_vertex(v: &Vertex, u: u64) -> Result<Self> {
        let t = v
            .as_tuple()
            .and_then(|t| t.to_u64())
            .ok_or_else(|| Error::InvalidVertex(format!("{v} is not a machine-word tuple")))?;
        KeySet::new(t, u)
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn n(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    /// Members strictly below `q`.
    pub fn rank(&self, q: u64) -> u64 {
        self.elements.partition_point(|&e| e < q) as u64
    }

    /// A `u=<u>` header line followed by one key per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("u={}\n", self.u);
        for e in &self.elements {
            out.push_str(&format!("{e}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParams("empty key file".into()))?;
        let u = header
            .strip_prefix("u=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::InvalidParams(format!("bad header line {header:?}")))?;
        let elements = lines
            .map(|l| l.parse().map_err(|_| Error::InvalidParams(format!("bad key {l:?}"))))
            .collect::<Result<Vec<u64>>>()?;
        KeySet::new(elements, u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    ExplicitSet,
    RankMap,
    BrokenConstant,
}

impl Scheme {
    pub const CORRECT: [Scheme; 2] = [Scheme::ExplicitSet, Scheme::RankMap];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExplicitSet => "explicit-set",
            Scheme::RankMap => "rank-map",
            Scheme::BrokenConstant => "broken-constant",
        }
    }

    fn id(&self) -> u8 {
        match self {
            Scheme::ExplicitSet => 1,
            Scheme::RankMap => 2,
            Scheme::BrokenConstant => 255,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit-set" => Ok(Scheme::ExplicitSet),
            "rank-map" => Ok(Scheme::RankMap),
            "broken-constant" => Ok(Scheme::BrokenConstant),
            _ => Err(Error::InvalidParams(format!("unknown scheme {s:?}"))),
        }
    }
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Anything that answers rank queries over a known `(n, u)`.
pub trait RankQuery {
    fn n(&self) -> u64;
    fn u(&self) -> u64;
    fn rank(&self, q: u64) -> Result<u64>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmphfIndex {
    scheme: Scheme,
    n: u64,
    u: u64,
    seed: u64,
    payload: BitVec<u64, Lsb0>,
}

impl MmphfIndex {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn payload(&self) -> &BitSlice<u64, Lsb0> {
        &self.payload
    }

    /// Payload bits; the header is not counted.
    pub fn size_bits(&self) -> u64 {
        self.payload.len() as u64
    }

    pub fn total_bits(&self) -> u64 {
        HEADER_BITS + self.size_bits()
    }

    /// The payload as a `0`/`1` string.
    pub fn payload_string(&self) -> String {
        self.payload.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    /// The header as it would be stored ahead of the payload.
    pub fn header(&self) -> (u8, u64) {
        (self.scheme.id(), self.n)
    }
}

impl RankQuery for MmphfIndex {
    fn n(&self) -> u64 {
        self.n
    }

    fn u(&self) -> u64 {
        self.u
    }

    fn rank(&self, q: u64) -> Result<u64> {
        query(self, q)
    }
}

pub fn build(scheme: Scheme, keys: &KeySet, seed: u64) -> Result<MmphfIndex> {
    let payload = match scheme {
        Scheme::ExplicitSet => explicit::encode(keys),
        Scheme::RankMap => rankmap::encode(keys, seed)?,
        Scheme::BrokenConstant => bitvec![u64, Lsb0; 0],
    };
    Ok(MmphfIndex {
        scheme,
        n: keys.n(),
        u: keys.u(),
        seed,
        payload,
    })
}

/// Rank of `q` when `q` is a member; some value in `[0, n-1]` otherwise.
pub fn query(index: &MmphfIndex, q: u64) -> Result<u64> {
    if q == 0 || q > index.u {
        return Err(Error::QueryOutOfUniverse {
            query: q,
            universe: index.u,
        });
    }
    let r = match index.scheme {
        Scheme::ExplicitSet => explicit::query(index, q)?,
        Scheme::RankMap => rankmap::query(index, q)?,
        Scheme::BrokenConstant => 0,
    };
    Ok(r.min(index.n - 1))
}

fn write_bits(bits: &mut BitVec<u64, Lsb0>, value: &BigUint, width: u64) {
    for i in 0..width {
        bits.push(value.bit(i));
    }
}

fn read_bits(bits: &BitSlice<u64, Lsb0>, from: usize, width: usize) -> Result<BigUint> {
    if from + width > bits.len() {
        return Err(Error::CorruptIndex("payload is truncated".into()));
    }
    let mut v = BigUint::zero();
    for i in (0..width).rev() {
        v <<= 1;
        if bits[from + i] {
            v += 1u32;
        }
    }
    Ok(v)
}

fn small(v: BigUint) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| Error::CorruptIndex("field does not fit a machine word".into()))
}

/// Colex rank of the set among all `n`-subsets of `[u]`:
/// `Σ_j C(s_j - 1, j)` for sorted `s_1 < ... < s_n`.
mod explicit {
    use super::*;

    pub fn width(n: u64, u: u64) -> u64 {
        ceil_log2(&binomial(&BigUint::from(u), n as usize)).to_u64().expect("small")
    }

    pub fn encode(keys: &KeySet) -> BitVec<u64, Lsb0> {
        let rank: BigUint = keys
            .elements
            .iter()
            .enumerate()
            .map(|(j, &s)| binomial(&BigUint::from(s - 1), j + 1))
            .sum();
        let mut bits = BitVec::new();
        write_bits(&mut bits, &rank, width(keys.n(), keys.u));
        bits
    }

    pub fn decode(index: &MmphfIndex) -> Result<Vec<u64>> {
        let w = width(index.n, index.u) as usize;
        if index.payload.len() != w {
            return Err(Error::CorruptIndex(format!(
                "payload has {} bits, expected {w}",
                index.payload.len()
            )));
        }
        let mut rank = read_bits(&index.payload, 0, w)?;
        let mut out = Vec::with_capacity(index.n as usize);
        let mut hi = index.u;
        for j in (1..=index.n as usize).rev() {
            // Largest c < hi with C(c, j) <= rank; then s_j = c + 1.
            let (mut lo, mut top) = (j as u64 - 1, hi - 1);
            while lo < top {
                let mid = lo + (top - lo + 1) / 2;
                if binomial(&BigUint::from(mid), j) <= rank {
                    lo = mid;
                } else {
                    top = mid - 1;
                }
            }
            rank -= binomial(&BigUint::from(lo), j);
            out.push(lo + 1);
            hi = lo;
        }
        if !rank.is_zero() {
            return Err(Error::CorruptIndex("rank exceeds C(u, n)".into()));
        }
        out.reverse();
        Ok(out)
    }

    pub fn query(index: &MmphfIndex, q: u64) -> Result<u64> {
        let set = decode(index)?;
        Ok(set.partition_point(|&e| e < q) as u64)
    }
}

/// Hash-and-displace table. Payload layout: 6 bits of displacement width
/// `w`, then `w` bits per bucket, then `⌈log2 n⌉` bits of rank per slot.
mod rankmap {
    use super::*;

    const MAX_ATTEMPTS: u64 = 1 << 24;

    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn buckets(n: u64) -> u64 {
        n.div_ceil(2).max(1)
    }

    fn bucket(x: u64, seed: u64, n: u64) -> u64 {
        mix(x ^ mix(seed)) % buckets(n)
    }

    fn slot(x: u64, seed: u64, d: u64, n: u64) -> u64 {
        mix(x ^ mix(seed ^ mix(d.wrapping_add(1)))) % n
    }

    fn rank_width(n: u64) -> u64 {
        ceil_log2(&BigUint::from(n)).to_u64().expect("small")
    }

    pub fn encode(keys: &KeySet, seed: u64) -> Result<BitVec<u64, Lsb0>> {
        let n = keys.n();
        let nb = buckets(n);
        let mut members: Vec<Vec<(u64, u64)>> = vec![Vec::new(); nb as usize];
        for (r, &x) in keys.elements.iter().enumerate() {
            members[bucket(x, seed, n) as usize].push((x, r as u64));
        }
        let mut order: Vec<usize> = (0..nb as usize).collect();
        order.sort_by_key(|&b| (std::cmp::Reverse(members[b].len()), b));
        let mut taken = vec![false; n as usize];
        let mut ranks = vec![0u64; n as usize];
        let mut disp = vec![0u64; nb as usize];
        for b in order {
            if members[b].is_empty() {
                continue;
            }
            let mut found = false;
            for d in 0..MAX_ATTEMPTS {
                let slots: Vec<u64> = members[b].iter().map(|&(x, _)| slot(x, seed, d, n)).collect();
                let distinct = slots.iter().collect::<BTreeSet<_>>().len() == slots.len();
                if distinct && slots.iter().all(|&s| !taken[s as usize]) {
                    for (&s, &(_, r)) in slots.iter().zip(&members[b]) {
                        taken[s as usize] = true;
                        ranks[s as usize] = r;
                    }
                    disp[b] = d;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Internal(format!("no displacement found for bucket {b}")));
            }
        }
        let w = disp.iter().map(|&d| 64 - d.leading_zeros() as u64).max().unwrap_or(0);
        let rw = rank_width(n);
        let mut bits = BitVec::new();
        write_bits(&mut bits, &BigUint::from(w), 6);
        for &d in &disp {
            write_bits(&mut bits, &BigUint::from(d), w);
        }
        for &r in &ranks {
            write_bits(&mut bits, &BigUint::from(r), rw);
        }
        Ok(bits)
    }

    pub fn query(index: &MmphfIndex, q: u64) -> Result<u64> {
        let n = index.n;
        let w = small(read_bits(&index.payload, 0, 6)?)? as usize;
        let b = bucket(q, index.seed, n) as usize;
        let d = small(read_bits(&index.payload, 6 + b * w, w)?)?;
        let s = slot(q, index.seed, d, n) as usize;
        let rw = rank_width(n) as usize;
        let base = 6 + buckets(n) as usize * w;
        small(read_bits(&index.payload, base + s * rw, rw)?)
    }
}

/// `S(x) = {3i} ∪ {3i-1 : x_i = 1} ∪ {3i+1 : x_i = 0}` over `[3d+1]`, so
/// that `rank(3i) = 2(i-1) + x_i`.
pub fn encode_bitstring(x: &[bool]) -> Result<KeySet> {
    if x.is_empty() {
        return Err(Error::InvalidParams("bit string must be nonempty".into()));
    }
    let d = x.len() as u64;
    let mut keys = Vec::with_capacity(2 * x.len());
    for (idx, &bit) in x.iter().enumerate() {
        let i = idx as u64 + 1;
        if bit {
            keys.push(3 * i - 1);
            keys.push(3 * i);
        } else {
            keys.push(3 * i);
            keys.push(3 * i + 1);
        }
    }
    KeySet::new(keys, 3 * d + 1)
}

/// Recovers `x` from any index over `S(x)` through `x_i = rank(3i) - 2(i-1)`.
pub fn decode_bitstring(index: &impl RankQuery, d: usize) -> Result<Vec<bool>> {
    (1..=d as u64)
        .map(|i| {
            let r = index.rank(3 * i)?;
            match r.checked_sub(2 * (i - 1)) {
                Some(0) => Ok(false),
                Some(1) => Ok(true),
                _ => Err(Error::CorruptIndex(format!(
                    "rank({}) = {r}, expected {} or {}",
                    3 * i,
                    2 * (i - 1),
                    2 * (i - 1) + 1
                ))),
            }
        })
        .collect()
}

/// Colors read off index payloads for every vertex of a conflict graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringExtraction {
    pub scheme: Scheme,
    pub vertices: Vec<Vertex>,
    pub colors: Vec<String>,
    pub sizes: Vec<u64>,
    /// Edges whose endpoints share a payload, as 0-based index pairs.
    pub monochromatic: Vec<(usize, usize)>,
    pub edges_checked: usize,
}

impl ColoringExtraction {
    pub fn is_proper(&self) -> bool {
        self.monochromatic.is_empty()
    }

    pub fn distinct_colors(&self) -> usize {
        self.colors.iter().collect::<BTreeSet<_>>().len()
    }
}

impl Serialize for ColoringExtraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let colors: Vec<(String, &String)> = self
            .vertices
            .iter()
            .zip(&self.colors)
            .map(|(v, c)| (v.to_string(), c))
            .collect();
        let mut st = s.serialize_struct("ColoringExtraction", 6)?;
        st.serialize_field("scheme", &self.scheme)?;
        st.serialize_field("proper", &self.is_proper())?;
        st.serialize_field("distinct_colors", &self.distinct_colors())?;
        st.serialize_field("edges_checked", &self.edges_checked)?;
        st.serialize_field(
            "monochromatic_edges",
            &self.monochromatic.iter().map(|&(a, b)| (a + 1, b + 1)).collect::<Vec<_>>(),
        )?;
        st.serialize_field("colors", &colors)?;
        st.end()
    }
}

/// Builds an index for every vertex of a conflict graph and checks every
/// edge for equal payloads.
pub fn extract_coloring(scheme: Scheme, spec: &GraphSpec, seed: u64, caps: &Caps) -> Result<ColoringExtraction> {
    let GraphSpec::Conflict { width, offset, .. } = spec else {
        return Err(Error::InvalidSpec("coloring extraction needs a conflict graph".into()));
    };
    let u = (offset + width)
        .to_u64()
        .ok_or_else(|| Error::InvalidSpec("universe exceeds a machine word".into()))?;
    let graph = build_graph(spec, caps)?;
    let indexes = graph
        .vertices()
        .par_iter()
        .map(|v| build(scheme, &KeySet::from_vertex(v, u)?, seed))
        .collect::<Result<Vec<_>>>()?;
    let colors: Vec<String> = indexes.iter().map(|i| i.payload_string()).collect();
    let monochromatic = graph
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| colors[a] == colors[b])
        .collect();
    Ok(ColoringExtraction {
        scheme,
        vertices: graph.vertices().to_vec(),
        sizes: indexes.iter().map(|i| i.size_bits()).collect(),
        colors,
        monochromatic,
        edges_checked: graph.edge_count(),
    })
}

/// `(log2 χ_f - 2) / 2`: exact when `χ_f` is a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBound {
    pub exact: Option<Rational>,
    pub approx: f64,
}

pub fn lower_bound_bits(chi_f: &Rational) -> LowerBound {
    let exact = exact_log2(chi_f).map(|l| Rational::new((l - 2).into(), 2.into()));
    LowerBound {
        exact,
        approx: (to_f64(chi_f).log2() - 2.0) / 2.0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeStats {
    pub scheme: Scheme,
    pub max_bits: u64,
    pub mean_bits: Rational,
    pub distinct: usize,
    pub proper: bool,
    pub monochromatic_edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub vertices: usize,
    pub chi_f: Rational,
    pub chi: usize,
    pub lower_bound: LowerBound,
    pub schemes: Vec<SchemeStats>,
}

impl BoundReport {
    /// `distinct ≥ χ ≥ χ_f` for every scheme that produced a proper
    /// coloring.
    pub fn counting_holds(&self) -> bool {
        let chi = Rational::from_integer(self.chi.into());
        self.chi_f <= chi && self.schemes.iter().filter(|s| s.proper).all(|s| s.distinct >= self.chi)
    }
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            scheme: &'a Scheme,
            max_bits: u64,
            mean_bits: String,
            distinct: usize,
            proper: bool,
            monochromatic_edges: usize,
        }
        let rows: Vec<Row> = self
            .schemes
            .iter()
            .map(|r| Row {
                scheme: &r.scheme,
                max_bits: r.max_bits,
                mean_bits: to_pq(&r.mean_bits),
                distinct: r.distinct,
                proper: r.proper,
                monochromatic_edges: r.monochromatic_edges,
            })
            .collect();
        let mut st = s.serialize_struct("BoundReport", 7)?;
        st.serialize_field("vertices", &self.vertices)?;
        st.serialize_field("chi", &self.chi)?;
        st.serialize_field("chi_f", &to_pq(&self.chi_f))?;
        st.serialize_field("lower_bound_bits", &self.lower_bound.exact.as_ref().map(to_pq))?;
        st.serialize_field("lower_bound_bits_approx", &self.lower_bound.approx)?;
        st.serialize_field("counting_holds", &self.counting_holds())?;
        st.serialize_field("schemes", &rows)?;
        st.end()
    }
}

/// Exact `χ`, `χ_f` and the per-scheme payload statistics on a conflict
/// graph.
pub fn bound_report(schemes: &[Scheme], spec: &GraphSpec, seed: u64, caps: &Caps) -> Result<BoundReport> {
    let graph = build_graph(spec, caps)?;
    let frac = fractional_chromatic_number(&graph, caps)?;
    let chrom = chromatic_number(&graph, caps)?;
    let mut rows = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let ex = extract_coloring(scheme, spec, seed, caps)?;
        let total: u64 = ex.sizes.iter().sum();
        rows.push(SchemeStats {
            scheme,
            max_bits: ex.sizes.iter().copied().max().unwrap_or(0),
            mean_bits: from_counts(total, ex.sizes.len() as u64),
            distinct: ex.distinct_colors(),
            proper: ex.is_proper(),
            monochromatic_edges: ex.monochromatic.len(),
        });
    }
    Ok(BoundReport {
        vertices: graph.order(),
        lower_bound: lower_bound_bits(&frac.chi_f),
        chi_f: frac.chi_f,
        chi: chrom.chi,
        schemes: rows,
    })
}

/// Largest `(m² + m)·⌈log2 m⌉` the calculator will expand into `m^{m²+m}`.
const MAX_EXPONENT_BITS: u64 = 1 << 24;

/// Universe parameters for a given `(n, u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniverseParams {
    pub n: u64,
    pub u: String,
    /// `⌊log2 log2 u⌋`.
    pub loglog_u: String,
    pub m: u64,
    pub k: u64,
    /// `m^{m²+m}`, so that `u' = k · 2^{exponent}`.
    pub exponent: String,
    pub u_prime: String,
    /// Decimal `u'` when it has at most 4096 bits.
    pub u_prime_exact: Option<String>,
    pub u_prime_le_u: bool,
    pub m_le_sqrt_n: bool,
    /// `u ≤ 2^{n^{n²+n}}`.
    pub below_upper_range: bool,
    /// `n · 2^{2^{sqrt(log log n)}} ≤ u`, in floating point.
    pub above_lower_range_approx: bool,
}

pub fn parameterize(n: u64, u: &Magnitude) -> Result<UniverseParams> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
    }
    if u.cmp_exact(&BigUint::from(4u32)) == std::cmp::Ordering::Less {
        return Err(Error::InvalidParams(format!(
            "u = {u} is below 4, so log2 log2 u < 1 and no m >= 1 exists"
        )));
    }
    let ll = u.floor_log2()?.floor_log2()?;
    let ll_exact = ll
        .to_exact(4096)
        .ok_or_else(|| Error::InvalidParams(format!("log2 log2 u = {ll} is too large")))?;
    let m_big = ll_exact.nth_root(6);
    let m = m_big
        .to_u64()
        .ok_or_else(|| Error::InvalidParams("m does not fit a machine word".into()))?;
    let k = n / m;
    let e_pow = m * m + m;
    let m_bits = ceil_log2(&BigUint::from(m)).to_u64().expect("small");
    if e_pow.saturating_mul(m_bits) > MAX_EXPONENT_BITS {
        return Err(Error::InvalidParams(format!("m^(m^2+m) with m = {m} is too large")));
    }
    let exponent = BigUint::from(m).pow(e_pow as u32);
    let kb = BigUint::from(k);

    let u_prime_le_u = if k == 0 {
        true
    } else {
        // k · 2^E ≤ u  <=>  ⌈log2 k⌉ + E ≤ log2 u, exactly for powers of two
        // and by materializing otherwise.
        match u {
            Magnitude::Exact(v) => {
                if exponent > BigUint::from(v.bits()) {
                    false
                } else {
                    (&kb << exponent.to_u64().expect("bounded")) <= *v
                }
            }
            Magnitude::PowerOfTwo(l) => l.cmp_exact(&(&exponent + ceil_log2(&kb))) != std::cmp::Ordering::Less,
        }
    };
    let u_prime = if is_power_of_two(&kb) {
        format!("2^{}", &exponent + BigUint::from(kb.bits() - 1))
    } else {
        format!("{k}*2^{exponent}")
    };
    let u_prime_exact = exponent
        .to_u64()
        .filter(|&e| e + 64 <= 4096)
        .map(|e| (&kb << e).to_string());

    Ok(UniverseParams {
        n,
        u: u.to_string(),
        loglog_u: ll.to_string(),
        m,
        k,
        exponent: exponent.to_string(),
        u_prime,
        u_prime_exact,
        u_prime_le_u,
        m_le_sqrt_n: m * m <= n,
        below_upper_range: below_upper_range(n, u)?,
        above_lower_range_approx: above_lower_range(n, u),
    })
}

/// `⌈log2 u⌉ ≤ n^{n²+n}`.
fn below_upper_range(n: u64, u: &Magnitude) -> Result<bool> {
    use std::cmp::Ordering::Greater;
    let nb = BigUint::from(n);
    let e = &nb * &nb + &nb;
    // n^e lies in [2^lo, 2^hi].
    let lo = &e * BigUint::from(nb.bits() - 1);
    let hi = &e * ceil_log2(&nb);
    let c = u.ceil_log2()?;
    if c.ceil_log2()?.cmp_exact(&lo) != Greater {
        return Ok(true);
    }
    if c.floor_log2()?.cmp_exact(&hi) == Greater {
        return Ok(false);
    }
    match (e.to_u32(), c.to_exact(MAX_EXPONENT_BITS)) {
        (Some(e), Some(c)) if hi <= BigUint::from(MAX_EXPONENT_BITS) => Ok(c <= nb.pow(e)),
        _ => Ok(c.log2_f64() <= e.to_f64().unwrap_or(f64::INFINITY) * (n as f64).log2()),
    }
}

fn above_lower_range(n: u64, u: &Magnitude) -> bool {
    let n = n as f64;
    let llu = match u {
        Magnitude::Exact(_) => u.log2_f64().log2(),
        Magnitude::PowerOfTwo(l) => l.log2_f64(),
    };
    let inner = n.log2().log2().max(0.0).sqrt().exp2();
    llu >= (n.log2() + inner).log2()
}
