use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mmphf_lab::coloring::{chi_report, chromatic_number, fractional_chromatic_number};
use mmphf_lab::graphs::{build_graph, tuples_conflict, Graph, GraphSpec, Vertex};
use mmphf_lab::harddist::{
    adversary_bound_exact, enumerate_distribution, sample as draw, verify_trace, ExplicitTupleDistribution,
    SamplerParams, ThresholdAdversary,
};
use mmphf_lab::magnitude::Magnitude;
use mmphf_lab::mmphf::{self, build, decode_bitstring, encode_bitstring, extract_coloring, query, KeySet, Scheme};
use mmphf_lab::rational::{parse_pq, ratio, to_pq, Rational};
use mmphf_lab::stats::Estimate;
use mmphf_lab::windowtree::{build_tree, case1_inequality_check, prune as prune_tree, WindowTreeSpec};
use mmphf_lab::Caps;

use crate::output::{Artifact, Metadata};
use crate::{
    AdversaryCmd, GraphArgs, GraphKind, ParamCmd, PruneCmd, RoundTripCmd, SampleCmd, SamplerArgs, SweepCmd, VerifyCmd,
};

type Res<T> = Result<T, String>;

const ALL_SCHEMES: [Scheme; 3] = [Scheme::ExplicitSet, Scheme::RankMap, Scheme::BrokenConstant];

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn need<T: Copy>(v: Option<T>, flag: &str, graph: &str) -> Res<T> {
    v.ok_or_else(|| format!("--{flag} is required for --graph {graph}"))
}

fn parse_big(s: &str, flag: &str) -> Res<BigUint> {
    s.parse().map_err(|_| format!("--{flag}: not a nonnegative integer: {s:?}"))
}

fn parse_ratio(s: &str, flag: &str) -> Res<Rational> {
    parse_pq(s).ok_or_else(|| format!("--{flag}: not a rational p/q: {s:?}"))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn conflict_spec(m: Option<usize>, big_m: Option<u64>, offset: Option<&str>) -> Res<GraphSpec> {
    let m = need(m, "m", "conflict")?;
    let width = need(big_m, "M", "conflict")?;
    let offset = match offset {
        Some(s) => parse_big(s, "offset")?,
        None => BigUint::default(),
    };
    GraphSpec::offset_conflict(m, width.into(), offset).map_err(err)
}

fn load_graph(g: &GraphArgs, caps: &Caps) -> Res<Graph> {
    let spec = match g.graph {
        GraphKind::Conflict => conflict_spec(g.m, g.big_m, g.offset.as_deref())?,
        GraphKind::Shift => GraphSpec::shift(need(g.n, "n", "shift")?, need(g.u, "u", "shift")?).map_err(err)?,
        GraphKind::Complete => GraphSpec::complete(need(g.n, "n", "complete")?).map_err(err)?,
        GraphKind::Cycle => GraphSpec::cycle(need(g.n, "n", "cycle")?).map_err(err)?,
        GraphKind::Edgeless => GraphSpec::edgeless(need(g.n, "n", "edgeless")?).map_err(err)?,
        GraphKind::Dimacs => {
            let path = g.input.as_deref().ok_or("--input is required for --graph dimacs")?;
            return Graph::from_dimacs(&read(path)?).map_err(err);
        }
    };
    build_graph(&spec, caps).map_err(err)
}

fn edge_list(g: &Graph) -> Vec<[usize; 2]> {
    g.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect()
}

pub fn graph(g: &GraphArgs, caps: &Caps) -> Res<Artifact> {
    let graph = load_graph(g, caps)?;
    let labels: Vec<String> = graph.vertices().iter().map(Vertex::to_string).collect();
    let rows = graph
        .edges()
        .iter()
        .map(|&(a, b)| vec![(a + 1).to_string(), (b + 1).to_string()])
        .collect();
    Ok(Artifact::new(
        json!({
            "vertices": graph.order(),
            "edges": graph.edge_count(),
            "labels": labels,
            "edge_list": edge_list(&graph),
        }),
        vec!["a", "b"],
        rows,
    ))
}

pub fn dimacs(g: &GraphArgs, caps: &Caps, meta: &Metadata) -> Res<String> {
    let graph = load_graph(g, caps)?;
    let mut out = format!("c {}\n", serde_json::to_string(&meta.to_json()).map_err(err)?);
    for (i, v) in graph.vertices().iter().enumerate() {
        out.push_str(&format!("c vertex {} {v}\n", i + 1));
    }
    out.push_str(&graph.to_dimacs());
    Ok(out)
}

pub fn chi(g: &GraphArgs, caps: &Caps) -> Res<Artifact> {
    let graph = load_graph(g, caps)?;
    let r = chromatic_number(&graph, caps).map_err(err)?;
    let rows = graph
        .vertices()
        .iter()
        .zip(&r.coloring)
        .enumerate()
        .map(|(i, (v, c))| vec![(i + 1).to_string(), v.to_string(), (c + 1).to_string()])
        .collect();
    Ok(Artifact::new(
        json!({
            "vertices": graph.order(),
            "edges": graph.edge_count(),
            "chi": r.chi,
            "coloring": r.coloring.iter().map(|c| c + 1).collect::<Vec<_>>(),
            "optimality": r.optimality,
        }),
        vec!["vertex", "label", "color"],
        rows,
    ))
}

pub fn chif(g: &GraphArgs, caps: &Caps) -> Res<Artifact> {
    let graph = load_graph(g, caps)?;
    let f = fractional_chromatic_number(&graph, caps).map_err(err)?;
    let primal_value = mmphf_lab::coloring::verify_primal(&graph, &f.primal).map_err(err)?;
    let dual_value = mmphf_lab::coloring::verify_dual(&graph, &f.dual, caps).map_err(err)?;
    let mut rows = Vec::new();
    for (set, w) in &f.primal.entries {
        let members: Vec<String> = set.iter().map(|v| (v + 1).to_string()).collect();
        rows.push(vec!["primal".into(), members.join(" "), to_pq(w)]);
    }
    for (v, w) in f.dual.weights.iter().enumerate() {
        rows.push(vec!["dual".into(), (v + 1).to_string(), to_pq(w)]);
    }
    Ok(Artifact::new(
        json!({
            "vertices": graph.order(),
            "edges": graph.edge_count(),
            "chi_f": to_pq(&f.chi_f),
            "maximal_independent_sets": f.maximal_sets,
            "pivots": f.pivots,
            "primal": f.primal,
            "dual": f.dual,
            "verified": {
                "primal_value": to_pq(&primal_value),
                "dual_value": to_pq(&dual_value),
                "equal": primal_value == dual_value && primal_value == f.chi_f,
            },
        }),
        vec!["kind", "members", "weight"],
        rows,
    ))
}

fn sampler_params(m: Option<usize>, k: Option<u64>, s0: Option<&str>, defaults: bool) -> Res<SamplerParams> {
    let m = m.ok_or("--m is required")?;
    if defaults {
        if k.is_some() || s0.is_some() {
            return Err("--paper-defaults cannot be combined with --k or --s0".into());
        }
        return SamplerParams::default_constants(m).map_err(err);
    }
    let k = k.ok_or("--k is required unless --paper-defaults is given")?;
    let s0 = parse_big(s0.ok_or("--s0 is required unless --paper-defaults is given")?, "s0")?;
    SamplerParams::new(m, k, s0).map_err(err)
}

fn params_of(p: &SamplerArgs) -> Res<SamplerParams> {
    sampler_params(Some(p.m), p.k, p.s0.as_deref(), p.paper_defaults)
}

fn joined<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn sample(c: &SampleCmd, seed: u64) -> Res<Artifact> {
    let params = params_of(&c.params)?;
    let threshold = ThresholdAdversary::along_unit_ladder(&params).map_err(err)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let (mut clean, mut hits) = (0u64, 0u64);
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for trial in 0..c.trials {
        let trace_seed = master.next_u64();
        let trace = draw(&params, trace_seed).map_err(err)?;
        let check = verify_trace(&trace, &params);
        let hit = trace.hits(&threshold);
        clean += check.ok as u64;
        hits += hit as u64;
        let z: Vec<u64> = trace.iterations.iter().map(|t| t.z).collect();
        let s: Vec<String> = trace.iterations.iter().map(|t| t.s.to_string()).collect();
        let x_bits: Vec<u64> = trace.iterations.iter().map(|t| t.x.bits()).collect();
        rows.push(vec![
            trial.to_string(),
            trace_seed.to_string(),
            check.ok.to_string(),
            check.violations.len().to_string(),
            joined(&z),
            s.join(" "),
            joined(&x_bits),
            hit.to_string(),
        ]);
        let mut rec = json!({
            "trial": trial,
            "seed": trace_seed,
            "ok": check.ok,
            "violations": check.violations,
            "z": z,
            "s": s,
            "x_bits": x_bits,
            "threshold_hit": hit,
        });
        if c.values {
            rec["x"] = json!(trace.iterations.iter().map(|t| t.x.to_string()).collect::<Vec<_>>());
            rec["y"] = json!(trace.iterations.iter().map(|t| t.y.to_string()).collect::<Vec<_>>());
        }
        records.push(rec);
    }
    let estimate = (c.trials > 0).then(|| Estimate::new(hits, c.trials, 0.99));
    Ok(Artifact::new(
        json!({
            "params": params,
            "trials": c.trials,
            "clean": clean,
            "all_clean": clean == c.trials,
            "threshold_adversary": estimate,
            "traces": records,
        }),
        vec!["trial", "seed", "ok", "violations", "z", "s", "x_bits", "threshold_hit"],
        rows,
    ))
}

fn distribution_json(d: &ExplicitTupleDistribution) -> Value {
    json!(d
        .entries()
        .iter()
        .map(|(t, p)| json!({"tuple": t, "p": to_pq(p)}))
        .collect::<Vec<_>>())
}

pub fn enumerate(p: &SamplerArgs, caps: &Caps) -> Res<Artifact> {
    let params = params_of(p)?;
    let d = enumerate_distribution(&params, caps).map_err(err)?;
    let rows = d.entries().iter().map(|(t, p)| vec![joined(t), to_pq(p)]).collect();
    Ok(Artifact::new(
        json!({
            "params": params,
            "universe": d.universe(),
            "support": d.entries().len(),
            "total": to_pq(&d.total()),
            "distribution": distribution_json(&d),
        }),
        vec!["tuple", "p"],
        rows,
    ))
}

/// Parses `x1,...,xm,p/q` lines; blank lines and `#` comments are skipped.
fn parse_distribution(text: &str, universe: Option<u64>) -> Res<ExplicitTupleDistribution> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || format!("distribution line {}: {line:?}", lineno + 1);
        let mut fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let p = parse_pq(fields.pop().ok_or_else(bad)?).ok_or_else(bad)?;
        let t = fields
            .iter()
            .map(|f| f.parse::<u64>().map_err(|_| bad()))
            .collect::<Res<Vec<u64>>>()?;
        entries.push((t, p));
    }
    let m = entries.first().map(|(t, _)| t.len()).ok_or("distribution file has no outcomes")?;
    let top = entries.iter().filter_map(|(t, _)| t.last().copied()).max().unwrap_or(0);
    ExplicitTupleDistribution::new(m, universe.unwrap_or(top), entries).map_err(err)
}

pub fn adversary(c: &AdversaryCmd, caps: &Caps) -> Res<Artifact> {
    let (dist, params) = match &c.dist {
        Some(path) => (parse_distribution(&read(path)?, c.universe)?, None),
        None => {
            let p = sampler_params(c.m, c.k, c.s0.as_deref(), c.paper_defaults)?;
            (enumerate_distribution(&p, caps).map_err(err)?, Some(p))
        }
    };
    let best = adversary_bound_exact(&dist, caps).map_err(err)?;

    let support = dist.support();
    let edges: Vec<(usize, usize)> = (0..support.len())
        .flat_map(|a| (a + 1..support.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| tuples_conflict(&support[a].flatten(), &support[b].flatten()))
        .collect();
    let induced = Graph::from_edges(support.clone(), edges).map_err(err)?;
    let mass = induced
        .maximal_independent_sets(caps)
        .map_err(err)?
        .iter()
        .map(|s| dist.mass_of(&s.iter().map(|&v| support[v].clone()).collect::<Vec<Vertex>>()))
        .max()
        .unwrap_or_else(Rational::zero);
    let chi_f = fractional_chromatic_number(&induced, caps).map_err(err)?.chi_f;
    let reciprocal = if mass.is_zero() { None } else { Some(mass.recip()) };

    let argmax = joined(best.argmax.labels());
    let row = vec![
        to_pq(&best.max),
        best.functions_checked.to_string(),
        to_pq(&mass),
        to_pq(&chi_f),
        argmax.clone(),
    ];
    Ok(Artifact::new(
        json!({
            "params": params,
            "m": dist.m(),
            "universe": dist.universe(),
            "support": support.len(),
            "max": to_pq(&best.max),
            "functions_checked": best.functions_checked,
            "argmax": best.argmax.labels(),
            "max_independent_mass": to_pq(&mass),
            "max_equals_independent_mass": best.max == mass,
            "reciprocal_mass": reciprocal.as_ref().map(to_pq),
            "chi_f": to_pq(&chi_f),
            "reciprocal_le_chi_f": reciprocal.map_or(true, |r| r <= chi_f),
        }),
        vec!["max", "functions_checked", "max_independent_mass", "chi_f", "argmax"],
        vec![row],
    ))
}

pub fn prune(c: &PruneCmd, seed: u64, caps: &Caps) -> Res<Artifact> {
    let t = &c.tree;
    let spec = WindowTreeSpec::new(t.arity, t.depth, t.start, t.len).map_err(err)?;
    let tau = parse_ratio(&c.tau, "tau")?;
    if c.index == 0 {
        return Err("--index must be at least 1".into());
    }
    let labels: Vec<usize> = match &c.labels {
        Some(list) => {
            let v = list
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| format!("--labels: bad label {s:?}")))
                .collect::<Res<Vec<_>>>()?;
            if v.len() as u64 != t.len {
                return Err(format!("--labels has {} entries but the root window has {}", v.len(), t.len));
            }
            v
        }
        None => {
            let bias = parse_ratio(c.bias.as_deref().unwrap_or("1/2"), "bias")?;
            let (p, q) = (
                u32::try_from(bias.numer()).map_err(|_| "--bias out of range")?,
                u32::try_from(bias.denom()).map_err(|_| "--bias out of range")?,
            );
            if p > q {
                return Err("--bias must lie in [0, 1]".into());
            }
            if t.len > caps.max_window {
                return Err(mmphf_lab::Error::cap("max_window", t.len, caps.max_window).to_string());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..t.len)
                .map(|_| if p > 0 && rng.gen_ratio(p, q) { c.index } else { c.index + 1 })
                .collect()
        }
    };
    let tree = build_tree(&spec, caps).map_err(err)?;
    let start = t.start;
    let f = move |e: &BigUint| {
        let x: u64 = e.try_into().expect("element inside the root window");
        labels[(x - start) as usize]
    };
    let pr = prune_tree(&tree, &f, c.index, &tau, caps).map_err(err)?;
    let rows = pr
        .levels
        .iter()
        .map(|l| {
            vec![
                l.level.to_string(),
                l.total.to_string(),
                l.directly_pruned.to_string(),
                l.indirectly_pruned.to_string(),
                to_pq(&l.p),
            ]
        })
        .collect();
    let survival = pr.survival_product();
    let kept = pr.kept_leaf_fraction();
    Ok(Artifact::new(
        json!({
            "prune": pr,
            "survival_product": to_pq(&survival),
            "kept_leaf_fraction": to_pq(&kept),
            "kept_leaf_identity": survival == kept,
        }),
        vec!["level", "total", "directly_pruned", "indirectly_pruned", "p"],
        rows,
    ))
}

pub fn case1_sweep(c: &SweepCmd, seed: u64, caps: &Caps) -> Res<Artifact> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut under, mut holds, mut identity) = (0u64, 0u64, 0u64);
    let mut rows = Vec::new();
    for instance in 0..c.instances {
        let arity = rng.gen_range(2..=4u64);
        let depth = rng.gen_range(1..=3usize);
        let leaf = rng.gen_range(1..=4u64);
        let start = rng.gen_range(1..=50u64);
        let spec = WindowTreeSpec::new(arity, depth, start, arity.pow(depth as u32) * leaf).map_err(err)?;
        let tree = build_tree(&spec, caps).map_err(err)?;
        let bias = rng.gen_range(0.05..0.95);
        let labels: Vec<usize> = (0..spec.root.len).map(|_| if rng.gen_bool(bias) { 1 } else { 2 }).collect();
        let q = rng.gen_range(2..=12i64);
        let tau = ratio(rng.gen_range(1..q), q);
        let f = |e: &BigUint| {
            let x: u64 = e.try_into().expect("element inside the root window");
            labels[(x - start) as usize]
        };
        let pr = prune_tree(&tree, &f, 1, &tau, caps).map_err(err)?;
        let delta = if rng.gen_bool(0.5) {
            pr.survival_product()
        } else {
            ratio(rng.gen_range(0..=20), 20)
        };
        let out = case1_inequality_check(&tree, &f, 1, &tau, &delta, caps).map_err(err)?;
        let kept = pr.kept_leaf_fraction();
        identity += (kept == out.survival_product) as u64;
        under += out.hypothesis as u64;
        holds += out.holds as u64;
        rows.push(vec![
            instance.to_string(),
            arity.to_string(),
            depth.to_string(),
            leaf.to_string(),
            to_pq(&tau),
            to_pq(&delta),
            to_pq(&out.survival_product),
            to_pq(&kept),
            to_pq(&out.root_density),
            out.hypothesis.to_string(),
            out.holds.to_string(),
        ]);
    }
    Ok(Artifact::new(
        json!({
            "instances": c.instances,
            "under_hypothesis": under,
            "holding": holds,
            "all_hold": holds == c.instances,
            "kept_leaf_identity": identity,
            "identity_all": identity == c.instances,
        }),
        vec![
            "instance",
            "arity",
            "depth",
            "leaf_len",
            "tau",
            "delta",
            "survival_product",
            "kept_leaf_fraction",
            "root_density",
            "hypothesis",
            "holds",
        ],
        rows,
    ))
}

pub fn mmphf_verify(c: &VerifyCmd, seed: u64, caps: &Caps) -> Res<Artifact> {
    if let Some(path) = &c.keys {
        let keys = KeySet::parse(&read(path)?).map_err(err)?;
        let mut out = Vec::new();
        let mut rows = Vec::new();
        for scheme in ALL_SCHEMES {
            let idx = build(scheme, &keys, seed).map_err(err)?;
            let mut wrong = 0u64;
            for (r, &s) in keys.elements().iter().enumerate() {
                wrong += (query(&idx, s).map_err(err)? != r as u64) as u64;
            }
            rows.push(vec![
                scheme.to_string(),
                keys.n().to_string(),
                keys.u().to_string(),
                idx.size_bits().to_string(),
                idx.total_bits().to_string(),
                (wrong == 0).to_string(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            out.push(json!({
                "scheme": scheme,
                "payload_bits": idx.size_bits(),
                "total_bits": idx.total_bits(),
                "members_ok": wrong == 0,
                "wrong_members": wrong,
            }));
        }
        return Ok(Artifact::new(
            json!({"n": keys.n(), "u": keys.u(), "schemes": out}),
            verify_header(),
            rows,
        ));
    }
    if !matches!(c.graph, None | Some(GraphKind::Conflict)) {
        return Err("mmphf-verify needs --keys or a conflict graph".into());
    }
    let spec = conflict_spec(c.m, c.big_m, c.offset.as_deref())?;
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for scheme in ALL_SCHEMES {
        let ex = extract_coloring(scheme, &spec, seed, caps).map_err(err)?;
        rows.push(vec![
            scheme.to_string(),
            String::new(),
            String::new(),
            ex.sizes.iter().max().copied().unwrap_or(0).to_string(),
            String::new(),
            String::new(),
            ex.is_proper().to_string(),
            ex.monochromatic.len().to_string(),
            ex.distinct_colors().to_string(),
        ]);
        out.push(ex);
    }
    let correct_proper = out.iter().filter(|e| e.scheme != Scheme::BrokenConstant).all(|e| e.is_proper());
    let control_detected = out.iter().any(|e| e.scheme == Scheme::BrokenConstant && !e.is_proper());
    Ok(Artifact::new(
        json!({
            "vertices": out.first().map_or(0, |e| e.vertices.len()),
            "correct_schemes_proper": correct_proper,
            "broken_control_detected": control_detected,
            "extractions": out,
        }),
        verify_header(),
        rows,
    ))
}

fn verify_header() -> Vec<&'static str> {
    vec![
        "scheme",
        "n",
        "u",
        "payload_bits",
        "total_bits",
        "members_ok",
        "proper",
        "monochromatic_edges",
        "distinct",
    ]
}

pub fn bound_report(g: &GraphArgs, seed: u64, caps: &Caps) -> Res<Artifact> {
    if g.graph != GraphKind::Conflict {
        return Err("bound-report needs --graph conflict".into());
    }
    let spec = conflict_spec(g.m, g.big_m, g.offset.as_deref())?;
    let report = mmphf::bound_report(&ALL_SCHEMES, &spec, seed, caps).map_err(err)?;
    let graph = build_graph(&spec, caps).map_err(err)?;
    let certified = chi_report(&graph, caps).map_err(err)?;
    let lb = report.lower_bound.exact.as_ref().map(to_pq).unwrap_or_default();
    let rows = report
        .schemes
        .iter()
        .map(|s| {
            vec![
                s.scheme.to_string(),
                report.chi.to_string(),
                to_pq(&report.chi_f),
                lb.clone(),
                s.max_bits.to_string(),
                to_pq(&s.mean_bits),
                s.distinct.to_string(),
                s.proper.to_string(),
                s.monochromatic_edges.to_string(),
            ]
        })
        .collect();
    Ok(Artifact::new(
        json!({"report": report, "certificates": certified}),
        vec![
            "scheme",
            "chi",
            "chi_f",
            "lower_bound_bits",
            "max_bits",
            "mean_bits",
            "distinct",
            "proper",
            "monochromatic_edges",
        ],
        rows,
    ))
}

pub fn sx_roundtrip(c: &RoundTripCmd, seed: u64) -> Res<Artifact> {
    if c.d == 0 || c.d > 20 {
        return Err(format!("--d must lie in 1..=20, got {}", c.d));
    }
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for scheme in ALL_SCHEMES {
        for d in 1..=c.d {
            let (mut round_trips, mut max_bits) = (0u64, 0u64);
            let mut payloads = BTreeSet::new();
            for bits in 0u64..1 << d {
                let x: Vec<bool> = (0..d).map(|i| bits >> i & 1 == 1).collect();
                let keys = encode_bitstring(&x).map_err(err)?;
                let idx = build(scheme, &keys, seed).map_err(err)?;
                round_trips += (decode_bitstring(&idx, d).ok().as_ref() == Some(&x)) as u64;
                max_bits = max_bits.max(idx.size_bits());
                payloads.insert(idx.payload_string());
            }
            let strings = 1u64 << d;
            rows.push(vec![
                d.to_string(),
                scheme.to_string(),
                strings.to_string(),
                round_trips.to_string(),
                payloads.len().to_string(),
                max_bits.to_string(),
            ]);
            out.push(json!({
                "d": d,
                "scheme": scheme,
                "strings": strings,
                "round_trips": round_trips,
                "distinct_payloads": payloads.len(),
                "max_bits": max_bits,
                "all_distinguished": round_trips == strings && payloads.len() as u64 == strings,
            }));
        }
    }
    Ok(Artifact::new(
        json!({"max_d": c.d, "strings_per_scheme": (1u64 << (c.d + 1)) - 2, "rows": out}),
        vec!["d", "scheme", "strings", "round_trips", "distinct_payloads", "max_bits"],
        rows,
    ))
}

pub fn parameterize(c: &ParamCmd) -> Res<Artifact> {
    let u: Magnitude = c.u.parse().map_err(err)?;
    let p = mmphf::parameterize(c.n, &u).map_err(err)?;
    let row = vec![
        p.n.to_string(),
        p.u.clone(),
        p.m.to_string(),
        p.k.to_string(),
        p.exponent.clone(),
        p.u_prime.clone(),
        p.u_prime_le_u.to_string(),
        p.m_le_sqrt_n.to_string(),
        p.below_upper_range.to_string(),
        p.above_lower_range_approx.to_string(),
    ];
    Ok(Artifact::new(
        serde_json::to_value(&p).map_err(err)?,
        vec![
            "n",
            "u",
            "m",
            "k",
            "exponent",
            "u_prime",
            "u_prime_le_u",
            "m_le_sqrt_n",
            "below_upper_range",
            "above_lower_range_approx",
        ],
        vec![row],
    ))
}
