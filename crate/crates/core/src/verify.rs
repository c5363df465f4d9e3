//! The theorem suite: every structural identity and Abel-map property,
//! checked exhaustively on one curve.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::Signed;

use crate::abel::{abel0, abel1, fiber_partition, gen_genus, image_curve, verify_restriction};
use crate::curve::{Curve, Subcurve, ENUMERATION_CAP};
use crate::error::Result;
use crate::iso::{iso_witness, IsoVerdict};
use crate::par::{self, Execution};
use crate::point::PointOnCurve;
use crate::sequiv::{
    all_jh_filtrations, collapse_analysis, gr_equivalent, jh_filtration, s_class_of_chain,
    s_equivalent, s_invariants, AbelData,
};
use crate::sheaf::CombSheaf;
use crate::stability::{
    canonical_weights, chi_pairing, classify, classify_connected, margin, seshadri_classify,
    Classification, StabilityContext,
};
use crate::structure::{
    basepoint_off_small_tails, separating_lines, separating_nodes, small_tails, tails,
    tails_of_bridge, Tail, TailTable,
};

#[derive(Debug, Clone, Default)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Check {
        Check {
            name,
            ..Default::default()
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// largest curve for exhaustive Jordan–Hölder chain enumeration
    pub chain_vertex_cap: usize,
    /// largest curve on which every spine is checked
    pub spine_vertex_cap: usize,
    pub execution: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            chain_vertex_cap: 6,
            spine_vertex_cap: 8,
            execution: Execution::Sequential,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.failures.len()).sum()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.ok() { "ok" } else { "FAIL" };
            writeln!(f, "{:width$}  {status:4}  {} cases", c.name, c.cases)?;
            for m in c.failures.iter().take(5) {
                writeln!(f, "    {m}")?;
            }
            if c.failures.len() > 5 {
                writeln!(f, "    ... {} more", c.failures.len() - 5)?;
            }
        }
        Ok(())
    }
}

fn proper_subcurves(curve: &Curve) -> impl Iterator<Item = Subcurve> {
    let full = curve.full().bits();
    (1..full).map(Subcurve::from_bits)
}

/// Smooth point classes: candidates for a base point.
pub fn smooth_classes(curve: &Curve) -> Vec<PointOnCurve> {
    curve
        .point_classes()
        .into_iter()
        .filter(|q| q.vertex().is_some())
        .collect()
}

/// The declared base, or the generic point of the first component.
pub fn default_base(curve: &Curve) -> PointOnCurve {
    curve
        .declared_base()
        .ok()
        .flatten()
        .filter(|p| p.vertex().is_some())
        .unwrap_or_else(|| PointOnCurve::Smooth {
            vertex: 0,
            symbol: curve.generic(0),
        })
}

pub fn check_genus_identities(curve: &Curve) -> Result<Vec<Check>> {
    let g = curve.genus();
    let mut complement = Check::new("genus-complement");
    let mut bound = Check::new("subcurve-genus-bound");
    for y in proper_subcurves(curve) {
        let yc = y.complement(curve.num_vertices());
        let lhs = curve.genus_of(Some(y))? + curve.genus_of(Some(yc))? + curve.delta(y)? - 1;
        complement.expect(lhs == g, || format!("{}: {lhs} ≠ {g}", curve.fmt_subcurve(y)));
        if curve.is_connected_subset(y) {
            let gy = curve.genus_of(Some(y))?;
            bound.expect(gy <= g, || format!("{}: g_Y = {gy} > {g}", curve.fmt_subcurve(y)));
        }
    }
    let mut omega = Check::new("omega-sum");
    if !curve.edges().iter().any(|e| e.is_loop()) {
        let sum: i64 = (0..curve.num_vertices())
            .map(|v| curve.omega_degree(Subcurve::singleton(v)))
            .sum::<Result<i64>>()?;
        omega.expect(sum == 2 * g - 2, || format!("Σ deg ω_v = {sum}"));
    }
    let mut lines = Check::new("genus-zero-lines");
    let all_lines = separating_lines(curve) == curve.full();
    lines.expect((g == 0) == all_lines, || {
        format!("g = {g} but every component a separating line: {all_lines}")
    });
    Ok(vec![complement, bound, omega, lines])
}

pub fn check_tails(curve: &Curve) -> Result<Vec<Check>> {
    let all = tails(curve, None, None);
    let mut tri = Check::new("tail-trichotomy");
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let (za, zb) = (a.vertices, b.vertices);
            let ok = za.union(zb) == curve.full()
                || za.intersection(zb).is_empty()
                || za.is_subset(zb)
                || zb.is_subset(za);
            tri.expect(ok, || {
                format!("{} vs {}", curve.fmt_subcurve(za), curve.fmt_subcurve(zb))
            });
        }
    }
    let mut sides = Check::new("tail-sides");
    for e in separating_nodes(curve) {
        let removed: BTreeSet<usize> = [e].into();
        let comps: BTreeSet<Subcurve> = curve.components_avoiding(curve.full(), &removed).into_iter().collect();
        let got: BTreeSet<Subcurve> = tails_of_bridge(curve, e).iter().map(|t| t.vertices).collect();
        sides.expect(comps == got, || format!("bridge {}", curve.edge(e).id));
    }
    let mut checks = vec![tri, sides];
    if curve.is_gstable() {
        let g = curve.genus();
        let mut nested = Check::new("nested-tail-genus");
        for a in &all {
            for b in &all {
                if a.vertices != b.vertices && a.vertices.is_subset(b.vertices) {
                    let (ga, gb) = (curve.genus_of(Some(a.vertices))?, curve.genus_of(Some(b.vertices))?);
                    nested.expect(ga < gb, || {
                        format!("{} ⊊ {} with genera {ga}, {gb}", curve.fmt_subcurve(a.vertices), curve.fmt_subcurve(b.vertices))
                    });
                }
            }
        }
        let table = small_tails(curve, &BTreeMap::new())?;
        let mut split = Check::new("splitting-node-count");
        let count = table.splitting_nodes().count();
        split.expect(count <= 1, || format!("{count} splitting nodes"));
        let mut small = Check::new("small-tail-genus");
        for e in &table.entries {
            let gz = curve.genus_of(Some(e.small.vertices))?;
            let ok = 2 * gz <= g && ((2 * gz == g) == e.splitting);
            small.expect(ok, || format!("{}: genus {gz} of {g}", curve.fmt_subcurve(e.small.vertices)));
        }
        let mut odd = Check::new("odd-genus-no-equality");
        if g % 2 == 1 {
            for y in proper_subcurves(curve) {
                let v = Rational64::new(curve.omega_degree(y)?, 2 * g - 2)
                    - Rational64::new(curve.delta(y)?, 2);
                odd.expect(!v.is_integer(), || format!("{} gives an integer bound", curve.fmt_subcurve(y)));
            }
        }
        checks.extend([nested, split, small, odd]);
    }
    Ok(checks)
}

/// Every chain of pairwise nested tails.
pub fn nested_tail_chains(curve: &Curve) -> Vec<Vec<Tail>> {
    let mut all = tails(curve, None, None);
    all.sort_by_key(|t| t.vertices.sort_key());
    let mut out = Vec::new();
    fn extend(all: &[Tail], from: usize, chain: &mut Vec<Tail>, out: &mut Vec<Vec<Tail>>) {
        for i in from..all.len() {
            let t = all[i];
            if chain.last().is_none_or(|l| l.vertices.is_subset(t.vertices) && l.vertices != t.vertices) {
                chain.push(t);
                out.push(chain.clone());
                extend(all, i + 1, chain, out);
                chain.pop();
            }
        }
    }
    extend(&all, 0, &mut Vec::new(), &mut out);
    out
}

pub fn check_twister_bound(curve: &Curve) -> Result<Check> {
    let mut c = Check::new("twister-bound");
    let connected: Vec<Subcurve> = proper_subcurves(curve).filter(|&y| curve.is_connected_subset(y)).collect();
    for chain in nested_tail_chains(curve) {
        let mut k = CombSheaf::trivial(curve);
        for t in &chain {
            k = k.tensor(&CombSheaf::twister(curve, t.vertices)?.inverse()?)?;
        }
        for &y in &connected {
            let d = k.degree_on(curve, y)?;
            c.expect(d >= -1, || {
                let ids: Vec<String> = chain.iter().map(|t| curve.fmt_subcurve(t.vertices)).collect();
                format!("chain [{}], Y = {}: degree {d}", ids.join(" ⊂ "), curve.fmt_subcurve(y))
            });
        }
    }
    Ok(c)
}

pub fn check_sheaf_identities(curve: &Curve, sheaves: &[CombSheaf]) -> Result<Vec<Check>> {
    let mut inv = Check::new("dual-involution");
    let mut split = Check::new("degree-split");
    for s in sheaves {
        let d = s.dual(curve)?;
        inv.expect(d.dual(curve)? == *s && d.total_degree() == -s.total_degree(), || {
            format!("{}", s.display(curve))
        });
        for y in proper_subcurves(curve) {
            let yc = y.complement(curve.num_vertices());
            let cross = s.nonfree().iter().filter(|&&e| curve.is_crossing(e, y)).count() as i64;
            let sum = s.degree_on(curve, y)? + s.degree_on(curve, yc)? + cross;
            split.expect(sum == s.total_degree(), || format!("Y = {}", curve.fmt_subcurve(y)));
        }
    }
    let mut simple = Check::new("simple-iff-not-separating");
    let bridges = separating_nodes(curve);
    for e in 0..curve.num_edges() {
        let m = CombSheaf::ideal_sheaf(curve, &PointOnCurve::Node(e));
        simple.expect(m.is_simple(curve) != bridges.contains(&e), || {
            format!("node {}", curve.edge(e).id)
        });
    }
    Ok(vec![inv, split, simple])
}

/// Abel sheaves of degree 0 for every smooth base and every point class.
pub fn abel0_family(curve: &Curve, exec: Execution) -> Result<Vec<(PointOnCurve, PointOnCurve, CombSheaf)>> {
    let bases = smooth_classes(curve);
    let classes = curve.point_classes();
    let per_base = par::map_slice(exec, &bases, |p| {
        classes
            .iter()
            .map(|q| Ok((p.clone(), q.clone(), abel0(curve, p, q)?)))
            .collect::<Result<Vec<_>>>()
    });
    Ok(per_base.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

pub fn check_abel0(curve: &Curve, family: &[(PointOnCurve, PointOnCurve, CombSheaf)], exec: Execution) -> Result<Check> {
    let mut c = Check::new("abel0-simple-quasistable");
    let results = par::map_slice(exec, family, |(p, q, s)| -> Result<Option<String>> {
        let ctx = StabilityContext::new(curve, 0)?.with_base_point(p)?;
        let rep = classify(s, &ctx)?;
        Ok((!(s.is_simple(curve) && rep.p_quasistable == Some(true))).then(|| {
            format!("P = {}, Q = {}: {}", p.describe(curve), q.describe(curve), rep.classification)
        }))
    });
    for r in results {
        let r = r?;
        c.expect(r.is_none(), || r.unwrap());
    }
    Ok(c)
}

pub struct Degree1Data {
    pub table: TailTable,
    pub base: PointOnCurve,
    pub sheaves: Vec<(PointOnCurve, CombSheaf)>,
}

pub fn abel1_family(curve: &Curve, table: TailTable) -> Result<Degree1Data> {
    let v = basepoint_off_small_tails(curve, &table)?;
    let base = PointOnCurve::Smooth {
        vertex: v,
        symbol: curve.generic(v),
    };
    let sheaves = curve
        .point_classes()
        .into_iter()
        .map(|q| Ok((q.clone(), abel1(curve, &table, &q)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Degree1Data { table, base, sheaves })
}

pub fn check_abel1(curve: &Curve, data: &Degree1Data) -> Result<Vec<Check>> {
    let ctx = StabilityContext::new(curve, 1)?.with_base_point(&data.base)?;
    let no_bridges = separating_nodes(curve).is_empty();
    let splitting: Vec<Subcurve> = data.table.splitting_nodes().map(|e| e.small.vertices).collect();
    let mut ss = Check::new("abel1-semistable");
    let mut pq = Check::new("abel1-quasistable-off-small-tails");
    let mut st = Check::new("abel1-stable-without-separating-nodes");
    let mut w0 = Check::new("abel1-splitting-filtration");
    let mut comp = Check::new("abel1-composition");
    for (q, s) in &data.sheaves {
        let rep = classify(s, &ctx)?;
        let name = || q.describe(curve);
        ss.expect(rep.is_semistable() && s.is_simple(curve), || format!("{}: {}", name(), rep.classification));
        pq.expect(rep.p_quasistable == Some(true), name);
        if no_bridges {
            st.expect(rep.classification == Classification::Stable, name);
        }
        if rep.is_semistable() {
            let stable = rep.classification == Classification::Stable;
            let chain = jh_filtration(s, &ctx)?;
            w0.expect(stable == splitting.is_empty() && chain == splitting, || {
                format!("{}: {} with filtration {:?}", name(), rep.classification, chain)
            });
        }
        let via0 = abel0(curve, &data.base, q)?
            .dual(curve)?
            .tensor(&CombSheaf::ideal_sheaf(curve, &data.base).inverse()?)?;
        comp.expect(via0 == *s, name);
    }
    Ok(vec![ss, pq, st, w0, comp])
}

pub fn check_stability_forms(curve: &Curve, sheaves: &[(i64, CombSheaf)]) -> Result<Vec<Check>> {
    let g = curve.genus();
    let mut sign = Check::new("chi-pairing-sign");
    let mut fast = Check::new("connected-fast-path");
    let mut sesh = Check::new("seshadri-canonical");
    let weights = if curve.is_gstable() { Some(canonical_weights(curve)?) } else { None };
    for (d, s) in sheaves {
        let ctx = StabilityContext::new(curve, *d)?.with_base(0);
        if g >= 2 {
            for y in proper_subcurves(curve) {
                let m = margin(s, y, &ctx)?;
                let p = chi_pairing(s, y, &ctx)?;
                sign.expect(m.signum() == Rational64::from_integer(p.signum()), || {
                    format!("Y = {}: margin {m}, pairing {p}", curve.fmt_subcurve(y))
                });
            }
        }
        let full = classify(s, &ctx)?;
        let conn = classify_connected(s, &ctx)?;
        let connected_witnesses: Vec<_> = full
            .witnesses
            .iter()
            .filter(|w| curve.is_connected_subset(w.sub))
            .cloned()
            .collect();
        fast.expect(
            full.classification == conn.classification
                && full.p_quasistable == conn.p_quasistable
                && connected_witnesses == conn.witnesses,
            || format!("degree {d}"),
        );
        if let Some(w) = &weights {
            let sctx = ctx.clone().with_weights(w.clone())?;
            sesh.expect(seshadri_classify(s, &sctx)? == full, || format!("degree {d}"));
        }
    }
    Ok(vec![sign, fast, sesh])
}

pub fn check_graded(curve: &Curve, sheaves: &[(i64, CombSheaf)], chain_cap: usize) -> Result<Vec<Check>> {
    let g = curve.genus();
    let mut chi = Check::new("graded-euler-characteristic");
    let mut unique = Check::new("jordan-holder-uniqueness");
    for (d, s) in sheaves {
        let ctx = StabilityContext::new(curve, *d)?;
        if !classify(s, &ctx)?.is_semistable() {
            continue;
        }
        let sc = s_invariants(s, &ctx)?;
        chi.expect(sc.chi() == s.total_degree() + 1 - g, || format!("{}", s.display(curve)));
        if curve.num_vertices() <= chain_cap {
            let chains = all_jh_filtrations(s, &ctx)?;
            for chain in &chains {
                let other = s_class_of_chain(curve, s, chain)?;
                unique.expect(gr_equivalent(&sc, &other)? == Some(true), || {
                    format!("chain {:?} disagrees", chain)
                });
            }
        }
    }
    Ok(vec![chi, unique])
}

pub fn check_fibers(curve: &Curve, base: &PointOnCurve) -> Result<Check> {
    let mut c = Check::new("fiber-consistency");
    let blocks = fiber_partition(curve)?;
    let sheaves: Vec<Vec<CombSheaf>> = blocks
        .iter()
        .map(|b| b.iter().map(|q| abel0(curve, base, q)).collect())
        .collect::<Result<_>>()?;
    let flat: Vec<(usize, &PointOnCurve, &CombSheaf)> = blocks
        .iter()
        .zip(&sheaves)
        .enumerate()
        .flat_map(|(i, (b, s))| b.iter().zip(s).map(move |(q, s)| (i, q, s)))
        .collect();
    for (k, (bi, qi, si)) in flat.iter().enumerate() {
        for (bj, qj, sj) in &flat[k + 1..] {
            let expected = if bi == bj { IsoVerdict::Iso } else { IsoVerdict::NotIso };
            let got = iso_witness(si, sj, curve)?;
            c.expect(got == expected, || {
                format!("{} vs {}: {:?}, expected {:?}", qi.describe(curve), qj.describe(curve), got, expected)
            });
        }
    }
    Ok(c)
}

pub fn check_image(curve: &Curve) -> Result<Check> {
    let mut c = Check::new("image-genus");
    let im = image_curve(curve)?;
    let g = gen_genus(&im)?;
    c.expect(g == curve.genus(), || format!("image genus {g}, curve genus {}", curve.genus()));
    Ok(c)
}

pub fn check_restrictions(curve: &Curve, base: &PointOnCurve) -> Result<Check> {
    let mut c = Check::new("spine-restriction");
    for w in proper_subcurves(curve).chain(std::iter::once(curve.full())) {
        if !curve.is_connected_subset(w) || !crate::structure::is_spine(curve, w)? {
            continue;
        }
        let r = verify_restriction(curve, base, w)?;
        c.expect(r.ok(), || format!("{}: {}", curve.fmt_subcurve(w), r.failures.join("; ")));
    }
    Ok(c)
}

pub fn check_choice_swap(curve: &Curve, table: &TailTable) -> Result<Check> {
    let mut c = Check::new("splitting-choice-independence");
    if table.splitting_nodes().count() == 0 {
        return Ok(c);
    }
    let swapped = table.swapped();
    let ctx = StabilityContext::new(curve, 1)?;
    for q in curve.point_classes() {
        let a = abel1(curve, table, &q)?;
        let b = abel1(curve, &swapped, &q)?;
        let r = s_equivalent(&a, &b, &ctx)?;
        c.expect(r == Some(true), || format!("{}: {:?}", q.describe(curve), r));
    }
    Ok(c)
}

pub fn check_degree1_collapse(curve: &Curve, table: &TailTable) -> Result<Check> {
    let mut c = Check::new("degree1-no-collapse");
    let r = collapse_analysis(curve, &AbelData::Degree1 { table: table.clone() })?;
    c.expect(r.violations.is_empty() && r.unknown_pairs.is_empty(), || {
        format!("{} violations, {} undecided pairs", r.violations.len(), r.unknown_pairs.len())
    });
    Ok(c)
}

/// The full suite on one curve.
pub fn verify_curve(curve: &Curve, opts: &SuiteOptions) -> Result<SuiteReport> {
    curve.check_enumerable()?;
    let n = curve.num_vertices();
    let _ = ENUMERATION_CAP;
    let mut checks = Vec::new();
    checks.extend(check_genus_identities(curve)?);
    checks.extend(check_tails(curve)?);
    checks.push(check_twister_bound(curve)?);

    let family = abel0_family(curve, opts.execution)?;
    let mut sheaves: Vec<CombSheaf> = curve
        .point_classes()
        .iter()
        .map(|q| CombSheaf::ideal_sheaf(curve, q))
        .collect();
    sheaves.extend(family.iter().map(|(_, _, s)| s.clone()));
    checks.extend(check_sheaf_identities(curve, &sheaves)?);
    checks.push(check_abel0(curve, &family, opts.execution)?);

    let base = default_base(curve);
    let mut graded: Vec<(i64, CombSheaf)> = family
        .iter()
        .filter(|(p, _, _)| *p == base)
        .map(|(_, _, s)| (0, s.clone()))
        .collect();

    if curve.is_gstable() {
        let table = small_tails(curve, &BTreeMap::new())?;
        let data = abel1_family(curve, table.clone())?;
        checks.extend(check_abel1(curve, &data)?);
        graded.extend(data.sheaves.iter().map(|(_, s)| (1, s.clone())));
        checks.push(check_choice_swap(curve, &table)?);
        checks.push(check_degree1_collapse(curve, &table)?);
    }
    if curve.genus() == 1 {
        graded.retain(|(d, _)| *d == 0);
    }
    checks.extend(check_stability_forms(curve, &graded)?);
    checks.extend(check_graded(curve, &graded, opts.chain_vertex_cap)?);

    if curve.genus() > 0 {
        checks.push(check_fibers(curve, &base)?);
        checks.push(check_image(curve)?);
    }
    if n <= opts.spine_vertex_cap {
        checks.push(check_restrictions(curve, &base)?);
    }
    Ok(SuiteReport { checks })
}
