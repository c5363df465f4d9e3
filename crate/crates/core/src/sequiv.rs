//! Jordan–Hölder filtrations, graded pieces and S-equivalence.

use std::collections::BTreeSet;

use crate::abel::{abel0, abel1, fiber_partition};
use crate::curve::{Curve, InducedCurve, Subcurve};
use crate::error::{Error, Result};
use crate::iso::{iso_witness, IsoVerdict};
use crate::point::PointOnCurve;
use crate::sheaf::CombSheaf;
use crate::stability::{classify, Classification, StabilityContext};
use crate::structure::TailTable;

fn zero_margin_subcurves(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<Vec<Subcurve>> {
    let rep = classify(sheaf, ctx)?;
    if rep.classification == Classification::Unstable {
        return Err(Error::NotSemistable);
    }
    Ok(rep.zero_margin().collect())
}

/// A maximal chain ∅ ⊊ Y_1 ⊊ … ⊊ Y_{q−1} ⊊ X of zero-margin subcurves, built by
/// always stepping to a smallest zero-margin proper superset.
pub fn jh_filtration(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<Vec<Subcurve>> {
    let zeros = zero_margin_subcurves(sheaf, ctx)?;
    let mut chain: Vec<Subcurve> = Vec::new();
    let mut current = Subcurve::EMPTY;
    // witnesses come sorted by size, so the first strict superset is a smallest one
    while let Some(&next) = zeros
        .iter()
        .find(|&&y| current.is_subset(y) && current != y)
    {
        chain.push(next);
        current = next;
    }
    debug_assert!(is_maximal_chain(&chain, &zeros));
    Ok(chain)
}

/// No zero-margin subcurve fits strictly between consecutive links (with ∅
/// and X at the ends).
pub fn is_maximal_chain(chain: &[Subcurve], zeros: &[Subcurve]) -> bool {
    let mut links = vec![Subcurve::EMPTY];
    links.extend_from_slice(chain);
    links.push(Subcurve::from_bits(u64::MAX));
    links.windows(2).all(|w| {
        !zeros
            .iter()
            .any(|&y| w[0].is_subset(y) && y != w[0] && y.is_subset(w[1]) && y != w[1])
    })
}

/// Every Jordan–Hölder filtration, by exhaustive search.
pub fn all_jh_filtrations(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<Vec<Vec<Subcurve>>> {
    let zeros = zero_margin_subcurves(sheaf, ctx)?;
    let covers = |lo: Subcurve| -> Vec<Subcurve> {
        let above: Vec<Subcurve> = zeros
            .iter()
            .copied()
            .filter(|&y| lo.is_subset(y) && y != lo)
            .collect();
        above
            .iter()
            .copied()
            .filter(|&y| !above.iter().any(|&z| z != y && z.is_subset(y)))
            .collect()
    };
    let mut out = Vec::new();
    let mut stack = vec![Vec::<Subcurve>::new()];
    while let Some(chain) = stack.pop() {
        let top = chain.last().copied().unwrap_or(Subcurve::EMPTY);
        let next = covers(top);
        if next.is_empty() {
            out.push(chain);
        } else {
            for y in next {
                let mut c = chain.clone();
                c.push(y);
                stack.push(c);
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GrPiece {
    pub part: Subcurve,
    pub curve: InducedCurve,
    pub sheaf: CombSheaf,
}

/// The parts 𝔖(I) and graded pieces Gr(I), in filtration order.
#[derive(Debug, Clone)]
pub struct SClass {
    pub parts: Vec<Subcurve>,
    pub gr: Vec<GrPiece>,
}

impl SClass {
    pub fn part_set(&self) -> BTreeSet<Subcurve> {
        self.parts.iter().copied().collect()
    }

    /// Σ χ over the graded pieces.
    pub fn chi(&self) -> i64 {
        self.gr
            .iter()
            .map(|p| p.sheaf.total_degree() + p.curve.curve.chi_structure(p.curve.curve.full()))
            .sum()
    }
}

/// Graded pieces of the filtration `chain`: each successive difference gets
/// the restriction of I, twisted down at every locally free node joining it
/// to the earlier pieces.
pub fn s_class_of_chain(curve: &Curve, sheaf: &CombSheaf, chain: &[Subcurve]) -> Result<SClass> {
    let mut earlier = Subcurve::EMPTY;
    let mut parts = Vec::new();
    let mut gr = Vec::new();
    for y in chain.iter().copied().chain(std::iter::once(curve.full())) {
        let part = y.minus(earlier);
        let (ind, mut piece) = sheaf.restrict(curve, part)?;
        for e in curve.crossing_edges(part) {
            if sheaf.nonfree().contains(&e) {
                continue;
            }
            let [a, b] = curve.edge(e).ends;
            let (w, other) = if part.contains(a) { (a, b) } else { (b, a) };
            if earlier.contains(other) {
                let local = ind.local_vertex(w).expect("endpoint in part");
                piece.twist_down(local, curve.branch_at(e, w));
            }
        }
        parts.push(part);
        gr.push(GrPiece {
            part,
            curve: ind,
            sheaf: piece,
        });
        earlier = y;
    }
    Ok(SClass { parts, gr })
}

pub fn s_invariants(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<SClass> {
    let chain = jh_filtration(sheaf, ctx)?;
    s_class_of_chain(ctx.curve, sheaf, &chain)
}

/// Some(true) when parts agree and matching pieces are isomorphic, Some(false)
/// on a certified difference, None when undecided.
pub fn gr_equivalent(a: &SClass, b: &SClass) -> Result<Option<bool>> {
    if a.part_set() != b.part_set() {
        return Ok(Some(false));
    }
    let mut unknown = false;
    for pa in &a.gr {
        let pb = b.gr.iter().find(|p| p.part == pa.part).expect("same parts");
        match iso_witness(&pa.sheaf, &pb.sheaf, &pa.curve.curve)? {
            IsoVerdict::Iso => {}
            IsoVerdict::NotIso => return Ok(Some(false)),
            IsoVerdict::Unknown => unknown = true,
        }
    }
    Ok(if unknown { None } else { Some(true) })
}

pub fn s_equivalent(a: &CombSheaf, b: &CombSheaf, ctx: &StabilityContext) -> Result<Option<bool>> {
    gr_equivalent(&s_invariants(a, ctx)?, &s_invariants(b, ctx)?)
}

/// Which Abel map to analyze.
#[derive(Debug, Clone)]
pub enum AbelData {
    Degree0 { base: PointOnCurve },
    Degree1 { table: TailTable },
}

#[derive(Debug, Clone)]
pub struct CollapseReport {
    pub degree: i64,
    /// fibers of the Abel map on point classes
    pub blocks: Vec<Vec<PointOnCurve>>,
    /// blocks grouped by S-equivalence of their Abel sheaves
    pub classes: Vec<Vec<usize>>,
    pub unknown_pairs: Vec<(usize, usize)>,
    pub violations: Vec<String>,
}

impl CollapseReport {
    pub fn merges(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.classes.iter().filter(|c| c.len() > 1)
    }
}

/// Compares the S-classes of the Abel sheaves of all fibers. In degree 1 no
/// two fibers may merge, and the filtration is {Z_N} for a splitting node N
/// (stable without one).
pub fn collapse_analysis(curve: &Curve, data: &AbelData) -> Result<CollapseReport> {
    let blocks = fiber_partition(curve)?;
    let (degree, ctx) = match data {
        AbelData::Degree0 { base } => (0, StabilityContext::new(curve, 0)?.with_base_point(base)?),
        AbelData::Degree1 { .. } => {
            if !curve.is_gstable() {
                return Err(Error::NotGStable);
            }
            (1, StabilityContext::new(curve, 1)?)
        }
    };
    let mut violations = Vec::new();
    let mut classes_of = Vec::new();
    for block in &blocks {
        let q = &block[0];
        let sheaf = match data {
            AbelData::Degree0 { base } => abel0(curve, base, q)?,
            AbelData::Degree1 { table } => abel1(curve, table, q)?,
        };
        let sc = match s_invariants(&sheaf, &ctx) {
            Ok(sc) => sc,
            Err(Error::NotSemistable) => {
                violations.push(format!("{}: Abel sheaf is not semistable", q.describe(curve)));
                continue;
            }
            Err(e) => return Err(e),
        };
        if let AbelData::Degree1 { table } = data {
            let expected: Vec<Subcurve> = table.splitting_nodes().map(|t| t.small.vertices).collect();
            let chain = jh_filtration(&sheaf, &ctx)?;
            if chain != expected {
                violations.push(format!(
                    "{}: filtration {:?} differs from the splitting tails {:?}",
                    q.describe(curve),
                    chain.iter().map(|y| curve.fmt_subcurve(*y)).collect::<Vec<_>>(),
                    expected.iter().map(|y| curve.fmt_subcurve(*y)).collect::<Vec<_>>()
                ));
            }
        }
        classes_of.push(sc);
    }
    if classes_of.len() != blocks.len() {
        return Ok(CollapseReport {
            degree,
            blocks,
            classes: Vec::new(),
            unknown_pairs: Vec::new(),
            violations,
        });
    }

    let n = blocks.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let mut unknown_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match gr_equivalent(&classes_of[i], &classes_of[j])? {
                Some(true) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                Some(false) => {}
                None => unknown_pairs.push((i, j)),
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_class[r] {
            Some(c) => classes[c].push(i),
            None => {
                root_class[r] = Some(classes.len());
                classes.push(vec![i]);
            }
        }
    }
    if degree == 1 {
        for c in classes.iter().filter(|c| c.len() > 1) {
            let names: Vec<String> = c.iter().map(|&b| blocks[b][0].describe(curve)).collect();
            violations.push(format!("fibers merge under S-equivalence: {}", names.join(", ")));
        }
    }
    Ok(CollapseReport {
        degree,
        blocks,
        classes,
        unknown_pairs,
        violations,
    })
}
