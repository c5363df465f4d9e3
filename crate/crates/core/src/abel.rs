//! Twisted Abel maps of degree 0 and 1, their fibers and image curve.

use std::fmt;

use crate::curve::{Curve, Subcurve};
use crate::error::{Error, Result};
use crate::iso::{iso_witness, IsoVerdict};
use crate::point::{PointOnCurve, Symbol};
use crate::sheaf::CombSheaf;
use crate::structure::{
    is_spine, maximal_line_trees, separating_nodes, tails, tails_of_bridge, TailTable,
};

fn base_vertex(curve: &Curve, base: &PointOnCurve) -> Result<usize> {
    match base {
        PointOnCurve::Smooth { vertex, symbol } if curve.is_smooth_symbol(symbol) => Ok(*vertex),
        _ => Err(Error::BaseNotSmooth),
    }
}

/// O(−Q) on the side `inner` of the separating node `e`, trivial elsewhere.
fn minus_node_on(curve: &Curve, e: usize, inner: usize) -> CombSheaf {
    CombSheaf::line_bundle(curve, [(inner, curve.branch_at(e, inner), -1)])
        .expect("branch lies on its endpoint")
}

/// Degree-0 Abel sheaf I_Q = M_Q ⊗ O(P) ⊗ O(−Σ Z) over the tails Z ∋ Q
/// avoiding P.
pub fn abel0(curve: &Curve, base: &PointOnCurve, q: &PointOnCurve) -> Result<CombSheaf> {
    let p = base_vertex(curve, base)?;
    let m = match q {
        PointOnCurve::Node(e) if separating_nodes(curve).contains(e) => {
            let side = tails_of_bridge(curve, *e)
                .into_iter()
                .find(|t| !t.vertices.contains(p))
                .expect("one side avoids the base");
            minus_node_on(curve, *e, side.inner)
        }
        _ => CombSheaf::ideal_sheaf(curve, q),
    };
    let mut s = m.tensor(&CombSheaf::ideal_sheaf(curve, base).inverse()?)?;
    for z in tails(curve, Some(q), Some(p)) {
        s = s.tensor(&CombSheaf::twister(curve, z.vertices)?.inverse()?)?;
    }
    Ok(s)
}

/// Degree-1 Abel sheaf I¹_Q = N_Q^* ⊗ O(Σ Z) over the small tails Z ∋ Q.
pub fn abel1(curve: &Curve, table: &TailTable, q: &PointOnCurve) -> Result<CombSheaf> {
    let n = match q {
        PointOnCurve::Node(e) => match table.small_tail_of(*e) {
            Some(z) => minus_node_on(curve, *e, z.inner),
            None => CombSheaf::ideal_sheaf(curve, q),
        },
        _ => CombSheaf::ideal_sheaf(curve, q),
    };
    let mut s = n.dual(curve)?;
    for z in table.small_tails().filter(|z| z.contains_point(curve, q)) {
        s = s.tensor(&CombSheaf::twister(curve, z.vertices)?)?;
    }
    Ok(s)
}

/// Q seen as a point of the induced curve on `sub`; a node crossing `sub`
/// becomes the smooth branch point on its inner endpoint.
fn localize(curve: &Curve, ind: &crate::curve::InducedCurve, q: &PointOnCurve) -> Option<PointOnCurve> {
    match q {
        PointOnCurve::Smooth { vertex, symbol } => Some(PointOnCurve::Smooth {
            vertex: ind.local_vertex(*vertex)?,
            symbol: symbol.clone(),
        }),
        PointOnCurve::Node(e) => {
            if let Some(local) = ind.edge_map[*e] {
                return Some(PointOnCurve::Node(local));
            }
            let w = curve
                .edge(*e)
                .ends
                .into_iter()
                .find(|&v| ind.local_vertex(v).is_some())?;
            Some(PointOnCurve::Smooth {
                vertex: ind.local_vertex(w)?,
                symbol: curve.branch_at(*e, w),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct RestrictionReport {
    /// base of the Abel map of the spine that the restrictions should match
    pub predicted_base: Symbol,
    pub points_checked: usize,
    pub failures: Vec<String>,
}

impl RestrictionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every point class Q on the spine W: I_Q restricted to W is the
/// degree-0 Abel sheaf of W with the predicted base, and the restrictions to
/// the components of the complement do not depend on Q.
pub fn verify_restriction(
    curve: &Curve,
    base: &PointOnCurve,
    spine: Subcurve,
) -> Result<RestrictionReport> {
    let p = base_vertex(curve, base)?;
    if !is_spine(curve, spine)? {
        return Err(Error::NotSpine(curve.fmt_subcurve(spine)));
    }
    let others = curve.components_of(spine.complement(curve.num_vertices()));
    let predicted_base = if spine.contains(p) {
        match base {
            PointOnCurve::Smooth { symbol, .. } => symbol.clone(),
            PointOnCurve::Node(_) => unreachable!(),
        }
    } else {
        let c = others.iter().find(|c| c.contains(p)).expect("complement covers p");
        let n = curve
            .crossing_edges(*c)
            .find(|&e| curve.edge(e).ends.iter().any(|&v| spine.contains(v)))
            .expect("spine meets every complementary component");
        let w = curve.edge(n).ends.into_iter().find(|&v| spine.contains(v)).unwrap();
        curve.branch_at(n, w)
    };

    let w_ind = curve.induced(spine)?;
    let w_base = w_ind.curve.smooth_point(predicted_base.clone())?;
    let points: Vec<PointOnCurve> = curve
        .point_classes()
        .into_iter()
        .filter(|q| match q {
            PointOnCurve::Smooth { vertex, .. } => spine.contains(*vertex),
            PointOnCurve::Node(e) => curve.edge(*e).ends.iter().any(|&v| spine.contains(v)),
        })
        .collect();

    let mut failures = Vec::new();
    let mut reference: Vec<Option<CombSheaf>> = vec![None; others.len()];
    for q in &points {
        let i = abel0(curve, base, q)?;
        let (_, on_w) = i.restrict(curve, spine)?;
        let local_q = localize(curve, &w_ind, q).expect("point lies on the spine");
        let expected = abel0(&w_ind.curve, &w_base, &local_q)?;
        if iso_witness(&on_w, &expected, &w_ind.curve)? != IsoVerdict::Iso {
            failures.push(format!(
                "{}: restriction to the spine differs from its own Abel sheaf",
                q.describe(curve)
            ));
        }
        for (k, c) in others.iter().enumerate() {
            let (ind, piece) = i.restrict(curve, *c)?;
            match &reference[k] {
                None => reference[k] = Some(piece),
                Some(first) => {
                    if iso_witness(first, &piece, &ind.curve)? != IsoVerdict::Iso {
                        failures.push(format!(
                            "{}: restriction to {} varies",
                            q.describe(curve),
                            curve.fmt_subcurve(*c)
                        ));
                    }
                }
            }
        }
    }
    Ok(RestrictionReport {
        predicted_base,
        points_checked: points.len(),
        failures,
    })
}

/// Point classes grouped into fibers of the Abel map: all classes on a
/// maximal tree of separating lines, together with the nodes touching it, form
/// one fiber; every other class is its own fiber.
pub fn fiber_partition(curve: &Curve) -> Result<Vec<Vec<PointOnCurve>>> {
    if curve.genus() == 0 {
        return Err(Error::GenusZero);
    }
    let trees = maximal_line_trees(curve);
    let tree_of = |q: &PointOnCurve| -> Option<usize> {
        trees.iter().position(|t| match q {
            PointOnCurve::Smooth { vertex, .. } => t.vertices.contains(*vertex),
            PointOnCurve::Node(e) => curve.edge(*e).ends.iter().any(|&v| t.vertices.contains(v)),
        })
    };
    let mut blocks: Vec<Vec<PointOnCurve>> = Vec::new();
    let mut tree_block: Vec<Option<usize>> = vec![None; trees.len()];
    for q in curve.point_classes() {
        match tree_of(&q) {
            Some(t) => match tree_block[t] {
                Some(b) => blocks[b].push(q),
                None => {
                    tree_block[t] = Some(blocks.len());
                    blocks.push(vec![q]);
                }
            },
            None => blocks.push(vec![q]),
        }
    }
    Ok(blocks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    /// an ordinary node kept from the curve
    Node,
    /// the image of a contracted tree of separating lines
    Contracted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPoint {
    pub id: String,
    pub kind: SingularKind,
    /// (component index, branch point on that component)
    pub branches: Vec<(usize, Symbol)>,
}

/// Smooth components glued at points with any number of branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedCurve {
    pub components: Vec<(String, u32)>,
    pub points: Vec<SingularPoint>,
}

impl fmt::Display for GeneralizedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, g) in &self.components {
            writeln!(f, "component {id} genus={g}")?;
        }
        for p in &self.points {
            let kind = match p.kind {
                SingularKind::Node => "node",
                SingularKind::Contracted => "ordinary",
            };
            let branches: Vec<String> = p
                .branches
                .iter()
                .map(|(c, s)| format!("{}:{}", self.components[*c].0, s))
                .collect();
            writeln!(f, "{kind} {} [{}]", p.id, branches.join(" "))?;
        }
        Ok(())
    }
}

/// Image of the Abel map: separating lines are contracted, each maximal tree
/// of them to one ordinary point whose branches are its attachment nodes.
pub fn image_curve(curve: &Curve) -> Result<GeneralizedCurve> {
    if curve.genus() == 0 {
        return Err(Error::GenusZero);
    }
    let trees = maximal_line_trees(curve);
    let lines = trees.iter().fold(Subcurve::EMPTY, |s, t| s.union(t.vertices));
    let kept: Vec<usize> = (0..curve.num_vertices()).filter(|&v| !lines.contains(v)).collect();
    let index = |v: usize| kept.iter().position(|&w| w == v);
    let components = kept
        .iter()
        .map(|&v| (curve.vertex(v).id.clone(), curve.vertex(v).genus))
        .collect();
    let mut points = Vec::new();
    for (i, e) in curve.edges().iter().enumerate() {
        if let (Some(a), Some(b)) = (index(e.ends[0]), index(e.ends[1])) {
            let [ba, bb] = curve.branches(i);
            points.push(SingularPoint {
                id: e.id.clone(),
                kind: SingularKind::Node,
                branches: vec![(a, ba), (b, bb)],
            });
        }
    }
    for t in &trees {
        if t.attachments.len() < 2 {
            continue;
        }
        let branches = t
            .attachments
            .iter()
            .map(|&e| {
                let w = curve.edge(e).ends.into_iter().find(|&v| !t.vertices.contains(v)).unwrap();
                (index(w).unwrap(), curve.branch_at(e, w))
            })
            .collect();
        let ids: Vec<&str> = t.vertices.iter().map(|v| curve.vertex(v).id.as_str()).collect();
        points.push(SingularPoint {
            id: format!("R[{}]", ids.join(",")),
            kind: SingularKind::Contracted,
            branches,
        });
    }
    Ok(GeneralizedCurve { components, points })
}

/// Σ genera + Σ (branches − 1) − #components + 1.
pub fn gen_genus(gc: &GeneralizedCurve) -> Result<i64> {
    let n = gc.components.len();
    if n == 0 {
        return Err(Error::NoVertices);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for p in &gc.points {
        for w in p.branches.windows(2) {
            let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    if (0..n).any(|c| find(&mut parent, c) != root) {
        return Err(Error::Disconnected);
    }
    let genera: i64 = gc.components.iter().map(|(_, g)| *g as i64).sum();
    let singular: i64 = gc.points.iter().map(|p| p.branches.len() as i64 - 1).sum();
    Ok(genera + singular - n as i64 + 1)
}
