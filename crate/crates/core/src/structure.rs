//! Separating structure: bridges, tails, small tails, spines and separating
//! lines.

use std::collections::{BTreeMap, BTreeSet};

use crate::curve::{Curve, Subcurve};
use crate::error::{Error, Result};
use crate::point::PointOnCurve;

/// Bridges of the subgraph induced on `within`, with edges for which `alive`
/// is false deleted. Loops and parallel edges are never bridges.
pub fn bridges_where(
    curve: &Curve,
    within: Subcurve,
    alive: impl Fn(usize) -> bool,
) -> BTreeSet<usize> {
    let n = curve.num_vertices();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, e) in curve.edges().iter().enumerate() {
        if !alive(i) || e.is_loop() || !curve.is_internal(i, within) {
            continue;
        }
        adj[e.ends[0]].push((e.ends[1], i));
        adj[e.ends[1]].push((e.ends[0], i));
    }
    let mut order = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut counter = 0;
    let mut out = BTreeSet::new();

    fn dfs(
        v: usize,
        parent_edge: Option<usize>,
        adj: &[Vec<(usize, usize)>],
        order: &mut [usize],
        low: &mut [usize],
        counter: &mut usize,
        out: &mut BTreeSet<usize>,
    ) {
        order[v] = *counter;
        low[v] = *counter;
        *counter += 1;
        for &(w, e) in &adj[v] {
            if Some(e) == parent_edge {
                continue;
            }
            if order[w] == usize::MAX {
                dfs(w, Some(e), adj, order, low, counter, out);
                low[v] = low[v].min(low[w]);
                if low[w] > order[v] {
                    out.insert(e);
                }
            } else {
                low[v] = low[v].min(order[w]);
            }
        }
    }

    for v in within.iter() {
        if order[v] == usize::MAX {
            dfs(v, None, &adj, &mut order, &mut low, &mut counter, &mut out);
        }
    }
    out
}

/// Separating nodes: exactly the bridges of the dual graph.
pub fn separating_nodes(curve: &Curve) -> BTreeSet<usize> {
    bridges_where(curve, curve.full(), |_| true)
}

/// A tail: one side of a separating node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tail {
    pub bridge: usize,
    pub vertices: Subcurve,
    /// endpoint of the bridge inside the tail
    pub inner: usize,
    /// endpoint of the bridge on the complementary tail
    pub outer: usize,
}

impl Tail {
    /// A smooth point lies on the tail when its component does; a node lies on
    /// it when it is internal or is the generating bridge.
    pub fn contains_point(&self, curve: &Curve, q: &PointOnCurve) -> bool {
        match q {
            PointOnCurve::Smooth { vertex, .. } => self.vertices.contains(*vertex),
            PointOnCurve::Node(e) => *e == self.bridge || curve.is_internal(*e, self.vertices),
        }
    }

    pub fn complement(&self, curve: &Curve) -> Tail {
        Tail {
            bridge: self.bridge,
            vertices: self.vertices.complement(curve.num_vertices()),
            inner: self.outer,
            outer: self.inner,
        }
    }
}

/// The two tails generated by bridge `e`; the side of its second endpoint first.
pub fn tails_of_bridge(curve: &Curve, e: usize) -> [Tail; 2] {
    let [a, b] = curve.edge(e).ends;
    let removed: BTreeSet<usize> = [e].into_iter().collect();
    let comps = curve.components_avoiding(curve.full(), &removed);
    debug_assert_eq!(comps.len(), 2, "edge {e} is not a bridge");
    let side_b = comps.into_iter().find(|c| c.contains(b)).unwrap_or_default();
    let first = Tail {
        bridge: e,
        vertices: side_b,
        inner: b,
        outer: a,
    };
    [first, first.complement(curve)]
}

/// All tails of the curve, optionally only those through `through` and those
/// avoiding the component `avoiding`.
pub fn tails(curve: &Curve, through: Option<&PointOnCurve>, avoiding: Option<usize>) -> Vec<Tail> {
    separating_nodes(curve)
        .into_iter()
        .flat_map(|e| tails_of_bridge(curve, e))
        .filter(|t| through.is_none_or(|q| t.contains_point(curve, q)))
        .filter(|t| avoiding.is_none_or(|v| !t.vertices.contains(v)))
        .collect()
}

/// How the small tail of a bridge was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceTag {
    /// the two sides have different genera
    Forced,
    /// genus tie broken by the least vertex id
    Default,
    /// genus tie broken by the caller
    User,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailEntry {
    pub bridge: usize,
    pub small: Tail,
    pub large: Tail,
    pub splitting: bool,
    pub choice: ChoiceTag,
}

/// One small tail per separating node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TailTable {
    pub entries: Vec<TailEntry>,
}

impl TailTable {
    pub fn small_tails(&self) -> impl Iterator<Item = &Tail> {
        self.entries.iter().map(|e| &e.small)
    }

    pub fn splitting_nodes(&self) -> impl Iterator<Item = &TailEntry> {
        self.entries.iter().filter(|e| e.splitting)
    }

    pub fn small_tail_of(&self, bridge: usize) -> Option<&Tail> {
        self.entries.iter().find(|e| e.bridge == bridge).map(|e| &e.small)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same table with the choice at every splitting node reversed.
    pub fn swapped(&self) -> TailTable {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                if e.splitting {
                    TailEntry {
                        small: e.large,
                        large: e.small,
                        choice: ChoiceTag::User,
                        ..e.clone()
                    }
                } else {
                    e.clone()
                }
            })
            .collect();
        TailTable { entries }
    }
}

/// Small tails: the lower-genus side of each bridge; on a genus tie, the side
/// containing the vertex named in `tie_choice`, else the side containing the
/// lexicographically least vertex id.
pub fn small_tails(curve: &Curve, tie_choice: &BTreeMap<usize, usize>) -> Result<TailTable> {
    let bridges = separating_nodes(curve);
    for &b in tie_choice.keys() {
        if !bridges.contains(&b) {
            return Err(Error::NotSplitting(curve.edge(b).id.clone()));
        }
    }
    let mut entries = Vec::new();
    for e in bridges {
        let [t0, t1] = tails_of_bridge(curve, e);
        let g0 = curve.genus_of(Some(t0.vertices))?;
        let g1 = curve.genus_of(Some(t1.vertices))?;
        let entry = if g0 != g1 {
            if tie_choice.contains_key(&e) {
                return Err(Error::NotSplitting(curve.edge(e).id.clone()));
            }
            let (small, large) = if g0 < g1 { (t0, t1) } else { (t1, t0) };
            TailEntry {
                bridge: e,
                small,
                large,
                splitting: false,
                choice: ChoiceTag::Forced,
            }
        } else if let Some(&v) = tie_choice.get(&e) {
            let (small, large) = if t0.vertices.contains(v) { (t0, t1) } else { (t1, t0) };
            TailEntry {
                bridge: e,
                small,
                large,
                splitting: true,
                choice: ChoiceTag::User,
            }
        } else {
            let least = |t: &Tail| {
                t.vertices
                    .iter()
                    .map(|v| curve.vertex(v).id.clone())
                    .min()
                    .unwrap_or_default()
            };
            let (small, large) = if least(&t0) < least(&t1) { (t0, t1) } else { (t1, t0) };
            TailEntry {
                bridge: e,
                small,
                large,
                splitting: true,
                choice: ChoiceTag::Default,
            }
        };
        entries.push(entry);
    }
    Ok(TailTable { entries })
}

/// Parses `bridge=vertex` tie choices.
pub fn parse_choices(curve: &Curve, specs: &[String]) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for s in specs {
        let (e, v) = s
            .split_once('=')
            .ok_or_else(|| Error::UnknownEdge(s.clone()))?;
        out.insert(curve.edge_index(e.trim())?, curve.vertex_index(v.trim())?);
    }
    Ok(out)
}

/// Every crossing edge of the connected subcurve is a separating node.
pub fn is_spine(curve: &Curve, sub: Subcurve) -> Result<bool> {
    curve.check_nonempty(sub)?;
    if !curve.is_connected_subset(sub) {
        return Err(Error::SubcurveDisconnected(curve.fmt_subcurve(sub)));
    }
    let bridges = separating_nodes(curve);
    Ok(curve.crossing_edges(sub).all(|e| bridges.contains(&e)))
}

/// Smooth rational components that are spines.
pub fn separating_lines(curve: &Curve) -> Subcurve {
    let bridges = separating_nodes(curve);
    Subcurve::from_indices((0..curve.num_vertices()).filter(|&v| {
        let s = Subcurve::singleton(v);
        curve.vertex(v).genus == 0
            && !curve.has_loop(v)
            && curve.crossing_edges(s).all(|e| bridges.contains(&e))
    }))
}

/// A maximal separating tree of lines with its attachment nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineTree {
    pub vertices: Subcurve,
    pub attachments: Vec<usize>,
}

pub fn maximal_line_trees(curve: &Curve) -> Vec<LineTree> {
    let lines = separating_lines(curve);
    curve
        .components_of(lines)
        .into_iter()
        .map(|t| LineTree {
            vertices: t,
            attachments: curve.crossing_edges(t).collect(),
        })
        .collect()
}

/// A component on which a smooth point lies on no small tail: the attachment
/// component of the complement of a maximal small tail.
pub fn basepoint_off_small_tails(curve: &Curve, table: &TailTable) -> Result<usize> {
    if !curve.is_gstable() {
        return Err(Error::NotGStable);
    }
    let small: Vec<&Tail> = table.small_tails().collect();
    let maximal = small.iter().find(|z| {
        !small
            .iter()
            .any(|w| w.vertices != z.vertices && z.vertices.is_subset(w.vertices))
    });
    Ok(match maximal {
        Some(z) => z.outer,
        None => 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn edge_ids(c: &Curve, s: &BTreeSet<usize>) -> Vec<String> {
        s.iter().map(|&e| c.edge(e).id.clone()).collect()
    }

    fn sets(c: &Curve, ts: &[Tail]) -> BTreeSet<String> {
        ts.iter().map(|t| c.fmt_subcurve(t.vertices)).collect()
    }

    #[test]
    fn separating_node_examples() {
        let a = fixtures::fix_a();
        assert_eq!(edge_ids(&a, &separating_nodes(&a)), vec!["e3", "e4"]);
        let e = fixtures::fix_e();
        assert!(separating_nodes(&e).is_empty());
        let b = fixtures::fix_b();
        assert_eq!(edge_ids(&b, &separating_nodes(&b)), vec!["e"]);
        let l = Curve::builder().vertex("a", 1).edge("l", "a", "a").build().unwrap();
        assert!(separating_nodes(&l).is_empty());
    }

    #[test]
    fn tails_examples() {
        let a = fixtures::fix_a();
        let expected: BTreeSet<String> = ["{X3}", "{X1,X2,X4}", "{X4}", "{X1,X2,X3}"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(sets(&a, &tails(&a, None, None)), expected);
        let q = a.parse_point("Q").unwrap();
        let p = a.point_vertex("P").unwrap();
        assert!(tails(&a, Some(&q), Some(p)).is_empty());
        assert!(tails(&fixtures::fix_d(), None, None).is_empty());
    }

    #[test]
    fn node_lies_on_both_generated_tails() {
        let c = fixtures::fix_c();
        let n = c.parse_point("node:e1").unwrap();
        let through = sets(&c, &tails(&c, Some(&n), None));
        // both tails of e1, and {v1,L} which contains e1 internally
        let expected: BTreeSet<String> = ["{v1}", "{L,v2}", "{v1,L}"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(through, expected);
    }

    #[test]
    fn small_tail_examples() {
        let a = fixtures::fix_a();
        let t = small_tails(&a, &BTreeMap::new()).unwrap();
        let small: Vec<String> = t.small_tails().map(|z| a.fmt_subcurve(z.vertices)).collect();
        assert_eq!(small, vec!["{X3}", "{X4}"]);
        assert_eq!(t.splitting_nodes().count(), 0);

        let b = fixtures::fix_b();
        let t = small_tails(&b, &BTreeMap::new()).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert!(t.entries[0].splitting);
        assert_eq!(t.entries[0].choice, ChoiceTag::Default);
        assert_eq!(b.fmt_subcurve(t.entries[0].small.vertices), "{v1}");
        let choice = parse_choices(&b, &["e=v2".to_string()]).unwrap();
        let t2 = small_tails(&b, &choice).unwrap();
        assert_eq!(b.fmt_subcurve(t2.entries[0].small.vertices), "{v2}");
        assert_eq!(t2.entries[0].choice, ChoiceTag::User);
        assert_eq!(t.swapped().entries[0].small, t2.entries[0].small);

        assert!(small_tails(&fixtures::fix_d(), &BTreeMap::new()).unwrap().is_empty());
    }

    #[test]
    fn choice_on_non_splitting_bridge_is_rejected() {
        let a = fixtures::fix_a();
        let choice = parse_choices(&a, &["e3=X3".to_string()]).unwrap();
        assert_eq!(small_tails(&a, &choice), Err(Error::NotSplitting("e3".into())));
    }

    #[test]
    fn spine_examples() {
        let c = fixtures::fix_c();
        assert!(is_spine(&c, c.subcurve(&["L"]).unwrap()).unwrap());
        let e = fixtures::fix_e();
        assert!(!is_spine(&e, e.subcurve(&["b1"]).unwrap()).unwrap());
        for x in fixtures::all() {
            assert!(is_spine(&x, x.full()).unwrap());
        }
        assert!(matches!(
            is_spine(&c, c.subcurve(&["v1", "v2"]).unwrap()),
            Err(Error::SubcurveDisconnected(_))
        ));
    }

    #[test]
    fn separating_line_examples() {
        let c = fixtures::fix_c();
        assert_eq!(separating_lines(&c), c.subcurve(&["L"]).unwrap());
        let a = fixtures::fix_a();
        assert!(separating_lines(&a).is_empty());
        let t = Curve::builder()
            .vertex("a", 0)
            .vertex("b", 0)
            .edge("e", "a", "b")
            .build()
            .unwrap();
        assert_eq!(separating_lines(&t), t.full());
    }

    #[test]
    fn line_tree_examples() {
        let c = fixtures::fix_c();
        let trees = maximal_line_trees(&c);
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].vertices, c.subcurve(&["L"]).unwrap());
        assert_eq!(trees[0].attachments, vec![0, 1]);
        assert!(maximal_line_trees(&fixtures::fix_a()).is_empty());
        assert!(maximal_line_trees(&fixtures::fix_d()).is_empty());
    }

    #[test]
    fn basepoint_examples() {
        let a = fixtures::fix_a();
        let t = small_tails(&a, &BTreeMap::new()).unwrap();
        let v = basepoint_off_small_tails(&a, &t).unwrap();
        assert!(["X1", "X2"].contains(&a.vertex(v).id.as_str()));

        let b = fixtures::fix_b();
        let t = small_tails(&b, &BTreeMap::new()).unwrap();
        assert_eq!(b.vertex(basepoint_off_small_tails(&b, &t).unwrap()).id, "v2");

        let d = fixtures::fix_d();
        let t = small_tails(&d, &BTreeMap::new()).unwrap();
        assert_eq!(basepoint_off_small_tails(&d, &t).unwrap(), 0);

        let c = fixtures::fix_c();
        let t = small_tails(&c, &BTreeMap::new()).unwrap();
        assert_eq!(basepoint_off_small_tails(&c, &t), Err(Error::NotGStable));
    }
}
