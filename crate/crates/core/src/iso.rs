//! Sound, partial isomorphism test for combinatorial sheaves.
//!
//! Two sheaves with the same non-free set S are isomorphic iff the difference
//! of their divisors is the divisor of a rational function on the partial
//! normalization X_S whose values agree across every remaining node. Each
//! component is modeled as a smooth curve of its genus with distinct symbols
//! naming distinct points.

use std::collections::BTreeSet;

use crate::curve::{Curve, Subcurve};
use crate::error::{Error, Result};
use crate::point::Symbol;
use crate::sheaf::{CombSheaf, Divisor};
use crate::structure::bridges_where;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsoVerdict {
    Iso,
    NotIso,
    Unknown,
}

fn difference(a: &Divisor, b: &Divisor) -> Divisor {
    let mut d = a.clone();
    for (s, &k) in b {
        let e = d.entry(s.clone()).or_insert(0);
        *e -= k;
    }
    d.retain(|_, k| *k != 0);
    d
}

/// `x − y` with x ≠ y.
fn is_point_difference(d: &Divisor) -> bool {
    let mut coeffs: Vec<i64> = d.values().copied().collect();
    coeffs.sort();
    coeffs == [-1, 1]
}

fn branch_edge(s: &Symbol) -> Option<&str> {
    match s {
        Symbol::Branch { edge, .. } => Some(edge),
        _ => None,
    }
}

pub fn iso_witness(a: &CombSheaf, b: &CombSheaf, curve: &Curve) -> Result<IsoVerdict> {
    let fp = curve.fingerprint();
    if a.curve_fingerprint() != fp || b.curve_fingerprint() != fp {
        return Err(Error::DifferentCurves);
    }
    if a == b {
        return Ok(IsoVerdict::Iso);
    }
    if a.nonfree() != b.nonfree() || a.multidegree() != b.multidegree() {
        return Ok(IsoVerdict::NotIso);
    }
    let n = curve.num_vertices();
    let delta: Vec<Divisor> = (0..n).map(|v| difference(a.divisor(v), b.divisor(v))).collect();

    // a difference x − y is never principal in positive genus
    if (0..n).any(|v| curve.vertex(v).genus >= 1 && is_point_difference(&delta[v])) {
        return Ok(IsoVerdict::NotIso);
    }

    let nonfree = a.nonfree();
    let alive = |e: usize| !nonfree.contains(&e);
    let bridges = bridges_where(curve, curve.full(), alive);
    // nodes of X_S lying on a cycle: the gluing there constrains the function
    let constraint: BTreeSet<usize> = (0..curve.num_edges())
        .filter(|&e| alive(e) && !bridges.contains(&e))
        .collect();
    let zero = Subcurve::from_indices((0..n).filter(|&v| delta[v].is_empty()));

    for (v, dv) in delta.iter().enumerate() {
        if curve.vertex(v).genus == 0
            && is_point_difference(dv)
            && forced_equal_values(curve, v, dv, &constraint, nonfree, zero)
        {
            return Ok(IsoVerdict::NotIso);
        }
    }

    // a difference meeting a constrained node leaves the gluing undetermined
    let ambiguous = delta.iter().any(|d| {
        d.keys().filter_map(branch_edge).any(|id| {
            curve
                .edge_index(id)
                .map(|e| constraint.contains(&e))
                .unwrap_or(false)
        })
    });
    if ambiguous {
        return Ok(IsoVerdict::Unknown);
    }

    let tree_like = (0..n).filter(|&v| !delta[v].is_empty()).all(|v| {
        curve.vertex(v).genus == 0 && !curve.incident(v).any(|e| constraint.contains(&e))
    });
    if tree_like {
        return Ok(IsoVerdict::Iso);
    }
    Ok(IsoVerdict::Unknown)
}

/// On a rational component v with difference x − y the certificate has degree
/// one, hence is injective. Returns true when it must take equal values at two
/// distinct branch points, through a loop at v or a cycle closing up over
/// components where the certificate is constant.
fn forced_equal_values(
    curve: &Curve,
    v: usize,
    delta: &Divisor,
    constraint: &BTreeSet<usize>,
    nonfree: &BTreeSet<usize>,
    zero: Subcurve,
) -> bool {
    let free_of_delta = |e: usize| {
        let b = curve.branch_at(e, v);
        !delta.contains_key(&b)
    };
    for &e in constraint {
        let edge = curve.edge(e);
        if edge.is_loop() && edge.ends[0] == v {
            let [b0, b1] = curve.branches(e);
            if !delta.contains_key(&b0) && !delta.contains_key(&b1) {
                return true;
            }
        }
    }
    let far: Vec<(usize, usize)> = constraint
        .iter()
        .filter(|&&e| {
            let edge = curve.edge(e);
            !edge.is_loop() && (edge.ends[0] == v || edge.ends[1] == v) && free_of_delta(e)
        })
        .map(|&e| (e, curve.edge(e).other(v)))
        .filter(|&(_, w)| zero.contains(w))
        .collect();
    if far.len() < 2 {
        return false;
    }
    // components of the constant locus, with v removed
    let region = zero.minus(Subcurve::singleton(v));
    let comps = curve.components_avoiding(region, nonfree);
    let comp_of = |w: usize| comps.iter().position(|c| c.contains(w));
    for i in 0..far.len() {
        for j in i + 1..far.len() {
            if comp_of(far[i].1) == comp_of(far[j].1) {
                return true;
            }
        }
    }
    false
}
