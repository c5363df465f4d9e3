//! Combinatorial torsion-free rank-1 sheaves.
//!
//! A sheaf is recorded by the set of nodes where it fails to be locally free
//! and, on each component, a formal divisor over point symbols. The divisor on
//! a component describes the sheaf pulled back to the partial normalization at
//! the non-free nodes, so branch symbols of a non-free node are ordinary points
//! there.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use crate::curve::{Curve, InducedCurve, Subcurve};
use crate::error::{Error, Result};
use crate::point::{PointOnCurve, Symbol};

pub type Divisor = BTreeMap<Symbol, i64>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CombSheaf {
    curve: u64,
    divisors: Vec<Divisor>,
    nonfree: BTreeSet<usize>,
}

fn add_term(d: &mut Divisor, s: Symbol, k: i64) {
    if k == 0 {
        return;
    }
    let e = d.entry(s.clone()).or_insert(0);
    *e += k;
    if *e == 0 {
        d.remove(&s);
    }
}

fn divisor_degree(d: &Divisor) -> i64 {
    d.values().sum()
}

impl CombSheaf {
    /// The structure sheaf O_X.
    pub fn trivial(curve: &Curve) -> CombSheaf {
        CombSheaf {
            curve: curve.fingerprint(),
            divisors: vec![Divisor::new(); curve.num_vertices()],
            nonfree: BTreeSet::new(),
        }
    }

    /// Ideal sheaf of a point.
    pub fn ideal_sheaf(curve: &Curve, q: &PointOnCurve) -> CombSheaf {
        let mut s = CombSheaf::trivial(curve);
        match q {
            PointOnCurve::Smooth { vertex, symbol } => {
                add_term(&mut s.divisors[*vertex], symbol.clone(), -1);
            }
            PointOnCurve::Node(e) => {
                let ends = curve.edge(*e).ends;
                for (k, b) in curve.branches(*e).into_iter().enumerate() {
                    add_term(&mut s.divisors[ends[k]], b, -1);
                }
                s.nonfree.insert(*e);
            }
        }
        s
    }

    /// The line bundle O_X(D) for D = Σ k·symbol, each symbol placed on the
    /// given vertex.
    pub fn line_bundle<I>(curve: &Curve, terms: I) -> Result<CombSheaf>
    where
        I: IntoIterator<Item = (usize, Symbol, i64)>,
    {
        let mut s = CombSheaf::trivial(curve);
        for (v, sym, k) in terms {
            if v >= curve.num_vertices() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
            if curve.symbol_vertex(&sym).ok() != Some(v) {
                return Err(Error::MisplacedSymbol {
                    symbol: sym.to_string(),
                    vertex: curve.vertex(v).id.clone(),
                });
            }
            add_term(&mut s.divisors[v], sym, k);
        }
        Ok(s)
    }

    /// O_X(D) with each symbol placed on the vertex it lives on.
    pub fn from_divisor<I>(curve: &Curve, terms: I) -> Result<CombSheaf>
    where
        I: IntoIterator<Item = (Symbol, i64)>,
    {
        let placed = terms
            .into_iter()
            .map(|(s, k)| Ok((curve.symbol_vertex(&s)?, s, k)))
            .collect::<Result<Vec<_>>>()?;
        CombSheaf::line_bundle(curve, placed)
    }

    /// The twister O_X(Z) of a tail Z: O_Z(−N) on Z and O_{Z'}(N) on Z'.
    pub fn twister(curve: &Curve, tail: Subcurve) -> Result<CombSheaf> {
        curve.check_proper(tail)?;
        let crossing: Vec<usize> = curve.crossing_edges(tail).collect();
        let [n] = crossing[..] else {
            return Err(Error::NotATail(curve.fmt_subcurve(tail)));
        };
        let [a, b] = curve.edge(n).ends;
        let (z, zc) = if tail.contains(a) { (a, b) } else { (b, a) };
        let mut s = CombSheaf::trivial(curve);
        add_term(&mut s.divisors[z], curve.branch_at(n, z), -1);
        add_term(&mut s.divisors[zc], curve.branch_at(n, zc), 1);
        Ok(s)
    }

    pub fn curve_fingerprint(&self) -> u64 {
        self.curve
    }

    pub fn divisor(&self, v: usize) -> &Divisor {
        &self.divisors[v]
    }

    pub fn nonfree(&self) -> &BTreeSet<usize> {
        &self.nonfree
    }

    pub fn is_locally_free(&self) -> bool {
        self.nonfree.is_empty()
    }

    fn same_curve(&self, curve: &Curve) -> Result<()> {
        if self.curve != curve.fingerprint() {
            return Err(Error::DifferentCurves);
        }
        Ok(())
    }

    /// Tensor product with a line bundle.
    pub fn tensor(&self, bundle: &CombSheaf) -> Result<CombSheaf> {
        if self.curve != bundle.curve {
            return Err(Error::DifferentCurves);
        }
        if !bundle.is_locally_free() {
            if !self.is_locally_free() {
                return Err(Error::NotLocallyFree);
            }
            return bundle.tensor(self);
        }
        let mut out = self.clone();
        for (d, e) in out.divisors.iter_mut().zip(&bundle.divisors) {
            for (s, &k) in e {
                add_term(d, s.clone(), k);
            }
        }
        Ok(out)
    }

    /// The inverse of a line bundle.
    pub fn inverse(&self) -> Result<CombSheaf> {
        if !self.is_locally_free() {
            return Err(Error::NotLocallyFree);
        }
        Ok(self.scaled(-1))
    }

    /// k-th tensor power of a line bundle's divisor data.
    fn scaled(&self, k: i64) -> CombSheaf {
        let mut out = self.clone();
        for d in &mut out.divisors {
            for c in d.values_mut() {
                *c *= k;
            }
            d.retain(|_, c| *c != 0);
        }
        out
    }

    /// The dual sheaf: D_v ↦ −D_v − (branches of non-free nodes at v).
    pub fn dual(&self, curve: &Curve) -> Result<CombSheaf> {
        self.same_curve(curve)?;
        let mut out = self.scaled(-1);
        for &e in &self.nonfree {
            let ends = curve.edge(e).ends;
            for (k, b) in curve.branches(e).into_iter().enumerate() {
                add_term(&mut out.divisors[ends[k]], b, -1);
            }
        }
        Ok(out)
    }

    /// deg_Y: the divisor degrees on Y plus the non-free nodes internal to Y.
    pub fn degree_on(&self, curve: &Curve, sub: Subcurve) -> Result<i64> {
        self.same_curve(curve)?;
        curve.check_nonempty(sub)?;
        let divisors: i64 = sub.iter().map(|v| divisor_degree(&self.divisors[v])).sum();
        let internal = self
            .nonfree
            .iter()
            .filter(|&&e| curve.is_internal(e, sub))
            .count() as i64;
        Ok(divisors + internal)
    }

    pub fn total_degree(&self) -> i64 {
        self.divisors.iter().map(divisor_degree).sum::<i64>() + self.nonfree.len() as i64
    }

    /// Per-component divisor degrees (non-free nodes not counted).
    pub fn multidegree(&self) -> Vec<i64> {
        self.divisors.iter().map(divisor_degree).collect()
    }

    /// χ(I_Y) = deg_Y(I) + χ(O_Y).
    pub fn chi_on(&self, curve: &Curve, sub: Subcurve) -> Result<i64> {
        Ok(self.degree_on(curve, sub)? + curve.chi_structure(sub))
    }

    /// Simple iff removing the non-free nodes leaves the dual graph connected.
    pub fn is_simple(&self, curve: &Curve) -> bool {
        curve.components_avoiding(curve.full(), &self.nonfree).len() == 1
    }

    /// Restriction to `sub` modulo torsion, as a sheaf on the induced curve.
    pub fn restrict(&self, curve: &Curve, sub: Subcurve) -> Result<(InducedCurve, CombSheaf)> {
        self.same_curve(curve)?;
        let ind = curve.induced(sub)?;
        let sheaf = CombSheaf {
            curve: ind.curve.fingerprint(),
            divisors: ind
                .vertex_map
                .iter()
                .map(|&v| self.divisors[v].clone())
                .collect(),
            nonfree: self.nonfree.iter().filter_map(|&e| ind.edge_map[e]).collect(),
        };
        Ok((ind, sheaf))
    }

    /// Restrictions to the pieces of a spine decomposition.
    pub fn restrict_to_pieces(
        &self,
        curve: &Curve,
        pieces: &[Subcurve],
    ) -> Result<Vec<(InducedCurve, CombSheaf)>> {
        self.same_curve(curve)?;
        let mut covered = Subcurve::EMPTY;
        for &p in pieces {
            curve.check_nonempty(p)?;
            if !covered.intersection(p).is_empty() {
                return Err(Error::BadDecomposition("pieces overlap".into()));
            }
            covered = covered.union(p);
            if !crate::structure::is_spine(curve, p)? {
                return Err(Error::NotSpine(curve.fmt_subcurve(p)));
            }
            if let Some(&e) = self.nonfree.iter().find(|&&e| curve.is_crossing(e, p)) {
                return Err(Error::NonfreeCrossing(curve.edge(e).id.clone()));
            }
        }
        if covered != curve.full() {
            return Err(Error::BadDecomposition("pieces do not cover the curve".into()));
        }
        pieces.iter().map(|&p| self.restrict(curve, p)).collect()
    }

    /// Subtracts one branch point at `v`.
    pub(crate) fn twist_down(&mut self, v: usize, symbol: Symbol) {
        add_term(&mut self.divisors[v], symbol, -1);
    }

    /// Stable multi-line rendering.
    pub fn display<'a>(&'a self, curve: &'a Curve) -> SheafDisplay<'a> {
        SheafDisplay { sheaf: self, curve }
    }
}

/// Formats a divisor as `P - 2*b(e,v)`; the zero divisor prints as `0`.
pub fn format_divisor(d: &Divisor) -> String {
    let mut out = String::new();
    for (i, (s, &k)) in d.iter().enumerate() {
        let sign = if k < 0 { "-" } else { "+" };
        if i == 0 {
            if k < 0 {
                out.push('-');
            }
        } else {
            write!(out, " {sign} ").unwrap();
        }
        if k.abs() != 1 {
            write!(out, "{}*", k.abs()).unwrap();
        }
        write!(out, "{s}").unwrap();
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub struct SheafDisplay<'a> {
    sheaf: &'a CombSheaf,
    curve: &'a Curve,
}

impl fmt::Display for SheafDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.curve.vertices().iter().map(|v| v.id.len()).max().unwrap_or(0);
        for (v, d) in self.sheaf.divisors.iter().enumerate() {
            writeln!(f, "  {:width$}  {}", self.curve.vertex(v).id, format_divisor(d))?;
        }
        let nonfree: Vec<&str> = self
            .sheaf
            .nonfree
            .iter()
            .map(|&e| self.curve.edge(e).id.as_str())
            .collect();
        writeln!(f, "  nonfree: {{{}}}", nonfree.join(","))?;
        let md: Vec<String> = self.sheaf.multidegree().iter().map(i64::to_string).collect();
        writeln!(f, "  multidegree: ({})", md.join(","))?;
        write!(f, "  degree: {}", self.sheaf.total_degree())
    }
}

/// Parses a divisor expression such as `P - Q + 2*b(e1,X1)`; `0` is the zero
/// divisor. Bare vertex-prefixed generic points are written `q@v`.
pub fn parse_divisor(curve: &Curve, text: &str) -> Result<CombSheaf> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "0" || compact.is_empty() {
        return Ok(CombSheaf::trivial(curve));
    }
    let bad = |m: &str| Error::Parse {
        line: 0,
        message: format!("{m} in divisor `{text}`"),
    };
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ if terms.is_empty() => (1, rest),
            _ => return Err(bad("expected + or -")),
        };
        // a term ends at the next sign outside parentheses
        let mut depth = 0;
        let mut end = body.len();
        for (i, c) in body.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let term = &body[..end];
        rest = &body[end..];
        let (k, name) = match term.split_once('*') {
            Some((k, n)) => (k.parse::<i64>().map_err(|_| bad("bad coefficient"))?, n),
            None => (1, term),
        };
        terms.push((parse_symbol(curve, name).ok_or_else(|| bad(&format!("unknown symbol `{name}`")))?, sign * k));
    }
    CombSheaf::from_divisor(curve, terms)
}

fn parse_symbol(curve: &Curve, name: &str) -> Option<Symbol> {
    if let Some(inner) = name.strip_prefix("b(") {
        let (inner, sheet) = match inner.strip_suffix(")'") {
            Some(i) => (i, 1),
            None => (inner.strip_suffix(')')?, 0),
        };
        let (e, v) = inner.split_once(',')?;
        let s = Symbol::Branch {
            edge: e.to_string(),
            vertex: v.to_string(),
            sheet,
        };
        return curve.symbol_vertex(&s).is_ok().then_some(s);
    }
    if let Some(v) = name.strip_prefix("q@") {
        return curve.vertex_index(v).is_ok().then(|| Symbol::Generic(v.to_string()));
    }
    curve
        .point_vertex(name)
        .is_ok()
        .then(|| Symbol::Label(name.to_string()))
}
