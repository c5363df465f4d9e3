//! Semistability, stability and P-quasistability in exact arithmetic.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::curve::{Curve, Subcurve};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::point::PointOnCurve;
use crate::sheaf::CombSheaf;

#[derive(Debug, Clone)]
pub struct StabilityContext<'a> {
    pub curve: &'a Curve,
    pub degree: i64,
    pub genus: i64,
    /// vertex carrying the base point
    pub base: Option<usize>,
    pub weights: Option<Vec<Rational64>>,
    pub execution: Execution,
}

impl<'a> StabilityContext<'a> {
    pub fn new(curve: &'a Curve, degree: i64) -> Result<Self> {
        let genus = curve.genus();
        if genus == 1 && degree != 0 {
            return Err(Error::GenusOneDegree(degree));
        }
        Ok(StabilityContext {
            curve,
            degree,
            genus,
            base: None,
            weights: None,
            execution: Execution::Sequential,
        })
    }

    pub fn with_base(mut self, vertex: usize) -> Self {
        self.base = Some(vertex);
        self
    }

    pub fn with_base_point(self, p: &PointOnCurve) -> Result<Self> {
        match p.vertex() {
            Some(v) => Ok(self.with_base(v)),
            None => Err(Error::BaseNotSmooth),
        }
    }

    /// Seshadri weights: positive, summing to one, one per vertex.
    pub fn with_weights(mut self, weights: Vec<Rational64>) -> Result<Self> {
        if weights.len() != self.curve.num_vertices() {
            return Err(Error::BadWeights(format!(
                "expected {} weights, got {}",
                self.curve.num_vertices(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::BadWeights("weights must be positive".into()));
        }
        let total: Rational64 = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::BadWeights(format!("weights sum to {total}, not 1")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Positive integer s with s·margin integral.
    fn scale(&self) -> i64 {
        if self.genus == 1 {
            2
        } else {
            2 * (self.genus - 1).abs()
        }
    }
}

/// Canonical weights a_v = deg(ω|_{X_v}) / (2g − 2).
pub fn canonical_weights(curve: &Curve) -> Result<Vec<Rational64>> {
    let g = curve.genus();
    if g < 2 {
        return Err(Error::GenusTooSmall);
    }
    (0..curve.num_vertices())
        .map(|v| {
            Ok(Rational64::new(
                curve.omega_degree(Subcurve::singleton(v))?,
                2 * g - 2,
            ))
        })
        .collect()
}

/// Parses `v1:1/3,v2:2/3` (an optional leading `a=` is ignored).
pub fn parse_weights(curve: &Curve, text: &str) -> Result<Vec<Rational64>> {
    let text = text.trim().strip_prefix("a=").unwrap_or(text.trim());
    let mut out = vec![Rational64::zero(); curve.num_vertices()];
    let mut seen = vec![false; curve.num_vertices()];
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (v, w) = item
            .split_once(':')
            .ok_or_else(|| Error::BadWeights(format!("expected <vertex>:<p>/<q>, got `{item}`")))?;
        let v = curve.vertex_index(v.trim())?;
        let w: Rational64 = w
            .trim()
            .parse()
            .map_err(|_| Error::BadWeights(format!("bad rational `{w}`")))?;
        out[v] = w;
        seen[v] = true;
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::BadWeights(format!(
            "no weight for vertex `{}`",
            curve.vertex(v).id
        )));
    }
    Ok(out)
}

/// Bitmask view of a sheaf for fast evaluation over many subcurves.
struct Tables {
    mdeg: Vec<i64>,
    genera: Vec<i64>,
    /// (endpoint masks, non-free)
    edges: Vec<(u64, u64, bool)>,
}

#[derive(Debug, Clone, Copy)]
struct Stats {
    degree: i64,
    chi: i64,
    delta: i64,
}

impl Stats {
    fn omega(&self) -> i64 {
        -2 * self.chi + self.delta
    }
}

impl Tables {
    fn new(curve: &Curve, sheaf: &CombSheaf) -> Tables {
        Tables {
            mdeg: sheaf.multidegree(),
            genera: curve.vertices().iter().map(|v| v.genus as i64).collect(),
            edges: curve
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| (1 << e.ends[0], 1 << e.ends[1], sheaf.nonfree().contains(&i)))
                .collect(),
        }
    }

    fn stats(&self, mask: u64) -> Stats {
        let mut degree = 0;
        let mut chi = mask.count_ones() as i64;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            degree += self.mdeg[v];
            chi -= self.genera[v];
        }
        let mut delta = 0;
        for &(a, b, nonfree) in &self.edges {
            match (mask & a != 0, mask & b != 0) {
                (true, true) => {
                    chi -= 1;
                    if nonfree {
                        degree += 1;
                    }
                }
                (true, false) | (false, true) => delta += 1,
                _ => {}
            }
        }
        Stats { degree, chi, delta }
    }
}

fn scaled_margin(ctx: &StabilityContext, s: Stats) -> i64 {
    let g = ctx.genus;
    if g == 1 {
        2 * s.degree + s.delta
    } else {
        ctx.scale() * s.degree - (g - 1).signum() * ctx.degree * s.omega() + (g - 1).abs() * s.delta
    }
}

fn check(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<()> {
    if sheaf.curve_fingerprint() != ctx.curve.fingerprint() {
        return Err(Error::DifferentCurves);
    }
    Ok(())
}

/// deg_Y(I) − d·deg(ω|_Y)/(2g−2) + δ_Y/2; at genus one, deg_Y(I) + δ_Y/2.
pub fn margin(sheaf: &CombSheaf, sub: Subcurve, ctx: &StabilityContext) -> Result<Rational64> {
    check(sheaf, ctx)?;
    ctx.curve.check_proper(sub)?;
    let s = Tables::new(ctx.curve, sheaf).stats(sub.bits());
    Ok(Rational64::new(scaled_margin(ctx, s), ctx.scale()))
}

/// (2g−2)·deg_Y(I) + (g−1)·δ_Y − d·deg(ω|_Y).
pub fn chi_pairing(sheaf: &CombSheaf, sub: Subcurve, ctx: &StabilityContext) -> Result<i64> {
    check(sheaf, ctx)?;
    if ctx.genus < 2 {
        return Err(Error::GenusTooSmall);
    }
    ctx.curve.check_proper(sub)?;
    let s = Tables::new(ctx.curve, sheaf).stats(sub.bits());
    let g = ctx.genus;
    Ok((2 * g - 2) * s.degree + (g - 1) * s.delta - ctx.degree * s.omega())
}

/// χ(I_Y) − a_Y·χ(I).
pub fn seshadri_margin(
    sheaf: &CombSheaf,
    sub: Subcurve,
    ctx: &StabilityContext,
) -> Result<Rational64> {
    check(sheaf, ctx)?;
    ctx.curve.check_proper(sub)?;
    let weights = ctx.weights.as_ref().ok_or(Error::MissingWeights)?;
    let t = Tables::new(ctx.curve, sheaf);
    Ok(seshadri_value(&t, weights, sheaf, ctx, sub.bits()))
}

fn seshadri_value(
    t: &Tables,
    weights: &[Rational64],
    sheaf: &CombSheaf,
    ctx: &StabilityContext,
    mask: u64,
) -> Rational64 {
    let s = t.stats(mask);
    let chi_total = sheaf.total_degree() + 1 - ctx.genus;
    let a: Rational64 = Subcurve::from_bits(mask).iter().map(|v| weights[v]).sum();
    Rational64::from_integer(s.degree + s.chi) - a * chi_total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Stable => "stable",
            Classification::StrictlySemistable => "strictly-semistable",
            Classification::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub sub: Subcurve,
    pub margin: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub classification: Classification,
    /// present when the context has a base point
    pub p_quasistable: Option<bool>,
    /// every proper subcurve with margin ≤ 0, by size then index order
    pub witnesses: Vec<Witness>,
}

impl StabilityReport {
    pub fn is_semistable(&self) -> bool {
        self.classification != Classification::Unstable
    }

    pub fn zero_margin(&self) -> impl Iterator<Item = Subcurve> + '_ {
        self.witnesses
            .iter()
            .filter(|w| w.margin.is_zero())
            .map(|w| w.sub)
    }

    fn from_witnesses(mut witnesses: Vec<Witness>, base: Option<usize>) -> StabilityReport {
        witnesses.sort_by_key(|w| w.sub.sort_key());
        let classification = if witnesses.iter().any(|w| w.margin.is_negative()) {
            Classification::Unstable
        } else if witnesses.is_empty() {
            Classification::Stable
        } else {
            Classification::StrictlySemistable
        };
        let p_quasistable = base.map(|b| {
            classification != Classification::Unstable
                && witnesses.iter().all(|w| !w.sub.contains(b))
        });
        StabilityReport {
            classification,
            p_quasistable,
            witnesses,
        }
    }
}

fn scan(
    ctx: &StabilityContext,
    connected_only: bool,
    value: impl Fn(u64) -> Option<Rational64> + Sync + Send,
) -> Result<StabilityReport> {
    ctx.curve.check_enumerable()?;
    let n = ctx.curve.num_vertices();
    let full = Subcurve::full(n).bits();
    let adjacency: Vec<u64> = (0..n)
        .map(|v| {
            ctx.curve
                .incident(v)
                .fold(0u64, |m, e| m | 1 << ctx.curve.edge(e).other(v))
        })
        .collect();
    let witnesses = par::filter_map_range(ctx.execution, 1..full, |mask| {
        if connected_only && !mask_connected(&adjacency, mask) {
            return None;
        }
        value(mask).map(|margin| Witness {
            sub: Subcurve::from_bits(mask),
            margin,
        })
    });
    Ok(StabilityReport::from_witnesses(witnesses, ctx.base))
}

fn mask_connected(adjacency: &[u64], mask: u64) -> bool {
    let start = mask & mask.wrapping_neg();
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adjacency[v] & mask & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == mask
}

fn canonical_scan(sheaf: &CombSheaf, ctx: &StabilityContext, connected_only: bool) -> Result<StabilityReport> {
    check(sheaf, ctx)?;
    let t = Tables::new(ctx.curve, sheaf);
    let scale = ctx.scale();
    scan(ctx, connected_only, |mask| {
        let m = scaled_margin(ctx, t.stats(mask));
        (m <= 0).then(|| Rational64::new(m, scale))
    })
}

/// Brute force over every proper subcurve.
pub fn classify(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<StabilityReport> {
    canonical_scan(sheaf, ctx, false)
}

/// Checks connected subcurves only. Margins are additive over connected
/// components, so the classification and P-quasistability agree with
/// [`classify`]; witnesses are the connected ones.
pub fn classify_connected(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<StabilityReport> {
    canonical_scan(sheaf, ctx, true)
}

/// Classification by χ(I_Y) ≥ a_Y·χ(I) for the context's weights.
pub fn seshadri_classify(sheaf: &CombSheaf, ctx: &StabilityContext) -> Result<StabilityReport> {
    check(sheaf, ctx)?;
    let weights = ctx.weights.as_ref().ok_or(Error::MissingWeights)?;
    let t = Tables::new(ctx.curve, sheaf);
    scan(ctx, false, |mask| {
        let m = seshadri_value(&t, weights, sheaf, ctx, mask);
        (!m.is_positive()).then_some(m)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sheaf::parse_divisor;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn contracted_sheaf(a: &Curve) -> CombSheaf {
        CombSheaf::ideal_sheaf(a, &a.parse_point("Q").unwrap())
            .tensor(&parse_divisor(a, "P").unwrap())
            .unwrap()
    }

    #[test]
    fn margin_examples() {
        let a = fixtures::fix_a();
        let i = contracted_sheaf(&a);
        let ctx = StabilityContext::new(&a, 0).unwrap();
        let y = a.subcurve(&["X2", "X4"]).unwrap();
        assert_eq!(margin(&i, y, &ctx).unwrap(), r(0, 1));
        assert_eq!(chi_pairing(&i, y, &ctx).unwrap(), 0);

        let t = CombSheaf::trivial(&a);
        for bits in 1..15u64 {
            let y = Subcurve::from_bits(bits);
            let delta = a.delta(y).unwrap();
            assert_eq!(margin(&t, y, &ctx).unwrap(), r(delta, 2));
            assert_eq!(chi_pairing(&t, y, &ctx).unwrap(), 2 * delta);
        }
        assert_eq!(margin(&t, a.full(), &ctx), Err(Error::NotProper));
    }

    #[test]
    fn fix_b_degree_one_margin() {
        let b = fixtures::fix_b();
        let i = parse_divisor(&b, "Q").unwrap();
        let ctx = StabilityContext::new(&b, 1).unwrap();
        let y = b.subcurve(&["v1"]).unwrap();
        assert_eq!(margin(&i, y, &ctx).unwrap(), r(0, 1));
        assert_eq!(chi_pairing(&i, y, &ctx).unwrap(), 0);
        let rep = classify(&i, &ctx).unwrap();
        assert_eq!(rep.classification, Classification::StrictlySemistable);
        assert_eq!(rep.zero_margin().collect::<Vec<_>>(), vec![y]);
    }

    #[test]
    fn genus_one_requires_degree_zero() {
        let l = Curve::builder().vertex("a", 0).edge("l", "a", "a").build().unwrap();
        assert_eq!(StabilityContext::new(&l, 1).unwrap_err(), Error::GenusOneDegree(1));
        assert!(StabilityContext::new(&l, 0).is_ok());
    }

    #[test]
    fn contracted_sheaf_classification() {
        let a = fixtures::fix_a();
        let i = contracted_sheaf(&a);
        let ctx = StabilityContext::new(&a, 0).unwrap().with_base(0);
        let rep = classify(&i, &ctx).unwrap();
        assert_eq!(rep.classification, Classification::StrictlySemistable);
        assert_eq!(rep.p_quasistable, Some(true));
        let w: Vec<String> = rep.witnesses.iter().map(|w| a.fmt_subcurve(w.sub)).collect();
        assert_eq!(w, vec!["{X2,X4}"]);
    }

    #[test]
    fn dual_node_ideal_on_banana_is_stable() {
        let e = fixtures::fix_e();
        let m = CombSheaf::ideal_sheaf(&e, &PointOnCurve::Node(0)).dual(&e).unwrap();
        let ctx = StabilityContext::new(&e, 1).unwrap();
        let rep = classify(&m, &ctx).unwrap();
        assert_eq!(rep.classification, Classification::Stable);
        for v in 0..2 {
            assert!(margin(&m, Subcurve::singleton(v), &ctx).unwrap() >= r(1, 2));
        }
    }

    #[test]
    fn seshadri_examples() {
        let a = fixtures::fix_a();
        let i = contracted_sheaf(&a);
        let w = canonical_weights(&a).unwrap();
        let ctx = StabilityContext::new(&a, 0).unwrap().with_base(0).with_weights(w).unwrap();
        assert_eq!(seshadri_classify(&i, &ctx).unwrap(), classify(&i, &ctx).unwrap());

        let e = fixtures::fix_e();
        let uniform = StabilityContext::new(&e, 0)
            .unwrap()
            .with_weights(vec![r(1, 2), r(1, 2)])
            .unwrap();
        let rep = seshadri_classify(&CombSheaf::trivial(&e), &uniform).unwrap();
        assert!(rep.is_semistable());

        // −3 on b1, +2 on b2: χ(I_{b1}) = −2 < (97/100)·χ(I) = −1.94
        let skewed = StabilityContext::new(&e, -1)
            .unwrap()
            .with_weights(vec![r(97, 100), r(3, 100)])
            .unwrap();
        let l = parse_divisor(&e, "-3*P + 2*Q").unwrap();
        let rep = seshadri_classify(&l, &skewed).unwrap();
        assert_eq!(rep.classification, Classification::Unstable);
        assert_eq!(
            seshadri_margin(&l, Subcurve::singleton(0), &skewed).unwrap(),
            r(-6, 100)
        );
    }

    #[test]
    fn weights_validation() {
        let e = fixtures::fix_e();
        let ctx = StabilityContext::new(&e, 0).unwrap();
        assert!(matches!(
            ctx.clone().with_weights(vec![r(1, 3), r(1, 3)]),
            Err(Error::BadWeights(_))
        ));
        assert_eq!(
            seshadri_classify(&CombSheaf::trivial(&e), &ctx),
            Err(Error::MissingWeights)
        );
        assert_eq!(parse_weights(&e, "a=b1:1/3,b2:2/3").unwrap(), vec![r(1, 3), r(2, 3)]);
        assert!(parse_weights(&e, "b1:1/3").is_err());
    }

    #[test]
    fn fast_path_agrees() {
        let a = fixtures::fix_a();
        let i = contracted_sheaf(&a);
        let ctx = StabilityContext::new(&a, 0).unwrap().with_base(0);
        let full = classify(&i, &ctx).unwrap();
        let fast = classify_connected(&i, &ctx).unwrap();
        assert_eq!(full.classification, fast.classification);
        assert_eq!(full.p_quasistable, fast.p_quasistable);
    }
}
