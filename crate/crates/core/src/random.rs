//! Seeded random curves for property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{Curve, CurveBuilder};

#[derive(Debug, Clone)]
pub struct RandomCurveConfig {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_genus: u32,
    /// edges added on top of a spanning tree: up to this many
    pub max_extra_edges: usize,
    /// chance that an extra edge is a loop
    pub loop_probability: f64,
    /// labeled smooth points: up to this many
    pub max_labels: usize,
    pub require_gstable: bool,
    pub require_positive_genus: bool,
}

impl Default for RandomCurveConfig {
    fn default() -> Self {
        RandomCurveConfig {
            min_vertices: 1,
            max_vertices: 8,
            max_genus: 3,
            max_extra_edges: 3,
            loop_probability: 0.15,
            max_labels: 3,
            require_gstable: false,
            require_positive_genus: false,
        }
    }
}

impl RandomCurveConfig {
    pub fn gstable(max_vertices: usize) -> Self {
        RandomCurveConfig {
            max_vertices,
            require_gstable: true,
            ..Default::default()
        }
    }
}

fn draw(rng: &mut impl Rng, cfg: &RandomCurveConfig, prefix: &str) -> CurveBuilder {
    let n = rng.gen_range(cfg.min_vertices.max(1)..=cfg.max_vertices.max(cfg.min_vertices.max(1)));
    let mut b = Curve::builder();
    let name = |i: usize| format!("{prefix}{i}");
    for i in 0..n {
        b = b.vertex(&name(i), rng.gen_range(0..=cfg.max_genus));
    }
    let mut edges = 0;
    let mut edge = |b: CurveBuilder, x: usize, y: usize| {
        edges += 1;
        b.edge(&format!("{prefix}e{edges}"), &name(x), &name(y))
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        b = edge(b, j, i);
    }
    for _ in 0..rng.gen_range(0..=cfg.max_extra_edges) {
        let x = rng.gen_range(0..n);
        let y = if n == 1 || rng.gen_bool(cfg.loop_probability) {
            x
        } else {
            let mut others: Vec<usize> = (0..n).filter(|&v| v != x).collect();
            others.shuffle(rng);
            others[0]
        };
        b = edge(b, x, y);
    }
    let labels = rng.gen_range(0..=cfg.max_labels);
    for k in 0..labels {
        b = b.point(&format!("{prefix}p{k}"), &name(rng.gen_range(0..n)));
    }
    if labels > 0 {
        b = b.base(&format!("{prefix}p0"));
    }
    b
}

fn accept(c: &Curve, cfg: &RandomCurveConfig) -> bool {
    (!cfg.require_gstable || c.is_gstable()) && (!cfg.require_positive_genus || c.genus() > 0)
}

/// One curve, rejection-sampled against the configured requirements.
pub fn random_curve(rng: &mut impl Rng, cfg: &RandomCurveConfig) -> Curve {
    loop {
        let c = draw(rng, cfg, "v").build().expect("generated curves are valid");
        if accept(&c, cfg) {
            return c;
        }
    }
}

/// `count` curves from a fixed seed.
pub fn corpus(seed: u64, count: usize, cfg: &RandomCurveConfig) -> Vec<Curve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_curve(&mut rng, cfg)).collect()
}

/// A G-stable curve with a splitting node: two halves of equal genus joined
/// by a bridge.
pub fn splitting_curve(rng: &mut impl Rng, max_half_vertices: usize) -> Curve {
    let half = RandomCurveConfig {
        max_vertices: max_half_vertices,
        max_genus: 2,
        max_labels: 2,
        ..Default::default()
    };
    loop {
        let a = draw(rng, &half, "a");
        let b = draw(rng, &half, "b");
        let (Ok(ca), Ok(cb)) = (a.clone().build(), b.clone().build()) else {
            continue;
        };
        if ca.genus() != cb.genus() || ca.genus() == 0 {
            continue;
        }
        let x = &ca.vertices()[rng.gen_range(0..ca.num_vertices())].id;
        let y = &cb.vertices()[rng.gen_range(0..cb.num_vertices())].id;
        let mut joined = Curve::builder();
        for c in [&ca, &cb] {
            for v in c.vertices() {
                joined = joined.vertex(&v.id, v.genus);
            }
            for e in c.edges() {
                joined = joined.edge(&e.id, &c.vertex(e.ends[0]).id, &c.vertex(e.ends[1]).id);
            }
            for v in c.vertices() {
                for p in &v.points {
                    joined = joined.point(p, &v.id);
                }
            }
        }
        joined = joined.edge("split", x, y);
        if let Some(p) = ca.base() {
            joined = joined.base(p);
        }
        let c = joined.build().expect("halves are connected");
        if c.is_gstable() {
            return c;
        }
    }
}

pub fn splitting_corpus(seed: u64, count: usize, max_half_vertices: usize) -> Vec<Curve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| splitting_curve(&mut rng, max_half_vertices)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_curve, print_curve};
    use crate::structure::small_tails;
    use std::collections::BTreeMap;

    #[test]
    fn reproducible() {
        let cfg = RandomCurveConfig::default();
        assert_eq!(corpus(7, 20, &cfg), corpus(7, 20, &cfg));
        assert_ne!(corpus(7, 20, &cfg), corpus(8, 20, &cfg));
    }

    #[test]
    fn requirements_hold() {
        for c in corpus(1, 50, &RandomCurveConfig::gstable(6)) {
            assert!(c.is_gstable());
            assert!(c.num_vertices() <= 6);
        }
    }

    #[test]
    fn splitting_curves_have_a_splitting_node() {
        for c in splitting_corpus(3, 10, 3) {
            assert!(c.is_gstable());
            let t = small_tails(&c, &BTreeMap::new()).unwrap();
            assert_eq!(t.splitting_nodes().count(), 1);
        }
    }

    #[test]
    fn random_round_trip() {
        for c in corpus(11, 50, &RandomCurveConfig::default()) {
            assert_eq!(parse_curve(&print_curve(&c)).unwrap(), c);
        }
    }
}
