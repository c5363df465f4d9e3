//! Point symbols and points of a curve.

use std::fmt;

use crate::curve::Curve;
use crate::error::{Error, Result};

/// A formal point on one component.
///
/// `Branch` is one branch of a node, seen as a point of the normalization of
/// the component it lies on. `sheet` tells apart the two branches of a loop
/// and is zero otherwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    Label(String),
    Generic(String),
    Branch {
        edge: String,
        vertex: String,
        sheet: u8,
    },
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Label(l) => write!(f, "{l}"),
            Symbol::Generic(v) => write!(f, "q@{v}"),
            Symbol::Branch { edge, vertex, sheet } => {
                write!(f, "b({edge},{vertex})")?;
                if *sheet == 1 {
                    write!(f, "'")?;
                }
                Ok(())
            }
        }
    }
}

/// A point of the curve: a smooth point on a component, or a node.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PointOnCurve {
    Smooth { vertex: usize, symbol: Symbol },
    Node(usize),
}

impl PointOnCurve {
    pub fn vertex(&self) -> Option<usize> {
        match self {
            PointOnCurve::Smooth { vertex, .. } => Some(*vertex),
            PointOnCurve::Node(_) => None,
        }
    }

    pub fn describe(&self, curve: &Curve) -> String {
        match self {
            PointOnCurve::Smooth { symbol, .. } => symbol.to_string(),
            PointOnCurve::Node(e) => format!("node:{}", curve.edge(*e).id),
        }
    }
}

impl Curve {
    /// The two branch symbols of edge `e`, in endpoint order.
    pub fn branches(&self, e: usize) -> [Symbol; 2] {
        let edge = self.edge(e);
        let loop_ = edge.is_loop();
        [0usize, 1].map(|k| Symbol::Branch {
            edge: edge.id.clone(),
            vertex: self.vertex(edge.ends[k]).id.clone(),
            sheet: if loop_ { k as u8 } else { 0 },
        })
    }

    /// Branch symbol of edge `e` at its endpoint `v` (first sheet for loops).
    pub fn branch_at(&self, e: usize, v: usize) -> Symbol {
        let [b0, b1] = self.branches(e);
        if self.edge(e).ends[0] == v {
            b0
        } else {
            b1
        }
    }

    pub fn generic(&self, v: usize) -> Symbol {
        Symbol::Generic(self.vertex(v).id.clone())
    }

    /// Vertex on which `symbol` lives.
    pub fn symbol_vertex(&self, symbol: &Symbol) -> Result<usize> {
        match symbol {
            Symbol::Label(l) => self.point_vertex(l),
            Symbol::Generic(v) => self.vertex_index(v),
            Symbol::Branch { edge, vertex, .. } => {
                let v = self.vertex_index(vertex)?;
                let on_edge = self
                    .edges()
                    .iter()
                    .any(|e| &e.id == edge && (e.ends[0] == v || e.ends[1] == v));
                let on_port = self.vertex(v).ports.iter().any(|p| &p.edge == edge);
                if on_edge || on_port {
                    Ok(v)
                } else {
                    Err(Error::UnknownPoint(symbol.to_string()))
                }
            }
        }
    }

    /// Whether `symbol` is a smooth point of this curve (branches of this
    /// curve's own nodes are not).
    pub fn is_smooth_symbol(&self, symbol: &Symbol) -> bool {
        match symbol {
            Symbol::Branch { edge, .. } => {
                self.symbol_vertex(symbol).is_ok() && self.edge_index(edge).is_err()
            }
            _ => self.symbol_vertex(symbol).is_ok(),
        }
    }

    pub fn smooth_point(&self, symbol: Symbol) -> Result<PointOnCurve> {
        if !self.is_smooth_symbol(&symbol) {
            return Err(Error::BaseNotSmooth);
        }
        let vertex = self.symbol_vertex(&symbol)?;
        Ok(PointOnCurve::Smooth { vertex, symbol })
    }

    /// Resolves `node:<edge>`, `gen:<vertex>`, a point label, or a bare edge id.
    pub fn parse_point(&self, text: &str) -> Result<PointOnCurve> {
        if let Some(e) = text.strip_prefix("node:") {
            return Ok(PointOnCurve::Node(self.edge_index(e)?));
        }
        if let Some(v) = text.strip_prefix("gen:") {
            let v = self.vertex_index(v)?;
            return Ok(PointOnCurve::Smooth {
                vertex: v,
                symbol: self.generic(v),
            });
        }
        if let Ok(v) = self.point_vertex(text) {
            return Ok(PointOnCurve::Smooth {
                vertex: v,
                symbol: Symbol::Label(text.to_string()),
            });
        }
        if let Ok(e) = self.edge_index(text) {
            return Ok(PointOnCurve::Node(e));
        }
        Err(Error::UnknownPoint(text.to_string()))
    }

    /// The base point declared in the curve file, if any.
    pub fn declared_base(&self) -> Result<Option<PointOnCurve>> {
        self.base().map(|b| self.parse_point(b)).transpose()
    }

    /// One generic smooth point per component, every labeled point, every node.
    pub fn point_classes(&self) -> Vec<PointOnCurve> {
        let mut out = Vec::new();
        for (v, vert) in self.vertices().iter().enumerate() {
            out.push(PointOnCurve::Smooth {
                vertex: v,
                symbol: self.generic(v),
            });
            for l in &vert.points {
                out.push(PointOnCurve::Smooth {
                    vertex: v,
                    symbol: Symbol::Label(l.clone()),
                });
            }
        }
        out.extend((0..self.num_edges()).map(PointOnCurve::Node));
        out
    }
}
