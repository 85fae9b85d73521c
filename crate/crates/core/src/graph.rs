//! Finite graphs with nonzero integer edge labels.
//!
//! Oriented edges are stored in pairs: edge `2k` is the positive
//! orientation and `2k + 1` its reverse, so reversal is `e ^ 1` and the
//! unoriented orbit index of `e` is `e / 2`.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

pub type Vertex = usize;
pub type Edge = usize;

pub const SCHEMA_VERSION: u32 = 1;

/// Reverse orientation of an edge.
#[inline]
pub fn rev(e: Edge) -> Edge {
    e ^ 1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphOfGroups {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    origin: Vec<Vertex>,
    label: Vec<i64>,
    base: Vertex,
}

impl GraphOfGroups {
    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    /// Number of oriented edges.
    pub fn num_edges(&self) -> usize {
        self.edge_names.len()
    }

    /// Number of unoriented edges (edge orbits in the tree).
    pub fn num_orbits(&self) -> usize {
        self.edge_names.len() / 2
    }

    pub fn origin(&self, e: Edge) -> Vertex {
        self.origin[e]
    }

    pub fn terminus(&self, e: Edge) -> Vertex {
        self.origin[rev(e)]
    }

    pub fn label(&self, e: Edge) -> i64 {
        self.label[e]
    }

    /// Number of germs of `e` at a lift of its origin, `|λ(e)|`.
    pub fn width(&self, e: Edge) -> i64 {
        self.label[e].abs()
    }

    pub fn base(&self) -> Vertex {
        self.base
    }

    pub fn vertex_name(&self, v: Vertex) -> &str {
        &self.vertex_names[v]
    }

    pub fn edge_name(&self, e: Edge) -> &str {
        &self.edge_names[e]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<Edge> {
        self.edge_names.iter().position(|n| n == name)
    }

    /// Oriented edges with origin `v`, in index order.
    pub fn out_edges(&self, v: Vertex) -> impl Iterator<Item = Edge> + '_ {
        (0..self.num_edges()).filter(move |&e| self.origin[e] == v)
    }

    /// Valence of a lift of `v` in the Bass-Serre tree.
    pub fn degree(&self, v: Vertex) -> i64 {
        self.out_edges(v).map(|e| self.width(e)).sum()
    }

    pub fn with_base(mut self, base: Vertex) -> Self {
        assert!(base < self.num_vertices());
        self.base = base;
        self
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            schema_version: SCHEMA_VERSION,
            vertices: self.vertex_names.clone(),
            edges: (0..self.num_edges())
                .map(|e| EdgeSpec {
                    id: self.edge_names[e].clone(),
                    reverse: self.edge_names[rev(e)].clone(),
                    origin: self.vertex_names[self.origin(e)].clone(),
                    terminus: self.vertex_names[self.terminus(e)].clone(),
                    label: self.label[e],
                })
                .collect(),
            basepoint: Some(self.vertex_names[self.base].clone()),
        }
    }
}

/// Incremental construction; edges are added as reverse pairs.
#[derive(Default, Clone, Debug)]
pub struct GraphBuilder {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    origin: Vec<Vertex>,
    label: Vec<i64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: impl Into<String>) -> Vertex {
        self.vertex_names.push(name.into());
        self.vertex_names.len() - 1
    }

    /// Adds `e: o → t` with `λ(e) = l` and its reverse with `λ(ē) = rl`.
    /// Returns the positive edge.
    pub fn edge(
        &mut self,
        name: impl Into<String>,
        rname: impl Into<String>,
        o: Vertex,
        t: Vertex,
        l: i64,
        rl: i64,
    ) -> Edge {
        let e = self.edge_names.len();
        self.edge_names.push(name.into());
        self.edge_names.push(rname.into());
        self.origin.push(o);
        self.origin.push(t);
        self.label.push(l);
        self.label.push(rl);
        e
    }

    /// Builds without the solvability guard; structural checks still run.
    pub fn build_unguarded(self, base: Vertex) -> Result<GraphOfGroups, Diagnostics> {
        let g = GraphOfGroups {
            vertex_names: self.vertex_names,
            edge_names: self.edge_names,
            origin: self.origin,
            label: self.label,
            base,
        };
        let diags = structural_diagnostics(&g);
        if diags.is_empty() {
            Ok(g)
        } else {
            Err(Diagnostics(diags))
        }
    }

    pub fn build(self, base: Vertex) -> Result<GraphOfGroups, Diagnostics> {
        let g = self.build_unguarded(base)?;
        match solvable_shape(&g) {
            Some(shape) => Err(Diagnostics(vec![Diagnostic::Solvable { shape }])),
            None => Ok(g),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub reverse: String,
    pub origin: String,
    pub terminus: String,
    pub label: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub schema_version: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvableShape {
    Cyclic,
    /// One vertex, one loop with a label of absolute value 1. Covers ℤ²
    /// and the Klein bottle group as BS(1,±1).
    BaumslagSolitarOneN { n: i64 },
    KleinBottleAmalgam,
}

impl fmt::Display for SolvableShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolvableShape::Cyclic => write!(f, "infinite cyclic"),
            SolvableShape::BaumslagSolitarOneN { n } => write!(f, "BS(1,{n})"),
            SolvableShape::KleinBottleAmalgam => write!(f, "Klein bottle group Z *_2Z Z"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    #[error("unsupported schema_version {found}")]
    SchemaVersion { found: u32 },
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex `{name}`")]
    DuplicateVertex { name: String },
    #[error("duplicate edge `{name}`")]
    DuplicateEdge { name: String },
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("edge `{edge}` has unknown reverse `{reverse}`")]
    UnknownReverse { edge: String, reverse: String },
    #[error("edge `{edge}` is its own reverse")]
    SelfReverse { edge: String },
    #[error("reversal is not an involution at `{edge}`")]
    NotInvolution { edge: String },
    #[error("origin/terminus of `{edge}` disagree with its reverse")]
    EndpointMismatch { edge: String },
    #[error("edge `{edge}` has label 0")]
    ZeroLabel { edge: String },
    #[error("vertex `{vertex}` is not connected to the basepoint")]
    Disconnected { vertex: String },
    #[error("unknown basepoint `{name}`")]
    UnknownBasepoint { name: String },
    #[error("presentation is solvable: {shape}")]
    Solvable { shape: SolvableShape },
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn structural_diagnostics(g: &GraphOfGroups) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if g.num_vertices() == 0 {
        out.push(Diagnostic::Empty);
        return out;
    }
    for e in 0..g.num_edges() {
        if g.label[e] == 0 {
            out.push(Diagnostic::ZeroLabel { edge: g.edge_names[e].clone() });
        }
    }
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    let mut stack = vec![g.base];
    seen[g.base] = true;
    while let Some(v) = stack.pop() {
        for e in g.out_edges(v) {
            let w = g.terminus(e);
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    for (v, s) in seen.iter().enumerate() {
        if !s {
            out.push(Diagnostic::Disconnected { vertex: g.vertex_names[v].clone() });
        }
    }
    out
}

/// Certifies the explicit solvable shapes: after contracting every non-loop
/// edge carrying a label ±1, the graph is a single vertex (ℤ), a single loop
/// with a ±1 label (BS(1,n)), or one edge with labels ±2, ±2.
pub fn solvable_shape(g: &GraphOfGroups) -> Option<SolvableShape> {
    // (o, t, λ at o, λ at t) per unoriented edge
    let mut edges: Vec<(usize, usize, i64, i64)> = (0..g.num_orbits())
        .map(|k| {
            let e = 2 * k;
            (g.origin(e), g.terminus(e), g.label(e), g.label(rev(e)))
        })
        .collect();
    let mut alive = vec![true; g.num_vertices()];
    loop {
        let pick = edges.iter().position(|&(o, t, lo, lt)| o != t && (lo.abs() == 1 || lt.abs() == 1));
        let Some(i) = pick else { break };
        let (o, t, lo, lt) = edges.remove(i);
        // keep `keep`, absorb `gone`, whose group is the edge group
        let (keep, gone, lk, eps) = if lt.abs() == 1 { (o, t, lo, lt) } else { (t, o, lt, lo) };
        let kappa = eps * lk;
        alive[gone] = false;
        for ed in edges.iter_mut() {
            if ed.0 == gone {
                ed.0 = keep;
                ed.2 *= kappa;
            }
            if ed.1 == gone {
                ed.1 = keep;
                ed.3 *= kappa;
            }
        }
    }
    let nv = alive.iter().filter(|a| **a).count();
    match (nv, edges.as_slice()) {
        (1, []) => Some(SolvableShape::Cyclic),
        (1, [(_, _, p, q)]) if p.abs() == 1 || q.abs() == 1 => {
            let n = if p.abs() == 1 { q * p.signum() } else { p * q.signum() };
            Some(SolvableShape::BaumslagSolitarOneN { n })
        }
        (2, [(_, _, p, q)]) if p.abs() == 2 && q.abs() == 2 => Some(SolvableShape::KleinBottleAmalgam),
        _ => None,
    }
}

/// Checks a graph description and builds the graph, or lists every violated
/// invariant.
pub fn validate_graph(spec: &GraphSpec) -> Result<GraphOfGroups, Diagnostics> {
    let mut diags = Vec::new();
    if spec.schema_version != SCHEMA_VERSION {
        diags.push(Diagnostic::SchemaVersion { found: spec.schema_version });
    }
    if spec.vertices.is_empty() {
        diags.push(Diagnostic::Empty);
        return Err(Diagnostics(diags));
    }
    let mut vidx: HashMap<&str, Vertex> = HashMap::new();
    for (i, v) in spec.vertices.iter().enumerate() {
        if vidx.insert(v.as_str(), i).is_some() {
            diags.push(Diagnostic::DuplicateVertex { name: v.clone() });
        }
    }
    let mut eidx: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, e) in spec.edges.iter().enumerate() {
        if eidx.insert(e.id.as_str(), i).is_some() {
            diags.push(Diagnostic::DuplicateEdge { name: e.id.clone() });
        }
    }
    for e in &spec.edges {
        for v in [&e.origin, &e.terminus] {
            if !vidx.contains_key(v.as_str()) {
                diags.push(Diagnostic::UnknownVertex { edge: e.id.clone(), vertex: v.clone() });
            }
        }
        if e.label == 0 {
            diags.push(Diagnostic::ZeroLabel { edge: e.id.clone() });
        }
        match eidx.get(e.reverse.as_str()) {
            None => diags.push(Diagnostic::UnknownReverse { edge: e.id.clone(), reverse: e.reverse.clone() }),
            Some(&r) => {
                let re = &spec.edges[r];
                if re.id == e.id {
                    diags.push(Diagnostic::SelfReverse { edge: e.id.clone() });
                } else if re.reverse != e.id {
                    diags.push(Diagnostic::NotInvolution { edge: e.id.clone() });
                } else if re.origin != e.terminus || re.terminus != e.origin {
                    diags.push(Diagnostic::EndpointMismatch { edge: e.id.clone() });
                }
            }
        }
    }
    let base = match &spec.basepoint {
        None => 0,
        Some(b) => match vidx.get(b.as_str()) {
            Some(&v) => v,
            None => {
                diags.push(Diagnostic::UnknownBasepoint { name: b.clone() });
                0
            }
        },
    };
    if !diags.is_empty() {
        return Err(Diagnostics(diags));
    }
    let mut b = GraphBuilder::new();
    for v in &spec.vertices {
        b.vertex(v.clone());
    }
    let mut placed = vec![false; spec.edges.len()];
    for (i, e) in spec.edges.iter().enumerate() {
        if placed[i] {
            continue;
        }
        let r = eidx[e.reverse.as_str()];
        placed[i] = true;
        placed[r] = true;
        let re = &spec.edges[r];
        b.edge(e.id.clone(), re.id.clone(), vidx[e.origin.as_str()], vidx[e.terminus.as_str()], e.label, re.label);
    }
    b.build(base)
}
