//! Decorated dual graphs of nodal curves with an involution.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub id: String,
    /// Genus of the normalization of the component.
    pub genus: u32,
    #[serde(default)]
    pub smooth_fixed_points: u32,
    /// The involution is assumed not to act as the identity on any component.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub involution_nontrivial: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopType {
    Branchwise,
    Swapping,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_loop_type: Option<LoopType>,
}

/// Involution on components and nodes. Ids missing from a map are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionSpec {
    #[serde(default)]
    pub vertices: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

/// The input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub involution: InvolutionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeClass {
    BranchwiseFixed,
    Swapping,
    NonFixed,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("involution is not of order 2 at {0}")]
    InvolutionNotOrder2(String),
    #[error("node {node}: endpoints of its image do not match the image of its endpoints")]
    EndpointMismatch { node: String },
    #[error("node {0} is a fixed loop and needs fixed_loop_type")]
    MissingLoopTypeFlag(String),
    #[error("node {0} is not a fixed loop but carries fixed_loop_type")]
    SpuriousLoopTypeFlag(String),
    #[error("component {component}: {count} fixed points on the normalization, expected an even number")]
    ParityViolation { component: String, count: u32 },
    #[error("dual graph is disconnected (component {0} unreachable)")]
    Disconnected(String),
    #[error("component {0} is moved by the involution but declares smooth fixed points")]
    MovedComponentHasFixedPoints(String),
    #[error("components {0} and {1} are exchanged but have different genus")]
    GenusMismatch(String, String),
    #[error("component {component}: quotient genus is not a nonnegative integer")]
    NonIntegralQuotientGenus { component: String },
}

/// Data derived by [`CurveWithInvolution::validate_and_classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub node_class: Vec<NodeClass>,
    /// Oriented endpoints `(tail, head)` per edge, as component indices.
    pub orientation: Vec<(usize, usize)>,
    /// `iota_1(e_j) = edge_sign[j] * e_{edge_map[j]}`.
    pub edge_sign: Vec<i8>,
    /// Quotient genus per fixed component; `None` for moved ones.
    pub quotient_genus: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveWithInvolution {
    pub spec: CurveSpec,
    pub derived: Option<Classification>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientVertex {
    pub members: Vec<String>,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientEdge {
    pub nodes: Vec<String>,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub vertices: Vec<QuotientVertex>,
    pub edges: Vec<QuotientEdge>,
}

pub fn parse_curve(text: &str) -> Result<CurveWithInvolution, CurveError> {
    let spec: CurveSpec = serde_json::from_str(text).map_err(|e| CurveError::Parse {
        path: format!("line {} column {}", e.line(), e.column()),
        msg: e.to_string(),
    })?;
    CurveWithInvolution::from_spec(spec)
}

fn parse_err(path: String, msg: impl Into<String>) -> CurveError {
    CurveError::Parse { path, msg: msg.into() }
}

impl CurveWithInvolution {
    /// Checks ids and references; derived data is left empty.
    pub fn from_spec(spec: CurveSpec) -> Result<Self, CurveError> {
        let mut seen = HashMap::new();
        for (i, c) in spec.components.iter().enumerate() {
            if seen.insert(c.id.as_str(), i).is_some() {
                return Err(parse_err(format!("components[{i}].id"), format!("duplicate id {}", c.id)));
            }
        }
        if spec.components.is_empty() {
            return Err(parse_err("components".into(), "at least one component is required"));
        }
        let mut seen_nodes = HashMap::new();
        for (i, n) in spec.nodes.iter().enumerate() {
            if seen_nodes.insert(n.id.as_str(), i).is_some() {
                return Err(parse_err(format!("nodes[{i}].id"), format!("duplicate id {}", n.id)));
            }
            for (field, v) in [("tail", &n.tail), ("head", &n.head)] {
                if !seen.contains_key(v.as_str()) {
                    return Err(parse_err(format!("nodes[{i}].{field}"), format!("unknown component {v}")));
                }
            }
        }
        for (k, v) in &spec.involution.vertices {
            for x in [k, v] {
                if !seen.contains_key(x.as_str()) {
                    return Err(parse_err(format!("involution.vertices.{k}"), format!("unknown component {x}")));
                }
            }
        }
        for (k, v) in &spec.involution.edges {
            for x in [k, v] {
                if !seen_nodes.contains_key(x.as_str()) {
                    return Err(parse_err(format!("involution.edges.{k}"), format!("unknown node {x}")));
                }
            }
        }
        Ok(CurveWithInvolution { spec, derived: None })
    }

    pub fn num_components(&self) -> usize {
        self.spec.components.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.spec.nodes.len()
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.spec.components.iter().position(|c| c.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.spec.nodes.iter().position(|n| n.id == id)
    }

    /// Panics on an unvalidated curve; every analysis downstream requires one.
    pub fn classification(&self) -> &Classification {
        self.derived
            .as_ref()
            .expect("curve must be validated with validate_and_classify first")
    }

    pub fn validate_and_classify(mut self) -> Result<Self, CurveError> {
        let nv = self.num_components();
        let ne = self.num_nodes();
        let vidx: HashMap<&str, usize> =
            self.spec.components.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        let eidx: HashMap<&str, usize> =
            self.spec.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();

        let mut vmap: Vec<usize> = (0..nv).collect();
        for (k, v) in &self.spec.involution.vertices {
            vmap[vidx[k.as_str()]] = vidx[v.as_str()];
        }
        let mut emap: Vec<usize> = (0..ne).collect();
        for (k, v) in &self.spec.involution.edges {
            emap[eidx[k.as_str()]] = eidx[v.as_str()];
        }
        for i in 0..nv {
            if vmap[vmap[i]] != i {
                return Err(CurveError::InvolutionNotOrder2(self.spec.components[i].id.clone()));
            }
        }
        for j in 0..ne {
            if emap[emap[j]] != j {
                return Err(CurveError::InvolutionNotOrder2(self.spec.nodes[j].id.clone()));
            }
        }

        let comps = &self.spec.components;
        for i in 0..nv {
            let k = vmap[i];
            if k != i {
                if comps[i].smooth_fixed_points > 0 {
                    return Err(CurveError::MovedComponentHasFixedPoints(comps[i].id.clone()));
                }
                if comps[i].genus != comps[k].genus {
                    return Err(CurveError::GenusMismatch(comps[i].id.clone(), comps[k].id.clone()));
                }
            }
        }

        let ends: Vec<(usize, usize)> = self
            .spec
            .nodes
            .iter()
            .map(|n| (vidx[n.tail.as_str()], vidx[n.head.as_str()]))
            .collect();

        let mut class = vec![NodeClass::NonFixed; ne];
        let mut orient = ends.clone();
        let mut sign = vec![1i8; ne];
        for j in 0..ne {
            let node = &self.spec.nodes[j];
            let (t, h) = ends[j];
            let k = emap[j];
            if k == j {
                if t == h {
                    if vmap[t] != t {
                        return Err(CurveError::EndpointMismatch { node: node.id.clone() });
                    }
                    match node.fixed_loop_type {
                        None => return Err(CurveError::MissingLoopTypeFlag(node.id.clone())),
                        Some(LoopType::Branchwise) => class[j] = NodeClass::BranchwiseFixed,
                        Some(LoopType::Swapping) => {
                            class[j] = NodeClass::Swapping;
                            sign[j] = -1;
                        }
                    }
                } else {
                    if node.fixed_loop_type.is_some() {
                        return Err(CurveError::SpuriousLoopTypeFlag(node.id.clone()));
                    }
                    if vmap[t] == t && vmap[h] == h {
                        class[j] = NodeClass::BranchwiseFixed;
                    } else if vmap[t] == h {
                        class[j] = NodeClass::Swapping;
                        sign[j] = -1;
                    } else {
                        return Err(CurveError::EndpointMismatch { node: node.id.clone() });
                    }
                }
                continue;
            }
            if node.fixed_loop_type.is_some() {
                return Err(CurveError::SpuriousLoopTypeFlag(node.id.clone()));
            }
            let (kt, kh) = ends[k];
            let (it, ih) = (vmap[t], vmap[h]);
            let matches = (kt == it && kh == ih) || (kt == ih && kh == it);
            if !matches {
                return Err(CurveError::EndpointMismatch { node: node.id.clone() });
            }
            // the representative of an orbit is the smaller id; the partner is
            // oriented from the image of the tail to the image of the head
            if self.spec.nodes[k].id < node.id {
                orient[j] = (vmap[orient[k].0], vmap[orient[k].1]);
            }
        }

        // connectivity
        let mut adj = vec![Vec::new(); nv];
        for &(t, h) in &ends {
            adj[t].push(h);
            adj[h].push(t);
        }
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(CurveError::Disconnected(comps[i].id.clone()));
        }

        // Riemann-Hurwitz on each fixed component
        let mut branch_preimages = vec![0u32; nv];
        for j in 0..ne {
            if class[j] == NodeClass::BranchwiseFixed {
                let (t, h) = ends[j];
                branch_preimages[t] += 1;
                branch_preimages[h] += 1;
            }
        }
        let mut quotient_genus = vec![None; nv];
        for i in 0..nv {
            if vmap[i] != i {
                continue;
            }
            let c = &comps[i];
            if !c.involution_nontrivial {
                quotient_genus[i] = Some(c.genus);
                continue;
            }
            let f = c.smooth_fixed_points + branch_preimages[i];
            if f % 2 == 1 {
                return Err(CurveError::ParityViolation { component: c.id.clone(), count: f });
            }
            let num = 2 * c.genus as i64 - 2 - f as i64;
            if num.rem_euclid(4) != 0 || num / 4 + 1 < 0 {
                return Err(CurveError::NonIntegralQuotientGenus { component: c.id.clone() });
            }
            quotient_genus[i] = Some((num / 4 + 1) as u32);
        }

        self.derived = Some(Classification {
            vertex_map: vmap,
            edge_map: emap,
            node_class: class,
            orientation: orient,
            edge_sign: sign,
            quotient_genus,
        });
        Ok(self)
    }

    pub fn is_validated(&self) -> bool {
        self.derived.is_some()
    }

    pub fn count_class(&self, class: NodeClass) -> usize {
        self.classification().node_class.iter().filter(|c| **c == class).count()
    }

    pub fn total_smooth_fixed_points(&self) -> u32 {
        self.spec.components.iter().map(|c| c.smooth_fixed_points).sum()
    }

    /// `iota_1` applied to a chain in edge coordinates.
    pub fn iota1(&self, v: &[i128]) -> Vec<i128> {
        let cl = self.classification();
        let mut out = vec![0; v.len()];
        for (j, x) in v.iter().enumerate() {
            out[cl.edge_map[j]] += i128::from(cl.edge_sign[j]) * x;
        }
        out
    }

    pub fn quotient_graph(&self) -> QuotientGraph {
        let cl = self.classification();
        let nv = self.num_components();
        let mut vert_of = vec![usize::MAX; nv];
        let mut vertices = Vec::new();
        for i in 0..nv {
            let k = cl.vertex_map[i];
            if vert_of[i] != usize::MAX {
                continue;
            }
            vert_of[i] = vertices.len();
            vert_of[k] = vertices.len();
            let mut members = vec![self.spec.components[i].id.clone()];
            if k != i {
                members.push(self.spec.components[k].id.clone());
            }
            let genus = cl.quotient_genus[i].unwrap_or(self.spec.components[i].genus);
            vertices.push(QuotientVertex { members, genus });
        }
        let mut edges = Vec::new();
        for j in 0..self.num_nodes() {
            let k = cl.edge_map[j];
            let (t, h) = cl.orientation[j];
            match cl.node_class[j] {
                NodeClass::Swapping => {}
                NodeClass::BranchwiseFixed => edges.push(QuotientEdge {
                    nodes: vec![self.spec.nodes[j].id.clone()],
                    tail: vert_of[t],
                    head: vert_of[h],
                }),
                NodeClass::NonFixed => {
                    if self.spec.nodes[j].id < self.spec.nodes[k].id {
                        edges.push(QuotientEdge {
                            nodes: vec![self.spec.nodes[j].id.clone(), self.spec.nodes[k].id.clone()],
                            tail: vert_of[t],
                            head: vert_of[h],
                        });
                    }
                }
            }
        }
        QuotientGraph { vertices, edges }
    }
}
