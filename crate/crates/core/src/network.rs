//! Linear network coding over a DAG: local kernels, global encoding
//! vectors, symbol-wise packet propagation, subspace decoding at sinks and
//! packet injection.
//!
//! The source has `n` imaginary input edges carrying the unit vectors, so
//! its local kernel is `n x |Out(source)|`. Every other node's kernel is
//! `|In| x |Out|`, rows and columns following the order of the edge list.

use std::collections::HashMap;
use std::fmt::Write as _;

use petgraph::algo::toposort;
use petgraph::graph::DiGraph;
use rand::Rng;
use thiserror::Error;

use crate::field::{ExtField, FieldElement};
use crate::linalg::{dot, Matrix};
use crate::scheme::{self, PublicParams, TaggedPacket, VerifierKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("topology contains a cycle through node {0}")]
    CyclicGraph(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("topology needs exactly one source, found {0}")]
    SourceCount(usize),
    #[error("source node has incoming edges")]
    SourceHasInputs,
    #[error("edge {0} carries a packet inconsistent with its global vector")]
    Inconsistent(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Source,
    Internal,
    Verifier,
    Sink,
}

impl Role {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "source" => Role::Source,
            "internal" => Role::Internal,
            "verifier" => Role::Verifier,
            "sink" => Role::Sink,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Source => "source",
            Role::Internal => "internal",
            Role::Verifier => "verifier",
            Role::Sink => "sink",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub role: Role,
    /// 1-based verifier index for verifier nodes.
    pub verifier: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<Node>,
    edges: Vec<(usize, usize)>,
    /// Row-major kernel entries as given; `None` means draw at random.
    kernels: Vec<Option<Vec<u32>>>,
}

impl Topology {
    /// Parses `node <name> <role> [index]`, `edge <from> <to>` and
    /// `kernel <node> <entries..>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut topo = Topology {
            nodes: Vec::new(),
            edges: Vec::new(),
            kernels: Vec::new(),
        };
        let mut by_name: HashMap<String, usize> = HashMap::new();
        let mut pending_kernels = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| NetworkError::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = content.split_whitespace().collect();
            match words.as_slice() {
                [] => {}
                ["node", name, role, rest @ ..] => {
                    let role = Role::parse(role).ok_or_else(|| err(format!("unknown role {role:?}")))?;
                    if by_name.contains_key(*name) {
                        return Err(err(format!("node {name:?} declared twice")));
                    }
                    let verifier = match (role, rest) {
                        (Role::Verifier, []) => Some(topo.verifier_count() + 1),
                        (Role::Verifier, [idx]) => Some(
                            idx.parse()
                                .ok()
                                .filter(|&v: &usize| v >= 1)
                                .ok_or_else(|| err(format!("bad verifier index {idx:?}")))?,
                        ),
                        (_, []) => None,
                        _ => return Err(err("trailing words after node declaration".into())),
                    };
                    if let Some(v) = verifier.filter(|_| topo.nodes.iter().any(|n| n.verifier == verifier)) {
                        return Err(err(format!("verifier index {v} used twice")));
                    }
                    by_name.insert(name.to_string(), topo.nodes.len());
                    topo.nodes.push(Node {
                        name: name.to_string(),
                        role,
                        verifier,
                    });
                    topo.kernels.push(None);
                }
                ["edge", from, to] => {
                    let look = |n: &str| by_name.get(n).copied().ok_or_else(|| NetworkError::UnknownNode(n.to_string()));
                    topo.edges.push((look(from)?, look(to)?));
                }
                ["kernel", name, entries @ ..] => {
                    let values = entries
                        .iter()
                        .map(|w| w.parse::<u32>().map_err(|e| err(format!("kernel entry {w:?}: {e}"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    pending_kernels.push((name.to_string(), values));
                }
                _ => return Err(err(format!("cannot parse {:?}", content.trim()))),
            }
        }
        for (name, values) in pending_kernels {
            let idx = topo.node_index(&name)?;
            topo.kernels[idx] = Some(values);
        }
        topo.validate()?;
        Ok(topo)
    }

    fn verifier_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.role == Role::Verifier).count()
    }

    fn validate(&self) -> Result<(), NetworkError> {
        let sources = self.nodes.iter().filter(|n| n.role == Role::Source).count();
        if sources != 1 {
            return Err(NetworkError::SourceCount(sources));
        }
        if !self.in_edges(self.source()).is_empty() {
            return Err(NetworkError::SourceHasInputs);
        }
        self.order().map(|_| ())
    }

    /// Writes the topology back in the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            match node.verifier {
                Some(v) => writeln!(out, "node {} {} {v}", node.name, node.role.name()),
                None => writeln!(out, "node {} {}", node.name, node.role.name()),
            }
            .unwrap();
        }
        for &(a, b) in &self.edges {
            writeln!(out, "edge {} {}", self.nodes[a].name, self.nodes[b].name).unwrap();
        }
        for (node, k) in self.nodes.iter().zip(&self.kernels) {
            if let Some(k) = k {
                let entries: Vec<String> = k.iter().map(u32::to_string).collect();
                writeln!(out, "kernel {} {}", node.name, entries.join(" ")).unwrap();
            }
        }
        out
    }

    /// The butterfly: source `s`, verifiers `a b c d` (indices 1-4), sinks
    /// `t1 t2`, with the textbook kernels (the bottleneck `c` adds).
    pub fn butterfly() -> Self {
        Self::parse(
            "node s source
node a verifier 1
node b verifier 2
node c verifier 3
node d verifier 4
node t1 sink
node t2 sink
edge s a
edge s b
edge a c
edge a t1
edge b c
edge b t2
edge c d
edge d t1
edge d t2
kernel s 1 0 0 1
kernel a 1 1
kernel b 1 1
kernel c 1 1
kernel d 1 1
",
        )
        .expect("butterfly parses")
    }

    /// Eight nodes: a source, verifiers `v1..v6` and a sink `t`, each
    /// non-source node fed by two edges from uniformly chosen earlier nodes.
    /// Kernels are left to be drawn at instantiation.
    pub fn random_dag<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut text = String::from("node s source\n");
        for v in 1..=6 {
            writeln!(text, "node v{v} verifier {v}").unwrap();
        }
        text.push_str("node t sink\n");
        let names: Vec<String> = std::iter::once("s".to_string())
            .chain((1..=6).map(|v| format!("v{v}")))
            .chain(["t".to_string()])
            .collect();
        for (i, name) in names.iter().enumerate().skip(1) {
            for _ in 0..2 {
                let pred = rng.random_range(0..i);
                writeln!(text, "edge {} {name}", names[pred]).unwrap();
            }
        }
        Self::parse(&text).expect("generated topology parses")
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_index(&self, name: &str) -> Result<usize, NetworkError> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| NetworkError::UnknownNode(name.to_string()))
    }

    pub fn source(&self) -> usize {
        self.nodes.iter().position(|n| n.role == Role::Source).expect("validated")
    }

    pub fn in_edges(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].1 == node).collect()
    }

    pub fn out_edges(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].0 == node).collect()
    }

    /// Nodes in an upstream-to-downstream order.
    pub fn order(&self) -> Result<Vec<usize>, NetworkError> {
        let mut g = DiGraph::<usize, ()>::new();
        let idx: Vec<_> = (0..self.nodes.len()).map(|i| g.add_node(i)).collect();
        for &(a, b) in &self.edges {
            g.add_edge(idx[a], idx[b], ());
        }
        toposort(&g, None)
            .map(|order| order.into_iter().map(|n| g[n]).collect())
            .map_err(|cycle| NetworkError::CyclicGraph(self.nodes[g[cycle.node_id()]].name.clone()))
    }

    /// Fixes every local kernel over F_q (given as `symbols`, the degree-one
    /// field) for a source of dimension `n`. Missing kernels are uniform,
    /// except the source's default of unit vectors on its first `n` edges.
    pub fn instantiate<R: Rng + ?Sized>(&self, symbols: &ExtField, n: usize, rng: &mut R) -> Result<CodedNetwork, NetworkError> {
        let order = self.order()?;
        let src = self.source();
        let mut kernels = vec![Matrix::zeros(symbols, 0, 0); self.nodes.len()];
        for &i in &order {
            let rows = if i == src { n } else { self.in_edges(i).len() };
            let cols = self.out_edges(i).len();
            kernels[i] = match &self.kernels[i] {
                Some(values) => {
                    if values.len() != rows * cols {
                        return Err(NetworkError::DimensionMismatch(format!(
                            "kernel of {} has {} entries, expected {rows}x{cols}",
                            self.nodes[i].name,
                            values.len()
                        )));
                    }
                    let wide: Vec<u64> = values.iter().map(|&v| v as u64).collect();
                    Matrix::from_values(symbols, rows, cols, &wide)
                        .map_err(|e| NetworkError::DimensionMismatch(format!("kernel of {}: {e}", self.nodes[i].name)))?
                }
                None if i == src => {
                    if cols < n {
                        return Err(NetworkError::DimensionMismatch(format!(
                            "source has {cols} outgoing edges, needs at least {n}"
                        )));
                    }
                    let mut k = Matrix::random(symbols, rows, cols, rng);
                    for r in 0..n {
                        for c in 0..n {
                            k.set(r, c, if r == c { symbols.one() } else { symbols.zero() });
                        }
                    }
                    k
                }
                None => Matrix::random(symbols, rows, cols, rng),
            };
        }
        Ok(CodedNetwork {
            topology: self.clone(),
            symbols: symbols.clone(),
            n,
            order,
            kernels,
        })
    }
}

/// A topology with all local kernels fixed.
#[derive(Debug, Clone)]
pub struct CodedNetwork {
    topology: Topology,
    symbols: ExtField,
    n: usize,
    order: Vec<usize>,
    kernels: Vec<Matrix>,
}

/// Global encoding vectors, one row vector in F_q^n per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalKernels {
    pub edge_vectors: Vec<Vec<FieldElement>>,
}

/// The packet (as F_q symbols) carried by each edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub edges: Vec<Vec<u32>>,
}

impl CodedNetwork {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn kernel(&self, node: usize) -> &Matrix {
        &self.kernels[node]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// F_t: the stacked global vectors of the node's incoming edges.
    pub fn node_kernel(&self, gk: &GlobalKernels, node: usize) -> Matrix {
        let rows = self.topology.in_edges(node).iter().map(|&e| gk.edge_vectors[e].clone()).collect();
        Matrix::from_rows(&self.symbols, self.n, rows).expect("vectors have length n")
    }

    pub fn received<'a>(&self, tx: &'a Transmission, node: usize) -> Vec<&'a [u32]> {
        self.topology.in_edges(node).iter().map(|&e| tx.edges[e].as_slice()).collect()
    }

    /// For each out-edge of `node`, `sum_d k_{d,e} * inputs[d]`.
    fn mix(&self, node: usize, inputs: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
        let f = &self.symbols;
        let k = &self.kernels[node];
        let width = inputs.first().map_or(0, Vec::len);
        (0..k.cols())
            .map(|c| {
                let mut acc = vec![f.zero(); width];
                for (r, input) in inputs.iter().enumerate() {
                    let coef = k.get(r, c);
                    if coef.is_zero() {
                        continue;
                    }
                    for (a, &x) in acc.iter_mut().zip(input) {
                        *a = f.add(*a, f.mul(coef, x));
                    }
                }
                acc
            })
            .collect()
    }

    fn propagate(
        &self,
        source_inputs: Vec<Vec<FieldElement>>,
        width: usize,
        mut on_node: impl FnMut(usize, Vec<Vec<FieldElement>>) -> Vec<Vec<FieldElement>>,
    ) -> Vec<Vec<FieldElement>> {
        let topo = &self.topology;
        let src = topo.source();
        let mut carried = vec![vec![self.symbols.zero(); width]; topo.edges.len()];
        for &node in &self.order {
            let inputs = if node == src {
                source_inputs.clone()
            } else {
                topo.in_edges(node).iter().map(|&e| carried[e].clone()).collect()
            };
            let outputs = on_node(node, self.mix(node, &inputs));
            for (e, out) in topo.out_edges(node).into_iter().zip(outputs) {
                carried[e] = out;
            }
        }
        carried
    }

    pub fn compute_global_kernels(&self) -> GlobalKernels {
        let f = &self.symbols;
        let units = (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
            .collect();
        GlobalKernels {
            edge_vectors: self.propagate(units, self.n, |_, out| out),
        }
    }

    fn to_elems(&self, symbols: &[u32]) -> Vec<FieldElement> {
        symbols.iter().map(|&s| self.symbols.embed(s)).collect()
    }

    fn check_sources(&self, sources: &[Vec<u32>]) -> Result<usize, NetworkError> {
        if sources.len() != self.n {
            return Err(NetworkError::DimensionMismatch(format!(
                "{} source packets for dimension {}",
                sources.len(),
                self.n
            )));
        }
        let width = sources.first().map_or(0, Vec::len);
        if sources.iter().any(|s| s.len() != width) {
            return Err(NetworkError::DimensionMismatch("source packets differ in length".into()));
        }
        Ok(width)
    }

    /// Sends the `n` source packets through the network, then checks every
    /// edge packet against its global vector applied to the source stack.
    pub fn transmit(&self, gk: &GlobalKernels, sources: &[Vec<u32>]) -> Result<Transmission, NetworkError> {
        let width = self.check_sources(sources)?;
        let stack: Vec<_> = sources.iter().map(|s| self.to_elems(s)).collect();
        let carried = self.propagate(stack.clone(), width, |_, out| out);
        let x = Matrix::from_rows(&self.symbols, width, stack).expect("equal widths");
        for (e, packet) in carried.iter().enumerate() {
            let f_e = Matrix::from_rows(&self.symbols, self.n, vec![gk.edge_vectors[e].clone()]).expect("length n");
            if f_e.mul(&x).expect("n columns").row(0) != packet.as_slice() {
                return Err(NetworkError::Inconsistent(e));
            }
        }
        Ok(self.to_transmission(carried))
    }

    /// Like [`Self::transmit`], but every outgoing edge of `at` carries
    /// `fake` instead of the node's honest output.
    pub fn inject(&self, sources: &[Vec<u32>], at: &str, fake: &[u32]) -> Result<Transmission, NetworkError> {
        let node = self.topology.node_index(at)?;
        let width = self.check_sources(sources)?;
        if fake.len() != width {
            return Err(NetworkError::DimensionMismatch(format!(
                "injected packet has {} symbols, expected {width}",
                fake.len()
            )));
        }
        let stack = sources.iter().map(|s| self.to_elems(s)).collect();
        let fake = self.to_elems(fake);
        let carried = self.propagate(stack, width, |i, out| {
            if i == node {
                vec![fake.clone(); out.len()]
            } else {
                out
            }
        });
        Ok(self.to_transmission(carried))
    }

    fn to_transmission(&self, carried: Vec<Vec<FieldElement>>) -> Transmission {
        Transmission {
            edges: carried
                .into_iter()
                .map(|p| p.into_iter().map(|e| self.symbols.as_base(e).expect("degree one")).collect())
                .collect(),
        }
    }
}

/// A subspace of F_q^l by its reduced row-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Row space of the received payload vectors over F_q (`symbols` is the
/// degree-one field); `len` is the ambient dimension l.
pub fn decode_subspace(symbols: &ExtField, len: usize, payloads: &[Vec<u32>]) -> Subspace {
    let rows = payloads.iter().map(|p| p.iter().map(|&s| symbols.embed(s)).collect()).collect();
    let m = Matrix::from_rows(symbols, len, rows).expect("payloads have length l");
    let rref = m.rref();
    Subspace {
        basis: (0..rref.rank)
            .map(|r| rref.reduced.row(r).iter().map(|&e| symbols.as_base(e).expect("degree one")).collect())
            .collect(),
    }
}

/// Verification at a node that knows its incoming global vectors `h`
/// (one row per received packet) and the honest source packets: by
/// F_q-linearity of the label, a row is accepted iff
/// `sum_j h_j label(1, s_j) = sum_j h_j <tag_j, g_i>`.
pub fn verify_via_kernel(
    pp: &PublicParams,
    vk: &VerifierKey,
    g_i: &[FieldElement],
    h: &[FieldElement],
    sources: &[TaggedPacket],
) -> bool {
    let f = pp.ext();
    let mut lhs = f.zero();
    let mut rhs = f.zero();
    for (&coef, p) in h.iter().zip(sources) {
        let c = pp.symbols().as_base(coef).expect("F_q coefficient");
        let Ok(lab) = scheme::label(pp, vk, p.tracker, &p.payload) else {
            return false;
        };
        lhs = f.add(lhs, f.scale(c, lab));
        rhs = f.add(rhs, f.scale(c, dot(f, &p.tag, g_i)));
    }
    lhs == rhs
}

#[cfg(test)]
mod tests;
