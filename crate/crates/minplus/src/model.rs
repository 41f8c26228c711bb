//! Circuits, formulas and algebraic branching programs.
//!
//! The three model kinds share an evaluation and a symbolic-expansion
//! interface. A circuit is a DAG of fan-in-2 `⊕`/`⊗` gates over leaves;
//! a formula additionally requires fan-out ≤ 1 (a tree); an ABP is a
//! layered DAG whose edges carry labels, computing the minimum over
//! source-to-sink paths of the sum of labels.

use std::collections::BTreeSet;
use std::fmt;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::poly::TropPoly;
use crate::semiring::{SemiringMode, TropValue};

/// Gate operation: `Min` is semiring addition `⊕`, `Plus` is semiring
/// multiplication `⊗`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOp {
    Min,
    Plus,
}

impl GateOp {
    pub fn apply(&self, a: &TropValue, b: &TropValue) -> TropValue {
        match self {
            GateOp::Min => a.trop_add(b),
            GateOp::Plus => a.trop_mul(b),
        }
    }

    /// The identity element: `∞` for `⊕`, `0` for `⊗`.
    pub fn identity(&self) -> TropValue {
        match self {
            GateOp::Min => TropValue::Infinity,
            GateOp::Plus => TropValue::zero(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GateOp::Min => "min",
            GateOp::Plus => "plus",
        }
    }
}

/// A leaf: input variable or semiring constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafLabel {
    Var(usize),
    Const(TropValue),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf(LeafLabel),
    Gate { op: GateOp, left: usize, right: usize },
}

/// A circuit: directed acyclic graph with fan-in-2 gates. Children always
/// precede their gate, so `nodes` is in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub mode: SemiringMode,
    pub arity: usize,
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl Circuit {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.nodes.is_empty() {
            violations.push("circuit has no nodes".into());
            return violations;
        }
        if self.root >= self.nodes.len() {
            violations.push(format!("root {} out of range", self.root));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf(LeafLabel::Var(i)) => {
                    if *i >= self.arity {
                        violations.push(format!("node {id}: variable {i} out of range"));
                    }
                }
                Node::Leaf(LeafLabel::Const(v)) => {
                    if self.mode.check(v).is_err() {
                        violations.push(format!("node {id}: negative constant in mode rplus"));
                    }
                }
                Node::Gate { left, right, .. } => {
                    if *left >= id || *right >= id {
                        violations
                            .push(format!("node {id}: child does not precede gate (acyclicity)"));
                    }
                }
            }
        }
        violations
    }

    fn checked(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(v.join("; ")))
        }
    }

    /// Gate-by-gate evaluation in topological order.
    pub fn eval(&self, point: &[TropValue]) -> Result<TropValue> {
        self.checked()?;
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        for v in point {
            self.mode.check(v)?;
        }
        let mut values: Vec<TropValue> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Leaf(LeafLabel::Var(i)) => point[*i].clone(),
                Node::Leaf(LeafLabel::Const(c)) => c.clone(),
                Node::Gate { op, left, right } => op.apply(&values[*left], &values[*right]),
            };
            values.push(v);
        }
        Ok(values[self.root].clone())
    }

    /// Evaluates over the polynomial semiring, canonicalizing after every
    /// gate. Fails when an intermediate polynomial exceeds the term budget.
    pub fn expand(&self, budget: &Budget) -> Result<TropPoly> {
        self.checked()?;
        let mut values: Vec<TropPoly> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let p = match node {
                Node::Leaf(LeafLabel::Var(i)) => TropPoly::var(self.mode, self.arity, *i)?,
                Node::Leaf(LeafLabel::Const(c)) => TropPoly::constant(self.mode, self.arity, c)?,
                Node::Gate { op, left, right } => match op {
                    GateOp::Min => values[*left].add(&values[*right])?,
                    GateOp::Plus => values[*left].mul(&values[*right])?,
                },
            };
            if p.term_count() > budget.max_terms {
                return Err(Error::BudgetExceeded(format!(
                    "expansion reached {} terms (cap {})",
                    p.term_count(),
                    budget.max_terms
                )));
            }
            values.push(p);
        }
        Ok(values[self.root].clone())
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        let mut depths = vec![0usize; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Gate { left, right, .. } = node {
                depths[id] = 1 + depths[*left].max(depths[*right]);
            }
        }
        depths.get(self.root).copied().unwrap_or(0)
    }

    /// Node ids reachable from `from`, including `from` itself.
    pub fn reachable(&self, from: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            if let Node::Gate { left, right, .. } = &self.nodes[id] {
                stack.push(*left);
                stack.push(*right);
            }
        }
        seen
    }

    /// Formal degree per node: 1 at leaves, max at `⊕`, sum at `⊗`.
    pub fn formal_degree(&self) -> u64 {
        let mut deg = vec![1u64; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Gate { op, left, right } = node {
                deg[id] = match op {
                    GateOp::Min => deg[*left].max(deg[*right]),
                    GateOp::Plus => deg[*left].saturating_add(deg[*right]),
                };
            }
        }
        deg[self.root]
    }
}

/// A builder that appends nodes in topological order.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    mode: SemiringMode,
    arity: usize,
    nodes: Vec<Node>,
}

impl CircuitBuilder {
    pub fn new(mode: SemiringMode, arity: usize) -> Self {
        CircuitBuilder {
            mode,
            arity,
            nodes: Vec::new(),
        }
    }

    pub fn var(&mut self, i: usize) -> usize {
        self.nodes.push(Node::Leaf(LeafLabel::Var(i)));
        self.nodes.len() - 1
    }

    pub fn constant(&mut self, v: TropValue) -> usize {
        self.nodes.push(Node::Leaf(LeafLabel::Const(v)));
        self.nodes.len() - 1
    }

    pub fn leaf(&mut self, label: LeafLabel) -> usize {
        self.nodes.push(Node::Leaf(label));
        self.nodes.len() - 1
    }

    pub fn gate(&mut self, op: GateOp, left: usize, right: usize) -> usize {
        assert!(left < self.nodes.len() && right < self.nodes.len());
        self.nodes.push(Node::Gate { op, left, right });
        self.nodes.len() - 1
    }

    /// Left-associated fold of `ids` under `op`; empty folds to the
    /// identity constant.
    pub fn fold(&mut self, op: GateOp, ids: &[usize]) -> usize {
        match ids.split_first() {
            None => self.constant(op.identity()),
            Some((&first, rest)) => {
                let mut acc = first;
                for &id in rest {
                    acc = self.gate(op, acc, id);
                }
                acc
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Copies another circuit's reachable nodes into this builder, mapping
    /// its leaves through `leaf_map`. Returns the id of the copied root.
    pub fn splice(
        &mut self,
        other: &Circuit,
        leaf_map: &mut dyn FnMut(&LeafLabel) -> LeafLabel,
    ) -> usize {
        let mut remap = vec![usize::MAX; other.nodes.len()];
        for id in other.reachable(other.root) {
            let new = match &other.nodes[id] {
                Node::Leaf(label) => Node::Leaf(leaf_map(label)),
                Node::Gate { op, left, right } => Node::Gate {
                    op: *op,
                    left: remap[*left],
                    right: remap[*right],
                },
            };
            self.nodes.push(new);
            remap[id] = self.nodes.len() - 1;
        }
        remap[other.root]
    }

    pub fn finish(self, root: usize) -> Circuit {
        Circuit {
            mode: self.mode,
            arity: self.arity,
            nodes: self.nodes,
            root,
        }
    }
}

/// A formula: a circuit in which every node has fan-out ≤ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    circuit: Circuit,
}

impl Formula {
    pub fn new(circuit: Circuit) -> Result<Self> {
        let f = Formula { circuit };
        let v = f.validate();
        if v.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidModel(v.join("; ")))
        }
    }

    pub fn leaf(mode: SemiringMode, arity: usize, label: LeafLabel) -> Formula {
        Formula {
            circuit: Circuit {
                mode,
                arity,
                nodes: vec![Node::Leaf(label)],
                root: 0,
            },
        }
    }

    pub fn var(mode: SemiringMode, arity: usize, i: usize) -> Formula {
        Formula::leaf(mode, arity, LeafLabel::Var(i))
    }

    pub fn constant(mode: SemiringMode, arity: usize, v: TropValue) -> Formula {
        Formula::leaf(mode, arity, LeafLabel::Const(v))
    }

    /// Joins two formulas under a fresh root gate.
    pub fn join(op: GateOp, left: &Formula, right: &Formula) -> Result<Formula> {
        let (lc, rc) = (&left.circuit, &right.circuit);
        if lc.mode != rc.mode {
            return Err(Error::ModeMismatch);
        }
        if lc.arity != rc.arity {
            return Err(Error::ArityMismatch {
                expected: lc.arity,
                got: rc.arity,
            });
        }
        let mut nodes = lc.nodes.clone();
        let offset = nodes.len();
        for node in &rc.nodes {
            nodes.push(match node {
                Node::Leaf(l) => Node::Leaf(l.clone()),
                Node::Gate { op, left, right } => Node::Gate {
                    op: *op,
                    left: left + offset,
                    right: right + offset,
                },
            });
        }
        nodes.push(Node::Gate {
            op,
            left: lc.root,
            right: rc.root + offset,
        });
        Ok(Formula {
            circuit: Circuit {
                mode: lc.mode,
                arity: lc.arity,
                nodes,
                root: offset + rc.nodes.len(),
            },
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn into_circuit(self) -> Circuit {
        self.circuit
    }

    pub fn mode(&self) -> SemiringMode {
        self.circuit.mode
    }

    pub fn arity(&self) -> usize {
        self.circuit.arity
    }

    pub fn size(&self) -> usize {
        self.circuit.nodes.len()
    }

    pub fn depth(&self) -> usize {
        self.circuit.depth()
    }

    pub fn root(&self) -> usize {
        self.circuit.root
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.circuit.nodes[id]
    }

    pub fn eval(&self, point: &[TropValue]) -> Result<TropValue> {
        self.circuit.eval(point)
    }

    pub fn expand(&self, budget: &Budget) -> Result<TropPoly> {
        self.circuit.expand(budget)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut violations = self.circuit.validate();
        let mut fanout = vec![0usize; self.circuit.nodes.len()];
        for node in &self.circuit.nodes {
            if let Node::Gate { left, right, .. } = node {
                if *left < fanout.len() {
                    fanout[*left] += 1;
                }
                if *right < fanout.len() {
                    fanout[*right] += 1;
                }
            }
        }
        for (id, f) in fanout.iter().enumerate() {
            if *f > 1 {
                violations.push(format!("node {id}: fan-out {f} > 1 in a formula"));
            }
        }
        violations
    }

    /// Replaces every occurrence of variable `i` by the constant `v`.
    pub fn substitute_var(&self, i: usize, v: &TropValue) -> Formula {
        let mut circuit = self.circuit.clone();
        for node in circuit.nodes.iter_mut() {
            if matches!(node, Node::Leaf(LeafLabel::Var(j)) if *j == i) {
                *node = Node::Leaf(LeafLabel::Const(v.clone()));
            }
        }
        Formula { circuit }
    }

    /// Substitutes the last variable by a constant and drops it from the
    /// arity.
    pub fn substitute_top_var(&self, v: &TropValue) -> Formula {
        let mut f = self.substitute_var(self.arity() - 1, v);
        f.circuit.arity -= 1;
        f
    }
}

/// Edge label of an ABP.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeLabel {
    Var(usize),
    Const(TropValue),
    /// A linear form (degree ≤ 1 polynomial); only in `General` ABPs.
    Lin(TropPoly),
}

impl EdgeLabel {
    pub fn eval(&self, point: &[TropValue]) -> Result<TropValue> {
        match self {
            EdgeLabel::Var(i) => Ok(point[*i].clone()),
            EdgeLabel::Const(c) => Ok(c.clone()),
            EdgeLabel::Lin(p) => p.eval(point),
        }
    }

    pub fn to_poly(&self, mode: SemiringMode, arity: usize) -> Result<TropPoly> {
        match self {
            EdgeLabel::Var(i) => TropPoly::var(mode, arity, *i),
            EdgeLabel::Const(c) => TropPoly::constant(mode, arity, c),
            EdgeLabel::Lin(p) => Ok(p.clone()),
        }
    }

    pub fn infinity() -> EdgeLabel {
        EdgeLabel::Const(TropValue::Infinity)
    }

    pub fn is_infinite(&self) -> bool {
        match self {
            EdgeLabel::Const(TropValue::Infinity) => true,
            EdgeLabel::Lin(p) => p.is_empty(),
            _ => false,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Var(i) => write!(f, "x{i}"),
            EdgeLabel::Const(c) => write!(f, "{c}"),
            EdgeLabel::Lin(p) => write!(f, "[{p}]"),
        }
    }
}

/// `Weakest` ABPs label edges with single variables or constants;
/// `General` ABPs allow linear forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbpKind {
    Weakest,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbpEdge {
    /// Index of the source layer; the edge ends in layer `layer + 1`.
    pub layer: usize,
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// A layered branching program. The source is node 0 of the first layer
/// and the sink is node 0 of the last layer. Parallel edges are allowed
/// (they mean the minimum of their labels) but have no matrix view.
#[derive(Debug, Clone, PartialEq)]
pub struct Abp {
    pub mode: SemiringMode,
    pub arity: usize,
    pub kind: AbpKind,
    /// Number of nodes in each layer.
    pub layers: Vec<usize>,
    pub edges: Vec<AbpEdge>,
}

impl Abp {
    pub fn new(mode: SemiringMode, arity: usize, kind: AbpKind, layers: Vec<usize>) -> Self {
        Abp {
            mode,
            arity,
            kind,
            layers,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, layer: usize, from: usize, to: usize, label: EdgeLabel) {
        self.edges.push(AbpEdge {
            layer,
            from,
            to,
            label,
        });
    }

    /// Maximum layer size.
    pub fn width(&self) -> usize {
        self.layers.iter().copied().max().unwrap_or(0)
    }

    /// Vertex count plus edge count.
    pub fn size(&self) -> usize {
        self.layers.iter().sum::<usize>() + self.edges.len()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.layers.is_empty() {
            violations.push("abp has no layers".into());
            return violations;
        }
        if self.layers[0] == 0 || *self.layers.last().unwrap() == 0 {
            violations.push("first/last layer must contain the source/sink".into());
        }
        for (i, edge) in self.edges.iter().enumerate() {
            if edge.layer + 1 >= self.layers.len() {
                violations.push(format!("edge {i}: layer {} out of range", edge.layer));
                continue;
            }
            if edge.from >= self.layers[edge.layer] || edge.to >= self.layers[edge.layer + 1] {
                violations.push(format!("edge {i}: endpoint out of range"));
            }
            match &edge.label {
                EdgeLabel::Var(v) => {
                    if *v >= self.arity {
                        violations.push(format!("edge {i}: variable {v} out of range"));
                    }
                }
                EdgeLabel::Const(c) => {
                    if self.mode.check(c).is_err() {
                        violations.push(format!("edge {i}: negative constant in mode rplus"));
                    }
                }
                EdgeLabel::Lin(p) => {
                    if self.kind != AbpKind::General {
                        violations.push(format!("edge {i}: linear form in a weakest abp"));
                    }
                    if p.arity() != self.arity {
                        violations.push(format!("edge {i}: linear form arity mismatch"));
                    }
                    if p.mode() != self.mode {
                        violations.push(format!("edge {i}: linear form mode mismatch"));
                    }
                    if p.degree() > 1 {
                        violations.push(format!("edge {i}: label degree {} > 1", p.degree()));
                    }
                }
            }
        }
        violations
    }

    fn checked(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(v.join("; ")))
        }
    }

    fn edges_by_layer(&self) -> Vec<Vec<&AbpEdge>> {
        let mut by_layer: Vec<Vec<&AbpEdge>> =
            vec![Vec::new(); self.layers.len().saturating_sub(1)];
        for edge in &self.edges {
            by_layer[edge.layer].push(edge);
        }
        by_layer
    }

    /// Min over source-to-sink paths by layer-by-layer relaxation.
    pub fn eval(&self, point: &[TropValue]) -> Result<TropValue> {
        self.checked()?;
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        for v in point {
            self.mode.check(v)?;
        }
        let by_layer = self.edges_by_layer();
        let mut dist = vec![TropValue::Infinity; self.layers[0]];
        dist[0] = TropValue::zero();
        for (l, layer_edges) in by_layer.iter().enumerate() {
            let mut new_dist = vec![TropValue::Infinity; self.layers[l + 1]];
            for edge in layer_edges {
                if dist[edge.from].is_infinite() {
                    continue;
                }
                let w = dist[edge.from].trop_mul(&edge.label.eval(point)?);
                new_dist[edge.to] = new_dist[edge.to].trop_add(&w);
            }
            dist = new_dist;
        }
        Ok(dist[0].clone())
    }

    /// Symbolic expansion by the same relaxation over polynomials.
    pub fn expand(&self, budget: &Budget) -> Result<TropPoly> {
        self.checked()?;
        let empty = TropPoly::empty(self.mode, self.arity);
        let by_layer = self.edges_by_layer();
        let mut dist = vec![empty.clone(); self.layers[0]];
        dist[0] = TropPoly::constant(self.mode, self.arity, &TropValue::zero())?;
        for (l, layer_edges) in by_layer.iter().enumerate() {
            let mut new_dist = vec![empty.clone(); self.layers[l + 1]];
            for edge in layer_edges {
                if dist[edge.from].is_empty() {
                    continue;
                }
                let label = edge.label.to_poly(self.mode, self.arity)?;
                let w = dist[edge.from].mul(&label)?;
                new_dist[edge.to] = new_dist[edge.to].add(&w)?;
                if new_dist[edge.to].term_count() > budget.max_terms {
                    return Err(Error::BudgetExceeded(format!(
                        "abp expansion reached {} terms (cap {})",
                        new_dist[edge.to].term_count(),
                        budget.max_terms
                    )));
                }
            }
            dist = new_dist;
        }
        Ok(dist[0].clone())
    }

    /// Brute-force evaluation by path enumeration; test oracle for `eval`.
    pub fn eval_by_paths(&self, point: &[TropValue]) -> Result<TropValue> {
        self.checked()?;
        let by_layer = self.edges_by_layer();
        fn walk(
            abp: &Abp,
            by_layer: &[Vec<&AbpEdge>],
            point: &[TropValue],
            layer: usize,
            node: usize,
            acc: &TropValue,
            best: &mut TropValue,
        ) -> Result<()> {
            if layer + 1 == abp.layers.len() {
                if node == 0 {
                    *best = best.trop_add(acc);
                }
                return Ok(());
            }
            for edge in &by_layer[layer] {
                if edge.from == node {
                    let w = acc.trop_mul(&edge.label.eval(point)?);
                    walk(abp, by_layer, point, layer + 1, edge.to, &w, best)?;
                }
            }
            Ok(())
        }
        let mut best = TropValue::Infinity;
        walk(self, &by_layer, point, 0, 0, &TropValue::zero(), &mut best)?;
        Ok(best)
    }

    /// The label matrices of a width-`k` view: entry `(i, j)` of matrix `ℓ`
    /// labels the edge from node `i` of layer `ℓ` to node `j` of layer
    /// `ℓ + 1`, `∞` when absent. Layers narrower than `k` are padded with
    /// isolated nodes.
    pub fn to_matrices(&self) -> Result<Vec<LabelMatrix>> {
        self.checked()?;
        let k = self.width();
        let mut mats: Vec<LabelMatrix> =
            vec![LabelMatrix::infinite(k); self.layers.len().saturating_sub(1)];
        for edge in &self.edges {
            let slot = &mut mats[edge.layer].entries[edge.from][edge.to];
            if !slot.is_infinite() {
                return Err(Error::InvalidInput(
                    "parallel edges have no matrix representation".into(),
                ));
            }
            *slot = edge.label.clone();
        }
        Ok(mats)
    }

    /// Rebuilds an ABP from square label matrices.
    pub fn from_matrices(mode: SemiringMode, arity: usize, mats: &[LabelMatrix]) -> Result<Abp> {
        let Some(first) = mats.first() else {
            return Ok(Abp::new(mode, arity, AbpKind::Weakest, vec![1]));
        };
        let k = first.dim();
        let mut kind = AbpKind::Weakest;
        for m in mats {
            if m.dim() != k {
                return Err(Error::InvalidInput("matrix dimension mismatch".into()));
            }
            if m.entries
                .iter()
                .flatten()
                .any(|l| matches!(l, EdgeLabel::Lin(_)))
            {
                kind = AbpKind::General;
            }
        }
        let mut abp = Abp::new(mode, arity, kind, vec![k; mats.len() + 1]);
        for (l, m) in mats.iter().enumerate() {
            for (i, row) in m.entries.iter().enumerate() {
                for (j, label) in row.iter().enumerate() {
                    if !label.is_infinite() {
                        abp.add_edge(l, i, j, label.clone());
                    }
                }
            }
        }
        Ok(abp)
    }

    /// Concatenation: the last layer of `a` is identified node-for-node with
    /// the first layer of `b`, so the matrix view of the result is the
    /// concatenation of both matrix sequences.
    pub fn concat(a: &Abp, b: &Abp) -> Result<Abp> {
        if a.mode != b.mode {
            return Err(Error::ModeMismatch);
        }
        if a.arity != b.arity {
            return Err(Error::ArityMismatch {
                expected: a.arity,
                got: b.arity,
            });
        }
        let interface = *a.layers.last().unwrap_or(&0);
        if interface != b.layers[0] {
            return Err(Error::InvalidInput(format!(
                "interface width mismatch: {} vs {}",
                interface, b.layers[0]
            )));
        }
        let kind = if a.kind == AbpKind::General || b.kind == AbpKind::General {
            AbpKind::General
        } else {
            AbpKind::Weakest
        };
        let mut layers = a.layers.clone();
        layers.extend_from_slice(&b.layers[1..]);
        let mut abp = Abp {
            mode: a.mode,
            arity: a.arity,
            kind,
            layers,
            edges: a.edges.clone(),
        };
        let offset = a.layers.len() - 1;
        for edge in &b.edges {
            abp.add_edge(edge.layer + offset, edge.from, edge.to, edge.label.clone());
        }
        Ok(abp)
    }
}

/// A square matrix of edge labels (`∞` marks an absent edge).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    pub entries: Vec<Vec<EdgeLabel>>,
}

impl LabelMatrix {
    pub fn infinite(k: usize) -> Self {
        LabelMatrix {
            entries: vec![vec![EdgeLabel::infinity(); k]; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, i: usize, j: usize, label: EdgeLabel) {
        self.entries[i][j] = label;
    }

    pub fn non_infinite_count(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|l| !l.is_infinite())
            .count()
    }

    pub fn transpose(&self) -> LabelMatrix {
        let k = self.dim();
        let mut out = LabelMatrix::infinite(k);
        for i in 0..k {
            for j in 0..k {
                out.entries[j][i] = self.entries[i][j].clone();
            }
        }
        out
    }
}

/// Any of the three model kinds, behind one evaluation interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Circuit(Circuit),
    Formula(Formula),
    Abp(Abp),
}

impl Model {
    pub fn mode(&self) -> SemiringMode {
        match self {
            Model::Circuit(c) => c.mode,
            Model::Formula(f) => f.mode(),
            Model::Abp(a) => a.mode,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Model::Circuit(c) => c.arity,
            Model::Formula(f) => f.arity(),
            Model::Abp(a) => a.arity,
        }
    }

    pub fn eval(&self, point: &[TropValue]) -> Result<TropValue> {
        match self {
            Model::Circuit(c) => c.eval(point),
            Model::Formula(f) => f.eval(point),
            Model::Abp(a) => a.eval(point),
        }
    }

    pub fn expand(&self, budget: &Budget) -> Result<TropPoly> {
        match self {
            Model::Circuit(c) => c.expand(budget),
            Model::Formula(f) => f.expand(budget),
            Model::Abp(a) => a.expand(budget),
        }
    }

    pub fn validate(&self) -> Vec<String> {
        match self {
            Model::Circuit(c) => c.validate(),
            Model::Formula(f) => f.validate(),
            Model::Abp(a) => a.validate(),
        }
    }

    pub fn stats(&self) -> ModelStats {
        match self {
            Model::Circuit(c) => ModelStats {
                size: c.size(),
                depth: c.depth(),
                width: 0,
                layers: 0,
                alternation: None,
            },
            Model::Formula(f) => ModelStats {
                size: f.size(),
                depth: f.depth(),
                width: 0,
                layers: 0,
                alternation: alternation_profile(f),
            },
            Model::Abp(a) => ModelStats {
                size: a.size(),
                depth: a.layers.len().saturating_sub(1),
                width: a.width(),
                layers: a.layers.len(),
                alternation: None,
            },
        }
    }
}

/// Size, depth, width and (for formulas) the alternation profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStats {
    /// Node count for circuits/formulas; vertices + edges for ABPs.
    pub size: usize,
    /// Longest root-to-leaf path (circuits) or layer transitions (ABPs).
    pub depth: usize,
    /// Maximum layer size; 0 for circuits/formulas.
    pub width: usize,
    /// Number of node layers; 0 for circuits/formulas.
    pub layers: usize,
    pub alternation: Option<AlternationProfile>,
}

/// Bottom-to-top levels of a strictly alternating formula with the maximum
/// fan-in observed on each level (identity-constant padding children do
/// not count towards fan-in).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternationProfile {
    pub levels: usize,
    pub fanins: Vec<usize>,
}

/// The collapsed (unbounded fan-in) view of a formula.
#[derive(Debug, Clone, PartialEq)]
pub enum NaryTree {
    Leaf(LeafLabel),
    Op(GateOp, Vec<NaryTree>),
}

/// Collapses same-kind adjacent gates into unbounded fan-in nodes.
pub fn collapse(f: &Formula) -> NaryTree {
    fn go(f: &Formula, id: usize) -> NaryTree {
        match f.node(id) {
            Node::Leaf(label) => NaryTree::Leaf(label.clone()),
            Node::Gate { op, left, right } => {
                let mut children = Vec::new();
                for child in [go(f, *left), go(f, *right)] {
                    match child {
                        NaryTree::Op(cop, grand) if cop == *op => children.extend(grand),
                        other => children.push(other),
                    }
                }
                NaryTree::Op(*op, children)
            }
        }
    }
    go(f, f.root())
}

impl NaryTree {
    /// Depth in gate levels of the collapsed tree.
    pub fn depth(&self) -> usize {
        match self {
            NaryTree::Leaf(_) => 0,
            NaryTree::Op(_, children) => 1 + children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }
}

/// Expected gate op at a given bottom-to-top level: `⊗` on odd levels,
/// `⊕` on even levels.
pub fn op_at_level(level: usize) -> GateOp {
    if level % 2 == 1 {
        GateOp::Plus
    } else {
        GateOp::Min
    }
}

/// Levels of a strictly alternating formula, bottom-to-top, or `None` when
/// the collapsed view is not strictly leveled. Gate children of a level-`i`
/// gate must sit exactly at level `i − 1`; constant leaves are allowed
/// anywhere (padding), variable leaves only below level-1 gates.
pub fn alternation_profile(f: &Formula) -> Option<AlternationProfile> {
    fn level_of(t: &NaryTree, fanins: &mut Vec<usize>) -> Option<usize> {
        let NaryTree::Op(op, children) = t else {
            return Some(0);
        };
        let mut gate_level: Option<usize> = None;
        for c in children {
            if let NaryTree::Op(..) = c {
                let l = level_of(c, fanins)?;
                match gate_level {
                    Some(existing) if existing != l => return None,
                    _ => gate_level = Some(l),
                }
            }
        }
        let level = gate_level.map_or(1, |l| l + 1);
        if level > 1
            && children
                .iter()
                .any(|c| matches!(c, NaryTree::Leaf(LeafLabel::Var(_))))
        {
            return None;
        }
        if *op != op_at_level(level) {
            return None;
        }
        if fanins.len() < level {
            fanins.resize(level, 0);
        }
        let counted = children
            .iter()
            .filter(|c| !matches!(c, NaryTree::Leaf(LeafLabel::Const(_))))
            .count()
            .max(1);
        fanins[level - 1] = fanins[level - 1].max(counted);
        Some(level)
    }

    let tree = collapse(f);
    if matches!(tree, NaryTree::Leaf(_)) {
        return None;
    }
    let mut fanins = Vec::new();
    let top = level_of(&tree, &mut fanins)?;
    if top != fanins.len() {
        return None;
    }
    Some(AlternationProfile {
        levels: top,
        fanins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Rat;

    fn pt(vals: &[i64]) -> Vec<TropValue> {
        vals.iter().map(|&v| TropValue::int(v)).collect()
    }

    fn inner_product_circuit() -> Circuit {
        // (x0 ⊗ x3) ⊕ (x1 ⊗ x4) ⊕ (x2 ⊗ x5)
        let mut b = CircuitBuilder::new(SemiringMode::R, 6);
        let mut prods = Vec::new();
        for i in 0..3 {
            let x = b.var(i);
            let y = b.var(3 + i);
            prods.push(b.gate(GateOp::Plus, x, y));
        }
        let root = b.fold(GateOp::Min, &prods);
        b.finish(root)
    }

    #[test]
    fn circuit_eval_and_expand() {
        let c = inner_product_circuit();
        assert_eq!(c.eval(&pt(&[1, 2, 3, 4, 5, 6])).unwrap(), TropValue::int(5));

        let p = c.expand(&Budget::default()).unwrap();
        assert_eq!(p.term_count(), 3);

        let single = Circuit {
            mode: SemiringMode::R,
            arity: 1,
            nodes: vec![Node::Leaf(LeafLabel::Var(0))],
            root: 0,
        };
        assert_eq!(single.eval(&pt(&[5])).unwrap(), TropValue::int(5));
    }

    #[test]
    fn circuit_validation() {
        let bad = Circuit {
            mode: SemiringMode::R,
            arity: 1,
            nodes: vec![
                Node::Gate {
                    op: GateOp::Min,
                    left: 1,
                    right: 1,
                },
                Node::Leaf(LeafLabel::Var(0)),
            ],
            root: 0,
        };
        assert!(!bad.validate().is_empty());
        assert!(bad.eval(&pt(&[0])).is_err());
    }

    #[test]
    fn formula_rejects_shared_nodes() {
        let mut b = CircuitBuilder::new(SemiringMode::R, 1);
        let x = b.var(0);
        let shared = b.gate(GateOp::Plus, x, x);
        let c = b.finish(shared);
        assert!(Formula::new(c).is_err());
    }

    #[test]
    fn abp_eval_matches_path_enumeration() {
        // 3 layers, width 2: two paths u·v and a·b.
        let mut abp = Abp::new(SemiringMode::R, 4, AbpKind::Weakest, vec![1, 2, 1]);
        abp.add_edge(0, 0, 0, EdgeLabel::Var(0));
        abp.add_edge(0, 0, 1, EdgeLabel::Var(1));
        abp.add_edge(1, 0, 0, EdgeLabel::Var(2));
        abp.add_edge(1, 1, 0, EdgeLabel::Var(3));
        let p = pt(&[1, 5, 10, 2]);
        assert_eq!(abp.eval(&p).unwrap(), TropValue::int(7));
        assert_eq!(abp.eval_by_paths(&p).unwrap(), abp.eval(&p).unwrap());

        let poly = abp.expand(&Budget::default()).unwrap();
        assert_eq!(
            poly,
            TropPoly::from_ints(SemiringMode::R, 4, &[(&[1, 0, 1, 0], 0), (&[0, 1, 0, 1], 0)])
        );
    }

    #[test]
    fn abp_infinite_edge_kills_paths() {
        let mut abp = Abp::new(SemiringMode::R, 1, AbpKind::Weakest, vec![1, 1]);
        abp.add_edge(0, 0, 0, EdgeLabel::infinity());
        assert_eq!(abp.eval(&pt(&[3])).unwrap(), TropValue::Infinity);
    }

    #[test]
    fn matrix_round_trip() {
        let mut abp = Abp::new(SemiringMode::R, 2, AbpKind::Weakest, vec![1, 2, 1]);
        abp.add_edge(0, 0, 0, EdgeLabel::Var(0));
        abp.add_edge(0, 0, 1, EdgeLabel::Const(TropValue::int(3)));
        abp.add_edge(1, 0, 0, EdgeLabel::Var(1));
        abp.add_edge(1, 1, 0, EdgeLabel::Const(TropValue::zero()));

        let mats = abp.to_matrices().unwrap();
        assert_eq!(mats.len(), 2);
        let back = Abp::from_matrices(SemiringMode::R, 2, &mats).unwrap();
        assert_eq!(back.width(), 2);
        let budget = Budget::default();
        assert!(abp
            .expand(&budget)
            .unwrap()
            .func_equal(&back.expand(&budget).unwrap())
            .unwrap());
    }

    #[test]
    fn identity_matrices_compute_zero() {
        let mut m = LabelMatrix::infinite(3);
        for i in 0..3 {
            m.set(i, i, EdgeLabel::Const(TropValue::zero()));
        }
        let abp = Abp::from_matrices(SemiringMode::R, 0, &[m.clone(), m]).unwrap();
        assert_eq!(abp.eval(&[]).unwrap(), TropValue::zero());
    }

    #[test]
    fn one_by_one_matrices_multiply_constants() {
        let mut m1 = LabelMatrix::infinite(1);
        m1.set(0, 0, EdgeLabel::Const(TropValue::int(2)));
        let mut m2 = LabelMatrix::infinite(1);
        m2.set(0, 0, EdgeLabel::Const(TropValue::ratio(1, 2)));
        let abp = Abp::from_matrices(SemiringMode::R, 0, &[m1, m2]).unwrap();
        assert_eq!(abp.eval(&[]).unwrap(), TropValue::Finite(Rat::new(5, 2)));
    }

    #[test]
    fn concat_multiplies_functions() {
        let mk = |v: usize| {
            let mut abp = Abp::new(SemiringMode::R, 2, AbpKind::Weakest, vec![1, 1]);
            abp.add_edge(0, 0, 0, EdgeLabel::Var(v));
            abp
        };
        let ab = Abp::concat(&mk(0), &mk(1)).unwrap();
        assert_eq!(ab.eval(&pt(&[3, 4])).unwrap(), TropValue::int(7));

        // Concat with the empty (single-layer) ABP changes nothing.
        let unit = Abp::new(SemiringMode::R, 2, AbpKind::Weakest, vec![1]);
        let same = Abp::concat(&mk(0), &unit).unwrap();
        assert_eq!(same.eval(&pt(&[3, 4])).unwrap(), TropValue::int(3));
    }

    #[test]
    fn stats_and_alternation() {
        let f = Formula::new(inner_product_circuit()).unwrap();
        let stats = Model::Formula(f).stats();
        assert_eq!(stats.size, 11);
        let profile = stats.alternation.expect("strictly alternating");
        assert_eq!(profile.levels, 2);
        assert_eq!(profile.fanins, vec![2, 3]);

        let leaf = Formula::var(SemiringMode::R, 1, 0);
        let stats = Model::Formula(leaf).stats();
        assert_eq!(stats.size, 1);
        assert_eq!(stats.depth, 0);
        assert!(stats.alternation.is_none());
    }

    #[test]
    fn formal_degree_and_reachability() {
        let mut b = CircuitBuilder::new(SemiringMode::R, 1);
        let x = b.var(0);
        let sq = b.gate(GateOp::Plus, x, x);
        let c = b.finish(sq);
        assert_eq!(c.formal_degree(), 2);
        assert_eq!(c.reachable(c.root).len(), 2);
    }
}
