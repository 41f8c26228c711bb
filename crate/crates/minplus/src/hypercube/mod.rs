//! Hypercube-sum expressions: an inner model whose designated hypercube
//! variables range over the Boolean values `{∞, 0}`, denoting the minimum
//! of the inner value over all assignments. Complemented hypercube
//! variables `ȳ` flip `∞ ↔ 0` and cannot be simulated inside the model.

mod encodings;
mod summands;

pub use encodings::{hc_encoding, make_multiplicatively_disjoint, perm_encoding, vnf_encoding};
pub use summands::{linear_form_summand, width2_summand};

use std::collections::BTreeSet;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::model::{Abp, Circuit, CircuitBuilder, EdgeLabel, GateOp, LeafLabel, Model, Node};
use crate::poly::TropPoly;
use crate::semiring::{SemiringMode, TropValue};

/// What an inner-model leaf slot is wired to.
#[derive(Debug, Clone, PartialEq)]
pub enum WireTarget {
    /// Free variable `x_i`.
    X(usize),
    /// Hypercube variable `y_j`.
    Y(usize),
    /// Complement `ȳ_j`; only valid for complemented `j`.
    YBar(usize),
    Const(TropValue),
}

/// An inner model plus hypercube wiring. Denotes
/// `f(X) = min over Y ∈ {∞,0}^{y_vars} of inner(X, Y, Ȳ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypercubeExpr {
    inner: Model,
    x_vars: usize,
    y_vars: usize,
    complemented: BTreeSet<usize>,
    wiring: Vec<WireTarget>,
}

impl HypercubeExpr {
    pub fn new(
        inner: Model,
        y_vars: usize,
        complemented: BTreeSet<usize>,
        wiring: Vec<WireTarget>,
    ) -> Result<Self> {
        if wiring.len() != inner.arity() {
            return Err(Error::ArityMismatch {
                expected: inner.arity(),
                got: wiring.len(),
            });
        }
        if let Some(&j) = complemented.iter().find(|&&j| j >= y_vars) {
            return Err(Error::InvalidInput(format!(
                "complemented index {j} out of range (y_vars = {y_vars})"
            )));
        }
        let mut x_vars = 0;
        for target in &wiring {
            match target {
                WireTarget::X(i) => x_vars = x_vars.max(i + 1),
                WireTarget::Y(j) => {
                    if *j >= y_vars {
                        return Err(Error::InvalidInput(format!("y index {j} out of range")));
                    }
                }
                WireTarget::YBar(j) => {
                    if !complemented.contains(j) {
                        return Err(Error::InvalidInput(format!(
                            "ȳ_{j} used but {j} is not complemented"
                        )));
                    }
                }
                WireTarget::Const(_) => {}
            }
        }
        Ok(HypercubeExpr {
            inner,
            x_vars,
            y_vars,
            complemented,
            wiring,
        })
    }

    pub fn inner(&self) -> &Model {
        &self.inner
    }

    pub fn mode(&self) -> SemiringMode {
        self.inner.mode()
    }

    pub fn x_vars(&self) -> usize {
        self.x_vars
    }

    pub fn y_vars(&self) -> usize {
        self.y_vars
    }

    pub fn complemented(&self) -> &BTreeSet<usize> {
        &self.complemented
    }

    pub fn wiring(&self) -> &[WireTarget] {
        &self.wiring
    }

    /// The value of `y_j` under assignment `bits` (bit 0 ↔ `y_j = 0`,
    /// bit 1 ↔ `y_j = ∞`).
    fn y_value(bits: u64, j: usize) -> TropValue {
        if bits >> j & 1 == 0 {
            TropValue::zero()
        } else {
            TropValue::Infinity
        }
    }

    fn slot_value(&self, slot: usize, x: &[TropValue], bits: u64) -> TropValue {
        match &self.wiring[slot] {
            WireTarget::X(i) => x[*i].clone(),
            WireTarget::Y(j) => Self::y_value(bits, *j),
            WireTarget::YBar(j) => match Self::y_value(bits, *j) {
                TropValue::Infinity => TropValue::zero(),
                _ => TropValue::Infinity,
            },
            WireTarget::Const(v) => v.clone(),
        }
    }

    fn check_budget(&self, budget: &Budget) -> Result<()> {
        if self.y_vars > budget.max_hypercube_vars {
            return Err(Error::BudgetExceeded(format!(
                "{} hypercube variables exceed the brute-force budget {}",
                self.y_vars, budget.max_hypercube_vars
            )));
        }
        Ok(())
    }

    /// Exact minimum over all `2^y_vars` assignments of the inner value.
    pub fn eval(&self, x: &[TropValue], budget: &Budget) -> Result<TropValue> {
        Ok(self.eval_batch(std::slice::from_ref(&x.to_vec()), budget)?[0].clone())
    }

    /// Evaluates at many points, sharing the per-assignment partial
    /// evaluation of the hypercube variables across points.
    pub fn eval_batch(&self, points: &[Vec<TropValue>], budget: &Budget) -> Result<Vec<TropValue>> {
        for p in points {
            if p.len() != self.x_vars {
                return Err(Error::ArityMismatch {
                    expected: self.x_vars,
                    got: p.len(),
                });
            }
        }
        let polys = self.residual_polys(budget)?;
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            let mut best = TropValue::Infinity;
            for poly in &polys {
                best = best.trop_add(&poly.eval(p)?);
            }
            out.push(best);
        }
        Ok(out)
    }

    /// The hypercube sum as one polynomial in the `X` variables: the
    /// tropical sum over all assignments of the substituted inner
    /// expansion.
    pub fn expand(&self, budget: &Budget) -> Result<TropPoly> {
        let mut acc = TropPoly::empty(self.mode(), self.x_vars);
        for poly in self.residual_polys(budget)? {
            acc = acc.add(&poly)?;
            if acc.term_count() > budget.max_terms {
                return Err(Error::Budgeted(acc.term_count(), budget.max_terms));
            }
        }
        Ok(acc)
    }

    /// For each assignment (binary-counter order), the inner model partially
    /// evaluated at that assignment, as a polynomial in `X`. Assignments
    /// whose value is constantly `∞` are dropped.
    fn residual_polys(&self, budget: &Budget) -> Result<Vec<TropPoly>> {
        self.check_budget(budget)?;
        let mode = self.mode();
        let n = self.x_vars;
        let mut out = Vec::new();
        for bits in 0u64..(1u64 << self.y_vars) {
            let residual = match &self.inner {
                Model::Circuit(c) => self.fold_circuit(c, bits)?,
                Model::Formula(f) => self.fold_circuit(f.circuit(), bits)?,
                Model::Abp(a) => self.fold_abp(a, bits)?,
            };
            match residual {
                SymVal::Const(TropValue::Infinity) => {}
                SymVal::Const(v) => out.push(TropPoly::constant(mode, n, &v)?),
                SymVal::Poly(p) => {
                    if !p.is_empty() {
                        if p.term_count() > budget.max_terms {
                            return Err(Error::Budgeted(p.term_count(), budget.max_terms));
                        }
                        out.push(p);
                    }
                }
            }
        }
        Ok(out)
    }

    fn leaf_sym(&self, label: &LeafLabel, bits: u64) -> Result<SymVal> {
        Ok(match label {
            LeafLabel::Var(slot) => match &self.wiring[*slot] {
                WireTarget::X(i) => {
                    SymVal::Poly(TropPoly::var(self.mode(), self.x_vars, *i)?)
                }
                _ => SymVal::Const(self.slot_value(*slot, &[], bits)),
            },
            LeafLabel::Const(v) => SymVal::Const(v.clone()),
        })
    }

    fn fold_circuit(&self, c: &Circuit, bits: u64) -> Result<SymVal> {
        let mode = self.mode();
        let n = self.x_vars;
        let mut vals: Vec<SymVal> = Vec::with_capacity(c.nodes.len());
        for node in &c.nodes {
            let v = match node {
                Node::Leaf(label) => self.leaf_sym(label, bits)?,
                Node::Gate { op, left, right } => {
                    SymVal::apply(*op, &vals[*left], &vals[*right], mode, n)?
                }
            };
            vals.push(v);
        }
        Ok(vals[c.root].clone())
    }

    fn edge_sym(&self, label: &EdgeLabel, bits: u64) -> Result<SymVal> {
        Ok(match label {
            EdgeLabel::Var(slot) => self.leaf_sym(&LeafLabel::Var(*slot), bits)?,
            EdgeLabel::Const(v) => SymVal::Const(v.clone()),
            EdgeLabel::Lin(p) => {
                // Substitute hypercube slots inside the linear form.
                let mut subst = TropPoly::empty(self.mode(), self.x_vars);
                'terms: for (exps, coeff) in p.terms() {
                    let mut new_exps = vec![0u32; self.x_vars];
                    let mut new_coeff = TropValue::Finite(*coeff);
                    for (slot, e) in exps.iter().enumerate() {
                        if *e == 0 {
                            continue;
                        }
                        match &self.wiring[slot] {
                            WireTarget::X(i) => new_exps[*i] += e,
                            other => {
                                let _ = other;
                                let v = self.slot_value(slot, &[], bits).trop_pow(*e);
                                if v.is_infinite() {
                                    continue 'terms;
                                }
                                new_coeff = new_coeff.trop_mul(&v);
                            }
                        }
                    }
                    subst.insert_term(new_exps, &new_coeff)?;
                }
                SymVal::from_poly(subst)
            }
        })
    }

    fn fold_abp(&self, a: &Abp, bits: u64) -> Result<SymVal> {
        let mode = self.mode();
        let n = self.x_vars;
        let mut by_layer: Vec<Vec<&crate::model::AbpEdge>> =
            vec![Vec::new(); a.layers.len().saturating_sub(1)];
        for e in &a.edges {
            by_layer[e.layer].push(e);
        }
        let inf = SymVal::Const(TropValue::Infinity);
        let mut dist = vec![inf.clone(); a.layers[0]];
        dist[0] = SymVal::Const(TropValue::zero());
        for (l, layer_edges) in by_layer.iter().enumerate() {
            let mut next = vec![inf.clone(); a.layers[l + 1]];
            for e in layer_edges {
                if matches!(dist[e.from], SymVal::Const(TropValue::Infinity)) {
                    continue;
                }
                let label = self.edge_sym(&e.label, bits)?;
                let w = SymVal::apply(GateOp::Plus, &dist[e.from], &label, mode, n)?;
                next[e.to] = SymVal::apply(GateOp::Min, &next[e.to], &w, mode, n)?;
            }
            dist = next;
        }
        Ok(dist[0].clone())
    }
}

/// A partially evaluated value: a constant where no free variable flows,
/// a polynomial in the `X` variables otherwise.
#[derive(Debug, Clone)]
enum SymVal {
    Const(TropValue),
    Poly(TropPoly),
}

impl SymVal {
    fn from_poly(p: TropPoly) -> SymVal {
        if p.is_empty() {
            return SymVal::Const(TropValue::Infinity);
        }
        if p.term_count() == 1 {
            if let Some((exps, coeff)) = p.terms().next() {
                if exps.iter().all(|&e| e == 0) {
                    return SymVal::Const(TropValue::Finite(*coeff));
                }
            }
        }
        SymVal::Poly(p)
    }

    fn to_poly(&self, mode: SemiringMode, arity: usize) -> Result<TropPoly> {
        match self {
            SymVal::Const(v) => TropPoly::constant(mode, arity, v),
            SymVal::Poly(p) => Ok(p.clone()),
        }
    }

    fn apply(op: GateOp, a: &SymVal, b: &SymVal, mode: SemiringMode, arity: usize) -> Result<SymVal> {
        use SymVal::*;
        Ok(match (op, a, b) {
            (_, Const(x), Const(y)) => Const(op.apply(x, y)),
            (GateOp::Plus, Const(TropValue::Infinity), _)
            | (GateOp::Plus, _, Const(TropValue::Infinity)) => Const(TropValue::Infinity),
            (GateOp::Min, Const(TropValue::Infinity), v)
            | (GateOp::Min, v, Const(TropValue::Infinity)) => v.clone(),
            // Over R⁺ every value is ≥ 0, so a constant 0 absorbs a min.
            (GateOp::Min, Const(c), v) | (GateOp::Min, v, Const(c))
                if mode == SemiringMode::RPlus && *c == TropValue::zero() =>
            {
                let _ = v;
                Const(TropValue::zero())
            }
            _ => {
                let pa = a.to_poly(mode, arity)?;
                let pb = b.to_poly(mode, arity)?;
                let p = match op {
                    GateOp::Min => pa.add(&pb)?,
                    GateOp::Plus => pa.mul(&pb)?,
                };
                SymVal::from_poly(p)
            }
        })
    }
}

/// Eliminates the complemented hypercube variables: for each of the `2^r`
/// complement patterns `σ` the inner model is substituted at
/// `y_i := σ_i(0)` (complemented positions) and `y_j := 0` (the rest), and
/// the branches are `⊕`-combined. The result is a circuit over the `X`
/// variables computing the same function as the hypercube sum.
pub fn eliminate_complements(e: &HypercubeExpr, budget: &Budget) -> Result<Circuit> {
    let inner = match e.inner() {
        Model::Circuit(c) => c.clone(),
        Model::Formula(f) => f.circuit().clone(),
        Model::Abp(_) => {
            return Err(Error::InvalidInput(
                "complement elimination expects a circuit or formula inner model".into(),
            ))
        }
    };
    let comp: Vec<usize> = e.complemented().iter().copied().collect();
    let r = comp.len();
    if r > budget.max_hypercube_vars {
        return Err(Error::BudgetExceeded(format!(
            "{r} complemented variables exceed the elimination budget"
        )));
    }
    let est = (1usize << r) * (inner.size() + 4);
    if est > budget.max_nodes {
        return Err(Error::BudgetExceeded(format!(
            "elimination would build ~{est} nodes (cap {})",
            budget.max_nodes
        )));
    }

    let mut builder = CircuitBuilder::new(e.mode(), e.x_vars());
    let mut branch_roots = Vec::with_capacity(1 << r);
    for pattern in 0u64..(1u64 << r) {
        // Bit 0 of the pattern = "not complemented here" = y := 0.
        let y_val = |j: usize| -> TropValue {
            match comp.iter().position(|&c| c == j) {
                Some(pos) if pattern >> pos & 1 == 1 => TropValue::Infinity,
                _ => TropValue::zero(),
            }
        };
        let root = builder.splice(&inner, &mut |label| match label {
            LeafLabel::Var(slot) => match &e.wiring()[*slot] {
                WireTarget::X(i) => LeafLabel::Var(*i),
                WireTarget::Y(j) => LeafLabel::Const(y_val(*j)),
                WireTarget::YBar(j) => LeafLabel::Const(match y_val(*j) {
                    TropValue::Infinity => TropValue::zero(),
                    _ => TropValue::Infinity,
                }),
                WireTarget::Const(v) => LeafLabel::Const(v.clone()),
            },
            other => other.clone(),
        });
        branch_roots.push(root);
    }
    let root = builder.fold(GateOp::Min, &branch_roots);
    Ok(builder.finish(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Formula;

    fn pt(vals: &[i64]) -> Vec<TropValue> {
        vals.iter().map(|&v| TropValue::int(v)).collect()
    }

    /// g = (x1 ⊗ y) ⊕ (x2 ⊗ ȳ) with one complemented hypercube variable.
    fn mux_expr() -> HypercubeExpr {
        let mut b = CircuitBuilder::new(SemiringMode::R, 4);
        let x1 = b.var(0);
        let y = b.var(1);
        let x2 = b.var(2);
        let ybar = b.var(3);
        let l = b.gate(GateOp::Plus, x1, y);
        let r = b.gate(GateOp::Plus, x2, ybar);
        let root = b.gate(GateOp::Min, l, r);
        let inner = Model::Circuit(b.finish(root));
        HypercubeExpr::new(
            inner,
            1,
            BTreeSet::from([0]),
            vec![
                WireTarget::X(0),
                WireTarget::Y(0),
                WireTarget::X(1),
                WireTarget::YBar(0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_minimizes_over_assignments() {
        let e = mux_expr();
        let budget = Budget::default();
        assert_eq!(e.eval(&pt(&[3, 5]), &budget).unwrap(), TropValue::int(3));
        assert_eq!(e.eval(&pt(&[9, 5]), &budget).unwrap(), TropValue::int(5));
    }

    #[test]
    fn zero_hypercube_vars_is_plain_eval() {
        let inner = Model::Formula(Formula::var(SemiringMode::R, 1, 0));
        let e = HypercubeExpr::new(inner, 0, BTreeSet::new(), vec![WireTarget::X(0)]).unwrap();
        assert_eq!(
            e.eval(&pt(&[7]), &Budget::default()).unwrap(),
            TropValue::int(7)
        );
    }

    #[test]
    fn constant_infinity_inner() {
        let inner = Model::Formula(Formula::constant(
            SemiringMode::R,
            0,
            TropValue::Infinity,
        ));
        let e = HypercubeExpr::new(inner, 2, BTreeSet::new(), vec![]).unwrap();
        assert_eq!(
            e.eval(&[], &Budget::default()).unwrap(),
            TropValue::Infinity
        );
    }

    #[test]
    fn expand_matches_pointwise_eval() {
        let e = mux_expr();
        let budget = Budget::default();
        let p = e.expand(&budget).unwrap();
        for a in -2..3 {
            for b in -2..3 {
                let point = pt(&[a, b]);
                assert_eq!(p.eval(&point).unwrap(), e.eval(&point, &budget).unwrap());
            }
        }
    }

    #[test]
    fn budget_guards_enumeration() {
        let e = mux_expr();
        let tight = Budget {
            max_hypercube_vars: 0,
            ..Budget::default()
        };
        assert!(matches!(
            e.eval(&pt(&[0, 0]), &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn eliminate_mux_gives_min_of_inputs() {
        let e = mux_expr();
        let budget = Budget::default();
        let circuit = eliminate_complements(&e, &budget).unwrap();
        assert!(circuit.size() <= 2 * (7 + 4));
        let target = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0), (&[0, 1], 0)]);
        assert!(circuit
            .expand(&budget)
            .unwrap()
            .func_equal(&target)
            .unwrap());
    }

    #[test]
    fn eliminate_r0_substitutes_zero() {
        // One non-complemented variable: y := 0.
        let mut b = CircuitBuilder::new(SemiringMode::R, 2);
        let x = b.var(0);
        let y = b.var(1);
        let root = b.gate(GateOp::Plus, x, y);
        let e = HypercubeExpr::new(
            Model::Circuit(b.finish(root)),
            1,
            BTreeSet::new(),
            vec![WireTarget::X(0), WireTarget::Y(0)],
        )
        .unwrap();
        let circuit = eliminate_complements(&e, &Budget::default()).unwrap();
        let x_poly = TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0)]);
        assert!(circuit
            .expand(&Budget::default())
            .unwrap()
            .func_equal(&x_poly)
            .unwrap());
    }

    #[test]
    fn eliminate_agrees_with_brute_force() {
        let e = mux_expr();
        let budget = Budget::default();
        let circuit = eliminate_complements(&e, &budget).unwrap();
        let elim = circuit.expand(&budget).unwrap();
        let brute = e.expand(&budget).unwrap();
        assert!(elim.func_equal(&brute).unwrap());
    }
}
