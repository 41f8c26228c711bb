//! Canonical tropical polynomials.
//!
//! A polynomial is a finite map from exponent vectors to finite rational
//! coefficients (`∞`-coefficient monomials are simply absent). Two
//! polynomials are treated as equal when they define the same function on
//! the admissible domain (`ℝⁿ` in mode `r`, `ℝ≥0ⁿ` in mode `rplus`), which
//! is decided exactly: a monomial can be dropped iff it lies above the
//! minimum of the remaining ones everywhere, and that is a rational
//! feasibility question about convex combinations of exponent vectors.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, big, big_int, LpOutcome, StandardLp};
use crate::semiring::{Rat, SemiringMode, TropValue};

/// A single term: exponent vector plus finite coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: Rat,
}

/// A tropical polynomial over a fixed semiring mode and arity.
///
/// Stored terms are keyed by exponent vector, so no two share exponents.
/// Construction merges collisions with `min`; the arithmetic operations
/// canonicalize their results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropPoly {
    mode: SemiringMode,
    arity: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl TropPoly {
    /// The empty polynomial (the function constantly `∞`).
    pub fn empty(mode: SemiringMode, arity: usize) -> Self {
        TropPoly {
            mode,
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `v`. For `v = ∞` this is the empty polynomial.
    pub fn constant(mode: SemiringMode, arity: usize, v: &TropValue) -> Result<Self> {
        let mut p = TropPoly::empty(mode, arity);
        p.insert_term(vec![0; arity], v)?;
        Ok(p)
    }

    /// The single variable `x_i`.
    pub fn var(mode: SemiringMode, arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: i + 1,
            });
        }
        let mut exps = vec![0; arity];
        exps[i] = 1;
        let mut p = TropPoly::empty(mode, arity);
        p.insert_term(exps, &TropValue::zero())?;
        Ok(p)
    }

    /// Builds a polynomial from raw terms, merging exponent collisions with
    /// `min` and dropping `∞` coefficients. The result is not canonicalized.
    pub fn from_terms<I>(mode: SemiringMode, arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, TropValue)>,
    {
        let mut p = TropPoly::empty(mode, arity);
        for (exps, coeff) in terms {
            p.insert_term(exps, &coeff)?;
        }
        Ok(p)
    }

    /// Test helper: integer-coefficient terms.
    pub fn from_ints(mode: SemiringMode, arity: usize, terms: &[(&[u32], i64)]) -> Self {
        TropPoly::from_terms(
            mode,
            arity,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), TropValue::int(*c))),
        )
        .expect("valid test terms")
    }

    /// Inserts one term, merging with `min` on collision. `∞` coefficients
    /// are dropped: they denote the absent monomial.
    pub fn insert_term(&mut self, exps: Vec<u32>, coeff: &TropValue) -> Result<()> {
        if exps.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: exps.len(),
            });
        }
        let c = match coeff {
            TropValue::Infinity => return Ok(()),
            TropValue::Finite(c) => {
                self.mode.check(coeff)?;
                *c
            }
        };
        self.terms
            .entry(exps)
            .and_modify(|old| {
                if c < *old {
                    *old = c;
                }
            })
            .or_insert(c);
        Ok(())
    }

    pub fn mode(&self) -> SemiringMode {
        self.mode
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(e, c)| Monomial {
                exponents: e.clone(),
                coeff: *c,
            })
            .collect()
    }

    /// Total degree: maximum exponent sum over terms, 0 when empty.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &TropPoly) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(())
    }

    /// Evaluates at a point: the minimum over terms of
    /// `coeff + Σ eᵢ·xᵢ`, `∞` for the empty polynomial.
    pub fn eval(&self, point: &[TropValue]) -> Result<TropValue> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        for v in point {
            self.mode.check(v)?;
        }
        let mut best = TropValue::Infinity;
        'terms: for (exps, coeff) in &self.terms {
            let mut acc = *coeff;
            for (e, x) in exps.iter().zip(point) {
                if *e == 0 {
                    continue;
                }
                match x {
                    TropValue::Infinity => continue 'terms,
                    TropValue::Finite(v) => acc += v * Rat::from_integer(*e as i64),
                }
            }
            best = best.trop_add(&TropValue::Finite(acc));
        }
        Ok(best)
    }

    /// `f ⊕ g`: union of term sets with `min` on collisions, canonicalized.
    pub fn add(&self, other: &TropPoly) -> Result<TropPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (exps, coeff) in &other.terms {
            out.insert_term(exps.clone(), &TropValue::Finite(*coeff))?;
        }
        Ok(out.canonicalize())
    }

    /// `f ⊗ g`: all pairwise products, canonicalized.
    pub fn mul(&self, other: &TropPoly) -> Result<TropPoly> {
        self.check_compatible(other)?;
        let mut out = TropPoly::empty(self.mode, self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(exps, &TropValue::Finite(ca + cb))?;
            }
        }
        Ok(out.canonicalize())
    }

    /// `f^{⊗ℓ}` by repeated multiplication; `ℓ = 0` gives the constant `0`.
    pub fn pow(&self, l: u32) -> Result<TropPoly> {
        let mut out = TropPoly::constant(self.mode, self.arity, &TropValue::zero())?;
        for _ in 0..l {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Removes every monomial dominated by the remaining ones, iterating in
    /// lexicographic exponent order to a fixed point. The result defines
    /// the same function and is the unique minimal term set for it.
    pub fn canonicalize(&self) -> TropPoly {
        let mut terms = self.terms.clone();
        loop {
            let mut changed = false;
            let keys: Vec<Vec<u32>> = terms.keys().cloned().collect();
            for key in keys {
                if terms.len() <= 1 {
                    break;
                }
                let coeff = terms[&key];
                let others: Vec<(&Vec<u32>, &Rat)> =
                    terms.iter().filter(|(e, _)| **e != key).collect();
                if monomial_dominated(self.mode, (&key, &coeff), &others) {
                    terms.remove(&key);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        TropPoly {
            mode: self.mode,
            arity: self.arity,
            terms,
        }
    }

    /// Function equality: canonical forms have identical term sets.
    pub fn func_equal(&self, other: &TropPoly) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.canonicalize().terms == other.canonicalize().terms)
    }

    /// A rational point where the two functions take different values, or
    /// `None` when they are equal. Complete: whenever the canonical forms
    /// differ, some monomial of one side is not dominated by the other
    /// side's terms, and the failed domination yields a separating point.
    pub fn separating_point(&self, other: &TropPoly) -> Result<Option<Vec<Rat>>> {
        self.check_compatible(other)?;
        let cf = self.canonicalize();
        let cg = other.canonicalize();
        if cf.terms == cg.terms {
            return Ok(None);
        }
        for (poly, against) in [(&cf, &cg), (&cg, &cf)] {
            let others: Vec<(&Vec<u32>, &Rat)> = against.terms.iter().collect();
            for (exps, coeff) in &poly.terms {
                if against.terms.get(exps).is_some_and(|c| c <= coeff) {
                    continue;
                }
                if others.is_empty() {
                    // The other side is constantly ∞; any point separates.
                    return Ok(Some(vec![Rat::zero(); self.arity]));
                }
                if !monomial_dominated(self.mode, (exps, coeff), &others) {
                    let point = separation_witness(self.mode, (exps, coeff), &others)?;
                    return Ok(Some(point));
                }
            }
        }
        unreachable!("distinct canonical forms always yield an undominated monomial")
    }
}

impl fmt::Display for TropPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("inf");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                f.write_str(" | ")?;
            }
            first = false;
            let mut parts: Vec<String> = Vec::new();
            if !coeff.is_zero() || exps.iter().all(|&e| e == 0) {
                parts.push(TropValue::Finite(*coeff).to_string());
            }
            for (i, e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("x{i}")),
                    _ => parts.push(format!("x{i}^{e}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

/// Decides whether `min` over `others` is ≤ the candidate monomial at every
/// admissible point. Exactly: true iff there are rational weights
/// `λ_j ≥ 0, Σλ_j = 1` with `Σλ_j·exps_j = cand.exps` (mode `r`) or
/// `Σλ_j·exps_j ≤ cand.exps` componentwise (mode `rplus`), and
/// `Σλ_j·coeff_j ≤ cand.coeff`.
pub fn monomial_dominated(
    mode: SemiringMode,
    cand: (&[u32], &Rat),
    others: &[(&Vec<u32>, &Rat)],
) -> bool {
    let (u, c) = cand;
    if others.is_empty() {
        return false;
    }

    // Single-monomial fast paths.
    for (v, cv) in others {
        if *cv > c {
            continue;
        }
        let fits = match mode {
            SemiringMode::R => u == v.as_slice(),
            SemiringMode::RPlus => v.iter().zip(u).all(|(a, b)| a <= b),
        };
        if fits {
            return true;
        }
    }

    // Necessary conditions: the candidate must be reachable coordinatewise
    // and some coefficient must be small enough.
    if others.iter().all(|(_, cv)| *cv > c) {
        return false;
    }
    for i in 0..u.len() {
        let min = others.iter().map(|(v, _)| v[i]).min().unwrap();
        if min > u[i] {
            return false;
        }
        if mode == SemiringMode::R {
            let max = others.iter().map(|(v, _)| v[i]).max().unwrap();
            if max < u[i] {
                return false;
            }
        }
    }

    let k = others.len();
    let n = u.len();
    let mut a: Vec<Vec<BigRational>> = Vec::new();
    let mut b: Vec<BigRational> = Vec::new();

    // Σλ = 1 as two inequalities.
    a.push(vec![big_int(1); k]);
    b.push(big_int(1));
    a.push(vec![big_int(-1); k]);
    b.push(big_int(-1));

    for i in 0..n {
        let row: Vec<BigRational> = others.iter().map(|(v, _)| big_int(v[i] as i64)).collect();
        b.push(big_int(u[i] as i64));
        a.push(row.clone());
        if mode == SemiringMode::R {
            a.push(row.into_iter().map(|x| -x).collect());
            b.push(big_int(-(u[i] as i64)));
        }
    }

    a.push(others.iter().map(|(_, cv)| big(cv)).collect());
    b.push(big(c));

    let lp = StandardLp {
        a,
        b,
        c: vec![BigRational::zero(); k],
    };
    matches!(lp::solve(&lp), LpOutcome::Optimal(..))
}

/// Given a candidate not dominated by `others`, finds a rational point where
/// the candidate's value is strictly below the minimum of the others.
fn separation_witness(
    mode: SemiringMode,
    cand: (&[u32], &Rat),
    others: &[(&Vec<u32>, &Rat)],
) -> Result<Vec<Rat>> {
    let (u, c) = cand;
    let n = u.len();
    // Variables: x (free in mode r, split into x⁺ − x⁻; nonnegative in
    // rplus) plus the margin δ ≥ 0. Maximize δ subject to
    // (u − v_j)·x + δ ≤ c_j − c and δ ≤ 1.
    let xdim = match mode {
        SemiringMode::R => 2 * n,
        SemiringMode::RPlus => n,
    };
    let mut a: Vec<Vec<BigRational>> = Vec::new();
    let mut b: Vec<BigRational> = Vec::new();
    for (v, cv) in others {
        let mut row = Vec::with_capacity(xdim + 1);
        for i in 0..n {
            row.push(big_int(u[i] as i64 - v[i] as i64));
        }
        if mode == SemiringMode::R {
            for i in 0..n {
                row.push(big_int(v[i] as i64 - u[i] as i64));
            }
        }
        row.push(big_int(1));
        a.push(row);
        b.push(big(cv) - big(c));
    }
    let mut cap = vec![BigRational::zero(); xdim];
    cap.push(big_int(1));
    a.push(cap.clone());
    b.push(big_int(1));

    let lp = StandardLp { a, b, c: cap };
    match lp::solve(&lp) {
        LpOutcome::Optimal(delta, x) => {
            debug_assert!(delta.is_positive(), "caller checked non-domination");
            let mut point = Vec::with_capacity(n);
            for i in 0..n {
                let xi = match mode {
                    SemiringMode::R => &x[i] - &x[n + i],
                    SemiringMode::RPlus => x[i].clone(),
                };
                point.push(to_rat(&xi)?);
            }
            Ok(point)
        }
        other => Err(Error::InvalidInput(format!(
            "separation LP did not reach an optimum: {other:?}"
        ))),
    }
}

fn to_rat(x: &BigRational) -> Result<Rat> {
    let numer = x.numer().to_i64();
    let denom = x.denom().to_i64();
    match (numer, denom) {
        (Some(n), Some(d)) => Ok(Rat::new(n, d)),
        _ => Err(Error::InvalidInput(
            "separating point does not fit in 64-bit rationals".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(vals: &[i64]) -> Vec<TropValue> {
        vals.iter().map(|&v| TropValue::int(v)).collect()
    }

    #[test]
    fn eval_examples() {
        // x^2 ⊕ y^2 ⊕ x·y at (1, 3) → min{2, 6, 4} = 2.
        let f = TropPoly::from_ints(SemiringMode::R, 2, &[(&[2, 0], 0), (&[0, 2], 0), (&[1, 1], 0)]);
        assert_eq!(f.eval(&pt(&[1, 3])).unwrap(), TropValue::int(2));

        let empty = TropPoly::empty(SemiringMode::R, 1);
        assert_eq!(empty.eval(&pt(&[5])).unwrap(), TropValue::Infinity);

        let seven = TropPoly::from_ints(SemiringMode::R, 1, &[(&[0], 7)]);
        assert_eq!(
            seven.eval(&[TropValue::Infinity]).unwrap(),
            TropValue::int(7)
        );
    }

    #[test]
    fn eval_errors() {
        let f = TropPoly::from_ints(SemiringMode::RPlus, 2, &[(&[1, 0], 0)]);
        assert!(matches!(
            f.eval(&pt(&[1])),
            Err(Error::ArityMismatch { .. })
        ));
        assert_eq!(f.eval(&pt(&[-1, 0])), Err(Error::NegativeInRPlus));
    }

    #[test]
    fn add_examples() {
        // (x ⊕ 2) + (x ⊕ 5) → x ⊕ 2.
        let f = TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0), (&[0], 2)]);
        let g = TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0), (&[0], 5)]);
        let sum = f.add(&g).unwrap();
        assert_eq!(sum, TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0), (&[0], 2)]));

        // f + empty = canonicalize(f).
        let empty = TropPoly::empty(SemiringMode::R, 1);
        assert_eq!(f.add(&empty).unwrap(), f.canonicalize());

        // x·y + (x^2 ⊕ y^2) → x^2 ⊕ y^2.
        let xy = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 1], 0)]);
        let sq = TropPoly::from_ints(SemiringMode::R, 2, &[(&[2, 0], 0), (&[0, 2], 0)]);
        assert_eq!(xy.add(&sq).unwrap(), sq);
    }

    #[test]
    fn mul_examples() {
        // (x ⊕ 1)(x ⊕ 3) → x^2 ⊕ 1·x ⊕ 4.
        let f = TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0), (&[0], 1)]);
        let g = TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0), (&[0], 3)]);
        let prod = f.mul(&g).unwrap();
        assert_eq!(
            prod,
            TropPoly::from_ints(SemiringMode::R, 1, &[(&[2], 0), (&[1], 1), (&[0], 4)])
        );

        let one = TropPoly::constant(SemiringMode::R, 1, &TropValue::zero()).unwrap();
        assert_eq!(f.mul(&one).unwrap(), f.canonicalize());

        let empty = TropPoly::empty(SemiringMode::R, 1);
        assert!(f.mul(&empty).unwrap().is_empty());
    }

    #[test]
    fn pow_examples() {
        // (x ⊕ y)^2 = x^2 ⊕ y^2: the cross term is absorbed.
        let f = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0), (&[0, 1], 0)]);
        let sq = f.pow(2).unwrap();
        assert_eq!(
            sq,
            TropPoly::from_ints(SemiringMode::R, 2, &[(&[2, 0], 0), (&[0, 2], 0)])
        );

        let p0 = f.pow(0).unwrap();
        assert_eq!(
            p0,
            TropPoly::from_ints(SemiringMode::R, 2, &[(&[0, 0], 0)])
        );

        // (x ⊕ 1)^2 = x^2 ⊕ 2: the middle term 1·x sits exactly on the
        // segment between x^2 and 2 so it is absorbed.
        let g = TropPoly::from_ints(SemiringMode::R, 1, &[(&[1], 0), (&[0], 1)]);
        assert_eq!(
            g.pow(2).unwrap(),
            TropPoly::from_ints(SemiringMode::R, 1, &[(&[2], 0), (&[0], 2)])
        );
    }

    #[test]
    fn power_identity_for_monomial_sums() {
        // (f1 ⊕ ... ⊕ fk)^ℓ = f1^ℓ ⊕ ... ⊕ fk^ℓ for sums of monomials.
        let f = TropPoly::from_ints(
            SemiringMode::R,
            2,
            &[(&[1, 0], 0), (&[0, 1], 2), (&[1, 1], -1)],
        );
        for l in 0..=3 {
            let lhs = f.pow(l).unwrap();
            let mut rhs = TropPoly::empty(SemiringMode::R, 2);
            for m in f.monomials() {
                let single = TropPoly::from_terms(
                    SemiringMode::R,
                    2,
                    [(m.exponents.clone(), TropValue::Finite(m.coeff))],
                )
                .unwrap();
                rhs = rhs.add(&single.pow(l).unwrap()).unwrap();
            }
            assert!(lhs.func_equal(&rhs).unwrap(), "ℓ = {l}");
        }
    }

    #[test]
    fn dominates_examples() {
        let xy = vec![1u32, 1];
        let zero = Rat::zero();
        let x2: Vec<u32> = vec![2, 0];
        let y2: Vec<u32> = vec![0, 2];
        let x: Vec<u32> = vec![1, 0];

        let squares = [(&x2, &zero), (&y2, &zero)];
        assert!(monomial_dominated(SemiringMode::R, (&xy, &zero), &squares));

        let just_x = [(&x, &zero)];
        assert!(monomial_dominated(
            SemiringMode::RPlus,
            (&xy, &zero),
            &just_x
        ));
        assert!(!monomial_dominated(SemiringMode::R, (&xy, &zero), &just_x));
    }

    #[test]
    fn canonicalize_examples() {
        let f = TropPoly::from_ints(SemiringMode::R, 2, &[(&[2, 0], 0), (&[0, 2], 0), (&[1, 1], 0)]);
        assert_eq!(
            f.canonicalize(),
            TropPoly::from_ints(SemiringMode::R, 2, &[(&[2, 0], 0), (&[0, 2], 0)])
        );

        let g_plus =
            TropPoly::from_ints(SemiringMode::RPlus, 2, &[(&[1, 0], 0), (&[1, 1], 0)]);
        assert_eq!(
            g_plus.canonicalize(),
            TropPoly::from_ints(SemiringMode::RPlus, 2, &[(&[1, 0], 0)])
        );

        let g_r = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0), (&[1, 1], 0)]);
        assert_eq!(g_r.canonicalize(), g_r);
    }

    #[test]
    fn func_equal_examples() {
        let f = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0), (&[0, 1], 0)]);
        let sq = f.pow(2).unwrap();
        let direct = TropPoly::from_ints(SemiringMode::R, 2, &[(&[2, 0], 0), (&[0, 2], 0)]);
        assert!(sq.func_equal(&direct).unwrap());

        let x = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0)]);
        let y = TropPoly::from_ints(SemiringMode::R, 2, &[(&[0, 1], 0)]);
        assert!(!x.func_equal(&y).unwrap());

        // Degree-3 power sum = cube of the degree-1 elementary symmetric.
        let psum = TropPoly::from_ints(SemiringMode::R, 2, &[(&[3, 0], 0), (&[0, 3], 0)]);
        let e1 = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0), (&[0, 1], 0)]);
        assert!(psum.func_equal(&e1.pow(3).unwrap()).unwrap());
    }

    #[test]
    fn separating_point_distinguishes() {
        let f = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0), (&[1, 1], 0)]);
        let g = TropPoly::from_ints(SemiringMode::R, 2, &[(&[1, 0], 0)]);
        let point = f.separating_point(&g).unwrap().expect("functions differ");
        let tv: Vec<TropValue> = point.iter().map(|r| TropValue::Finite(*r)).collect();
        assert_ne!(f.eval(&tv).unwrap(), g.eval(&tv).unwrap());

        assert!(f.separating_point(&f).unwrap().is_none());
    }

    #[test]
    fn separating_point_rplus_respects_domain() {
        let f = TropPoly::from_ints(SemiringMode::RPlus, 2, &[(&[2, 0], 0), (&[0, 1], 3)]);
        let g = TropPoly::from_ints(SemiringMode::RPlus, 2, &[(&[2, 0], 0)]);
        let point = f.separating_point(&g).unwrap().expect("functions differ");
        assert!(point.iter().all(|r| !r.is_negative()));
        let tv: Vec<TropValue> = point.iter().map(|r| TropValue::Finite(*r)).collect();
        assert_ne!(f.eval(&tv).unwrap(), g.eval(&tv).unwrap());
    }
}
