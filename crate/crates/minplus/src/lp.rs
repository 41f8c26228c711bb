//! Exact rational linear programming.
//!
//! A small two-phase simplex over `BigRational` with Bland's rule, used to
//! decide monomial domination and to extract separating points. Problems
//! here have at most a few hundred variables and a handful of rows, so a
//! dense dictionary is plenty.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::semiring::Rat;

/// `maximize c·x  subject to  A x ≤ b, x ≥ 0`.
#[derive(Debug, Clone)]
pub struct StandardLp {
    /// Row-major constraint matrix, `rows × cols`.
    pub a: Vec<Vec<BigRational>>,
    pub b: Vec<BigRational>,
    pub c: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// Optimal value and an optimal assignment of the original variables.
    Optimal(BigRational, Vec<BigRational>),
    Infeasible,
    Unbounded,
}

pub fn big(r: &Rat) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn big_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dictionary: `x_basis[i] = rhs[i] - Σ_j tab[i][j] · x_nonbasis[j]`,
/// objective `z = obj0 + Σ_j obj[j] · x_nonbasis[j]`.
struct Dictionary {
    tab: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    obj: Vec<BigRational>,
    obj0: BigRational,
    basis: Vec<usize>,
    nonbasis: Vec<usize>,
}

impl Dictionary {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tab[row][col].clone();
        debug_assert!(!p.is_zero());

        // Rewrite the pivot row so the entering variable is basic.
        let inv = BigRational::one() / &p;
        for j in 0..self.tab[row].len() {
            if j == col {
                self.tab[row][j] = inv.clone();
            } else {
                self.tab[row][j] = &self.tab[row][j] * &inv;
            }
        }
        self.rhs[row] = &self.rhs[row] * &inv;

        // Substitute into the other rows.
        for i in 0..self.tab.len() {
            if i == row {
                continue;
            }
            let factor = std::mem::replace(&mut self.tab[i][col], BigRational::zero());
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.tab[i].len() {
                let delta = &factor * &self.tab[row][j];
                if j == col {
                    self.tab[i][j] = -delta;
                } else {
                    self.tab[i][j] = &self.tab[i][j] - delta;
                }
            }
            self.rhs[i] = &self.rhs[i] - &factor * &self.rhs[row];
        }

        // Substitute into the objective.
        let factor = std::mem::replace(&mut self.obj[col], BigRational::zero());
        if !factor.is_zero() {
            for j in 0..self.obj.len() {
                let delta = &factor * &self.tab[row][j];
                if j == col {
                    self.obj[j] = -delta;
                } else {
                    self.obj[j] = &self.obj[j] - delta;
                }
            }
            self.obj0 = &self.obj0 + &factor * &self.rhs[row];
        }

        std::mem::swap(&mut self.basis[row], &mut self.nonbasis[col]);
    }

    /// Bland's rule: entering = smallest-id improving nonbasic, leaving =
    /// min-ratio row with smallest basic id on ties. Returns false when
    /// optimal, error when unbounded.
    fn improve(&mut self) -> Result<bool, ()> {
        let mut entering: Option<usize> = None;
        for (j, cj) in self.obj.iter().enumerate() {
            if cj.is_positive() {
                match entering {
                    Some(e) if self.nonbasis[e] <= self.nonbasis[j] => {}
                    _ => entering = Some(j),
                }
            }
        }
        let Some(e) = entering else {
            return Ok(false);
        };

        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..self.tab.len() {
            if self.tab[i][e].is_positive() {
                let ratio = &self.rhs[i] / &self.tab[i][e];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(());
        };
        self.pivot(r, e);
        Ok(true)
    }

    fn run(&mut self) -> Result<(), ()> {
        while self.improve()? {}
        Ok(())
    }
}

/// Solves the standard-form LP exactly.
pub fn solve(lp: &StandardLp) -> LpOutcome {
    let m = lp.b.len();
    let n = lp.c.len();
    debug_assert!(lp.a.iter().all(|row| row.len() == n));

    // Variable ids: 0..n originals, n..n+m slacks, n+m the phase-1 helper.
    let mut dict = Dictionary {
        tab: lp.a.clone(),
        rhs: lp.b.clone(),
        obj: lp.c.clone(),
        obj0: BigRational::zero(),
        basis: (n..n + m).collect(),
        nonbasis: (0..n).collect(),
    };

    if dict.rhs.iter().any(|r| r.is_negative()) {
        // Phase 1: maximize -x0 with x0 added to every row.
        let x0 = n + m;
        for row in dict.tab.iter_mut() {
            row.push(-BigRational::one());
        }
        let saved_obj = std::mem::replace(&mut dict.obj, vec![BigRational::zero(); n + 1]);
        dict.obj[n] = -BigRational::one();
        dict.nonbasis.push(x0);

        // One special pivot on the most negative row makes the dictionary
        // feasible.
        let worst = (0..m)
            .min_by(|&i, &j| dict.rhs[i].cmp(&dict.rhs[j]))
            .expect("at least one row");
        dict.pivot(worst, n);

        if dict.run().is_err() {
            unreachable!("phase-1 objective is bounded above by zero");
        }
        if dict.obj0.is_negative() {
            return LpOutcome::Infeasible;
        }

        // Drive x0 out of the basis if it is stuck there at value zero.
        if let Some(row) = dict.basis.iter().position(|&v| v == x0) {
            let col = (0..dict.nonbasis.len()).find(|&j| !dict.tab[row][j].is_zero());
            match col {
                Some(col) => dict.pivot(row, col),
                None => {
                    // Row reads x0 = 0 with no dependencies: drop it.
                    dict.tab.remove(row);
                    dict.rhs.remove(row);
                    dict.basis.remove(row);
                }
            }
        }

        // Delete the x0 column and restore the real objective expressed in
        // the current nonbasic variables.
        let col = dict
            .nonbasis
            .iter()
            .position(|&v| v == x0)
            .expect("x0 is nonbasic now");
        dict.nonbasis.remove(col);
        for row in dict.tab.iter_mut() {
            row.remove(col);
        }
        dict.obj = vec![BigRational::zero(); dict.nonbasis.len()];
        dict.obj0 = BigRational::zero();
        let orig = |var: usize| -> BigRational {
            if var < n {
                saved_obj[var].clone()
            } else {
                BigRational::zero()
            }
        };
        for (j, &var) in dict.nonbasis.iter().enumerate() {
            dict.obj[j] = orig(var);
        }
        for (i, &var) in dict.basis.iter().enumerate() {
            let coeff = orig(var);
            if coeff.is_zero() {
                continue;
            }
            dict.obj0 = &dict.obj0 + &coeff * &dict.rhs[i];
            for j in 0..dict.nonbasis.len() {
                let delta = &coeff * &dict.tab[i][j];
                dict.obj[j] = &dict.obj[j] - delta;
            }
        }
    }

    if dict.run().is_err() {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![BigRational::zero(); n];
    for (i, &var) in dict.basis.iter().enumerate() {
        if var < n {
            x[var] = dict.rhs[i].clone();
        }
    }
    LpOutcome::Optimal(dict.obj0.clone(), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        big_int(n)
    }

    #[test]
    fn basic_maximization() {
        // max x + y  s.t.  x + 2y ≤ 4, 3x + y ≤ 6 → x = 8/5, y = 6/5.
        let lp = StandardLp {
            a: vec![vec![r(1), r(2)], vec![r(3), r(1)]],
            b: vec![r(4), r(6)],
            c: vec![r(1), r(1)],
        };
        match solve(&lp) {
            LpOutcome::Optimal(v, x) => {
                assert_eq!(v, BigRational::new(BigInt::from(14), BigInt::from(5)));
                assert_eq!(x[0], BigRational::new(BigInt::from(8), BigInt::from(5)));
                assert_eq!(x[1], BigRational::new(BigInt::from(6), BigInt::from(5)));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        // x ≤ -1 with x ≥ 0.
        let lp = StandardLp {
            a: vec![vec![r(1)]],
            b: vec![r(-1)],
            c: vec![r(0)],
        };
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let lp = StandardLp {
            a: vec![vec![r(-1)]],
            b: vec![r(1)],
            c: vec![r(1)],
        };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn phase_one_then_two() {
        // max -x  s.t.  -x ≤ -2 (i.e. x ≥ 2) → x = 2.
        let lp = StandardLp {
            a: vec![vec![r(-1)]],
            b: vec![r(-2)],
            c: vec![r(-1)],
        };
        match solve(&lp) {
            LpOutcome::Optimal(v, x) => {
                assert_eq!(v, r(-2));
                assert_eq!(x[0], r(2));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn equality_via_two_inequalities() {
        // x + y = 1, x - y ≤ 0, max x → x = y = 1/2.
        let lp = StandardLp {
            a: vec![
                vec![r(1), r(1)],
                vec![r(-1), r(-1)],
                vec![r(1), r(-1)],
            ],
            b: vec![r(1), r(-1), r(0)],
            c: vec![r(1), r(0)],
        };
        match solve(&lp) {
            LpOutcome::Optimal(v, _) => {
                assert_eq!(v, BigRational::new(BigInt::from(1), BigInt::from(2)));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
