//! Exact decision of "does `Ax = 0` have a nonnegative, nonzero solution".
//!
//! Nontriviality is encoded as the normalization `Σx = 1`, and the resulting
//! LP `{Ax = 0, Σx = 1, x ≥ 0}` is solved by a phase-one simplex over exact
//! rationals with Bland's rule. When the phase-one optimum is positive the
//! final duals give a vector `y` with `yᵀA > 0` componentwise, which rules
//! out any nonzero `x ≥ 0` with `Ax = 0`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// A homogeneous system: every equation is an integer linear form equal to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<String>,
    equations: Vec<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub label: String,
    /// Dense coefficients, one per declared variable.
    pub coefficients: Vec<i64>,
}

impl LinearSystem {
    pub fn new(variables: Vec<String>) -> Self {
        LinearSystem {
            variables,
            equations: Vec::new(),
        }
    }

    /// Adds `Σ coefficients[k] · x_k = 0`. Panics if the length does not
    /// match the declared variables.
    pub fn push(&mut self, label: impl Into<String>, coefficients: Vec<i64>) {
        assert_eq!(
            coefficients.len(),
            self.variables.len(),
            "coefficient for undeclared variable"
        );
        self.equations.push(Equation {
            label: label.into(),
            coefficients,
        });
    }

    /// Adds an equation from sparse `(variable, coefficient)` terms; repeated
    /// variables accumulate.
    pub fn push_terms(
        &mut self,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, i64)>,
    ) {
        let mut coefficients = vec![0; self.variables.len()];
        for (v, c) in terms {
            coefficients[v] += c;
        }
        self.push(label, coefficients);
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// `Ax` evaluated exactly.
    pub fn residuals(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.equations
            .iter()
            .map(|eq| {
                eq.coefficients
                    .iter()
                    .zip(x)
                    .fold(BigRational::zero(), |acc, (&c, v)| {
                        acc + v * BigRational::from_integer(c.into())
                    })
            })
            .collect()
    }

    /// True when `x` solves every equation exactly, is nonnegative and not all zero.
    pub fn is_nontrivial_solution(&self, x: &[BigRational]) -> bool {
        x.len() == self.variables.len()
            && x.iter().all(|v| !v.is_negative())
            && x.iter().any(|v| v.is_positive())
            && self.residuals(x).iter().all(Zero::is_zero)
    }

    /// `yᵀA`, one entry per variable.
    pub fn combine(&self, y: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.variables.len()];
        for (eq, yi) in self.equations.iter().zip(y) {
            for (o, &c) in out.iter_mut().zip(&eq.coefficients) {
                if c != 0 {
                    *o += yi * BigRational::from_integer(c.into());
                }
            }
        }
        out
    }

    pub fn is_certificate(&self, y: &[BigRational]) -> bool {
        y.len() == self.equations.len() && self.combine(y).iter().all(Signed::is_positive)
    }

    /// Copy with equation `index` multiplied by `factor`.
    pub fn scaled(&self, index: usize, factor: i64) -> LinearSystem {
        let mut out = self.clone();
        for c in &mut out.equations[index].coefficients {
            *c *= factor;
        }
        out
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(
                f,
                "{}: {}",
                eq.label,
                format_form(&self.variables, &eq.coefficients)
            )?;
        }
        Ok(())
    }
}

pub fn format_form(variables: &[String], coefficients: &[i64]) -> String {
    let mut out = String::new();
    for (v, &c) in variables.iter().zip(coefficients).filter(|(_, &c)| c != 0) {
        match (out.is_empty(), c < 0) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        if c.unsigned_abs() != 1 {
            out.push_str(&format!("{}·", c.unsigned_abs()));
        }
        out.push_str(v);
    }
    if out.is_empty() {
        out.push('0');
    }
    out.push_str(" = 0");
    out
}

/// Exact nonnegative solution vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector {
    pub entries: Vec<BigRational>,
}

impl RationalVector {
    pub fn uniform(n: usize) -> Self {
        let v = BigRational::new(BigInt::one(), BigInt::from(n));
        RationalVector {
            entries: vec![v; n],
        }
    }

    pub fn sum(&self) -> BigRational {
        self.entries.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(fraction).collect()
    }
}

/// `"2/3"`, or `"2"` for integers.
pub fn fraction(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A vector `y` over the equations with every component of `yᵀA` strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub multipliers: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RationalVector),
    Infeasible(Certificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether `sys` has a nonnegative solution with `Σx = 1`.
///
/// Feasible results are checked by substitution and infeasible ones by
/// evaluating the certificate; a failed check panics, as it can only be a
/// solver bug.
pub fn solve_nonneg_nontrivial(sys: &LinearSystem) -> Feasibility {
    let n = sys.variables.len();
    if n == 0 {
        return Feasibility::Infeasible(Certificate {
            multipliers: vec![BigRational::zero(); sys.equations.len()],
        });
    }
    if sys.equations.is_empty() {
        return Feasibility::Feasible(RationalVector::uniform(n));
    }

    let result = PhaseOne::new(sys).run();
    match &result {
        Feasibility::Feasible(x) => {
            assert!(
                sys.is_nontrivial_solution(&x.entries),
                "simplex returned a non-solution"
            );
            assert_eq!(x.sum(), BigRational::one());
        }
        Feasibility::Infeasible(c) => {
            assert!(
                sys.is_certificate(&c.multipliers),
                "simplex returned an invalid certificate"
            );
        }
    }
    result
}

/// Dense tableau for `min Σa` subject to `[A; 1ᵀ] x + a = (0, 1)`, `x, a ≥ 0`.
struct PhaseOne {
    rows: usize,
    structural: usize,
    /// `rows` rows of `structural + rows` coefficients followed by the rhs.
    tableau: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
}

impl PhaseOne {
    fn new(sys: &LinearSystem) -> Self {
        let m = sys.equations.len();
        let n = sys.variables.len();
        let rows = m + 1;
        let width = n + rows + 1;
        let mut tableau = Vec::with_capacity(rows);
        for (r, eq) in sys.equations.iter().enumerate() {
            let mut row = vec![BigRational::zero(); width];
            for (k, &c) in eq.coefficients.iter().enumerate() {
                row[k] = BigRational::from_integer(c.into());
            }
            row[n + r] = BigRational::one();
            tableau.push(row);
        }
        let mut norm = vec![BigRational::one(); n];
        norm.resize(width, BigRational::zero());
        norm[n + m] = BigRational::one();
        norm[width - 1] = BigRational::one();
        tableau.push(norm);
        PhaseOne {
            rows,
            structural: n,
            tableau,
            basis: (n..n + rows).collect(),
        }
    }

    fn columns(&self) -> usize {
        self.structural + self.rows
    }

    fn cost(&self, col: usize) -> BigRational {
        if col >= self.structural {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    }

    fn reduced_cost(&self, col: usize) -> BigRational {
        let mut r = self.cost(col);
        for (row, &b) in self.tableau.iter().zip(&self.basis) {
            if !row[col].is_zero() {
                r -= self.cost(b) * &row[col];
            }
        }
        r
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.tableau[pr][pc].clone();
        for v in &mut self.tableau[pr] {
            *v /= &p;
        }
        let pivot_row = self.tableau[pr].clone();
        for (r, row) in self.tableau.iter_mut().enumerate() {
            if r == pr || row[pc].is_zero() {
                continue;
            }
            let f = row[pc].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[pr] = pc;
    }

    fn run(mut self) -> Feasibility {
        let rhs = self.columns();
        loop {
            // Bland: lowest-index improving column
            let entering = (0..self.columns()).find(|&c| self.reduced_cost(c).is_negative());
            let Some(pc) = entering else { break };
            let mut leave: Option<(usize, BigRational)> = None;
            for r in 0..self.rows {
                let a = &self.tableau[r][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.tableau[r][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            // the phase-one objective is bounded below by zero
            let (pr, _) = leave.expect("phase one is never unbounded");
            self.pivot(pr, pc);
        }

        let objective = self
            .basis
            .iter()
            .zip(&self.tableau)
            .filter(|(&b, _)| b >= self.structural)
            .fold(BigRational::zero(), |acc, (_, row)| acc + &row[rhs]);

        if objective.is_zero() {
            let mut x = vec![BigRational::zero(); self.structural];
            for (&b, row) in self.basis.iter().zip(&self.tableau) {
                if b < self.structural {
                    x[b] = row[rhs].clone();
                }
            }
            Feasibility::Feasible(RationalVector { entries: x })
        } else {
            // dual of row k: z_k = 1 - reduced cost of artificial k; y = -z on equation rows
            let m = self.rows - 1;
            let multipliers = (0..m)
                .map(|k| self.reduced_cost(self.structural + k) - BigRational::one())
                .collect();
            Feasibility::Infeasible(Certificate { multipliers })
        }
    }
}

/// Scales a nonnegative rational vector by the lcm of its denominators.
pub fn integer_scale(x: &RationalVector) -> Vec<BigInt> {
    let lcm = x
        .entries
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    x.entries
        .iter()
        .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
        .collect()
}
