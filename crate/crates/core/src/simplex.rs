//! Dense two-phase simplex for `maximize c·x  s.t.  A x = b, x >= 0`.
//!
//! Pivoting follows Bland's rule, so the method terminates on degenerate
//! problems at the cost of speed; intended for a few dozen variables.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T: Real> LpOutcome<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Equality-form linear program over non-negative variables.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
}

impl<T: Real> LinearProgram<T> {
    pub fn new(objective: Vec<T>) -> Self {
        Self { objective, rows: Vec::new(), rhs: Vec::new() }
    }

    /// Adds `row · x = rhs`.
    pub fn equality(mut self, row: Vec<T>, rhs: T) -> Self {
        assert_eq!(row.len(), self.objective.len(), "constraint width");
        self.rows.push(row);
        self.rhs.push(rhs);
        self
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(&self) -> LpOutcome<T> {
        maximize(&self.objective, &self.rows, &self.rhs)
    }
}

struct Tableau<T> {
    // m rows of width `width + 1`, last column is the right-hand side
    t: Vec<Vec<T>>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Real> Tableau<T> {
    fn rhs(&self, i: usize) -> T {
        self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == T::zero() {
                continue;
            }
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                *v -= f * *pr;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[T], j: usize) -> T {
        let mut z = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            z += cost[b] * self.t[i][j];
        }
        cost[j] - z
    }

    /// Runs the simplex loop on columns `< allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[T], allowed: usize, eps: T) -> bool {
        loop {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j) > eps);
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a > eps {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - eps || (ratio <= lr + eps && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves `maximize c·x` subject to `rows · x = rhs`, `x >= 0`.
pub fn maximize<T: Real>(c: &[T], rows: &[Vec<T>], rhs: &[T]) -> LpOutcome<T> {
    let n = c.len();
    let m = rows.len();
    assert_eq!(m, rhs.len(), "constraint count");
    let scale = rows
        .iter()
        .flatten()
        .chain(rhs)
        .fold(T::one(), |acc, v| acc.max(v.abs()));
    let eps = T::epsilon().sqrt() * T::lit(1e-3) * scale;

    // artificial variables n..n+m make the all-artificial basis feasible
    let width = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), n, "constraint width");
        let flip = rhs[i] < T::zero();
        let sgn = if flip { -T::one() } else { T::one() };
        let mut r: Vec<T> = row.iter().map(|&v| v * sgn).collect();
        r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        r.push(rhs[i] * sgn);
        t.push(r);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), width };

    let mut phase1 = vec![T::zero(); width];
    for v in phase1.iter_mut().skip(n) {
        *v = -T::one();
    }
    tab.optimize(&phase1, width, eps);
    let infeasibility: T = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.rhs(i)).sum();
    if infeasibility > eps * T::lit(10.0) {
        return LpOutcome::Infeasible;
    }

    // drive remaining (zero-valued) artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.basis.contains(&j) && tab.t[i][j].abs() > eps) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(T::zero(), m));
    if !tab.optimize(&cost, n, eps) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).max(T::zero());
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| *a * *b).sum();
    LpOutcome::Optimal { x, value }
}
