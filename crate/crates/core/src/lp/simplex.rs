//! Dense two-phase tableau simplex: Bland's rule picks the entering column,
//! a Harris-style two-pass ratio test the leaving row.

use crate::error::LpError;

const PIVOT_TOL: f64 = 1e-11;
/// Pivots smaller than this fraction of the column's largest entry are
/// refused.
const PIVOT_REL_TOL: f64 = 1e-7;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        Constraint { coeffs, sense, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    Minimize(Vec<f64>),
    Maximize(Vec<f64>),
}

/// `opt c·x` subject to the constraints, with `x_j ≥ 0` unless `free[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
    pub free: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Shadow price of each constraint: the derivative of the optimal
    /// objective with respect to its right-hand side.
    pub duals: Vec<f64>,
}

struct Tableau {
    rows: usize,
    width: usize,
    // row-major B⁻¹A followed by the B⁻¹b column
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.width + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.width + 1) + self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (x, &pr) in row.iter_mut().zip(&pivot_row) {
                *x -= f * pr;
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                *dj -= cb * self.at(i, j);
            }
        }
        d
    }

    /// Runs Bland-rule pivots for `min cost·x` over columns in `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<(), LpError> {
        let limit = 50_000 + 200 * (self.rows + self.width);
        for _ in 0..limit {
            let d = self.reduced_costs(cost);
            let scale = 1.0 + cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let Some(enter) = (0..self.width).find(|&j| allowed[j] && d[j] < -COST_TOL * scale) else {
                return Ok(());
            };
            let col_max = (0..self.rows).map(|i| self.at(i, enter).abs()).fold(0.0f64, f64::max);
            let min_pivot = PIVOT_TOL.max(PIVOT_REL_TOL * col_max);
            // pass 1: the step allowed when every row may go FEAS_TOL negative
            let bound = (0..self.rows)
                .filter(|&i| self.at(i, enter) > min_pivot)
                .map(|i| (self.rhs(i).max(0.0) + FEAS_TOL) / self.at(i, enter))
                .fold(f64::INFINITY, f64::min);
            // pass 2: within that step, the largest pivot
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, enter);
                if a <= min_pivot || self.rhs(i).max(0.0) / a > bound {
                    continue;
                }
                leave = match leave {
                    Some((k, best)) if a < best || (a == best && self.basis[i] > self.basis[k]) => Some((k, best)),
                    _ => Some((i, a)),
                };
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, enter);
        }
        Err(LpError::NumericalFailure("iteration limit reached".into()))
    }
}

/// Solves a small dense linear program.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let (maximize, c) = match &lp.objective {
        Objective::Minimize(c) => (false, c),
        Objective::Maximize(c) => (true, c),
    };
    let n = c.len();
    let m = lp.constraints.len();
    if lp.free.len() != n || lp.constraints.iter().any(|k| k.coeffs.len() != n) {
        return Err(LpError::NumericalFailure("dimension mismatch".into()));
    }

    // structural columns: x⁺ for every variable, x⁻ for free ones
    let mut neg_col = vec![None; n];
    let mut ncols = n;
    for j in 0..n {
        if lp.free[j] {
            neg_col[j] = Some(ncols);
            ncols += 1;
        }
    }
    let mut flip = vec![false; m];
    let mut senses = Vec::with_capacity(m);
    let mut slack_col = vec![None; m];
    for (i, k) in lp.constraints.iter().enumerate() {
        flip[i] = k.rhs < 0.0;
        let sense = match (k.sense, flip[i]) {
            (Sense::Le, true) => Sense::Ge,
            (Sense::Ge, true) => Sense::Le,
            (s, _) => s,
        };
        if sense != Sense::Eq {
            slack_col[i] = Some(ncols);
            ncols += 1;
        }
        senses.push(sense);
    }
    let mut init_col = vec![0; m];
    let mut is_artificial = vec![false; ncols];
    for i in 0..m {
        if senses[i] == Sense::Le {
            init_col[i] = slack_col[i].unwrap();
        } else {
            init_col[i] = ncols;
            is_artificial.push(true);
            ncols += 1;
        }
    }

    let w = ncols + 1;
    let mut t = vec![0.0; m * w];
    for (i, k) in lp.constraints.iter().enumerate() {
        let sign = if flip[i] { -1.0 } else { 1.0 };
        let row = &mut t[i * w..(i + 1) * w];
        for j in 0..n {
            row[j] = sign * k.coeffs[j];
            if let Some(nc) = neg_col[j] {
                row[nc] = -sign * k.coeffs[j];
            }
        }
        if let Some(sc) = slack_col[i] {
            row[sc] = if senses[i] == Sense::Le { 1.0 } else { -1.0 };
        }
        row[init_col[i]] = 1.0;
        row[ncols] = sign * k.rhs;
    }
    let mut tab = Tableau { rows: m, width: ncols, t, basis: init_col.clone() };

    if is_artificial.iter().any(|&a| a) {
        let cost1: Vec<f64> = is_artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        tab.optimize(&cost1, &vec![true; ncols])?;
        let infeas: f64 = (0..m).filter(|&i| is_artificial[tab.basis[i]]).map(|i| tab.rhs(i)).sum();
        let scale = 1.0 + lp.constraints.iter().fold(0.0f64, |s, k| s.max(k.rhs.abs()));
        if infeas > FEAS_TOL * scale {
            return Err(LpError::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if is_artificial[tab.basis[i]] {
                if let Some(j) = (0..ncols).find(|&j| !is_artificial[j] && tab.at(i, j).abs() > 1e-9) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let sign = if maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; ncols];
    for j in 0..n {
        cost[j] = sign * c[j];
        if let Some(nc) = neg_col[j] {
            cost[nc] = -sign * c[j];
        }
    }
    let allowed: Vec<bool> = is_artificial.iter().map(|&a| !a).collect();
    tab.optimize(&cost, &allowed)?;

    let mut col_value = vec![0.0; ncols];
    for i in 0..m {
        col_value[tab.basis[i]] = tab.rhs(i);
    }
    let x: Vec<f64> = (0..n).map(|j| col_value[j] - neg_col[j].map_or(0.0, |nc| col_value[nc])).collect();
    for k in &lp.constraints {
        let lhs: f64 = k.coeffs.iter().zip(&x).map(|(a, b)| a * b).sum();
        let scale = 1.0 + k.rhs.abs() + k.coeffs.iter().zip(&x).map(|(a, b)| (a * b).abs()).sum::<f64>();
        let off = match k.sense {
            Sense::Le => lhs - k.rhs,
            Sense::Ge => k.rhs - lhs,
            Sense::Eq => (lhs - k.rhs).abs(),
        };
        if off > 1e-7 * scale {
            return Err(LpError::NumericalFailure(format!("constraint violated by {off:e}")));
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    let d = tab.reduced_costs(&cost);
    let duals = (0..m)
        .map(|i| {
            let y = -d[init_col[i]];
            let y = if flip[i] { -y } else { y };
            if maximize {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(LpSolution { x, objective, duals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(objective: Objective, constraints: Vec<Constraint>, free: Vec<bool>) -> LinearProgram {
        LinearProgram { objective, constraints, free }
    }

    #[test]
    fn single_variable_lower_bound() {
        let p = lp(Objective::Minimize(vec![1.0]), vec![Constraint::new(vec![1.0], Sense::Ge, 3.0)], vec![true]);
        let s = lp_solve(&p).unwrap();
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let p = lp(
            Objective::Maximize(vec![3.0, 5.0]),
            vec![
                Constraint::new(vec![1.0, 0.0], Sense::Le, 4.0),
                Constraint::new(vec![0.0, 2.0], Sense::Le, 12.0),
                Constraint::new(vec![3.0, 2.0], Sense::Le, 18.0),
            ],
            vec![false, false],
        );
        let s = lp_solve(&p).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-10 && (s.x[1] - 6.0).abs() < 1e-10);
        assert!((s.objective - 36.0).abs() < 1e-10);
        // known shadow prices (0, 1.5, 1)
        assert!(s.duals[0].abs() < 1e-10);
        assert!((s.duals[1] - 1.5).abs() < 1e-10);
        assert!((s.duals[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + y, x + y = 2, x - y ≤ -1 → objective 2
        let p = lp(
            Objective::Minimize(vec![1.0, 1.0]),
            vec![Constraint::new(vec![1.0, 1.0], Sense::Eq, 2.0), Constraint::new(vec![1.0, -1.0], Sense::Le, -1.0)],
            vec![false, false],
        );
        let s = lp_solve(&p).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-10);
        assert!(s.x[0] - s.x[1] <= -1.0 + 1e-10);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(
            Objective::Minimize(vec![1.0]),
            vec![Constraint::new(vec![1.0], Sense::Ge, 2.0), Constraint::new(vec![1.0], Sense::Le, 1.0)],
            vec![false],
        );
        assert_eq!(lp_solve(&p), Err(LpError::Infeasible));
        let p = lp(Objective::Maximize(vec![1.0]), vec![Constraint::new(vec![1.0], Sense::Ge, 0.0)], vec![false]);
        assert_eq!(lp_solve(&p), Err(LpError::Unbounded));
    }

    #[test]
    fn complementary_slackness() {
        let p = lp(
            Objective::Minimize(vec![2.0, 3.0, 1.0]),
            vec![
                Constraint::new(vec![1.0, 1.0, 1.0], Sense::Ge, 4.0),
                Constraint::new(vec![1.0, 0.0, 2.0], Sense::Le, 5.0),
                Constraint::new(vec![0.0, 1.0, -1.0], Sense::Ge, -1.0),
            ],
            vec![false, false, false],
        );
        let s = lp_solve(&p).unwrap();
        // dual objective equals primal objective
        let dual_obj: f64 = p.constraints.iter().zip(&s.duals).map(|(k, y)| k.rhs * y).sum();
        assert!((dual_obj - s.objective).abs() < 1e-8);
        for (k, y) in p.constraints.iter().zip(&s.duals) {
            let lhs: f64 = k.coeffs.iter().zip(&s.x).map(|(a, x)| a * x).sum();
            assert!((y * (lhs - k.rhs)).abs() < 1e-8);
        }
    }

    #[test]
    fn nearly_parallel_equality_columns() {
        let rows = [
            [1.0, 0.0, 0.0, 0.32436255519255164, 0.08827522915625294, 0.3243625598837044, 0.08827518477536465, 0.32436272427822904],
            [0.0, 1.0, 0.0, 0.5235924970609398, 0.29618050185846834, 0.5235924901708092, 0.2961804877390794, 0.5235922487163511],
            [0.0, 0.0, 1.0, 0.1520449477465086, 0.6155442689852787, 0.15204494994548642, 0.615544327485556, 0.15204502700541983],
        ];
        let rhs = [0.32436272427822904, 0.5235922487163511, 0.15204502700541983];
        let cost = vec![10.103119084147776, 8.287326450011122, 8.535527695565804, 8.495520431997955, 7.331561238833284, 8.495520168083969, 7.331561246515081, 8.495520065234588];
        let p = lp(
            Objective::Minimize(cost),
            rows.iter().zip(rhs).map(|(r, b)| Constraint::new(r.to_vec(), Sense::Eq, b)).collect(),
            vec![false; 8],
        );
        let s = lp_solve(&p).unwrap();
        for k in &p.constraints {
            let lhs: f64 = k.coeffs.iter().zip(&s.x).map(|(a, x)| a * x).sum();
            assert!((lhs - k.rhs).abs() < 1e-9, "{lhs} vs {} at {:?}", k.rhs, s.x);
        }
        assert!(s.objective <= 8.495520065234588 + 1e-9);
    }
}
