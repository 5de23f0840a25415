//! Dense two-phase primal simplex for small linear programs.
//!
//! Solves `min c'x` subject to linear rows and `x >= 0`. Entering columns are
//! chosen by most negative reduced cost; after a run of degenerate pivots
//! the rule switches to the lowest eligible index until progress resumes.

const TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coef: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            objective: vec![0.0; vars],
            rows: Vec::new(),
        }
    }

    pub fn add_var(&mut self) -> usize {
        self.vars += 1;
        self.objective.push(0.0);
        self.vars - 1
    }

    pub fn add(&mut self, coef: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push(Row { coef, cmp, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    width: usize,
    /// `m` constraint rows, then the phase-2 and phase-1 objective rows.
    /// Column `width - 1` holds the right-hand side.
    t: Vec<f64>,
    basis: Vec<usize>,
    artificial_start: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn build(lp: &Lp) -> Self {
        let m = lp.rows.len();
        let n = lp.vars;
        let slacks = lp.rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
        // Every row gets an artificial unless its slack can start basic.
        let artificial_start = n + slacks;
        let mut needs_art = Vec::with_capacity(m);
        for r in &lp.rows {
            let flip = r.rhs < 0.0;
            let cmp = match (r.cmp, flip) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (c, _) => c,
            };
            needs_art.push(cmp != Cmp::Le);
        }
        let arts = needs_art.iter().filter(|&&b| b).count();
        let width = artificial_start + arts + 1;
        let mut t = vec![0.0; (m + 2) * width];
        let mut basis = vec![0; m];
        let mut slack = n;
        let mut art = artificial_start;
        for (i, r) in lp.rows.iter().enumerate() {
            let sign = if r.rhs < 0.0 { -1.0 } else { 1.0 };
            let row = &mut t[i * width..(i + 1) * width];
            for &(j, v) in &r.coef {
                row[j] += sign * v;
            }
            row[width - 1] = sign * r.rhs;
            if r.cmp != Cmp::Eq {
                let s = if r.cmp == Cmp::Le { 1.0 } else { -1.0 };
                row[slack] = sign * s;
                if !needs_art[i] {
                    basis[i] = slack;
                }
                slack += 1;
            }
            if needs_art[i] {
                row[art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
        let obj = m * width;
        for (j, &c) in lp.objective.iter().enumerate() {
            t[obj + j] = c;
        }
        // Phase-1 objective: sum of artificials, priced out of the basis.
        let p1 = (m + 1) * width;
        for i in 0..m {
            if basis[i] >= artificial_start {
                for c in 0..width {
                    if c < artificial_start || c == width - 1 {
                        t[p1 + c] -= t[i * width + c];
                    }
                }
            }
        }
        Self {
            m,
            width,
            t,
            basis,
            artificial_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let pv = self.t[r * w + c];
        for k in 0..w {
            self.t[r * w + k] /= pv;
        }
        let prow: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m + 2 {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f.abs() < 1e-15 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for k in 0..w {
                row[k] -= f * prow[k];
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Optimize the given objective row over columns `< limit`.
    /// Returns false when unbounded.
    fn optimize(&mut self, obj_row: usize, limit: usize) -> bool {
        let w = self.width;
        let mut streak = 0usize;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = -TOL;
            for c in 0..limit {
                let d = self.at(obj_row, c);
                if d < best {
                    enter = Some(c);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, c);
                if a > TOL {
                    let ratio = self.at(r, w - 1) / a;
                    match leave {
                        Some((lr, lv))
                            if ratio > lv + TOL
                                || (ratio > lv - TOL && self.basis[r] > self.basis[lr]) => {}
                        _ => leave = Some((r, ratio)),
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return false;
            };
            streak = if ratio.abs() < TOL { streak + 1 } else { 0 };
            self.pivot(r, c);
        }
    }

    fn run(mut self, lp: &Lp) -> LpOutcome {
        let w = self.width;
        let p1 = self.m + 1;
        if self.artificial_start < w - 1 {
            self.optimize(p1, w - 1);
            if -self.at(p1, w - 1) > 1e-7 * (1.0 + self.rhs_scale()) {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials out of the basis where possible.
            for r in 0..self.m {
                if self.basis[r] >= self.artificial_start {
                    if let Some(c) =
                        (0..self.artificial_start).find(|&c| self.at(r, c).abs() > 1e-7)
                    {
                        self.pivot(r, c);
                    }
                }
            }
        }
        if !self.optimize(self.m, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; lp.vars];
        for r in 0..self.m {
            if self.basis[r] < lp.vars {
                x[self.basis[r]] = self.at(r, w - 1);
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { x, value }
    }

    fn rhs_scale(&self) -> f64 {
        (0..self.m)
            .map(|r| self.at(r, self.width - 1).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(o: LpOutcome) -> f64 {
        match o {
            LpOutcome::Optimal { value, .. } => value,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = Lp::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.add(vec![(0, 1.0)], Cmp::Le, 4.0);
        lp.add(vec![(1, 2.0)], Cmp::Le, 12.0);
        lp.add(vec![(0, 3.0), (1, 2.0)], Cmp::Le, 18.0);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert!((value + 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn ge_and_eq_rows() {
        // min x + y, x + y >= 2, x - y = 1 -> 2
        let mut lp = Lp::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add(vec![(0, 1.0), (1, 1.0)], Cmp::Ge, 2.0);
        lp.add(vec![(0, 1.0), (1, -1.0)], Cmp::Eq, 1.0);
        assert!((value(lp.solve()) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs() {
        // min x, -x <= -3 -> 3
        let mut lp = Lp::new(1);
        lp.objective = vec![1.0];
        lp.add(vec![(0, -1.0)], Cmp::Le, -3.0);
        assert!((value(lp.solve()) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.objective = vec![1.0];
        lp.add(vec![(0, 1.0)], Cmp::Le, 1.0);
        lp.add(vec![(0, 1.0)], Cmp::Ge, 2.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = Lp::new(1);
        lp.objective = vec![-1.0];
        lp.add(vec![(0, 1.0)], Cmp::Ge, 2.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }
}
