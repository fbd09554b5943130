//! Dense two-phase simplex with Bland's rule, for the small minimax LPs.

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, PartialEq)]
pub(crate) enum LpError {
    Infeasible,
    Unbounded,
    Stalled,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize, obj: &mut [f64]) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let k = row[col];
                if k != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= k * pv;
                    }
                }
            }
        }
        let k = obj[col];
        if k != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= k * pv;
            }
        }
        self.basis[r] = col;
    }

    /// Runs simplex iterations on the reduced-cost row `obj` over columns `< allowed`.
    fn optimize(&mut self, obj: &mut [f64], allowed: usize) -> Result<(), LpError> {
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column
            let Some(col) = (0..allowed).find(|&j| obj[j] < -EPS) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - EPS || (ratio <= br + EPS && self.basis[r] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, r, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, col, obj);
        }
        Err(LpError::Stalled)
    }
}

/// Minimizes `c.x` subject to `a x <= b`, `x >= 0`.
pub(crate) fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, LpError> {
    let nv = c.len();
    let m = a.len();
    let n_art = b.iter().filter(|&&v| v < 0.0).count();
    let width = nv + m + n_art;
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        width,
    };
    let mut art = nv + m;
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let mut r = vec![0.0; width + 1];
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        for (j, &v) in row.iter().enumerate() {
            r[j] = sign * v;
        }
        r[nv + i] = sign;
        r[width] = sign * bi;
        if bi < 0.0 {
            r[art] = 1.0;
            t.basis.push(art);
            art += 1;
        } else {
            t.basis.push(nv + i);
        }
        t.rows.push(r);
    }

    if n_art > 0 {
        // phase 1: minimize the sum of artificials
        let mut obj = vec![0.0; width + 1];
        for j in nv + m..width {
            obj[j] = 1.0;
        }
        for r in 0..m {
            if t.basis[r] >= nv + m {
                for (o, v) in obj.iter_mut().zip(&t.rows[r]) {
                    *o -= v;
                }
            }
        }
        t.optimize(&mut obj, width)?;
        if -obj[width] > 1e-8 {
            return Err(LpError::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= nv + m {
                if let Some(col) = (0..nv + m).find(|&j| t.rows[r][j].abs() > EPS) {
                    t.pivot(r, col, &mut obj);
                }
            }
        }
    }

    let mut obj = vec![0.0; width + 1];
    obj[..nv].copy_from_slice(c);
    for r in 0..m {
        let bv = t.basis[r];
        let k = obj[bv];
        if k != 0.0 {
            for (o, v) in obj.iter_mut().zip(&t.rows[r]) {
                *o -= k * v;
            }
        }
    }
    t.optimize(&mut obj, nv + m)?;

    let mut x = vec![0.0; nv];
    for r in 0..m {
        if t.basis[r] < nv {
            x[t.basis[r]] = t.rhs(r);
        }
    }
    Ok(x)
}
