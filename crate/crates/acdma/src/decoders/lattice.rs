//! Nearest point of `{a, b}ⁿ` under a linear map.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest `n` decided by plain enumeration.
pub const EXHAUSTIVE_MAX_USERS: usize = 12;

/// Node budget of the sphere decoder.
const SPHERE_NODE_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Nearest {
    pub x: Vec<i8>,
    /// `‖y − A x‖²`.
    pub dist: f64,
    pub examined: u64,
}

/// Candidate `x` for index `idx` in lexicographic order (`x_0` most
/// significant, `sym[0] < sym[1]`).
pub fn candidate(idx: usize, n: usize, sym: [i8; 2]) -> Vec<i8> {
    (0..n).map(|i| sym[idx >> (n - 1 - i) & 1]).collect()
}

/// `‖y − A x‖²` for every `x ∈ {sym}ⁿ`, indexed as in [`candidate`].
pub fn all_distances(a: &DMatrix<f64>, y: &DVector<f64>, sym: [i8; 2]) -> Vec<f64> {
    let n = a.ncols();
    let rows = a.nrows();
    let mut out = Vec::with_capacity(1 << n);
    // residual[d] holds y − Σ_{i<d} a_i x_i along the current path.
    let mut residual = vec![y.as_slice().to_vec(); n + 1];
    let mut idx = 0usize;
    fill(a, sym, 0, &mut residual, &mut idx, rows, &mut out);
    out
}

fn fill(
    a: &DMatrix<f64>,
    sym: [i8; 2],
    depth: usize,
    residual: &mut [Vec<f64>],
    idx: &mut usize,
    rows: usize,
    out: &mut Vec<f64>,
) {
    if depth == a.ncols() {
        out.push(residual[depth].iter().map(|v| v * v).sum());
        *idx += 1;
        return;
    }
    let col = a.column(depth);
    for &s in &sym {
        let s = f64::from(s);
        let (head, tail) = residual.split_at_mut(depth + 1);
        let (src, dst) = (&head[depth], &mut tail[0]);
        for r in 0..rows {
            dst[r] = src[r] - s * col[r];
        }
        fill(a, sym, depth + 1, residual, idx, rows, out);
    }
}

/// Lexicographically smallest minimiser by full enumeration.
pub fn exhaustive(a: &DMatrix<f64>, y: &DVector<f64>, sym: [i8; 2]) -> Nearest {
    let d = all_distances(a, y, sym);
    let (best, &dist) = d
        .iter()
        .enumerate()
        .fold((0, &f64::INFINITY), |acc, (i, v)| if *v < *acc.1 { (i, v) } else { acc });
    Nearest { x: candidate(best, a.ncols(), sym), dist, examined: d.len() as u64 }
}

/// Weight of the regularising rows, relative to the mean squared column norm.
const RIDGE: f64 = 0.1;

/// Exact minimiser by depth-first sphere search on a column-pivoted QR
/// factorisation, visiting children in order of increasing distance.
///
/// Every candidate has the same distance `‖x − c·1‖²` from the alphabet
/// midpoint `c`, so stacking `√μ·(x − c·1)` under the system leaves the
/// minimiser unchanged while making the triangular factor square and well
/// conditioned even when there are more users than rows.
pub fn sphere(a: &DMatrix<f64>, y: &DVector<f64>, sym: [i8; 2]) -> Result<Nearest> {
    let n = a.ncols();
    let rows = a.nrows();
    let mean_norm = a.column_iter().map(|c| c.norm_squared()).sum::<f64>() / n as f64;
    let w = (RIDGE * mean_norm).sqrt();
    let mid = 0.5 * (f64::from(sym[0]) + f64::from(sym[1]));
    let aug = DMatrix::from_fn(rows + n, n, |r, c| match r.checked_sub(rows) {
        None => a[(r, c)],
        Some(i) if i == c => w,
        Some(_) => 0.0,
    });
    let yaug = DVector::from_fn(rows + n, |r, _| if r < rows { y[r] } else { w * mid });
    let qr = aug.col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let mut order = DMatrix::from_fn(1, n, |_, j| j as f64);
    qr.p().permute_columns(&mut order);
    let order: Vec<usize> = order.iter().map(|&v| v as usize).collect();
    let z = q.transpose() * &yaug;
    let rank = r.nrows();

    let mut search = Sphere {
        r: &r,
        z: z.as_slice(),
        rank,
        sym: [f64::from(sym[0]), f64::from(sym[1])],
        x: vec![0.0; n],
        best: f64::INFINITY,
        best_x: None,
        nodes: 0,
    };
    search.descend(n, 0.0)?;
    let Some(xp) = search.best_x else {
        return Err(Error::Numerical("sphere search returned no candidate".into()));
    };
    let mut x = vec![0i8; n];
    for (k, &orig) in order.iter().enumerate() {
        x[orig] = xp[k] as i8;
    }
    let xv = DVector::from_iterator(n, x.iter().map(|&v| f64::from(v)));
    let dist = (y - a * xv).norm_squared();
    Ok(Nearest { x, dist, examined: search.nodes })
}

struct Sphere<'a> {
    r: &'a DMatrix<f64>,
    z: &'a [f64],
    rank: usize,
    sym: [f64; 2],
    x: Vec<f64>,
    best: f64,
    best_x: Option<Vec<f64>>,
    nodes: u64,
}

impl Sphere<'_> {
    /// Assign variable `level − 1` given the ones above it.
    fn descend(&mut self, level: usize, partial: f64) -> Result<()> {
        if level == 0 {
            if partial < self.best {
                self.best = partial;
                self.best_x = Some(self.x.clone());
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > SPHERE_NODE_BUDGET {
            return Err(Error::Budget { work: self.nodes, context: "sphere decoder".into() });
        }
        let k = level - 1;
        if k >= self.rank {
            for s in self.sym {
                self.x[k] = s;
                self.descend(k, partial)?;
            }
            return Ok(());
        }
        let n = self.x.len();
        let c = self.z[k] - (k + 1..n).map(|j| self.r[(k, j)] * self.x[j]).sum::<f64>();
        let rkk = self.r[(k, k)];
        let cost = |s: f64| (c - rkk * s).powi(2);
        let mut opts = [(cost(self.sym[0]), self.sym[0]), (cost(self.sym[1]), self.sym[1])];
        if opts[1].0 < opts[0].0 {
            opts.swap(0, 1);
        }
        for (t, s) in opts {
            let next = partial + t;
            if next >= self.best {
                break;
            }
            self.x[k] = s;
            self.descend(k, next)?;
        }
        Ok(())
    }
}

/// Enumeration for small `n`, sphere search beyond.
pub fn nearest(a: &DMatrix<f64>, y: &DVector<f64>, sym: [i8; 2]) -> Result<Nearest> {
    if a.nrows() != y.len() {
        return Err(Error::Dimension(format!("{} rows against a {}-vector", a.nrows(), y.len())));
    }
    if a.ncols() <= EXHAUSTIVE_MAX_USERS {
        Ok(exhaustive(a, y, sym))
    } else {
        sphere(a, y, sym)
    }
}
