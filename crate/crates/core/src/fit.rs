//! Least-squares parabola detection on sampled graphs.

use crate::attractor::GraphSample;
use crate::scalar::Scalar;

/// `y = a x² + b x + c` with its max-norm residual on the sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ParabolaFit<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub max_residual: f64,
    /// The fitted curve is a straight line (`a` is zero, or negligible in floating mode).
    pub is_line: bool,
}

impl<S: Scalar> ParabolaFit<S> {
    pub fn eval(&self, x: &S) -> S {
        self.a.clone() * x.clone() * x.clone() + self.b.clone() * x.clone() + self.c.clone()
    }
}

/// Solves a square system by Gaussian elimination with partial pivoting;
/// `None` when it is singular.
fn solve<S: Scalar>(mut m: Vec<Vec<S>>, mut rhs: Vec<S>) -> Option<Vec<S>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].is_zero() {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col].clone() / m[col][col].clone();
            for k in col..n {
                let v = m[row][k].clone() - f.clone() * m[col][k].clone();
                m[row][k] = v;
            }
            let v = rhs[row].clone() - f * rhs[col].clone();
            rhs[row] = v;
        }
    }
    let mut out = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc = acc - m[row][k].clone() * out[k].clone();
        }
        out[row] = acc / m[row][row].clone();
    }
    Some(out)
}

/// Fits `y = a x² + b x + c` by ordinary least squares and returns it when the
/// max-norm residual is at most `tol`. Abscissae are centred and scaled to
/// `[-1, 1]` before forming the normal equations. Exact in rational mode.
pub fn detect_parabola<S: Scalar>(sample: &GraphSample<S>, tol: f64) -> Option<ParabolaFit<S>> {
    let pts = &sample.points;
    if pts.len() < 3 {
        return None;
    }
    let (mut lo, mut hi) = (pts[0].0.clone(), pts[0].0.clone());
    for (x, _) in pts {
        lo = lo.min_of(x.clone());
        hi = hi.max_of(x.clone());
    }
    let two = S::from_i64(2);
    let mid = (lo.clone() + hi.clone()) / two.clone();
    let half = (hi - lo) / two.clone();
    if half.is_zero() {
        return None;
    }
    // sums of t^k and t^k y for t = (x − mid)/half
    let mut st = vec![S::zero(); 5];
    let mut sy = vec![S::zero(); 3];
    for (x, y) in pts {
        let t = (x.clone() - mid.clone()) / half.clone();
        let mut pow = S::one();
        for k in 0..5 {
            if k < 3 {
                sy[k] = sy[k].clone() + pow.clone() * y.clone();
            }
            st[k] = st[k].clone() + pow.clone();
            pow = pow * t.clone();
        }
    }
    let m = vec![
        vec![st[4].clone(), st[3].clone(), st[2].clone()],
        vec![st[3].clone(), st[2].clone(), st[1].clone()],
        vec![st[2].clone(), st[1].clone(), st[0].clone()],
    ];
    let sol = solve(m, vec![sy[2].clone(), sy[1].clone(), sy[0].clone()])?;
    let (al, be, ga) = (sol[0].clone(), sol[1].clone(), sol[2].clone());
    let h2 = half.clone() * half.clone();
    let a = al.clone() / h2.clone();
    let b = be.clone() / half.clone() - two * al.clone() * mid.clone() / h2.clone();
    let c = al * mid.clone() * mid.clone() / h2 - be * mid / half.clone() + ga;

    let is_line = if S::EXACT {
        a.is_zero()
    } else {
        (a.clone() * half.clone() * half).to_f64().abs() <= tol
    };
    let mut fit = ParabolaFit {
        a,
        b,
        c,
        max_residual: 0.0,
        is_line,
    };
    let mut worst = S::zero();
    for (x, y) in pts {
        worst = worst.max_of((fit.eval(x) - y.clone()).abs());
    }
    fit.max_residual = worst.to_f64();
    (fit.max_residual <= tol).then_some(fit)
}
