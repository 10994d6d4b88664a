use super::context::Real;
use crate::error::{Error, Result};

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Fails when a pivot falls below `pivot_floor` relative to the largest entry.
pub fn solve(mut a: Vec<Vec<Real>>, mut b: Vec<Real>, pivot_floor: f64) -> Result<Vec<Real>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("solve: non-square system".into()));
    }
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.to_f64().abs())
        .fold(0.0f64, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .cmp_abs(&a[j][col])
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot][col].to_f64().abs() <= pivot_floor * scale {
            return Err(Error::IllConditioned(format!("pivot {col} vanished")));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = Real::with_val(a[row][col].prec(), &a[row][col] / &a[col][col]);
            for k in col..n {
                let sub = Real::with_val(factor.prec(), &factor * &a[col][k]);
                a[row][k] -= sub;
            }
            let sub = Real::with_val(factor.prec(), &factor * &b[col]);
            b[row] -= sub;
        }
    }
    let mut x: Vec<Real> = b.clone();
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= Real::with_val(acc.prec(), &a[row][k] * &x[k]);
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}

/// Least-squares solution of the overdetermined system `rows · x ≈ rhs` via the normal
/// equations; callers run this at raised precision.
pub fn least_squares(rows: &[Vec<Real>], rhs: &[Real], pivot_floor: f64) -> Result<Vec<Real>> {
    let m = rows.first().map(Vec::len).unwrap_or(0);
    let prec = rhs.first().map(Real::prec).unwrap_or(64);
    let mut ata = vec![vec![Real::new(prec); m]; m];
    let mut atb = vec![Real::new(prec); m];
    for (row, y) in rows.iter().zip(rhs) {
        for i in 0..m {
            for j in 0..m {
                ata[i][j] += Real::with_val(prec, &row[i] * &row[j]);
            }
            atb[i] += Real::with_val(prec, &row[i] * y);
        }
    }
    solve(ata, atb, pivot_floor)
}
