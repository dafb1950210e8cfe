//! Ordinary least squares on the design encoding, via the normal equations
//! with partial-pivot Gaussian elimination. Small systems only (the design
//! width is bounded by the column count).

use crate::eval::Design;

pub(crate) struct OlsFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub residual_std: f64,
}

/// None when the normal equations are singular (collinear design) or there
/// are no residual degrees of freedom; callers fall back to a global model.
pub(crate) fn solve(design: &Design, y: &[f64]) -> Option<OlsFit> {
    let n = design.n_rows;
    let p = design.width + 1; // + intercept
    if n < p {
        return None;
    }
    // Normal equations over the augmented design [x, 1].
    let mut ata = vec![0.0; p * p];
    let mut aty = vec![0.0; p];
    for (i, &target) in y.iter().enumerate().take(n) {
        let row = design.row(i);
        for a in 0..p {
            let xa = if a < design.width { row[a] } else { 1.0 };
            aty[a] += xa * target;
            for b in a..p {
                let xb = if b < design.width { row[b] } else { 1.0 };
                ata[a * p + b] += xa * xb;
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            ata[a * p + b] = ata[b * p + a];
        }
    }

    let beta = gaussian_solve(&mut ata, &mut aty, p)?;
    let mut sse = 0.0;
    for (i, &target) in y.iter().enumerate().take(n) {
        let row = design.row(i);
        let pred: f64 = row.iter().zip(&beta).map(|(x, w)| x * w).sum::<f64>() + beta[p - 1];
        sse += (target - pred) * (target - pred);
    }
    let dof = n - p;
    let residual_std = if dof == 0 {
        0.0
    } else {
        (sse.max(0.0) / dof as f64).sqrt()
    };
    Some(OlsFit {
        weights: beta[..p - 1].to_vec(),
        intercept: beta[p - 1],
        residual_std,
    })
}

fn gaussian_solve(a: &mut [f64], b: &mut [f64], p: usize) -> Option<Vec<f64>> {
    for col in 0..p {
        let mut pivot = col;
        for r in col + 1..p {
            if a[r * p + col].abs() > a[pivot * p + col].abs() {
                pivot = r;
            }
        }
        if a[pivot * p + col].abs() < 1e-10 {
            return None;
        }
        if pivot != col {
            for c in 0..p {
                a.swap(col * p + c, pivot * p + c);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * p + col];
        for r in col + 1..p {
            let factor = a[r * p + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for c in col..p {
                a[r * p + c] -= factor * a[col * p + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; p];
    for col in (0..p).rev() {
        let mut acc = b[col];
        for c in col + 1..p {
            acc -= a[col * p + c] * x[c];
        }
        x[col] = acc / a[col * p + col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_planted_line() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64 * 0.25 - 2.0, ((i * 7) % 5) as f64 - 2.0])
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 3.0 * r[0] - 1.5 * r[1] + 0.75)
            .collect();
        let design = Design::from_rows(rows);
        let fit = solve(&design, &y).unwrap();
        assert!((fit.weights[0] - 3.0).abs() < 1e-9);
        assert!((fit.weights[1] + 1.5).abs() < 1e-9);
        assert!((fit.intercept - 0.75).abs() < 1e-9);
        assert!(fit.residual_std < 1e-9);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let design = Design::from_rows(rows);
        assert!(solve(&design, &y).is_none());
    }

    #[test]
    fn underdetermined_is_rejected() {
        let design = Design::from_rows(vec![vec![1.0, 2.0]]);
        assert!(solve(&design, &[1.0]).is_none());
    }
}
