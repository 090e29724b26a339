use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 60;

/// Singular values of `a` in descending order, `min(rows, cols)` of them.
///
/// One-sided (Hestenes) Jacobi: plane rotations orthogonalize the columns of
/// the taller orientation of `a`; the final column norms are the singular
/// values.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut m = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.transpose()
    };
    let n = m.ncols();
    let rows = m.nrows();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for r in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for k in 0..rows {
                    let x = m[(k, p)];
                    let y = m[(k, r)];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let x = m[(k, p)];
                    let y = m[(k, r)];
                    m[(k, p)] = c * x - s * y;
                    m[(k, r)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n).map(|j| m.column(j).norm()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
