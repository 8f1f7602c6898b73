use serde::Serialize;

use crate::error::{Error, Result};

/// Design matrices whose column-equilibrated condition number exceeds this
/// are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Row-major regressor matrix with at least one more row than columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    col_names: Vec<String>,
}

impl DesignMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, col_names: Vec<String>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::InvalidInput("design matrix has no columns".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "design matrix of {rows}x{cols} given {} values",
                values.len()
            )));
        }
        if col_names.len() != cols {
            return Err(Error::InvalidInput(format!(
                "{} column names for {cols} columns",
                col_names.len()
            )));
        }
        if rows <= cols {
            return Err(Error::InsufficientData(format!(
                "{rows} observations for {cols} regressors"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("design matrix has non-finite entries".into()));
        }
        Ok(Self {
            rows,
            cols,
            values,
            col_names,
        })
    }

    /// Builds from row vectors with generated column names `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged design rows".into()));
        }
        let names = (0..cols).map(|j| format!("x{j}")).collect();
        Self::new(rows.len(), cols, rows.concat(), names)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.get(i, col))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit {
    pub coefs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub se: Vec<f64>,
    /// `coefs / se`; NaN where the standard error is zero.
    pub tstats: Vec<f64>,
    pub df_resid: usize,
    /// Condition number of the column-equilibrated design.
    pub condition: f64,
}

/// Least squares by Householder QR on the column-equilibrated design.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let (n, k) = (x.rows, x.cols);
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "response has {} values, design has {n} rows",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("response has non-finite values".into()));
    }

    let scale: Vec<f64> = (0..k)
        .map(|j| x.column(j).map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if scale.contains(&0.0) {
        return Err(Error::SingularDesign {
            condition: f64::INFINITY,
        });
    }

    // Column-major working copy, scaled to unit column norms.
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|j| x.column(j).map(|v| v / scale[j]).collect())
        .collect();
    let mut qty = y.to_vec();

    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::SingularDesign {
                condition: f64::INFINITY,
            });
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|e| e * e).sum();
        a[j][j] = alpha;
        for e in &mut a[j][j + 1..] {
            *e = 0.0;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, p) in col.iter_mut().zip(&v) {
                *c -= f * p;
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut qty[j..]);
    }

    // r[i][j] = a[j][i] for i <= j.
    let r = |i: usize, j: usize| a[j][i];
    if (0..k).any(|i| r(i, i) == 0.0) {
        return Err(Error::SingularDesign {
            condition: f64::INFINITY,
        });
    }

    // Inverse of the upper-triangular factor, column by column.
    let mut rinv = vec![vec![0.0; k]; k];
    for c in 0..k {
        for i in (0..=c).rev() {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for m in i + 1..=c {
                s -= r(i, m) * rinv[m][c];
            }
            rinv[i][c] = s / r(i, i);
        }
    }
    let norm1 = |m: &dyn Fn(usize, usize) -> f64| {
        (0..k)
            .map(|j| (0..k).map(|i| m(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let condition = norm1(&|i, j| if i <= j { r(i, j) } else { 0.0 }) * norm1(&|i, j| rinv[i][j]);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularDesign { condition });
    }

    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|m| r(i, m) * z[m]).sum();
        z[i] = (qty[i] - s) / r(i, i);
    }
    let coefs: Vec<f64> = z.iter().zip(&scale).map(|(c, s)| c / s).collect();

    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            let fitted: f64 = x.row(i).iter().zip(&coefs).map(|(p, q)| p * q).sum();
            y[i] - fitted
        })
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df_resid = n - k;
    let sigma2 = rss / df_resid as f64;

    // diag (X'X)^{-1} = diag (D^{-1} R^{-1} R^{-T} D^{-1})
    let se: Vec<f64> = (0..k)
        .map(|i| {
            let d: f64 = rinv[i][i..].iter().map(|v| v * v).sum();
            (sigma2 * d).sqrt() / scale[i]
        })
        .collect();
    let tstats = coefs
        .iter()
        .zip(&se)
        .map(|(c, s)| if *s > 0.0 { c / s } else { f64::NAN })
        .collect();

    Ok(OlsFit {
        coefs,
        residuals,
        rss,
        se,
        tstats,
        df_resid,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = DesignMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0], vec![1.0, 3.0]]).unwrap();
        let fit = ols_fit(&x, &[1.0, 2.0, 3.0]).unwrap();
        assert!(fit.coefs[0].abs() < 1e-14);
        assert!((fit.coefs[1] - 1.0).abs() < 1e-14);
        assert!(fit.rss < 1e-28);
        assert_eq!(fit.df_resid, 1);
    }

    #[test]
    fn constant_fit() {
        let x = DesignMatrix::from_rows(&vec![vec![1.0]; 4]).unwrap();
        let fit = ols_fit(&x, &[4.0; 4]).unwrap();
        assert!((fit.coefs[0] - 4.0).abs() < 1e-14);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-14));
        assert_eq!(fit.se[0], 0.0);
        assert!(fit.tstats[0].is_nan());
    }

    #[test]
    fn five_by_three_against_normal_equations() {
        // Exact rational solution of (X'X) c = X'y, computed offline in
        // rational arithmetic and frozen here.
        let x = DesignMatrix::from_rows(&[
            vec![1.0, 2.0, -1.0],
            vec![1.0, 0.0, 3.0],
            vec![1.0, 5.0, 2.0],
            vec![1.0, -3.0, 4.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        let y = [3.0, -1.0, 7.0, 0.0, 2.0];
        let fit = ols_fit(&x, &y).unwrap();
        let expected = [857.0 / 898.0, 445.0 / 449.0, 127.0 / 898.0];
        for (c, e) in fit.coefs.iter().zip(expected) {
            assert!((c - e).abs() < 1e-10, "{c} vs {e}");
        }
        let rss: f64 = fit.residuals.iter().map(|e| e * e).sum();
        assert!((fit.rss - rss).abs() <= 1e-10 * rss.max(1e-300));
        for (i, (t, s)) in fit.tstats.iter().zip(&fit.se).enumerate() {
            assert!((t * s - fit.coefs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let x = DesignMatrix::from_rows(&[
            vec![1.0, 2.0, 4.0],
            vec![1.0, 3.0, 6.0],
            vec![1.0, 5.0, 10.0],
            vec![1.0, 7.0, 14.0],
        ])
        .unwrap();
        assert!(matches!(
            ols_fit(&x, &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::SingularDesign { .. })
        ));
        let zero_col = DesignMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            ols_fit(&zero_col, &[1.0, 2.0, 3.0]),
            Err(Error::SingularDesign { .. })
        ));
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            DesignMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]),
            Err(Error::InsufficientData(_))
        ));
    }
}
