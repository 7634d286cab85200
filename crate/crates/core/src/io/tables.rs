use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fmt_f64;
use crate::koopman::KoopmanModel;

/// `|x_hat - x| / max(|x|, 1e-30)` in the 2-norm.
pub fn relative_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let diff: f64 = estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(1e-30)
}

/// `re,im,abs,residual` per eigenvalue, in model order.
pub fn eigenvalue_table(model: &KoopmanModel, residuals: Option<&[f64]>) -> String {
    let mut out = String::from("re,im,abs,residual\n");
    for (j, l) in model.lambdas().iter().enumerate() {
        let r = residuals
            .map(|r| fmt_f64(r[j]))
            .unwrap_or_else(|| "nan".to_string());
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(l.re),
            fmt_f64(l.im),
            fmt_f64(l.norm()),
            r
        ));
    }
    out
}

/// One row per state coordinate, `re,im` column pairs per mode.
pub fn mode_table(modes: &DMatrix<Complex64>) -> String {
    let header: Vec<String> = (0..modes.ncols())
        .flat_map(|j| [format!("mode{j}_re"), format!("mode{j}_im")])
        .collect();
    let mut out = header.join(",");
    out.push('\n');
    for row in modes.row_iter() {
        let cells: Vec<String> = row
            .iter()
            .flat_map(|c| [fmt_f64(c.re), fmt_f64(c.im)])
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// States as columns, with a header naming the snapshot index of each column.
pub fn states_table(states: &DMatrix<f64>, first_index: usize) -> String {
    let header: Vec<String> = (0..states.ncols())
        .map(|j| format!("x{}", first_index + j))
        .collect();
    let mut out = header.join(",");
    out.push('\n');
    out.push_str(&super::to_csv(states));
    out
}

/// `snapshot,relative_error` rows.
pub fn error_table(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("snapshot,relative_error\n");
    for (idx, err) in rows {
        out.push_str(&format!("{idx},{}\n", fmt_f64(*err)));
    }
    out
}
