//! Plain-text model files.
//!
//! ```text
//! kdmd-model 1
//! kernel <kind> <mu> <degree> <offset>
//! policy <kind> <tikhonov_lambda> <svd_rtol>
//! dims <n> <p>
//! centers          p lines, one center (n values) per line
//! rep              p lines, row i of the representation
//! eigenvalues      p lines, "re im"
//! eigenvectors     p lines, row i as "re im" pairs across the p columns
//! modes            n lines, row d as "re im" pairs across the p columns
//! end
//! ```
//!
//! Values are whitespace separated and written with 17 significant digits,
//! so a save/load round trip is exact.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::fmt_f64;
use crate::error::{DmdError, Result};
use crate::kernels::KernelSpec;
use crate::koopman::KoopmanModel;
use crate::numerics::RegularizationPolicy;

const MAGIC: &str = "kdmd-model 1";

pub fn write_model(model: &KoopmanModel) -> String {
    let mut out = Vec::new();
    let k = model.kernel();
    let pol = model.policy();
    let (n, p) = (model.state_dim(), model.rank());
    let w = &mut out;
    writeln!(w, "{MAGIC}").unwrap();
    writeln!(
        w,
        "kernel {} {} {} {}",
        k.kind,
        fmt_f64(k.mu),
        k.degree,
        fmt_f64(k.offset)
    )
    .unwrap();
    writeln!(
        w,
        "policy {} {} {}",
        pol.kind,
        fmt_f64(pol.tikhonov_lambda),
        fmt_f64(pol.svd_rtol)
    )
    .unwrap();
    writeln!(w, "dims {n} {p}").unwrap();

    writeln!(w, "centers").unwrap();
    for c in model.centers().column_iter() {
        writeln!(w, "{}", join_real(c.iter())).unwrap();
    }
    writeln!(w, "rep").unwrap();
    for r in model.rep().row_iter() {
        writeln!(w, "{}", join_real(r.iter())).unwrap();
    }
    writeln!(w, "eigenvalues").unwrap();
    for l in model.lambdas().iter() {
        writeln!(w, "{}", join_complex(std::iter::once(l))).unwrap();
    }
    writeln!(w, "eigenvectors").unwrap();
    for r in model.eigvecs().row_iter() {
        writeln!(w, "{}", join_complex(r.iter())).unwrap();
    }
    writeln!(w, "modes").unwrap();
    for r in model.modes().row_iter() {
        writeln!(w, "{}", join_complex(r.iter())).unwrap();
    }
    writeln!(w, "end").unwrap();
    String::from_utf8(out).expect("ascii output")
}

fn join_real<'a>(vals: impl Iterator<Item = &'a f64>) -> String {
    vals.map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

fn join_complex<'a>(vals: impl Iterator<Item = &'a Complex64>) -> String {
    vals.flat_map(|c| [fmt_f64(c.re), fmt_f64(c.im)])
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn save_model(path: impl AsRef<Path>, model: &KoopmanModel) -> Result<()> {
    fs::write(path, write_model(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<KoopmanModel> {
    read_model(&fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok(l);
            }
        }
        Err(DmdError::format(
            format!("line {}", self.line + 1),
            "unexpected end of file",
        ))
    }

    fn err(&self, msg: impl Into<String>) -> DmdError {
        DmdError::format(format!("line {}", self.line), msg)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Vec<&'a str>> {
        let l = self.next_line()?;
        let mut parts = l.split_whitespace();
        match parts.next() {
            Some(k) if k == kw => Ok(parts.collect()),
            _ => Err(self.err(format!("expected '{kw}', found '{l}'"))),
        }
    }

    fn numbers(&mut self, count: usize) -> Result<Vec<f64>> {
        let l = self.next_line()?;
        let vals: std::result::Result<Vec<f64>, _> = l.split_whitespace().map(str::parse).collect();
        let vals = vals.map_err(|_| self.err("non-numeric value"))?;
        if vals.len() != count {
            return Err(self.err(format!("expected {count} values, found {}", vals.len())));
        }
        Ok(vals)
    }
}

fn parse_num<T: std::str::FromStr>(lines: &Lines<'_>, s: Option<&&str>, what: &str) -> Result<T> {
    s.and_then(|v| v.parse().ok())
        .ok_or_else(|| lines.err(format!("missing or invalid {what}")))
}

pub fn read_model(text: &str) -> Result<KoopmanModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next_line()? != MAGIC {
        return Err(lines.err("not a kdmd model file"));
    }

    let f = lines.expect_keyword("kernel")?;
    let kind = f
        .first()
        .ok_or_else(|| lines.err("missing kernel kind"))?
        .parse()?;
    let kernel = KernelSpec {
        kind,
        mu: parse_num(&lines, f.get(1), "mu")?,
        degree: parse_num(&lines, f.get(2), "degree")?,
        offset: parse_num(&lines, f.get(3), "offset")?,
    };
    kernel.validate()?;

    let f = lines.expect_keyword("policy")?;
    let policy = RegularizationPolicy {
        kind: f
            .first()
            .ok_or_else(|| lines.err("missing policy kind"))?
            .parse()?,
        tikhonov_lambda: parse_num(&lines, f.get(1), "tikhonov lambda")?,
        svd_rtol: parse_num(&lines, f.get(2), "svd rtol")?,
    };
    policy.validate()?;

    let f = lines.expect_keyword("dims")?;
    let n: usize = parse_num(&lines, f.first(), "state dimension")?;
    let p: usize = parse_num(&lines, f.get(1), "rank")?;
    if n == 0 || p == 0 {
        return Err(lines.err("dimensions must be positive"));
    }

    lines.expect_keyword("centers")?;
    let mut centers = DMatrix::zeros(n, p);
    for j in 0..p {
        let v = lines.numbers(n)?;
        centers.set_column(j, &DVector::from_vec(v));
    }

    lines.expect_keyword("rep")?;
    let mut rep = DMatrix::zeros(p, p);
    for i in 0..p {
        let v = lines.numbers(p)?;
        for (j, x) in v.into_iter().enumerate() {
            rep[(i, j)] = x;
        }
    }

    lines.expect_keyword("eigenvalues")?;
    let mut lambdas = DVector::zeros(p);
    for j in 0..p {
        let v = lines.numbers(2)?;
        lambdas[j] = Complex64::new(v[0], v[1]);
    }

    lines.expect_keyword("eigenvectors")?;
    let eigvecs = read_complex_rows(&mut lines, p, p)?;
    lines.expect_keyword("modes")?;
    let modes = read_complex_rows(&mut lines, n, p)?;
    lines.expect_keyword("end")?;

    KoopmanModel::from_parts(kernel, policy, centers, rep, lambdas, eigvecs, modes)
}

fn read_complex_rows(
    lines: &mut Lines<'_>,
    rows: usize,
    cols: usize,
) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        let v = lines.numbers(2 * cols)?;
        for j in 0..cols {
            m[(i, j)] = Complex64::new(v[2 * j], v[2 * j + 1]);
        }
    }
    Ok(m)
}
