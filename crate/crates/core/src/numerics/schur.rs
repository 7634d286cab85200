//! Real nonsymmetric eigensolver: Householder reduction to upper Hessenberg
//! form followed by the Francis double-shift QR iteration and back
//! substitution on the quasi-triangular Schur factor (the EISPACK
//! `orthes`/`hqr2` pair).

#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use crate::error::{DmdError, Result};

/// Max QR sweeps spent isolating any single eigenvalue (or 2x2 block).
pub(crate) const SWEEPS_PER_EIGENVALUE: usize = 100;

/// Raw real-arithmetic eigen output.
///
/// Complex pairs occupy adjacent slots `k, k + 1` with `im[k] > 0`; the
/// eigenvector of `re[k] + i im[k]` is `vectors[:, k] + i vectors[:, k + 1]`.
pub(crate) struct RealEigen {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

macro_rules! at {
    ($m:ident, $i:expr, $j:expr) => {
        $m[($i) as usize][($j) as usize]
    };
}

pub(crate) fn real_eigen(a: &DMatrix<f64>) -> Result<RealEigen> {
    let nn = a.nrows();
    debug_assert_eq!(nn, a.ncols());
    let mut h: Vec<Vec<f64>> = (0..nn)
        .map(|i| (0..nn).map(|j| a[(i, j)]).collect())
        .collect();
    let mut v = vec![vec![0.0; nn]; nn];
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];

    if nn > 0 {
        orthes(&mut h, &mut v);
        hqr2(&mut h, &mut v, &mut d, &mut e)?;
    }

    let vectors = DMatrix::from_fn(nn, nn, |i, j| v[i][j]);
    Ok(RealEigen {
        re: d,
        im: e,
        vectors,
    })
}

fn orthes(h: &mut [Vec<f64>], v: &mut [Vec<f64>]) {
    let n = h.len();
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in (low + 1)..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        // H = (I - u u'/h) H (I - u u'/h)
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * row[j];
            }
            f /= hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }

    for (i, row) in v.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = if i == j { 1.0 } else { 0.0 };
        }
    }

    for m in ((low + 1)..high).rev() {
        if h[m][m - 1] == 0.0 {
            continue;
        }
        for i in (m + 1)..=high {
            ort[i] = h[i][m - 1];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v[i][j];
            }
            // double division avoids underflow
            g = (g / ort[m]) / h[m][m - 1];
            for i in m..=high {
                v[i][j] += g * ort[i];
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr2(h: &mut [Vec<f64>], v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.len() as isize;
    let mut n: isize = nn - 1;
    let low: isize = 0;
    let high: isize = nn - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y): (f64, f64, f64, f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += at!(h, i, j).abs();
        }
    }

    let mut iter = 0usize;
    while n >= low {
        // look for a single small subdiagonal element
        let mut l = n;
        while l > low {
            s = at!(h, l - 1, l - 1).abs() + at!(h, l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if at!(h, l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root
            at!(h, n, n) += exshift;
            d[n as usize] = at!(h, n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots
            w = at!(h, n, n - 1) * at!(h, n - 1, n);
            p = (at!(h, n - 1, n - 1) - at!(h, n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            at!(h, n, n) += exshift;
            at!(h, n - 1, n - 1) += exshift;
            x = at!(h, n, n);

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = at!(h, n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in (n - 1)..nn {
                    z = at!(h, n - 1, j);
                    at!(h, n - 1, j) = q * z + p * at!(h, n, j);
                    at!(h, n, j) = q * at!(h, n, j) - p * z;
                }
                for i in 0..=n {
                    z = at!(h, i, n - 1);
                    at!(h, i, n - 1) = q * z + p * at!(h, i, n);
                    at!(h, i, n) = q * at!(h, i, n) - p * z;
                }
                for i in low..=high {
                    z = at!(v, i, n - 1);
                    at!(v, i, n - 1) = q * z + p * at!(v, i, n);
                    at!(v, i, n) = q * at!(v, i, n) - p * z;
                }
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // form shift
            x = at!(h, n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = at!(h, n - 1, n - 1);
                w = at!(h, n, n - 1) * at!(h, n - 1, n);
            }

            // exceptional shifts
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    at!(h, i, i) -= x;
                }
                s = at!(h, n, n - 1).abs() + at!(h, n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        at!(h, i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            if iter > SWEEPS_PER_EIGENVALUE {
                return Err(DmdError::NoConvergence {
                    size: nn as usize,
                    budget: SWEEPS_PER_EIGENVALUE,
                });
            }

            // look for two consecutive small subdiagonal elements
            let mut m = n - 2;
            while m >= l {
                z = at!(h, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at!(h, m + 1, m) + at!(h, m, m + 1);
                q = at!(h, m + 1, m + 1) - z - r - s;
                r = at!(h, m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if at!(h, m, m - 1).abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (at!(h, m - 1, m - 1).abs() + z.abs() + at!(h, m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                at!(h, i, i - 2) = 0.0;
                if i > m + 2 {
                    at!(h, i, i - 3) = 0.0;
                }
            }

            // double QR step on rows l..=n, columns m..=n
            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = at!(h, k, k - 1);
                    q = at!(h, k + 1, k - 1);
                    r = if notlast { at!(h, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }

                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        at!(h, k, k - 1) = -s * x;
                    } else if l != m {
                        at!(h, k, k - 1) = -at!(h, k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = at!(h, k, j) + q * at!(h, k + 1, j);
                        if notlast {
                            p += r * at!(h, k + 2, j);
                            at!(h, k + 2, j) -= p * z;
                        }
                        at!(h, k, j) -= p * x;
                        at!(h, k + 1, j) -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * at!(h, i, k) + y * at!(h, i, k + 1);
                        if notlast {
                            p += z * at!(h, i, k + 2);
                            at!(h, i, k + 2) -= p * r;
                        }
                        at!(h, i, k) -= p;
                        at!(h, i, k + 1) -= p * q;
                    }
                    for i in low..=high {
                        p = x * at!(v, i, k) + y * at!(v, i, k + 1);
                        if notlast {
                            p += z * at!(v, i, k + 2);
                            at!(v, i, k + 2) -= p * r;
                        }
                        at!(v, i, k) -= p;
                        at!(v, i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == 0.0 {
        return Ok(());
    }

    // back substitution on the quasi-triangular factor
    n = nn - 1;
    while n >= 0 {
        p = d[n as usize];
        q = e[n as usize];

        if q == 0.0 {
            let mut l = n;
            at!(h, n, n) = 1.0;
            let mut i = n - 1;
            while i >= 0 {
                w = at!(h, i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += at!(h, i, j) * at!(h, j, n);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        at!(h, i, n) = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = at!(h, i, i + 1);
                        y = at!(h, i + 1, i);
                        let di = d[i as usize] - p;
                        q = di * di + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        at!(h, i, n) = t;
                        at!(h, i + 1, n) = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    t = at!(h, i, n).abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            at!(h, j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if at!(h, n, n - 1).abs() > at!(h, n - 1, n).abs() {
                at!(h, n - 1, n - 1) = q / at!(h, n, n - 1);
                at!(h, n - 1, n) = -(at!(h, n, n) - p) / at!(h, n, n - 1);
            } else {
                let (cr, ci) = cdiv(0.0, -at!(h, n - 1, n), at!(h, n - 1, n - 1) - p, q);
                at!(h, n - 1, n - 1) = cr;
                at!(h, n - 1, n) = ci;
            }
            at!(h, n, n - 1) = 0.0;
            at!(h, n, n) = 1.0;
            let mut i = n - 2;
            while i >= 0 {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += at!(h, i, j) * at!(h, j, n - 1);
                    sa += at!(h, i, j) * at!(h, j, n);
                }
                w = at!(h, i, i) - p;

                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        at!(h, i, n - 1) = cr;
                        at!(h, i, n) = ci;
                    } else {
                        x = at!(h, i, i + 1);
                        y = at!(h, i + 1, i);
                        let di = d[i as usize] - p;
                        let mut vr = di * di + e[i as usize] * e[i as usize] - q * q;
                        let vi = di * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        at!(h, i, n - 1) = cr;
                        at!(h, i, n) = ci;
                        if x.abs() > z.abs() + q.abs() {
                            at!(h, i + 1, n - 1) =
                                (-ra - w * at!(h, i, n - 1) + q * at!(h, i, n)) / x;
                            at!(h, i + 1, n) = (-sa - w * at!(h, i, n) - q * at!(h, i, n - 1)) / x;
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * at!(h, i, n - 1), -s - y * at!(h, i, n), z, q);
                            at!(h, i + 1, n - 1) = cr;
                            at!(h, i + 1, n) = ci;
                        }
                    }
                    t = at!(h, i, n - 1).abs().max(at!(h, i, n).abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            at!(h, j, n - 1) /= t;
                            at!(h, j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        }
        n -= 1;
    }

    // back-transform to eigenvectors of the original matrix
    let mut j = nn - 1;
    while j >= low {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += at!(v, i, k) * at!(h, k, j);
            }
            at!(v, i, j) = z;
        }
        j -= 1;
    }
    Ok(())
}
