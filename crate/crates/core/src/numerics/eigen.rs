//! Dense nonsymmetric eigensolver at working precision.
//!
//! Householder reduction to upper Hessenberg form, Francis double-shift QR
//! for the eigenvalues, and inverse iteration on the Hessenberg matrix for
//! the eigenvectors, which are then mapped back through the accumulated
//! orthogonal factor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Complex, DenseMatrix, PrecisionCtx, Real};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex,
    /// Eigenvector scaled so that its largest component equals one.
    pub vector: Vec<Complex>,
    /// `||M v - lambda v||_inf`.
    pub residual: Real,
}

/// Eigenvalues sorted by descending modulus together with eigenvectors.
///
/// Each returned pair satisfies `||M v - lambda v|| <= tol * ||M|| * ||v||`
/// unless inverse iteration stalls, in which case the best residual found
/// is reported as is.
pub fn eig_dense(m: &DenseMatrix, tol: &Real, ctx: &PrecisionCtx) -> Result<Vec<EigenPair>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (h, q) = hessenberg(m, ctx);
    let values = hqr(&h, ctx)?;
    let norm = m.norm_inf();

    let mut pairs: Vec<EigenPair> = values
        .into_par_iter()
        .enumerate()
        .map(|(idx, lambda)| {
            let (vector, residual) = eigenvector(m, &h, &q, &lambda, &norm, tol, idx as u64, ctx);
            EigenPair { value: lambda, vector, residual }
        })
        .collect();

    sort_by_modulus(&mut pairs);
    Ok(pairs)
}

/// Eigenvalues only, sorted by descending modulus.
pub fn eigenvalues(m: &DenseMatrix, ctx: &PrecisionCtx) -> Result<Vec<Complex>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let (h, _) = hessenberg(m, ctx);
    let mut values = hqr(&h, ctx)?;
    values.sort_by(compare_modulus);
    Ok(values)
}

fn compare_modulus(a: &Complex, b: &Complex) -> std::cmp::Ordering {
    b.abs()
        .total_cmp(&a.abs())
        .then_with(|| b.re.total_cmp(&a.re))
        .then_with(|| b.im.total_cmp(&a.im))
}

fn sort_by_modulus(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| compare_modulus(&a.value, &b.value));
}

/// Returns `(H, Q)` with `M = Q H Q^T`.
fn hessenberg(m: &DenseMatrix, ctx: &PrecisionCtx) -> (DenseMatrix, DenseMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = DenseMatrix::identity(n, ctx);
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Real> = (k + 1..n).map(|i| h[(i, k)].clone()).collect();
        let mut norm2 = ctx.zero();
        for x in &v {
            norm2 += x.square();
        }
        if norm2.is_zero() {
            continue;
        }
        let norm = norm2.sqrt();
        let alpha = if v[0].is_sign_negative() { norm } else { -norm };
        v[0] -= &alpha;
        let mut vv = ctx.zero();
        for x in &v {
            vv += x.square();
        }
        if vv.is_zero() {
            continue;
        }
        let beta = ctx.int(2) / vv;

        // H <- (I - beta v v^T) H
        for j in 0..n {
            let mut s = ctx.zero();
            for (t, x) in v.iter().enumerate() {
                s += x * &h[(k + 1 + t, j)];
            }
            s *= &beta;
            if s.is_zero() {
                continue;
            }
            for (t, x) in v.iter().enumerate() {
                let d = x * &s;
                h[(k + 1 + t, j)] -= d;
            }
        }
        // H <- H (I - beta v v^T), Q <- Q (I - beta v v^T)
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = ctx.zero();
                for (t, x) in v.iter().enumerate() {
                    s += x * &mat[(i, k + 1 + t)];
                }
                s *= &beta;
                if s.is_zero() {
                    continue;
                }
                for (t, x) in v.iter().enumerate() {
                    let d = x * &s;
                    mat[(i, k + 1 + t)] -= d;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ctx.zero();
        }
    }
    (h, q)
}

fn sign_of(a: &Real, b: &Real) -> Real {
    if b.is_sign_negative() {
        -a.abs()
    } else {
        a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
///
/// A subdiagonal entry is treated as zero once
/// `|h[i+1,i]| <= 10^(-D) (|h[i,i]| + |h[i+1,i+1]|)`. The total sweep
/// budget is `100 n`.
fn hqr(h: &DenseMatrix, ctx: &PrecisionCtx) -> Result<Vec<Complex>> {
    let n = h.rows();
    // 1-based working copy
    let mut a: Vec<Vec<Real>> = vec![vec![ctx.zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[(i, j)].clone();
        }
    }
    let deflate_tol = ctx.eps();
    let machine_eps = ctx.int(2).powi(-(ctx.bits() as i32));
    let budget = 100 * n;
    let mut sweeps = 0usize;

    let mut wr = vec![ctx.zero(); n + 1];
    let mut wi = vec![ctx.zero(); n + 1];

    let mut anorm = ctx.zero();
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }

    let mut nn = n;
    let mut t = ctx.zero();
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s.is_zero() {
                    s = anorm.clone();
                }
                if a[l][l - 1].abs() <= &deflate_tol * &s {
                    a[l][l - 1] = ctx.zero();
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn].clone();
            if l == nn {
                wr[nn] = &x + &t;
                wi[nn] = ctx.zero();
                nn -= 1;
                break;
            }
            y = a[nn - 1][nn - 1].clone();
            w = &a[nn][nn - 1] * &a[nn - 1][nn];
            if l == nn - 1 {
                p = (&y - &x) * 0.5;
                q = p.square() + &w;
                z = q.abs().sqrt();
                x += &t;
                if !q.is_sign_negative() {
                    z = &p + sign_of(&z, &p);
                    wr[nn - 1] = &x + &z;
                    wr[nn] = wr[nn - 1].clone();
                    if !z.is_zero() {
                        wr[nn] = &x - &w / &z;
                    }
                    wi[nn - 1] = ctx.zero();
                    wi[nn] = ctx.zero();
                } else {
                    wr[nn - 1] = &x + &p;
                    wr[nn] = &x + &p;
                    wi[nn - 1] = -&z;
                    wi[nn] = z.clone();
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if sweeps >= budget {
                return Err(Error::EigenNoConvergence(nn - 1));
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += &x;
                for i in 1..=nn {
                    a[i][i] -= &x;
                }
                s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = &s * 0.75;
                y = x.clone();
                w = s.square() * -0.4375;
            }
            its += 1;
            sweeps += 1;
            let mut m = nn - 2;
            loop {
                z = a[m][m].clone();
                r = &x - &z;
                s = &y - &z;
                p = (&r * &s - &w) / &a[m + 1][m] + &a[m][m + 1];
                q = &a[m + 1][m + 1] - &z - &r - &s;
                r = a[m + 2][m + 1].clone();
                s = p.abs() + q.abs() + r.abs();
                p /= &s;
                q /= &s;
                r /= &s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= &machine_eps * &v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[i][i - 2] = ctx.zero();
                if i != m + 2 {
                    a[i][i - 3] = ctx.zero();
                }
            }
            let mut k = m;
            while k + 1 <= nn {
                if k != m {
                    p = a[k][k - 1].clone();
                    q = a[k + 1][k - 1].clone();
                    r = if k != nn - 1 { a[k + 2][k - 1].clone() } else { ctx.zero() };
                    x = p.abs() + q.abs() + r.abs();
                    if !x.is_zero() {
                        p /= &x;
                        q /= &x;
                        r /= &x;
                    }
                }
                s = sign_of(&(p.square() + q.square() + r.square()).sqrt(), &p);
                if !s.is_zero() {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -&a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -(&s * &x);
                    }
                    p += &s;
                    x = &p / &s;
                    y = &q / &s;
                    z = &r / &s;
                    q /= &p;
                    r /= &p;
                    for j in k..=nn {
                        p = &a[k][j] + &q * &a[k + 1][j];
                        if k != nn - 1 {
                            p += &r * &a[k + 2][j];
                            let d = &p * &z;
                            a[k + 2][j] -= d;
                        }
                        let d = &p * &y;
                        a[k + 1][j] -= d;
                        let d = &p * &x;
                        a[k][j] -= d;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = &x * &a[i][k] + &y * &a[i][k + 1];
                        if k != nn - 1 {
                            p += &z * &a[i][k + 2];
                            let d = &p * &r;
                            a[i][k + 2] -= d;
                        }
                        let d = &p * &q;
                        a[i][k + 1] -= d;
                        a[i][k] -= &p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i].clone(), wi[i].clone())).collect())
}

#[allow(clippy::too_many_arguments)]
fn eigenvector(
    m: &DenseMatrix,
    h: &DenseMatrix,
    q: &DenseMatrix,
    lambda: &Complex,
    norm: &Real,
    tol: &Real,
    seed: u64,
    ctx: &PrecisionCtx,
) -> (Vec<Complex>, Real) {
    let n = h.rows();
    let scale = if norm.is_zero() { ctx.one() } else { norm.clone() };
    let shift = Complex::new(
        &lambda.re + ctx.pow10(-(ctx.digits() as i32) / 2) * &scale,
        lambda.im.clone(),
    );
    let tiny = ctx.eps() * &scale;

    let mut rng = ChaCha8Rng::seed_from_u64(0x00fe_1e4b ^ seed);
    let mut b: Vec<Complex> = (0..n)
        .map(|_| {
            let re = ctx.real(rng.gen_range(-1.0..1.0));
            let im = if lambda.is_real() { ctx.zero() } else { ctx.real(rng.gen_range(-1.0..1.0)) };
            Complex::new(re, im)
        })
        .collect();

    let mut best: Option<(Vec<Complex>, Real)> = None;
    for _ in 0..3 {
        let y = hessenberg_shifted_solve(h, &shift, &b, &tiny, ctx);
        let v = normalize(&apply_q(q, &y, ctx));
        let res = residual(m, &v, lambda, ctx);
        let bound = tol * &scale;
        let done = res <= bound;
        if best.as_ref().map_or(true, |(_, r)| &res < r) {
            best = Some((v.clone(), res));
        }
        if done {
            break;
        }
        // next step starts from the current iterate in Hessenberg coordinates
        b = y;
        let bn = b.iter().map(Complex::max_abs).fold(ctx.zero(), |acc, x| if x > acc { x } else { acc });
        if bn.is_zero() {
            break;
        }
        b = b.iter().map(|c| c.scale(&bn.recip())).collect();
    }
    best.expect("at least one inverse iteration step")
}

fn apply_q(q: &DenseMatrix, y: &[Complex], ctx: &PrecisionCtx) -> Vec<Complex> {
    let n = q.rows();
    (0..n)
        .map(|i| {
            let mut re = ctx.zero();
            let mut im = ctx.zero();
            for (j, yj) in y.iter().enumerate() {
                re += &q[(i, j)] * &yj.re;
                im += &q[(i, j)] * &yj.im;
            }
            Complex::new(re, im)
        })
        .collect()
}

fn normalize(v: &[Complex]) -> Vec<Complex> {
    let mut idx = 0;
    let mut best = v[0].abs();
    for (i, c) in v.iter().enumerate().skip(1) {
        let a = c.abs();
        if a > best {
            best = a;
            idx = i;
        }
    }
    if best.is_zero() {
        return v.to_vec();
    }
    let pivot = v[idx].clone();
    let mut out: Vec<Complex> = v.iter().map(|c| c.div(&pivot)).collect();
    out[idx] = Complex::from_real(best.like(1.0));
    out
}

fn residual(m: &DenseMatrix, v: &[Complex], lambda: &Complex, ctx: &PrecisionCtx) -> Real {
    let n = m.rows();
    let mut worst = ctx.zero();
    for i in 0..n {
        let mut re = ctx.zero();
        let mut im = ctx.zero();
        for (j, vj) in v.iter().enumerate() {
            re += &m[(i, j)] * &vj.re;
            im += &m[(i, j)] * &vj.im;
        }
        let lv = lambda.mul(&v[i]);
        let d = Complex::new(re - &lv.re, im - &lv.im).max_abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Solves `(H - shift I) y = b` for upper Hessenberg `H` with adjacent-row
/// pivoting. Zero pivots are replaced by `tiny`.
fn hessenberg_shifted_solve(
    h: &DenseMatrix,
    shift: &Complex,
    b: &[Complex],
    tiny: &Real,
    ctx: &PrecisionCtx,
) -> Vec<Complex> {
    let n = h.rows();
    let mut a: Vec<Vec<Complex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut c = Complex::from_real(h[(i, j)].clone());
                    if i == j {
                        c = c.sub(shift);
                    }
                    c
                })
                .collect()
        })
        .collect();
    let mut rhs = b.to_vec();
    for k in 0..n.saturating_sub(1) {
        if a[k + 1][k].max_abs() > a[k][k].max_abs() {
            a.swap(k, k + 1);
            rhs.swap(k, k + 1);
        }
        if a[k][k].max_abs().is_zero() {
            a[k][k] = Complex::from_real(tiny.clone());
        }
        if a[k + 1][k].max_abs().is_zero() {
            continue;
        }
        let factor = a[k + 1][k].div(&a[k][k]);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let row = &mut bottom[0];
        for j in k + 1..n {
            let d = factor.mul(&pivot_row[j]);
            row[j] = row[j].sub(&d);
        }
        row[k] = Complex::zero_like(&ctx.zero());
        let d = factor.mul(&rhs[k]);
        rhs[k + 1] = rhs[k + 1].sub(&d);
    }
    if a[n - 1][n - 1].max_abs().is_zero() {
        a[n - 1][n - 1] = Complex::from_real(tiny.clone());
    }
    let mut y = vec![Complex::zero_like(&ctx.zero()); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..n {
            acc = acc.sub(&a[i][j].mul(&y[j]));
        }
        y[i] = acc.div(&a[i][i]);
    }
    y
}
