//! Small dense complex linear algebra: Gaussian elimination for Newton steps and
//! polynomial roots from the eigenvalues of a balanced companion matrix.

use crate::error::{Error, Result};
use crate::scalar::{one, zero, Real, C};

/// Solves `a x = b` by Gaussian elimination with partial pivoting. `a` is row-major.
pub fn solve<T: Real>(mut a: Vec<Vec<C<T>>>, mut b: Vec<C<T>>) -> Option<Vec<C<T>>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].norm() == T::zero() || !a[piv][col].norm().is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f == zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[r][k] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = vec![zero::<T>(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in (r + 1)..n {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Evaluates `sum_k c[k] x^k` and its derivative.
pub fn horner<T: Real>(c: &[C<T>], x: C<T>) -> (C<T>, C<T>) {
    let mut p = zero::<T>();
    let mut dp = zero::<T>();
    for &ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp)
}

/// All roots of `sum_k c[k] x^k` (ascending coefficients) as eigenvalues of the
/// companion matrix, each refined by a few Newton steps on the original polynomial.
pub fn poly_roots<T: Real>(c: &[C<T>]) -> Result<Vec<C<T>>> {
    let mut hi = c.len();
    while hi > 0 && c[hi - 1] == zero() {
        hi -= 1;
    }
    if hi <= 1 {
        return Ok(Vec::new());
    }
    let mut lo = 0;
    while c[lo] == zero() {
        lo += 1;
    }
    let core = &c[lo..hi];
    let deg = core.len() - 1;
    let mut roots = vec![zero::<T>(); lo];
    if deg == 0 {
        return Ok(roots);
    }
    let lead = core[deg];
    let mut h = vec![vec![zero::<T>(); deg]; deg];
    for i in 1..deg {
        h[i][i - 1] = one();
    }
    for i in 0..deg {
        h[i][deg - 1] = -core[i] / lead;
    }
    balance(&mut h);
    let eig = hessenberg_eigenvalues(h).ok_or(Error::EigenFailure { degree: deg })?;
    for z in eig {
        roots.push(polish(core, z));
    }
    Ok(roots)
}

fn polish<T: Real>(c: &[C<T>], mut z: C<T>) -> C<T> {
    let (mut p, _) = horner(c, z);
    for _ in 0..8 {
        let (_, dp) = horner(c, z);
        if dp.norm() == T::zero() {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = horner(c, cand);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = cand;
        p = pc;
    }
    z
}

/// Parlett-Reinsch diagonal balancing with radix 2; keeps Hessenberg structure.
fn balance<T: Real>(h: &mut [Vec<C<T>>]) {
    let n = h.len();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let abs1 = |z: C<T>| z.re.abs() + z.im.abs();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += abs1(h[j][i]);
                    r += abs1(h[i][j]);
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let mut g = r / radix;
            let mut f = T::one();
            let s = c + r;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let gi = T::one() / f;
                for j in 0..n {
                    h[i][j] = h[i][j] * gi;
                }
                for j in 0..n {
                    h[j][i] = h[j][i] * f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Complex Givens rotation `[c s; -conj(s) c]` zeroing `b` against `a`.
fn givens<T: Real>(a: C<T>, b: C<T>) -> (T, C<T>) {
    let bn = b.norm();
    if bn == T::zero() {
        return (T::one(), zero());
    }
    let an = a.norm();
    if an == T::zero() {
        return (T::zero(), b.conj() / bn);
    }
    let norm = an.hypot(bn);
    let alpha = a / an;
    (an / norm, alpha * b.conj() / norm)
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
/// Wilkinson shifts and deflation.
fn hessenberg_eigenvalues<T: Real>(mut h: Vec<Vec<C<T>>>) -> Option<Vec<C<T>>> {
    let n = h.len();
    let mut eig = vec![zero::<T>(); n];
    let eps = T::epsilon();
    let abs1 = |z: C<T>| z.re.abs() + z.im.abs();
    let norm = h.iter().flatten().fold(T::zero(), |m, z| m.max(abs1(*z)));
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi >= 0 {
        let hiu = hi as usize;
        // locate the active block [l, hi]
        let mut l = hiu;
        while l > 0 {
            let mut s = abs1(h[l - 1][l - 1]) + abs1(h[l][l]);
            if s == T::zero() {
                s = norm;
            }
            if abs1(h[l][l - 1]) <= eps * s {
                h[l][l - 1] = zero();
                break;
            }
            l -= 1;
        }
        if l == hiu {
            eig[hiu] = h[hiu][hiu];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n.max(10) {
            return None;
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            h[hiu][hiu] + C::new(abs1(h[hiu][hiu - 1]) * T::lit(0.75), T::zero())
        } else {
            let a = h[hiu - 1][hiu - 1];
            let b = h[hiu - 1][hiu];
            let c = h[hiu][hiu - 1];
            let d = h[hiu][hiu];
            let half = T::lit(0.5);
            let m = (a + d) * half;
            let disc = ((a - d) * (a - d) * T::lit(0.25) + b * c).sqrt();
            let (e1, e2) = (m + disc, m - disc);
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        for k in l..=hiu {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hiu - l);
        for k in l..hiu {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            for j in k..=hiu {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = x * c + s * y;
                h[k + 1][j] = -(s.conj() * x) + y * c;
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.into_iter().enumerate() {
            let k = l + idx;
            let top = (k + 1).min(hiu);
            for i in l..=top {
                let x = h[i][k];
                let y = h[i][k + 1];
                h[i][k] = x * c + y * s.conj();
                h[i][k + 1] = -(x * s) + y * c;
            }
        }
        for k in l..=hiu {
            h[k][k] += mu;
        }
    }
    Some(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Z = C<f64>;

    fn from_roots(roots: &[Z]) -> Vec<Z> {
        let mut c = vec![cx::<f64>(1.0, 0.0)];
        for r in roots {
            let mut next = vec![cx(0.0, 0.0); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i] -= *ci * *r;
                next[i + 1] += *ci;
            }
            c = next;
        }
        c
    }

    fn matched(found: &[Z], expect: &[Z], tol: f64) {
        assert_eq!(found.len(), expect.len());
        let mut used = vec![false; found.len()];
        for e in expect {
            let (i, d) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, (*f - *e).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(d < tol * e.norm().max(1.0), "root {e} missed by {d}");
            used[i] = true;
        }
    }

    #[test]
    fn simple_roots() {
        let r = [cx(1.0, 0.0), cx(0.0, 2.0), cx(-0.5, 0.0), cx(0.3, -0.7)];
        let found = poly_roots(&from_roots(&r)).unwrap();
        matched(&found, &r, 1e-12);
    }

    #[test]
    fn zero_roots_and_constants() {
        assert!(poly_roots::<f64>(&[cx(3.0, 0.0)]).unwrap().is_empty());
        let c = [cx(0.0, 0.0), cx(0.0, 0.0), cx(-2.0, 0.0), cx(1.0, 0.0)];
        let found = poly_roots(&c).unwrap();
        matched(&found, &[cx(0.0, 0.0), cx(0.0, 0.0), cx(2.0, 0.0)], 1e-14);
    }

    #[test]
    fn geometric_root_ladder() {
        // roots 0.5^k * (0.8 + 0.3i) for k in -6..6 span a wide dynamic range
        let base: Z = cx(0.8, 0.3);
        let r: Vec<Z> = (-6..6).map(|k| base * 0.5f64.powi(k)).collect();
        let found = poly_roots(&from_roots(&r)).unwrap();
        matched(&found, &r, 1e-9);
    }

    #[test]
    fn linear_solve() {
        let a = vec![
            vec![cx(2.0, 1.0), cx(1.0, 0.0)],
            vec![cx(0.0, 1.0), cx(3.0, -1.0)],
        ];
        let x: Vec<Z> = vec![cx(1.0, -1.0), cx(0.5, 2.0)];
        let b = vec![a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]];
        let got: Vec<Z> = solve(a, b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((*g - *e).norm() < 1e-14);
        }
        assert!(solve::<f64>(vec![vec![cx(0.0, 0.0)]], vec![cx(1.0, 0.0)]).is_none());
    }
}
