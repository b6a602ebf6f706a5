//! Exact linear algebra over ℤ and ℚ.
//!
//! Matrices are dense `Vec<Vec<_>>` in row-major order. Lattices are always
//! spanned by the *rows* of a matrix. All pivoting is deterministic (first
//! nonzero entry of least absolute value, ties broken by row index) so that
//! normal forms are reproducible bit-for-bit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;

pub fn imat_from_i64(rows: &[Vec<i64>]) -> IMat {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn ncols(a: &[Vec<BigInt>]) -> usize {
    a.first().map(|r| r.len()).unwrap_or(0)
}

/// Row Hermite normal form of the lattice spanned by the rows of `a`.
///
/// The result has no zero rows, strictly increasing pivot columns, positive
/// pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(a: &[Vec<BigInt>]) -> IMat {
    hnf_core(a, false).0
}

/// Row HNF together with the unimodular transform: `u * a = [h; 0]`.
///
/// Returns `(h, u)` where the first `h.len()` rows of `u` produce `h` and the
/// remaining rows of `u` span the left kernel of `a`.
pub fn hnf_with_transform(a: &[Vec<BigInt>]) -> (IMat, IMat) {
    hnf_core(a, true)
}

fn hnf_core(a: &[Vec<BigInt>], track: bool) -> (IMat, IMat) {
    let n = a.len();
    let cols = ncols(a);
    let mut m: IMat = a.to_vec();
    let mut u: IMat = (0..if track { n } else { 0 })
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut row = 0usize;
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..cols {
        if row >= n {
            break;
        }
        loop {
            // pick the row (>= row) with least nonzero |entry| in this column
            let mut best: Option<usize> = None;
            for r in row..n {
                if !m[r][col].is_zero() {
                    best = match best {
                        None => Some(r),
                        Some(b) if m[r][col].abs() < m[b][col].abs() => Some(r),
                        keep => keep,
                    };
                }
            }
            let Some(b) = best else { break };
            m.swap(row, b);
            if track {
                u.swap(row, b);
            }
            let mut done = true;
            for r in (row + 1)..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let q = m[r][col].div_floor(&m[row][col]);
                if !q.is_zero() {
                    let (src, dst) = split_pair(&mut m, row, r);
                    axpy(dst, src, &q);
                    if track {
                        let (usrc, udst) = split_pair(&mut u, row, r);
                        axpy(udst, usrc, &q);
                    }
                }
                if !m[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if row < n && !m[row][col].is_zero() {
            if m[row][col].is_negative() {
                negate_row(&mut m[row]);
                if track {
                    negate_row(&mut u[row]);
                }
            }
            // reduce the rows above
            for r in 0..row {
                let q = m[r][col].div_floor(&m[row][col]);
                if !q.is_zero() {
                    let (src, dst) = split_pair(&mut m, row, r);
                    axpy(dst, src, &q);
                    if track {
                        let (usrc, udst) = split_pair(&mut u, row, r);
                        axpy(udst, usrc, &q);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
    }
    let h: IMat = m.into_iter().take(row).collect();
    (h, u)
}

fn split_pair(m: &mut [Vec<BigInt>], src: usize, dst: usize) -> (&Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = m.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = m.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

/// dst -= q * src
fn axpy(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn negate_row(r: &mut [BigInt]) {
    for x in r.iter_mut() {
        *x = -&*x;
    }
}

pub fn pivot_columns(h: &[Vec<BigInt>]) -> Vec<usize> {
    h.iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero"))
        .collect()
}

/// Reduce `v` against a row HNF. Returns the remainder (zero iff `v` lies in
/// the lattice) and the coefficient vector used.
pub fn hnf_reduce(h: &[Vec<BigInt>], v: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut rem = v.to_vec();
    let mut coeffs = vec![BigInt::zero(); h.len()];
    for (i, row) in h.iter().enumerate() {
        let p = row.iter().position(|x| !x.is_zero()).expect("nonzero HNF row");
        if rem[p].is_zero() {
            continue;
        }
        let (q, r) = rem[p].div_mod_floor(&row[p]);
        if r.is_zero() {
            axpy(&mut rem, row, &q);
            coeffs[i] = q;
        } else {
            // cannot clear this pivot; anything after it cannot fix it
            return (rem, coeffs);
        }
    }
    (rem, coeffs)
}

pub fn in_lattice(h: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    hnf_reduce(h, v).0.iter().all(|x| x.is_zero())
}

/// ℤ-basis (in HNF) of the left kernel `{x : x a = 0}`.
pub fn left_kernel(a: &[Vec<BigInt>]) -> IMat {
    let (h, u) = hnf_with_transform(a);
    let k: IMat = u.into_iter().skip(h.len()).collect();
    if k.is_empty() {
        k
    } else {
        hnf(&k)
    }
}

/// ℤ-basis of the right kernel `{x : a x = 0}` (rows of the result).
pub fn right_kernel(a: &[Vec<BigInt>], cols: usize) -> IMat {
    if a.is_empty() {
        return (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
    }
    left_kernel(&transpose(a))
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    let c = a[0].len();
    (0..c).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn rank_int(a: &[Vec<BigInt>]) -> usize {
    hnf(a).len()
}

/// Nonzero invariant factors of the Smith normal form, in divisibility order.
pub fn smith_invariants(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    // alternate row and column HNF until diagonal; HNF keeps entries reduced
    let mut m = hnf(a);
    loop {
        let diagonal = m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| j == i || x.is_zero()));
        if diagonal {
            break;
        }
        m = hnf(&transpose(&m));
    }
    let mut d: Vec<BigInt> = m.iter().enumerate().map(|(i, r)| r[i].abs()).collect();
    // enforce divisibility with (a, b) -> (gcd, lcm)
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = &d[i] / &g * &d[j];
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

/// Index of a full-rank sublattice `sub` in `sup` (both given by spanning rows).
/// Returns `None` if `sub` is not contained in `sup` or ranks differ.
pub fn lattice_index(sup: &[Vec<BigInt>], sub: &[Vec<BigInt>]) -> Option<BigInt> {
    let hs = hnf(sup);
    let hb = hnf(sub);
    if hs.len() != hb.len() {
        return None;
    }
    if !hb.iter().all(|v| in_lattice(&hs, v)) {
        return None;
    }
    // express sub rows in sup coordinates and take |det|
    let coords: IMat = hb.iter().map(|v| hnf_reduce(&hs, v).1).collect();
    Some(smith_invariants(&coords).iter().product())
}

/// Equality of the lattices spanned by two row sets.
pub fn same_lattice(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> bool {
    hnf(a) == hnf(b)
}

// ---------------------------------------------------------------------------
// rational linear algebra

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduced row echelon form over ℚ; returns (rref, pivot columns).
pub fn rref(a: &[Vec<BigRational>]) -> (QMat, Vec<usize>) {
    let mut m: QMat = a.to_vec();
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let src = m[r].clone();
                for (d, s) in m[i].iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d = &*d - &f * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank_q(a: &[Vec<BigRational>]) -> usize {
    rref(a).1.len()
}

/// Solve `x * a = b` for a row vector `x` (any solution), or `None`.
pub fn solve_left(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    // x a = b  <=>  a^T x^T = b^T
    let at = transpose(a);
    let n = a.len();
    let mut aug: QMat = at
        .into_iter()
        .zip(b.iter())
        .map(|(mut row, bi)| {
            row.push(bi.clone());
            row
        })
        .collect();
    if aug.is_empty() {
        return if b.is_empty() { Some(vec![BigRational::zero(); n]) } else { None };
    }
    let (r, piv) = rref(&aug);
    aug = r;
    if piv.contains(&n) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (row, &c) in aug.iter().zip(piv.iter()) {
        x[c] = row[n].clone();
    }
    Some(x)
}

/// Basis of the right nullspace `{x : a x = 0}` over ℚ.
pub fn nullspace_q(a: &[Vec<BigRational>], cols: usize) -> QMat {
    let (r, piv) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in r.iter().zip(piv.iter()) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Clear denominators of a rational row: returns (integer row, positive lcm).
pub fn clear_denominators(v: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let row = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    (row, l)
}

/// Primitive integer row parallel to `v` (content removed).
pub fn primitive_row(v: &[BigRational]) -> Vec<BigInt> {
    let (row, _) = clear_denominators(v);
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        row
    } else {
        row.into_iter().map(|x| x / &g).collect()
    }
}

/// ℤ-basis of `W ∩ ℤ^n` where `W` is the ℚ-span of the given rational rows.
pub fn saturate(rows: &[Vec<BigRational>], n: usize) -> IMat {
    if rows.is_empty() {
        return Vec::new();
    }
    // W = ker(C) for C a basis of the orthogonal complement; then W ∩ ℤ^n is
    // the integer right kernel of C.
    let comp = nullspace_q(rows, n);
    if comp.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
    }
    let c: IMat = comp.iter().map(|v| primitive_row(v)).collect();
    right_kernel(&c, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IMat {
        imat_from_i64(rows)
    }

    #[test]
    fn hnf_basic() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let h = hnf(&a);
        assert_eq!(h.len(), 3);
        let piv = pivot_columns(&h);
        assert_eq!(piv, vec![0, 1, 2]);
        // determinant is preserved up to sign
        let d: BigInt = h.iter().enumerate().map(|(i, r)| r[i].clone()).product();
        assert_eq!(d, BigInt::from(144));
        for r in &a {
            assert!(in_lattice(&h, r));
        }
        assert!(!in_lattice(&h, &[BigInt::from(1), BigInt::from(0), BigInt::from(0)]));
    }

    #[test]
    fn kernels() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        let k = left_kernel(&a);
        assert_eq!(k.len(), 1);
        let x = &k[0];
        for j in 0..3 {
            let s: BigInt = (0..3).map(|i| &x[i] * &a[i][j]).sum();
            assert!(s.is_zero());
        }
        let rk = right_kernel(&m(&[vec![1, 1, 1]]), 3);
        assert_eq!(rk.len(), 2);
    }

    #[test]
    fn smith() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_invariants(&a);
        assert_eq!(s, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let idx = lattice_index(&m(&[vec![1, 0], vec![0, 1]]), &m(&[vec![2, 0], vec![1, 3]])).unwrap();
        assert_eq!(idx, BigInt::from(6));
    }

    #[test]
    fn saturation() {
        let rows = vec![vec![q(2), q(4)]];
        let s = saturate(&rows, 2);
        assert_eq!(s, m(&[vec![1, 2]]));
    }

    #[test]
    fn solve() {
        let a = vec![vec![q(1), q(2)], vec![q(3), q(4)]];
        let x = solve_left(&a, &[q(5), q(6)]).unwrap();
        // x a = b
        for j in 0..2 {
            let s: BigRational = (0..2).map(|i| &x[i] * &a[i][j]).sum();
            assert_eq!(s, q([5, 6][j]));
        }
    }
}
