//! Integer null lattices of rational matrices.
//!
//! The kernel is found with unimodular column operations (the transform that
//! brings the matrix to column echelon form), then the basis is put in row
//! Hermite normal form so that callers get a canonical, reproducible answer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Clears denominators row by row.
fn integer_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// HNF basis of `{x ∈ Z^cols : A x = 0}` where `A` has the given rational rows.
///
/// Returns an empty vector when the lattice is `{0}`.
pub fn integer_kernel(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut a = integer_rows(rows);
    debug_assert!(a.iter().all(|r| r.len() == cols));
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let swap_cols = |m: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= q * col_i
    let axpy_cols = |m: &mut Vec<Vec<BigInt>>, j: usize, i: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let t = &row[i] * q;
            row[j] -= t;
        }
    };

    let mut pivot = 0;
    for r in 0..a.len() {
        if pivot == cols {
            break;
        }
        loop {
            let best = (pivot..cols)
                .filter(|&j| !a[r][j].is_zero())
                .min_by(|&x, &y| a[r][x].abs().cmp(&a[r][y].abs()));
            let Some(j) = best else { break };
            if j != pivot {
                swap_cols(&mut a, j, pivot);
                swap_cols(&mut u, j, pivot);
            }
            let mut clean = true;
            for j in pivot + 1..cols {
                if a[r][j].is_zero() {
                    continue;
                }
                let q = a[r][j].div_floor(&a[r][pivot]);
                axpy_cols(&mut a, j, pivot, &q);
                axpy_cols(&mut u, j, pivot, &q);
                if !a[r][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                pivot += 1;
                break;
            }
        }
    }

    let basis: Vec<Vec<BigInt>> =
        (pivot..cols).map(|j| (0..cols).map(|i| u[i][j].clone()).collect()).collect();
    hermite_rows(basis)
}

/// Row Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn hermite_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(cols) = rows.first().map(Vec::len) else { return rows };
    let mut top = 0;
    for c in 0..cols {
        if top == rows.len() {
            break;
        }
        loop {
            let best = (top..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()));
            let Some(i) = best else { break };
            rows.swap(i, top);
            let mut clean = true;
            for i in top + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[top][c]);
                let pivot_row = rows[top].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= p * &q;
                }
                if !rows[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                if rows[top][c].is_negative() {
                    for x in rows[top].iter_mut() {
                        *x = -&*x;
                    }
                }
                let pivot_row = rows[top].clone();
                for i in 0..top {
                    let q = rows[i][c].div_floor(&pivot_row[c]);
                    if !q.is_zero() {
                        for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                            *x -= p * &q;
                        }
                    }
                }
                top += 1;
                break;
            }
        }
    }
    rows.truncate(top);
    rows
}

/// Divides by the gcd of the entries and makes the first nonzero entry positive.
pub fn normalize_primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = v.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(BigInt::one);
    v.iter().map(|x| x / &g * &sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rq(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
    }

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn counterexample_lattice() {
        // n: (1,0,0,0); n²: (0,1,1,0); n⁴: (0,0,0,1)
        let k = integer_kernel(&rq(&[&[1, 0, 0, 0], &[0, 1, 1, 0], &[0, 0, 0, 1]]), 4);
        assert_eq!(k, vec![iv(&[0, 1, -1, 0])]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        assert!(integer_kernel(&rq(&[&[2, 1], &[1, 1]]), 2).is_empty());
    }

    #[test]
    fn saturated_kernel() {
        // 2x + 4y = 0 has kernel spanned by (2,-1), not (4,-2)
        let k = integer_kernel(&rq(&[&[2, 4]]), 2);
        assert_eq!(k, vec![iv(&[2, -1])]);
    }

    #[test]
    fn rational_rows_are_cleared() {
        let rows = vec![vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into())]];
        assert_eq!(integer_kernel(&rows, 2), vec![iv(&[2, -3])]);
    }

    #[test]
    fn empty_matrix_gives_identity() {
        assert_eq!(integer_kernel(&[], 3), vec![iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])]);
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate(entries in proptest::collection::vec(-4i64..5, 12), r in 1usize..4) {
            let cols = 4;
            let rows: Vec<Vec<i64>> = entries.chunks(cols).take(r).map(|c| c.to_vec()).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let k = integer_kernel(&rq(&refs), cols);
            for v in &k {
                prop_assert!(v.iter().any(|x| !x.is_zero()));
                for row in &rows {
                    let dot: BigInt = row.iter().zip(v).map(|(a, b)| BigInt::from(*a) * b).sum();
                    prop_assert!(dot.is_zero());
                }
            }
            // rank-nullity over Q
            let rank = cols - k.len();
            prop_assert!(rank <= rows.len());
        }
    }
}
