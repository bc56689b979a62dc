//! Column-stacked superoperators: `vec(X)[i + N·j] = X[i, j]`.

use crate::lattice::SystemOperator;
use crate::C64;

/// Sparse N²×N² block as `(row, col, value)` entries.
pub type Block = Vec<(usize, usize, C64)>;

#[inline]
pub fn vec_index(n: usize, i: usize, j: usize) -> usize {
    i + n * j
}

fn nonzeros(a: &SystemOperator) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, j)];
            if v != C64::from(0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// `X ↦ A X`
pub fn left(a: &SystemOperator) -> Block {
    let n = a.nrows();
    let mut b = Vec::new();
    for (i, k, v) in nonzeros(a) {
        for j in 0..n {
            b.push((vec_index(n, i, j), vec_index(n, k, j), v));
        }
    }
    b
}

/// `X ↦ X B`
pub fn right(bop: &SystemOperator) -> Block {
    let n = bop.nrows();
    let mut b = Vec::new();
    for (k, j, v) in nonzeros(bop) {
        for i in 0..n {
            b.push((vec_index(n, i, j), vec_index(n, i, k), v));
        }
    }
    b
}

/// `X ↦ L X M†`
pub fn sandwich(l: &SystemOperator, m: &SystemOperator) -> Block {
    let n = l.nrows();
    let ml = nonzeros(l);
    let mm = nonzeros(m);
    let mut b = Vec::new();
    for &(i, k, a) in &ml {
        for &(j, q, c) in &mm {
            b.push((vec_index(n, i, j), vec_index(n, k, q), a * c.conj()));
        }
    }
    b
}

pub fn scale(block: Block, s: C64) -> Block {
    block.into_iter().map(|(r, c, v)| (r, c, v * s)).collect()
}

pub fn concat(parts: Vec<Block>) -> Block {
    parts.into_iter().flatten().collect()
}

/// `[A, X]`
pub fn commutator(a: &SystemOperator) -> Block {
    concat(vec![left(a), scale(right(a), C64::from(-1.0))])
}

/// `{A, X}`
pub fn anticommutator(a: &SystemOperator) -> Block {
    concat(vec![left(a), right(a)])
}

/// `L X L† − ½{L†L, X}`
pub fn dissipator(l: &SystemOperator) -> Block {
    let ldl = l.adjoint() * l;
    concat(vec![
        sandwich(l, l),
        scale(anticommutator(&ldl), C64::from(-0.5)),
    ])
}

/// Apply a block to a column-stacked vector (test helper and small cases).
pub fn apply(block: &Block, x: &[C64]) -> Vec<C64> {
    let mut y = vec![C64::from(0.0); x.len()];
    for &(r, c, v) in block {
        y[r] += v * x[c];
    }
    y
}

pub fn vectorize(x: &SystemOperator) -> Vec<C64> {
    let n = x.nrows();
    let mut v = vec![C64::from(0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            v[vec_index(n, i, j)] = x[(i, j)];
        }
    }
    v
}

pub fn devectorize(v: &[C64], n: usize) -> SystemOperator {
    SystemOperator::from_fn(n, n, |i, j| v[vec_index(n, i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, seed: u64) -> SystemOperator {
        let mut s = seed;
        SystemOperator::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (s >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (s >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn blocks_match_matrix_products() {
        let n = 3;
        let (a, b, x) = (op(n, 1), op(n, 2), op(n, 3));
        let vx = vectorize(&x);
        let check = |blk: Block, want: SystemOperator| {
            let got = devectorize(&apply(&blk, &vx), n);
            assert!((&got - &want).norm_max() < 1e-14);
        };
        check(left(&a), &a * &x);
        check(right(&b), &x * &b);
        check(sandwich(&a, &b), &a * &x * b.adjoint());
        check(commutator(&a), &a * &x - &x * &a);
        let ldl = a.adjoint() * &a;
        let want = &a * &x * a.adjoint() - (&ldl * &x + &x * &ldl) * faer::Scale(C64::from(0.5));
        check(dissipator(&a), want);
    }

    #[test]
    fn two_site_order() {
        let x = SystemOperator::from_fn(2, 2, |i, j| C64::from((10 * (i + 1) + j + 1) as f64));
        let v = vectorize(&x);
        let re: Vec<f64> = v.iter().map(|c| c.re).collect();
        assert_eq!(re, vec![11.0, 21.0, 12.0, 22.0]);
    }
}
