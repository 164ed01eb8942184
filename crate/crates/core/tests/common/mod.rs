#![allow(dead_code)]

use fracflow::grid::{Field, GridDims};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn random_field<const K: usize>(d: GridDims, seed: u64) -> Field<f64, K> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::from_fn(d, |_, _| rng.gen_range(-1.0..1.0))
}

fn unit(c: usize) -> [i64; 3] {
    let mut e = [0; 3];
    e[c] = 1;
    e
}

pub fn neighbour(d: GridDims, x: usize, c: usize, sign: i64) -> usize {
    let [i, j, k] = d.coords(x).map(|t| t as i64);
    let e = unit(c);
    d.index_wrapped(i + sign * e[0], j + sign * e[1], k + sign * e[2])
}

/// Forward-difference gradient, `3N × N`, rows component-major.
pub fn dense_grad(d: GridDims) -> Mat {
    let n = d.len();
    let mut g = vec![vec![0.0; n]; 3 * n];
    for x in 0..n {
        for c in 0..3 {
            g[c * n + x][neighbour(d, x, c, 1)] += 1.0;
            g[c * n + x][x] -= 1.0;
        }
    }
    g
}

/// `A`, `6N × 3N`: `(v; S v)/√2` with `(S v)_c[x] = v_c[x − e_c]`.
pub fn dense_a(d: GridDims) -> Mat {
    let n = d.len();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = vec![vec![0.0; 3 * n]; 6 * n];
    for x in 0..n {
        for c in 0..3 {
            a[c * n + x][c * n + x] = s;
            a[(c + 3) * n + x][c * n + neighbour(d, x, c, -1)] = s;
        }
    }
    a
}

pub fn transpose(m: &Mat) -> Mat {
    let cols = m[0].len();
    (0..cols).map(|c| m.iter().map(|row| row[c]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| row.iter().zip(col).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

pub fn matvec(a: &Mat, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(m: &Mat) -> Mat {
    let n = m.len();
    let mut m = m.clone();
    let mut inv: Mat = (0..n).map(|a| (0..n).map(|b| f64::from(a == b)).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col];
        assert!(p.abs() > 1e-12, "singular matrix");
        for c in 0..n {
            m[col][c] /= p;
            inv[col][c] /= p;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for c in 0..n {
                    m[r][c] -= f * m[col][c];
                    inv[r][c] -= f * inv[col][c];
                }
            }
        }
    }
    inv
}

/// `G (GᵀG)† Gᵀ`; the Laplacian pseudo-inverse uses `(L + J)⁻¹ − J` with
/// `J = 11ᵀ/N`, valid because the periodic grid graph is connected.
pub fn dense_gamma(d: GridDims) -> Mat {
    let n = d.len();
    let g = dense_grad(d);
    let gt = transpose(&g);
    let j = 1.0 / n as f64;
    let mut lap = matmul(&gt, &g);
    lap.iter_mut().flatten().for_each(|x| *x += j);
    let mut pinv = invert(&lap);
    pinv.iter_mut().flatten().for_each(|x| *x -= j);
    matmul(&matmul(&g, &pinv), &gt)
}

/// Orthonormal basis of the column span of `m` by modified Gram-Schmidt.
pub fn column_basis(m: &Mat) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in transpose(m) {
        for _ in 0..2 {
            for q in &basis {
                let p: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
