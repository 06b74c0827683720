//! Dense linear algebra on small square systems: exact (rational) and float.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::symexpr::Rational;

/// Determinant by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled to integers by the lcm of its denominators, so
/// every intermediate value is an exact integer minor.
pub fn bareiss_determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            scale *= &lcm;
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();

    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Rational::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Rational::new(sign * &m[n - 1][n - 1], scale)
}

/// Row-echelon reduction over the rationals; returns the reduced rows and pivot columns.
fn echelon(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &pivot;
            for j in c..cols {
                let delta = &factor * &m[r][j];
                m[i][j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    echelon(rows).1.len()
}

/// Exact solution of the square system `A x = b`, or `None` if `A` is singular.
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let augmented: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(row, v)| row.iter().cloned().chain(std::iter::once(v.clone())).collect()).collect();
    let (m, pivots) = echelon(&augmented);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc -= &m[i][j] * &x[j];
        }
        x[i] = acc / &m[i][i];
    }
    Some(x)
}

/// `P A = L U` with partial pivoting; `L` has a unit diagonal and shares storage with `U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
    parity: f64,
    singular: bool,
}

impl LuFactors {
    pub fn new(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| lu[i][k].abs().total_cmp(&lu[j][k].abs())).unwrap_or(k);
            if lu[p][k] == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
                parity = -parity;
            }
            for i in k + 1..n {
                let factor = lu[i][k] / lu[k][k];
                lu[i][k] = factor;
                for j in k + 1..n {
                    lu[i][j] -= factor * lu[k][j];
                }
            }
        }
        Self { lu, perm, parity, singular }
    }

    pub fn determinant(&self) -> f64 {
        (0..self.lu.len()).fold(self.parity, |acc, i| acc * self.lu[i][i])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[i][j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i][j] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        Some(y)
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.len();
        let mut z = b.to_vec();
        // U^T z = b
        for i in 0..n {
            for j in 0..i {
                z[i] -= self.lu[j][i] * z[j];
            }
            z[i] /= self.lu[i][i];
        }
        // L^T w = z
        for i in (0..n).rev() {
            for j in i + 1..n {
                z[i] -= self.lu[j][i] * z[j];
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        Some(x)
    }

    /// Hager's estimate of `||A^-1||_1`.
    pub fn inverse_norm1_estimate(&self) -> Option<f64> {
        let n = self.lu.len();
        if n == 0 {
            return Some(0.0);
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x)?;
            estimate = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi)?;
            let (j, zmax) = z.iter().enumerate().map(|(j, v)| (j, v.abs())).max_by(|a, b| a.1.total_cmp(&b.1))?;
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        Some(estimate)
    }
}

pub fn norm1(a: &[Vec<f64>]) -> f64 {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|row| row[j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{rat, ratio};

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    /// Cofactor expansion, the textbook definition.
    fn laplace(m: &[Vec<Rational>]) -> Rational {
        if m.len() == 1 {
            return m[0][0].clone();
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let s = if j % 2 == 0 { rat(1) } else { rat(-1) };
                s * &m[0][j] * laplace(&minor)
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = vec![
            vec![ratio(1, 2), rat(3), rat(-1), rat(4)],
            vec![rat(2), ratio(-2, 3), rat(5), rat(0)],
            vec![rat(0), rat(1), ratio(7, 5), rat(2)],
            vec![rat(3), rat(0), rat(1), ratio(1, 9)],
        ];
        assert_eq!(bareiss_determinant(&m), laplace(&m));
    }

    #[test]
    fn bareiss_needs_pivoting() {
        let m = q(&[&[0, 1], &[1, 0]]);
        assert_eq!(bareiss_determinant(&m), rat(-1));
        let m = q(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert_eq!(bareiss_determinant(&m), rat(-1));
        assert_eq!(bareiss_determinant(&q(&[&[1, 2], &[2, 4]])), rat(0));
    }

    #[test]
    fn exact_solve_and_rank() {
        let a = q(&[&[2, 1], &[1, 3]]);
        let x = solve_exact(&a, &[rat(3), rat(5)]).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
        assert!(solve_exact(&q(&[&[1, 2], &[2, 4]]), &[rat(1), rat(2)]).is_none());
        assert_eq!(rank(&q(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        assert_eq!(rank(&q(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn lu_solve_and_determinant() {
        let a = vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]];
        let lu = LuFactors::new(&a);
        let det_exact = laplace(
            &a.iter().map(|r| r.iter().map(|&v| Rational::from_float(v).unwrap()).collect()).collect::<Vec<_>>(),
        );
        assert!((lu.determinant() - crate::symexpr::rational::to_f64(&det_exact)).abs() < 1e-12);
        let b = [1.0, 2.0, 3.0];
        let x = lu.solve(&b).unwrap();
        let back = mat_vec(&a, &x);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let xt = lu.solve_transpose(&b).unwrap();
        let at: Vec<Vec<f64>> = (0..3).map(|j| (0..3).map(|i| a[i][j]).collect()).collect();
        for (u, v) in mat_vec(&at, &xt).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn hager_estimate_on_diagonal() {
        let a = vec![vec![2.0, 0.0], vec![0.0, 0.25]];
        let est = LuFactors::new(&a).inverse_norm1_estimate().unwrap();
        assert!((est - 4.0).abs() < 1e-12);
        assert_eq!(norm1(&a), 2.0);
    }

    #[test]
    fn singular_lu() {
        let lu = LuFactors::new(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(lu.is_singular() || lu.determinant().abs() < 1e-15);
    }
}
