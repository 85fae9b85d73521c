//! Non-negative integer matrices: irreducibility, primitivity, period and
//! the `λ_PF = 1` test, all in exact arithmetic.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, data: rows.iter().flatten().copied().collect() }
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.n.max(1)).map(|c| c.to_vec()).take(self.n).collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.n + j] = x;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = a.checked_mul(other.get(k, j)).expect("matrix entry overflow");
                    out.data[i * n + j] = out.data[i * n + j].checked_add(v).expect("matrix entry overflow");
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Matrix {
        let mut r = Matrix::identity(self.n);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x > 0)
    }

    pub fn is_permutation(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            let row: Vec<u64> = (0..n).map(|j| self.get(i, j)).collect();
            row.iter().filter(|&&x| x == 1).count() == 1 && row.iter().all(|&x| x <= 1)
        }) && (0..n).all(|j| (0..n).filter(|&i| self.get(i, j) == 1).count() == 1)
    }

    /// Indices reachable from column `j` through "`i` occurs in the image of
    /// `j`", including `j`.
    pub fn closure(&self, j: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![j];
        seen[j] = true;
        while let Some(c) = stack.pop() {
            for i in 0..self.n {
                if self.get(i, c) > 0 && !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        (0..self.n).filter(|&i| seen[i]).collect()
    }

    /// `Ok` when irreducible, otherwise a proper nonempty index set `J` with
    /// `A[i][j] = 0` for all `i ∉ J`, `j ∈ J`.
    pub fn irreducibility(&self) -> Result<(), Vec<usize>> {
        if self.n == 0 {
            return Ok(());
        }
        let mut best: Option<Vec<usize>> = None;
        for j in 0..self.n {
            let c = self.closure(j);
            if c.len() < self.n && best.as_ref().map_or(true, |b| c.len() < b.len()) {
                best = Some(c);
            }
        }
        match best {
            None => Ok(()),
            Some(j) => Err(j),
        }
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducibility().is_ok()
    }

    /// Period (gcd of cycle lengths) of an irreducible matrix and the cyclic
    /// classes: index `i` is in class `level(i) mod period`.
    pub fn period(&self) -> (usize, Vec<usize>) {
        assert!(self.is_irreducible());
        let n = self.n;
        if n == 0 {
            return (1, Vec::new());
        }
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut p = 0usize;
        while let Some(c) = queue.pop_front() {
            for i in 0..n {
                if self.get(i, c) == 0 {
                    continue;
                }
                if level[i] == usize::MAX {
                    level[i] = level[c] + 1;
                    queue.push_back(i);
                } else {
                    let diff = (level[c] + 1).abs_diff(level[i]);
                    p = gcd(p, diff);
                }
            }
        }
        let p = p.max(1);
        (p, level.iter().map(|l| l % p).collect())
    }

    /// The 1×1 zero matrix counts as irreducible but has no positive power.
    pub fn is_primitive(&self) -> bool {
        self.is_irreducible() && self.data.iter().any(|&x| x > 0) && self.period().0 == 1
    }

    /// Primitivity by powering the support up to the Wielandt bound.
    pub fn is_primitive_by_powers(&self) -> bool {
        let n = self.n;
        if n == 0 {
            return false;
        }
        let s = self.support();
        let bound = (n - 1) * (n - 1) + 1;
        let mut p = s.clone();
        for _ in 1..bound {
            p = p.bool_mul(&s);
        }
        p.is_positive()
    }

    /// Least `k` with `A^k > 0`, for primitive matrices.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.n;
        if n == 0 {
            return None;
        }
        let s = self.support();
        let bound = (n - 1) * (n - 1) + 1;
        let mut p = s.clone();
        for k in 1..=bound {
            if p.is_positive() {
                return Some(k);
            }
            p = p.bool_mul(&s);
        }
        None
    }

    /// `λ_PF = 1` for an irreducible matrix, which holds exactly for
    /// permutation matrices.
    pub fn pf_is_one(&self) -> Result<bool, NotIrreducible> {
        if !self.is_irreducible() {
            return Err(NotIrreducible);
        }
        Ok(self.is_permutation())
    }

    fn support(&self) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|&x| (x > 0) as u64).collect() }
    }

    fn bool_mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                if self.get(i, k) == 0 {
                    continue;
                }
                for j in 0..n {
                    if other.get(k, j) > 0 {
                        out.data[i * n + j] = 1;
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("matrix is reducible")]
pub struct NotIrreducible;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let fib = Matrix::from_rows(&[vec![1, 1], vec![1, 0]]);
        assert!(fib.is_irreducible() && fib.is_primitive() && !fib.pf_is_one().unwrap());
        let tri = Matrix::from_rows(&[vec![1, 0], vec![1, 1]]);
        assert_eq!(tri.irreducibility(), Err(vec![1]));
        let one = Matrix::from_rows(&[vec![2]]);
        assert!(one.is_irreducible() && !one.pf_is_one().unwrap());
        let swap = Matrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert!(!swap.is_primitive() && swap.pf_is_one().unwrap());
        assert_eq!(swap.period(), (2, vec![0, 1]));
        assert!(!Matrix::identity(2).is_primitive());
        assert!(!Matrix::zeros(1).is_primitive());
    }
}
