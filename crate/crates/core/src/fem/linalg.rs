//! Small dense and banded LU solvers with partial pivoting.
//!
//! The assembled 1D systems are narrow-banded (element blocks couple only to
//! adjacent cells; the condensed trace system is tridiagonal), so a banded
//! factorization keeps global solves linear in the number of cells. The dense
//! variant serves the element-local solves and doubles as the test oracle for
//! the banded path.

use super::FemError;

/// Column-major dense matrix, only as large as the local element systems.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    n: usize,
    a: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[j * self.n + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[j * self.n + i] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.a[j * self.n + i] += v;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// LU factorization with partial pivoting, in place.
    pub fn factor(mut self) -> Result<DenseLu, FemError> {
        let n = self.n;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..n {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !best.is_finite() || best < 1e-300 {
                return Err(FemError::SingularSystem);
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    let tmp = self.get(k, j);
                    self.set(k, j, self.get(p, j));
                    self.set(p, j, tmp);
                }
            }
            let inv = 1.0 / self.get(k, k);
            for i in k + 1..n {
                let m = self.get(i, k) * inv;
                self.set(i, k, m);
                if m != 0.0 {
                    for j in k + 1..n {
                        let v = self.get(i, j) - m * self.get(k, j);
                        self.set(i, j, v);
                    }
                }
            }
        }
        Ok(DenseLu { m: self, piv })
    }
}

/// Factored dense system; `solve` may be called repeatedly.
#[derive(Debug, Clone)]
pub struct DenseLu {
    m: DenseMatrix,
    piv: Vec<usize>,
}

impl DenseLu {
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.m.n;
        assert_eq!(b.len(), n, "rhs length mismatch");
        // Factorization swaps whole rows (multipliers included), so the
        // permutation must be applied in full before the triangular solves.
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..n {
                    b[i] -= self.m.get(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            b[k] /= self.m.get(k, k);
            let bk = b[k];
            if bk != 0.0 {
                for i in 0..k {
                    b[i] -= self.m.get(i, k) * bk;
                }
            }
        }
    }
}

/// Band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage keeps `kl` spare super-diagonals for pivoting fill, LAPACK-style:
/// entry (i, j) lives at band row `kl + ku + i - j`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major over band rows: `ab[r * n + j]`, r in `0..2*kl+ku+1`.
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, ab: vec![0.0; (2 * kl + ku + 1) * n] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j <= i + self.ku + self.kl && i <= j + self.kl, "entry outside band");
        (self.kl + self.ku + i - j) * self.n + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    /// Banded LU with partial pivoting; pivot rows stay within `kl` of the
    /// diagonal so fill is confined to the spare super-diagonals.
    pub fn factor(mut self) -> Result<BandLu, FemError> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let imax = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=imax {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !best.is_finite() || best < 1e-300 {
                return Err(FemError::SingularSystem);
            }
            piv[k] = p;
            let jmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let a = self.get(k, j);
                    let b = self.get(p, j);
                    self.set(k, j, b);
                    self.set(p, j, a);
                }
            }
            let inv = 1.0 / self.get(k, k);
            for i in k + 1..=imax {
                let m = self.get(i, k) * inv;
                self.set(i, k, m);
                if m != 0.0 {
                    for j in k + 1..=jmax {
                        let v = self.get(i, j) - m * self.get(k, j);
                        self.set(i, j, v);
                    }
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.m.n;
        let (kl, ku) = (self.m.kl, self.m.ku);
        assert_eq!(b.len(), n, "rhs length mismatch");
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            if bk != 0.0 {
                let imax = (k + kl).min(n - 1);
                for i in k + 1..=imax {
                    b[i] -= self.m.get(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            b[k] /= self.m.get(k, k);
            let bk = b[k];
            if bk != 0.0 {
                let imin = k.saturating_sub(kl + ku);
                for i in imin..k {
                    b[i] -= self.m.get(i, k) * bk;
                }
            }
        }
    }
}
