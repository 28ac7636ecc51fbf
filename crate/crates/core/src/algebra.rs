//! Exact small-dimension complex matrix algebra: Pauli basis, Bloch
//! decomposition, tensor products, partial traces, and Hermitian
//! eigensolvers used by every other module.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity admission tolerance on inputs. Guards against drift from
/// numeric integration without masking real defects.
pub const HERM_TOL: f64 = 1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

/// Maximum number of Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Dense square complex matrix, row-major. Density matrices are 2x2 or
/// 4x4; superoperator internals may go up to 16x16.
///
/// A density matrix is Hermitian with unit trace; positivity is *not*
/// an invariant here, and its failure is exactly what the diagnostics
/// module measures.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(
            (1..=16).contains(&dim),
            "matrix dimension {dim} out of range"
        );
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major slice of entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(
            entries.len(),
            dim * dim,
            "entry count does not match dimension"
        );
        assert!(
            (1..=16).contains(&dim),
            "matrix dimension {dim} out of range"
        );
        Self {
            dim,
            data: entries.to_vec(),
        }
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        let data: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(dim, &data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&e| e * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    /// Largest entrywise deviation from Hermiticity, max |M - M'| / 2.
    pub fn herm_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max(0.5 * (self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.herm_deviation();
        if dev > tol {
            Err(Error::NotHermitian { deviation: dev })
        } else {
            Ok(())
        }
    }

    /// Hermitian part (M + M')/2; used by the integrator to prevent
    /// round-off drift from accumulating.
    pub fn symmetrize(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)].conj());
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// AB - BA.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// AB + BA.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) + &(b * a)
}

/// Standard Pauli matrix, sigma_0 being the identity.
///
/// Panics if `i > 3`.
pub fn pauli(i: usize) -> ComplexMatrix {
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    let im = Complex64::I;
    match i {
        0 => ComplexMatrix::from_rows(2, &[one, z, z, one]),
        1 => ComplexMatrix::from_rows(2, &[z, one, one, z]),
        2 => ComplexMatrix::from_rows(2, &[z, -im, im, z]),
        3 => ComplexMatrix::from_rows(2, &[one, z, z, -one]),
        _ => panic!("Pauli index {i} out of range 0..=3"),
    }
}

/// Real 4-component Pauli decomposition of a 2x2 Hermitian matrix,
/// eta = sum_mu eta^mu sigma_mu. States have eta0 = 1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl BlochVector {
    pub fn new(eta0: f64, eta1: f64, eta2: f64, eta3: f64) -> Self {
        Self {
            eta0,
            eta1,
            eta2,
            eta3,
        }
    }

    /// Decomposition of a unit-trace state with spatial part (eta1, eta2, eta3).
    pub fn state(eta1: f64, eta2: f64, eta3: f64) -> Self {
        Self {
            eta0: 0.5,
            eta1,
            eta2,
            eta3,
        }
    }

    /// Euclidean norm of the spatial part; physical states have norm <= 1/2.
    pub fn spatial_norm(&self) -> f64 {
        (self.eta1 * self.eta1 + self.eta2 * self.eta2 + self.eta3 * self.eta3).sqrt()
    }

    pub fn component(&self, mu: usize) -> f64 {
        match mu {
            0 => self.eta0,
            1 => self.eta1,
            2 => self.eta2,
            3 => self.eta3,
            _ => panic!("Bloch component {mu} out of range 0..=3"),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.eta0 - other.eta0)
            .abs()
            .max((self.eta1 - other.eta1).abs())
            .max((self.eta2 - other.eta2).abs())
            .max((self.eta3 - other.eta3).abs())
    }
}

/// eta^mu = Tr[m sigma_mu] / 2. Rejects inputs whose anti-Hermitian part
/// exceeds the admission tolerance.
pub fn bloch_decompose(m: &ComplexMatrix) -> Result<BlochVector> {
    assert_eq!(m.dim(), 2, "Bloch decomposition requires a 2x2 matrix");
    m.check_hermitian(HERM_TOL)?;
    let comp = |mu: usize| 0.5 * (&pauli(mu) * m).trace().re;
    Ok(BlochVector::new(comp(0), comp(1), comp(2), comp(3)))
}

/// Inverse of [`bloch_decompose`]: m = sum_mu eta^mu sigma_mu.
pub fn bloch_compose(v: &BlochVector) -> ComplexMatrix {
    ComplexMatrix::from_rows(
        2,
        &[
            Complex64::new(v.eta0 + v.eta3, 0.0),
            Complex64::new(v.eta1, -v.eta2),
            Complex64::new(v.eta1, v.eta2),
            Complex64::new(v.eta0 - v.eta3, 0.0),
        ],
    )
}

/// Kronecker product; tensor factor 1 is the slow index, so the singlet
/// witness eigenvector is exactly (1, 0, 0, -1)/sqrt(2).
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    assert!(n <= 16, "tensor product dimension {n} out of range");
    let mut out = ComplexMatrix::zeros(n);
    for i1 in 0..na {
        for j1 in 0..na {
            let f = a[(i1, j1)];
            if f == Complex64::ZERO {
                continue;
            }
            for i2 in 0..nb {
                for j2 in 0..nb {
                    out[(i1 * nb + i2, j1 * nb + j2)] = f * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Which tensor factor a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Reduce a 4x4 pair matrix to the marginal of one subsystem.
pub fn partial_trace(m: &ComplexMatrix, keep: Subsystem) -> ComplexMatrix {
    assert_eq!(m.dim(), 4, "partial trace requires a 4x4 matrix");
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::First => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
                Subsystem::Second => m[(i, j)] + m[(2 + i, 2 + j)],
            };
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending. Dimension 2 uses the
/// closed quadratic form; larger dimensions run a cyclic Jacobi sweep.
pub fn herm_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.check_hermitian(HERM_TOL)?;
    if m.dim() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + m[(0, 1)].norm_sqr()).sqrt();
        return Ok(vec![mean - disc, mean + disc]);
    }
    let (vals, _) = jacobi(m)?;
    Ok(vals)
}

/// Eigenvalues (ascending) and the matrix whose columns are the matching
/// eigenvectors.
pub fn herm_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    m.check_hermitian(HERM_TOL)?;
    jacobi(m)
}

/// Cyclic Jacobi diagonalization for complex Hermitian matrices. Each
/// rotation annihilates one off-diagonal pair; sweeps repeat until the
/// off-diagonal Frobenius norm falls below [`JACOBI_OFF_TOL`].
fn jacobi(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    let mut a = m.symmetrize();
    let mut v = ComplexMatrix::identity(n);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[(p, q)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > JACOBI_OFF_TOL {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigNotConverged {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = s * phase;

                // A <- G' A G with G[p][p] = G[q][q] = c,
                // G[p][q] = s e^{i phi}, G[q][p] = -s e^{-i phi}.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sp.conj() * akq;
                    a[(k, q)] = sp * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sp * aqk;
                    a[(q, k)] = sp.conj() * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sp.conj() * vkq;
                    v[(k, q)] = sp * vkp + c * vkq;
                }
            }
        }
        off = off_norm(&a);
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, col)] = v[(k, src)];
        }
    }
    Ok((vals, vecs))
}
