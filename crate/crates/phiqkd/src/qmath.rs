//! Minimal complex linear algebra for two-dimensional states, 2x2 operators,
//! and 4x4 unitaries.
//!
//! Everything here is an immutable value type; all operations are pure
//! functions and can be used concurrently without restriction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unit-norm tolerance enforced on state construction.
const NORM_TOL: f64 = 1e-12;
/// Components at or below this magnitude are skipped when choosing the
/// phase anchor during canonicalization.
const ANCHOR_TOL: f64 = 1e-12;
/// Orthonormality tolerance accepted by [`complete_to_unitary`].
const ORTHO_TOL: f64 = 1e-10;

/// A normalized single-qubit pure state `a0|0> + a1|1>`.
///
/// States are stored phase-canonically: the first amplitude whose magnitude
/// exceeds 1e-12 is real and non-negative. Two kets that differ only by a
/// global phase therefore compare equal componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket2 {
    a0: Complex64,
    a1: Complex64,
}

impl Ket2 {
    /// Builds a normalized, phase-canonical state from raw amplitudes.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n2 = a0.norm_sqr() + a1.norm_sqr();
        if n2 < 1e-24 {
            return Err(Error::ZeroKet);
        }
        let (mut a0, mut a1) = (a0, a1);
        if (n2 - 1.0).abs() > NORM_TOL {
            let inv = 1.0 / n2.sqrt();
            a0 *= inv;
            a1 *= inv;
        }
        Ok(Self::canonical(a0, a1))
    }

    /// Real state `cos(t)|0> + sin(t)|1>` on the x-z great circle.
    pub fn from_angle(t: f64) -> Self {
        Self::canonical(Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0))
    }

    /// The computational basis state `|0>`.
    pub fn zero() -> Self {
        Self::from_angle(0.0)
    }

    /// The computational basis state `|1>`.
    pub fn one() -> Self {
        Self::canonical(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// The Hadamard state `(|0> + |1>)/sqrt(2)`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::canonical(Complex64::new(h, 0.0), Complex64::new(h, 0.0))
    }

    fn canonical(a0: Complex64, a1: Complex64) -> Self {
        let anchor = if a0.norm() > ANCHOR_TOL { a0 } else { a1 };
        if anchor.im == 0.0 {
            // Real anchors take an exact sign flip so that states built from
            // real angles keep bit-exact trigonometric components.
            if anchor.re >= 0.0 {
                Self { a0, a1 }
            } else {
                Self { a0: -a0, a1: -a1 }
            }
        } else {
            let phase = anchor.conj() / anchor.norm();
            Self {
                a0: a0 * phase,
                a1: a1 * phase,
            }
        }
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn component(&self, i: usize) -> Complex64 {
        match i {
            0 => self.a0,
            1 => self.a1,
            _ => panic!("Ket2 component index {i} out of range"),
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Ket2) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    pub fn norm(&self) -> f64 {
        (self.a0.norm_sqr() + self.a1.norm_sqr()).sqrt()
    }

    /// The state orthogonal to this one, in canonical phase.
    pub fn orthogonal(&self) -> Ket2 {
        Self::canonical(-self.a1.conj(), self.a0.conj())
    }
}

/// A 2x2 complex operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op2 {
    m: [[Complex64; 2]; 2],
}

impl Op2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[Complex64::ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = [[Complex64::ZERO; 2]; 2];
        m[0][0] = Complex64::ONE;
        m[1][1] = Complex64::ONE;
        Self { m }
    }

    /// Rank-1 projector `|k><k|`.
    pub fn outer(k: &Ket2) -> Self {
        let a = [k.a0, k.a1];
        let mut m = [[Complex64::ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i] * a[j].conj();
            }
        }
        Self { m }
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.m[r][c]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.m;
        for row in &mut m {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        Self { m }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0].conj()).norm() <= tol
            && self.m[0][0].im.abs() <= tol
            && self.m[1][1].im.abs() <= tol
    }

    /// Positive semi-definiteness via the exact 2x2 trace/determinant
    /// criterion. Non-Hermitian operators are never reported positive.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.trace().re >= -tol && self.det().re >= -tol
    }

    /// Born expectation `<k|M|k>`, returned as its real part.
    pub fn expectation(&self, k: &Ket2) -> f64 {
        let a = [k.a0, k.a1];
        let mut acc = Complex64::ZERO;
        for (i, row) in self.m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                acc += a[i].conj() * e * a[j];
            }
        }
        acc.re
    }

    /// Largest componentwise magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Op2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }
}

impl std::ops::Add for Op2 {
    type Output = Op2;
    fn add(self, rhs: Op2) -> Op2 {
        let mut m = self.m;
        for (row, other) in m.iter_mut().zip(rhs.m.iter()) {
            for (e, o) in row.iter_mut().zip(other.iter()) {
                *e += *o;
            }
        }
        Op2 { m }
    }
}

impl std::ops::Sub for Op2 {
    type Output = Op2;
    fn sub(self, rhs: Op2) -> Op2 {
        let mut m = self.m;
        for (row, other) in m.iter_mut().zip(rhs.m.iter()) {
            for (e, o) in row.iter_mut().zip(other.iter()) {
                *e -= *o;
            }
        }
        Op2 { m }
    }
}

/// A complex 4-vector, used for two-qubit amplitudes and unitary columns.
pub type CVec4 = [Complex64; 4];

pub fn dot4(a: &CVec4, b: &CVec4) -> Complex64 {
    (0..4).map(|i| a[i].conj() * b[i]).sum()
}

pub fn norm4(a: &CVec4) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// A 4x4 unitary stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4 {
    m: [[Complex64; 4]; 4],
}

impl Unitary4 {
    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.m[r][c]
    }

    pub fn column(&self, c: usize) -> CVec4 {
        [self.m[0][c], self.m[1][c], self.m[2][c], self.m[3][c]]
    }

    /// Matrix-vector product `U v`.
    pub fn apply(&self, v: &CVec4) -> CVec4 {
        let mut out = [Complex64::ZERO; 4];
        for (r, row) in self.m.iter().enumerate() {
            out[r] = (0..4).map(|c| row[c] * v[c]).sum();
        }
        out
    }

    /// Largest componentwise magnitude of `U^dagger U - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            let ci = self.column(i);
            for j in 0..4 {
                let d = dot4(&ci, &self.column(j));
                let target = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                worst = worst.max((d - target).norm());
            }
        }
        worst
    }
}

/// Completes up to four orthonormal columns to a full 4x4 unitary.
///
/// The supplied columns are preserved bit-exactly as the leading columns.
/// The remaining columns come from orthonormalizing canonical basis vectors
/// against everything accepted so far, using modified Gram-Schmidt with a
/// re-orthogonalization pass.
pub fn complete_to_unitary(cols: &[CVec4]) -> Result<Unitary4> {
    if cols.len() > 4 {
        return Err(Error::CompletionFailed);
    }
    let mut residual = 0.0f64;
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((dot4(a, b) - target).norm());
        }
    }
    if residual > ORTHO_TOL {
        return Err(Error::NonOrthonormalColumns { residual });
    }

    let mut basis: Vec<CVec4> = cols.to_vec();
    for k in 0..4 {
        if basis.len() == 4 {
            break;
        }
        let mut v = [Complex64::ZERO; 4];
        v[k] = Complex64::ONE;
        for _ in 0..2 {
            for u in &basis {
                let overlap = dot4(u, &v);
                for i in 0..4 {
                    v[i] -= overlap * u[i];
                }
            }
        }
        let n = norm4(&v);
        if n > 1e-8 {
            let inv = 1.0 / n;
            for x in v.iter_mut() {
                *x *= inv;
            }
            basis.push(v);
        }
    }
    if basis.len() != 4 {
        return Err(Error::CompletionFailed);
    }

    let mut m = [[Complex64::ZERO; 4]; 4];
    for (c, col) in basis.iter().enumerate() {
        for r in 0..4 {
            m[r][c] = col[r];
        }
    }
    Ok(Unitary4 { m })
}
