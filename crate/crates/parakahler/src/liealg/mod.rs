//! `sl(3, C)` with the twisted real form, the order-6 outer automorphism
//! `sigma_H`, its powers, and the eigenspace grading `g_0 ... g_5`.
//!
//! Conventions:
//! * `P_H = [[0,1,0],[1,0,0],[0,0,-H]]`, `tau(X) = P_H conj(X) P_H^{-1}`.
//! * `P_H^eps = diag(eps^2, eps^4, 1) P_H` with `eps = exp(i pi / 3)`, and
//!   `sigma_H(X) = -P_H^eps X^T P_H^eps`.
//! * `g_j` is the `eps^(c j)` eigenspace of `sigma_H`, where the sign `c` is
//!   calibrated once against the basis table (see [`convention`]).

mod expm;
mod mat3;

use core::sync::atomic::{AtomicI8, Ordering};

use num_complex::Complex64 as C64;

pub use expm::{expm, expm_scaled};
pub use mat3::Mat3C;

use crate::math;
use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Sign of the induced metric: `H = +1` (elliptic) or `H = -1` (hyperbolic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature(i8);

impl Signature {
    pub const ELLIPTIC: Signature = Signature(1);
    pub const HYPERBOLIC: Signature = Signature(-1);

    pub fn new(h: i64) -> Result<Self> {
        match h {
            1 => Ok(Self::ELLIPTIC),
            -1 => Ok(Self::HYPERBOLIC),
            _ => Err(Error::InvalidParameter("H must be +1 or -1")),
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn h(self) -> f64 {
        f64::from(self.0)
    }

    /// Principal `sqrt(-H)`: `i` for `H = 1`, `1` for `H = -1`.
    pub fn sqrt_minus_h(self) -> C64 {
        if self.0 == 1 {
            C64::new(0.0, 1.0)
        } else {
            C64::new(1.0, 0.0)
        }
    }

    /// Principal `sqrt(H)`: `1` for `H = 1`, `i` for `H = -1`.
    pub fn sqrt_h(self) -> C64 {
        if self.0 == 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 1.0)
        }
    }

    /// `sqrt(H w)` on the branch used throughout: principal root of `w`
    /// for `H = 1`, `i * sqrt(w)` for `H = -1`. Valid for `Re w > 0`.
    pub fn sqrt_h_times(self, w: C64) -> C64 {
        let r = w.sqrt();
        if self.0 == 1 {
            r
        } else {
            C64::new(0.0, 1.0) * r
        }
    }

    /// `P_H`.
    pub fn p_h(self) -> Mat3C {
        Mat3C::from_real([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -self.h()]])
    }

    /// `P_H^eps = [[0, eps^2, 0], [eps^4, 0, 0], [0, 0, -H]]`.
    pub fn p_eps(self) -> Mat3C {
        let z = C64::new(0.0, 0.0);
        Mat3C::from_rows([
            [z, eps_pow(2), z],
            [eps_pow(4), z, z],
            [z, z, C64::new(-self.h(), 0.0)],
        ])
    }

    /// `P_3`, the matrix in the closed form of `sigma_H^3`. Equal to `P_H`.
    pub fn p3(self) -> Mat3C {
        self.p_h()
    }

    /// `R_H` with `R_H^T R_H = P_H`.
    pub fn r_h(self) -> Mat3C {
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        let ia = C64::new(0.0, FRAC_1_SQRT_2);
        let z = C64::new(0.0, 0.0);
        Mat3C::from_rows([[a, a, z], [ia, -ia, z], [z, z, self.sqrt_minus_h()]])
    }

    /// `R_H^{-1}` in closed form.
    pub fn r_h_inv(self) -> Mat3C {
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        let ia = C64::new(0.0, FRAC_1_SQRT_2);
        let z = C64::new(0.0, 0.0);
        Mat3C::from_rows([[a, -ia, z], [a, ia, z], [z, z, self.sqrt_minus_h().inv()]])
    }
}

/// `eps^k` with `eps = exp(i pi / 3)`.
pub fn eps_pow(k: i64) -> C64 {
    let k = k.rem_euclid(6);
    let ang = core::f64::consts::PI * (k as f64) / 3.0;
    match k {
        0 => C64::new(1.0, 0.0),
        3 => C64::new(-1.0, 0.0),
        _ => C64::new(math::cos(ang), math::sin(ang)),
    }
}

/// `P_2 = diag(eps^4, eps^2, 1)`.
pub fn p2() -> Mat3C {
    Mat3C::diag(eps_pow(4), eps_pow(2), C64::new(1.0, 0.0))
}

/// `sigma_H(X) = -P_H^eps X^T P_H^eps` on the algebra.
pub fn sigma(x: &Mat3C, s: Signature) -> Mat3C {
    let p = s.p_eps();
    -(p * x.transpose() * p)
}

/// Group form `P_H^eps (g^T)^{-1} P_H^eps`.
pub fn sigma_group(g: &Mat3C, s: Signature) -> Result<Mat3C> {
    let p = s.p_eps();
    let inv_t = g.transpose().inverse().ok_or(Error::Singular)?;
    Ok(p * inv_t * p)
}

/// `sigma_H^k` by repeated application.
pub fn sigma_pow(x: &Mat3C, k: usize, s: Signature) -> Mat3C {
    let mut y = *x;
    for _ in 0..(k % 6) {
        y = sigma(&y, s);
    }
    y
}

/// Closed form of `sigma_H^2`: `P_2 X P_2^{-1}`.
pub fn sigma2(x: &Mat3C) -> Mat3C {
    let p = p2();
    let pinv = Mat3C::diag(eps_pow(2), eps_pow(4), C64::new(1.0, 0.0));
    p * *x * pinv
}

/// Closed form of `sigma_H^3`: `-P_3 X^T P_3`.
pub fn sigma3(x: &Mat3C, s: Signature) -> Mat3C {
    let p = s.p3();
    -(p * x.transpose() * p)
}

/// Real-form involution `tau(X) = P_H conj(X) P_H^{-1}` (same on the group).
pub fn tau(x: &Mat3C, s: Signature) -> Mat3C {
    let p = s.p_h();
    p * x.conj() * p
}

/// Is `x` fixed by `tau` to within `tol` (entrywise)?
pub fn in_slr(x: &Mat3C, s: Signature, tol: f64) -> bool {
    (tau(x, s) - *x).max_abs() <= tol
}

/// `Ad(R_H)(X) = R_H X R_H^{-1}`; real for `tau`-fixed input.
pub fn rh_conjugate(x: &Mat3C, s: Signature) -> Mat3C {
    s.r_h() * *x * s.r_h_inv()
}

/// `Ad(R_H^{-1})(X)`, the inverse of [`rh_conjugate`].
pub fn rh_unconjugate(x: &Mat3C, s: Signature) -> Mat3C {
    s.r_h_inv() * *x * s.r_h()
}

static CONVENTION: AtomicI8 = AtomicI8::new(0);

/// Eigenvalue convention `c`: `sigma_H` acts on `g_j` by `eps^(c j)`.
///
/// Determined by applying `sigma_H` to the tabulated `g_1` element `E_12`
/// and reading off the eigenvalue. Computed on first use and cached; the
/// value is independent of `H`.
pub fn convention() -> i8 {
    let c = CONVENTION.load(Ordering::Relaxed);
    if c != 0 {
        return c;
    }
    let c = calibrate();
    CONVENTION.store(c, Ordering::Relaxed);
    c
}

fn calibrate() -> i8 {
    let e12 = Mat3C::unit(0, 1);
    let image = sigma(&e12, Signature::HYPERBOLIC);
    let lambda = image[(0, 1)];
    if (lambda - eps_pow(1)).norm() < 1e-12 {
        1
    } else {
        debug_assert!((lambda - eps_pow(-1)).norm() < 1e-12);
        -1
    }
}

/// The eight tabulated basis elements of the grading, as `(j, X)` pairs.
pub fn table_basis(s: Signature) -> [(usize, Mat3C); 8] {
    let h = s.h();
    let e = Mat3C::unit;
    let one = C64::new(1.0, 0.0);
    [
        (0, Mat3C::diag(one, -one, C64::new(0.0, 0.0))),
        (1, e(0, 1)),
        (1, e(1, 2) - e(2, 0) * h),
        (2, e(0, 2) + e(2, 1) * h),
        (3, Mat3C::diag(one, one, C64::new(-2.0, 0.0))),
        (4, e(1, 2) + e(2, 0) * h),
        (5, e(1, 0)),
        (5, e(0, 2) * (-h) + e(2, 1)),
    ]
}

/// Projections of a matrix onto the six eigenspaces of `sigma_H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomp {
    pub parts: [Mat3C; 6],
}

impl EigenDecomp {
    /// Sum of all parts; reproduces the input.
    pub fn sum(&self) -> Mat3C {
        self.parts.iter().fold(Mat3C::ZERO, |acc, p| acc + *p)
    }

    /// Frobenius norm of part `j` relative to the norm of the whole.
    pub fn mass(&self, j: usize) -> f64 {
        let total = self.sum().norm();
        if total == 0.0 {
            0.0
        } else {
            self.parts[j % 6].norm() / total
        }
    }

    /// Part of degree `m` for the order-`k` automorphism `sigma_H^(6/k)`,
    /// i.e. the sum of `g_j` over `j = m (mod k)`. `k` must divide 6.
    pub fn graded(&self, k: usize, m: i64) -> Mat3C {
        debug_assert!(k == 6 || k == 3 || k == 2 || k == 1);
        let m = m.rem_euclid(k as i64) as usize;
        (0..6)
            .filter(|j| j % k == m)
            .fold(Mat3C::ZERO, |acc, j| acc + self.parts[j])
    }
}

/// Averaging projector `P_j(X) = (1/6) sum_k eps^(-c j k) sigma_H^k(X)`.
pub fn project_eigenspace(x: &Mat3C, j: usize, s: Signature) -> Mat3C {
    decompose(x, s).parts[j % 6]
}

/// All six projections at once.
pub fn decompose(x: &Mat3C, s: Signature) -> EigenDecomp {
    let c = i64::from(convention());
    let mut powers = [Mat3C::ZERO; 6];
    powers[0] = *x;
    for k in 1..6 {
        powers[k] = sigma(&powers[k - 1], s);
    }
    let mut parts = [Mat3C::ZERO; 6];
    for (j, part) in parts.iter_mut().enumerate() {
        let mut acc = Mat3C::ZERO;
        for (k, pk) in powers.iter().enumerate() {
            acc += *pk * eps_pow(-c * (j as i64) * (k as i64));
        }
        *part = acc * (1.0 / 6.0);
    }
    EigenDecomp { parts }
}
