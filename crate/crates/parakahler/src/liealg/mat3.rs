use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;

use crate::math;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense 3x3 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat3C(pub [[C64; 3]; 3]);

impl Mat3C {
    pub const ZERO: Mat3C = Mat3C([[ZERO; 3]; 3]);
    pub const IDENTITY: Mat3C = Mat3C([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]]);

    pub fn from_rows(rows: [[C64; 3]; 3]) -> Self {
        Mat3C(rows)
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        let mut m = Mat3C::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn diag(a: C64, b: C64, c: C64) -> Self {
        Mat3C([[a, ZERO, ZERO], [ZERO, b, ZERO], [ZERO, ZERO, c]])
    }

    /// Matrix unit `E_{ij}` with zero-based indices.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Mat3C::ZERO;
        m.0[i][j] = ONE;
        m
    }

    pub fn transpose(&self) -> Self {
        let a = &self.0;
        Mat3C([
            [a[0][0], a[1][0], a[2][0]],
            [a[0][1], a[1][1], a[2][1]],
            [a[0][2], a[1][2], a[2][2]],
        ])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> C64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Inverse by Gaussian elimination with partial pivoting; `None` when a
    /// pivot falls below `1e-300` relative to the matrix scale.
    pub fn inverse(&self) -> Option<Self> {
        self.solve(&Mat3C::IDENTITY)
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Mat3C) -> Option<Self> {
        let scale = self.max_abs();
        if !(scale.is_finite()) || scale == 0.0 {
            return None;
        }
        let mut a = self.0;
        let mut b = rhs.0;
        for col in 0..3 {
            let mut piv = col;
            let mut best = a[col][col].norm();
            for (r, row) in a.iter().enumerate().skip(col + 1) {
                let v = row[col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= 1e-14 * scale {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = ONE / a[col][col];
            for r in 0..3 {
                if r == col {
                    continue;
                }
                let f = a[r][col] * inv;
                if f == ZERO {
                    continue;
                }
                for c in 0..3 {
                    let t = a[col][c];
                    a[r][c] -= f * t;
                    let t = b[col][c];
                    b[r][c] -= f * t;
                }
            }
        }
        for r in 0..3 {
            let inv = ONE / a[r][r];
            for c in 0..3 {
                b[r][c] *= inv;
            }
        }
        Some(Mat3C(b))
    }

    /// Commutator `[self, other]`.
    pub fn bracket(&self, other: &Mat3C) -> Mat3C {
        *self * *other - *other * *self
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for row in &self.0 {
            for z in row {
                s += z.norm_sqr();
            }
        }
        math::sqrt(s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0_f64;
        for row in &self.0 {
            for z in row {
                let v = z.norm();
                if v.is_nan() {
                    return f64::NAN;
                }
                m = m.max(v);
            }
        }
        m
    }

    /// Largest imaginary-part modulus.
    pub fn max_imag(&self) -> f64 {
        let mut m = 0.0_f64;
        for row in &self.0 {
            for z in row {
                m = m.max(z.im.abs());
            }
        }
        m
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        let mut m = 0.0_f64;
        for c in 0..3 {
            let s: f64 = (0..3).map(|r| self.0[r][c].norm()).sum();
            m = m.max(s);
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Trace-free part `X - tr(X)/3 I`.
    pub fn trace_free(&self) -> Mat3C {
        let t = self.trace() / 3.0;
        *self - Mat3C::IDENTITY * t
    }

    pub fn column(&self, j: usize) -> [C64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn set_column(&mut self, j: usize, v: [C64; 3]) {
        for (i, z) in v.into_iter().enumerate() {
            self.0[i][j] = z;
        }
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[C64; 3]) -> [C64; 3] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
        ]
    }
}

impl Index<(usize, usize)> for Mat3C {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3C {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3C {
    type Output = Mat3C;
    fn add(mut self, rhs: Mat3C) -> Mat3C {
        self += rhs;
        self
    }
}

impl AddAssign for Mat3C {
    fn add_assign(&mut self, rhs: Mat3C) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Mat3C {
    type Output = Mat3C;
    fn sub(mut self, rhs: Mat3C) -> Mat3C {
        self -= rhs;
        self
    }
}

impl SubAssign for Mat3C {
    fn sub_assign(&mut self, rhs: Mat3C) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl Neg for Mat3C {
    type Output = Mat3C;
    fn neg(self) -> Mat3C {
        self.map(|z| -z)
    }
}

impl Mul for Mat3C {
    type Output = Mat3C;
    fn mul(self, rhs: Mat3C) -> Mat3C {
        let a = &self.0;
        let b = &rhs.0;
        let mut c = Mat3C::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                c.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        c
    }
}

impl Mul<C64> for Mat3C {
    type Output = Mat3C;
    fn mul(self, s: C64) -> Mat3C {
        self.map(|z| z * s)
    }
}

impl Mul<f64> for Mat3C {
    type Output = Mat3C;
    fn mul(self, s: f64) -> Mat3C {
        self.map(|z| z * s)
    }
}

impl Mul<Mat3C> for C64 {
    type Output = Mat3C;
    fn mul(self, m: Mat3C) -> Mat3C {
        m * self
    }
}

impl Mul<Mat3C> for f64 {
    type Output = Mat3C;
    fn mul(self, m: Mat3C) -> Mat3C {
        m * self
    }
}
