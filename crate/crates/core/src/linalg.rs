//! Small dense matrices over `f64` or `Complex64`.
//!
//! Everything here is sized for Gram matrices of simplices (a handful of rows),
//! so determinants go through LU with partial pivoting on a fresh copy and
//! cofactors are computed minor by minor.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Field of matrix entries.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re(), self.im())
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    size: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(size: usize) -> Self {
        Mat {
            size,
            data: vec![T::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        Mat { size, data }
    }

    pub fn from_row_major(size: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == size * size).then_some(Mat { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Submatrix with the given rows and columns, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat<T> {
        debug_assert_eq!(rows.len(), cols.len());
        Mat::from_fn(rows.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn det(&self) -> T {
        det_in_place(self.size, self.data.clone())
    }

    /// Cofactor matrix, `cof[(i, j)] = (-1)^(i+j) * det(self without row i, column j)`.
    pub fn cofactors(&self) -> Mat<T> {
        let m = self.size;
        if m == 1 {
            return Mat::identity(1);
        }
        let mut out = Mat::zeros(m);
        let mut buf = Vec::with_capacity((m - 1) * (m - 1));
        for i in 0..m {
            for j in 0..m {
                buf.clear();
                for r in (0..m).filter(|&r| r != i) {
                    for c in (0..m).filter(|&c| c != j) {
                        buf.push(self[(r, c)]);
                    }
                }
                let d = det_in_place(m - 1, std::mem::take(&mut buf));
                out[(i, j)] = if (i + j) % 2 == 0 { d } else { -d };
                buf = Vec::with_capacity((m - 1) * (m - 1));
            }
        }
        out
    }

    /// Directional derivative of the determinant: `d det(A)[B] = sum_ij cof_ij(A) B_ij`.
    pub fn det_derivative(&self, direction: &Mat<T>) -> T {
        debug_assert_eq!(self.size, direction.size);
        let cof = self.cofactors();
        let mut acc = T::zero();
        for (a, b) in cof.data.iter().zip(&direction.data) {
            acc += *a * *b;
        }
        acc
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat {
            size: self.size,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.size + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.size + j]
    }
}

/// LU with partial pivoting; consumes the buffer.
fn det_in_place<T: Scalar>(m: usize, mut a: Vec<T>) -> T {
    if m == 0 {
        return T::one();
    }
    let mut det = T::one();
    for k in 0..m {
        let mut piv = k;
        let mut best = a[k * m + k].modulus();
        for r in k + 1..m {
            let v = a[r * m + k].modulus();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return T::zero();
        }
        if piv != k {
            for c in 0..m {
                a.swap(k * m + c, piv * m + c);
            }
            det = -det;
        }
        let p = a[k * m + k];
        det *= p;
        for r in k + 1..m {
            let f = a[r * m + k] / p;
            if f.modulus() == 0.0 {
                continue;
            }
            for c in k + 1..m {
                let v = a[k * m + c];
                a[r * m + c] -= f * v;
            }
        }
    }
    det
}
