use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NetworkError;

/// Transfer (ABCD) matrix of a two-port, `[V1, I1] = [[A, B], [C, D]] · [V2, I2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn series(z: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, z, Complex64::new(0.0, 0.0), one)
    }

    pub fn shunt(y: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, Complex64::new(0.0, 0.0), y, one)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Same network seen from port 2 (reciprocal networks only).
    pub fn flipped(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, self.b / det, self.c / det, self.a / det)
    }

    /// Input impedance at port 1 with port 2 terminated in `load`.
    pub fn input_impedance(&self, load: Complex64) -> Complex64 {
        (self.a * load + self.b) / (self.c * load + self.d)
    }

    /// Convert to scattering parameters for a real reference impedance.
    pub fn to_s(&self, z_ref: f64) -> Result<SParams, NetworkError> {
        if !(z_ref > 0.0 && z_ref.is_finite()) {
            return Err(NetworkError::InvalidParameter(format!(
                "reference impedance must be positive, got {z_ref}"
            )));
        }
        let b = self.b / z_ref;
        let c = self.c * z_ref;
        let sigma = self.a + b + c + self.d;
        if sigma.norm() == 0.0 || !sigma.is_finite() {
            return Err(NetworkError::Singular);
        }
        Ok(SParams {
            s11: (self.a + b - c - self.d) / sigma,
            s12: 2.0 * self.det() / sigma,
            s21: 2.0 / sigma,
            s22: (-self.a + b - c + self.d) / sigma,
        })
    }

    pub fn max_abs_diff(&self, other: &Abcd) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

impl Mul for Abcd {
    type Output = Abcd;

    fn mul(self, r: Abcd) -> Abcd {
        Abcd {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SParams {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

impl SParams {
    pub fn s21_db(&self) -> f64 {
        to_db(self.s21)
    }

    /// ‖S†S − I‖ in the max-entry norm.
    pub fn unitarity_error(&self) -> f64 {
        let s = [[self.s11, self.s12], [self.s21, self.s22]];
        let mut err: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for row in &s {
                    acc += row[i].conj() * row[j];
                }
                if i == j {
                    acc -= 1.0;
                }
                err = err.max(acc.norm());
            }
        }
        err
    }
}

/// Magnitude of a wave ratio in dB (`20·log10|x|`).
pub fn to_db(x: Complex64) -> f64 {
    20.0 * x.norm().log10()
}
