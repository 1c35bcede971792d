use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::Ket;
use super::CMatrix;
use crate::error::{QbcError, Result};

/// Great circle on the qubit Bloch sphere, given by its unit normal and the
/// angle of the state taken as the circle's origin.
///
/// The standard circle has normal `+y`: it is the real-amplitude circle
/// through the four BB84 states, and `state(a) = cos(a/2)|0⟩ + sin(a/2)|1⟩`.
/// Other circles are the image of the standard one under the SU(2) frame
/// rotation taking `+y` to `axis`, followed by a rotation of `phase_origin`
/// about `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreatCircle {
    pub axis: [f64; 3],
    #[serde(default, rename = "phaseOrigin", alias = "phase_origin")]
    pub phase_origin: f64,
}

impl Default for GreatCircle {
    fn default() -> Self {
        GreatCircle::standard()
    }
}

impl GreatCircle {
    pub fn standard() -> Self {
        GreatCircle { axis: [0.0, 1.0, 0.0], phase_origin: 0.0 }
    }

    pub fn new(axis: [f64; 3], phase_origin: f64) -> Result<Self> {
        let c = GreatCircle { axis, phase_origin };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(QbcError::invariant("circle.axis", format!("axis norm {n} is not 1")));
        }
        if !self.phase_origin.is_finite() {
            return Err(QbcError::invariant("circle.phase_origin", "not finite"));
        }
        Ok(())
    }

    /// SU(2) frame mapping the standard circle onto this one.
    pub fn frame(&self) -> CMatrix {
        let y = [0.0, 1.0, 0.0];
        let n = self.axis;
        let cross = [y[1] * n[2] - y[2] * n[1], y[2] * n[0] - y[0] * n[2], y[0] * n[1] - y[1] * n[0]];
        let s = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cdot = n[1];
        let tilt = if s < 1e-12 {
            if cdot > 0.0 {
                CMatrix::identity(2, 2)
            } else {
                bloch_rotation([1.0, 0.0, 0.0], std::f64::consts::PI)
            }
        } else {
            let k = [cross[0] / s, cross[1] / s, cross[2] / s];
            bloch_rotation(k, s.atan2(cdot))
        };
        bloch_rotation(n, self.phase_origin) * tilt
    }

    /// Pure state at Bloch angle `angle` along the circle.
    pub fn state(&self, angle: f64) -> Ket {
        let (s, c) = (angle / 2.0).sin_cos();
        let v = self.frame() * nalgebra::DVector::from_vec(vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)]);
        Ket::from_parts_unchecked(v, vec![2])
    }

    /// `R(θ, C)`: rotation by `theta` along the circle (about its normal).
    pub fn rotation(&self, theta: f64) -> CMatrix {
        bloch_rotation(self.axis, theta)
    }

    /// `R(π, C)`, which maps every state on the circle to its orthogonal
    /// partner on the circle.
    pub fn flip(&self) -> CMatrix {
        self.rotation(std::f64::consts::PI)
    }

    pub fn rotate(&self, theta: f64, k: &Ket) -> Result<Ket> {
        k.apply(&self.rotation(theta))
    }

    /// The four BB84 states on this circle: vertical, horizontal and the two
    /// diagonals, at Bloch angles 0, π, π/2 and 3π/2.
    pub fn bb84(&self) -> [Ket; 4] {
        use std::f64::consts::PI;
        [self.state(0.0), self.state(PI), self.state(PI / 2.0), self.state(3.0 * PI / 2.0)]
    }

    /// Two orthogonal states on the circle (Bloch angles 0 and π).
    pub fn orthogonal_pair(&self) -> [Ket; 2] {
        [self.state(0.0), self.state(std::f64::consts::PI)]
    }
}

/// `exp(−i θ n·σ / 2)`.
pub fn bloch_rotation(axis: [f64; 3], theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let [x, y, z] = axis;
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    // n·σ = [[z, x − iy], [x + iy, −z]]
    let ns = [Complex64::new(z, 0.0), Complex64::new(x, -y), Complex64::new(x, y), Complex64::new(-z, 0.0)];
    CMatrix::from_row_slice(2, 2, &[one * c - i * s * ns[0], -i * s * ns[1], -i * s * ns[2], one * c - i * s * ns[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tilted() -> GreatCircle {
        let v = [0.3f64, -0.5, 0.8];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        GreatCircle::new([v[0] / n, v[1] / n, v[2] / n], 0.7).unwrap()
    }

    #[test]
    fn rotate_by_zero_is_identity() {
        let c = GreatCircle::standard();
        let psi = c.state(1.234);
        let out = c.rotate(0.0, &psi).unwrap();
        assert!((out.amplitudes() - psi.amplitudes()).camax() < 1e-15);
    }

    #[test]
    fn flip_gives_orthogonal_state_on_every_circle() {
        for c in [GreatCircle::standard(), tilted()] {
            for k in 0..12 {
                let psi = c.state(k as f64 * 0.53);
                let flipped = c.rotate(PI, &psi).unwrap();
                assert!(psi.inner(&flipped).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quarter_turn_takes_vertical_to_diagonal() {
        let c = GreatCircle::standard();
        let [v, _, d, _] = c.bb84();
        let out = c.rotate(PI / 2.0, &v).unwrap();
        assert!((out.amplitudes() - d.amplitudes()).camax() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((d.amplitudes()[1].re - s).abs() < 1e-15);
    }

    #[test]
    fn rotation_moves_along_circle() {
        let c = tilted();
        let a = c.state(0.4);
        let moved = c.rotate(1.1, &a).unwrap();
        let want = c.state(1.5);
        assert!(moved.inner(&want).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn states_lie_on_circle() {
        // Bloch vector ⟂ axis
        let c = tilted();
        for k in 0..8 {
            let psi = c.state(k as f64);
            let a = psi.amplitudes();
            let rho01 = a[0] * a[1].conj();
            let bloch = [2.0 * rho01.re, -2.0 * rho01.im, a[0].norm_sqr() - a[1].norm_sqr()];
            let dot: f64 = bloch.iter().zip(c.axis).map(|(x, y)| x * y).sum();
            assert!(dot.abs() < 1e-12);
        }
    }

    #[test]
    fn bad_axis_rejected() {
        assert!(GreatCircle::new([1.0, 1.0, 0.0], 0.0).is_err());
    }
}
