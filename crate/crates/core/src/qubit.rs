//! Qubit states and frozen-realization Hamiltonians.
//!
//! A single noise realization of the Hamiltonian is the real symmetric matrix
//!
//! ```text
//!     H = [ a  z ]
//!         [ z  b ]
//! ```
//!
//! in the canonical basis. `evolve_oracle` propagates a density matrix under
//! exp(-i t H) by brute-force spectral decomposition; it is the ground truth
//! the closed-form propagator is checked against and makes no use of the
//! closed form itself.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack admitted on the positivity constraint |rho12|^2 <= rho11*rho22 to
/// absorb roundoff from unitary evolution and quadrature averaging.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Density matrix of a qubit, stored as the minimal real parameterization:
/// rho11 and the complex off-diagonal rho12. Unit trace is structural
/// (rho22 = 1 - rho11) and hermiticity is structural (rho21 = conj(rho12)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho11: f64,
    rho12: Complex64,
}

impl DensityMatrix {
    /// Validates 0 <= rho11 <= 1 and |rho12|^2 <= rho11*(1-rho11) up to
    /// [`POSITIVITY_TOL`].
    pub fn new(rho11: f64, rho12: Complex64) -> Result<Self> {
        if !rho11.is_finite() || !rho12.re.is_finite() || !rho12.im.is_finite() {
            return Err(Error::Domain("density matrix entries must be finite".into()));
        }
        if !(-POSITIVITY_TOL..=1.0 + POSITIVITY_TOL).contains(&rho11) {
            return Err(Error::Domain(format!(
                "rho11 = {rho11} outside [0, 1]"
            )));
        }
        let excess = rho12.norm_sqr() - rho11 * (1.0 - rho11);
        if excess > POSITIVITY_TOL {
            return Err(Error::Domain(format!(
                "positivity violated: |rho12|^2 exceeds rho11*rho22 by {excess:.3e}"
            )));
        }
        Ok(Self { rho11, rho12 })
    }

    /// Construction for internal paths whose output is positive by
    /// construction (unitary conjugation, convex mixing).
    pub(crate) fn new_unchecked(rho11: f64, rho12: Complex64) -> Self {
        Self { rho11, rho12 }
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho22(&self) -> f64 {
        1.0 - self.rho11
    }

    pub fn rho12(&self) -> Complex64 {
        self.rho12
    }

    pub fn rho21(&self) -> Complex64 {
        self.rho12.conj()
    }

    /// tr(rho^2) = rho11^2 + rho22^2 + 2|rho12|^2; 1/2 for the maximally
    /// mixed state, 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.rho11 * self.rho11 + self.rho22() * self.rho22() + 2.0 * self.rho12.norm_sqr()
    }

    /// Frobenius distance ||self - other||_F; for traceless hermitian
    /// differences this is sqrt(2 d11^2 + 2 |d12|^2).
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        let d11 = self.rho11 - other.rho11;
        let d12 = self.rho12 - other.rho12;
        (2.0 * d11 * d11 + 2.0 * d12.norm_sqr()).sqrt()
    }

    /// Rewrites the state in the delocalized basis (|1> ± |2>)/sqrt(2).
    /// The diagonal becomes 1/2 + Re rho12 and the off-diagonal
    /// (rho11 - rho22)/2 - i Im rho12; the map is involutive.
    pub fn to_delocalized(&self) -> Self {
        Self::new_unchecked(
            0.5 + self.rho12.re,
            Complex64::new(self.rho11 - 0.5, -self.rho12.im),
        )
    }

    /// Projects out the off-diagonal in the basis the matrix is currently
    /// expressed in (full dephasing, eta = 1).
    pub fn dephased(&self) -> Self {
        Self::new_unchecked(self.rho11, Complex64::new(0.0, 0.0))
    }

    pub(crate) fn to_matrix(self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(self.rho11, 0.0),
            self.rho12,
            self.rho12.conj(),
            Complex64::new(1.0 - self.rho11, 0.0),
        )
    }
}

/// One frozen noise realization: real symmetric 2x2 Hamiltonian with
/// diagonal (a, b) and off-diagonal coupling z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenHamiltonian {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl FrozenHamiltonian {
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && z.is_finite()) {
            return Err(Error::Domain("hamiltonian entries must be finite".into()));
        }
        Ok(Self { a, b, z })
    }

    /// Squared eigenvalue splitting (a-b)^2 + 4z^2.
    pub fn discriminant_sq(&self) -> f64 {
        let d = self.a - self.b;
        d * d + 4.0 * self.z * self.z
    }

    /// Degeneracy test: the squared splitting is compared against
    /// 1e-14 * max(|a|, |b|, |z|, 1). Below it the matrix is treated as a
    /// multiple of the identity.
    pub fn is_degenerate(&self) -> bool {
        let scale = self.a.abs().max(self.b.abs()).max(self.z.abs()).max(1.0);
        self.discriminant_sq() < 1e-14 * scale
    }
}

/// Spectral data of a non-degenerate realization: lambda1 > lambda2 with
/// orthonormal real eigenvectors (columns v1, v2).
#[derive(Debug, Clone, Copy)]
pub struct SpectralData {
    pub lambda1: f64,
    pub lambda2: f64,
    pub v1: [f64; 2],
    pub v2: [f64; 2],
}

/// Result of [`eigendecompose`]: either a genuine two-level splitting or an
/// identity multiple signalling trivial dynamics.
#[derive(Debug, Clone, Copy)]
pub enum Decomposition {
    IdentityMultiple { value: f64 },
    Split(SpectralData),
}

/// Spectral decomposition of a frozen realization.
///
/// Eigenvalues are (a + b ± sqrt((a-b)^2 + 4z^2)) / 2. For z != 0 the
/// eigenvector of lambda_j is proportional to (z, lambda_j - a); that
/// expression degenerates to 0/0 when z = 0, so that case branches to the
/// canonical basis ordered by eigenvalue.
pub fn eigendecompose(h: &FrozenHamiltonian) -> Decomposition {
    if h.is_degenerate() {
        return Decomposition::IdentityMultiple {
            value: 0.5 * (h.a + h.b),
        };
    }
    let half_sum = 0.5 * (h.a + h.b);
    let gap = h.discriminant_sq().sqrt();
    let lambda1 = half_sum + 0.5 * gap;
    let lambda2 = half_sum - 0.5 * gap;
    if h.z == 0.0 {
        let (v1, v2) = if h.a > h.b {
            ([1.0, 0.0], [0.0, 1.0])
        } else {
            ([0.0, 1.0], [1.0, 0.0])
        };
        return Decomposition::Split(SpectralData {
            lambda1,
            lambda2,
            v1,
            v2,
        });
    }
    let vector = |lambda: f64| -> [f64; 2] {
        let c2 = lambda - h.a;
        let norm = (h.z * h.z + c2 * c2).sqrt();
        [h.z / norm, c2 / norm]
    };
    Decomposition::Split(SpectralData {
        lambda1,
        lambda2,
        v1: vector(lambda1),
        v2: vector(lambda2),
    })
}

/// Brute-force propagator: rho(t) = U rho U* with
/// U = sum_j exp(-i t lambda_j) |psi_j><psi_j|.
///
/// Degenerate realizations act as identity multiples and return rho0
/// unchanged (the global phase cancels).
pub fn evolve_oracle(h: &FrozenHamiltonian, rho0: &DensityMatrix, t: f64) -> DensityMatrix {
    let spectral = match eigendecompose(h) {
        Decomposition::IdentityMultiple { .. } => return *rho0,
        Decomposition::Split(s) => s,
    };
    let projector = |v: [f64; 2]| -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(v[0] * v[0], 0.0),
            Complex64::new(v[0] * v[1], 0.0),
            Complex64::new(v[1] * v[0], 0.0),
            Complex64::new(v[1] * v[1], 0.0),
        )
    };
    let u = projector(spectral.v1) * Complex64::from_polar(1.0, -t * spectral.lambda1)
        + projector(spectral.v2) * Complex64::from_polar(1.0, -t * spectral.lambda2);
    let evolved = u * rho0.to_matrix() * u.adjoint();
    DensityMatrix::new_unchecked(evolved[(0, 0)].re, evolved[(0, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constructor_rejects_invalid_states() {
        assert!(DensityMatrix::new(1.2, c(0.0, 0.0)).is_err());
        assert!(DensityMatrix::new(-0.1, c(0.0, 0.0)).is_err());
        // |rho12|^2 = 0.25 > 0.7 * 0.3
        assert!(DensityMatrix::new(0.7, c(0.5, 0.0)).is_err());
        assert!(DensityMatrix::new(0.7, c(0.1, 0.2)).is_ok());
        // pure-state boundary is admitted exactly
        assert!(DensityMatrix::new(0.5, c(0.5, 0.0)).is_ok());
    }

    #[test]
    fn purity_endpoints() {
        let pure = DensityMatrix::new(1.0, c(0.0, 0.0)).unwrap();
        let mixed = DensityMatrix::new(0.5, c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mixed.purity(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn delocalized_transform_example_and_involution() {
        let rho = DensityMatrix::new(0.7, c(0.1, 0.2)).unwrap();
        let tilted = rho.to_delocalized();
        assert_abs_diff_eq!(tilted.rho11(), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(tilted.rho12().re, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(tilted.rho12().im, -0.2, epsilon = 1e-15);
        let back = tilted.to_delocalized();
        assert_abs_diff_eq!(back.rho11(), rho.rho11(), epsilon = 1e-15);
        assert_abs_diff_eq!(back.rho12().re, rho.rho12().re, epsilon = 1e-15);
        assert_abs_diff_eq!(back.rho12().im, rho.rho12().im, epsilon = 1e-15);
    }

    #[test]
    fn eigendecompose_golden_ratio_splitting() {
        // H = [[1, 1], [1, 0]]: lambda^2 - lambda - 1 = 0.
        let h = FrozenHamiltonian::new(1.0, 0.0, 1.0).unwrap();
        let s = match eigendecompose(&h) {
            Decomposition::Split(s) => s,
            _ => panic!("not degenerate"),
        };
        let sqrt5 = 5.0_f64.sqrt();
        assert_abs_diff_eq!(s.lambda1, 0.5 * (1.0 + sqrt5), epsilon = 1e-14);
        assert_abs_diff_eq!(s.lambda2, 0.5 * (1.0 - sqrt5), epsilon = 1e-14);
        // orthonormality
        assert_abs_diff_eq!(s.v1[0] * s.v1[0] + s.v1[1] * s.v1[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.v2[0] * s.v2[0] + s.v2[1] * s.v2[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.v1[0] * s.v2[0] + s.v1[1] * s.v2[1], 0.0, epsilon = 1e-14);
        // reconstruction: sum_j lambda_j v_j v_j^T = H
        let rebuild = |i: usize, j: usize| {
            s.lambda1 * s.v1[i] * s.v1[j] + s.lambda2 * s.v2[i] * s.v2[j]
        };
        assert_abs_diff_eq!(rebuild(0, 0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rebuild(0, 1), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rebuild(1, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eigendecompose_zero_coupling_branches_to_canonical_basis() {
        let h = FrozenHamiltonian::new(2.0, -1.0, 0.0).unwrap();
        let s = match eigendecompose(&h) {
            Decomposition::Split(s) => s,
            _ => panic!("not degenerate"),
        };
        assert_eq!(s.v1, [1.0, 0.0]);
        assert_eq!(s.v2, [0.0, 1.0]);
        assert_abs_diff_eq!(s.lambda1, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.lambda2, -1.0, epsilon = 1e-14);

        let flipped = FrozenHamiltonian::new(-1.0, 2.0, 0.0).unwrap();
        let s = match eigendecompose(&flipped) {
            Decomposition::Split(s) => s,
            _ => panic!("not degenerate"),
        };
        assert_eq!(s.v1, [0.0, 1.0]);
        assert_eq!(s.v2, [1.0, 0.0]);
    }

    #[test]
    fn eigendecompose_flags_degenerate_matrices() {
        let h = FrozenHamiltonian::new(3.0, 3.0, 0.0).unwrap();
        match eigendecompose(&h) {
            Decomposition::IdentityMultiple { value } => {
                assert_abs_diff_eq!(value, 3.0, epsilon = 1e-15)
            }
            _ => panic!("expected identity multiple"),
        }
        let rho = DensityMatrix::new(0.7, c(0.1, 0.2)).unwrap();
        let out = evolve_oracle(&h, &rho, 17.0);
        assert_eq!(out.rho11(), rho.rho11());
        assert_eq!(out.rho12(), rho.rho12());
    }

    #[test]
    fn oracle_full_population_swap_at_quarter_period() {
        // H = z sigma_x: |1><1| evolves to |2><2| at t = pi/2.
        let h = FrozenHamiltonian::new(0.0, 0.0, 1.0).unwrap();
        let rho0 = DensityMatrix::new(1.0, c(0.0, 0.0)).unwrap();
        let out = evolve_oracle(&h, &rho0, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(out.rho11(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.rho12().norm(), 0.0, epsilon = 1e-14);
        // Half-way: rho11 = cos^2(pi/4) = 1/2, rho12 = i cos sin = i/2.
        let mid = evolve_oracle(&h, &rho0, std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(mid.rho11(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(mid.rho12().re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mid.rho12().im, 0.5, epsilon = 1e-14);
    }

    prop_compose! {
        fn arb_state()(rho11 in 0.0..1.0f64, frac in 0.0..1.0f64, angle in 0.0..std::f64::consts::TAU) -> DensityMatrix {
            let radius = frac * (rho11 * (1.0 - rho11)).sqrt();
            DensityMatrix::new(rho11, Complex64::from_polar(radius, angle)).unwrap()
        }
    }

    proptest! {
        #[test]
        fn oracle_preserves_trace_purity_positivity(
            a in -5.0..5.0f64, b in -5.0..5.0f64, z in -5.0..5.0f64,
            t in 0.0..50.0f64, rho0 in arb_state()
        ) {
            let h = FrozenHamiltonian::new(a, b, z).unwrap();
            let out = evolve_oracle(&h, &rho0, t);
            // trace is structural; purity conserved under unitaries
            prop_assert!((out.purity() - rho0.purity()).abs() < 1e-10);
            let excess = out.rho12().norm_sqr() - out.rho11() * out.rho22();
            prop_assert!(excess < 1e-10);
            // t = 0 is the identity
            let id = evolve_oracle(&h, &rho0, 0.0);
            prop_assert!(id.frobenius_distance(&rho0) < 1e-12);
        }

        #[test]
        fn oracle_invariant_under_diagonal_shift(
            a in -3.0..3.0f64, b in -3.0..3.0f64, z in -3.0..3.0f64,
            shift in -10.0..10.0f64, t in 0.0..20.0f64, rho0 in arb_state()
        ) {
            let h = FrozenHamiltonian::new(a, b, z).unwrap();
            let shifted = FrozenHamiltonian::new(a + shift, b + shift, z).unwrap();
            let lhs = evolve_oracle(&h, &rho0, t);
            let rhs = evolve_oracle(&shifted, &rho0, t);
            prop_assert!(lhs.frobenius_distance(&rhs) < 1e-12);
        }
    }
}
