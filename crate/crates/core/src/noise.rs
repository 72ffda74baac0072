//! Compactly supported noise densities.
//!
//! Five families cover the regimes exercised by the experiments:
//!
//! * `poly_bump(n, eta)`: proportional to (1 - (u/eta)^2)_+^n; n - 1
//!   continuous derivatives at the support edges (n = 0 is the uniform
//!   density).
//! * `smooth_bump(eta)`: proportional to exp(-1/(1 - (u/eta)^2)); infinitely
//!   smooth, Fourier transform decays faster than any power.
//! * `ir_poly_bump(k, n, eta)`: proportional to |u/eta|^k (1 - (u/eta)^2)_+^n;
//!   a zero of order k at the origin.
//! * `shifted_bump(center, width, n)`: poly_bump(n) translated to `center`;
//!   one-sided supports model strong coupling bounded away from zero.
//! * `mirrored_bump(center, width, n)`: even mixture of shifted_bump(center)
//!   and its reflection; strong coupling with a symmetric law.
//!
//! plus the `zero` point mass (no noise on that axis). Every density is
//! normalized by quadrature at construction time; sampling inverts a
//! precomputed monotone spline fit to the CDF.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_tol, GlRule};

/// Relative tolerance of the normalization integral. The final-state
/// identity beta + 2 alpha = 1 inherits this accuracy, so it sits well below
/// the 1e-9 the acceptance checks ask for.
const NORM_REL_TOL: f64 = 1e-12;
/// Relative tolerance for moment integrals.
const MOMENT_REL_TOL: f64 = 1e-11;
/// Starting size of the inverse-CDF table; doubled until the self-test
/// passes.
const CDF_TABLE_SIZE: usize = 4096;
/// Largest tolerated |CDF(inverse(v)) - v| in the sampler self-test.
const CDF_SELF_TEST_TOL: f64 = 1e-5;

/// Density family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    PolyBump { n: u32, eta: f64 },
    SmoothBump { eta: f64 },
    IrPolyBump { k: u32, n: u32, eta: f64 },
    ShiftedBump { center: f64, width: f64, n: u32 },
    MirroredBump { center: f64, width: f64, n: u32 },
    Zero,
}

/// A normalized probability density on a compact support (or a point mass at
/// the origin for [`Kind::Zero`]).
#[derive(Debug, Clone)]
pub struct NoiseDensity {
    kind: Kind,
    norm: f64,
    sampler: OnceLock<InverseCdf>,
}

impl NoiseDensity {
    pub fn poly_bump(n: u32, eta: f64) -> Result<Self> {
        Self::build(Kind::PolyBump { n, eta })
    }

    pub fn smooth_bump(eta: f64) -> Result<Self> {
        Self::build(Kind::SmoothBump { eta })
    }

    pub fn ir_poly_bump(k: u32, n: u32, eta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain(
                "ir_poly_bump requires k >= 1; use poly_bump for k = 0".into(),
            ));
        }
        Self::build(Kind::IrPolyBump { k, n, eta })
    }

    pub fn shifted_bump(center: f64, width: f64, n: u32) -> Result<Self> {
        Self::build(Kind::ShiftedBump { center, width, n })
    }

    pub fn mirrored_bump(center: f64, width: f64, n: u32) -> Result<Self> {
        if !(center > width) {
            return Err(Error::Domain(format!(
                "mirrored_bump needs center > width so the two lobes stay disjoint (center = {center}, width = {width})"
            )));
        }
        Self::build(Kind::MirroredBump { center, width, n })
    }

    pub fn zero() -> Self {
        Self {
            kind: Kind::Zero,
            norm: 1.0,
            sampler: OnceLock::new(),
        }
    }

    fn build(kind: Kind) -> Result<Self> {
        match kind {
            Kind::PolyBump { eta, .. } | Kind::SmoothBump { eta } | Kind::IrPolyBump { eta, .. } => {
                if !(eta > 0.0) || !eta.is_finite() {
                    return Err(Error::Domain(format!("half-width must be positive, got {eta}")));
                }
            }
            Kind::ShiftedBump { center, width, .. } | Kind::MirroredBump { center, width, .. } => {
                if !(width > 0.0) || !width.is_finite() || !center.is_finite() {
                    return Err(Error::Domain(format!(
                        "bump needs finite center and positive width (center = {center}, width = {width})"
                    )));
                }
            }
            Kind::Zero => {}
        }
        let mut density = Self {
            kind,
            norm: 1.0,
            sampler: OnceLock::new(),
        };
        let (total, _) = integrate_to_tol(
            |u| density.unnormalized(u),
            &density.pieces(),
            NORM_REL_TOL,
            "density normalization",
        )?;
        if !(total > 0.0) {
            return Err(Error::Domain("density integrates to zero".into()));
        }
        density.norm = 1.0 / total;
        Ok(density)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    /// Hull of the support. The point mass reports (0, 0).
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            Kind::PolyBump { eta, .. } | Kind::SmoothBump { eta } | Kind::IrPolyBump { eta, .. } => {
                (-eta, eta)
            }
            Kind::ShiftedBump { center, width, .. } => (center - width, center + width),
            Kind::MirroredBump { center, width, .. } => (-center - width, center + width),
            Kind::Zero => (0.0, 0.0),
        }
    }

    /// Maximal smooth intervals of the pdf: quadrature panels never straddle
    /// a kink (|u|^k at the origin) or the gap of a mirrored density.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        match self.kind {
            Kind::PolyBump { eta, .. } | Kind::SmoothBump { eta } => vec![(-eta, eta)],
            Kind::IrPolyBump { eta, .. } => vec![(-eta, 0.0), (0.0, eta)],
            Kind::ShiftedBump { center, width, .. } => vec![(center - width, center + width)],
            Kind::MirroredBump { center, width, .. } => {
                vec![(-center - width, -center + width), (center - width, center + width)]
            }
            Kind::Zero => vec![],
        }
    }

    /// True when pdf(-u) = pdf(u) for all u.
    pub fn is_even(&self) -> bool {
        match self.kind {
            Kind::PolyBump { .. }
            | Kind::SmoothBump { .. }
            | Kind::IrPolyBump { .. }
            | Kind::MirroredBump { .. }
            | Kind::Zero => true,
            Kind::ShiftedBump { center, .. } => center == 0.0,
        }
    }

    /// Largest |u| on the support; the point mass reports 0.
    pub fn max_abs_support(&self) -> f64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    /// Smallest |u| on the support; positive only for supports bounded away
    /// from the origin.
    pub fn min_abs_support(&self) -> f64 {
        match self.kind {
            Kind::Zero => 0.0,
            Kind::MirroredBump { center, width, .. } => center - width,
            _ => {
                let (lo, hi) = self.support();
                if lo <= 0.0 && hi >= 0.0 {
                    0.0
                } else {
                    lo.abs().min(hi.abs())
                }
            }
        }
    }

    fn unnormalized(&self, u: f64) -> f64 {
        fn bump_poly(v: f64, n: u32) -> f64 {
            let s = 1.0 - v * v;
            if s <= 0.0 {
                // n = 0 keeps mass up to the edge
                if n == 0 && s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                s.powi(n as i32)
            }
        }
        match self.kind {
            Kind::PolyBump { n, eta } => bump_poly(u / eta, n),
            Kind::SmoothBump { eta } => {
                let s = 1.0 - (u / eta) * (u / eta);
                if s <= 0.0 {
                    0.0
                } else {
                    (-1.0 / s).exp()
                }
            }
            Kind::IrPolyBump { k, n, eta } => {
                let v = u / eta;
                v.abs().powi(k as i32) * bump_poly(v, n)
            }
            Kind::ShiftedBump { center, width, n } => bump_poly((u - center) / width, n),
            Kind::MirroredBump { center, width, n } => {
                0.5 * (bump_poly((u - center) / width, n) + bump_poly((u + center) / width, n))
            }
            Kind::Zero => 0.0,
        }
    }

    /// Normalized density value. The point mass returns 0 everywhere (its
    /// mass is atomic and handled by the averaging integrator directly).
    pub fn pdf(&self, u: f64) -> f64 {
        self.norm * self.unnormalized(u)
    }

    /// Fourier transform \int e^{-i t u} pdf(u) du. The panel budget scales
    /// with the total phase variation |t| * support length; with 16-point
    /// panels at 0.25 panels per radian the truncation error sits at the
    /// rounding floor. The floor of 12 panels resolves the flat boundary
    /// layers of the smooth bump, whose edge derivatives defeat a single
    /// low-panel rule even at t = 0.
    pub fn fourier(&self, t: f64) -> Complex64 {
        if self.is_point_mass() {
            return Complex64::new(1.0, 0.0);
        }
        let pieces = self.pieces();
        let span: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let panels = (0.25 * t.abs() * span).ceil().max(12.0) as usize;
        let rule = GlRule::new(16);
        let mut re = 0.0;
        let mut im = 0.0;
        for (a, b) in crate::quadrature::panel_edges(&pieces, panels) {
            rule.panel(a, b, &mut |u, w| {
                let (s, c) = (t * u).sin_cos();
                let p = w * self.pdf(u);
                re += p * c;
                im -= p * s;
            });
        }
        Complex64::new(re, im)
    }

    /// m-th raw moment E[u^m].
    pub fn moment(&self, m: u32) -> Result<f64> {
        if self.is_point_mass() {
            return Ok(if m == 0 { 1.0 } else { 0.0 });
        }
        let (value, _) = integrate_to_tol(
            |u| u.powi(m as i32) * self.pdf(u),
            &self.pieces(),
            MOMENT_REL_TOL,
            "moment",
        )?;
        Ok(value)
    }

    /// E[(1 + u/eps)^{-m}]; negative m yields positive powers. Requires the
    /// support to stay right of -eps when m > 0.
    pub fn scaled_inverse_moment(&self, eps: f64, m: i32) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        if self.is_point_mass() {
            return Ok(1.0);
        }
        let (lo, _) = self.support();
        if m > 0 && lo <= -eps {
            return Err(Error::Domain(format!(
                "support reaches 1 + u/eps <= 0 (lo = {lo}, eps = {eps})"
            )));
        }
        let (value, _) = integrate_to_tol(
            |u| (1.0 + u / eps).powi(-m) * self.pdf(u),
            &self.pieces(),
            MOMENT_REL_TOL,
            "scaled inverse moment",
        )?;
        Ok(value)
    }

    /// E[(eps/u)^m]; requires the support bounded away from the origin.
    pub fn inverse_power_moment(&self, eps: f64, m: u32) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        if self.min_abs_support() <= 0.0 {
            return Err(Error::Domain(
                "inverse power moment needs support bounded away from 0".into(),
            ));
        }
        let (value, _) = integrate_to_tol(
            |u| (eps / u).powi(m as i32) * self.pdf(u),
            &self.pieces(),
            MOMENT_REL_TOL,
            "inverse power moment",
        )?;
        Ok(value)
    }

    /// Draws `count` samples. Stateless: the stream is derived entirely from
    /// `seed`, so equal seeds give equal samples regardless of call order.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.kind {
            Kind::Zero => vec![0.0; count],
            Kind::MirroredBump { center, width, n } => {
                // mixture of the shifted lobe and its reflection
                let lobe = NoiseDensity::shifted_bump(center, width, n)
                    .expect("lobe parameters validated at construction");
                let table = lobe.inverse_cdf();
                (0..count)
                    .map(|_| {
                        let flip: bool = rng.gen();
                        let v: f64 = rng.gen();
                        let s = table.eval(v);
                        if flip {
                            -s
                        } else {
                            s
                        }
                    })
                    .collect()
            }
            _ => {
                let table = self.inverse_cdf();
                (0..count).map(|_| table.eval(rng.gen())).collect()
            }
        }
    }

    fn inverse_cdf(&self) -> &InverseCdf {
        self.sampler.get_or_init(|| {
            let mut size = CDF_TABLE_SIZE;
            loop {
                let table = InverseCdf::build(self, size);
                if table.self_test(self) <= CDF_SELF_TEST_TOL || size >= 1 << 16 {
                    return table;
                }
                size *= 2;
            }
        })
    }
}

/// Monotone cubic interpolant of quantile = F^{-1}(v) tabulated on a uniform
/// grid of the support, with Fritsch-Carlson slopes so monotonicity of the
/// CDF is preserved exactly.
#[derive(Debug, Clone)]
struct InverseCdf {
    f: Vec<f64>,
    u: Vec<f64>,
    d: Vec<f64>,
}

impl InverseCdf {
    fn build(density: &NoiseDensity, size: usize) -> Self {
        let (lo, hi) = density.support();
        let rule = GlRule::new(8);
        let mut knots_u = Vec::with_capacity(size + 1);
        let mut knots_f = Vec::with_capacity(size + 1);
        knots_u.push(lo);
        knots_f.push(0.0);
        let mut acc = 0.0;
        for i in 0..size {
            let a = lo + (hi - lo) * i as f64 / size as f64;
            let b = lo + (hi - lo) * (i + 1) as f64 / size as f64;
            let mut piece = 0.0;
            rule.panel(a, b, &mut |x, w| piece += w * density.pdf(x));
            acc += piece;
            knots_u.push(b);
            knots_f.push(acc);
        }
        let total = acc;
        // dedupe flat stretches (pdf numerically zero across a knot interval)
        let mut f = Vec::with_capacity(knots_f.len());
        let mut u = Vec::with_capacity(knots_u.len());
        for (fi, ui) in knots_f.iter().zip(&knots_u) {
            let fi = fi / total;
            if let Some(&last) = f.last() {
                if fi - last < 1e-15 {
                    continue;
                }
            }
            f.push(fi);
            u.push(*ui);
        }
        let last = f.len() - 1;
        f[last] = 1.0;
        u[last] = hi;
        let d = fritsch_carlson_slopes(&f, &u);
        Self { f, u, d }
    }

    /// Quantile at v in [0, 1].
    fn eval(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return self.u[0];
        }
        if v >= 1.0 {
            return *self.u.last().unwrap();
        }
        let idx = match self.f.binary_search_by(|x| x.partial_cmp(&v).unwrap()) {
            Ok(i) => return self.u[i],
            Err(i) => i - 1,
        };
        let h = self.f[idx + 1] - self.f[idx];
        let s = (v - self.f[idx]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.u[idx] + h10 * h * self.d[idx] + h01 * self.u[idx + 1] + h11 * h * self.d[idx + 1]
    }

    /// Max |F(eval(v)) - v| over a probe grid, with F linearly interpolated
    /// on a twice-finer reference table.
    fn self_test(&self, density: &NoiseDensity) -> f64 {
        let (lo, hi) = density.support();
        let size = 2 * (self.u.len() - 1).max(2);
        let rule = GlRule::new(8);
        let mut ref_f = Vec::with_capacity(size + 1);
        ref_f.push(0.0);
        let mut acc = 0.0;
        for i in 0..size {
            let a = lo + (hi - lo) * i as f64 / size as f64;
            let b = lo + (hi - lo) * (i + 1) as f64 / size as f64;
            let mut piece = 0.0;
            rule.panel(a, b, &mut |x, w| piece += w * density.pdf(x));
            acc += piece;
            ref_f.push(acc);
        }
        for v in ref_f.iter_mut() {
            *v /= acc;
        }
        let cdf_ref = |x: f64| -> f64 {
            let pos = (x - lo) / (hi - lo) * size as f64;
            let i = (pos.floor() as usize).min(size - 1);
            let frac = pos - i as f64;
            ref_f[i] + frac * (ref_f[i + 1] - ref_f[i])
        };
        let probes = 4 * size;
        let mut worst: f64 = 0.0;
        for k in 1..probes {
            let v = k as f64 / probes as f64;
            worst = worst.max((cdf_ref(self.eval(v)) - v).abs());
        }
        worst
    }
}

/// Shape-preserving slopes for monotone cubic interpolation of (f, u) data.
fn fritsch_carlson_slopes(f: &[f64], u: &[f64]) -> Vec<f64> {
    let m = f.len();
    let mut d = vec![0.0; m];
    if m < 2 {
        return d;
    }
    let h: Vec<f64> = (0..m - 1).map(|i| f[i + 1] - f[i]).collect();
    let delta: Vec<f64> = (0..m - 1).map(|i| (u[i + 1] - u[i]) / h[i]).collect();
    for i in 1..m - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let one_sided = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let val = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if val.signum() != d0.signum() {
            0.0
        } else if (d0.signum() != d1.signum()) && val.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            val
        }
    };
    d[0] = if m == 2 {
        delta[0]
    } else {
        one_sided(h[0], h[1], delta[0], delta[1])
    };
    d[m - 1] = if m == 2 {
        delta[0]
    } else {
        one_sided(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3])
    };
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn normalization_matches_closed_forms() {
        // int (1 - u^2) du = 4/3 on [-1, 1] -> pdf(0) = 3/4
        assert_abs_diff_eq!(
            NoiseDensity::poly_bump(1, 1.0).unwrap().pdf(0.0),
            0.75,
            epsilon = 1e-11
        );
        // uniform on [-1/2, 1/2]
        assert_abs_diff_eq!(
            NoiseDensity::poly_bump(0, 0.5).unwrap().pdf(0.1),
            1.0,
            epsilon = 1e-11
        );
        // int (1 - u^2)^2 = 16/15 -> pdf(0) = 15/16
        assert_abs_diff_eq!(
            NoiseDensity::poly_bump(2, 1.0).unwrap().pdf(0.0),
            0.9375,
            epsilon = 1e-11
        );
        // int |u| (1 - u^2)^2 = 1/3 -> pdf(1/2) = (1/2)(9/16)*3
        assert_abs_diff_eq!(
            NoiseDensity::ir_poly_bump(1, 2, 1.0).unwrap().pdf(0.5),
            0.84375,
            epsilon = 1e-11
        );
        // int exp(-1/(1-u^2)) du = 0.44399381616807944
        assert_abs_diff_eq!(
            NoiseDensity::smooth_bump(1.0).unwrap().pdf(0.0),
            0.8285688398691052,
            epsilon = 1e-10
        );
    }

    #[test]
    fn mass_is_one_for_every_family() {
        let densities = [
            NoiseDensity::poly_bump(0, 0.3).unwrap(),
            NoiseDensity::poly_bump(3, 2.0).unwrap(),
            NoiseDensity::smooth_bump(0.7).unwrap(),
            NoiseDensity::ir_poly_bump(3, 2, 0.5).unwrap(),
            NoiseDensity::shifted_bump(7.0, 2.0, 2).unwrap(),
            NoiseDensity::mirrored_bump(10.0, 1.0, 2).unwrap(),
        ];
        for d in &densities {
            assert_abs_diff_eq!(d.moment(0).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn moments_match_closed_forms() {
        // variance of poly_bump(n, eta): eta^2/3, eta^2/5, eta^2/7 for n = 0, 1, 2
        assert_abs_diff_eq!(
            NoiseDensity::poly_bump(0, 0.9).unwrap().moment(2).unwrap(),
            0.27,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            NoiseDensity::poly_bump(1, 1.0).unwrap().moment(2).unwrap(),
            0.2,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            NoiseDensity::poly_bump(2, 1.0).unwrap().moment(2).unwrap(),
            1.0 / 7.0,
            epsilon = 1e-10
        );
        // ir_poly_bump(1, 2, 1): E[u^2] = 1/4
        assert_abs_diff_eq!(
            NoiseDensity::ir_poly_bump(1, 2, 1.0).unwrap().moment(2).unwrap(),
            0.25,
            epsilon = 1e-10
        );
        // shifted bump is symmetric about its center
        let shifted = NoiseDensity::shifted_bump(3.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(shifted.moment(1).unwrap(), 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(shifted.moment(2).unwrap(), 9.2, epsilon = 1e-10);
        // odd moments of even densities vanish
        for d in [
            NoiseDensity::poly_bump(2, 0.4).unwrap(),
            NoiseDensity::mirrored_bump(5.0, 1.0, 2).unwrap(),
        ] {
            assert_abs_diff_eq!(d.moment(1).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.moment(3).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scaled_inverse_moments() {
        let uniform = NoiseDensity::poly_bump(0, 0.5).unwrap();
        // E[1/(1+y)] on uniform[-1/2, 1/2] = ln 3
        assert_abs_diff_eq!(
            uniform.scaled_inverse_moment(1.0, 1).unwrap(),
            3.0_f64.ln(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            uniform.scaled_inverse_moment(1.0, 2).unwrap(),
            4.0 / 3.0,
            epsilon = 1e-10
        );
        // negative m = positive powers: E[(1+y)^2] = 1 + var = 1 + 1/12
        assert_abs_diff_eq!(
            uniform.scaled_inverse_moment(1.0, -2).unwrap(),
            1.0 + 1.0 / 12.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(NoiseDensity::zero().scaled_inverse_moment(1.0, 2).unwrap(), 1.0);
        // support reaching -eps is rejected
        assert!(NoiseDensity::poly_bump(1, 1.0)
            .unwrap()
            .scaled_inverse_moment(0.5, 1)
            .is_err());
    }

    #[test]
    fn inverse_power_moments() {
        let shifted = NoiseDensity::shifted_bump(3.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(
            shifted.inverse_power_moment(2.0, 1).unwrap(),
            0.6822338332806563,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            shifted.inverse_power_moment(2.0, 2).unwrap(),
            0.4766492500790156,
            epsilon = 1e-10
        );
        // odd inverse powers vanish on the mirrored family
        let mirrored = NoiseDensity::mirrored_bump(3.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(mirrored.inverse_power_moment(2.0, 1).unwrap(), 0.0, epsilon = 1e-12);
        // support containing the origin is rejected
        assert!(NoiseDensity::poly_bump(2, 0.3).unwrap().inverse_power_moment(1.0, 2).is_err());
        assert!(NoiseDensity::zero().inverse_power_moment(1.0, 1).is_err());
    }

    #[test]
    fn fourier_closed_form_for_parabolic_bump() {
        // poly_bump(1, 1): mu_hat(t) = 3 (sin t - t cos t) / t^3
        let d = NoiseDensity::poly_bump(1, 1.0).unwrap();
        for t in [0.5f64, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0] {
            let want = 3.0 * (t.sin() - t * t.cos()) / (t * t * t);
            let got = d.fourier(t);
            assert!(
                (got.re - want).abs() < 1e-10 && got.im.abs() < 1e-12,
                "t = {t}: got {got}, want {want}"
            );
        }
        // eta scaling: mu_hat_eta(t) = mu_hat_1(eta t)
        let scaled = NoiseDensity::poly_bump(1, 2.0).unwrap();
        for t in [0.7, 3.0, 20.0] {
            assert_abs_diff_eq!(scaled.fourier(t).re, d.fourier(2.0 * t).re, epsilon = 1e-11);
        }
    }

    #[test]
    fn fourier_basics() {
        let densities = [
            NoiseDensity::poly_bump(2, 0.3).unwrap(),
            NoiseDensity::smooth_bump(0.6).unwrap(),
            NoiseDensity::ir_poly_bump(1, 2, 0.5).unwrap(),
            NoiseDensity::shifted_bump(7.0, 2.0, 2).unwrap(),
            NoiseDensity::mirrored_bump(10.0, 1.0, 2).unwrap(),
            NoiseDensity::zero(),
        ];
        for d in &densities {
            let at_zero = d.fourier(0.0);
            assert_abs_diff_eq!(at_zero.re, 1.0, epsilon = 1e-11);
            assert_abs_diff_eq!(at_zero.im, 0.0, epsilon = 1e-13);
            for t in [0.3, 1.7, 12.0, 173.0] {
                let plus = d.fourier(t);
                let minus = d.fourier(-t);
                assert!(plus.norm() <= 1.0 + 1e-11, "|mu_hat| <= 1");
                // hermitian symmetry of a real density
                assert_abs_diff_eq!(plus.re, minus.re, epsilon = 1e-12);
                assert_abs_diff_eq!(plus.im, -minus.im, epsilon = 1e-12);
                if d.is_even() {
                    assert_abs_diff_eq!(plus.im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampler_passes_ks_against_numeric_cdf() {
        let cases = [
            NoiseDensity::poly_bump(0, 0.5).unwrap(),
            NoiseDensity::poly_bump(2, 0.3).unwrap(),
            NoiseDensity::smooth_bump(1.0).unwrap(),
            NoiseDensity::ir_poly_bump(1, 2, 0.5).unwrap(),
            NoiseDensity::shifted_bump(7.0, 2.0, 2).unwrap(),
            NoiseDensity::mirrored_bump(10.0, 1.0, 2).unwrap(),
        ];
        let n = 100_000;
        for (i, d) in cases.iter().enumerate() {
            let mut samples = d.sample(42 + i as u64, n);
            samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // numeric CDF via dense cumulative quadrature over the pieces
            let pieces = d.pieces();
            let rule = GlRule::new(8);
            let mut grid = Vec::new();
            let mut cumulative = Vec::new();
            let mut acc = 0.0;
            for (a, b) in &pieces {
                let steps = 4000;
                for k in 0..steps {
                    let lo = a + (b - a) * k as f64 / steps as f64;
                    let hi = a + (b - a) * (k + 1) as f64 / steps as f64;
                    let mut piece = 0.0;
                    rule.panel(lo, hi, &mut |x, w| piece += w * d.pdf(x));
                    acc += piece;
                    grid.push(hi);
                    cumulative.push(acc);
                }
            }
            let cdf = |x: f64| -> f64 {
                match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
                    Ok(i) => cumulative[i] / acc,
                    Err(0) => 0.0,
                    Err(i) => cumulative[i - 1] / acc,
                }
            };
            let mut ks: f64 = 0.0;
            for (j, s) in samples.iter().enumerate() {
                let f = cdf(*s);
                ks = ks
                    .max((f - j as f64 / n as f64).abs())
                    .max(((j + 1) as f64 / n as f64 - f).abs());
            }
            let bound = 2.0 / (n as f64).sqrt();
            assert!(ks < bound, "family {i}: KS = {ks:.4e} >= {bound:.4e}");
        }
    }

    #[test]
    fn sampler_streams_are_seeded_and_stateless() {
        let d = NoiseDensity::poly_bump(2, 0.3).unwrap();
        assert_eq!(d.sample(7, 100), d.sample(7, 100));
        assert_ne!(d.sample(7, 100), d.sample(8, 100));
        assert_eq!(NoiseDensity::zero().sample(3, 4), vec![0.0; 4]);
        // uniform mean is within 4 sigma of zero
        let u = NoiseDensity::poly_bump(0, 0.5).unwrap();
        let samples = u.sample(11, 100_000);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let sigma = 0.5 / (12.0_f64).sqrt() / (samples.len() as f64).sqrt();
        assert!(mean.abs() < 4.0 * sigma, "mean = {mean}, sigma = {sigma}");
    }

    proptest! {
        #[test]
        fn samples_stay_on_support(seed in 0u64..1000) {
            let d = NoiseDensity::shifted_bump(7.0, 2.0, 2).unwrap();
            for s in d.sample(seed, 500) {
                prop_assert!((5.0..=9.0).contains(&s));
            }
            let m = NoiseDensity::mirrored_bump(10.0, 1.0, 2).unwrap();
            for s in m.sample(seed, 500) {
                prop_assert!((9.0..=11.0).contains(&s.abs()));
            }
        }

        #[test]
        fn pdf_is_nonnegative_and_supported(u in -20.0..20.0f64) {
            for d in [
                NoiseDensity::poly_bump(2, 0.3).unwrap(),
                NoiseDensity::smooth_bump(0.6).unwrap(),
                NoiseDensity::ir_poly_bump(3, 2, 1.0).unwrap(),
                NoiseDensity::mirrored_bump(10.0, 1.0, 2).unwrap(),
            ] {
                let p = d.pdf(u);
                prop_assert!(p >= 0.0);
                let (lo, hi) = d.support();
                if u < lo || u > hi {
                    prop_assert_eq!(p, 0.0);
                }
            }
        }
    }
}
