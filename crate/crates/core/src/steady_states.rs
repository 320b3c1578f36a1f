//! Bounded 1D steady states of `κ²u'' + sin u = 0`.
//!
//! Multiplying by `u'` gives the first integral `½κ²(u')² = C + cos u` with
//! `C >= -1`. Normalizing `|u(0)| <= π`, the value of `C` decides everything:
//!
//! | `C`          | solutions                                         |
//! |--------------|---------------------------------------------------|
//! | `C > 1`      | none bounded                                      |
//! | `C = 1`      | kinks `±2 arcsin tanh(x/κ + c)`, or `u ≡ ±π`      |
//! | `-1 < C < 1` | periodic orbits with amplitude `arccos(-C) < π`   |
//! | `C = -1`     | `u ≡ 0`                                           |
//!
//! Periodic orbits are built from the monotone branch
//! `u' = (√2/κ)√(C + cos u)` between two turning points and extended by even
//! reflection. With `sin(u/2) = k sin θ`, `k = sin(A/2)`, `A = arccos(-C)`, the
//! branch becomes `u = 2 arcsin(k sin θ)`, `x = κ(K(k) + F(θ, k))`, whose
//! integrand `1/√(1 - k² sin²θ)` has no endpoint singularity.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::Field;
use crate::quadrature::GaussLegendre;
use crate::spectral::{periodic_first_derivative, periodic_second_derivative, SpectralOps};

/// Half-width of the band around `C = ±1` treated as the boundary value itself.
pub const SEPARATRIX_TOL: f64 = 1e-12;

/// Tolerance of the reflection preconditions (endpoint slope or value).
pub const REFLECTION_TOL: f64 = 1e-8;

pub const MIN_QUAD_POINTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyError {
    #[error("first integral C = {0} is below -1; no real solution has this constant")]
    InvalidFirstIntegral(f64),
    #[error("C = {c} is in regime {regime}, not in the periodic range (-1, 1)")]
    WrongRegime { c: f64, regime: Regime },
    #[error("at least {MIN_QUAD_POINTS} quadrature points are required, got {0}")]
    TooFewQuadPoints(usize),
    #[error("kappa must be positive and finite, got {0}")]
    InvalidKappa(f64),
    #[error("{mode:?} reflection needs {what} within {REFLECTION_TOL:e} of zero, found {value:e}")]
    ReflectionIncompatible {
        mode: Reflection,
        what: &'static str,
        value: f64,
    },
    #[error("profile needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    NoBounded,
    Zero,
    Kink,
    ConstantPi,
    Periodic,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::NoBounded => "no-bounded-solution",
            Regime::Zero => "zero",
            Regime::Kink => "kink",
            Regime::ConstantPi => "constant-pi",
            Regime::Periodic => "periodic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(format!("unknown sign '{other}' (expected '+' or '-')")),
        }
    }
}

fn check_kappa(kappa: f64) -> Result<(), SteadyError> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(SteadyError::InvalidKappa(kappa))
    }
}

/// Regime of the first-integral constant `C`. `C = 1` reports [`Regime::Kink`];
/// use [`classify_state`] to tell the constants `±π` apart.
pub fn classify(c: f64) -> Result<Regime, SteadyError> {
    if c.is_nan() || c < -1.0 - SEPARATRIX_TOL {
        Err(SteadyError::InvalidFirstIntegral(c))
    } else if c <= -1.0 + SEPARATRIX_TOL {
        Ok(Regime::Zero)
    } else if c < 1.0 - SEPARATRIX_TOL {
        Ok(Regime::Periodic)
    } else if c <= 1.0 + SEPARATRIX_TOL {
        Ok(Regime::Kink)
    } else {
        Ok(Regime::NoBounded)
    }
}

/// `C = ½κ²(u')² - cos u` at a phase-plane point.
pub fn first_integral(u: f64, du: f64, kappa: f64) -> f64 {
    0.5 * kappa * kappa * du * du - u.cos()
}

/// Regime of the orbit through `(u, u')`, distinguishing the equilibria `±π`.
pub fn classify_state(u: f64, du: f64, kappa: f64) -> Result<Regime, SteadyError> {
    let regime = classify(first_integral(u, du, kappa))?;
    if regime == Regime::Kink && du.abs() <= REFLECTION_TOL && (u.abs() - PI).abs() <= 1e-6 {
        return Ok(Regime::ConstantPi);
    }
    Ok(regime)
}

/// `u(x) = ±2 arcsin tanh(x/κ + c)`, evaluated as `±2 arctan sinh(x/κ + c)`,
/// which stays accurate where `tanh` rounds to 1.
pub fn kink_eval(kappa: f64, sign: Sign, c: f64, x: f64) -> f64 {
    sign.value() * 2.0 * (x / kappa + c).sinh().atan()
}

/// Kink value with its exact first and second derivatives.
pub fn kink_derivatives(kappa: f64, sign: Sign, c: f64, x: f64) -> (f64, f64, f64) {
    let z = x / kappa + c;
    let s = sign.value();
    let sech = 1.0 / z.cosh();
    let u = s * 2.0 * z.sinh().atan();
    let du = s * 2.0 * sech / kappa;
    let d2u = -s * 2.0 * sech * z.tanh() / (kappa * kappa);
    (u, du, d2u)
}

/// `max |κ²u'' + sin u|` over `xs` using the kink's closed-form derivatives.
pub fn kink_residual(kappa: f64, sign: Sign, c: f64, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let (u, _, d2u) = kink_derivatives(kappa, sign, c, x);
            (kappa * kappa * d2u + u.sin()).abs()
        })
        .fold(0.0, f64::max)
}

/// Half-width of [`kink_window_residual`]'s window in units of `κ`; the kink's
/// distance from `±π` there is below `4e^{-40}`.
pub const KINK_WINDOW_HALF_WIDTH: f64 = 40.0;

/// Kink residual with `u''` spectral on `n` samples of the window
/// `x_c ± 40κ` around the kink center `x_c = -cκ`. The ramp `±πx/L` is removed
/// first so the periodic extension is smooth; it does not change `u''`.
pub fn kink_window_residual(kappa: f64, sign: Sign, c: f64, n: usize) -> f64 {
    let half = KINK_WINDOW_HALF_WIDTH * kappa;
    let center = -c * kappa;
    let h = 2.0 * half / n as f64;
    let slope = sign.value() * PI / half;
    let xs: Vec<f64> = (0..n).map(|j| center - half + j as f64 * h).collect();
    let u: Vec<f64> = xs.iter().map(|&x| kink_eval(kappa, sign, c, x)).collect();
    let g: Vec<f64> = u.iter().zip(&xs).map(|(u, x)| u - slope * (x - center)).collect();
    let d2u = periodic_second_derivative(&g, 2.0 * half);
    u.iter()
        .zip(&d2u)
        .map(|(&u, &d)| (kappa * kappa * d + u.sin()).abs())
        .fold(0.0, f64::max)
}

/// Classification record for one steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateCase {
    pub regime: Regime,
    pub c_value: f64,
    pub kappa: f64,
    pub sign: Sign,
    pub shift: f64,
    pub amplitude: f64,
}

impl SteadyStateCase {
    pub fn zero(kappa: f64) -> Result<Self, SteadyError> {
        check_kappa(kappa)?;
        Ok(Self {
            regime: Regime::Zero,
            c_value: -1.0,
            kappa,
            sign: Sign::Plus,
            shift: 0.0,
            amplitude: 0.0,
        })
    }

    pub fn constant_pi(kappa: f64, sign: Sign) -> Result<Self, SteadyError> {
        check_kappa(kappa)?;
        Ok(Self {
            regime: Regime::ConstantPi,
            c_value: 1.0,
            kappa,
            sign,
            shift: 0.0,
            amplitude: PI,
        })
    }

    pub fn kink(kappa: f64, sign: Sign, shift: f64) -> Result<Self, SteadyError> {
        check_kappa(kappa)?;
        Ok(Self {
            regime: Regime::Kink,
            c_value: 1.0,
            kappa,
            sign,
            shift,
            amplitude: PI,
        })
    }

    pub fn periodic(c: f64, kappa: f64) -> Result<Self, SteadyError> {
        check_kappa(kappa)?;
        let regime = classify(c)?;
        if regime != Regime::Periodic {
            return Err(SteadyError::WrongRegime { c, regime });
        }
        Ok(Self {
            regime,
            c_value: c,
            kappa,
            sign: Sign::Plus,
            shift: 0.0,
            amplitude: (-c).acos(),
        })
    }

    /// Closed-form value; `None` for periodic orbits (see [`PeriodicOrbit::eval`]).
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self.regime {
            Regime::Zero => Some(0.0),
            Regime::ConstantPi => Some(self.sign.value() * PI),
            Regime::Kink => Some(kink_eval(self.kappa, self.sign, self.shift, x)),
            Regime::Periodic | Regime::NoBounded => None,
        }
    }
}

/// Uniform samples `values[i] ≈ u(x_start + i·spacing)` with endpoint slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    pub x_start: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
    pub slope_start: f64,
    pub slope_end: f64,
}

impl SampledProfile {
    /// Estimates endpoint slopes with fourth-order one-sided differences.
    pub fn new(x_start: f64, spacing: f64, values: Vec<f64>) -> Result<Self, SteadyError> {
        if values.len() < 5 {
            return Err(SteadyError::TooFewSamples {
                needed: 5,
                got: values.len(),
            });
        }
        let one_sided = |f: [f64; 5]| {
            (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * spacing)
        };
        let n = values.len();
        let slope_start = one_sided([values[0], values[1], values[2], values[3], values[4]]);
        let slope_end = -one_sided([
            values[n - 1],
            values[n - 2],
            values[n - 3],
            values[n - 4],
            values[n - 5],
        ]);
        Ok(Self {
            x_start,
            spacing,
            values,
            slope_start,
            slope_end,
        })
    }

    pub fn with_slopes(
        x_start: f64,
        spacing: f64,
        values: Vec<f64>,
        slope_start: f64,
        slope_end: f64,
    ) -> Self {
        Self {
            x_start,
            spacing,
            values,
            slope_start,
            slope_end,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_start + i as f64 * self.spacing
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.values.len() - 1)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.x(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reflection {
    /// `u(x_e + s) = u(x_e - s)` about the right endpoint (needs `u'(x_e) = 0`).
    Even,
    /// `u(x_s - s) = -u(x_s + s)` about the left endpoint (needs `u(x_s) = 0`).
    Odd,
}

/// Extends a solution branch across one endpoint by reflection. The junction
/// sample is shared, so the output has `2·len - 1` samples.
pub fn reflect_extend(
    profile: &SampledProfile,
    mode: Reflection,
) -> Result<SampledProfile, SteadyError> {
    let n = profile.values.len();
    if n < 2 {
        return Err(SteadyError::TooFewSamples { needed: 2, got: n });
    }
    match mode {
        Reflection::Even => {
            if profile.slope_end.abs() > REFLECTION_TOL {
                return Err(SteadyError::ReflectionIncompatible {
                    mode,
                    what: "the endpoint slope",
                    value: profile.slope_end,
                });
            }
            let mut values = profile.values.clone();
            values.extend(profile.values.iter().rev().skip(1));
            Ok(SampledProfile {
                x_start: profile.x_start,
                spacing: profile.spacing,
                values,
                slope_start: profile.slope_start,
                slope_end: -profile.slope_start,
            })
        }
        Reflection::Odd => {
            if profile.values[0].abs() > REFLECTION_TOL {
                return Err(SteadyError::ReflectionIncompatible {
                    mode,
                    what: "the endpoint value",
                    value: profile.values[0],
                });
            }
            let mut values: Vec<f64> = profile.values.iter().rev().map(|v| -v).collect();
            values.extend(profile.values.iter().skip(1));
            Ok(SampledProfile {
                x_start: profile.x_start - (n - 1) as f64 * profile.spacing,
                spacing: profile.spacing,
                values,
                slope_start: profile.slope_end,
                slope_end: profile.slope_end,
            })
        }
    }
}

/// A periodic steady state for `-1 < C < 1`, aligned so `u(0) = -A` (a left
/// turning point) and `u(P/2) = A`.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    case: SteadyStateCase,
    modulus: f64,
    complete: f64,
    rule: GaussLegendre,
}

impl PeriodicOrbit {
    pub fn build(c: f64, kappa: f64, quad_points: usize) -> Result<Self, SteadyError> {
        let case = SteadyStateCase::periodic(c, kappa)?;
        if quad_points < MIN_QUAD_POINTS {
            return Err(SteadyError::TooFewQuadPoints(quad_points));
        }
        let modulus = (0.5 * case.amplitude).sin();
        let rule = GaussLegendre::new(quad_points);
        let mut orbit = Self {
            case,
            modulus,
            complete: 0.0,
            rule,
        };
        orbit.complete = orbit.incomplete(FRAC_PI_2);
        Ok(orbit)
    }

    fn integrand(&self, phi: f64) -> f64 {
        let s = self.modulus * phi.sin();
        1.0 / (1.0 - s * s).sqrt()
    }

    /// `F(θ) = ∫_0^θ dφ / √(1 - k² sin²φ)`.
    fn incomplete(&self, theta: f64) -> f64 {
        self.rule.integrate(0.0, theta, |p| self.integrand(p))
    }

    pub fn case(&self) -> &SteadyStateCase {
        &self.case
    }

    pub fn c_value(&self) -> f64 {
        self.case.c_value
    }

    pub fn kappa(&self) -> f64 {
        self.case.kappa
    }

    pub fn amplitude(&self) -> f64 {
        self.case.amplitude
    }

    /// Elliptic modulus `k = sin(A/2)`.
    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// Distance between consecutive turning points, `2κK(k)`.
    pub fn half_period(&self) -> f64 {
        2.0 * self.case.kappa * self.complete
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period()
    }

    /// Parameter `θ ∈ [-π/2, π/2]` of the increasing branch at `x ∈ [0, P/2]`,
    /// by Newton's method on `κ(K + F(θ)) = x`.
    fn theta_at(&self, x: f64) -> f64 {
        let kappa = self.case.kappa;
        let half = self.half_period();
        let x = x.clamp(0.0, half);
        let mut theta = -FRAC_PI_2 + PI * x / half;
        for _ in 0..60 {
            let g = kappa * (self.complete + self.incomplete(theta)) - x;
            let step = g / (kappa * self.integrand(theta));
            let next = (theta - step).clamp(-FRAC_PI_2, FRAC_PI_2);
            let done = (next - theta).abs() < 1e-15;
            theta = next;
            if done {
                break;
            }
        }
        theta
    }

    /// Reduces `x` into the increasing branch; the flag marks the reflected half.
    fn branch_point(&self, x: f64) -> (f64, bool) {
        let p = self.period();
        let r = x.rem_euclid(p);
        let half = self.half_period();
        if r <= half {
            (r, false)
        } else {
            (p - r, true)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (r, _) = self.branch_point(x);
        2.0 * (self.modulus * self.theta_at(r).sin()).asin()
    }

    /// `u'(x) = ±(2k/κ) cos θ`, positive on the increasing branch.
    pub fn derivative(&self, x: f64) -> f64 {
        let (r, reflected) = self.branch_point(x);
        let slope = 2.0 * self.modulus / self.case.kappa * self.theta_at(r).cos();
        if reflected {
            -slope
        } else {
            slope
        }
    }

    /// The monotone branch on `[0, P/2]` with `samples` points, endpoints included.
    pub fn half_profile(&self, samples: usize) -> Result<SampledProfile, SteadyError> {
        if samples < 5 {
            return Err(SteadyError::TooFewSamples {
                needed: 5,
                got: samples,
            });
        }
        let h = self.half_period() / (samples - 1) as f64;
        let values = (0..samples).map(|i| self.eval(i as f64 * h)).collect();
        Ok(SampledProfile::with_slopes(0.0, h, values, 0.0, 0.0))
    }

    /// One full period sampled at `x_j = j·P/n`, `j = 0..n`.
    pub fn sample_period(&self, n: usize) -> Vec<f64> {
        let h = self.period() / n as f64;
        (0..n).map(|j| self.eval(j as f64 * h)).collect()
    }

    /// `max |κ²u'' + sin u|` on `n` periodic samples, `u''` spectral.
    pub fn residual(&self, n: usize) -> f64 {
        residual_periodic(&self.sample_period(n), self.period(), self.case.kappa)
    }

    /// `max |½κ²(u')² - cos u - C|` on `n` periodic samples, `u'` spectral.
    pub fn first_integral_drift(&self, n: usize) -> f64 {
        let u = self.sample_period(n);
        let du = periodic_first_derivative(&u, self.period());
        u.iter()
            .zip(&du)
            .map(|(&u, &d)| (first_integral(u, d, self.case.kappa) - self.case.c_value).abs())
            .fold(0.0, f64::max)
    }
}

pub fn build_periodic_orbit(
    c: f64,
    kappa: f64,
    quad_points: usize,
) -> Result<PeriodicOrbit, SteadyError> {
    PeriodicOrbit::build(c, kappa, quad_points)
}

/// Residual of uniform samples covering exactly one period, `u''` spectral.
pub fn residual_periodic(values: &[f64], period: f64, kappa: f64) -> f64 {
    let d2u = periodic_second_derivative(values, period);
    values
        .iter()
        .zip(&d2u)
        .map(|(&u, &d)| (kappa * kappa * d + u.sin()).abs())
        .fold(0.0, f64::max)
}

/// Residual on a non-periodic window, fourth-order centered differences on the
/// interior points `2..n-2`.
pub fn residual_window(values: &[f64], spacing: f64, kappa: f64) -> f64 {
    let n = values.len();
    if n < 5 {
        return 0.0;
    }
    let scale = kappa * kappa / (12.0 * spacing * spacing);
    (2..n - 2)
        .map(|i| {
            let d2 = -values[i - 2] + 16.0 * values[i - 1] - 30.0 * values[i]
                + 16.0 * values[i + 1]
                - values[i + 2];
            (scale * d2 + values[i].sin()).abs()
        })
        .fold(0.0, f64::max)
}

/// Residual of a torus field, `Δ` spectral.
pub fn residual_field(ops: &SpectralOps, u: &Field, kappa: f64) -> f64 {
    let lap = ops.laplacian(u);
    u.values()
        .iter()
        .zip(lap.values())
        .map(|(&v, &l)| (kappa * kappa * l + v.sin()).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1.5).unwrap(), Regime::NoBounded);
        assert_eq!(classify(-1.0).unwrap(), Regime::Zero);
        assert_eq!(classify(0.0).unwrap(), Regime::Periodic);
        assert_eq!(classify(1.0).unwrap(), Regime::Kink);
        assert_eq!(classify(1.0 + 5e-13).unwrap(), Regime::Kink);
        assert_eq!(classify(1.0 - 5e-13).unwrap(), Regime::Kink);
        assert_eq!(classify(1.0 - 1e-9).unwrap(), Regime::Periodic);
        assert!(matches!(classify(-1.5), Err(SteadyError::InvalidFirstIntegral(_))));
        assert!(classify(f64::NAN).is_err());
    }

    #[test]
    fn periodic_case_amplitude() {
        let case = SteadyStateCase::periodic(0.0, 0.5).unwrap();
        assert!((case.amplitude - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(
            SteadyStateCase::periodic(1.0, 0.5),
            Err(SteadyError::WrongRegime { regime: Regime::Kink, .. })
        ));
    }

    #[test]
    fn first_integral_points() {
        assert_eq!(first_integral(0.0, 0.0, 0.7), -1.0);
        assert_eq!(first_integral(PI, 0.0, 0.7), 1.0);
        assert_eq!(classify_state(PI, 0.0, 0.3).unwrap(), Regime::ConstantPi);
        assert_eq!(classify_state(0.0, 0.0, 0.3).unwrap(), Regime::Zero);
    }

    #[test]
    fn kink_limits_and_center() {
        assert_eq!(kink_eval(1.0, Sign::Plus, 0.0, 0.0), 0.0);
        assert!((kink_eval(1.0, Sign::Plus, 0.0, 50.0) - PI).abs() < 1e-15);
        assert!((kink_eval(1.0, Sign::Minus, 0.0, 50.0) + PI).abs() < 1e-15);
        assert!((kink_eval(1.0, Sign::Plus, 0.0, -50.0) + PI).abs() < 1e-15);
    }

    #[test]
    fn kink_first_integral_is_one() {
        for kappa in [0.25, 0.5, 1.0] {
            for i in 0..200 {
                let x = -3.0 + 6.0 * i as f64 / 199.0;
                let (u, du, _) = kink_derivatives(kappa, Sign::Plus, 0.3, x);
                assert!((first_integral(u, du, kappa) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kink_fd_residual() {
        let h = 1e-3;
        let xs: Vec<f64> = (0..4001).map(|i| -2.0 + i as f64 * h).collect();
        let u: Vec<f64> = xs.iter().map(|&x| kink_eval(0.5, Sign::Plus, 0.0, x)).collect();
        let r = residual_window(&u, h, 0.5);
        assert!(r <= 1e-8, "fd residual {r:e}");
    }

    #[test]
    fn orbit_rejects_bad_inputs() {
        assert!(matches!(
            PeriodicOrbit::build(1.2, 0.5, 64),
            Err(SteadyError::WrongRegime { .. })
        ));
        assert!(matches!(
            PeriodicOrbit::build(-1.0, 0.5, 64),
            Err(SteadyError::WrongRegime { regime: Regime::Zero, .. })
        ));
        assert!(matches!(
            PeriodicOrbit::build(0.0, 0.5, 8),
            Err(SteadyError::TooFewQuadPoints(8))
        ));
    }

    #[test]
    fn orbit_turning_points() {
        let orbit = PeriodicOrbit::build(0.0, 0.5, 64).unwrap();
        let a = orbit.amplitude();
        assert!((orbit.eval(0.0) + a).abs() < 1e-14);
        assert!((orbit.eval(orbit.half_period()) - a).abs() < 1e-14);
        assert!((orbit.eval(orbit.period()) + a).abs() < 1e-12);
        assert!(orbit.derivative(0.0).abs() < 1e-15);
        // Increasing on the first half, decreasing on the second.
        assert!(orbit.derivative(0.3 * orbit.period()) > 0.0);
        assert!(orbit.derivative(0.7 * orbit.period()) < 0.0);
    }

    #[test]
    fn even_reflection_of_half_branch() {
        let orbit = PeriodicOrbit::build(0.0, 0.5, 64).unwrap();
        let half = orbit.half_profile(129).unwrap();
        let full = reflect_extend(&half, Reflection::Even).unwrap();
        assert_eq!(full.len(), 257);
        // Independently evaluated full orbit on the same nodes.
        for (i, &v) in full.values.iter().enumerate() {
            assert!((v - orbit.eval(full.x(i))).abs() < 1e-12, "i = {i}");
        }
    }

    #[test]
    fn odd_reflection_recovers_kink() {
        let h = 0.01;
        let right: Vec<f64> = (0..301)
            .map(|i| kink_eval(0.5, Sign::Plus, 0.0, i as f64 * h))
            .collect();
        let half = SampledProfile::new(0.0, h, right).unwrap();
        let full = reflect_extend(&half, Reflection::Odd).unwrap();
        assert!((full.x_start + 3.0).abs() < 1e-12);
        for (i, &v) in full.values.iter().enumerate() {
            let x = full.x(i);
            assert!((v - kink_eval(0.5, Sign::Plus, 0.0, x)).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn reflection_preconditions() {
        let h = 0.01;
        let vals: Vec<f64> = (0..50).map(|i| 0.1 * i as f64 * h).collect();
        let p = SampledProfile::new(0.0, h, vals).unwrap();
        assert!((p.slope_end - 0.1).abs() < 1e-10);
        assert!(matches!(
            reflect_extend(&p, Reflection::Even),
            Err(SteadyError::ReflectionIncompatible { mode: Reflection::Even, .. })
        ));
        let shifted = SampledProfile::new(0.0, h, p.values.iter().map(|v| v + 0.5).collect()).unwrap();
        assert!(matches!(
            reflect_extend(&shifted, Reflection::Odd),
            Err(SteadyError::ReflectionIncompatible { mode: Reflection::Odd, .. })
        ));
    }

    #[test]
    fn trivial_residuals() {
        assert_eq!(residual_window(&[0.0; 16], 0.1, 0.5), 0.0);
        assert!(residual_window(&[PI; 16], 0.1, 0.5) <= 1e-12);
        assert!(residual_periodic(&[PI; 16], 2.0, 0.5) <= 1e-15);
    }

    #[test]
    fn parse_sign() {
        assert_eq!("+".parse::<Sign>().unwrap(), Sign::Plus);
        assert_eq!("-".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("0".parse::<Sign>().is_err());
    }
}
