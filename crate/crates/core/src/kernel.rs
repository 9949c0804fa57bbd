//! Compactly supported kernel profiles and their moment constants.
//!
//! A profile is a non-negative, non-increasing function of the *squared*
//! distance argument with value 0 at the origin (no self-edges) and support
//! contained in [0, R^2]. The two moment constants are
//!
//! ```text
//! c1 = int_{R^m} k(|y|^2) dy,      c2 = int_{R^m} k(|y|^2) y_1^2 dy,
//! ```
//!
//! reduced to 1-D radial integrals and evaluated with adaptive Simpson
//! quadrature (absolute tolerance 1e-10).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, unit_sphere_area};

const MOMENT_TOL: f64 = 1e-10;

/// A kernel profile of the squared distance.
#[derive(Clone)]
pub struct KernelProfile {
    name: String,
    support_radius: f64,
    value_at_zero: f64,
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for KernelProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelProfile")
            .field("name", &self.name)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// Moment constants of a profile over R^m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    pub c1: f64,
    pub c2: f64,
    pub dim: usize,
}

impl KernelProfile {
    /// Default profile: k(t) = (1 - t)^3 on (0, 1], zero at t = 0 and
    /// beyond the support.
    pub fn cubic_taper() -> Self {
        Self {
            name: "cubic_taper".to_string(),
            support_radius: 1.0,
            value_at_zero: 0.0,
            profile: Arc::new(|t| (1.0 - t).powi(3)),
        }
    }

    /// Register a custom profile. `profile` is consulted only on
    /// (0, support_radius^2]; the value at t = 0 is pinned to 0 and the
    /// profile is 0 outside the support.
    pub fn custom(
        name: impl Into<String>,
        support_radius: f64,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if support_radius <= 0.0 {
            return Err(Error::Domain(format!(
                "support radius must be positive, got {support_radius}"
            )));
        }
        Ok(Self {
            name: name.into(),
            support_radius,
            value_at_zero: 0.0,
            profile: Arc::new(profile),
        })
    }

    /// Like [`KernelProfile::custom`] but with an explicit value at t = 0,
    /// so that [`KernelProfile::validate`] can flag contract violations.
    pub fn custom_unchecked(
        name: impl Into<String>,
        support_radius: f64,
        value_at_zero: f64,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            support_radius,
            value_at_zero,
            profile: Arc::new(profile),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "cubic_taper" => Ok(Self::cubic_taper()),
            _ => Err(Error::UnknownKernel {
                name: name.to_string(),
                known: Self::registered_names().join(", "),
            }),
        }
    }

    pub fn registered_names() -> Vec<&'static str> {
        vec!["cubic_taper"]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// k(t) for a squared-distance argument t >= 0.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!(
                "kernel argument must be non-negative, got {t}"
            )));
        }
        Ok(self.eval_raw(t))
    }

    #[inline]
    pub(crate) fn eval_raw(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.value_at_zero
        } else if t > self.support_radius * self.support_radius {
            0.0
        } else {
            (self.profile)(t)
        }
    }

    /// Scaled kernel h^{-m} k(t / h^2) for intrinsic dimension m.
    pub fn eval_scaled(&self, h: f64, m: usize, sq_dist: f64) -> Result<f64> {
        if h <= 0.0 {
            return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
        }
        if m == 0 {
            return Err(Error::Domain("dimension must be at least 1".to_string()));
        }
        if sq_dist < 0.0 {
            return Err(Error::Domain(format!(
                "squared distance must be non-negative, got {sq_dist}"
            )));
        }
        Ok(self.eval_scaled_raw(h, m, sq_dist))
    }

    #[inline]
    pub(crate) fn eval_scaled_raw(&self, h: f64, m: usize, sq_dist: f64) -> f64 {
        self.eval_raw(sq_dist / (h * h)) / h.powi(m as i32)
    }

    /// Moment constants over R^m via the radial reduction
    /// c1 = area(S^{m-1}) int_0^R k(r^2) r^{m-1} dr and
    /// c2 = area(S^{m-1})/m int_0^R k(r^2) r^{m+1} dr.
    pub fn moments(&self, m: usize) -> Result<KernelMoments> {
        self.moments_with_tol(m, MOMENT_TOL)
    }

    pub fn moments_with_tol(&self, m: usize, tol: f64) -> Result<KernelMoments> {
        if m == 0 {
            return Err(Error::Domain("dimension must be at least 1".to_string()));
        }
        let area = unit_sphere_area(m);
        let r_max = self.support_radius;
        let k = |r: f64| self.eval_raw(r * r);
        let i1 = adaptive_simpson(&|r| k(r) * r.powi(m as i32 - 1), 0.0, r_max, tol);
        let i2 = adaptive_simpson(&|r| k(r) * r.powi(m as i32 + 1), 0.0, r_max, tol);
        let c1 = area * i1;
        let c2 = area / m as f64 * i2;
        if !c1.is_finite() || !c2.is_finite() || c1 <= 0.0 || c2 <= 0.0 {
            return Err(Error::Domain(format!(
                "kernel moments are not positive finite numbers: c1={c1}, c2={c2}"
            )));
        }
        Ok(KernelMoments { c1, c2, dim: m })
    }

    /// Sample the profile on a grid over [0, 2 R^2] and report violations of
    /// the profile contract.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let r2 = self.support_radius * self.support_radius;
        if self.value_at_zero != 0.0 {
            violations.push(Violation::ValueAtZero);
        }
        let steps = 2000;
        let mut prev: Option<(f64, f64)> = None;
        for i in 1..=steps {
            let t = 2.0 * r2 * i as f64 / steps as f64;
            let v = self.eval_raw(t);
            if v < 0.0 {
                violations.push(Violation::Negative { t });
            }
            if t > r2 && v != 0.0 {
                violations.push(Violation::SupportLeak { t });
            }
            if let Some((tp, vp)) = prev {
                if v > vp + 1e-15 {
                    violations.push(Violation::Increasing { t1: tp, t2: t });
                }
            }
            prev = Some((t, v));
        }
        ValidationReport { violations }
    }
}

/// A single contract violation found by [`KernelProfile::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ValueAtZero,
    Negative { t: f64 },
    Increasing { t1: f64, t2: f64 },
    SupportLeak { t: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ValueAtZero => write!(f, "value_at_zero"),
            Violation::Negative { t } => write!(f, "negative at t={t}"),
            Violation::Increasing { t1, t2 } => write!(f, "non-increasing violated on ({t1}, {t2})"),
            Violation::SupportLeak { t } => write!(f, "non-zero outside support at t={t}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
