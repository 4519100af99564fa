//! Mean-field dynamics on the phase cylinder `(p, φ)` with `p = −cosθ`.
//!
//! Time is measured in units of `1/κ_r`, so the rescaled Hamiltonian is
//! `H(p, φ) = Λ√(1−p²)cosφ + p²` and the equations of motion are
//! `ṗ = −∂H/∂φ`, `φ̇ = ∂H/∂p`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Euclid;
// Shadowed by inherent methods whenever std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// `Λ = Ω/κ_r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalParams {
    lambda: f64,
}

impl ClassicalParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::OutOfDomain {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Canonical momentum `p ∈ [−1, 1]` and phase `φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseState {
    pub p: f64,
    pub phi: f64,
}

impl PhaseState {
    pub fn new(p: f64, phi: f64) -> Self {
        Self { p, phi }
    }

    /// The point represented by the polar angles of a coherent state.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            p: -theta.cos(),
            phi,
        }
    }

    /// `θ = arccos(−p)`.
    pub fn theta(&self) -> f64 {
        (-self.p).clamp(-1.0, 1.0).acos()
    }

    /// Distance on the cylinder, with the phase difference wrapped into `(−π, π]`.
    pub fn distance(&self, other: &PhaseState) -> f64 {
        let dphi = wrap_signed(self.phi - other.phi);
        (self.p - other.p).hypot(dphi)
    }
}

fn wrap_signed(angle: f64) -> f64 {
    let a = Euclid::rem_euclid(&angle, &TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// Pole tolerance used by [`equations_of_motion`] and [`linearize`].
const POLE_EPS: f64 = 1e-12;

fn check_momentum(p: f64, margin: f64) -> Result<f64> {
    if !p.is_finite() || p.abs() >= 1.0 - margin {
        return Err(Error::PoleSingularity { p });
    }
    Ok((1.0 - p * p).sqrt())
}

/// `H = Λ√(1−p²)cosφ + p²`.
pub fn classical_hamiltonian(s: PhaseState, params: ClassicalParams) -> Result<f64> {
    if !(s.p.abs() <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: s.p,
        });
    }
    Ok(params.lambda * (1.0 - s.p * s.p).sqrt() * s.phi.cos() + s.p * s.p)
}

/// `(ṗ, φ̇) = (Λ√(1−p²)sinφ, 2p − Λp cosφ/√(1−p²))`.
pub fn equations_of_motion(s: PhaseState, params: ClassicalParams) -> Result<(f64, f64)> {
    let root = check_momentum(s.p, POLE_EPS)?;
    let (sin, cos) = s.phi.sin_cos();
    let lambda = params.lambda;
    Ok((lambda * root * sin, 2.0 * s.p - lambda * s.p * cos / root))
}

/// `M = [[−H_pφ, −H_φφ], [H_pp, H_pφ]]`, from analytic second derivatives.
pub fn linearize(s: PhaseState, params: ClassicalParams) -> Result<[[f64; 2]; 2]> {
    let root = check_momentum(s.p, POLE_EPS)?;
    let (sin, cos) = s.phi.sin_cos();
    let lambda = params.lambda;
    let h_pp = 2.0 - lambda * cos / (root * root * root);
    let h_phiphi = -lambda * root * cos;
    let h_pphi = lambda * s.p * sin / root;
    Ok([[-h_pphi, -h_phiphi], [h_pp, h_pphi]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// Imaginary eigenvalue pair.
    StableCenter,
    /// Real eigenvalue pair.
    UnstableSaddle,
    Marginal,
}

/// Position of `Λ` relative to the bifurcation at `Λ = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    AboveBifurcation,
    BelowBifurcation,
    AtBifurcation,
}

impl Regime {
    pub fn of(lambda: f64) -> Self {
        if (lambda - BIFURCATION_LAMBDA).abs() <= BIFURCATION_TOLERANCE {
            Regime::AtBifurcation
        } else if lambda > BIFURCATION_LAMBDA {
            Regime::AboveBifurcation
        } else {
            Regime::BelowBifurcation
        }
    }
}

/// `Ω = 2κ_r`.
pub const BIFURCATION_LAMBDA: f64 = 2.0;
const BIFURCATION_TOLERANCE: f64 = 1e-12;
/// Band around zero in which `λ²` is reported as [`Stability::Marginal`].
pub const STABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointReport {
    pub location: PhaseState,
    pub theta_equivalent: f64,
    pub jacobian: [[f64; 2]; 2],
    /// `λ² = −det M` (the Jacobian is trace-free at every fixed point).
    pub eigenvalue_squared: f64,
    pub stability: Stability,
    pub regime: Regime,
}

impl FixedPointReport {
    fn at(location: PhaseState, params: ClassicalParams) -> Result<Self> {
        let jacobian = linearize(location, params)?;
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let eigenvalue_squared = -det;
        let stability = if eigenvalue_squared < -STABILITY_TOLERANCE {
            Stability::StableCenter
        } else if eigenvalue_squared > STABILITY_TOLERANCE {
            Stability::UnstableSaddle
        } else {
            Stability::Marginal
        };
        Ok(Self {
            location,
            theta_equivalent: location.theta(),
            jacobian,
            eigenvalue_squared,
            stability,
            regime: Regime::of(params.lambda),
        })
    }
}

/// All fixed points off the poles.
///
/// `(0, 0)` and `(0, π)` exist for every `Λ`. Below the bifurcation the pair
/// `p = ±√(1−(Λ/2)²)`, `φ = 0` appears (for `Λ = 0` it sits on the poles and
/// is omitted). At `Λ = 2` that pair has merged into `(0, 0)`.
///
/// The stationary solutions `p = ±1` are never returned: `φ̇` diverges there.
pub fn find_fixed_points(params: ClassicalParams) -> Vec<FixedPointReport> {
    let lambda = params.lambda;
    let mut locations = alloc::vec![PhaseState::new(0.0, 0.0), PhaseState::new(0.0, PI)];
    if Regime::of(lambda) == Regime::BelowBifurcation && lambda > 0.0 {
        let half = 0.5 * lambda;
        let p = (1.0 - half * half).sqrt();
        locations.push(PhaseState::new(p, 0.0));
        locations.push(PhaseState::new(-p, 0.0));
    }
    locations
        .into_iter()
        .map(|loc| FixedPointReport::at(loc, params).expect("fixed points lie off the poles"))
        .collect()
}

/// One RK4 sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub p: f64,
    /// Wrapped into `[0, 2π)`.
    pub phi: f64,
    /// Continuous phase, never wrapped.
    pub phi_unwrapped: f64,
    pub energy: f64,
}

impl TrajectoryPoint {
    pub fn state(&self) -> PhaseState {
        PhaseState::new(self.p, self.phi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// `max_t |H(t) − H(0)|` over every step, sampled or not.
    pub max_energy_drift: f64,
}

impl Trajectory {
    /// Largest distance from `center` over the sampled points.
    pub fn max_distance_from(&self, center: &PhaseState) -> f64 {
        self.points
            .iter()
            .map(|pt| pt.state().distance(center))
            .fold(0.0, f64::max)
    }
}

/// Why an integration run stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// A step would have reached `|p| ≥ 1 − 1e-9`; the step was rejected.
    PoleReached {
        t: f64,
        p: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Record every `stride`-th step (the first and last are always kept).
    pub stride: usize,
}

impl IntegrationOptions {
    pub const DEFAULT_DT: f64 = 1e-3;

    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            stride: 1,
        }
    }
}

/// Closest allowed distance of a starting point to a pole.
pub const START_POLE_MARGIN: f64 = 1e-6;
const STEP_POLE_MARGIN: f64 = 1e-9;

/// Fourth-order Runge-Kutta with local step subdivision; stops (without
/// error) when a step would reach a pole.
pub fn integrate(
    s0: PhaseState,
    params: ClassicalParams,
    options: &IntegrationOptions,
) -> Result<(Trajectory, Termination)> {
    let IntegrationOptions { t_end, dt, stride } = *options;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "dt",
            value: dt,
        });
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "t_end",
            value: t_end,
        });
    }
    if !s0.phi.is_finite() {
        return Err(Error::OutOfDomain {
            name: "phi",
            value: s0.phi,
        });
    }
    check_momentum(s0.p, START_POLE_MARGIN)?;
    let stride = stride.max(1);

    let steps = (t_end / dt).round() as usize;
    let energy0 = classical_hamiltonian(s0, params)?;
    let record = |t: f64, p: f64, phi: f64, energy: f64| TrajectoryPoint {
        t,
        p,
        phi: Euclid::rem_euclid(&phi, &TAU),
        phi_unwrapped: phi,
        energy,
    };
    let mut points = Vec::with_capacity(steps / stride + 2);
    points.push(record(0.0, s0.p, s0.phi, energy0));
    let mut max_drift: f64 = 0.0;
    let mut state = (s0.p, s0.phi);

    let rhs = |p: f64, phi: f64| -> Option<(f64, f64)> {
        if p.abs() >= 1.0 - STEP_POLE_MARGIN {
            return None;
        }
        equations_of_motion(PhaseState::new(p, phi), params).ok()
    };

    for step in 1..=steps {
        let (p, phi) = state;
        let t = step as f64 * dt;
        let Some((np, nphi)) = advance(&rhs, (p, phi), dt, 0) else {
            if let Some(last) = points.last() {
                if last.t < (step - 1) as f64 * dt {
                    let energy = classical_hamiltonian(PhaseState::new(p, phi), params)?;
                    points.push(record((step - 1) as f64 * dt, p, phi, energy));
                }
            }
            return Ok((
                Trajectory {
                    points,
                    max_energy_drift: max_drift,
                },
                Termination::PoleReached { t, p },
            ));
        };
        state = (np, nphi);
        let energy = classical_hamiltonian(PhaseState::new(np, nphi), params)?;
        max_drift = max_drift.max((energy - energy0).abs());
        if step % stride == 0 || step == steps {
            points.push(record(t, np, nphi, energy));
        }
    }
    Ok((
        Trajectory {
            points,
            max_energy_drift: max_drift,
        },
        Termination::Completed,
    ))
}

/// Local tolerance of the step-doubling estimate in [`advance`].
const SUBSTEP_TOLERANCE: f64 = 1e-12;
const MAX_SUBDIVISION_DEPTH: u32 = 20;

type Rhs<'a> = dyn Fn(f64, f64) -> Option<(f64, f64)> + 'a;

fn rk4_step(rhs: &Rhs<'_>, (p, phi): (f64, f64), h: f64) -> Option<(f64, f64)> {
    let k1 = rhs(p, phi)?;
    let k2 = rhs(p + 0.5 * h * k1.0, phi + 0.5 * h * k1.1)?;
    let k3 = rhs(p + 0.5 * h * k2.0, phi + 0.5 * h * k2.1)?;
    let k4 = rhs(p + h * k3.0, phi + h * k3.1)?;
    let np = p + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
    let nphi = phi + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    (np.is_finite() && nphi.is_finite() && np.abs() < 1.0 - STEP_POLE_MARGIN).then_some((np, nphi))
}

/// One RK4 step of size `h`, halved recursively wherever a full step and two
/// half steps disagree by more than [`SUBSTEP_TOLERANCE`]. Away from the
/// poles this is a plain fixed-step RK4; near them `φ̇` grows like
/// `1/√(1−p²)` and the subdivision keeps the energy error bounded.
fn advance(rhs: &Rhs<'_>, state: (f64, f64), h: f64, depth: u32) -> Option<(f64, f64)> {
    let full = rk4_step(rhs, state, h);
    let half = rk4_step(rhs, state, 0.5 * h).and_then(|mid| rk4_step(rhs, mid, 0.5 * h));
    match (full, half) {
        (Some(a), Some(b))
            if (a.0 - b.0).abs().max((a.1 - b.1).abs()) <= SUBSTEP_TOLERANCE
                || depth >= MAX_SUBDIVISION_DEPTH =>
        {
            Some(b)
        }
        _ if depth >= MAX_SUBDIVISION_DEPTH => None,
        _ => {
            let mid = advance(rhs, state, 0.5 * h, depth + 1)?;
            advance(rhs, mid, 0.5 * h, depth + 1)
        }
    }
}

/// Energy drift allowed for a trajectory starting at energy `h0`.
pub fn drift_bound(h0: f64) -> f64 {
    1e-8 * h0.abs().max(1.0)
}

/// RK4 trajectory recording every step.
///
/// Fails with [`Error::PoleSingularity`] if a step reaches a pole and with
/// [`Error::StepTooLarge`] if the energy drift exceeds
/// `1e-8·max(1, |H(0)|)`.
pub fn integrate_trajectory(
    s0: PhaseState,
    params: ClassicalParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let (trajectory, termination) = integrate(s0, params, &IntegrationOptions::new(t_end, dt))?;
    if let Termination::PoleReached { p, .. } = termination {
        return Err(Error::PoleSingularity { p });
    }
    let bound = drift_bound(trajectory.points[0].energy);
    if trajectory.max_energy_drift > bound {
        return Err(Error::StepTooLarge {
            drift: trajectory.max_energy_drift,
            bound,
        });
    }
    Ok(trajectory)
}

/// Result of the self-trapping threshold formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriticalCoupling {
    /// `Λ < Λ_c` self-traps, `Λ > Λ_c` oscillates.
    Finite(f64),
    /// Vanishing denominator with a non-vanishing numerator.
    Unbounded,
    /// `0/0` at `θ₀ = π/2, φ₀ = 0`.
    Indeterminate,
}

impl CriticalCoupling {
    pub fn value(self) -> Option<f64> {
        match self {
            CriticalCoupling::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// `Λ_c = cos²θ₀ / (1 − sinθ₀ cosφ₀)`.
pub fn self_trapping_critical_omega(theta0: f64, phi0: f64) -> CriticalCoupling {
    let cos_theta = theta0.cos();
    let numerator = cos_theta * cos_theta;
    let denominator = 1.0 - theta0.sin() * phi0.cos();
    if denominator.abs() <= 1e-12 {
        if numerator.abs() <= 1e-12 {
            CriticalCoupling::Indeterminate
        } else {
            CriticalCoupling::Unbounded
        }
    } else {
        CriticalCoupling::Finite(numerator / denominator)
    }
}

/// `Λ sinθ₀ cosφ₀ + cos²θ₀ − Λ`; positive means self-trapping.
pub fn self_trapping_margin(theta0: f64, phi0: f64, lambda: f64) -> f64 {
    let cos_theta = theta0.cos();
    lambda * theta0.sin() * phi0.cos() + cos_theta * cos_theta - lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64) -> ClassicalParams {
        ClassicalParams::new(lambda).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let h = |p, phi, l| classical_hamiltonian(PhaseState::new(p, phi), params(l)).unwrap();
        assert_eq!(h(0.0, 0.0, 1.0), 1.0);
        assert_eq!(h(1.0, 0.7, 3.0), 1.0);
        assert_eq!(h(-1.0, 0.7, 3.0), 1.0);
        assert!((h(0.0, PI, 2.0) + 2.0).abs() < 1e-15);
        assert!(classical_hamiltonian(PhaseState::new(1.1, 0.0), params(1.0)).is_err());
    }

    #[test]
    fn equations_of_motion_vanish_at_fixed_points() {
        for phi in [0.0, PI] {
            let (dp, dphi) = equations_of_motion(PhaseState::new(0.0, phi), params(1.3)).unwrap();
            assert!(dp.abs() < 1e-15 && dphi.abs() < 1e-15);
        }
        let p = 3f64.sqrt() / 2.0;
        let (dp, dphi) = equations_of_motion(PhaseState::new(p, 0.0), params(1.0)).unwrap();
        assert!(dp.abs() < 1e-15 && dphi.abs() < 1e-14);
    }

    #[test]
    fn equations_of_motion_reject_poles() {
        assert!(matches!(
            equations_of_motion(PhaseState::new(1.0, 0.0), params(1.0)),
            Err(Error::PoleSingularity { .. })
        ));
        assert!(equations_of_motion(PhaseState::new(-1.0 + 1e-13, 0.0), params(1.0)).is_err());
    }

    #[test]
    fn jacobian_at_equator() {
        for lambda in [0.5, 1.0, 2.0, 4.0] {
            let m = linearize(PhaseState::new(0.0, 0.0), params(lambda)).unwrap();
            assert_eq!(m, [[0.0, lambda], [2.0 - lambda, 0.0]]);
            let m = linearize(PhaseState::new(0.0, PI), params(lambda)).unwrap();
            assert!((m[0][1] + lambda).abs() < 1e-15);
            assert!((m[1][0] - (2.0 + lambda)).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_points_above_bifurcation() {
        let fps = find_fixed_points(params(4.0));
        assert_eq!(fps.len(), 2);
        assert!(fps.iter().all(|f| f.stability == Stability::StableCenter));
        assert!(fps.iter().all(|f| f.regime == Regime::AboveBifurcation));
    }

    #[test]
    fn fixed_points_below_bifurcation() {
        let fps = find_fixed_points(params(1.0));
        assert_eq!(fps.len(), 4);
        assert_eq!(fps[0].stability, Stability::UnstableSaddle);
        assert_eq!(fps[1].stability, Stability::StableCenter);
        let p = 3f64.sqrt() / 2.0;
        assert!((fps[2].location.p - p).abs() < 1e-15);
        assert!((fps[3].location.p + p).abs() < 1e-15);
        assert_eq!(fps[2].stability, Stability::StableCenter);
        assert_eq!(fps[3].stability, Stability::StableCenter);
        // θ = arcsin(Λ/2) on the p < 0 branch, π − arcsin(Λ/2) on p > 0.
        assert!((fps[3].theta_equivalent - (0.5f64).asin()).abs() < 1e-12);
        assert!((fps[2].theta_equivalent - (PI - (0.5f64).asin())).abs() < 1e-12);
    }

    #[test]
    fn fixed_points_at_bifurcation() {
        let fps = find_fixed_points(params(2.0));
        assert_eq!(fps.len(), 2);
        assert!(fps.iter().all(|f| f.regime == Regime::AtBifurcation));
        assert_eq!(fps[0].stability, Stability::Marginal);
    }

    #[test]
    fn zero_tunneling_keeps_only_equator() {
        let fps = find_fixed_points(params(0.0));
        assert_eq!(fps.len(), 2);
    }

    #[test]
    fn fixed_point_trajectory_stays_put() {
        for lambda in [0.5, 3.0] {
            let traj =
                integrate_trajectory(PhaseState::new(0.0, PI), params(lambda), 5.0, 1e-3).unwrap();
            for pt in &traj.points {
                assert!(pt.p.abs() < 1e-10);
                assert!((pt.phi - PI).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn start_near_pole_is_rejected() {
        let err = integrate_trajectory(PhaseState::new(1.0 - 1e-7, 0.0), params(1.0), 1.0, 1e-3);
        assert!(matches!(err, Err(Error::PoleSingularity { .. })));
        assert!(integrate_trajectory(PhaseState::new(0.1, 0.0), params(1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn critical_coupling_examples() {
        assert_eq!(
            self_trapping_critical_omega(0.0, 0.0),
            CriticalCoupling::Finite(1.0)
        );
        let v = self_trapping_critical_omega(PI / 6.0, 0.0).value().unwrap();
        assert!((v - 1.5).abs() < 1e-15);
        let v = self_trapping_critical_omega(PI / 6.0, PI).value().unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(
            self_trapping_critical_omega(PI / 2.0, 0.0),
            CriticalCoupling::Indeterminate
        );
    }

    #[test]
    fn margin_sign_flips_at_critical_coupling() {
        assert!(self_trapping_margin(0.0, 0.0, 0.9) > 0.0);
        assert!(self_trapping_margin(0.0, 0.0, 1.1) < 0.0);
        assert_eq!(self_trapping_margin(0.0, 0.0, 1.0), 0.0);
    }
}
