use nalgebra::DVector;

/// A task-space reference curve parametrized by a free parameter, with
/// analytic first and second derivatives with respect to it.
pub trait Trajectory {
    fn dim(&self) -> usize;
    fn value(&self, psi: f64) -> DVector<f64>;
    fn first_derivative(&self, psi: f64) -> DVector<f64>;
    fn second_derivative(&self, psi: f64) -> DVector<f64>;

    /// Time-derivatives of the reference when the parameter runs at
    /// `psi_dot` and accelerates at `psi_ddot`:
    /// `xdot = d/dpsi x * psi_dot`,
    /// `xddot = d2/dpsi2 x * psi_dot^2 + d/dpsi x * psi_ddot`.
    fn reference(&self, psi: f64, psi_dot: f64, psi_ddot: f64) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let d1 = self.first_derivative(psi);
        let d2 = self.second_derivative(psi);
        (
            self.value(psi),
            &d1 * psi_dot,
            d2 * (psi_dot * psi_dot) + d1 * psi_ddot,
        )
    }
}

/// Straight line `x(psi) = origin + direction * psi`.
#[derive(Clone, Debug)]
pub struct LineTrajectory {
    pub origin: DVector<f64>,
    pub direction: DVector<f64>,
}

impl Trajectory for LineTrajectory {
    fn dim(&self) -> usize {
        self.origin.len()
    }

    fn value(&self, psi: f64) -> DVector<f64> {
        &self.origin + &self.direction * psi
    }

    fn first_derivative(&self, _psi: f64) -> DVector<f64> {
        self.direction.clone()
    }

    fn second_derivative(&self, _psi: f64) -> DVector<f64> {
        DVector::zeros(self.dim())
    }
}

/// Sinusoid along a fixed direction: `x = origin + dir * A sin(2 pi f psi)`.
#[derive(Clone, Debug)]
pub struct SinusoidTrajectory {
    pub origin: DVector<f64>,
    pub direction: DVector<f64>,
    pub amplitude: f64,
    pub frequency: f64,
}

impl Trajectory for SinusoidTrajectory {
    fn dim(&self) -> usize {
        self.origin.len()
    }

    fn value(&self, psi: f64) -> DVector<f64> {
        let w = 2.0 * std::f64::consts::PI * self.frequency;
        &self.origin + &self.direction * (self.amplitude * (w * psi).sin())
    }

    fn first_derivative(&self, psi: f64) -> DVector<f64> {
        let w = 2.0 * std::f64::consts::PI * self.frequency;
        &self.direction * (self.amplitude * w * (w * psi).cos())
    }

    fn second_derivative(&self, psi: f64) -> DVector<f64> {
        let w = 2.0 * std::f64::consts::PI * self.frequency;
        &self.direction * (-self.amplitude * w * w * (w * psi).sin())
    }
}

/// Minimum-jerk segment between two points over `duration`, with zero
/// endpoint velocity and acceleration; constant beyond the ends.
#[derive(Clone, Debug)]
pub struct MinimumJerkTrajectory {
    pub start: DVector<f64>,
    pub end: DVector<f64>,
    pub duration: f64,
}

impl MinimumJerkTrajectory {
    fn blend(&self, psi: f64) -> (f64, f64, f64) {
        let tau = (psi / self.duration).clamp(0.0, 1.0);
        let s = tau.powi(3) * (10.0 - 15.0 * tau + 6.0 * tau * tau);
        if psi <= 0.0 || psi >= self.duration {
            return (s, 0.0, 0.0);
        }
        let ds = (30.0 * tau.powi(2) - 60.0 * tau.powi(3) + 30.0 * tau.powi(4)) / self.duration;
        let dds =
            (60.0 * tau - 180.0 * tau.powi(2) + 120.0 * tau.powi(3)) / (self.duration * self.duration);
        (s, ds, dds)
    }
}

impl Trajectory for MinimumJerkTrajectory {
    fn dim(&self) -> usize {
        self.start.len()
    }

    fn value(&self, psi: f64) -> DVector<f64> {
        let (s, _, _) = self.blend(psi);
        &self.start + (&self.end - &self.start) * s
    }

    fn first_derivative(&self, psi: f64) -> DVector<f64> {
        let (_, ds, _) = self.blend(psi);
        (&self.end - &self.start) * ds
    }

    fn second_derivative(&self, psi: f64) -> DVector<f64> {
        let (_, _, dds) = self.blend(psi);
        (&self.end - &self.start) * dds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_derivatives(traj: &dyn Trajectory, range: (f64, f64)) {
        let h = 1e-6;
        for k in 1..20 {
            let psi = range.0 + (range.1 - range.0) * k as f64 / 20.0;
            let d1 = traj.first_derivative(psi);
            let fd1 = (traj.value(psi + h) - traj.value(psi - h)) / (2.0 * h);
            assert!((d1 - fd1).amax() <= 1e-6, "first derivative at {psi}");
            let d2 = traj.second_derivative(psi);
            let fd2 = (traj.first_derivative(psi + h) - traj.first_derivative(psi - h)) / (2.0 * h);
            assert!((d2 - fd2).amax() <= 1e-5, "second derivative at {psi}");
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let line = LineTrajectory {
            origin: DVector::from_vec(vec![0.1, -0.2]),
            direction: DVector::from_vec(vec![1.0, 0.5]),
        };
        check_derivatives(&line, (0.0, 3.0));
        let sine = SinusoidTrajectory {
            origin: DVector::from_vec(vec![0.0]),
            direction: DVector::from_vec(vec![1.0]),
            amplitude: 0.05,
            frequency: 0.1,
        };
        check_derivatives(&sine, (0.0, 10.0));
        let jerk = MinimumJerkTrajectory {
            start: DVector::from_vec(vec![0.0, 0.0, 0.2]),
            end: DVector::from_vec(vec![0.3, -0.1, 0.5]),
            duration: 2.0,
        };
        check_derivatives(&jerk, (0.1, 1.9));
    }

    #[test]
    fn minimum_jerk_endpoints_are_stationary() {
        let jerk = MinimumJerkTrajectory {
            start: DVector::from_vec(vec![0.0]),
            end: DVector::from_vec(vec![1.0]),
            duration: 1.5,
        };
        assert_eq!(jerk.value(0.0)[0], 0.0);
        assert_eq!(jerk.value(1.5)[0], 1.0);
        assert_eq!(jerk.first_derivative(0.0)[0], 0.0);
        assert_eq!(jerk.first_derivative(1.5)[0], 0.0);
        assert_eq!(jerk.value(2.5)[0], 1.0);
    }
}
