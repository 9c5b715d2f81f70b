use nalgebra::{DMatrix, DVector};

use super::constraints::ConstraintModel;
use super::measurements::MeasurementModel;
use super::variables::VariableLayout;
use super::EstimationError;
use crate::model::FloatingBaseModel;
use crate::spatial::{ForceVector, Vec3};

/// Gaussian prior on the dynamic variables.
#[derive(Clone, Debug)]
pub struct GaussianPrior {
    pub mean: DVector<f64>,
    /// Diagonal of the prior covariance.
    pub sigma_diag: DVector<f64>,
}

impl GaussianPrior {
    /// Zero-mean isotropic prior; the default uses a weak covariance so the
    /// data dominates.
    pub fn weak(len: usize, sigma: f64) -> Self {
        Self {
            mean: DVector::zeros(len),
            sigma_diag: DVector::from_element(len, sigma),
        }
    }
}

/// Default model-constraint covariance.
pub const DEFAULT_MODEL_COVARIANCE: f64 = 1e-4;
/// Default prior covariance (weak, zero-mean).
pub const DEFAULT_PRIOR_COVARIANCE: f64 = 1e4;

/// Posterior of the Gaussian estimation problem.
#[derive(Clone, Debug)]
pub struct MapResult {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub layout: Option<VariableLayout>,
}

impl MapResult {
    /// Joint torques extracted from the posterior mean.
    pub fn joint_torques(&self, model: &FloatingBaseModel) -> DVector<f64> {
        super::effort::joint_torques_from(&self.mean, model)
    }

    /// Per-link external-wrench estimates from the posterior mean.
    pub fn link_wrenches(&self, model: &FloatingBaseModel) -> Vec<ForceVector> {
        let layout = VariableLayout::of(model);
        (0..layout.links)
            .map(|i| {
                let at = layout.link_wrench(i);
                ForceVector::new(
                    Vec3::new(self.mean[at], self.mean[at + 1], self.mean[at + 2]),
                    Vec3::new(self.mean[at + 3], self.mean[at + 4], self.mean[at + 5]),
                )
            })
            .collect()
    }
}

/// Closed-form Gaussian MAP estimate.
///
/// Folding the model constraints into the prior gives
/// `Sigma_D_bar = (D' S_D^-1 D + S_d^-1)^-1` and
/// `mu_D_bar = Sigma_D_bar (S_d^-1 mu_d - D' S_D^-1 b_D)`; conditioning on
/// the measurements yields
/// `Sigma_d|y = (Sigma_D_bar^-1 + Y' S_y^-1 Y)^-1` and
/// `d_hat = Sigma_d|y (Y' S_y^-1 (y - b_Y) + Sigma_D_bar^-1 mu_D_bar)`,
/// which equals the minimizer of the three-term weighted least squares.
pub fn map_estimate(
    constraints: Option<&ConstraintModel>,
    model_covariance: f64,
    measurements: &MeasurementModel,
    prior: &GaussianPrior,
    y: &DVector<f64>,
) -> Result<MapResult, EstimationError> {
    let len = prior.mean.len();
    if measurements.rows() != y.len() {
        return Err(EstimationError::DimensionMismatch(format!(
            "{} measurement rows vs {} values",
            measurements.rows(),
            y.len()
        )));
    }
    // Information-form accumulation.
    let mut info = DMatrix::zeros(len, len);
    let mut rhs = DVector::zeros(len);
    for i in 0..len {
        info[(i, i)] += 1.0 / prior.sigma_diag[i];
        rhs[i] += prior.mean[i] / prior.sigma_diag[i];
    }
    if let Some(cm) = constraints {
        if cm.d.ncols() != len {
            return Err(EstimationError::DimensionMismatch(format!(
                "constraint columns {} vs variables {}",
                cm.d.ncols(),
                len
            )));
        }
        let weighted = &cm.d.transpose() * (1.0 / model_covariance);
        info += &weighted * &cm.d;
        rhs -= weighted * &cm.bias;
    }
    let mut yt_w = measurements.y_matrix.transpose();
    for (col, sigma) in measurements.sigma_diag.iter().enumerate() {
        yt_w.column_mut(col).scale_mut(1.0 / sigma);
    }
    info += &yt_w * &measurements.y_matrix;
    rhs += yt_w * (y - &measurements.bias);

    let chol = info
        .clone()
        .cholesky()
        .ok_or(EstimationError::SingularNormalEquations)?;
    let mean = chol.solve(&rhs);
    let covariance = chol.inverse();
    Ok(MapResult {
        mean,
        covariance,
        layout: None,
    })
}

/// Rank diagnostic of the stacked `[D; Y]` matrix against the column count.
#[derive(Clone, Debug)]
pub struct RankDiagnostic {
    pub rank: usize,
    pub columns: usize,
    pub deficient_directions: Vec<DVector<f64>>,
}

impl RankDiagnostic {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.columns
    }
}

/// Checks the stacked `[D; Y]` for full column rank with the singular-value
/// threshold `sigma_min / sigma_max < 1e-10`, listing deficient directions.
pub fn check_rank(d: Option<&ConstraintModel>, y: &MeasurementModel) -> RankDiagnostic {
    let cols = y.y_matrix.ncols();
    let d_rows = d.map_or(0, |cm| cm.d.nrows());
    let mut stacked = DMatrix::zeros(d_rows + y.y_matrix.nrows(), cols);
    if let Some(cm) = d {
        stacked.rows_mut(0, d_rows).copy_from(&cm.d);
    }
    stacked
        .rows_mut(d_rows, y.y_matrix.nrows())
        .copy_from(&y.y_matrix);
    let svd = stacked.svd(false, true);
    let sigma_max = svd.singular_values.max();
    let threshold = sigma_max * 1e-10;
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > threshold)
        .count();
    let v_t = svd.v_t.expect("svd with v_t");
    let mut deficient = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= threshold {
            deficient.push(v_t.row(i).transpose());
        }
    }
    // Columns beyond the number of singular values are also unobservable.
    for i in svd.singular_values.len()..cols {
        deficient.push(v_t.row(i).transpose());
    }
    RankDiagnostic {
        rank: rank.min(cols),
        columns: cols,
        deficient_directions: deficient,
    }
}
