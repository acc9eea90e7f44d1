//! Ready-made simulation designs.

use nalgebra::{DMatrix, DVector};

use crate::model::{arma_covariates, CovariateModel, ModelParams, ScalarCovariate};

/// AR part of the ARMA(3,1) covariate used by [`paper_sec5`].
pub const SEC5_COVARIATE_AR: [f64; 3] = [0.5, -0.3, 0.1];
/// MA part of the ARMA(3,1) covariate used by [`paper_sec5`].
pub const SEC5_COVARIATE_MA: [f64; 1] = [0.4];

/// A parameter set together with its covariate generator and panel shape.
#[derive(Debug, Clone)]
pub struct Design {
    pub params: ModelParams,
    pub covariates: CovariateModel,
    pub n: usize,
    pub horizon: usize,
}

/// Two species, one standardized ARMA(3,1) covariate, 50 paths of length
/// 100:
///
/// ```text
/// A = [[0.3, -0.5], [0.2, 0.7]]   B = [-0.5, 0.6]'   C = [0.2, 0.4]'
/// R = [[1, -0.2], [-0.2, 1]]
/// ```
pub fn paper_sec5() -> Design {
    let params = ModelParams::new(
        vec![DMatrix::from_row_slice(2, 2, &[0.3, -0.5, 0.2, 0.7])],
        DMatrix::from_row_slice(2, 1, &[-0.5, 0.6]),
        DVector::from_vec(vec![0.2, 0.4]),
        DMatrix::from_row_slice(2, 2, &[1.0, -0.2, -0.2, 1.0]),
    )
    .expect("preset parameters are valid");
    let arma = arma_covariates(&SEC5_COVARIATE_AR, &SEC5_COVARIATE_MA, 1.0).expect("stationary preset");
    Design {
        params,
        covariates: CovariateModel::new(vec![ScalarCovariate::Arma(arma)]),
        n: 50,
        horizon: 100,
    }
}
