//! Information geometry with nuisance parameters.
//!
//! The parameter is split as `theta = (theta_1, theta_2)` with the first `m`
//! coordinates of interest. With `I` partitioned accordingly,
//! `I_{11.2} = I_11 - I_12 I_22^{-1} I_21` is the efficient information for
//! `theta_1` when `theta_2` is unknown, and the efficient score is
//! `l*_1 = l_1 - I_12 I_22^{-1} l_2`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{LinearRegressionModel, LocationFamily, Observation, ParametricModel};
use crate::numerics::linalg::{check_fisher, is_symmetric, spd_inverse, Matrix, Vector};

/// A Fisher information matrix split into interest and nuisance blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedInfo {
    m: usize,
    full: Matrix,
    i11: Matrix,
    i12: Matrix,
    i21: Matrix,
    i22: Matrix,
    i22_inv: Matrix,
    i11_inv: Matrix,
    i11_2: Matrix,
    i22_1: Matrix,
}

/// Splits `info` after the leading `m x m` block.
pub fn partition(info: &Matrix, m: usize) -> Result<PartitionedInfo> {
    let k = info.nrows();
    if m == 0 || m >= k {
        return Err(Error::domain(format!("interest dimension {m} must lie in 1..{k}")));
    }
    check_fisher(info)?;
    let i11 = info.view((0, 0), (m, m)).into_owned();
    let i12 = info.view((0, m), (m, k - m)).into_owned();
    let i21 = info.view((m, 0), (k - m, m)).into_owned();
    let i22 = info.view((m, m), (k - m, k - m)).into_owned();
    let i11_inv = spd_inverse(&i11)?;
    let i22_inv = spd_inverse(&i22)?;
    let i11_2 = crate::numerics::linalg::symmetrize(&(&i11 - &i12 * &i22_inv * &i21));
    let i22_1 = crate::numerics::linalg::symmetrize(&(&i22 - &i21 * &i11_inv * &i12));
    Ok(PartitionedInfo {
        m,
        full: info.clone(),
        i11,
        i12,
        i21,
        i22,
        i22_inv,
        i11_inv,
        i11_2,
        i22_1,
    })
}

impl PartitionedInfo {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn full(&self) -> &Matrix {
        &self.full
    }

    pub fn i11(&self) -> &Matrix {
        &self.i11
    }

    pub fn i12(&self) -> &Matrix {
        &self.i12
    }

    pub fn i21(&self) -> &Matrix {
        &self.i21
    }

    pub fn i22(&self) -> &Matrix {
        &self.i22
    }

    /// `I_{11.2}`, the efficient information for the interest block.
    pub fn i11_2(&self) -> &Matrix {
        &self.i11_2
    }

    pub fn i22_1(&self) -> &Matrix {
        &self.i22_1
    }

    /// `I_12 I_22^{-1}`, the regression of the interest score on the nuisance score.
    pub fn projection(&self) -> Matrix {
        &self.i12 * &self.i22_inv
    }

    /// `I^{-1}` assembled blockwise from the two Schur complements.
    pub fn block_inverse(&self) -> Result<Matrix> {
        let a = spd_inverse(&self.i11_2)?;
        let d = spd_inverse(&self.i22_1)?;
        let b = -(&a * &self.i12 * &self.i22_inv);
        let c = -(&d * &self.i21 * &self.i11_inv);
        let k = self.full.nrows();
        let m = self.m;
        let mut out = Matrix::zeros(k, k);
        out.view_mut((0, 0), (m, m)).copy_from(&a);
        out.view_mut((0, m), (m, k - m)).copy_from(&b);
        out.view_mut((m, 0), (k - m, m)).copy_from(&c);
        out.view_mut((m, m), (k - m, k - m)).copy_from(&d);
        Ok(out)
    }

    /// Bound for `theta_1` when `theta_2` is known: `I_11^{-1}`.
    pub fn restricted_bound(&self) -> Matrix {
        self.i11_inv.clone()
    }

    /// Bound for `theta_1` when `theta_2` is unknown: `I_{11.2}^{-1}`.
    pub fn full_bound(&self) -> Result<Matrix> {
        spd_inverse(&self.i11_2)
    }

    /// `I_{11.2}^{-1} - I_11^{-1}`, positive semidefinite.
    pub fn information_loss(&self) -> Result<Matrix> {
        Ok(self.full_bound()? - &self.i11_inv)
    }

    /// `tr I_{11.2}^{-1} / tr I_11^{-1}`, at least 1.
    pub fn loss_trace_ratio(&self) -> Result<f64> {
        Ok(self.full_bound()?.trace() / self.i11_inv.trace())
    }

    /// `l*_1 = l_1 - I_12 I_22^{-1} l_2` from a full score vector.
    pub fn efficient_score(&self, score: &Vector) -> Vector {
        let k = self.full.nrows();
        let s1 = score.rows(0, self.m).into_owned();
        let s2 = score.rows(self.m, k - self.m).into_owned();
        s1 - self.projection() * s2
    }
}

/// Which object an [`InfluenceFunction`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfluenceKind {
    /// `I_11^{-1} l_1`: nuisance known.
    Restricted,
    /// `I_{11.2}^{-1} l*_1`: nuisance unknown.
    Full,
    /// The efficient score `l*_1` itself (unnormalized).
    EfficientScore,
    /// Efficient influence in a semiparametric model.
    Semiparametric,
    /// A fitted estimate of an influence function.
    Estimated,
}

type ObsMap = Arc<dyn Fn(&Observation) -> Result<Vector> + Send + Sync>;
type Factory = Arc<dyn Fn(&[f64]) -> Result<LocalInfluence> + Send + Sync>;

/// An influence function frozen at one parameter value.
#[derive(Clone)]
pub struct LocalInfluence {
    eval: ObsMap,
    covariance: Matrix,
}

impl LocalInfluence {
    pub fn new(eval: impl Fn(&Observation) -> Result<Vector> + Send + Sync + 'static, covariance: Matrix) -> Self {
        Self {
            eval: Arc::new(eval),
            covariance,
        }
    }

    pub fn eval(&self, x: &Observation) -> Result<Vector> {
        (self.eval)(x)
    }

    /// `E_theta[eval eval']`: the information bound for influence functions,
    /// `I_{11.2}` for the efficient score.
    pub fn covariance(&self) -> &Matrix {
        &self.covariance
    }

    /// Sample mean of the influence over `xs`.
    pub fn mean_over(&self, xs: &[Observation]) -> Result<Vector> {
        let m = self.covariance.nrows();
        let values = xs.iter().map(|x| self.eval(x)).collect::<Result<Vec<_>>>()?;
        let mut out = Vector::zeros(m);
        for j in 0..m {
            let col: Vec<f64> = values.iter().map(|v| v[j]).collect();
            out[j] = crate::numerics::stats::mean(&col);
        }
        Ok(out)
    }
}

/// A map `(x, theta) -> R^m`, built per parameter value by [`InfluenceFunction::at`].
#[derive(Clone)]
pub struct InfluenceFunction {
    kind: InfluenceKind,
    dim: usize,
    factory: Factory,
}

impl fmt::Debug for InfluenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InfluenceFunction")
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl InfluenceFunction {
    pub fn new(
        kind: InfluenceKind,
        dim: usize,
        factory: impl Fn(&[f64]) -> Result<LocalInfluence> + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind,
            dim,
            factory: Arc::new(factory),
        }
    }

    pub fn kind(&self) -> InfluenceKind {
        self.kind
    }

    /// Output dimension `m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, theta: &[f64]) -> Result<LocalInfluence> {
        (self.factory)(theta)
    }

    pub fn eval(&self, x: &Observation, theta: &[f64]) -> Result<Vector> {
        self.at(theta)?.eval(x)
    }
}

fn check_interest_dim(model: &dyn ParametricModel, m: usize) -> Result<()> {
    if m == 0 || m > model.dim() {
        return Err(Error::domain(format!(
            "interest dimension {m} must lie in 1..={} for {}",
            model.dim(),
            model.name()
        )));
    }
    Ok(())
}

/// `I_11^{-1} l_1` for the leading `m` coordinates.
pub fn influence_restricted(model: Arc<dyn ParametricModel>, m: usize) -> Result<InfluenceFunction> {
    check_interest_dim(model.as_ref(), m)?;
    Ok(InfluenceFunction::new(InfluenceKind::Restricted, m, move |theta| {
        let info = model.fisher(theta)?;
        let i11_inv = spd_inverse(&info.view((0, 0), (m, m)).into_owned())?;
        let (md, th, w) = (model.clone(), theta.to_vec(), i11_inv.clone());
        Ok(LocalInfluence::new(
            move |x| Ok(&w * md.score(x, &th)?.rows(0, m)),
            i11_inv,
        ))
    }))
}

/// `I_{11.2}^{-1} l*_1` for the leading `m` coordinates; with `m` equal to
/// the model dimension this is `I^{-1} l`.
pub fn influence_full(model: Arc<dyn ParametricModel>, m: usize) -> Result<InfluenceFunction> {
    check_interest_dim(model.as_ref(), m)?;
    Ok(InfluenceFunction::new(InfluenceKind::Full, m, move |theta| {
        let info = model.fisher(theta)?;
        let (md, th) = (model.clone(), theta.to_vec());
        if m == model.dim() {
            let inv = spd_inverse(&info)?;
            let w = inv.clone();
            return Ok(LocalInfluence::new(move |x| Ok(&w * md.score(x, &th)?), inv));
        }
        let p = partition(&info, m)?;
        let bound = p.full_bound()?;
        let w = bound.clone();
        Ok(LocalInfluence::new(move |x| Ok(&w * p.efficient_score(&md.score(x, &th)?)), bound))
    }))
}

/// The efficient score `l*_1` with covariance `I_{11.2}`.
pub fn efficient_score(model: Arc<dyn ParametricModel>, m: usize) -> Result<InfluenceFunction> {
    check_interest_dim(model.as_ref(), m)?;
    if m == model.dim() {
        return Err(Error::domain("the efficient score needs at least one nuisance coordinate"));
    }
    Ok(InfluenceFunction::new(InfluenceKind::EfficientScore, m, move |theta| {
        let p = partition(&model.fisher(theta)?, m)?;
        let cov = p.i11_2().clone();
        let (md, th) = (model.clone(), theta.to_vec());
        Ok(LocalInfluence::new(move |x| Ok(p.efficient_score(&md.score(x, &th)?)), cov))
    }))
}

/// Efficient influence for the centre of a symmetric location family with
/// unknown shape: `-g'/g(x - theta) / I(g)`, the same as with `g` known.
pub fn semiparametric_influence_symmetric_location(g: LocationFamily) -> Result<InfluenceFunction> {
    if !g.is_symmetric() {
        return Err(Error::domain(format!(
            "{} is not symmetric; the symmetric location model does not apply",
            g.name()
        )));
    }
    let info = g.fisher_location();
    Ok(InfluenceFunction::new(InfluenceKind::Semiparametric, 1, move |theta| {
        if theta.len() != 1 {
            return Err(Error::domain("location parameter is scalar"));
        }
        let (g, t) = (g.clone(), theta[0]);
        Ok(LocalInfluence::new(
            move |x| Ok(Vector::from_element(1, g.score(x.y - t) / info)),
            Matrix::from_element(1, 1, 1.0 / info),
        ))
    }))
}

/// Efficient influence for the slope in linear regression with unknown error
/// density: `(I(g) E ZZ')^{-1} z (-g'/g)(y - nu'z)`.
pub fn linear_regression_influence(model: LinearRegressionModel) -> InfluenceFunction {
    let dim = model.dim();
    let model = Arc::new(model);
    InfluenceFunction::new(InfluenceKind::Semiparametric, dim, move |theta| {
        let inv = spd_inverse(&model.fisher(theta)?)?;
        let w = inv.clone();
        let (md, th) = (model.clone(), theta.to_vec());
        Ok(LocalInfluence::new(move |x| Ok(&w * md.score(x, &th)?), inv))
    })
}

/// Bound `(1 - rho^2)^2` for the correlation of a bivariate normal with
/// unknown means and variances.
pub fn correlation_bound(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(format!("correlation must satisfy |rho| < 1, got {rho}")));
    }
    Ok((1.0 - rho * rho).powi(2))
}

/// `(b' q' a)^2 / (b' I b)`, the information a direction `b` captures.
pub fn direction_value(info: &Matrix, q_grad: &Matrix, a: &Vector, b: &Vector) -> f64 {
    let qa = q_grad.transpose() * a;
    b.dot(&qa).powi(2) / b.dot(&(info * b))
}

/// The direction `b = I^{-1} q' a` maximizing [`direction_value`], with the
/// attained value `a' q I^{-1} q' a`. `q_grad` is the `m x k` Jacobian of the
/// target.
pub fn optimal_direction_b(info: &Matrix, q_grad: &Matrix, a: &Vector) -> Result<(Vector, f64)> {
    if q_grad.ncols() != info.nrows() || q_grad.nrows() != a.len() {
        return Err(Error::domain("shapes of I, q' and a do not agree"));
    }
    let qa = q_grad.transpose() * a;
    if qa.iter().all(|v| *v == 0.0) {
        return Err(Error::domain("q' a vanishes"));
    }
    let b = crate::numerics::linalg::solve_spd(info, &qa)?;
    let value = qa.dot(&b);
    Ok((b, value))
}

/// Restricted versus full bound for one model and parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub model: String,
    pub theta: Vec<f64>,
    pub restricted_bound: Vec<Vec<f64>>,
    pub full_bound: Vec<Vec<f64>>,
    pub loss: Vec<Vec<f64>>,
    pub loss_trace_ratio: f64,
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Compares the bounds for the leading `m` coordinates at `theta`.
pub fn compare_bounds(model: &dyn ParametricModel, theta: &[f64], m: usize) -> Result<BoundComparison> {
    let info = model.fisher(theta)?;
    if !is_symmetric(&info, 1e-12) {
        return Err(Error::Singular("Fisher matrix is not symmetric".into()));
    }
    let p = partition(&info, m)?;
    Ok(BoundComparison {
        model: model.name(),
        theta: theta.to_vec(),
        restricted_bound: rows(&p.restricted_bound()),
        full_bound: rows(&p.full_bound()?),
        loss: rows(&p.information_loss()?),
        loss_trace_ratio: p.loss_trace_ratio()?,
    })
}
