//! Score statistics and the general weighted score.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::quantile::QuantileFn;
use crate::numerics::rng::RngStream;
use crate::numerics::stats;

type Sampler = Arc<dyn Fn(&mut RngStream) -> Result<f64> + Send + Sync>;

/// The law of a scalar score statistic `S`: always samplable, optionally with
/// a known quantile function and absolute moments.
#[derive(Clone)]
pub struct ScoreStatistic {
    draw: Sampler,
    quantile: Option<QuantileFn>,
    abs_moment: Option<f64>,
    second_moment: Option<f64>,
}

impl fmt::Debug for ScoreStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoreStatistic")
            .field("analytic_quantile", &self.quantile.is_some())
            .field("abs_moment", &self.abs_moment)
            .field("second_moment", &self.second_moment)
            .finish()
    }
}

impl ScoreStatistic {
    pub fn from_sampler(draw: impl Fn(&mut RngStream) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            draw: Arc::new(draw),
            quantile: None,
            abs_moment: None,
            second_moment: None,
        }
    }

    /// A statistic given by its quantile function, sampled by inversion.
    pub fn from_quantile(q: QuantileFn) -> Self {
        let qq = q.clone();
        Self::from_sampler(move |rng| Ok(qq.eval(rng.open01()))).with_quantile(q)
    }

    pub fn with_quantile(mut self, q: QuantileFn) -> Self {
        self.quantile = Some(q);
        self
    }

    pub fn with_moments(mut self, abs_moment: f64, second_moment: f64) -> Self {
        self.abs_moment = Some(abs_moment);
        self.second_moment = Some(second_moment);
        self
    }

    /// `S ~ N(0, variance)`.
    pub fn normal(variance: f64) -> Self {
        let sd = variance.sqrt();
        Self::from_quantile(QuantileFn::normal(0.0, sd))
            .with_moments(sd * (2.0 / std::f64::consts::PI).sqrt(), variance)
    }

    /// Centred Laplace with scale `b`.
    pub fn laplace(b: f64) -> Self {
        let q = QuantileFn::new(move |u: f64| {
            if u < 0.5 {
                b * (2.0 * u).ln()
            } else {
                -b * (2.0 * (1.0 - u)).ln()
            }
        });
        Self::from_quantile(q).with_moments(b, 2.0 * b * b)
    }

    pub fn draw(&self, rng: &mut RngStream) -> Result<f64> {
        (self.draw)(rng)
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    pub fn quantile(&self) -> Option<&QuantileFn> {
        self.quantile.as_ref()
    }

    pub fn abs_moment(&self) -> Option<f64> {
        self.abs_moment
    }

    pub fn second_moment(&self) -> Option<f64> {
        self.second_moment
    }

    /// `(E|S|, E S^2)`, from the known values or from `n` draws.
    pub fn moments(&self, n: usize, rng: &mut RngStream) -> Result<(f64, f64)> {
        if let (Some(a), Some(b)) = (self.abs_moment, self.second_moment) {
            return Ok((a, b));
        }
        let draws = self.sample(n, rng)?;
        let abs: Vec<f64> = draws.iter().map(|s| s.abs()).collect();
        let sq: Vec<f64> = draws.iter().map(|s| s * s).collect();
        Ok((
            self.abs_moment.unwrap_or_else(|| stats::mean(&abs)),
            self.second_moment.unwrap_or_else(|| stats::mean(&sq)),
        ))
    }
}

type JacobianFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;
type HessiansFn = Arc<dyn Fn(&[f64]) -> Vec<Matrix> + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vector + Send + Sync>;

/// Target `a' q(theta)` estimated along direction `b` under a weight `w` on
/// the parameter space.
#[derive(Clone)]
pub struct WeightedParametrization {
    a: Vector,
    b: Vector,
    q_jacobian: JacobianFn,
    q_hessians: HessiansFn,
    log_weight_gradient: GradientFn,
}

impl fmt::Debug for WeightedParametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedParametrization")
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

impl WeightedParametrization {
    /// `q` maps `R^k -> R^m`; `q_jacobian` returns the `m x k` Jacobian and
    /// `q_hessians` the `m` Hessians (`k x k`). `log_weight_gradient` is `w'/w`.
    pub fn new(
        a: Vector,
        b: Vector,
        q_jacobian: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
        q_hessians: impl Fn(&[f64]) -> Vec<Matrix> + Send + Sync + 'static,
        log_weight_gradient: impl Fn(&[f64]) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            a,
            b,
            q_jacobian: Arc::new(q_jacobian),
            q_hessians: Arc::new(q_hessians),
            log_weight_gradient: Arc::new(log_weight_gradient),
        }
    }

    /// `q` the identity on `R^k`, target the coordinate `coord`, `b = a`.
    pub fn coordinate(
        k: usize,
        coord: usize,
        log_weight_gradient: impl Fn(&[f64]) -> Vector + Send + Sync + 'static,
    ) -> Self {
        let mut e = Vector::zeros(k);
        e[coord] = 1.0;
        Self::new(
            e.clone(),
            e,
            move |_| Matrix::identity(k, k),
            move |_| vec![Matrix::zeros(k, k); k],
            log_weight_gradient,
        )
    }

    pub fn with_direction(mut self, b: Vector) -> Self {
        self.b = b;
        self
    }

    pub fn a(&self) -> &Vector {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    /// The weighted score statistic at `theta` given the model score `score`.
    pub fn statistic(&self, score: &Vector, theta: &[f64]) -> Result<f64> {
        let k = theta.len();
        if score.len() != k || self.b.len() != k {
            return Err(Error::domain(format!(
                "dimension mismatch: theta has {k} entries, score {} and b {}",
                score.len(),
                self.b.len()
            )));
        }
        let jac = (self.q_jacobian)(theta);
        if jac.nrows() != self.a.len() || jac.ncols() != k {
            return Err(Error::domain("q Jacobian has the wrong shape"));
        }
        let qa = jac.transpose() * &self.a;
        let denom = self.b.dot(&qa);
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::domain(format!("b' q'(theta)' a vanishes at theta = {theta:?}")));
        }
        let mut curv = Matrix::zeros(k, k);
        for (h, hess) in (self.q_hessians)(theta).iter().enumerate() {
            curv += hess * self.a[h];
        }
        let wgrad = (self.log_weight_gradient)(theta);
        let linear = self.b.dot(&(score + wgrad));
        let quad = self.b.dot(&(&curv * &self.b));
        Ok((linear - quad / denom) / denom)
    }
}

/// The weighted score statistic as a random variable: `draw_joint` returns a
/// parameter drawn from the weight together with the model score of data drawn
/// at that parameter.
pub fn general_score_statistic(
    wp: WeightedParametrization,
    draw_joint: impl Fn(&mut RngStream) -> Result<(Vec<f64>, Vector)> + Send + Sync + 'static,
) -> ScoreStatistic {
    ScoreStatistic::from_sampler(move |rng| {
        let (theta, score) = draw_joint(rng)?;
        wp.statistic(&score, &theta)
    })
}
