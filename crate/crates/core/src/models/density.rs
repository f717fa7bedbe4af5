//! Error densities for location families.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_real_line;
use crate::numerics::rng::RngStream;
use crate::numerics::stats::normal_cdf;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A univariate error density `g` together with its location score `-g'/g`.
pub trait ErrorDensity: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn log_density(&self, e: f64) -> f64;
    /// `-g'(e)/g(e)`.
    fn score(&self, e: f64) -> f64;
    fn cdf(&self, e: f64) -> f64;
    fn sample(&self, rng: &mut RngStream) -> f64;
    fn mean(&self) -> f64 {
        0.0
    }
    fn variance(&self) -> f64;
    fn is_symmetric(&self) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normal {
    pub sd: f64,
}

impl ErrorDensity for Normal {
    fn name(&self) -> &'static str {
        "normal"
    }
    fn log_density(&self, e: f64) -> f64 {
        let z = e / self.sd;
        -0.5 * (2.0 * PI).ln() - self.sd.ln() - 0.5 * z * z
    }
    fn score(&self, e: f64) -> f64 {
        e / (self.sd * self.sd)
    }
    fn cdf(&self, e: f64) -> f64 {
        normal_cdf(e / self.sd)
    }
    fn sample(&self, rng: &mut RngStream) -> f64 {
        self.sd * rng.standard_normal()
    }
    fn variance(&self) -> f64 {
        self.sd * self.sd
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Density `exp(-|e|/b) / (2b)`. The score at the kink is taken to be 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Laplace {
    pub scale: f64,
}

impl ErrorDensity for Laplace {
    fn name(&self) -> &'static str {
        "laplace"
    }
    fn log_density(&self, e: f64) -> f64 {
        -(2.0 * self.scale).ln() - e.abs() / self.scale
    }
    fn score(&self, e: f64) -> f64 {
        if e > 0.0 {
            1.0 / self.scale
        } else if e < 0.0 {
            -1.0 / self.scale
        } else {
            0.0
        }
    }
    fn cdf(&self, e: f64) -> f64 {
        if e < 0.0 {
            0.5 * (e / self.scale).exp()
        } else {
            1.0 - 0.5 * (-e / self.scale).exp()
        }
    }
    fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.open01() - 0.5;
        -self.scale * u.signum() * (-2.0 * u.abs()).ln_1p()
    }
    fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Logistic {
    pub scale: f64,
}

impl ErrorDensity for Logistic {
    fn name(&self) -> &'static str {
        "logistic"
    }
    fn log_density(&self, e: f64) -> f64 {
        let z = (e / self.scale).abs();
        -z - self.scale.ln() - 2.0 * (-z).exp().ln_1p()
    }
    fn score(&self, e: f64) -> f64 {
        (0.5 * e / self.scale).tanh() / self.scale
    }
    fn cdf(&self, e: f64) -> f64 {
        1.0 / (1.0 + (-e / self.scale).exp())
    }
    fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.open01();
        self.scale * (u / (1.0 - u)).ln()
    }
    fn variance(&self) -> f64 {
        PI * PI * self.scale * self.scale / 3.0
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Gumbel (maximum) law shifted to mean zero; an asymmetric error law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gumbel {
    pub scale: f64,
}

impl Gumbel {
    fn standardized(&self, e: f64) -> f64 {
        e / self.scale + EULER_GAMMA
    }
}

impl ErrorDensity for Gumbel {
    fn name(&self) -> &'static str {
        "gumbel"
    }
    fn log_density(&self, e: f64) -> f64 {
        let z = self.standardized(e);
        -self.scale.ln() - z - (-z).exp()
    }
    fn score(&self, e: f64) -> f64 {
        (1.0 - (-self.standardized(e)).exp()) / self.scale
    }
    fn cdf(&self, e: f64) -> f64 {
        (-(-self.standardized(e)).exp()).exp()
    }
    fn sample(&self, rng: &mut RngStream) -> f64 {
        self.scale * (-(-rng.open01().ln()).ln() - EULER_GAMMA)
    }
    fn variance(&self) -> f64 {
        PI * PI * self.scale * self.scale / 6.0
    }
    fn is_symmetric(&self) -> bool {
        false
    }
}

/// An error density with its location Fisher information `int (g'/g)^2 g`,
/// obtained by quadrature.
#[derive(Clone, Debug)]
pub struct LocationFamily {
    g: Arc<dyn ErrorDensity>,
    fisher_location: f64,
}

impl LocationFamily {
    pub fn new(g: impl ErrorDensity + 'static) -> Result<Self> {
        let g: Arc<dyn ErrorDensity> = Arc::new(g);
        let gg = g.clone();
        let fisher_location = integrate_real_line(
            move |e| {
                let s = gg.score(e);
                let p = gg.log_density(e).exp();
                if p == 0.0 {
                    0.0
                } else {
                    s * s * p
                }
            },
            1e-11,
        )?;
        if !(fisher_location > 0.0) || !fisher_location.is_finite() {
            return Err(Error::domain(format!(
                "location Fisher information of {} is {fisher_location}",
                g.name()
            )));
        }
        Ok(Self { g, fisher_location })
    }

    pub fn normal() -> Self {
        Self::new(Normal { sd: 1.0 }).expect("standard normal is regular")
    }

    /// Laplace with scale 1 (variance 2).
    pub fn laplace() -> Self {
        Self::new(Laplace { scale: 1.0 }).expect("Laplace is regular")
    }

    /// Laplace rescaled to unit variance (scale `1/sqrt 2`).
    pub fn laplace_unit_variance() -> Self {
        Self::new(Laplace {
            scale: std::f64::consts::FRAC_1_SQRT_2,
        })
        .expect("Laplace is regular")
    }

    pub fn logistic() -> Self {
        Self::new(Logistic { scale: 1.0 }).expect("logistic is regular")
    }

    pub fn gumbel() -> Self {
        Self::new(Gumbel { scale: 1.0 }).expect("Gumbel is regular")
    }

    /// Lookup by the names used in configs: `normal`, `laplace`,
    /// `laplace-unit`, `logistic`, `gumbel`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "normal" => Ok(Self::normal()),
            "laplace" => Ok(Self::laplace()),
            "laplace-unit" => Ok(Self::laplace_unit_variance()),
            "logistic" => Ok(Self::logistic()),
            "gumbel" => Ok(Self::gumbel()),
            other => Err(Error::Config(format!("unknown error density '{other}'"))),
        }
    }

    pub fn density(&self) -> &dyn ErrorDensity {
        &*self.g
    }

    pub fn name(&self) -> &'static str {
        self.g.name()
    }

    pub fn fisher_location(&self) -> f64 {
        self.fisher_location
    }

    pub fn score(&self, e: f64) -> f64 {
        self.g.score(e)
    }

    pub fn log_density(&self, e: f64) -> f64 {
        self.g.log_density(e)
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.g.sample(rng)
    }

    pub fn variance(&self) -> f64 {
        self.g.variance()
    }

    pub fn is_symmetric(&self) -> bool {
        self.g.is_symmetric()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stats::{kolmogorov_pvalue, ks_one_sample, mean, variance};

    fn all() -> Vec<LocationFamily> {
        vec![
            LocationFamily::normal(),
            LocationFamily::laplace(),
            LocationFamily::laplace_unit_variance(),
            LocationFamily::logistic(),
            LocationFamily::gumbel(),
        ]
    }

    #[test]
    fn fisher_information_closed_forms() {
        assert!((LocationFamily::normal().fisher_location() - 1.0).abs() < 1e-9);
        assert!((LocationFamily::laplace().fisher_location() - 1.0).abs() < 1e-9);
        assert!((LocationFamily::laplace_unit_variance().fisher_location() - 2.0).abs() < 1e-9);
        assert!((LocationFamily::logistic().fisher_location() - 1.0 / 3.0).abs() < 1e-9);
        assert!((LocationFamily::gumbel().fisher_location() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn score_is_minus_log_density_derivative() {
        let h = 1e-5;
        for f in all() {
            for e in [-2.3, -0.7, 0.4, 1.9] {
                let fd = -(f.log_density(e + h) - f.log_density(e - h)) / (2.0 * h);
                assert!((fd - f.score(e)).abs() < 1e-6, "{} at {e}", f.name());
            }
        }
    }

    #[test]
    fn densities_integrate_to_one_with_stated_moments() {
        for f in all() {
            let g = f.density();
            let mass = integrate_real_line(|e| g.log_density(e).exp(), 1e-11).unwrap();
            let m1 = integrate_real_line(|e| e * g.log_density(e).exp(), 1e-11).unwrap();
            let m2 = integrate_real_line(|e| e * e * g.log_density(e).exp(), 1e-11).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "{}", f.name());
            assert!(m1.abs() < 1e-8, "{} mean {m1}", f.name());
            assert!((m2 - f.variance()).abs() < 1e-7, "{}", f.name());
        }
    }

    #[test]
    fn samplers_match_cdfs() {
        for (i, f) in all().into_iter().enumerate() {
            let mut rng = RngStream::new(20261018, i as u64);
            let xs: Vec<f64> = (0..20_000).map(|_| f.sample(&mut rng)).collect();
            let d = ks_one_sample(&xs, |e| f.density().cdf(e));
            assert!(kolmogorov_pvalue(d, xs.len()) > 0.001, "{}", f.name());
            assert!(mean(&xs).abs() < 5.0 * (f.variance() / 2e4).sqrt());
            assert!((variance(&xs) / f.variance() - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn laplace_kink_score_is_zero() {
        assert_eq!(LocationFamily::laplace().score(0.0), 0.0);
    }

    #[test]
    fn unknown_density_name() {
        assert!(matches!(LocationFamily::by_name("cauchy"), Err(Error::Config(_))));
    }
}
