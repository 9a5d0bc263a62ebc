//! Random inputs honouring theorem hypotheses by rejection sampling.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::blaschke::{random_blaschke, BlaschkeProduct};
use crate::error::{LabError, Result};

/// Attempts per generator before a trial is skipped.
pub const MAX_TRIES: usize = 100;

/// Minimum pseudo-hyperbolic distance between zeros of factors declared
/// coprime.
pub const COPRIME_SEPARATION: f64 = 0.1;

/// Why a trial did not produce a verdict.
#[derive(Debug)]
pub(crate) enum ArmError {
    Skip(String),
    Lab(LabError),
}

impl From<LabError> for ArmError {
    fn from(e: LabError) -> Self {
        ArmError::Lab(e)
    }
}

pub(crate) type ArmResult<T> = std::result::Result<T, ArmError>;

pub fn pseudo_hyperbolic(a: Complex64, b: Complex64) -> f64 {
    ((a - b) / (Complex64::new(1.0, 0.0) - a.conj() * b)).norm()
}

/// Every zero of `a` is at pseudo-hyperbolic distance ≥ `sep` from every
/// zero of `b`.
pub fn separated(a: &BlaschkeProduct, b: &BlaschkeProduct, sep: f64) -> bool {
    a.zeros().iter().all(|&x| b.zeros().iter().all(|&y| pseudo_hyperbolic(x, y) >= sep))
}

pub(crate) struct Gen<'a> {
    pub rng: &'a mut ChaCha8Rng,
    radius: f64,
    max_theta: usize,
    max_uv: usize,
    pub rejections: usize,
}

impl<'a> Gen<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng, radius: f64, max_theta: usize, max_uv: usize) -> Self {
        Self { rng, radius, max_theta, max_uv, rejections: 0 }
    }

    pub fn max_uv(&self) -> usize {
        self.max_uv
    }

    /// Runs `draw` until it returns a value; `Err(predicate)` names the
    /// violated hypothesis and triggers a redraw.
    pub fn retry<T>(
        &mut self,
        mut draw: impl FnMut(&mut Self) -> ArmResult<std::result::Result<T, &'static str>>,
    ) -> ArmResult<T> {
        let mut last = "";
        for _ in 0..MAX_TRIES {
            match draw(self)? {
                Ok(v) => return Ok(v),
                Err(p) => {
                    self.rejections += 1;
                    last = p;
                }
            }
        }
        Err(ArmError::Skip(format!("hypothesis `{last}` failed {MAX_TRIES} times")))
    }

    pub fn blaschke(&mut self, min_degree: usize, max_degree: usize) -> Result<BlaschkeProduct> {
        if min_degree > max_degree {
            return Err(LabError::InvalidConfig(format!("degree range {min_degree}..={max_degree} is empty")));
        }
        let d = self.rng.random_range(min_degree..=max_degree);
        random_blaschke(d, self.radius, self.rng)
    }

    pub fn theta(&mut self, min_degree: usize) -> Result<BlaschkeProduct> {
        self.blaschke(min_degree, self.max_theta)
    }

    /// `u` or `v` factor of a symbol.
    pub fn factor(&mut self, min_degree: usize) -> Result<BlaschkeProduct> {
        self.blaschke(min_degree, self.max_uv)
    }

    pub fn unimodular(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.rng.random::<f64>())
    }

    pub fn disk_point(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.rng.random::<f64>().sqrt();
        Complex64::from_polar(r, 2.0 * std::f64::consts::PI * self.rng.random::<f64>())
    }

    /// A random sub-multiset of the zeros of `theta`: nonempty, and a proper
    /// subset when `proper` is set. `None` if no such subset exists.
    pub fn divisor(&mut self, theta: &BlaschkeProduct, proper: bool) -> Option<BlaschkeProduct> {
        let n = theta.degree();
        let hi = if proper { n.checked_sub(1)? } else { n };
        if hi == 0 {
            return None;
        }
        let k = self.rng.random_range(1..=hi);
        let mut idx = sample(self.rng, n, k).into_vec();
        idx.sort_unstable();
        let zeros = idx.into_iter().map(|i| theta.zeros()[i]).collect();
        BlaschkeProduct::from_zeros(zeros).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn divisors_are_sub_multisets() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = Gen::new(&mut rng, 0.8, 4, 3);
        let theta = g.theta(3).unwrap();
        for _ in 0..20 {
            let d = g.divisor(&theta, true).unwrap();
            assert!(d.degree() >= 1 && d.degree() < theta.degree());
            assert!(crate::blaschke::divides(&d, &theta, 1e-12));
        }
        assert!(g.divisor(&BlaschkeProduct::monomial(1), true).is_none());
        assert!(g.divisor(&BlaschkeProduct::monomial(1), false).is_some());
    }

    #[test]
    fn retry_reports_the_violated_predicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = Gen::new(&mut rng, 0.8, 4, 3);
        let r: ArmResult<()> = g.retry(|_| Ok(Err("never")));
        match r {
            Err(ArmError::Skip(msg)) => assert!(msg.contains("never")),
            _ => panic!("expected a skip"),
        }
        assert_eq!(g.rejections, MAX_TRIES);
    }

    #[test]
    fn pseudo_hyperbolic_distance() {
        let z = Complex64::new(0.0, 0.0);
        assert!((pseudo_hyperbolic(z, Complex64::new(0.5, 0.0)) - 0.5).abs() < 1e-15);
        assert_eq!(pseudo_hyperbolic(Complex64::new(0.3, 0.1), Complex64::new(0.3, 0.1)), 0.0);
    }
}
