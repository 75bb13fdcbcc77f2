//! Tilted pressure curves `f_i(t) = P(log J_i + t (log J_{i'} - log J_i))`,
//! their derivatives, the information functions `F_i(t) = t f_i'(t) - f_i(t)`,
//! the Birkhoff ranges of the log-likelihood direction and the Legendre
//! transform rate function.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, ExtendedReal};
use crate::symbolic::weighted_context_graph;
use crate::thermo::{GibbsModel, ModelPair};

/// Step of the central difference used for `f''`.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-4;
/// Bisection stops once the bracket in `t` is this narrow.
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const MAX_BISECTIONS: usize = 200;
/// Ranges narrower than this mean the direction is cohomologous to a
/// constant and every tilt is the same measure.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

const MAX_BRACKET_DOUBLINGS: usize = 60;
const CACHE_GRANULARITY: f64 = 1e15;

#[derive(Debug, Clone, Copy)]
struct TiltPoint {
    pressure: f64,
    derivative: f64,
}

/// The curve `t ↦ f_i(t)` for one model of a pair.
#[derive(Debug)]
pub struct TiltedFamily {
    pair: ModelPair,
    index: usize,
    direction: Vec<f64>,
    lower: f64,
    upper: f64,
    cache: Mutex<HashMap<i64, TiltPoint>>,
}

impl Clone for TiltedFamily {
    fn clone(&self) -> Self {
        TiltedFamily {
            pair: self.pair.clone(),
            index: self.index,
            direction: self.direction.clone(),
            lower: self.lower,
            upper: self.upper,
            cache: Mutex::new(self.cache.lock().expect("cache poisoned").clone()),
        }
    }
}

impl TiltedFamily {
    /// Family `i` of the pair: tilting `log J_i` towards `log J_{1-i}`.
    pub fn new(pair: &ModelPair, index: usize) -> Result<Self> {
        if index > 1 {
            return Err(Error::InvalidArgument(format!("family index {index} is not 0 or 1")));
        }
        let direction = pair.direction(index);
        let g = weighted_context_graph(pair.model(index).graph(), &direction);
        let lower = g.min_mean_cycle()?.value;
        let upper = g.max_mean_cycle()?.value;
        Ok(TiltedFamily { pair: pair.clone(), index, direction, lower, upper, cache: Mutex::new(HashMap::new()) })
    }

    pub fn pair(&self) -> &ModelPair {
        &self.pair
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `log J_{i'} - log J_i` per context-graph edge.
    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// `(Ā_i, A_i)`: extreme cycle means of the direction, bounding `f_i'`.
    pub fn birkhoff_range(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// True when the range has collapsed, so `f_i` is affine.
    pub fn is_degenerate(&self) -> bool {
        self.upper - self.lower < DEGENERACY_TOLERANCE
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegeneratePair { lower: self.lower, upper: self.upper })
        } else {
            Ok(())
        }
    }

    /// The normalized Gibbs model `m_{i,t}` of the tilted potential.
    pub fn tilted_model(&self, t: f64) -> Result<GibbsModel> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("tilt parameter {t} is not finite")));
        }
        let base = self.pair.model(self.index);
        let phi: Vec<f64> = base.log_jacobian().iter().zip(&self.direction).map(|(a, d)| a + t * d).collect();
        GibbsModel::from_edge_potential(base.spec().clone(), base.graph().clone(), &phi)
    }

    fn point(&self, t: f64) -> Result<TiltPoint> {
        let key = (t.abs() < 1e3).then(|| (t * CACHE_GRANULARITY).round() as i64);
        if let Some(k) = key {
            if let Some(p) = self.cache.lock().expect("cache poisoned").get(&k) {
                return Ok(*p);
            }
        }
        let m = self.tilted_model(t)?;
        let derivative = compensated_sum(m.edge_measure().iter().zip(&self.direction).map(|(a, b)| a * b));
        let p = TiltPoint { pressure: m.pressure_of_potential(), derivative };
        if let Some(k) = key {
            self.cache.lock().expect("cache poisoned").insert(k, p);
        }
        Ok(p)
    }

    /// `f_i(t)`.
    pub fn free_energy(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.pressure)
    }

    /// `f_i'(t) = ∫ (log J_{i'} - log J_i) dm_{i,t}`.
    pub fn free_energy_derivative(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.derivative)
    }

    /// `f_i''(t)` by a central difference of `f_i'`.
    pub fn free_energy_second_derivative(&self, t: f64) -> Result<f64> {
        let h = SECOND_DERIVATIVE_STEP;
        Ok((self.free_energy_derivative(t + h)? - self.free_energy_derivative(t - h)?) / (2.0 * h))
    }

    /// `F_i(t) = t f_i'(t) - f_i(t)`.
    pub fn information_function(&self, t: f64) -> Result<f64> {
        let p = self.point(t)?;
        Ok(t * p.derivative - p.pressure)
    }

    /// The `t` with `f_i'(t) = z`, for `z` strictly inside the range.
    pub fn solve_derivative(&self, z: f64) -> Result<f64> {
        if !(z > self.lower && z < self.upper) {
            return Err(Error::RootNotBracketed(format!(
                "f'(t) = {z} has no solution: range is ({}, {})",
                self.lower, self.upper
            )));
        }
        let (mut a, mut b) = (-1.0f64, 1.0f64);
        for _ in 0..MAX_BRACKET_DOUBLINGS {
            if self.free_energy_derivative(a)? <= z {
                break;
            }
            b = a;
            a *= 2.0;
        }
        for _ in 0..MAX_BRACKET_DOUBLINGS {
            if self.free_energy_derivative(b)? >= z {
                break;
            }
            a = b;
            b *= 2.0;
        }
        let (fa, fb) = (self.free_energy_derivative(a)?, self.free_energy_derivative(b)?);
        if !(fa <= z && z <= fb) {
            return Err(Error::RootNotBracketed(format!("f'(t) = {z} not bracketed within |t| <= {}", b.abs().max(a.abs()))));
        }
        for _ in 0..MAX_BISECTIONS {
            if b - a <= ROOT_TOLERANCE {
                break;
            }
            let mid = 0.5 * (a + b);
            if self.free_energy_derivative(mid)? < z {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    pub fn rate_function(&self) -> RateFunction<'_> {
        RateFunction { family: self }
    }
}

/// `I(z) = sup_t (t z - f_i(t))`, finite on the closed Birkhoff range.
#[derive(Debug, Clone, Copy)]
pub struct RateFunction<'a> {
    family: &'a TiltedFamily,
}

impl RateFunction<'_> {
    pub fn domain(&self) -> (f64, f64) {
        self.family.birkhoff_range()
    }

    pub fn rate(&self, z: f64) -> Result<ExtendedReal> {
        if !z.is_finite() {
            return Err(Error::InvalidArgument(format!("rate function argument {z} is not finite")));
        }
        let f = self.family;
        let (lo, hi) = f.birkhoff_range();
        if z < lo - DEGENERACY_TOLERANCE || z > hi + DEGENERACY_TOLERANCE {
            return Ok(ExtendedReal::PosInfinity);
        }
        if z >= hi - DEGENERACY_TOLERANCE {
            return self.endpoint_limit(z, 1.0).map(ExtendedReal::Finite);
        }
        if z <= lo + DEGENERACY_TOLERANCE {
            return self.endpoint_limit(z, -1.0).map(ExtendedReal::Finite);
        }
        let t = f.solve_derivative(z)?;
        Ok(ExtendedReal::Finite((t * z - f.free_energy(t)?).max(0.0)))
    }

    /// `lim t z - f(t)` as `t → ±∞`; the expression is monotone in `|t|`.
    fn endpoint_limit(&self, z: f64, sign: f64) -> Result<f64> {
        let g = |t: f64| -> Result<f64> { Ok(t * z - self.family.free_energy(t)?) };
        let mut t = sign;
        let mut prev = g(t)?;
        for _ in 0..MAX_BRACKET_DOUBLINGS {
            t *= 2.0;
            let next = g(t)?;
            if (next - prev).abs() < ROOT_TOLERANCE {
                return Ok(next.max(0.0));
            }
            prev = next;
        }
        Ok(prev.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::bernoulli;

    fn bernoulli_pair() -> ModelPair {
        ModelPair::new(bernoulli(&[0.5, 0.5]).unwrap(), bernoulli(&[0.75, 0.25]).unwrap()).unwrap()
    }

    fn closed_form(t: f64) -> f64 {
        (0.5f64.powf(1.0 - t) * (0.75f64.powf(t) + 0.25f64.powf(t))).ln()
    }

    #[test]
    fn bernoulli_free_energy() {
        let f = TiltedFamily::new(&bernoulli_pair(), 0).unwrap();
        assert!(f.free_energy(0.0).unwrap().abs() < 1e-15);
        assert!(f.free_energy(1.0).unwrap().abs() < 1e-15);
        let half = (0.75f64.sqrt() + 0.25f64.sqrt()).ln() - 0.5 * 2f64.ln();
        assert!((f.free_energy(0.5).unwrap() - half).abs() < 1e-14);
        for t in [-2.0, -0.7, 0.3, 1.9, 3.0] {
            assert!((f.free_energy(t).unwrap() - closed_form(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn bernoulli_derivatives() {
        let f = TiltedFamily::new(&bernoulli_pair(), 0).unwrap();
        assert!((f.free_energy_derivative(0.0).unwrap() + 0.143_841_036_225_890_45).abs() < 1e-14);
        assert!((f.free_energy_derivative(1.0).unwrap() - 0.130_812_035_941_136_97).abs() < 1e-14);
        let var = 0.25 * 3f64.ln().powi(2);
        assert!((f.free_energy_second_derivative(0.0).unwrap() - var).abs() < 1e-7);
        for t in [-1.0, 0.2, 0.9, 2.5] {
            let h = 1e-4;
            let second = (f.free_energy(t + h).unwrap() - 2.0 * f.free_energy(t).unwrap() + f.free_energy(t - h).unwrap()) / (h * h);
            assert!((f.free_energy_second_derivative(t).unwrap() - second).abs() < 1e-5);
        }
    }

    #[test]
    fn information_function_values() {
        let f = TiltedFamily::new(&bernoulli_pair(), 0).unwrap();
        assert_eq!(f.information_function(0.0).unwrap(), 0.0);
        assert!((f.information_function(1.0).unwrap() - 0.130_812_035_941_136_97).abs() < 1e-14);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=20 {
            let v = f.information_function(k as f64 * 0.1).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn birkhoff_ranges() {
        let pair = bernoulli_pair();
        let f0 = TiltedFamily::new(&pair, 0).unwrap();
        let f1 = TiltedFamily::new(&pair, 1).unwrap();
        let (lo, hi) = f0.birkhoff_range();
        assert!((lo + 2f64.ln()).abs() < 1e-15 && (hi - 1.5f64.ln()).abs() < 1e-15);
        let (lo1, hi1) = f1.birkhoff_range();
        assert!((lo1 + hi).abs() < 1e-15 && (hi1 + lo).abs() < 1e-15);
        assert!(!f0.is_degenerate());
    }

    #[test]
    fn zero_direction_is_degenerate() {
        let p = bernoulli(&[0.3, 0.7]).unwrap();
        let pair = ModelPair::new_unchecked(p.clone(), p).unwrap();
        let f = TiltedFamily::new(&pair, 0).unwrap();
        assert_eq!(f.birkhoff_range(), (0.0, 0.0));
        assert!(f.is_degenerate());
        for t in [-1.0, 0.0, 0.5, 2.0] {
            assert!(f.free_energy(t).unwrap().abs() < 1e-15);
            assert_eq!(f.free_energy_derivative(t).unwrap(), 0.0);
            assert_eq!(f.free_energy_second_derivative(t).unwrap(), 0.0);
        }
        assert!(f.require_nondegenerate().is_err());
    }

    #[test]
    fn symmetry_between_families() {
        let pair = bernoulli_pair();
        let f0 = TiltedFamily::new(&pair, 0).unwrap();
        let f1 = TiltedFamily::new(&pair, 1).unwrap();
        for k in 0..=10 {
            let t = -2.0 + 0.5 * k as f64;
            assert!((f0.free_energy(t).unwrap() - f1.free_energy(1.0 - t).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn rate_function_values() {
        let f = TiltedFamily::new(&bernoulli_pair(), 0).unwrap();
        let rf = f.rate_function();
        let mean = f.free_energy_derivative(0.0).unwrap();
        assert!(rf.rate(mean).unwrap().finite().unwrap().abs() < 1e-12);
        let z = f.free_energy_derivative(1.0).unwrap();
        assert!((rf.rate(z).unwrap().finite().unwrap() - z).abs() < 1e-11);
        assert_eq!(rf.rate(1.0).unwrap(), ExtendedReal::PosInfinity);
        assert_eq!(rf.rate(-1.0).unwrap(), ExtendedReal::PosInfinity);
        // at the upper endpoint only the all-ones word contributes: I = log 2
        assert!((rf.rate(1.5f64.ln()).unwrap().finite().unwrap() - 2f64.ln()).abs() < 1e-11);
        assert!((rf.rate(-(2f64.ln())).unwrap().finite().unwrap() - 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn solve_derivative_inverts() {
        let f = TiltedFamily::new(&bernoulli_pair(), 0).unwrap();
        for z in [-0.6, -0.1, 0.0, 0.2, 0.4] {
            let t = f.solve_derivative(z).unwrap();
            assert!((f.free_energy_derivative(t).unwrap() - z).abs() < 1e-11);
        }
        assert!(matches!(f.solve_derivative(0.5), Err(Error::RootNotBracketed(_))));
    }
}
