//! Gibbs measures of locally constant potentials: pressure, normalized
//! Jacobians, exact cylinder probabilities, entropy and relative entropy
//! rates.
//!
//! A range-`k` potential is recoded onto the context graph of range
//! `max(k, 2)`, where the transfer operator becomes a nonnegative matrix on
//! `(k-1)`-contexts. Its Perron root gives the pressure; its eigenfunction
//! normalizes the potential into a Jacobian whose Gibbs measure is a
//! `(k-1)`-step Markov measure.

mod gibbs;
mod pair;
pub mod perron;

pub use gibbs::{
    birkhoff_integral, entropy_rate, normalize_potential, pressure, relative_entropy_rate,
    FiniteRangePotential, GibbsModel, NORMALIZATION_TOLERANCE,
};
pub use pair::{ModelPair, DISTINCTNESS_TOLERANCE};

use crate::error::Result;
use crate::symbolic::{LocalTable, SubshiftSpec};

/// Bernoulli measure with the given symbol probabilities on the full shift.
pub fn bernoulli(probabilities: &[f64]) -> Result<GibbsModel> {
    let spec = SubshiftSpec::full_shift(probabilities.len())?;
    let table = LocalTable::from_fn(&spec, 1, |w| probabilities[w[0]].ln())?;
    GibbsModel::from_log_jacobian(spec, &table)
}

/// Gibbs model of an arbitrary potential table on `spec`.
pub fn gibbs_from_potential(spec: &SubshiftSpec, log_values: LocalTable) -> Result<GibbsModel> {
    normalize_potential(&FiniteRangePotential::new(spec.clone(), log_values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{enumerate_cylinders, Word, DEFAULT_ENUMERATION_BUDGET};

    const PHI: f64 = 1.618_033_988_749_895;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn pressure_of_zero_potential() {
        let full = FiniteRangePotential::zero(SubshiftSpec::full_shift(2).unwrap());
        assert!((pressure(&full).unwrap() - 2f64.ln()).abs() < 1e-14);
        let golden = FiniteRangePotential::zero(SubshiftSpec::golden_mean());
        assert!((pressure(&golden).unwrap() - PHI.ln()).abs() < 1e-14);
    }

    #[test]
    fn pressure_of_normalized_jacobian_is_zero() {
        let spec = SubshiftSpec::full_shift(2).unwrap();
        let pot = FiniteRangePotential::new(spec.clone(), LocalTable::constant(&spec, 1, 0.5f64.ln()).unwrap()).unwrap();
        assert!(pressure(&pot).unwrap().abs() < 1e-15);
    }

    #[test]
    fn normalizing_a_normalized_table_is_a_fixed_point() {
        let spec = SubshiftSpec::full_shift(2).unwrap();
        let t = LocalTable::from_fn(&spec, 2, |w| match (w[0], w[1]) {
            (0, 0) => 0.7f64.ln(),
            (1, 0) => 0.3f64.ln(),
            (0, 1) => 0.2f64.ln(),
            _ => 0.8f64.ln(),
        })
        .unwrap();
        let m = gibbs_from_potential(&spec, t.clone()).unwrap();
        assert!(m.pressure_of_potential().abs() < 1e-14);
        for (a, b) in t.entries().map(|(_, v)| v).zip(m.log_jacobian()) {
            assert!((a - b).abs() < 1e-13);
        }
        let h = m.eigenfunction();
        assert!((h[0] - h[1]).abs() < 1e-12);
        let again = gibbs_from_potential(&spec, m.log_jacobian_table()).unwrap();
        for (a, b) in again.log_jacobian().iter().zip(m.log_jacobian()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_potential_on_full_shift_gives_half() {
        let m = normalize_potential(&FiniteRangePotential::zero(SubshiftSpec::full_shift(2).unwrap())).unwrap();
        for lj in m.log_jacobian() {
            assert!((lj.exp() - 0.5).abs() < 1e-15);
        }
        assert!((m.pressure_of_potential() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn parry_measure_on_golden_mean() {
        let m = normalize_potential(&FiniteRangePotential::zero(SubshiftSpec::golden_mean())).unwrap();
        // edges 1-1, 1-2, 2-1
        let j: Vec<f64> = m.log_jacobian().iter().map(|l| l.exp()).collect();
        assert!((j[0] - 1.0 / PHI).abs() < 1e-13);
        assert!((j[1] - 1.0).abs() < 1e-13);
        assert!((j[2] - 1.0 / (PHI * PHI)).abs() < 1e-13);
        assert_eq!(m.cylinder_probability(&w("2-2")), 0.0);
        assert!((entropy_rate(&m) - PHI.ln()).abs() < 1e-13);
        let s: f64 = m.stationary_context_weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
        let nu: f64 = m.eigenmeasure().iter().sum();
        assert!((nu - 1.0).abs() < 1e-14);
        let dot: f64 = m.eigenmeasure().iter().zip(m.eigenfunction()).map(|(a, b)| a * b).sum();
        assert!((dot - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_cylinders_and_entropy() {
        let b = bernoulli(&[0.75, 0.25]).unwrap();
        assert!((b.cylinder_probability(&w("1-1")) - 9.0 / 16.0).abs() < 1e-15);
        let marg: f64 = [w("1"), w("2")].iter().map(|x| b.cylinder_probability(x)).sum();
        assert!((marg - 1.0).abs() < 1e-15);
        assert!((entropy_rate(&b) - 0.562_335_144_618_808_3).abs() < 1e-14);
        assert!((entropy_rate(&bernoulli(&[0.5, 0.5]).unwrap()) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_relative_entropy() {
        let p = bernoulli(&[0.75, 0.25]).unwrap();
        let q = bernoulli(&[0.5, 0.5]).unwrap();
        let kl_pq = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        let kl_qp = 0.5 * (2.0f64 / 3.0).ln() + 0.5 * 2f64.ln();
        assert!((relative_entropy_rate(&p, &q).unwrap() - kl_pq).abs() < 1e-15);
        assert!((relative_entropy_rate(&q, &p).unwrap() - kl_qp).abs() < 1e-15);
        assert_eq!(relative_entropy_rate(&p, &p).unwrap(), 0.0);
        let g = normalize_potential(&FiniteRangePotential::zero(SubshiftSpec::golden_mean())).unwrap();
        assert_eq!(relative_entropy_rate(&p, &g).unwrap_err(), crate::Error::SpecMismatch);
    }

    #[test]
    fn birkhoff_integrals() {
        let spec = SubshiftSpec::full_shift(2).unwrap();
        let p0 = bernoulli(&[0.5, 0.5]).unwrap();
        let p1 = bernoulli(&[0.75, 0.25]).unwrap();
        let c = LocalTable::constant(&spec, 3, 1.25).unwrap();
        assert!((birkhoff_integral(&p1, &c).unwrap() - 1.25).abs() < 1e-15);
        let ind = LocalTable::from_fn(&spec, 1, |w| (w[0] == 0) as u8 as f64).unwrap();
        assert!((birkhoff_integral(&p1, &ind).unwrap() - 0.75).abs() < 1e-15);
        let pair = ModelPair::new(p0.clone(), p1).unwrap();
        let dir = LocalTable::from_fn(&spec, 1, |w| [1.5f64.ln(), 0.5f64.ln()][w[0]]).unwrap();
        let v = birkhoff_integral(pair.h0(), &dir).unwrap();
        assert!((v + 0.143_841_036_225_890_45).abs() < 1e-15);
    }

    #[test]
    fn bowen_formula_and_consistency_on_random_markov_model() {
        let spec = SubshiftSpec::new(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]).unwrap();
        let vals = [0.3, -1.2, 0.8, 0.1, -0.4, 2.0, 0.0, 0.5, -0.9, 0.33, 1.1, -0.2];
        let t = LocalTable::from_fn(&spec, 3, |w| vals[(w[0] * 9 + w[1] * 3 + w[2]) % vals.len()]).unwrap();
        let m = gibbs_from_potential(&spec, t).unwrap();
        let bowen = entropy_rate(&m) + birkhoff_integral(&m, &m.log_jacobian_table()).unwrap();
        assert!(bowen.abs() < 1e-12);
        for n in 0..6 {
            for word in enumerate_cylinders(&spec, n, DEFAULT_ENUMERATION_BUDGET).unwrap() {
                let s = word.symbols();
                let p = m.log_cylinder_probability(s).exp();
                let right: f64 = (0..3)
                    .map(|a| {
                        let mut x = s.to_vec();
                        x.push(a);
                        m.log_cylinder_probability(&x).exp()
                    })
                    .sum();
                let left: f64 = (0..3)
                    .map(|a| {
                        let mut x = vec![a];
                        x.extend_from_slice(s);
                        m.log_cylinder_probability(&x).exp()
                    })
                    .sum();
                assert!((right - p).abs() < 1e-12, "right extension of {word}");
                assert!((left - p).abs() < 1e-12, "left extension of {word}");
            }
        }
    }

    #[test]
    fn lift_preserves_cylinders() {
        let spec = SubshiftSpec::golden_mean();
        let t = LocalTable::from_fn(&spec, 2, |w| (w[0] as f64) - 0.3 * w[1] as f64).unwrap();
        let m = gibbs_from_potential(&spec, t).unwrap();
        let l = m.lift(4).unwrap();
        for word in enumerate_cylinders(&spec, 5, DEFAULT_ENUMERATION_BUDGET).unwrap() {
            let a = m.log_cylinder_probability(word.symbols());
            let b = l.log_cylinder_probability(word.symbols());
            assert!((a - b).abs() < 1e-12);
        }
        assert!((l.log_cylinder_probability(&[0]) - m.log_cylinder_probability(&[0])).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_table_is_rejected_as_jacobian() {
        let spec = SubshiftSpec::full_shift(2).unwrap();
        let t = LocalTable::constant(&spec, 1, 0.0).unwrap();
        assert!(GibbsModel::from_log_jacobian(spec, &t).is_err());
    }

    #[test]
    fn identical_models_are_rejected() {
        let p = bernoulli(&[0.5, 0.5]).unwrap();
        assert_eq!(ModelPair::new(p.clone(), p.clone()).unwrap_err(), crate::Error::IdenticalModels);
        assert!(ModelPair::new_unchecked(p.clone(), p).is_ok());
    }

    #[test]
    fn log_likelihood_ratio_examples() {
        let pair = ModelPair::new(bernoulli(&[0.5, 0.5]).unwrap(), bernoulli(&[0.75, 0.25]).unwrap()).unwrap();
        assert!((pair.log_likelihood_ratio(&w("1-1")).unwrap() - 2.25f64.ln()).abs() < 1e-15);
        assert!((pair.log_likelihood_ratio(&w("2-2")).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    }
}
