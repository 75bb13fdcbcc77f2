use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use gibbstest::asymptotics::minimax_exponent;
use gibbstest::hypothesis::{LikelihoodRatioProfile, Prior};
use gibbstest::sampling::OrbitSampler;
use gibbstest::symbolic::{enumerate_cylinders, LocalTable, SubshiftSpec, Word, DEFAULT_ENUMERATION_BUDGET};
use gibbstest::thermo::{bernoulli, gibbs_from_potential, GibbsModel, ModelPair};
use gibbstest::tilt::TiltedFamily;

const BUDGET: u128 = DEFAULT_ENUMERATION_BUDGET;

fn random_model(spec: &SubshiftSpec, range: usize, rng: &mut ChaCha20Rng) -> GibbsModel {
    let t = LocalTable::from_fn(spec, range, |_| 0.0).unwrap();
    let entries: Vec<(Word, f64)> = t.entries().map(|(w, _)| (w, rng.gen_range(-1.5..1.5))).collect();
    gibbs_from_potential(spec, LocalTable::from_entries(spec, range, entries).unwrap()).unwrap()
}

fn pair_strategy() -> impl Strategy<Value = ModelPair> {
    (0usize..3, 1usize..=2, 1usize..=2, any::<u64>()).prop_map(|(shape, k0, k1, seed)| {
        let spec = match shape {
            0 => SubshiftSpec::full_shift(2).unwrap(),
            1 => SubshiftSpec::golden_mean(),
            _ => SubshiftSpec::full_shift(3).unwrap(),
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = random_model(&spec, k0, &mut rng);
        let b = random_model(&spec, k1, &mut rng);
        ModelPair::new(a, b).unwrap()
    })
}

fn profile(pair: &ModelPair, n: usize) -> LikelihoodRatioProfile {
    LikelihoodRatioProfile::new(pair, n, BUDGET).unwrap()
}

fn power(p: &LikelihoodRatioProfile, alpha: f64) -> f64 {
    p.neyman_pearson(alpha).unwrap().beta
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn np_level_is_exact(pair in pair_strategy(), n in 0usize..6, alpha in 0.0f64..=1.0) {
        let p = profile(&pair, n);
        let t = p.neyman_pearson(alpha).unwrap();
        let r = p.errors(&t).unwrap();
        prop_assert!((r.type1 - alpha).abs() <= 1e-12, "type1 {} vs {alpha}", r.type1);
        prop_assert!((1.0 - r.type2 - t.beta).abs() <= 1e-12);
    }

    #[test]
    fn power_is_monotone_and_concave(pair in pair_strategy(), n in 0usize..6) {
        let p = profile(&pair, n);
        let grid: Vec<f64> = (0..=40).map(|k| power(&p, k as f64 / 40.0)).collect();
        for w in grid.windows(3) {
            prop_assert!(w[1] >= w[0] - 1e-12);
            prop_assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-12, "not concave: {w:?}");
        }
        prop_assert!((grid[40] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn minimax_beats_np_scan(pair in pair_strategy(), n in 0usize..6) {
        let p = profile(&pair, n);
        let m = p.errors(&p.minimax().unwrap()).unwrap();
        prop_assert!((m.type1 - m.type2).abs() <= 1e-12);
        let scan = (0..=1000)
            .map(|k| {
                let a = k as f64 / 1000.0;
                a.max(1.0 - power(&p, a))
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(m.minimax_risk <= scan + 1e-12);
        prop_assert!(m.minimax_risk >= scan - 1e-3);
    }

    #[test]
    fn bayes_beats_alpha_grid(pair in pair_strategy(), n in 0usize..6, pi0 in 0.05f64..0.95) {
        let prior = Prior::new(pi0, 1.0 - pi0).unwrap();
        let p = profile(&pair, n);
        let risk = p.errors(&p.bayes(&prior).unwrap()).unwrap().bayes_risk(&prior);
        for k in 0..=200 {
            let a = k as f64 / 200.0;
            prop_assert!(risk <= pi0 * a + (1.0 - pi0) * (1.0 - power(&p, a)) + 1e-12);
        }
    }

    #[test]
    fn word_level_errors_match_groups(pair in pair_strategy(), n in 0usize..6, alpha in 0.0f64..=1.0) {
        let p = profile(&pair, n);
        let t = p.neyman_pearson(alpha).unwrap();
        let r = p.errors(&t).unwrap();
        let (mut type1, mut accept1) = (0.0, 0.0);
        for w in p.words() {
            let phi = t.rejection_probability(w.log_ratio);
            type1 += w.mass0 * phi;
            accept1 += w.mass1 * (1.0 - phi);
        }
        prop_assert!((type1 - r.type1).abs() <= 1e-12);
        prop_assert!((accept1 - r.type2).abs() <= 1e-12);
        for g in p.groups() {
            let phis: Vec<f64> = p
                .words()
                .iter()
                .filter(|w| (w.log_ratio - g.log_ratio).abs() <= 1e-13)
                .map(|w| t.rejection_probability(w.log_ratio))
                .collect();
            prop_assert!(phis.windows(2).all(|x| x[0] == x[1]), "tied words treated differently");
        }
    }

    #[test]
    fn rate_function_is_convex(pair in pair_strategy(), i in 0usize..2) {
        let f = TiltedFamily::new(&pair, i).unwrap();
        let rf = f.rate_function();
        let (lo, hi) = rf.domain();
        let mean = f.free_energy_derivative(0.0).unwrap();
        prop_assert!(rf.rate(mean).unwrap().finite().unwrap().abs() <= 1e-10);
        let zs: Vec<f64> = (1..40).map(|k| lo + (hi - lo) * k as f64 / 40.0).collect();
        let vals: Vec<f64> = zs.iter().map(|&z| rf.rate(z).unwrap().finite().unwrap()).collect();
        for v in &vals {
            prop_assert!(*v >= -1e-12);
        }
        for w in vals.windows(3) {
            prop_assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-9, "not convex: {w:?}");
        }
        prop_assert_eq!(rf.rate(hi + 1e-6).unwrap(), gibbstest::ExtendedReal::PosInfinity);
    }

    #[test]
    fn information_function_reflection(pair in pair_strategy(), t in -1.0f64..2.0) {
        let f0 = TiltedFamily::new(&pair, 0).unwrap();
        let f1 = TiltedFamily::new(&pair, 1).unwrap();
        let s = 1.0 - t;
        let lhs = f0.information_function(t).unwrap();
        let rhs = f1.information_function(s).unwrap() - f1.free_energy_derivative(s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn sampler_follows_cylinder_law(seed in any::<u64>(), stream in 0u64..4) {
        let pair = {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let spec = SubshiftSpec::golden_mean();
            ModelPair::new(random_model(&spec, 2, &mut rng), random_model(&spec, 1, &mut rng)).unwrap()
        };
        let model = pair.h0().clone();
        let mut sampler = OrbitSampler::new(model.clone(), seed, stream);
        let samples = 20_000;
        let words: Vec<Word> = enumerate_cylinders(model.spec(), 2, BUDGET).unwrap().collect();
        let mut counts = vec![0usize; words.len()];
        for _ in 0..samples {
            let w = sampler.sample_orbit(2);
            counts[words.iter().position(|x| *x == w).unwrap()] += 1;
        }
        for (w, c) in words.iter().zip(&counts) {
            let p = model.cylinder_probability(w);
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            prop_assert!((*c as f64 / samples as f64 - p).abs() <= 5.0 * se + 1e-9, "{w}: {c} vs {p}");
        }
    }
}

#[test]
fn literal_reflection_with_2t_fails() {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5]).unwrap(), bernoulli(&[0.75, 0.25]).unwrap()).unwrap();
    let f0 = TiltedFamily::new(&pair, 0).unwrap();
    let f1 = TiltedFamily::new(&pair, 1).unwrap();
    for t in [0.0, 0.25, 1.0, 1.5] {
        let s = 1.0 - t;
        let lhs = f0.information_function(t).unwrap();
        let literal = f1.information_function(s).unwrap() - 2.0 * t * f1.free_energy_derivative(s).unwrap();
        assert!((lhs - literal).abs() > 1e-3, "t = {t}");
    }
}

#[test]
fn normalized_log_minimax_risk_rises_toward_exponent() {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5]).unwrap(), bernoulli(&[0.75, 0.25]).unwrap()).unwrap();
    let target = minimax_exponent(&pair).unwrap().exponent;
    let rates: Vec<f64> = (1..=14)
        .map(|n| {
            let p = profile(&pair, n);
            p.errors(&p.minimax().unwrap()).unwrap().minimax_risk.ln() / n as f64
        })
        .collect();
    for w in rates.windows(2) {
        assert!(w[1] > w[0], "{rates:?}");
    }
    assert!(rates.iter().all(|&r| r < target));
    assert!(target - rates[13] < 0.2 * (target - rates[0]), "{} vs {target}", rates[13]);
}
