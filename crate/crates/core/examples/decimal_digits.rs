//! Classifying decimal expansions: uniform digits against digits weighted
//! by 1/(digit+1).

use std::path::Path;

use gibbstest::cli::ModelConfig;
use gibbstest::hypothesis::{apply_test, neyman_pearson};
use gibbstest::sampling::{ingest_digits, OrbitSampler};

fn main() -> gibbstest::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/digits.toml");
    let pair = ModelConfig::load(&path)?.pair()?;
    let n = 5;
    let test = neyman_pearson(&pair, n, 0.05)?;
    println!("level {:.4}, power {:.4}", test.alpha, test.beta);

    for text in ["0.141592", "0.718281", "0.000102", "0.999999"] {
        let w = ingest_digits(text)?;
        println!("{text}: {}", apply_test(&test, &pair, &w, 0.5)?);
    }
    for (label, i) in [("h0", 0), ("h1", 1)] {
        let mut sampler = OrbitSampler::new(pair.model(i).clone(), 9, i as u64);
        let rejects = (0..1000)
            .filter(|_| {
                let w = sampler.sample_orbit(n);
                let u = sampler.uniform();
                apply_test(&test, &pair, &w, u).map(|d| d.to_string() == "reject").unwrap_or(false)
            })
            .count();
        println!("samples from {label}: {rejects}/1000 rejected");
    }
    Ok(())
}
