use std::path::Path;

use isinglab::harness::{run_experiment, ExperimentConfig};
use isinglab::harris::generate_noise;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Upper-tail p-value of Pearson's statistic on the given bins.
fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (observed.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

#[test]
fn ring_counts_are_poisson() {
    let (side, horizon, replicas) = (32, 10.0, 20);
    let mut counts = Vec::new();
    let mut marks = vec![0u64; 20];
    for r in 0..replicas {
        let noise = generate_noise(0xC0FFEE, r, side, horizon).unwrap();
        for site in noise.sites() {
            counts.push(site.len() as u64);
            for ring in site {
                assert!(ring.time > 0.0 && ring.time <= horizon);
                marks[(ring.mark * 20.0) as usize] += 1;
            }
        }
    }
    let n = counts.len() as f64;
    let law = Poisson::new(horizon).unwrap();
    // bins: <=4, 5, ..., 16, >=17, each with expected count well above 5
    let (lo, hi) = (4u64, 17u64);
    let mut observed = vec![0u64; (hi - lo + 1) as usize];
    for &c in &counts {
        observed[(c.clamp(lo, hi) - lo) as usize] += 1;
    }
    let mut expected: Vec<f64> = (lo..=hi).map(|k| n * law.pmf(k)).collect();
    expected[0] = n * (0..=lo).map(|k| law.pmf(k)).sum::<f64>();
    let last = expected.len() - 1;
    expected[last] = n * (1.0 - (0..hi).map(|k| law.pmf(k)).sum::<f64>());
    assert!(expected.iter().all(|&e| e > 5.0));
    let p = chi_square_p(&observed, &expected);
    assert!(p >= 0.001, "ring counts: p = {p}");

    let total: u64 = marks.iter().sum();
    let p_marks = chi_square_p(&marks, &vec![total as f64 / 20.0; 20]);
    assert!(p_marks >= 0.001, "marks: p = {p_marks}");
}

fn config(name: &str, seed: u64, out: &Path) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut c = ExperimentConfig::from_json(&text, path.parent().unwrap()).unwrap();
    c.master_seed = seed;
    c.output_dir = out.join(format!("{name}-{seed}"));
    c
}

#[test]
fn statistical_verdicts_are_seed_robust() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = [1u64, 22, 333, 4444, 55555];
    for (name, id) in [
        ("centering.json", "fixed_time_centering"),
        ("sign_symmetry.json", "sign_symmetry"),
        ("cesaro_exact.json", "cesaro_exact"),
    ] {
        let passes = seeds
            .iter()
            .filter(|&&s| {
                let report = run_experiment(&config(name, s, dir.path())).unwrap();
                report.verdict(id).unwrap().passed
            })
            .count();
        assert!(passes >= 4, "{id}: {passes}/5 seeds passed");
    }
}
