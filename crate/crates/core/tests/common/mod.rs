#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use qcompress::ensemble::{Ensemble, EnsembleSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn load_fixture(name: &str) -> Ensemble {
    let text = std::fs::read_to_string(fixture_dir().join("ensembles").join(name)).unwrap();
    EnsembleSpec::from_json(&text).unwrap().build().unwrap()
}

pub fn all_fixtures() -> Vec<(String, Ensemble)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir().join("ensembles"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load_fixture(&n))).collect()
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Random vector supported on `block` (indices into a `d`-dim space).
pub fn vec_on(rng: &mut ChaCha8Rng, d: usize, block: &[usize]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    for (&i, z) in block.iter().zip(gaussian_vec(rng, block.len())) {
        v[i] = z;
    }
    v
}

pub fn random_probs(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn labels(k: usize) -> impl Iterator<Item = String> {
    (0..k).map(|i| format!("x{i:02}"))
}

/// Blind ensemble of generic states (no side system).
pub fn random_blind(rng: &mut ChaCha8Rng, dim_a: usize, k: usize) -> Ensemble {
    let probs = random_probs(rng, k);
    let items: Vec<_> = labels(k)
        .zip(probs)
        .map(|(l, p)| (l, p, gaussian_vec(rng, dim_a), vec![Complex64::new(1.0, 0.0)]))
        .collect();
    Ensemble::from_amplitudes(dim_a, 1, items).unwrap()
}

/// Visible ensemble: generic `ψ_x`, `σ_x = |x⟩`.
pub fn random_visible(rng: &mut ChaCha8Rng, dim_a: usize, k: usize) -> Ensemble {
    let probs = random_probs(rng, k);
    let items: Vec<_> = labels(k)
        .zip(probs)
        .enumerate()
        .map(|(i, (l, p))| {
            let mut s = vec![Complex64::new(0.0, 0.0); k];
            s[i] = Complex64::new(1.0, 0.0);
            (l, p, gaussian_vec(rng, dim_a), s)
        })
        .collect();
    Ensemble::from_amplitudes(dim_a, k, items).unwrap()
}

/// Ensemble with `dim_a, dim_c ≤ 3` and at most 6 states. With probability
/// one half the `A` space is split into two blocks so the ensemble is
/// reducible; side states are either shared or generic.
pub fn random_general(rng: &mut ChaCha8Rng) -> Ensemble {
    let dim_a = rng.random_range(2..=3);
    let dim_c = rng.random_range(1..=3);
    let k = rng.random_range(2..=6);
    let split = rng.random_bool(0.5);
    let shared_sigma = rng.random_bool(0.5);
    let sigma0 = gaussian_vec(rng, dim_c);
    let probs = random_probs(rng, k);
    let items: Vec<_> = labels(k)
        .zip(probs)
        .map(|(l, p)| {
            let psi = if split {
                let block: Vec<usize> = if rng.random_bool(0.5) { vec![0] } else { (1..dim_a).collect() };
                vec_on(rng, dim_a, &block)
            } else {
                gaussian_vec(rng, dim_a)
            };
            let sigma = if shared_sigma { sigma0.clone() } else { gaussian_vec(rng, dim_c) };
            (l, p, psi, sigma)
        })
        .collect();
    Ensemble::from_amplitudes(dim_a, dim_c, items).unwrap()
}

/// Union of 2–3 sub-ensembles on mutually orthogonal blocks of `A`.
/// Returns the ensemble and the planted partition as sorted label lists.
pub fn planted(rng: &mut ChaCha8Rng) -> (Ensemble, Vec<Vec<String>>) {
    let parts = rng.random_range(2..=3);
    let sizes: Vec<usize> = (0..parts).map(|_| rng.random_range(1..=2)).collect();
    let dim_a: usize = sizes.iter().sum();
    let dim_c = rng.random_range(1..=2);
    let mut items = Vec::new();
    let mut partition = Vec::new();
    let mut offset = 0;
    for (b, &size) in sizes.iter().enumerate() {
        let block: Vec<usize> = (offset..offset + size).collect();
        offset += size;
        let count = rng.random_range(1..=3);
        let mut names = Vec::new();
        for j in 0..count {
            let label = format!("b{b}s{j}");
            names.push(label.clone());
            items.push((label, 1.0, vec_on(rng, dim_a, &block), gaussian_vec(rng, dim_c)));
        }
        partition.push(names);
    }
    let probs = random_probs(rng, items.len());
    for (it, p) in items.iter_mut().zip(probs) {
        it.1 = p;
    }
    partition.sort();
    (Ensemble::from_amplitudes(dim_a, dim_c, items).unwrap(), partition)
}

/// Same items in a new order.
pub fn shuffled(rng: &mut ChaCha8Rng, e: &Ensemble) -> Ensemble {
    use rand::seq::SliceRandom;
    let mut items = e.items().to_vec();
    items.shuffle(rng);
    Ensemble::new(items).unwrap()
}

/// Adds independent noise of size `scale` to every amplitude and renormalizes.
pub fn perturbed(rng: &mut ChaCha8Rng, e: &Ensemble, scale: f64) -> Ensemble {
    let items: Vec<_> = e
        .items()
        .iter()
        .map(|it| {
            let noisy = |v: &nalgebra::DVector<Complex64>, rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                v.iter()
                    .map(|z| z + Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * scale)
                    .collect()
            };
            let psi = noisy(it.psi.amplitudes(), rng);
            let sigma = noisy(it.sigma.amplitudes(), rng);
            (it.label.clone(), it.prob, psi, sigma)
        })
        .collect();
    Ensemble::from_amplitudes(e.dim_a(), e.dim_c(), items).unwrap()
}

/// Sorted label lists of the positive-weight components.
pub fn partition_of(e: &Ensemble, tol: f64) -> Vec<Vec<String>> {
    let d = qcompress::decomposition::irreducible_components(e, tol);
    let mut out: Vec<Vec<String>> = d
        .components
        .iter()
        .filter(|c| c.weight > 0.0)
        .map(|c| {
            let mut l = c.labels.clone();
            l.sort();
            l
        })
        .collect();
    out.sort();
    out
}
