use std::f64::consts::TAU;

use emdshrink::emd::{decompose, reconstruct, SiftConfig, StopReason};
use emdshrink::signal::{GaussianSource, Signal};
use proptest::prelude::*;

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn middle(x: &[f64]) -> &[f64] {
    let cut = x.len() / 10;
    &x[cut..x.len() - cut]
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let err: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let norm: f64 = a.iter().map(|x| x * x).sum();
    (err / norm.max(f64::MIN_POSITIVE)).sqrt()
}

#[test]
fn two_tones_separate() {
    for rate in [1000, 8000] {
        let tone = |f: f64| -> Vec<f64> { (0..8000).map(|i| (TAU * f * i as f64 / rate as f64).sin()).collect() };
        let (slow, fast) = (tone(2.0), tone(20.0));
        let x = Signal::new(slow.iter().zip(&fast).map(|(a, b)| a + b).collect(), rate).unwrap();

        let d = decompose(&x, &SiftConfig::default()).unwrap();
        assert!(d.num_imfs() >= 2);
        let first = correlation(middle(d.imfs[0].samples()), middle(&fast));
        assert!(first > 0.9, "{rate} Hz: first IMF vs 20 Hz: {first}");
        let best_slow = d.imfs[1..]
            .iter()
            .map(|imf| correlation(middle(imf.samples()), middle(&slow)))
            .fold(f64::MIN, f64::max);
        assert!(best_slow > 0.9, "{rate} Hz: best later IMF vs 2 Hz: {best_slow}");
    }
}

#[test]
fn white_noise_is_a_dyadic_filter_bank() {
    let seeds = 20;
    let mut counts = Vec::new();
    let mut energy_sums = [0.0; 8];
    for seed in 0..seeds {
        let x = Signal::new(GaussianSource::new(1000 + seed).take(8192), 8000).unwrap();
        let d = decompose(&x, &SiftConfig::default()).unwrap();
        counts.push(d.num_imfs());
        for (k, sum) in energy_sums.iter_mut().enumerate() {
            *sum += d.imfs[k].energy();
        }
    }
    for &c in &counts {
        assert!((10..=16).contains(&c), "IMF count {c}");
    }
    for k in 1..energy_sums.len() {
        let ratio = energy_sums[k] / energy_sums[k - 1];
        assert!((0.25..=1.0).contains(&ratio), "IMF {} / IMF {}: {ratio}", k + 1, k);
    }
}

#[test]
fn residue_has_few_extrema_unless_capped() {
    let x = Signal::from_fn(2048, 8000, |i| {
        let t = i as f64 / 8000.0;
        (TAU * 300.0 * t).sin() + 0.5 * (TAU * 45.0 * t).sin() + 3.0 * t
    })
    .unwrap();
    let d = decompose(&x, &SiftConfig::default()).unwrap();
    assert_eq!(d.stop_reason, StopReason::ResidueExhausted);
    assert!(emdshrink::emd::find_extrema(d.residue.samples()).count() < 3);
    assert!(d.imfs.iter().all(|imf| imf.len() == x.len()));
}

fn mixed_signal() -> impl Strategy<Value = Vec<f64>> {
    (16usize..1500, any::<u64>(), 0.0f64..1.0, 0.001f64..0.2).prop_map(|(n, seed, noise, freq)| {
        let mut g = GaussianSource::new(seed);
        (0..n)
            .map(|i| (TAU * freq * i as f64).sin() + noise * g.next_gaussian())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_reconstructs(x in mixed_signal()) {
        let s = Signal::new(x, 8000).unwrap();
        let d = decompose(&s, &SiftConfig::default()).unwrap();
        let back = reconstruct(&d).unwrap();
        prop_assert!(rel_l2(s.samples(), back.samples()) <= 1e-10);
        prop_assert_eq!(d.sift_counts.len(), d.num_imfs());
    }
}
