use retroscatter::oracles::{rotation_histogram, RotationHistogram};

/// Mass of `l = k` among all draws, censored ones included.
fn mass(h: &RotationHistogram, k: u64) -> f64 {
    h.p.get(&k).copied().unwrap_or(0.0) * (h.n - h.capped) as f64 / h.n as f64
}

#[test]
fn return_law_stabilizes() {
    let hs: Vec<_> = [1e-2, 1e-3, 1e-4].into_iter().map(|eps| rotation_histogram(eps, 100_000, 7, 10_000_000).unwrap()).collect();
    for h in &hs {
        assert!((h.p.values().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(h.capped < 5_000, "{}", h.capped);
    }
    for w in hs.windows(2) {
        let d = (1..=10).map(|k| (mass(&w[0], k) - mass(&w[1], k)).abs()).fold(0.0, f64::max);
        assert!(d <= 0.01, "eps {} -> {}: {d}", w[0].eps, w[1].eps);
    }
    assert!(mass(&hs[2], 1) > 0.5);
}
