use riskbench_core::metrics::auroc;
use riskbench_core::resampling::{
    bootstrap_ci, bootstrap_replicates, resample_indices, BootstrapSpec,
};
use riskbench_core::rng::{standard_normal, stream_rng, uniform_open};
use riskbench_core::{Error, PredictionSample};

fn binormal(n: usize, seed: u64) -> PredictionSample {
    let mut rng = stream_rng(seed, 0);
    let mut p = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let event = uniform_open(&mut rng) < 0.3;
        let score = standard_normal(&mut rng) + if event { 1.0 } else { 0.0 };
        p.push(1.0 / (1.0 + (-score).exp()));
        y.push(event);
    }
    PredictionSample::new(p, y).unwrap()
}

fn auroc_ci(s: &PredictionSample, spec: &BootstrapSpec) -> (f64, f64) {
    let ci = bootstrap_ci(s, "auroc", spec, |r| auroc(r).ok()).unwrap();
    (ci.lower, ci.upper)
}

#[test]
fn same_seed_same_interval_whatever_the_pool() {
    let s = binormal(300, 1);
    let spec = BootstrapSpec {
        replicates: 400,
        ..Default::default()
    };
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let three = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let a = one.install(|| auroc_ci(&s, &spec));
    let b = three.install(|| auroc_ci(&s, &spec));
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert_eq!(a.1.to_bits(), b.1.to_bits());
    let other = BootstrapSpec {
        master_seed: 7,
        ..spec
    };
    assert_ne!(auroc_ci(&s, &other), a);
}

#[test]
fn replicates_come_back_in_order() {
    let s = binormal(50, 2);
    let spec = BootstrapSpec {
        replicates: 64,
        ..Default::default()
    };
    let firsts = bootstrap_replicates(&s, &spec, |r| r.probabilities()[0]);
    for (r, v) in firsts.iter().enumerate() {
        let idx = resample_indices(&s, &spec, r);
        assert_eq!(*v, s.probabilities()[idx[0]]);
    }
}

#[test]
fn stratified_resamples_keep_class_counts() {
    let s = binormal(120, 3);
    let spec = BootstrapSpec {
        replicates: 20,
        stratified: true,
        ..Default::default()
    };
    let counts = bootstrap_replicates(&s, &spec, |r| r.n_events());
    assert!(counts.iter().all(|&c| c == s.n_events()));
}

#[test]
fn intervals_narrow_as_samples_grow() {
    let spec = BootstrapSpec {
        replicates: 500,
        ..Default::default()
    };
    let width = |n| {
        let (lo, hi) = auroc_ci(&binormal(n, 4), &spec);
        hi - lo
    };
    let (small, large) = (width(100), width(1600));
    // roughly proportional to 1 / sqrt(n)
    assert!(large < small / 2.5, "{small} vs {large}");
}

#[test]
fn mostly_undefined_statistics_are_refused() {
    let s = binormal(40, 5);
    let spec = BootstrapSpec {
        replicates: 50,
        ..Default::default()
    };
    let err = bootstrap_ci(&s, "never", &spec, |_| None).unwrap_err();
    assert!(matches!(
        err,
        Error::BootstrapRefused {
            dropped: 50,
            replicates: 50,
            ..
        }
    ));
    // a few undefined replicates are dropped and counted
    let ci = bootstrap_ci(&s, "sometimes", &spec, |r| {
        (r.probabilities()[0] > 0.2).then(|| r.prevalence())
    })
    .unwrap();
    assert!(ci.dropped < 25);
}
