//! Empirical divergence probes: sample a curvature quantity along the
//! transverse axis, fit a log-log slope, and write the samples as CSV.
//!
//! Run with `cargo run --example divergence_probe`.

use translorentz::limits::{self, ProbeOptions, RicciPair};
use translorentz::metric::{AdaptedMetric, SigmaPoint};
use translorentz::report::probe_csv;

fn main() {
    let m = AdaptedMetric::builtin("flat").unwrap();
    let p = SigmaPoint::new(&[0.2, -0.1]);
    let opts = ProbeOptions::default();

    for pair in [
        RicciPair::NN,
        RicciPair::RR,
        RicciPair::RV { lam: 0 },
        RicciPair::VW { lam: 0, mu: 0 },
    ] {
        let rep = limits::ricci_limit(&m, &p, pair, &opts).unwrap();
        println!(
            "{:<12} slope {:>7.3}  {:?}",
            rep.quantity, rep.probe.slope, rep.classification
        );
        println!("  prediction: {}", rep.prediction);
    }

    // the raw samples serialize as eps,value rows
    let rep = limits::ricci_limit(&m, &p, RicciPair::NN, &opts).unwrap();
    let csv = probe_csv(&rep.probe.samples);
    let path = std::env::temp_dir().join("ricci_nn_probe.csv");
    std::fs::write(&path, &csv).unwrap();
    println!(
        "\nwrote {} samples to {}",
        rep.probe.samples.len(),
        path.display()
    );
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
}
