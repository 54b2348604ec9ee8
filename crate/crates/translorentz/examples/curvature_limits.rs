//! Classifying curvature quantities as the hypersurface is approached:
//! finite, extension-dependent, or divergent with a fitted order.
//!
//! Run with `cargo run --example curvature_limits`.

use translorentz::limits::{self, ProbeOptions};
use translorentz::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};
use translorentz::sigma;

fn main() {
    let opts = ProbeOptions::default();

    // the (N,R,N,R) component always diverges: its tau-scaled limit is -1
    let m = AdaptedMetric::builtin("flat").unwrap();
    let p = SigmaPoint::new(&[0.2, 0.1]);
    let f = sigma::screen_frame(&m, &p).unwrap();
    let n = VectorFieldSpec::constant(&f.n);
    let r = VectorFieldSpec::constant(&f.r);
    let rep = limits::covariant_limit(&m, &p, &n, &r, &n, &r, &opts).unwrap();
    println!(
        "{}\n  {:?}\n  {}",
        rep.quantity, rep.classification, rep.prediction
    );

    // a bounded-but-extension-dependent component on the II-curved model
    let m = AdaptedMetric::builtin("iicurved").unwrap();
    let p = SigmaPoint::new(&[0.0, 0.0]);
    let f = sigma::screen_frame(&m, &p).unwrap();
    let v = VectorFieldSpec::constant(&f.screen[0]);
    let r = VectorFieldSpec::constant(&f.r);
    let rep = limits::covariant_limit(&m, &p, &v, &r, &v, &r, &opts).unwrap();
    println!(
        "\n{}\n  {:?}\n  {}",
        rep.quantity, rep.classification, rep.prediction
    );

    // shifting the extension by tau*N moves the limit by the predicted defect
    let nf = VectorFieldSpec::constant(&f.n);
    let check = limits::perturbation_check(&m, &p, [&v, &r, &v, &r], [None, Some(&nf), None, None])
        .unwrap();
    println!(
        "\nextension shift: base {:.6}, perturbed {:.6}, deviation {:.6}, predicted {:.6}",
        check.base_value, check.perturbed_value, check.deviation, check.predicted_defect
    );

    // rank-1 sectional curvature: bounded here, but two extensions disagree
    let m = AdaptedMetric::builtin("hcurved").unwrap();
    let p = SigmaPoint::new(&[0.0, 0.4]);
    let f = sigma::screen_frame(&m, &p).unwrap();
    let rep = limits::sectional_limit(&m, &p, &f.screen[0], &f.r, &opts).unwrap();
    println!("\n{}\n  {:?}", rep.quantity, rep.classification);
    if let Some(w) = rep.witness {
        println!(
            "  canonical limit {:.6}, perturbed {:.6}, predicted shift {:.6}",
            w.canonical, w.perturbed, w.predicted_shift
        );
    }
}
