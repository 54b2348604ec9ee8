//! Canonical structures on the degenerate hypersurface: main normal, main
//! radical field, fundamental forms, screen basis, Weingarten maps.
//!
//! Run with `cargo run --example sigma_frame`.

use translorentz::metric::{AdaptedMetric, SigmaPoint};
use translorentz::sigma;

fn main() {
    let m = AdaptedMetric::builtin("twisted").unwrap();
    let p = SigmaPoint::new(&[0.2, 0.6]);

    let frame = sigma::screen_frame(&m, &p).unwrap();
    println!("point on the hypersurface: {:?}", frame.point);
    println!("main normal N:  {:?}", frame.n);
    println!("main radical R: {:?}", frame.r);
    println!("raw screen W:   {:?}", frame.screen_raw);
    println!("orthonormal V:  {:?}", frame.screen);

    println!("\nH on [V, R]:");
    for row in &frame.h {
        println!("  {row:?}");
    }
    println!("II on [N, V, R]:");
    for row in &frame.ii {
        println!("  {row:?}");
    }

    let w = sigma::weingarten(&m, &p).unwrap();
    println!("\nprincipal curvatures of H^S:  {:?}", w.h_curvatures);
    println!("principal curvatures of II^S: {:?}", w.ii_curvatures);

    // every vector splits into normal, screen and radical parts
    let d = sigma::decompose(&m, &p, &[1.0, 2.0, 3.0]).unwrap();
    println!(
        "\ndecompose (1,2,3): nu = {}, screen = {:?}, rho = {}",
        d.nu, d.screen, d.rho
    );

    // the twist makes rho non-closed
    let x = sigma::screen_generator_field(&m, 0).unwrap();
    let r = translorentz::metric::VectorFieldSpec::coordinate(3, 3);
    let drho = sigma::d_rho(&m, &p, &x, &r).unwrap();
    println!("d rho(W, R) = {drho}");

    let flat = sigma::flatness(&m, &m.sigma_grid(5)).unwrap();
    println!(
        "\nflatness: II-flat = {} (max {:.2e}), H-flat = {} (max {:.2e}), III-flat = {}",
        flat.ii_flat, flat.max_ii, flat.h_flat, flat.max_h, flat.iii_flat
    );
}
