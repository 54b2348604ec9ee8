//! The family of connections living on the degenerate hypersurface.
//!
//! Run with `cargo run --example connections_on_sigma`.

use translorentz::connections::{self, AdmissibleSpec, ConnectionKind};
use translorentz::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};

fn main() {
    let m = AdaptedMetric::builtin("twisted").unwrap();
    let p = SigmaPoint::new(&[0.3, 0.7]);
    let d2 = VectorFieldSpec::coordinate(3, 2);
    let d3 = VectorFieldSpec::coordinate(3, 3);

    // the main connection picks up torsion R tensor d(rho) from the twist
    let tor = connections::torsion(&m, &ConnectionKind::Main, &p, &d2, &d3).unwrap();
    println!("torsion of the main connection:       {tor:?}");
    let tor = connections::torsion(&m, &ConnectionKind::MainAdmissible, &p, &d2, &d3).unwrap();
    println!("torsion of the main admissible one:   {tor:?}");

    // admissible connections differ by a symmetric radical offset
    let sigma_offset = AdmissibleSpec::parse(
        &m,
        &[vec!["x2".into(), "0".into()], vec!["0".into(), "1".into()]],
    )
    .unwrap();
    let d = connections::admissible_connection(&m, &sigma_offset, &p, &d2, &d2).unwrap();
    println!("admissible D_d2 d2 with sigma offset: {d:?}");

    // on an II-flat hypersurface they all carry one covariant curvature
    let k1 = connections::connection_curvature(
        &m,
        &ConnectionKind::Admissible(sigma_offset),
        &p,
        &d2,
        &d3,
        &d2,
        &d2,
    )
    .unwrap();
    let k2 = connections::connection_curvature(
        &m,
        &ConnectionKind::MainAdmissible,
        &p,
        &d2,
        &d3,
        &d2,
        &d2,
    )
    .unwrap();
    println!("covariant curvature, two admissible connections: {k1:.6e} vs {k2:.6e}");

    // the tangential connection projects Levi-Civita limits; R is geodesic
    let v = connections::tangential_connection(&m, &p, &d3, &d3).unwrap();
    println!("tangential nabla_R R = {v:?}");
}
