//! The Gauss formula on an II-flat hypersurface: the curvature of the
//! tangential connection equals the boundary limit of the ambient curvature
//! minus a determinant of second-fundamental-form values.
//!
//! Run with `cargo run --example gauss_formula`.

use translorentz::limits;
use translorentz::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};

fn main() {
    // a 4-dimensional model whose hypersurface metric has curved screen
    let config = r#"
dimension = 4
box = [[-0.3, 0.3], [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]]
g_screen = [["1 + x3^2", "0"], ["0", "1"]]
g_mix = ["0", "0"]
g_m = "2"
"#;
    let m = AdaptedMetric::from_toml_str(config).unwrap();
    let p = SigmaPoint::new(&[0.1, 0.4, 0.2]);

    let d2 = VectorFieldSpec::coordinate(4, 2);
    let d3 = VectorFieldSpec::coordinate(4, 3);
    let g = limits::gauss_check(&m, &p, &d2, &d3, &d2, &d3).unwrap();
    println!("custom model, (d2, d3, d2, d3):");
    println!("  tangential curvature  (lhs) = {:.9}", g.lhs);
    println!("  curvature limit             = {:.9}", g.covariant_value);
    println!("  H determinant               = {:.9}", g.h_det);
    println!("  limit - H det         (rhs) = {:.9}", g.rhs);
    println!("  defect                      = {:.3e}", g.defect);

    // on the builtin 4-dimensional model both routes cancel to zero
    let m = AdaptedMetric::builtin("dim4").unwrap();
    let p = SigmaPoint::new(&[0.3, -0.2, 0.25]);
    let x = VectorFieldSpec::parse(&["0", "1", "x3", "0"], 4, true).unwrap();
    let y = VectorFieldSpec::parse(&["0", "x4", "1", "1"], 4, true).unwrap();
    let g = limits::gauss_check(&m, &p, &x, &y, &x, &y).unwrap();
    println!("\ndim4, random tangent fields:");
    println!(
        "  lhs = {:.9}, rhs = {:.9}, defect = {:.3e}",
        g.lhs, g.rhs, g.defect
    );
}
