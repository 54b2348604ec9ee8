//! The builtin model library and metric validation.
//!
//! Run with `cargo run --example builtin_models`.

use translorentz::metric::{AdaptedMetric, BUILTIN_NAMES};

fn main() {
    for name in BUILTIN_NAMES {
        let m = AdaptedMetric::builtin(name).unwrap();
        println!("{name}: dimension {}", m.dim());
        let mut plus = vec![0.1];
        let mut minus = vec![-0.1];
        plus.resize(m.dim(), 0.0);
        minus.resize(m.dim(), 0.0);
        println!(
            "  signature at x1 = +0.1: {:?}, at x1 = -0.1: {:?}",
            m.signature_probe(&plus).unwrap(),
            m.signature_probe(&minus).unwrap()
        );
    }

    // custom metrics load from TOML; the normal form is validated on a grid
    let custom = r#"
dimension = 3
box = [[-0.3, 0.3], [-1.0, 1.0], [-1.0, 1.0]]
g_screen = [["1 + x1*x2 + x3^2"]]
g_mix = ["x2*x3"]
g_m = "2 + x1*exp(x2)"
"#;
    match AdaptedMetric::from_toml_str(custom) {
        Ok(m) => println!("\ncustom metric valid, dimension {}", m.dim()),
        Err(e) => println!("\ncustom metric rejected: {e}"),
    }

    // g_m must restrict to 2 on the hypersurface
    let bad = custom.replace("2 + x1*exp(x2)", "2 + x2");
    match AdaptedMetric::from_toml_str(&bad) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("expected rejection: {e}"),
    }
}
