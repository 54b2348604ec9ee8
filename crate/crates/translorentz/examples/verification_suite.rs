//! Run the named verification suites on every builtin model.
//!
//! Run with `cargo run --example verification_suite`. The same checks back
//! the `translorentz verify` command.

use translorentz::metric::{AdaptedMetric, BUILTIN_NAMES};
use translorentz::verify::{run_suite, Suite};

fn main() {
    let seed = 42;
    for name in BUILTIN_NAMES {
        let m = AdaptedMetric::builtin(name).unwrap();
        let results = run_suite(&m, Suite::All, seed);
        let failed = results.iter().filter(|r| !r.passed).count();
        println!(
            "{name}: {}/{} checks passed",
            results.len() - failed,
            results.len()
        );
        for r in results {
            if !r.passed {
                println!("  FAIL {}: {} (defect {:.3e})", r.name, r.detail, r.defect);
            }
        }
    }
}
