//! Parse scalar fields over coordinates and evaluate them as order-3 jets.
//!
//! Run with `cargo run --example expressions_and_jets`.

use translorentz::expr::parse_expr;

fn main() {
    // every metric component is a scalar field like this one
    let field = parse_expr("2*(x3^2) - sin(x2) + x1*x2", 3).unwrap();
    println!("field:      {field}");

    let p = [0.0, 0.0, 1.0];
    let jet = field.eval_jet(&p).unwrap();
    println!("value at {p:?}: {}", jet.value());
    println!("gradient:   [{}, {}, {}]", jet.d1(0), jet.d1(1), jet.d1(2));
    println!("d2/dx3dx3:  {}", jet.d2(2, 2));
    println!("d3/dx3^3:   {}", jet.d3(2, 2, 2));

    // all partials to total order 3 come out of one evaluation
    let poly = parse_expr("x1*x2*x3", 3).unwrap();
    let jet = poly.eval_jet(&[2.0, 3.0, 5.0]).unwrap();
    println!("\nx1*x2*x3 at (2,3,5):");
    println!("  d/dx1        = {}", jet.d1(0));
    println!("  d2/dx1dx2    = {}", jet.d2(0, 1));
    println!("  d3/dx1dx2dx3 = {}", jet.d3(0, 1, 2));

    // parse errors carry byte offsets
    let err = parse_expr("1 + x4", 3).unwrap_err();
    println!("\nexpected error: {err}");
    let err = parse_expr("2 * tan(x1)", 3).unwrap_err();
    println!("expected error: {err}");
}
