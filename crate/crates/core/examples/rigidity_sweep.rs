//! Prints verifier deviations for partially entangled two-qubit resources.

use unibasis::{build_scheme, verify_dense_coding, verify_teleportation, weyl_basis, Complex64, Mode, StateVector};

fn main() {
    let scheme = build_scheme(&weyl_basis(2), Mode::Teleportation);
    println!("{:>6} {:>12} {:>12} {:>12}", "p", "teleport", "dense", "floor");
    for i in 1..=19 {
        let p = 0.5 + 0.025 * i as f64;
        let v = StateVector::new(vec![
            Complex64::new(p.sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new((1.0 - p).sqrt(), 0.0),
        ])
        .unwrap();
        let s = scheme.with_resource(v.projector()).unwrap();
        let t = verify_teleportation(&s, 0.0).max_deviation;
        let c = verify_dense_coding(&s, 0.0).max_deviation;
        let floor = (1.0 - 2.0 * (p * (1.0 - p)).sqrt()) / 4.0 * 0.5;
        println!("{:>6.3} {:>12.6} {:>12.6} {:>12.6}", p, t, c, floor);
    }
}
