//! Build a stability certificate and a basin level for `ẋ = Ax + f(x)`.

use semistab::certificate::{build_certificate, dissipation_margin, CertificateInput, GainModulus};
use semistab::numerics::{Matrix, SymmetricMatrix};

fn main() -> semistab::Result<()> {
    let a = Matrix::from_rows(&[vec![-1.0, 0.5], vec![0.0, -2.0]])?;
    let q = SymmetricMatrix::identity(2);
    let omega = dissipation_margin(&a, &q)?.max(0.0) + 1.0;
    println!("λmax(QA + AᵀQ) = {:.6}, using ω = {omega:.6}", dissipation_margin(&a, &q)?);

    let cert = build_certificate(&CertificateInput { a, q, omega })?;
    println!("m1 = {:.6}, M1 = {:.6}", cert.m1, cert.big_m1);
    println!("λmax(P₂A + AᵀP₂) = {:.6}", cert.residuals.eq4_margin);
    println!("decay rate of V: {:.6}", cert.decay_rate());

    // f(x) = x∘x has ‖f(x)‖ ≤ ‖x‖², so g(r) = r bounds ‖f(x)‖/‖x‖
    for (name, g) in [("g(r) = r", GainModulus::linear(1.0)), ("g(r) = 4r²", GainModulus::power(4.0, 2.0))] {
        let with = cert.clone().with_basin(&g)?;
        println!("{name}: δ = {:.6e}", with.delta.unwrap());
    }

    match cert.clone().with_basin(&GainModulus::constant(1.5)) {
        Ok(_) => println!("unexpected basin"),
        Err(e) => println!("g ≡ 3/2: {e}"),
    }

    println!("{}", serde_json::to_string_pretty(&cert).expect("serializable"));
    Ok(())
}
