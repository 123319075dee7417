//! Solve `AᵀP + PA = −I` for a small stable matrix and inspect `P`.

use semistab::numerics::{is_hurwitz, lyapunov_residual, lyapunov_solve, sym_eig, Matrix};

fn main() -> semistab::Result<()> {
    let a = Matrix::from_rows(&[vec![-1.0, 2.0, 0.0], vec![0.0, -3.0, 1.0], vec![0.5, 0.0, -2.0]])?;
    println!("A Hurwitz: {}", is_hurwitz(&a));

    let p = lyapunov_solve(&a)?;
    let eig = sym_eig(&p)?;
    println!("P =");
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{:>10.6}", p.as_matrix()[(i, j)])).collect();
        println!("  {}", row.join(" "));
    }
    println!("eigenvalues of P: {:?}", eig.eigenvalues);
    println!("residual ‖AᵀP + PA + I‖_F = {:e}", lyapunov_residual(&a, &p)?);

    let unstable = Matrix::from_rows(&[vec![0.1, 1.0], vec![0.0, -1.0]])?;
    match lyapunov_solve(&unstable) {
        Ok(_) => println!("unexpected solution"),
        Err(e) => println!("unstable A rejected: {e}"),
    }
    Ok(())
}
