//! Closed forms for `ẋ = (−1 + 3|x|^{1/n})x`: equilibria, classification,
//! exact solutions and escape times.

use semistab::scalar_mode::{classify, equilibria, escape_time, exact_solution, lipschitz_bound, ModeParams};

fn main() -> semistab::Result<()> {
    for n in [1, 2, 5] {
        let m = ModeParams::new(n)?;
        let e = m.threshold();
        println!("n = {n}: equilibria {:?}", equilibria(m));
        for x0 in [0.5 * e, e, 2.0 * e] {
            let class = classify(m, x0);
            let esc = escape_time(m, x0);
            print!("  x0 = {x0:.3e}: {class:?}");
            match esc.t_star {
                Some(t) => {
                    let t_half = 0.5 * t;
                    println!(", t* = {t:.6}, x(t*/2) = {:.6e}", exact_solution(m, x0, t_half)?);
                }
                None => println!(", x(5) = {:.6e}", exact_solution(m, x0, 5.0)?),
            }
        }
        println!("  Lipschitz bound on [-1, 1]: {:.4}", lipschitz_bound(m, 1.0)?.bound);
    }

    let m = ModeParams::new(3)?;
    let x0 = 0.5f64.powi(3);
    let t_star = escape_time(m, x0).t_star.unwrap();
    println!("x0 = 2^-3 escapes at {t_star:.12} = 3 ln 3 = {:.12}", 3.0 * 3f64.ln());
    match exact_solution(m, x0, t_star) {
        Ok(_) => println!("unexpected value past escape"),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
