//! Drive the command-line front end in-process: write inputs, run each
//! subcommand, print exit codes and reports.

use std::fs;

use semistab::cli;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("semistab-cli-pipeline");
    fs::create_dir_all(&dir)?;
    let a = dir.join("a.json");
    let q = dir.join("q.json");
    let x0 = dir.join("x0.json");
    fs::write(&a, r#"{"rows": 2, "cols": 2, "entries": [-1.0, 0.0, 0.0, -1.0]}"#)?;
    fs::write(&q, r#"{"rows": 2, "cols": 2, "entries": [1.0, 0.0, 0.0, 1.0]}"#)?;
    let mut state = vec![0.0; 8];
    state[2] = 0.125;
    fs::write(&x0, serde_json::to_string(&state).unwrap())?;

    let path = |p: &std::path::Path| p.to_str().unwrap().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["certify".into(), "--a".into(), path(&a), "--q".into(), path(&q), "--omega".into(), "1".into(), "--gain".into(), "linear:1".into()],
        vec!["simulate".into(), "--n-max".into(), "8".into(), "--x0".into(), path(&x0), "--format".into(), "json".into()],
        vec!["demo-instability".into(), "--N".into(), "10".into()],
        vec!["probe".into(), "--frechet".into(), "--N-range".into(), "1..5".into()],
        vec!["oracle-compare".into(), "--n".into(), "3".into(), "--x0".into(), "0.25".into(), "--T".into(), "10".into(), "--format".into(), "json".into()],
    ];
    for args in runs {
        let out = cli::run(std::iter::once("semistab".to_string()).chain(args.iter().cloned()));
        println!("$ semistab {}\nexit {}", args.join(" "), out.code);
        println!("{}{}", out.stdout.trim_end(), out.stderr.trim_end());
        println!();
    }
    Ok(())
}
