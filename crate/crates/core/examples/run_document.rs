//! Runs the `cellcoh` pipelines on the JSON documents in `examples/data`,
//! the same way the command line tool does.
//!
//!     cargo run --example run_document -- examples/data/sign_module.json group-cohomology

use clap::ValueEnum;

use cellcoh::cli::{parse_document, run_pipeline, validate_input, Command, RunOptions};

fn main() -> cellcoh::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (path, cmd) = match args.as_slice() {
        [p, c] => (p.clone(), c.clone()),
        _ => (concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/pseudo_circle.json").into(), "cohomology".into()),
    };
    let command = Command::from_str(&cmd, true).map_err(cellcoh::Error::Schema)?;
    let bytes = std::fs::read(&path).map_err(|e| cellcoh::Error::Schema(e.to_string()))?;
    let doc = parse_document(&bytes)?;
    let v = validate_input(&doc)?;
    let report = run_pipeline(command, &v, RunOptions::default())?;
    for a in &report.assertions {
        println!("[{}] {}: {}", if a.pass { "ok" } else { "FAIL" }, a.name, a.detail);
    }
    println!("input hash {}", report.input_hash);
    Ok(())
}
