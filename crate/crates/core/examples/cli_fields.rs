//! Drive the command-line interface in-process: false-color O/D images for
//! several horizons, then a short run.

use t2nod::cli::main_with_args;

const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/crossing_car.json");

pub fn run_example() -> t2nod::Result<()> {
    let out = std::env::temp_dir().join(format!("t2nod-cli-example-{}", std::process::id()));
    let out_s = out.to_string_lossy().to_string();
    let code = main_with_args(["t2nod", "fields", "--scenario", SCENARIO, "--out", &out_s]);
    assert_eq!(code, 0);
    let code = main_with_args(["t2nod", "run", "--scenario", SCENARIO, "--out", &out_s, "--override", "ego.planner.K=0"]);
    assert_eq!(code, 0);
    let mut names: Vec<_> = std::fs::read_dir(&out)
        .map_err(|e| t2nod::Error::Config(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().to_string()))
        .collect();
    names.sort();
    println!("{}", names.join("\n"));
    let _ = std::fs::remove_dir_all(&out);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
