//! Run a JSON-configured sweep from code: parallel grid points, CSV data,
//! gnuplot scripts and a manifest in the output directory.
use adiabus::cli::{parse_config, run_experiment};

fn main() {
    let config = r#"{
        "experiment": "anneal-time",
        "model": "j1j2",
        "protocol": "join",
        "N": [5, 7],
        "J2": [0.0, 0.25, 0.5]
    }"#;
    let cfg = parse_config(config).expect("valid config");
    let out = std::env::temp_dir().join("adiabus-sweep-example");
    let manifest = run_experiment(&cfg, &out, 4).expect("writable output directory");
    for f in &manifest.files {
        println!("wrote {}", out.join(f).display());
    }
    print!("{}", std::fs::read_to_string(out.join("anneal-time.csv")).unwrap());
}
