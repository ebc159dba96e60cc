use std::path::Path;

use lossylab::{run_scenario, RunOptions, Scenario};

fn run(name: &str, threads: usize) -> String {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let scenario = Scenario::load(&dir.join(name)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let opts = RunOptions { jobs: Some(threads), ..RunOptions::default() };
    pool.install(|| run_scenario(&scenario, &dir, &opts)).unwrap().normalized()
}

#[test]
fn noisy_scenario_is_thread_count_independent() {
    let one = run("parity-or-noisy.json", 1);
    assert_eq!(one, run("parity-or-noisy.json", 4));
    assert_eq!(one, run("parity-or-noisy.json", 1));
}

#[test]
fn seed_override_is_reproducible() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let scenario = Scenario::load(&dir.join("parity-or-perfect.json")).unwrap();
    let a = run_scenario(&scenario, &dir, &RunOptions { seed: Some(1), ..RunOptions::default() }).unwrap();
    let b = run_scenario(&scenario, &dir, &RunOptions { seed: Some(1), ..RunOptions::default() }).unwrap();
    assert_eq!(a.normalized(), b.normalized());
    assert_eq!(a.seed, Some(1));
    assert!(a.all_passed);
}
