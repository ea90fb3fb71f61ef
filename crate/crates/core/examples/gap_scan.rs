//! Sector gap of the joined chain against J2 at the end of the schedule.
use adiabus::anneal::gap_scan;
use adiabus::model::join_protocol;
use adiabus::solver::EigenConfig;

fn main() -> adiabus::Result<()> {
    let n = 9;
    let j2: Vec<f64> = (0..=16).map(|k| 0.05 * k as f64).collect();
    let grid = gap_scan(|x| join_protocol(n, 1.0, x), &[0.5, 1.0], &j2, None, &EigenConfig::default())?;
    println!("N={n}, gap in the k={} sector", n / 2);
    println!("  J2     s=0.5     s=1");
    for (c, x) in j2.iter().enumerate() {
        let cell = |r: usize| grid.gaps[r][c].map_or("-".into(), |g| format!("{g:.5}"));
        println!("{x:5.2}  {:>8}  {:>8}", cell(0), cell(1));
    }
    Ok(())
}
