//! Regenerates the bundled demo dataset (data/demo_activity.csv and
//! data/demo_descriptors.csv): 40 synthetic compounds with activity planted
//! on five descriptors, one constant column, and one duplicated column for
//! the preprocessing filters to catch.
//!
//! Run from the repository root: cargo run -p qsarkit --example generate_demo_data

use std::fs::File;
use std::io::Write;

use rand::Rng;

fn main() -> std::io::Result<()> {
    let mut rng = qsarkit::rng::seeded(20240);
    let names = [
        "StsCcount",
        "chi5chain",
        "SaaaCcount",
        "SssScount",
        "SdssCcount",
        "XlogP",
        "wiener_index",
        "kappa2",
        "polar_surface_area",
        "chi3cluster",
        "flat_count",
        "chi5chain_dup",
    ];
    std::fs::create_dir_all("data")?;
    let mut activity = File::create("data/demo_activity.csv")?;
    let mut descriptors = File::create("data/demo_descriptors.csv")?;
    writeln!(activity, "id,ic50")?;
    writeln!(descriptors, "id,{}", names.join(","))?;

    for i in 0..40 {
        let id = format!("cmp{:02}", i + 1);
        let mut row = [0.0f64; 12];
        for (j, slot) in row.iter_mut().enumerate().take(10) {
            *slot = rng.random_range(-2.0..2.0) + j as f64 * 0.25;
        }
        row[10] = 3.5; // constant, removed by the variance filter
        row[11] = row[1]; // duplicate, removed by the correlation filter

        let pic50 = 5.6 + 0.9 * row[0] + 0.5 * row[1] - 0.4 * row[2] + 0.3 * row[3] - 0.2 * row[4]
            + rng.random_range(-0.08..0.08);
        let ic50_um = 10f64.powf(6.0 - pic50) / 1e0;
        writeln!(activity, "{id},{ic50_um:.6}")?;
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(descriptors, "{id},{}", cells.join(","))?;
    }
    println!("wrote data/demo_activity.csv and data/demo_descriptors.csv");
    Ok(())
}
