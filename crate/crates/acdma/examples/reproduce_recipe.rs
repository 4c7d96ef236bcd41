//! Run a recipe in memory, print its CSV and the matching plot data.
//!
//! `cargo run --example reproduce_recipe -- fig2`

use acdma::experiment::{emit_plotdata, run_recipe, ExperimentSpec, Recipe};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let recipe: Recipe = std::env::args().nth(1).as_deref().unwrap_or("fig1").parse()?;
    let mut spec = ExperimentSpec::new(recipe);
    spec.seed = 1;
    let run = run_recipe(&spec)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    for (name, csv) in &run.files {
        println!("== {name} ({} rows)", csv.lines().count() - 1);
        println!("{}", emit_plotdata(csv, recipe, spec.seed)?);
    }
    print!("{}", run.manifest.render());
    Ok(())
}
