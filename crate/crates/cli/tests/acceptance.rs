//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use fluctua_cli::acceptance::{all_passed, criteria, AcceptanceOptions};

fn main() {
    let opts = AcceptanceOptions::default();
    println!("acceptance: {} criteria", criteria().len());
    let outcomes: Vec<_> = criteria()
        .iter()
        .map(|c| {
            let o = c.run(&opts);
            println!("{}", o.line());
            o
        })
        .collect();
    let failed: Vec<_> = outcomes
        .iter()
        .filter(|o| !all_passed(std::slice::from_ref(*o)))
        .map(|o| o.id)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
