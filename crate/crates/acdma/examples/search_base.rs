//! Seeded search for a small base matrix, and what happens when the shape
//! cannot exist.

use acdma::codes::{search_base, SearchConfig, SearchOutcome};
use acdma::model::Family;

fn main() -> acdma::Result<()> {
    let cfg = SearchConfig { seed: 7, ..SearchConfig::default() };
    for (family, m, n, s) in [(Family::B, 6, 4, 6), (Family::B, 8, 4, 8), (Family::D, 4, 4, 4)] {
        match search_base(family, m, n, s, &cfg)? {
            SearchOutcome::Found(w) => println!("{}: found, {}", w.label(), w.cert),
            SearchOutcome::NotFound(why) => println!("{family}({m},{n},{s}): {why:?}"),
        }
    }
    Ok(())
}
