//! Overloading achieved by the code-construction chains at 64 chips.

use acdma::codes::{recipe_table_i, CodeLibrary};

fn main() -> acdma::Result<()> {
    let mut lib = CodeLibrary::default();
    for row in recipe_table_i(&mut lib)? {
        let users = row.users.map_or("-".to_string(), |u| u.to_string());
        let cert = row.cert.as_ref().map_or("stored value".to_string(), |c| c.to_string());
        println!("lambda={:<5} tau={:<3} users={users:<3} beta={:.2}  {}  [{cert}]", row.lambda, row.tau_max, row.beta, row.code);
    }
    Ok(())
}
