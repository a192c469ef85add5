//! Writes a Cayley graph to the text format and reads it back.

use gibbs_coupling::group::{build_dihedral, format_group, parse_group};

fn main() -> gibbs_coupling::error::Result<()> {
    let d3 = build_dihedral(3)?;
    let text = format_group(&d3);
    print!("{text}");
    let back = parse_group(&text)?;
    println!("round trip equal: {}", back == d3);
    println!("abelian: {}", back.group().is_abelian());
    Ok(())
}
