// Tree homomorphisms: level analysis, the parity map and prepending.

use lipschitz_baire::lipschitz::{
    check_isometry, check_lipschitz, compose_homs, induced_hom, level_analysis, PartialMap, TreeHom,
};
use lipschitz_baire::prefix::{Alphabet, Point, Word};

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();

    // the parity map collapses 0 and 2 but never contracts distances
    let parity = TreeHom::parity(Alphabet::Finite(3));
    let s = Word::from([0, 1, 2]);
    lines.push(format!("parity({s}) = {}", parity.apply(&s)?));
    let la = level_analysis(&compose_homs(TreeHom::identity(Alphabet::BINARY), TreeHom::parity(Alphabet::BINARY))?, 3)?;
    lines.push(format!("parity on 2^≤3 is an isometry to depth 3: {}", la.isometry_to_depth));

    let shift = TreeHom::prepend(Alphabet::BINARY, Word::from([1]))?;
    let x = Point::new(Word::from([0, 1]), 0);
    lines.push(format!("prepend 1 to {x}: {}", shift.apply_point(&x)?));

    // finite maps, and the homomorphism they induce
    let m = PartialMap::from_pairs([
        (Point::new(Word::from([0]), 0), Point::new(Word::from([5]), 0)),
        (Point::new(Word::from([1]), 0), Point::new(Word::from([6, 1]), 0)),
    ])?;
    lines.push(format!(
        "lipschitz: {}, isometry: {}",
        check_lipschitz(&m).is_ok(),
        check_isometry(&m).is_ok()
    ));
    let h = induced_hom(&m, 2)?;
    lines.push(format!("induced hom sends [1,0] to {}", h.apply(&Word::from([1, 0]))?));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> lipschitz_baire::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
