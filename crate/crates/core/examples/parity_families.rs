// Odd and even families, and the certificate that neither embeds
// isometrically into the other.

use lipschitz_baire::parity::{
    cell_words_up_to, certify_no_isometry, check_parity_invariant, first_diff_parity, gen_family, FamilySpec, Parity,
};
use lipschitz_baire::prefix::Alphabet;

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();
    let cells = cell_words_up_to(2, 2);
    let spec = FamilySpec::new(Alphabet::BINARY, 10);
    let odd = gen_family(Parity::Odd, &cells, 8, spec, 1)?;
    let even = gen_family(Parity::Even, &cells, 8, spec, 1)?;
    assert!(check_parity_invariant(&odd).is_none());
    assert!(check_parity_invariant(&even).is_none());
    let cell = &odd.cells[3];
    lines.push(format!(
        "odd cell {}: first differences are {:?}",
        cell.s,
        first_diff_parity(&cell.points[0], &cell.points[1])?
    ));
    for (name, src, dst) in [("odd -> even", &odd, &even), ("even -> odd", &even, &odd)] {
        let cert = certify_no_isometry(src, dst)?;
        lines.push(format!(
            "{name}: {} pairs checked, {} isometric",
            cert.pairs_checked, cert.isometric_pairs
        ));
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> lipschitz_baire::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
