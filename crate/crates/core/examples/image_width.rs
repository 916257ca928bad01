// Trees of small width stay small under homomorphisms.

use lipschitz_baire::gen::{random_hom_on_tree, random_width_tree, stream_rng, Stream};
use lipschitz_baire::prefix::{Alphabet, Point, Word};
use lipschitz_baire::slalom::{covered_by, has_width, hom_image_tree, tree_width, WidthProfile};

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();
    let corset = WidthProfile::CeilLog2;
    let mut rng = stream_rng(5, Stream::Trees);
    let tree = random_width_tree(&mut rng, &corset, 10);
    let h = random_hom_on_tree(&mut rng, &tree, Alphabet::BINARY, Alphabet::BINARY, 2);
    let image = hom_image_tree(&h, &tree)?;
    lines.push(format!("corset     {:?}", (0..=10).map(|n| corset.at(n)).collect::<Vec<_>>()));
    lines.push(format!("tree       {:?}", tree_width(&tree)));
    lines.push(format!("image      {:?}", tree_width(&image)));
    assert!(has_width(&tree, &corset) && has_width(&image, &corset));

    let x = Point::new(tree.level(10).next().cloned().unwrap_or_else(Word::empty), 0);
    lines.push(format!("{x} covered to depth 10: {}", covered_by(&x, &[tree], 10)));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> lipschitz_baire::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
