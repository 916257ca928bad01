// Slaloms read off a homomorphism over a bounded sample, and merging them.

use lipschitz_baire::gen::{random_hom_on_tree, stream_rng, Stream};
use lipschitz_baire::prefix::{Alphabet, Point, Word, WordTree};
use lipschitz_baire::slalom::{
    captures, merge_slaloms, slalom_from_hom, slalom_width_ok, BoundedDenseSample, CaptureMode, WidthProfile,
};

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();
    let depth = 6;
    let mut rng = stream_rng(11, Stream::Slaloms);
    let mut pieces = Vec::new();
    for s in [Word::empty(), Word::from([1]), Word::from([0, 3])] {
        let points: Vec<Point> = (0..6u32)
            .map(|i| Point::new(s.concat(&Word::from([i & 1, (i >> 1) & 1])), i >> 2))
            .collect();
        let sample = BoundedDenseSample::new(s.clone(), points)?;
        let tree: WordTree = sample.points().iter().map(|x| x.prefix(depth)).collect();
        let h = random_hom_on_tree(&mut rng, &tree, Alphabet::Countable, Alphabet::Countable, 100);
        let phi = slalom_from_hom(&h, &sample, depth)?;
        lines.push(format!("φ_{s} widths {:?}", phi.widths()));
        for x in sample.points() {
            let image = Point::new(h.apply(&x.prefix(depth))?, 0);
            assert!(captures(&phi, &image, CaptureMode::Total));
        }
        pieces.push((s, phi));
    }
    let merged = merge_slaloms(&pieces);
    lines.push(format!(
        "merged widths {:?}, within n·2^(n+1): {}",
        merged.widths(),
        slalom_width_ok(&merged, &WidthProfile::NTimesPowTwo)
    ));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> lipschitz_baire::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
