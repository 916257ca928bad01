// Points, canonical forms, log-distances and trees of words.

use lipschitz_baire::prefix::{distance, word_meet, LogDistance, Point, Word, WordTree};

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();
    // 0 1 1 1 ... written two ways
    let x = Point::new(Word::from([0, 1, 1]), 1);
    let y = Point::new(Word::from([0]), 1);
    assert_eq!(x, y);
    lines.push(format!("canonical form of 0 1 1 (1)^ω: {x}"));

    let z = Point::new(Word::from([0, 2]), 0);
    let d = distance(&x, &z);
    assert_eq!(d, LogDistance::Exponent(1));
    lines.push(format!("d({x}, {z}) = 2^-{}", d.exponent().unwrap()));

    let w = Point::constant(3);
    // strong triangle inequality: the closer of two sides bounds the third
    assert!(distance(&x, &w) >= distance(&x, &z).min(distance(&z, &w)));

    let meet = word_meet(&x.prefix(4), &z.prefix(4));
    lines.push(format!("meet of the 4-prefixes: {meet}"));

    let tree: WordTree = [x.prefix(3), z.prefix(3)].into_iter().collect();
    lines.push(format!("tree of both 3-prefixes has {} nodes, height {:?}", tree.len(), tree.height()));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> lipschitz_baire::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
