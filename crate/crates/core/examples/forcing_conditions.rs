// Finite conditions: compatibility, separating boxes, extension and
// antichains.

use lipschitz_baire::backforth::EventuallyConstant;
use lipschitz_baire::forcing::{
    box_profiles, compatible, extend_condition, find_antichain, in_px, Condition,
};
use lipschitz_baire::lipschitz::PartialMap;
use lipschitz_baire::prefix::{Alphabet, Point, Word};

fn pt<const N: usize>(stem: [u32; N]) -> Point {
    Point::new(Word::from(stem), 0)
}

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();
    let p = Condition::new(PartialMap::from_pairs([(pt([1]), pt([2])), (pt([3]), pt([4]))])?)?;
    let q = Condition::new(PartialMap::from_pairs([(pt([1]), pt([7]))])?)?;
    lines.push(format!("p and q compatible: {}", compatible(&p, &q)));

    for x in box_profiles(&p, 2).iter().take(2) {
        lines.push(format!("p lies in P'(x) for a {}-box profile: {}", x.len(), in_px(&p, x)));
    }

    let mut a_oracle = EventuallyConstant::new(Alphabet::Countable, 0, Some(3))?;
    let mut b_oracle = EventuallyConstant::new(Alphabet::Countable, 0, Some(3))?;
    let r = extend_condition(&p, &pt([1, 5]), &pt([9]), &mut a_oracle, &mut b_oracle)?;
    lines.push(format!("extension has {} pairs", r.len()));
    for (a, b) in r.map().pairs() {
        lines.push(format!("  {a} -> {b}"));
    }

    let family: Vec<Condition> = (0..5)
        .map(|i| Condition::new(PartialMap::from_pairs([(pt([0]), pt([i]))])?))
        .collect::<Result<_, _>>()?;
    let report = find_antichain(&family, 3);
    lines.push(format!("antichain {:?}, exact {}", report.members, report.exact));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> lipschitz_baire::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
