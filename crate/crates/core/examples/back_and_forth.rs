// Building an isometry between two countable dense sets step by step.

use lipschitz_baire::backforth::{bnf_run_state, bnf_run_until_failure, EventuallyConstant, FiniteSample};
use lipschitz_baire::lipschitz::check_isometry;
use lipschitz_baire::prefix::{Alphabet, Point, Word};

pub fn run_example() -> lipschitz_baire::Result<Vec<String>> {
    let mut lines = Vec::new();
    let mut a = EventuallyConstant::new(Alphabet::BINARY, 0, Some(7))?;
    let mut b = EventuallyConstant::new(Alphabet::BINARY, 1, Some(7))?;
    let state = bnf_run_state(&mut a, &mut b, 200)?;
    assert!(check_isometry(state.current()).is_ok());
    lines.push(format!(
        "eventually-0 to eventually-1 after {} steps: {} pairs",
        state.step(),
        state.current().len()
    ));
    for (x, y) in state.current().pairs().iter().take(4) {
        lines.push(format!("  {x} -> {y}"));
    }

    // a finite sample runs out of room in some cell
    let pts = |tail| (0..4).map(|i: u32| Point::new(Word::from([i % 2, i / 2]), tail)).collect::<Vec<_>>();
    let mut fa = FiniteSample::new(Alphabet::BINARY, pts(0))?;
    let mut fb = FiniteSample::new(Alphabet::BINARY, pts(1))?;
    let (partial, err) = bnf_run_until_failure(&mut fa, &mut fb, 10);
    lines.push(format!(
        "finite samples stop at step {:?}: {}",
        partial.map(|s| s.step()),
        err.map_or("no error".to_string(), |e| e.to_string())
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
