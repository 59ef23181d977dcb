//! Ready-made systems used in documentation, tests and the demo command.

use alloc::vec;
use alloc::vec::Vec;

use crate::ratio;
use crate::system::{CondensationSystem, Interval, Similitude, Validated};
use crate::Rational;

fn sim(s_num: i64, s_den: i64, o_num: i64, o_den: i64) -> Similitude {
    Similitude::new(ratio(s_num, s_den), ratio(o_num, o_den)).unwrap()
}

/// Outer family `x/4` and `x/4 + 3/4`.
pub fn demo_outer_maps() -> Vec<Similitude> {
    vec![sim(1, 4, 0, 1), sim(1, 4, 3, 4)]
}

/// Inner family `x/8 + 1/3` and `x/8 + 13/24`; support hull `[8/21, 13/21]`.
pub fn demo_inner_maps() -> Vec<Similitude> {
    vec![sim(1, 8, 1, 3), sim(1, 8, 13, 24)]
}

/// The standard demo system with uniform probabilities
/// `p = (1/3, 1/3, 1/3)`, `t = (1/2, 1/2)` and open set `(0, 1)`.
pub fn demo_system() -> CondensationSystem {
    demo_system_weighted(
        vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
        vec![ratio(1, 2), ratio(1, 2)],
    )
}

/// Demo maps with caller-chosen probabilities.
pub fn demo_system_weighted(
    outer_probs: Vec<Rational>,
    inner_probs: Vec<Rational>,
) -> CondensationSystem {
    CondensationSystem::new(
        demo_outer_maps(),
        outer_probs,
        demo_inner_maps(),
        inner_probs,
        Interval::open(ratio(0, 1), ratio(1, 1)).unwrap(),
    )
    .unwrap()
}

/// Demo maps with a caller-chosen open set (possibly failing validation).
pub fn demo_system_with_open_set(open_set: Interval) -> CondensationSystem {
    CondensationSystem::new(
        demo_outer_maps(),
        vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
        demo_inner_maps(),
        vec![ratio(1, 2), ratio(1, 2)],
        open_set,
    )
    .unwrap()
}

/// A system whose two dimension branches agree exactly at order two:
/// outer probabilities `(3/4, 1/8, 1/8)` over the demo maps give
/// `Σ (p_i s_i²)^{d/(d+2)} = 1` at `d = 1/3`, the same value the inner
/// branch attains at every order.
pub fn tie_system() -> CondensationSystem {
    demo_system_weighted(
        vec![ratio(3, 4), ratio(1, 8), ratio(1, 8)],
        vec![ratio(1, 2), ratio(1, 2)],
    )
}

/// Demo maps with skewed probabilities; scales stay uniform but the
/// stopping trees become ragged at larger depths.
pub fn skew_probability_system() -> CondensationSystem {
    demo_system_weighted(
        vec![ratio(1, 2), ratio(1, 6), ratio(1, 3)],
        vec![ratio(1, 3), ratio(2, 3)],
    )
}

/// A fully non-uniform system: outer scales `1/5` and `1/3`, inner scales
/// `1/6` and `1/9`, skewed probabilities. Its stopping antichains have
/// genuinely mixed depths.
pub fn skew_scale_system() -> CondensationSystem {
    CondensationSystem::new(
        vec![sim(1, 5, 0, 1), sim(1, 3, 2, 3)],
        vec![ratio(1, 4), ratio(1, 2), ratio(1, 4)],
        vec![sim(1, 6, 1, 3), sim(1, 9, 1, 2)],
        vec![ratio(3, 5), ratio(2, 5)],
        Interval::open(ratio(0, 1), ratio(1, 1)).unwrap(),
    )
    .unwrap()
}

/// A system where the outer branch stays strictly below the inner branch at
/// every order: outer scales `1/9` with small probabilities keep the outer
/// dimension under `ln 2 / ln 9 < 1/3` for all `r`.
pub fn no_crossover_system() -> CondensationSystem {
    CondensationSystem::new(
        vec![sim(1, 9, 0, 1), sim(1, 9, 8, 9)],
        vec![ratio(9, 10), ratio(1, 20), ratio(1, 20)],
        demo_inner_maps(),
        vec![ratio(1, 2), ratio(1, 2)],
        Interval::open(ratio(0, 1), ratio(1, 1)).unwrap(),
    )
    .unwrap()
}

/// Classical middle-third family `x/3`, `x/3 + 2/3` with equal weights,
/// used as a control for the plain self-similar theory.
pub fn cantor_maps() -> Vec<Similitude> {
    vec![sim(1, 3, 0, 1), sim(1, 3, 2, 3)]
}

/// Validates the demo system; panics only if the fixture itself is broken.
pub fn demo_validated() -> Validated {
    Validated::new(demo_system()).unwrap()
}
