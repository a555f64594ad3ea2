//! The time-divergence objective evaluated directly on lassos, and the
//! parity of a lasso under a priority rule.

use timed_parity::reduction::{lifted_priority, next_carry};

/// One position of a play as the objective sees it: the three classes are
/// tick, blamed non-tick and unblamed non-tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub tick: bool,
    pub bl1: bool,
    pub omega: u32,
}

pub fn alphabet() -> Vec<Letter> {
    let classes = [(true, false), (false, true), (false, false)];
    classes
        .iter()
        .flat_map(|&(tick, bl1)| (0..=2).map(move |omega| Letter { tick, bl1, omega }))
        .collect()
}

/// Player 1 wins the lasso `u·v^ω`: with infinitely many ticks the largest
/// location priority seen infinitely often is even, and otherwise player 1 is
/// eventually never blamed.
pub fn objective(v: &[Letter]) -> bool {
    if v.iter().any(|l| l.tick) {
        v.iter().map(|l| l.omega).max().unwrap() % 2 == 0
    } else {
        v.iter().all(|l| !l.bl1)
    }
}

/// Parity of `u·v^ω` under `rule`, which maps (letter, carry) to a priority
/// and the next carry. Carries settle within one round of `v`, so the third
/// round shows the priorities seen infinitely often.
pub fn parity(u: &[Letter], v: &[Letter], rule: impl Fn(Letter, u32) -> (u32, u32)) -> bool {
    let mut carry = 0;
    let mut top = 0;
    for (i, &l) in u.iter().chain(v).chain(v).chain(v).enumerate() {
        let (p, next) = rule(l, carry);
        carry = next;
        if i >= u.len() + 2 * v.len() {
            top = top.max(p);
        }
    }
    top % 2 == 0
}

pub fn lifted(l: Letter, carry: u32) -> (u32, u32) {
    (
        lifted_priority(l.tick, l.bl1, l.omega, carry),
        next_carry(l.tick, l.omega, carry),
    )
}

/// Location priorities only count at ticks.
pub fn tick_only(l: Letter, _carry: u32) -> (u32, u32) {
    let p = if l.tick {
        l.omega + 2
    } else {
        u32::from(l.bl1)
    };
    (p, 0)
}

/// Every word of length `n` over `letters`.
pub fn words(letters: &[Letter], n: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |&l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

/// Calls `f(u, v)` for every lasso with `|u| + |v| <= max_len` and `v`
/// nonempty.
pub fn for_each_lasso(max_len: usize, mut f: impl FnMut(&[Letter], &[Letter])) {
    let letters = alphabet();
    for n in 1..=max_len {
        for w in words(&letters, n) {
            for split in 0..n {
                f(&w[..split], &w[split..]);
            }
        }
    }
}
