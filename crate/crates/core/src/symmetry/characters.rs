//! Irreducible characters of `S_l` by the Murnaghan–Nakayama rule.
//!
//! Rim hooks are handled on beta-sets: with `k` parts, `β_i = λ_i + k - 1 - i`.
//! Removing a rim hook of length `r` moves one bead from `β` to `β - r`
//! (when that position is empty) and contributes the sign
//! `(-1)^{#beads strictly between}`.

use std::cell::RefCell;
use std::collections::HashMap;

use super::partition::Partition;
use crate::error::{Error, Result};

type Key = (Vec<usize>, Vec<usize>);

thread_local! {
    static MEMO: RefCell<HashMap<Key, i64>> = RefCell::new(HashMap::new());
}

/// `χ_λ` evaluated on the class of cycle type `cycle_type`.
pub fn sym_group_character(lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
    if lambda.size() != cycle_type.size() {
        return Err(Error::InvalidArgument(format!(
            "character χ_{lambda} evaluated on a class of S_{}",
            cycle_type.size()
        )));
    }
    Ok(mn(lambda.parts(), cycle_type.parts()))
}

fn mn(lambda: &[usize], mu: &[usize]) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(v) = MEMO.with(|m| m.borrow().get(&key).copied()) {
        return v;
    }
    let r = mu[0];
    let rest = &mu[1..];
    let k = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + k - 1 - i).collect();
    let mut total = 0i64;
    for i in 0..k {
        if beta[i] < r {
            continue;
        }
        let target = beta[i] - r;
        if beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&b| b > target && b < beta[i]).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut nb = beta.clone();
        nb[i] = target;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let reduced: Vec<usize> = nb
            .iter()
            .enumerate()
            .map(|(j, &b)| b - (k - 1 - j))
            .filter(|&p| p > 0)
            .collect();
        total += sign * mn(&reduced, rest);
    }
    MEMO.with(|m| m.borrow_mut().insert(key, total));
    total
}

/// `d_λ = χ_λ(identity)`.
pub fn irrep_dimension(lambda: &Partition) -> i64 {
    mn(lambda.parts(), &vec![1; lambda.size()])
}
