//! Brute-force references for small instances.
//!
//! Nothing here shares code with the fast solvers beyond Bit Matcher's rule
//! count, so agreement between the two is meaningful.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::approx::ApproxResult;
use crate::error::{Error, Result};
use crate::lifting::{Lifting, LiftingInstance};
use crate::partition::{distance, pow2, DistanceKind, ErrorValue, Partition, PartitionLike, Weight};
use crate::sequence::complexity_parts;

/// Cap on how many candidates an oracle may enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_states: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_states: 2_000_000 }
    }
}

impl OracleBudget {
    fn admit(&self, states: Option<u128>, what: &str) -> Result<()> {
        match states {
            Some(s) if s <= self.max_states => Ok(()),
            Some(s) => Err(Error::Refused(format!("{what}: {s} states exceed {}", self.max_states))),
            None => Err(Error::Refused(format!("{what}: state count overflows"))),
        }
    }
}

/// `C(n, r)`, or `None` on overflow.
fn binomial(n: u128, r: u128) -> Option<u128> {
    let r = r.min(n.saturating_sub(r));
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Every composition of `2^W` into `k` non-negative parts with its rule count.
#[derive(Debug, Clone)]
pub struct CompositionSpace {
    width: u32,
    k: usize,
    values: Vec<Weight>,
    rules: Vec<usize>,
}

impl CompositionSpace {
    pub fn count(k: usize, width: u32) -> Option<u128> {
        if k == 0 || width > 64 {
            return None;
        }
        binomial(pow2(width) + k as u128 - 1, k as u128 - 1)
    }

    pub fn new(k: usize, width: u32, budget: &OracleBudget) -> Result<Self> {
        budget.admit(Self::count(k, width), "compositions")?;
        let total = pow2(width);
        let mut values = Vec::new();
        let mut rules = Vec::new();
        let mut cur = vec![0; k];
        cur[k - 1] = total;
        loop {
            values.extend_from_slice(&cur);
            rules.push(complexity_parts(&cur, width));
            if k == 1 {
                break;
            }
            // Next composition in lexicographic order; the last part absorbs the rest.
            if cur[k - 1] > 0 {
                cur[k - 2] += 1;
                cur[k - 1] -= 1;
                continue;
            }
            let i = (0..k - 1).rev().find(|&i| cur[i] > 0).expect("sum is positive");
            if i == 0 {
                break;
            }
            let v = cur[i];
            cur[i] = 0;
            cur[i - 1] += 1;
            cur[k - 1] = v - 1;
        }
        Ok(Self { width, k, values, rules })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Weight], usize)> + '_ {
        self.values.chunks_exact(self.k).zip(self.rules.iter().copied())
    }

    pub fn max_rules(&self) -> usize {
        self.rules.iter().copied().max().unwrap_or(0)
    }

    /// Entry `n - 1` is the smallest error reachable with at most `n` rules
    /// and the index of a composition attaining it, for `n` up to
    /// [`max_rules`](Self::max_rules).
    pub fn profile<T: PartitionLike + ?Sized>(
        &self,
        target: &T,
        kind: DistanceKind,
    ) -> Result<Vec<(ErrorValue, usize)>> {
        if target.k() != self.k || target.width() != self.width {
            return Err(Error::Domain("target shape differs from the enumerated space".into()));
        }
        let mut best: Vec<Option<(ErrorValue, usize)>> = vec![None; self.max_rules() + 1];
        match target.integer_parts() {
            Some(p) => self.integer_profile(p, kind, &mut best)?,
            None => {
                for (idx, (c, r)) in self.iter().enumerate() {
                    let cand = Partition::new(c.to_vec(), self.width)?;
                    let d = distance(&cand, target, kind)?;
                    if best[r].as_ref().is_none_or(|(b, _)| d < *b) {
                        best[r] = Some((d, idx));
                    }
                }
            }
        }
        let mut out: Vec<(ErrorValue, usize)> = Vec::with_capacity(best.len());
        let mut run: Option<(ErrorValue, usize)> = None;
        // Every space contains a single-rule composition, so `run` is set from n = 1 on.
        for entry in best.into_iter().skip(1) {
            if let Some((d, idx)) = entry {
                if run.as_ref().is_none_or(|(b, _)| d < *b) {
                    run = Some((d, idx));
                }
            }
            if let Some(r) = &run {
                out.push(r.clone());
            }
        }
        Ok(out)
    }

    /// Integer arithmetic for integer targets; relative errors are compared
    /// as fractions.
    fn integer_profile(
        &self,
        p: &[Weight],
        kind: DistanceKind,
        best: &mut [Option<(ErrorValue, usize)>],
    ) -> Result<()> {
        if kind.is_relative() && p.contains(&0) {
            return Err(Error::Domain("relative error needs positive parts".into()));
        }
        // (numerator, denominator) per rule count.
        let mut keys: Vec<Option<(Weight, Weight, usize)>> = vec![None; best.len()];
        for (idx, (c, r)) in self.iter().enumerate() {
            let (num, den) = match kind {
                DistanceKind::Linf => (c.iter().zip(p).map(|(&a, &b)| a.abs_diff(b)).max().unwrap(), 1),
                DistanceKind::LinfPlus => (c.iter().zip(p).map(|(&a, &b)| a.saturating_sub(b)).max().unwrap(), 1),
                DistanceKind::LinfRelPlus | DistanceKind::LinfRel => {
                    let mut acc: (Weight, Weight) = (0, 1);
                    for (&a, &b) in c.iter().zip(p) {
                        let dev = if kind == DistanceKind::LinfRel { a.abs_diff(b) } else { a.saturating_sub(b) };
                        if dev * acc.1 > acc.0 * b {
                            acc = (dev, b);
                        }
                    }
                    acc
                }
            };
            let better = match keys[r] {
                None => true,
                Some((bn, bd, _)) => (num * bd).cmp(&(bn * den)) == Ordering::Less,
            };
            if better {
                keys[r] = Some((num, den, idx));
            }
        }
        for (slot, key) in best.iter_mut().zip(keys) {
            *slot = key.map(|(n, d, idx)| (ErrorValue::from_ratio(n, d), idx));
        }
        Ok(())
    }

    pub fn partition(&self, idx: usize) -> Partition {
        Partition::new(self.values[idx * self.k..(idx + 1) * self.k].to_vec(), self.width)
            .expect("enumerated compositions are partitions")
    }
}

/// Exhaustive closest partition with at most `n` rules.
pub fn brute_force_closest<T: PartitionLike + ?Sized>(
    target: &T,
    n: usize,
    kind: DistanceKind,
    budget: &OracleBudget,
) -> Result<ApproxResult> {
    if n == 0 {
        return Err(Error::Domain("at least one rule is needed".into()));
    }
    let space = CompositionSpace::new(target.k(), target.width(), budget)?;
    let profile = space.profile(target, kind)?;
    let (_, idx) = &profile[n.min(profile.len()) - 1];
    ApproxResult::new(space.partition(*idx), target, kind)
}

/// Exhaustive lifting: every `Y` in the box summing to `2^W`.
pub fn brute_force_lifting(inst: &LiftingInstance, budget: &OracleBudget) -> Result<Option<Lifting>> {
    let states = inst
        .capacities()
        .iter()
        .try_fold(1u128, |acc, &c| acc.checked_mul(c.checked_add(1)?));
    budget.admit(states, "lifting box")?;
    let (x, c, width) = (inst.weights(), inst.capacities(), inst.width());
    let total = pow2(width);
    // Largest sum the coordinates from i onward can still add.
    let mut room = vec![0; x.len() + 1];
    for i in (0..x.len()).rev() {
        room[i] = room[i + 1] + x[i] + c[i];
    }
    let mut y = Vec::with_capacity(x.len());
    let mut best = None;
    search(x, c, width, total, &room, &mut y, &mut best);
    Ok(best.map(|(_, y)| Lifting::new(y, width)))
}

/// Depth-first over the box, pruning prefixes that cannot reach `2^W`.
fn search(
    x: &[Weight],
    c: &[Weight],
    width: u32,
    left: Weight,
    room: &[Weight],
    y: &mut Vec<Weight>,
    best: &mut Option<(usize, Vec<Weight>)>,
) {
    let i = y.len();
    if i == x.len() {
        if left == 0 {
            let r = complexity_parts(y, width);
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                *best = Some((r, y.clone()));
            }
        }
        return;
    }
    for v in x[i]..=x[i] + c[i] {
        if v > left {
            break;
        }
        if left - v > room[i + 1] {
            continue;
        }
        y.push(v);
        search(x, c, width, left - v, room, y, best);
        y.pop();
    }
}

/// Largest width and target count [`brute_force_complexity`] accepts.
pub const COMPLEXITY_GUARD: (u32, usize) = (3, 3);

/// Shortest transaction sequence by breadth-first search.
///
/// A state is the remaining imbalance per target, bounded by `±2^W`, plus
/// whether the `⊥` transaction has been spent. Each step undoes one
/// transaction.
pub fn brute_force_complexity(p: &Partition) -> Result<usize> {
    let (w, k) = (p.width(), p.k());
    if w > COMPLEXITY_GUARD.0 || k > COMPLEXITY_GUARD.1 {
        return Err(Error::Refused(format!("W={w}, k={k} exceeds the search guard")));
    }
    let top = pow2(w) as i64;
    let base = (2 * top + 1) as usize;
    let states = base.pow(k as u32) * 2;
    let encode = |v: &[i64], used: bool| -> usize {
        v.iter().fold(0, |acc, &x| acc * base + (x + top) as usize) * 2 + used as usize
    };
    let decode = |mut s: usize| -> (Vec<i64>, bool) {
        let used = s % 2 == 1;
        s /= 2;
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = (s % base) as i64 - top;
            s /= base;
        }
        (v, used)
    };
    let start: Vec<i64> = p.parts().iter().map(|&x| x as i64).collect();
    let goal = encode(&vec![0; k], true);
    let mut dist = vec![usize::MAX; states];
    let mut queue = VecDeque::new();
    let s0 = encode(&start, false);
    dist[s0] = 0;
    queue.push_back(s0);
    while let Some(s) = queue.pop_front() {
        if s == goal {
            return Ok(dist[s]);
        }
        let (v, used) = decode(s);
        let mut visit = |next: usize| {
            if dist[next] == usize::MAX {
                dist[next] = dist[s] + 1;
                queue.push_back(next);
            }
        };
        if !used {
            for i in 0..k {
                let mut u = v.clone();
                u[i] -= top;
                if u[i] >= -top {
                    visit(encode(&u, true));
                }
            }
        }
        for l in 0..=w {
            let size = 1i64 << l;
            for i in 0..k {
                for j in 0..k {
                    if i == j || v[i] - size < -top || v[j] + size > top {
                        continue;
                    }
                    let mut u = v.clone();
                    u[i] -= size;
                    u[j] += size;
                    visit(encode(&u, used));
                }
            }
        }
    }
    Err(Error::Infeasible("no sequence within the search bounds".into()))
}
