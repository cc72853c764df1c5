//! Transaction sequences and the two exact-representation algorithms,
//! Bit Matcher and Niagara.
//!
//! A transaction `[i ->_l j]` moves `2^l` from target `i` to target `j`. Read
//! backwards a sequence builds a partition: each target ends up with what it
//! sent minus what it received.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::partition::{bitlex_cmp, pow2, Partition, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Receiver {
    Target(usize),
    /// The terminal transaction; corresponds to the match-all rule.
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transaction {
    pub sender: usize,
    pub receiver: Receiver,
    pub level: u32,
}

impl Transaction {
    pub fn new(sender: usize, receiver: usize, level: u32) -> Self {
        Self { sender, receiver: Receiver::Target(receiver), level }
    }

    pub fn bottom(sender: usize, width: u32) -> Self {
        Self { sender, receiver: Receiver::Bottom, level: width }
    }

    pub fn is_bottom(&self) -> bool {
        self.receiver == Receiver::Bottom
    }

    pub fn size(&self) -> Weight {
        pow2(self.level)
    }
}

impl fmt::Display for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.receiver {
            Receiver::Target(j) => write!(f, "[{} ->_{} {}]", self.sender, self.level, j),
            Receiver::Bottom => write!(f, "[{} ->_{} BOT]", self.sender, self.level),
        }
    }
}

impl FromStr for Transaction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| format!("`{s}` is not bracketed"))?;
        let mut it = inner.split_whitespace();
        let (Some(i), Some(arrow), Some(j), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(format!("`{s}` is not of the form [i ->_l j]"));
        };
        let level = arrow
            .strip_prefix("->_")
            .ok_or_else(|| format!("bad arrow `{arrow}`"))?
            .parse::<u32>()
            .map_err(|e| e.to_string())?;
        let sender = i.parse::<usize>().map_err(|e| e.to_string())?;
        let receiver = if j == "BOT" {
            Receiver::Bottom
        } else {
            Receiver::Target(j.parse::<usize>().map_err(|e| e.to_string())?)
        };
        Ok(Self { sender, receiver, level })
    }
}

/// An ordered list of transactions over a `2^W` space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionSequence {
    transactions: Vec<Transaction>,
    width: u32,
}

impl TransactionSequence {
    /// Checks the structural invariants: exactly one terminal transaction, of
    /// level `W`, no self transfers and no level above `W`.
    pub fn new(transactions: Vec<Transaction>, width: u32) -> Result<Self> {
        let mut bottoms = 0;
        for t in &transactions {
            if t.level > width {
                return Err(Error::MalformedSequence(format!("{t} exceeds width {width}")));
            }
            match t.receiver {
                Receiver::Bottom if t.level != width => {
                    return Err(Error::MalformedSequence(format!("{t} must have level {width}")))
                }
                Receiver::Bottom => bottoms += 1,
                Receiver::Target(j) if j == t.sender => {
                    return Err(Error::MalformedSequence(format!("{t} is a self transfer")))
                }
                Receiver::Target(_) => {}
            }
        }
        if bottoms != 1 {
            return Err(Error::MalformedSequence(format!(
                "expected one terminal transaction, found {bottoms}"
            )));
        }
        Ok(Self { transactions, width })
    }

    fn new_unchecked(transactions: Vec<Transaction>, width: u32) -> Self {
        debug_assert!(Self::new(transactions.clone(), width).is_ok());
        Self { transactions, width }
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn bottom(&self) -> &Transaction {
        self.transactions.iter().find(|t| t.is_bottom()).expect("validated on construction")
    }

    /// Largest index mentioned by any transaction.
    pub fn max_index(&self) -> usize {
        self.transactions
            .iter()
            .map(|t| match t.receiver {
                Receiver::Target(j) => j.max(t.sender),
                Receiver::Bottom => t.sender,
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for TransactionSequence {
    /// One transaction per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.transactions {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl TransactionSequence {
    /// Parses the line-per-transaction debug format. The width is taken from
    /// the terminal transaction's level.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        for (lno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            ts.push(line.parse::<Transaction>().map_err(|msg| Error::Parse { line: lno + 1, msg })?);
        }
        let width = ts
            .iter()
            .find(|t| t.is_bottom())
            .map(|t| t.level)
            .ok_or_else(|| Error::MalformedSequence("no terminal transaction".into()))?;
        Self::new(ts, width)
    }
}

/// The partition a sequence induces over `k` targets.
pub fn induced_partition(seq: &TransactionSequence, k: usize) -> Result<Partition> {
    let parts = induced_parts(seq.transactions(), k, seq.width())?;
    Partition::new(parts, seq.width())
}

pub(crate) fn induced_parts(ts: &[Transaction], k: usize, width: u32) -> Result<Vec<Weight>> {
    let mut net = vec![0i128; k];
    for t in ts {
        let size = t.size() as i128;
        *net.get_mut(t.sender).ok_or_else(|| out_of_range(t, k))? += size;
        if let Receiver::Target(j) = t.receiver {
            *net.get_mut(j).ok_or_else(|| out_of_range(t, k))? -= size;
        }
    }
    if let Some(i) = net.iter().position(|&v| v < 0) {
        return Err(Error::MalformedSequence(format!("target {i} has negative net flow {}", net[i])));
    }
    let parts: Vec<Weight> = net.into_iter().map(|v| v as Weight).collect();
    if parts.iter().sum::<Weight>() != pow2(width) {
        return Err(Error::MalformedSequence(format!("net flow does not sum to 2^{width}")));
    }
    Ok(parts)
}

fn out_of_range(t: &Transaction, k: usize) -> Error {
    Error::MalformedSequence(format!("{t} references a target outside 0..{k}"))
}

/// Bit Matcher: clears bits from the least significant upwards, pairing the
/// bit-lex smaller half of the weights holding bit `l` with the larger half.
/// The result is a shortest sequence.
pub fn bit_matcher(p: &Partition) -> TransactionSequence {
    TransactionSequence::new_unchecked(bit_matcher_parts(p.parts(), p.width()), p.width())
}

/// Bit Matcher on raw weights; `width` may be 0 here.
pub(crate) fn bit_matcher_parts(parts: &[Weight], width: u32) -> Vec<Transaction> {
    let mut cur = parts.to_vec();
    let mut out = Vec::new();
    let mut holders: Vec<usize> = Vec::with_capacity(parts.len());
    for level in 0..width {
        let bit = pow2(level);
        holders.clear();
        holders.extend((0..cur.len()).filter(|&i| cur[i] & bit != 0));
        assert!(holders.len().is_multiple_of(2), "odd number of weights with bit {level} set");
        holders.sort_by(|&a, &b| bitlex_cmp(cur[a], cur[b]).then(a.cmp(&b)));
        let half = holders.len() / 2;
        for r in 0..half {
            let (lo, hi) = (holders[r], holders[half + r]);
            cur[lo] -= bit;
            cur[hi] += bit;
            out.push(Transaction::new(lo, hi, level));
        }
        debug_assert!(cur.iter().all(|&v| v % (bit << 1) == 0));
    }
    let top = cur
        .iter()
        .position(|&v| v == pow2(width))
        .expect("bit matcher must end with a single full weight");
    out.push(Transaction::bottom(top, width));
    out
}

/// `λ(P)`, the length of a shortest sequence inducing `P`, which is also the
/// size of the smallest prefix table realizing it.
///
/// ```
/// use tcamsplit::{complexity, Partition};
/// let p = Partition::new(vec![4, 1, 1, 1, 1], 3).unwrap();
/// assert_eq!(complexity(&p), 5);
/// ```
pub fn complexity(p: &Partition) -> usize {
    complexity_parts(p.parts(), p.width())
}

/// Counts Bit Matcher's transactions without materializing them.
pub(crate) fn complexity_parts(parts: &[Weight], width: u32) -> usize {
    let mut cur = parts.to_vec();
    let mut count = 1;
    let mut holders: Vec<usize> = Vec::with_capacity(parts.len());
    for level in 0..width {
        let bit = pow2(level);
        holders.clear();
        holders.extend((0..cur.len()).filter(|&i| cur[i] & bit != 0));
        if holders.is_empty() {
            continue;
        }
        assert!(holders.len().is_multiple_of(2), "odd number of weights with bit {level} set");
        holders.sort_unstable_by(|&a, &b| bitlex_cmp(cur[a], cur[b]).then(a.cmp(&b)));
        let half = holders.len() / 2;
        for r in 0..half {
            cur[holders[r]] -= bit;
            cur[holders[half + r]] += bit;
        }
        count += half;
    }
    count
}

/// Niagara's greedy construction.
///
/// With `stop_after = Some(n)` the construction gives up and returns `None` as
/// soon as the sequence would need more than `n` transactions, so deciding
/// `λ(P) <= n` costs `O(k + n lg k)`.
pub fn niagara(p: &Partition, stop_after: Option<usize>) -> Option<TransactionSequence> {
    niagara_parts(p.parts(), p.width(), stop_after)
        .map(|ts| TransactionSequence::new_unchecked(ts, p.width()))
}

pub(crate) fn niagara_parts(parts: &[Weight], width: u32, stop_after: Option<usize>) -> Option<Vec<Transaction>> {
    let limit = stop_after.unwrap_or(usize::MAX);
    if limit == 0 {
        return None;
    }
    let mut r = Residual::new(parts);
    let first = r.argmax();
    r.set(first, r.values[first] - pow2(width) as i128);
    let mut out = vec![Transaction::bottom(first, width)];

    while r.nonzero > 0 {
        if out.len() >= limit {
            return None;
        }
        let (i, j) = (r.argmax(), r.argmin());
        let (ri, rj) = (r.values[i], r.values[j]);
        debug_assert!(ri > 0 && rj < 0);
        let h = niagara_step(ri, rj, width);
        let size = 1i128 << h;
        r.set(i, ri - size);
        r.set(j, rj + size);
        out.push(Transaction::new(i, j, h));
    }
    Some(out)
}

/// Residual vector with ordered indexes for argmax/argmin; ties go to the
/// lowest index in both directions.
struct Residual {
    values: Vec<i128>,
    by_max: BTreeSet<(i128, Reverse<usize>)>,
    by_min: BTreeSet<(i128, usize)>,
    nonzero: usize,
}

impl Residual {
    fn new(parts: &[Weight]) -> Self {
        let values: Vec<i128> = parts.iter().map(|&v| v as i128).collect();
        let by_max = values.iter().enumerate().map(|(i, &v)| (v, Reverse(i))).collect();
        let by_min = values.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let nonzero = values.iter().filter(|&&v| v != 0).count();
        Self { values, by_max, by_min, nonzero }
    }

    fn argmax(&self) -> usize {
        self.by_max.iter().next_back().expect("k >= 1").1 .0
    }

    fn argmin(&self) -> usize {
        self.by_min.iter().next().expect("k >= 1").1
    }

    fn set(&mut self, i: usize, v: i128) {
        let old = self.values[i];
        self.by_max.remove(&(old, Reverse(i)));
        self.by_min.remove(&(old, i));
        self.by_max.insert((v, Reverse(i)));
        self.by_min.insert((v, i));
        self.values[i] = v;
        self.nonzero = self.nonzero + (v != 0) as usize - (old != 0) as usize;
    }
}

/// The largest `h <= width` minimizing `|a - 2^h| + |b + 2^h|`.
fn niagara_step(a: i128, b: i128, width: u32) -> u32 {
    let cost = |h: u32| (a - (1i128 << h)).abs() + (b + (1i128 << h)).abs();
    // The cost is convex in 2^h and flat between min(a, -b) and max(a, -b), so
    // only powers adjacent to that interval can be minimizers.
    let lo = a.min(-b);
    let hi = a.max(-b);
    let floor_lg = |v: i128| 127 - v.leading_zeros();
    let candidates = [floor_lg(lo), floor_lg(hi), floor_lg(hi) + 1];
    let mut best = 0;
    let mut best_cost = cost(0);
    for h in candidates.into_iter().map(|h| h.min(width)) {
        let c = cost(h);
        if c < best_cost || (c == best_cost && h > best) {
            best = h;
            best_cost = c;
        }
    }
    debug_assert_eq!(
        (0..=width).rev().min_by_key(|&h| cost(h)).map(cost),
        Some(best_cost)
    );
    best
}

/// Decides `λ(P) <= n`, in `O(min(Wk, k + n lg k))`.
pub fn fits_in(p: &Partition, n: usize) -> bool {
    fits_in_parts(p.parts(), p.width(), n)
}

pub(crate) fn fits_in_parts(parts: &[Weight], width: u32, n: usize) -> bool {
    let k = parts.len();
    let lg_k = (usize::BITS - k.leading_zeros()) as usize;
    if n.saturating_mul(lg_k.max(1)) < (width as usize).saturating_mul(k) {
        niagara_parts(parts, width, Some(n)).is_some()
    } else {
        complexity_parts(parts, width) <= n
    }
}

/// The Niagara truncation heuristic: keep the terminal transaction and the
/// `n - 1` widest others, then read off the induced partition.
///
/// Among transactions of equal level the earlier ones are kept, so on a
/// Niagara sequence (whose levels never increase) the result is the partition
/// induced by its first `n` transactions. `n` larger than the sequence keeps
/// everything.
pub fn truncate_to_widest(seq: &TransactionSequence, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Domain("truncation needs at least one rule".into()));
    }
    let mut order: Vec<usize> = (0..seq.len()).collect();
    let ts = seq.transactions();
    order.sort_by_key(|&i| (!ts[i].is_bottom(), Reverse(ts[i].level), i));
    let mut kept: Vec<usize> = order.into_iter().take(n).collect();
    kept.sort_unstable();
    let sub: Vec<Transaction> = kept.into_iter().map(|i| ts[i]).collect();
    let k = seq.max_index() + 1;
    let parts = induced_parts(&sub, k, seq.width())?;
    Partition::new(parts, seq.width())
}

/// Truncation with an explicit number of targets, so the result has the same
/// shape as the partition the sequence was built from.
pub fn truncate_niagara(p: &Partition, n: usize) -> Result<Partition> {
    let seq = niagara(p, None).expect("no budget");
    let short = truncate_to_widest(&seq, n)?;
    let mut parts = short.into_parts();
    parts.resize(p.k(), 0);
    Partition::new(parts, p.width())
}
