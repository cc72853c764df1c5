//! The lifting problem: raise weights `X` within capacities `C` until they sum
//! to `2^W`, minimizing the complexity of the result.
//!
//! Three special cases have exact polynomial solvers: capacities in `{0,1}`,
//! capacities in `{1,2,3}`, and zero weights with arbitrary capacities.
//! Infeasible instances yield `Ok(None)`; `Err` is reserved for inputs outside
//! a solver's domain.

use log::trace;

use crate::error::{Error, Result};
use crate::partition::{bitlex_cmp, pow2, Partition, Weight, MAX_WIDTH};
use crate::sequence::complexity_parts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingInstance {
    weights: Vec<Weight>,
    capacities: Vec<Weight>,
    width: u32,
}

impl LiftingInstance {
    /// `width` may be 0 here; reduced instances shrink the width.
    pub fn new(weights: Vec<Weight>, capacities: Vec<Weight>, width: u32) -> Result<Self> {
        if weights.len() != capacities.len() {
            return Err(Error::Domain(format!(
                "{} weights but {} capacities",
                weights.len(),
                capacities.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::Domain("empty lifting instance".into()));
        }
        if width > MAX_WIDTH {
            return Err(Error::Domain(format!("width {width} exceeds {MAX_WIDTH}")));
        }
        Ok(Self { weights, capacities, width })
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn capacities(&self) -> &[Weight] {
        &self.capacities
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// `2^W - Σx`. Negative when the weights already overshoot.
    pub fn excess(&self) -> i128 {
        pow2(self.width) as i128 - self.weights.iter().sum::<Weight>() as i128
    }

    /// `Σx <= 2^W <= Σ(x + c)`.
    pub fn is_feasible(&self) -> bool {
        let top: Weight = self.weights.iter().zip(&self.capacities).map(|(x, c)| x + c).sum();
        self.excess() >= 0 && top >= pow2(self.width)
    }

    pub fn admits(&self, y: &[Weight]) -> bool {
        y.len() == self.k()
            && y.iter().sum::<Weight>() == pow2(self.width)
            && y
                .iter()
                .zip(self.weights.iter().zip(&self.capacities))
                .all(|(&y, (&x, &c))| x <= y && y <= x + c)
    }
}

/// A vector summing to `2^W`, the answer to a lifting instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lifting {
    values: Vec<Weight>,
    width: u32,
}

impl Lifting {
    pub(crate) fn new(values: Vec<Weight>, width: u32) -> Self {
        debug_assert_eq!(values.iter().sum::<Weight>(), pow2(width));
        Self { values, width }
    }

    pub fn values(&self) -> &[Weight] {
        &self.values
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn into_values(self) -> Vec<Weight> {
        self.values
    }

    /// `λ(Y)`; scaling by powers of two leaves it unchanged.
    pub fn complexity(&self) -> usize {
        complexity_parts(&self.values, self.width)
    }

    /// Multiplies every value by `2^shift`, widening accordingly.
    pub fn scaled(self, shift: u32) -> Self {
        Self {
            values: self.values.into_iter().map(|v| v << shift).collect(),
            width: self.width + shift,
        }
    }

    pub fn to_partition(&self) -> Result<Partition> {
        Partition::new(self.values.clone(), self.width)
    }
}

/// Capacities in `{0,1}`: lift the `e(X)` bit-lex largest weights that have
/// capacity. Equal weights are lifted lowest index first.
pub fn lift_cap01(inst: &LiftingInstance) -> Result<Option<Lifting>> {
    if let Some(c) = inst.capacities.iter().find(|&&c| c > 1) {
        return Err(Error::Domain(format!("capacity {c} outside {{0, 1}}")));
    }
    if !inst.is_feasible() {
        return Ok(None);
    }
    Ok(Some(cap01(&inst.weights, &inst.capacities, inst.width)))
}

/// Assumes a feasible instance with capacities in `{0,1}`.
fn cap01(weights: &[Weight], caps: &[Weight], width: u32) -> Lifting {
    let excess = (pow2(width) - weights.iter().sum::<Weight>()) as usize;
    let mut y = weights.to_vec();
    if excess > 0 {
        let mut open: Vec<usize> = (0..weights.len()).filter(|&i| caps[i] == 1).collect();
        assert!(excess <= open.len(), "infeasible cap01 instance");
        if excess < open.len() {
            open.select_nth_unstable_by(excess - 1, |&a, &b| {
                bitlex_cmp(weights[b], weights[a]).then(a.cmp(&b))
            });
        }
        for &i in &open[..excess] {
            y[i] += 1;
        }
    }
    Lifting::new(y, width)
}

/// Capacities in `{1,2,3}`, solved in three phases: spend a small excess on
/// odd weights, otherwise even out the odd weights and either halve the
/// problem or pre-lift every weight with room for two.
pub fn lift_cap123(inst: &LiftingInstance) -> Result<Option<Lifting>> {
    if let Some(c) = inst.capacities.iter().find(|&&c| !(1..=3).contains(&c)) {
        return Err(Error::Domain(format!("capacity {c} outside {{1, 2, 3}}")));
    }
    if !inst.is_feasible() {
        return Ok(None);
    }
    Ok(Some(cap123(&inst.weights, &inst.capacities, inst.width)))
}

fn cap123(x: &[Weight], c: &[Weight], width: u32) -> Lifting {
    let excess = pow2(width) - x.iter().sum::<Weight>();
    if width == 0 {
        // Everything is λ = 1; give the unit to the first index if needed.
        let mut y = x.to_vec();
        if excess == 1 {
            y[0] += 1;
        }
        return Lifting::new(y, 0);
    }
    let odd = x.iter().filter(|&&v| v % 2 == 1).count() as Weight;
    if excess <= odd {
        trace!("cap123: excess {excess} <= {odd} odd weights, lifting odd weights");
        let ones = vec![1; x.len()];
        return cap01(x, &ones, width);
    }
    let (x1, c1): (Vec<Weight>, Vec<Weight>) = x
        .iter()
        .zip(c)
        .map(|(&x, &c)| if x % 2 == 1 { (x + 1, c - 1) } else { (x, c) })
        .unzip();
    debug_assert!(x1.iter().all(|v| v % 2 == 0));
    let excess1 = pow2(width) - x1.iter().sum::<Weight>();
    let roomy = c1.iter().filter(|&&v| v >= 2).count() as Weight;
    if excess1 < 2 * roomy {
        trace!("cap123: excess {excess1} < 2 * {roomy}, halving");
        let half_x: Vec<Weight> = x1.iter().map(|v| v / 2).collect();
        let half_c: Vec<Weight> = c1.iter().map(|v| v / 2).collect();
        let y = cap01(&half_x, &half_c, width - 1);
        return y.scaled(1);
    }
    trace!("cap123: excess {excess1} >= 2 * {roomy}, pre-lifting by two");
    let (x2, c2): (Vec<Weight>, Vec<Weight>) = x1
        .iter()
        .zip(&c1)
        .map(|(&x, &c)| if c >= 2 { (x + 2, c - 2) } else { (x, c) })
        .unzip();
    cap01(&x2, &c2, width)
}

/// All weights zero, arbitrary capacities (the one-sided reductions).
///
/// Finds the smallest `m >= 1` with `Σ⌊c/2^m⌋ <= 2^(W-m)` by binary search,
/// then finishes with the `{0,1}` solver at width `W - m + 1`.
pub fn lift_one_sided(caps: &[Weight], width: u32) -> Result<Option<Lifting>> {
    if caps.is_empty() {
        return Err(Error::Domain("no capacities".into()));
    }
    if width > MAX_WIDTH {
        return Err(Error::Domain(format!("width {width} exceeds {MAX_WIDTH}")));
    }
    if caps.iter().sum::<Weight>() < pow2(width) {
        return Ok(None);
    }
    if let Some(y) = single_full(caps, width) {
        return Ok(Some(y));
    }
    let fits = |m: u32| caps.iter().map(|&c| c >> m).sum::<Weight>() <= pow2(width - m);
    // Every c < 2^W, so m = W always fits.
    let (mut lo, mut hi) = (1, width);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let m = lo;
    let d: Vec<Weight> = caps.iter().map(|&c| (c >> m) << 1).collect();
    let extra: Vec<Weight> = caps.iter().zip(&d).map(|(&c, &d)| (c >> (m - 1)) - d).collect();
    trace!("one-sided lifting: m = {m}");
    Ok(Some(cap01(&d, &extra, width - m + 1).scaled(m - 1)))
}

/// The recursive formulation of [`lift_one_sided`]; same optimum, `O(W)`
/// rounds instead of `O(lg W)`.
pub fn lift_one_sided_recursive(caps: &[Weight], width: u32) -> Result<Option<Lifting>> {
    if caps.is_empty() {
        return Err(Error::Domain("no capacities".into()));
    }
    if width > MAX_WIDTH {
        return Err(Error::Domain(format!("width {width} exceeds {MAX_WIDTH}")));
    }
    if caps.iter().sum::<Weight>() < pow2(width) {
        return Ok(None);
    }
    Ok(Some(one_sided_rec(caps.to_vec(), width)))
}

fn one_sided_rec(caps: Vec<Weight>, width: u32) -> Lifting {
    if let Some(y) = single_full(&caps, width) {
        return y;
    }
    let d: Vec<Weight> = caps.iter().map(|&c| (c >> 1) << 1).collect();
    if d.iter().sum::<Weight>() <= pow2(width) {
        let extra: Vec<Weight> = caps.iter().zip(&d).map(|(c, d)| c - d).collect();
        return cap01(&d, &extra, width);
    }
    one_sided_rec(caps.into_iter().map(|c| c >> 1).collect(), width - 1).scaled(1)
}

fn single_full(caps: &[Weight], width: u32) -> Option<Lifting> {
    let full = pow2(width);
    caps.iter().position(|&c| c >= full).map(|i| {
        let mut y = vec![0; caps.len()];
        y[i] = full;
        Lifting::new(y, width)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(x: &[Weight], c: &[Weight], w: u32) -> LiftingInstance {
        LiftingInstance::new(x.to_vec(), c.to_vec(), w).unwrap()
    }

    #[test]
    fn excess_examples() {
        assert_eq!(inst(&[16], &[0], 4).excess(), 0);
        assert_eq!(inst(&[1, 2, 3], &[0, 0, 0], 3).excess(), 2);
        assert_eq!(inst(&[2, 4, 6, 1], &[1, 3, 0, 0], 4).excess(), 3);
    }

    #[test]
    fn cap01_examples() {
        let y = lift_cap01(&inst(&[4, 4], &[1, 1], 3)).unwrap().unwrap();
        assert_eq!(y.values(), &[4, 4]);
        let y = lift_cap01(&inst(&[1, 2, 3, 6], &[1, 1, 1, 1], 4)).unwrap().unwrap();
        assert_eq!(y.values(), &[2, 3, 4, 7]);
        // One unit to place between 4 and 6: 6 = 110b is bit-lex above 4 = 100b.
        let y = lift_cap01(&inst(&[4, 6, 5], &[1, 1, 0], 4)).unwrap().unwrap();
        assert_eq!(y.values(), &[4, 7, 5]);
        // Equal weights: lowest index first.
        let y = lift_cap01(&inst(&[3, 3, 1], &[1, 1, 0], 3)).unwrap().unwrap();
        assert_eq!(y.values(), &[4, 3, 1]);
        assert!(lift_cap01(&inst(&[1, 1], &[1, 1], 3)).unwrap().is_none());
        assert!(lift_cap01(&inst(&[9, 1], &[1, 1], 3)).unwrap().is_none());
        assert!(lift_cap01(&inst(&[1, 1], &[2, 1], 2)).is_err());
    }

    #[test]
    fn cap123_examples() {
        let y = lift_cap123(&inst(&[4, 4], &[1, 3], 3)).unwrap().unwrap();
        assert_eq!(y.values(), &[4, 4]);
        assert!(lift_cap123(&inst(&[1, 1], &[1, 1], 3)).unwrap().is_none());
        assert!(lift_cap123(&inst(&[1, 1], &[0, 1], 3)).is_err());
        // W = 0: a single unit to place.
        let y = lift_cap123(&inst(&[0, 0], &[2, 3], 0)).unwrap().unwrap();
        assert_eq!(y.values(), &[1, 0]);
    }

    #[test]
    fn cap123_on_the_eleven_four_one_reduction() {
        // P = [11, 4, 1], e = 6: multiples of 4 strictly within 6 of each part.
        // 11 -> {8, 12, 16}, 4 -> {0, 4, 8}, 1 -> {0, 4}. Divided by 4, W = 2.
        let y = lift_cap123(&inst(&[2, 0, 0], &[2, 2, 1], 2)).unwrap().unwrap();
        assert_eq!(y.values(), &[4, 0, 0]);
        assert_eq!(y.complexity(), 1);
        // The worked example's [8, 4, 4] is admissible too, but not optimal.
        let worked = Partition::new(vec![8, 4, 4], 4).unwrap();
        assert_eq!(crate::sequence::complexity(&worked), 3);
    }

    #[test]
    fn one_sided_examples() {
        let y = lift_one_sided(&[8, 1, 1], 3).unwrap().unwrap();
        assert_eq!(y.values(), &[8, 0, 0]);
        // [4,1,1,1,1] with overload strictly below 3: c = p + 2.
        let y = lift_one_sided(&[6, 3, 3, 3, 3], 3).unwrap().unwrap();
        assert_eq!(y.complexity(), 2);
        assert!(y.values().iter().zip([4, 1, 1, 1, 1]).all(|(&y, p)| y <= p + 2));
        assert!(lift_one_sided(&[3, 3], 3).unwrap().is_none());
        assert_eq!(lift_one_sided(&[1, 0], 0).unwrap().unwrap().values(), &[1, 0]);
    }

    #[test]
    fn scaling_keeps_complexity() {
        let y = lift_cap01(&inst(&[1, 2, 3, 6], &[1, 1, 1, 1], 4)).unwrap().unwrap();
        let c = y.complexity();
        assert_eq!(y.scaled(5).complexity(), c);
    }

    fn arb_caps() -> impl Strategy<Value = (Vec<Weight>, u32)> {
        (1u32..40, proptest::collection::vec(0u64..u64::MAX, 1..12)).prop_map(|(w, raw)| {
            let caps: Vec<Weight> = raw.iter().map(|&r| (r as Weight) % (pow2(w) + pow2(w) / 2)).collect();
            (caps, w)
        })
    }

    proptest! {
        #[test]
        fn one_sided_versions_agree((caps, w) in arb_caps()) {
            let it = lift_one_sided(&caps, w).unwrap();
            let rec = lift_one_sided_recursive(&caps, w).unwrap();
            prop_assert_eq!(it.is_some(), rec.is_some());
            if let (Some(a), Some(b)) = (it, rec) {
                prop_assert_eq!(a.complexity(), b.complexity());
                let zero = vec![0; caps.len()];
                let inst = LiftingInstance::new(zero, caps.clone(), w).unwrap();
                prop_assert!(inst.admits(a.values()));
                prop_assert!(inst.admits(b.values()));
            }
        }

        #[test]
        fn cap123_returns_admissible_liftings(
            w in 1u32..30,
            raw in proptest::collection::vec((0u64..u64::MAX, 1u128..=3), 1..10),
        ) {
            let k = raw.len() as Weight;
            let x: Vec<Weight> = raw.iter().map(|&(r, _)| r as Weight % (pow2(w) / k + 1)).collect();
            let c: Vec<Weight> = raw.iter().map(|&(_, c)| c).collect();
            let inst = LiftingInstance::new(x, c, w).unwrap();
            match lift_cap123(&inst).unwrap() {
                Some(y) => prop_assert!(inst.admits(y.values())),
                None => prop_assert!(!inst.is_feasible()),
            }
        }
    }
}
