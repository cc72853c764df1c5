//! Closest partitions under a rule budget.
//!
//! Both directions go through lifting. For a fixed error bound the set of
//! admissible partitions is a box (after restricting to a lattice for `L∞`),
//! and the lifting solvers find the simplest partition in it. A search over
//! error bounds then finds the smallest bound whose simplest partition fits
//! in `n` rules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lifting::{lift_cap01, lift_cap123, lift_one_sided, Lifting, LiftingInstance};
use crate::partition::{
    ceil_int, clamp_weight, distance, floor_int, pow2, rational_from_weight, DistanceKind, ErrorValue,
    Partition, PartitionLike, RealPartition, Weight,
};
use crate::sequence::{bit_matcher, complexity, fits_in, fits_in_parts};
use crate::tcam::{sequence_to_table, TcamTable};

type Q = BigRational;

/// A witness partition, its exact distance from the target, and a table
/// realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxResult {
    pub approx: Partition,
    pub error: ErrorValue,
    pub rule_count: usize,
    pub table: TcamTable,
}

impl ApproxResult {
    pub fn new<T: PartitionLike + ?Sized>(approx: Partition, target: &T, kind: DistanceKind) -> Result<Self> {
        let error = distance(&approx, target, kind)?;
        let seq = bit_matcher(&approx);
        let table = sequence_to_table(&seq, approx.k())?;
        Ok(Self { rule_count: seq.len(), error, table, approx })
    }

    /// Whether some target receives nothing.
    pub fn is_degenerate(&self) -> bool {
        self.approx.is_degenerate()
    }
}

fn q(v: Weight) -> Q {
    rational_from_weight(v)
}

fn floor_log2(v: Weight) -> u32 {
    debug_assert!(v > 0);
    127 - v.leading_zeros()
}

fn check_kind(kind: DistanceKind) -> Result<()> {
    if kind == DistanceKind::LinfRel {
        return Err(Error::Domain("two-sided relative error cannot be optimized".into()));
    }
    Ok(())
}

fn check_positive_radius(e: &ErrorValue) -> Result<()> {
    if e.is_zero() {
        return Err(Error::Domain("error bound must be positive".into()));
    }
    Ok(())
}

/// Solves a box lifting with whichever solver covers its capacities.
fn solve_box(x: Vec<Weight>, c: Vec<Weight>, width: u32) -> Option<Lifting> {
    let inst = LiftingInstance::new(x, c, width).expect("well-formed box");
    if inst.capacities().iter().all(|&c| c <= 1) {
        lift_cap01(&inst).expect("capacities checked")
    } else {
        lift_cap123(&inst).expect("box capacities lie in {1, 2, 3}")
    }
}

/// How many multiples of `2^h` an open ball of radius `e` may hold.
fn lemma_counts(e: Weight, h: u32) -> &'static [Weight] {
    let s = pow2(h);
    if e == s {
        &[1, 2]
    } else if 2 * e <= 3 * s {
        &[2, 3]
    } else {
        &[2, 3, 4]
    }
}

/// Simplest partition strictly within integer `L∞` distance `e` of `P`.
fn linf_open_int(parts: &[Weight], width: u32, e: Weight) -> Option<Lifting> {
    debug_assert!(e >= 1);
    let raw_h = floor_log2(e);
    let h = raw_h.min(width);
    let s = pow2(h);
    let mut x = Vec::with_capacity(parts.len());
    let mut c = Vec::with_capacity(parts.len());
    for &p in parts {
        // Admissible values are the integers in [p - e + 1, p + e - 1].
        let lo = p as i128 - e as i128 + 1;
        let xi = if lo <= 0 { 0 } else { (lo as Weight).div_ceil(s) * s };
        let zi = ((p + e - 1) / s) * s;
        if zi < xi {
            return None;
        }
        if raw_h == h {
            debug_assert!(
                lemma_counts(e, h).contains(&((zi - xi) / s + 1)),
                "p = {p}, e = {e}: {} multiples",
                (zi - xi) / s + 1
            );
        }
        x.push(xi >> h);
        c.push((zi - xi) >> h);
    }
    let y = if raw_h == h && e == s {
        lift_cap01(&LiftingInstance::new(x, c, width - h).ok()?).expect("capacities in {0, 1}")
    } else if raw_h == h {
        lift_cap123(&LiftingInstance::new(x, c, width - h).ok()?).expect("capacities in {1, 2, 3}")
    } else {
        solve_box(x, c, width - h)
    };
    y.map(|y| y.scaled(h))
}

/// Simplest partition strictly within rational `L∞` distance `e`.
fn linf_open_rational(parts: &[Q], width: u32, e: &Q) -> Option<Lifting> {
    let h = if *e >= Q::one() { floor_log2(clamp_weight(&floor_int(e))).min(width) } else { 0 };
    let s = q(pow2(h));
    let mut x = Vec::with_capacity(parts.len());
    let mut c = Vec::with_capacity(parts.len());
    for p in parts {
        let below: Q = (p - e) / &s;
        let above: Q = (p + e) / &s;
        let lo = (floor_int(&below) + BigInt::one()).max(BigInt::zero());
        let hi = ceil_int(&above) - 1;
        if hi < lo {
            return None;
        }
        x.push(clamp_weight(&lo));
        c.push(clamp_weight(&(hi - &lo)));
    }
    let exact_power = *e == s;
    let inst = LiftingInstance::new(x, c, width - h).ok()?;
    let y = if exact_power || *e < Q::one() {
        lift_cap01(&inst).ok()?
    } else {
        lift_cap123(&inst).ok()?
    };
    y.map(|y| y.scaled(h))
}

/// Simplest partition within closed `L∞` distance `v` (possibly 0).
fn linf_closed(parts: &[Q], width: u32, v: &Q) -> Option<Lifting> {
    let h = if *v >= Q::one() { floor_log2(clamp_weight(&floor_int(v))).min(width) } else { 0 };
    let s = q(pow2(h));
    let mut x = Vec::with_capacity(parts.len());
    let mut c = Vec::with_capacity(parts.len());
    for p in parts {
        let below: Q = (p - v) / &s;
        let above: Q = (p + v) / &s;
        let lo = ceil_int(&below).max(BigInt::zero());
        let hi = floor_int(&above);
        if hi < lo {
            return None;
        }
        x.push(clamp_weight(&lo));
        c.push(clamp_weight(&(hi - &lo)));
    }
    solve_box(x, c, width - h).map(|y| y.scaled(h))
}

/// `P'` with `L∞(P', P) < e` and the fewest rules, or `None` when the ball
/// holds no partition.
///
/// ```
/// use tcamsplit::{bounded_error_linf, complexity, ErrorValue, Partition};
/// let p = Partition::new(vec![4, 1, 1, 1, 1], 3).unwrap();
/// let approx = bounded_error_linf(&p, &ErrorValue::from_integer(3)).unwrap().unwrap();
/// assert_eq!(complexity(&approx), 2);
/// ```
pub fn bounded_error_linf(p: &Partition, e: &ErrorValue) -> Result<Option<Partition>> {
    check_positive_radius(e)?;
    let y = match e.to_integer() {
        Some(e) => linf_open_int(p.parts(), p.width(), e),
        None => {
            let parts: Vec<Q> = p.parts().iter().map(|&v| q(v)).collect();
            linf_open_rational(&parts, p.width(), e.as_rational())
        }
    };
    y.map(|y| y.to_partition()).transpose()
}

/// `P'` with one-sided distance strictly below `e` and the fewest rules.
pub fn bounded_error_one_sided(p: &Partition, e: &ErrorValue, kind: DistanceKind) -> Result<Option<Partition>> {
    check_positive_radius(e)?;
    let e = e.as_rational();
    let caps: Vec<Weight> = match kind {
        DistanceKind::LinfPlus => p.parts().iter().map(|&v| clamp_weight(&(ceil_int(&(q(v) + e)) - 1))).collect(),
        DistanceKind::LinfRelPlus => {
            if p.parts().contains(&0) {
                return Err(Error::Domain("relative error needs positive parts".into()));
            }
            let scale = e + Q::one();
            p.parts().iter().map(|&v| clamp_weight(&(ceil_int(&(&scale * q(v))) - 1))).collect()
        }
        other => return Err(Error::Domain(format!("{other} is not a one-sided distance"))),
    };
    lift_one_sided(&caps, p.width())?.map(|y| y.to_partition()).transpose()
}

/// Capacities for a closed one-sided ball of radius `v`.
fn one_sided_closed_caps(parts: &[Q], v: &Q, kind: DistanceKind) -> Vec<Weight> {
    match kind {
        DistanceKind::LinfPlus => parts.iter().map(|p| clamp_weight(&floor_int(&(p + v)))).collect(),
        DistanceKind::LinfRelPlus => {
            let scale = v + Q::one();
            parts.iter().map(|p| clamp_weight(&floor_int(&(&scale * p)))).collect()
        }
        _ => unreachable!("two-sided kinds use the lattice reduction"),
    }
}

/// Simplest integer partition within closed distance `v` of the target.
fn closed_ball(parts: &[Q], width: u32, kind: DistanceKind, v: &Q) -> Option<Lifting> {
    match kind {
        DistanceKind::Linf => linf_closed(parts, width, v),
        DistanceKind::LinfPlus | DistanceKind::LinfRelPlus => {
            lift_one_sided(&one_sided_closed_caps(parts, v, kind), width).expect("valid capacities")
        }
        DistanceKind::LinfRel => unreachable!("rejected by check_kind"),
    }
}

/// Smallest `v` in `[lo, hi]` with `test(v)`, given `test(hi)` holds.
fn first_true(mut lo: Weight, mut hi: Weight, mut test: impl FnMut(Weight) -> bool) -> Weight {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if test(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Smallest feasible value among unsorted `cands`, probing medians.
/// `best` must already be feasible and no smaller than any candidate.
fn smallest_feasible<W>(
    mut cands: Vec<Q>,
    mut best: (Q, W),
    mut test: impl FnMut(&Q) -> Option<W>,
) -> (Q, W) {
    cands.sort_unstable();
    cands.dedup();
    cands.retain(|c| *c < best.0);
    // Sorting above is only for deduplication; the loop itself needs no order.
    while !cands.is_empty() {
        let mid = cands.len() / 2;
        cands.select_nth_unstable(mid);
        let m = cands[mid].clone();
        match test(&m) {
            Some(w) => {
                best = (m, w);
                cands.truncate(mid);
            }
            None => {
                cands.drain(..=mid);
            }
        }
    }
    best
}

/// The relative-error threshold search. The anchor weight `p_j` pins the
/// error to an interval of width `1/p_j`, which holds at most one achievable
/// value per coordinate.
fn relative_search(parts: &[Q], width: u32, n: usize) -> Vec<Weight> {
    let kind = DistanceKind::LinfRelPlus;
    let test = |v: &Q| -> Option<Vec<Weight>> {
        let y = closed_ball(parts, width, kind, v)?;
        fits_in_parts(y.values(), y.width(), n).then(|| y.into_values())
    };
    if let Some(y) = test(&Q::zero()) {
        return y;
    }
    let j = (0..parts.len()).fold(0, |best, i| if parts[i] > parts[best] { i } else { best });
    let pj = &parts[j];
    let threshold = |a: Weight| q(a) / pj - Q::one();
    let lo_a = clamp_weight(&floor_int(pj)) + 1;
    let a = first_true(lo_a, pow2(width), |a| test(&threshold(a)).is_some());
    let hi = threshold(a);
    let lo = if a > lo_a { threshold(a - 1) } else { Q::zero() };
    let scale = &hi + Q::one();
    let cands: Vec<Q> = parts
        .iter()
        .map(|p| Q::from_integer(floor_int(&(&scale * p))) / p - Q::one())
        .filter(|v| *v > lo)
        .collect();
    let y = test(&hi).expect("upper threshold is feasible");
    smallest_feasible(cands, (hi, y), test).1
}

/// Additive-error search over a rational target: integer radii first, then the
/// finitely many achievable values in the last unit interval.
fn additive_search(parts: &[Q], width: u32, n: usize, kind: DistanceKind) -> Vec<Weight> {
    let test = |v: &Q| -> Option<Vec<Weight>> {
        let y = closed_ball(parts, width, kind, v)?;
        fits_in_parts(y.values(), y.width(), n).then(|| y.into_values())
    };
    let a = first_true(0, pow2(width), |a| test(&q(a)).is_some());
    let y = test(&q(a)).expect("found by search");
    if a == 0 {
        return y;
    }
    let base = q(a - 1);
    let mut cands = Vec::new();
    for p in parts.iter().filter(|p| !p.is_integer()) {
        cands.push(&base + (p.ceil() - p));
        if kind == DistanceKind::Linf {
            cands.push(&base + (p - p.floor()));
        }
    }
    smallest_feasible(cands, (q(a), y), test).1
}

/// The partition with at most `n` rules closest to `P`.
///
/// ```
/// use tcamsplit::{closest, DistanceKind, ErrorValue, Partition};
/// let p = Partition::new(vec![4, 1, 1, 1, 1], 3).unwrap();
/// let r = closest(&p, 2, DistanceKind::LinfRelPlus).unwrap();
/// assert_eq!(r.error, ErrorValue::from_ratio(3, 4));
/// assert_eq!(r.rule_count, 2);
/// ```
pub fn closest(p: &Partition, n: usize, kind: DistanceKind) -> Result<ApproxResult> {
    check_kind(kind)?;
    if n == 0 {
        return Err(Error::Domain("at least one rule is needed".into()));
    }
    if kind.is_relative() && p.parts().contains(&0) {
        return Err(Error::Domain("relative error needs positive parts".into()));
    }
    if fits_in(p, n) {
        return ApproxResult::new(p.clone(), p, kind);
    }
    let (parts, width) = (p.parts(), p.width());
    let values = match kind {
        DistanceKind::Linf => {
            let test = |e: Weight| linf_open_int(parts, width, e).filter(|y| fits_in_parts(y.values(), y.width(), n));
            let e = first_true(1, pow2(width) + 1, |e| test(e).is_some());
            test(e).expect("found by search").into_values()
        }
        DistanceKind::LinfPlus => {
            let test = |e: Weight| {
                let caps: Vec<Weight> = parts.iter().map(|&v| v + e - 1).collect();
                lift_one_sided(&caps, width)
                    .expect("valid capacities")
                    .filter(|y| fits_in_parts(y.values(), y.width(), n))
            };
            let e = first_true(1, pow2(width) + 1, |e| test(e).is_some());
            test(e).expect("found by search").into_values()
        }
        _ => {
            let qs: Vec<Q> = parts.iter().map(|&v| q(v)).collect();
            relative_search(&qs, width, n)
        }
    };
    let approx = Partition::new(values, width)?;
    debug_assert!(complexity(&approx) <= n);
    ApproxResult::new(approx, p, kind)
}

/// [`closest`] for a rational target; the witness is an integer partition.
pub fn closest_real(p: &RealPartition, n: usize, kind: DistanceKind) -> Result<ApproxResult> {
    check_kind(kind)?;
    if n == 0 {
        return Err(Error::Domain("at least one rule is needed".into()));
    }
    let values = match kind {
        DistanceKind::LinfRelPlus => relative_search(p.parts(), p.width(), n),
        _ => additive_search(p.parts(), p.width(), n, kind),
    };
    let approx = Partition::new(values, p.width())?;
    debug_assert!(complexity(&approx) <= n);
    ApproxResult::new(approx, p, kind)
}

/// Fewest rules of any integer partition within closed distance `v` of `P`.
pub fn min_rules_within(p: &RealPartition, kind: DistanceKind, v: &ErrorValue) -> Result<Option<usize>> {
    check_kind(kind)?;
    Ok(closed_ball(p.parts(), p.width(), kind, v.as_rational()).map(|y| y.complexity()))
}

/// Rules needed to reach the best error achievable with no rule limit.
pub fn exact_rule_count(p: &RealPartition, kind: DistanceKind) -> Result<usize> {
    let unlimited = p.width() as usize * p.k() + 1;
    let best = closest_real(p, unlimited, kind)?;
    Ok(min_rules_within(p, kind, &best.error)?.expect("the optimum is attainable"))
}

/// Scales positive counts to rationals summing to `2^W`.
pub fn normalize_to_width(raw: &[u64], width: u32) -> Result<RealPartition> {
    if raw.is_empty() {
        return Err(Error::Domain("no counts".into()));
    }
    if raw.contains(&0) {
        return Err(Error::Domain("every count must be positive".into()));
    }
    if raw.len() as u128 > pow2(width.min(64)) {
        return Err(Error::Domain(format!("{} targets exceed 2^{width}", raw.len())));
    }
    let total: BigInt = raw.iter().map(|&v| BigInt::from(v)).sum();
    let scale = Q::new(BigInt::from(pow2(width)), total);
    let parts = raw.iter().map(|&v| Q::from_integer(BigInt::from(v)) * &scale).collect();
    RealPartition::new(parts, width)
}

/// Lower-precision view of an error, for reporting.
pub fn error_to_f64(e: &ErrorValue) -> f64 {
    let r = e.as_rational();
    if r.is_negative() {
        return f64::NAN;
    }
    r.to_f64().unwrap_or_else(|| e.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{parse_rational, sample_ordered_partition};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(parts: &[Weight], w: u32) -> Partition {
        Partition::new(parts.to_vec(), w).unwrap()
    }

    fn ratio(s: &str) -> ErrorValue {
        ErrorValue::new(parse_rational(s).unwrap()).unwrap()
    }

    #[test]
    fn figure_one_closest() {
        let target = p(&[4, 1, 1, 1, 1], 3);
        let r = closest(&target, 2, DistanceKind::Linf).unwrap();
        assert_eq!(r.error, ErrorValue::from_integer(2));
        assert_eq!(r.rule_count, 2);
        assert_eq!(r.table.len(), 2);
        let r = closest(&target, 2, DistanceKind::LinfPlus).unwrap();
        assert_eq!(r.error, ErrorValue::from_integer(2));
        let r = closest(&target, 2, DistanceKind::LinfRelPlus).unwrap();
        assert_eq!(r.error, ErrorValue::from_ratio(3, 4));
        for kind in DistanceKind::OPTIMIZABLE {
            let r = closest(&target, 5, kind).unwrap();
            assert!(r.error.is_zero());
            assert_eq!(r.approx, target);
        }
    }

    #[test]
    fn two_part_micro_table() {
        let expect_abs = [1, 2, 1];
        let expect_rel = [ErrorValue::from_ratio(1, 3), ErrorValue::from_integer(1), ErrorValue::from_ratio(1, 3)];
        for (i, parts) in [[1, 3], [2, 2], [3, 1]].iter().enumerate() {
            let target = p(parts, 2);
            for kind in [DistanceKind::Linf, DistanceKind::LinfPlus] {
                assert_eq!(closest(&target, 1, kind).unwrap().error, ErrorValue::from_integer(expect_abs[i]));
                assert!(closest(&target, 2, kind).unwrap().error.is_zero());
            }
            assert_eq!(closest(&target, 1, DistanceKind::LinfRelPlus).unwrap().error, expect_rel[i]);
            assert!(closest(&target, 2, DistanceKind::LinfRelPlus).unwrap().error.is_zero());
        }
    }

    #[test]
    fn one_sided_beats_two_sided_on_two_three_three() {
        let target = p(&[2, 3, 3], 3);
        assert_eq!(closest(&target, 2, DistanceKind::LinfPlus).unwrap().error, ErrorValue::from_integer(1));
        assert_eq!(closest(&target, 2, DistanceKind::Linf).unwrap().error, ErrorValue::from_integer(2));
        let y = bounded_error_one_sided(&target, &ratio("11/10"), DistanceKind::LinfPlus).unwrap().unwrap();
        assert_eq!(complexity(&y), 2);
        assert!(distance(&y, &target, DistanceKind::LinfPlus).unwrap() <= ErrorValue::from_integer(1));
    }

    #[test]
    fn bounded_error_examples() {
        let target = p(&[4, 1, 1, 1, 1], 3);
        let y = bounded_error_linf(&target, &ErrorValue::from_integer(3)).unwrap().unwrap();
        assert_eq!(complexity(&y), 2);
        assert!(distance(&y, &target, DistanceKind::Linf).unwrap() < ErrorValue::from_integer(3));

        let y = bounded_error_linf(&target, &ErrorValue::from_integer(9)).unwrap().unwrap();
        assert_eq!(complexity(&y), 1);

        let y = bounded_error_one_sided(&target, &ratio("76/100"), DistanceKind::LinfRelPlus).unwrap().unwrap();
        assert_eq!(complexity(&y), 2);
        assert!(distance(&y, &target, DistanceKind::LinfRelPlus).unwrap() <= ErrorValue::from_ratio(3, 4));

        let y = bounded_error_one_sided(&target, &ErrorValue::from_integer(100), DistanceKind::LinfRelPlus)
            .unwrap()
            .unwrap();
        assert_eq!(complexity(&y), 1);

        assert!(bounded_error_linf(&target, &ErrorValue::zero()).is_err());
        assert!(bounded_error_one_sided(&target, &ErrorValue::from_integer(1), DistanceKind::Linf).is_err());
    }

    #[test]
    fn eleven_four_one_with_radius_six() {
        // The ball of radius 6 around [11, 4, 1] already holds [16, 0, 0].
        let target = p(&[11, 4, 1], 4);
        let y = bounded_error_linf(&target, &ErrorValue::from_integer(6)).unwrap().unwrap();
        assert_eq!(complexity(&y), 1);
        assert_eq!(y.parts(), &[16, 0, 0]);
        // [8, 4, 4] lies in the ball too but needs three rules.
        let alt = p(&[8, 4, 4], 4);
        assert_eq!(distance(&alt, &target, DistanceKind::Linf).unwrap(), ErrorValue::from_integer(3));
        assert_eq!(complexity(&alt), 3);
    }

    #[test]
    fn rational_radius_agrees_with_integer_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let target = sample_ordered_partition(5, 8, &mut rng).unwrap();
            for e in 1..40u128 {
                let int = bounded_error_linf(&target, &ErrorValue::from_integer(e)).unwrap().map(|y| complexity(&y));
                // (e - 1, e) holds no integer distance, so radius e - 1/2 is the same ball.
                let half = ErrorValue::new(q(e) - Q::new(1.into(), 2.into())).unwrap();
                if e > 1 {
                    let rat = bounded_error_linf(&target, &half).unwrap().map(|y| complexity(&y));
                    assert_eq!(int, rat, "{target:?} e={e}");
                }
            }
        }
    }

    #[test]
    fn capacities_for_the_non_integer_example() {
        let parts: Vec<Q> = ["57/10", "52/10", "51/10"].iter().map(|s| parse_rational(s).unwrap()).collect();
        // Open radius e gives capacities ceil(p + e) - 1; closed radius v gives floor(p + v).
        let open = |e: &str| -> Vec<Weight> {
            let e = parse_rational(e).unwrap();
            parts.iter().map(|p| clamp_weight(&(ceil_int(&(p + &e)) - 1))).collect()
        };
        assert_eq!(open("6"), vec![11, 11, 11]);
        assert_eq!(open("55/10"), vec![11, 10, 10]);
        assert_eq!(open("51/10"), vec![10, 10, 10]);
        let closed = one_sided_closed_caps(&parts, &parse_rational("3/10").unwrap(), DistanceKind::LinfPlus);
        assert_eq!(closed, vec![6, 5, 5]);
    }

    #[test]
    fn normalize_examples() {
        let r = normalize_to_width(&[1, 1], 2).unwrap();
        assert_eq!(r.to_integer().unwrap().parts(), &[2, 2]);
        let r = normalize_to_width(&[1, 2, 5], 3).unwrap();
        assert_eq!(r.to_integer().unwrap().parts(), &[1, 2, 5]);
        let r = normalize_to_width(&[1, 2], 3).unwrap();
        assert_eq!(r.parts()[0], Q::new(8.into(), 3.into()));
        assert!(normalize_to_width(&[1, 0], 3).is_err());
    }

    #[test]
    fn real_route_matches_integer_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..150 {
            let target = sample_ordered_partition(6, 10, &mut rng).unwrap();
            let real = target.to_real();
            let len = complexity(&target);
            for n in 1..=len {
                for kind in DistanceKind::OPTIMIZABLE {
                    let a = closest(&target, n, kind).unwrap();
                    let b = closest_real(&real, n, kind).unwrap();
                    assert_eq!(a.error, b.error, "{target:?} n={n} {kind}");
                }
            }
        }
    }

    #[test]
    fn exact_rule_count_examples() {
        let single = normalize_to_width(&[5], 4).unwrap();
        assert_eq!(exact_rule_count(&single, DistanceKind::Linf).unwrap(), 1);
        let fig = p(&[4, 1, 1, 1, 1], 3).to_real();
        for kind in DistanceKind::OPTIMIZABLE {
            assert_eq!(exact_rule_count(&fig, kind).unwrap(), 5);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let target = p(&[4, 4, 0], 3);
        assert!(closest(&target, 0, DistanceKind::Linf).is_err());
        assert!(closest(&target, 1, DistanceKind::LinfRel).is_err());
        assert!(closest(&target, 1, DistanceKind::LinfRelPlus).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closest_invariants(seed: u64, k in 2usize..12, w in 4u32..24) {
            let target = sample_ordered_partition(k, w, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let len = complexity(&target);
            let mut prev: Vec<Option<ErrorValue>> = vec![None; 3];
            for n in 1..=len {
                for (ki, kind) in DistanceKind::OPTIMIZABLE.into_iter().enumerate() {
                    let r = closest(&target, n, kind).unwrap();
                    prop_assert!(r.rule_count <= n);
                    prop_assert_eq!(r.rule_count, complexity(&r.approx));
                    prop_assert_eq!(r.table.len(), r.rule_count);
                    prop_assert_eq!(distance(&r.approx, &target, kind).unwrap(), r.error.clone());
                    if let Some(prev) = &prev[ki] {
                        prop_assert!(r.error <= *prev);
                    }
                    prev[ki] = Some(r.error);
                }
                prop_assert!(prev[1] <= prev[0]);
            }
            for e in &prev {
                prop_assert!(e.as_ref().unwrap().is_zero());
            }
        }
    }
}
