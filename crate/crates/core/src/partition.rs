//! Partitions of a `2^W` address space, the distances between them, the
//! bit-lexicographic order, and the uniform ordered-partition sampler.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// A part size. Parts never exceed `2^64`, so `u128` holds every intermediate
/// value the algorithms produce (including the `2^(W+1)` reached while
/// matching bits).
pub type Weight = u128;

pub const MAX_WIDTH: u32 = 64;

#[inline]
pub fn pow2(exp: u32) -> Weight {
    1u128 << exp
}

/// `x <_lex y`: at the lowest bit where `x` and `y` differ, `x` has a zero.
///
/// Equal values are not less than each other.
///
/// ```
/// use tcamsplit::bitlex_less;
/// assert!(bitlex_less(5, 3));
/// assert!(bitlex_less(2, 7));
/// assert!(!bitlex_less(4, 4));
/// ```
#[inline]
pub fn bitlex_less(x: Weight, y: Weight) -> bool {
    let diff = x ^ y;
    diff != 0 && x & (diff & diff.wrapping_neg()) == 0
}

/// Total order matching [`bitlex_less`].
#[inline]
pub fn bitlex_cmp(x: Weight, y: Weight) -> Ordering {
    if x == y {
        Ordering::Equal
    } else if bitlex_less(x, y) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

pub(crate) fn check_width(width: u32) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::InvalidPartition(format!(
            "width {width} outside 1..={MAX_WIDTH}"
        )));
    }
    Ok(())
}

/// `k` non-negative integer parts summing to `2^W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<Weight>,
    width: u32,
}

impl Partition {
    pub fn new(parts: Vec<Weight>, width: u32) -> Result<Self> {
        check_width(width)?;
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        let sum = parts.iter().try_fold(0u128, |acc, &p| acc.checked_add(p));
        if sum != Some(pow2(width)) {
            return Err(Error::InvalidPartition(format!(
                "parts do not sum to 2^{width}"
            )));
        }
        Ok(Self { parts, width })
    }

    /// The single-rule partition that sends everything to `target`.
    pub fn single(k: usize, target: usize, width: u32) -> Result<Self> {
        let mut parts = vec![0; k];
        if target >= k {
            return Err(Error::InvalidPartition(format!("target {target} >= k = {k}")));
        }
        parts[target] = pow2(width);
        Self::new(parts, width)
    }

    pub fn parts(&self) -> &[Weight] {
        &self.parts
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn into_parts(self) -> Vec<Weight> {
        self.parts
    }

    /// Number of targets that receive no addresses.
    pub fn zero_parts(&self) -> usize {
        self.parts.iter().filter(|&&p| p == 0).count()
    }

    pub fn is_degenerate(&self) -> bool {
        self.zero_parts() > 0
    }

    pub fn to_real(&self) -> RealPartition {
        RealPartition {
            parts: self.parts.iter().map(|&p| rational_from_weight(p)).collect(),
            width: self.width,
        }
    }
}

impl fmt::Display for Partition {
    /// Writes the partition text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W={} k={}", self.width, self.k())?;
        let body: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        writeln!(f, "{}", body.join(" "))
    }
}

/// `k` exact positive rationals summing to `2^W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealPartition {
    parts: Vec<BigRational>,
    width: u32,
}

impl RealPartition {
    pub fn new(parts: Vec<BigRational>, width: u32) -> Result<Self> {
        check_width(width)?;
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if let Some(p) = parts.iter().find(|p| !p.is_positive()) {
            return Err(Error::InvalidPartition(format!("part {p} is not positive")));
        }
        let sum: BigRational = parts.iter().sum();
        if sum != rational_from_weight(pow2(width)) {
            return Err(Error::InvalidPartition(format!(
                "parts sum to {sum}, expected 2^{width}"
            )));
        }
        Ok(Self { parts, width })
    }

    pub fn parts(&self) -> &[BigRational] {
        &self.parts
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// The integer partition with the same parts, if every part is an integer.
    pub fn to_integer(&self) -> Option<Partition> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.is_integer().then(|| p.to_integer().to_u128()).flatten())
            .collect::<Option<Vec<_>>>()?;
        Partition::new(parts, self.width).ok()
    }
}

impl fmt::Display for RealPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W={} k={}", self.width, self.k())?;
        let body: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        writeln!(f, "{}", body.join(" "))
    }
}

pub fn rational_from_weight(w: Weight) -> BigRational {
    BigRational::from_integer(BigInt::from(w))
}

/// Either kind of partition, as read from a partition file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionInput {
    Integer(Partition),
    Real(RealPartition),
}

impl PartitionInput {
    pub fn width(&self) -> u32 {
        match self {
            Self::Integer(p) => p.width(),
            Self::Real(p) => p.width(),
        }
    }
}

impl FromStr for PartitionInput {
    type Err = Error;

    /// Parses `W=<int> k=<int>` followed by `k` whitespace-separated values.
    /// Values may be integers, fractions `a/b` or decimals `1.25`.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let (width, k) = parse_header(header).map_err(|msg| Error::Parse {
            line: hline + 1,
            msg,
        })?;
        let mut values = Vec::with_capacity(k);
        for (lno, line) in lines {
            for tok in line.split_whitespace() {
                let v = parse_rational(tok).map_err(|msg| Error::Parse { line: lno + 1, msg })?;
                values.push(v);
            }
        }
        if values.len() != k {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("header announces k={k} but {} values follow", values.len()),
            });
        }
        if values.iter().all(|v| v.is_integer()) {
            let parts = values
                .iter()
                .map(|v| {
                    v.to_integer()
                        .to_u128()
                        .ok_or_else(|| Error::InvalidPartition(format!("part {v} out of range")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Self::Integer(Partition::new(parts, width)?))
        } else {
            Ok(Self::Real(RealPartition::new(values, width)?))
        }
    }
}

fn parse_header(line: &str) -> std::result::Result<(u32, usize), String> {
    let mut width = None;
    let mut k = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=') {
            Some(("W", v)) => width = Some(v.parse::<u32>().map_err(|e| e.to_string())?),
            Some(("k", v)) => k = Some(v.parse::<usize>().map_err(|e| e.to_string())?),
            _ => return Err(format!("unexpected header token `{tok}`")),
        }
    }
    match (width, k) {
        (Some(w), Some(k)) if k >= 1 => Ok((w, k)),
        _ => Err("header must be `W=<int> k=<int>` with k >= 1".into()),
    }
}

/// Parses an exact rational from `a`, `a/b` or a decimal literal.
pub fn parse_rational(tok: &str) -> std::result::Result<BigRational, String> {
    let bad = || format!("`{tok}` is not a number");
    if let Some((n, d)) = tok.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(format!("`{tok}` has a zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = tok.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    let n: BigInt = tok.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// The distances between a candidate and a target partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// `max |Δ_i|`
    Linf,
    /// `max Δ_i`, the worst overload.
    LinfPlus,
    /// `max Δ_i / p_i`, the worst relative overload.
    LinfRelPlus,
    /// `max |Δ_i| / p_i`. Measurable only; no solver optimizes it.
    LinfRel,
}

impl DistanceKind {
    pub const OPTIMIZABLE: [DistanceKind; 3] = [Self::Linf, Self::LinfPlus, Self::LinfRelPlus];

    pub fn is_relative(self) -> bool {
        matches!(self, Self::LinfRelPlus | Self::LinfRel)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Linf => "linf",
            Self::LinfPlus => "linf+",
            Self::LinfRelPlus => "linfrel+",
            Self::LinfRel => "linfrel",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linf" => Ok(Self::Linf),
            "linf+" | "linfplus" => Ok(Self::LinfPlus),
            "linfrel+" | "linfrelplus" => Ok(Self::LinfRelPlus),
            "linfrel" => Ok(Self::LinfRel),
            other => Err(Error::Domain(format!("unknown distance kind `{other}`"))),
        }
    }
}

/// An exact, non-negative distance value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ErrorValue(BigRational);

impl ErrorValue {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn from_integer(v: u128) -> Self {
        Self(rational_from_weight(v))
    }

    pub fn from_ratio(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        Self(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Domain(format!("negative error value {value}")));
        }
        Ok(Self(value))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_integer(&self) -> Option<u128> {
        self.0.is_integer().then(|| self.0.to_integer().to_u128()).flatten()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

impl fmt::Display for ErrorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lossy conversion that stays accurate for numerators and denominators far
/// beyond `f64` range.
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Anything that can serve as either side of [`distance`].
pub trait PartitionLike {
    fn width(&self) -> u32;
    fn k(&self) -> usize;
    fn rational_part(&self, i: usize) -> BigRational;
    fn integer_parts(&self) -> Option<&[Weight]>;
}

impl PartitionLike for Partition {
    fn width(&self) -> u32 {
        self.width
    }
    fn k(&self) -> usize {
        self.parts.len()
    }
    fn rational_part(&self, i: usize) -> BigRational {
        rational_from_weight(self.parts[i])
    }
    fn integer_parts(&self) -> Option<&[Weight]> {
        Some(&self.parts)
    }
}

impl PartitionLike for RealPartition {
    fn width(&self) -> u32 {
        self.width
    }
    fn k(&self) -> usize {
        self.parts.len()
    }
    fn rational_part(&self, i: usize) -> BigRational {
        self.parts[i].clone()
    }
    fn integer_parts(&self) -> Option<&[Weight]> {
        None
    }
}

/// Distance of `candidate` from `target` under `kind`.
///
/// The one-sided kinds clamp at zero. Relative kinds divide by the target's
/// parts and so require every target part to be positive.
///
/// ```
/// use tcamsplit::{distance, DistanceKind, ErrorValue, Partition};
/// let target = Partition::new(vec![4, 1, 1, 1, 1], 3).unwrap();
/// let approx = Partition::new(vec![7, 1, 0, 0, 0], 3).unwrap();
/// let err = distance(&approx, &target, DistanceKind::LinfRelPlus).unwrap();
/// assert_eq!(err, ErrorValue::from_ratio(3, 4));
/// ```
pub fn distance<A, B>(candidate: &A, target: &B, kind: DistanceKind) -> Result<ErrorValue>
where
    A: PartitionLike + ?Sized,
    B: PartitionLike + ?Sized,
{
    if candidate.k() != target.k() || candidate.width() != target.width() {
        return Err(Error::Domain(format!(
            "cannot compare partitions of shape (k={}, W={}) and (k={}, W={})",
            candidate.k(),
            candidate.width(),
            target.k(),
            target.width()
        )));
    }
    if let (Some(c), Some(t)) = (candidate.integer_parts(), target.integer_parts()) {
        return distance_integer(c, t, kind);
    }
    let mut best = BigRational::zero();
    for i in 0..target.k() {
        let p = target.rational_part(i);
        let mut delta = candidate.rational_part(i) - &p;
        match kind {
            DistanceKind::Linf => delta = delta.abs(),
            DistanceKind::LinfPlus => {}
            DistanceKind::LinfRelPlus | DistanceKind::LinfRel => {
                if !p.is_positive() {
                    return Err(Error::Domain("relative distance to a zero part".into()));
                }
                if kind == DistanceKind::LinfRel {
                    delta = delta.abs();
                }
                delta /= p;
            }
        }
        if delta > best {
            best = delta;
        }
    }
    Ok(ErrorValue(best))
}

fn distance_integer(c: &[Weight], t: &[Weight], kind: DistanceKind) -> Result<ErrorValue> {
    match kind {
        DistanceKind::Linf => Ok(ErrorValue::from_integer(
            c.iter().zip(t).map(|(&a, &b)| a.abs_diff(b)).max().unwrap_or(0),
        )),
        DistanceKind::LinfPlus => Ok(ErrorValue::from_integer(
            c.iter().zip(t).map(|(&a, &b)| a.saturating_sub(b)).max().unwrap_or(0),
        )),
        DistanceKind::LinfRelPlus | DistanceKind::LinfRel => {
            if t.contains(&0) {
                return Err(Error::Domain("relative distance to a zero part".into()));
            }
            // Track the maximum as an unreduced fraction; compare by cross
            // multiplication in big integers.
            let mut best = (BigInt::zero(), BigInt::one());
            for (&a, &b) in c.iter().zip(t) {
                let num = if kind == DistanceKind::LinfRel || a > b {
                    a.abs_diff(b)
                } else {
                    0
                };
                let num = BigInt::from(num);
                let den = BigInt::from(b);
                if &num * &best.1 > &best.0 * &den {
                    best = (num, den);
                }
            }
            Ok(ErrorValue(BigRational::new(best.0, best.1)))
        }
    }
}

/// Draws a partition of `2^W` into `k` positive parts, uniformly among
/// ordered partitions, by cutting `[0, 2^W]` at `k - 1` distinct points.
pub fn sample_ordered_partition<R: Rng + ?Sized>(k: usize, width: u32, rng: &mut R) -> Result<Partition> {
    check_width(width)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let total = pow2(width);
    if k as u128 > total {
        return Err(Error::Infeasible(format!("k = {k} exceeds 2^{width}")));
    }
    // Cut points live in 1..2^W, i.e. 2^W - 1 candidates.
    let slots = total - 1;
    let mut cuts: Vec<Weight> = if let Ok(len) = usize::try_from(slots) {
        index::sample(rng, len, k - 1).into_iter().map(|i| i as Weight + 1).collect()
    } else {
        // 2^64 - 1 slots only arise at W = 64 on 32-bit hosts; fall back to rejection.
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < k - 1 {
            seen.insert(rng.gen_range(1..total));
        }
        seen.into_iter().collect()
    };
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        parts.push(c - prev);
        prev = c;
    }
    Partition::new(parts, width)
}

/// Ceiling of a rational as a big integer.
pub(crate) fn ceil_int(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

pub(crate) fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Converts a non-negative big integer to a weight, clamping negatives to 0.
pub(crate) fn clamp_weight(v: &BigInt) -> Weight {
    if v.sign() == Sign::Minus {
        0
    } else {
        v.to_u128().expect("value exceeds 2^128")
    }
}
