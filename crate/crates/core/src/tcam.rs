//! Longest-prefix-match rule tables and their construction from transaction
//! sequences.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::partition::{check_width, pow2, Partition, Weight};
use crate::sequence::{Receiver, TransactionSequence};

/// A prefix of `len` bits (stored right-aligned in `bits`) and the target it
/// sends matching addresses to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrefixRule {
    bits: u64,
    len: u32,
    pub target: usize,
}

impl PrefixRule {
    pub fn new(bits: u64, len: u32, target: usize) -> Result<Self> {
        if len > 64 || (len < 64 && bits >> len != 0) {
            return Err(Error::InvalidTable(format!("prefix {bits:#b} does not fit in {len} bits")));
        }
        Ok(Self { bits, len, target })
    }

    pub fn match_all(target: usize) -> Self {
        Self { bits: 0, len: 0, target }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn prefix_len(&self) -> u32 {
        self.len
    }

    pub fn is_match_all(&self) -> bool {
        self.len == 0
    }

    /// Number of addresses under this prefix in a `2^width` space.
    pub fn span(&self, width: u32) -> Weight {
        pow2(width - self.len)
    }

    pub fn matches(&self, addr: u64, width: u32) -> bool {
        self.len == 0 || (addr >> (width - self.len)) == self.bits
    }

    fn render(&self, width: u32) -> String {
        let mut s = String::with_capacity(width as usize);
        for b in (0..self.len).rev() {
            s.push(if (self.bits >> b) & 1 == 1 { '1' } else { '0' });
        }
        for _ in self.len..width {
            s.push('*');
        }
        s
    }
}

/// An ordered prefix table. Rules appear in non-increasing prefix length and
/// the last one matches everything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcamTable {
    rules: Vec<PrefixRule>,
    width: u32,
    targets: usize,
}

impl TcamTable {
    pub fn new(rules: Vec<PrefixRule>, width: u32, targets: usize) -> Result<Self> {
        check_width(width).map_err(|e| Error::InvalidTable(e.to_string()))?;
        let last = rules.last().ok_or_else(|| Error::InvalidTable("empty table".into()))?;
        if !last.is_match_all() {
            return Err(Error::InvalidTable("last rule must match everything".into()));
        }
        for w in rules.windows(2) {
            if w[0].len < w[1].len {
                return Err(Error::InvalidTable("rules must be sorted by non-increasing prefix length".into()));
            }
        }
        if let Some(r) = rules.iter().find(|r| r.len > width || r.target >= targets) {
            return Err(Error::InvalidTable(format!(
                "rule {} -> {} does not fit W={width}, k={targets}",
                r.render(r.len.max(width)),
                r.target
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &rules {
            if !seen.insert((r.len, r.bits)) {
                return Err(Error::InvalidTable(format!("duplicate prefix {}", r.render(width))));
            }
        }
        Ok(Self { rules, width, targets })
    }

    pub fn rules(&self) -> &[PrefixRule] {
        &self.rules
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The target of the first (longest) rule matching `addr`.
    pub fn lookup(&self, addr: u64) -> usize {
        self.rules
            .iter()
            .find(|r| r.matches(addr, self.width))
            .expect("the match-all rule catches everything")
            .target
    }

    /// For each rule, the index of the closest shorter rule whose prefix
    /// contains it. The match-all rule has none.
    fn parents(&self) -> Vec<Option<usize>> {
        let index: HashMap<(u32, u64), usize> =
            self.rules.iter().enumerate().map(|(i, r)| ((r.len, r.bits), i)).collect();
        self.rules
            .iter()
            .map(|r| {
                (0..r.len).rev().find_map(|l| {
                    let shift = r.len - l;
                    let bits = if shift >= 64 { 0 } else { r.bits >> shift };
                    index.get(&(l, bits)).copied()
                })
            })
            .collect()
    }

    /// Addresses each rule actually decides: its span minus the spans of the
    /// rules nested directly below it.
    fn owned(&self, parents: &[Option<usize>]) -> Vec<Weight> {
        let mut owned: Vec<Weight> = self.rules.iter().map(|r| r.span(self.width)).collect();
        for (i, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                owned[p] -= self.rules[i].span(self.width);
            }
        }
        owned
    }

    /// Checks that no rule can be dropped without changing the mapping: every
    /// rule owns some addresses and differs in target from its parent.
    pub fn check_minimal(&self) -> Result<()> {
        let parents = self.parents();
        let owned = self.owned(&parents);
        for (i, r) in self.rules.iter().enumerate() {
            if owned[i] == 0 {
                return Err(Error::InvalidTable(format!("rule {} is fully shadowed", r.render(self.width))));
            }
            if let Some(p) = parents[i] {
                if self.rules[p].target == r.target {
                    return Err(Error::InvalidTable(format!(
                        "rule {} repeats its parent's target",
                        r.render(self.width)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Keeps the `n` widest rules (the last `n` lines).
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a table needs at least one rule".into()));
        }
        let start = self.rules.len().saturating_sub(n);
        Self::new(self.rules[start..].to_vec(), self.width, self.targets)
    }
}

impl fmt::Display for TcamTable {
    /// One rule per line, `<bits><* padding> -> <target>`, highest priority first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{} -> {}", r.render(self.width), r.target)?;
        }
        Ok(())
    }
}

impl FromStr for TcamTable {
    type Err = Error;

    /// Width comes from the pattern length, the target count from the largest
    /// target mentioned.
    fn from_str(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        let mut width = None;
        for (lno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lno + 1, msg };
            let (pattern, target) = line
                .split_once("->")
                .ok_or_else(|| err(format!("`{line}` is not `<pattern> -> <target>`")))?;
            let pattern = pattern.trim();
            let target: usize = target.trim().parse().map_err(|e| err(format!("{e}")))?;
            if *width.get_or_insert(pattern.len()) != pattern.len() {
                return Err(err("patterns have different lengths".into()));
            }
            let len = pattern.bytes().take_while(|&b| b != b'*').count();
            if !pattern[len..].bytes().all(|b| b == b'*') {
                return Err(err(format!("`{pattern}` is not a prefix pattern")));
            }
            let mut bits = 0u64;
            for b in pattern[..len].bytes() {
                bits = match b {
                    b'0' => bits << 1,
                    b'1' => (bits << 1) | 1,
                    _ => return Err(err(format!("bad character in `{pattern}`"))),
                };
            }
            rules.push(PrefixRule { bits, len: len as u32, target });
        }
        let width = width.ok_or(Error::Parse { line: 1, msg: "empty table".into() })? as u32;
        let targets = rules.iter().map(|r| r.target + 1).max().unwrap_or(1);
        Self::new(rules, width, targets)
    }
}

/// An aligned free block `[start, start + 2^exp)` inside a rule's subtree.
#[derive(Debug, Clone, Copy)]
struct Block {
    start: Weight,
    exp: u32,
}

struct Node {
    rule: PrefixRule,
    level: u32,
    free: Vec<Block>,
}

/// Embeds a sequence into the binary trie.
///
/// Transactions are placed widest first. `[i ->_l j]` becomes a rule for `i`
/// of length `W - l` carved out of a free aligned block in some rule of `j`;
/// the deepest such host is used and blocks are handed out lowest address
/// first.
pub fn sequence_to_table(seq: &TransactionSequence, k: usize) -> Result<TcamTable> {
    let width = seq.width();
    let bottom = seq.bottom();
    if bottom.sender >= k {
        return Err(Error::Synthesis(format!("target {} outside 0..{k}", bottom.sender)));
    }
    let mut nodes = vec![Node {
        rule: PrefixRule::match_all(bottom.sender),
        level: width,
        free: vec![Block { start: 0, exp: width }],
    }];
    let mut by_target: Vec<Vec<usize>> = vec![Vec::new(); k];
    by_target[bottom.sender].push(0);

    let mut rest: Vec<_> = seq.transactions().iter().filter(|t| !t.is_bottom()).collect();
    rest.sort_by_key(|r| std::cmp::Reverse(r.level));
    for t in rest {
        let Receiver::Target(j) = t.receiver else { unreachable!() };
        if t.sender >= k || j >= k {
            return Err(Error::Synthesis(format!("{t} references a target outside 0..{k}")));
        }
        let level = t.level;
        let host = by_target[j]
            .iter()
            .copied()
            .filter(|&h| nodes[h].level > level && nodes[h].free.iter().any(|b| b.exp >= level))
            .max_by(|&a, &b| {
                let (ra, rb) = (&nodes[a].rule, &nodes[b].rule);
                ra.len.cmp(&rb.len).then(rb.bits.cmp(&ra.bits))
            })
            .ok_or_else(|| Error::Synthesis(format!("no rule of target {j} has room for {t}")))?;

        let free = &mut nodes[host].free;
        let (pos, block) = free
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, b)| b.exp >= level)
            .min_by_key(|(_, b)| b.start)
            .expect("host was chosen for having a block");
        free.swap_remove(pos);
        for e in level..block.exp {
            free.push(Block { start: block.start + pow2(e), exp: e });
        }
        let len = width - level;
        let bits = if level >= 64 { 0 } else { (block.start >> level) as u64 };
        by_target[t.sender].push(nodes.len());
        nodes.push(Node {
            rule: PrefixRule { bits, len, target: t.sender },
            level,
            free: vec![Block { start: block.start, exp: level }],
        });
    }

    // Creation order is widest first; the table wants the reverse.
    let rules: Vec<PrefixRule> = nodes.into_iter().rev().map(|n| n.rule).collect();
    TcamTable::new(rules, width, k)
}

/// Per-target address counts of a table, computed from the trie structure
/// without touching individual addresses.
pub fn table_induced_partition(table: &TcamTable) -> Result<Partition> {
    let parents = table.parents();
    let owned = table.owned(&parents);
    let mut parts = vec![0; table.targets];
    for (r, o) in table.rules.iter().zip(owned) {
        parts[r.target] += o;
    }
    Partition::new(parts, table.width)
}

pub const ENUMERATION_LIMIT: u32 = 20;

/// Per-target counts by looking up every address. Refuses `W > 20`.
pub fn enumerate_induced(table: &TcamTable) -> Result<Partition> {
    let width = table.width;
    if width > ENUMERATION_LIMIT {
        return Err(Error::Refused(format!("W = {width} exceeds {ENUMERATION_LIMIT}")));
    }
    let index: HashMap<(u32, u64), usize> = table.rules.iter().map(|r| ((r.len, r.bits), r.target)).collect();
    let mut lens: Vec<u32> = table.rules.iter().map(|r| r.len).collect();
    lens.dedup();
    let mut parts = vec![0; table.targets];
    for addr in 0..(1u64 << width) {
        let target = lens
            .iter()
            .find_map(|&l| index.get(&(l, addr >> (width - l))))
            .expect("the match-all rule catches everything");
        parts[*target] += 1;
    }
    Partition::new(parts, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::sample_ordered_partition;
    use crate::sequence::{bit_matcher, complexity, induced_partition, niagara};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(parts: &[Weight], w: u32) -> Partition {
        Partition::new(parts.to_vec(), w).unwrap()
    }

    fn fig1a() -> TransactionSequence {
        TransactionSequence::parse("[3 ->_0 2]\n[4 ->_0 1]\n[2 ->_1 1]\n[1 ->_2 0]\n[0 ->_3 BOT]\n").unwrap()
    }

    #[test]
    fn single_rule_table() {
        let seq = TransactionSequence::parse("[2 ->_4 BOT]").unwrap();
        let table = sequence_to_table(&seq, 3).unwrap();
        assert_eq!(table.to_string(), "**** -> 2\n");
        assert_eq!(table_induced_partition(&table).unwrap().parts(), &[0, 0, 16]);
        assert_eq!(enumerate_induced(&table).unwrap().parts(), &[0, 0, 16]);
    }

    #[test]
    fn figure_one_tables() {
        let table = sequence_to_table(&fig1a(), 5).unwrap();
        assert_eq!(table.len(), 5);
        assert_eq!(table.to_string(), "010 -> 4\n000 -> 3\n00* -> 2\n0** -> 1\n*** -> 0\n");
        assert_eq!(table_induced_partition(&table).unwrap().parts(), &[4, 1, 1, 1, 1]);
        table.check_minimal().unwrap();

        let trunc = table.truncate(2).unwrap();
        assert_eq!(table_induced_partition(&trunc).unwrap().parts(), &[4, 4, 0, 0, 0]);

        let fig1c = TransactionSequence::parse("[1 ->_1 0]\n[0 ->_3 BOT]\n").unwrap();
        let table = sequence_to_table(&fig1c, 5).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table_induced_partition(&table).unwrap().parts(), &[6, 2, 0, 0, 0]);
        assert_eq!(enumerate_induced(&table).unwrap().parts(), &[6, 2, 0, 0, 0]);
    }

    #[test]
    fn table_text_round_trips() {
        let text = "111 -> 3\n1** -> 2\n*** -> 1\n";
        let table: TcamTable = text.parse().unwrap();
        assert_eq!(table.to_string(), text);
        assert_eq!(table_induced_partition(&table).unwrap().parts(), &[0, 4, 3, 1]);
        assert!("1** -> 2\n111 -> 3\n*** -> 1\n".parse::<TcamTable>().is_err());
        assert!("1** -> 2\n".parse::<TcamTable>().is_err());
        assert!("1*1 -> 2\n*** -> 0\n".parse::<TcamTable>().is_err());
        assert!("1** -> 2\n1** -> 0\n*** -> 0\n".parse::<TcamTable>().is_err());
    }

    #[test]
    fn minimality_detects_redundant_rules() {
        let same_target: TcamTable = "1** -> 0\n*** -> 0\n".parse().unwrap();
        assert!(same_target.check_minimal().is_err());
        let shadowed: TcamTable = "10 -> 0\n11 -> 0\n1* -> 1\n** -> 0\n".parse().unwrap();
        assert!(shadowed.check_minimal().is_err());
    }

    #[test]
    fn enumeration_guard() {
        let table = TcamTable::new(vec![PrefixRule::match_all(0)], 21, 1).unwrap();
        assert!(matches!(enumerate_induced(&table), Err(Error::Refused(_))));
        assert_eq!(table_induced_partition(&table).unwrap().parts(), &[1 << 21]);
    }

    #[test]
    fn wide_tables() {
        let half = 1u128 << 63;
        let part = p(&[half, half - 1, 1], 64);
        let table = sequence_to_table(&bit_matcher(&part), 3).unwrap();
        assert_eq!(table_induced_partition(&table).unwrap(), part);
        assert_eq!(table.len(), complexity(&part));
    }

    fn compositions(k: usize, width: u32) -> Vec<Vec<Weight>> {
        fn rec(k: usize, left: Weight, cur: &mut Vec<Weight>, out: &mut Vec<Vec<Weight>>) {
            if k == 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for v in 0..=left {
                cur.push(v);
                rec(k - 1, left - v, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, pow2(width), &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn exhaustive_round_trip() {
        for width in 1..=6 {
            for k in 1..=4 {
                if width == 6 && k == 4 {
                    continue; // covered by the random sweep below; 47905 cases
                }
                for parts in compositions(k, width) {
                    let part = p(&parts, width);
                    for seq in [bit_matcher(&part), niagara(&part, None).unwrap()] {
                        let table = sequence_to_table(&seq, k).unwrap();
                        assert_eq!(table_induced_partition(&table).unwrap(), part);
                        assert_eq!(enumerate_induced(&table).unwrap(), part);
                        assert_eq!(table.len(), seq.len());
                        table.check_minimal().unwrap();
                    }
                }
            }
        }
    }

    /// Builds a random valid table by nesting prefixes under random parents.
    fn random_table(rng: &mut ChaCha8Rng, rules: usize, width: u32, k: usize) -> TcamTable {
        let mut set = std::collections::HashSet::new();
        let mut out = vec![PrefixRule::match_all(rng.gen_range(0..k))];
        set.insert((0u32, 0u64));
        while out.len() < rules {
            let len = rng.gen_range(1..=width);
            let bits = rng.gen_range(0..(1u64 << len));
            if set.insert((len, bits)) {
                out.push(PrefixRule { bits, len, target: rng.gen_range(0..k) });
            }
        }
        out.sort_by_key(|r| std::cmp::Reverse(r.len));
        TcamTable::new(out, width, k).unwrap()
    }

    #[test]
    fn arithmetic_and_enumeration_agree_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let width = rng.gen_range(1..=12);
            let rules = rng.gen_range(1..=10.min(1 << width));
            let table = random_table(&mut rng, rules, width, 4);
            assert_eq!(table_induced_partition(&table).unwrap(), enumerate_induced(&table).unwrap());
            let text = table.to_string();
            let back: TcamTable = text.parse().unwrap();
            assert_eq!(back.to_string(), text);
            assert_eq!(back.rules(), table.rules());
        }
    }

    proptest! {
        #[test]
        fn round_trip_random(seed: u64, k in 1usize..20, w in 1u32..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = k.min(1 << w.min(20));
            let part = sample_ordered_partition(k, w, &mut rng).unwrap();
            let seq = bit_matcher(&part);
            let table = sequence_to_table(&seq, k).unwrap();
            prop_assert_eq!(table_induced_partition(&table).unwrap(), part.clone());
            prop_assert_eq!(table.len(), complexity(&part));
            prop_assert!(table.check_minimal().is_ok());
            let ni = niagara(&part, None).unwrap();
            let table = sequence_to_table(&ni, k).unwrap();
            prop_assert_eq!(table_induced_partition(&table).unwrap(), induced_partition(&ni, k).unwrap());
        }
    }
}
