//! Uniform morphisms over small alphabets and indexed views of their fixed points.
//!
//! A [`Morphism`] maps every letter to a word of the same length `m`. Because the
//! axiom's image starts with the axiom, the iterates are nested prefixes of a single
//! infinite word, and a [`LetterStream`] exposes a finite prefix of that word by rank.
//!
//! Letter access picks the cheapest route the morphism admits:
//! the binary digit-sum parity for the two-letter Thue–Morse rules, an ordered
//! product of base-`m` digits when a group certificate validates, and memoized
//! block expansion otherwise. All routes agree wherever they are defined.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Explicit words above this many letters are refused unless the caller raises the budget.
pub const DEFAULT_WORD_BUDGET: u64 = 1 << 28;

/// Block expansions hold at most this many letters per alphabet symbol.
const BLOCK_TARGET: u64 = 1 << 16;

/// Index of a symbol in its morphism's alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// On-disk form of a morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismConfig {
    pub alphabet: Vec<String>,
    pub axiom: String,
    pub rules: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupConfig>,
}

/// Group certificate: `elements[i]` corresponds to `alphabet[i]`, and
/// `table[x][y]` names the element `x ∘ y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub elements: Vec<String>,
    pub table: Vec<Vec<String>>,
}

/// A validated finite group whose composition table generates the rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupStructure {
    elements: Vec<String>,
    table: Vec<Vec<u8>>,
    identity: u8,
    /// Element at each position of the axiom's image.
    generators: Vec<u8>,
}

impl GroupStructure {
    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn identity(&self) -> Letter {
        Letter(self.identity)
    }

    pub fn compose(&self, x: Letter, y: Letter) -> Letter {
        Letter(self.table[x.index()][y.index()])
    }

    fn validate(config: &GroupConfig, alphabet: &[char], rules: &[Vec<Letter>], axiom: Letter) -> Result<Self> {
        let n = alphabet.len();
        let bad = |msg: String| Error::InvalidMorphism(format!("group certificate: {msg}"));
        if config.elements.len() != n {
            return Err(bad(format!(
                "{} elements for an alphabet of {n} letters",
                config.elements.len()
            )));
        }
        let mut position = HashMap::new();
        for (i, e) in config.elements.iter().enumerate() {
            if position.insert(e.as_str(), i as u8).is_some() {
                return Err(bad(format!("duplicate element {e:?}")));
            }
        }
        if config.table.len() != n {
            return Err(bad(format!("table has {} rows, expected {n}", config.table.len())));
        }
        let mut table = Vec::with_capacity(n);
        for row in &config.table {
            if row.len() != n {
                return Err(bad(format!("table row has {} entries, expected {n}", row.len())));
            }
            let parsed = row
                .iter()
                .map(|e| {
                    position
                        .get(e.as_str())
                        .copied()
                        .ok_or_else(|| bad(format!("unknown element {e:?}")))
                })
                .collect::<Result<Vec<u8>>>()?;
            table.push(parsed);
        }

        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
            .ok_or_else(|| bad("no identity element".into()))? as u8;
        #[allow(clippy::needless_range_loop)]
        for x in 0..n {
            if !(0..n).any(|y| table[x][y] == identity && table[y][x] == identity) {
                return Err(bad(format!("element {:?} has no inverse", config.elements[x])));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = table[x][y] as usize;
                for z in 0..n {
                    if table[xy][z] != table[x][table[y][z] as usize] {
                        return Err(bad("composition is not associative".into()));
                    }
                }
            }
        }

        let generators: Vec<u8> = rules[axiom.index()].iter().map(|l| l.0).collect();
        for (i, rule) in rules.iter().enumerate() {
            for (j, letter) in rule.iter().enumerate() {
                if table[i][generators[j] as usize] != letter.0 {
                    return Err(bad(format!(
                        "rule for {:?} position {j} is {:?}, composition gives {:?}",
                        alphabet[i],
                        alphabet[letter.index()],
                        alphabet[table[i][generators[j] as usize] as usize]
                    )));
                }
            }
        }

        Ok(GroupStructure {
            elements: config.elements.clone(),
            table,
            identity,
            generators,
        })
    }
}

/// How a morphism's fixed point can be indexed directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    /// Two letters `x → xy`, `y → yx`: letter is `x` iff the digit sum of `rank − 1` is even.
    ThueMorse { even: Letter, odd: Letter },
    /// Rules are rows of a validated group table.
    Group,
    /// No closed form; letters come from memoized rewriting.
    Expansion,
}

/// A uniform, prolongable morphism.
#[derive(Clone, Debug)]
pub struct Morphism {
    name: String,
    alphabet: Vec<char>,
    rules: Vec<Vec<Letter>>,
    axiom: Letter,
    group: Option<GroupStructure>,
    kind: IndexKind,
}

impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.rules == other.rules && self.axiom == other.axiom
    }
}

impl Eq for Morphism {}

impl Morphism {
    /// Built-in presets: `phi` (A→AB, B→BA) and `z3` (A→ABC, B→BCA, C→CAB over Z/3).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "phi" => Morphism::from_config("phi", &phi_config()),
            "z3" => Morphism::from_config("z3", &z3_config()),
            other => Err(Error::InvalidArgument(format!("unknown morphism preset {other:?}"))),
        }
    }

    pub fn phi() -> Self {
        Morphism::preset("phi").expect("preset is valid")
    }

    pub fn z3() -> Self {
        Morphism::preset("z3").expect("preset is valid")
    }

    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        let config: MorphismConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidMorphism(format!("config: {e}")))?;
        Morphism::from_config(name, &config)
    }

    pub fn from_config(name: &str, config: &MorphismConfig) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidMorphism(msg);
        if config.alphabet.len() < 2 {
            return Err(invalid("alphabet needs at least two letters".into()));
        }
        if config.alphabet.len() > u8::MAX as usize {
            return Err(invalid(format!(
                "alphabet of {} letters is too large",
                config.alphabet.len()
            )));
        }
        let mut alphabet = Vec::with_capacity(config.alphabet.len());
        let mut lookup = HashMap::new();
        for (i, symbol) in config.alphabet.iter().enumerate() {
            let mut chars = symbol.chars();
            let c = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(invalid(format!("letter {symbol:?} is not a single character"))),
            };
            if lookup.insert(c, Letter(i as u8)).is_some() {
                return Err(invalid(format!("letter {c:?} listed twice")));
            }
            alphabet.push(c);
        }
        let parse_word = |word: &str| -> Result<Vec<Letter>> {
            word.chars()
                .map(|c| {
                    lookup
                        .get(&c)
                        .copied()
                        .ok_or_else(|| Error::InvalidMorphism(format!("symbol {c:?} is not in the alphabet")))
                })
                .collect()
        };

        let axiom = match parse_word(&config.axiom)?.as_slice() {
            [single] => *single,
            _ => return Err(invalid(format!("axiom {:?} must be a single letter", config.axiom))),
        };

        for key in config.rules.keys() {
            let mut chars = key.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if lookup.contains_key(&c) => {}
                _ => return Err(invalid(format!("rule key {key:?} is not a letter of the alphabet"))),
            }
        }
        let mut rules = Vec::with_capacity(alphabet.len());
        for (symbol, c) in config.alphabet.iter().zip(&alphabet) {
            let word = config
                .rules
                .get(symbol)
                .ok_or_else(|| invalid(format!("no rule for letter {c:?}")))?;
            rules.push(parse_word(word)?);
        }
        let width = rules[0].len();
        if width < 2 {
            return Err(invalid("rule words must have length at least 2".into()));
        }
        if let Some((i, r)) = rules.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(invalid(format!(
                "rule for {:?} has length {}, expected {width} (non-uniform morphisms are not supported)",
                alphabet[i],
                r.len()
            )));
        }
        if rules[axiom.index()][0] != axiom {
            return Err(invalid(format!(
                "image of the axiom {:?} must begin with the axiom",
                alphabet[axiom.index()]
            )));
        }

        let group = config
            .group
            .as_ref()
            .map(|g| GroupStructure::validate(g, &alphabet, &rules, axiom))
            .transpose()?;

        let kind = if is_thue_morse(&rules, axiom) {
            let other = Letter(1 - axiom.0);
            IndexKind::ThueMorse {
                even: axiom,
                odd: other,
            }
        } else if group.is_some() {
            IndexKind::Group
        } else {
            IndexKind::Expansion
        };

        Ok(Morphism {
            name: name.to_string(),
            alphabet,
            rules,
            axiom,
            group,
            kind,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn axiom(&self) -> Letter {
        self.axiom
    }

    /// Common length of every rule word.
    pub fn width(&self) -> usize {
        self.rules[0].len()
    }

    pub fn rule(&self, letter: Letter) -> &[Letter] {
        &self.rules[letter.index()]
    }

    pub fn group(&self) -> Option<&GroupStructure> {
        self.group.as_ref()
    }

    pub fn index_kind(&self) -> IndexKind {
        self.kind
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet.len() == 2
    }

    pub fn symbol(&self, letter: Letter) -> char {
        self.alphabet[letter.index()]
    }

    pub fn letter_of(&self, symbol: char) -> Option<Letter> {
        self.alphabet.iter().position(|&c| c == symbol).map(|i| Letter(i as u8))
    }

    pub fn render(&self, word: &[Letter]) -> String {
        word.iter().map(|&l| self.symbol(l)).collect()
    }

    pub fn to_config(&self) -> MorphismConfig {
        let alphabet: Vec<String> = self.alphabet.iter().map(|c| c.to_string()).collect();
        let rules = self
            .alphabet
            .iter()
            .zip(&self.rules)
            .map(|(c, r)| (c.to_string(), self.render(r)))
            .collect();
        let group = self.group.as_ref().map(|g| GroupConfig {
            elements: g.elements.clone(),
            table: g
                .table
                .iter()
                .map(|row| row.iter().map(|&e| g.elements[e as usize].clone()).collect())
                .collect(),
        });
        MorphismConfig {
            alphabet,
            axiom: self.symbol(self.axiom).to_string(),
            rules,
            group,
        }
    }

    /// Short content hash of the canonical config, stable across runs.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(&self.to_config()).expect("config serializes");
        let hash = Sha256::digest(&canonical);
        hash[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Length of the iterate of order `k`, if it fits in a `u64`.
    pub fn iterate_len(&self, k: u32) -> Option<u64> {
        (self.width() as u64).checked_pow(k)
    }

    /// Iterate of order `k` under the default letter budget.
    pub fn iterate(&self, k: u32) -> Result<Vec<Letter>> {
        self.iterate_with_budget(k, DEFAULT_WORD_BUDGET)
    }

    pub fn iterate_with_budget(&self, k: u32, budget: u64) -> Result<Vec<Letter>> {
        let len = self.iterate_len(k).unwrap_or(u64::MAX);
        if len > budget {
            return Err(Error::Budget {
                what: "explicit word",
                requested: len,
                limit: budget,
            });
        }
        let mut word = Vec::with_capacity(len as usize);
        word.push(self.axiom);
        for _ in 0..k {
            word = word.iter().flat_map(|&l| self.rule(l).iter().copied()).collect();
        }
        Ok(word)
    }

    /// Letter at 0-based `index` of the fixed point by closed form, if one applies.
    fn direct_letter(&self, index: u64) -> Option<Letter> {
        match self.kind {
            IndexKind::ThueMorse { even, odd } => Some(if index.count_ones().is_multiple_of(2) {
                even
            } else {
                odd
            }),
            IndexKind::Group => {
                let group = self.group.as_ref()?;
                let base = self.width() as u64;
                let mut rest = index;
                let mut acc = group.identity;
                // least significant digit is the rightmost factor of the product
                while rest > 0 {
                    let digit = (rest % base) as usize;
                    acc = group.table[group.generators[digit] as usize][acc as usize];
                    rest /= base;
                }
                Some(Letter(acc))
            }
            IndexKind::Expansion => None,
        }
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for (c, r) in self.alphabet.iter().zip(&self.rules) {
            write!(f, " {c}->{}", self.render(r))?;
        }
        Ok(())
    }
}

fn is_thue_morse(rules: &[Vec<Letter>], axiom: Letter) -> bool {
    if rules.len() != 2 || rules[0].len() != 2 {
        return false;
    }
    let x = axiom;
    let y = Letter(1 - axiom.0);
    rules[x.index()] == [x, y] && rules[y.index()] == [y, x]
}

fn phi_config() -> MorphismConfig {
    MorphismConfig {
        alphabet: vec!["A".into(), "B".into()],
        axiom: "A".into(),
        rules: [("A", "AB"), ("B", "BA")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        group: Some(GroupConfig {
            elements: vec!["0".into(), "1".into()],
            table: vec![vec!["0".into(), "1".into()], vec!["1".into(), "0".into()]],
        }),
    }
}

fn z3_config() -> MorphismConfig {
    let names = ["0", "1", "2"];
    MorphismConfig {
        alphabet: vec!["A".into(), "B".into(), "C".into()],
        axiom: "A".into(),
        rules: [("A", "ABC"), ("B", "BCA"), ("C", "CAB")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        group: Some(GroupConfig {
            elements: names.iter().map(|s| s.to_string()).collect(),
            table: (0..3)
                .map(|x| (0..3).map(|y| names[(x + y) % 3].to_string()).collect())
                .collect(),
        }),
    }
}

/// Memoized `σ^depth(letter)` for every letter, filled on first use.
#[derive(Debug)]
struct BlockCache {
    depth: u32,
    block_len: u64,
    expansions: Vec<OnceLock<Vec<Letter>>>,
}

impl BlockCache {
    fn new(morphism: &Morphism) -> Self {
        let width = morphism.width() as u64;
        let mut depth = 1;
        while width.saturating_pow(depth + 1) <= BLOCK_TARGET {
            depth += 1;
        }
        BlockCache {
            depth,
            block_len: width.pow(depth),
            expansions: (0..morphism.alphabet.len()).map(|_| OnceLock::new()).collect(),
        }
    }

    fn expansion(&self, morphism: &Morphism, letter: Letter) -> &[Letter] {
        self.expansions[letter.index()].get_or_init(|| {
            let mut word = vec![letter];
            for _ in 0..self.depth {
                word = word.iter().flat_map(|&l| morphism.rule(l).iter().copied()).collect();
            }
            word
        })
    }

    fn letter(&self, morphism: &Morphism, index: u64) -> Letter {
        if index < self.block_len {
            return self.expansion(morphism, morphism.axiom)[index as usize];
        }
        // the fixed point is invariant under σ^depth, so block q expands letter q
        let parent = self.letter(morphism, index / self.block_len);
        self.expansion(morphism, parent)[(index % self.block_len) as usize]
    }
}

/// Requested letter access route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccessMode {
    DirectIndexed,
    BlockExpanded,
}

/// A rank-indexed view of a prefix of a morphism's fixed point.
///
/// Rank `r` (1-based) of the view reads fixed-point index `(r − 1) · step`;
/// `step` is 1 except for decimated streams.
#[derive(Clone, Debug)]
pub struct LetterStream {
    morphism: Arc<Morphism>,
    length: u64,
    step: u64,
    mode: AccessMode,
    blocks: Arc<BlockCache>,
}

impl LetterStream {
    /// Prefix of `length` letters using the fastest available access mode.
    pub fn new(morphism: Arc<Morphism>, length: u64) -> Self {
        let mode = if morphism.kind == IndexKind::Expansion {
            AccessMode::BlockExpanded
        } else {
            AccessMode::DirectIndexed
        };
        let blocks = Arc::new(BlockCache::new(&morphism));
        LetterStream {
            morphism,
            length,
            step: 1,
            mode,
            blocks,
        }
    }

    pub fn with_mode(morphism: Arc<Morphism>, length: u64, mode: AccessMode) -> Result<Self> {
        if mode == AccessMode::DirectIndexed && morphism.kind == IndexKind::Expansion {
            return Err(Error::InvalidArgument(format!(
                "morphism {} has no direct index formula",
                morphism.name
            )));
        }
        let mut stream = LetterStream::new(morphism, length);
        stream.mode = mode;
        Ok(stream)
    }

    /// The iterate of order `k`, as a stream.
    pub fn of_order(morphism: Arc<Morphism>, k: u32) -> Result<Self> {
        let length = morphism
            .iterate_len(k)
            .ok_or_else(|| Error::InvalidArgument(format!("order {k} overflows a 64-bit length")))?;
        Ok(LetterStream::new(morphism, length))
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn shared_morphism(&self) -> Arc<Morphism> {
        Arc::clone(&self.morphism)
    }

    pub fn len(&self) -> u64 {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn mode(&self) -> AccessMode {
        self.mode
    }

    /// Same letters, shorter or longer prefix.
    pub fn with_len(&self, length: u64) -> Self {
        LetterStream { length, ..self.clone() }
    }

    pub fn letter_at(&self, rank: u64) -> Result<Letter> {
        if rank == 0 || rank > self.length {
            return Err(Error::RankOutOfRange {
                rank,
                length: self.length,
            });
        }
        Ok(self.letter_unchecked(rank))
    }

    /// Letter at a rank already known to be in range.
    pub(crate) fn letter_unchecked(&self, rank: u64) -> Letter {
        let index = (rank - 1) * self.step;
        match self.mode {
            AccessMode::DirectIndexed => self
                .morphism
                .direct_letter(index)
                .expect("direct mode requires a closed form"),
            AccessMode::BlockExpanded => self.blocks.letter(&self.morphism, index),
        }
    }

    /// Letters at ranks `1..=len` in order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (1..=self.length).map(move |r| self.letter_unchecked(r))
    }

    pub fn to_word(&self) -> String {
        self.letters().map(|l| self.morphism.symbol(l)).collect()
    }

    /// Keeps ranks ≡ 1 (mod 2^`exponent`). For the Thue–Morse rules this maps the
    /// iterate of order `k` onto the iterate of order `k − exponent`.
    pub fn decimate(&self, exponent: u32) -> Result<LetterStream> {
        if !matches!(self.morphism.kind, IndexKind::ThueMorse { .. }) {
            return Err(Error::InvalidArgument(
                "decimation is defined for the binary Thue–Morse morphism only".into(),
            ));
        }
        if exponent == 0 {
            return Err(Error::InvalidArgument("decimation exponent must be at least 1".into()));
        }
        let factor = 1u64
            .checked_shl(exponent)
            .filter(|&f| f <= self.length)
            .ok_or_else(|| Error::InvalidArgument(format!("2^{exponent} exceeds the stream length {}", self.length)))?;
        Ok(LetterStream {
            length: (self.length - 1) / factor + 1,
            step: self.step * factor,
            ..self.clone()
        })
    }
}

/// Whether `iterate(k + 1) = iterate(k) ++ swap(iterate(k))` for a binary morphism.
pub fn complement_concat_check(morphism: &Morphism, k: u32) -> Result<bool> {
    complement_concat_check_with_budget(morphism, k, DEFAULT_WORD_BUDGET)
}

pub fn complement_concat_check_with_budget(morphism: &Morphism, k: u32, budget: u64) -> Result<bool> {
    if !morphism.is_binary() {
        return Err(Error::InvalidArgument("letter swap needs a two-letter alphabet".into()));
    }
    let current = morphism.iterate_with_budget(k, budget)?;
    let next = morphism.iterate_with_budget(k + 1, budget)?;
    let swapped = current.iter().map(|l| Letter(1 - l.0));
    Ok(next.len() == 2 * current.len() && next.iter().copied().eq(current.iter().copied().chain(swapped)))
}

/// Worst-case letter imbalance over all short factors of a binary stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub length: u64,
    pub max_len: u64,
    pub factors_scanned: u64,
    pub max_imbalance: u64,
    /// First factor attaining `max_imbalance`, as (start rank, length).
    pub worst_factor: (u64, u64),
    /// Every odd-length factor has imbalance exactly 1.
    pub odd_lengths_unit: bool,
    /// Every even-length factor has imbalance 0 or 2.
    pub even_lengths_zero_or_two: bool,
    /// Every even-length prefix is balanced.
    pub even_prefixes_balanced: bool,
}

impl BalanceReport {
    pub fn refinements_hold(&self) -> bool {
        self.odd_lengths_unit && self.even_lengths_zero_or_two && self.even_prefixes_balanced
    }
}

/// Scans every contiguous factor of length `1..=max_len`.
pub fn factor_balance_scan(stream: &LetterStream, max_len: u64) -> Result<BalanceReport> {
    if !stream.morphism().is_binary() {
        return Err(Error::InvalidArgument(
            "balance scan needs a two-letter alphabet".into(),
        ));
    }
    if max_len > stream.len() {
        return Err(Error::InvalidArgument(format!(
            "factor length {max_len} exceeds stream length {}",
            stream.len()
        )));
    }
    if stream.len() > DEFAULT_WORD_BUDGET {
        return Err(Error::Budget {
            what: "balance scan prefix",
            requested: stream.len(),
            limit: DEFAULT_WORD_BUDGET,
        });
    }
    let first = stream.morphism().axiom();
    // prefix[i] = (#first − #other) over ranks 1..=i
    let mut prefix = Vec::with_capacity(stream.len() as usize + 1);
    prefix.push(0i64);
    let mut acc = 0i64;
    for letter in stream.letters() {
        acc += if letter == first { 1 } else { -1 };
        prefix.push(acc);
    }

    let n = stream.len() as usize;
    let mut report = BalanceReport {
        length: stream.len(),
        max_len,
        factors_scanned: 0,
        max_imbalance: 0,
        worst_factor: (0, 0),
        odd_lengths_unit: true,
        even_lengths_zero_or_two: true,
        even_prefixes_balanced: true,
    };
    for len in 1..=max_len as usize {
        for start in 0..=n - len {
            let imbalance = (prefix[start + len] - prefix[start]).unsigned_abs();
            if imbalance > report.max_imbalance {
                report.max_imbalance = imbalance;
                report.worst_factor = (start as u64 + 1, len as u64);
            }
            if len % 2 == 1 {
                report.odd_lengths_unit &= imbalance == 1;
            } else {
                report.even_lengths_zero_or_two &= imbalance == 0 || imbalance == 2;
            }
        }
        report.factors_scanned += (n - len + 1) as u64;
    }
    report.even_prefixes_balanced = (2..=n).step_by(2).all(|len| prefix[len] == 0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(m: &Morphism, k: u32) -> String {
        m.render(&m.iterate(k).unwrap())
    }

    #[test]
    fn phi_iterates() {
        let phi = Morphism::phi();
        let expected = ["A", "AB", "ABBA", "ABBABAAB", "ABBABAABBAABABBA"];
        for (k, w) in expected.iter().enumerate() {
            assert_eq!(word(&phi, k as u32), *w);
        }
    }

    #[test]
    fn z3_second_iterate() {
        assert_eq!(word(&Morphism::z3(), 2), "ABCBCACAB");
    }

    #[test]
    fn presets_pick_direct_index() {
        assert!(matches!(Morphism::phi().index_kind(), IndexKind::ThueMorse { .. }));
        assert_eq!(Morphism::z3().index_kind(), IndexKind::Group);
    }

    #[test]
    fn renamed_phi_is_recognized() {
        let m = Morphism::from_json(
            "xy",
            r#"{"alphabet":["x","y"],"axiom":"y","rules":{"x":"xy","y":"yx"}}"#,
        )
        .unwrap();
        assert_eq!(
            m.index_kind(),
            IndexKind::ThueMorse {
                even: Letter(1),
                odd: Letter(0)
            }
        );
        let s = LetterStream::new(Arc::new(m), 8);
        assert_eq!(s.to_word(), "yxxyxyyx");
    }

    #[test]
    fn letter_at_examples() {
        let s = LetterStream::new(Arc::new(Morphism::phi()), 1 << 20);
        let a = Letter(0);
        assert_eq!(s.letter_at(1).unwrap(), a);
        assert_eq!(s.letter_at(5).unwrap(), Letter(1));
        assert_eq!(s.letter_at(1 << 20).unwrap(), a);
        let blocks = LetterStream::with_mode(Arc::new(Morphism::phi()), 1 << 20, AccessMode::BlockExpanded).unwrap();
        assert_eq!(blocks.letter_at(1 << 20).unwrap(), a);
    }

    #[test]
    fn letter_at_out_of_range() {
        let s = LetterStream::new(Arc::new(Morphism::phi()), 4);
        assert!(matches!(s.letter_at(0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(
            s.letter_at(5),
            Err(Error::RankOutOfRange { rank: 5, length: 4 })
        ));
    }

    #[test]
    fn decimation_examples() {
        let phi = Arc::new(Morphism::phi());
        let s3 = LetterStream::of_order(phi.clone(), 3).unwrap();
        assert_eq!(s3.decimate(1).unwrap().to_word(), "ABBA");
        let s4 = LetterStream::of_order(phi.clone(), 4).unwrap();
        assert_eq!(s4.decimate(2).unwrap().to_word(), "ABBA");
        let s1 = LetterStream::of_order(phi, 1).unwrap();
        assert_eq!(s1.decimate(1).unwrap().to_word(), "A");
        assert!(s1.decimate(2).is_err());
        let z3 = LetterStream::of_order(Arc::new(Morphism::z3()), 2).unwrap();
        assert!(z3.decimate(1).is_err());
    }

    #[test]
    fn complement_concat_examples() {
        let phi = Morphism::phi();
        for k in [0, 1, 3] {
            assert!(complement_concat_check(&phi, k).unwrap());
        }
        assert!(complement_concat_check(&Morphism::z3(), 1).is_err());
    }

    #[test]
    fn balance_examples() {
        let phi = Arc::new(Morphism::phi());
        let s10 = LetterStream::of_order(phi.clone(), 10).unwrap();
        let report = factor_balance_scan(&s10, 64).unwrap();
        assert_eq!(report.max_imbalance, 2);
        assert!(report.refinements_hold());

        let s4 = LetterStream::of_order(phi, 4).unwrap();
        let whole = factor_balance_scan(&s4, 16).unwrap();
        assert!(whole.even_prefixes_balanced);
        // "BB" at ranks 2..3 is the first factor with imbalance 2
        let short = factor_balance_scan(&s4, 2).unwrap();
        assert_eq!(short.worst_factor, (2, 2));
        assert_eq!(short.max_imbalance, 2);
    }

    #[test]
    fn budget_is_enforced() {
        let phi = Morphism::phi();
        let err = phi.iterate_with_budget(5, 16).unwrap_err();
        assert!(matches!(
            err,
            Error::Budget {
                requested: 32,
                limit: 16,
                ..
            }
        ));
        assert_eq!(err.exit_code(), 3);
        assert!(phi.iterate(29).is_err());
    }

    #[test]
    fn validation_errors() {
        let cases = [
            r#"{"alphabet":["A"],"axiom":"A","rules":{"A":"AA"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"AB","B":"B"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"BA","B":"AB"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"AC","B":"BA"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"AB"}}"#,
            r#"{"alphabet":["A","A"],"axiom":"A","rules":{"A":"AA"}}"#,
            r#"{"alphabet":["AB","B"],"axiom":"AB","rules":{"AB":"AB","B":"BA"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"AB","rules":{"A":"AB","B":"BA"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"A","B":"B"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"AB","B":"BA","C":"CC"}}"#,
            r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"AB","B":"BA"},"extra":1}"#,
        ];
        for case in cases {
            let err = Morphism::from_json("bad", case).unwrap_err();
            assert!(matches!(err, Error::InvalidMorphism(_)), "{case}: {err}");
        }
    }

    #[test]
    fn group_certificate_is_checked() {
        // rules consistent with Z/3 but the table is not a group
        let not_group = r#"{"alphabet":["A","B","C"],"axiom":"A","rules":{"A":"ABC","B":"BCA","C":"CAB"},
            "group":{"elements":["0","1","2"],"table":[["0","1","2"],["1","1","0"],["2","0","1"]]}}"#;
        assert!(Morphism::from_json("g", not_group).is_err());
        // a valid group whose table does not generate these rules
        let mismatch = r#"{"alphabet":["A","B","C"],"axiom":"A","rules":{"A":"ABC","B":"BAC","C":"CAB"},
            "group":{"elements":["0","1","2"],"table":[["0","1","2"],["1","2","0"],["2","0","1"]]}}"#;
        assert!(Morphism::from_json("g", mismatch).is_err());
        let no_identity = r#"{"alphabet":["A","B"],"axiom":"A","rules":{"A":"AB","B":"BA"},
            "group":{"elements":["0","1"],"table":[["1","0"],["0","1"]]}}"#;
        assert!(Morphism::from_json("g", no_identity).is_err());
    }

    #[test]
    fn non_abelian_group_morphism() {
        // S3 as permutations of {0, 1, 2}; (x ∘ y)(i) = x(y(i))
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
        let elements = ["e", "r", "rr", "s", "sr", "srr"];
        let compose = |x: usize, y: usize| -> usize {
            let p = [perms[x][perms[y][0]], perms[x][perms[y][1]], perms[x][perms[y][2]]];
            perms.iter().position(|q| *q == p).unwrap()
        };
        let table: Vec<Vec<String>> = (0..6)
            .map(|x| (0..6).map(|y| elements[compose(x, y)].to_string()).collect())
            .collect();
        assert_ne!(compose(1, 3), compose(3, 1));
        let alphabet = ["A", "B", "C", "D", "E", "F"];
        let rules: BTreeMap<String, String> = (0..6)
            .map(|x| {
                let word: String = (0..6)
                    .map(|g| {
                        let idx = elements.iter().position(|e| *e == table[x][g]).unwrap();
                        alphabet[idx]
                    })
                    .collect();
                (alphabet[x].to_string(), word)
            })
            .collect();
        let config = MorphismConfig {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            axiom: "A".into(),
            rules,
            group: Some(GroupConfig {
                elements: elements.iter().map(|s| s.to_string()).collect(),
                table,
            }),
        };
        let m = Arc::new(Morphism::from_config("s3", &config).unwrap());
        assert_eq!(m.index_kind(), IndexKind::Group);
        let explicit = m.iterate(3).unwrap();
        let direct = LetterStream::new(m.clone(), explicit.len() as u64);
        let blocks = LetterStream::with_mode(m, explicit.len() as u64, AccessMode::BlockExpanded).unwrap();
        for (i, &l) in explicit.iter().enumerate() {
            let rank = i as u64 + 1;
            assert_eq!(direct.letter_at(rank).unwrap(), l, "rank {rank}");
            assert_eq!(blocks.letter_at(rank).unwrap(), l, "rank {rank}");
        }
    }

    #[test]
    fn config_round_trip_and_digest() {
        let phi = Morphism::phi();
        let text = serde_json::to_string(&phi.to_config()).unwrap();
        let back = Morphism::from_json("copy", &text).unwrap();
        assert_eq!(back, phi);
        assert_eq!(back.digest(), phi.digest());
        assert_ne!(phi.digest(), Morphism::z3().digest());
    }

    #[test]
    fn expansion_only_morphism_uses_blocks() {
        // period-doubling word: no group certificate, not Thue–Morse
        let m = Arc::new(
            Morphism::from_json(
                "pd",
                r#"{"alphabet":["a","b"],"axiom":"a","rules":{"a":"ab","b":"aa"}}"#,
            )
            .unwrap(),
        );
        assert_eq!(m.index_kind(), IndexKind::Expansion);
        assert!(LetterStream::with_mode(m.clone(), 8, AccessMode::DirectIndexed).is_err());
        let s = LetterStream::new(m.clone(), 1 << 18);
        assert_eq!(s.mode(), AccessMode::BlockExpanded);
        let explicit = m.iterate(18).unwrap();
        assert!(s.letters().eq(explicit.iter().copied()));
    }
}
