//! Fractional factorial designs, their file format and regular fractions
//! generated by defining words.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime, Field};

/// How factor levels are written down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coding {
    /// Two levels written `+1` (level 0) and `-1` (level 1).
    PlusMinusOne,
    /// Levels written `0, 1, ..., s-1`.
    IntegerLevels,
    /// Level `j` stands for the complex root of unity `w^j`.
    ComplexRoots,
}

impl Coding {
    pub fn tag(self) -> &'static str {
        match self {
            Coding::PlusMinusOne => "pm1",
            Coding::IntegerLevels => "levels",
            Coding::ComplexRoots => "roots",
        }
    }
}

impl FromStr for Coding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm1" | "plus-minus-one" => Ok(Coding::PlusMinusOne),
            "levels" | "integer-levels" => Ok(Coding::IntegerLevels),
            "roots" | "complex-roots" => Ok(Coding::ComplexRoots),
            _ => Err(Error::Input(format!("unknown coding {s:?}"))),
        }
    }
}

/// A set of distinct runs over `m` factors with `s` levels each.
///
/// Runs are stored as level indices `0..s`; for two-level designs level 0
/// is the coded value `+1` and level 1 is `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Design {
    m: usize,
    s: u32,
    coding: Coding,
    runs: Vec<Vec<u32>>,
}

impl Design {
    pub fn new(m: usize, s: u32, coding: Coding, runs: Vec<Vec<u32>>) -> Result<Self> {
        if !is_prime(s) {
            return Err(Error::Input(format!("level count {s} is not prime")));
        }
        if s == 2 && coding != Coding::PlusMinusOne {
            return Err(Error::Input("two-level designs use the pm1 coding".into()));
        }
        if s > 2 && coding == Coding::PlusMinusOne {
            return Err(Error::Input("pm1 coding requires s = 2".into()));
        }
        if runs.is_empty() {
            return Err(Error::Input("design has no runs".into()));
        }
        let mut seen = HashSet::new();
        for (i, r) in runs.iter().enumerate() {
            if r.len() != m {
                return Err(Error::Input(format!("run {} has {} levels, expected {m}", i + 1, r.len())));
            }
            if let Some(l) = r.iter().find(|&&l| l >= s) {
                return Err(Error::Input(format!("run {} has invalid level {l}", i + 1)));
            }
            if !seen.insert(r) {
                return Err(Error::Input(format!("run {} is replicated", i + 1)));
            }
        }
        Ok(Design { m, s, coding, runs })
    }

    /// Two-level design from runs of `+1`/`-1` values.
    pub fn from_signs(runs: &[Vec<i32>]) -> Result<Self> {
        let m = runs.first().map_or(0, Vec::len);
        let levels = runs
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| match v {
                        1 => Ok(0),
                        -1 => Ok(1),
                        _ => Err(Error::Input(format!("two-level value {v} is not +1 or -1"))),
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Design::new(m, 2, Coding::PlusMinusOne, levels)
    }

    /// The full factorial `{+1,-1}^m` in standard order (`+1` first, `x1`
    /// slowest).
    pub fn full_factorial(m: usize) -> Self {
        let runs = (0..1u64 << m).map(|k| point_from_code(m, k)).collect();
        Design {
            m,
            s: 2,
            coding: Coding::PlusMinusOne,
            runs,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn n(&self) -> usize {
        self.runs.len()
    }

    pub fn coding(&self) -> Coding {
        self.coding
    }

    pub fn runs(&self) -> &[Vec<u32>] {
        &self.runs
    }

    pub fn is_two_level(&self) -> bool {
        self.s == 2
    }

    pub(crate) fn require_two_level(&self) -> Result<()> {
        if self.s != 2 {
            return Err(Error::Input(format!(
                "operation needs a two-level design, got s = {}",
                self.s
            )));
        }
        Ok(())
    }

    /// Runs as `+1`/`-1` values (two-level designs only).
    pub fn signs(&self) -> Result<Vec<Vec<i32>>> {
        self.require_two_level()?;
        Ok(self
            .runs
            .iter()
            .map(|r| r.iter().map(|&l| if l == 0 { 1 } else { -1 }).collect())
            .collect())
    }

    /// Bit `i` set when factor `i` is at level `-1` (two-level designs).
    pub fn run_codes(&self) -> Result<Vec<u64>> {
        self.require_two_level()?;
        Ok(self.runs.iter().map(|r| code_of_point(r)).collect())
    }

    /// Runs as points of `K^m` under the design's coding.
    pub fn points<C: Field>(&self) -> Result<Vec<Vec<C>>> {
        self.runs
            .iter()
            .map(|r| r.iter().map(|&l| self.coded_value::<C>(l)).collect())
            .collect()
    }

    fn coded_value<C: Field>(&self, level: u32) -> Result<C> {
        match self.coding {
            Coding::IntegerLevels => Ok(C::from_i64(level as i64)),
            Coding::PlusMinusOne | Coding::ComplexRoots => C::root_of_unity(self.s, level).ok_or_else(|| {
                Error::Coefficient(format!(
                    "coefficient field lacks the {}-th roots of unity",
                    self.s
                ))
            }),
        }
    }

    /// Same runs in a canonical (sorted) order.
    pub fn sorted(&self) -> Design {
        let mut d = self.clone();
        d.runs.sort();
        d
    }

    pub fn same_runs(&self, other: &Design) -> bool {
        self.m == other.m && self.s == other.s && self.sorted().runs == other.sorted().runs
    }

    pub fn contains_run(&self, run: &[u32]) -> bool {
        self.runs.iter().any(|r| r == run)
    }

    /// New design with the given runs appended as columns, e.g. added factors.
    pub fn with_columns(&self, extra: &[Vec<u32>]) -> Result<Design> {
        let k = extra.first().map_or(0, Vec::len);
        if extra.len() != self.n() {
            return Err(Error::Input("extra columns must cover every run".into()));
        }
        let runs = self
            .runs
            .iter()
            .zip(extra)
            .map(|(r, e)| r.iter().chain(e).copied().collect())
            .collect();
        Design::new(self.m + k, self.s, self.coding, runs)
    }

    /// Parses the design file format:
    /// a header `m=<int> s=<int> coding=<tag>` then one run per line.
    pub fn parse(text: &str) -> Result<Design> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty design file"))?;
        let mut m = None;
        let mut s = 2u32;
        let mut coding = None;
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::parse(hline, format!("malformed header field {field:?}")))?;
            match k {
                "m" => m = Some(v.parse::<usize>().map_err(|_| Error::parse(hline, "bad m"))?),
                "s" => s = v.parse().map_err(|_| Error::parse(hline, "bad s"))?,
                "coding" => coding = Some(v.parse::<Coding>().map_err(|e| Error::parse(hline, e.to_string()))?),
                _ => return Err(Error::parse(hline, format!("unknown header field {k:?}"))),
            }
        }
        let m = m.ok_or_else(|| Error::parse(hline, "header lacks m=<int>"))?;
        let coding = coding.unwrap_or(if s == 2 { Coding::PlusMinusOne } else { Coding::IntegerLevels });
        let mut runs = Vec::new();
        for (ln, line) in lines {
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != m {
                return Err(Error::parse(ln, format!("expected {m} levels, found {}", vals.len())));
            }
            let run = vals
                .iter()
                .map(|v| parse_level(v, s, coding).map_err(|e| Error::parse(ln, e.to_string())))
                .collect::<Result<Vec<u32>>>()?;
            runs.push(run);
        }
        Design::new(m, s, coding, runs).map_err(|e| match e {
            Error::Input(msg) => Error::parse(hline, msg),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("m={} s={} coding={}\n", self.m, self.s, self.coding.tag());
        for r in &self.runs {
            let vals: Vec<String> = r
                .iter()
                .map(|&l| match self.coding {
                    Coding::PlusMinusOne => (if l == 0 { "1" } else { "-1" }).to_string(),
                    Coding::IntegerLevels => l.to_string(),
                    Coding::ComplexRoots => match l {
                        0 => "1".to_string(),
                        1 => "w".to_string(),
                        _ => format!("w^{l}"),
                    },
                })
                .collect();
            out.push_str(&vals.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_level(v: &str, s: u32, coding: Coding) -> Result<u32> {
    match coding {
        Coding::PlusMinusOne => match v {
            "1" | "+1" => Ok(0),
            "-1" => Ok(1),
            _ => Err(Error::Input(format!("level {v:?} is not +1 or -1"))),
        },
        Coding::IntegerLevels => v
            .parse::<u32>()
            .ok()
            .filter(|&l| l < s)
            .ok_or_else(|| Error::Input(format!("level {v:?} is not in 0..{s}"))),
        Coding::ComplexRoots => {
            let j = match v {
                "1" => Some(0),
                "w" => Some(1),
                _ => v.strip_prefix("w^").and_then(|e| e.parse::<u32>().ok()),
            };
            j.map(|j| j % s)
                .ok_or_else(|| Error::Input(format!("level {v:?} is not 1, w or w^k")))
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Point of `{+1,-1}^m` whose `-1` coordinates are the set bits of `code`
/// (bit `m-1-i` for factor `i`, so increasing codes give standard order).
pub(crate) fn point_from_code(m: usize, code: u64) -> Vec<u32> {
    (0..m).map(|i| ((code >> (m - 1 - i)) & 1) as u32).collect()
}

/// Bit `i` set when factor `i` is at level 1 (`-1`).
pub fn code_of_point(run: &[u32]) -> u64 {
    run.iter()
        .enumerate()
        .fold(0, |acc, (i, &l)| acc | ((l as u64 & 1) << i))
}

/// Inverse of [`code_of_point`].
pub fn point_of_code(m: usize, code: u64) -> Vec<u32> {
    (0..m).map(|i| ((code >> i) & 1) as u32).collect()
}

/// `x^a` at the point with code `x` (both as factor bitmasks).
#[inline]
pub fn sign_of(word: u64, point: u64) -> i32 {
    if (word & point).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A defining relation `x^a = c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefiningWord {
    /// Factor bitmask, bit `i` for `x_{i+1}`.
    pub word: u64,
    pub sign: i32,
}

/// Defining relations of a regular fraction; independent over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiningWordSet {
    pub m: usize,
    pub words: Vec<DefiningWord>,
}

impl DefiningWordSet {
    pub fn new(m: usize, words: Vec<DefiningWord>) -> Result<Self> {
        for w in &words {
            if w.word == 0 || w.word >> m != 0 {
                return Err(Error::Input(format!("word {:#b} is not a nonempty subset of {m} factors", w.word)));
            }
            if w.sign != 1 && w.sign != -1 {
                return Err(Error::Input("word signs must be +1 or -1".into()));
            }
        }
        if gf2_rank(words.iter().map(|w| w.word)) != words.len() {
            return Err(Error::Rank);
        }
        Ok(DefiningWordSet { m, words })
    }

    /// Every element of the word group with its sign, the identity included.
    pub fn group(&self) -> Vec<DefiningWord> {
        let mut out = vec![DefiningWord { word: 0, sign: 1 }];
        for w in &self.words {
            let extra: Vec<DefiningWord> = out
                .iter()
                .map(|g| DefiningWord {
                    word: g.word ^ w.word,
                    sign: g.sign * w.sign,
                })
                .collect();
            out.extend(extra);
        }
        out
    }
}

/// Rank over GF(2) of a set of bit vectors.
pub fn gf2_rank(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// The `2^{m-k}`-run fraction of `{+1,-1}^m` on which every word holds,
/// in standard order.
pub fn regular_design_from_words(words: &DefiningWordSet) -> Result<Design> {
    let m = words.m;
    if m > 30 {
        return Err(Error::Scale(format!("{m} factors")));
    }
    let runs: Vec<Vec<u32>> = (0..1u64 << m)
        .map(|k| point_from_code(m, k))
        .filter(|r| {
            let code = code_of_point(r);
            words.words.iter().all(|w| sign_of(w.word, code) == w.sign)
        })
        .collect();
    Design::new(m, 2, Coding::PlusMinusOne, runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::l8_table;

    fn mask(vars: &[usize]) -> u64 {
        vars.iter().fold(0, |m, v| m | (1 << (v - 1)))
    }

    #[test]
    fn l8_from_defining_words() {
        let words = DefiningWordSet::new(
            7,
            vec![
                DefiningWord { word: mask(&[1, 2, 3]), sign: -1 },
                DefiningWord { word: mask(&[1, 4, 5]), sign: -1 },
                DefiningWord { word: mask(&[2, 4, 6]), sign: -1 },
                DefiningWord { word: mask(&[1, 2, 4, 7]), sign: 1 },
            ],
        )
        .unwrap();
        let d = regular_design_from_words(&words).unwrap();
        assert_eq!(d.n(), 8);
        assert!(d.same_runs(&Design::from_signs(&l8_table()).unwrap()));
        assert_eq!(words.group().len(), 16);
    }

    #[test]
    fn half_fraction_and_full_factorial() {
        let f1 = regular_design_from_words(
            &DefiningWordSet::new(3, vec![DefiningWord { word: 0b111, sign: 1 }]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            f1.signs().unwrap(),
            vec![vec![1, 1, 1], vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]]
        );
        let full = regular_design_from_words(&DefiningWordSet::new(3, vec![]).unwrap()).unwrap();
        assert_eq!(full, Design::full_factorial(3));
    }

    #[test]
    fn dependent_words_rejected() {
        let r = DefiningWordSet::new(
            3,
            vec![
                DefiningWord { word: 0b011, sign: 1 },
                DefiningWord { word: 0b110, sign: 1 },
                DefiningWord { word: 0b101, sign: -1 },
            ],
        );
        assert_eq!(r, Err(Error::Rank));
    }

    #[test]
    fn replicated_runs_rejected() {
        assert!(Design::from_signs(&[vec![1, 1], vec![1, 1]]).is_err());
        assert!(Design::from_signs(&[vec![1, 2]]).is_err());
        assert!(Design::new(2, 4, Coding::IntegerLevels, vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let d = Design::from_signs(&l8_table()).unwrap();
        assert_eq!(Design::parse(&d.to_text()).unwrap(), d);
        let three = Design::parse("m=2 s=3 coding=roots\n1 w\nw^2 1\n").unwrap();
        assert_eq!(three.runs(), &[vec![0, 1], vec![2, 0]]);
        assert_eq!(Design::parse(&three.to_text()).unwrap(), three);
        match Design::parse("m=2\n1 1\n1 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn codes_and_signs() {
        let run = vec![0, 1, 1];
        let code = code_of_point(&run);
        assert_eq!(code, 0b110);
        assert_eq!(point_of_code(3, code), run);
        assert_eq!(sign_of(0b011, code), -1);
        assert_eq!(sign_of(0b110, code), 1);
    }
}
