//! Term orders with explicit variable precedence.
//!
//! Every order is a sequence of blocks that partition the universe. A single
//! block with identity precedence is the ordinary lex / graded-lex /
//! graded-reverse-lex order on `x_1 > x_2 > ... > x_n`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    Lex,
    GrLex,
    GrevLex,
}

impl OrderKind {
    pub fn name(self) -> &'static str {
        match self {
            OrderKind::Lex => "lex",
            OrderKind::GrLex => "grlex",
            OrderKind::GrevLex => "grevlex",
        }
    }
}

/// Variables of one block, highest precedence first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub kind: OrderKind,
    pub vars: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermOrder {
    nvars: usize,
    blocks: Vec<Block>,
}

impl TermOrder {
    pub fn lex(nvars: usize) -> Self {
        Self::single(OrderKind::Lex, (0..nvars).collect()).unwrap()
    }

    pub fn grlex(nvars: usize) -> Self {
        Self::single(OrderKind::GrLex, (0..nvars).collect()).unwrap()
    }

    pub fn grevlex(nvars: usize) -> Self {
        Self::single(OrderKind::GrevLex, (0..nvars).collect()).unwrap()
    }

    /// One-block order with `precedence[0] > precedence[1] > ...`.
    pub fn single(kind: OrderKind, precedence: Vec<usize>) -> Result<Self> {
        let n = precedence.len();
        Self::block(n, vec![Block { kind, vars: precedence }])
    }

    /// Block order; earlier blocks dominate later ones.
    pub fn block(nvars: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut seen = vec![false; nvars];
        for b in &blocks {
            if b.vars.is_empty() {
                return Err(Error::Input("empty block in term order".into()));
            }
            for &v in &b.vars {
                if v >= nvars || seen[v] {
                    return Err(Error::Input(format!(
                        "block order is not a partition of {nvars} variables"
                    )));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Input(format!(
                "block order is not a partition of {nvars} variables"
            )));
        }
        Ok(TermOrder { nvars, blocks })
    }

    /// Two-block elimination order `{hi} > {lo}` with the given inner kinds.
    pub fn elimination(
        nvars: usize,
        hi: Vec<usize>,
        hi_kind: OrderKind,
        lo: &TermOrder,
    ) -> Result<Self> {
        let mut blocks = vec![Block { kind: hi_kind, vars: hi }];
        blocks.extend(lo.blocks.iter().cloned());
        Self::block(nvars, blocks)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `Some(kind)` for single-block orders.
    pub fn simple_kind(&self) -> Option<OrderKind> {
        match self.blocks.as_slice() {
            [b] => Some(b.kind),
            _ => None,
        }
    }

    /// Variables from highest to lowest precedence.
    pub fn precedence(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|b| b.vars.iter().copied()).collect()
    }

    /// Induced order on a sub-universe: keeps the blocks restricted to
    /// `keep` and renumbers variables by their position in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.nvars];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .filter_map(|b| {
                let vars: Vec<usize> = b
                    .vars
                    .iter()
                    .filter(|&&v| pos[v] != usize::MAX)
                    .map(|&v| pos[v])
                    .collect();
                (!vars.is_empty()).then_some(Block { kind: b.kind, vars })
            })
            .collect();
        Self::block(keep.len(), blocks)
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        for m in [a, b] {
            if m.nvars() != self.nvars {
                return Err(Error::Dimension {
                    expected: self.nvars,
                    found: m.nvars(),
                });
            }
        }
        Ok(self.cmp(a, b))
    }

    /// Comparison without universe validation.
    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exps(), b.exps());
        for block in &self.blocks {
            let ord = match block.kind {
                OrderKind::Lex => lex(&block.vars, ea, eb),
                OrderKind::GrLex => {
                    let (da, db) = block_degree(&block.vars, ea, eb);
                    da.cmp(&db).then_with(|| lex(&block.vars, ea, eb))
                }
                OrderKind::GrevLex => {
                    let (da, db) = block_degree(&block.vars, ea, eb);
                    da.cmp(&db).then_with(|| {
                        for &v in block.vars.iter().rev() {
                            match ea[v].cmp(&eb[v]) {
                                Ordering::Equal => continue,
                                o => return o.reverse(),
                            }
                        }
                        Ordering::Equal
                    })
                }
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }

    /// Integer key whose lexicographic comparison agrees with [`cmp`](Self::cmp).
    pub fn sort_key(&self, m: &Monomial) -> Vec<i64> {
        let e = m.exps();
        let mut key = Vec::with_capacity(self.nvars + self.blocks.len());
        for block in &self.blocks {
            match block.kind {
                OrderKind::Lex => key.extend(block.vars.iter().map(|&v| e[v] as i64)),
                OrderKind::GrLex => {
                    key.push(block.vars.iter().map(|&v| e[v] as i64).sum());
                    key.extend(block.vars.iter().map(|&v| e[v] as i64));
                }
                OrderKind::GrevLex => {
                    key.push(block.vars.iter().map(|&v| e[v] as i64).sum());
                    key.extend(block.vars.iter().rev().map(|&v| -(e[v] as i64)));
                }
            }
        }
        key
    }

    /// Whether `G ∩ K[rest]` is a Gröbner basis of the elimination ideal
    /// for every Gröbner basis `G` under this order: the dropped variables
    /// must fill a prefix of whole blocks, optionally followed by a prefix of
    /// a lex block's precedence.
    pub fn eliminates(&self, drop: &[usize]) -> bool {
        let mut remaining: Vec<bool> = vec![false; self.nvars];
        let mut left = 0;
        for &v in drop {
            if v < self.nvars && !remaining[v] {
                remaining[v] = true;
                left += 1;
            }
        }
        for block in &self.blocks {
            if left == 0 {
                return true;
            }
            let inside = block.vars.iter().filter(|&&v| remaining[v]).count();
            if inside == block.vars.len() {
                left -= inside;
                continue;
            }
            if block.kind == OrderKind::Lex
                && block.vars[..inside].iter().all(|&v| remaining[v])
            {
                left -= inside;
            }
            break;
        }
        left == 0
    }
}

#[inline]
fn lex(vars: &[usize], ea: &[u32], eb: &[u32]) -> Ordering {
    for &v in vars {
        match ea[v].cmp(&eb[v]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[inline]
fn block_degree(vars: &[usize], ea: &[u32], eb: &[u32]) -> (u32, u32) {
    vars.iter().fold((0, 0), |(da, db), &v| (da + ea[v], db + eb[v]))
}

impl fmt::Display for TermOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let vars: Vec<String> = b.vars.iter().map(|v| (v + 1).to_string()).collect();
                format!("{}({})", b.kind.name(), vars.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(">"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn x(i: usize) -> Monomial {
        Monomial::var(7, i - 1)
    }

    #[test]
    fn lex_and_grevlex_leading_terms() {
        let lex = TermOrder::lex(7);
        let grevlex = TermOrder::grevlex(7);
        let x6x7 = x(6).mul(&x(7));
        assert_eq!(lex.compare(&x(1), &x6x7).unwrap(), Ordering::Greater);
        assert_eq!(grevlex.compare(&x(2).mul(&x(3)), &x(1)).unwrap(), Ordering::Greater);
        assert_eq!(lex.compare(&x6x7, &x6x7).unwrap(), Ordering::Equal);
        assert!(lex.compare(&x(1), &Monomial::one(3)).is_err());
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let o = TermOrder::grevlex(3);
        // x1 x3 < x2^2 in grevlex, but x1 x3 > x2^2 in grlex
        assert_eq!(o.cmp(&mono(&[1, 0, 1]), &mono(&[0, 2, 0])), Ordering::Less);
        let g = TermOrder::grlex(3);
        assert_eq!(g.cmp(&mono(&[1, 0, 1]), &mono(&[0, 2, 0])), Ordering::Greater);
    }

    #[test]
    fn block_order_eliminates_leading_block() {
        let inner = TermOrder::grevlex(2);
        let lo = TermOrder::block(
            3,
            vec![Block { kind: OrderKind::GrevLex, vars: vec![1, 2] }],
        );
        assert!(lo.is_err());
        let o = TermOrder::block(
            3,
            vec![
                Block { kind: OrderKind::GrevLex, vars: vec![0] },
                Block { kind: inner.blocks()[0].kind, vars: vec![1, 2] },
            ],
        )
        .unwrap();
        assert_eq!(o.cmp(&mono(&[1, 0, 0]), &mono(&[0, 5, 5])), Ordering::Greater);
        assert!(o.eliminates(&[0]));
        assert!(!o.eliminates(&[1]));
        assert!(o.eliminates(&[]));
        assert!(TermOrder::lex(4).eliminates(&[0, 1]));
        assert!(!TermOrder::lex(4).eliminates(&[1]));
        assert!(!TermOrder::grevlex(4).eliminates(&[0]));
    }

    #[test]
    fn restriction_renumbers() {
        let o = TermOrder::single(OrderKind::Lex, vec![2, 0, 1]).unwrap();
        let r = o.restrict(&[1, 2]).unwrap();
        assert_eq!(r.precedence(), vec![1, 0]);
    }

    fn arb_order(n: usize) -> impl Strategy<Value = TermOrder> {
        (
            prop_oneof![Just(OrderKind::Lex), Just(OrderKind::GrLex), Just(OrderKind::GrevLex)],
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            0..n,
        )
            .prop_map(move |(kind, perm, split)| {
                if split == 0 {
                    TermOrder::single(kind, perm).unwrap()
                } else {
                    TermOrder::block(
                        n,
                        vec![
                            Block { kind, vars: perm[..split].to_vec() },
                            Block { kind: OrderKind::GrevLex, vars: perm[split..].to_vec() },
                        ],
                    )
                    .unwrap()
                }
            })
    }

    fn arb_mono(n: usize) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u32..4, n).prop_map(Monomial::new)
    }

    proptest! {
        #[test]
        fn orders_are_total_and_multiplicative(o in arb_order(4), a in arb_mono(4), b in arb_mono(4), c in arb_mono(4)) {
            let ab = o.cmp(&a, &b);
            prop_assert_eq!(ab, o.cmp(&b, &a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            prop_assert_eq!(o.cmp(&a.mul(&c), &b.mul(&c)), ab);
            // well-order: 1 is the minimum
            prop_assert_ne!(o.cmp(&Monomial::one(4), &a), Ordering::Greater);
            prop_assert_eq!(o.sort_key(&a).cmp(&o.sort_key(&b)), ab);
        }
    }
}
