//! Fixed-width attribute bitsets over an interned attribute universe.

use std::collections::HashMap;

use crate::ident::Ident;
use crate::schema::{AttributeSet, FunctionalDependency};

use super::FdError;

const WORDS: usize = 4;

/// Largest attribute universe a compiled dependency set may span.
pub const MAX_UNIVERSE: usize = WORDS * 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub(crate) struct Bits([u64; WORDS]);

impl Bits {
    pub fn empty() -> Self {
        Bits([0; WORDS])
    }

    pub fn with(mut self, i: usize) -> Self {
        self.0[i / 64] |= 1 << (i % 64);
        self
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn union(self, other: Bits) -> Bits {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a |= b;
        }
        out
    }

    pub fn intersect(self, other: Bits) -> Bits {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a &= b;
        }
        out
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| a & !b == 0)
    }

    /// Low 32 bits; used when the first attributes of the universe are the
    /// columns of one table.
    pub fn low_u32(&self) -> u32 {
        self.0[0] as u32
    }

    pub fn from_low_u32(m: u32) -> Bits {
        let mut b = Bits::empty();
        b.0[0] = m as u64;
        b
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_UNIVERSE).filter(move |i| self.contains(*i))
    }
}

/// A dependency set compiled against an interned universe.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub names: Vec<Ident>,
    index: HashMap<Ident, usize>,
    pub fds: Vec<(Bits, Bits)>,
}

impl Compiled {
    /// Interns `seed` first (so its attributes get indices `0..seed.len()`),
    /// then every attribute mentioned by `fds`. Trivial dependencies are dropped.
    pub fn new(seed: &[Ident], fds: &[FunctionalDependency]) -> Result<Self, FdError> {
        let mut c = Compiled { names: Vec::new(), index: HashMap::new(), fds: Vec::new() };
        for a in seed {
            c.intern(a);
        }
        for fd in fds {
            for a in fd.lhs.iter().chain(fd.rhs.iter()) {
                c.intern(a);
            }
        }
        if c.names.len() > MAX_UNIVERSE {
            return Err(FdError::AttributeLimitExceeded {
                scope: "dependency universe".into(),
                count: c.names.len(),
                limit: MAX_UNIVERSE,
            });
        }
        for fd in fds {
            let lhs = c.bits(&fd.lhs);
            let rhs = c.bits(&fd.rhs);
            if !rhs.is_subset(&lhs) {
                c.fds.push((lhs, rhs));
            }
        }
        Ok(c)
    }

    fn intern(&mut self, a: &Ident) -> usize {
        if let Some(i) = self.index.get(a) {
            return *i;
        }
        let i = self.names.len();
        self.names.push(a.clone());
        self.index.insert(a.clone(), i);
        i
    }

    /// Attributes outside the universe are ignored.
    pub fn bits(&self, set: &AttributeSet) -> Bits {
        set.iter().filter_map(|a| self.index.get(a)).fold(Bits::empty(), |b, &i| b.with(i))
    }

    pub fn set(&self, bits: Bits) -> AttributeSet {
        bits.ones().take_while(|i| *i < self.names.len()).map(|i| self.names[i].clone()).collect()
    }

    pub fn closure(&self, start: Bits) -> Bits {
        self.closure_with(start, &self.fds)
    }

    pub fn closure_with(&self, start: Bits, fds: &[(Bits, Bits)]) -> Bits {
        let mut x = start;
        let mut used = vec![false; fds.len()];
        loop {
            let mut changed = false;
            for (i, (lhs, rhs)) in fds.iter().enumerate() {
                if !used[i] && lhs.is_subset(&x) {
                    used[i] = true;
                    let next = x.union(*rhs);
                    if next != x {
                        x = next;
                        changed = true;
                    }
                }
            }
            if !changed {
                return x;
            }
        }
    }

    /// Union of all right-hand sides.
    pub fn rhs_union(&self) -> Bits {
        self.fds.iter().fold(Bits::empty(), |acc, (_, r)| acc.union(*r))
    }
}
