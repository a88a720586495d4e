//! Symbol indices and small bitsets of them.

use std::fmt;

pub type Symbol = u32;

/// Set of symbol indices over an alphabet of known size.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolSet {
    bits: Vec<u64>,
}

impl SymbolSet {
    pub fn empty(size: usize) -> Self {
        SymbolSet {
            bits: vec![0; size.div_ceil(64)],
        }
    }

    pub fn full(size: usize) -> Self {
        let mut s = Self::empty(size);
        for i in 0..size {
            s.insert(i as Symbol);
        }
        s
    }

    pub fn singleton(size: usize, sym: Symbol) -> Self {
        let mut s = Self::empty(size);
        s.insert(sym);
        s
    }

    pub fn from_iter(size: usize, syms: impl IntoIterator<Item = Symbol>) -> Self {
        let mut s = Self::empty(size);
        for x in syms {
            s.insert(x);
        }
        s
    }

    /// Number of symbols the set ranges over (rounded up to a multiple of 64).
    pub fn capacity(&self) -> usize {
        self.bits.len() * 64
    }

    #[inline]
    pub fn contains(&self, sym: Symbol) -> bool {
        let i = sym as usize;
        self.bits
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, sym: Symbol) {
        let i = sym as usize;
        self.bits[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, sym: Symbol) {
        let i = sym as usize;
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        SymbolSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        SymbolSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Symbols in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((wi * 64) as Symbol + b)
            })
        })
    }

    pub fn first(&self) -> Option<Symbol> {
        self.iter().next()
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
