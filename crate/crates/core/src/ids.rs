//! Dense integer ids for ground atoms and a compact valuation bitset.

use std::fmt;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.0)
            }
        }
    };
}

id_type!(ObjectId);
id_type!(SortId);
id_type!(FluentId);
id_type!(ActionId);
id_type!(StaticId);

/// Activity identifiers follow the convention of the source material: small
/// positive integers, with fresh ids for activities planned at runtime.
pub type ActivityId = u32;

/// A fixed-width bitset valuation over a ground-atom universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    len: usize,
    words: Vec<u64>,
}

impl Valuation {
    pub fn new_false(len: usize) -> Self {
        Valuation {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        debug_assert!(idx < self.len);
        let mask = 1u64 << (idx % 64);
        if value {
            self.words[idx / 64] |= mask;
        } else {
            self.words[idx / 64] &= !mask;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.ones()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_set_get() {
        let mut v = Valuation::new_false(130);
        assert!(!v.get(0));
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert!(v.get(0) && v.get(64) && v.get(129));
        assert!(!v.get(63) && !v.get(65));
        v.set(64, false);
        assert!(!v.get(64));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 129]);
    }
}
