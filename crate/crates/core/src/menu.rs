//! Menus as bit sets over a dataset's sorted universe.

use std::cmp::Ordering;
use std::fmt;

/// Maximum universe size a dataset may have.
pub const MAX_UNIVERSE: usize = 64;

/// A finite set of alternative indices. Ordered lexicographically by the
/// ascending sequence of members, so `{a,b} < {a,b,c} < {a,c} < {b}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Menu(pub u64);

impl Menu {
    pub const EMPTY: Menu = Menu(0);

    pub fn singleton(i: usize) -> Menu {
        Menu(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Menu {
        Menu(it.into_iter().fold(0u64, |acc, i| acc | (1u64 << i)))
    }

    /// The menu `{0, .., n-1}`.
    pub fn full(n: usize) -> Menu {
        if n >= 64 {
            Menu(u64::MAX)
        } else {
            Menu((1u64 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Menu) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: Menu) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(self, other: Menu) -> bool {
        self.0 & other.0 != 0
    }

    pub fn inter(self, other: Menu) -> Menu {
        Menu(self.0 & other.0)
    }

    pub fn union(self, other: Menu) -> Menu {
        Menu(self.0 | other.0)
    }

    pub fn minus(self, other: Menu) -> Menu {
        Menu(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> Menu {
        Menu(self.0 | 1u64 << i)
    }

    pub fn without(self, i: usize) -> Menu {
        Menu(self.0 & !(1u64 << i))
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> MenuIter {
        MenuIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All nonempty subsets, in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = Menu> {
        let full = self.0;
        let mut sub = 0u64;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            sub = sub.wrapping_sub(full) & full;
            if sub == 0 {
                done = true;
                return None;
            }
            Some(Menu(sub))
        })
    }
}

pub struct MenuIter(u64);

impl Iterator for MenuIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl Ord for Menu {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let i = diff.trailing_zeros();
        let above = if i == 63 { 0 } else { u64::MAX << (i + 1) };
        let self_has = self.0 >> i & 1 == 1;
        let lacking = if self_has { other } else { self };
        // The menu holding `i` comes first unless the other one stops before `i`.
        let holder_first = lacking.0 & above != 0;
        if self_has == holder_first {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Menu {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
