//! Isomorphism types of finite abelian `p`-groups.

use alloc::vec::Vec;
use core::fmt;

/// `⊕ Z/p^{f_i}` with `f_1 >= f_2 >= ... >= 1`; the empty list is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianType(Vec<u32>);

impl AbelianType {
    pub fn trivial() -> Self {
        AbelianType(Vec::new())
    }

    /// Canonicalizes any list of exponents: zeros dropped, sorted descending.
    pub fn from_exponents(exponents: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = exponents.into_iter().filter(|&e| e > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        AbelianType(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// `e` with `|A| = p^e`.
    pub fn log_order(&self) -> u64 {
        self.0.iter().map(|&f| f as u64).sum()
    }

    /// `dim_{F_p} p^{i-1}A / p^i A`, i.e. the number of cyclic factors of order `>= p^i`.
    pub fn rank_pi(&self, i: u32) -> usize {
        assert!(i >= 1, "p^i-rank needs i >= 1");
        self.0.iter().filter(|&&f| f >= i).count()
    }

    /// Type of `A / p^k A`.
    pub fn mod_pk(&self, k: u32) -> AbelianType {
        AbelianType::from_exponents(self.0.iter().map(|&f| f.min(k)))
    }

    /// Direct sum.
    pub fn sum(&self, other: &AbelianType) -> AbelianType {
        AbelianType::from_exponents(self.0.iter().chain(&other.0).copied())
    }

    /// Renders the group with explicit orders, e.g. `Z/9 ⊕ Z/3`, or `0`.
    pub fn display(&self, p: u64) -> TypeDisplay<'_> {
        TypeDisplay { ty: self, p }
    }
}

pub struct TypeDisplay<'a> {
    ty: &'a AbelianType,
    p: u64,
}

impl fmt::Display for TypeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ty.is_trivial() {
            return f.write_str("0");
        }
        for (i, &e) in self.ty.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊕ ")?;
            }
            match (self.p as u128).checked_pow(e) {
                Some(order) => write!(f, "Z/{order}")?,
                None => write!(f, "Z/{}^{}", self.p, e)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}
