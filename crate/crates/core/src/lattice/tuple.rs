use std::fmt;

use super::closure::comparable_set;
use super::{Family, GroundSize, LatticeError, SetMask};

/// An ordered tuple of families over the same ground set.
///
/// Construction only checks shape (shared ground, `k >= 2`); whether the
/// tuple is cross-Sperner is answered by [`FamilyTuple::violation`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FamilyTuple {
    n: GroundSize,
    families: Vec<Family>,
}

/// A comparable pair taken from two different families (0-based indices, `i < j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub left: SetMask,
    pub right: SetMask,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.left == self.right {
            "="
        } else if self.left.is_subset_of(self.right) {
            "⊆"
        } else {
            "⊇"
        };
        write!(f, "family {} member {} {} family {} member {}", self.i + 1, self.left, rel, self.j + 1, self.right)
    }
}

impl FamilyTuple {
    pub fn new(families: Vec<Family>) -> Result<Self, LatticeError> {
        if families.len() < 2 {
            return Err(LatticeError::TooFewFamilies(families.len()));
        }
        let n = families[0].ground();
        if let Some(other) = families.iter().find(|f| f.ground() != n) {
            return Err(LatticeError::GroundMismatch(n.get(), other.ground().get()));
        }
        Ok(FamilyTuple { n, families })
    }

    #[inline]
    pub fn ground(&self) -> GroundSize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.families.len()
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn into_families(self) -> Vec<Family> {
        self.families
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.families.iter().map(Family::len).collect()
    }

    pub fn sum(&self) -> u64 {
        self.families.iter().map(|f| f.len() as u64).sum()
    }

    pub fn product(&self) -> num_bigint::BigUint {
        self.families.iter().map(|f| num_bigint::BigUint::from(f.len())).product()
    }

    /// The lexicographically smallest comparable cross pair `(i, j, F_i, F_j)`,
    /// or `None` when the tuple is cross-Sperner.
    pub fn violation(&self) -> Result<Option<Violation>, LatticeError> {
        if let Some(index) = self.families.iter().position(Family::is_empty) {
            return Err(LatticeError::EmptyFamily { index });
        }
        let comparable: Vec<Family> = self.families.iter().map(comparable_set).collect();
        for i in 0..self.k() {
            for (j, comp_j) in comparable.iter().enumerate().skip(i + 1) {
                let hit = self.families[i].intersection(comp_j);
                if let Some(left) = hit.first() {
                    let right = self.families[j]
                        .iter()
                        .find(|&y| super::comparable(left, y))
                        .expect("comparable set witnessed a member");
                    return Ok(Some(Violation { i, j, left, right }));
                }
            }
        }
        Ok(None)
    }

    pub fn is_cross_sperner(&self) -> Result<bool, LatticeError> {
        Ok(self.violation()?.is_none())
    }

    /// Families sorted by smallest member; the canonical order used for output.
    pub fn canonical(&self) -> FamilyTuple {
        let mut families = self.families.clone();
        families.sort_by_key(|f| f.iter().collect::<Vec<_>>());
        FamilyTuple { n: self.n, families }
    }

    /// Comparison key: member lists of the canonical ordering.
    pub fn canonical_key(&self) -> Vec<Vec<u32>> {
        let mut key: Vec<Vec<u32>> = self.families.iter().map(|f| f.iter().map(SetMask::bits).collect()).collect();
        key.sort();
        key
    }
}

impl fmt::Debug for FamilyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyTuple").field("n", &self.n.get()).field("families", &self.families).finish()
    }
}

/// Merges the first `j` families and the remaining `k - j` into a pair.
pub fn merge_partition(t: &FamilyTuple, j: usize) -> Result<FamilyTuple, LatticeError> {
    let k = t.k();
    if j == 0 || j >= k {
        return Err(LatticeError::BadIndex { j, k });
    }
    let fold = |fs: &[Family]| fs.iter().skip(1).fold(fs[0].clone(), |acc, f| acc.union(f));
    FamilyTuple::new(vec![fold(&t.families[..j]), fold(&t.families[j..])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn fam(n: u32, sets: &[&[u32]]) -> Family {
        Family::from_masks(g(n), sets.iter().map(|e| SetMask::from_elements(g(n), e.iter().copied()).unwrap())).unwrap()
    }

    #[test]
    fn singletons_are_cross_sperner() {
        let t = FamilyTuple::new(vec![fam(3, &[&[1]]), fam(3, &[&[2]]), fam(3, &[&[3]])]).unwrap();
        assert!(t.is_cross_sperner().unwrap());
    }

    #[test]
    fn chain_pair_reports_violation() {
        let t = FamilyTuple::new(vec![fam(2, &[&[1]]), fam(2, &[&[1, 2]])]).unwrap();
        let v = t.violation().unwrap().unwrap();
        assert_eq!((v.i, v.j, v.left, v.right), (0, 1, SetMask(1), SetMask(3)));
        assert_eq!(v.to_string(), "family 1 member {1} ⊆ family 2 member {1,2}");
    }

    #[test]
    fn violation_is_lexicographically_smallest() {
        // Pairs (1,3) and (2,3) both conflict; (1,2) is clean except via {2}.
        let t =
            FamilyTuple::new(vec![fam(3, &[&[1, 2], &[3]]), fam(3, &[&[2]]), fam(3, &[&[1, 2, 3], &[2, 3]])]).unwrap();
        let v = t.violation().unwrap().unwrap();
        assert_eq!((v.i, v.j), (0, 1));
        assert_eq!((v.left, v.right), (SetMask(0b011), SetMask(0b010)));
    }

    #[test]
    fn shared_set_is_a_violation() {
        let t = FamilyTuple::new(vec![fam(3, &[&[1]]), fam(3, &[&[1]])]).unwrap();
        assert!(!t.is_cross_sperner().unwrap());
    }

    #[test]
    fn empty_family_is_an_error() {
        let t = FamilyTuple::new(vec![fam(3, &[&[1]]), Family::empty(g(3))]).unwrap();
        assert_eq!(t.violation(), Err(LatticeError::EmptyFamily { index: 1 }));
    }

    #[test]
    fn degenerate_ground_zero() {
        let only = fam(0, &[&[]]);
        let t = FamilyTuple::new(vec![only.clone(), only.clone()]).unwrap();
        assert!(!t.is_cross_sperner().unwrap());
        let t = FamilyTuple::new(vec![only, Family::empty(g(0))]).unwrap();
        assert!(t.violation().is_err());
    }

    #[test]
    fn shape_errors() {
        assert_eq!(FamilyTuple::new(vec![fam(2, &[&[1]])]), Err(LatticeError::TooFewFamilies(1)));
        assert_eq!(FamilyTuple::new(vec![fam(2, &[&[1]]), fam(3, &[&[2]])]), Err(LatticeError::GroundMismatch(2, 3)));
    }

    #[test]
    fn merge_partition_identity_and_errors() {
        let t = FamilyTuple::new(vec![fam(3, &[&[1]]), fam(3, &[&[2]]), fam(3, &[&[3]])]).unwrap();
        let pair = merge_partition(&t, 1).unwrap();
        assert_eq!(pair.sizes(), vec![1, 2]);
        assert!(pair.is_cross_sperner().unwrap());
        let two = FamilyTuple::new(vec![fam(3, &[&[1]]), fam(3, &[&[2]])]).unwrap();
        assert_eq!(merge_partition(&two, 1).unwrap(), two);
        assert_eq!(merge_partition(&t, 0), Err(LatticeError::BadIndex { j: 0, k: 3 }));
        assert_eq!(merge_partition(&t, 3), Err(LatticeError::BadIndex { j: 3, k: 3 }));
    }

    #[test]
    fn canonical_order_sorts_by_first_member() {
        let t = FamilyTuple::new(vec![fam(3, &[&[3]]), fam(3, &[&[1]]), fam(3, &[&[2]])]).unwrap();
        let c = t.canonical();
        assert_eq!(c.families()[0], fam(3, &[&[1]]));
        assert_eq!(c.canonical_key(), vec![vec![1], vec![2], vec![4]]);
    }
}
