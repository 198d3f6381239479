//! Twisted complexes of shifted projectives and their minimization.
//!
//! # Conventions
//!
//! The internal path grading and the homological grading are identified, so a
//! summand is `P_v[s]` with one integer shift `s`. The differential `d` is a
//! single matrix over all summands. Its entry from `P_a[s]` to `P_b[t]` is a
//! scalar multiple of the unique morphism `P_a -> P_b` of internal degree
//! `1 + s - t`; entries with no such morphism are zero. In particular an
//! entry is invertible exactly when `a = b` and `t = s + 1`.
//!
//! Shifting by `[1]` lowers every `s` by one and negates `d`. The cone of a
//! closed degree-zero map `f: A -> B` is `A[1] ⊕ B` with
//! `d = [[-d_A, 0], [f, d_B]]`.
//!
//! Morphisms compose as plain products of their representing paths, so no
//! Koszul signs appear anywhere else.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{compose_morphisms, morphism_path, BasisPath};
use crate::ZigzagError;

pub type Coeff = BigRational;

/// A shifted indecomposable projective `P_vertex[shift]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjSummand {
    pub vertex: usize,
    pub shift: i64,
}

impl fmt::Display for ProjSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}[{}]", self.vertex, self.shift)
    }
}

/// One nonzero differential entry: `coefficient · path`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorEntry {
    pub coefficient: Coeff,
    pub path: BasisPath,
}

/// A bounded twisted complex over `Z_n`.
#[derive(Clone, Debug)]
pub struct Complex {
    n: usize,
    summands: Vec<ProjSummand>,
    /// `out[src]` maps target index to coefficient.
    out: Vec<BTreeMap<usize, Coeff>>,
    /// `inc[tgt]` maps source index to coefficient.
    inc: Vec<BTreeMap<usize, Coeff>>,
}

impl Complex {
    /// The empty (zero) object of `C_n`.
    pub fn zero(n: usize) -> Self {
        Complex {
            n,
            summands: Vec::new(),
            out: Vec::new(),
            inc: Vec::new(),
        }
    }

    /// `P_vertex` alone in shift zero.
    pub fn projective(n: usize, vertex: usize) -> Result<Self, ZigzagError> {
        check_vertex(n, vertex)?;
        let mut c = Self::zero(n);
        c.push(ProjSummand { vertex, shift: 0 });
        Ok(c)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn summands(&self) -> &[ProjSummand] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Summands grouped by shift.
    pub fn terms(&self) -> BTreeMap<i64, Vec<ProjSummand>> {
        let mut terms: BTreeMap<i64, Vec<ProjSummand>> = BTreeMap::new();
        for s in &self.summands {
            terms.entry(s.shift).or_default().push(*s);
        }
        terms
    }

    /// Nonzero entries as `(source, target, entry)`, ordered by source then target.
    pub fn entries(&self) -> Vec<(usize, usize, MorEntry)> {
        let mut out = Vec::new();
        for (src, row) in self.out.iter().enumerate() {
            for (&tgt, c) in row {
                out.push((
                    src,
                    tgt,
                    MorEntry {
                        coefficient: c.clone(),
                        path: self.entry_path(src, tgt).expect("stored entries are admissible"),
                    },
                ));
            }
        }
        out
    }

    pub fn entry(&self, src: usize, tgt: usize) -> Option<&Coeff> {
        self.out.get(src).and_then(|row| row.get(&tgt))
    }

    pub fn num_entries(&self) -> usize {
        self.out.iter().map(BTreeMap::len).sum()
    }

    /// The path a differential entry `src -> tgt` must carry, if one exists.
    pub fn entry_path(&self, src: usize, tgt: usize) -> Option<BasisPath> {
        let (a, b) = (self.summands[src], self.summands[tgt]);
        morphism_path(a.vertex, b.vertex, 1 + a.shift - b.shift)
    }

    pub(crate) fn push(&mut self, s: ProjSummand) -> usize {
        self.summands.push(s);
        self.out.push(BTreeMap::new());
        self.inc.push(BTreeMap::new());
        self.summands.len() - 1
    }

    /// Adds `coeff` to the entry `src -> tgt`.
    pub(crate) fn add_entry(&mut self, src: usize, tgt: usize, coeff: Coeff) -> Result<(), ZigzagError> {
        if coeff.is_zero() {
            return Ok(());
        }
        if self.entry_path(src, tgt).is_none() {
            return Err(ZigzagError::InvariantViolation(format!(
                "no degree-one morphism {} -> {}",
                self.summands[src], self.summands[tgt]
            )));
        }
        let slot = self.out[src].entry(tgt).or_insert_with(Coeff::zero);
        *slot += &coeff;
        if slot.is_zero() {
            self.out[src].remove(&tgt);
            self.inc[tgt].remove(&src);
        } else {
            self.inc[tgt].insert(src, slot.clone());
        }
        Ok(())
    }

    /// Verifies the degree constraint on every entry and `d ∘ d = 0`.
    pub fn check(&self) -> Result<(), ZigzagError> {
        for (src, row) in self.out.iter().enumerate() {
            for &tgt in row.keys() {
                if self.entry_path(src, tgt).is_none() {
                    return Err(ZigzagError::InvariantViolation(format!(
                        "inadmissible entry {} -> {}",
                        self.summands[src], self.summands[tgt]
                    )));
                }
            }
        }
        for x in 0..self.summands.len() {
            let mut square: HashMap<usize, Coeff> = HashMap::new();
            for (&y, c_yx) in &self.out[x] {
                let p_yx = self.entry_path(x, y).unwrap();
                for (&z, c_zy) in &self.out[y] {
                    let p_zy = self.entry_path(y, z).unwrap();
                    if compose_morphisms(p_zy, p_yx).is_some() {
                        *square.entry(z).or_insert_with(Coeff::zero) += c_zy * c_yx;
                    }
                }
            }
            if let Some((z, _)) = square.iter().find(|(_, c)| !c.is_zero()) {
                return Err(ZigzagError::InvariantViolation(format!(
                    "d∘d ≠ 0 from {} to {}",
                    self.summands[x], self.summands[*z]
                )));
            }
        }
        Ok(())
    }

    /// Shift by `[k]`: every summand shift decreases by `k`; the
    /// differential is negated when `k` is odd.
    pub fn shifted(&self, k: i64) -> Complex {
        let mut c = self.clone();
        for s in &mut c.summands {
            s.shift -= k;
        }
        if k % 2 != 0 {
            for row in c.out.iter_mut().chain(c.inc.iter_mut()) {
                for v in row.values_mut() {
                    *v = -v.clone();
                }
            }
        }
        c
    }

    /// An invertible entry `(src, tgt)`, scanning sources by shift then index.
    fn find_pivot(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.summands.len()).collect();
        order.sort_by_key(|&i| (self.summands[i].shift, i));
        for src in order {
            for &tgt in self.out[src].keys() {
                if matches!(self.entry_path(src, tgt), Some(BasisPath::Idem(_))) {
                    return Some((src, tgt));
                }
            }
        }
        None
    }

    /// Gaussian elimination: repeatedly cancels an invertible entry
    /// `φ: a -> b` together with its two summands, replacing every other
    /// entry by `d_yx - d_ya φ⁻¹ d_bx`. The result is homotopy equivalent
    /// and has no invertible entries left.
    pub fn minimize(&self) -> Complex {
        let mut work = self.clone();
        while let Some((a, b)) = work.find_pivot() {
            work = work.eliminate(a, b);
            debug_assert!(work.check().is_ok(), "elimination broke the complex");
        }
        work
    }

    fn eliminate(&self, a: usize, b: usize) -> Complex {
        let phi_inv = Coeff::one() / self.out[a][&b].clone();
        let sources: Vec<(usize, Coeff)> = self.inc[b]
            .iter()
            .filter(|(&x, _)| x != a && x != b)
            .map(|(&x, c)| (x, c.clone()))
            .collect();
        let targets: Vec<(usize, Coeff)> = self.out[a]
            .iter()
            .filter(|(&y, _)| y != a && y != b)
            .map(|(&y, c)| (y, c.clone()))
            .collect();

        let mut updates: Vec<(usize, usize, Coeff)> = Vec::new();
        for (x, c_bx) in &sources {
            let p_bx = self.entry_path(*x, b).unwrap();
            for (y, c_ya) in &targets {
                let p_ya = self.entry_path(a, *y).unwrap();
                if compose_morphisms(p_ya, p_bx).is_some() {
                    updates.push((*x, *y, -(c_ya * &phi_inv * c_bx)));
                }
            }
        }

        // Rebuild without a and b.
        let mut remap = vec![usize::MAX; self.summands.len()];
        let mut next = Complex::zero(self.n);
        for (i, s) in self.summands.iter().enumerate() {
            if i != a && i != b {
                remap[i] = next.push(*s);
            }
        }
        for (src, row) in self.out.iter().enumerate() {
            if src == a || src == b {
                continue;
            }
            for (&tgt, c) in row {
                if tgt != a && tgt != b {
                    next.out[remap[src]].insert(remap[tgt], c.clone());
                    next.inc[remap[tgt]].insert(remap[src], c.clone());
                }
            }
        }
        for (x, y, c) in updates {
            next.add_entry(remap[x], remap[y], c)
                .expect("Schur complement entries have the right degree");
        }
        next
    }

    /// True when no entry is invertible.
    pub fn is_minimal(&self) -> bool {
        self.find_pivot().is_none()
    }

    /// Sorted multiset of summands; the basis-independent fingerprint of a
    /// minimal complex.
    pub fn summand_multiset(&self) -> Vec<ProjSummand> {
        let mut v = self.summands.clone();
        v.sort();
        v
    }
}

pub(crate) fn check_vertex(n: usize, vertex: usize) -> Result<(), ZigzagError> {
    if vertex == 0 || vertex > n {
        Err(ZigzagError::InvalidVertex { vertex, n })
    } else {
        Ok(())
    }
}
