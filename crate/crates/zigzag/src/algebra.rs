//! Basis paths of the zig-zag algebra `Z_n` and their composition.
//!
//! `Z_n` is the path algebra of the doubled `A_n` quiver modulo: straight
//! length-two paths vanish, all back-and-forth loops at a vertex agree, and
//! every path of length three or more is zero. The surviving basis at each
//! vertex pair is therefore tiny: `e_i` and one loop at `i`, and one arrow
//! in each direction between neighbours.

use std::fmt;

/// A basis element of `Z_n`. Vertices are numbered `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisPath {
    /// Trivial path at a vertex.
    Idem(usize),
    /// The arrow `from -> to`, `|from - to| = 1`.
    Arrow { from: usize, to: usize },
    /// The back-and-forth loop at a vertex.
    Loop(usize),
}

impl BasisPath {
    pub fn source(self) -> usize {
        match self {
            BasisPath::Idem(i) | BasisPath::Loop(i) => i,
            BasisPath::Arrow { from, .. } => from,
        }
    }

    pub fn target(self) -> usize {
        match self {
            BasisPath::Idem(i) | BasisPath::Loop(i) => i,
            BasisPath::Arrow { to, .. } => to,
        }
    }

    /// Path length, which is also the internal degree.
    pub fn degree(self) -> u8 {
        match self {
            BasisPath::Idem(_) => 0,
            BasisPath::Arrow { .. } => 1,
            BasisPath::Loop(_) => 2,
        }
    }

    /// The unique basis path `from -> to` of the given degree, if any.
    pub fn between(from: usize, to: usize, degree: i64) -> Option<BasisPath> {
        match degree {
            0 if from == to => Some(BasisPath::Idem(from)),
            1 if from.abs_diff(to) == 1 => Some(BasisPath::Arrow { from, to }),
            2 if from == to => Some(BasisPath::Loop(from)),
            _ => None,
        }
    }
}

impl fmt::Display for BasisPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisPath::Idem(i) => write!(f, "e{i}"),
            BasisPath::Arrow { from, to } => write!(f, "({to}|{from})"),
            BasisPath::Loop(i) => write!(f, "loop{i}"),
        }
    }
}

/// `p ∘ q`: traverse `q` first, then `p`.
///
/// Every nonzero product of basis paths is again a basis path with
/// coefficient one, so the result is either that path or zero (`None`).
/// Paths that do not meet (`q.target() != p.source()`) compose to zero.
pub fn compose_paths(p: BasisPath, q: BasisPath) -> Option<BasisPath> {
    if q.target() != p.source() {
        return None;
    }
    match (p, q) {
        (BasisPath::Idem(_), q) => Some(q),
        (p, BasisPath::Idem(_)) => Some(p),
        (BasisPath::Arrow { to, .. }, BasisPath::Arrow { from, .. }) if to == from => {
            Some(BasisPath::Loop(from))
        }
        _ => None,
    }
}

/// Basis of `Hom(P_i, P_j)` with internal degrees, for `Z_n` acting on
/// projectives `P_i = Z_n e_i`. A morphism `P_i -> P_j` is right
/// multiplication by a path `j -> i`.
pub fn hom_basis(i: usize, j: usize) -> Vec<(BasisPath, u8)> {
    if i == j {
        vec![(BasisPath::Idem(i), 0), (BasisPath::Loop(i), 2)]
    } else if i.abs_diff(j) == 1 {
        vec![(BasisPath::Arrow { from: j, to: i }, 1)]
    } else {
        Vec::new()
    }
}

/// Composition of morphisms `g ∘ f` for `f: P_a -> P_b`, `g: P_b -> P_c`,
/// given by their representing paths.
pub(crate) fn compose_morphisms(g: BasisPath, f: BasisPath) -> Option<BasisPath> {
    compose_paths(f, g)
}

/// The representing path of the unique morphism `P_from -> P_to` of a given
/// internal degree.
pub(crate) fn morphism_path(from: usize, to: usize, degree: i64) -> Option<BasisPath> {
    BasisPath::between(to, from, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasisPath::*;

    #[test]
    fn hom_basis_examples() {
        assert_eq!(hom_basis(1, 1), vec![(Idem(1), 0), (Loop(1), 2)]);
        assert_eq!(hom_basis(1, 2), vec![(Arrow { from: 2, to: 1 }, 1)]);
        assert!(hom_basis(1, 3).is_empty());
    }

    #[test]
    fn idempotents_are_units() {
        let a = Arrow { from: 2, to: 3 };
        assert_eq!(compose_paths(Idem(3), a), Some(a));
        assert_eq!(compose_paths(a, Idem(2)), Some(a));
        assert_eq!(compose_paths(Idem(2), a), None);
    }

    #[test]
    fn back_and_forth_is_the_loop_at_the_start() {
        // i -> i+1 -> i
        let up = Arrow { from: 1, to: 2 };
        let down = Arrow { from: 2, to: 1 };
        assert_eq!(compose_paths(down, up), Some(Loop(1)));
        assert_eq!(compose_paths(up, down), Some(Loop(2)));
        // both loops at 2 coincide: 2 -> 1 -> 2 and 2 -> 3 -> 2
        let via3 = compose_paths(Arrow { from: 3, to: 2 }, Arrow { from: 2, to: 3 });
        assert_eq!(via3, compose_paths(up, down));
    }

    #[test]
    fn straight_and_long_paths_vanish() {
        assert_eq!(compose_paths(Arrow { from: 2, to: 1 }, Arrow { from: 3, to: 2 }), None);
        assert_eq!(compose_paths(Arrow { from: 1, to: 2 }, Loop(1)), None);
        assert_eq!(compose_paths(Loop(1), Loop(1)), None);
    }

    #[test]
    fn degrees_add() {
        for &(p, q) in &[
            (Idem(1), Loop(1)),
            (Arrow { from: 2, to: 1 }, Arrow { from: 1, to: 2 }),
        ] {
            let r = compose_paths(p, q).unwrap();
            assert_eq!(r.degree(), p.degree() + q.degree());
        }
    }
}
