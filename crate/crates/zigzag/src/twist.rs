//! Spherical twists `σ_{P_i}^{±1}` and the induced braid group action.

use grouprep_core::Word;
use num_traits::One;

use crate::algebra::{compose_morphisms, hom_basis, BasisPath};
use crate::complex::{check_vertex, Coeff, Complex, ProjSummand};
use crate::multiplicity::{jh_multiplicities, JHVector};
use crate::ZigzagError;

/// Order in which the symbols of a braid word act on an object.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Composition {
    /// `σ_{i_1} σ_{i_2} ... σ_{i_ℓ}(X)` applies `σ_{i_ℓ}` first.
    #[default]
    RightmostFirst,
    LeftmostFirst,
}

/// `σ_{P_i}(X)` for `sign = 1`, `σ_{P_i}^{-1}(X)` for `sign = -1`. The
/// result is closed but not minimized.
///
/// `σ(X) = Cone(Hom•(P_i, X) ⊗ P_i → X)` via evaluation, and
/// `σ⁻¹(X) = Cone(X → Hom•(X, P_i)^∨ ⊗ P_i)[-1]` via coevaluation.
pub fn twist(vertex: usize, sign: i8, x: &Complex) -> Result<Complex, ZigzagError> {
    check_vertex(x.rank(), vertex)?;
    x.check()?;
    let out = match sign {
        1 => twist_forward(vertex, x)?,
        -1 => twist_inverse(vertex, x)?,
        _ => return Err(ZigzagError::InvalidSign(sign)),
    };
    out.check()?;
    Ok(out)
}

fn twist_forward(i: usize, x: &Complex) -> Result<Complex, ZigzagError> {
    let mut cone = Complex::zero(x.rank());
    // One copy of P_i per basis element h ∈ Hom(P_i, x_k), living in T[1].
    let mut copies: Vec<Vec<(BasisPath, usize)>> = Vec::with_capacity(x.len());
    for s in x.summands() {
        let mut at_k = Vec::new();
        for (h, deg) in hom_basis(i, s.vertex) {
            let idx = cone.push(ProjSummand {
                vertex: i,
                shift: s.shift + deg as i64 - 1,
            });
            at_k.push((h, idx));
        }
        copies.push(at_k);
    }
    let offset = cone.len();
    for s in x.summands() {
        cone.push(*s);
    }

    let minus_one = -Coeff::one();
    for (k, l, entry) in x.entries() {
        cone.add_entry(offset + k, offset + l, entry.coefficient.clone())?;
        // -d_T: post-composition with d_lk
        for &(h, src) in &copies[k] {
            if let Some(h2) = compose_morphisms(entry.path, h) {
                let tgt = find_copy(&copies[l], h2);
                cone.add_entry(src, tgt, &minus_one * &entry.coefficient)?;
            }
        }
    }
    // evaluation map
    for (k, at_k) in copies.iter().enumerate() {
        for &(_, src) in at_k {
            cone.add_entry(src, offset + k, Coeff::one())?;
        }
    }
    Ok(cone)
}

fn twist_inverse(i: usize, x: &Complex) -> Result<Complex, ZigzagError> {
    let mut out = Complex::zero(x.rank());
    for s in x.summands() {
        out.push(*s);
    }
    // One copy of P_i per basis element g ∈ Hom(x_k, P_i), living in T'[-1].
    let mut copies: Vec<Vec<(BasisPath, usize)>> = Vec::with_capacity(x.len());
    for s in x.summands() {
        let mut at_k = Vec::new();
        for (g, deg) in hom_basis(s.vertex, i) {
            let idx = out.push(ProjSummand {
                vertex: i,
                shift: s.shift - deg as i64 + 1,
            });
            at_k.push((g, idx));
        }
        copies.push(at_k);
    }

    let minus_one = -Coeff::one();
    for (k, l, entry) in x.entries() {
        out.add_entry(k, l, entry.coefficient.clone())?;
        // -d_{T'}: pre-composition with d_lk
        for &(g2, tgt) in &copies[l] {
            if let Some(g) = compose_morphisms(g2, entry.path) {
                let src = find_copy(&copies[k], g);
                out.add_entry(src, tgt, &minus_one * &entry.coefficient)?;
            }
        }
    }
    // -coev
    for (k, at_k) in copies.iter().enumerate() {
        for &(_, tgt) in at_k {
            out.add_entry(k, tgt, minus_one.clone())?;
        }
    }
    Ok(out)
}

fn find_copy(copies: &[(BasisPath, usize)], path: BasisPath) -> usize {
    copies
        .iter()
        .find(|(p, _)| *p == path)
        .map(|&(_, idx)| idx)
        .expect("composite lands in the hom basis")
}

/// Applies the braid word to `X`, minimizing after every twist. Identity
/// symbols act trivially.
pub fn act(word: &Word, x: &Complex, order: Composition) -> Result<Complex, ZigzagError> {
    let n = x.rank();
    let symbols: Vec<_> = match order {
        Composition::RightmostFirst => word.symbols().iter().rev().copied().collect(),
        Composition::LeftmostFirst => word.symbols().to_vec(),
    };
    let mut current = x.minimize();
    for g in symbols {
        if g.is_identity() {
            continue;
        }
        if g.index() > n {
            return Err(ZigzagError::InvalidWord(format!(
                "generator {g} has no vertex in C{n}"
            )));
        }
        current = twist(g.index(), g.sign(), &current)?.minimize();
    }
    Ok(current)
}

/// The minimal complex of `β(P_start)` in `C_n` for a braid word over `B_n`.
pub fn braid_image(
    word: &Word,
    n: usize,
    start_vertex: usize,
    order: Composition,
) -> Result<Complex, ZigzagError> {
    act(word, &Complex::projective(n, start_vertex)?, order)
}

/// Jordan–Hölder multiplicities of `β(P_start)`.
pub fn apply_braid_word(
    word: &Word,
    n: usize,
    start_vertex: usize,
    order: Composition,
) -> Result<JHVector, ZigzagError> {
    Ok(jh_multiplicities(&braid_image(word, n, start_vertex, order)?))
}
