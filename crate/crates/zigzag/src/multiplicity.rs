//! Jordan–Hölder counts read off a minimal complex.

use std::collections::BTreeMap;
use std::fmt;

use crate::complex::Complex;

/// Multiplicity of each `P_i`, `i = 1..=n`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JHVector {
    pub counts: Vec<u64>,
}

impl JHVector {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

impl fmt::Display for JHVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.counts)
    }
}

/// Laurent polynomial in `q` with non-negative coefficients, keyed by exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedCount {
    pub coefficients: BTreeMap<i64, u64>,
}

impl GradedCount {
    /// Value at `q = 1`.
    pub fn at_one(&self) -> u64 {
        self.coefficients.values().sum()
    }
}

impl fmt::Display for GradedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        for (k, (d, c)) in self.coefficients.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match (*c, *d) {
                (c, 0) => write!(f, "{c}")?,
                (1, d) => write!(f, "q^{d}")?,
                (c, d) => write!(f, "{c}q^{d}")?,
            }
        }
        Ok(())
    }
}

/// Summand counts per vertex of the minimal model of `x`.
pub fn jh_multiplicities(x: &Complex) -> JHVector {
    let minimal = if x.is_minimal() { x.clone() } else { x.minimize() };
    let mut counts = vec![0u64; x.rank()];
    for s in minimal.summands() {
        counts[s.vertex - 1] += 1;
    }
    JHVector { counts }
}

/// Per vertex, the coefficient of `q^d` counts summands `P_i[d]` of the
/// minimal model.
pub fn graded_multiplicities(x: &Complex) -> Vec<GradedCount> {
    let minimal = if x.is_minimal() { x.clone() } else { x.minimize() };
    let mut out = vec![GradedCount::default(); x.rank()];
    for s in minimal.summands() {
        *out[s.vertex - 1].coefficients.entry(s.shift).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twist::twist;

    #[test]
    fn projective_counts() {
        let p = Complex::projective(3, 1).unwrap();
        assert_eq!(jh_multiplicities(&p).counts, vec![1, 0, 0]);
        let p2 = Complex::projective(3, 2).unwrap();
        let g = graded_multiplicities(&p2);
        assert_eq!(g[1].coefficients, BTreeMap::from([(0, 1)]));
        assert!(g[0].coefficients.is_empty() && g[2].coefficients.is_empty());
    }

    #[test]
    fn graded_twist_of_p1_is_a_single_shift() {
        let x = twist(1, 1, &Complex::projective(3, 1).unwrap()).unwrap();
        let g = graded_multiplicities(&x);
        assert_eq!(g[0].coefficients, BTreeMap::from([(1, 1)]));
        assert_eq!(g[0].to_string(), "q^1");
        assert_eq!(jh_multiplicities(&x).counts, vec![1, 0, 0]);
    }
}
