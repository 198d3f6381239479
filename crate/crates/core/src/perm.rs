//! Exact element orders for the finite families.
//!
//! Words over `S_n` are evaluated as permutations, cyclic factors as residues,
//! and the order is the lcm of cycle lengths / residue orders.

use std::collections::BTreeSet;

use crate::error::GroupError;
use crate::presentation::{Family, GroupPresentation};
use crate::word::Word;

/// A bijection on `{0, .., n-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(GroupError::InvalidWord(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// The transposition of points `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(i, j);
        p
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    /// Disjoint cycle lengths including fixed points, sorted descending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut lengths = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    pub fn order(&self) -> u64 {
        self.cycle_type().into_iter().fold(1, |acc, c| lcm(acc, c as u64))
    }

    /// Row-major `n × n` permutation matrix with `M[images[j]][j] = 1`.
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.images.len();
        let mut m = vec![0.0; n * n];
        for (j, &i) in self.images.iter().enumerate() {
            m[i * n + j] = 1.0;
        }
        m
    }
}

/// Evaluates a word over `S_n` as `σ_{i_1} ∘ σ_{i_2} ∘ ...`, where `σ_i`
/// swaps points `i-1` and `i`.
pub fn word_to_perm(word: &Word, n: usize) -> Result<Permutation, GroupError> {
    let mut p = Permutation::identity(n);
    for g in word.symbols() {
        if g.is_identity() {
            continue;
        }
        let i = g.index();
        if i >= n {
            return Err(GroupError::InvalidWord(format!(
                "generator {g} out of range for S{n}"
            )));
        }
        // p ∘ (i-1 i) swaps the images of i-1 and i
        p.images.swap(i - 1, i);
    }
    Ok(p)
}

/// One factor of a product group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Component {
    Perm(Permutation),
    Residue { value: u64, modulus: u64 },
}

impl Component {
    pub fn order(&self) -> u64 {
        match self {
            Component::Perm(p) => p.order(),
            Component::Residue { value, modulus } => modulus / gcd(*value, *modulus),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Component::Perm(p) => p.is_identity(),
            Component::Residue { value, .. } => *value == 0,
        }
    }
}

/// An element of a finite family, one component per direct factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductElement {
    pub components: Vec<Component>,
}

impl ProductElement {
    pub fn identity(family: &Family) -> Result<Self, GroupError> {
        Ok(ProductElement {
            components: factors(family)?
                .into_iter()
                .map(|f| match f {
                    Factor::Sym(n) => Component::Perm(Permutation::identity(n)),
                    Factor::Cyclic(m) => Component::Residue { value: 0, modulus: m },
                })
                .collect(),
        })
    }

    pub fn order(&self) -> u64 {
        self.components.iter().fold(1, |acc, c| lcm(acc, c.order()))
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().all(Component::is_identity)
    }

    /// Component-wise product `self · other`.
    pub fn multiply(&self, other: &ProductElement) -> ProductElement {
        ProductElement {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| match (a, b) {
                    (Component::Perm(p), Component::Perm(q)) => Component::Perm(p.compose(q)),
                    (
                        Component::Residue { value: x, modulus },
                        Component::Residue { value: y, .. },
                    ) => Component::Residue {
                        value: (x + y) % modulus,
                        modulus: *modulus,
                    },
                    _ => unreachable!("component kinds fixed by family"),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Factor {
    Sym(usize),
    Cyclic(u64),
}

fn factors(family: &Family) -> Result<Vec<Factor>, GroupError> {
    match family {
        Family::Symmetric(n) => Ok(vec![Factor::Sym(*n)]),
        Family::CyclicProduct(orders) => Ok(orders.iter().map(|&o| Factor::Cyclic(o)).collect()),
        Family::DirectPower(base, k) => {
            let base = factors(base)?;
            Ok((0..*k).flat_map(|_| base.iter().copied()).collect())
        }
        Family::Braid(_) => Err(GroupError::Unsupported(format!(
            "{family} is infinite; no order oracle"
        ))),
    }
}

/// Generators per factor, in factor order.
fn factor_generators(f: Factor) -> usize {
    match f {
        Factor::Sym(n) => n - 1,
        Factor::Cyclic(_) => 1,
    }
}

/// Evaluates a word in a finite family.
pub fn word_to_element(
    word: &Word,
    presentation: &GroupPresentation,
) -> Result<ProductElement, GroupError> {
    presentation.validate(word)?;
    let factors = factors(&presentation.family)?;
    // Generator offsets of each factor.
    let mut offsets = Vec::with_capacity(factors.len());
    let mut acc = 0;
    for &f in &factors {
        offsets.push(acc);
        acc += factor_generators(f);
    }
    let mut components = Vec::with_capacity(factors.len());
    for (k, &f) in factors.iter().enumerate() {
        let lo = offsets[k];
        let hi = lo + factor_generators(f);
        let local = word
            .symbols()
            .iter()
            .filter(|g| !g.is_identity() && g.index() > lo && g.index() <= hi);
        components.push(match f {
            Factor::Sym(n) => {
                let mut p = Permutation::identity(n);
                for g in local {
                    let i = g.index() - lo;
                    p.images.swap(i - 1, i);
                }
                Component::Perm(p)
            }
            Factor::Cyclic(m) => {
                let mut value = 0u64;
                for g in local {
                    value = if g.sign() > 0 {
                        (value + 1) % m
                    } else {
                        (value + m - 1) % m
                    };
                }
                Component::Residue { value, modulus: m }
            }
        });
    }
    Ok(ProductElement { components })
}

/// Order of the element a word denotes.
pub fn word_order(word: &Word, presentation: &GroupPresentation) -> Result<u64, GroupError> {
    Ok(word_to_element(word, presentation)?.order())
}

/// Every achievable element order, sorted ascending.
pub fn order_class_set(family: &Family) -> Result<Vec<u64>, GroupError> {
    let mut acc: BTreeSet<u64> = BTreeSet::from([1]);
    for f in factors(family)? {
        let local = match f {
            Factor::Sym(n) => symmetric_orders(n),
            Factor::Cyclic(m) => divisors(m),
        };
        acc = acc
            .iter()
            .flat_map(|&a| local.iter().map(move |&b| lcm(a, b)))
            .collect();
    }
    Ok(acc.into_iter().collect())
}

/// Class index of `order` within [`order_class_set`].
pub fn order_class_index(classes: &[u64], order: u64) -> Option<usize> {
    classes.binary_search(&order).ok()
}

/// `|G|` for the finite families.
pub fn group_order(family: &Family) -> Result<u128, GroupError> {
    Ok(factors(family)?
        .into_iter()
        .map(|f| match f {
            Factor::Sym(n) => (1..=n as u128).product::<u128>(),
            Factor::Cyclic(m) => m as u128,
        })
        .product())
}

/// Orders of `S_n`: lcm over all partitions of `n`.
fn symmetric_orders(n: usize) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    partitions(n, n, &mut Vec::new(), &mut |parts| {
        out.insert(parts.iter().fold(1, |acc, &p| lcm(acc, p as u64)));
    });
    out
}

/// Enumerates partitions of `n` into parts `<= max_part`.
pub fn partitions(n: usize, max_part: usize, prefix: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if n == 0 {
        visit(prefix);
        return;
    }
    for part in (1..=max_part.min(n)).rev() {
        prefix.push(part);
        partitions(n - part, part, prefix, visit);
        prefix.pop();
    }
}

fn divisors(m: u64) -> BTreeSet<u64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}
