//! Group presentations for the supported families.

use std::fmt;
use std::str::FromStr;

use crate::error::GroupError;
use crate::word::{SignedGen, Word};

/// The group families this crate knows how to present and label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `S_n` on adjacent transpositions `σ_1..σ_{n-1}`.
    Symmetric(usize),
    /// Artin braid group `B_n` on `σ_1..σ_{n-1}`.
    Braid(usize),
    /// `C_{n_1} × ... × C_{n_k}`, one generator per factor.
    CyclicProduct(Vec<u64>),
    /// `base^k`; generators of copy `c` are numbered after those of copy `c - 1`.
    DirectPower(Box<Family>, usize),
}

impl Family {
    /// Generators of a single copy of this family.
    pub fn num_generators(&self) -> usize {
        match self {
            Family::Symmetric(n) | Family::Braid(n) => n.saturating_sub(1),
            Family::CyclicProduct(orders) => orders.len(),
            Family::DirectPower(base, k) => base.num_generators() * k,
        }
    }

    /// True when every generator is an involution, so explicit inverses are never needed.
    pub fn self_inverse(&self) -> bool {
        match self {
            Family::Symmetric(_) => true,
            Family::Braid(_) | Family::CyclicProduct(_) => false,
            Family::DirectPower(base, _) => base.self_inverse(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Family::Braid(n) => *n <= 1,
            Family::DirectPower(base, _) => base.is_finite(),
            _ => true,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Symmetric(n) => write!(f, "S{n}"),
            Family::Braid(n) => write!(f, "B{n}"),
            Family::CyclicProduct(orders) => {
                write!(f, "C")?;
                for (k, o) in orders.iter().enumerate() {
                    if k > 0 {
                        write!(f, "x")?;
                    }
                    write!(f, "{o}")?;
                }
                Ok(())
            }
            Family::DirectPower(base, k) => write!(f, "{base}^{k}"),
        }
    }
}

impl FromStr for Family {
    type Err = GroupError;

    /// Accepts `S10`, `B3`, `C11x12x13`, `S5^4`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let bad = || GroupError::Parse(format!("unrecognized family `{text}`"));
        if let Some((base, power)) = text.split_once('^') {
            let base: Family = base.parse()?;
            let k: usize = power.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            return Ok(Family::DirectPower(Box::new(base), k));
        }
        let (head, rest) = text.split_at(text.chars().next().map_or(0, |c| c.len_utf8()));
        match head {
            "S" | "B" => {
                let n: usize = rest.parse().map_err(|_| bad())?;
                if n < 2 {
                    return Err(bad());
                }
                Ok(if head == "S" {
                    Family::Symmetric(n)
                } else {
                    Family::Braid(n)
                })
            }
            "C" => {
                let orders = rest
                    .split('x')
                    .map(|o| o.parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                if orders.is_empty() || orders.contains(&0) {
                    return Err(bad());
                }
                Ok(Family::CyclicProduct(orders))
            }
            _ => Err(bad()),
        }
    }
}

/// Generators plus relation words, each relation equal to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub name: String,
    pub num_generators: usize,
    pub relations: Vec<Word>,
    pub family: Family,
    pub self_inverse_generators: bool,
}

impl GroupPresentation {
    pub fn new(family: Family) -> Result<Self, GroupError> {
        let relations = standard_relations(&family)?;
        let presentation = GroupPresentation {
            name: family.to_string(),
            num_generators: family.num_generators(),
            self_inverse_generators: family.self_inverse(),
            relations,
            family,
        };
        for r in &presentation.relations {
            if r.is_empty() {
                return Err(GroupError::InvalidWord("empty relation".into()));
            }
            presentation.validate(r)?;
        }
        Ok(presentation)
    }

    pub fn parse(name: &str) -> Result<Self, GroupError> {
        Self::new(name.parse()?)
    }

    /// Checks that every symbol indexes a declared generator.
    pub fn validate(&self, word: &Word) -> Result<(), GroupError> {
        match word.symbols().iter().find(|g| g.index() > self.num_generators) {
            Some(g) => Err(GroupError::InvalidWord(format!(
                "generator {g} out of range for {} ({} generators)",
                self.name, self.num_generators
            ))),
            None => Ok(()),
        }
    }

    /// Row `k` is `ε_k e_{i_k}`; identity symbols become zero rows. For
    /// self-inverse families the sign is dropped.
    pub fn signed_one_hot(&self, word: &Word) -> Result<Encoding, GroupError> {
        self.validate(word)?;
        let cols = self.num_generators;
        let mut data = vec![0i8; word.len() * cols];
        for (k, g) in word.symbols().iter().enumerate() {
            if g.is_identity() {
                continue;
            }
            let sign = if self.self_inverse_generators { 1 } else { g.sign() };
            data[k * cols + g.index() - 1] = sign;
        }
        Ok(Encoding {
            rows: word.len(),
            cols,
            data,
        })
    }

    /// The signed one-hot vector of a single symbol.
    pub fn encode_symbol(&self, g: SignedGen) -> Result<Vec<i8>, GroupError> {
        let enc = self.signed_one_hot(&Word::new(vec![g]))?;
        Ok(enc.data)
    }
}

/// Dense `ℓ × n` matrix with entries in `{-1, 0, 1}`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoding {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i8>,
}

impl Encoding {
    pub fn row(&self, k: usize) -> &[i8] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }
}

fn g(i: usize) -> SignedGen {
    SignedGen::gen(i)
}

fn gi(i: usize) -> SignedGen {
    SignedGen::inv(i)
}

/// Relation words in "equal to identity" form.
pub fn standard_relations(family: &Family) -> Result<Vec<Word>, GroupError> {
    let mut rels = Vec::new();
    match family {
        Family::Symmetric(n) => {
            let k = n.saturating_sub(1);
            for i in 1..=k {
                rels.push(Word::new(vec![g(i), g(i)]));
            }
            for i in 1..k {
                rels.push(Word::new(vec![g(i), g(i + 1), g(i), g(i + 1), g(i), g(i + 1)]));
            }
            for i in 1..=k {
                for j in i + 2..=k {
                    rels.push(Word::new(vec![g(i), g(j), g(i), g(j)]));
                }
            }
        }
        Family::Braid(n) => {
            let k = n.saturating_sub(1);
            for i in 1..k {
                rels.push(Word::new(vec![g(i), g(i + 1), g(i), gi(i + 1), gi(i), gi(i + 1)]));
            }
            for i in 1..=k {
                for j in i + 2..=k {
                    rels.push(commutator(i, j));
                }
            }
        }
        Family::CyclicProduct(orders) => {
            for (k, &o) in orders.iter().enumerate() {
                rels.push(Word::new(vec![g(k + 1); o as usize]));
            }
            for i in 1..=orders.len() {
                for j in i + 1..=orders.len() {
                    rels.push(commutator(i, j));
                }
            }
        }
        Family::DirectPower(base, copies) => {
            let base_rels = standard_relations(base)?;
            let m = base.num_generators();
            for c in 0..*copies {
                for r in &base_rels {
                    rels.push(Word::new(
                        r.symbols()
                            .iter()
                            .map(|s| SignedGen::new(s.index() + c * m, s.sign()).expect("valid sign"))
                            .collect(),
                    ));
                }
            }
            for c in 0..*copies {
                for d in c + 1..*copies {
                    for a in 1..=m {
                        for b in 1..=m {
                            rels.push(commutator(a + c * m, b + d * m));
                        }
                    }
                }
            }
        }
    }
    Ok(rels)
}

fn commutator(i: usize, j: usize) -> Word {
    Word::new(vec![g(i), g(j), gi(i), gi(j)])
}
