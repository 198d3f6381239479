//! Words over a generating set and their text / integer encodings.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GroupError;

/// A generator symbol `g_i^{±1}`.
///
/// Index `0` is reserved for the identity generator, which never carries a
/// negative sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedGen {
    index: usize,
    sign: i8,
}

impl SignedGen {
    pub const IDENTITY: SignedGen = SignedGen { index: 0, sign: 1 };

    /// Builds a symbol; `sign` must be `1` or `-1`. The identity is always
    /// normalized to sign `+1`.
    pub fn new(index: usize, sign: i8) -> Result<Self, GroupError> {
        match sign {
            1 => Ok(SignedGen { index, sign }),
            -1 if index == 0 => Ok(Self::IDENTITY),
            -1 => Ok(SignedGen { index, sign }),
            _ => Err(GroupError::InvalidSign(sign)),
        }
    }

    /// The positive generator `g_index`.
    pub fn gen(index: usize) -> Self {
        SignedGen { index, sign: 1 }
    }

    /// The inverse generator `g_index^{-1}`.
    pub fn inv(index: usize) -> Self {
        if index == 0 {
            Self::IDENTITY
        } else {
            SignedGen { index, sign: -1 }
        }
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn is_identity(self) -> bool {
        self.index == 0
    }

    pub fn inverse(self) -> Self {
        if self.is_identity() {
            self
        } else {
            SignedGen {
                index: self.index,
                sign: -self.sign,
            }
        }
    }

    /// Integer form used by dataset files: `±k` for `g_k^{±1}`, `0` for the identity.
    pub fn to_signed_int(self) -> i64 {
        self.index as i64 * self.sign as i64
    }

    pub fn from_signed_int(k: i64) -> Self {
        if k < 0 {
            Self::inv(k.unsigned_abs() as usize)
        } else {
            Self::gen(k as usize)
        }
    }
}

impl fmt::Display for SignedGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "e")
        } else if self.sign < 0 {
            write!(f, "s{}'", self.index)
        } else {
            write!(f, "s{}", self.index)
        }
    }
}

impl FromStr for SignedGen {
    type Err = GroupError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        if token == "e" {
            return Ok(Self::IDENTITY);
        }
        let bad = || GroupError::Parse(format!("bad generator token `{token}`"));
        let body = token.strip_prefix('s').ok_or_else(bad)?;
        let (digits, inverse) = match body.strip_suffix('\'') {
            Some(d) => (d, true),
            None => (body, false),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: usize = digits.parse().map_err(|_| bad())?;
        Ok(if inverse {
            Self::inv(index)
        } else {
            Self::gen(index)
        })
    }
}

/// A finite sequence of generator symbols. The empty word is the identity.
///
/// Words are plain values; validity against a particular presentation is
/// checked by [`crate::GroupPresentation::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<SignedGen>);

impl Word {
    pub fn new(symbols: Vec<SignedGen>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from dataset integers (`±k`, `0` = identity).
    pub fn from_signed_ints(ints: &[i64]) -> Self {
        Word(ints.iter().map(|&k| SignedGen::from_signed_int(k)).collect())
    }

    pub fn to_signed_ints(&self) -> Vec<i64> {
        self.0.iter().map(|g| g.to_signed_int()).collect()
    }

    pub fn symbols(&self) -> &[SignedGen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest generator index used, `0` for words over the identity only.
    pub fn max_index(&self) -> usize {
        self.0.iter().map(|g| g.index()).max().unwrap_or(0)
    }

    /// The symbol-wise inverse in reversed order, i.e. the group inverse.
    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut symbols = self.0.clone();
        symbols.extend_from_slice(&other.0);
        Word(symbols)
    }

    /// Removes identity symbols and cancels adjacent `g g^{-1}` pairs until
    /// no cancellation remains. The result is the unique freely reduced word.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<SignedGen> = Vec::with_capacity(self.0.len());
        for &g in &self.0 {
            if g.is_identity() {
                continue;
            }
            match out.last() {
                Some(&last) if last == g.inverse() => {
                    out.pop();
                }
                _ => out.push(g),
            }
        }
        Word(out)
    }

    /// Right-pads with identity symbols up to `len`. Longer words are returned unchanged.
    pub fn padded(&self, len: usize) -> Self {
        let mut symbols = self.0.clone();
        while symbols.len() < len {
            symbols.push(SignedGen::IDENTITY);
        }
        Word(symbols)
    }
}

impl From<Vec<SignedGen>> for Word {
    fn from(symbols: Vec<SignedGen>) -> Self {
        Word(symbols)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GroupError;

    /// Parses whitespace-separated tokens `s<k>`, `s<k>'` and `e`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        text.split_whitespace()
            .map(SignedGen::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// Draws a word of exactly `length` symbols, each uniform over the permitted
/// alphabet: `g_1..g_n`, plus `g_1^{-1}..g_n^{-1}` when `allow_inverses`, plus
/// the identity when `include_identity`.
pub fn sample_word<R: Rng + ?Sized>(
    rng: &mut R,
    n_generators: usize,
    length: usize,
    include_identity: bool,
    allow_inverses: bool,
) -> Word {
    let alphabet = alphabet(n_generators, include_identity, allow_inverses);
    if alphabet.is_empty() {
        return Word::new(vec![SignedGen::IDENTITY; length]);
    }
    Word(
        (0..length)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
            .collect(),
    )
}

/// Seeded form of [`sample_word`]; identical seeds give identical words.
pub fn sample_word_seeded(
    n_generators: usize,
    length: usize,
    include_identity: bool,
    allow_inverses: bool,
    seed: u64,
) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_word(&mut rng, n_generators, length, include_identity, allow_inverses)
}

/// The symbol alphabet in a fixed order: identity first, then `g_1, g_1^{-1}, g_2, ...`.
pub fn alphabet(n_generators: usize, include_identity: bool, allow_inverses: bool) -> Vec<SignedGen> {
    let mut out = Vec::with_capacity(2 * n_generators + 1);
    if include_identity {
        out.push(SignedGen::IDENTITY);
    }
    for i in 1..=n_generators {
        out.push(SignedGen::gen(i));
        if allow_inverses {
            out.push(SignedGen::inv(i));
        }
    }
    out
}
