//! Finitely presented groups as used by the representation-learning tasks:
//! words and their encodings, presentations of the supported families, and
//! exact order oracles for the finite ones.

mod error;
pub mod perm;
pub mod presentation;
pub mod word;

pub use error::GroupError;
pub use perm::{
    group_order, order_class_index, order_class_set, word_order, word_to_element, word_to_perm,
    Component, Permutation, ProductElement,
};
pub use presentation::{standard_relations, Encoding, Family, GroupPresentation};
pub use word::{alphabet, sample_word, sample_word_seeded, SignedGen, Word};
