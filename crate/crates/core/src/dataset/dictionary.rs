use std::collections::HashMap;

use crate::hierarchy::Id;
use crate::rdf::Term;

/// Dense bijection between ABox terms and ids `0..len`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndividualDictionary {
    terms: Vec<Term>,
    index: HashMap<Term, Id>,
}

impl IndividualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the dictionary where `terms[i]` gets id `i`. Returns the
    /// first repeated term if the input is not duplicate free.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, Term> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i as Id).is_some() {
                return Err(t.clone());
            }
        }
        Ok(Self { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id_of(&self, term: &Term) -> Option<Id> {
        self.index.get(term).copied()
    }

    pub fn term_of(&self, id: Id) -> Option<&Term> {
        usize::try_from(id).ok().and_then(|i| self.terms.get(i))
    }

    /// `(id, term)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (Id, &Term)> {
        self.terms.iter().enumerate().map(|(i, t)| (i as Id, t))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
}
