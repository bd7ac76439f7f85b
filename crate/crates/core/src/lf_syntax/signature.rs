use std::collections::HashMap;

use super::expr::{Expr, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    /// The classifier is a kind; the entry declares a type family.
    Kind,
    /// The classifier is a type; the entry declares an object constant.
    Type,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: Name,
    pub classifier: Expr,
    pub sort: Sort,
}

/// Ordered constant declarations. Doubles as the global LF context.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    entries: Vec<Entry>,
    index: HashMap<Name, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a declaration; returns `false` (and changes nothing) when the
    /// name is already declared.
    pub fn push(&mut self, name: Name, classifier: Expr) -> bool {
        if self.index.contains_key(&name) {
            return false;
        }
        let sort = if classifier.is_kind() { Sort::Kind } else { Sort::Type };
        self.index.insert(name.clone(), self.entries.len());
        self.entries.push(Entry { name, classifier, sort });
        true
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.position(name).map(|i| &self.entries[i])
    }

    pub fn classifier(&self, name: &str) -> Option<&Expr> {
        self.get(name).map(|e| &e.classifier)
    }

    /// Replaces the classifier of an existing entry (used when storing
    /// normalized classifiers).
    pub(crate) fn set_classifier(&mut self, i: usize, classifier: Expr) {
        self.entries[i].classifier = classifier;
    }

    /// Object-level declarations, in order.
    pub fn objects(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.sort == Sort::Type)
    }
}

/// A signature restricted to its first `limit` entries.
#[derive(Clone, Copy)]
pub struct SigView<'a> {
    pub sig: &'a Signature,
    pub limit: usize,
}

impl<'a> SigView<'a> {
    pub fn full(sig: &'a Signature) -> Self {
        SigView { sig, limit: sig.len() }
    }

    pub fn prefix(sig: &'a Signature, limit: usize) -> Self {
        SigView { sig, limit }
    }

    pub fn lookup(&self, name: &str) -> Option<&'a Entry> {
        match self.sig.position(name) {
            Some(i) if i < self.limit => Some(&self.sig.entries[i]),
            _ => None,
        }
    }
}
