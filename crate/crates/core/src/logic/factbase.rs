use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Bound;

use super::{Atom, PredKey, Term};
use crate::error::{Error, Result};

/// A set of ground atoms.
///
/// Tuples are kept per relation in a sorted set, so the tuples sharing a
/// first argument form a contiguous range; that range doubles as the
/// first-argument index.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FactBase {
    relations: BTreeMap<PredKey, BTreeSet<Vec<Term>>>,
    len: usize,
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts a ground atom, returning whether it was new.
    pub fn insert(&mut self, atom: Atom) -> Result<bool> {
        if !atom.is_ground() {
            return Err(Error::NonGround(atom.to_string()));
        }
        Ok(self.insert_ground(atom))
    }

    pub(crate) fn insert_ground(&mut self, atom: Atom) -> bool {
        debug_assert!(atom.is_ground());
        let key = atom.key();
        let added = self.relations.entry(key).or_default().insert(atom.args);
        if added {
            self.len += 1;
        }
        added
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.relations
            .get(&atom.key())
            .is_some_and(|r| r.contains(&atom.args))
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        let removed = self
            .relations
            .get_mut(&atom.key())
            .is_some_and(|r| r.remove(&atom.args));
        if removed {
            self.len -= 1;
        }
        removed
    }

    /// All tuples of one relation, in sorted order.
    pub fn tuples(&self, predicate: &str, arity: usize) -> impl Iterator<Item = &Vec<Term>> {
        self.relations
            .get(&(predicate.into(), arity))
            .into_iter()
            .flatten()
    }

    pub(crate) fn relation(&self, key: &PredKey) -> Option<&BTreeSet<Vec<Term>>> {
        self.relations.get(key)
    }

    /// Tuples of a relation whose first argument is `first`.
    pub(crate) fn tuples_with_first<'a>(
        &'a self,
        key: &PredKey,
        first: &'a Term,
    ) -> impl Iterator<Item = &'a Vec<Term>> + 'a {
        self.relations
            .get(key)
            .into_iter()
            .flat_map(move |r| {
                r.range::<Vec<Term>, _>((Bound::Included(vec![first.clone()]), Bound::Unbounded))
            })
            .take_while(move |t| t.first() == Some(first))
    }

    /// Atoms of one relation, in sorted order.
    pub fn atoms_of<'a>(&'a self, predicate: &'a str, arity: usize) -> impl Iterator<Item = Atom> + 'a {
        self.tuples(predicate, arity).map(move |args| Atom {
            predicate: predicate.into(),
            args: args.clone(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.relations.iter().flat_map(|((pred, _), tuples)| {
            tuples.iter().map(move |args| Atom {
                predicate: pred.clone(),
                args: args.clone(),
            })
        })
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.relations
            .iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(k, _)| k)
    }

    pub fn extend_from(&mut self, other: &FactBase) {
        for (key, tuples) in &other.relations {
            let rel = self.relations.entry(key.clone()).or_default();
            for t in tuples {
                if rel.insert(t.clone()) {
                    self.len += 1;
                }
            }
        }
    }

    /// Renders the facts as `.`-terminated lines, one per atom.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        for atom in self.iter() {
            out.push_str(&atom.to_string());
            out.push_str(".\n");
        }
        out
    }
}

impl FromIterator<Atom> for FactBase {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        let mut fb = FactBase::new();
        for atom in iter {
            fb.insert_ground(atom);
        }
        fb
    }
}

impl fmt::Debug for FactBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|a| a.to_string())).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(tag: &str, i: i64) -> Atom {
        Atom::new("pos", vec![Term::constant(tag), Term::Int(i)])
    }

    #[test]
    fn insertion_is_idempotent() {
        let mut fb = FactBase::new();
        assert!(fb.insert(pos("c_NN", 1)).unwrap());
        assert!(!fb.insert(pos("c_NN", 1)).unwrap());
        assert_eq!(fb.len(), 1);
    }

    #[test]
    fn rejects_non_ground() {
        let mut fb = FactBase::new();
        let a = Atom::new("p", vec![Term::var("X")]);
        assert!(matches!(fb.insert(a), Err(Error::NonGround(_))));
    }

    #[test]
    fn iteration_is_sorted() {
        let fb: FactBase = vec![
            pos("c_VBD", 7),
            Atom::new("token", vec![Term::Int(2)]),
            pos("c_NN", 3),
            Atom::new("token", vec![Term::Int(1)]),
        ]
        .into_iter()
        .collect();
        let printed: Vec<String> = fb.iter().map(|a| a.to_string()).collect();
        assert_eq!(
            printed,
            ["pos(c_NN,3)", "pos(c_VBD,7)", "token(1)", "token(2)"]
        );
    }

    #[test]
    fn first_argument_index() {
        let fb: FactBase = vec![pos("c_NN", 3), pos("c_NN", 4), pos("c_VBD", 7), pos("c_IN", 8)]
            .into_iter()
            .collect();
        let key = ("pos".into(), 2);
        let first = Term::constant("c_NN");
        let hits: Vec<_> = fb.tuples_with_first(&key, &first).collect();
        assert_eq!(hits.len(), 2);
        let none = Term::constant("c_JJ");
        assert_eq!(fb.tuples_with_first(&key, &none).count(), 0);
    }
}
