use std::sync::Arc;

use crate::logic::{Atom, FactBase, Term};

/// Variable assignment built up during a join. Bodies are short, so a flat
/// vector beats a map here.
#[derive(Clone, Debug, Default)]
pub(crate) struct Binding(Vec<(Arc<str>, Term)>);

impl Binding {
    pub(crate) fn get(&self, var: &str) -> Option<&Term> {
        self.0.iter().rev().find(|(v, _)| &**v == var).map(|(_, t)| t)
    }

    fn resolve<'a>(&'a self, term: &'a Term) -> Option<&'a Term> {
        match term {
            Term::Var(v) => self.get(v),
            Term::Anon => None,
            t => Some(t),
        }
    }

    /// Unifies a pattern with a ground tuple, extending the binding.
    /// On failure the binding is restored.
    fn unify(&mut self, pattern: &[Term], tuple: &[Term]) -> bool {
        let mark = self.0.len();
        for (p, t) in pattern.iter().zip(tuple) {
            let ok = match p {
                Term::Anon => true,
                Term::Var(v) => match self.get(v) {
                    Some(bound) => bound == t,
                    None => {
                        self.0.push((v.clone(), t.clone()));
                        true
                    }
                },
                c => c == t,
            };
            if !ok {
                self.0.truncate(mark);
                return false;
            }
        }
        true
    }
}

/// Enumerates every extension of `binding` that makes all `atoms` members of
/// `model`, joining left to right.
pub(crate) fn join_positive(
    atoms: &[&Atom],
    model: &FactBase,
    binding: &mut Binding,
    f: &mut dyn FnMut(&Binding),
) {
    let Some((first, rest)) = atoms.split_first() else {
        f(binding);
        return;
    };
    let key = first.key();
    let mark = binding.0.len();
    let lead = first.args.first().and_then(|t| binding.resolve(t)).cloned();
    match lead {
        Some(lead) => {
            for tuple in model.tuples_with_first(&key, &lead) {
                if binding.unify(&first.args, tuple) {
                    join_positive(rest, model, binding, f);
                    binding.0.truncate(mark);
                }
            }
        }
        None => {
            if let Some(rel) = model.relation(&key) {
                for tuple in rel {
                    if binding.unify(&first.args, tuple) {
                        join_positive(rest, model, binding, f);
                        binding.0.truncate(mark);
                    }
                }
            }
        }
    }
}

/// Whether some tuple of `model` matches `atom` under `binding`; unbound
/// positions (only `_` in a safe rule) match anything.
pub(crate) fn exists_match(atom: &Atom, model: &FactBase, binding: &Binding) -> bool {
    if atom.args.iter().all(|t| binding.resolve(t).is_some()) {
        return model.contains(&substitute(atom, binding));
    }
    let mut scratch = binding.clone();
    let mut found = false;
    join_positive(&[atom], model, &mut scratch, &mut |_| found = true);
    found
}

/// Applies the binding; unbound variables and `_` are left in place.
pub(crate) fn substitute(atom: &Atom, binding: &Binding) -> Atom {
    Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| binding.resolve(t).cloned().unwrap_or_else(|| t.clone()))
            .collect(),
    }
}
