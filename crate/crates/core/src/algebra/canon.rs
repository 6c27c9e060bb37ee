//! Canonical forms for state deduplication.
//!
//! Parallel compositions are flattened to sorted multisets with `1` units
//! dropped, and choices to sorted multisets of summands with `0` dropped
//! when other summands remain. These identifications are sound for strong
//! bisimilarity and are used only to key states, never to derive steps.

use super::ProcessExpr;

pub fn canonical(expr: &ProcessExpr) -> ProcessExpr {
    match expr {
        ProcessExpr::Deadlock | ProcessExpr::Accept | ProcessExpr::Ident(_) => expr.clone(),
        ProcessExpr::Prefix(label, p) => ProcessExpr::prefix(label.clone(), canonical(p)),
        ProcessExpr::Choice(..) => {
            let mut summands = Vec::new();
            flatten_choice(expr, &mut summands);
            let non_deadlock: Vec<ProcessExpr> =
                summands.iter().filter(|s| **s != ProcessExpr::Deadlock).cloned().collect();
            let mut kept =
                if non_deadlock.is_empty() { vec![ProcessExpr::Deadlock] } else { non_deadlock };
            kept.sort();
            ProcessExpr::sum(kept)
        }
        ProcessExpr::Parallel(..) => {
            let mut components = Vec::new();
            flatten_parallel(expr, &mut components);
            let mut kept: Vec<ProcessExpr> =
                components.into_iter().filter(|c| *c != ProcessExpr::Accept).collect();
            kept.sort();
            ProcessExpr::par_all(kept)
        }
        ProcessExpr::Priority(p) => {
            let inner = canonical(p);
            // a directly nested filter is idempotent
            match inner {
                ProcessExpr::Priority(_) => inner,
                other => ProcessExpr::theta(other),
            }
        }
        ProcessExpr::Rename(f, p) => ProcessExpr::rename(f.clone(), canonical(p)),
        ProcessExpr::Encapsulate(ports, p) => ProcessExpr::encap(ports.clone(), canonical(p)),
        ProcessExpr::Hide(ports, p) => ProcessExpr::hide(ports.clone(), canonical(p)),
    }
}

fn flatten_choice(expr: &ProcessExpr, out: &mut Vec<ProcessExpr>) {
    match expr {
        ProcessExpr::Choice(p, q) => {
            flatten_choice(p, out);
            flatten_choice(q, out);
        }
        other => out.push(canonical(other)),
    }
}

fn flatten_parallel(expr: &ProcessExpr, out: &mut Vec<ProcessExpr>) {
    match expr {
        ProcessExpr::Parallel(p, q) => {
            flatten_parallel(p, out);
            flatten_parallel(q, out);
        }
        other => out.push(canonical(other)),
    }
}

/// Printable canonical form, the deduplication key.
pub fn canonical_key(expr: &ProcessExpr) -> String {
    canonical(expr).to_string()
}

/// The parallel components of the canonical form (`1` units dropped); a
/// non-parallel expression is its own single component.
pub fn parallel_components(expr: &ProcessExpr) -> Vec<ProcessExpr> {
    let canon = canonical(expr);
    let mut components = Vec::new();
    flatten_parallel(&canon, &mut components);
    components.retain(|c| *c != ProcessExpr::Accept);
    components
}

/// Truncation weight: the parallel width of the state, counted through the
/// priority, renaming, encapsulation and abstraction wrappers, minus one
/// for the regular part. Aligns with bag size on automaton configurations.
pub fn component_weight(expr: &ProcessExpr) -> usize {
    fn count(expr: &ProcessExpr) -> usize {
        match expr {
            ProcessExpr::Accept => 0,
            ProcessExpr::Parallel(p, q) => count(p) + count(q),
            ProcessExpr::Priority(p)
            | ProcessExpr::Rename(_, p)
            | ProcessExpr::Encapsulate(_, p)
            | ProcessExpr::Hide(_, p) => count(p),
            _ => 1,
        }
    }
    count(expr).saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundations::ActionLabel;
    use ProcessExpr as E;

    fn a() -> ActionLabel {
        ActionLabel::plain("a")
    }

    #[test]
    fn parallel_is_flattened_sorted_and_unitless() {
        let left = E::parallel(E::parallel(E::ident("B"), E::Accept), E::ident("A"));
        let right = E::parallel(E::ident("A"), E::ident("B"));
        assert_eq!(canonical_key(&left), canonical_key(&right));
        assert_eq!(canonical_key(&E::parallel(E::Accept, E::Accept)), "1");
    }

    #[test]
    fn choice_drops_deadlock_keeps_multiset() {
        let p = E::prefix(a(), E::Accept);
        let with_dl = E::choice(E::Deadlock, p.clone());
        assert_eq!(canonical_key(&with_dl), canonical_key(&p));
        // duplicates are kept (multiset of summands)
        let twice = E::choice(p.clone(), p.clone());
        assert_ne!(canonical_key(&twice), canonical_key(&p));
        assert_eq!(canonical_key(&E::choice(E::Deadlock, E::Deadlock)), "0");
    }

    #[test]
    fn canonicalisation_recurses_under_prefixes() {
        let p = E::prefix(a(), E::parallel(E::Accept, E::ident("X")));
        let q = E::prefix(a(), E::ident("X"));
        assert_eq!(canonical_key(&p), canonical_key(&q));
    }

    #[test]
    fn weight_counts_through_wrappers() {
        let x = E::ident("X");
        assert_eq!(component_weight(&x), 0);
        let wide = E::theta(E::parallel(E::parallel(x.clone(), x.clone()), x.clone()));
        assert_eq!(component_weight(&wide), 2);
        assert_eq!(component_weight(&E::Accept), 0);
    }
}
