use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::FiniteSemigroup;
use crate::error::{Error, Result};

pub const DEFAULT_SUBGROUP_CAP: usize = 64;
pub const DEFAULT_MAX_GENERATORS: usize = 2;

/// A subgroup of a finite semigroup. Its identity is an idempotent of the
/// semigroup, not necessarily the semigroup's own identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    pub members: Vec<usize>,
    pub identity: usize,
    pub trivial: bool,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn inverse(&self, sg: &FiniteSemigroup, x: usize) -> Option<usize> {
        self.members
            .iter()
            .copied()
            .find(|&y| sg.mul(x, y) == self.identity && sg.mul(y, x) == self.identity)
    }
}

/// Returns the identity of `subset` if it forms a group under the
/// semigroup product.
pub fn is_group_subset(sg: &FiniteSemigroup, subset: &[usize]) -> Option<usize> {
    if subset.is_empty() {
        return None;
    }
    let inside: BTreeSet<usize> = subset.iter().copied().collect();
    for &a in subset {
        for &b in subset {
            if !inside.contains(&sg.mul(a, b)) {
                return None;
            }
        }
    }
    let mut idempotents = subset.iter().copied().filter(|&x| sg.mul(x, x) == x);
    let e = idempotents.next()?;
    if idempotents.next().is_some() {
        return None;
    }
    if !subset.iter().all(|&x| sg.mul(e, x) == x && sg.mul(x, e) == x) {
        return None;
    }
    // every element must have some power equal to e
    for &x in subset {
        let mut p = x;
        let mut found = p == e;
        for _ in 0..subset.len() {
            if found {
                break;
            }
            p = sg.mul(p, x);
            found = p == e;
        }
        if !found {
            return None;
        }
    }
    Some(e)
}

/// Subgroups generated by at most `max_gen` elements, deduplicated and
/// sorted by order then member list.
pub fn find_subgroups(sg: &FiniteSemigroup, max_gen: usize, cap: usize) -> Result<Vec<Subgroup>> {
    if sg.size() > cap {
        return Err(Error::Capacity {
            what: format!("subgroup search over a semigroup of {} elements", sg.size()),
            cap,
        });
    }
    let n = sg.size();
    let mut found: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut combo = Vec::new();
    for k in 1..=max_gen.min(n) {
        for_each_combination(n, k, &mut combo, 0, &mut |gens| {
            let members = sg.subsemigroup(gens);
            if found.contains_key(&members) {
                return;
            }
            if let Some(e) = is_group_subset(sg, &members) {
                found.insert(members, e);
            }
        });
    }
    let mut out: Vec<Subgroup> = found
        .into_iter()
        .map(|(members, identity)| Subgroup {
            trivial: members.len() == 1,
            members,
            identity,
        })
        .collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    Ok(out)
}

fn for_each_combination(
    n: usize,
    k: usize,
    combo: &mut Vec<usize>,
    start: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if combo.len() == k {
        f(combo);
        return;
    }
    for i in start..n {
        combo.push(i);
        for_each_combination(n, k, combo, i + 1, f);
        combo.pop();
    }
}

/// The family of sets `σH`, a section choosing the minimum-index member of
/// each, and the cocycle `kappa`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetStructure {
    pub subgroup: Subgroup,
    /// Distinct sets `σH`, each sorted, ordered by their section element.
    pub cosets: Vec<Vec<usize>>,
    /// `coset_of[σ]` is the index of `σH` in `cosets`.
    pub coset_of: Vec<usize>,
    /// `section[c]` is the minimum-index member of `cosets[c]`.
    pub section: Vec<usize>,
}

pub fn coset_structure(sg: &FiniteSemigroup, h: &Subgroup) -> Result<CosetStructure> {
    if is_group_subset(sg, &h.members) != Some(h.identity) {
        return Err(Error::InvalidElement("descriptor is not a subgroup".into()));
    }
    let sets: Vec<Vec<usize>> = (0..sg.size()).map(|s| sg.set_product(&[s], &h.members)).collect();
    let mut distinct: Vec<Vec<usize>> = sets.clone();
    distinct.sort_by(|a, b| a[0].cmp(&b[0]).then_with(|| a.cmp(b)));
    distinct.dedup();
    let index: BTreeMap<&Vec<usize>, usize> = distinct.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let coset_of = sets.iter().map(|s| index[s]).collect();
    let section = distinct.iter().map(|c| c[0]).collect();
    Ok(CosetStructure {
        subgroup: h.clone(),
        cosets: distinct,
        coset_of,
        section,
    })
}

impl CosetStructure {
    /// The unique `h ∈ H` with `σ₁ = σ₂h` when `σ₁H = σ₂H`; the subgroup
    /// identity otherwise.
    pub fn kappa(&self, sg: &FiniteSemigroup, s1: usize, s2: usize) -> Result<usize> {
        let e = self.subgroup.identity;
        if self.coset_of[s1] != self.coset_of[s2] {
            return Ok(e);
        }
        let candidates: Vec<usize> = self
            .subgroup
            .members
            .iter()
            .copied()
            .filter(|&h| sg.mul(s2, h) == s1)
            .collect();
        match candidates.len() {
            0 => Ok(e),
            1 => Ok(candidates[0]),
            _ => Err(Error::Ambiguity {
                left: sg.label(s1).to_string(),
                right: sg.label(s2).to_string(),
                candidates: candidates.iter().map(|&c| sg.label(c).to_string()).collect(),
            }),
        }
    }

    pub fn coset_count(&self) -> usize {
        self.cosets.len()
    }
}
