//! Finite semigroups of transformations and their actions on finite state
//! spaces.
//!
//! Composition convention: `(a·b)(x) = a(b(x))`, so a product acts on a
//! state by applying the right factor first. This is the convention under
//! which `X_k = N_k X_{k-1}` unrolls to `X_0 = N_0 N_{-1} ⋯ N_{l+1} X_l`.

mod structure;
mod subgroup;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use structure::{
    classify_elements, core_orbit, core_orbit_by_powers, is_left_cancellative, power_core,
    ElementClasses, PowerCore,
};
pub use subgroup::{
    coset_structure, find_subgroups, is_group_subset, CosetStructure, Subgroup,
    DEFAULT_MAX_GENERATORS, DEFAULT_SUBGROUP_CAP,
};

/// A finite state space with display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("state space must be nonempty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate state label {l:?}")));
            }
        }
        Ok(StateSpace { labels })
    }

    /// States labelled `1..=n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()).collect())
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A total map on `{0, …, n-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation {
    image: Vec<usize>,
}

impl Transformation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidElement("empty image list".into()));
        }
        if let Some(&bad) = image.iter().find(|&&j| j >= n) {
            return Err(Error::InvalidElement(format!(
                "image index {bad} out of range for {n} states"
            )));
        }
        Ok(Transformation { image })
    }

    /// Builds from a 1-based image list, as written in spec files.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidElement("image indices are 1-based".into()));
        }
        Self::new(image.iter().map(|&j| j - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Transformation {
            image: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, c: usize) -> Self {
        assert!(c < n);
        Transformation { image: vec![c; n] }
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Transformation) -> Result<Transformation> {
        if self.degree() != other.degree() {
            return Err(Error::Dimension {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        Ok(Transformation {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.degree()];
        for &j in &self.image {
            if std::mem::replace(&mut hit[j], true) {
                return false;
            }
        }
        true
    }

    pub fn constant_value(&self) -> Option<usize> {
        let first = self.image[0];
        self.image.iter().all(|&j| j == first).then_some(first)
    }

    pub fn display_with(&self, space: &StateSpace) -> String {
        let parts: Vec<&str> = self.image.iter().map(|&j| space.label(j)).collect();
        format!("[{}]", parts.join(" "))
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// `a ∘ b`, i.e. `result(i) = a(b(i))`.
pub fn compose(a: &Transformation, b: &Transformation) -> Result<Transformation> {
    a.compose(b)
}

/// A finite semigroup given by its Cayley table, optionally realised as
/// transformations of a state space.
#[derive(Debug, Clone)]
pub struct FiniteSemigroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    generators: Vec<usize>,
    transformations: Option<Vec<Transformation>>,
    lookup: HashMap<Transformation, usize>,
}

impl FiniteSemigroup {
    /// Builds from an explicit element list, which must be closed under
    /// composition.
    pub fn from_elements(
        elements: Vec<Transformation>,
        labels: Vec<String>,
        generators: Vec<usize>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidElement("empty semigroup".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::Dimension {
                expected: elements.len(),
                found: labels.len(),
            });
        }
        let degree = elements[0].degree();
        let mut lookup = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if e.degree() != degree {
                return Err(Error::Dimension {
                    expected: degree,
                    found: e.degree(),
                });
            }
            if lookup.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidElement(format!("duplicate element {e}")));
            }
        }
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for (a, ea) in elements.iter().enumerate() {
            for (b, eb) in elements.iter().enumerate() {
                let c = ea.compose(eb)?;
                table[a][b] = *lookup.get(&c).ok_or_else(|| {
                    Error::InvalidElement(format!("element list not closed: {ea}∘{eb} = {c}"))
                })?;
            }
        }
        if generators.iter().any(|&g| g >= elements.len()) {
            return Err(Error::InvalidElement("generator index out of range".into()));
        }
        Ok(FiniteSemigroup {
            labels,
            table,
            generators,
            transformations: Some(elements),
            lookup,
        })
    }

    /// Builds an abstract semigroup from its Cayley table. Closure and
    /// associativity are checked.
    pub fn from_table(table: Vec<Vec<usize>>, labels: Vec<String>, generators: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if n == 0 || labels.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: labels.len(),
            });
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&c| c >= n) {
                return Err(Error::InvalidElement("Cayley table not closed".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    if table[table[a][b]][d] != table[a][table[b][d]] {
                        return Err(Error::InvalidElement(format!(
                            "Cayley table not associative at ({a},{b},{d})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteSemigroup {
            labels,
            table,
            generators,
            transformations: None,
            lookup: HashMap::new(),
        })
    }

    /// The cyclic group `ℤ/n` as rotations of `n` points, element `g` at
    /// index `g`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("cyclic group of order 0".into()));
        }
        let elements = (0..n)
            .map(|g| Transformation {
                image: (0..n).map(|x| (x + g) % n).collect(),
            })
            .collect();
        let labels = (0..n).map(|g| g.to_string()).collect();
        Self::from_elements(elements, labels, vec![1 % n])
    }

    /// All permutations of `n` points in lexicographic image order.
    pub fn symmetric(n: usize) -> Result<Self> {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            perms.push(Transformation {
                image: current.clone(),
            });
            if !next_permutation(&mut current) {
                break;
            }
        }
        let labels = perms.iter().map(|p| p.to_string()).collect();
        let gens = (0..perms.len()).collect();
        Self::from_elements(perms, labels, gens)
    }

    /// All `n^n` maps of `n` points in lexicographic image order.
    pub fn full_transformation_monoid(n: usize) -> Result<Self> {
        let total = n
            .checked_pow(n as u32)
            .ok_or_else(|| Error::Capacity {
                what: format!("full transformation monoid on {n} points"),
                cap: usize::MAX,
            })?;
        let elements: Vec<Transformation> = (0..total)
            .map(|mut code| {
                let mut image = vec![0; n];
                for slot in image.iter_mut().rev() {
                    *slot = code % n;
                    code /= n;
                }
                Transformation { image }
            })
            .collect();
        let labels = elements.iter().map(|e| e.to_string()).collect();
        let gens = (0..total).collect();
        Self::from_elements(elements, labels, gens)
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Index of `a·b`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn transformation(&self, i: usize) -> Option<&Transformation> {
        self.transformations.as_ref().map(|t| &t[i])
    }

    pub fn transformations(&self) -> Option<&[Transformation]> {
        self.transformations.as_deref()
    }

    pub fn index_of(&self, t: &Transformation) -> Option<usize> {
        self.lookup.get(t).copied()
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// A two-sided identity, if the semigroup is a monoid.
    pub fn identity(&self) -> Option<usize> {
        let n = self.size();
        (0..n).find(|&e| (0..n).all(|x| self.table[e][x] == x && self.table[x][e] == x))
    }

    pub fn is_group(&self) -> bool {
        let all: Vec<usize> = (0..self.size()).collect();
        is_group_subset(self, &all).is_some()
    }

    /// Elements of the subsemigroup generated by `seeds`, sorted by index.
    pub fn subsemigroup(&self, seeds: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.size()];
        let mut queue: Vec<usize> = Vec::new();
        for &s in seeds {
            if !std::mem::replace(&mut inside[s], true) {
                queue.push(s);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in seeds {
                let y = self.table[x][g];
                if !std::mem::replace(&mut inside[y], true) {
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    /// Right multiplication of a set of elements by a set: `{ab : a ∈ A, b ∈ B}`.
    pub fn set_product(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut hit = vec![false; self.size()];
        for &x in a {
            for &y in b {
                hit[self.table[x][y]] = true;
            }
        }
        (0..self.size()).filter(|&i| hit[i]).collect()
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Closure of `generators` under composition.
///
/// Elements are ordered breadth-first by word length over the generators;
/// within one word length, by image list in lexicographic order. Generators
/// are labelled by their image list.
pub fn generate_closure(space: &StateSpace, generators: &[Transformation]) -> Result<FiniteSemigroup> {
    let named: Vec<(Option<String>, Transformation)> =
        generators.iter().map(|g| (None, g.clone())).collect();
    closure_impl(space, &named)
}

/// As [`generate_closure`], with generator names used as element labels.
pub fn generate_named_closure(
    space: &StateSpace,
    generators: &[(String, Transformation)],
) -> Result<FiniteSemigroup> {
    let named: Vec<(Option<String>, Transformation)> = generators
        .iter()
        .map(|(n, g)| (Some(n.clone()), g.clone()))
        .collect();
    closure_impl(space, &named)
}

fn closure_impl(space: &StateSpace, generators: &[(Option<String>, Transformation)]) -> Result<FiniteSemigroup> {
    if generators.is_empty() {
        return Err(Error::InvalidElement("generator list is empty".into()));
    }
    for (_, g) in generators {
        if g.degree() != space.size() {
            return Err(Error::Dimension {
                expected: space.size(),
                found: g.degree(),
            });
        }
    }
    let mut names: HashMap<Transformation, String> = HashMap::new();
    for (n, g) in generators {
        if let Some(n) = n {
            names.entry(g.clone()).or_insert_with(|| n.clone());
        }
    }
    let mut gens: Vec<Transformation> = generators.iter().map(|(_, g)| g.clone()).collect();
    gens.sort();
    gens.dedup();

    let mut elements: Vec<Transformation> = gens.clone();
    let mut seen: HashMap<Transformation, usize> =
        gens.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let mut level_start = 0;
    while level_start < elements.len() {
        let level_end = elements.len();
        let mut fresh = Vec::new();
        for x in &elements[level_start..level_end] {
            for g in &gens {
                let y = x.compose(g)?;
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), usize::MAX);
                    fresh.push(y);
                }
            }
        }
        fresh.sort();
        elements.extend(fresh);
        level_start = level_end;
    }
    let labels = elements
        .iter()
        .map(|e| names.get(e).cloned().unwrap_or_else(|| e.display_with(space)))
        .collect();
    let generator_ids = (0..gens.len()).collect();
    FiniteSemigroup::from_elements(elements, labels, generator_ids)
}

/// A semigroup together with its action on a state space.
#[derive(Debug, Clone)]
pub struct Action {
    semigroup: FiniteSemigroup,
    space: StateSpace,
    map: Vec<Vec<usize>>,
    on_itself: bool,
}

impl Action {
    /// The natural action of a transformation semigroup on its points.
    pub fn natural(space: StateSpace, semigroup: FiniteSemigroup) -> Result<Self> {
        let ts = semigroup.transformations().ok_or_else(|| {
            Error::Unsupported("natural action needs a transformation semigroup".into())
        })?;
        let mut map = Vec::with_capacity(ts.len());
        for t in ts {
            if t.degree() != space.size() {
                return Err(Error::Dimension {
                    expected: space.size(),
                    found: t.degree(),
                });
            }
            map.push(t.image().to_vec());
        }
        Ok(Action {
            semigroup,
            space,
            map,
            on_itself: false,
        })
    }

    /// The semigroup acting on itself by left multiplication.
    pub fn regular(semigroup: FiniteSemigroup) -> Result<Self> {
        let space = StateSpace::new(semigroup.labels().to_vec())?;
        let map = semigroup.table().to_vec();
        Ok(Action {
            semigroup,
            space,
            map,
            on_itself: true,
        })
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn is_on_itself(&self) -> bool {
        self.on_itself
    }

    /// `σx`.
    #[inline]
    pub fn apply(&self, sigma: usize, x: usize) -> usize {
        self.map[sigma][x]
    }

    pub fn row(&self, sigma: usize) -> &[usize] {
        &self.map[sigma]
    }

    /// `{σx : σ ∈ elements, x ∈ states}`.
    pub fn image_of(&self, elements: &[usize], states: &[usize]) -> Vec<usize> {
        let mut hit = vec![false; self.space.size()];
        for &s in elements {
            for &x in states {
                hit[self.map[s][x]] = true;
            }
        }
        (0..self.space.size()).filter(|&i| hit[i]).collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn sigma1() -> Transformation {
        Transformation::from_one_based(&[2, 1, 2]).unwrap()
    }

    pub fn sigma2() -> Transformation {
        Transformation::from_one_based(&[3, 3, 1]).unwrap()
    }

    pub fn typical_closure() -> FiniteSemigroup {
        let space = StateSpace::numbered(3).unwrap();
        generate_named_closure(
            &space,
            &[("s1".into(), sigma1()), ("s2".into(), sigma2())],
        )
        .unwrap()
    }

    pub fn typical_action() -> Action {
        Action::natural(StateSpace::numbered(3).unwrap(), typical_closure()).unwrap()
    }
}
