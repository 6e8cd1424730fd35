//! Exact probability measures on semigroups and state spaces, their
//! convolutions, and the limit behaviour of backward products
//! `N_k N_{k-1} ⋯ N_{l+1}` as `l → -∞`.

use std::collections::HashMap;

use num::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{
    coset_structure, find_subgroups, Action, FiniteSemigroup, Subgroup, DEFAULT_MAX_GENERATORS,
    DEFAULT_SUBGROUP_CAP,
};
use crate::chain::{period_lcm, ChainClasses, ExactChain, RecurrentClass};
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};

/// What a measure's index set is: semigroup elements or states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Carrier {
    Elements(usize),
    States(usize),
}

impl Carrier {
    pub fn len(self) -> usize {
        match self {
            Carrier::Elements(n) | Carrier::States(n) => n,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

/// A probability measure with exact rational weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbMeasure {
    carrier: Carrier,
    weights: Vec<Rational>,
}

impl ProbMeasure {
    pub fn new(carrier: Carrier, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != carrier.len() {
            return Err(Error::Dimension {
                expected: carrier.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidMeasure("negative weight".into()));
        }
        let total: Rational = weights.iter().cloned().sum();
        if total != one() {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(ProbMeasure { carrier, weights })
    }

    pub fn from_pairs(carrier: Carrier, pairs: &[(usize, Rational)]) -> Result<Self> {
        let mut weights = vec![zero(); carrier.len()];
        for (i, w) in pairs {
            if *i >= carrier.len() {
                return Err(Error::Dimension {
                    expected: carrier.len(),
                    found: *i,
                });
            }
            weights[*i] += w;
        }
        Self::new(carrier, weights)
    }

    pub fn point(carrier: Carrier, i: usize) -> Self {
        let mut weights = vec![zero(); carrier.len()];
        weights[i] = one();
        ProbMeasure { carrier, weights }
    }

    pub fn uniform(carrier: Carrier) -> Self {
        let all: Vec<usize> = (0..carrier.len()).collect();
        Self::uniform_on(carrier, &all)
    }

    pub fn uniform_on(carrier: Carrier, subset: &[usize]) -> Self {
        assert!(!subset.is_empty());
        let w = Rational::new(1.into(), (subset.len() as i64).into());
        let mut weights = vec![zero(); carrier.len()];
        for &i in subset {
            weights[i] = w.clone();
        }
        ProbMeasure { carrier, weights }
    }

    /// Convex combination; the coefficients must sum to one.
    pub fn mixture(parts: &[(Rational, &ProbMeasure)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidMeasure("empty mixture".into()))?
            .1;
        let mut weights = vec![zero(); first.carrier.len()];
        for (c, m) in parts {
            if m.carrier != first.carrier {
                return Err(Error::CarrierMismatch("mixture components differ".into()));
            }
            for (w, x) in weights.iter_mut().zip(&m.weights) {
                *w += c * x;
            }
        }
        Self::new(first.carrier, weights)
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| !self.weights[i].is_zero()).collect()
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().cloned().sum()
    }

    /// Image measure under `f`.
    pub fn pushforward(&self, target: Carrier, f: impl Fn(usize) -> usize) -> ProbMeasure {
        let mut weights = vec![zero(); target.len()];
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_zero() {
                weights[f(i)] += w;
            }
        }
        ProbMeasure {
            carrier: target,
            weights,
        }
    }
}

fn same_carrier(a: &ProbMeasure, b: &ProbMeasure) -> Result<()> {
    if a.carrier != b.carrier {
        return Err(Error::CarrierMismatch(format!("{:?} vs {:?}", a.carrier, b.carrier)));
    }
    Ok(())
}

/// `(μ₁∗μ₂)(c) = Σ_{ab=c} μ₁(a)μ₂(b)`.
pub fn convolve(mu1: &ProbMeasure, mu2: &ProbMeasure, sg: &FiniteSemigroup) -> Result<ProbMeasure> {
    same_carrier(mu1, mu2)?;
    if mu1.carrier != Carrier::Elements(sg.size()) {
        return Err(Error::CarrierMismatch("measure is not over this semigroup".into()));
    }
    let mut weights = vec![zero(); sg.size()];
    for a in mu1.support() {
        for b in mu2.support() {
            weights[sg.mul(a, b)] += &mu1.weights[a] * &mu2.weights[b];
        }
    }
    Ok(ProbMeasure {
        carrier: mu1.carrier,
        weights,
    })
}

/// `(μ∗λ)(y) = Σ_{σx=y} μ(σ)λ(x)`.
pub fn act(mu: &ProbMeasure, lam: &ProbMeasure, action: &Action) -> Result<ProbMeasure> {
    if mu.carrier != Carrier::Elements(action.semigroup().size()) {
        return Err(Error::CarrierMismatch("noise measure is not over the acting semigroup".into()));
    }
    let n = action.space().size();
    if lam.carrier != Carrier::States(n) {
        return Err(Error::CarrierMismatch("state measure is not over the acted space".into()));
    }
    let mut weights = vec![zero(); n];
    for s in mu.support() {
        for x in lam.support() {
            weights[action.apply(s, x)] += &mu.weights[s] * &lam.weights[x];
        }
    }
    Ok(ProbMeasure {
        carrier: lam.carrier,
        weights,
    })
}

/// `½ Σ |a − b|`.
pub fn tv_distance(a: &ProbMeasure, b: &ProbMeasure) -> Result<Rational> {
    same_carrier(a, b)?;
    let total: Rational = a.weights.iter().zip(&b.weights).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / Rational::from_integer(2.into()))
}

/// Whether `ν(·h) = ν` for every `h ∈ H`.
pub fn is_right_invariant(nu: &ProbMeasure, h: &Subgroup, sg: &FiniteSemigroup) -> bool {
    h.members
        .iter()
        .all(|&g| nu.pushforward(nu.carrier, |s| sg.mul(s, g)) == *nu)
}

/// Noise laws `μ_0, μ_{-1}, …, μ_{-(m-1)}` followed by a stationary tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseSpec {
    prefix: Vec<ProbMeasure>,
    tail: ProbMeasure,
}

impl NoiseSpec {
    pub fn new(prefix: Vec<ProbMeasure>, tail: ProbMeasure) -> Result<Self> {
        if !matches!(tail.carrier, Carrier::Elements(_)) {
            return Err(Error::CarrierMismatch("noise must live on semigroup elements".into()));
        }
        if prefix.iter().any(|m| m.carrier != tail.carrier) {
            return Err(Error::CarrierMismatch("noise laws must share one carrier".into()));
        }
        Ok(NoiseSpec { prefix, tail })
    }

    pub fn iid(mu: ProbMeasure) -> Result<Self> {
        Self::new(Vec::new(), mu)
    }

    pub fn prefix(&self) -> &[ProbMeasure] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn tail(&self) -> &ProbMeasure {
        &self.tail
    }

    pub fn carrier(&self) -> Carrier {
        self.tail.carrier
    }

    /// `μ_k` for `k ≤ 0`.
    pub fn at(&self, k: i64) -> &ProbMeasure {
        assert!(k <= 0, "noise index must be nonpositive");
        self.prefix.get((-k) as usize).unwrap_or(&self.tail)
    }

    /// Union of the supports of `μ_j` for `j ≤ k`.
    pub fn support_at_or_below(&self, k: i64) -> Vec<usize> {
        let mut hit = vec![false; self.carrier().len()];
        for s in self.tail.support() {
            hit[s] = true;
        }
        for j in ((-k).max(0) as usize)..self.prefix.len() {
            for s in self.prefix[j].support() {
                hit[s] = true;
            }
        }
        (0..hit.len()).filter(|&i| hit[i]).collect()
    }
}

/// `μ_0 ∗ μ_{-1} ∗ ⋯ ∗ μ_{-(depth-1)}`: the exact law of the depth-`depth`
/// backward product.
pub fn product_law(noise: &NoiseSpec, depth: usize, sg: &FiniteSemigroup) -> Result<ProbMeasure> {
    if depth == 0 {
        return Err(Error::Config("depth must be positive".into()));
    }
    // build from the deepest factor outward: acc = μ_j ∗ acc
    let mut acc = noise.at(-(depth as i64 - 1)).clone();
    for j in (0..depth - 1).rev() {
        acc = convolve(noise.at(-(j as i64)), &acc, sg)?;
    }
    Ok(acc)
}

/// The running product `P_n = τ_1 τ_2 ⋯ τ_n` with i.i.d. factors drawn
/// from the tail law, as a Markov chain on semigroup elements.
#[derive(Debug, Clone)]
pub struct ProductChain {
    /// Chain state `i` is semigroup element `states[i]`.
    pub states: Vec<usize>,
    pub chain: ExactChain,
    pub classes: ChainClasses,
    /// Law of `P_1` (the tail law) over chain states.
    pub initial: Vec<Rational>,
    /// Absorption probabilities into each recurrent class from `P_1`.
    pub absorption: Vec<Rational>,
}

impl ProductChain {
    /// Recurrent classes as semigroup element indices.
    pub fn element_classes(&self) -> Vec<RecurrentClass> {
        self.classes
            .recurrent
            .iter()
            .map(|c| RecurrentClass {
                states: c.states.iter().map(|&s| self.states[s]).collect(),
                period: c.period,
            })
            .collect()
    }

    pub fn position(&self, element: usize) -> Option<usize> {
        self.states.iter().position(|&s| s == element)
    }

    /// Semigroup elements `σ` with `στ = σ` for every factor in the tail
    /// support, as a mask over chain states.
    pub fn absorbing_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.states.len()];
        for c in &self.classes.recurrent {
            if c.states.len() == 1 {
                mask[c.states[0]] = true;
            }
        }
        mask
    }

    /// `E[T]` for `T = min{n ≥ 1 : P_n is right-absorbing}`; `None` when
    /// `T = ∞` has positive probability.
    pub fn expected_stopping_time(&self) -> Option<Rational> {
        self.chain
            .expected_hitting_time(&self.absorbing_mask(), &self.initial)
            .map(|t| t + one())
    }

    /// `P(T = ∞)`.
    pub fn never_stops(&self) -> Rational {
        one() - self.chain.hit_probability(&self.absorbing_mask(), &self.initial)
    }

    /// `P(T > depth)`.
    pub fn stopping_tail(&self, depth: usize) -> Rational {
        if depth == 0 {
            return one();
        }
        let mask = self.absorbing_mask();
        let mut dist = self.initial.clone();
        for _ in 1..depth {
            dist = self.chain.step(&dist);
        }
        dist.iter().zip(&mask).filter(|(_, &m)| !m).map(|(w, _)| w).sum()
    }

    fn to_measure(&self, dist: &[Rational], sg_size: usize) -> ProbMeasure {
        let mut weights = vec![zero(); sg_size];
        for (i, w) in dist.iter().enumerate() {
            weights[self.states[i]] += w;
        }
        ProbMeasure {
            carrier: Carrier::Elements(sg_size),
            weights,
        }
    }
}

pub fn build_product_chain(noise: &NoiseSpec, sg: &FiniteSemigroup) -> Result<ProductChain> {
    let tail = noise.tail();
    if tail.carrier != Carrier::Elements(sg.size()) {
        return Err(Error::CarrierMismatch("noise is not over this semigroup".into()));
    }
    let support = tail.support();
    let mut pos: HashMap<usize, usize> = HashMap::new();
    let mut states = Vec::new();
    for &s in &support {
        pos.insert(s, states.len());
        states.push(s);
    }
    let mut head = 0;
    while head < states.len() {
        let s = states[head];
        head += 1;
        for &t in &support {
            let st = sg.mul(s, t);
            if let std::collections::hash_map::Entry::Vacant(e) = pos.entry(st) {
                e.insert(states.len());
                states.push(st);
            }
        }
    }
    let rows = states
        .iter()
        .map(|&s| {
            support
                .iter()
                .map(|&t| (pos[&sg.mul(s, t)], tail.weights[t].clone()))
                .collect()
        })
        .collect();
    let chain = ExactChain::new(rows)?;
    let classes = chain.classes();
    let initial: Vec<Rational> = states.iter().map(|&s| tail.weights[s].clone()).collect();
    let absorption = chain.absorption(&classes, &initial);
    Ok(ProductChain {
        states,
        chain,
        classes,
        initial,
        absorption,
    })
}

/// Options for [`limit_analysis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitOptions {
    pub subgroup_cap: usize,
    pub max_generators: usize,
    /// Largest period lcm handled exactly.
    pub phase_cap: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            subgroup_cap: DEFAULT_SUBGROUP_CAP,
            max_generators: DEFAULT_MAX_GENERATORS,
            phase_cap: 720,
        }
    }
}

/// The semigroup searched for the subgroup `H`, with an embedding of the
/// noise carrier into it.
#[derive(Debug, Clone)]
pub struct Ambient {
    pub action: Action,
    /// `embed[σ]` is the ambient index of carrier element `σ`.
    pub embed: Vec<usize>,
    pub description: String,
}

impl Ambient {
    /// The full transformation monoid on the state space when it fits in
    /// `cap`; the carrier itself for groups acting on themselves, abstract
    /// semigroups, or larger state spaces.
    pub fn for_action(action: &Action, cap: usize) -> Result<Ambient> {
        let sg = action.semigroup();
        let n = action.space().size();
        let full_size = n.checked_pow(n as u32);
        if !action.is_on_itself() && sg.transformations().is_some() && full_size.is_some_and(|s| s <= cap) {
            let full = FiniteSemigroup::full_transformation_monoid(n)?;
            let embed = sg
                .transformations()
                .unwrap()
                .iter()
                .map(|t| full.index_of(t).expect("every map is in the full monoid"))
                .collect();
            let action = Action::natural(action.space().clone(), full)?;
            return Ok(Ambient {
                action,
                embed,
                description: format!("full transformation monoid on {n} states"),
            });
        }
        let description = if action.is_on_itself() {
            "group acting on itself".to_string()
        } else {
            "generated semigroup".to_string()
        };
        Ok(Ambient {
            action: action.clone(),
            embed: (0..sg.size()).collect(),
            description,
        })
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        self.action.semigroup()
    }

    pub fn embed_measure(&self, m: &ProbMeasure) -> ProbMeasure {
        m.pushforward(Carrier::Elements(self.semigroup().size()), |s| self.embed[s])
    }

    /// `{hx : h ∈ H}`.
    pub fn orbit(&self, h: &Subgroup, x: usize) -> Vec<usize> {
        let mut o: Vec<usize> = h.members.iter().map(|&g| self.action.apply(g, x)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }
}

/// Outcome of the search for a subgroup `H` witnessing convergence modulo `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSearch {
    /// `chosen` is the qualifying subgroup whose smallest orbit on the
    /// state space is largest, then smallest order, then lowest indices.
    Found {
        chosen: Subgroup,
        qualifying: Vec<Subgroup>,
    },
    NotFound,
    /// No limit law exists, so no right-invariant limit either.
    NotApplicable(String),
    CapacityExceeded { cap: usize, message: String },
}

impl SubgroupSearch {
    pub fn chosen(&self) -> Option<&Subgroup> {
        match self {
            SubgroupSearch::Found { chosen, .. } => Some(chosen),
            _ => None,
        }
    }

    pub fn qualifying(&self) -> &[Subgroup] {
        match self {
            SubgroupSearch::Found { qualifying, .. } => qualifying,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitLawReport {
    /// Backward products converge almost surely.
    pub as_convergence: bool,
    /// Backward products converge in law.
    pub converges_in_law: bool,
    /// lcm of the periods of the recurrent classes.
    pub phase_period: usize,
    /// `phase_limits[r]` is the limit of `μ^{∗n}` along `n ≡ r (mod phase_period)`.
    pub phase_limits: Vec<ProbMeasure>,
    /// `ν_0, ν_{-1}, …, ν_{-(m-1)}` then the tail law, when the limit exists.
    pub nu: Option<NuFamily>,
    /// Cesàro limit of the tail products.
    pub cesaro: ProbMeasure,
    pub recurrent_classes: Vec<RecurrentClass>,
    pub absorption: Vec<Rational>,
    pub ambient: Ambient,
    pub p2: SubgroupSearch,
}

/// Limit laws `ν_k` of `μ_k ∗ ⋯ ∗ μ_{l+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuFamily {
    pub prefix: Vec<ProbMeasure>,
    pub tail: ProbMeasure,
}

impl NuFamily {
    pub fn at(&self, k: i64) -> &ProbMeasure {
        self.prefix.get((-k) as usize).unwrap_or(&self.tail)
    }

    pub fn all(&self) -> impl Iterator<Item = &ProbMeasure> {
        self.prefix.iter().chain(std::iter::once(&self.tail))
    }
}

/// Pushes a tail law back through the prefix: returns
/// `[μ_0∗⋯∗μ_{-(m-1)}∗tail, …, μ_{-(m-1)}∗tail]`.
pub fn through_prefix(noise: &NoiseSpec, tail: &ProbMeasure, sg: &FiniteSemigroup) -> Result<Vec<ProbMeasure>> {
    let m = noise.prefix_len();
    let mut out = vec![tail.clone(); m];
    let mut acc = tail.clone();
    for j in (0..m).rev() {
        acc = convolve(&noise.prefix()[j], &acc, sg)?;
        out[j] = acc.clone();
    }
    Ok(out)
}

pub fn limit_analysis(noise: &NoiseSpec, action: &Action, opts: &LimitOptions) -> Result<LimitLawReport> {
    let sg = action.semigroup();
    let pc = build_product_chain(noise, sg)?;
    let as_convergence = pc.classes.recurrent.iter().all(|c| c.states.len() == 1);
    let period = period_lcm(&pc.classes.recurrent);
    if period > opts.phase_cap {
        return Err(Error::Capacity {
            what: format!("period lcm {period} of the product chain"),
            cap: opts.phase_cap,
        });
    }
    let cesaro_dist = pc.chain.limit_mixture(&pc.classes, &pc.initial);
    let cesaro = pc.to_measure(&cesaro_dist, sg.size());

    let phase_limits = if period == 1 {
        vec![cesaro.clone()]
    } else {
        let q = pc.chain.power(period);
        let q_classes = q.classes();
        debug_assert!(q_classes.recurrent.iter().all(|c| c.period == 1));
        let mut limits = vec![cesaro.clone(); period];
        let mut x = pc.initial.clone();
        for r in 1..=period {
            let lim = q.limit_mixture(&q_classes, &x);
            limits[r % period] = pc.to_measure(&lim, sg.size());
            x = pc.chain.step(&x);
        }
        limits
    };
    let converges_in_law = phase_limits.iter().all(|l| *l == phase_limits[0]);

    let nu = if converges_in_law {
        let tail = phase_limits[0].clone();
        Some(NuFamily {
            prefix: through_prefix(noise, &tail, sg)?,
            tail,
        })
    } else {
        None
    };

    let ambient = Ambient::for_action(action, opts.subgroup_cap)?;
    let recurrent_classes = pc.element_classes();
    let p2 = match &nu {
        None => SubgroupSearch::NotApplicable("backward products do not converge in law".into()),
        Some(nu) => search_subgroup(&ambient, &recurrent_classes, nu, opts),
    };

    Ok(LimitLawReport {
        as_convergence,
        converges_in_law,
        phase_period: period,
        phase_limits,
        nu,
        cesaro,
        recurrent_classes,
        absorption: pc.absorption.clone(),
        ambient,
        p2,
    })
}

fn search_subgroup(
    ambient: &Ambient,
    classes: &[RecurrentClass],
    nu: &NuFamily,
    opts: &LimitOptions,
) -> SubgroupSearch {
    let asg = ambient.semigroup();
    let subgroups = match find_subgroups(asg, opts.max_generators, opts.subgroup_cap) {
        Ok(s) => s,
        Err(e @ Error::Capacity { .. }) => {
            return SubgroupSearch::CapacityExceeded {
                cap: opts.subgroup_cap,
                message: e.to_string(),
            }
        }
        Err(e) => {
            return SubgroupSearch::CapacityExceeded {
                cap: opts.subgroup_cap,
                message: e.to_string(),
            }
        }
    };
    let embedded: Vec<ProbMeasure> = nu.all().map(|m| ambient.embed_measure(m)).collect();
    let mut qualifying = Vec::new();
    for h in subgroups.into_iter().filter(|h| !h.trivial) {
        let Ok(cosets) = coset_structure(asg, &h) else {
            continue;
        };
        let constant_on_classes = classes.iter().all(|c| {
            let first = cosets.coset_of[ambient.embed[c.states[0]]];
            c.states.iter().all(|&s| cosets.coset_of[ambient.embed[s]] == first)
        });
        if constant_on_classes && embedded.iter().all(|m| is_right_invariant(m, &h, asg)) {
            qualifying.push(h);
        }
    }
    let n = ambient.action.space().size();
    let min_orbit = |h: &Subgroup| (0..n).map(|x| ambient.orbit(h, x).len()).min().unwrap_or(0);
    let chosen = qualifying
        .iter()
        .max_by(|a, b| {
            min_orbit(a)
                .cmp(&min_orbit(b))
                .then_with(|| b.order().cmp(&a.order()))
                .then_with(|| b.members.cmp(&a.members))
        })
        .cloned();
    match chosen {
        Some(chosen) => SubgroupSearch::Found { chosen, qualifying },
        None => SubgroupSearch::NotFound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::algebra::{StateSpace, Transformation};
    use crate::rational::ratio;

    fn idx(sg: &FiniteSemigroup, img: &[usize]) -> usize {
        sg.index_of(&Transformation::from_one_based(img).unwrap()).unwrap()
    }

    fn typical_noise(sg: &FiniteSemigroup, p: Rational) -> NoiseSpec {
        let q = one() - &p;
        let mu = ProbMeasure::from_pairs(
            Carrier::Elements(sg.size()),
            &[(idx(sg, &[2, 1, 2]), p), (idx(sg, &[3, 3, 1]), q)],
        )
        .unwrap();
        NoiseSpec::iid(mu).unwrap()
    }

    #[test]
    fn measure_validation() {
        let c = Carrier::States(2);
        assert!(ProbMeasure::new(c, vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(ProbMeasure::new(c, vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(ProbMeasure::new(c, vec![ratio(1, 2)]).is_err());
        assert!(ProbMeasure::new(c, vec![ratio(1, 2), ratio(1, 2)]).is_ok());
    }

    #[test]
    fn point_masses_convolve_to_product() {
        let sg = typical_closure();
        let c = Carrier::Elements(7);
        for a in 0..7 {
            for b in 0..7 {
                let got = convolve(&ProbMeasure::point(c, a), &ProbMeasure::point(c, b), &sg).unwrap();
                assert_eq!(got, ProbMeasure::point(c, sg.mul(a, b)));
            }
        }
    }

    #[test]
    fn typical_noise_squared() {
        let sg = typical_closure();
        let mu = typical_noise(&sg, ratio(1, 2)).tail().clone();
        let mm = convolve(&mu, &mu, &sg).unwrap();
        let q = ratio(1, 4);
        let want = ProbMeasure::from_pairs(
            Carrier::Elements(7),
            &[
                (idx(&sg, &[1, 2, 1]), q.clone()),
                (idx(&sg, &[2, 2, 2]), q.clone()),
                (idx(&sg, &[3, 3, 3]), q.clone()),
                (idx(&sg, &[1, 1, 3]), q),
            ],
        )
        .unwrap();
        assert_eq!(mm, want);
    }

    #[test]
    fn haar_absorbs_convolution() {
        let z5 = FiniteSemigroup::cyclic(5).unwrap();
        let c = Carrier::Elements(5);
        let mu = ProbMeasure::from_pairs(c, &[(1, ratio(1, 3)), (4, ratio(2, 3))]).unwrap();
        let u = ProbMeasure::uniform(c);
        assert_eq!(convolve(&mu, &u, &z5).unwrap(), u);
        assert_eq!(convolve(&u, &mu, &z5).unwrap(), u);
    }

    #[test]
    fn carrier_mismatch_is_reported() {
        let sg = typical_closure();
        let a = ProbMeasure::point(Carrier::Elements(7), 0);
        let b = ProbMeasure::point(Carrier::States(7), 0);
        assert!(matches!(convolve(&a, &b, &sg), Err(Error::CarrierMismatch(_))));
        assert!(tv_distance(&a, &b).is_err());
    }

    #[test]
    fn synchronizing_element_forgets_input() {
        let act = typical_action();
        let sg = act.semigroup();
        let d2 = ProbMeasure::point(Carrier::Elements(7), idx(sg, &[2, 2, 2]));
        let lam = ProbMeasure::new(Carrier::States(3), vec![ratio(1, 6), ratio(1, 2), ratio(1, 3)]).unwrap();
        assert_eq!(act_on(&d2, &lam, &act), ProbMeasure::point(Carrier::States(3), 1));
    }

    fn act_on(m: &ProbMeasure, l: &ProbMeasure, a: &Action) -> ProbMeasure {
        act(m, l, a).unwrap()
    }

    #[test]
    fn typical_noise_acting_on_state_one() {
        let act_ = typical_action();
        let mu = typical_noise(act_.semigroup(), ratio(1, 3)).tail().clone();
        let d1 = ProbMeasure::point(Carrier::States(3), 0);
        let got = act_on(&mu, &d1, &act_);
        assert_eq!(got.weights(), &[zero(), ratio(1, 3), ratio(2, 3)]);
        let lhs = act_on(&mu, &act_on(&mu, &d1, &act_), &act_);
        let rhs = act_on(&convolve(&mu, &mu, act_.semigroup()).unwrap(), &d1, &act_);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tv_examples() {
        let c = Carrier::States(3);
        let d1 = ProbMeasure::point(c, 0);
        let d2 = ProbMeasure::point(c, 1);
        let half = ProbMeasure::uniform_on(c, &[0, 1]);
        assert_eq!(tv_distance(&d1, &d1).unwrap(), zero());
        assert_eq!(tv_distance(&d1, &d2).unwrap(), one());
        assert_eq!(tv_distance(&half, &d1).unwrap(), ratio(1, 2));
    }

    #[test]
    fn right_invariance_examples() {
        let z4 = FiniteSemigroup::cyclic(4).unwrap();
        let h = Subgroup {
            members: vec![0, 2],
            identity: 0,
            trivial: false,
        };
        let c = Carrier::Elements(4);
        assert!(is_right_invariant(&ProbMeasure::uniform(c), &h, &z4));
        assert!(!is_right_invariant(&ProbMeasure::point(c, 1), &h, &z4));

        let t3 = FiniteSemigroup::full_transformation_monoid(3).unwrap();
        let consts: Vec<usize> = (1..=3).map(|c| idx(&t3, &[c, c, c])).collect();
        let nu = ProbMeasure::uniform_on(Carrier::Elements(27), &consts);
        let mut a3 = vec![idx(&t3, &[1, 2, 3]), idx(&t3, &[2, 3, 1]), idx(&t3, &[3, 1, 2])];
        a3.sort();
        let h = Subgroup {
            members: a3,
            identity: idx(&t3, &[1, 2, 3]),
            trivial: false,
        };
        assert!(is_right_invariant(&nu, &h, &t3));
    }

    #[test]
    fn typical_product_chain() {
        let sg = typical_closure();
        let pc = build_product_chain(&typical_noise(&sg, ratio(1, 2)), &sg).unwrap();
        assert_eq!(pc.states.len(), 7);
        let mut classes: Vec<Vec<usize>> = pc.element_classes().into_iter().map(|c| c.states).collect();
        classes.sort();
        let mut want: Vec<Vec<usize>> = (1..=3).map(|c| vec![idx(&sg, &[c, c, c])]).collect();
        want.sort();
        assert_eq!(classes, want);
        assert_eq!(pc.absorption.iter().cloned().sum::<Rational>(), one());
    }

    #[test]
    fn rotation_chain_is_periodic() {
        let z5 = FiniteSemigroup::cyclic(5).unwrap();
        let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(5), 1)).unwrap();
        let pc = build_product_chain(&noise, &z5).unwrap();
        assert_eq!(pc.classes.recurrent.len(), 1);
        assert_eq!(pc.classes.recurrent[0].period, 5);
        assert_eq!(pc.classes.recurrent[0].states.len(), 5);
    }

    #[test]
    fn uniform_on_z2_is_aperiodic() {
        let z2 = FiniteSemigroup::cyclic(2).unwrap();
        let noise = NoiseSpec::iid(ProbMeasure::uniform(Carrier::Elements(2))).unwrap();
        let pc = build_product_chain(&noise, &z2).unwrap();
        assert_eq!(pc.classes.recurrent.len(), 1);
        assert_eq!(pc.classes.recurrent[0].period, 1);
    }

    #[test]
    fn typical_limit_analysis() {
        let act = typical_action();
        let sg = act.semigroup();
        for p in [ratio(1, 2), ratio(1, 3), ratio(1, 5)] {
            let rep = limit_analysis(&typical_noise(sg, p), &act, &LimitOptions::default()).unwrap();
            assert!(rep.as_convergence);
            assert!(rep.converges_in_law);
            assert_eq!(rep.nu.as_ref().unwrap().tail, rep.cesaro);
        }
        let rep = limit_analysis(&typical_noise(sg, ratio(1, 2)), &act, &LimitOptions::default()).unwrap();
        let consts: Vec<usize> = (1..=3).map(|c| idx(sg, &[c, c, c])).collect();
        assert_eq!(rep.nu.unwrap().tail, ProbMeasure::uniform_on(Carrier::Elements(7), &consts));
        let h = rep.p2.chosen().expect("subgroup found");
        assert_eq!(h.order(), 3);
        let t3 = rep.ambient.semigroup();
        let mut want = vec![idx(t3, &[1, 2, 3]), idx(t3, &[2, 3, 1]), idx(t3, &[3, 1, 2])];
        want.sort();
        assert_eq!(h.members, want);
    }

    #[test]
    fn rotation_has_no_limit_but_uniform_cesaro() {
        for n in 2..6 {
            let zn = FiniteSemigroup::cyclic(n).unwrap();
            let act = Action::regular(zn).unwrap();
            let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(n), 1)).unwrap();
            let rep = limit_analysis(&noise, &act, &LimitOptions::default()).unwrap();
            assert!(!rep.as_convergence);
            assert!(!rep.converges_in_law);
            assert!(rep.nu.is_none());
            assert_eq!(rep.cesaro, ProbMeasure::uniform(Carrier::Elements(n)));
            assert_eq!(rep.phase_period, n);
            for (r, lim) in rep.phase_limits.iter().enumerate() {
                assert_eq!(*lim, ProbMeasure::point(Carrier::Elements(n), r % n));
            }
            assert!(matches!(rep.p2, SubgroupSearch::NotApplicable(_)));
        }
    }

    #[test]
    fn uniform_z2_satisfies_p2_with_whole_group() {
        let z2 = FiniteSemigroup::cyclic(2).unwrap();
        let act = Action::regular(z2).unwrap();
        let noise = NoiseSpec::iid(ProbMeasure::uniform(Carrier::Elements(2))).unwrap();
        let rep = limit_analysis(&noise, &act, &LimitOptions::default()).unwrap();
        assert!(!rep.as_convergence);
        assert!(rep.converges_in_law);
        assert_eq!(rep.p2.chosen().unwrap().members, vec![0, 1]);
    }

    #[test]
    fn prefix_is_pushed_through() {
        let act = typical_action();
        let sg = act.semigroup();
        let tail = typical_noise(sg, ratio(1, 2)).tail().clone();
        let c2 = idx(sg, &[2, 2, 2]);
        let s1 = idx(sg, &[2, 1, 2]);
        let noise = NoiseSpec::new(vec![ProbMeasure::point(Carrier::Elements(7), s1)], tail).unwrap();
        let rep = limit_analysis(&noise, &act, &LimitOptions::default()).unwrap();
        let nu = rep.nu.unwrap();
        // s1 sends the constants 1,2,3 to the constants 2,1,2
        let c1 = idx(sg, &[1, 1, 1]);
        assert_eq!(nu.at(0).weight(c2), &ratio(2, 3));
        assert_eq!(nu.at(0).weight(c1), &ratio(1, 3));
        assert_eq!(nu.at(-1), &nu.tail);
    }

    #[test]
    fn product_law_matches_repeated_convolution() {
        let sg = typical_closure();
        let noise = typical_noise(&sg, ratio(1, 3));
        let mu = noise.tail();
        let three = convolve(mu, &convolve(mu, mu, &sg).unwrap(), &sg).unwrap();
        assert_eq!(product_law(&noise, 3, &sg).unwrap(), three);
        assert_eq!(product_law(&noise, 1, &sg).unwrap(), *mu);
    }

    #[test]
    fn larger_space_falls_back_to_generated_semigroup() {
        let space = StateSpace::numbered(4).unwrap();
        let sg = crate::algebra::generate_closure(&space, &[Transformation::from_one_based(&[2, 1, 4, 3]).unwrap()]).unwrap();
        let act = Action::natural(space, sg).unwrap();
        let amb = Ambient::for_action(&act, 64).unwrap();
        assert_eq!(amb.semigroup().size(), 2);
        let amb = Ambient::for_action(&act, 256).unwrap();
        assert_eq!(amb.semigroup().size(), 256);
    }
}
