//! Seeded simulation of backward products, stopping times, solution paths
//! and conditionally independent couplings.
//!
//! Trial `t` draws from ChaCha8 seeded with `seed_from_u64(seed)` on stream
//! `t`, first the noise `N_0, …, N_{-L+1}` and then any entry states, so a
//! single trial can be replayed in isolation.

use num::{BigInt, Integer, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Action;
use crate::error::{Error, Result};
use crate::measures::{build_product_chain, product_law, Carrier, NoiseSpec, ProbMeasure};
use crate::rational::{fmt_sig12, to_pq, zero, Rational};

pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64/stream=trial";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub depth: usize,
    pub trials: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(depth: usize, trials: u64, seed: u64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("depth must be positive".into()));
        }
        if trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        Ok(SimConfig {
            depth,
            trials,
            seed,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// Inverse-CDF sampler over integer thresholds `⌈C_i · 2⁶⁴⌉`.
#[derive(Debug, Clone)]
pub struct Sampler {
    thresholds: Vec<(u128, usize)>,
}

impl Sampler {
    pub fn new(m: &ProbMeasure) -> Self {
        let scale = BigInt::from(1u8) << 64;
        let mut cumulative: Rational = zero();
        let thresholds = m
            .support()
            .into_iter()
            .map(|i| {
                cumulative += m.weight(i);
                let num: BigInt = cumulative.numer() * &scale;
                let (q, r) = num.div_rem(cumulative.denom());
                let t = if r.is_zero() { q } else { q + 1 };
                (t.to_u128().expect("threshold fits in 65 bits"), i)
            })
            .collect();
        Sampler { thresholds }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> usize {
        let u = rng.next_u64() as u128;
        self.thresholds
            .iter()
            .find(|(t, _)| u < *t)
            .map(|&(_, i)| i)
            .unwrap_or_else(|| self.thresholds.last().expect("nonempty support").1)
    }
}

/// One simulated backward window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSample {
    /// `noise[j] = N_{-j}`.
    pub noise: Vec<usize>,
    /// `products[j] = N_0 N_{-1} ⋯ N_{-j}`.
    pub products: Vec<usize>,
    /// Least `n ≥ 1` with `products[n-1]` right-absorbing.
    pub absorbed_at: Option<usize>,
    /// `x_path[j] = X_{-j}` for `j = 0..=L`, when an entry law was given.
    pub x_path: Option<Vec<usize>>,
}

/// Shared noise with two state paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingSample {
    pub noise: Vec<usize>,
    pub x1_path: Vec<usize>,
    pub x2_path: Vec<usize>,
}

struct Engine<'a> {
    action: &'a Action,
    cfg: SimConfig,
    samplers: Vec<Sampler>,
    absorbing: Vec<bool>,
}

impl<'a> Engine<'a> {
    fn new(noise: &NoiseSpec, action: &'a Action, cfg: SimConfig) -> Result<Self> {
        let sg = action.semigroup();
        if noise.carrier() != Carrier::Elements(sg.size()) {
            return Err(Error::CarrierMismatch("noise is not over the acting semigroup".into()));
        }
        let samplers = (0..cfg.depth).map(|j| Sampler::new(noise.at(-(j as i64)))).collect();
        let support = noise.support_at_or_below(0);
        let absorbing = (0..sg.size())
            .map(|s| support.iter().all(|&t| sg.mul(s, t) == s))
            .collect();
        Ok(Engine {
            action,
            cfg,
            samplers,
            absorbing,
        })
    }

    fn draw_noise(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        self.samplers.iter().map(|s| s.sample(rng)).collect()
    }

    fn products(&self, noise: &[usize]) -> (Vec<usize>, Option<usize>) {
        let sg = self.action.semigroup();
        let mut products = Vec::with_capacity(noise.len());
        let mut absorbed_at = None;
        let mut acc = noise[0];
        for (j, &n) in noise.iter().enumerate() {
            if j > 0 {
                acc = sg.mul(acc, n);
            }
            products.push(acc);
            if absorbed_at.is_none() && self.absorbing[acc] {
                absorbed_at = Some(j + 1);
            }
        }
        (products, absorbed_at)
    }

    fn state_path(&self, noise: &[usize], entry: usize) -> Vec<usize> {
        let mut path = vec![entry; noise.len() + 1];
        for j in (0..noise.len()).rev() {
            path[j] = self.action.apply(noise[j], path[j + 1]);
        }
        path
    }

    fn sample(&self, trial: u64, entry: Option<&Sampler>) -> PathSample {
        let mut rng = self.cfg.rng(trial);
        let noise = self.draw_noise(&mut rng);
        let (products, absorbed_at) = self.products(&noise);
        let x_path = entry.map(|e| self.state_path(&noise, e.sample(&mut rng)));
        PathSample {
            noise,
            products,
            absorbed_at,
            x_path,
        }
    }

    fn coupling(&self, trial: u64, e1: &Sampler, e2: &Sampler) -> CouplingSample {
        let mut rng = self.cfg.rng(trial);
        let noise = self.draw_noise(&mut rng);
        let x1 = e1.sample(&mut rng);
        let x2 = e2.sample(&mut rng);
        CouplingSample {
            x1_path: self.state_path(&noise, x1),
            x2_path: self.state_path(&noise, x2),
            noise,
        }
    }
}

/// Maps every trial index through `f`, keeping trial order.
fn run_trials<T, F>(cfg: &SimConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match cfg.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..cfg.trials).into_par_iter().map(f).collect()
        }
        _ => (0..cfg.trials).map(f).collect(),
    }
}

fn check_states(action: &Action, m: &ProbMeasure) -> Result<()> {
    if m.carrier() != Carrier::States(action.space().size()) {
        return Err(Error::CarrierMismatch("entry law is not over the state space".into()));
    }
    Ok(())
}

/// Lazily simulated trials in trial order.
pub fn simulate_paths<'a>(
    noise: &NoiseSpec,
    action: &'a Action,
    cfg: &SimConfig,
    entry: Option<&ProbMeasure>,
) -> Result<impl Iterator<Item = PathSample> + 'a> {
    if let Some(e) = entry {
        check_states(action, e)?;
    }
    let engine = Engine::new(noise, action, *cfg)?;
    let entry = entry.map(Sampler::new);
    Ok((0..cfg.trials).map(move |t| engine.sample(t, entry.as_ref())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observable {
    /// `N_0 N_{-1} ⋯ N_{-L+1}`.
    Product,
    /// `X_0` with `X_{-L}` drawn from the given law.
    State(ProbMeasure),
}

/// Frequencies with binomial standard errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalLaw {
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl EmpiricalLaw {
    pub fn frequency(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.trials as f64
    }

    pub fn stderr(&self, i: usize) -> f64 {
        let p = self.frequency(i);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

pub fn estimate_law(noise: &NoiseSpec, action: &Action, cfg: &SimConfig, observable: &Observable) -> Result<EmpiricalLaw> {
    let engine = Engine::new(noise, action, *cfg)?;
    let (size, entry) = match observable {
        Observable::Product => (action.semigroup().size(), None),
        Observable::State(m) => {
            check_states(action, m)?;
            (action.space().size(), Some(Sampler::new(m)))
        }
    };
    let outcomes = run_trials(cfg, |t| {
        let s = engine.sample(t, entry.as_ref());
        match &s.x_path {
            Some(path) => path[0],
            None => *s.products.last().expect("depth is positive"),
        }
    });
    let mut counts = vec![0u64; size];
    for o in outcomes {
        counts[o] += 1;
    }
    Ok(EmpiricalLaw {
        counts,
        trials: cfg.trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingStats {
    pub trials: u64,
    /// Trials whose product became right-absorbing within the depth.
    pub stopped: u64,
    /// Mean and standard error of `T` over stopped trials.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub median: Option<usize>,
    pub q90: Option<usize>,
    /// Fraction of trials not stopped within the depth.
    pub unstopped_frequency: f64,
    /// Exact `E[T]` for i.i.d. noise when `T < ∞` almost surely.
    pub exact_mean: Option<Rational>,
    /// Exact `P(T = ∞)` for i.i.d. noise.
    pub exact_never: Option<Rational>,
    /// Exact `P(T > L)` for i.i.d. noise.
    pub exact_tail: Option<Rational>,
}

pub fn stopping_time_stats(noise: &NoiseSpec, action: &Action, cfg: &SimConfig) -> Result<StoppingStats> {
    let engine = Engine::new(noise, action, *cfg)?;
    let times = run_trials(cfg, |t| engine.sample(t, None).absorbed_at);
    let mut stopped: Vec<usize> = times.into_iter().flatten().collect();
    stopped.sort_unstable();
    let k = stopped.len();
    let (mean, stderr) = if k == 0 {
        (None, None)
    } else {
        let m = stopped.iter().map(|&t| t as f64).sum::<f64>() / k as f64;
        let var = if k > 1 {
            stopped.iter().map(|&t| (t as f64 - m).powi(2)).sum::<f64>() / (k - 1) as f64
        } else {
            0.0
        };
        (Some(m), Some((var / k as f64).sqrt()))
    };
    let quantile = |q: f64| (k > 0).then(|| stopped[((q * k as f64).ceil() as usize).clamp(1, k) - 1]);
    let (exact_mean, exact_never, exact_tail) = if noise.prefix_len() == 0 {
        let pc = build_product_chain(noise, action.semigroup())?;
        (pc.expected_stopping_time(), Some(pc.never_stops()), Some(pc.stopping_tail(cfg.depth)))
    } else {
        (None, None, None)
    };
    Ok(StoppingStats {
        trials: cfg.trials,
        stopped: k as u64,
        mean,
        stderr,
        median: quantile(0.5),
        q90: quantile(0.9),
        unstopped_frequency: (cfg.trials - k as u64) as f64 / cfg.trials as f64,
        exact_mean,
        exact_never,
        exact_tail,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingStats {
    pub trials: u64,
    pub collisions: u64,
    pub frequency: f64,
    pub stderr: f64,
    /// Trials in which the two paths met at some index `k ≤ 0`.
    pub merged: u64,
    /// Exact `P(X¹_0 = X²_0)` at this depth.
    pub exact: Rational,
}

/// Shared noise, independent entry states drawn from `entry1` and `entry2`
/// at depth `L`, evolved forward to index 0.
pub fn coupling_paths<'a>(
    noise: &NoiseSpec,
    action: &'a Action,
    entry1: &ProbMeasure,
    entry2: &ProbMeasure,
    cfg: &SimConfig,
) -> Result<impl Iterator<Item = CouplingSample> + 'a> {
    check_states(action, entry1)?;
    check_states(action, entry2)?;
    let engine = Engine::new(noise, action, *cfg)?;
    let (s1, s2) = (Sampler::new(entry1), Sampler::new(entry2));
    Ok((0..cfg.trials).map(move |t| engine.coupling(t, &s1, &s2)))
}

pub fn ci_coupling(
    noise: &NoiseSpec,
    action: &Action,
    entry1: &ProbMeasure,
    entry2: &ProbMeasure,
    cfg: &SimConfig,
) -> Result<CouplingStats> {
    check_states(action, entry1)?;
    check_states(action, entry2)?;
    let engine = Engine::new(noise, action, *cfg)?;
    let (s1, s2) = (Sampler::new(entry1), Sampler::new(entry2));
    let outcomes = run_trials(cfg, |t| {
        let c = engine.coupling(t, &s1, &s2);
        let met = c.x1_path.iter().zip(&c.x2_path).any(|(a, b)| a == b);
        (c.x1_path[0] == c.x2_path[0], met)
    });
    let collisions = outcomes.iter().filter(|o| o.0).count() as u64;
    let merged = outcomes.iter().filter(|o| o.1).count() as u64;
    let frequency = collisions as f64 / cfg.trials as f64;

    let prod = product_law(noise, cfg.depth, action.semigroup())?;
    let mut exact = zero();
    for s in prod.support() {
        for x1 in entry1.support() {
            for x2 in entry2.support() {
                if action.apply(s, x1) == action.apply(s, x2) {
                    exact += prod.weight(s) * entry1.weight(x1) * entry2.weight(x2);
                }
            }
        }
    }
    Ok(CouplingStats {
        trials: cfg.trials,
        collisions,
        frequency,
        stderr: (frequency * (1.0 - frequency) / cfg.trials as f64).sqrt(),
        merged,
        exact,
    })
}

/// One line of the `atom,exact,empirical,stderr` summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub atom: String,
    pub exact: Option<Rational>,
    pub empirical: f64,
    pub stderr: f64,
}

pub const CSV_HEADER: &str = "atom,exact,empirical,stderr";

pub fn write_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.atom,
            r.exact.as_ref().map(to_pq).unwrap_or_default(),
            fmt_sig12(r.empirical),
            fmt_sig12(r.stderr)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::algebra::{FiniteSemigroup, Transformation};
    use crate::rational::{one, ratio};

    fn idx(sg: &FiniteSemigroup, img: &[usize]) -> usize {
        sg.index_of(&Transformation::from_one_based(img).unwrap()).unwrap()
    }

    fn typical_noise(action: &Action) -> NoiseSpec {
        let sg = action.semigroup();
        NoiseSpec::iid(
            ProbMeasure::from_pairs(
                Carrier::Elements(7),
                &[(idx(sg, &[2, 1, 2]), ratio(1, 2)), (idx(sg, &[3, 3, 1]), ratio(1, 2))],
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn cyclic(n: usize) -> Action {
        Action::regular(FiniteSemigroup::cyclic(n).unwrap()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0, 10, 1).is_err());
        assert!(SimConfig::new(4, 0, 1).is_err());
        assert!(SimConfig::new(4, 1, 1).is_ok());
    }

    #[test]
    fn sampler_thresholds_are_exact() {
        let m = ProbMeasure::new(Carrier::States(3), vec![ratio(1, 4), zero(), ratio(3, 4)]).unwrap();
        let s = Sampler::new(&m);
        assert_eq!(s.thresholds, vec![(1u128 << 62, 0), (1u128 << 64, 2)]);
        let third = ProbMeasure::uniform(Carrier::States(3));
        let s = Sampler::new(&third);
        assert_eq!(s.thresholds[0].0, (1u128 << 64) / 3 + 1);
        assert_eq!(s.thresholds[2].0, 1u128 << 64);
    }

    #[test]
    fn paths_obey_recursions() {
        let act = typical_action();
        let noise = typical_noise(&act);
        let cfg = SimConfig::new(12, 50, 7).unwrap();
        let entry = ProbMeasure::uniform(Carrier::States(3));
        let sg = act.semigroup();
        for s in simulate_paths(&noise, &act, &cfg, Some(&entry)).unwrap() {
            for m in 1..s.products.len() {
                assert_eq!(s.products[m], sg.mul(s.products[m - 1], s.noise[m]));
            }
            let x = s.x_path.unwrap();
            for j in 0..12 {
                assert_eq!(x[j], act.apply(s.noise[j], x[j + 1]));
            }
            assert_eq!(x[0], act.apply(s.products[11], x[12]));
        }
    }

    #[test]
    fn typical_products_absorb() {
        let act = typical_action();
        let cfg = SimConfig::new(64, 200, 3).unwrap();
        for s in simulate_paths(&typical_noise(&act), &act, &cfg, None).unwrap() {
            let last = *s.products.last().unwrap();
            assert!(act.semigroup().transformation(last).unwrap().constant_value().is_some());
            assert!(s.absorbed_at.is_some());
        }
    }

    #[test]
    fn identity_noise_absorbs_at_once() {
        let act = cyclic(3);
        let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(3), 0)).unwrap();
        let cfg = SimConfig::new(5, 3, 0).unwrap();
        for s in simulate_paths(&noise, &act, &cfg, None).unwrap() {
            assert_eq!(s.products, vec![0; 5]);
            assert_eq!(s.absorbed_at, Some(1));
        }
        let st = stopping_time_stats(&noise, &act, &cfg).unwrap();
        assert_eq!(st.exact_mean, Some(one()));
        assert_eq!(st.mean, Some(1.0));
    }

    #[test]
    fn rotation_never_absorbs() {
        let act = cyclic(4);
        let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(4), 1)).unwrap();
        let cfg = SimConfig::new(6, 4, 0).unwrap();
        for s in simulate_paths(&noise, &act, &cfg, None).unwrap() {
            assert_eq!(s.products, vec![1, 2, 3, 0, 1, 2]);
            assert_eq!(s.absorbed_at, None);
        }
        let st = stopping_time_stats(&noise, &act, &cfg).unwrap();
        assert_eq!(st.unstopped_frequency, 1.0);
        assert_eq!(st.exact_never, Some(one()));
        assert_eq!(st.exact_mean, None);
    }

    #[test]
    fn execution_modes_agree() {
        let act = typical_action();
        let noise = typical_noise(&act);
        let cfg = SimConfig::new(16, 2000, 11).unwrap();
        let obs = Observable::State(ProbMeasure::point(Carrier::States(3), 0));
        let a = estimate_law(&noise, &act, &cfg.with_execution(Execution::Sequential), &obs).unwrap();
        let b = estimate_law(&noise, &act, &cfg.with_execution(Execution::Parallel), &obs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trials_replay_in_isolation() {
        let act = typical_action();
        let noise = typical_noise(&act);
        let cfg = SimConfig::new(8, 10, 5).unwrap();
        let all: Vec<PathSample> = simulate_paths(&noise, &act, &cfg, None).unwrap().collect();
        let engine = Engine::new(&noise, &act, cfg).unwrap();
        assert_eq!(engine.sample(7, None), all[7]);
    }

    #[test]
    fn disjoint_deterministic_paths_never_collide() {
        let act = cyclic(2);
        let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(2), 0)).unwrap();
        let cfg = SimConfig::new(8, 100, 1).unwrap();
        let d0 = ProbMeasure::point(Carrier::States(2), 0);
        let d1 = ProbMeasure::point(Carrier::States(2), 1);
        let c = ci_coupling(&noise, &act, &d0, &d1, &cfg).unwrap();
        assert_eq!(c.collisions, 0);
        assert_eq!(c.exact, zero());
    }

    #[test]
    fn csv_format() {
        let rows = vec![CsvRow {
            atom: "state[1]".into(),
            exact: Some(ratio(1, 3)),
            empirical: 0.5,
            stderr: 0.25,
        }];
        assert_eq!(
            write_csv(&rows),
            "atom,exact,empirical,stderr\nstate[1],1/3,5.00000000000e-1,2.50000000000e-1\n"
        );
    }
}
