//! Character moduli of noise on a cyclic group `ℤ/n` and the resulting
//! trichotomy.

use num::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{Carrier, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trichotomy {
    /// Only the trivial character survives: no strong solution, the
    /// uniform solution is the only one.
    C1,
    /// Every character survives: strong solutions exist.
    C2,
    /// A proper non-trivial subgroup of characters survives.
    C3,
}

impl Trichotomy {
    pub fn name(self) -> &'static str {
        match self {
            Trichotomy::C1 => "C1",
            Trichotomy::C2 => "C2",
            Trichotomy::C3 => "C3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourierReport {
    pub modulus: usize,
    /// `pi[p]` is 1 when the character `p` keeps modulus one along the tail.
    pub pi: Vec<u8>,
    pub z_mu: Vec<usize>,
    pub p_mu: usize,
    pub h_mu: Vec<usize>,
    pub trichotomy: Trichotomy,
}

/// `|μ̂(p)| = 1` exactly, i.e. `p(x - x₀) ≡ 0 (mod n)` across the support.
fn unit_modulus(support: &[usize], p: usize, n: usize) -> bool {
    let x0 = support[0];
    support.iter().all(|&x| (p * ((x + n - x0) % n)) % n == 0)
}

/// Elements of `ℤ/n` are identified with their residues, as produced by
/// [`FiniteSemigroup::cyclic`](crate::algebra::FiniteSemigroup::cyclic).
pub fn fourier_trichotomy(n: usize, noise: &NoiseSpec) -> Result<FourierReport> {
    if n == 0 || noise.carrier() != Carrier::Elements(n) {
        return Err(Error::Unsupported("character analysis needs noise on a cyclic group".into()));
    }
    let support = noise.tail().support();
    let pi: Vec<u8> = (0..n).map(|p| unit_modulus(&support, p, n) as u8).collect();
    let z_mu: Vec<usize> = (0..n).filter(|&p| pi[p] == 1).collect();
    for &a in &z_mu {
        for &b in &z_mu {
            if pi[(a + b) % n] != 1 {
                return Err(Error::Inconsistency("surviving characters are not a subgroup".into()));
            }
        }
    }
    let generator = z_mu.iter().copied().find(|&p| p > 0).unwrap_or(n);
    let p_mu = if generator == n { 0 } else { generator };
    let h_mu: Vec<usize> = (0..n).filter(|&g| z_mu.iter().all(|&p| (p * g) % n == 0)).collect();
    debug_assert!(n % generator == 0 && h_mu.len() * z_mu.len() == n);
    let trichotomy = match p_mu {
        0 => Trichotomy::C1,
        1 => Trichotomy::C2,
        _ => Trichotomy::C3,
    };
    Ok(FourierReport {
        modulus: n,
        pi,
        z_mu,
        p_mu,
        h_mu,
        trichotomy,
    })
}

/// Greatest common divisor of `n` and the support differences; `z_mu` is
/// generated by `n / gcd`.
pub fn support_gcd(n: usize, support: &[usize]) -> usize {
    let x0 = support[0];
    support.iter().fold(n, |g, &x| g.gcd(&((x + n - x0) % n)))
}
