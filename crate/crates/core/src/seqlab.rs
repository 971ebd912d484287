//! Square-summable sequences with a finite prefix and one geometric tail, and
//! exact oracles for the ℓ¹-ball and the nonnegative part of the ℓ²-ball.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{format, frac, int, serde_rat, Rat};

/// Geometric tail `c·ρ^j`, `j = 0, 1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tail {
    #[serde(with = "serde_rat")]
    pub c: Rat,
    #[serde(with = "serde_rat")]
    pub rho: Rat,
}

/// `x = (p₁, …, p_m, c, cρ, cρ², …)`; coordinates are indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TailSequenceJson", into = "TailSequenceJson")]
pub struct TailSequence {
    prefix: Vec<Rat>,
    tail: Option<Tail>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailSequenceJson {
    #[serde(with = "serde_rat::vec")]
    prefix: Vec<Rat>,
    #[serde(default)]
    tail: Option<Tail>,
}

impl TryFrom<TailSequenceJson> for TailSequence {
    type Error = Error;

    fn try_from(j: TailSequenceJson) -> Result<Self> {
        match j.tail {
            Some(t) => TailSequence::geometric(j.prefix, t.c, t.rho),
            None => Ok(TailSequence::finite(j.prefix)),
        }
    }
}

impl From<TailSequence> for TailSequenceJson {
    fn from(s: TailSequence) -> Self {
        TailSequenceJson { prefix: s.prefix, tail: s.tail }
    }
}

impl TailSequence {
    pub fn finite(prefix: Vec<Rat>) -> Self {
        TailSequence { prefix, tail: None }
    }

    /// Requires `0 < ρ < 1`.
    pub fn geometric(prefix: Vec<Rat>, c: Rat, rho: Rat) -> Result<Self> {
        if rho <= Rat::zero() || rho >= Rat::one() {
            return Err(Error::PreconditionFailed(format!("tail ratio {} is not in (0, 1)", format(&rho))));
        }
        Ok(TailSequence { prefix, tail: Some(Tail { c, rho }) })
    }

    pub fn zero() -> Self {
        TailSequence::finite(vec![])
    }

    /// `e_k`.
    pub fn unit(k: usize) -> Self {
        assert!(k >= 1, "coordinates are indexed from 1");
        let mut prefix = vec![Rat::zero(); k];
        prefix[k - 1] = Rat::one();
        TailSequence::finite(prefix)
    }

    pub fn prefix(&self) -> &[Rat] {
        &self.prefix
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    /// First index carried by the tail.
    pub fn tail_start(&self) -> usize {
        self.prefix.len() + 1
    }

    fn live_tail(&self) -> Option<&Tail> {
        self.tail.as_ref().filter(|t| !t.c.is_zero())
    }

    pub fn coordinate(&self, k: usize) -> Rat {
        assert!(k >= 1, "coordinates are indexed from 1");
        if k <= self.prefix.len() {
            return self.prefix[k - 1].clone();
        }
        match &self.tail {
            None => Rat::zero(),
            Some(t) => &t.c * pow(&t.rho, k - self.tail_start()),
        }
    }

    pub fn neg(&self) -> Self {
        TailSequence {
            prefix: self.prefix.iter().map(|p| -p).collect(),
            tail: self.tail.as_ref().map(|t| Tail { c: -t.c.clone(), rho: t.rho.clone() }),
        }
    }

    /// The same sequence with the prefix extended to length `len`.
    pub fn materialize(&self, len: usize) -> Self {
        if len <= self.prefix.len() {
            return self.clone();
        }
        let prefix = (1..=len).map(|k| self.coordinate(k)).collect();
        let tail = self.tail.as_ref().map(|t| Tail { c: self.coordinate(len + 1), rho: t.rho.clone() });
        TailSequence { prefix, tail }
    }

    pub fn has_finite_support(&self) -> bool {
        self.live_tail().is_none()
    }

    pub fn norm1(&self) -> Rat {
        let head: Rat = self.prefix.iter().map(Signed::abs).sum();
        match self.live_tail() {
            None => head,
            Some(t) => head + t.c.abs() / (Rat::one() - &t.rho),
        }
    }

    pub fn norm2_squared(&self) -> Rat {
        let head: Rat = self.prefix.iter().map(|p| p * p).sum();
        match self.live_tail() {
            None => head,
            Some(t) => head + &t.c * &t.c / (Rat::one() - &t.rho * &t.rho),
        }
    }

    pub fn norm_inf(&self) -> Rat {
        let head = self.prefix.iter().map(Signed::abs).max().unwrap_or_else(Rat::zero);
        match self.live_tail() {
            None => head,
            Some(t) => head.max(t.c.abs()),
        }
    }

    /// `Σ x_k z_k`, aligning the two tails by materializing prefixes.
    pub fn inner(&self, other: &TailSequence) -> Rat {
        let len = self.prefix.len().max(other.prefix.len());
        let (a, b) = (self.materialize(len), other.materialize(len));
        let head: Rat = a.prefix.iter().zip(&b.prefix).map(|(x, y)| x * y).sum();
        match (a.live_tail(), b.live_tail()) {
            (Some(s), Some(t)) => head + &s.c * &t.c / (Rat::one() - &s.rho * &t.rho),
            _ => head,
        }
    }

    /// `(sign x_k)_k` for finitely supported `x`; `None` otherwise, since the
    /// sign vector of an infinitely supported sequence is not square-summable.
    pub fn sign_vector(&self) -> Option<TailSequence> {
        self.has_finite_support().then(|| {
            TailSequence::finite(self.prefix.iter().map(|p| Rat::from_integer(p.numer().signum())).collect())
        })
    }
}

fn pow(r: &Rat, e: usize) -> Rat {
    num_traits::pow(r.clone(), e)
}

/// `x ∈ iri` of the ℓ¹-ball: `‖x‖₁ < 1`.
pub fn ell1ball_iri(x: &TailSequence) -> bool {
    x.norm1() < Rat::one()
}

/// `x ∈ qri` of the ℓ¹-ball: in the ball, and not a finitely supported
/// point of the unit sphere.
pub fn ell1ball_qri(x: &TailSequence) -> bool {
    let n = x.norm1();
    n < Rat::one() || (n == Rat::one() && !x.has_finite_support())
}

/// `z ∈ N(x; ℓ¹-ball)`: `⟨x, z⟩ = ‖z‖∞`.
pub fn ell1ball_normal_test(x: &TailSequence, z: &TailSequence) -> Result<bool> {
    if x.norm1() > Rat::one() {
        return Err(Error::NotMember);
    }
    Ok(x.inner(z) == z.norm_inf())
}

/// Default `ε` for the refutation.
pub fn default_epsilon() -> Rat {
    frac(1, 4)
}

/// Proof that `x̄` is not relatively absorbing in the nonnegative part of the
/// unit ℓ²-ball. With indices `k₁ < k₂ < …` where `x̄_{k_n} ≤ ε/4ⁿ` and
/// `x̃_{k_n} = ε/2ⁿ` (zero elsewhere), every `α > 1` makes coordinate `k_n` of
/// `(1−α)x̃ + αx̄` negative once `2ⁿ > α/(α−1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonnegBallRefutation {
    pub x_bar: TailSequence,
    #[serde(with = "serde_rat")]
    pub epsilon: Rat,
    /// `‖x̃‖₂² = ε²/3`.
    #[serde(with = "serde_rat")]
    pub x_tilde_norm2_squared: Rat,
}

/// A negative coordinate of `(1−α)x̃ + αx̄`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeCoordinate {
    #[serde(with = "serde_rat")]
    pub alpha: Rat,
    pub n: usize,
    pub index: usize,
    #[serde(with = "serde_rat")]
    pub value: Rat,
}

impl NonnegBallRefutation {
    /// `k₁, …, k_count`.
    pub fn indices(&self, count: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(count);
        let mut last = 0;
        for n in 1..=count {
            last = self.next_index(last, n);
            out.push(last);
        }
        out
    }

    /// Smallest `k > after` with `x̄_k ≤ ε/4ⁿ`.
    fn next_index(&self, after: usize, n: usize) -> usize {
        let bound = &self.epsilon / pow(&int(4), n);
        let start = after + 1;
        if let Some(k) = (start..=self.x_bar.prefix.len()).find(|&k| self.x_bar.coordinate(k) <= bound) {
            return k;
        }
        let t = self.x_bar.tail.as_ref().expect("positive tail");
        let mut k = start.max(self.x_bar.tail_start());
        let mut value = self.x_bar.coordinate(k);
        while value > bound {
            value *= &t.rho;
            k += 1;
        }
        k
    }

    pub fn x_tilde_coordinate(&self, k: usize) -> Rat {
        let idx = self.indices_up_to(k);
        match idx.iter().position(|&i| i == k) {
            Some(pos) => &self.epsilon / pow(&int(2), pos + 1),
            None => Rat::zero(),
        }
    }

    fn indices_up_to(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut last = 0;
        for n in 1.. {
            last = self.next_index(last, n);
            if last > k {
                break;
            }
            out.push(last);
        }
        out
    }

    /// Smallest `n ≥ 1` with `2ⁿ > α/(α−1)`.
    pub fn threshold(&self, alpha: &Rat) -> Result<usize> {
        if *alpha <= Rat::one() {
            return Err(Error::PreconditionFailed("alpha must exceed 1".into()));
        }
        let ratio = alpha / (alpha - Rat::one());
        let mut n = 1;
        while pow(&int(2), n) <= ratio {
            n += 1;
        }
        Ok(n)
    }

    /// Evaluates coordinate `k_{n*}` of `(1−α)x̃ + αx̄` exactly and checks it
    /// is negative.
    pub fn witness(&self, alpha: &Rat) -> Result<NegativeCoordinate> {
        let n = self.threshold(alpha)?;
        let index = self.indices(n)[n - 1];
        let x_tilde = &self.epsilon / pow(&int(2), n);
        let value = (Rat::one() - alpha) * x_tilde + alpha * self.x_bar.coordinate(index);
        if value >= Rat::zero() {
            return Err(Error::OracleDisagreement(format!(
                "coordinate {index} of the extrapolated point is {} at alpha {}",
                format(&value),
                format(alpha)
            )));
        }
        Ok(NegativeCoordinate { alpha: alpha.clone(), n, index, value })
    }
}

/// Builds the refutation for `x̄`, or rejects it with the argument that
/// already excludes it from `iri`: a unit-norm point, or a zero coordinate
/// `k` with separator `e_k`.
pub fn nonneg_ball_iri_refutation(x_bar: &TailSequence, epsilon: &Rat) -> Result<NonnegBallRefutation> {
    if *epsilon <= Rat::zero() || *epsilon >= Rat::one() {
        return Err(Error::PreconditionFailed("epsilon must lie in (0, 1)".into()));
    }
    let negative = x_bar.prefix.iter().any(|p| *p < Rat::zero())
        || x_bar.tail.as_ref().is_some_and(|t| t.c < Rat::zero());
    let n2 = x_bar.norm2_squared();
    if negative || n2 > Rat::one() {
        return Err(Error::NotMember);
    }
    if n2 == Rat::one() {
        return Err(Error::PreconditionFailed(
            "norm argument: a point with unit norm is a positive multiple of no larger point of the set".into(),
        ));
    }
    let zero_at = x_bar.prefix.iter().position(Zero::is_zero).map(|i| i + 1).or_else(|| {
        x_bar.live_tail().is_none().then(|| x_bar.tail_start())
    });
    if let Some(k) = zero_at {
        return Err(Error::PreconditionFailed(format!(
            "coordinate {k} is zero: separated from the set by v = e_{k}"
        )));
    }
    let eps2 = epsilon * epsilon;
    Ok(NonnegBallRefutation {
        x_bar: x_bar.clone(),
        epsilon: epsilon.clone(),
        x_tilde_norm2_squared: eps2 / int(3),
    })
}
