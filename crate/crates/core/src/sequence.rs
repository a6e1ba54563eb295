//! Finitely supported complex sequences over `ℤ` and the weighted norms
//! `‖ξ‖_{p,t} = (Σ (⟨j⟩^t |ξ_j|)^p)^{1/p}`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::{bracket, bracket_pow, Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedSequence {
    entries: BTreeMap<i64, Complex64>,
}

impl WeightedSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collects entries, dropping exact zeros. Later duplicates overwrite
    /// earlier ones.
    pub fn from_entries(entries: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut out = Self::new();
        for (k, v) in entries {
            out.set(k, v);
        }
        out
    }

    /// Unit mass at `k`.
    pub fn delta(k: i64) -> Self {
        Self::from_entries([(k, Complex64::new(1.0, 0.0))])
    }

    pub fn set(&mut self, k: i64, v: Complex64) {
        if v == Complex64::new(0.0, 0.0) {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, v);
        }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.entries.get(&k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|k|` in the support.
    pub fn support_radius(&self) -> Option<u64> {
        self.entries.keys().map(|k| k.unsigned_abs()).max()
    }

    pub fn scale(&self, w: Complex64) -> Self {
        Self::from_entries(self.iter().map(|(k, v)| (k, v * w)))
    }

    /// Restriction to `|k| ≤ radius`.
    pub fn truncate(&self, radius: u64) -> Self {
        Self::from_entries(self.iter().filter(|(k, _)| k.unsigned_abs() <= radius))
    }

    pub fn weighted_norm(&self, spec: NormSpec) -> f64 {
        let terms = self.iter().map(|(k, v)| bracket(k).powf(spec.t) * v.norm());
        if spec.p.is_infinite() {
            return terms.fold(0.0, f64::max);
        }
        let terms: Vec<f64> = terms.collect();
        let top = terms.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        let sum: f64 = terms.iter().map(|x| (x / top).powf(spec.p)).sum();
        top * sum.powf(1.0 / spec.p)
    }

    /// `ξ_z = (⟨k⟩^{-β(s-z)} ξ_k)`.
    pub fn dual_deform(&self, s: f64, beta: f64, z: Complex64) -> Self {
        let w = -(Complex64::new(s, 0.0) - z) * beta;
        if w == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        Self::from_entries(self.iter().map(|(k, v)| (k, v * bracket_pow(k, w))))
    }

    /// Bilinear `ℓ²` pairing `Σ η_k ξ_k`.
    pub fn pair(&self, other: &WeightedSequence) -> Complex64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().map(|(k, v)| v * large.get(k)).sum()
    }

    /// The Hölder extremal `ξ` with `‖ξ‖_{q,-t} = 1` and
    /// `⟨η, ξ⟩ = ‖η‖_{p,t}`.
    pub fn extremal_dual(&self, spec: NormSpec) -> Result<Self> {
        if self.is_empty() {
            return Err(Error::invalid("extremal dual of the zero sequence"));
        }
        if !(spec.p > 1.0 && spec.p.is_finite()) {
            return Err(Error::invalid("extremal dual needs 1 < p < ∞"));
        }
        let norm = self.weighted_norm(spec);
        let p = spec.p;
        Ok(Self::from_entries(self.iter().map(|(k, v)| {
            let m = v.norm();
            let sign = v.conj() / m;
            let w = bracket(k).powf(spec.t * p) * (m / norm).powf(p - 1.0);
            (k, sign * w)
        })))
    }
}

/// `(p, t)` for `‖·‖_{p,t}`; `p = ∞` is allowed for dual norms only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub p: f64,
    pub t: f64,
}

impl NormSpec {
    pub fn new(p: f64, t: f64) -> Result<Self> {
        if !(p >= 1.0) || !t.is_finite() {
            return Err(Error::invalid(alloc::format!("need p >= 1 and finite t, got p = {p}, t = {t}")));
        }
        Ok(NormSpec { p, t })
    }

    /// Conjugate exponent with `1/p + 1/q = 1`.
    pub fn q_conj(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    /// `(q, -t)`, the norm on the dual space.
    pub fn dual(&self) -> NormSpec {
        NormSpec {
            p: self.q_conj(),
            t: -self.t,
        }
    }
}

pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(p: f64, t: f64) -> NormSpec {
        NormSpec::new(p, t).unwrap()
    }

    fn random_seq(rng: &mut ChaCha8Rng, radius: i64) -> WeightedSequence {
        WeightedSequence::from_entries((-radius..=radius).map(|k| {
            (k, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        }))
    }

    #[test]
    fn norm_examples() {
        for &(p, t) in &[(1.0, 0.0), (2.0, 3.0), (3.5, -1.0)] {
            assert_eq!(WeightedSequence::delta(0).weighted_norm(spec(p, t)), 1.0);
        }
        assert_relative_eq!(WeightedSequence::delta(1).weighted_norm(spec(2.0, 2.0)), 4.0);
        let ones = WeightedSequence::from_entries((-1..=1).map(|k| (k, c(1.0, 0.0))));
        assert_relative_eq!(ones.weighted_norm(spec(1.0, 0.0)), 3.0);
        assert_relative_eq!(ones.weighted_norm(spec(f64::INFINITY, 1.0)), 2.0);
        assert_eq!(WeightedSequence::new().weighted_norm(spec(2.0, 1.0)), 0.0);
    }

    #[test]
    fn zeros_are_absent() {
        let s = WeightedSequence::from_entries([(1, c(0.0, 0.0)), (2, c(1.0, 0.0))]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn dual_deform_examples() {
        let d = WeightedSequence::delta(1);
        assert_eq!(d.dual_deform(1.0, 1.0, c(1.0, 0.0)), d);
        assert_relative_eq!(d.dual_deform(1.0, 1.0, c(0.0, 0.0)).get(1).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let a = WeightedSequence::delta(1).scale(c(3.0, 0.0));
        assert_eq!(a.pair(&WeightedSequence::delta(1)), c(3.0, 0.0));
        assert_eq!(a.pair(&WeightedSequence::delta(2)), c(0.0, 0.0));
    }

    #[test]
    fn extremal_examples() {
        let a = WeightedSequence::delta(1).scale(c(3.0, 0.0));
        let x = a.extremal_dual(spec(2.0, 0.0)).unwrap();
        assert_relative_eq!(x.get(1).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(a.pair(&x).re, 3.0, epsilon = 1e-15);

        let two = WeightedSequence::from_entries([(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        let x = two.extremal_dual(spec(2.0, 0.0)).unwrap();
        assert_relative_eq!(x.get(0).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(x.get(1).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(two.pair(&x).re, 2.0f64.sqrt(), epsilon = 1e-15);

        assert!(WeightedSequence::new().extremal_dual(spec(2.0, 0.0)).is_err());
        assert!(two.extremal_dual(spec(1.0, 0.0)).is_err());
    }

    #[test]
    fn extremal_dual_beats_random_duals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta = random_seq(&mut rng, 4);
        let sp = spec(3.0, 1.5);
        let x = eta.extremal_dual(sp).unwrap();
        let norm = eta.weighted_norm(sp);
        let paired = eta.pair(&x);
        assert_relative_eq!(paired.re, norm, max_relative = 1e-12);
        assert!(paired.im.abs() <= 1e-12 * norm);
        assert_relative_eq!(x.weighted_norm(sp.dual()), 1.0, max_relative = 1e-12);
        // brute force: no random unit-dual-norm ξ does better
        for _ in 0..100_000 {
            let xi = random_seq(&mut rng, 4);
            let xi = xi.scale(c(1.0 / xi.weighted_norm(sp.dual()), 0.0));
            assert!(eta.pair(&xi).norm() <= norm * (1.0 + 1e-12));
        }
    }
}
