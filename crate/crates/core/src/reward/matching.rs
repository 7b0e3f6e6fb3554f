//! Persona value matching with a repetition discount.
//!
//! Each turn is matched to the persona sentence whose value vector has the
//! largest dot product with it. Persona `i` matched by `k` turns gets
//! exponent `γ_i = 1 + k`, and every turn contributes
//! `sign(r)·|r|^(sign(r)·γ)` to a sum that is finally divided by the persona
//! size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{dot, ValueVector};

/// Norm tolerance for inputs that must be unit or zero vectors.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Best dot product per turn.
    pub r: Vec<f64>,
    /// 1-based persona index per turn; `None` when no persona beat -1.
    pub m: Vec<Option<usize>>,
    /// Exponent per persona, in persona order.
    pub gamma: Vec<u32>,
    /// Exponent of the bucket collecting unmatched turns.
    pub gamma_none: u32,
    pub terms: Vec<f64>,
    /// Set when `clamp_terms` bounded at least one term.
    pub clamped: Vec<bool>,
    pub reward: f64,
}

impl MatchResult {
    /// The exponent used for turn `t` (0-based).
    pub fn gamma_for_turn(&self, t: usize) -> u32 {
        match self.m[t] {
            Some(i) => self.gamma[i - 1],
            None => self.gamma_none,
        }
    }

    pub fn turns(&self) -> usize {
        self.r.len()
    }
}

fn check_normalized(kind: &str, vs: &[ValueVector]) -> Result<()> {
    for (i, v) in vs.iter().enumerate() {
        if !v.is_normalized(NORM_TOLERANCE) {
            return Err(Error::InvalidInput(format!(
                "{kind} vector {} has norm {} (expected 1 or 0)",
                i + 1,
                v.norm()
            )));
        }
    }
    Ok(())
}

/// `sign(r)·|r|^(sign(r)·γ)`, with a zero sign giving exactly 0.
pub fn term(r: f64, gamma: u32) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let s = r.signum();
    s * r.abs().powf(s * gamma as f64)
}

pub fn match_values(persona: &[ValueVector], utterances: &[ValueVector], clamp_terms: bool) -> Result<MatchResult> {
    if persona.is_empty() {
        return Err(Error::InvalidInput("persona must contain at least one vector".into()));
    }
    if utterances.is_empty() {
        return Err(Error::InvalidInput("need at least one utterance".into()));
    }
    check_normalized("persona", persona)?;
    check_normalized("utterance", utterances)?;

    let mut r = Vec::with_capacity(utterances.len());
    let mut m = Vec::with_capacity(utterances.len());
    for u in utterances {
        let mut best = -1.0;
        let mut idx = None;
        for (i, p) in persona.iter().enumerate() {
            // Rounding can push a unit-vector dot product just past ±1.
            let d = dot(p, u).clamp(-1.0, 1.0);
            if d > best {
                best = d;
                idx = Some(i + 1);
            }
        }
        r.push(best);
        m.push(idx);
    }

    let mut gamma = vec![1u32; persona.len()];
    let mut gamma_none = 1u32;
    for mt in &m {
        match mt {
            Some(i) => gamma[i - 1] += 1,
            None => gamma_none += 1,
        }
    }

    let mut terms = Vec::with_capacity(r.len());
    let mut clamped = Vec::with_capacity(r.len());
    let mut sum = 0.0;
    for (t, (&rt, mt)) in r.iter().zip(&m).enumerate() {
        let g = match mt {
            Some(i) => gamma[i - 1],
            None => gamma_none,
        };
        let raw = term(rt, g);
        let value = if clamp_terms {
            raw.clamp(-1.0, 1.0)
        } else if !raw.is_finite() {
            return Err(Error::Overflow { turn: t + 1, r: rt });
        } else {
            raw
        };
        clamped.push(value != raw);
        terms.push(value);
        sum += value;
    }
    Ok(MatchResult {
        r,
        m,
        gamma,
        gamma_none,
        terms,
        clamped,
        reward: sum / persona.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ValueDimension::{Power, Security};

    fn mixed() -> ValueVector {
        let mut c = [0.0; 10];
        c[Security.index()] = 0.6;
        c[Power.index()] = 0.8;
        ValueVector::new(c).unwrap()
    }

    #[test]
    fn perfect_single_match() {
        let e = ValueVector::axis(Security);
        let res = match_values(&[e], &[e], false).unwrap();
        assert_eq!(res.r, [1.0]);
        assert_eq!(res.m, [Some(1)]);
        assert_eq!(res.gamma, [2]);
        assert_eq!(res.reward, 1.0);
    }

    #[test]
    fn orthogonal_is_zero() {
        let res = match_values(&[ValueVector::axis(Security)], &[ValueVector::axis(Power)], false).unwrap();
        assert_eq!(res.r, [0.0]);
        assert_eq!(res.terms, [0.0]);
        assert_eq!(res.reward, 0.0);
    }

    #[test]
    fn two_by_two() {
        let p = [ValueVector::axis(Security), ValueVector::axis(Power)];
        let u = [mixed(), ValueVector::axis(Power)];
        let res = match_values(&p, &u, false).unwrap();
        assert_eq!(res.m, [Some(2), Some(2)]);
        assert_eq!(res.gamma, [1, 3]);
        assert!((res.terms[0] - 0.512).abs() < 1e-12);
        assert_eq!(res.terms[1], 1.0);
        assert!((res.reward - 0.756).abs() < 1e-12);
    }

    #[test]
    fn opposite_is_minus_one() {
        let e = ValueVector::axis(Security);
        let res = match_values(&[e], &[e.negate()], false).unwrap();
        assert_eq!(res.r, [-1.0]);
        assert_eq!(res.m, [None]);
        assert_eq!(res.gamma_none, 2);
        assert_eq!(res.gamma, [1]);
        assert_eq!(res.terms, [-1.0]);
        assert_eq!(res.reward, -1.0);
    }

    #[test]
    fn first_index_wins_ties() {
        let e = ValueVector::axis(Security);
        let res = match_values(&[e, e], &[e], false).unwrap();
        assert_eq!(res.m, [Some(1)]);
        assert_eq!(res.gamma, [2, 1]);
        // R is still divided by the persona size
        assert_eq!(res.reward, 0.5);
    }

    #[test]
    fn negative_terms_blow_up_unless_clamped() {
        let mut c = [0.0; 10];
        c[Security.index()] = -1e-200;
        c[Power.index()] = 1.0;
        let u = ValueVector::new(c).unwrap();
        let p = [ValueVector::axis(Security)];
        assert!(matches!(match_values(&p, &[u], false), Err(Error::Overflow { turn: 1, .. })));
        let res = match_values(&p, &[u], true).unwrap();
        assert_eq!(res.terms, [-1.0]);
        assert_eq!(res.clamped, [true]);
    }

    #[test]
    fn rejects_unnormalized_and_empty() {
        let half = ValueVector::axis(Security).scale(0.5).unwrap();
        assert!(match_values(&[half], &[ValueVector::ZERO], false).is_err());
        assert!(match_values(&[], &[ValueVector::ZERO], false).is_err());
        assert!(match_values(&[ValueVector::ZERO], &[], false).is_err());
    }

    #[test]
    fn repetition_discount() {
        let p = [ValueVector::axis(Security)];
        let per_term: Vec<f64> = (1..6)
            .map(|k| {
                let u = vec![mixed(); k];
                match_values(&p, &u, false).unwrap().terms[0]
            })
            .collect();
        assert!(per_term.windows(2).all(|w| w[1] < w[0]), "{per_term:?}");
    }
}
