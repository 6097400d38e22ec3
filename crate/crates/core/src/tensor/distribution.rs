//! Fiducial outcome statistics `P(a1..an | x1..xn)` and the no-signalling
//! check.

use super::BlochTensor;
use crate::{Error, Result};
use serde::Serialize;

/// `P(a | x)` for settings `xk ∈ {1,2,3}` (the three Pauli measurements) and
/// outcomes `ak ∈ {+1, -1}`. Entries may be negative for non-quantum states.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n: usize,
    // settings-major: values[settings_flat * 2^n + outcome_flat]
    values: Vec<f64>,
}

fn settings_flat(settings: &[u8]) -> usize {
    settings.iter().fold(0, |acc, &x| {
        assert!((1..=3).contains(&x), "setting must be 1..=3, got {x}");
        acc * 3 + (x - 1) as usize
    })
}

fn outcome_flat(outcomes: &[i8]) -> usize {
    outcomes.iter().fold(0, |acc, &a| {
        assert!(a == 1 || a == -1, "outcome must be +1 or -1, got {a}");
        acc * 2 + usize::from(a == -1)
    })
}

impl OutcomeDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, settings: &[u8], outcomes: &[i8]) -> f64 {
        assert_eq!(settings.len(), self.n);
        assert_eq!(outcomes.len(), self.n);
        self.values[settings_flat(settings) * (1 << self.n) + outcome_flat(outcomes)]
    }

    /// Sum over outcomes for each settings tuple, in settings order.
    pub fn slice_sums(&self) -> Vec<f64> {
        self.values.chunks(1 << self.n).map(|c| c.iter().sum()).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `P(a|x) = 2^-n Σ_{S ⊆ [n]} (Π_{k∈S} ak) r[α(S,x)]` where `α(S,x)k = xk` for
/// `k ∈ S` and 0 otherwise. Requires no normalization.
fn raw_distribution(r: &BlochTensor) -> OutcomeDistribution {
    let n = r.n();
    let outcomes = 1usize << n;
    let settings_count = 3usize.pow(n as u32);
    let norm = 1.0 / outcomes as f64;
    let mut values = vec![0.0; settings_count * outcomes];
    for s_flat in 0..settings_count {
        let settings: Vec<u8> = super::pauli::multi_index(s_flat, n, 3).iter().map(|d| d + 1).collect();
        for o_flat in 0..outcomes {
            let mut p = 0.0;
            for subset in 0..outcomes {
                let mut sign = 1.0;
                let mut alpha = 0usize;
                for (k, &setting) in settings.iter().enumerate() {
                    let bit = n - 1 - k;
                    let digit = if subset >> bit & 1 == 1 {
                        if o_flat >> bit & 1 == 1 {
                            sign = -sign;
                        }
                        setting as usize
                    } else {
                        0
                    };
                    alpha = alpha * 4 + digit;
                }
                p += sign * r.coeffs()[alpha];
            }
            values[s_flat * outcomes + o_flat] = p * norm;
        }
    }
    OutcomeDistribution { n, values }
}

pub fn distribution_from_state(r: &BlochTensor) -> Result<OutcomeDistribution> {
    if !r.is_normalized(crate::DEFAULT_TOLERANCE) {
        return Err(Error::Unnormalized(r.leading()));
    }
    Ok(raw_distribution(r))
}

#[derive(Debug, Clone, Serialize)]
pub struct NoSignallingWitness {
    pub qubit: usize,
    /// Settings of all qubits, the varied qubit holding its first setting.
    pub settings: Vec<u8>,
    pub other_setting: u8,
    pub outcomes: Vec<i8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoSignallingReport {
    pub n: usize,
    pub leading_coefficient: f64,
    pub normalized: bool,
    /// Largest change of any single-qubit-summed marginal under a change of
    /// that qubit's setting.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub worst: Option<NoSignallingWitness>,
}

/// For each qubit `k`, `Σ_{ak} P(a|x)` must not depend on `xk`.
pub fn check_no_signalling(r: &BlochTensor, tol: f64) -> NoSignallingReport {
    let n = r.n();
    let dist = raw_distribution(r);
    let mut max_dev = 0.0f64;
    let mut worst = None;
    for k in 0..n {
        for s_flat in 0..3usize.pow(n as u32) {
            let mut settings: Vec<u8> = super::pauli::multi_index(s_flat, n, 3).iter().map(|d| d + 1).collect();
            if settings[k] != 1 {
                continue;
            }
            for o_flat in 0..1usize << n {
                let mut outcomes: Vec<i8> = (0..n)
                    .map(|j| if o_flat >> (n - 1 - j) & 1 == 1 { -1 } else { 1 })
                    .collect();
                if outcomes[k] != 1 {
                    continue;
                }
                let marginal = |settings: &mut Vec<u8>, outcomes: &mut Vec<i8>, x: u8| {
                    settings[k] = x;
                    outcomes[k] = 1;
                    let plus = dist.get(settings, outcomes);
                    outcomes[k] = -1;
                    let minus = dist.get(settings, outcomes);
                    outcomes[k] = 1;
                    plus + minus
                };
                let base = marginal(&mut settings, &mut outcomes, 1);
                for x in 2..=3u8 {
                    let dev = (marginal(&mut settings, &mut outcomes, x) - base).abs();
                    if dev > max_dev {
                        max_dev = dev;
                        settings[k] = 1;
                        worst = Some(NoSignallingWitness {
                            qubit: k,
                            settings: settings.clone(),
                            other_setting: x,
                            outcomes: outcomes.clone(),
                        });
                    }
                }
                settings[k] = 1;
            }
        }
    }
    let normalized = r.is_normalized(tol);
    NoSignallingReport {
        n,
        leading_coefficient: r.leading(),
        normalized,
        max_deviation: max_dev,
        tolerance: tol,
        passed: normalized && max_dev <= tol,
        worst: if max_dev > tol { worst } else { None },
    }
}
