//! Truth-value operations on the unit interval: residuated implications for
//! the derivation operators and s-norms for merging weights.

use serde::{Deserialize, Serialize};

/// Residuated implication used inside the derivation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Implication {
    /// `a -> b = 1` if `a <= b`, else `b`.
    #[default]
    Godel,
    /// `a -> b = min(1, 1 - a + b)`.
    Lukasiewicz,
    /// `a -> b = 1` if `a <= b`, else `b / a`.
    Goguen,
}

impl Implication {
    pub const ALL: [Implication; 3] = [
        Implication::Godel,
        Implication::Lukasiewicz,
        Implication::Goguen,
    ];

    pub fn apply(self, a: f64, b: f64) -> f64 {
        if a <= b {
            return 1.0;
        }
        match self {
            Implication::Godel => b,
            Implication::Lukasiewicz => canonical(1.0 - a + b),
            Implication::Goguen => canonical(b / a),
        }
    }

    /// The t-norm this implication is the residuum of.
    pub fn conjunction(self, a: f64, b: f64) -> f64 {
        match self {
            Implication::Godel => a.min(b),
            Implication::Lukasiewicz => canonical((a + b - 1.0).max(0.0)),
            Implication::Goguen => canonical(a * b),
        }
    }

    /// Smallest superset of `scale` (plus 0 and 1) closed under this
    /// implication, or `None` once it exceeds `limit` values.
    ///
    /// The derivation operators only take residua and infima, so over a
    /// closed scale every closure of a scale-valued set stays on the scale.
    ///
    /// Enumeration over a scale that is not closed this way still yields
    /// closed concepts, but the set need not be closed under meet and join.
    /// Gödel never needs this: every scale is already closed.
    pub fn close_scale(self, scale: &[f64], limit: usize) -> Option<Vec<f64>> {
        let mut values: Vec<f64> = scale.iter().copied().chain([0.0, 1.0]).map(canonical).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        loop {
            let mut next = values.clone();
            for &a in &values {
                for &b in &values {
                    next.push(self.apply(a, b));
                }
            }
            next.sort_by(f64::total_cmp);
            next.dedup();
            if next.len() > limit {
                return None;
            }
            if next.len() == values.len() {
                return Some(values);
            }
            values = next;
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Implication::Godel => "godel",
            Implication::Lukasiewicz => "lukasiewicz",
            Implication::Goguen => "goguen",
        }
    }
}

impl std::str::FromStr for Implication {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "godel" | "gödel" | "goedel" => Ok(Implication::Godel),
            "lukasiewicz" | "łukasiewicz" => Ok(Implication::Lukasiewicz),
            "goguen" | "product" => Ok(Implication::Goguen),
            other => Err(format!("unknown implication {other:?}")),
        }
    }
}

/// Fuzzy disjunction used to merge child weights into a parent weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SNorm {
    #[default]
    Max,
    ProbabilisticSum,
    BoundedSum,
}

impl SNorm {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            SNorm::Max => a.max(b),
            SNorm::ProbabilisticSum => a + b - a * b,
            SNorm::BoundedSum => (a + b).min(1.0),
        }
    }

    /// Folds the s-norm over `values`; the empty merge is 0.
    pub fn merge<I: IntoIterator<Item = f64>>(self, values: I) -> f64 {
        values.into_iter().fold(0.0, |acc, v| self.apply(acc, v))
    }
}

impl std::str::FromStr for SNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "max" => Ok(SNorm::Max),
            "probabilistic_sum" | "prob_sum" => Ok(SNorm::ProbabilisticSum),
            "bounded_sum" => Ok(SNorm::BoundedSum),
            other => Err(format!("unknown s-norm {other:?}")),
        }
    }
}

const MAX_DENOMINATOR: i64 = 100_000;
const RATIONAL_TOLERANCE: f64 = 1e-13;
const GRID: f64 = 1e12;

/// Canonical representative of a computed degree.
///
/// Arithmetic residua accumulate rounding noise, which would make equal
/// closures compare unequal. Values within 1e-13 of a rational with a small
/// denominator are replaced by that rational; everything else is rounded to
/// a 1e-12 grid.
pub fn canonical(v: f64) -> f64 {
    let v = v.clamp(0.0, 1.0);
    match nearest_rational(v) {
        Some(r) => r,
        None => (v * GRID).round() / GRID,
    }
}

fn nearest_rational(x: f64) -> Option<f64> {
    let (mut h_prev, mut h) = (0i64, 1i64);
    let (mut k_prev, mut k) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i64;
        let h_next = ai * h + h_prev;
        let k_next = ai * k + k_prev;
        if k_next > MAX_DENOMINATOR {
            return None;
        }
        let approx = h_next as f64 / k_next as f64;
        if (approx - x).abs() <= RATIONAL_TOLERANCE {
            return Some(approx);
        }
        let frac = r - a;
        if frac <= 0.0 {
            return None;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        r = 1.0 / frac;
    }
    None
}
