use serde::Serialize;

/// Outcome of a hard inequality `lhs <= rhs (1 + tolerance)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckVerdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub tolerance: f64,
}

impl CheckVerdict {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let ratio = if rhs != 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        CheckVerdict {
            name: name.into(),
            lhs,
            rhs,
            ratio,
            pass: lhs.is_finite() && rhs.is_finite() && lhs <= rhs * (1.0 + tolerance),
            tolerance,
        }
    }
}

/// A constant-free ratio whose boundedness, not value, is the claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredRatio {
    pub name: String,
    pub value: f64,
}

impl MeasuredRatio {
    pub fn new(name: impl Into<String>, numerator: f64, denominator: f64) -> Self {
        MeasuredRatio {
            name: name.into(),
            value: numerator / denominator,
        }
    }
}
