use serde::Serialize;

/// Three-valued outcome of an inequality or convergence check.
///
/// `Holds` carries a nonnegative margin (or, for series checks, the certified
/// finite bound). `Fails` carries a witness description and a signed margin.
/// `Inconclusive` reports the best certified lower bound and, when one
/// exists, an upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Holds { margin: f64 },
    Fails { margin: f64, witness: String },
    Inconclusive { lower: f64, upper: Option<f64> },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    /// One-line rendering for logs and CSV cells.
    pub fn summary(&self) -> String {
        match self {
            Verdict::Holds { margin } => format!("holds(margin={margin:.6e})"),
            Verdict::Fails { margin, witness } => {
                format!("fails(margin={margin:.6e}, witness={witness})")
            }
            Verdict::Inconclusive { lower, upper } => match upper {
                Some(u) => format!("inconclusive(lower={lower:.6e}, upper={u:.6e})"),
                None => format!("inconclusive(lower={lower:.6e})"),
            },
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.summary())
    }
}
