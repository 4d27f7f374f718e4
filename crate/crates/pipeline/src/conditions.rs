use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The ablation conditions compared in the experiments, plus a
/// parameterized escape hatch. Two-step generation always plans first
/// (that is its chain of thought); one-step may or may not request one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Condition {
    Baseline0ShotNocot,
    Onestep0Shot,
    Twostep0Shot,
    Onestep5Shot,
    Onestep10Shot,
    Twostep5Shot,
    Twostep10Shot,
    Custom { two_step: bool, shots: u8, cot: bool },
}

impl Condition {
    pub const NAMED: [Condition; 7] = [
        Condition::Baseline0ShotNocot,
        Condition::Onestep0Shot,
        Condition::Twostep0Shot,
        Condition::Onestep5Shot,
        Condition::Onestep10Shot,
        Condition::Twostep5Shot,
        Condition::Twostep10Shot,
    ];

    pub fn two_step(&self) -> bool {
        match self {
            Condition::Twostep0Shot | Condition::Twostep5Shot | Condition::Twostep10Shot => true,
            Condition::Custom { two_step, .. } => *two_step,
            _ => false,
        }
    }

    pub fn shots(&self) -> usize {
        match self {
            Condition::Baseline0ShotNocot | Condition::Onestep0Shot | Condition::Twostep0Shot => 0,
            Condition::Onestep5Shot | Condition::Twostep5Shot => 5,
            Condition::Onestep10Shot | Condition::Twostep10Shot => 10,
            Condition::Custom { shots, .. } => *shots as usize,
        }
    }

    /// Whether the one-step prompt asks for a plan; irrelevant for
    /// two-step conditions (the plan is its own call).
    pub fn cot(&self) -> bool {
        match self {
            Condition::Baseline0ShotNocot => false,
            Condition::Custom { cot, .. } => *cot,
            _ => true,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Condition::Baseline0ShotNocot => "baseline_0shot_nocot".into(),
            Condition::Onestep0Shot => "onestep_0shot".into(),
            Condition::Twostep0Shot => "twostep_0shot".into(),
            Condition::Onestep5Shot => "onestep_5shot".into(),
            Condition::Onestep10Shot => "onestep_10shot".into(),
            Condition::Twostep5Shot => "twostep_5shot".into(),
            Condition::Twostep10Shot => "twostep_10shot".into(),
            Condition::Custom { two_step, shots, cot } => format!(
                "custom_{}step_{}shot_{}",
                if *two_step { 2 } else { 1 },
                shots,
                if *cot { "cot" } else { "nocot" }
            ),
        }
    }

    pub fn valid_names() -> Vec<String> {
        Self::NAMED.iter().map(|c| c.name()).collect()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        for named in Self::NAMED {
            if named.name() == s {
                return Ok(named);
            }
        }
        if let Some(rest) = s.strip_prefix("custom_") {
            // custom_<1|2>step_<N>shot_<cot|nocot>
            let parts: Vec<&str> = rest.split('_').collect();
            if parts.len() == 3 {
                let two_step = match parts[0] {
                    "1step" => Some(false),
                    "2step" => Some(true),
                    _ => None,
                };
                let shots = parts[1].strip_suffix("shot").and_then(|n| n.parse::<u8>().ok());
                let cot = match parts[2] {
                    "cot" => Some(true),
                    "nocot" => Some(false),
                    _ => None,
                };
                if let (Some(two_step), Some(shots), Some(cot)) = (two_step, shots, cot) {
                    return Ok(Condition::Custom { two_step, shots, cot });
                }
            }
        }
        Err(format!(
            "unknown condition {s:?}; valid: {} (or custom_<1|2>step_<N>shot_<cot|nocot>)",
            Self::valid_names().join(", ")
        ))
    }
}

impl TryFrom<String> for Condition {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Condition> for String {
    fn from(c: Condition) -> String {
        c.name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_conditions_round_trip() {
        for c in Condition::NAMED {
            assert_eq!(c.name().parse::<Condition>().unwrap(), c);
        }
    }

    #[test]
    fn custom_round_trip() {
        let c = Condition::Custom { two_step: true, shots: 3, cot: true };
        assert_eq!(c.name(), "custom_2step_3shot_cot");
        assert_eq!(c.name().parse::<Condition>().unwrap(), c);
    }

    #[test]
    fn unknown_names_list_valid_ones() {
        let err = "threstep_9shot".parse::<Condition>().unwrap_err();
        assert!(err.contains("twostep_10shot"));
    }

    #[test]
    fn condition_parameters() {
        assert!(!Condition::Baseline0ShotNocot.cot());
        assert!(!Condition::Baseline0ShotNocot.two_step());
        assert_eq!(Condition::Onestep5Shot.shots(), 5);
        assert!(Condition::Onestep5Shot.cot());
        assert!(Condition::Twostep10Shot.two_step());
        assert_eq!(Condition::Twostep10Shot.shots(), 10);
    }
}
