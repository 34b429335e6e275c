//! Behavior mode configuration: how strictly the agent adheres to its
//! authorization and obligation policies, which ignore actions are forbidden
//! outright, and which are merely cost-minimized.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::action::WaiverFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuthMode {
    Paranoid,
    Cautious,
    Subordinate,
    BestEffort,
    SubordinateWhenPossible,
    Utilitarian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OblMode {
    Subordinate,
    PermitOmissions,
    PermitCommissions,
    BestEffort,
    Utilitarian,
}

/// Minimum authorization compliance level the goal fluent tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuthThreshold {
    /// policy_compliant(f) requires auth_compliance(strong) and
    /// auth_compliance(weak).
    Strong,
    /// policy_compliant(f) requires auth_compliance(weak) only.
    Weak,
    /// Authorization compliance is disregarded entirely.
    None,
}

#[derive(Debug, Error)]
#[error("unknown mode name `{0}`")]
pub struct ModeParseError(String);

impl FromStr for AuthMode {
    type Err = ModeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paranoid" => Ok(AuthMode::Paranoid),
            "cautious" => Ok(AuthMode::Cautious),
            "subordinate" => Ok(AuthMode::Subordinate),
            "best-effort" => Ok(AuthMode::BestEffort),
            "subordinate-when-possible" => Ok(AuthMode::SubordinateWhenPossible),
            "utilitarian" => Ok(AuthMode::Utilitarian),
            _ => Err(ModeParseError(s.to_string())),
        }
    }
}

impl FromStr for OblMode {
    type Err = ModeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "subordinate" => Ok(OblMode::Subordinate),
            "permit-omissions" => Ok(OblMode::PermitOmissions),
            "permit-commissions" => Ok(OblMode::PermitCommissions),
            "best-effort" => Ok(OblMode::BestEffort),
            "utilitarian" => Ok(OblMode::Utilitarian),
            _ => Err(ModeParseError(s.to_string())),
        }
    }
}

impl fmt::Display for AuthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AuthMode::Paranoid => "paranoid",
            AuthMode::Cautious => "cautious",
            AuthMode::Subordinate => "subordinate",
            AuthMode::BestEffort => "best-effort",
            AuthMode::SubordinateWhenPossible => "subordinate-when-possible",
            AuthMode::Utilitarian => "utilitarian",
        };
        f.write_str(s)
    }
}

impl fmt::Display for OblMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OblMode::Subordinate => "subordinate",
            OblMode::PermitOmissions => "permit-omissions",
            OblMode::PermitCommissions => "permit-commissions",
            OblMode::BestEffort => "best-effort",
            OblMode::Utilitarian => "utilitarian",
        };
        f.write_str(s)
    }
}

/// A combined (authorization, obligation) behavior configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeConfig {
    pub auth: AuthMode,
    pub obl: OblMode,
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig {
            auth: AuthMode::Utilitarian,
            obl: OblMode::Utilitarian,
        }
    }
}

impl fmt::Display for ModeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.auth, self.obl)
    }
}

impl ModeConfig {
    pub fn new(auth: AuthMode, obl: OblMode) -> Self {
        ModeConfig { auth, obl }
    }

    pub fn threshold(&self) -> AuthThreshold {
        match self.auth {
            AuthMode::Paranoid | AuthMode::Cautious | AuthMode::BestEffort => AuthThreshold::Strong,
            AuthMode::Subordinate | AuthMode::SubordinateWhenPossible => AuthThreshold::Weak,
            AuthMode::Utilitarian => AuthThreshold::None,
        }
    }

    /// Does the goal fluent conjoin the two obligation-compliance fluents?
    pub fn obl_tracked(&self) -> bool {
        self.obl != OblMode::Utilitarian
    }

    /// A waiver family is usable (at a cost) only if the mode minimizes it;
    /// every other family is blocked by an unconditional executability law,
    /// either because the mode forbids it or because it can never be needed.
    pub fn allows(&self, family: WaiverFamily) -> bool {
        match family {
            WaiverFamily::NotPermitted => matches!(
                self.auth,
                AuthMode::Cautious | AuthMode::BestEffort
            ),
            WaiverFamily::NegPermitted => matches!(
                self.auth,
                AuthMode::BestEffort | AuthMode::SubordinateWhenPossible
            ),
            WaiverFamily::OblDo => matches!(
                self.obl,
                OblMode::PermitOmissions | OblMode::BestEffort
            ),
            WaiverFamily::OblRefrain => matches!(
                self.obl,
                OblMode::PermitCommissions | OblMode::BestEffort
            ),
        }
    }

    pub fn blocked_families(&self) -> Vec<WaiverFamily> {
        WaiverFamily::ALL
            .into_iter()
            .filter(|f| !self.allows(*f))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for name in [
            "paranoid",
            "cautious",
            "subordinate",
            "best-effort",
            "subordinate-when-possible",
            "utilitarian",
        ] {
            let m: AuthMode = name.parse().unwrap();
            assert_eq!(m.to_string(), name);
        }
        for name in [
            "subordinate",
            "permit-omissions",
            "permit-commissions",
            "best-effort",
            "utilitarian",
        ] {
            let m: OblMode = name.parse().unwrap();
            assert_eq!(m.to_string(), name);
        }
        assert!("Paranoid".parse::<AuthMode>().is_err());
        assert!("ignore-obligations".parse::<OblMode>().is_err());
    }

    #[test]
    fn paranoid_forbids_all_auth_waivers() {
        let m = ModeConfig::new(AuthMode::Paranoid, OblMode::Subordinate);
        assert_eq!(m.threshold(), AuthThreshold::Strong);
        for fam in WaiverFamily::ALL {
            assert!(!m.allows(fam), "{fam:?} must be blocked under {m}");
        }
    }

    #[test]
    fn best_effort_minimizes_both_auth_waivers() {
        let m = ModeConfig::new(AuthMode::BestEffort, OblMode::BestEffort);
        assert_eq!(m.threshold(), AuthThreshold::Strong);
        for fam in WaiverFamily::ALL {
            assert!(m.allows(fam));
        }
    }

    #[test]
    fn subordinate_blocks_both_auth_waivers_and_drops_strong() {
        let m = ModeConfig::new(AuthMode::Subordinate, OblMode::Subordinate);
        assert_eq!(m.threshold(), AuthThreshold::Weak);
        assert!(!m.allows(WaiverFamily::NegPermitted));
        // never needed: strong compliance is disregarded
        assert!(!m.allows(WaiverFamily::NotPermitted));
    }

    #[test]
    fn utilitarian_uses_no_policy_actions() {
        let m = ModeConfig::default();
        assert_eq!(m.threshold(), AuthThreshold::None);
        assert!(!m.obl_tracked());
        assert_eq!(m.blocked_families().len(), 4);
    }

    #[test]
    fn omission_and_commission_modes_are_one_sided() {
        let po = ModeConfig::new(AuthMode::Utilitarian, OblMode::PermitOmissions);
        assert!(po.allows(WaiverFamily::OblDo));
        assert!(!po.allows(WaiverFamily::OblRefrain));
        let pc = ModeConfig::new(AuthMode::Utilitarian, OblMode::PermitCommissions);
        assert!(!pc.allows(WaiverFamily::OblDo));
        assert!(pc.allows(WaiverFamily::OblRefrain));
    }
}
