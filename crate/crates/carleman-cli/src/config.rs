//! Run configuration: JSON file plus command-line overrides. Unknown keys
//! are rejected so a typo cannot silently fall back to a default.

use std::path::{Path, PathBuf};

use carleman::conjugates::PsiConfig;
use carleman::sequences::{SequenceKind, SequenceSpec};
use carleman::weights::EpsRule;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sequence: SequenceSpec,
    pub psi: PsiConfig,
    pub sigma: f64,
    pub eps_rule: EpsRuleConfig,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EpsRuleConfig {
    InverseM,
}

impl From<EpsRuleConfig> for EpsRule {
    fn from(_: EpsRuleConfig) -> EpsRule {
        EpsRule::InverseM
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sequence: SequenceSpec::mstar(1.0, carleman::sequences::DEFAULT_K),
            psi: PsiConfig::default(),
            sigma: 1.0,
            eps_rule: EpsRuleConfig::InverseM,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kind: Option<String>,
    pub rho: Option<f64>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("bad config {}: {e}", p.display()))
            }
        }
    }

    pub fn apply(&mut self, ov: &Overrides) -> Result<(), String> {
        if let Some(kind) = &ov.kind {
            let kind = match kind.as_str() {
                "mstar" => SequenceKind::MStar,
                "gammafact" => SequenceKind::GammaFact,
                "arctg" => SequenceKind::Arctg,
                other => return Err(format!("unknown sequence kind {other}")),
            };
            let k = ov.k.or(self.sequence.k).unwrap_or(carleman::sequences::DEFAULT_K);
            self.sequence = match kind {
                SequenceKind::MStar => {
                    SequenceSpec::mstar(ov.rho.or(self.sequence.rho).unwrap_or(1.0), k)
                }
                SequenceKind::GammaFact => {
                    SequenceSpec::gammafact(ov.rho.or(self.sequence.rho).unwrap_or(1.0), k)
                }
                SequenceKind::Arctg => SequenceSpec::arctg(k),
                SequenceKind::Table => unreachable!(),
            };
        } else {
            if let Some(rho) = ov.rho {
                self.sequence.rho = Some(rho);
            }
            if let Some(k) = ov.k {
                self.sequence.k = Some(k);
            }
        }
        if let Some(alpha) = ov.alpha {
            self.psi.alpha = alpha;
        }
        if let Some(sigma) = ov.sigma {
            if !(sigma > 0.0) {
                return Err("sigma must be positive".into());
            }
            self.sigma = sigma;
        }
        if let Some(dir) = &ov.out_dir {
            self.out_dir = dir.clone();
        }
        Ok(())
    }
}
