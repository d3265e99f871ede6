//! Shipped sweep configurations.

use serde::Serialize;

use super::{Experiment, SamplerKind, SweepConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    #[serde(serialize_with = "ser_experiment")]
    pub experiment: Experiment,
    pub description: &'static str,
    /// Printed before running; set for presets that take hours at full scale.
    pub warning: Option<&'static str>,
    pub config: SweepConfig,
}

fn ser_experiment<S: serde::Serializer>(e: &Experiment, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(e.name())
}

const NAMES: [&str; 7] = [
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "appendix-d4",
    "appendix-d5",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn appendix(d_s: usize) -> SweepConfig {
    SweepConfig {
        d_s,
        d_c: vec![16, 64, 256],
        mu_gamma: vec![[0.05, 0.9], [0.1, 0.8]],
        ..SweepConfig::default()
    }
}

const APPENDIX_WARNING: &str =
    "full-scale sweeps at this system dimension run for hours; reduce n_sources or n_s for a quick look";

pub fn preset(name: &str) -> Option<Preset> {
    let base = SweepConfig::default();
    let p = match name {
        "fig2" => Preset {
            name: "fig2",
            experiment: Experiment::Fig2,
            description: "p_succ(p*, q*) against catalyst dimension 2^2..2^8 for three samplers",
            warning: None,
            config: SweepConfig {
                d_c: (2..=8).map(|e| 1u64 << e).collect(),
                samplers: vec![
                    SamplerKind::Rayleigh,
                    SamplerKind::Uniform,
                    SamplerKind::Exponential,
                ],
                ..base
            },
        },
        "fig3" => Preset {
            name: "fig3",
            experiment: Experiment::Fig3,
            description:
                "share of catalytically activated four-level pairs reachable with at most k copies",
            warning: None,
            config: SweepConfig {
                d_s: 4,
                k_max: 8,
                n_pairs: 2000,
                ..base
            },
        },
        "fig4" => Preset {
            name: "fig4",
            experiment: Experiment::Fig4,
            description: "p_succ(p*, q) over sampled targets q at d_C = 2^4, 2^6, 2^8",
            warning: None,
            config: base,
        },
        "fig5" => Preset {
            name: "fig5",
            experiment: Experiment::Fig5,
            description: "f(p) over sampled sources p with random catalysts at d_C = 2^4, 2^6, 2^8",
            warning: None,
            config: base,
        },
        "fig6" => Preset {
            name: "fig6",
            experiment: Experiment::Fig6,
            description: "f(p) over sampled sources p with n-qubit product catalysts",
            warning: None,
            config: base,
        },
        "appendix-d4" => Preset {
            name: "appendix-d4",
            experiment: Experiment::Fig5,
            description: "f(p) for four-level systems at (mu, gamma) = (0.05, 0.9) and (0.1, 0.8)",
            warning: Some(APPENDIX_WARNING),
            config: appendix(4),
        },
        "appendix-d5" => Preset {
            name: "appendix-d5",
            experiment: Experiment::Fig5,
            description: "f(p) for five-level systems at (mu, gamma) = (0.05, 0.9) and (0.1, 0.8)",
            warning: Some(APPENDIX_WARNING),
            config: appendix(5),
        },
        _ => return None,
    };
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in preset_names() {
            let p = preset(name).unwrap();
            assert_eq!(p.name, *name);
            p.config.validate().unwrap();
            let text = serde_json::to_string(&p.config).unwrap();
            assert_eq!(SweepConfig::from_json(&text).unwrap(), p.config);
        }
        assert!(preset("fig7").is_none());
    }

    #[test]
    fn fig2_is_a_21_condition_sweep() {
        let c = preset("fig2").unwrap().config;
        assert_eq!(c.d_c.len() * c.samplers.len(), 21);
    }

    #[test]
    fn appendix_presets_warn() {
        assert!(preset("appendix-d4").unwrap().warning.is_some());
        assert!(preset("appendix-d5").unwrap().warning.is_some());
        assert!(preset("fig5").unwrap().warning.is_none());
    }
}
