//! Output labels and their analytic counterparts.

use sa_noma::analytic::{
    lemma1_exact, lemma1_highsnr, lemma2_exact, lemma2_highsnr, lemma4_exact, lemma4_highsnr,
    lemma5_bound, uplink_cr_case1, uplink_cr_case1_highsnr, uplink_cr_case2,
    uplink_cr_case2_highsnr, uplink_sum_exact, uplink_sum_highsnr,
};
use sa_noma::sim::{AllocationMode, Event, SelectionMode};
use sa_noma::{SystemConfig, ThresholdSet};

/// Cognitive uplink rule forced by a case label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UplinkCase {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Event(Event),
    /// Per-user uplink outage under a cognitive rule; `far` selects the user.
    Case {
        case: UplinkCase,
        far: bool,
    },
}

const CASE_LABELS: [(&str, UplinkCase, bool); 4] = [
    ("uplink_case1_far", UplinkCase::One, true),
    ("uplink_case1_near", UplinkCase::One, false),
    ("uplink_case2_far", UplinkCase::Two, true),
    ("uplink_case2_near", UplinkCase::Two, false),
];

impl Output {
    pub fn parse(label: &str) -> Option<Self> {
        if let Some(&(_, case, far)) = CASE_LABELS.iter().find(|(l, ..)| *l == label) {
            return Some(Output::Case { case, far });
        }
        Event::from_label(label).map(Output::Event)
    }

    pub fn label(self) -> &'static str {
        match self {
            Output::Event(e) => e.label(),
            Output::Case { case, far } => {
                CASE_LABELS
                    .iter()
                    .find(|(_, c, f)| *c == case && *f == far)
                    .expect("every case output has a label")
                    .0
            }
        }
    }

    /// Simulated event and the allocation override it needs, if any.
    pub fn event(self) -> (Event, Option<UplinkCase>) {
        match self {
            Output::Event(e) => (e, None),
            Output::Case { case, far: true } => (Event::UplinkFar, Some(case)),
            Output::Case { case, far: false } => (Event::UplinkNear, Some(case)),
        }
    }

    fn is_downlink(self) -> bool {
        matches!(
            self,
            Output::Event(
                Event::DownlinkFar
                    | Event::DownlinkNear
                    | Event::DownlinkFarModified
                    | Event::DownlinkNearModified
            )
        )
    }

    fn is_uplink(self) -> bool {
        matches!(
            self,
            Output::Event(
                Event::UplinkSum | Event::UplinkSumModified | Event::UplinkFar | Event::UplinkNear
            )
        )
    }

    /// Reason the output cannot be produced under `allocation`, if any.
    pub fn incompatibility(self, allocation: AllocationMode<f64>) -> Option<String> {
        if self.is_downlink() && !allocation.is_downlink_capable() {
            return Some(format!("`{}` needs a downlink allocation", self.label()));
        }
        if self.is_uplink() && !allocation.is_uplink_capable() {
            return Some(format!("`{}` needs an uplink allocation", self.label()));
        }
        None
    }

    /// Exact and high-SNR closed forms, where the model has them.
    pub fn analytic(self, config: &SystemConfig) -> sa_noma::Result<(Option<f64>, Option<f64>)> {
        let scenario = config.scenario();
        let random = config.selection == SelectionMode::RandomX;
        let quiet = config.rho_i == 0.0 || config.density == 0.0;
        let rates = &config.rates;
        let fixed = match config.allocation {
            AllocationMode::Fixed { far } => Some(far),
            _ => None,
        };
        let thresholds = fixed.map(|far| ThresholdSet::new(config.rho, 1.0 - far, far, rates));
        Ok(match (self, thresholds) {
            (Output::Event(Event::DownlinkFarModified), Some(t)) if random => (
                Some(lemma1_exact(&scenario, &t)?),
                Some(lemma1_highsnr(&scenario, &t)),
            ),
            (Output::Event(Event::DownlinkNearModified), Some(t)) if random => (
                Some(lemma2_exact(&scenario, &t)?),
                Some(lemma2_highsnr(&scenario, &t)),
            ),
            (Output::Event(Event::DownlinkNearModified), None)
                if random
                    && quiet
                    && config.allocation == AllocationMode::CognitiveDownlinkSimplified =>
            {
                let s = scenario_without_interference(config);
                (
                    Some(lemma4_exact(&s, rates)?),
                    Some(lemma4_highsnr(&s, rates)?),
                )
            }
            (Output::Event(Event::DownlinkFar), Some(t))
                if config.selection == SelectionMode::Algorithm1 =>
            {
                let bound = lemma5_bound(&scenario, &t, config.bs_antennas, config.user_antennas)?;
                (None, Some(bound))
            }
            (Output::Event(Event::UplinkSumModified), Some(_)) if random => {
                let far = fixed.unwrap_or(1.0);
                (
                    Some(uplink_sum_exact(&scenario, 1.0 - far, far, rates)?),
                    Some(uplink_sum_highsnr(&scenario, 1.0 - far, far, rates)?),
                )
            }
            (Output::Case { case, far }, _) if random && quiet => {
                let s = scenario_without_interference(config);
                match case {
                    UplinkCase::One => {
                        let e = uplink_cr_case1(&s, rates)?;
                        let h = uplink_cr_case1_highsnr(&s, rates)?;
                        if far {
                            (Some(e.far), Some(h.far))
                        } else {
                            (Some(e.near), Some(h.near))
                        }
                    }
                    UplinkCase::Two => (
                        Some(uplink_cr_case2(&s, rates)?),
                        Some(uplink_cr_case2_highsnr(&s, rates)?),
                    ),
                }
            }
            _ => (None, None),
        })
    }
}

fn scenario_without_interference(config: &SystemConfig) -> sa_noma::Scenario {
    let mut s = config.scenario();
    s.rho_i = 0.0;
    s
}
