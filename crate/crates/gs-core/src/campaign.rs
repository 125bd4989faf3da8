//! Randomized certification campaigns over (n, k): real-rootedness,
//! interlacing, localization, and segment concavity, aggregated into a
//! reproducible JSON report. Samples are independent streams keyed by
//! (seed, index), so the parallel reduction is deterministic.

use crate::hyperbolic::{certify_theorem, concavity_probe, ConcavityProbe};
use crate::sample::{random_block, random_s_point, rng_for};
use rayon::prelude::*;
use serde::Serialize;

/// Aggregated verdicts for one (n, k) campaign.
#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub real_rooted: bool,
    pub interlaced: bool,
    /// Literal printed index range 2 <= i <= k-1.
    pub localized: bool,
    /// Wider reading 2 <= i <= k.
    pub localized_wide: bool,
    pub concavity_slack_min: f64,
    pub segment_in_s: bool,
    pub worst_max_imag_rel: f64,
    pub worst_interlace_slack: f64,
    pub worst_loc_slack_literal: f64,
    pub worst_loc_slack_wide: f64,
    /// Measured leading coefficient of p_{k+1} (constant over draws).
    pub lead_p_min: f64,
    pub lead_q_min: f64,
    pub worst_segment_cone_margin: f64,
    pub worst_segment_fk: f64,
}

/// Worst-case merge of the theorem verdicts over random block draws.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TheoremCampaign {
    pub real_rooted: bool,
    pub interlaced: bool,
    pub localized_literal: bool,
    pub localized_wide: bool,
    pub worst_max_imag_rel: f64,
    pub worst_interlace_slack: f64,
    pub worst_loc_slack_literal: f64,
    pub worst_loc_slack_wide: f64,
    pub lead_p_min: f64,
    pub lead_q_min: f64,
}

pub fn theorem_campaign(n: usize, k: usize, samples: usize, seed: u64) -> TheoremCampaign {
    let init = TheoremCampaign {
        real_rooted: true,
        interlaced: true,
        localized_literal: true,
        localized_wide: true,
        worst_max_imag_rel: 0.0,
        worst_interlace_slack: f64::INFINITY,
        worst_loc_slack_literal: f64::INFINITY,
        worst_loc_slack_wide: f64::INFINITY,
        lead_p_min: f64::INFINITY,
        lead_q_min: f64::INFINITY,
    };
    let merge = |a: TheoremCampaign, b: TheoremCampaign| TheoremCampaign {
        real_rooted: a.real_rooted && b.real_rooted,
        interlaced: a.interlaced && b.interlaced,
        localized_literal: a.localized_literal && b.localized_literal,
        localized_wide: a.localized_wide && b.localized_wide,
        worst_max_imag_rel: a.worst_max_imag_rel.max(b.worst_max_imag_rel),
        worst_interlace_slack: a.worst_interlace_slack.min(b.worst_interlace_slack),
        worst_loc_slack_literal: a.worst_loc_slack_literal.min(b.worst_loc_slack_literal),
        worst_loc_slack_wide: a.worst_loc_slack_wide.min(b.worst_loc_slack_wide),
        lead_p_min: a.lead_p_min.min(b.lead_p_min),
        lead_q_min: a.lead_q_min.min(b.lead_q_min),
    };
    (0..samples as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = rng_for(seed, idx);
            let block = random_block(&mut rng, n);
            let out = certify_theorem(&block, k).expect("certify dimensions are valid");
            TheoremCampaign {
                real_rooted: out.real_rooted,
                interlaced: out.interlaced,
                localized_literal: out.localized_literal,
                localized_wide: out.localized_wide,
                worst_max_imag_rel: out.max_imag_rel,
                worst_interlace_slack: out.interlace_slack,
                worst_loc_slack_literal: out.loc_slack_literal,
                worst_loc_slack_wide: out.loc_slack_wide,
                lead_p_min: out.lead_p,
                lead_q_min: out.min_lead_q,
            }
        })
        .reduce(|| init, merge)
}

/// Worst-case merge of segment concavity probes over random S-pairs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcavityCampaign {
    pub slack_min: f64,
    pub all_segments_in_s: bool,
    pub worst_cone_margin: f64,
    pub worst_fk: f64,
    /// Scale of the largest endpoint value, for relative thresholds.
    pub value_scale: f64,
}

pub fn concavity_campaign(n: usize, k: usize, samples: usize, seed: u64) -> ConcavityCampaign {
    let init = ConcavityCampaign {
        slack_min: f64::INFINITY,
        all_segments_in_s: true,
        worst_cone_margin: f64::INFINITY,
        worst_fk: f64::INFINITY,
        value_scale: 1.0,
    };
    let merge = |a: ConcavityCampaign, b: ConcavityCampaign| ConcavityCampaign {
        slack_min: a.slack_min.min(b.slack_min),
        all_segments_in_s: a.all_segments_in_s && b.all_segments_in_s,
        worst_cone_margin: a.worst_cone_margin.min(b.worst_cone_margin),
        worst_fk: a.worst_fk.min(b.worst_fk),
        value_scale: a.value_scale.max(b.value_scale),
    };
    (0..samples as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = rng_for(seed ^ 0x636f6e63, idx);
            let ra = random_s_point(&mut rng, n, k);
            let rb = random_s_point(&mut rng, n, k);
            let probe: ConcavityProbe =
                concavity_probe(&ra, &rb, k, 33).expect("sampled endpoints lie in S");
            let fa = crate::hyperbolic::eval_fk(&ra, k).unwrap();
            let fb = crate::hyperbolic::eval_fk(&rb, k).unwrap();
            ConcavityCampaign {
                slack_min: probe.slack_min,
                all_segments_in_s: probe.segment_in_s,
                worst_cone_margin: probe.min_cone_margin,
                worst_fk: probe.min_fk,
                value_scale: fa.abs().max(fb.abs()).max(1.0),
            }
        })
        .reduce(|| init, merge)
}

/// Full certification run for one (n, k): theorem draws plus concavity
/// pairs, merged into the exportable report.
pub fn certify_run(n: usize, k: usize, samples: usize, seed: u64) -> CertReport {
    let theorem = theorem_campaign(n, k, samples, seed);
    let conc = concavity_campaign(n, k, samples, seed);
    CertReport {
        n,
        k,
        samples,
        seed,
        real_rooted: theorem.real_rooted,
        interlaced: theorem.interlaced,
        localized: theorem.localized_literal,
        localized_wide: theorem.localized_wide,
        concavity_slack_min: conc.slack_min,
        segment_in_s: conc.all_segments_in_s,
        worst_max_imag_rel: theorem.worst_max_imag_rel,
        worst_interlace_slack: theorem.worst_interlace_slack,
        worst_loc_slack_literal: theorem.worst_loc_slack_literal,
        worst_loc_slack_wide: theorem.worst_loc_slack_wide,
        lead_p_min: theorem.lead_p_min,
        lead_q_min: theorem.lead_q_min,
        worst_segment_cone_margin: conc.worst_cone_margin,
        worst_segment_fk: conc.worst_fk,
    }
}

impl CertReport {
    pub fn passed(&self) -> bool {
        self.real_rooted
            && self.interlaced
            && self.localized
            && self.segment_in_s
            && self.concavity_slack_min >= -1e-10 * self.worst_segment_fk.abs().max(1.0)
            && self.lead_p_min > 0.0
            && self.lead_q_min > 0.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
