//! Runs many independent missions. With the `parallel` feature (default)
//! the work is spread over the rayon pool; without it everything runs on the
//! calling thread. Results come back in input order either way.

use serde::Serialize;

use crate::channel::ChannelSource;
use crate::engine::{run_mission, MissionResult};
use crate::error::Result;
use crate::types::{MissionConfig, Policy};

pub fn run_batch_sequential(
    configs: &[MissionConfig],
    source: &ChannelSource,
) -> Vec<Result<MissionResult>> {
    configs.iter().map(|c| run_mission(c, source)).collect()
}

#[cfg(feature = "parallel")]
pub fn run_batch_parallel(
    configs: &[MissionConfig],
    source: &ChannelSource,
) -> Vec<Result<MissionResult>> {
    use rayon::prelude::*;
    configs.par_iter().map(|c| run_mission(c, source)).collect()
}

pub fn run_batch(configs: &[MissionConfig], source: &ChannelSource) -> Vec<Result<MissionResult>> {
    #[cfg(feature = "parallel")]
    {
        run_batch_parallel(configs, source)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(configs, source)
    }
}

/// Maps `f` over `items`, in parallel when the feature is on.
pub fn map_all<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Greedy and HGAD on the same scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyComparison {
    pub greedy: MissionResult,
    pub hgad: MissionResult,
}

impl PolicyComparison {
    /// HGAD total over Greedy total (infinite if Greedy got nothing).
    pub fn total_ratio(&self) -> f64 {
        self.hgad.total_downloaded_bits / self.greedy.total_downloaded_bits
    }
}

pub fn compare_policies(
    config: &MissionConfig,
    source: &ChannelSource,
) -> Result<PolicyComparison> {
    let greedy_cfg = config.with_policy(Policy::Greedy);
    let hgad_cfg = config.with_policy(Policy::Hgad);
    let mut runs = run_batch(&[greedy_cfg, hgad_cfg], source).into_iter();
    let greedy = runs.next().expect("two runs")?;
    let hgad = runs.next().expect("two runs")?;
    Ok(PolicyComparison { greedy, hgad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::fixtures::four_sensor_config;
    use crate::types::MissionMode;

    #[test]
    fn batch_preserves_order() {
        let configs: Vec<_> = (0..6)
            .map(|k| {
                let mut c = four_sensor_config();
                c.mission_slots = 20 + 10 * k;
                c
            })
            .collect();
        let out = run_batch(&configs, &ChannelSource::Analytic);
        for (k, r) in out.iter().enumerate() {
            assert_eq!(r.as_ref().unwrap().slot_log.len(), 20 + 10 * k);
        }
        assert_eq!(
            out.into_iter().map(Result::unwrap).collect::<Vec<_>>(),
            run_batch_sequential(&configs, &ChannelSource::Analytic)
                .into_iter()
                .map(Result::unwrap)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn comparison_runs_both_policies() {
        let cmp = compare_policies(&four_sensor_config(), &ChannelSource::Analytic).unwrap();
        assert_eq!(cmp.greedy.mode, MissionMode::FixedGreedy);
        assert_eq!(cmp.hgad.mode, MissionMode::FixedHgad);
    }
}
