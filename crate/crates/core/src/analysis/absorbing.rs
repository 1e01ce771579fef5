//! Ensembles of runs from data of growing `H₀⁻¹` size: entry into a common
//! `H¹` ball, the bound after entry, and the contraction of the ensemble.

use std::sync::Arc;

use rayon::prelude::*;

use super::{random_initial_data, AnalysisError};
use crate::dynamics::{SemiflowState, Stepper, StepperConfig, Termination};
use crate::field::Field;
use crate::geometry::RadialMesh;
use crate::operators::ConeLaplacian;
use crate::spaces::{first_nonzero_eigenvalue, mellin_norm, CutoffFunction};

/// Inputs of an absorbing-set experiment.
#[derive(Debug, Clone)]
pub struct AbsorbingSetup {
    pub mesh: Arc<RadialMesh>,
    pub modes: usize,
    pub radii: Vec<f64>,
    /// Members per radius; member `j` uses seed `seed_base + j` at every
    /// radius, so radii differ only in scale.
    pub seeds: usize,
    pub seed_base: u64,
    /// Stepper settings; `field_stride` sets the spacing of the diameter
    /// trace and of the Mellin proxy samples.
    pub cfg: StepperConfig,
    /// Common `‖∇u‖` level; `None` uses `½ μ₁ min R`, which every datum
    /// starts above since `‖∇u‖ ≥ μ₁ ‖u‖_{H₀⁻¹}` on mean-zero fields.
    pub level: Option<f64>,
}

impl AbsorbingSetup {
    pub fn new(mesh: Arc<RadialMesh>, modes: usize, radii: Vec<f64>, seeds: usize) -> Self {
        Self {
            mesh,
            modes,
            radii,
            seeds,
            seed_base: 0,
            cfg: StepperConfig {
                adaptive_stab: true,
                snapshot_stride: 10,
                field_stride: 100,
                ..StepperConfig::default()
            },
            level: None,
        }
    }
}

/// One ensemble member.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberOutcome {
    pub radius: f64,
    pub seed: u64,
    /// Time after which `‖∇u‖` stays at or below the level; `None` if the
    /// run ended above it.
    pub entry_time: Option<f64>,
    /// Sup of `‖∇u‖` after entry.
    pub kappa_h1: Option<f64>,
    /// Sup of `‖u‖_{𝒦^{0,γ}} + ‖Δu‖_{𝒦^{0,γ}}` over stored states after entry.
    pub kappa_proxy: Option<f64>,
    pub final_time: f64,
    pub equilibrium: bool,
    /// Abort message, if the run stopped early.
    pub aborted: Option<String>,
}

/// Per-radius aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSummary {
    pub radius: f64,
    /// Latest member entry; `None` if some member never entered.
    pub entry_time: Option<f64>,
    pub kappa_h1: Option<f64>,
    pub kappa_proxy: Option<f64>,
    /// `(t, max pairwise ‖u_a − u_b‖_{H₀⁻¹})`, finished members held at
    /// their final state.
    pub diameter: Vec<(f64, f64)>,
}

impl RadiusSummary {
    /// Largest increase of the diameter between consecutive samples at or
    /// after the entry time (`0` if it never grows).
    pub fn diameter_growth_after_entry(&self) -> Option<f64> {
        let entry = self.entry_time?;
        let tail: Vec<f64> = self
            .diameter
            .iter()
            .filter(|(t, _)| *t >= entry)
            .map(|(_, d)| *d)
            .collect();
        Some(tail.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingReport {
    pub level: f64,
    pub members: Vec<MemberOutcome>,
    pub summaries: Vec<RadiusSummary>,
}

impl AbsorbingReport {
    /// `(max κ̂ − min κ̂)/max κ̂` over radii for the `H¹` bound.
    pub fn kappa_spread(&self) -> Option<f64> {
        let k: Vec<f64> = self
            .summaries
            .iter()
            .map(|s| s.kappa_h1)
            .collect::<Option<_>>()?;
        let hi = k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = k.iter().copied().fold(f64::INFINITY, f64::min);
        Some((hi - lo) / hi)
    }

    /// Diameter nonincreasing after entry, up to `slack`, at every radius.
    pub fn diameter_nonincreasing(&self, slack: f64) -> bool {
        self.summaries
            .iter()
            .all(|s| s.diameter_growth_after_entry().is_some_and(|g| g <= slack))
    }

    /// Entry times nondecreasing in `R` (radii taken in ascending order).
    pub fn entry_times_nondecreasing(&self) -> bool {
        let mut rows: Vec<(f64, Option<f64>)> =
            self.summaries.iter().map(|s| (s.radius, s.entry_time)).collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows.windows(2).all(|w| match (w[0].1, w[1].1) {
            (Some(a), Some(b)) => a <= b,
            (_, None) => true,
            (None, Some(_)) => false,
        })
    }
}

struct MemberRun {
    outcome: MemberOutcome,
    snapshots: Vec<(f64, Field)>,
}

fn run_member(
    stepper: &Stepper,
    cutoff: &CutoffFunction,
    level: f64,
    radius: f64,
    seed: u64,
) -> Result<MemberRun, AnalysisError> {
    let lap = stepper.laplacian();
    let cfg = stepper.config();
    let u0 = random_initial_data(lap.mesh().clone(), lap.modes(), seed, radius);
    let traj = stepper.run(SemiflowState::initial(u0));
    let final_time = traj.state.time(cfg.dt);
    let last_above = traj.records.iter().rposition(|r| r.h1_seminorm > level);
    let entry_time = match last_above {
        None => Some(0.0),
        Some(i) if i + 1 < traj.records.len() => Some(traj.records[i + 1].t),
        Some(_) => None,
    };
    let kappa_h1 = entry_time.map(|te| {
        traj.records
            .iter()
            .filter(|r| r.t >= te)
            .map(|r| r.h1_seminorm)
            .fold(0.0, f64::max)
    });
    let kappa_proxy = match entry_time {
        Some(te) => {
            let mut best = 0.0f64;
            for (t, u) in &traj.snapshots {
                if *t >= te {
                    let lu = lap.apply(u)?;
                    let v = mellin_norm(u, 0, cfg.mellin_gamma, cutoff)?
                        + mellin_norm(&lu, 0, cfg.mellin_gamma, cutoff)?;
                    best = best.max(v);
                }
            }
            Some(best)
        }
        None => None,
    };
    let (equilibrium, aborted) = match &traj.termination {
        Termination::Equilibrium { .. } => (true, None),
        Termination::Horizon => (false, None),
        Termination::Aborted(e) => (false, Some(e.to_string())),
    };
    Ok(MemberRun {
        outcome: MemberOutcome {
            radius,
            seed,
            entry_time,
            kappa_h1,
            kappa_proxy,
            final_time,
            equilibrium,
            aborted,
        },
        snapshots: traj.snapshots,
    })
}

/// Max pairwise `H₀⁻¹` distance on the common sampling times.
fn diameter_trace(
    runs: &[&MemberRun],
    lap: &ConeLaplacian,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let longest = runs.iter().map(|r| r.snapshots.len()).max().unwrap_or(0);
    let mut trace = Vec::with_capacity(longest);
    for j in 0..longest {
        let states: Vec<&(f64, Field)> = runs
            .iter()
            .map(|r| &r.snapshots[j.min(r.snapshots.len() - 1)])
            .collect();
        let t = states.iter().map(|(t, _)| *t).fold(0.0, f64::max);
        let mut d = 0.0f64;
        for a in 0..states.len() {
            for b in a + 1..states.len() {
                let diff = states[a].1.sub(&states[b].1)?;
                d = d.max(crate::dynamics::dual_norm_with(&diff, lap)?);
            }
        }
        trace.push((t, d));
    }
    Ok(trace)
}

/// Runs `seeds` members at each radius (in parallel, deterministically) and
/// summarises entry times, post-entry bounds and ensemble diameters.
/// Members that never enter or abort are reported individually.
pub fn absorbing_set_experiment(setup: &AbsorbingSetup) -> Result<AbsorbingReport, AnalysisError> {
    if setup.radii.is_empty() || setup.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(AnalysisError::InvalidParameter {
            name: "radii",
            value: setup.radii.iter().copied().fold(f64::NAN, f64::min),
            reason: "radii must be positive and finite",
        });
    }
    if setup.seeds < 2 {
        return Err(AnalysisError::InvalidParameter {
            name: "seeds",
            value: setup.seeds as f64,
            reason: "at least two members per radius",
        });
    }
    let mut cfg = setup.cfg.clone();
    if cfg.field_stride == 0 {
        cfg.field_stride = 100;
    }
    let lap = Arc::new(ConeLaplacian::new(setup.mesh.clone(), setup.modes));
    let cutoff = cfg
        .cutoff
        .unwrap_or_else(|| CutoffFunction::default_for(setup.mesh.profile()));
    let stepper = Stepper::new(lap.clone(), cfg)?;
    let level = match setup.level {
        Some(l) => l,
        None => {
            let mu1 = first_nonzero_eigenvalue(&setup.mesh, setup.modes);
            let r_min = setup.radii.iter().copied().fold(f64::INFINITY, f64::min);
            0.5 * mu1 * r_min
        }
    };

    let jobs: Vec<(f64, u64)> = setup
        .radii
        .iter()
        .flat_map(|&r| (0..setup.seeds as u64).map(move |j| (r, setup.seed_base + j)))
        .collect();
    let runs: Vec<MemberRun> = jobs
        .par_iter()
        .map(|&(r, seed)| run_member(&stepper, &cutoff, level, r, seed))
        .collect::<Result<_, _>>()?;

    let mut summaries = Vec::with_capacity(setup.radii.len());
    for &r in &setup.radii {
        let group: Vec<&MemberRun> = runs.iter().filter(|m| m.outcome.radius == r).collect();
        let entry_time = group
            .iter()
            .map(|m| m.outcome.entry_time)
            .collect::<Option<Vec<f64>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max));
        let max_of = |f: fn(&MemberOutcome) -> Option<f64>| {
            group
                .iter()
                .filter_map(|m| f(&m.outcome))
                .reduce(f64::max)
        };
        summaries.push(RadiusSummary {
            radius: r,
            entry_time,
            kappa_h1: max_of(|o| o.kappa_h1),
            kappa_proxy: max_of(|o| o.kappa_proxy),
            diameter: diameter_trace(&group, &lap)?,
        });
    }
    Ok(AbsorbingReport {
        level,
        members: runs.into_iter().map(|m| m.outcome).collect(),
        summaries,
    })
}
