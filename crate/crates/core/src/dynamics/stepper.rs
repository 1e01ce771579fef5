//! Stabilised linearly implicit stepping and the run loop.
//!
//! Per mode the scheme solves
//! `(I + dt Δ² − S dt Δ) u^{n+1} = u^n + dt Δ N(u^n)`, `N(u) = u³ − (1+S)u`,
//! with the cubic evaluated on the dealiasing angular grid. Mass is
//! conserved structurally: the mode-0 part of `Δ N` integrates to zero by
//! the telescoping fluxes, its roundoff mean is removed, and the banded solve
//! carries the mean of the right-hand side over unchanged.

use std::sync::Arc;

use super::{
    dual_norm_with, energy_from_grid, energy_gradient_with, DiagnosticsRecord, DynamicsError,
    StepperConfig,
};
use crate::field::{mode_of, AngularGrid, Field};
use crate::operators::{ConeLaplacian, SOLVE_TOLERANCE};
use crate::spaces::{h1_seminorm, mean, mellin_norm, CutoffFunction};

/// Position along a run: the step counter and the field. Time is
/// `step · dt`, so split runs land on bitwise-identical times.
#[derive(Debug, Clone)]
pub struct SemiflowState {
    pub step: u64,
    pub u: Field,
}

impl SemiflowState {
    pub fn initial(u: Field) -> Self {
        Self { step: 0, u }
    }

    pub fn time(&self, dt: f64) -> f64 {
        self.step as f64 * dt
    }
}

/// Per-step solver information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub stab: f64,
    pub backward_error: f64,
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Termination {
    Equilibrium { residual: f64 },
    Horizon,
    Aborted(DynamicsError),
}

impl Termination {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, Self::Equilibrium { .. })
    }
}

/// Output of a run. On abort the records up to and including the offending
/// step are kept.
#[derive(Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    /// `(t, u)` every `field_stride` steps and at the end, when requested.
    pub snapshots: Vec<(f64, Field)>,
    pub state: SemiflowState,
    pub termination: Termination,
    /// Largest stabilisation used.
    pub stab_max: f64,
}

impl Trajectory {
    pub fn final_record(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    /// The error if the run aborted, otherwise the trajectory.
    pub fn into_result(self) -> Result<Self, DynamicsError> {
        match self.termination {
            Termination::Aborted(e) => Err(e),
            _ => Ok(self),
        }
    }
}

/// A configured stepper bound to one mesh and mode cutoff.
#[derive(Debug)]
pub struct Stepper {
    lap: Arc<ConeLaplacian>,
    grid: AngularGrid,
    cfg: StepperConfig,
    cutoff: CutoffFunction,
}

impl Stepper {
    pub fn new(lap: Arc<ConeLaplacian>, cfg: StepperConfig) -> Result<Self, DynamicsError> {
        cfg.validate()?;
        let cutoff = cfg
            .cutoff
            .unwrap_or_else(|| CutoffFunction::default_for(lap.mesh().profile()));
        Ok(Self {
            grid: AngularGrid::new(lap.modes()),
            lap,
            cfg,
            cutoff,
        })
    }

    pub fn laplacian(&self) -> &Arc<ConeLaplacian> {
        &self.lap
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    fn check(&self, u: &Field) -> Result<(), DynamicsError> {
        if u.modes() != self.lap.modes() || **u.mesh() != **self.lap.mesh() {
            Err(DynamicsError::MeshMismatch)
        } else {
            Ok(())
        }
    }

    /// Stabilisation for a state with `sup |u| = sup`.
    pub fn stabilisation(&self, sup: f64) -> f64 {
        let s = self.cfg.stab;
        if !self.cfg.adaptive_stab {
            return s;
        }
        let need = 0.5 * (3.0 * sup * sup - 1.0);
        if need <= s {
            s
        } else {
            2f64.powi(need.log2().ceil() as i32)
        }
    }

    /// One step from `u`, whose grid samples are `values`.
    pub fn step_from_grid(
        &self,
        u: &Field,
        values: &[f64],
        t: f64,
    ) -> Result<(Field, StepInfo), DynamicsError> {
        let sup = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let stab = self.stabilisation(sup);
        let nonlinear = if self.cfg.linear_only {
            u.scaled(-(1.0 + stab))
        } else {
            let cube: Vec<f64> = values.iter().map(|x| x * x * x).collect();
            self.grid
                .from_grid(u.mesh().clone(), &cube)
                .lin_comb(1.0, u, -(1.0 + stab))?
        };
        let mut ln = self.lap.apply(&nonlinear)?;
        // ∫ Δ N dμ vanishes exactly; remove its roundoff
        let drift = mean(&ln);
        ln.component_mut(0).iter_mut().for_each(|x| *x -= drift);
        let rhs = u.lin_comb(1.0, &ln, self.cfg.dt)?;

        let mut next = Field::zeros(u.mesh().clone(), u.modes());
        let mut worst = 0.0f64;
        for c in 0..u.components() {
            let k = mode_of(c);
            let (x, err) = self.lap.solve_ch(self.cfg.dt, stab, k, rhs.component(c))?;
            if err > SOLVE_TOLERANCE {
                return Err(DynamicsError::SolveRejected {
                    t,
                    k,
                    error: err,
                    tol: SOLVE_TOLERANCE,
                });
            }
            worst = worst.max(err);
            next.component_mut(c).copy_from_slice(&x);
        }
        Ok((
            next,
            StepInfo {
                stab,
                backward_error: worst,
            },
        ))
    }

    /// One step from `state`.
    pub fn step(&self, state: &SemiflowState) -> Result<(SemiflowState, StepInfo), DynamicsError> {
        self.check(&state.u)?;
        let values = self.grid.to_grid(&state.u);
        let (u, info) = self.step_from_grid(&state.u, &values, state.time(self.cfg.dt))?;
        Ok((
            SemiflowState {
                step: state.step + 1,
                u,
            },
            info,
        ))
    }

    fn record(&self, t: f64, u: &Field, values: &[f64], energy: f64, ut: f64) -> DiagnosticsRecord {
        let gamma = self.cfg.mellin_gamma;
        DiagnosticsRecord {
            t,
            mass: mean(u),
            energy,
            h1_seminorm: h1_seminorm(u),
            ut_h01dual: ut,
            mellin_s0: mellin_norm(u, 0, gamma, &self.cutoff).expect("order 0"),
            mellin_s1: mellin_norm(u, 1, gamma, &self.cutoff).expect("order 1"),
            max_abs_u: values.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        }
    }

    /// `‖Δ Dℒ(u)‖_{H₀⁻¹} = ‖∇ Dℒ(u)‖`, the continuous-time `‖u_t‖`.
    fn initial_rate(&self, u: &Field) -> Result<f64, DynamicsError> {
        let g = if self.cfg.linear_only {
            // linearised energy ½‖∇u‖² − ½‖u‖²
            self.lap.apply(u)?.lin_comb(-1.0, u, -1.0)?
        } else {
            energy_gradient_with(u, &self.lap, &self.grid)?
        };
        Ok(h1_seminorm(&g))
    }

    fn energy_of(&self, u: &Field, values: &[f64]) -> f64 {
        if self.cfg.linear_only {
            0.5 * h1_seminorm(u).powi(2) - 0.5 * u.l2_norm().powi(2)
        } else {
            energy_from_grid(u, &self.grid, values)
        }
    }

    /// Runs from `state` until equilibrium, the horizon, or an abort. A
    /// state at step 0 contributes an initial record; later states continue
    /// a previous run without repeating its last record.
    pub fn run(&self, state: SemiflowState) -> Trajectory {
        let dt = self.cfg.dt;
        let stride = self.cfg.snapshot_stride as u64;
        let n_max = self.cfg.max_steps();
        let mut records = Vec::new();
        let mut snapshots = Vec::new();
        let mut stab_max = 0.0f64;

        let mut state = state;
        if let Err(e) = self.check(&state.u) {
            return Trajectory {
                records,
                snapshots,
                state,
                termination: Termination::Aborted(e),
                stab_max,
            };
        }
        if state.step == 0 && self.cfg.project_mean_zero {
            let m = mean(&state.u);
            state.u.shift(-m);
        }
        let mut values = self.grid.to_grid(&state.u);
        let mut e = self.energy_of(&state.u, &values);
        if state.step == 0 {
            let ut = match self.initial_rate(&state.u) {
                Ok(v) => v,
                Err(err) => {
                    return Trajectory {
                        records,
                        snapshots,
                        state,
                        termination: Termination::Aborted(err),
                        stab_max,
                    }
                }
            };
            records.push(self.record(0.0, &state.u, &values, e, ut));
            if self.cfg.field_stride > 0 {
                snapshots.push((0.0, state.u.clone()));
            }
            // a datum that is already stationary needs no step
            if ut < self.cfg.eq_tol {
                return Trajectory {
                    records,
                    snapshots,
                    state,
                    termination: Termination::Equilibrium { residual: ut },
                    stab_max: self.cfg.stab,
                };
            }
        }

        let mut termination = Termination::Horizon;
        while state.step < n_max {
            let t_now = state.time(dt);
            let (next, info) = match self.step_from_grid(&state.u, &values, t_now) {
                Ok(r) => r,
                Err(err) => {
                    termination = Termination::Aborted(err);
                    break;
                }
            };
            stab_max = stab_max.max(info.stab);
            let step = state.step + 1;
            let t = step as f64 * dt;
            let next_values = self.grid.to_grid(&next);
            let e_next = self.energy_of(&next, &next_values);
            let rate = next.lin_comb(1.0 / dt, &state.u, -1.0 / dt).expect("same space");
            let residual = match dual_norm_with(&rate, &self.lap) {
                Ok(r) => r,
                Err(err) => {
                    termination = Termination::Aborted(err);
                    break;
                }
            };
            let violated = !(e_next <= e + 1e-9 * (1.0 + e.abs()));
            let settled = residual < self.cfg.eq_tol;
            let last = violated || settled || step == n_max;
            if step % stride == 0 || last {
                records.push(self.record(t, &next, &next_values, e_next, residual));
            }
            let fields = self.cfg.field_stride as u64;
            if fields > 0 && (step % fields == 0 || last) {
                snapshots.push((t, next.clone()));
            }
            state = SemiflowState { step, u: next };
            values = next_values;
            let before = e;
            e = e_next;
            if violated {
                termination = Termination::Aborted(DynamicsError::StabilityViolated {
                    t,
                    before,
                    after: e_next,
                });
                break;
            }
            if settled {
                termination = Termination::Equilibrium { residual };
                break;
            }
        }
        Trajectory {
            records,
            snapshots,
            state,
            termination,
            stab_max,
        }
    }
}

/// Runs the semiflow from `u0` with `cfg` on `u0`'s mesh and cutoff.
pub fn run_semiflow(u0: Field, cfg: &StepperConfig) -> Result<Trajectory, DynamicsError> {
    let lap = Arc::new(ConeLaplacian::for_field(&u0));
    let stepper = Stepper::new(lap, cfg.clone())?;
    Ok(stepper.run(SemiflowState::initial(u0)))
}

/// `(‖(next − prev)/dt‖_{H₀⁻¹} < eq_tol, residual)`.
pub fn detect_equilibrium(
    prev: &Field,
    next: &Field,
    cfg: &StepperConfig,
) -> Result<(bool, f64), DynamicsError> {
    let lap = ConeLaplacian::for_field(next);
    let rate = next.lin_comb(1.0 / cfg.dt, prev, -1.0 / cfg.dt)?;
    let residual = dual_norm_with(&rate, &lap)?;
    Ok((residual < cfg.eq_tol, residual))
}
