//! Full-batch gradient descent with momentum and an adaptive learning rate.
//!
//! Each epoch proposes `Δ ← m·Δ − (1−m)·lr·∇mse`. A proposal whose mse
//! exceeds `max_perf_inc` times the current one is thrown away, the momentum
//! memory is cleared and `lr` shrinks by `lr_dec`; otherwise it is kept and
//! `lr` grows by `lr_inc` if the mse actually went down.

use crate::error::{Error, Result};
use crate::features::Layout;
use crate::scalar::Scalar;

use super::{Gradients, MlpModel, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T> {
    pub lr0: T,
    pub momentum: T,
    pub lr_inc: T,
    pub lr_dec: T,
    pub max_perf_inc: T,
    pub max_epochs: usize,
    pub goal_mse: T,
    /// Seed for weight initialization when training from scratch.
    pub seed: u64,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            lr0: T::lit(0.01),
            momentum: T::lit(0.9),
            lr_inc: T::lit(1.05),
            lr_dec: T::lit(0.7),
            max_perf_inc: T::lit(1.04),
            max_epochs: 5000,
            goal_mse: T::lit(1e-3),
            seed: 0,
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lr0 > T::zero()
            && self.momentum >= T::zero()
            && self.momentum < T::one()
            && self.lr_dec > T::zero()
            && self.lr_dec < T::one()
            && self.lr_inc > T::one()
            && self.max_perf_inc > T::one()
            && self.goal_mse >= T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::BadConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    GoalMet,
    MaxEpochs,
}

/// One epoch: the mse after it, the learning rate its step used, and
/// whether the step was kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainRecord<T> {
    pub epoch: usize,
    pub mse: T,
    pub lr: T,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory<T> {
    pub initial_mse: T,
    pub records: Vec<TrainRecord<T>>,
    pub stop_reason: StopReason,
}

impl<T: Scalar> TrainHistory<T> {
    pub fn final_mse(&self) -> T {
        self.records.last().map_or(self.initial_mse, |r| r.mse)
    }

    pub fn epochs(&self) -> usize {
        self.records.len()
    }
}

/// Trains `model` in place.
///
/// On `NonFiniteLoss` the model keeps the last parameters with a finite mse.
pub fn train<T: Scalar>(
    model: &mut MlpModel<T>,
    data: &[Sample<T>],
    config: &TrainConfig<T>,
) -> Result<TrainHistory<T>> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let (mut perf, mut grad) = model.loss_and_gradients(data)?;
    if !perf.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: 0 });
    }
    let initial_mse = perf;
    let mut records = Vec::new();
    if perf <= config.goal_mse {
        return Ok(TrainHistory {
            initial_mse,
            records,
            stop_reason: StopReason::GoalMet,
        });
    }

    let mut lr = config.lr0;
    let mut step = Gradients::zeros_like(model);
    let mut candidate = model.clone();
    let keep = T::one() - config.momentum;

    for epoch in 1..=config.max_epochs {
        let scale = keep * lr;
        for ((d, &g), (c, &p)) in step.iter_mut().zip(grad.iter()).zip(
            candidate
                .layers_mut()
                .iter_mut()
                .flat_map(|l| l.params_mut())
                .zip(model.layers().iter().flat_map(|l| l.params())),
        ) {
            *d = config.momentum * *d - scale * g;
            *c = p + *d;
        }

        let (new_perf, new_grad) = candidate.loss_and_gradients(data)?;
        if !new_perf.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }

        if new_perf > perf * config.max_perf_inc {
            step.iter_mut().for_each(|d| *d = T::zero());
            records.push(TrainRecord {
                epoch,
                mse: perf,
                lr,
                accepted: false,
            });
            lr = lr * config.lr_dec;
        } else {
            std::mem::swap(model, &mut candidate);
            records.push(TrainRecord {
                epoch,
                mse: new_perf,
                lr,
                accepted: true,
            });
            if new_perf < perf {
                lr = lr * config.lr_inc;
            }
            perf = new_perf;
            grad = new_grad;
        }

        if perf <= config.goal_mse {
            return Ok(TrainHistory {
                initial_mse,
                records,
                stop_reason: StopReason::GoalMet,
            });
        }
    }

    Ok(TrainHistory {
        initial_mse,
        records,
        stop_reason: StopReason::MaxEpochs,
    })
}

/// Initializes a standard network for `layout` from `config.seed` and
/// trains it.
pub fn fit<T: Scalar>(
    layout: Layout,
    data: &[Sample<T>],
    config: &TrainConfig<T>,
) -> Result<(MlpModel<T>, TrainHistory<T>)> {
    let mut model = MlpModel::for_layout(layout, config.seed)?;
    let history = train(&mut model, data, config)?;
    Ok((model, history))
}
