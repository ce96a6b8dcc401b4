use std::ops::ControlFlow;

use super::counterexample::Counterexample;
use super::input::CaseInput;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonoDirection {
    Decreasing,
    Increasing,
}

/// An integer loop measure that must strictly move in `direction` every iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monotone {
    pub name: String,
    pub direction: MonoDirection,
    /// Lower bound for a decreasing measure, upper bound for an increasing one.
    pub bound: Option<i64>,
}

impl Monotone {
    pub fn decreasing(name: impl Into<String>) -> Monotone {
        Monotone {
            name: name.into(),
            direction: MonoDirection::Decreasing,
            bound: None,
        }
    }

    pub fn increasing(name: impl Into<String>) -> Monotone {
        Monotone {
            name: name.into(),
            direction: MonoDirection::Increasing,
            bound: None,
        }
    }

    pub fn with_bound(mut self, bound: i64) -> Monotone {
        self.bound = Some(bound);
        self
    }

    fn progressed(&self, prev: i64, cur: i64) -> bool {
        match self.direction {
            MonoDirection::Decreasing => cur < prev,
            MonoDirection::Increasing => cur > prev,
        }
    }

    fn in_bounds(&self, m: i64) -> bool {
        match (self.direction, self.bound) {
            (_, None) => true,
            (MonoDirection::Decreasing, Some(b)) => m >= b,
            (MonoDirection::Increasing, Some(b)) => m <= b,
        }
    }
}

/// The iteration whose body failed to move the measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stall {
    pub iteration: usize,
    pub before: i64,
    pub after: i64,
}

/// Watches the values a loop emits.
///
/// The loop emits its measure before each iteration and once after exit,
/// so iteration `k` is judged by emissions `k` and `k + 1`.
#[derive(Debug, Clone)]
pub struct MonotoneMonitor {
    mono: Monotone,
    last: Option<i64>,
    emissions: usize,
    stall: Option<Stall>,
}

impl MonotoneMonitor {
    pub fn new(mono: Monotone) -> MonotoneMonitor {
        MonotoneMonitor {
            mono,
            last: None,
            emissions: 0,
            stall: None,
        }
    }

    /// Record one value. Breaks on the first stall.
    pub fn observe(&mut self, m: i64) -> Result<ControlFlow<Stall>> {
        if !self.mono.in_bounds(m) {
            return Err(Error::MeasureOverflow(format!("{} = {m} passes its bound", self.mono.name)));
        }
        let prev = self.last.replace(m);
        self.emissions += 1;
        if let Some(p) = prev {
            if !self.mono.progressed(p, m) {
                let s = Stall {
                    iteration: self.emissions - 2,
                    before: p,
                    after: m,
                };
                self.stall.get_or_insert(s);
                return Ok(ControlFlow::Break(s));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Completed iterations seen so far.
    pub fn iterations(&self) -> usize {
        self.emissions.saturating_sub(1)
    }

    pub fn stall(&self) -> Option<Stall> {
        self.stall
    }

    pub fn monotone(&self) -> &Monotone {
        &self.mono
    }
}

#[derive(Debug, Clone)]
pub enum MonotoneVerdict<I> {
    Pass { runs: usize, iterations: usize },
    Stall { input: I, stall: Stall, counterexample: Counterexample },
}

impl<I> MonotoneVerdict<I> {
    pub fn is_pass(&self) -> bool {
        matches!(self, MonotoneVerdict::Pass { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            MonotoneVerdict::Pass { .. } => "PASS",
            MonotoneVerdict::Stall { .. } => "STALL",
        }
    }
}

/// A loop body driven externally: it calls `emit` with the measure and
/// stops when `emit` breaks.
pub type Emit<'a> = dyn FnMut(i64) -> ControlFlow<()> + 'a;

/// Run an instrumented loop on every input; STALL on the first iteration
/// that does not strictly move the measure.
pub fn check_monotone<I: CaseInput>(
    op: &str,
    runner: &dyn Fn(&I, &mut Emit<'_>) -> Result<()>,
    mono: &Monotone,
    inputs: impl IntoIterator<Item = I>,
) -> Result<MonotoneVerdict<I>> {
    let mut runs = 0;
    let mut iterations = 0;
    for input in inputs {
        let mut monitor = MonotoneMonitor::new(mono.clone());
        let mut err = None;
        {
            let mut emit = |m: i64| match monitor.observe(m) {
                Ok(ControlFlow::Continue(())) => ControlFlow::Continue(()),
                Ok(ControlFlow::Break(_)) => ControlFlow::Break(()),
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            };
            runner(&input, &mut emit)?;
        }
        if let Some(e) = err {
            return Err(e);
        }
        runs += 1;
        iterations += monitor.iterations();
        if let Some(stall) = monitor.stall() {
            let mut ce = Counterexample::new(
                op,
                mono.name.as_str(),
                format!("measure went {} -> {} at iteration {}", stall.before, stall.after, stall.iteration),
            );
            ce.circuit = input.circuit();
            ce.coupling = input.coupling();
            ce.layout = input.layout();
            ce.iteration = Some(stall.iteration);
            return Ok(MonotoneVerdict::Stall {
                input,
                stall,
                counterexample: ce,
            });
        }
    }
    Ok(MonotoneVerdict::Pass { runs, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn countdown(n: &usize, emit: &mut Emit<'_>) -> Result<()> {
        let mut k = *n as i64;
        loop {
            if emit(k).is_break() || k == 0 {
                return Ok(());
            }
            k -= if k == 7 { 0 } else { 1 };
        }
    }

    #[test]
    fn decreasing_loop_passes() {
        let v = check_monotone("countdown", &countdown, &Monotone::decreasing("k"), 0..7usize).unwrap();
        assert!(matches!(v, MonotoneVerdict::Pass { runs: 7, iterations: 21 }));
    }

    #[test]
    fn stuck_loop_stalls_and_stops() {
        let v = check_monotone("countdown", &countdown, &Monotone::decreasing("k"), [9usize]).unwrap();
        let MonotoneVerdict::Stall { stall, counterexample, .. } = v else {
            panic!("expected a stall");
        };
        assert_eq!(stall, Stall { iteration: 2, before: 7, after: 7 });
        assert_eq!(counterexample.iteration, Some(2));
    }

    #[test]
    fn empty_loop_is_vacuous() {
        let none = |_: &usize, _: &mut Emit<'_>| Ok(());
        let v = check_monotone("noop", &none, &Monotone::decreasing("k"), [0usize]).unwrap();
        assert!(v.is_pass());
    }

    #[test]
    fn bound_violation_is_an_error() {
        let mono = Monotone::decreasing("k").with_bound(0);
        let under = |_: &usize, emit: &mut Emit<'_>| {
            let _ = emit(1);
            let _ = emit(-1);
            Ok(())
        };
        assert!(matches!(check_monotone("under", &under, &mono, [0usize]), Err(Error::MeasureOverflow(_))));
    }

    #[test]
    fn increasing_direction() {
        let mut m = MonotoneMonitor::new(Monotone::increasing("-remaining"));
        assert!(m.observe(-3).unwrap().is_continue());
        assert!(m.observe(-2).unwrap().is_continue());
        assert!(m.observe(-2).unwrap().is_break());
        assert_eq!(m.stall().unwrap().iteration, 1);
    }
}
