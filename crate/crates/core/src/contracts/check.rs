use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;

use super::counterexample::Counterexample;
use super::input::CaseInput;
use crate::error::Result;
use crate::gen::rng;

/// The three proof obligations of a contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Obligation {
    /// `pre => post`
    PrePost,
    /// `pre => inv_before`
    PreInvariant,
    /// `inv_before => inv_after`
    InvariantPreserved,
}

impl Obligation {
    pub const ALL: [Obligation; 3] = [Obligation::PrePost, Obligation::PreInvariant, Obligation::InvariantPreserved];

    pub fn as_str(self) -> &'static str {
        match self {
            Obligation::PrePost => "pre=>post",
            Obligation::PreInvariant => "pre=>inv_before",
            Obligation::InvariantPreserved => "inv_before=>inv_after",
        }
    }

    pub fn from_str_name(s: &str) -> Option<Obligation> {
        Obligation::ALL.into_iter().find(|o| o.as_str() == s)
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undetermined => "UNDETERMINED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

type Pred<I> = Box<dyn Fn(&I) -> bool + Send + Sync>;
type Pred2<I, O> = Box<dyn Fn(&I, &O) -> bool + Send + Sync>;

/// Precondition, postcondition and a before/after invariant pair.
///
/// Unset predicates are trivially true.
pub struct Contract<I, O> {
    pub name: String,
    pre: Pred<I>,
    post: Pred2<I, O>,
    inv_before: Pred<I>,
    inv_after: Pred2<I, O>,
}

impl<I, O> Contract<I, O> {
    pub fn new(name: impl Into<String>) -> Contract<I, O> {
        Contract {
            name: name.into(),
            pre: Box::new(|_| true),
            post: Box::new(|_, _| true),
            inv_before: Box::new(|_| true),
            inv_after: Box::new(|_, _| true),
        }
    }

    pub fn pre(mut self, f: impl Fn(&I) -> bool + Send + Sync + 'static) -> Self {
        self.pre = Box::new(f);
        self
    }

    pub fn post(mut self, f: impl Fn(&I, &O) -> bool + Send + Sync + 'static) -> Self {
        self.post = Box::new(f);
        self
    }

    pub fn invariant(
        mut self,
        before: impl Fn(&I) -> bool + Send + Sync + 'static,
        after: impl Fn(&I, &O) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.inv_before = Box::new(before);
        self.inv_after = Box::new(after);
        self
    }

    pub fn precondition(&self, input: &I) -> bool {
        (self.pre)(input)
    }

    /// Run `op` on one input and report the first obligation it breaks.
    ///
    /// Inputs outside the precondition never violate anything.
    pub fn violation(&self, op: &dyn Fn(&I) -> Result<O>, input: &I) -> Option<Violation> {
        if !(self.pre)(input) {
            return None;
        }
        if !(self.inv_before)(input) {
            return Some(Violation::new(Obligation::PreInvariant, "invariant false on entry"));
        }
        let out = match catch_unwind(AssertUnwindSafe(|| op(input))) {
            Ok(Ok(o)) => o,
            Ok(Err(e)) => return Some(Violation::new(Obligation::PrePost, format!("error: {e}"))),
            Err(p) => {
                let msg = p
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| p.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".into());
                return Some(Violation::new(Obligation::PrePost, format!("panic: {msg}")));
            }
        };
        if !(self.post)(input, &out) {
            return Some(Violation::new(Obligation::PrePost, "postcondition false"));
        }
        if !(self.inv_after)(input, &out) {
            return Some(Violation::new(Obligation::InvariantPreserved, "invariant false on exit"));
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub obligation: Obligation,
    pub detail: String,
}

impl Violation {
    fn new(obligation: Obligation, detail: impl Into<String>) -> Violation {
        Violation {
            obligation,
            detail: detail.into(),
        }
    }
}

/// Where test inputs come from.
pub enum Cases<'a, I> {
    /// Every item is checked; running out of budget first is UNDETERMINED.
    Exhaustive(Box<dyn Iterator<Item = I> + 'a>),
    /// `count` accepted draws from a seeded generator.
    Random {
        count: usize,
        seed: u64,
        gen: Box<dyn FnMut(&mut ChaCha8Rng) -> I + 'a>,
    },
}

impl<'a, I> Cases<'a, I> {
    pub fn exhaustive(items: impl IntoIterator<Item = I> + 'a) -> Cases<'a, I> {
        Cases::Exhaustive(Box::new(items.into_iter()))
    }

    pub fn random(count: usize, seed: u64, gen: impl FnMut(&mut ChaCha8Rng) -> I + 'a) -> Cases<'a, I> {
        Cases::Random {
            count,
            seed,
            gen: Box::new(gen),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_cases: usize,
    pub time_cap: Duration,
    /// Rejected draws allowed per requested random case.
    pub rejection_factor: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cases: 1 << 20,
            time_cap: Duration::from_secs(60),
            rejection_factor: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObligationReport {
    pub op: String,
    pub obligation: Obligation,
    pub verdict: Verdict,
    pub cases: usize,
    pub elapsed: Duration,
}

impl ObligationReport {
    /// `CHECK <op> <obligation> <verdict> cases=<n> time=<ms>`; `time=-` without timings.
    pub fn line(&self, timings: bool) -> String {
        let time = if timings {
            format!("{}", self.elapsed.as_millis())
        } else {
            "-".into()
        };
        format!(
            "CHECK {} {} {} cases={} time={}",
            self.op, self.obligation, self.verdict, self.cases, time
        )
    }
}

#[derive(Debug, Clone)]
pub struct Failure<I> {
    /// The first failing input found.
    pub original: I,
    /// `original` after shrinking; still violates `violation.obligation`.
    pub input: I,
    pub violation: Violation,
    pub counterexample: Counterexample,
}

#[derive(Debug, Clone)]
pub struct ContractReport<I> {
    pub op: String,
    pub obligations: Vec<ObligationReport>,
    pub failure: Option<Failure<I>>,
}

impl<I> ContractReport<I> {
    pub fn verdict(&self) -> Verdict {
        let vs: Vec<Verdict> = self.obligations.iter().map(|o| o.verdict).collect();
        if vs.contains(&Verdict::Fail) {
            Verdict::Fail
        } else if vs.contains(&Verdict::Undetermined) {
            Verdict::Undetermined
        } else {
            Verdict::Pass
        }
    }

    pub fn cases(&self) -> usize {
        self.obligations.first().map_or(0, |o| o.cases)
    }

    pub fn lines(&self, timings: bool) -> Vec<String> {
        self.obligations.iter().map(|o| o.line(timings)).collect()
    }
}

const SHRINK_STEPS: usize = 10_000;

/// Greedy shrinking: take the first smaller candidate that still breaks `ob`.
pub fn minimize<I: CaseInput, O>(contract: &Contract<I, O>, op: &dyn Fn(&I) -> Result<O>, input: I, ob: Obligation) -> I {
    let mut cur = input;
    for _ in 0..SHRINK_STEPS {
        let next = cur
            .shrink()
            .into_iter()
            .find(|c| contract.violation(op, c).is_some_and(|v| v.obligation == ob));
        match next {
            Some(c) => cur = c,
            None => break,
        }
    }
    cur
}

/// Check all three obligations of `contract` for `op` over `cases`.
///
/// Stops at the first violation, which is shrunk and reported; the
/// obligations it did not get to finish are UNDETERMINED.
pub fn check_contract<I: CaseInput, O>(
    op_name: &str,
    op: &dyn Fn(&I) -> Result<O>,
    contract: &Contract<I, O>,
    cases: Cases<'_, I>,
    budget: &Budget,
) -> ContractReport<I> {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut complete = true;
    let mut failure = None;

    let visit = |input: I, checked: &mut usize| -> Option<Failure<I>> {
        *checked += 1;
        let v = contract.violation(op, &input)?;
        let small = minimize(contract, op, input.clone(), v.obligation);
        let violation = contract.violation(op, &small).unwrap_or_else(|| v.clone());
        let counterexample = Counterexample::from_input(op_name, &violation, &small);
        Some(Failure {
            original: input,
            input: small,
            violation,
            counterexample,
        })
    };

    match cases {
        Cases::Exhaustive(items) => {
            for input in items {
                if checked >= budget.max_cases || start.elapsed() > budget.time_cap {
                    complete = false;
                    break;
                }
                if !contract.precondition(&input) {
                    continue;
                }
                if let Some(f) = visit(input, &mut checked) {
                    failure = Some(f);
                    break;
                }
            }
        }
        Cases::Random { count, seed, mut gen } => {
            let mut r = rng(seed);
            let mut rejected = 0usize;
            while checked < count.min(budget.max_cases) {
                if start.elapsed() > budget.time_cap || rejected > count.saturating_mul(budget.rejection_factor) {
                    complete = false;
                    break;
                }
                let input = gen(&mut r);
                if !contract.precondition(&input) {
                    rejected += 1;
                    continue;
                }
                if let Some(f) = visit(input, &mut checked) {
                    failure = Some(f);
                    break;
                }
            }
            complete &= failure.is_some() || checked >= count;
        }
    }

    let elapsed = start.elapsed();
    let obligations = Obligation::ALL
        .into_iter()
        .map(|ob| {
            let verdict = match &failure {
                Some(f) if f.violation.obligation == ob => Verdict::Fail,
                Some(_) => Verdict::Undetermined,
                None if complete => Verdict::Pass,
                None => Verdict::Undetermined,
            };
            ObligationReport {
                op: op_name.to_string(),
                obligation: ob,
                verdict,
                cases: checked,
                elapsed,
            }
        })
        .collect();
    ContractReport {
        op: op_name.to_string(),
        obligations,
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn square(x: &usize) -> Result<usize> {
        Ok(x * x)
    }

    #[test]
    fn passing_contract_reports_three_passes() {
        let c = Contract::new("square").post(|x: &usize, y: &usize| *y >= *x);
        let r = check_contract("square", &square, &c, Cases::exhaustive(0..50usize), &Budget::default());
        assert_eq!(r.verdict(), Verdict::Pass);
        assert_eq!(r.cases(), 50);
        assert_eq!(r.lines(false)[0], "CHECK square pre=>post PASS cases=50 time=-");
    }

    #[test]
    fn failure_is_shrunk_and_replayable() {
        let c = Contract::new("square").post(|x: &usize, y: &usize| *y < 400 || *x > 100);
        let r = check_contract("square", &square, &c, Cases::exhaustive(0..100usize), &Budget::default());
        assert_eq!(r.verdict(), Verdict::Fail);
        let f = r.failure.unwrap();
        assert_eq!(f.input, 20);
        assert!(c.violation(&square, &f.input).is_some());
    }

    #[test]
    fn errors_and_panics_fail_pre_post() {
        let c: Contract<usize, usize> = Contract::new("boom");
        let erring = |_: &usize| -> Result<usize> { Err(Error::StepLimit(1)) };
        let v = c.violation(&erring, &3).unwrap();
        assert_eq!(v.obligation, Obligation::PrePost);
        let panicking = |_: &usize| -> Result<usize> { panic!("no") };
        assert!(c.violation(&panicking, &3).unwrap().detail.contains("no"));
    }

    #[test]
    fn exhausted_budget_is_undetermined() {
        let c = Contract::new("square");
        let budget = Budget {
            max_cases: 10,
            ..Budget::default()
        };
        let r = check_contract("square", &square, &c, Cases::exhaustive(0..100usize), &budget);
        assert_eq!(r.verdict(), Verdict::Undetermined);
    }

    #[test]
    fn rejection_sampling_respects_precondition() {
        let c = Contract::new("square")
            .pre(|x: &usize| x % 2 == 0)
            .post(|x: &usize, _: &usize| x % 2 == 0);
        let cases = Cases::random(40, 1, |r| rand::Rng::gen_range(r, 0..1000usize));
        let r = check_contract("square", &square, &c, cases, &Budget::default());
        assert_eq!(r.verdict(), Verdict::Pass);
        assert_eq!(r.cases(), 40);
    }

    #[test]
    fn invariant_obligations_are_distinguished() {
        let c = Contract::new("square").invariant(|x: &usize| *x != 7, |_: &usize, y: &usize| *y != 64);
        assert_eq!(c.violation(&square, &7).unwrap().obligation, Obligation::PreInvariant);
        assert_eq!(c.violation(&square, &8).unwrap().obligation, Obligation::InvariantPreserved);
    }
}
