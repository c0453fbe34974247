//! Horns, the matching condition, and the Maltsev recursion that lifts horns
//! along surjective homomorphisms of simplicial algebras.
//!
//! For a horn `(x_i)_{i≠k}` in `X_{n-1}` over `y ∈ Y_n`, start from any
//! `w_{-1}` with `f(w_{-1}) = y`, then
//!
//! ```text
//! w_j = [w_{j-1}, s_j d_j w_{j-1}, s_j x_j]          0 <= j < k
//! w_{n+1} = w_{k-1}
//! w_j = [w_{j+1}, s_{j-1} d_j w_{j+1}, s_{j-1} x_j]   n >= j > k
//! ```
//!
//! where `[_,_,_]` is the Maltsev term of `X_n`. The answer is `w_{k+1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::simplicial::{SimplicialHom, TruncatedSimplicialAlgebra};
use crate::theory::{CompiledTerm, Elem, TheoryError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Invariant {
    /// `f(w_j) = y`
    OverY,
    /// Ascending step `j`: `d_i w_j = x_i` for `i <= j`.
    Ascending,
    /// Descending step `j`: `d_i w_j = x_i` for `i < k` and `i >= j`.
    Descending,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::OverY => "f(w_j) = y",
            Invariant::Ascending => "d_i w_j = x_i for i <= j",
            Invariant::Descending => "d_i w_j = x_i for i < k or i >= j",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HornError {
    #[error("dimension {n} outside 1..={top}")]
    DimensionOutOfRange { n: usize, top: usize },
    #[error("missing index {k} outside 0..={n}")]
    MissingIndexOutOfRange { n: usize, k: usize },
    #[error("face index {i} is invalid for a ({n},{k})-horn")]
    BadFaceIndex { n: usize, k: usize, i: usize },
    #[error("face {i} given twice")]
    DuplicateFace { i: usize },
    #[error("face {i} missing")]
    MissingFace { i: usize },
    #[error("element {value} outside level {level} of size {carrier}")]
    ElementOutOfRange { level: usize, value: Elem, carrier: usize },
    #[error("faces {i} and {j} do not match: d_{i} x_{j} != d_{jm1} x_{i}", jm1 = .j - 1)]
    MatchingViolation { i: usize, j: usize },
    #[error("d_{i} y does not equal f(x_{i})")]
    NotOverY { i: usize },
    #[error("y = {y} has no preimage in level {n}")]
    NoPreimage { n: usize, y: Elem },
    #[error("starting element {w} does not lie over y")]
    StartNotOverY { w: Elem },
    #[error("level {n} carries no Maltsev term")]
    MissingMaltsevTerm { n: usize },
    #[error("invariant {invariant} fails at step j={j}, face {i}")]
    InvariantViolation { invariant: Invariant, j: isize, i: usize },
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// An `(n, k)`-horn: faces `x_i ∈ X_{n-1}` for every `i ≠ k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Horn {
    n: usize,
    k: usize,
    faces: Vec<Option<Elem>>,
}

impl Horn {
    pub fn new(n: usize, k: usize, faces: impl IntoIterator<Item = (usize, Elem)>) -> Result<Self, HornError> {
        if n == 0 {
            return Err(HornError::DimensionOutOfRange { n, top: usize::MAX });
        }
        if k > n {
            return Err(HornError::MissingIndexOutOfRange { n, k });
        }
        let mut slots = vec![None; n + 1];
        for (i, x) in faces {
            if i > n || i == k {
                return Err(HornError::BadFaceIndex { n, k, i });
            }
            if slots[i].replace(x).is_some() {
                return Err(HornError::DuplicateFace { i });
            }
        }
        if let Some(i) = (0..=n).find(|&i| i != k && slots[i].is_none()) {
            return Err(HornError::MissingFace { i });
        }
        Ok(Horn { n, k, faces: slots })
    }

    /// The horn formed by the faces `d_i w`, `i ≠ k`, of an `n`-simplex.
    pub fn of_simplex(x: &TruncatedSimplicialAlgebra, n: usize, k: usize, w: Elem) -> Result<Self, HornError> {
        check_dimension(x, n)?;
        Horn::new(n, k, (0..=n).filter(|&i| i != k).map(|i| (i, x.d(n, i, w))))
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn missing(&self) -> usize {
        self.k
    }

    /// `x_i`; panics for `i = k`.
    pub fn face(&self, i: usize) -> Elem {
        self.faces[i].expect("the missing face has no value")
    }

    /// `(i, x_i)` in ascending `i`.
    pub fn faces(&self) -> impl Iterator<Item = (usize, Elem)> + '_ {
        self.faces.iter().enumerate().filter_map(|(i, x)| x.map(|x| (i, x)))
    }
}

fn check_dimension(x: &TruncatedSimplicialAlgebra, n: usize) -> Result<(), HornError> {
    if n == 0 || n > x.top() {
        return Err(HornError::DimensionOutOfRange { n, top: x.top() });
    }
    Ok(())
}

fn check_elements(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Result<(), HornError> {
    check_dimension(x, horn.n)?;
    let level = x.level(horn.n - 1);
    for (_, value) in horn.faces() {
        if !level.contains(value) {
            return Err(HornError::ElementOutOfRange { level: horn.n - 1, value, carrier: level.carrier() });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchingReport {
    pub ok: bool,
    /// Smallest `(i, j)` with `d_i x_j ≠ d_{j-1} x_i`.
    pub violation: Option<(usize, usize)>,
}

/// Checks `d_i x_j = d_{j-1} x_i` for all `i < j` with `i, j ≠ k`.
pub fn check_matching(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Result<MatchingReport, HornError> {
    check_elements(x, horn)?;
    let n = horn.n;
    if n >= 2 {
        for i in 0..=n {
            for j in i + 1..=n {
                if i == horn.k || j == horn.k {
                    continue;
                }
                if x.d(n - 1, i, horn.face(j)) != x.d(n - 1, j - 1, horn.face(i)) {
                    return Ok(MatchingReport { ok: false, violation: Some((i, j)) });
                }
            }
        }
    }
    Ok(MatchingReport { ok: true, violation: None })
}

fn require_matching(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Result<(), HornError> {
    match check_matching(x, horn)?.violation {
        Some((i, j)) => Err(HornError::MatchingViolation { i, j }),
        None => Ok(()),
    }
}

/// A horn in `f.source()` lying over `y ∈ Y_n`.
#[derive(Clone, Debug)]
pub struct LiftProblem<'a> {
    pub hom: &'a SimplicialHom,
    pub horn: Horn,
    pub y: Elem,
}

impl<'a> LiftProblem<'a> {
    pub fn new(hom: &'a SimplicialHom, horn: Horn, y: Elem) -> Self {
        LiftProblem { hom, horn, y }
    }

    /// Checks element ranges, matching faces and `d_i y = f(x_i)`.
    pub fn check(&self) -> Result<(), HornError> {
        let x = self.hom.source();
        require_matching(x, &self.horn)?;
        let n = self.horn.n;
        let target = self.hom.target();
        if !target.level(n).contains(self.y) {
            return Err(HornError::ElementOutOfRange { level: n, value: self.y, carrier: target.level(n).carrier() });
        }
        for (i, xi) in self.horn.faces() {
            if target.d(n, i, self.y) != self.hom.apply(n - 1, xi) {
                return Err(HornError::NotOverY { i });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Ascending,
    Turnaround,
    Descending,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Ascending => "ascending",
            Phase::Turnaround => "turnaround",
            Phase::Descending => "descending",
        })
    }
}

/// One intermediate simplex `w_j`. The starting element is recorded as
/// `j = -1` in the ascending phase and `w_{n+1}` as the turnaround.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    pub j: isize,
    pub w: Elem,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub x: Elem,
    pub trace: Option<Vec<TraceEntry>>,
}

/// Runs the recursion from `start`. With `over = Some((f, y))` and `trace`
/// set, every step is checked against the invariants.
fn recursion(
    x: &TruncatedSimplicialAlgebra,
    horn: &Horn,
    start: Elem,
    over: Option<(&SimplicialHom, Elem)>,
    trace: bool,
) -> Result<Lift, HornError> {
    let (n, k) = (horn.n, horn.k);
    let level = x.level(n);
    let term = level.maltsev_term().ok_or(HornError::MissingMaltsevTerm { n })?;
    let maltsev = CompiledTerm::compile(level.signature(), term)?;
    let mut stack = Vec::new();
    let mut bracket = |a: Elem, b: Elem, c: Elem| maltsev.eval(level, &[a, b, c], &mut stack);

    let mut entries = trace.then(Vec::new);
    let mut record = |j: isize, w: Elem, phase: Phase| -> Result<(), HornError> {
        let Some(entries) = entries.as_mut() else { return Ok(()) };
        entries.push(TraceEntry { j, w, phase });
        if let Some((f, y)) = over {
            if f.apply(n, w) != y {
                return Err(HornError::InvariantViolation { invariant: Invariant::OverY, j, i: 0 });
            }
        }
        let expected = |i: usize| -> Result<(), HornError> {
            if x.d(n, i, w) != horn.face(i) {
                let invariant = if phase == Phase::Ascending { Invariant::Ascending } else { Invariant::Descending };
                return Err(HornError::InvariantViolation { invariant, j, i });
            }
            Ok(())
        };
        match phase {
            Phase::Ascending if j >= 0 => (0..=j as usize).try_for_each(expected),
            Phase::Descending => (0..k).chain(j as usize..=n).try_for_each(expected),
            _ => Ok(()),
        }
    };

    let mut w = start;
    record(-1, w, Phase::Ascending)?;
    for j in 0..k {
        w = bracket(w, x.s(n - 1, j, x.d(n, j, w)), x.s(n - 1, j, horn.face(j)));
        record(j as isize, w, Phase::Ascending)?;
    }
    // w now holds w_{k-1}, which is also w_{n+1}.
    record(n as isize + 1, w, Phase::Turnaround)?;
    for j in (k + 1..=n).rev() {
        w = bracket(w, x.s(n - 1, j - 1, x.d(n, j, w)), x.s(n - 1, j - 1, horn.face(j)));
        record(j as isize, w, Phase::Descending)?;
    }
    Ok(Lift { x: w, trace: entries })
}

/// Lifts the horn along `f`, starting from the smallest element of the
/// fiber over `y`. With `trace`, returns every `w_j` and checks the
/// invariants at each step.
pub fn lift_horn(problem: &LiftProblem<'_>, trace: bool) -> Result<Lift, HornError> {
    let n = problem.horn.n;
    check_dimension(problem.hom.source(), n)?;
    if !problem.hom.target().level(n).contains(problem.y) {
        let carrier = problem.hom.target().level(n).carrier();
        return Err(HornError::ElementOutOfRange { level: n, value: problem.y, carrier });
    }
    let start =
        problem.hom.map(n).iter().position(|&v| v == problem.y).ok_or(HornError::NoPreimage { n, y: problem.y })?
            as Elem;
    lift_horn_from(problem, start, trace)
}

/// As [`lift_horn`] with an explicit `w_{-1}`, which must lie over `y`.
pub fn lift_horn_from(problem: &LiftProblem<'_>, start: Elem, trace: bool) -> Result<Lift, HornError> {
    problem.check()?;
    let (hom, n) = (problem.hom, problem.horn.n);
    if !hom.source().level(n).contains(start) || hom.apply(n, start) != problem.y {
        return Err(HornError::StartNotOverY { w: start });
    }
    recursion(hom.source(), &problem.horn, start, Some((hom, problem.y)), trace)
}

/// Fills a horn in a simplicial algebra with a Maltsev term, starting from
/// `s_0 x_0` (or `s_0 x_1` when `k = 0`).
pub fn fill_horn(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Result<Elem, HornError> {
    require_matching(x, horn)?;
    recursion(x, horn, fill_start(x, horn), None, false).map(|lift| lift.x)
}

/// As [`fill_horn`], returning the trace and checking the face invariants.
pub fn fill_horn_traced(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Result<Lift, HornError> {
    require_matching(x, horn)?;
    recursion(x, horn, fill_start(x, horn), None, true)
}

/// The starting simplex used by [`fill_horn`].
pub fn fill_start(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Elem {
    let first = if horn.k == 0 { 1 } else { 0 };
    x.s(horn.n - 1, 0, horn.face(first))
}

/// `f_n(x) = y` and `d_i x = x_i` for every `i ≠ k`.
pub fn verify_lift(problem: &LiftProblem<'_>, x: Elem) -> bool {
    let n = problem.horn.n;
    let source = problem.hom.source();
    if n == 0 || n > source.top() || !source.level(n).contains(x) {
        return false;
    }
    problem.hom.apply(n, x) == problem.y && problem.horn.faces().all(|(i, xi)| source.d(n, i, x) == xi)
}
