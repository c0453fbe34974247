//! Brute-force ground truth for horn filling and lifting.
//!
//! Nothing here calls into the Maltsev recursion except the optional
//! cross-check in [`verify_fibration`]; solutions are found by scanning
//! whole levels.

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::horn::{lift_horn, Horn, HornError, LiftProblem};
use crate::simplicial::{CircleElement, SimplicialHom, TruncatedSimplicialAlgebra};
use crate::theory::{Elem, Term};

/// Default cap on `Σ_n |Y_n|·|X_{n-1}|^n` for [`verify_fibration`].
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("dimension {n} outside 1..={top}")]
    DimensionOutOfRange { n: usize, top: usize },
    #[error("enumeration needs {required} candidate evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error(transparent)]
    Horn(#[from] HornError),
}

/// All `x ∈ X_n` with `d_i x = x_i` for `i ≠ k`, ascending.
pub fn brute_fill(x: &TruncatedSimplicialAlgebra, horn: &Horn) -> Result<Vec<Elem>, OracleError> {
    let n = horn.dimension();
    if n == 0 || n > x.top() {
        return Err(OracleError::DimensionOutOfRange { n, top: x.top() });
    }
    Ok((0..x.level(n).carrier() as Elem).filter(|&w| horn.faces().all(|(i, xi)| x.d(n, i, w) == xi)).collect())
}

/// All `x ∈ X_n` with `f(x) = y` and `d_i x = x_i` for `i ≠ k`, ascending.
/// Does not require `f` to be surjective.
pub fn brute_lift(problem: &LiftProblem<'_>) -> Vec<Elem> {
    let source = problem.hom.source();
    let n = problem.horn.dimension();
    if n == 0 || n > source.top() {
        return Vec::new();
    }
    (0..source.level(n).carrier() as Elem)
        .filter(|&w| problem.hom.apply(n, w) == problem.y)
        .filter(|&w| problem.horn.faces().all(|(i, xi)| source.d(n, i, w) == xi))
        .collect()
}

/// A lift problem in flattened form: dimension, missing index, `y`, faces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HornRecord {
    pub n: usize,
    pub k: usize,
    pub y: Elem,
    pub faces: Vec<(usize, Elem)>,
}

impl HornRecord {
    fn new(y: Elem, horn: &Horn) -> Self {
        HornRecord { n: horn.dimension(), k: horn.missing(), y, faces: horn.faces().collect() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FibrationReport {
    /// Lift problems enumerated.
    pub checked_horns: u64,
    /// Problems without any solution, in enumeration order.
    pub failures: Vec<HornRecord>,
    /// Problems on which the constructive lift was run.
    pub lifts_checked: u64,
    /// Problems where the constructive lift failed or returned an element
    /// outside the brute-force solution set.
    pub lift_disagreements: Vec<HornRecord>,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FibrationOptions {
    pub budget: u64,
    /// Spread `(n, k, y)` blocks over the rayon pool (needs the `parallel`
    /// feature). The report is identical either way.
    pub parallel: bool,
}

impl Default for FibrationOptions {
    fn default() -> Self {
        FibrationOptions { budget: DEFAULT_BUDGET, parallel: false }
    }
}

/// `Σ_{n=1}^{max_dim} |Y_n|·|X_{n-1}|^n`, saturating.
pub fn enumeration_cost(f: &SimplicialHom, max_dim: usize) -> u128 {
    (1..=max_dim).fold(0u128, |acc, n| {
        let y = f.target().level(n).carrier() as u128;
        let x = f.source().level(n - 1).carrier() as u128;
        let per = x.checked_pow(n as u32).unwrap_or(u128::MAX);
        acc.saturating_add(y.saturating_mul(per))
    })
}

/// Enumerates every lift problem of `f` in dimensions `1..=max_dim`: all
/// `k`, all `y ∈ Y_n`, and every matching face tuple with `d_i y = f(x_i)`.
/// Face tuples are built by backtracking over ascending `i`, choosing `x_i`
/// from the fiber over `d_i y`.
pub struct LiftProblemSpace<'a> {
    hom: &'a SimplicialHom,
    max_dim: usize,
    fibers: Vec<Vec<Vec<Elem>>>,
}

impl<'a> LiftProblemSpace<'a> {
    pub fn new(hom: &'a SimplicialHom, max_dim: usize) -> Result<Self, OracleError> {
        let top = hom.source().top();
        if max_dim == 0 || max_dim > top {
            return Err(OracleError::DimensionOutOfRange { n: max_dim, top });
        }
        let fibers = (0..max_dim)
            .map(|n| {
                let mut by_target = vec![Vec::new(); hom.target().level(n).carrier()];
                for (x, &y) in hom.map(n).iter().enumerate() {
                    by_target[y as usize].push(x as Elem);
                }
                by_target
            })
            .collect();
        Ok(LiftProblemSpace { hom, max_dim, fibers })
    }

    /// `(n, k, y)` in lexicographic order.
    pub fn blocks(&self) -> Vec<(usize, usize, Elem)> {
        let mut blocks = Vec::new();
        for n in 1..=self.max_dim {
            for k in 0..=n {
                for y in 0..self.hom.target().level(n).carrier() as Elem {
                    blocks.push((n, k, y));
                }
            }
        }
        blocks
    }

    /// Calls `visit` on every horn of the block in lexicographic face order.
    pub fn for_each_horn(&self, (n, k, y): (usize, usize, Elem), mut visit: impl FnMut(Horn)) {
        let mut chosen: Vec<Option<Elem>> = vec![None; n + 1];
        self.extend(n, k, y, 0, &mut chosen, &mut visit);
    }

    fn extend(
        &self,
        n: usize,
        k: usize,
        y: Elem,
        i: usize,
        chosen: &mut Vec<Option<Elem>>,
        visit: &mut impl FnMut(Horn),
    ) {
        if i > n {
            let horn = Horn::new(n, k, chosen.iter().enumerate().filter_map(|(i, x)| x.map(|x| (i, x))))
                .expect("enumerated horns are well formed");
            visit(horn);
            return;
        }
        if i == k {
            return self.extend(n, k, y, i + 1, chosen, visit);
        }
        let x = self.hom.source();
        let over = self.hom.target().d(n, i, y) as usize;
        for &candidate in &self.fibers[n - 1][over] {
            // matching with every earlier face: d_h x_i = d_{i-1} x_h
            let compatible = (0..i).filter(|&h| h != k).all(|h| {
                let xh = chosen[h].expect("earlier faces are chosen");
                x.d(n - 1, h, candidate) == x.d(n - 1, i - 1, xh)
            });
            if compatible {
                chosen[i] = Some(candidate);
                self.extend(n, k, y, i + 1, chosen, visit);
            }
        }
        chosen[i] = None;
    }

    /// Every problem as `(horn, y)`, in block order.
    pub fn problems(&self) -> Vec<(Horn, Elem)> {
        let mut out = Vec::new();
        for block in self.blocks() {
            self.for_each_horn(block, |horn| out.push((horn, block.2)));
        }
        out
    }
}

#[derive(Default)]
struct BlockResult {
    checked: u64,
    failures: Vec<HornRecord>,
    lifts: u64,
    disagreements: Vec<HornRecord>,
}

/// Exhaustively checks the lifting property of `f` up to `max_dim`.
///
/// When `f` is levelwise surjective and every source level carries a Maltsev
/// term, each problem is also solved constructively and the answer must be
/// among the brute-force solutions.
pub fn verify_fibration(
    f: &SimplicialHom,
    max_dim: usize,
    options: FibrationOptions,
) -> Result<FibrationReport, OracleError> {
    #[cfg(feature = "std")]
    let started = std::time::Instant::now();
    let required = enumeration_cost(f, max_dim);
    if required > options.budget as u128 {
        return Err(OracleError::BudgetExceeded { required, budget: options.budget });
    }
    let space = LiftProblemSpace::new(f, max_dim)?;
    let cross_check = f.is_levelwise_surjective() && f.source().levels().iter().all(|l| l.maltsev_term().is_some());

    let run_block = |block: (usize, usize, Elem)| -> BlockResult {
        let mut result = BlockResult::default();
        space.for_each_horn(block, |horn| {
            result.checked += 1;
            let problem = LiftProblem::new(f, horn, block.2);
            let solutions = brute_lift(&problem);
            if solutions.is_empty() {
                result.failures.push(HornRecord::new(block.2, &problem.horn));
            }
            if cross_check {
                result.lifts += 1;
                let agrees = match lift_horn(&problem, false) {
                    Ok(lift) => solutions.binary_search(&lift.x).is_ok(),
                    Err(_) => false,
                };
                if !agrees {
                    result.disagreements.push(HornRecord::new(block.2, &problem.horn));
                }
            }
        });
        result
    };

    let blocks = space.blocks();
    let results: Vec<BlockResult> = run_blocks(&blocks, options.parallel, run_block);
    let mut report = FibrationReport::default();
    for r in results {
        report.checked_horns += r.checked;
        report.failures.extend(r.failures);
        report.lifts_checked += r.lifts;
        report.lift_disagreements.extend(r.disagreements);
    }
    #[cfg(feature = "std")]
    {
        report.elapsed = started.elapsed();
    }
    Ok(report)
}

fn run_blocks<T: Send>(
    blocks: &[(usize, usize, Elem)],
    parallel: bool,
    run: impl Fn((usize, usize, Elem)) -> T + Sync,
) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return blocks.par_iter().map(|&b| run(b)).collect();
    }
    let _ = parallel;
    blocks.iter().map(|&b| run(b)).collect()
}

/// Every 2-simplex `x` of the free ℤ/m-module circle with `d_1 x = s_0 *`
/// and `d_2 x = σ`, found by scanning all of `X_2`.
pub fn kan12_circle_solutions(m: usize) -> Vec<Elem> {
    let circle = TruncatedSimplicialAlgebra::circle_free_mod(m, 2);
    let basis = |e: CircleElement| (m as Elem).pow(e.jump as u32);
    let s0_star = basis(CircleElement::basepoint(0).degeneracy(0));
    let sigma = basis(CircleElement::sigma());
    (0..circle.level(2).carrier() as Elem)
        .filter(|&x| circle.d(2, 1, x) == s0_star && circle.d(2, 2, x) == sigma)
        .collect()
}

/// The smallest solution of the (1,2)-horn `(s_0 *, σ)` in the free ℤ/m-module
/// circle, if one exists.
pub fn kan12_circle(m: usize) -> Option<Elem> {
    kan12_circle_solutions(m).first().copied()
}

/// Reads a 2-simplex `α·s₁s₀* + β·s₁σ + γ·s₀σ` as the ternary term
/// `α·v0 + γ·v1 + β·v2` in the generators `(s₁s₀*, s₀σ, s₁σ)`, written with
/// `+` and `0`.
pub fn kan12_term(m: usize, x: Elem) -> Term {
    let mut rest = x as usize;
    let mut coords = [0usize; 3];
    for c in &mut coords {
        *c = rest % m;
        rest /= m;
    }
    let [alpha, beta, gamma] = coords;
    let mut summands = Vec::new();
    for (var, coeff) in [(0, alpha), (1, gamma), (2, beta)] {
        summands.extend(core::iter::repeat_n(Term::var(var), coeff));
    }
    summands.into_iter().reduce(|acc, t| Term::app("+", vec![acc, t])).unwrap_or_else(|| Term::constant("0"))
}
