//! Deciding whether a finite algebra has a Maltsev term.
//!
//! A ternary term is Maltsev exactly when its term function, restricted to
//! the probe domain `D = {(a,a,b)} ∪ {(a,b,b)}`, equals the function
//! `(a,a,b) ↦ b, (a,b,b) ↦ a`. The restricted term functions form the
//! subalgebra of `A^D` generated by the three restricted projections, so the
//! search is a breadth-first closure of those projections under the
//! operations of the algebra, deduplicated on value vectors.

use alloc::vec;
use alloc::vec::Vec;
use core::hash::BuildHasher;

use hashbrown::{DefaultHashBuilder, HashTable};

use crate::theory::{check_maltsev_axioms, Elem, FiniteAlgebra, Term};

pub const DEFAULT_MAX_CLOSURE: usize = 5_000_000;

/// Number of argument tuples evaluated between merges into the closure.
const BATCH_WORK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectOptions {
    pub max_closure: usize,
    /// Cap on argument tuples evaluated, checked between batches.
    pub max_evaluations: u64,
    /// Evaluate candidate batches on the rayon pool. Has no effect without
    /// the `parallel` feature; the result is identical either way.
    pub parallel: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { max_closure: DEFAULT_MAX_CLOSURE, max_evaluations: u64::MAX, parallel: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DetectError {
    #[error("closure exceeded {limit} members after {generations} generations")]
    ResourceLimit { limit: usize, generations: usize },
    #[error("more than {limit} argument tuples evaluated after {generations} generations")]
    EvaluationLimit { limit: u64, generations: usize },
}

/// The tuples on which the Maltsev identities say something, in the order
/// `(a,a,b)` for all `a, b`, then `(a,b,b)` for `a ≠ b`, each lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeDomain {
    tuples: Vec<[Elem; 3]>,
}

impl ProbeDomain {
    pub fn new(carrier: usize) -> Self {
        let m = carrier as Elem;
        let mut tuples = Vec::with_capacity(2 * carrier * carrier - carrier);
        for a in 0..m {
            for b in 0..m {
                tuples.push([a, a, b]);
            }
        }
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    tuples.push([a, b, b]);
                }
            }
        }
        ProbeDomain { tuples }
    }

    pub fn tuples(&self) -> &[[Elem; 3]] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Values of the `i`-th projection on the domain.
    pub fn projection(&self, i: usize) -> Vec<Elem> {
        self.tuples.iter().map(|t| t[i]).collect()
    }

    /// The function every Maltsev term must restrict to.
    pub fn target(&self) -> Vec<Elem> {
        self.tuples
            .iter()
            .map(|&[a, b, c]| {
                let by_first = (a == b).then_some(c);
                let by_second = (b == c).then_some(a);
                match (by_first, by_second) {
                    (Some(x), Some(y)) => {
                        assert_eq!(x, y, "Maltsev target is ill-defined at ({a},{b},{c})");
                        x
                    }
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => unreachable!("tuple outside the probe domain"),
                }
            })
            .collect()
    }
}

/// A term function restricted to the probe domain, with a term producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedFunction {
    pub values: Vec<Elem>,
    pub provenance: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Origin {
    Projection(usize),
    Apply { op: usize, args: Vec<u32> },
}

/// The (possibly partial) generated subalgebra of `A^D`.
#[derive(Clone, Debug)]
pub struct Closure {
    domain: ProbeDomain,
    op_names: Vec<alloc::string::String>,
    values: Vec<Elem>,
    origins: Vec<Origin>,
    depths: Vec<u32>,
    target: Option<usize>,
}

impl Closure {
    pub fn domain(&self) -> &ProbeDomain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn values(&self, member: usize) -> &[Elem] {
        let w = self.domain.len();
        &self.values[member * w..(member + 1) * w]
    }

    /// Reconstructs the term that produced `member`.
    pub fn provenance(&self, member: usize) -> Term {
        match &self.origins[member] {
            Origin::Projection(i) => Term::var(*i),
            Origin::Apply { op, args } => {
                Term::app(self.op_names[*op].clone(), args.iter().map(|&a| self.provenance(a as usize)).collect())
            }
        }
    }

    pub fn member(&self, member: usize) -> IndexedFunction {
        IndexedFunction { values: self.values(member).to_vec(), provenance: self.provenance(member) }
    }

    /// Index of the Maltsev target, if it was generated.
    pub fn target(&self) -> Option<usize> {
        self.target
    }

    /// Largest term depth among members.
    pub fn generations(&self) -> usize {
        self.depths.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn stats(&self) -> ClosureStats {
        ClosureStats { closure_size: self.len(), generations: self.generations(), found: self.target.is_some() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureStats {
    pub closure_size: usize,
    pub generations: usize,
    pub found: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detection {
    pub witness: Option<Term>,
    pub stats: ClosureStats,
}

struct Builder<'a> {
    alg: &'a FiniteAlgebra,
    width: usize,
    target: Vec<Elem>,
    hasher: DefaultHashBuilder,
    index: HashTable<u32>,
    closure: Closure,
    max_closure: usize,
    max_evaluations: u64,
    evaluations: u64,
}

/// A candidate produced in a batch: origin and values, not yet merged.
type Candidate = (Vec<u32>, Vec<Elem>);

impl<'a> Builder<'a> {
    fn new(alg: &'a FiniteAlgebra, options: &DetectOptions) -> Self {
        let domain = ProbeDomain::new(alg.carrier());
        let target = domain.target();
        let op_names = alg.signature().ops().iter().map(|op| op.name.clone()).collect();
        Builder {
            alg,
            width: domain.len(),
            target,
            hasher: DefaultHashBuilder::default(),
            index: HashTable::new(),
            closure: Closure {
                domain,
                op_names,
                values: Vec::new(),
                origins: Vec::new(),
                depths: Vec::new(),
                target: None,
            },
            max_closure: options.max_closure,
            max_evaluations: options.max_evaluations,
            evaluations: 0,
        }
    }

    /// Charges the tuples with first argument in `firsts` against the budget.
    fn charge(&mut self, arity: usize, firsts: core::ops::Range<u32>, lo: u32, hi: u32) -> Result<(), DetectError> {
        let rest = (arity - 1) as u32;
        let all = (hi as u64).saturating_pow(rest);
        let old_only = (lo as u64).saturating_pow(rest);
        let old_firsts = lo.saturating_sub(firsts.start).min(firsts.end - firsts.start) as u64;
        let new_firsts = (firsts.end - firsts.start) as u64 - old_firsts;
        let cost = new_firsts.saturating_mul(all).saturating_add(old_firsts.saturating_mul(all - old_only));
        self.evaluations = self.evaluations.saturating_add(cost);
        if self.evaluations > self.max_evaluations {
            return Err(DetectError::EvaluationLimit {
                limit: self.max_evaluations,
                generations: self.closure.generations(),
            });
        }
        Ok(())
    }

    fn lookup(&self, values: &[Elem]) -> Option<usize> {
        let hash = self.hasher.hash_one(values);
        let w = self.width;
        let stored = &self.closure.values;
        self.index.find(hash, |&i| &stored[i as usize * w..(i as usize + 1) * w] == values).map(|&i| i as usize)
    }

    /// Adds `values` unless present. Returns `Ok(true)` once the target is in.
    fn insert(&mut self, values: &[Elem], origin: Origin, depth: u32) -> Result<bool, DetectError> {
        if self.lookup(values).is_some() {
            return Ok(false);
        }
        if self.closure.len() >= self.max_closure {
            return Err(DetectError::ResourceLimit {
                limit: self.max_closure,
                generations: self.closure.generations(),
            });
        }
        let id = self.closure.len() as u32;
        self.closure.values.extend_from_slice(values);
        self.closure.origins.push(origin);
        self.closure.depths.push(depth);
        let w = self.width;
        let (hasher, stored) = (&self.hasher, &self.closure.values);
        let hash = hasher.hash_one(values);
        self.index.insert_unique(hash, id, |&i| hasher.hash_one(&stored[i as usize * w..(i as usize + 1) * w]));
        if values == self.target.as_slice() {
            self.closure.target = Some(id as usize);
            return Ok(true);
        }
        Ok(false)
    }

    fn evaluate(&self, op: usize, args: &[u32], out: &mut Vec<Elem>) {
        let m = self.alg.carrier();
        let table = self.alg.table(op);
        let w = self.width;
        let vals = &self.closure.values;
        out.clear();
        for d in 0..w {
            let index = args.iter().fold(0usize, |acc, &a| acc * m + vals[a as usize * w + d] as usize);
            out.push(table[index]);
        }
    }

    /// All candidates with first argument `first` and at least one argument
    /// at index `>= lo`, in lexicographic order, skipping known values.
    fn candidates_from(&self, op: usize, arity: usize, first: u32, lo: u32, hi: u32) -> Vec<Candidate> {
        let mut found = Vec::new();
        let mut args = vec![0u32; arity];
        args[0] = first;
        let mut scratch = Vec::with_capacity(self.width);
        self.fill(op, &mut args, 1, first >= lo, lo, hi, &mut scratch, &mut found);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        op: usize,
        args: &mut Vec<u32>,
        pos: usize,
        any_new: bool,
        lo: u32,
        hi: u32,
        scratch: &mut Vec<Elem>,
        found: &mut Vec<Candidate>,
    ) {
        if pos == args.len() {
            if !any_new {
                return;
            }
            self.evaluate(op, args, scratch);
            if self.lookup(scratch).is_none() {
                found.push((args.clone(), scratch.clone()));
            }
            return;
        }
        let start = if pos + 1 == args.len() && !any_new { lo } else { 0 };
        for a in start..hi {
            args[pos] = a;
            self.fill(op, args, pos + 1, any_new || a >= lo, lo, hi, scratch, found);
        }
    }

    fn batch(
        &self,
        op: usize,
        arity: usize,
        firsts: core::ops::Range<u32>,
        lo: u32,
        hi: u32,
        parallel: bool,
    ) -> Vec<Candidate> {
        #[cfg(feature = "parallel")]
        if parallel {
            use rayon::prelude::*;
            let parts: Vec<Vec<Candidate>> =
                firsts.into_par_iter().map(|a| self.candidates_from(op, arity, a, lo, hi)).collect();
            return parts.into_iter().flatten().collect();
        }
        let _ = parallel;
        firsts.flat_map(|a| self.candidates_from(op, arity, a, lo, hi)).collect()
    }

    fn run(mut self, parallel: bool) -> Result<Closure, DetectError> {
        let domain = self.closure.domain.clone();
        for i in 0..3 {
            if self.insert(&domain.projection(i), Origin::Projection(i), 0)? {
                return Ok(self.closure);
            }
        }
        let arities: Vec<usize> = self.alg.signature().ops().iter().map(|op| op.arity).collect();
        let mut lo = 0u32;
        let mut round = 1u32;
        loop {
            let hi = self.closure.len() as u32;
            for (op, &arity) in arities.iter().enumerate() {
                if arity == 0 {
                    if round == 1 {
                        let mut values = Vec::new();
                        self.evaluate(op, &[], &mut values);
                        if self.insert(&values, Origin::Apply { op, args: Vec::new() }, 1)? {
                            return Ok(self.closure);
                        }
                    }
                    continue;
                }
                let per_first = (hi as usize).saturating_pow(arity as u32 - 1).max(1);
                let step = (BATCH_WORK / per_first).max(1) as u32;
                let mut first = 0u32;
                while first < hi {
                    let end = first.saturating_add(step).min(hi);
                    self.charge(arity, first..end, lo, hi)?;
                    let batch = self.batch(op, arity, first..end, lo, hi, parallel);
                    for (args, values) in batch {
                        if self.insert(&values, Origin::Apply { op, args }, round)? {
                            return Ok(self.closure);
                        }
                    }
                    first = end;
                }
            }
            if self.closure.len() as u32 == hi {
                return Ok(self.closure);
            }
            lo = hi;
            round += 1;
        }
    }
}

/// Runs the breadth-first closure, stopping early once the Maltsev target
/// appears.
pub fn generate_closure(alg: &FiniteAlgebra, options: DetectOptions) -> Result<Closure, DetectError> {
    Builder::new(alg, &options).run(options.parallel)
}

pub fn detect(alg: &FiniteAlgebra, options: DetectOptions) -> Result<Detection, DetectError> {
    let closure = generate_closure(alg, options)?;
    let witness = closure.target().map(|i| closure.provenance(i));
    if let Some(term) = &witness {
        let report = check_maltsev_axioms(alg, term).expect("closure terms are well formed");
        assert!(report.holds, "detector produced a non-Maltsev witness {term}: {report:?}");
    }
    Ok(Detection { witness, stats: closure.stats() })
}

/// A Maltsev term of minimal depth in the clone of `alg`, if any.
pub fn maltsev_witness(alg: &FiniteAlgebra) -> Result<Option<Term>, DetectError> {
    detect(alg, DetectOptions::default()).map(|d| d.witness)
}

pub fn closure_stats(alg: &FiniteAlgebra) -> Result<ClosureStats, DetectError> {
    generate_closure(alg, DetectOptions::default()).map(|c| c.stats())
}
