use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::term::{is_atom_char, variable_index, Term};
use super::TheoryError;

/// Carrier elements are indices `0..m`.
pub type Elem = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of named operations with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<Operation>,
}

impl Signature {
    pub fn new<S: Into<String>>(ops: impl IntoIterator<Item = (S, usize)>) -> Result<Self, TheoryError> {
        let mut out: Vec<Operation> = Vec::new();
        for (name, arity) in ops {
            let name = name.into();
            if name.is_empty() || !name.chars().all(is_atom_char) || variable_index(&name).is_some() {
                return Err(TheoryError::InvalidOperationName(name));
            }
            if out.iter().any(|op| op.name == name) {
                return Err(TheoryError::DuplicateOperation(name));
            }
            out.push(Operation { name, arity });
        }
        Ok(Signature { ops: out })
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|op| op.name == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].arity
    }
}

/// A finite model of a signature: carrier `{0..m-1}` plus one flat table per
/// operation, indexed row-major with the first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    carrier: usize,
    tables: Vec<Vec<Elem>>,
    maltsev_term: Option<Term>,
}

pub(crate) fn table_len(carrier: usize, arity: usize) -> Option<usize> {
    carrier.checked_pow(u32::try_from(arity).ok()?)
}

impl FiniteAlgebra {
    /// Builds an algebra after checking that every table has length `m^arity`
    /// and only contains carrier elements.
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        carrier: usize,
        tables: Vec<Vec<Elem>>,
    ) -> Result<Self, TheoryError> {
        if carrier == 0 {
            return Err(TheoryError::EmptyCarrier);
        }
        if carrier > Elem::MAX as usize {
            return Err(TheoryError::CarrierTooLarge(carrier));
        }
        if tables.len() != signature.len() {
            return Err(TheoryError::TableCount { expected: signature.len(), found: tables.len() });
        }
        for (op, table) in signature.ops().iter().zip(&tables) {
            let expected = table_len(carrier, op.arity).ok_or_else(|| TheoryError::TableTooLarge(op.name.clone()))?;
            if table.len() != expected {
                return Err(TheoryError::TableLength { op: op.name.clone(), expected, found: table.len() });
            }
            if let Some(index) = table.iter().position(|&v| v as usize >= carrier) {
                return Err(TheoryError::TableEntry { op: op.name.clone(), index, value: table[index], carrier });
            }
        }
        Ok(FiniteAlgebra { name: name.into(), signature, carrier, tables, maltsev_term: None })
    }

    /// Builds the tables by calling `f(op_index, args)` on every argument
    /// tuple in lexicographic order.
    pub fn from_fn(
        name: impl Into<String>,
        signature: Signature,
        carrier: usize,
        mut f: impl FnMut(usize, &[Elem]) -> Elem,
    ) -> Result<Self, TheoryError> {
        let mut tables = Vec::with_capacity(signature.len());
        for (index, op) in signature.ops().iter().enumerate() {
            let len = table_len(carrier, op.arity).ok_or_else(|| TheoryError::TableTooLarge(op.name.clone()))?;
            let mut table = Vec::with_capacity(len);
            for_each_tuple(carrier, op.arity, |args| table.push(f(index, args)));
            tables.push(table);
        }
        FiniteAlgebra::new(name, signature, carrier, tables)
    }

    /// Attaches a Maltsev term after verifying both axioms exhaustively.
    pub fn with_maltsev_term(mut self, term: Term) -> Result<Self, TheoryError> {
        let report = check_maltsev_axioms(&self, &term)?;
        if let Some(cx) = report.counterexample {
            return Err(TheoryError::MaltsevAxiom { term: term.to_string(), a: cx.a, b: cx.b, axiom: cx.axiom });
        }
        self.maltsev_term = Some(term);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn table(&self, op: usize) -> &[Elem] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    pub fn maltsev_term(&self) -> Option<&Term> {
        self.maltsev_term.as_ref()
    }

    pub fn contains(&self, x: Elem) -> bool {
        (x as usize) < self.carrier
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let m = self.carrier;
        let index = args.iter().fold(0usize, |acc, &a| acc * m + a as usize);
        self.tables[op][index]
    }
}

/// Calls `f` on every tuple in `{0..m-1}^arity` in lexicographic order (last
/// coordinate fastest).
pub(crate) fn for_each_tuple(m: usize, arity: usize, mut f: impl FnMut(&[Elem])) {
    let mut args = vec![0 as Elem; arity];
    if arity == 0 {
        f(&args);
        return;
    }
    if m == 0 {
        return;
    }
    loop {
        f(&args);
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            args[pos] += 1;
            if (args[pos] as usize) < m {
                break;
            }
            args[pos] = 0;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Instr {
    Var(usize),
    Op(usize),
}

/// A term resolved against a signature into postfix code for repeated
/// evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledTerm {
    code: Vec<Instr>,
    arities: Vec<usize>,
    max_var: Option<usize>,
}

impl CompiledTerm {
    pub fn compile(signature: &Signature, term: &Term) -> Result<Self, TheoryError> {
        let mut code = Vec::with_capacity(term.size());
        emit(signature, term, &mut code)?;
        let arities = signature.ops().iter().map(|op| op.arity).collect();
        Ok(CompiledTerm { code, arities, max_var: term.max_var() })
    }

    /// Number of environment slots the term reads.
    pub fn required_env(&self) -> usize {
        self.max_var.map_or(0, |v| v + 1)
    }

    /// Evaluates against `alg`; `env` must cover `required_env()` and the
    /// algebra must have the signature the term was compiled against.
    pub fn eval(&self, alg: &FiniteAlgebra, env: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        stack.clear();
        let m = alg.carrier;
        for instr in &self.code {
            match *instr {
                Instr::Var(i) => stack.push(env[i]),
                Instr::Op(op) => {
                    let arity = self.arities[op];
                    let base = stack.len() - arity;
                    let index = stack[base..].iter().fold(0usize, |acc, &a| acc * m + a as usize);
                    stack.truncate(base);
                    stack.push(alg.tables[op][index]);
                }
            }
        }
        stack[0]
    }
}

fn emit(signature: &Signature, term: &Term, code: &mut Vec<Instr>) -> Result<(), TheoryError> {
    match term {
        Term::Var(i) => code.push(Instr::Var(*i)),
        Term::App(name, args) => {
            let op = signature.index_of(name).ok_or_else(|| TheoryError::UnknownOperation(name.clone()))?;
            let expected = signature.arity(op);
            if args.len() != expected {
                return Err(TheoryError::ArityMismatch { op: name.clone(), expected, found: args.len() });
            }
            for arg in args {
                emit(signature, arg, code)?;
            }
            code.push(Instr::Op(op));
        }
    }
    Ok(())
}

/// Evaluates `term` in `alg` at the environment `env`.
pub fn eval_term(alg: &FiniteAlgebra, term: &Term, env: &[Elem]) -> Result<Elem, TheoryError> {
    let compiled = CompiledTerm::compile(&alg.signature, term)?;
    if let Some(max) = compiled.max_var {
        if max >= env.len() {
            return Err(TheoryError::VarOutOfRange { index: max, env_len: env.len() });
        }
    }
    if let Some(&value) = env.iter().find(|&&v| !alg.contains(v)) {
        return Err(TheoryError::ElementOutOfRange { value, carrier: alg.carrier });
    }
    Ok(compiled.eval(alg, env, &mut Vec::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaltsevAxiom {
    /// `t(a, a, b) = b`
    First,
    /// `t(a, b, b) = a`
    Second,
}

impl core::fmt::Display for MaltsevAxiom {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MaltsevAxiom::First => f.write_str("t(a,a,b)=b"),
            MaltsevAxiom::Second => f.write_str("t(a,b,b)=a"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaltsevCounterexample {
    pub a: Elem,
    pub b: Elem,
    pub axiom: MaltsevAxiom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaltsevReport {
    pub holds: bool,
    pub counterexample: Option<MaltsevCounterexample>,
}

/// Checks `t(a,a,b) = b` and `t(a,b,b) = a` for every pair. Pairs are scanned
/// in lexicographic order and the first axiom is tried before the second, so
/// the reported counterexample is the smallest failing pair.
pub fn check_maltsev_axioms(alg: &FiniteAlgebra, term: &Term) -> Result<MaltsevReport, TheoryError> {
    let compiled = CompiledTerm::compile(&alg.signature, term)?;
    if compiled.required_env() > 3 {
        return Err(TheoryError::VarOutOfRange { index: compiled.required_env() - 1, env_len: 3 });
    }
    let m = alg.carrier as Elem;
    let mut stack = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if compiled.eval(alg, &[a, a, b], &mut stack) != b {
                let counterexample = Some(MaltsevCounterexample { a, b, axiom: MaltsevAxiom::First });
                return Ok(MaltsevReport { holds: false, counterexample });
            }
            if compiled.eval(alg, &[a, b, b], &mut stack) != a {
                let counterexample = Some(MaltsevCounterexample { a, b, axiom: MaltsevAxiom::Second });
                return Ok(MaltsevReport { holds: false, counterexample });
            }
        }
    }
    Ok(MaltsevReport { holds: true, counterexample: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCounterexample {
    pub op: String,
    pub args: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomReport {
    pub holds: bool,
    pub counterexample: Option<HomCounterexample>,
}

/// Checks that `map` commutes with every operation on every argument tuple.
pub fn is_homomorphism(src: &FiniteAlgebra, dst: &FiniteAlgebra, map: &[Elem]) -> Result<HomReport, TheoryError> {
    if src.signature != dst.signature {
        return Err(TheoryError::SignatureMismatch { left: src.name.clone(), right: dst.name.clone() });
    }
    check_map_shape(map, src.carrier, dst.carrier)?;
    Ok(match first_hom_failure(src, dst, map) {
        Some((op, args)) => HomReport {
            holds: false,
            counterexample: Some(HomCounterexample { op: src.signature.ops[op].name.clone(), args }),
        },
        None => HomReport { holds: true, counterexample: None },
    })
}

pub(crate) fn check_map_shape(map: &[Elem], src_carrier: usize, dst_carrier: usize) -> Result<(), TheoryError> {
    if map.len() != src_carrier {
        return Err(TheoryError::MapLength { expected: src_carrier, found: map.len() });
    }
    if let Some(index) = map.iter().position(|&v| v as usize >= dst_carrier) {
        return Err(TheoryError::MapEntry { index, value: map[index], carrier: dst_carrier });
    }
    Ok(())
}

/// First failing `(op index, args)` in signature then lexicographic order.
/// Assumes signatures agree and the map is well-shaped.
pub(crate) fn first_hom_failure(src: &FiniteAlgebra, dst: &FiniteAlgebra, map: &[Elem]) -> Option<(usize, Vec<Elem>)> {
    let n = dst.carrier;
    for (op, table) in src.tables.iter().enumerate() {
        let dst_table = &dst.tables[op];
        let arity = src.signature.arity(op);
        if arity == 2 {
            // Unrolled case: binary tables dominate the large levels.
            let m = src.carrier;
            for a in 0..m {
                let row = &table[a * m..(a + 1) * m];
                let fa = map[a] as usize * n;
                for (b, &v) in row.iter().enumerate() {
                    if map[v as usize] != dst_table[fa + map[b] as usize] {
                        return Some((op, vec![a as Elem, b as Elem]));
                    }
                }
            }
            continue;
        }
        let mut found = None;
        let mut flat = 0usize;
        for_each_tuple(src.carrier, arity, |args| {
            if found.is_none() {
                let image = args.iter().fold(0usize, |acc, &a| acc * n + map[a as usize] as usize);
                if map[table[flat] as usize] != dst_table[image] {
                    found = Some(args.to_vec());
                }
            }
            flat += 1;
        });
        if let Some(args) = found {
            return Some((op, args));
        }
    }
    None
}
