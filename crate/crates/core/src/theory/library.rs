//! Small algebras used as fixtures and as level algebras of simplicial
//! objects.

use alloc::format;
use alloc::vec::Vec;

use super::{Elem, FiniteAlgebra, Signature, Term};

/// Signature `{+ : 2, neg : 1, 0 : 0}` of abelian groups (equivalently
/// ℤ/m-modules when the exponent is m).
pub fn group_signature() -> Signature {
    Signature::new([("+", 2), ("neg", 1), ("0", 0)]).expect("static signature")
}

/// ℤ/m with `+`, `neg`, `0` and the Maltsev term `v0 - v1 + v2`.
pub fn cyclic_group(m: usize) -> FiniteAlgebra {
    power_cyclic_group(format!("Z/{m}"), m, 1)
}

/// (ℤ/m)^dim with componentwise operations. Tuples `(g_0, .., g_{dim-1})` are
/// encoded as `Σ g_t·m^t`. `dim = 0` gives the one-point group.
pub fn power_cyclic_group(name: impl Into<alloc::string::String>, m: usize, dim: usize) -> FiniteAlgebra {
    assert!(m >= 1, "modulus must be positive");
    let size = m.checked_pow(dim as u32).expect("carrier size overflow");
    let add = |a: Elem, b: Elem| -> Elem {
        let (mut a, mut b) = (a as usize, b as usize);
        let (mut out, mut place) = (0usize, 1usize);
        for _ in 0..dim {
            out += ((a % m + b % m) % m) * place;
            a /= m;
            b /= m;
            place *= m;
        }
        out as Elem
    };
    let neg = |a: Elem| -> Elem {
        let mut a = a as usize;
        let (mut out, mut place) = (0usize, 1usize);
        for _ in 0..dim {
            out += ((m - a % m) % m) * place;
            a /= m;
            place *= m;
        }
        out as Elem
    };
    let mut sum = Vec::with_capacity(size * size);
    for a in 0..size as Elem {
        for b in 0..size as Elem {
            sum.push(add(a, b));
        }
    }
    let negation: Vec<Elem> = (0..size as Elem).map(neg).collect();
    FiniteAlgebra::new(name, group_signature(), size, alloc::vec![sum, negation, alloc::vec![0]])
        .and_then(|alg| alg.with_maltsev_term(Term::group_maltsev("+", "neg")))
        .expect("cyclic group tables are well formed")
}

/// ℤ/m with binary subtraction only, carrying the Maltsev term
/// `sub(v0, sub(v1, v2))`.
pub fn cyclic_subtraction(m: usize) -> FiniteAlgebra {
    let sig = Signature::new([("sub", 2)]).expect("static signature");
    FiniteAlgebra::from_fn(format!("Z/{m} (sub)"), sig, m, |_, args| {
        ((args[0] as usize + m - args[1] as usize) % m) as Elem
    })
    .and_then(|alg| alg.with_maltsev_term(Term::parse("(sub v0 (sub v1 v2))").expect("static term")))
    .expect("subtraction tables are well formed")
}

/// ℤ/m with `+` and `0` and no attached Maltsev term.
pub fn cyclic_monoid(m: usize) -> FiniteAlgebra {
    let sig = Signature::new([("+", 2), ("0", 0)]).expect("static signature");
    FiniteAlgebra::from_fn(format!("Z/{m} (+,0)"), sig, m, |op, args| match op {
        0 => ((args[0] as usize + args[1] as usize) % m) as Elem,
        _ => 0,
    })
    .expect("monoid tables are well formed")
}

/// The two-element meet-semilattice `({0,1}, meet)`.
pub fn meet_semilattice() -> FiniteAlgebra {
    let sig = Signature::new([("meet", 2)]).expect("static signature");
    FiniteAlgebra::from_fn("2-semilattice", sig, 2, |_, args| args[0].min(args[1])).expect("static tables")
}

/// The Heyting chain `0 < 1 < .. < n-1` with meet, join, implication, bottom
/// and top. No Maltsev term is attached.
pub fn heyting_chain(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let top = (n - 1) as Elem;
    let sig = Signature::new([("meet", 2), ("join", 2), ("imp", 2), ("bot", 0), ("top", 0)]).expect("static signature");
    FiniteAlgebra::from_fn(format!("heyting-chain-{n}"), sig, n, |op, args| match op {
        0 => args[0].min(args[1]),
        1 => args[0].max(args[1]),
        2 => {
            if args[0] <= args[1] {
                top
            } else {
                args[1]
            }
        }
        3 => 0,
        _ => top,
    })
    .expect("static tables")
}

/// The one-point algebra over `signature`, carrying the trivial Maltsev term
/// `v0` (every identity holds on one point).
pub fn one_point(name: impl Into<alloc::string::String>, signature: Signature) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(name, signature, 1, |_, _| 0)
        .and_then(|alg| alg.with_maltsev_term(Term::var(0)))
        .expect("one-point tables are well formed")
}
