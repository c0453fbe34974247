//! Truncated simplicial algebras: levelwise finite algebras with face and
//! degeneracy maps stored as index arrays, their validators, simplicial
//! homomorphisms, and fixture constructors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::theory::{check_map_shape, first_hom_failure, library, Elem, FiniteAlgebra, Signature, TheoryError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapKind {
    Face,
    Degeneracy,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Face => "face",
            MapKind::Degeneracy => "degeneracy",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HomLaw {
    /// `f_n` is not an algebra homomorphism; `i` is the operation index.
    Homomorphism,
    /// `f_{n-1} ∘ d_i ≠ d_i ∘ f_n`
    FaceCommutation,
    /// `f_{n+1} ∘ s_i ≠ s_i ∘ f_n`
    DegeneracyCommutation,
}

impl fmt::Display for HomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HomLaw::Homomorphism => "f is an algebra homomorphism",
            HomLaw::FaceCommutation => "f d_i = d_i f",
            HomLaw::DegeneracyCommutation => "f s_i = s_i f",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimplicialError {
    #[error("a truncated simplicial algebra needs levels 0..N with N >= 1, found {0} levels")]
    TooShallow(usize),
    #[error("level {level} has a different signature from level 0")]
    SignatureMismatch { level: usize },
    #[error("expected {expected} {kind} lists, found {found}")]
    MapListCount { kind: MapKind, expected: usize, found: usize },
    #[error("level {n}: expected {expected} {kind} maps, found {found}")]
    MapCount { kind: MapKind, n: usize, expected: usize, found: usize },
    #[error("{kind} {i} on level {n}: {source}")]
    MapShape { kind: MapKind, n: usize, i: usize, source: TheoryError },
    #[error("source and target truncations differ ({source_top} vs {target_top})")]
    TruncationMismatch { source_top: usize, target_top: usize },
    #[error("source and target have different signatures")]
    HomSignatureMismatch,
    #[error("expected {expected} level maps, found {found}")]
    HomLevelCount { expected: usize, found: usize },
    #[error("level map {level}: {source}")]
    HomShape { level: usize, source: TheoryError },
    #[error("level {level}, index {i}, element {element}: violates {law}")]
    HomViolation { level: usize, law: HomLaw, i: usize, element: u64 },
    #[error("homomorphisms are not composable: target of the first is not the source of the second")]
    NotComposable,
}

/// The law broken by a validation [`Violation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    /// `d_i` is not a homomorphism; `j` is the operation index and `element`
    /// the flat argument-tuple index.
    FaceHomomorphism,
    /// `s_i` is not a homomorphism; fields as for faces.
    DegeneracyHomomorphism,
    /// `d_i d_j = d_{j-1} d_i` for `i < j`
    FaceFace,
    /// `d_i s_j = s_{j-1} d_i` for `i < j`
    FaceDegeneracyBelow,
    /// `d_j s_j = id = d_{j+1} s_j`; `i` is the face index
    FaceDegeneracyIdentity,
    /// `d_i s_j = s_j d_{i-1}` for `i > j + 1`
    FaceDegeneracyAbove,
    /// `s_i s_j = s_{j+1} s_i` for `i <= j`
    DegeneracyDegeneracy,
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::FaceHomomorphism => "face-homomorphism",
            Law::DegeneracyHomomorphism => "degeneracy-homomorphism",
            Law::FaceFace => "d_i d_j = d_{j-1} d_i",
            Law::FaceDegeneracyBelow => "d_i s_j = s_{j-1} d_i",
            Law::FaceDegeneracyIdentity => "d_j s_j = id = d_{j+1} s_j",
            Law::FaceDegeneracyAbove => "d_i s_j = s_j d_{i-1}",
            Law::DegeneracyDegeneracy => "s_i s_j = s_{j+1} s_i",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One failed instance of a law: level `n` of the element being mapped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Violation {
    pub law: Law,
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub element: u64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at n={} i={} j={} element={}", self.law, self.n, self.i, self.j, self.element)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Raw components of a truncated simplicial algebra.
///
/// `faces[n - 1][i]` is `d_i : X_n → X_{n-1}` for `1 <= n <= N`, and
/// `degeneracies[n][i]` is `s_i : X_n → X_{n+1}` for `0 <= n < N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialParts {
    pub levels: Vec<FiniteAlgebra>,
    pub faces: Vec<Vec<Vec<Elem>>>,
    pub degeneracies: Vec<Vec<Vec<Elem>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSimplicialAlgebra {
    parts: SimplicialParts,
}

impl TruncatedSimplicialAlgebra {
    /// Checks the shape of every map. The simplicial identities and the
    /// homomorphism property are left to [`validate`](Self::validate).
    pub fn new(parts: SimplicialParts) -> Result<Self, SimplicialError> {
        let levels = &parts.levels;
        if levels.len() < 2 {
            return Err(SimplicialError::TooShallow(levels.len()));
        }
        let top = levels.len() - 1;
        if let Some(level) = levels.iter().position(|l| l.signature() != levels[0].signature()) {
            return Err(SimplicialError::SignatureMismatch { level });
        }
        check_lists(MapKind::Face, &parts.faces, top, |idx| idx + 1)?;
        check_lists(MapKind::Degeneracy, &parts.degeneracies, top, |idx| idx)?;
        for (idx, maps) in parts.faces.iter().enumerate() {
            let n = idx + 1;
            for (i, map) in maps.iter().enumerate() {
                check_map_shape(map, levels[n].carrier(), levels[n - 1].carrier())
                    .map_err(|source| SimplicialError::MapShape { kind: MapKind::Face, n, i, source })?;
            }
        }
        for (n, maps) in parts.degeneracies.iter().enumerate() {
            for (i, map) in maps.iter().enumerate() {
                check_map_shape(map, levels[n].carrier(), levels[n + 1].carrier())
                    .map_err(|source| SimplicialError::MapShape { kind: MapKind::Degeneracy, n, i, source })?;
            }
        }
        Ok(TruncatedSimplicialAlgebra { parts })
    }

    pub fn into_parts(self) -> SimplicialParts {
        self.parts
    }

    pub fn parts(&self) -> &SimplicialParts {
        &self.parts
    }

    /// The truncation level `N`.
    pub fn top(&self) -> usize {
        self.parts.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &FiniteAlgebra {
        &self.parts.levels[n]
    }

    pub fn levels(&self) -> &[FiniteAlgebra] {
        &self.parts.levels
    }

    pub fn signature(&self) -> &Signature {
        self.parts.levels[0].signature()
    }

    /// `d_i : X_n → X_{n-1}` as an index array.
    pub fn face_map(&self, n: usize, i: usize) -> &[Elem] {
        &self.parts.faces[n - 1][i]
    }

    /// `s_i : X_n → X_{n+1}` as an index array.
    pub fn degeneracy_map(&self, n: usize, i: usize) -> &[Elem] {
        &self.parts.degeneracies[n][i]
    }

    #[inline]
    pub fn d(&self, n: usize, i: usize, x: Elem) -> Elem {
        self.parts.faces[n - 1][i][x as usize]
    }

    #[inline]
    pub fn s(&self, n: usize, i: usize, x: Elem) -> Elem {
        self.parts.degeneracies[n][i][x as usize]
    }

    /// Exhaustively checks that every map is a homomorphism and that the
    /// simplicial identities hold wherever both sides live in levels `<= N`.
    /// Violations are sorted.
    pub fn validate(&self) -> ValidationReport {
        let top = self.top();
        let mut violations = Vec::new();
        for n in 1..=top {
            for i in 0..=n {
                if let Some((op, args)) = first_hom_failure(self.level(n), self.level(n - 1), self.face_map(n, i)) {
                    let element = flat_index(self.level(n).carrier(), &args);
                    violations.push(Violation { law: Law::FaceHomomorphism, n, i, j: op, element });
                }
            }
        }
        for n in 0..top {
            for i in 0..=n {
                if let Some((op, args)) = first_hom_failure(self.level(n), self.level(n + 1), self.degeneracy_map(n, i))
                {
                    let element = flat_index(self.level(n).carrier(), &args);
                    violations.push(Violation { law: Law::DegeneracyHomomorphism, n, i, j: op, element });
                }
            }
        }
        let mut report = |law, n, i, j, x: Elem| {
            violations.push(Violation { law, n, i, j, element: x as u64 });
        };
        for n in 0..=top {
            let size = self.level(n).carrier() as Elem;
            for x in 0..size {
                // d_i d_j = d_{j-1} d_i, i < j
                if n >= 2 {
                    for j in 1..=n {
                        for i in 0..j {
                            if self.d(n - 1, i, self.d(n, j, x)) != self.d(n - 1, j - 1, self.d(n, i, x)) {
                                report(Law::FaceFace, n, i, j, x);
                            }
                        }
                    }
                }
                if n < top {
                    for j in 0..=n {
                        let sx = self.s(n, j, x);
                        for i in 0..=n + 1 {
                            let lhs = self.d(n + 1, i, sx);
                            if i < j {
                                // d_i s_j = s_{j-1} d_i
                                if lhs != self.s(n - 1, j - 1, self.d(n, i, x)) {
                                    report(Law::FaceDegeneracyBelow, n, i, j, x);
                                }
                            } else if i == j || i == j + 1 {
                                if lhs != x {
                                    report(Law::FaceDegeneracyIdentity, n, i, j, x);
                                }
                            } else if lhs != self.s(n - 1, j, self.d(n, i - 1, x)) {
                                // d_i s_j = s_j d_{i-1}, i > j + 1
                                report(Law::FaceDegeneracyAbove, n, i, j, x);
                            }
                        }
                    }
                }
                // s_i s_j = s_{j+1} s_i, i <= j
                if n + 2 <= top {
                    for j in 0..=n {
                        for i in 0..=j {
                            if self.s(n + 1, i, self.s(n, j, x)) != self.s(n + 1, j + 1, self.s(n, i, x)) {
                                report(Law::DegeneracyDegeneracy, n, i, j, x);
                            }
                        }
                    }
                }
            }
        }
        violations.sort();
        ValidationReport { violations }
    }

    /// `X_n = alg` for every `n`, all faces and degeneracies the identity.
    pub fn constant(alg: &FiniteAlgebra, top: usize) -> Self {
        assert!(top >= 1, "truncation level must be at least 1");
        let id: Vec<Elem> = (0..alg.carrier() as Elem).collect();
        TruncatedSimplicialAlgebra::new(SimplicialParts {
            levels: vec![alg.clone(); top + 1],
            faces: (1..=top).map(|n| vec![id.clone(); n + 1]).collect(),
            degeneracies: (0..top).map(|n| vec![id.clone(); n + 1]).collect(),
        })
        .expect("constant object is well shaped")
    }

    /// The terminal object over `signature`: one point in every level.
    pub fn terminal(signature: &Signature, top: usize) -> Self {
        Self::constant(&library::one_point("terminal", signature.clone()), top)
    }

    /// Nerve of ℤ/m truncated at `top`: `X_n = (ℤ/m)^n` with tuple
    /// `(g_1, .., g_n)` encoded as `Σ g_t·m^(t-1)`. `d_0` drops `g_1`, `d_n`
    /// drops `g_n`, inner `d_i` adds `g_i + g_{i+1}`, and `s_i` inserts a zero
    /// after position `i`.
    pub fn nerve_abelian(m: usize, top: usize) -> Self {
        assert!(m >= 1 && top >= 1);
        // Basis vectors are numbered 1..=n as in the tuple notation.
        let levels = (0..=top).map(|n| library::power_cyclic_group(format!("nerve(Z/{m})_{n}"), m, n)).collect();
        let faces = (1..=top)
            .map(|n| {
                (0..=n)
                    .map(|i| {
                        linear_basis_map(m, n, n - 1, |t| {
                            let t = t + 1;
                            let image = if i == 0 {
                                t.checked_sub(1).filter(|&u| u >= 1)
                            } else if i == n {
                                (t < n).then_some(t)
                            } else if t <= i {
                                Some(t)
                            } else {
                                Some(t - 1)
                            };
                            image.map(|u| u - 1)
                        })
                    })
                    .collect()
            })
            .collect();
        let degeneracies = (0..top)
            .map(|n| (0..=n).map(|i| linear_basis_map(m, n, n + 1, |t| Some(if t < i { t } else { t + 1 }))).collect())
            .collect();
        TruncatedSimplicialAlgebra::new(SimplicialParts { levels, faces, degeneracies }).expect("nerve is well shaped")
    }

    /// Degreewise free ℤ/m-module on the simplicial circle `Δ¹/∂Δ¹`: `X_n`
    /// has basis the `n + 1` simplices of the circle in dimension `n`,
    /// ordered by [`CircleElement::jump`].
    pub fn circle_free_mod(m: usize, top: usize) -> Self {
        assert!(m >= 2 && top >= 2, "circle model needs m >= 2 and N >= 2");
        let levels = (0..=top).map(|n| library::power_cyclic_group(format!("S1(Z/{m})_{n}"), m, n + 1)).collect();
        let faces = (1..=top)
            .map(|n| {
                (0..=n)
                    .map(|i| linear_basis_map(m, n + 1, n, |j| Some(CircleElement { dim: n, jump: j }.face(i).jump)))
                    .collect()
            })
            .collect();
        let degeneracies = (0..top)
            .map(|n| {
                (0..=n)
                    .map(|i| {
                        linear_basis_map(m, n + 1, n + 2, |j| {
                            Some(CircleElement { dim: n, jump: j }.degeneracy(i).jump)
                        })
                    })
                    .collect()
            })
            .collect();
        TruncatedSimplicialAlgebra::new(SimplicialParts { levels, faces, degeneracies })
            .expect("circle model is well shaped")
    }
}

fn check_lists(
    kind: MapKind,
    lists: &[Vec<Vec<Elem>>],
    top: usize,
    level_of: impl Fn(usize) -> usize,
) -> Result<(), SimplicialError> {
    if lists.len() != top {
        return Err(SimplicialError::MapListCount { kind, expected: top, found: lists.len() });
    }
    for (idx, maps) in lists.iter().enumerate() {
        let n = level_of(idx);
        if maps.len() != n + 1 {
            return Err(SimplicialError::MapCount { kind, n, expected: n + 1, found: maps.len() });
        }
    }
    Ok(())
}

fn flat_index(m: usize, args: &[Elem]) -> u64 {
    args.iter().fold(0u64, |acc, &a| acc * m as u64 + a as u64)
}

/// Table of the ℤ/m-linear map `(ℤ/m)^src → (ℤ/m)^dst` sending basis vector
/// `t` to basis vector `image(t)`, or to zero when `image(t)` is `None`.
/// Vectors use little-endian base-m encoding.
fn linear_basis_map(m: usize, src_dim: usize, dst_dim: usize, image: impl Fn(usize) -> Option<usize>) -> Vec<Elem> {
    let images: Vec<Option<usize>> = (0..src_dim).map(&image).collect();
    let size = m.pow(src_dim as u32);
    let mut digits = vec![0usize; dst_dim];
    (0..size)
        .map(|x| {
            digits.iter_mut().for_each(|d| *d = 0);
            let mut rest = x;
            for target in &images {
                let coeff = rest % m;
                rest /= m;
                if let Some(u) = *target {
                    digits[u] = (digits[u] + coeff) % m;
                }
            }
            digits.iter().rev().fold(0usize, |acc, &d| acc * m + d) as Elem
        })
        .collect()
}

/// A simplex of the circle `Δ¹/∂Δ¹` in dimension `dim`.
///
/// Jump `j` in `1..=dim` is the monotone map `[dim] → [1]` taking the value 0
/// on positions `< j` and 1 from `j` on; jump 0 stands for the basepoint
/// (both constant maps are collapsed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircleElement {
    pub dim: usize,
    pub jump: usize,
}

impl CircleElement {
    pub fn new(dim: usize, jump: usize) -> Option<Self> {
        (jump <= dim).then_some(CircleElement { dim, jump })
    }

    pub fn basepoint(dim: usize) -> Self {
        CircleElement { dim, jump: 0 }
    }

    /// The nondegenerate 1-simplex.
    pub fn sigma() -> Self {
        CircleElement { dim: 1, jump: 1 }
    }

    pub fn is_basepoint(&self) -> bool {
        self.jump == 0
    }

    pub fn face(&self, i: usize) -> Self {
        assert!(self.dim >= 1 && i <= self.dim);
        let dim = self.dim - 1;
        if self.jump == 0 {
            return CircleElement::basepoint(dim);
        }
        let jump = if i < self.jump { self.jump - 1 } else { self.jump };
        if jump == 0 || jump > dim {
            CircleElement::basepoint(dim)
        } else {
            CircleElement { dim, jump }
        }
    }

    pub fn degeneracy(&self, i: usize) -> Self {
        assert!(i <= self.dim);
        let dim = self.dim + 1;
        if self.jump == 0 {
            return CircleElement::basepoint(dim);
        }
        CircleElement { dim, jump: if i < self.jump { self.jump + 1 } else { self.jump } }
    }

    /// Only the basepoint in dimension 0 and `σ` are nondegenerate.
    pub fn is_degenerate(&self) -> bool {
        !(self.dim == 0 || (self.dim == 1 && self.jump == 1))
    }
}

impl fmt::Display for CircleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.dim, self.jump)
    }
}

/// A levelwise map `f : X → Y` commuting with faces and degeneracies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialHom {
    source: TruncatedSimplicialAlgebra,
    target: TruncatedSimplicialAlgebra,
    maps: Vec<Vec<Elem>>,
}

impl SimplicialHom {
    /// Validates shapes, the homomorphism property of every level map, and
    /// commutation with every face and degeneracy. Levels are checked in
    /// ascending order, each against the faces out of it and the degeneracies
    /// into it, so a broken `f_n` is reported no later than level `n`.
    pub fn new(
        source: TruncatedSimplicialAlgebra,
        target: TruncatedSimplicialAlgebra,
        maps: Vec<Vec<Elem>>,
    ) -> Result<Self, SimplicialError> {
        if source.top() != target.top() {
            return Err(SimplicialError::TruncationMismatch { source_top: source.top(), target_top: target.top() });
        }
        if source.signature() != target.signature() {
            return Err(SimplicialError::HomSignatureMismatch);
        }
        let top = source.top();
        if maps.len() != top + 1 {
            return Err(SimplicialError::HomLevelCount { expected: top + 1, found: maps.len() });
        }
        for (level, map) in maps.iter().enumerate() {
            check_map_shape(map, source.level(level).carrier(), target.level(level).carrier())
                .map_err(|source| SimplicialError::HomShape { level, source })?;
        }
        for n in 0..=top {
            let f = &maps[n];
            if let Some((op, args)) = first_hom_failure(source.level(n), target.level(n), f) {
                let element = flat_index(source.level(n).carrier(), &args);
                return Err(SimplicialError::HomViolation { level: n, law: HomLaw::Homomorphism, i: op, element });
            }
            let size = source.level(n).carrier() as Elem;
            if n >= 1 {
                for i in 0..=n {
                    if let Some(x) =
                        (0..size).find(|&x| maps[n - 1][source.d(n, i, x) as usize] != target.d(n, i, f[x as usize]))
                    {
                        return Err(SimplicialError::HomViolation {
                            level: n,
                            law: HomLaw::FaceCommutation,
                            i,
                            element: x as u64,
                        });
                    }
                }
            }
            if n >= 1 {
                // s_i : X_{n-1} → X_n, reported at the level of the element.
                let below = &maps[n - 1];
                for i in 0..n {
                    if let Some(x) = (0..source.level(n - 1).carrier() as Elem)
                        .find(|&x| f[source.s(n - 1, i, x) as usize] != target.s(n - 1, i, below[x as usize]))
                    {
                        return Err(SimplicialError::HomViolation {
                            level: n - 1,
                            law: HomLaw::DegeneracyCommutation,
                            i,
                            element: x as u64,
                        });
                    }
                }
            }
        }
        Ok(SimplicialHom { source, target, maps })
    }

    pub fn identity(x: &TruncatedSimplicialAlgebra) -> Self {
        let maps = x.levels().iter().map(|l| (0..l.carrier() as Elem).collect()).collect();
        SimplicialHom { source: x.clone(), target: x.clone(), maps }
    }

    /// The unique map to the terminal object.
    pub fn terminal(x: &TruncatedSimplicialAlgebra) -> Self {
        let target = TruncatedSimplicialAlgebra::terminal(x.signature(), x.top());
        let maps = x.levels().iter().map(|l| vec![0; l.carrier()]).collect();
        SimplicialHom { source: x.clone(), target, maps }
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &SimplicialHom) -> Result<SimplicialHom, SimplicialError> {
        if self.target != then.source {
            return Err(SimplicialError::NotComposable);
        }
        let maps = self.maps.iter().zip(&then.maps).map(|(f, g)| f.iter().map(|&y| g[y as usize]).collect()).collect();
        SimplicialHom::new(self.source.clone(), then.target.clone(), maps)
    }

    pub fn source(&self) -> &TruncatedSimplicialAlgebra {
        &self.source
    }

    pub fn target(&self) -> &TruncatedSimplicialAlgebra {
        &self.target
    }

    pub fn maps(&self) -> &[Vec<Elem>] {
        &self.maps
    }

    pub fn map(&self, n: usize) -> &[Elem] {
        &self.maps[n]
    }

    #[inline]
    pub fn apply(&self, n: usize, x: Elem) -> Elem {
        self.maps[n][x as usize]
    }

    pub fn is_levelwise_surjective(&self) -> bool {
        self.maps.iter().enumerate().all(|(n, map)| {
            let mut hit = vec![false; self.target.level(n).carrier()];
            map.iter().for_each(|&y| hit[y as usize] = true);
            hit.into_iter().all(|h| h)
        })
    }

    /// Sorted preimage of `y` under `f_n`.
    pub fn fiber(&self, n: usize, y: Elem) -> Vec<Elem> {
        (0..self.maps[n].len() as Elem).filter(|&x| self.maps[n][x as usize] == y).collect()
    }
}

/// The levelwise map `g ↦ factor·g` from the nerve of ℤ/`src_m` to the nerve
/// of ℤ/`dst_m`, applied to every coordinate. Fails unless it is a
/// homomorphism (`dst_m` divides `factor·src_m`).
pub fn nerve_scaling_hom(
    src_m: usize,
    dst_m: usize,
    top: usize,
    factor: usize,
) -> Result<SimplicialHom, SimplicialError> {
    let source = TruncatedSimplicialAlgebra::nerve_abelian(src_m, top);
    let target = TruncatedSimplicialAlgebra::nerve_abelian(dst_m, top);
    let maps = (0..=top)
        .map(|n| {
            (0..src_m.pow(n as u32))
                .map(|x| {
                    let (mut rest, mut out, mut place) = (x, 0usize, 1usize);
                    for _ in 0..n {
                        out += (rest % src_m * factor % dst_m) * place;
                        rest /= src_m;
                        place *= dst_m;
                    }
                    out as Elem
                })
                .collect()
        })
        .collect();
    SimplicialHom::new(source, target, maps)
}

/// Encodes a coordinate vector (little-endian, base `m`).
pub fn encode_vector(m: usize, coords: &[usize]) -> Elem {
    coords.iter().rev().fold(0usize, |acc, &c| acc * m + c % m) as Elem
}

/// Decodes an element into `dim` base-`m` coordinates.
pub fn decode_vector(m: usize, dim: usize, x: Elem) -> Vec<usize> {
    let mut rest = x as usize;
    (0..dim)
        .map(|_| {
            let c = rest % m;
            rest /= m;
            c
        })
        .collect()
}

/// Renders `x` as a tuple, e.g. `(1,3)`.
pub fn format_vector(m: usize, dim: usize, x: Elem) -> String {
    let parts: Vec<String> = decode_vector(m, dim, x).into_iter().map(|c| format!("{c}")).collect();
    format!("({})", parts.join(","))
}
