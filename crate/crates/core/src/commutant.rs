//! Quantum commutants of classical families of maps.
//!
//! A classical family `F` of *-automorphisms of `M` is encoded as the
//! quantum family `Ψ_B(m) = Σ_σ σ(m) ⊗ δ_σ` over `B = C^F`. The commutant of
//! `F` inside a quantum semigroup acting on `M` is the quotient by the ideal
//! where `Φ △ Ψ_B` and `Ψ_B △ Φ` agree.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::builtins::{entry_name, qmap_xn};
use crate::cache::complete_cached;
use crate::dsl;
use crate::error::{Error, Result};
use crate::ncpoly::NCPoly;
use crate::presentation::{tensor, Generator, GeneratorMap, Presentation};
use crate::rewrite::{LegReducer, RewriteSystem};
use crate::scalar::Scalar;
use crate::semigroup::{
    collect_residues, matrix_relations, morphism_outcome, substitute_leg, Check, FDCStar, MElem, Outcome,
    QuantumFamily, QuantumSemigroup, Report,
};

/// A bijection of `{1..n}`, stored 0-based as the list of images.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Invalid(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    /// The cyclic shift `i -> i + 1 mod n`.
    pub fn cycle(n: usize) -> Self {
        Permutation((0..n).map(|i| (i + 1) % n).collect())
    }

    /// Exchanges the 1-based points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a - 1, b - 1);
        Permutation(images)
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)` (commas allowed). Cycles
    /// compose right to left; an empty string or `()` is the identity.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let bad = |m: String| Error::Invalid(format!("permutation '{text}': {m}"));
        let mut perm = Permutation::identity(n);
        let mut rest = text.trim();
        let mut cycles = Vec::new();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('".into()))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle".into()))?;
            let mut points = Vec::new();
            for tok in body[..close].split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                let p: usize = tok.parse().map_err(|_| bad(format!("'{tok}' is not a point")))?;
                if p == 0 || p > n {
                    return Err(bad(format!("point {p} outside 1..{n}")));
                }
                if points.contains(&(p - 1)) {
                    return Err(bad(format!("point {p} repeated in a cycle")));
                }
                points.push(p - 1);
            }
            cycles.push(points);
            rest = body[close + 1..].trim_start();
        }
        for points in cycles.iter().rev() {
            let mut c = Permutation::identity(n);
            for (k, &p) in points.iter().enumerate() {
                c.0[p] = points[(k + 1) % points.len()];
            }
            perm = c.compose(&perm);
        }
        Ok(perm)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// 0-based image of 0-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = vec![false; self.n()];
        for start in 0..self.n() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push((i + 1).to_string());
                i = self.0[i];
            }
            write!(f, "({})", cycle.join(" "))?;
        }
        Ok(())
    }
}

/// A finite set of permutations of `{1..n}`; never empty (the empty family
/// is the trivial family `{id}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermFamily {
    n: usize,
    perms: BTreeSet<Permutation>,
}

impl PermFamily {
    pub fn new(n: usize, perms: impl IntoIterator<Item = Permutation>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("permutations need at least one point".into()));
        }
        let mut set = BTreeSet::new();
        for p in perms {
            if p.n() != n {
                return Err(Error::Invalid(format!("permutation {p} does not act on {n} points")));
            }
            set.insert(p);
        }
        if set.is_empty() {
            set.insert(Permutation::identity(n));
        }
        Ok(PermFamily { n, perms: set })
    }

    pub fn parse(n: usize, cycles: &[&str]) -> Result<Self> {
        let perms = cycles.iter().map(|c| Permutation::parse(n, c)).collect::<Result<Vec<_>>>()?;
        PermFamily::new(n, perms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn perms(&self) -> impl Iterator<Item = &Permutation> {
        self.perms.iter()
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    /// The group generated by the family: closure under composition, which
    /// in a finite group already contains the inverses.
    pub fn group_closure(&self) -> PermFamily {
        let gens: Vec<&Permutation> = self.perms.iter().collect();
        let mut group: BTreeSet<Permutation> = BTreeSet::from([Permutation::identity(self.n)]);
        let mut frontier: Vec<Permutation> = vec![Permutation::identity(self.n)];
        while let Some(p) = frontier.pop() {
            for g in &gens {
                let q = g.compose(&p);
                if group.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        PermFamily { n: self.n, perms: group }
    }
}

impl fmt::Display for PermFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.perms.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Conjugation `m -> u m u*` by a unitary 2x2 matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M2Automorphism {
    /// Row-major entries of `u`.
    pub u: [Scalar; 4],
}

impl M2Automorphism {
    /// Conjugation by the matrix exchanging the two basis vectors.
    pub fn swap() -> Self {
        M2Automorphism { u: [Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::zero()] }
    }

    pub fn new(u: [Scalar; 4]) -> Result<Self> {
        let a = M2Automorphism { u };
        // (u* u)_{ab} = Σ_r conj(u_ra) u_rb
        for x in 0..2 {
            for y in 0..2 {
                let s = &(&a.entry(0, x).conj() * a.entry(0, y)) + &(&a.entry(1, x).conj() * a.entry(1, y));
                let want = if x == y { Scalar::one() } else { Scalar::zero() };
                if s != want {
                    return Err(Error::Invalid(format!("{a} is not unitary")));
                }
            }
        }
        Ok(a)
    }

    /// `swap`, or four exact complex entries `u11, u12, u21, u22` separated
    /// by commas or semicolons.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim() == "swap" {
            return Ok(M2Automorphism::swap());
        }
        let entries: Vec<&str> = text.split([',', ';']).map(str::trim).collect();
        if entries.len() != 4 {
            return Err(Error::Invalid(format!("automorphism '{text}': expected 'swap' or four entries")));
        }
        let none = |_: u8, _: &str| None;
        let mut u: Vec<Scalar> = Vec::with_capacity(4);
        for e in entries {
            let p = dsl::parse_expression(e, &none)?;
            let c = p.as_constant().ok_or_else(|| Error::Invalid(format!("'{e}' is not a number")))?;
            u.push(c);
        }
        M2Automorphism::new(u.try_into().expect("four entries"))
    }

    fn entry(&self, r: usize, c: usize) -> &Scalar {
        &self.u[2 * r + c]
    }

    pub fn is_swap(&self) -> bool {
        *self == M2Automorphism::swap()
    }
}

impl fmt::Display for M2Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_swap() {
            return write!(f, "swap");
        }
        write!(f, "u = [[{}, {}], [{}, {}]]", self.u[0], self.u[1], self.u[2], self.u[3])
    }
}

/// A finite family of *-automorphisms of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassicalFamily {
    Permutations(PermFamily),
    M2(Vec<M2Automorphism>),
}

/// Matrix of a linear map of `M` in the matrix-unit basis:
/// `t[i][j]` is the coefficient of basis element `i` in the image of `j`.
pub type Transform = Vec<Vec<Scalar>>;

impl ClassicalFamily {
    pub fn space(&self) -> FDCStar {
        match self {
            ClassicalFamily::Permutations(f) => FDCStar::points(f.n()).expect("n >= 1"),
            ClassicalFamily::M2(_) => FDCStar::m2(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ClassicalFamily::Permutations(f) => f.len(),
            ClassicalFamily::M2(us) => us.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            ClassicalFamily::Permutations(f) => f.perms().map(ToString::to_string).collect(),
            ClassicalFamily::M2(us) => us.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn transforms(&self) -> Vec<Transform> {
        match self {
            ClassicalFamily::Permutations(f) => f
                .perms()
                .map(|p| {
                    let mut t = vec![vec![Scalar::zero(); f.n()]; f.n()];
                    for j in 0..f.n() {
                        t[p.apply(j)][j] = Scalar::one();
                    }
                    t
                })
                .collect(),
            ClassicalFamily::M2(us) => {
                let space = FDCStar::m2();
                us.iter()
                    .map(|u| {
                        // u E_ab u* = Σ_{r,c} u_ra conj(u_cb) E_rc
                        (0..4)
                            .map(|i| {
                                let (r, c) = space.unit(i);
                                (0..4)
                                    .map(|j| {
                                        let (a, b) = space.unit(j);
                                        u.entry(r, a) * &u.entry(c, b).conj()
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// `B = C^F`, presented as a partition of unity `d1, ..., d|F|`.
    pub fn algebra(&self) -> Arc<Presentation> {
        let k = self.len();
        let gens = (1..=k).map(|i| Generator { name: format!("d{i}"), self_adjoint: true }).collect();
        Arc::new(Presentation::new("C^F", gens, Vec::new(), vec![(0..k as u16).collect()]).expect("valid"))
    }

    /// `Ψ_B(m) = Σ_σ σ(m) ⊗ δ_σ` on the basis of `M`.
    pub fn family(&self) -> QuantumFamily {
        let space = self.space();
        let b = self.algebra();
        let ts = self.transforms();
        let dim = space.dim();
        let on_basis = (0..dim)
            .map(|j| {
                MElem(
                    (0..dim)
                        .map(|i| {
                            ts.iter().enumerate().fold(NCPoly::zero(), |acc, (s, t)| {
                                &acc + &NCPoly::letter(b.letter(s as u16)).scale(&t[i][j])
                            })
                        })
                        .collect(),
                )
            })
            .collect();
        QuantumFamily { space, legs: 1, on_basis }
    }

    /// Checks that `Ψ_B` respects the relations of `M`.
    pub fn verify(&self) -> Outcome {
        let b = self.algebra();
        let rs = match crate::rewrite::complete(&b, 4) {
            Ok(rs) => Arc::new(rs),
            Err(e) => return Outcome::Inconclusive(e.to_string()),
        };
        let family = self.family();
        let space = &family.space;
        let images: Vec<MElem> = space.generator_elements().iter().map(|g| family.apply(g)).collect();
        matrix_relations(space, &images, &LegReducer::single(rs), &tensor(&[b]))
    }
}

impl fmt::Display for ClassicalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

/// `(first ⊗ id) ∘ second`: the legs of `first` come before those of
/// `second`.
pub fn compose_families(first: &QuantumFamily, second: &QuantumFamily) -> Result<QuantumFamily> {
    if first.space.kind() != second.space.kind() {
        return Err(Error::MismatchedSpace);
    }
    let on_basis = second.on_basis.iter().map(|m| first.apply(m)).collect();
    Ok(QuantumFamily { space: first.space.clone(), legs: first.legs + second.legs, on_basis })
}

/// Generators of the commutant ideal: for each `σ ∈ F`, basis element `m`
/// and coordinate functional `ω`, the difference
/// `(ω ⊗ id ⊗ η_σ)(Φ △ Ψ_B)(m) − (ω ⊗ η_σ ⊗ id)(Ψ_B △ Φ)(m)`.
///
/// Zeros are dropped; the rest are made monic, deduplicated and sorted.
pub fn commutant_ideal(s: &QuantumSemigroup, family: &ClassicalFamily) -> Result<Vec<NCPoly>> {
    let action = s.action.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no action", s.name)))?;
    if action.space.kind() != family.space().kind() {
        return Err(Error::MismatchedSpace);
    }
    let phi = action.family();
    let psi = family.family();
    let phi_psi = compose_families(&phi, &psi)?;
    let psi_phi = compose_families(&psi, &phi)?;
    let k = family.len();
    let dim = phi.space.dim();
    let jobs: Vec<(usize, usize)> = (0..k).flat_map(|sigma| (0..dim).map(move |b| (sigma, b))).collect();
    let found: Vec<Vec<NCPoly>> = jobs
        .par_iter()
        .map(|&(sigma, b)| {
            let eta: Vec<NCPoly> =
                (0..k).map(|tau| if tau == sigma { NCPoly::one() } else { NCPoly::zero() }).collect();
            (0..dim)
                .map(|i| {
                    let left = substitute_leg(&phi_psi.on_basis[b].0[i], 1, &eta, 0);
                    let right = substitute_leg(&psi_phi.on_basis[b].0[i], 0, &eta, 0);
                    &left - &right
                })
                .filter(|p| !p.is_zero())
                .map(|p| p.monic())
                .collect()
        })
        .collect();
    let set: BTreeSet<NCPoly> = found.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

/// A commutant quantum semigroup with its rewrite system and the checks
/// made while building it.
#[derive(Clone, Debug)]
pub struct Commutant {
    pub semigroup: QuantumSemigroup,
    pub rewrite: Arc<RewriteSystem>,
    /// Ideal generators, reduced modulo the parent algebra.
    pub ideal: Vec<NCPoly>,
    pub report: Report,
}

fn reduced_ideal(s: &QuantumSemigroup, family: &ClassicalFamily, parent: &RewriteSystem) -> Result<Vec<NCPoly>> {
    let raw = commutant_ideal(s, family)?;
    let reduced = raw.par_iter().map(|p| parent.normal_form(p)).collect::<Result<Vec<_>, _>>()?;
    let set: BTreeSet<NCPoly> = reduced.into_iter().filter(|p| !p.is_zero()).map(|p| p.monic()).collect();
    Ok(set.into_iter().collect())
}

/// Quotients `s` by the commutant ideal of `family`, pushes `Δ`, `ε` and `Φ`
/// through and re-verifies them. For permutation families the result is
/// also compared with the commutant of the generated group.
pub fn build_commutant(
    s: &QuantumSemigroup,
    family: &ClassicalFamily,
    cap: usize,
    cache: Option<&Path>,
) -> Result<Commutant> {
    let parent = complete_cached(&s.algebra, cap, cache)?;
    parent.require_consistent()?;
    let ideal = reduced_ideal(s, family, &parent)?;
    let name = format!("commutant of {family} in {}", s.name);
    let quotient = s.algebra.quotient(&ideal, &format!("commutant of {family}"))?;
    let rs = complete_cached(&quotient, cap, cache)?;
    if !rs.is_consistent() {
        return Err(Error::InconsistentPresentation);
    }
    let semigroup = s.with_algebra(name.clone(), Arc::new(quotient.with_name(name.clone())))?;

    let mut report = Report::new(name);
    report.note("family", family.to_string());
    report.note("ideal generators", ideal.len().to_string());
    report.push(Check::new("Psi_B is a quantum family M -> M (x) C^F", family.verify()));
    report.extend(semigroup.verify_all(&rs));

    // ε∘π = ε holds on generators by construction; it must also kill the ideal.
    let eps = semigroup.counit_map();
    let names = semigroup.tensor_names(1);
    let items = ideal.iter().map(|p| (p.display(semigroup.algebra.as_ref()), Ok(eps.apply(p)))).collect();
    report.push(Check::new("epsilon vanishes on the commutant ideal", collect_residues(items, &names)));

    if let ClassicalFamily::Permutations(f) = family {
        let closure = f.group_closure();
        if closure.len() != f.len() {
            let closed = ClassicalFamily::Permutations(closure);
            report.push(Check::new(
                "commutant of the generated group agrees",
                closure_agreement(s, &closed, &parent, &rs, cap),
            ));
        }
    }
    Ok(Commutant { semigroup, rewrite: rs, ideal, report })
}

fn closure_agreement(
    s: &QuantumSemigroup,
    closed: &ClassicalFamily,
    parent: &RewriteSystem,
    rs: &RewriteSystem,
    cap: usize,
) -> Outcome {
    let run = || -> Result<Outcome> {
        let ideal = reduced_ideal(s, closed, parent)?;
        let q = s.algebra.quotient(&ideal, "commutant of the generated group")?;
        let rs_closed = crate::rewrite::complete(&q, cap)?;
        let mut failures = Vec::new();
        for p in &ideal {
            let r = rs.normal_form(p)?;
            if !r.is_zero() {
                failures.push((format!("group relation {}", p.display(&*s.algebra)), r.display(&*s.algebra)));
            }
        }
        for (g, gen) in s.algebra.generators().iter().enumerate() {
            let x = NCPoly::letter(s.algebra.letter(g as u16));
            let (a, b) = (rs.normal_form(&x)?, rs_closed.normal_form(&x)?);
            if a != b {
                failures.push((format!("normal form of {}", gen.name), (&a - &b).display(&*s.algebra)));
            }
        }
        Ok(if failures.is_empty() { Outcome::Pass } else { Outcome::Fail(failures) })
    };
    run().unwrap_or_else(|e| Outcome::Inconclusive(e.to_string()))
}

/// The checks for the commutant of the transposition `(n-1 n)` on `n >= 3`
/// points. Writing the matrix `a` of the commutant in blocks, with
/// `d_j = a_{j,n-1}`, `d'_j = a_{j,n}`, `c_j = a_{n-1,j}`, `c'_j = a_{n,j}`,
/// `e = a_{n-1,n-1}`, `f = a_{n-1,n}`, `f' = a_{n,n-1}`, `e' = a_{n,n}`:
/// the primed entries agree with the unprimed ones, `d_j = 0`, the
/// `b` block satisfies the relations of `QMap(X_{n-2})`, and the free product
/// of that block with `C^n` maps back and forth on generators.
pub fn transposition_report(n: usize, cap: usize, cache: Option<&Path>) -> Result<(Commutant, Report)> {
    if n < 3 {
        return Err(Error::Invalid("the transposition example needs n >= 3".into()));
    }
    let s = qmap_xn(n);
    let family = ClassicalFamily::Permutations(PermFamily::new(n, [Permutation::transposition(n, n - 1, n)])?);
    let comm = build_commutant(&s, &family, cap, cache)?;
    let a = comm.semigroup.algebra.clone();
    let rs = comm.rewrite.clone();
    let x = |i: usize, j: usize| a.gen(&entry_name(i, j, n));
    let mut report = Report::new(format!("transposition ({} {}) on {n} points", n - 1, n));

    let mut items =
        vec![("e - e'".to_string(), &x(n - 1, n - 1) - &x(n, n)), ("f - f'".to_string(), &x(n - 1, n) - &x(n, n - 1))];
    for j in 1..=n - 2 {
        items.push((format!("c{j} - c{j}'"), &x(n - 1, j) - &x(n, j)));
        items.push((format!("d{j} - d{j}'"), &x(j, n - 1) - &x(j, n)));
    }
    let identities = items.iter().map(|(l, p)| (l.clone(), rs.normal_form(p))).collect();
    let names = tensor(std::slice::from_ref(&a));
    report.push(Check::new("primed entries agree", collect_residues(identities, &names)));
    let dj = (1..=n - 2).map(|j| (format!("d{j}"), rs.normal_form(&x(j, n - 1)))).collect();
    report.push(Check::new("d_j = 0", collect_residues(dj, &names)));

    // the b block as images of QMap(X_{n-2})
    let m = n - 2;
    let small = qmap_xn(m);
    let b_images: Vec<NCPoly> = (1..=m).flat_map(|i| (1..=m).map(move |j| (i, j))).map(|(i, j)| x(i, j)).collect();
    let red1 = LegReducer::single(rs.clone());
    let mut b_map = GeneratorMap::new(small.algebra.clone(), names.clone(), b_images.clone())?;
    report.push(Check::new(
        format!("b block satisfies the relations of QMap(X{m})"),
        morphism_outcome(b_map.check(&red1), &names),
    ));
    let red2 = LegReducer::repeated(rs.clone(), 2);
    let names2 = tensor(&[a.clone(), a.clone()]);
    let delta = &comm.semigroup.delta;
    let idx = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let coproduct = (1..=m)
        .flat_map(|i| (1..=m).map(move |j| (i, j)))
        .map(|(i, j)| {
            let want = (1..=m).fold(NCPoly::zero(), |acc, k| &acc + &(&x(i, k) * &x(k, j).on_leg(1)));
            (format!("b{i}{j}"), red2.reduce(&(&delta[idx(i, j)] - &want)))
        })
        .collect();
    report.push(Check::new("Delta(b_ij) = sum_k b_ik (x) b_kj", collect_residues(coproduct, &names2)));

    report.extend(free_product_checks(n, &a, &rs, cap)?);
    Ok((comm, report))
}

/// `B * C` with `B = QMap(X_{n-2})` and `C = C^n`; the candidate family
/// `Φ~` over it, and the maps `Θ: B*C -> A`, `Λ: A -> B*C`.
fn free_product_checks(n: usize, a: &Arc<Presentation>, rs: &Arc<RewriteSystem>, cap: usize) -> Result<Report> {
    let m = n - 2;
    let mut gens = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            gens.push(Generator { name: format!("b{i}_{j}"), self_adjoint: true });
        }
    }
    for j in 1..=m {
        gens.push(Generator { name: format!("c{j}"), self_adjoint: true });
    }
    gens.push(Generator { name: "e".into(), self_adjoint: true });
    gens.push(Generator { name: "f".into(), self_adjoint: true });
    let bidx = |i: usize, j: usize| ((i - 1) * m + (j - 1)) as u16;
    let cidx = |j: usize| (m * m + j - 1) as u16;
    let (eidx, fidx) = ((m * m + m) as u16, (m * m + m + 1) as u16);
    let mut parts: Vec<Vec<u16>> = (1..=m).map(|i| (1..=m).map(|j| bidx(i, j)).collect()).collect();
    parts.push((1..=m).map(cidx).chain([eidx, fidx]).collect());
    let bc = Arc::new(Presentation::new(format!("QMap(X{m}) * C^{n}"), gens, Vec::new(), parts)?);
    let bc_rs = Arc::new(crate::rewrite::complete(&bc, cap)?);
    let g = |k: u16| NCPoly::letter(bc.letter(k));

    // entries of Φ~
    let tilde = |i: usize, j: usize| -> NCPoly {
        match (i <= m, j <= m) {
            (true, true) => g(bidx(i, j)),
            (true, false) => NCPoly::zero(),
            (false, true) => g(cidx(j)),
            (false, false) => {
                if i == j {
                    g(eidx)
                } else {
                    g(fidx)
                }
            }
        }
    };
    let mut report = Report::new(format!("free product QMap(X{m}) * C^{n}"));
    let space = FDCStar::points(n)?;
    let images: Vec<MElem> = (1..=n).map(|j| MElem((1..=n).map(|i| tilde(i, j)).collect())).collect();
    let bc_names = tensor(std::slice::from_ref(&bc));
    let bc_red = LegReducer::single(bc_rs.clone());
    report.push(Check::new(
        "Phi~ images are projections summing to 1",
        matrix_relations(&space, &images, &bc_red, &bc_names),
    ));
    let sigma = Permutation::transposition(n, n - 1, n);
    let inv = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let diff = &tilde(sigma.apply(i - 1) + 1, sigma.apply(j - 1) + 1) - &tilde(i, j);
            (format!("entry ({i}, {j})"), bc_red.reduce(&diff))
        })
        .collect();
    report.push(Check::new("Phi~ commutes with the transposition", collect_residues(inv, &bc_names)));

    let a_names = tensor(std::slice::from_ref(a));
    let a_red = LegReducer::single(rs.clone());
    let ax = |i: usize, j: usize| a.gen(&entry_name(i, j, n));
    let mut theta_images = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            theta_images.push(ax(i, j));
        }
    }
    for j in 1..=m {
        theta_images.push(ax(n - 1, j));
    }
    theta_images.push(ax(n - 1, n - 1));
    theta_images.push(ax(n - 1, n));
    let mut theta = GeneratorMap::new(bc.clone(), a_names.clone(), theta_images)?;
    report.push(Check::new("Theta: B*C -> A is a morphism", morphism_outcome(theta.check(&a_red), &a_names)));

    let lambda_images: Vec<NCPoly> =
        (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).map(|(i, j)| tilde(i, j)).collect();
    let mut lambda = GeneratorMap::new(a.clone(), bc_names.clone(), lambda_images)?;
    report.push(Check::new("Lambda: A -> B*C is a morphism", morphism_outcome(lambda.check(&bc_red), &bc_names)));

    let mut round = Vec::new();
    for k in 0..bc.generators().len() as u16 {
        let back = lambda.apply(&theta.apply(&g(k)));
        round.push((format!("Lambda Theta {}", bc.generators()[k as usize].name), bc_red.reduce(&(&back - &g(k)))));
    }
    let round_trip = collect_residues(round, &bc_names);
    let mut round = Vec::new();
    for (k, gen) in a.generators().iter().enumerate() {
        let x = NCPoly::letter(a.letter(k as u16));
        let back = theta.apply(&lambda.apply(&x));
        round.push((format!("Theta Lambda {}", gen.name), a_red.reduce(&(&back - &x))));
    }
    let other_way = collect_residues(round, &a_names);
    report.push(Check::new("Lambda Theta = id on generators of B*C", round_trip));
    report.push(Check::new("Theta Lambda = id on generators of A", other_way));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{m2_commutant_phi, qmap_m2};
    use crate::rewrite::complete;

    #[test]
    fn cycle_notation() {
        let p = Permutation::parse(5, "(1 2 3)(4 5)").unwrap();
        assert_eq!(p.apply(0), 1);
        assert_eq!(p.apply(2), 0);
        assert_eq!(p.apply(3), 4);
        assert_eq!(p.to_string(), "(1 2 3)(4 5)");
        assert_eq!(Permutation::parse(3, "(1,2,3)").unwrap(), Permutation::cycle(3));
        assert!(Permutation::parse(3, "").unwrap().is_identity());
        assert!(Permutation::parse(3, "()").unwrap().is_identity());
        // right to left: (1 2)(2 3) sends 3 -> 2 -> 1
        assert_eq!(Permutation::parse(3, "(1 2)(2 3)").unwrap().apply(2), 0);
        assert!(Permutation::parse(3, "(1 4)").is_err());
        assert!(Permutation::parse(3, "(1 1)").is_err());
        assert!(Permutation::parse(3, "(1 2").is_err());
        assert_eq!(Permutation::cycle(4).order(), 4);
    }

    #[test]
    fn group_closure_examples() {
        let c = PermFamily::parse(3, &["(1 2 3)"]).unwrap().group_closure();
        assert_eq!(c.len(), 3);
        let s3 = PermFamily::parse(3, &["(1 2)", "(1 2 3)"]).unwrap().group_closure();
        assert_eq!(s3.len(), 6);
        let e = PermFamily::new(4, []).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.group_closure().len(), 1);
    }

    #[test]
    fn automorphisms() {
        assert!(M2Automorphism::parse("swap").unwrap().is_swap());
        let rot = M2Automorphism::parse("3/5, 4/5; -4/5, 3/5").unwrap();
        assert!(!rot.is_swap());
        assert!(M2Automorphism::parse("1, 1, 0, 1").is_err());
        assert!(M2Automorphism::parse("i, 0, 0, 1").is_ok());
        let fam = ClassicalFamily::M2(vec![rot]);
        assert_eq!(fam.verify(), Outcome::Pass);
    }

    #[test]
    fn psi_b_is_a_family() {
        let fam = ClassicalFamily::Permutations(PermFamily::parse(3, &["(1 2 3)", "(1 2)"]).unwrap());
        assert_eq!(fam.verify(), Outcome::Pass);
        assert_eq!(ClassicalFamily::M2(vec![M2Automorphism::swap()]).verify(), Outcome::Pass);
    }

    #[test]
    fn composition_with_trivial_family() {
        let s = qmap_xn(3);
        let phi = s.action.as_ref().unwrap().family();
        let triv = QuantumFamily::trivial(phi.space.clone());
        let c = compose_families(&phi, &triv).unwrap();
        assert_eq!(c.legs, 2);
        assert_eq!(c.on_basis, phi.on_basis);
        assert!(compose_families(&phi, &QuantumFamily::trivial(FDCStar::m2())).is_err());
    }

    #[test]
    fn composing_permutation_families() {
        let f = ClassicalFamily::Permutations(PermFamily::parse(3, &["(1 2 3)"]).unwrap());
        let g = ClassicalFamily::Permutations(PermFamily::parse(3, &["(1 2)"]).unwrap());
        let c = compose_families(&f.family(), &g.family()).unwrap();
        // e_1 -> (1 2 3)((1 2)(1)) = 3 on legs (d1, d1)
        let e1 = &c.on_basis[0];
        let both = &NCPoly::letter(f.algebra().letter(0)) * &NCPoly::letter(g.algebra().letter(0)).on_leg(1);
        assert_eq!(e1.0[2], both);
        assert!(e1.0[0].is_zero() && e1.0[1].is_zero());
    }

    #[test]
    fn permutation_ideal_matches_formula() {
        let n = 3;
        let s = qmap_xn(n);
        let sigma = Permutation::cycle(n);
        let fam = ClassicalFamily::Permutations(PermFamily::new(n, [sigma.clone()]).unwrap());
        let got = commutant_ideal(&s, &fam).unwrap();
        let a = |i: usize, j: usize| s.algebra.gen(&entry_name(i + 1, j + 1, n));
        let inv = sigma.inverse();
        let mut want = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                let p = &a(i, sigma.apply(j)) - &a(inv.apply(i), j);
                if !p.is_zero() {
                    want.insert(p.monic());
                }
            }
        }
        assert_eq!(got, want.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn identity_family_gives_empty_ideal_and_same_hash() {
        let s = qmap_xn(3);
        let fam = ClassicalFamily::Permutations(PermFamily::new(3, []).unwrap());
        assert!(commutant_ideal(&s, &fam).unwrap().is_empty());
        let c = build_commutant(&s, &fam, 6, None).unwrap();
        assert_eq!(c.semigroup.algebra.hash(), s.algebra.hash());
        assert!(c.report.passed(), "{}", c.report.render_human());
    }

    #[test]
    fn swap_ideal_spans_the_expected_set() {
        let s = qmap_m2();
        let fam = ClassicalFamily::M2(vec![M2Automorphism::swap()]);
        let got = commutant_ideal(&s, &fam).unwrap();
        let want: Vec<NCPoly> = ["delta - alpha*", "gamma - gamma*", "beta - beta*", "alpha - delta*"]
            .iter()
            .map(|e| s.algebra.expr(e).unwrap())
            .collect();
        let a = s.algebra.quotient(&got, "got").unwrap();
        let b = s.algebra.quotient(&want, "want").unwrap();
        let (ra, rb) = (complete(&a, 8).unwrap(), complete(&b, 8).unwrap());
        for p in &want {
            assert!(ra.normal_form(p).unwrap().is_zero());
        }
        for p in &got {
            assert!(rb.normal_form(p).unwrap().is_zero());
        }
    }

    #[test]
    fn swap_commutant_matches_builtin() {
        let s = qmap_m2();
        let fam = ClassicalFamily::M2(vec![M2Automorphism::swap()]);
        let c = build_commutant(&s, &fam, 8, None).unwrap();
        assert!(c.report.passed(), "{}", c.report.render_human());
        let builtin = m2_commutant_phi();
        let brs = Arc::new(complete(&builtin.algebra, 8).unwrap());
        // derived -> builtin: δ ↦ α*
        let images: Vec<NCPoly> =
            ["alpha", "beta", "gamma", "alpha*"].iter().map(|e| builtin.algebra.expr(e).unwrap()).collect();
        let mut there =
            GeneratorMap::new(c.semigroup.algebra.clone(), tensor(std::slice::from_ref(&builtin.algebra)), images)
                .unwrap();
        assert_eq!(there.check(&LegReducer::single(brs)), crate::presentation::MorphismCheck::Verified);
        let images: Vec<NCPoly> =
            ["alpha", "beta", "gamma"].iter().map(|e| c.semigroup.algebra.expr(e).unwrap()).collect();
        let mut back =
            GeneratorMap::new(builtin.algebra.clone(), tensor(std::slice::from_ref(&c.semigroup.algebra)), images)
                .unwrap();
        assert_eq!(back.check(&LegReducer::single(c.rewrite.clone())), crate::presentation::MorphismCheck::Verified);
        let d = c.semigroup.algebra.expr("delta - alpha*").unwrap();
        assert!(c.rewrite.normal_form(&d).unwrap().is_zero());
    }

    #[test]
    fn transposition_n3() {
        let (_, report) = transposition_report(3, 6, None).unwrap();
        assert!(report.passed(), "{}", report.render_human());
    }
}
