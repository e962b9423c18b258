//! Quantum semigroups `(A, Δ, ε)` with an optional action on a finite
//! dimensional C*-algebra, and the checks of their axioms.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ncpoly::{Letter, NCPoly, Word};
use crate::presentation::{tensor, Generator, GeneratorMap, MorphismCheck, Presentation, TensorPresentation};
use crate::rewrite::{LegReducer, ReduceError, RewriteSystem};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// `C^n`, functions on `n` points.
    Points(usize),
    /// 2x2 matrices, generated by `n` with `n^2 = 0`, `nn* + n*n = 1`.
    M2,
}

/// A finite dimensional C*-algebra spanned by matrix units.
///
/// Basis element `k` is the matrix unit `E_{r,c}` with `(r, c) = units[k]`,
/// so the structure constants are `E_ab E_cd = δ_bc E_ad` and `E_ab* = E_ba`.
#[derive(Clone, Debug)]
pub struct FDCStar {
    kind: SpaceKind,
    units: Vec<(usize, usize)>,
    basis_names: Vec<String>,
    presentation: Arc<Presentation>,
    basis_words: Vec<NCPoly>,
}

impl FDCStar {
    pub fn points(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("need at least one point".into()));
        }
        let gens: Vec<Generator> = (1..=n).map(|k| Generator { name: format!("e{k}"), self_adjoint: true }).collect();
        let presentation = Presentation::new(format!("C{n}"), gens, Vec::new(), vec![(0..n as u16).collect()])?;
        let basis_words = (0..n as u16).map(|k| NCPoly::letter(presentation.letter(k))).collect();
        Ok(FDCStar {
            kind: SpaceKind::Points(n),
            units: (0..n).map(|k| (k, k)).collect(),
            basis_names: (1..=n).map(|k| format!("e{k}")).collect(),
            presentation: Arc::new(presentation),
            basis_words,
        })
    }

    /// `M_2` with `n = E_12` and basis `{nn*, n, n*, n*n} = {E11, E12, E21, E22}`.
    pub fn m2() -> Self {
        let gens = vec![Generator { name: "n".into(), self_adjoint: false }];
        let n = NCPoly::letter(Letter::new(0, false, false));
        let ns = n.star();
        let relations = vec![&n * &n, &(&(&n * &ns) + &(&ns * &n)) - &NCPoly::one()];
        let presentation = Presentation::new("M2", gens, relations, Vec::new()).expect("valid M2 presentation");
        FDCStar {
            kind: SpaceKind::M2,
            units: vec![(0, 0), (0, 1), (1, 0), (1, 1)],
            basis_names: vec!["n n*".into(), "n".into(), "n*".into(), "n* n".into()],
            presentation: Arc::new(presentation),
            basis_words: vec![&n * &ns, n.clone(), ns.clone(), &ns * &n],
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.units.len()
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn basis_name(&self, k: usize) -> &str {
        &self.basis_names[k]
    }

    pub fn basis_word(&self, k: usize) -> &NCPoly {
        &self.basis_words[k]
    }

    pub fn unit(&self, k: usize) -> (usize, usize) {
        self.units[k]
    }

    pub fn unit_index(&self, r: usize, c: usize) -> Option<usize> {
        self.units.iter().position(|&u| u == (r, c))
    }

    /// Size of the matrices the basis lives in.
    pub fn matrix_size(&self) -> usize {
        self.units.iter().map(|&(r, c)| r.max(c) + 1).max().unwrap_or(0)
    }

    fn mul_units(&self, a: usize, b: usize) -> Option<usize> {
        let (r, c) = self.units[a];
        let (r2, c2) = self.units[b];
        if c != r2 {
            return None;
        }
        Some(self.unit_index(r, c2).expect("closed under multiplication"))
    }

    fn star_unit(&self, a: usize) -> usize {
        let (r, c) = self.units[a];
        self.unit_index(c, r).expect("closed under adjoint")
    }

    pub fn identity(&self) -> MElem {
        let mut out = MElem::zero(self.dim());
        for (k, &(r, c)) in self.units.iter().enumerate() {
            if r == c {
                out.0[k] = NCPoly::one();
            }
        }
        out
    }

    pub fn basis(&self, k: usize) -> MElem {
        let mut out = MElem::zero(self.dim());
        out.0[k] = NCPoly::one();
        out
    }

    /// Images of `M`'s generators inside `M` itself.
    pub fn generator_elements(&self) -> Vec<MElem> {
        match self.kind {
            SpaceKind::Points(n) => (0..n).map(|k| self.basis(k)).collect(),
            SpaceKind::M2 => vec![self.basis(1)],
        }
    }

    /// Homomorphic evaluation of a polynomial in `M`'s generators, given
    /// where the generators go.
    pub fn evaluate(&self, p: &NCPoly, images: &[MElem]) -> MElem {
        let stars: Vec<MElem> = images.iter().map(|m| m.star(self)).collect();
        let mut out = MElem::zero(self.dim());
        for (w, c) in p.terms() {
            let mut acc = self.identity().scale(c);
            for l in w.letters() {
                let img = if l.starred { &stars[l.generator as usize] } else { &images[l.generator as usize] };
                acc = acc.mul(img, self);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Coordinates of an element of `M` written in its generators.
    pub fn coords(&self, p: &NCPoly) -> Vec<Scalar> {
        self.evaluate(p, &self.generator_elements())
            .0
            .iter()
            .map(|q| q.as_constant().expect("scalar coordinates"))
            .collect()
    }
}

/// An element of `M ⊗ B`: one coefficient polynomial per basis element of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MElem(pub Vec<NCPoly>);

impl MElem {
    pub fn zero(dim: usize) -> Self {
        MElem(vec![NCPoly::zero(); dim])
    }

    pub fn from_scalars(coords: &[Scalar]) -> Self {
        MElem(coords.iter().map(|c| NCPoly::constant(c.clone())).collect())
    }

    pub fn add(&self, other: &MElem) -> MElem {
        MElem(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &MElem) -> MElem {
        MElem(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> MElem {
        MElem(self.0.iter().map(|a| a.scale(c)).collect())
    }

    /// Multiplies every coefficient on the right by `p`.
    pub fn tensor_right(&self, p: &NCPoly) -> MElem {
        MElem(self.0.iter().map(|a| a * p).collect())
    }

    pub fn mul(&self, other: &MElem, space: &FDCStar) -> MElem {
        let mut out = MElem::zero(space.dim());
        for (a, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.0.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some(k) = space.mul_units(a, b) {
                    out.0[k] = &out.0[k] + &(x * y);
                }
            }
        }
        out
    }

    pub fn star(&self, space: &FDCStar) -> MElem {
        let mut out = MElem::zero(space.dim());
        for (a, x) in self.0.iter().enumerate() {
            out.0[space.star_unit(a)] = x.star();
        }
        out
    }

    pub fn map(&self, f: impl Fn(&NCPoly) -> NCPoly) -> MElem {
        MElem(self.0.iter().map(f).collect())
    }

    pub fn try_map<E>(&self, f: impl Fn(&NCPoly) -> Result<NCPoly, E> + Sync + Send) -> Result<MElem, E>
    where
        E: Send,
    {
        Ok(MElem(self.0.par_iter().map(f).collect::<Result<_, E>>()?))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(NCPoly::is_zero)
    }
}

/// A quantum family of maps `M -> M ⊗ B_0 ⊗ ... ⊗ B_{legs-1}`, stored on the
/// basis of `M`.
#[derive(Clone, Debug)]
pub struct QuantumFamily {
    pub space: FDCStar,
    pub legs: u8,
    pub on_basis: Vec<MElem>,
}

impl QuantumFamily {
    /// Extends values on `M`'s generators to the whole basis.
    pub fn from_generators(space: FDCStar, legs: u8, generator_images: &[MElem]) -> Self {
        let on_basis = (0..space.dim()).map(|k| space.evaluate(space.basis_word(k), generator_images)).collect();
        QuantumFamily { space, legs, on_basis }
    }

    /// The trivial family `m -> m ⊗ 1`.
    pub fn trivial(space: FDCStar) -> Self {
        let on_basis = (0..space.dim()).map(|k| space.basis(k)).collect();
        QuantumFamily { space, legs: 1, on_basis }
    }

    /// Image of an element given by coordinates.
    pub fn apply(&self, coords: &MElem) -> MElem {
        let mut out = MElem::zero(self.space.dim());
        for (k, c) in coords.0.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.on_basis[k].tensor_right(&c.shift_legs(self.legs)));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Action {
    pub space: FDCStar,
    /// `Φ` on the generators of `M`, coefficients in `A` (leg 0).
    pub generator_images: Vec<MElem>,
}

impl Action {
    pub fn family(&self) -> QuantumFamily {
        QuantumFamily::from_generators(self.space.clone(), 1, &self.generator_images)
    }
}

#[derive(Clone, Debug)]
pub struct QuantumSemigroup {
    pub name: String,
    pub algebra: Arc<Presentation>,
    /// `Δ(g)` in `A ⊗ A` for each generator.
    pub delta: Vec<NCPoly>,
    pub counit: Vec<Scalar>,
    pub action: Option<Action>,
}

impl QuantumSemigroup {
    pub fn new(
        name: impl Into<String>,
        algebra: Arc<Presentation>,
        delta: Vec<NCPoly>,
        counit: Vec<Scalar>,
        action: Option<Action>,
    ) -> Result<Self> {
        let n = algebra.generators().len();
        if delta.len() != n || counit.len() != n {
            return Err(Error::Invalid(format!("{n} generators need {n} coproduct and counit values")));
        }
        if let Some(a) = &action {
            if a.generator_images.len() != a.space.presentation().generators().len() {
                return Err(Error::Invalid("action must give one image per generator of M".into()));
            }
        }
        Ok(QuantumSemigroup { name: name.into(), algebra, delta, counit, action })
    }

    pub fn delta_map(&self) -> GeneratorMap {
        let target = tensor(&[self.algebra.clone(), self.algebra.clone()]);
        GeneratorMap::new(self.algebra.clone(), target, self.delta.clone()).expect("sizes checked")
    }

    pub fn counit_map(&self) -> GeneratorMap {
        GeneratorMap::to_scalars(self.algebra.clone(), self.counit.clone()).expect("sizes checked")
    }

    pub fn tensor_names(&self, legs: usize) -> TensorPresentation {
        tensor(&vec![self.algebra.clone(); legs])
    }

    /// Same structure maps over another presentation with the same generators
    /// (e.g. a quotient).
    pub fn with_algebra(&self, name: impl Into<String>, algebra: Arc<Presentation>) -> Result<Self> {
        if algebra.generators().len() != self.algebra.generators().len() {
            return Err(Error::Invalid("algebra must keep the generators".into()));
        }
        let algebra_sa: Vec<bool> = algebra.generators().iter().map(|g| g.self_adjoint).collect();
        let fix = |p: &NCPoly| {
            p.map_words(|w| {
                w.map_letters(|l| Letter::new(l.generator, l.starred, algebra_sa[l.generator as usize]).on_leg(l.leg))
            })
        };
        let action = self.action.as_ref().map(|a| Action {
            space: a.space.clone(),
            generator_images: a.generator_images.iter().map(|m| m.map(fix)).collect(),
        });
        QuantumSemigroup::new(name, algebra, self.delta.iter().map(fix).collect(), self.counit.clone(), action)
    }
}

/// Replaces each letter on `leg` by its image (an element with `image_legs`
/// legs, starting at `leg`); letters on later legs move up accordingly.
pub fn substitute_leg(p: &NCPoly, leg: u8, images: &[NCPoly], image_legs: u8) -> NCPoly {
    let shifted: Vec<(NCPoly, NCPoly)> = images
        .iter()
        .map(|img| {
            let s = img.shift_legs(leg);
            let t = s.star();
            (s, t)
        })
        .collect();
    let mut out = NCPoly::zero();
    for (w, c) in p.terms() {
        let mut acc = NCPoly::constant(c.clone());
        let mut rest = Vec::new();
        for l in w.letters() {
            if l.leg == leg {
                let (img, img_star) = &shifted[l.generator as usize];
                acc = &acc * if l.starred { img_star } else { img };
            } else if l.leg < leg {
                rest.push(*l);
            } else {
                rest.push(l.on_leg(l.leg + image_legs - 1));
            }
        }
        let rest = NCPoly::word(Word::from_letters(rest));
        out = &out + &(&acc * &rest);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Offending items with their residues in canonical text.
    Fail(Vec<(String, String)>),
    Inconclusive(String),
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail(_) => "FAIL",
            Outcome::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
}

impl Check {
    pub fn new(name: impl Into<String>, outcome: Outcome) -> Self {
        Check { name: name.into(), outcome }
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, failure: impl FnOnce() -> (String, String)) -> Self {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail(vec![failure()]) };
        Check { name: name.into(), outcome }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// A list of checks plus informational key/value notes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
    pub notes: Vec<(String, String)>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report { subject: subject.into(), ..Default::default() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.push((key.into(), value.into()));
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn status(&self) -> Status {
        self.checks
            .iter()
            .map(|c| match c.outcome {
                Outcome::Pass => Status::Pass,
                Outcome::Fail(_) => Status::Fail,
                Outcome::Inconclusive(_) => Status::Inconclusive,
            })
            .max()
            .unwrap_or(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {}", self.subject);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "{k}: {v}");
        }
        for c in &self.checks {
            let _ = writeln!(out, "{:<12} {}", c.outcome.tag(), c.name);
            match &c.outcome {
                Outcome::Pass => {}
                Outcome::Fail(items) => {
                    for (label, residue) in items {
                        let _ = writeln!(out, "    {label}: residue {residue}");
                    }
                }
                Outcome::Inconclusive(why) => {
                    let _ = writeln!(out, "    {why}");
                }
            }
        }
        out
    }

    /// Flat `key=value` lines.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "subject={}", self.subject);
        let _ = writeln!(out, "status={:?}", self.status()).map(|_| ());
        for (k, v) in &self.notes {
            let _ = writeln!(out, "note.{}={}", slug(k), v);
        }
        for (i, c) in self.checks.iter().enumerate() {
            let key = format!("check.{i}");
            let _ = writeln!(out, "{key}.name={}", c.name);
            let _ = writeln!(out, "{key}.result={}", c.outcome.tag());
            match &c.outcome {
                Outcome::Pass => {}
                Outcome::Fail(items) => {
                    for (j, (label, residue)) in items.iter().enumerate() {
                        let _ = writeln!(out, "{key}.residue.{j}.label={label}");
                        let _ = writeln!(out, "{key}.residue.{j}.value={residue}");
                    }
                }
                Outcome::Inconclusive(why) => {
                    let _ = writeln!(out, "{key}.reason={why}");
                }
            }
        }
        out
    }
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}

pub(crate) fn morphism_outcome(m: MorphismCheck, names: &TensorPresentation) -> Outcome {
    match m {
        MorphismCheck::Verified => Outcome::Pass,
        MorphismCheck::Inconclusive(why) => Outcome::Inconclusive(why),
        MorphismCheck::Violations(v) => Outcome::Fail(v.into_iter().map(|(l, r)| (l, names.display(&r))).collect()),
    }
}

/// Collects per-item residues into one outcome.
pub(crate) fn collect_residues(
    items: Vec<(String, Result<NCPoly, ReduceError>)>,
    names: &TensorPresentation,
) -> Outcome {
    let mut failures = Vec::new();
    for (label, r) in items {
        match r {
            Ok(r) if r.is_zero() => {}
            Ok(r) => failures.push((label, names.display(&r))),
            Err(e) => return Outcome::Inconclusive(format!("{label}: {e}")),
        }
    }
    if failures.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail(failures)
    }
}

impl QuantumSemigroup {
    fn gen_name(&self, g: usize) -> &str {
        &self.algebra.generators()[g].name
    }

    /// Δ respects the relations of `A`; for algebras acting on `M_2` also the
    /// matrix identities for the Δ-image of `Φ(n)`.
    pub fn verify_comultiplication(&self, rs: &Arc<RewriteSystem>) -> Report {
        let mut report = Report::new(format!("{}: comultiplication", self.name));
        let red2 = LegReducer::repeated(rs.clone(), 2);
        let names = self.tensor_names(2);
        let outcome = morphism_outcome(self.delta_map().check(&red2), &names);
        report.push(Check::new("Delta respects the relations of A", outcome));
        if let Some(action) = &self.action {
            if action.space.kind() == SpaceKind::M2 {
                let lifted: Vec<MElem> =
                    action.generator_images.iter().map(|m| m.map(|p| substitute_leg(p, 0, &self.delta, 2))).collect();
                report.push(Check::new(
                    "Delta-image matrix satisfies the relations of M2",
                    matrix_relations(&action.space, &lifted, &red2, &names),
                ));
            }
        }
        report
    }

    /// `(Δ ⊗ id)Δ = (id ⊗ Δ)Δ` on generators, compared in `A ⊗ A ⊗ A`.
    pub fn verify_coassociativity(&self, rs: &Arc<RewriteSystem>) -> Report {
        let mut report = Report::new(format!("{}: coassociativity", self.name));
        let red3 = LegReducer::repeated(rs.clone(), 3);
        let names = self.tensor_names(3);
        let items: Vec<(String, Result<NCPoly, ReduceError>)> = (0..self.delta.len())
            .into_par_iter()
            .map(|g| {
                let d = &self.delta[g];
                let left = substitute_leg(d, 0, &self.delta, 2);
                let right = substitute_leg(d, 1, &self.delta, 2);
                (format!("generator {}", self.gen_name(g)), red3.reduce(&(&left - &right)))
            })
            .collect();
        report.push(Check::new("(Delta (x) id) Delta = (id (x) Delta) Delta", collect_residues(items, &names)));
        report
    }

    /// `ε` is a morphism and `(ε ⊗ id)Δ = id = (id ⊗ ε)Δ` on generators.
    pub fn verify_counit(&self, rs: &Arc<RewriteSystem>) -> Report {
        let mut report = Report::new(format!("{}: counit", self.name));
        let scalars = LegReducer::single(Arc::new(RewriteSystem::empty(usize::MAX)));
        let outcome =
            morphism_outcome(self.counit_map().check(&scalars), &tensor(&[Arc::new(Presentation::scalars())]));
        report.push(Check::new("epsilon respects the relations of A", outcome));
        let red = LegReducer::single(rs.clone());
        let names = self.tensor_names(1);
        let eps: Vec<NCPoly> = self.counit.iter().cloned().map(NCPoly::constant).collect();
        for (leg, label) in [(0u8, "(epsilon (x) id) Delta = id"), (1u8, "(id (x) epsilon) Delta = id")] {
            let items = (0..self.delta.len())
                .map(|g| {
                    let image = substitute_leg(&self.delta[g], leg, &eps, 0);
                    let g_poly = NCPoly::letter(self.algebra.letter(g as u16));
                    (format!("generator {}", self.gen_name(g)), red.reduce(&(&image - &g_poly)))
                })
                .collect();
            report.push(Check::new(label, collect_residues(items, &names)));
        }
        report
    }

    /// `Φ` respects the relations of `M`, `(Φ ⊗ id)Φ = (id ⊗ Δ)Φ` and
    /// `(id ⊗ ε)Φ = id`.
    pub fn verify_action(&self, rs: &Arc<RewriteSystem>) -> Report {
        let mut report = Report::new(format!("{}: action", self.name));
        let Some(action) = &self.action else {
            report.note("action", "none installed");
            return report;
        };
        let space = &action.space;
        let red1 = LegReducer::single(rs.clone());
        let red2 = LegReducer::repeated(rs.clone(), 2);
        report.push(Check::new(
            "Phi respects the relations of M",
            matrix_relations(space, &action.generator_images, &red1, &self.tensor_names(1)),
        ));

        let family = action.family();
        let reduced_basis: Result<Vec<MElem>, ReduceError> =
            family.on_basis.iter().map(|m| m.try_map(|p| red1.reduce(p))).collect();
        let outcome = match reduced_basis {
            Err(e) => Outcome::Inconclusive(e.to_string()),
            Ok(on_basis) => {
                let phi = QuantumFamily { space: space.clone(), legs: 1, on_basis };
                let names = self.tensor_names(2);
                let mut items = Vec::new();
                for (g, img) in action.generator_images.iter().enumerate() {
                    let left = phi.apply(img);
                    let right = img.map(|p| substitute_leg(p, 0, &self.delta, 2));
                    for (k, diff) in left.sub(&right).0.iter().enumerate() {
                        items.push((
                            format!("{} at {}", space.presentation().generators()[g].name, space.basis_name(k)),
                            red2.reduce(diff),
                        ));
                    }
                }
                collect_residues(items, &names)
            }
        };
        report.push(Check::new("(Phi (x) id) Phi = (id (x) Delta) Phi", outcome));

        let eps: Vec<NCPoly> = self.counit.iter().cloned().map(NCPoly::constant).collect();
        let mut failures = Vec::new();
        for (g, img) in action.generator_images.iter().enumerate() {
            let got = img.map(|p| substitute_leg(p, 0, &eps, 0));
            let want = &space.generator_elements()[g];
            if got != *want {
                let m_names = space.presentation().as_ref();
                failures.push((
                    m_names.generators()[g].name.clone(),
                    got.0.iter().map(|p| p.display(m_names)).collect::<Vec<_>>().join(", "),
                ));
            }
        }
        let outcome = if failures.is_empty() { Outcome::Pass } else { Outcome::Fail(failures) };
        report.push(Check::new("(id (x) epsilon) Phi = id", outcome));
        report
    }

    /// All four verifiers.
    pub fn verify_all(&self, rs: &Arc<RewriteSystem>) -> Report {
        let mut report = Report::new(format!("{}: quantum semigroup axioms", self.name));
        report.note("presentation", self.algebra.hash().to_string());
        report.note("rewrite rules", rs.rules().len().to_string());
        report.note("degree cap", rs.degree_cap().to_string());
        if rs.skipped_overlaps() > 0 {
            report.note("overlaps above cap", rs.skipped_overlaps().to_string());
        }
        report.extend(self.verify_comultiplication(rs));
        report.extend(self.verify_coassociativity(rs));
        report.extend(self.verify_counit(rs));
        report.extend(self.verify_action(rs));
        report
    }
}

/// Evaluates the relations of `M` (and `m = m*` for self-adjoint generators)
/// on the given images and reduces every coordinate.
pub(crate) fn matrix_relations(
    space: &FDCStar,
    images: &[MElem],
    reducer: &LegReducer,
    names: &TensorPresentation,
) -> Outcome {
    let m = space.presentation();
    let mut items = Vec::new();
    let mut obligations: Vec<(String, MElem)> =
        m.ideal_generators().map(|r| (format!("{} = 0", r.display(m.as_ref())), space.evaluate(r, images))).collect();
    for (g, gen) in m.generators().iter().enumerate() {
        if gen.self_adjoint {
            obligations.push((format!("{0} = {0}*", gen.name), images[g].sub(&images[g].star(space))));
        }
    }
    for (label, value) in obligations {
        for (k, coord) in value.0.iter().enumerate() {
            items.push((format!("{label} at {}", space.basis_name(k)), reducer.reduce(coord)));
        }
    }
    collect_residues(items, names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m2_basis_words_are_matrix_units() {
        let m = FDCStar::m2();
        for k in 0..4 {
            let coords = m.coords(m.basis_word(k));
            for (j, c) in coords.iter().enumerate() {
                assert_eq!(c.is_one(), j == k);
                assert!(c.is_one() || c.is_zero());
            }
        }
        // the defining relations hold for n = E12
        let images = m.generator_elements();
        for r in m.presentation().ideal_generators() {
            assert!(m.evaluate(r, &images).is_zero());
        }
    }

    #[test]
    fn points_are_a_partition_of_unity() {
        let m = FDCStar::points(3).unwrap();
        let images = m.generator_elements();
        for r in m.presentation().ideal_generators() {
            assert!(m.evaluate(r, &images).is_zero());
        }
        assert_eq!(m.matrix_size(), 3);
        assert!(FDCStar::points(0).is_err());
    }

    #[test]
    fn matrix_units_are_associative_and_star_compatible() {
        for m in [FDCStar::m2(), FDCStar::points(3).unwrap()] {
            let d = m.dim();
            for a in 0..d {
                assert_eq!(m.star_unit(m.star_unit(a)), a);
                for b in 0..d {
                    let ab = m.mul_units(a, b);
                    // (ab)* = b* a*
                    assert_eq!(ab.map(|k| m.star_unit(k)), m.mul_units(m.star_unit(b), m.star_unit(a)));
                    for c in 0..d {
                        let left = ab.and_then(|k| m.mul_units(k, c));
                        let right = m.mul_units(b, c).and_then(|k| m.mul_units(a, k));
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn substitute_leg_shifts_later_legs() {
        let x = NCPoly::letter(Letter::new(0, false, false));
        let y = NCPoly::letter(Letter::new(1, false, false));
        // x (*) y with x -> x (*) x
        let p = &x * &y.on_leg(1);
        let images = vec![&x * &x.on_leg(1), y.clone()];
        let q = substitute_leg(&p, 0, &images, 2);
        assert_eq!(q, &(&x * &x.on_leg(1)) * &y.on_leg(2));
        // counit-style substitution removes the leg
        let eps = vec![NCPoly::constant(Scalar::from_int(3)), NCPoly::one()];
        assert_eq!(substitute_leg(&p, 0, &eps, 0), y.scale(&Scalar::from_int(3)));
    }

    #[test]
    fn report_status_and_rendering() {
        let mut r = Report::new("demo");
        r.push(Check::new("a", Outcome::Pass));
        assert_eq!(r.status(), Status::Pass);
        r.push(Check::new("b", Outcome::Inconclusive("cap".into())));
        assert_eq!(r.status().exit_code(), 2);
        r.push(Check::new("c", Outcome::Fail(vec![("x".into(), "y".into())])));
        assert_eq!(r.status().exit_code(), 1);
        let text = r.render_machine();
        assert!(text.contains("check.2.residue.0.value=y"));
        assert!(r.render_human().contains("FAIL         c"));
    }
}
