//! Finitely presented *-algebras.
//!
//! A [`Presentation`] lists generators (optionally self-adjoint), relations
//! `p = 0` and closure annotations. Closure annotations stand for relations
//! that hold in every C*-algebra satisfying the declared ones; they are
//! expanded into explicit relations at construction and tagged with their
//! provenance.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::dsl;
use crate::error::{Error, Result};
use crate::ncpoly::{Letter, LetterNames, NCPoly};
use crate::rewrite::{LegReducer, ReduceError};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub self_adjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Given,
    /// Expanded from the closure annotation with this index.
    Closure(usize),
    /// Added by a quotient; the note says why.
    Quotient(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub poly: NCPoly,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    /// Members are projections summing to the unit.
    ProjectionPartition(Vec<u16>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureAnnotation {
    pub kind: ClosureKind,
    pub justification: &'static str,
}

pub const PARTITION_JUSTIFICATION: &str = "projections summing to 1 in a C*-algebra are pairwise orthogonal";

#[derive(Clone, Debug)]
pub struct Presentation {
    name: String,
    generators: Vec<Generator>,
    relations: Vec<Relation>,
    closures: Vec<ClosureAnnotation>,
    hash: String,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash
    }
}

impl Presentation {
    /// Builds a presentation; relation letters are renormalized to the final
    /// self-adjointness flags (closure members become self-adjoint).
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Generator>,
        relations: Vec<NCPoly>,
        partitions: Vec<Vec<u16>>,
    ) -> Result<Self> {
        let mut generators = generators;
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.name.as_str()) {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        if generators.len() > u16::MAX as usize {
            return Err(Error::Invalid("too many generators".into()));
        }
        for members in &partitions {
            for &m in members {
                let g = generators.get_mut(m as usize).ok_or_else(|| Error::UnknownLetter(format!("#{m}")))?;
                g.self_adjoint = true;
            }
        }
        let mut out = Presentation {
            name: name.into(),
            generators,
            relations: Vec::new(),
            closures: Vec::new(),
            hash: String::new(),
        };
        for r in relations {
            let r = out.normalize(&r)?;
            out.push_relation(r, Provenance::Given);
        }
        for members in partitions {
            out.add_partition(members);
        }
        out.rehash();
        Ok(out)
    }

    /// The free *-algebra on the given generators.
    pub fn free(name: impl Into<String>, generators: Vec<Generator>) -> Result<Self> {
        Presentation::new(name, generators, Vec::new(), Vec::new())
    }

    /// The scalars: no generators, no relations.
    pub fn scalars() -> Self {
        Presentation::free("scalars", Vec::new()).expect("empty presentation")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn closures(&self) -> &[ClosureAnnotation] {
        &self.closures
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn generator_index(&self, name: &str) -> Option<u16> {
        self.generators.iter().position(|g| g.name == name).map(|k| k as u16)
    }

    /// The letter for generator `index` (unstarred, leg 0).
    pub fn letter(&self, index: u16) -> Letter {
        Letter::new(index, false, self.generators[index as usize].self_adjoint)
    }

    pub fn gen(&self, name: &str) -> NCPoly {
        let k = self.generator_index(name).unwrap_or_else(|| panic!("no generator '{name}'"));
        NCPoly::letter(self.letter(k))
    }

    /// Every letter of the alphabet in order: each generator, then its adjoint
    /// unless it is self-adjoint.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for (k, g) in self.generators.iter().enumerate() {
            out.push(Letter::new(k as u16, false, g.self_adjoint));
            if !g.self_adjoint {
                out.push(Letter::new(k as u16, true, false));
            }
        }
        out
    }

    /// Relation polynomials generating the ideal.
    pub fn ideal_generators(&self) -> impl Iterator<Item = &NCPoly> {
        self.relations.iter().map(|r| &r.poly)
    }

    /// Relations that are not closure expansions (the ones written out in files).
    pub fn explicit_relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| !matches!(r.provenance, Provenance::Closure(_)))
    }

    pub fn partitions(&self) -> impl Iterator<Item = &[u16]> {
        self.closures.iter().map(|c| match &c.kind {
            ClosureKind::ProjectionPartition(m) => m.as_slice(),
        })
    }

    /// Parses an expression in the presentation DSL over this alphabet.
    pub fn expr(&self, text: &str) -> Result<NCPoly> {
        Ok(dsl::parse_expression(text, &|_, name| self.resolve(0, name))?)
    }

    /// Checks letters and rewrites adjoints of self-adjoint generators away.
    pub fn normalize(&self, p: &NCPoly) -> Result<NCPoly> {
        for l in p.letters() {
            if l.leg != 0 || l.generator as usize >= self.generators.len() {
                return Err(Error::UnknownLetter(format!("#{} on leg {}", l.generator, l.leg)));
            }
        }
        Ok(p.map_words(|w| {
            w.map_letters(|l| Letter::new(l.generator, l.starred, self.generators[l.generator as usize].self_adjoint))
        }))
    }

    fn push_relation(&mut self, poly: NCPoly, provenance: Provenance) {
        if poly.is_zero() || self.relations.iter().any(|r| r.poly == poly) {
            return;
        }
        self.relations.push(Relation { poly, provenance });
    }

    fn add_partition(&mut self, members: Vec<u16>) {
        let idx = self.closures.len();
        let letters: Vec<NCPoly> = members.iter().map(|&m| NCPoly::letter(self.letter(m))).collect();
        for p in &letters {
            self.push_relation(&(p * p) - p, Provenance::Closure(idx));
        }
        for i in 0..letters.len() {
            for j in i + 1..letters.len() {
                self.push_relation(&letters[i] * &letters[j], Provenance::Closure(idx));
            }
        }
        let sum = letters.iter().fold(NCPoly::zero(), |acc, p| &acc + p);
        self.push_relation(&sum - &NCPoly::one(), Provenance::Closure(idx));
        self.closures.push(ClosureAnnotation {
            kind: ClosureKind::ProjectionPartition(members),
            justification: PARTITION_JUSTIFICATION,
        });
    }

    /// Generators, explicit relations (sorted, one per line) and closures.
    pub fn canonical_serialization(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            out.push_str(&g.name);
            if g.self_adjoint {
                out.push_str(" sa");
            }
            out.push('\n');
        }
        out.push_str("--\n");
        let rels: BTreeSet<String> = self.explicit_relations().map(|r| r.poly.display(self)).collect();
        for r in rels {
            out.push_str(&r);
            out.push('\n');
        }
        out.push_str("--\n");
        for members in self.partitions() {
            let names: Vec<&str> = members.iter().map(|&m| self.generators[m as usize].name.as_str()).collect();
            out.push_str(&format!("partition({})\n", names.join(",")));
        }
        out
    }

    fn rehash(&mut self) {
        let digest = Sha256::digest(self.canonical_serialization().as_bytes());
        self.hash = hex::encode(digest);
    }

    /// Adds relations; the presentation of the quotient algebra `P / (extra)`.
    pub fn quotient(&self, extra: &[NCPoly], note: &str) -> Result<Presentation> {
        let mut out = self.clone();
        for p in extra {
            let p = self.normalize(p)?;
            out.push_relation(p, Provenance::Quotient(note.to_string()));
        }
        out.rehash();
        Ok(out)
    }

    /// Re-declares the named generators self-adjoint.
    pub fn with_self_adjoint(&self, names: &[&str]) -> Result<Presentation> {
        let mut gens = self.generators.clone();
        for n in names {
            let k = self.generator_index(n).ok_or_else(|| Error::UnknownLetter(n.to_string()))?;
            gens[k as usize].self_adjoint = true;
        }
        let rels = self.explicit_relations().map(|r| r.poly.clone()).collect();
        let parts = self.partitions().map(<[u16]>::to_vec).collect();
        Presentation::new(self.name.clone(), gens, rels, parts)
    }
}

impl LetterNames for Presentation {
    fn letter_name(&self, _leg: u8, generator: u16) -> String {
        self.generators[generator as usize].name.clone()
    }

    fn resolve(&self, _leg: u8, name: &str) -> Option<(u16, bool)> {
        self.generator_index(name).map(|k| (k, self.generators[k as usize].self_adjoint))
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&dsl::print_presentation(self))
    }
}

/// `P_0 ⊗ P_1 ⊗ ...`: letters of factor `k` live on leg `k` and commute with
/// the other legs by word normalization.
#[derive(Clone, Debug)]
pub struct TensorPresentation {
    pub factors: Vec<Arc<Presentation>>,
}

pub fn tensor(factors: &[Arc<Presentation>]) -> TensorPresentation {
    TensorPresentation { factors: factors.to_vec() }
}

impl TensorPresentation {
    pub fn legs(&self) -> u8 {
        self.factors.len() as u8
    }

    /// Embeds an element of factor `leg`.
    pub fn embed(&self, p: &NCPoly, leg: u8) -> NCPoly {
        p.on_leg(leg)
    }

    pub fn display(&self, p: &NCPoly) -> String {
        p.display_legs(self, self.legs())
    }
}

impl LetterNames for TensorPresentation {
    fn letter_name(&self, leg: u8, generator: u16) -> String {
        self.factors[leg as usize].letter_name(0, generator)
    }

    fn resolve(&self, leg: u8, name: &str) -> Option<(u16, bool)> {
        self.factors.get(leg as usize)?.resolve(0, name)
    }
}

/// A *-homomorphism given on generators; `f(g*) := f(g)*`.
#[derive(Clone, Debug)]
pub struct GeneratorMap {
    pub source: Arc<Presentation>,
    /// Legs of the target; no legs (or scalar factors) means scalars.
    pub target: TensorPresentation,
    pub images: Vec<NCPoly>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MorphismCheck {
    Verified,
    /// Offending source relations (as text) with their nonzero residues.
    Violations(Vec<(String, NCPoly)>),
    Inconclusive(String),
}

impl GeneratorMap {
    pub fn new(source: Arc<Presentation>, target: TensorPresentation, images: Vec<NCPoly>) -> Result<Self> {
        if images.len() != source.generators().len() {
            return Err(Error::Invalid(format!(
                "map from {} needs {} images, got {}",
                source.name(),
                source.generators().len(),
                images.len()
            )));
        }
        Ok(GeneratorMap { source, target, images, verified: false })
    }

    /// Map into the scalars.
    pub fn to_scalars(source: Arc<Presentation>, values: Vec<Scalar>) -> Result<Self> {
        let images = values.into_iter().map(NCPoly::constant).collect();
        GeneratorMap::new(source, TensorPresentation { factors: vec![Arc::new(Presentation::scalars())] }, images)
    }

    fn image_of(&self, l: &Letter) -> NCPoly {
        let img = &self.images[l.generator as usize];
        if l.starred {
            img.star()
        } else {
            img.clone()
        }
    }

    /// Homomorphic extension, no reduction.
    pub fn apply(&self, p: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in p.terms() {
            let mut acc = NCPoly::constant(c.clone());
            for l in w.letters() {
                acc = &acc * &self.image_of(l);
            }
            out = &out + &acc;
        }
        out
    }

    /// Homomorphic extension reducing after every factor.
    pub fn apply_reduced(&self, p: &NCPoly, reducer: &LegReducer) -> Result<NCPoly, ReduceError> {
        let images: Vec<(NCPoly, NCPoly)> = self
            .images
            .iter()
            .map(|img| Ok((reducer.reduce(img)?, reducer.reduce(&img.star())?)))
            .collect::<Result<_, ReduceError>>()?;
        let mut out = NCPoly::zero();
        for (w, c) in p.terms() {
            let mut acc = NCPoly::constant(c.clone());
            for l in w.letters() {
                let (img, img_star) = &images[l.generator as usize];
                acc = reducer.reduce(&(&acc * if l.starred { img_star } else { img }))?;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Checks that every source relation (and `g = g*` for self-adjoint
    /// generators) maps to zero in the target.
    pub fn check(&mut self, reducer: &LegReducer) -> MorphismCheck {
        let mut violations = Vec::new();
        let relations =
            self.source.ideal_generators().map(|r| (r.display(self.source.as_ref()), self.apply_reduced(r, reducer)));
        let adjoint = self
            .source
            .generators()
            .iter()
            .zip(&self.images)
            .filter(|(g, _)| g.self_adjoint)
            .map(|(g, img)| (format!("{0} = {0}*", g.name), reducer.reduce(&(img - &img.star()))));
        for (label, residue) in relations.chain(adjoint).collect::<Vec<_>>() {
            match residue {
                Ok(r) if r.is_zero() => {}
                Ok(r) => violations.push((label, r)),
                Err(e) => return MorphismCheck::Inconclusive(e.to_string()),
            }
        }
        self.verified = violations.is_empty();
        if violations.is_empty() {
            MorphismCheck::Verified
        } else {
            MorphismCheck::Violations(violations)
        }
    }
}
