//! Two-sided ideal reduction in free *-algebras.
//!
//! Relations are oriented into rules `lhs -> rhs` with `lhs` the deglex
//! leading word. [`complete`] runs noncommutative Buchberger completion
//! (overlap resolution plus inter-reduction) with every overlap of combined
//! degree above the cap skipped and counted. Within the cap the result
//! decides ideal membership; above it a nonzero residue is inconclusive.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::ncpoly::{Letter, NCPoly, Word};
use crate::presentation::Presentation;
use crate::scalar::Scalar;

pub const DEFAULT_DEGREE_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: NCPoly,
}

impl RewriteRule {
    /// The relation `lhs - rhs` this rule encodes.
    pub fn relation(&self) -> NCPoly {
        &NCPoly::word(self.lhs.clone()) - &self.rhs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    CompleteUpToCap,
    /// The ideal contains the unit; the system holds the single rule `1 -> 0`.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("degree {degree} exceeds the degree cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("letter on leg {0} has no rewrite system")]
    UnknownLeg(u8),
}

impl From<ReduceError> for Error {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::DegreeOverflow { degree, cap } => Error::DegreeOverflow { degree, cap },
            ReduceError::UnknownLeg(leg) => Error::Invalid(format!("no rewrite system for leg {leg}")),
        }
    }
}

/// Outcome of an ideal-membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Zero,
    /// Irreducible nonzero residue: not derivable at this cap (not a proof of
    /// non-membership).
    NonzeroAtCap(NCPoly),
}

/// One reduction step: the polynomial changed by `-coeff * left (lhs - rhs) right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub coeff: Scalar,
    pub left: Word,
    pub rule: usize,
    pub right: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Always rewrite the deglex-largest reducible word at its leftmost redex.
    Greedy,
    /// Smallest reducible word first, leftmost shortest redex.
    LeftmostInnermost,
    /// Largest reducible word first, rightmost longest redex.
    RightmostOutermost,
}

impl Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        self.letters()
    }
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    rules: Vec<RewriteRule>,
    index: HashMap<Word, usize>,
    lhs_lengths: Vec<usize>,
    degree_cap: usize,
    status: Status,
    skipped_overlaps: usize,
    presentation_hash: String,
}

impl RewriteSystem {
    pub(crate) fn from_rules(
        mut rules: Vec<RewriteRule>,
        degree_cap: usize,
        status: Status,
        skipped_overlaps: usize,
        presentation_hash: String,
    ) -> Self {
        rules.sort_by(|a, b| a.lhs.cmp(&b.lhs));
        let index = rules.iter().enumerate().map(|(k, r)| (r.lhs.clone(), k)).collect();
        let lhs_lengths = rules.iter().map(|r| r.lhs.degree()).collect::<BTreeSet<_>>().into_iter().collect();
        RewriteSystem { rules, index, lhs_lengths, degree_cap, status, skipped_overlaps, presentation_hash }
    }

    /// A system with no rules (the free algebra, or the scalars).
    pub fn empty(degree_cap: usize) -> Self {
        RewriteSystem::from_rules(Vec::new(), degree_cap, Status::CompleteUpToCap, 0, String::new())
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_consistent(&self) -> bool {
        self.status == Status::CompleteUpToCap
    }

    pub fn require_consistent(&self) -> Result<&Self> {
        match self.status {
            Status::CompleteUpToCap => Ok(self),
            Status::Inconsistent => Err(Error::InconsistentPresentation),
        }
    }

    /// Overlaps above the cap that completion did not examine.
    pub fn skipped_overlaps(&self) -> usize {
        self.skipped_overlaps
    }

    pub fn presentation_hash(&self) -> &str {
        &self.presentation_hash
    }

    /// Leftmost redex in a single-leg letter slice: `(position, rule)`.
    fn find_redex(&self, letters: &[Letter]) -> Option<(usize, usize)> {
        for start in 0..=letters.len() {
            for &len in &self.lhs_lengths {
                if start + len > letters.len() {
                    break;
                }
                if let Some(&k) = self.index.get(&letters[start..start + len]) {
                    return Some((start, k));
                }
            }
        }
        None
    }

    fn find_redex_by(&self, letters: &[Letter], strategy: Strategy) -> Option<(usize, usize)> {
        match strategy {
            Strategy::Greedy | Strategy::LeftmostInnermost => self.find_redex(letters),
            Strategy::RightmostOutermost => {
                for start in (0..=letters.len()).rev() {
                    for &len in self.lhs_lengths.iter().rev() {
                        if start + len > letters.len() {
                            continue;
                        }
                        if let Some(&k) = self.index.get(&letters[start..start + len]) {
                            return Some((start, k));
                        }
                    }
                }
                None
            }
        }
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.find_redex(w.letters()).is_none()
    }

    fn check_degree(&self, p: &NCPoly) -> Result<(), ReduceError> {
        let degree = p.degree();
        if degree > self.degree_cap {
            return Err(ReduceError::DegreeOverflow { degree, cap: self.degree_cap });
        }
        Ok(())
    }

    /// The irreducible representative of `p` modulo the ideal.
    pub fn normal_form(&self, p: &NCPoly) -> Result<NCPoly, ReduceError> {
        if self.status == Status::Inconsistent {
            return Ok(NCPoly::zero());
        }
        self.check_degree(p)?;
        Ok(self.reduce_unchecked(p))
    }

    pub(crate) fn reduce_unchecked(&self, p: &NCPoly) -> NCPoly {
        if self.rules.is_empty() {
            return p.clone();
        }
        let mut todo = p.clone();
        let mut out = NCPoly::zero();
        while let Some((w, c)) = todo.pop_leading() {
            match self.find_redex(w.letters()) {
                Some((pos, k)) => {
                    let rule = &self.rules[k];
                    let right = w.suffix_from(pos + rule.lhs.degree());
                    todo.add_scaled_sandwich(&c, &w.prefix(pos), &rule.rhs, &right);
                }
                None => out.add_term(w, &c),
            }
        }
        out
    }

    /// Normal form together with the rewrite steps taken.
    pub fn normal_form_traced(&self, p: &NCPoly) -> Result<(NCPoly, Vec<Step>), ReduceError> {
        self.check_degree(p)?;
        let mut todo = p.clone();
        let mut out = NCPoly::zero();
        let mut steps = Vec::new();
        while let Some((w, c)) = todo.pop_leading() {
            match self.find_redex(w.letters()) {
                Some((pos, k)) => {
                    let rule = &self.rules[k];
                    let left = w.prefix(pos);
                    let right = w.suffix_from(pos + rule.lhs.degree());
                    todo.add_scaled_sandwich(&c, &left, &rule.rhs, &right);
                    steps.push(Step { coeff: c, left, rule: k, right });
                }
                None => out.add_term(w, &c),
            }
        }
        Ok((out, steps))
    }

    /// Normal form under an explicit reduction strategy.
    pub fn normal_form_with(&self, p: &NCPoly, strategy: Strategy) -> Result<NCPoly, ReduceError> {
        if strategy == Strategy::Greedy {
            return self.normal_form(p);
        }
        if self.status == Status::Inconsistent {
            return Ok(NCPoly::zero());
        }
        self.check_degree(p)?;
        let mut cur = p.clone();
        loop {
            let terms: Vec<(Word, Scalar)> = cur.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
            let pick = match strategy {
                Strategy::RightmostOutermost => terms
                    .iter()
                    .rev()
                    .find_map(|(w, c)| self.find_redex_by(w.letters(), strategy).map(|r| (w.clone(), c.clone(), r))),
                _ => terms
                    .iter()
                    .find_map(|(w, c)| self.find_redex_by(w.letters(), strategy).map(|r| (w.clone(), c.clone(), r))),
            };
            let Some((w, c, (pos, k))) = pick else { return Ok(cur) };
            let rule = &self.rules[k];
            cur.add_term(w.clone(), &-c.clone());
            cur.add_scaled_sandwich(&c, &w.prefix(pos), &rule.rhs, &w.suffix_from(pos + rule.lhs.degree()));
        }
    }

    pub fn is_zero_mod_ideal(&self, p: &NCPoly) -> Result<Membership, ReduceError> {
        let r = self.normal_form(p)?;
        Ok(if r.is_zero() { Membership::Zero } else { Membership::NonzeroAtCap(r) })
    }
}

/// Orients relations into monic rules, adding the adjoint of each relation.
pub fn orient(relations: &[NCPoly]) -> Result<Vec<RewriteRule>> {
    let mut out: Vec<RewriteRule> = Vec::new();
    for r in relations.iter().flat_map(|r| [r.clone(), r.star()]) {
        let Some(rule) = orient_one(&r)? else { continue };
        if !out.contains(&rule) {
            out.push(rule);
        }
    }
    Ok(out)
}

fn orient_one(r: &NCPoly) -> Result<Option<RewriteRule>> {
    if r.is_zero() {
        return Ok(None);
    }
    let m = r.monic();
    let lhs = m.leading_term().expect("nonzero").0.clone();
    if lhs.is_unit() {
        return Err(Error::InconsistentPresentation);
    }
    let rhs = &NCPoly::word(lhs.clone()) - &m;
    Ok(Some(RewriteRule { lhs, rhs }))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Overlap {
    degree: usize,
    left_lhs: Word,
    right_lhs: Word,
    shared: usize,
    left: usize,
    right: usize,
}

struct Completion {
    rules: Vec<Option<RewriteRule>>,
    index: HashMap<Word, usize>,
    lhs_lengths: BTreeSet<usize>,
    pending: VecDeque<NCPoly>,
    overlaps: BTreeSet<Overlap>,
    cap: usize,
    skipped: usize,
}

impl Completion {
    fn reduce(&self, p: &NCPoly) -> NCPoly {
        let mut todo = p.clone();
        let mut out = NCPoly::zero();
        while let Some((w, c)) = todo.pop_leading() {
            match self.redex(w.letters()) {
                Some((pos, k)) => {
                    let rule = self.rules[k].as_ref().expect("indexed rule is live");
                    let right = w.suffix_from(pos + rule.lhs.degree());
                    todo.add_scaled_sandwich(&c, &w.prefix(pos), &rule.rhs, &right);
                }
                None => out.add_term(w, &c),
            }
        }
        out
    }

    fn redex(&self, letters: &[Letter]) -> Option<(usize, usize)> {
        for start in 0..letters.len() {
            for &len in &self.lhs_lengths {
                if start + len > letters.len() {
                    break;
                }
                if let Some(&k) = self.index.get(&letters[start..start + len]) {
                    return Some((start, k));
                }
            }
        }
        None
    }

    /// Returns false when the unit entered the ideal.
    fn add(&mut self, p: NCPoly) -> bool {
        let r = self.reduce(&p);
        if r.is_zero() {
            return true;
        }
        let m = r.monic();
        let lhs = m.leading_term().expect("nonzero").0.clone();
        if lhs.is_unit() {
            return false;
        }
        let rhs = &NCPoly::word(lhs.clone()) - &m;
        // rules whose lhs contains the new lhs are no longer irreducible
        for k in 0..self.rules.len() {
            let hit = matches!(&self.rules[k], Some(old) if !old.lhs.occurrences(&lhs).is_empty());
            if hit {
                let old = self.rules[k].take().expect("checked");
                self.index.remove(&old.lhs);
                self.pending.push_back(old.relation());
            }
        }
        self.lhs_lengths = self.index.keys().map(Word::degree).chain([lhs.degree()]).collect();
        let id = self.rules.len();
        self.index.insert(lhs.clone(), id);
        self.rules.push(Some(RewriteRule { lhs, rhs }));
        self.pending.push_back(m.star());
        for k in 0..self.rules.len() {
            if self.rules[k].is_some() {
                self.queue_overlaps(id, k);
                if k != id {
                    self.queue_overlaps(k, id);
                }
            }
        }
        true
    }

    /// Overlaps where a proper suffix of rule `a`'s lhs is a proper prefix of rule `b`'s.
    fn queue_overlaps(&mut self, a: usize, b: usize) {
        let (la, lb) = match (&self.rules[a], &self.rules[b]) {
            (Some(x), Some(y)) => (x.lhs.clone(), y.lhs.clone()),
            _ => return,
        };
        let (na, nb) = (la.degree(), lb.degree());
        for shared in 1..na.min(nb) {
            if la.letters()[na - shared..] != lb.letters()[..shared] {
                continue;
            }
            let degree = na + nb - shared;
            if degree > self.cap {
                self.skipped += 1;
                continue;
            }
            self.overlaps.insert(Overlap {
                degree,
                left_lhs: la.clone(),
                right_lhs: lb.clone(),
                shared,
                left: a,
                right: b,
            });
        }
    }

    fn s_polynomial(&self, o: &Overlap) -> Option<NCPoly> {
        let left = self.rules[o.left].as_ref()?;
        let right = self.rules[o.right].as_ref()?;
        let tail = right.lhs.suffix_from(o.shared);
        let head = left.lhs.prefix(left.lhs.degree() - o.shared);
        let mut s = NCPoly::zero();
        s.add_scaled_sandwich(&Scalar::one(), &Word::unit(), &left.rhs, &tail);
        s.add_scaled_sandwich(&-Scalar::one(), &head, &right.rhs, &Word::unit());
        Some(s)
    }
}

/// Completes the presentation's ideal up to `degree_cap`.
pub fn complete(pres: &Presentation, degree_cap: usize) -> Result<RewriteSystem> {
    let max_rel = pres.ideal_generators().map(NCPoly::degree).max().unwrap_or(0);
    if degree_cap < max_rel {
        return Err(Error::Invalid(format!("degree cap {degree_cap} is below the relation degree {max_rel}")));
    }
    let relations: Vec<NCPoly> = pres.ideal_generators().cloned().collect();
    complete_relations(&relations, degree_cap, pres.hash().to_string())
}

pub fn complete_relations(relations: &[NCPoly], degree_cap: usize, hash: String) -> Result<RewriteSystem> {
    let inconsistent = |hash: String| {
        let rule = RewriteRule { lhs: Word::unit(), rhs: NCPoly::zero() };
        Ok(RewriteSystem::from_rules(vec![rule], degree_cap, Status::Inconsistent, 0, hash))
    };
    let oriented = match orient(relations) {
        Ok(r) => r,
        Err(Error::InconsistentPresentation) => return inconsistent(hash),
        Err(e) => return Err(e),
    };
    let mut c = Completion {
        rules: Vec::new(),
        index: HashMap::new(),
        lhs_lengths: BTreeSet::new(),
        pending: oriented.iter().map(RewriteRule::relation).collect(),
        overlaps: BTreeSet::new(),
        cap: degree_cap,
        skipped: 0,
    };
    loop {
        while let Some(p) = c.pending.pop_front() {
            if !c.add(p) {
                return inconsistent(hash);
            }
        }
        let Some(o) = c.overlaps.pop_first() else { break };
        if let Some(s) = c.s_polynomial(&o) {
            c.pending.push_back(s);
        }
    }
    // final inter-reduction of right-hand sides
    let live: Vec<RewriteRule> = c.rules.iter().flatten().cloned().collect();
    let rules = live
        .into_iter()
        .map(|r| {
            let rhs = c.reduce(&r.rhs);
            RewriteRule { lhs: r.lhs, rhs }
        })
        .collect();
    Ok(RewriteSystem::from_rules(rules, degree_cap, Status::CompleteUpToCap, c.skipped, hash))
}

/// Reduces elements of `A_0 ⊗ A_1 ⊗ ...` leg by leg.
#[derive(Clone, Debug)]
pub struct LegReducer {
    pub systems: Vec<Arc<RewriteSystem>>,
}

impl LegReducer {
    pub fn new(systems: Vec<Arc<RewriteSystem>>) -> Self {
        LegReducer { systems }
    }

    pub fn single(system: Arc<RewriteSystem>) -> Self {
        LegReducer { systems: vec![system] }
    }

    pub fn repeated(system: Arc<RewriteSystem>, legs: usize) -> Self {
        LegReducer { systems: vec![system; legs] }
    }

    pub fn reduce(&self, p: &NCPoly) -> Result<NCPoly, ReduceError> {
        if self.systems.len() == 1 {
            return self.systems[0].normal_form(p);
        }
        if self.systems.iter().any(|s| s.status() == Status::Inconsistent) {
            return Ok(NCPoly::zero());
        }
        for (w, _) in p.terms() {
            for (leg, block) in w.leg_blocks() {
                let sys = self.systems.get(leg as usize).ok_or(ReduceError::UnknownLeg(leg))?;
                if block.degree() > sys.degree_cap() {
                    return Err(ReduceError::DegreeOverflow { degree: block.degree(), cap: sys.degree_cap() });
                }
            }
        }
        let mut todo = p.clone();
        let mut out = NCPoly::zero();
        while let Some((w, c)) = todo.pop_leading() {
            let mut hit = None;
            for (leg, block) in w.leg_blocks() {
                let local = block.map_letters(|l| l.on_leg(0));
                if let Some((pos, k)) = self.systems[leg as usize].find_redex(local.letters()) {
                    hit = Some((leg, block, pos, k));
                    break;
                }
            }
            match hit {
                None => out.add_term(w, &c),
                Some((leg, block, pos, k)) => {
                    let rule = &self.systems[leg as usize].rules()[k];
                    let start = w.letters().iter().position(|l| l.leg == leg).expect("leg present") + pos;
                    let left = w.prefix(start);
                    let right = w.suffix_from(start + rule.lhs.degree());
                    debug_assert!(block.degree() >= pos + rule.lhs.degree());
                    todo.add_scaled_sandwich(&c, &left, &rule.rhs.on_leg(leg), &right);
                }
            }
        }
        Ok(out)
    }
}
