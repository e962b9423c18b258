//! Structure of presented algebras: commutativity, linear bases, finite
//! group recognition, characters, and the conditional derivations on the
//! `M_2` swap commutant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::builtins::{entry_name, m2_commutant_phi, qmap_xn};
use crate::cache::complete_cached;
use crate::commutant::{build_commutant, ClassicalFamily, Commutant, PermFamily, Permutation};
use crate::error::{Error, Result};
use crate::ncpoly::{NCPoly, Word};
use crate::presentation::{tensor, GeneratorMap, Presentation};
use crate::rewrite::{LegReducer, RewriteSystem};
use crate::scalar::Scalar;
use crate::semigroup::{collect_residues, Check, Outcome, QuantumSemigroup, Report};

#[derive(Clone, Debug, PartialEq)]
pub enum Commutativity {
    Yes,
    /// Commutators of letters that did not reduce to zero, or the reason the
    /// reduction stopped.
    Unknown {
        residues: Vec<(String, NCPoly)>,
        overflow: Option<String>,
    },
}

impl Commutativity {
    pub fn is_yes(&self) -> bool {
        *self == Commutativity::Yes
    }
}

/// Reduces `[x, y]` for every pair of letters (starred letters included).
pub fn is_commutative(pres: &Presentation, rs: &RewriteSystem) -> Commutativity {
    let alphabet = pres.alphabet();
    let mut pairs = Vec::new();
    for (i, a) in alphabet.iter().enumerate() {
        for b in &alphabet[i + 1..] {
            pairs.push((NCPoly::letter(*a), NCPoly::letter(*b)));
        }
    }
    let results: Vec<_> = pairs
        .par_iter()
        .map(|(x, y)| {
            let label = format!("[{}, {}]", x.display(pres), y.display(pres));
            (label, rs.normal_form(&NCPoly::commutator(x, y)))
        })
        .collect();
    let mut residues = Vec::new();
    for (label, r) in results {
        match r {
            Ok(r) if r.is_zero() => {}
            Ok(r) => residues.push((label, r)),
            Err(e) => return Commutativity::Unknown { residues, overflow: Some(format!("{label}: {e}")) },
        }
    }
    if residues.is_empty() {
        Commutativity::Yes
    } else {
        Commutativity::Unknown { residues, overflow: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearBasis {
    pub words: Vec<Word>,
    /// No irreducible word has degree `D`, hence none has degree `>= D`
    /// (irreducible words are closed under taking subwords).
    pub stabilized: bool,
}

/// All irreducible words of degree at most `max_deg`.
pub fn basis_up_to(pres: &Presentation, rs: &RewriteSystem, max_deg: usize) -> Result<LinearBasis> {
    if max_deg > rs.degree_cap() {
        return Err(Error::Invalid(format!("degree {max_deg} is above the degree cap {}", rs.degree_cap())));
    }
    if !rs.is_consistent() {
        return Ok(LinearBasis { words: Vec::new(), stabilized: true });
    }
    let alphabet = pres.alphabet();
    let mut words = vec![Word::unit()];
    let mut level = vec![Word::unit()];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for w in &level {
            for l in &alphabet {
                let v = w.mul(&Word::letter(*l));
                if rs.is_irreducible(&v) {
                    next.push(v);
                }
            }
        }
        next.sort();
        words.extend(next.iter().cloned());
        level = next;
        if level.is_empty() {
            break;
        }
    }
    Ok(LinearBasis { words, stabilized: level.is_empty() })
}

/// Multiplication table of a finite group; element `k` is the idempotent
/// `atoms[k]` of the function algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    pub labels: Vec<String>,
    pub atoms: Vec<NCPoly>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl GroupTable {
    /// Validates associativity, the identity and inverses.
    pub fn new(labels: Vec<String>, atoms: Vec<NCPoly>, table: Vec<Vec<usize>>, identity: usize) -> Option<Self> {
        let m = table.len();
        if m == 0 || identity >= m || table.iter().any(|row| row.len() != m || row.iter().any(|&x| x >= m)) {
            return None;
        }
        for a in 0..m {
            if table[identity][a] != a || table[a][identity] != a {
                return None;
            }
            if !(0..m).any(|b| table[a][b] == identity && table[b][a] == identity) {
                return None;
            }
            for b in 0..m {
                for c in 0..m {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return None;
                    }
                }
            }
        }
        Some(GroupTable { labels, atoms, table, identity })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let m = self.order();
        (0..m).all(|a| (0..m).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// An element generating the whole group, if any.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order()).find(|&a| self.element_order(a) == self.order())
    }

    pub fn describe(&self) -> String {
        match (self.order(), self.cyclic_generator()) {
            (1, _) => "trivial group".into(),
            (m, Some(_)) => format!("cyclic group Z{m}"),
            (m, None) if self.is_abelian() => format!("abelian group of order {m}"),
            (m, None) => format!("nonabelian group of order {m}"),
        }
    }
}

/// Splits `1` into minimal projections using the generators, which must be
/// commuting self-adjoint idempotents.
pub fn idempotent_atoms(pres: &Presentation, rs: &RewriteSystem) -> Result<Vec<NCPoly>> {
    let bad = |m: String| Error::NotIdempotentBasis(m);
    if !is_commutative(pres, rs).is_yes() {
        return Err(bad("the algebra is not known to be commutative".into()));
    }
    let nf = |p: &NCPoly| rs.normal_form(p).map_err(Error::from);
    let mut atoms = vec![nf(&NCPoly::one())?];
    if atoms[0].is_zero() {
        return Ok(Vec::new());
    }
    for (k, g) in pres.generators().iter().enumerate() {
        let x = NCPoly::letter(pres.letter(k as u16));
        if !nf(&(&x - &x.star()))?.is_zero() || !nf(&(&(&x * &x) - &x))?.is_zero() {
            return Err(bad(format!("{} is not a projection", g.name)));
        }
        let rest = &NCPoly::one() - &x;
        let mut next = Vec::new();
        for e in &atoms {
            for part in [&(e * &x), &(e * &rest)] {
                let r = nf(part)?;
                if !r.is_zero() {
                    next.push(r);
                }
            }
        }
        atoms = next;
    }
    for (i, e) in atoms.iter().enumerate() {
        if !nf(&(&(e * e) - e))?.is_zero() {
            return Err(bad(format!("{} is not idempotent", e.display(pres))));
        }
        for f in &atoms[i + 1..] {
            if !nf(&(e * f))?.is_zero() {
                return Err(bad("atoms are not orthogonal".into()));
            }
        }
    }
    Ok(atoms)
}

/// Reads a group law off `Δ(e_i) = Σ_{jk = i} e_j ⊗ e_k` for the minimal
/// projections `e_i`. `None` when the coproduct is not of that form.
pub fn recognize_finite_group(s: &QuantumSemigroup, rs: &Arc<RewriteSystem>) -> Result<Option<GroupTable>> {
    let pres = s.algebra.as_ref();
    let atoms = idempotent_atoms(pres, rs)?;
    if atoms.is_empty() {
        return Ok(None);
    }
    let m = atoms.len();
    let red2 = LegReducer::repeated(rs.clone(), 2);
    let delta = s.delta_map();
    let coproducts = atoms.par_iter().map(|e| red2.reduce(&delta.apply(e))).collect::<Result<Vec<_>, _>>()?;
    let mut table = vec![vec![usize::MAX; m]; m];
    for j in 0..m {
        for k in 0..m {
            let target = red2.reduce(&(&atoms[j] * &atoms[k].on_leg(1)))?;
            let (lead, lead_c) = target.leading_term().map(|(w, c)| (w.clone(), c.clone())).expect("atoms are nonzero");
            for (i, d) in coproducts.iter().enumerate() {
                let prod = red2.reduce(&(&target * d))?;
                let c = &prod.coefficient(&lead) / &lead_c;
                if prod != target.scale(&c) {
                    return Err(Error::NotIdempotentBasis("coproduct is not diagonal in the atoms".into()));
                }
                if c.is_one() {
                    if table[j][k] != usize::MAX {
                        return Ok(None);
                    }
                    table[j][k] = i;
                } else if !c.is_zero() {
                    return Ok(None);
                }
            }
            if table[j][k] == usize::MAX {
                return Ok(None);
            }
        }
    }
    let eps = s.counit_map();
    let at_identity: Vec<usize> =
        (0..m).filter(|&i| eps.apply(&atoms[i]).as_constant().is_some_and(|c| c.is_one())).collect();
    let [identity] = at_identity.as_slice() else {
        return Ok(None);
    };
    let labels = atoms.iter().map(|a| a.display(pres)).collect();
    Ok(GroupTable::new(labels, atoms, table, *identity))
}

/// Notes on commutativity, a linear basis and a group structure, as far as
/// they can be established.
pub fn describe_structure(s: &QuantumSemigroup, rs: &Arc<RewriteSystem>, max_deg: usize) -> Report {
    let mut report = Report::new(format!("{}: structure", s.name));
    let pres = s.algebra.as_ref();
    if !rs.is_consistent() {
        report.note("algebra", "zero (the relations generate the unit ideal)");
        return report;
    }
    match is_commutative(pres, rs) {
        Commutativity::Yes => report.note("commutative", "yes"),
        Commutativity::Unknown { residues, overflow } => {
            let first = residues.first().map(|(l, r)| format!("{l} -> {}", r.display(pres)));
            report.note("commutative", format!("unknown ({})", overflow.or(first).unwrap_or_default()));
        }
    }
    match basis_up_to(pres, rs, max_deg.min(rs.degree_cap())) {
        Ok(b) if b.stabilized => {
            let words: Vec<String> = b.words.iter().map(|w| NCPoly::word(w.clone()).display(pres)).collect();
            report.note("linear basis", format!("{} words: {}", words.len(), words.join(", ")));
        }
        Ok(b) => report.note("linear basis", format!("not stabilized: {} words up to degree {max_deg}", b.words.len())),
        Err(e) => report.note("linear basis", e.to_string()),
    }
    match recognize_finite_group(s, rs) {
        Ok(Some(g)) => report.note("group", g.describe()),
        Ok(None) => report.note("group", "coproduct is not a group law"),
        Err(e) => report.note("group", format!("not recognized: {e}")),
    }
    report
}

/// The commutant of the cyclic shift `i -> i + 1` on `n` points: a commutative
/// algebra with a basis of `n` words, the group `Z_n`, and
/// `Δ(x_k) = Σ_p x_p ⊗ x_{k-p+1 mod n}` for `x_k = a_{1k}`.
pub fn cyclic_commutant_report(n: usize, cap: usize, cache: Option<&Path>) -> Result<(Commutant, Report)> {
    let s = qmap_xn(n);
    let family = ClassicalFamily::Permutations(PermFamily::new(n, [Permutation::cycle(n)])?);
    let comm = build_commutant(&s, &family, cap, cache)?;
    let mut report = comm.report.clone();
    let a = comm.semigroup.algebra.clone();
    let rs = comm.rewrite.clone();

    let commutative = is_commutative(&a, &rs);
    report.push(Check::from_bool("commutative", commutative.is_yes(), || match &commutative {
        Commutativity::Unknown { residues, overflow } => (
            residues.first().map(|(l, _)| l.clone()).unwrap_or_default(),
            overflow.clone().unwrap_or_else(|| residues.first().map(|(_, r)| r.display(&*a)).unwrap_or_default()),
        ),
        Commutativity::Yes => unreachable!(),
    }));
    let basis = basis_up_to(&a, &rs, 3.min(cap))?;
    report.push(Check::from_bool(
        format!("linear basis of {n} words"),
        basis.stabilized && basis.words.len() == n,
        || ("basis".into(), format!("{} words, stabilized = {}", basis.words.len(), basis.stabilized)),
    ));
    let group = recognize_finite_group(&comm.semigroup, &rs);
    let cyclic = matches!(&group, Ok(Some(g)) if g.order() == n && g.cyclic_generator().is_some());
    report.push(Check::from_bool(format!("group Z{n}"), cyclic, || {
        let got = match &group {
            Ok(Some(g)) => g.describe(),
            Ok(None) => "no group law".into(),
            Err(e) => e.to_string(),
        };
        ("group".into(), got)
    }));
    if let Ok(Some(g)) = &group {
        report.note("group", g.describe());
    }

    let x = |k: usize| a.gen(&entry_name(1, ((k - 1) % n) + 1, n));
    let red2 = LegReducer::repeated(rs.clone(), 2);
    let items = (1..=n)
        .map(|k| {
            let delta = &comm.semigroup.delta[k - 1];
            // k - p + 1 mod n, shifted into 1..=n
            let want = (1..=n).fold(NCPoly::zero(), |acc, p| &acc + &(&x(p) * &x((k + 2 * n - p) % n + 1).on_leg(1)));
            (format!("x{k}"), red2.reduce(&(delta - &want)))
        })
        .collect();
    report.push(Check::new(
        "Delta(x_k) = sum_p x_p (x) x_(k-p+1 mod n)",
        collect_residues(items, &tensor(&[a.clone(), a.clone()])),
    ));

    if n == 2 {
        let computed = match &group {
            Ok(Some(g)) => g.describe(),
            Ok(None) => "no group law".into(),
            Err(e) => format!("not recognized ({e})"),
        };
        let words: Vec<String> = basis.words.iter().map(|w| NCPoly::word(w.clone()).display(&*a)).collect();
        report.note("computed structure", format!("{computed}; linear basis {}", words.join(", ")));
        report.note("reference claim", "the commutant of the cyclic permutation of 2 points is the trivial group");
        let verdict = if matches!(&group, Ok(Some(g)) if g.order() == 1) { "agrees with" } else { "differs from" };
        report.note("DISCREPANCY-OR-CONFIRMATION", format!("computed structure {verdict} the reference claim"));
    }
    Ok((comm, report))
}

// ---------------------------------------------------------------------------
// characters

/// A commutative polynomial with rational coefficients; exponent vectors
/// index the variables of the surrounding [`CharacterSystem`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct CommPoly {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl CommPoly {
    pub fn zero() -> Self {
        CommPoly::default()
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        let mut p = CommPoly::zero();
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = CommPoly::zero();
        p.add_term(e, BigRational::one());
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &CommPoly) -> CommPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> CommPoly {
        CommPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &CommPoly) -> CommPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> CommPoly {
        let mut out = CommPoly::zero();
        for (e, d) in &self.terms {
            out.add_term(e.clone(), d * c);
        }
        out
    }

    pub fn mul(&self, other: &CommPoly) -> CommPoly {
        let mut out = CommPoly::zero();
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                let g = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(g, c * d);
            }
        }
        out
    }

    pub fn eval_exact(&self, point: &[BigRational]) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (e, c)| {
            let mono =
                e.iter().zip(point).fold(BigRational::one(), |m, (&k, x)| m * num_traits::pow(x.clone(), k as usize));
            acc + c * mono
        })
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms.iter().fold(0.0, |acc, (e, c)| {
            let mono: f64 = e.iter().zip(point).map(|(&k, x)| x.powi(k as i32)).product();
            acc + c.to_f64().unwrap_or(f64::NAN) * mono
        })
    }

    pub fn display(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { vars[i].clone() } else { format!("{}^{k}", vars[i]) })
                .collect();
            let coeff = crate::scalar::fmt_rational(&abs);
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => out.push_str(&coeff),
                (false, true) => out.push_str(&mono.join("*")),
                (false, false) => {
                    let _ = write!(out, "{coeff}*{}", mono.join("*"));
                }
            }
        }
        out
    }
}

/// Real and imaginary part of a complex commutative polynomial.
#[derive(Clone, Debug)]
struct Complexified(CommPoly, CommPoly);

impl Complexified {
    fn mul(&self, o: &Complexified) -> Complexified {
        Complexified(self.0.mul(&o.0).sub(&self.1.mul(&o.1)), self.0.mul(&o.1).add(&self.1.mul(&o.0)))
    }
}

/// Real polynomial equations whose solutions are the characters of an
/// algebra. A generator `g` becomes `g_re + i g_im` (`g_re` alone when
/// self-adjoint).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSystem {
    pub variables: Vec<String>,
    /// Variable indices `(re, im)` per generator.
    pub slots: Vec<(usize, Option<usize>)>,
    pub equations: Vec<CommPoly>,
}

impl CharacterSystem {
    pub fn max_residual_exact(&self, point: &[BigRational]) -> BigRational {
        self.equations.iter().map(|e| e.eval_exact(point).abs()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn max_residual_f64(&self, point: &[f64]) -> f64 {
        self.equations.iter().map(|e| e.eval_f64(point).abs()).fold(0.0, f64::max)
    }

    /// Orders named values like [`CharacterSystem::variables`].
    pub fn point_from<T: Clone>(&self, values: &BTreeMap<String, T>) -> Result<Vec<T>> {
        self.variables
            .iter()
            .map(|v| values.get(v).cloned().ok_or_else(|| Error::Invalid(format!("no value for variable {v}"))))
            .collect()
    }

    /// The generator values of a point, as a map to the scalars.
    pub fn generator_values(&self, point: &[BigRational]) -> Vec<Scalar> {
        self.slots
            .iter()
            .map(|&(re, im)| Scalar::new(point[re].clone(), im.map_or_else(BigRational::zero, |k| point[k].clone())))
            .collect()
    }

    /// One equation per line, `... = 0`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# variables: {}", self.variables.join(" "));
        for e in &self.equations {
            let _ = writeln!(out, "{} = 0", e.display(&self.variables));
        }
        out
    }
}

/// The quotient by all commutators of letters, and the real equations of
/// its characters.
pub fn abelianize(pres: &Presentation) -> Result<(Presentation, CharacterSystem)> {
    let alphabet = pres.alphabet();
    let mut commutators = Vec::new();
    for (i, a) in alphabet.iter().enumerate() {
        for b in &alphabet[i + 1..] {
            commutators.push(NCPoly::commutator(&NCPoly::letter(*a), &NCPoly::letter(*b)));
        }
    }
    let quotient = pres.quotient(&commutators, "abelianization")?;

    let mut variables = Vec::new();
    let mut slots = Vec::new();
    for g in pres.generators() {
        let re = variables.len();
        variables.push(format!("{}_re", g.name));
        let im = (!g.self_adjoint).then(|| {
            variables.push(format!("{}_im", g.name));
            re + 1
        });
        slots.push((re, im));
    }
    let nv = variables.len();
    let letter_value = |gen: usize, starred: bool| -> Complexified {
        let (re, im) = slots[gen];
        let im = match im {
            Some(k) if starred => CommPoly::var(k, nv).neg(),
            Some(k) => CommPoly::var(k, nv),
            None => CommPoly::zero(),
        };
        Complexified(CommPoly::var(re, nv), im)
    };
    let mut equations = BTreeSet::new();
    let mut ordered = Vec::new();
    for r in pres.ideal_generators() {
        let mut total = Complexified(CommPoly::zero(), CommPoly::zero());
        for (w, c) in r.terms() {
            let mut acc = Complexified(CommPoly::constant(c.re().clone(), nv), CommPoly::constant(c.im().clone(), nv));
            for l in w.letters() {
                acc = acc.mul(&letter_value(l.generator as usize, l.starred));
            }
            total = Complexified(total.0.add(&acc.0), total.1.add(&acc.1));
        }
        for part in [total.0, total.1] {
            if !part.is_zero() && !equations.contains(&part.neg()) && equations.insert(part.clone()) {
                ordered.push(part);
            }
        }
    }
    Ok((quotient, CharacterSystem { variables, slots, equations: ordered }))
}

/// A family of exact points, sampled from a seeded generator.
pub trait Parametrization: Sync {
    fn name(&self) -> &str;
    /// Variable values at a random parameter.
    fn sample(&self, rng: &mut ChaCha8Rng) -> BTreeMap<String, BigRational>;
}

/// Characters of the `M_2` swap commutant: for `s = ±1` and `m ∈ Q`,
/// `c = (1-m²)/(1+m²)`, `d = 2m/(1+m²)` run over the unit circle, and
/// `beta = (s+c)/2`, `gamma = (s-c)/2`, `alpha = i d/2`.
pub struct TwoCircles;

impl TwoCircles {
    pub fn point(s: i64, m: &BigRational) -> BTreeMap<String, BigRational> {
        let one = BigRational::one();
        let two = BigRational::from_integer(2.into());
        let m2 = m * m;
        let c = (&one - &m2) / (&one + &m2);
        let d = (&two * m) / (&one + &m2);
        let s = BigRational::from_integer(s.into());
        BTreeMap::from([
            ("alpha_re".to_string(), BigRational::zero()),
            ("alpha_im".to_string(), &d / &two),
            ("beta_re".to_string(), (&s + &c) / &two),
            ("gamma_re".to_string(), (&s - &c) / &two),
        ])
    }
}

impl Parametrization for TwoCircles {
    fn name(&self) -> &str {
        "two-circle"
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> BTreeMap<String, BigRational> {
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        let m = BigRational::new(rng.gen_range(-1000i64..=1000).into(), rng.gen_range(1i64..=1000).into());
        TwoCircles::point(s, &m)
    }
}

pub fn parametrization(name: &str) -> Result<Box<dyn Parametrization>> {
    match name {
        "two-circle" => Ok(Box::new(TwoCircles)),
        _ => Err(Error::UnknownParametrization(name.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamCheck {
    pub samples: usize,
    pub max_exact: BigRational,
    pub max_float: f64,
}

/// Sample `k` draws from its own stream of the seeded generator, so the
/// result does not depend on how the work is split.
pub fn sample_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Evaluates the system at `samples` points of the parametrization, exactly
/// and in floating point, and returns the largest residuals.
pub fn check_parametrized_solution(
    sys: &CharacterSystem,
    param: &dyn Parametrization,
    samples: usize,
    seed: u64,
) -> Result<ParamCheck> {
    let residues = (0..samples)
        .into_par_iter()
        .map(|k| {
            let values = param.sample(&mut sample_rng(seed, k));
            let exact = sys.point_from(&values)?;
            let float: Vec<f64> = exact.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            Ok((sys.max_residual_exact(&exact), sys.max_residual_f64(&float)))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_exact = residues.iter().map(|(e, _)| e.clone()).max().unwrap_or_else(BigRational::zero);
    let max_float = residues.iter().map(|(_, f)| *f).fold(0.0, f64::max);
    Ok(ParamCheck { samples, max_exact, max_float })
}

// ---------------------------------------------------------------------------
// the M_2 swap commutant

/// `X = alpha + alpha*` and `Y = beta + gamma` in the swap commutant.
pub fn x_and_y(pres: &Presentation) -> (NCPoly, NCPoly) {
    (pres.expr("alpha + alpha*").expect("alpha"), pres.expr("beta + gamma").expect("beta, gamma"))
}

/// A normal-form claim. A nonzero residue is a certificate of
/// non-membership only when completion skipped no overlaps.
fn membership(label: &str, rs: &RewriteSystem, p: &NCPoly, pres: &Presentation) -> Check {
    let outcome = match rs.normal_form(p) {
        Ok(r) if r.is_zero() => Outcome::Pass,
        Ok(r) if rs.skipped_overlaps() == 0 => Outcome::Fail(vec![("normal form".into(), r.display(pres))]),
        Ok(r) => Outcome::Inconclusive(format!("normal form {} at degree cap {}", r.display(pres), rs.degree_cap())),
        Err(e) => Outcome::Inconclusive(e.to_string()),
    };
    Check::new(label, outcome)
}

fn commutativity_check(pres: &Presentation, rs: &RewriteSystem) -> Check {
    let outcome = match is_commutative(pres, rs) {
        Commutativity::Yes => Outcome::Pass,
        Commutativity::Unknown { overflow: Some(why), .. } => Outcome::Inconclusive(why),
        Commutativity::Unknown { residues, .. } => {
            let items = residues.into_iter().map(|(l, r)| (l, r.display(pres))).collect();
            if rs.skipped_overlaps() == 0 {
                Outcome::Fail(items)
            } else {
                Outcome::Inconclusive(format!("nonzero commutators at degree cap {}", rs.degree_cap()))
            }
        }
    };
    Check::new("commutative", outcome)
}

/// Identities of the swap commutant: `XY + YX`, `X² + Y² − 1`,
/// `Δ(X) − (1 ⊗ X + X ⊗ Y)` and `Δ(Y) − Y ⊗ Y`.
pub fn commutant_identities(cap: usize, cache: Option<&Path>) -> Result<Report> {
    let s = m2_commutant_phi();
    let a = s.algebra.clone();
    let rs = complete_cached(&a, cap, cache)?;
    let (x, y) = x_and_y(&a);
    let mut report = Report::new(format!("{}: identities", s.name));
    report.note("degree cap", cap.to_string());
    report.push(membership("nf(XY + YX) = 0", &rs, &(&(&x * &y) + &(&y * &x)), &a));
    report.push(membership("nf(X^2 + Y^2 - 1) = 0", &rs, &(&(&(&x * &x) + &(&y * &y)) - &NCPoly::one()), &a));
    let delta = s.delta_map();
    let red2 = LegReducer::repeated(rs.clone(), 2);
    let names = s.tensor_names(2);
    let want_x = &x.on_leg(1) + &(&x * &y.on_leg(1));
    let want_y = &y * &y.on_leg(1);
    let dx = red2.reduce(&(&delta.apply(&x) - &want_x));
    let dy = red2.reduce(&(&delta.apply(&y) - &want_y));
    report.push(Check::new("Delta(X) = 1 (x) X + X (x) Y", collect_residues(vec![("Delta(X)".into(), dx)], &names)));
    report.push(Check::new("Delta(Y) = Y (x) Y", collect_residues(vec![("Delta(Y)".into(), dy)], &names)));
    Ok(report)
}

pub const SCENARIOS: [&str; 3] = ["y-central", "y2-is-1", "reduced"];

/// The self-adjoint candidates whose square lies in the ideal; in a
/// C*-algebra `x = x*` and `x² = 0` force `x = 0`.
pub fn positivity_rule(rs: &RewriteSystem, candidates: &[NCPoly]) -> Result<Vec<NCPoly>> {
    let mut out = Vec::new();
    for x in candidates {
        if rs.normal_form(&(x - &x.star()))?.is_zero() && rs.normal_form(&(x * x))?.is_zero() {
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Adds relations to the swap commutant and checks what follows.
pub fn run_scenario(name: &str, cap: usize, cache: Option<&Path>) -> Result<Report> {
    let s = m2_commutant_phi();
    let a = s.algebra.clone();
    let (x, y) = x_and_y(&a);
    let one = NCPoly::one();
    let mut report = Report::new(format!("scenario {name}"));
    let added = |report: &mut Report, rels: &[NCPoly]| {
        for (k, r) in rels.iter().enumerate() {
            report.note(format!("added relation {}", k + 1), format!("{} = 0", r.display(&*a)));
        }
    };
    match name {
        "y-central" => {
            let extra = [&(&x * &y) - &(&y * &x)];
            added(&mut report, &extra);
            let q = a.quotient(&extra, "scenario y-central")?;
            let rs = complete_cached(&q, cap, cache)?;
            let y3 = &(&(&y * &y) * &y) - &y;
            report.push(membership("nf(Y^3 - Y) = 0", &rs, &y3, &q));
        }
        "y2-is-1" => {
            let extra = [&(&y * &y) - &one];
            added(&mut report, &extra);
            let q = a.quotient(&extra, "scenario y2-is-1")?;
            let rs = complete_cached(&q, cap, cache)?;
            report.push(membership("nf(X^2) = 0", &rs, &(&x * &x), &q));
            let killed = positivity_rule(&rs, std::slice::from_ref(&x))?;
            if killed.is_empty() {
                report.push(Check::new("nf(X) = 0", Outcome::Inconclusive("X^2 is not known to vanish".into())));
                return Ok(report);
            }
            report.note("C*-rule", "X = X* and X^2 = 0, so X = 0");
            let q2 = q.quotient(&killed, "C*-rule: self-adjoint with zero square")?;
            let rs2 = complete_cached(&q2, cap, cache)?;
            report.push(membership("nf(X) = 0", &rs2, &x, &q2));
            report.push(commutativity_check(&q2, &rs2));
            // t = i alpha
            let t = a.expr("i alpha")?;
            let b = a.gen("beta");
            let g = a.gen("gamma");
            let lhs = &(&(&(&t * &t).scale(&Scalar::from_int(2)) + &(&b * &b)) + &(&g * &g)) - &one;
            report.push(membership("nf(2t^2 + beta^2 + gamma^2 - 1) = 0", &rs2, &lhs, &q2));
            report.push(membership("nf(t^2 - beta gamma) = 0", &rs2, &(&(&t * &t) - &(&b * &g)), &q2));
        }
        "reduced" => {
            let extra = [&x - &one, y.clone()];
            added(&mut report, &extra);
            let q = a.quotient(&extra, "scenario reduced")?;
            let rs = complete_cached(&q, cap, cache)?;
            if !rs.is_consistent() {
                report.note("algebra", "zero: the relations generate the unit ideal");
            }
            report.push(commutativity_check(&q, &rs));
        }
        _ => return Err(Error::Invalid(format!("unknown scenario '{name}' (known: {})", SCENARIOS.join(", ")))),
    }
    Ok(report)
}

/// Checks that a point of the character system is a morphism to the scalars.
pub fn character_is_morphism(pres: &Arc<Presentation>, sys: &CharacterSystem, point: &[BigRational]) -> Result<bool> {
    let mut map = GeneratorMap::to_scalars(pres.clone(), sys.generator_values(point))?;
    let scalars = LegReducer::single(Arc::new(RewriteSystem::empty(usize::MAX)));
    Ok(map.check(&scalars) == crate::presentation::MorphismCheck::Verified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Generator;
    use crate::rewrite::complete;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn qmap_x2_is_not_commutative() {
        let s = qmap_xn(2);
        let rs = complete(&s.algebra, 6).unwrap();
        match is_commutative(&s.algebra, &rs) {
            Commutativity::Unknown { residues, overflow: None } => {
                assert!(residues.iter().any(|(l, _)| l == "[a11, a21]"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bases() {
        let free = Presentation::free("free", vec![Generator { name: "x".into(), self_adjoint: true }]).unwrap();
        let rs = complete(&free, 8).unwrap();
        let b = basis_up_to(&free, &rs, 5).unwrap();
        assert_eq!(b.words.len(), 6);
        assert!(!b.stabilized);
        let scalars = Presentation::scalars();
        let b = basis_up_to(&scalars, &RewriteSystem::empty(4), 3).unwrap();
        assert_eq!(b.words, vec![Word::unit()]);
        assert!(b.stabilized);
        assert!(basis_up_to(&free, &rs, 9).is_err());
    }

    #[test]
    fn scalars_are_the_trivial_group() {
        let pres = Arc::new(Presentation::scalars());
        let s = QuantumSemigroup::new("scalars", pres.clone(), vec![], vec![], None).unwrap();
        let rs = Arc::new(RewriteSystem::empty(4));
        let g = recognize_finite_group(&s, &rs).unwrap().unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.describe(), "trivial group");
    }

    #[test]
    fn cyclic_three() {
        let (comm, report) = cyclic_commutant_report(3, 6, None).unwrap();
        assert!(report.passed(), "{}", report.render_human());
        let g = recognize_finite_group(&comm.semigroup, &comm.rewrite).unwrap().unwrap();
        assert_eq!(g.describe(), "cyclic group Z3");
    }

    #[test]
    fn cyclic_two_is_reported_not_asserted() {
        let (_, report) = cyclic_commutant_report(2, 6, None).unwrap();
        assert!(report.passed(), "{}", report.render_human());
        assert!(report.notes.iter().any(|(k, _)| k == "DISCREPANCY-OR-CONFIRMATION"));
    }

    #[test]
    fn noncommutative_algebra_has_no_atoms() {
        let s = qmap_xn(2);
        let rs = Arc::new(complete(&s.algebra, 6).unwrap());
        assert!(matches!(recognize_finite_group(&s, &rs), Err(Error::NotIdempotentBasis(_))));
    }

    #[test]
    fn group_table_rejects_non_groups() {
        assert!(GroupTable::new(vec![], vec![], vec![vec![0, 0], vec![0, 1]], 0).is_none());
        let z2 = GroupTable::new(vec![], vec![], vec![vec![0, 1], vec![1, 0]], 0).unwrap();
        assert_eq!(z2.cyclic_generator(), Some(1));
    }

    #[test]
    fn character_system_of_swap_commutant() {
        let s = m2_commutant_phi();
        let (_, sys) = abelianize(&s.algebra).unwrap();
        assert_eq!(sys.variables, ["alpha_re", "alpha_im", "beta_re", "gamma_re"]);
        let text = sys.export();
        assert!(text.contains("2*alpha_re^2 + 2*alpha_im^2 + beta_re^2 + gamma_re^2 - 1 = 0"), "{text}");
        assert!(text.contains("alpha_re^2 - alpha_im^2 + beta_re*gamma_re = 0"), "{text}");
        let at = |b: BigRational, g: BigRational, t: BigRational| vec![BigRational::zero(), t, b, g];
        assert!(sys.max_residual_exact(&at(q(1, 2), q(1, 2), q(1, 2))).is_zero());
        assert!(sys.max_residual_exact(&at(q(1, 1), q(0, 1), q(0, 1))).is_zero());
        assert!(!sys.max_residual_exact(&at(q(1, 1), q(1, 1), q(0, 1))).is_zero());
    }

    #[test]
    fn two_circle_points_are_characters() {
        let s = m2_commutant_phi();
        let (_, sys) = abelianize(&s.algebra).unwrap();
        let check = check_parametrized_solution(&sys, &TwoCircles, 200, 7).unwrap();
        assert!(check.max_exact.is_zero());
        assert!(check.max_float < 1e-12);
        let p = sys.point_from(&TwoCircles::point(-1, &q(3, 7))).unwrap();
        assert!(character_is_morphism(&s.algebra, &sys, &p).unwrap());
        assert!(matches!(parametrization("nope"), Err(Error::UnknownParametrization(_))));
    }

    #[test]
    fn qmap_x2_has_four_characters() {
        let s = qmap_xn(2);
        let (_, sys) = abelianize(&s.algebra).unwrap();
        assert_eq!(sys.variables.len(), 4);
        let mut count = 0;
        for bits in 0..16u32 {
            let p: Vec<BigRational> = (0..4).map(|k| q(((bits >> k) & 1) as i64, 1)).collect();
            if sys.max_residual_exact(&p).is_zero() {
                count += 1;
            }
        }
        assert_eq!(count, 4);
        let (_, empty) = abelianize(&Presentation::scalars()).unwrap();
        assert!(empty.equations.is_empty());
    }

    #[test]
    fn identity_suite() {
        let r = commutant_identities(8, None).unwrap();
        assert!(r.passed(), "{}", r.render_human());
    }

    #[test]
    fn scenarios() {
        for name in SCENARIOS {
            let r = run_scenario(name, 8, None).unwrap();
            assert!(r.passed(), "{}", r.render_human());
        }
        assert!(run_scenario("nope", 8, None).is_err());
    }
}
