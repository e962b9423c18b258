//! On-disk rewrite systems.
//!
//! ```text
//! qsg-rewrite v1 <presentation-hash> <degree_cap>
//! LHS -> RHS
//! ...
//! end <rule-count> <skipped-overlaps>
//! ```
//!
//! Rules are in canonical polynomial text. The trailing `end` line makes
//! truncation detectable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ncpoly::NCPoly;
use crate::presentation::Presentation;
use crate::rewrite::{complete, RewriteRule, RewriteSystem, Status};

const MAGIC: &str = "qsg-rewrite v1";

pub fn serialize(rs: &RewriteSystem, pres: &Presentation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {} {}", pres.hash(), rs.degree_cap());
    for r in rs.rules() {
        let lhs = NCPoly::word(r.lhs.clone());
        let _ = writeln!(out, "{} -> {}", lhs.display(pres), r.rhs.display(pres));
    }
    let _ = writeln!(out, "end {} {}", rs.rules().len(), rs.skipped_overlaps());
    out
}

pub fn deserialize(text: &str, pres: &Presentation) -> Result<RewriteSystem> {
    let corrupt = |m: String| Error::CorruptCache(m);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| corrupt("empty file".into()))?;
    let rest = header.strip_prefix(MAGIC).ok_or_else(|| corrupt("bad header".into()))?;
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let [hash, cap] = fields.as_slice() else {
        return Err(corrupt("bad header".into()));
    };
    if *hash != pres.hash() {
        return Err(Error::HashMismatch { expected: pres.hash().to_string(), found: hash.to_string() });
    }
    let cap: usize = cap.parse().map_err(|_| corrupt(format!("bad degree cap '{cap}'")))?;
    let mut rules = Vec::new();
    let mut end = None;
    for (k, line) in lines.enumerate() {
        if end.is_some() {
            return Err(corrupt(format!("line {}: content after end marker", k + 2)));
        }
        if let Some(tail) = line.strip_prefix("end ") {
            let nums: Vec<usize> = tail
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| corrupt("bad end marker".into()))?;
            let [count, skipped] = nums.as_slice() else {
                return Err(corrupt("bad end marker".into()));
            };
            end = Some((*count, *skipped));
            continue;
        }
        let (lhs, rhs) =
            line.split_once(" -> ").ok_or_else(|| corrupt(format!("line {}: expected 'LHS -> RHS'", k + 2)))?;
        let lhs = NCPoly::parse_canonical(lhs, pres).map_err(|e| corrupt(format!("line {}: {e}", k + 2)))?;
        let rhs = NCPoly::parse_canonical(rhs, pres).map_err(|e| corrupt(format!("line {}: {e}", k + 2)))?;
        let lhs_word = match lhs.terms().next() {
            Some((w, c)) if lhs.len() == 1 && c.is_one() => w.clone(),
            _ => return Err(corrupt(format!("line {}: left side must be a single word", k + 2))),
        };
        if rhs.terms().any(|(w, _)| *w >= lhs_word) {
            return Err(corrupt(format!("line {}: right side is not below the left side", k + 2)));
        }
        rules.push(RewriteRule { lhs: lhs_word, rhs });
    }
    let (count, skipped) = end.ok_or_else(|| corrupt("missing end marker (truncated file?)".into()))?;
    if count != rules.len() {
        return Err(corrupt(format!("end marker announces {count} rules, found {}", rules.len())));
    }
    for (i, a) in rules.iter().enumerate() {
        for (j, b) in rules.iter().enumerate() {
            if i != j && !a.lhs.occurrences(&b.lhs).is_empty() {
                return Err(corrupt("a left side is reducible by another rule".into()));
            }
        }
    }
    let status = if rules.iter().any(|r| r.lhs.is_unit()) { Status::Inconsistent } else { Status::CompleteUpToCap };
    Ok(RewriteSystem::from_rules(rules, cap, status, skipped, pres.hash().to_string()))
}

pub fn save(rs: &RewriteSystem, pres: &Presentation, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serialize(rs, pres))?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

pub fn load(path: &Path, pres: &Presentation) -> Result<RewriteSystem> {
    let text = std::fs::read_to_string(path)?;
    deserialize(&text, pres)
}

pub fn cache_path(dir: &Path, pres: &Presentation, cap: usize) -> PathBuf {
    dir.join(format!("{}-{cap}.rules", pres.hash()))
}

/// Completes `pres`, reusing (and refreshing) a cached system in `dir`.
pub fn complete_cached(pres: &Presentation, cap: usize, dir: Option<&Path>) -> Result<Arc<RewriteSystem>> {
    let Some(dir) = dir else {
        return Ok(Arc::new(complete(pres, cap)?));
    };
    let path = cache_path(dir, pres, cap);
    if path.exists() {
        if let Ok(rs) = load(&path, pres) {
            return Ok(Arc::new(rs));
        }
    }
    let rs = complete(pres, cap)?;
    save(&rs, pres, &path)?;
    Ok(Arc::new(rs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Generator;

    fn qmap2() -> Presentation {
        let gens = ["a11", "a12", "a21", "a22"]
            .iter()
            .map(|n| Generator { name: n.to_string(), self_adjoint: false })
            .collect();
        Presentation::new("qmap2", gens, vec![], vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let p = qmap2();
        let rs = complete(&p, 6).unwrap();
        let text = serialize(&rs, &p);
        let back = deserialize(&text, &p).unwrap();
        assert_eq!(back.rules(), rs.rules());
        assert_eq!(serialize(&back, &p), text);
    }

    #[test]
    fn hash_mismatch_and_truncation() {
        let p = qmap2();
        let rs = complete(&p, 6).unwrap();
        let text = serialize(&rs, &p);
        let other = Presentation::new("other", p.generators().to_vec(), vec![], vec![vec![0, 1]]).unwrap();
        assert!(matches!(deserialize(&text, &other), Err(Error::HashMismatch { .. })));
        let cut: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(matches!(deserialize(&cut, &p), Err(Error::CorruptCache(_))));
        assert!(matches!(deserialize("", &p), Err(Error::CorruptCache(_))));
        let garbled = text.replacen(" -> ", " => ", 1);
        assert!(matches!(deserialize(&garbled, &p), Err(Error::CorruptCache(_))));
    }

    #[test]
    fn cached_completion_reuses_file() {
        let dir = std::env::temp_dir().join(format!("qsg-cache-test-{}", std::process::id()));
        let p = qmap2();
        let a = complete_cached(&p, 6, Some(&dir)).unwrap();
        assert!(cache_path(&dir, &p, 6).exists());
        let b = complete_cached(&p, 6, Some(&dir)).unwrap();
        assert_eq!(a.rules(), b.rules());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
