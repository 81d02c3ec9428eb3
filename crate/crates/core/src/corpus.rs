//! Test corpora: uniform matroids, seeded random loopless matroids, and every
//! loopless matroid on few elements up to isomorphism.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::set::ElementSet;

/// Largest ground set for [`all_matroids`].
pub const ENUMERATION_LIMIT: usize = 5;

/// Random families are resampled this many times before giving up on a
/// loopless result.
const MAX_REJECTIONS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub matroid: Matroid,
}

/// `U_{r,m}` for `1 ≤ r ≤ m ≤ max_elements`, ordered by `m` then `r`.
pub fn uniform_matroids(max_elements: usize) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for m in 1..=max_elements {
        for r in 1..=m {
            out.push(CorpusEntry {
                name: format!("U({r},{m})"),
                matroid: Matroid::uniform(r, m)?,
            });
        }
    }
    Ok(out)
}

fn r_subsets(n: usize, r: usize) -> Vec<ElementSet> {
    let ground: ElementSet = (1..=n as u32).collect();
    ground.subsets().filter(|s| s.len() == r).collect()
}

/// First exchange violation `(B1, x, B2)`: no `y ∈ B2 ∖ B1` makes
/// `B1 - x + y` a basis.
fn violation(bases: &BTreeSet<ElementSet>) -> Option<(ElementSet, u32, ElementSet)> {
    for &b1 in bases {
        for &b2 in bases {
            for x in b1.difference(b2).iter() {
                let ok = b2
                    .difference(b1)
                    .iter()
                    .any(|y| bases.contains(&b1.without(x).with(y)));
                if !ok {
                    return Some((b1, x, b2));
                }
            }
        }
    }
    None
}

/// A random family of `r`-subsets closed up under basis exchange: each
/// violation is repaired by adding one exchanged set.
fn repaired_family(rng: &mut ChaCha8Rng, n: usize, r: usize) -> BTreeSet<ElementSet> {
    let all = r_subsets(n, r);
    let mut bases: BTreeSet<ElementSet> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if bases.is_empty() {
        bases.insert(*all.choose(rng).expect("r ≤ n"));
    }
    while let Some((b1, x, b2)) = violation(&bases) {
        let ys = b2.difference(b1).to_vec();
        let y = *ys.choose(rng).expect("b2 ≠ b1");
        bases.insert(b1.without(x).with(y));
    }
    bases
}

/// A loopless matroid on `{1..n}` with rank uniform in `1..=n`, by repairing
/// random base families and rejecting those with loops.
pub fn random_matroid(rng: &mut ChaCha8Rng, n: usize) -> Result<Matroid> {
    let ground: ElementSet = (1..=n as u32).collect();
    let r = rng.gen_range(1..=n);
    for _ in 0..MAX_REJECTIONS {
        let bases = repaired_family(rng, n, r);
        let covered = bases.iter().fold(ElementSet::EMPTY, |acc, b| acc.union(*b));
        if covered == ground {
            return Matroid::from_basis_sets(ground, bases.into_iter().collect());
        }
    }
    Err(Error::GenericityExhausted(MAX_REJECTIONS))
}

/// `count` random loopless matroids on `2..=max_elements` elements.
pub fn random_matroids(count: usize, max_elements: usize, seed: u64) -> Result<Vec<CorpusEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low = max_elements.min(2);
    (0..count)
        .map(|k| {
            let n = rng.gen_range(low..=max_elements);
            let m = random_matroid(&mut rng, n)?;
            Ok(CorpusEntry {
                name: format!("random{k}(n={n},r={})", m.rank()),
                matroid: m,
            })
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    fn go(k: usize, perm: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == perm.len() {
            out.push(perm.clone());
            return;
        }
        for t in k..perm.len() {
            perm.swap(k, t);
            go(k + 1, perm, out);
            perm.swap(k, t);
        }
    }
    go(0, &mut perm, &mut out);
    out
}

/// Smallest sorted basis list over all relabelings of `{1..n}`.
fn canonical_form(bases: &[ElementSet], perms: &[Vec<u32>]) -> Vec<u64> {
    perms
        .iter()
        .map(|p| {
            let mut image: Vec<u64> = bases
                .iter()
                .map(|b| b.map_labels(|e| p[e as usize - 1]).bits())
                .collect();
            image.sort_unstable();
            image
        })
        .min()
        .expect("at least one permutation")
}

/// Every loopless matroid on `{1..n}` for `1 ≤ n ≤ max_elements`, one per
/// isomorphism class, by brute force over families of `r`-subsets.
pub fn all_matroids(max_elements: usize) -> Result<Vec<CorpusEntry>> {
    if max_elements > ENUMERATION_LIMIT {
        return Err(Error::TooManyElements {
            n: max_elements,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::new();
    for n in 1..=max_elements {
        let ground: ElementSet = (1..=n as u32).collect();
        let perms = permutations(n);
        for r in 1..=n {
            let subsets = r_subsets(n, r);
            let mut seen = BTreeSet::new();
            for mask in 1u64..(1 << subsets.len()) {
                let bases: Vec<ElementSet> = (0..subsets.len())
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| subsets[k])
                    .collect();
                let Ok(m) = Matroid::from_basis_sets(ground, bases) else {
                    continue;
                };
                if seen.insert(canonical_form(m.bases(), &perms)) {
                    out.push(CorpusEntry {
                        name: format!("M(n={n},r={r})#{}", seen.len()),
                        matroid: m,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_listing() {
        let u = uniform_matroids(4).unwrap();
        assert_eq!(u.len(), 10);
        assert_eq!(u[0].name, "U(1,1)");
        assert_eq!(u.last().unwrap().name, "U(4,4)");
        assert!(uniform_matroids(0).unwrap().is_empty());
    }

    #[test]
    fn isomorphism_class_counts() {
        // Loopless classes on n elements are all classes on n minus all
        // classes on n - 1: 2-1, 4-2, 8-4, 17-8, 38-17.
        let all = all_matroids(5).unwrap();
        let per_n: Vec<usize> = (1..=5).map(|n| all.iter().filter(|e| e.matroid.len() == n).count()).collect();
        assert_eq!(per_n, vec![1, 2, 4, 9, 21]);
        assert!(all_matroids(6).is_err());
    }

    #[test]
    fn random_matroids_are_seeded_and_loopless() {
        let a = random_matroids(30, 6, 11).unwrap();
        let b = random_matroids(30, 6, 11).unwrap();
        assert_eq!(a.len(), 30);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.matroid, y.matroid);
            assert_eq!(x.name, y.name);
            let covered = x.matroid.bases().iter().fold(ElementSet::EMPTY, |acc, s| acc.union(*s));
            assert_eq!(covered, x.matroid.ground());
        }
        let ranks: BTreeSet<usize> = a.iter().map(|e| e.matroid.rank()).collect();
        assert!(ranks.len() > 2);
        let other = random_matroids(30, 6, 12).unwrap();
        assert!(a.iter().zip(&other).any(|(x, y)| x.matroid != y.matroid));
    }
}
