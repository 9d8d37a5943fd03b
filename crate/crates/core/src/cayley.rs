//! Abstract finite groups given by multiplication tables, and the
//! left-invariant metric that turns a group into a metric space on which it
//! acts by left translations.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::group::{Perm, PermutationGroup, DEFAULT_ORDER_CAP};
use crate::metric::FiniteMetricSpace;
use crate::rational::{q, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CayleyError {
    #[error("not a group: {axiom} fails ({detail})")]
    NotAGroup { axiom: &'static str, detail: String },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

fn not_a_group(axiom: &'static str, detail: String) -> CayleyError {
    CayleyError::NotAGroup { axiom, detail }
}

/// A validated multiplication table: `table[a][b]` is the index of `a·b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl CayleyTable {
    /// Checks closure, identity, inverses and associativity exhaustively.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, CayleyError> {
        let n = table.len();
        if n == 0 {
            return Err(not_a_group("nonempty", "empty table".to_string()));
        }
        if names.len() != n {
            return Err(not_a_group("shape", format!("{} names for {n} rows", names.len())));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(not_a_group("shape", "duplicate element names".to_string()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(not_a_group("shape", format!("row {a} has {} entries", row.len())));
            }
            if let Some(&b) = row.iter().find(|&&b| b >= n) {
                return Err(not_a_group("closure", format!("entry {b} in row {a}")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| not_a_group("identity", "no two-sided identity".to_string()))?;
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == identity && table[b][a] == identity) {
                return Err(not_a_group("inverse", format!("element {a} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(not_a_group("associativity", format!("({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(CayleyTable { names, table, identity })
    }

    /// Table of a permutation group, elements in sorted order and named
    /// `g0, g1, …` (so `g0` is the identity).
    pub fn from_permutation_group(g: &PermutationGroup) -> CayleyTable {
        let names = (0..g.order()).map(|i| format!("g{i}")).collect();
        CayleyTable::new(names, g.multiplication_table()).expect("permutation groups are groups")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("validated")
    }

    /// The sets `{g, g⁻¹}`, each sorted, listed by smallest member. The
    /// identity forms its own class.
    pub fn inverse_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for g in 0..self.order() {
            let inv = self.inverse(g);
            if inv < g {
                continue;
            }
            classes.push(if inv == g { vec![g] } else { vec![g, inv] });
        }
        classes
    }

    /// Length function: 0 at the identity, and on the `k`-th nontrivial
    /// inverse class (of `K`) the value `1/2 + k/(2K)`, `k = 1, …, K`.
    ///
    /// Giving `g` and `hgh⁻¹` different lengths keeps right translations
    /// from being isometries, so the isometry group stays close to the
    /// left regular action.
    pub fn length_function(&self) -> Vec<Q> {
        let classes = self.inverse_classes();
        let nontrivial: Vec<&Vec<usize>> = classes.iter().filter(|c| c[0] != self.identity).collect();
        let count = nontrivial.len() as i64;
        let mut ell = vec![Q::from_integer(0.into()); self.order()];
        for (k, class) in nontrivial.iter().enumerate() {
            let value = q(1, 2) + q(k as i64 + 1, 2 * count);
            for &x in class.iter() {
                ell[x] = value.clone();
            }
        }
        ell
    }

    /// Left multiplication by each element, as permutations of indices.
    pub fn left_translations(&self) -> PermutationGroup {
        let perms = (0..self.order())
            .map(|g| Perm::new(self.table[g].clone()).expect("Latin square row"))
            .collect();
        PermutationGroup::from_elements(self.order(), perms).expect("left regular representation")
    }
}

/// Metric space on the elements of the group with `d(x, y) = ℓ(x⁻¹y)`,
/// plus the group of left translations, which acts by isometries.
///
/// Every nontrivial element is a generator of weight `ℓ`, and all nonzero
/// weights lie in `(1/2, 1]`, so `ℓ` is its own word length and the
/// triangle inequality holds automatically.
pub fn group_to_space(table: &CayleyTable) -> (FiniteMetricSpace, PermutationGroup) {
    let ell = table.length_function();
    let space = FiniteMetricSpace::from_fn(table.names().to_vec(), |x, y| {
        ell[table.mul(table.inverse(x), y)].clone()
    })
    .expect("left-invariant length metrics are metrics");
    (space, table.left_translations())
}

pub const PRESETS: &[&str] = &[
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "S3", "D4", "Q8", "D5", "A4",
];

fn perm(degree: usize, cycles: &[&[usize]]) -> Perm {
    Perm::from_cycles(degree, cycles).expect("preset cycles")
}

fn from_gens(degree: usize, gens: &[Perm]) -> CayleyTable {
    let g = PermutationGroup::closure(degree, gens, DEFAULT_ORDER_CAP).expect("small preset");
    CayleyTable::from_permutation_group(&g)
}

/// Quaternion group on `±1, ±i, ±j, ±k`.
fn quaternion() -> CayleyTable {
    // Unit index: 0 = 1, 1 = i, 2 = j, 3 = k; element = (sign, unit).
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    const NAMES: [&str; 4] = ["1", "i", "j", "k"];
    let elems: Vec<(bool, usize)> = (0..8).map(|e| (e >= 4, e % 4)).collect();
    let index = |(neg, u): (bool, usize)| if neg { u + 4 } else { u };
    let table = elems
        .iter()
        .map(|&(sa, ua)| {
            elems
                .iter()
                .map(|&(sb, ub)| {
                    let (s, u) = UNIT[ua][ub];
                    index((s ^ sa ^ sb, u))
                })
                .collect()
        })
        .collect();
    let names = elems
        .iter()
        .map(|&(neg, u)| format!("{}{}", if neg { "-" } else { "" }, NAMES[u]))
        .collect();
    CayleyTable::new(names, table).expect("quaternion table")
}

/// Named small groups: cyclic `C1…C10`, `S3`, dihedral `D4` (order 8) and
/// `D5` (order 10), quaternion `Q8`, alternating `A4`.
pub fn preset(name: &str) -> Result<CayleyTable, CayleyError> {
    if let Some(n) = name.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
        if (1..=10).contains(&n) {
            let cycle: Vec<usize> = (0..n).collect();
            return Ok(from_gens(n, &[perm(n, &[&cycle])]));
        }
    }
    Ok(match name {
        "S3" => from_gens(3, &[perm(3, &[&[0, 1, 2]]), perm(3, &[&[0, 1]])]),
        "D4" => from_gens(4, &[perm(4, &[&[0, 1, 2, 3]]), perm(4, &[&[1, 3]])]),
        "D5" => from_gens(5, &[perm(5, &[&[0, 1, 2, 3, 4]]), perm(5, &[&[1, 4], &[2, 3]])]),
        "A4" => from_gens(4, &[perm(4, &[&[0, 1, 2]]), perm(4, &[&[0, 1], &[2, 3]])]),
        "Q8" => quaternion(),
        _ => return Err(CayleyError::UnknownPreset(name.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::isometries;

    #[test]
    fn preset_orders() {
        let expected = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 6, 8, 8, 10, 12];
        for (name, order) in PRESETS.iter().zip(expected) {
            assert_eq!(preset(name).unwrap().order(), order, "{name}");
        }
        assert!(preset("C11").is_err());
        assert!(preset("X").is_err());
    }

    #[test]
    fn quaternion_relations() {
        let t = preset("Q8").unwrap();
        let idx = |s: &str| t.names().iter().position(|n| n == s).unwrap();
        assert_eq!(t.mul(idx("i"), idx("j")), idx("k"));
        assert_eq!(t.mul(idx("j"), idx("i")), idx("-k"));
        assert_eq!(t.mul(idx("i"), idx("i")), idx("-1"));
        assert_eq!(t.identity(), idx("1"));
    }

    #[test]
    fn table_validation() {
        let names = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        // No identity: constant table.
        let err = CayleyTable::new(names(2), vec![vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(err, CayleyError::NotAGroup { axiom: "identity", .. }));
        let err = CayleyTable::new(names(2), vec![vec![0, 2], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, CayleyError::NotAGroup { axiom: "closure", .. }));
        // Identity 0, but 1·1 = 1, 2·2 = 2: fails inverses.
        let err = CayleyTable::new(names(3), vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 1, 2]]).unwrap_err();
        assert!(matches!(err, CayleyError::NotAGroup { axiom: "inverse", .. }));
        assert!(CayleyTable::new(names(2), vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn trivial_group_space() {
        let (space, g) = group_to_space(&preset("C1").unwrap());
        assert_eq!(space.len(), 1);
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn left_translations_are_isometries() {
        for name in ["C3", "S3", "Q8", "A4"] {
            let table = preset(name).unwrap();
            let (space, left) = group_to_space(&table);
            let iso = isometries(&space);
            assert_eq!(left.order(), table.order());
            for g in left.elements() {
                assert!(iso.contains(g), "{name}");
            }
        }
    }
}
