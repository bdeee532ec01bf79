//! Finite groups, automorphism actions and semidirect products.
//!
//! Group elements are dense indices `0..n`. A semidirect product
//! `H ⋉_τ K` stores its elements flattened as `h * |K| + k`; every module
//! and file format uses that layout.
//!
//! Validation never panics on bad input: malformed tables are reported as
//! [`Error::Structural`], axiom failures come back as a
//! [`ValidationReport`] carrying the first counterexample found.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exhaustive associativity scans up to this order, sampling beyond.
pub const EXHAUSTIVE_LIMIT: usize = 64;
pub const SAMPLED_TRIPLES: usize = 10_000;
pub const MAX_SYMMETRIC_DEGREE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    NoIdentity,
    Inverse { element: usize },
    Associativity { a: usize, b: usize, c: usize },
    NotLatin { row: bool, line: usize },
    ActionNotIdentity { k: usize },
    NotAutomorphism { h: usize, k1: usize, k2: usize },
    NotHomomorphism { h1: usize, h2: usize, k: usize },
    DerivedInverse { h: usize, k: usize },
    DeltaNotHomomorphism { h1: usize, h2: usize },
    NonPositiveWeight { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoIdentity => write!(f, "no two-sided identity element"),
            Violation::Inverse { element } => write!(f, "element {element} has no inverse"),
            Violation::Associativity { a, b, c } => {
                write!(f, "(a*b)*c != a*(b*c) for (a,b,c) = ({a},{b},{c})")
            }
            Violation::NotLatin { row, line } => write!(
                f,
                "{} {line} is not a permutation",
                if *row { "row" } else { "column" }
            ),
            Violation::ActionNotIdentity { k } => {
                write!(f, "tau at the identity of H moves k = {k}")
            }
            Violation::NotAutomorphism { h, k1, k2 } => write!(
                f,
                "tau_{h}(k1*k2) != tau_{h}(k1)*tau_{h}(k2) for (k1,k2) = ({k1},{k2})"
            ),
            Violation::NotHomomorphism { h1, h2, k } => write!(
                f,
                "tau_(h1*h2) != tau_h1 o tau_h2 for (h1,h2) = ({h1},{h2}) at k = {k}"
            ),
            Violation::DerivedInverse { h, k } => {
                write!(f, "inverse formula fails at (h,k) = ({h},{k})")
            }
            Violation::DeltaNotHomomorphism { h1, h2 } => {
                write!(f, "delta(h1*h2) != delta(h1)*delta(h2) for ({h1},{h2})")
            }
            Violation::NonPositiveWeight { index } => {
                write!(f, "weight at index {index} is not strictly positive")
            }
        }
    }
}

/// Outcome of an axiom scan: `violation` is the first counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    /// `true` when every triple was checked, `false` when sampled.
    pub exhaustive: bool,
}

impl ValidationReport {
    fn pass(exhaustive: bool) -> Self {
        ValidationReport {
            violation: None,
            exhaustive,
        }
    }

    fn fail(v: Violation) -> Self {
        ValidationReport {
            violation: Some(v),
            exhaustive: true,
        }
    }

    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Scan a group law given by closures. Checks identity, inverses,
/// associativity and the Latin-square property, in that order.
fn scan_axioms(
    n: usize,
    mul: impl Fn(usize, usize) -> usize,
) -> (ValidationReport, Option<(usize, Vec<usize>)>) {
    let identity = (0..n).find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x));
    let Some(e) = identity else {
        return (ValidationReport::fail(Violation::NoIdentity), None);
    };

    let mut inverse = Vec::with_capacity(n);
    for x in 0..n {
        match (0..n).find(|&y| mul(x, y) == e && mul(y, x) == e) {
            Some(y) => inverse.push(y),
            None => return (ValidationReport::fail(Violation::Inverse { element: x }), None),
        }
    }

    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let assoc = |a: usize, b: usize, c: usize| mul(mul(a, b), c) == mul(a, mul(b, c));
    if exhaustive {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !assoc(a, b, c) {
                        let v = Violation::Associativity { a, b, c };
                        return (ValidationReport::fail(v), None);
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..SAMPLED_TRIPLES {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if !assoc(a, b, c) {
                let v = Violation::Associativity { a, b, c };
                return (ValidationReport::fail(v), None);
            }
        }
    }

    let mut seen = vec![usize::MAX; n];
    for line in 0..n {
        for (j, stamp) in [(true, 2 * line), (false, 2 * line + 1)] {
            for i in 0..n {
                let v = if j { mul(line, i) } else { mul(i, line) };
                if seen[v] == stamp {
                    let v = Violation::NotLatin { row: j, line };
                    return (ValidationReport::fail(v), None);
                }
                seen[v] = stamp;
            }
        }
    }

    (ValidationReport::pass(exhaustive), Some((e, inverse)))
}

fn check_table_shape(table: &[Vec<usize>]) -> Result<usize> {
    let n = table.len();
    if n == 0 {
        return Err(Error::Structural("empty Cayley table".into()));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Structural(format!(
                "row {i} has length {} but the table has {n} rows",
                row.len()
            )));
        }
        if let Some(&bad) = row.iter().find(|&&v| v >= n) {
            return Err(Error::Structural(format!("row {i} contains out-of-range entry {bad}")));
        }
    }
    Ok(n)
}

/// Validate a raw Cayley table against the group axioms.
pub fn validate_table(table: &[Vec<usize>]) -> Result<ValidationReport> {
    let n = check_table_shape(table)?;
    Ok(scan_axioms(n, |a, b| table[a][b]).0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Law {
    /// Residues mod n under addition; no table is stored.
    Cyclic,
    Table(Vec<u32>),
}

/// A finite group with elements `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    law: Law,
    identity: usize,
    inverse: Vec<usize>,
    label: String,
}

impl FiniteGroup {
    /// `Z_n`, elements are residues in ascending order.
    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Unsupported("cyclic group of order 0".into()));
        }
        Ok(FiniteGroup {
            order: n,
            law: Law::Cyclic,
            identity: 0,
            inverse: (0..n).map(|x| (n - x) % n).collect(),
            label: format!("Z{n}"),
        })
    }

    /// Dihedral group of order `2n`. Element `j*n + i` is `s^j r^i`.
    pub fn dihedral(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::Unsupported("dihedral group D_0".into()));
        }
        let idx = |j: usize, i: usize| j * n + i;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for (j1, i1, j2, i2) in itertools_product4(2, n, 2, n) {
            // s^j1 r^i1 s^j2 r^i2 = s^(j1+j2) r^((-1)^j2 i1 + i2)
            let i = (if j2 == 0 { i1 + i2 } else { n - i1 + i2 }) % n;
            table[idx(j1, i1)][idx(j2, i2)] = idx((j1 + j2) % 2, i);
        }
        FiniteGroup::from_table(format!("D{n}"), table)
    }

    /// Symmetric group on `n ≤ 6` points, permutations in lexicographic
    /// one-line order, composed as `(a*b)(x) = a(b(x))`.
    pub fn symmetric(n: usize) -> Result<FiniteGroup> {
        if n == 0 || n > MAX_SYMMETRIC_DEGREE {
            return Err(Error::Unsupported(format!(
                "symmetric({n}) outside 1..={MAX_SYMMETRIC_DEGREE}"
            )));
        }
        let perms = lexicographic_permutations(n);
        let index: HashMap<&[usize], usize> =
            perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let c: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
                        index[c.as_slice()]
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(format!("S{n}"), table)
    }

    /// Build from an explicit Cayley table, validating every axiom.
    pub fn from_table(label: impl Into<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = check_table_shape(&table)?;
        let (report, found) = scan_axioms(n, |a, b| table[a][b]);
        let Some((identity, inverse)) = found else {
            return Err(Error::Axiom(report.violation.expect("failed scan has a witness")));
        };
        Ok(FiniteGroup {
            order: n,
            law: Law::Table(table.into_iter().flatten().map(|v| v as u32).collect()),
            identity,
            inverse,
            label: label.into(),
        })
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::cyclic(1).expect("order 1 is valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.law {
            Law::Cyclic => {
                let s = a + b;
                if s >= self.order {
                    s - self.order
                } else {
                    s
                }
            }
            Law::Table(t) => t[a * self.order + b] as usize,
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    /// Materialized Cayley table (allocates `order²` entries).
    pub fn cayley(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// True when the group law is addition of residues mod `order`.
    pub fn is_standard_cyclic(&self) -> bool {
        match self.law {
            Law::Cyclic => true,
            Law::Table(_) => (0..self.order)
                .all(|a| (0..self.order).all(|b| self.mul(a, b) == (a + b) % self.order)),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.commuting_violation().is_none()
    }

    /// First pair `(a, b)` with `ab != ba`, in index order.
    pub fn commuting_violation(&self) -> Option<(usize, usize)> {
        if self.law == Law::Cyclic {
            return None;
        }
        (0..self.order)
            .flat_map(|a| (a + 1..self.order).map(move |b| (a, b)))
            .find(|&(a, b)| self.mul(a, b) != self.mul(b, a))
    }

    /// `x` raised to a non-negative power.
    pub fn pow(&self, x: usize, e: usize) -> usize {
        (0..e).fold(self.identity, |acc, _| self.mul(acc, x))
    }
}

fn itertools_product4(
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..a).flat_map(move |i| {
        (0..b).flat_map(move |j| (0..c).flat_map(move |k| (0..d).map(move |l| (i, j, k, l))))
    })
}

fn lexicographic_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Validate a group through its own law (see [`validate_table`]).
pub fn validate_group(g: &FiniteGroup) -> ValidationReport {
    scan_axioms(g.order(), |a, b| g.mul(a, b)).0
}

/// Extensional τ: `perm[h][k] = τ_h(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismAction {
    perm: Vec<Vec<usize>>,
}

impl AutomorphismAction {
    pub fn from_tables(perm: Vec<Vec<usize>>) -> AutomorphismAction {
        AutomorphismAction { perm }
    }

    /// τ_h = id for every h, i.e. the direct product.
    pub fn trivial(h: &FiniteGroup, k: &FiniteGroup) -> AutomorphismAction {
        let id: Vec<usize> = (0..k.order()).collect();
        AutomorphismAction {
            perm: vec![id; h.order()],
        }
    }

    /// Odd-indexed elements of `H` act by inversion on `K`. A valid action
    /// whenever `K` is abelian and `h ↦ h mod 2` is a homomorphism (e.g.
    /// `H = Z_2m` or the trivial group).
    pub fn inversion(h: &FiniteGroup, k: &FiniteGroup) -> AutomorphismAction {
        let id: Vec<usize> = (0..k.order()).collect();
        let inv: Vec<usize> = (0..k.order()).map(|x| k.inv(x)).collect();
        AutomorphismAction {
            perm: (0..h.order())
                .map(|i| if i % 2 == 1 { inv.clone() } else { id.clone() })
                .collect(),
        }
    }

    /// τ_h = conjugation by `t^h` (element index `h` read as an exponent).
    /// Valid for cyclic `H` in residue order with `t^|H| = e`.
    pub fn conjugation(h: &FiniteGroup, k: &FiniteGroup, t: usize) -> Result<AutomorphismAction> {
        if t >= k.order() {
            return Err(Error::OutOfRange {
                what: "conjugating element",
                index: t,
                size: k.order(),
            });
        }
        let perm = (0..h.order())
            .map(|i| {
                let c = k.pow(t, i);
                let ci = k.inv(c);
                (0..k.order()).map(|x| k.mul(k.mul(c, x), ci)).collect()
            })
            .collect();
        Ok(AutomorphismAction { perm })
    }

    #[inline]
    pub fn apply(&self, h: usize, k: usize) -> usize {
        self.perm[h][k]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.perm
    }
}

/// Check that `a` is a homomorphism `H → Aut(K)`.
pub fn validate_action(
    h: &FiniteGroup,
    k: &FiniteGroup,
    a: &AutomorphismAction,
) -> Result<ValidationReport> {
    let (nh, nk) = (h.order(), k.order());
    if a.perm.len() != nh {
        return Err(Error::Structural(format!(
            "action has {} tables, |H| = {nh}",
            a.perm.len()
        )));
    }
    for (i, row) in a.perm.iter().enumerate() {
        if row.len() != nk {
            return Err(Error::Structural(format!("tau_{i} has length {}, |K| = {nk}", row.len())));
        }
        let mut seen = vec![false; nk];
        for &v in row {
            if v >= nk || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Structural(format!("tau_{i} is not a permutation of K")));
            }
        }
    }

    if let Some(x) = (0..nk).find(|&x| a.apply(h.identity(), x) != x) {
        return Ok(ValidationReport::fail(Violation::ActionNotIdentity { k: x }));
    }
    for hi in 0..nh {
        for k1 in 0..nk {
            for k2 in 0..nk {
                if a.apply(hi, k.mul(k1, k2)) != k.mul(a.apply(hi, k1), a.apply(hi, k2)) {
                    let v = Violation::NotAutomorphism { h: hi, k1, k2 };
                    return Ok(ValidationReport::fail(v));
                }
            }
        }
    }
    for h1 in 0..nh {
        for h2 in 0..nh {
            let h12 = h.mul(h1, h2);
            if let Some(x) = (0..nk).find(|&x| a.apply(h12, x) != a.apply(h1, a.apply(h2, x))) {
                let v = Violation::NotHomomorphism { h1, h2, k: x };
                return Ok(ValidationReport::fail(v));
            }
        }
    }
    Ok(ValidationReport::pass(true))
}

/// Haar weights, δ and modular functions. Finite groups get all ones.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarData {
    pub h_weights: Vec<f64>,
    pub k_weights: Vec<f64>,
    pub delta: Vec<f64>,
    pub mod_h: Vec<f64>,
    pub mod_k: Vec<f64>,
}

impl HaarData {
    pub fn counting(nh: usize, nk: usize) -> HaarData {
        HaarData {
            h_weights: vec![1.0; nh],
            k_weights: vec![1.0; nk],
            delta: vec![1.0; nh],
            mod_h: vec![1.0; nh],
            mod_k: vec![1.0; nk],
        }
    }

    pub fn validate(&self, h: &FiniteGroup) -> ValidationReport {
        let all = [&self.h_weights, &self.k_weights, &self.delta, &self.mod_h, &self.mod_k];
        for w in all {
            if let Some(index) = w.iter().position(|&x| x.is_nan() || x <= 0.0) {
                return ValidationReport::fail(Violation::NonPositiveWeight { index });
            }
        }
        for h1 in 0..h.order() {
            for h2 in 0..h.order() {
                let lhs = self.delta[h.mul(h1, h2)];
                let rhs = self.delta[h1] * self.delta[h2];
                if (lhs - rhs).abs() > 1e-12 * rhs {
                    return ValidationReport::fail(Violation::DeltaNotHomomorphism { h1, h2 });
                }
            }
        }
        ValidationReport::pass(true)
    }
}

/// `G_τ = H ⋉_τ K` with `(h,k)(h',k') = (hh', k τ_h(k'))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectGroup {
    h: Arc<FiniteGroup>,
    k: Arc<FiniteGroup>,
    action: AutomorphismAction,
    haar: HaarData,
}

impl SemidirectGroup {
    /// Rejects actions that fail [`validate_action`].
    pub fn new(
        h: Arc<FiniteGroup>,
        k: Arc<FiniteGroup>,
        action: AutomorphismAction,
    ) -> Result<SemidirectGroup> {
        let report = validate_action(&h, &k, &action)?;
        if !report.passed() {
            return Err(Error::InvalidAction(report));
        }
        let haar = HaarData::counting(h.order(), k.order());
        Ok(SemidirectGroup { h, k, action, haar })
    }

    /// `{e} ⋉ K`, isomorphic to `K`.
    pub fn over_trivial(k: Arc<FiniteGroup>) -> SemidirectGroup {
        let h = Arc::new(FiniteGroup::trivial());
        let action = AutomorphismAction::trivial(&h, &k);
        SemidirectGroup::new(h, k, action).expect("trivial action is valid")
    }

    pub fn h(&self) -> &FiniteGroup {
        &self.h
    }

    pub fn k(&self) -> &FiniteGroup {
        &self.k
    }

    pub fn k_arc(&self) -> &Arc<FiniteGroup> {
        &self.k
    }

    pub fn h_arc(&self) -> &Arc<FiniteGroup> {
        &self.h
    }

    pub fn action(&self) -> &AutomorphismAction {
        &self.action
    }

    pub fn haar(&self) -> &HaarData {
        &self.haar
    }

    pub fn order(&self) -> usize {
        self.h.order() * self.k.order()
    }

    pub fn label(&self) -> String {
        format!("{} x| {}", self.h.label(), self.k.label())
    }

    #[inline]
    pub fn index(&self, h: usize, k: usize) -> usize {
        h * self.k.order() + k
    }

    #[inline]
    pub fn split(&self, x: usize) -> (usize, usize) {
        (x / self.k.order(), x % self.k.order())
    }

    /// Product on pairs, without range checks.
    #[inline]
    pub fn mul_pair(&self, (h1, k1): (usize, usize), (h2, k2): (usize, usize)) -> (usize, usize) {
        (self.h.mul(h1, h2), self.k.mul(k1, self.action.apply(h1, k2)))
    }

    /// `(h,k)⁻¹ = (h⁻¹, τ_{h⁻¹}(k⁻¹))`
    #[inline]
    pub fn inv_pair(&self, (h, k): (usize, usize)) -> (usize, usize) {
        let hi = self.h.inv(h);
        (hi, self.action.apply(hi, self.k.inv(k)))
    }

    #[inline]
    pub fn mul_flat(&self, x: usize, y: usize) -> usize {
        let (h, k) = self.mul_pair(self.split(x), self.split(y));
        self.index(h, k)
    }

    #[inline]
    pub fn inv_flat(&self, x: usize) -> usize {
        let (h, k) = self.inv_pair(self.split(x));
        self.index(h, k)
    }

    fn check_pair(&self, (h, k): (usize, usize)) -> Result<()> {
        if h >= self.h.order() {
            return Err(Error::OutOfRange {
                what: "H",
                index: h,
                size: self.h.order(),
            });
        }
        if k >= self.k.order() {
            return Err(Error::OutOfRange {
                what: "K",
                index: k,
                size: self.k.order(),
            });
        }
        Ok(())
    }

    pub fn sd_mul(&self, x: (usize, usize), y: (usize, usize)) -> Result<(usize, usize)> {
        self.check_pair(x)?;
        self.check_pair(y)?;
        Ok(self.mul_pair(x, y))
    }

    pub fn sd_inv(&self, x: (usize, usize)) -> Result<(usize, usize)> {
        self.check_pair(x)?;
        Ok(self.inv_pair(x))
    }

    /// Group axioms of the derived law plus the closed-form inverse.
    pub fn validate(&self) -> ValidationReport {
        let (report, found) = scan_axioms(self.order(), |x, y| self.mul_flat(x, y));
        let Some((e, inverse)) = found else {
            return report;
        };
        debug_assert_eq!(e, self.index(self.h.identity(), self.k.identity()));
        for (x, &xi) in inverse.iter().enumerate() {
            if self.inv_flat(x) != xi {
                let (h, k) = self.split(x);
                return ValidationReport::fail(Violation::DerivedInverse { h, k });
            }
        }
        report
    }
}

/// Serializable description of a finite group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Symmetric { n: usize },
    Table { cayley: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic { n } => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral { n } => FiniteGroup::dihedral(*n),
            GroupSpec::Symmetric { n } => FiniteGroup::symmetric(*n),
            GroupSpec::Table { cayley } => FiniteGroup::from_table("table", cayley.clone()),
        }
    }
}

/// Convenience constructor mirroring the builtin group specs.
pub fn builtin_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    spec.build()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionSpec {
    Trivial,
    Inversion,
    Conjugation { by: usize },
    Table { perm: Vec<Vec<usize>> },
}

impl ActionSpec {
    pub fn build(&self, h: &FiniteGroup, k: &FiniteGroup) -> Result<AutomorphismAction> {
        match self {
            ActionSpec::Trivial => Ok(AutomorphismAction::trivial(h, k)),
            ActionSpec::Inversion => Ok(AutomorphismAction::inversion(h, k)),
            ActionSpec::Conjugation { by } => AutomorphismAction::conjugation(h, k, *by),
            ActionSpec::Table { perm } => Ok(AutomorphismAction::from_tables(perm.clone())),
        }
    }
}

/// Full semidirect product description, the body of a group spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemidirectSpec {
    #[serde(rename = "H")]
    pub h: GroupSpec,
    #[serde(rename = "K")]
    pub k: GroupSpec,
    pub tau: ActionSpec,
}

impl SemidirectSpec {
    pub fn build(&self) -> Result<SemidirectGroup> {
        let h = self.h.build()?;
        let k = self.k.build()?;
        let action = self.tau.build(&h, &k)?;
        SemidirectGroup::new(Arc::new(h), Arc::new(k), action)
    }
}

/// `H ⋉ K` from builtin specs and an action spec.
pub fn semidirect(h: FiniteGroup, k: FiniteGroup, action: AutomorphismAction) -> Result<SemidirectGroup> {
    SemidirectGroup::new(Arc::new(h), Arc::new(k), action)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_z3() -> SemidirectGroup {
        let h = FiniteGroup::cyclic(2).unwrap();
        let k = FiniteGroup::cyclic(3).unwrap();
        let a = AutomorphismAction::inversion(&h, &k);
        semidirect(h, k, a).unwrap()
    }

    fn z3_table() -> Vec<Vec<usize>> {
        vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]
    }

    #[test]
    fn z3_table_passes() {
        assert!(validate_table(&z3_table()).unwrap().passed());
    }

    #[test]
    fn corrupted_z3_reports_associativity_witness() {
        let mut t = z3_table();
        t[1][1] = 1;
        let report = validate_table(&t).unwrap();
        assert_eq!(
            report.violation,
            Some(Violation::Associativity { a: 1, b: 1, c: 2 })
        );
        // brute-force confirmation of the witness
        let (a, b, c) = (1, 1, 2);
        assert_ne!(t[t[a][b]][c], t[a][t[b][c]]);
        assert!(matches!(
            FiniteGroup::from_table("bad", t),
            Err(Error::Axiom(Violation::Associativity { .. }))
        ));
    }

    #[test]
    fn trivial_table_passes() {
        assert!(validate_table(&[vec![0]]).unwrap().passed());
    }

    #[test]
    fn ragged_table_is_structural() {
        let t = vec![vec![0, 1], vec![1]];
        assert!(matches!(validate_table(&t), Err(Error::Structural(_))));
        let t = vec![vec![0, 5], vec![1, 0]];
        assert!(matches!(validate_table(&t), Err(Error::Structural(_))));
    }

    #[test]
    fn no_identity_detected() {
        // constant table: every product is 0
        let t = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(validate_table(&t).unwrap().violation, Some(Violation::NoIdentity));
    }

    #[test]
    fn builtin_groups() {
        let z1 = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(z1.order(), 1);
        let z3 = FiniteGroup::cyclic(3).unwrap();
        assert_eq!(z3.mul(1, 2), 0);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        // exhaustive scan oracle for non-commutativity
        let t = s3.cayley();
        assert!((0..6).any(|a| (0..6).any(|b| t[a][b] != t[b][a])));
        assert!(validate_group(&s3).passed());
        let d4 = FiniteGroup::dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        assert!(FiniteGroup::symmetric(7).is_err());
        assert!(FiniteGroup::cyclic(0).is_err());
        assert_eq!(FiniteGroup::symmetric(6).unwrap().order(), 720);
    }

    #[test]
    fn symmetric_is_lexicographic() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.identity(), 0);
        // [0,2,1] is index 1 and [1,0,2] index 2: both transpositions
        assert_eq!(s3.mul(1, 1), 0);
        assert_eq!(s3.mul(2, 2), 0);
        assert_ne!(s3.mul(1, 2), s3.mul(2, 1));
    }

    #[test]
    fn large_group_sampled() {
        let s5 = FiniteGroup::symmetric(5).unwrap();
        let r = validate_group(&s5);
        assert!(r.passed());
        assert!(!r.exhaustive);
    }

    #[test]
    fn action_validation() {
        let h = FiniteGroup::cyclic(2).unwrap();
        let k = FiniteGroup::cyclic(3).unwrap();
        let inv = AutomorphismAction::from_tables(vec![vec![0, 1, 2], vec![0, 2, 1]]);
        assert!(validate_action(&h, &k, &inv).unwrap().passed());
        let shift = AutomorphismAction::from_tables(vec![vec![0, 1, 2], vec![1, 2, 0]]);
        let r = validate_action(&h, &k, &shift).unwrap();
        assert!(matches!(r.violation, Some(Violation::NotAutomorphism { h: 1, .. })));
        let triv = AutomorphismAction::trivial(&h, &k);
        assert!(validate_action(&h, &k, &triv).unwrap().passed());
        let notperm = AutomorphismAction::from_tables(vec![vec![0, 1, 2], vec![0, 0, 1]]);
        assert!(matches!(validate_action(&h, &k, &notperm), Err(Error::Structural(_))));
        // inversion on a non-homomorphic parity (H = Z_3) breaks the homomorphism law
        let h3 = FiniteGroup::cyclic(3).unwrap();
        let bad = AutomorphismAction::inversion(&h3, &k);
        let r = validate_action(&h3, &k, &bad).unwrap();
        assert!(matches!(r.violation, Some(Violation::NotHomomorphism { .. })));
    }

    #[test]
    fn semidirect_products() {
        let g = z2_z3();
        assert_eq!(g.sd_mul((1, 1), (1, 2)).unwrap(), (0, 2));
        assert_eq!(g.sd_inv((1, 1)).unwrap(), (1, 1));
        assert_eq!(g.sd_mul((1, 1), (1, 1)).unwrap(), (0, 0));
        assert_eq!(g.sd_mul((1, 0), (0, 1)).unwrap(), (1, 2));
        for k in 0..3 {
            assert_eq!(g.sd_inv((0, k)).unwrap(), (0, (3 - k) % 3));
            assert_eq!(g.sd_mul((0, 0), (1, k)).unwrap(), (1, k));
        }
        assert!(g.validate().passed());
        assert!(g.sd_mul((2, 0), (0, 0)).is_err());
        assert!(g.sd_inv((0, 3)).is_err());
    }

    #[test]
    fn invalid_action_rejected() {
        let h = FiniteGroup::cyclic(2).unwrap();
        let k = FiniteGroup::cyclic(3).unwrap();
        let shift = AutomorphismAction::from_tables(vec![vec![0, 1, 2], vec![1, 2, 0]]);
        assert!(matches!(semidirect(h, k, shift), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn trivial_h_matches_k() {
        let k = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let g = SemidirectGroup::over_trivial(k.clone());
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(g.mul_flat(a, b), k.mul(a, b));
            }
        }
    }

    #[test]
    fn conjugation_action_on_s3() {
        let h = FiniteGroup::cyclic(2).unwrap();
        let k = FiniteGroup::symmetric(3).unwrap();
        let a = AutomorphismAction::conjugation(&h, &k, 1).unwrap();
        let g = semidirect(h, k, a).unwrap();
        assert!(g.validate().passed());
        assert_eq!(g.order(), 12);
    }

    #[test]
    fn counting_measure_is_tau_invariant() {
        let g = z2_z3();
        let w = &g.haar().k_weights;
        for h in 0..2 {
            let moved: f64 = (0..3).map(|k| w[g.action().apply(h, k)]).sum();
            assert_eq!(moved, w.iter().sum::<f64>());
        }
        assert!(g.haar().validate(g.h()).passed());
        assert!(g.haar().delta.iter().all(|&d| d == 1.0));
    }

    #[test]
    fn spec_round_trip() {
        let s = SemidirectSpec {
            h: GroupSpec::Cyclic { n: 2 },
            k: GroupSpec::Symmetric { n: 3 },
            tau: ActionSpec::Conjugation { by: 1 },
        };
        let json = serde_json::to_string(&s).unwrap();
        let back: SemidirectSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.build().unwrap().order(), 12);
    }
}
