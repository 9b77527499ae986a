//! Deciders for *-commutativity and (strong) independence, plus the
//! system-level certificate: validity, minimality, topological freeness.
//!
//! Two commuting maps `θ_1, θ_2` *-commute when every pair with
//! `θ_1(x_1) = θ_2(x_2)` has exactly one `y` with `θ_2(y) = x_1` and
//! `θ_1(y) = x_2`.
//!
//! For linear maps `f(σ)` the kernels are finite groups, hence co-Hopfian,
//! so `θ_1` *-commutes with `θ_2` exactly when `θ_1` is injective on
//! `ker θ_2`, i.e. when `gcd(f_1, f_2) = 1`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dictionary::WindowMap;
use crate::error::{Error, Result};
use crate::gf2poly::{apply_poly, poly_factor, poly_gcd, recurrence_kernel, Gf2Poly};
use crate::word::PeriodicSeq;

/// A pair of commuting self-maps of `{0, …, size-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMapPair {
    f: Vec<usize>,
    g: Vec<usize>,
}

impl FiniteMapPair {
    pub fn new(f: Vec<usize>, g: Vec<usize>) -> Result<Self> {
        let n = f.len();
        if g.len() != n || n == 0 {
            return Err(Error::Parse("maps need equal, positive carrier sizes".into()));
        }
        if let Some(&v) = f.iter().chain(&g).find(|&&v| v >= n) {
            return Err(Error::Parse(format!("value {v} outside the carrier")));
        }
        if let Some(point) = (0..n).find(|&x| f[g[x]] != g[f[x]]) {
            return Err(Error::NonCommutingMaps { point });
        }
        Ok(FiniteMapPair { f, g })
    }

    pub fn size(&self) -> usize {
        self.f.len()
    }

    pub fn first(&self) -> &[usize] {
        &self.f
    }

    pub fn second(&self) -> &[usize] {
        &self.g
    }
}

/// A diagram `θ_1(x_1) = θ_2(x_2)` together with its number of completions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagramWitness {
    pub x1: usize,
    pub x2: usize,
    pub completions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteDecision {
    pub star_commute: bool,
    pub witness: Option<DiagramWitness>,
    /// θ_2 is injective on every θ_1-fibre.
    pub fibre_injective: bool,
    /// θ_1 maps θ_2^{-1}(x) bijectively onto θ_2^{-1}(θ_1(x)) for all x.
    pub first_bijective_on_fibres: bool,
    /// θ_2 maps θ_1^{-1}(x) bijectively onto θ_1^{-1}(θ_2(x)) for all x.
    pub second_bijective_on_fibres: bool,
}

/// Decides *-commutativity of `(θ_1, θ_2) = (f, g)` from the definition and
/// cross-checks the fibre characterisations.
///
/// The two bijectivity conditions are always equivalent to the definition.
/// Fibre injectivity follows from it, and implies it when `θ_1` is
/// surjective; for non-surjective `θ_1` it may hold on its own, since the
/// definition also asks for existence of completions.
pub fn star_commute_finite(pair: &FiniteMapPair) -> Result<FiniteDecision> {
    let (f, g) = (&pair.f, &pair.g);
    let n = pair.size();

    let mut completions: HashMap<(usize, usize), usize> = HashMap::new();
    for y in 0..n {
        *completions.entry((g[y], f[y])).or_default() += 1;
    }
    let mut missing = None;
    let mut repeated = None;
    for x2 in 0..n {
        for x1 in (0..n).filter(|&x1| f[x1] == g[x2]) {
            let c = completions.get(&(x1, x2)).copied().unwrap_or(0);
            let w = DiagramWitness { x1, x2, completions: c };
            if c == 0 && missing.is_none() {
                missing = Some(w);
            } else if c > 1 && repeated.is_none() {
                repeated = Some(w);
            }
        }
    }
    let witness = missing.or(repeated);

    let preimages = |h: &[usize], x: usize| -> Vec<usize> { (0..n).filter(|&y| h[y] == x).collect() };
    let fibre_injective = (0..n).all(|x| {
        let fibre = preimages(f, x);
        let images: BTreeSet<usize> = fibre.iter().map(|&y| g[y]).collect();
        images.len() == fibre.len()
    });
    let bijective = |a: &[usize], b: &[usize]| {
        (0..n).all(|x| {
            let source = preimages(b, x);
            let target: BTreeSet<usize> = preimages(b, a[x]).into_iter().collect();
            let image: BTreeSet<usize> = source.iter().map(|&y| a[y]).collect();
            image.len() == source.len() && image == target
        })
    };
    let decision = FiniteDecision {
        star_commute: witness.is_none(),
        witness,
        fibre_injective,
        first_bijective_on_fibres: bijective(f, g),
        second_bijective_on_fibres: bijective(g, f),
    };

    let d = decision.star_commute;
    if decision.first_bijective_on_fibres != d || decision.second_bijective_on_fibres != d {
        return Err(Error::CriteriaDisagreement(format!(
            "definition {d}, fibre bijectivity ({}, {})",
            decision.first_bijective_on_fibres, decision.second_bijective_on_fibres
        )));
    }
    let first_surjective = (0..n).all(|x| f.contains(&x));
    if (d && !fibre_injective) || (first_surjective && fibre_injective != d) {
        return Err(Error::CriteriaDisagreement(format!(
            "definition {d}, fibre injectivity {fibre_injective}"
        )));
    }
    Ok(decision)
}

/// Outcome of the word-level diagram search for two window maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramSearch {
    pub star_commute: bool,
    /// Length of the completing words `y`.
    pub depth: usize,
    /// Packed words `(x_1, x_2)` with zero or several completions.
    pub witness: Option<DiagramWitness>,
}

/// Depth used by the oracle: `n_1 + n_2 + 4`.
pub fn default_search_depth(m1: &WindowMap, m2: &WindowMap) -> usize {
    m1.window() + m2.window() + 4
}

/// Searches all word-level diagrams whose completions `y` have length
/// `depth`: `x_1 = θ_2(y)`, `x_2 = θ_1(y)`.
///
/// Exact for linear progressive maps once `depth >= n_1 + n_2 - 1`; for
/// nonlinear maps this is a bounded-depth semi-decision.
pub fn star_commute_diagram_search(
    m1: &WindowMap,
    m2: &WindowMap,
    depth: usize,
) -> Result<DiagramSearch> {
    let (n1, n2) = (m1.window(), m2.window());
    let need = n1 + n2 - 1;
    if depth < need {
        return Err(Error::LevelTooSmall { level: depth, need });
    }
    let len1 = depth + 1 - n2; // x_1 = θ_2(y)
    let len2 = depth + 1 - n1; // x_2 = θ_1(y)
    let common = depth + 2 - n1 - n2;

    let mut completions: HashMap<(usize, usize), usize> = HashMap::new();
    for y in 0..1usize << depth {
        let x1 = m2.apply_index(y, depth);
        let x2 = m1.apply_index(y, depth);
        if m1.apply_index(x1, len1) != m2.apply_index(x2, len2) {
            return Err(Error::NonCommutingMaps { point: y });
        }
        *completions.entry((x1, x2)).or_default() += 1;
    }
    let mut by_image1: Vec<Vec<usize>> = vec![Vec::new(); 1 << common];
    for x1 in 0..1usize << len1 {
        by_image1[m1.apply_index(x1, len1)].push(x1);
    }
    let mut by_image2: Vec<Vec<usize>> = vec![Vec::new(); 1 << common];
    for x2 in 0..1usize << len2 {
        by_image2[m2.apply_index(x2, len2)].push(x2);
    }
    let compatible: usize = by_image1
        .iter()
        .zip(&by_image2)
        .map(|(a, b)| a.len() * b.len())
        .sum();

    let unique = completions.len() == compatible && completions.values().all(|&c| c == 1);
    let witness = if unique {
        None
    } else {
        let missing = by_image1.iter().zip(&by_image2).find_map(|(a, b)| {
            a.iter().find_map(|&x1| {
                b.iter()
                    .find(|&&x2| !completions.contains_key(&(x1, x2)))
                    .map(|&x2| DiagramWitness { x1, x2, completions: 0 })
            })
        });
        missing.or_else(|| {
            completions
                .iter()
                .filter(|(_, &c)| c > 1)
                .min()
                .map(|(&(x1, x2), &c)| DiagramWitness { x1, x2, completions: c })
        })
    };
    Ok(DiagramSearch {
        star_commute: unique,
        depth,
        witness,
    })
}

/// `a(σ)` restricted to `ker b(σ)` is a bijection of that kernel.
pub fn star_commute_via_kernel(a: Gf2Poly, b: Gf2Poly) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let kb = recurrence_kernel(b)?;
    let images: BTreeSet<PeriodicSeq> = kb.iter().map(|x| apply_poly(a, x)).collect();
    Ok(images.len() == kb.len() && images.iter().all(|x| kb.binary_search(x).is_ok()))
}

pub fn star_commute_via_gcd(a: Gf2Poly, b: Gf2Poly) -> bool {
    poly_gcd(a, b) == Gf2Poly::ONE
}

/// One criterion computed by explicit kernel sets and by polynomial algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoWay {
    pub explicit: bool,
    pub algebraic: bool,
}

impl TwoWay {
    pub fn value(self) -> bool {
        self.explicit
    }

    pub fn agrees(self) -> bool {
        self.explicit == self.algebraic
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceProfile {
    pub first: Gf2Poly,
    pub second: Gf2Poly,
    pub gcd: Gf2Poly,
    /// `ker a ∩ ker b = {0}`.
    pub strongly_independent: TwoWay,
    /// `ker a + ker b = ker ab`.
    pub independent: TwoWay,
    pub star_commute: TwoWay,
    /// Smallest nonzero sequence in both kernels, if any.
    pub shared_kernel_element: Option<PeriodicSeq>,
}

impl IndependenceProfile {
    pub fn all_agree(&self) -> bool {
        let flags = [self.strongly_independent, self.independent, self.star_commute];
        flags.iter().all(|f| f.agrees()) && flags.iter().all(|f| f.value() == flags[0].value())
    }
}

/// Strong independence, independence and *-commutativity of `a(σ), b(σ)`.
/// The linear class makes all three equivalent; disagreement is an error.
pub fn independence_profile(a: Gf2Poly, b: Gf2Poly) -> Result<IndependenceProfile> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let ka = recurrence_kernel(a)?;
    let kb = recurrence_kernel(b)?;
    let kab = recurrence_kernel(a * b)?;
    let g = poly_gcd(a, b);
    let deg = |p: Gf2Poly| p.degree().expect("nonzero");

    let shared_kernel_element = ka
        .iter()
        .filter(|x| !x.is_zero())
        .find(|x| kb.binary_search(x).is_ok())
        .cloned();

    let sums: BTreeSet<PeriodicSeq> = ka
        .iter()
        .flat_map(|x| kb.iter().map(move |y| x.add(y)))
        .collect();
    let kab_set: BTreeSet<PeriodicSeq> = kab.into_iter().collect();
    // dim(ker a + ker b) = deg a + deg b - deg gcd(a, b), dim ker ab = deg a + deg b
    let sum_dimension = deg(a) + deg(b) - deg(g);

    let profile = IndependenceProfile {
        first: a,
        second: b,
        gcd: g,
        strongly_independent: TwoWay {
            explicit: shared_kernel_element.is_none(),
            algebraic: g == Gf2Poly::ONE,
        },
        independent: TwoWay {
            explicit: sums == kab_set,
            algebraic: sum_dimension == deg(a * b),
        },
        star_commute: TwoWay {
            explicit: star_commute_via_kernel(a, b)?,
            algebraic: star_commute_via_gcd(a, b),
        },
        shared_kernel_element,
    };
    if !profile.all_agree() {
        return Err(Error::CriteriaDisagreement(format!(
            "independence profile of ({a}, {b}) is inconsistent"
        )));
    }
    Ok(profile)
}

/// Commuting linear cellular automata `f_1(σ), …, f_r(σ)` generating an
/// action of the free abelian monoid `N^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DynamicalSystem {
    generators: Vec<Gf2Poly>,
    names: Vec<String>,
}

impl DynamicalSystem {
    pub fn new(generators: Vec<Gf2Poly>) -> Result<Self> {
        let names = generators.iter().map(ToString::to_string).collect();
        Self::with_names(generators, names)
    }

    pub fn with_names(generators: Vec<Gf2Poly>, names: Vec<String>) -> Result<Self> {
        if names.len() != generators.len() {
            return Err(Error::InvalidSystem("one name per generator required".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.degree().unwrap_or(0) == 0) {
            return Err(Error::InvalidSystem(format!(
                "generator {g} must have degree >= 1"
            )));
        }
        Ok(DynamicalSystem { generators, names })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let gens = text
            .split(',')
            .map(|s| s.parse::<Gf2Poly>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(gens)
    }

    pub fn generators(&self) -> &[Gf2Poly] {
        &self.generators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_map(&self, i: usize) -> WindowMap {
        WindowMap::from_poly(self.generators[i]).expect("generators are nonzero")
    }

    pub fn element_poly(&self, p: &MonoidElement) -> Gf2Poly {
        assert_eq!(p.exponents.len(), self.rank(), "monoid element of wrong rank");
        self.generators
            .iter()
            .zip(&p.exponents)
            .fold(Gf2Poly::ONE, |acc, (&g, &e)| acc * g.pow(e))
    }

    /// `θ_p`, built from the product polynomial.
    pub fn element_map(&self, p: &MonoidElement) -> WindowMap {
        WindowMap::from_poly(self.element_poly(p)).expect("products of nonzero polynomials")
    }
}

/// An element of `N^r`, written multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MonoidElement {
    pub exponents: Vec<u32>,
}

impl MonoidElement {
    pub fn new(exponents: Vec<u32>) -> Self {
        MonoidElement { exponents }
    }

    pub fn unit(rank: usize) -> Self {
        MonoidElement::new(vec![0; rank])
    }

    pub fn generator(i: usize, rank: usize) -> Self {
        let mut e = vec![0; rank];
        e[i] = 1;
        MonoidElement::new(e)
    }

    pub fn is_unit(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        MonoidElement::new(self.zip_with(other, |a, b| a + b))
    }

    /// Greatest common lower bound `p ∧ q`.
    pub fn meet(&self, other: &Self) -> Self {
        MonoidElement::new(self.zip_with(other, u32::min))
    }

    /// Least common upper bound `p ∨ q`.
    pub fn join(&self, other: &Self) -> Self {
        MonoidElement::new(self.zip_with(other, u32::max))
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.meet(other).is_unit()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Vec<u32> {
        assert_eq!(self.exponents.len(), other.exponents.len());
        self.exponents
            .iter()
            .zip(&other.exponents)
            .map(|(&a, &b)| f(a, b))
            .collect()
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub first: usize,
    pub second: usize,
    pub gcd: Gf2Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityCertificate {
    pub minimal: bool,
    /// Generator whose powers force the image intersection to be trivial.
    pub generator: Option<usize>,
    pub argument: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankWitness {
    /// Distinct irreducible factors over all generators.
    pub irreducibles: Vec<Gf2Poly>,
    /// Row `i` holds the multiplicities of each irreducible in generator `i`.
    pub exponent_matrix: Vec<Vec<u32>>,
    pub rank: usize,
    /// Distinct `p, q` with `θ_p = θ_q`, present when the rank is deficient.
    pub collision: Option<(MonoidElement, MonoidElement)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemCertificate {
    pub valid: bool,
    pub witnesses: Vec<PairWitness>,
    pub minimal: bool,
    pub minimality_argument: String,
    pub topologically_free: bool,
    pub rank_witness: RankWitness,
    pub simplicity_report: String,
    pub rationale: String,
}

/// Pairs of generators sharing a nontrivial common factor.
fn coprimality_witnesses(sys: &DynamicalSystem) -> Vec<PairWitness> {
    let g = sys.generators();
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let d = poly_gcd(g[i], g[j]);
            if d != Gf2Poly::ONE {
                out.push(PairWitness {
                    first: i,
                    second: j,
                    gcd: d,
                });
            }
        }
    }
    out
}

/// `θ_p` and `θ_q` *-commute exactly when `p` and `q` are coprime.
///
/// With every generator of degree >= 1, `gcd(f^a, f^b) ≠ 1` for `a, b >= 1`,
/// so non-coprime elements never *-commute. Coprime elements *-commute iff
/// the generators are pairwise coprime, by the product rule.
pub fn certify_system(sys: &DynamicalSystem) -> SystemCertificate {
    let witnesses = coprimality_witnesses(sys);
    let valid = witnesses.is_empty();
    let minimality = if valid {
        is_minimal(sys).expect("system is valid")
    } else {
        MinimalityCertificate {
            minimal: false,
            generator: None,
            argument: "not decided: the system is invalid".into(),
        }
    };
    let rank_witness = is_topologically_free(sys);
    let topologically_free = rank_witness.collision.is_none();
    let simplicity_report = if valid && minimality.minimal {
        format!(
            "valid and minimal: the Cuntz-Nica-Pimsner algebra O[X,P,θ] of ({}) is simple, \
             since O[X,P,θ] is simple if and only if (X,P,θ) is minimal; minimality here means \
             the intersection of all θ_p(G) over p in P is trivial",
            sys.names().join(", ")
        )
    } else if !valid {
        "invalid: some generators fail to *-commute (shared kernel), so (X,P,θ) is not an \
         irreversible *-commutative dynamical system and no simplicity claim is made"
            .into()
    } else {
        "valid but not minimal: O[X,P,θ] is not simple".into()
    };
    SystemCertificate {
        valid,
        witnesses,
        minimal: minimality.minimal,
        minimality_argument: minimality.argument,
        topologically_free,
        rank_witness,
        simplicity_report,
        rationale: "kernels of the generators are finite groups, hence co-Hopfian, so an \
                    injective restriction to a kernel is an automorphism and *-commutativity \
                    coincides with trivial kernel intersection, i.e. gcd = 1"
            .into(),
    }
}

/// Minimality of a valid system.
///
/// A point of `∩_p θ_p(G)` on the dual side lies in `f^a · GF(2)[t]` for all
/// `a`, so it has degree at least `a · deg f` for all `a` and must vanish.
pub fn is_minimal(sys: &DynamicalSystem) -> Result<MinimalityCertificate> {
    let witnesses = coprimality_witnesses(sys);
    if let Some(w) = witnesses.first() {
        return Err(Error::InvalidSystem(format!(
            "generators {} and {} share the factor {}",
            sys.names()[w.first],
            sys.names()[w.second],
            w.gcd
        )));
    }
    let generator = sys
        .generators()
        .iter()
        .position(|g| g.degree().unwrap_or(0) >= 1);
    Ok(match generator {
        Some(i) => {
            let f = sys.generators()[i];
            MinimalityCertificate {
                minimal: true,
                generator: Some(i),
                argument: format!(
                    "generator {} = {f} has degree {}: a nonzero element of the intersection \
                     of all images would lie in ({f})^a·GF(2)[t] for every a, forcing degree \
                     >= {}·a for all a; hence the intersection is trivial",
                    sys.names()[i],
                    f.degree().unwrap(),
                    f.degree().unwrap()
                ),
            }
        }
        None => MinimalityCertificate {
            minimal: false,
            generator: None,
            argument: "no generators: P is trivial and the intersection is the whole group"
                .into(),
        },
    })
}

/// Topological freeness: `θ_p = θ_q` only for `p = q`, i.e. the monoid map
/// `p ↦ Π f_i^{p_i}` is injective. By unique factorisation this holds iff
/// the exponent vectors over the irreducible factors are linearly
/// independent over Q. For `p ≠ q` the set `{θ_p = θ_q}` is the kernel of
/// `f_p + f_q`, finite unless the difference vanishes.
pub fn is_topologically_free(sys: &DynamicalSystem) -> RankWitness {
    let factorizations: Vec<_> = sys
        .generators()
        .iter()
        .map(|&g| poly_factor(g).expect("generators are nonzero"))
        .collect();
    let irreducibles: Vec<Gf2Poly> = factorizations
        .iter()
        .flat_map(|f| f.factors.iter().map(|&(q, _)| q))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let exponent_matrix: Vec<Vec<u32>> = factorizations
        .iter()
        .map(|f| irreducibles.iter().map(|&q| f.multiplicity(q)).collect())
        .collect();
    let (rank, relation) = rank_and_relation(&exponent_matrix);
    let collision = relation.map(|coeffs| {
        let p = coeffs.iter().map(|&c| c.max(0) as u32).collect();
        let q = coeffs.iter().map(|&c| (-c).max(0) as u32).collect();
        (MonoidElement::new(p), MonoidElement::new(q))
    });
    RankWitness {
        irreducibles,
        exponent_matrix,
        rank,
        collision,
    }
}

/// Rank of the rows over Q and, when they are dependent, a primitive integer
/// relation `Σ c_i row_i = 0`.
fn rank_and_relation(rows: &[Vec<u32>]) -> (usize, Option<Vec<i64>>) {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    // Column-reduce the transpose: solve Σ c_i row_i = 0 with unknowns c_i.
    let mut m: Vec<Vec<Ratio<i64>>> = (0..cols)
        .map(|j| (0..r).map(|i| Ratio::from_integer(rows[i][j] as i64)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..cols).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= inv;
        }
        for i in 0..cols {
            if i != row && !m[i][col].is_zero() {
                let factor = m[i][col];
                let pivot_row = m[row].clone();
                for (v, pv) in m[i].iter_mut().zip(pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    let free = (0..r).find(|c| !pivots.contains(c));
    let relation = free.map(|fc| {
        let mut sol = vec![Ratio::<i64>::zero(); r];
        sol[fc] = Ratio::one();
        for (k, &pc) in pivots.iter().enumerate() {
            sol[pc] = -m[k][fc];
        }
        let lcm = sol.iter().fold(1i64, |acc, v| num_integer_lcm(acc, *v.denom()));
        let ints: Vec<i64> = sol.iter().map(|v| (v * lcm).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, &v| num_integer_gcd(acc, v.abs()));
        ints.into_iter().map(|v| v / g.max(1)).collect()
    });
    (rank, relation)
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_integer_gcd(b, a % b)
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    a / num_integer_gcd(a, b) * b
}
