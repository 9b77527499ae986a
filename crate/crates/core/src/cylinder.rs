//! Cylinder functions on `X = {0,1}^N` with exact `Q(√2)` values, the
//! endomorphisms `α`, transfer operators `L`, expectations `E = α∘L` and
//! Parseval frames for progressive window maps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dictionary::WindowMap;
use crate::error::{Error, Result};
use crate::scalar::{QuadScalar, Rational};
use crate::word::Word;

/// A function of the first `level` coordinates, stored as `2^level` values
/// in lexicographic order of the words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCylinder")]
pub struct CylinderFunction {
    level: usize,
    values: Vec<QuadScalar>,
}

#[derive(Deserialize)]
struct RawCylinder {
    level: usize,
    values: Vec<QuadScalar>,
}

impl TryFrom<RawCylinder> for CylinderFunction {
    type Error = Error;
    fn try_from(raw: RawCylinder) -> Result<Self> {
        CylinderFunction::new(raw.level, raw.values)
    }
}

impl CylinderFunction {
    pub fn new(level: usize, values: Vec<QuadScalar>) -> Result<Self> {
        if values.len() != 1usize << level {
            return Err(Error::Parse(format!(
                "level {level} needs {} values, got {}",
                1usize << level,
                values.len()
            )));
        }
        Ok(CylinderFunction { level, values })
    }

    pub fn zero(level: usize) -> Self {
        CylinderFunction {
            level,
            values: vec![QuadScalar::zero(); 1 << level],
        }
    }

    pub fn constant(c: QuadScalar) -> Self {
        CylinderFunction {
            level: 0,
            values: vec![c],
        }
    }

    pub fn one() -> Self {
        Self::constant(QuadScalar::one())
    }

    /// `χ_[w]`, the indicator of the cylinder of words starting with `w`.
    pub fn indicator(w: &Word) -> Self {
        Self::basis(w.index(), w.len())
    }

    /// `χ_[w]` for the packed word `index` of length `level`.
    pub fn basis(index: usize, level: usize) -> Self {
        let mut f = Self::zero(level);
        f.values[index] = QuadScalar::one();
        f
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[QuadScalar] {
        &self.values
    }

    pub fn value(&self, w: &Word) -> QuadScalar {
        assert!(w.len() >= self.level, "word shorter than the level");
        self.values[w.prefix(self.level).index()]
    }

    pub fn value_index(&self, index: usize) -> QuadScalar {
        self.values[index]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(QuadScalar::is_zero)
    }

    /// The same function read at a finer level.
    pub fn embed(&self, level: usize) -> Self {
        assert!(level >= self.level, "cannot embed into a coarser level");
        let d = level - self.level;
        if d == 0 {
            return self.clone();
        }
        CylinderFunction {
            level,
            values: (0..1usize << level).map(|i| self.values[i >> d]).collect(),
        }
    }

    /// The same function at a coarser level, if it does not depend on the
    /// dropped coordinates.
    pub fn restrict(&self, level: usize) -> Option<Self> {
        assert!(level <= self.level, "cannot restrict to a finer level");
        let d = self.level - level;
        let values: Vec<QuadScalar> = (0..1usize << level)
            .map(|i| self.values[i << d])
            .collect();
        let consistent = (0..self.values.len()).all(|j| self.values[j] == values[j >> d]);
        consistent.then_some(CylinderFunction { level, values })
    }

    /// Restricts as far as possible.
    pub fn reduced(&self) -> Self {
        let mut f = self.clone();
        while f.level > 0 {
            match f.restrict(f.level - 1) {
                Some(g) => f = g,
                None => break,
            }
        }
        f
    }

    /// Equality as functions on `X`, independent of the storage level.
    pub fn equivalent(&self, other: &Self) -> bool {
        let level = self.level.max(other.level);
        self.embed(level).values == other.embed(level).values
    }

    fn zip_with(&self, other: &Self, op: impl Fn(QuadScalar, QuadScalar) -> QuadScalar) -> Self {
        let level = self.level.max(other.level);
        let (a, b) = (self.embed(level), other.embed(level));
        CylinderFunction {
            level,
            values: a.values.iter().zip(&b.values).map(|(&x, &y)| op(x, y)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: QuadScalar) -> Self {
        CylinderFunction {
            level: self.level,
            values: self.values.iter().map(|&x| x * c).collect(),
        }
    }
}

/// `α(f) = f∘θ`, raising the level by `n - 1`.
pub fn alpha(m: &WindowMap, f: &CylinderFunction) -> CylinderFunction {
    let level = f.level + m.window() - 1;
    let mut out = CylinderFunction::zero(level);
    for (w, &v) in f.values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for y in m.preimages_index(w, f.level) {
            out.values[y] = v;
        }
    }
    out
}

fn fiber_count(m: &WindowMap) -> Result<usize> {
    m.fiber_count().ok_or(Error::NotProgressive)
}

/// `L(f)(x) = N^{-1} Σ_{θ(y) = x} f(y)`, `N = 2^{n-1}`.
///
/// A level-`k` function is first read at level `max(k, n-1)` so that every
/// preimage word is long enough; the result has level `max(k-n+1, 0)`.
pub fn transfer(m: &WindowMap, f: &CylinderFunction) -> Result<CylinderFunction> {
    let n = fiber_count(m)?;
    let f = f.embed(f.level.max(m.window() - 1));
    let level = f.level + 1 - m.window();
    let mut out = CylinderFunction::zero(level);
    for (y, &v) in f.values.iter().enumerate() {
        if !v.is_zero() {
            out.values[m.apply_index(y, f.level)] += v;
        }
    }
    let inv = Rational::new(1, n as i128);
    out.values.iter_mut().for_each(|v| *v = v.scale(inv));
    Ok(out)
}

/// The conditional expectation `E = α∘L` onto `α(C(X))`.
pub fn expectation(m: &WindowMap, f: &CylinderFunction) -> Result<CylinderFunction> {
    Ok(alpha(m, &transfer(m, f)?))
}

/// `⟨f, g⟩ = L(f̄ g)`; conjugation is trivial on these real scalars.
pub fn inner_product(
    m: &WindowMap,
    f: &CylinderFunction,
    g: &CylinderFunction,
) -> Result<CylinderFunction> {
    transfer(m, &f.mul(g))
}

/// A finite family `{ν_i}` with `Σ ν_i α(L(ν_i f)) = f` for all `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    #[serde(skip)]
    map: WindowMap,
    elements: Vec<CylinderFunction>,
}

impl Frame {
    /// Wraps the family after checking the reconstruction identity.
    pub fn new(map: WindowMap, elements: Vec<CylinderFunction>) -> Result<Self> {
        let frame = Frame { map, elements };
        frame.verify()?;
        Ok(frame)
    }

    pub fn map(&self) -> &WindowMap {
        &self.map
    }

    pub fn elements(&self) -> &[CylinderFunction] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Largest level among the elements.
    pub fn level(&self) -> usize {
        self.elements.iter().map(|e| e.level).max().unwrap_or(0)
    }

    pub fn reconstruct(&self, f: &CylinderFunction) -> Result<CylinderFunction> {
        let mut acc = CylinderFunction::zero(0);
        for nu in &self.elements {
            let term = nu.mul(&alpha(&self.map, &transfer(&self.map, &nu.mul(f))?));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Checks reconstruction on every `χ_[w]` with `w` one level finer than
    /// both the elements and the window prefix.
    pub fn verify(&self) -> Result<()> {
        fiber_count(&self.map)?;
        let level = self.level().max(self.map.window() - 1) + 1;
        for w in 0..1usize << level {
            let chi = CylinderFunction::basis(w, level);
            if !self.reconstruct(&chi)?.equivalent(&chi) {
                return Err(Error::NotAFrame {
                    word: Word::from_index(w, level).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// `{√N·χ_[w] : w ∈ X_{n-1}}`: `θ` is injective on each prefix cylinder of
/// length `n - 1`, and the indicators form a partition of unity.
pub fn standard_frame(m: &WindowMap) -> Result<Frame> {
    fiber_count(m)?;
    let k = m.window() - 1;
    let root = QuadScalar::sqrt_pow2(k as i32);
    let elements = (0..1usize << k)
        .map(|w| CylinderFunction::basis(w, k).scale(root))
        .collect();
    Ok(Frame {
        map: m.clone(),
        elements,
    })
}

/// `{ν_{1,i} · α_1(ν_{2,j})}`, a Parseval frame for "first `θ_1`, then
/// `θ_2`". Elements are ordered with `i` major.
pub fn refine_frame(f1: &Frame, f2: &Frame) -> Result<Frame> {
    f1.verify()?;
    f2.verify()?;
    let elements = f1
        .elements
        .iter()
        .flat_map(|nu1| {
            f2.elements
                .iter()
                .map(move |nu2| nu1.mul(&alpha(&f1.map, nu2)))
        })
        .collect();
    Frame::new(f1.map.then(&f2.map), elements)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommuteDecision {
    pub commute: bool,
    pub level: usize,
    /// First basis word `w` (lexicographic) with `L_1 α_2 χ_[w] ≠ α_2 L_1 χ_[w]`.
    pub witness: Option<String>,
}

type Sparse = BTreeMap<usize, QuadScalar>;

fn sparse_embed(level: usize, f: &Sparse, to: usize) -> Sparse {
    let d = to - level;
    f.iter()
        .flat_map(|(&w, &v)| ((w << d)..((w + 1) << d)).map(move |y| (y, v)))
        .collect()
}

fn sparse_alpha(m: &WindowMap, level: usize, f: &Sparse) -> Sparse {
    f.iter()
        .flat_map(|(&w, &v)| m.preimages_index(w, level).into_iter().map(move |y| (y, v)))
        .collect()
}

fn sparse_transfer(m: &WindowMap, level: usize, f: &Sparse) -> (usize, Sparse) {
    let from = level.max(m.window() - 1);
    let f = sparse_embed(level, f, from);
    let inv = Rational::new(1, 1i128 << (m.window() - 1));
    let mut out = Sparse::new();
    for (y, v) in f {
        *out.entry(m.apply_index(y, from)).or_default() += v.scale(inv);
    }
    out.retain(|_, v| !v.is_zero());
    (from + 1 - m.window(), out)
}

/// Compares `L_1∘α_2` with `α_2∘L_1` on every basis function `χ_[w]`,
/// `w ∈ X_level`. Both operators are linear, so this decides equality on
/// all functions of that level.
pub fn operator_commute_check(
    m1: &WindowMap,
    m2: &WindowMap,
    level: usize,
) -> Result<CommuteDecision> {
    fiber_count(m1)?;
    fiber_count(m2)?;
    for w in 0..1usize << level {
        let chi = Sparse::from([(w, QuadScalar::one())]);
        let (l1, lhs) = sparse_transfer(m1, level + m2.window() - 1, &sparse_alpha(m2, level, &chi));
        let (l0, mid) = sparse_transfer(m1, level, &chi);
        let (l2, rhs) = (l0 + m2.window() - 1, sparse_alpha(m2, l0, &mid));
        let top = l1.max(l2);
        if sparse_embed(l1, &lhs, top) != sparse_embed(l2, &rhs, top) {
            return Ok(CommuteDecision {
                commute: false,
                level,
                witness: Some(Word::from_index(w, level).to_string()),
            });
        }
    }
    Ok(CommuteDecision {
        commute: true,
        level,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2poly::{poly_gcd, Gf2Poly};
    use proptest::prelude::*;

    fn lin(s: &str) -> WindowMap {
        WindowMap::from_poly(s.parse().unwrap()).unwrap()
    }

    fn chi(s: &str) -> CylinderFunction {
        CylinderFunction::indicator(&s.parse().unwrap())
    }

    fn ints(f: &CylinderFunction) -> Vec<QuadScalar> {
        f.values().to_vec()
    }

    fn q(n: i128, d: i128) -> QuadScalar {
        QuadScalar::from_ratio(n, d)
    }

    /// Every progressive map with window at most `max`.
    fn progressive_maps(max: usize) -> Vec<WindowMap> {
        (1..=max)
            .flat_map(|n| {
                (0u64..1 << (1 << n)).filter_map(move |mask| {
                    let rule: Vec<bool> = (0..1 << n).map(|i| mask >> i & 1 == 1).collect();
                    let m = WindowMap::from_rule(n, rule);
                    m.is_progressive().then_some(m)
                })
            })
            .collect()
    }

    #[test]
    fn alpha_examples() {
        let z = QuadScalar::zero();
        let o = QuadScalar::one();
        assert_eq!(ints(&alpha(&WindowMap::shift(), &chi("1"))), [z, o, z, o]);
        assert_eq!(ints(&alpha(&lin("1+t"), &chi("1"))), [z, o, o, z]);
        let m = lin("1+t+t^3");
        assert!(alpha(&m, &CylinderFunction::one()).equivalent(&CylinderFunction::one()));
    }

    #[test]
    fn transfer_examples() {
        let s = WindowMap::shift();
        let l = transfer(&s, &chi("1")).unwrap();
        assert_eq!((l.level(), ints(&l)), (0, vec![q(1, 2)]));
        assert_eq!(ints(&transfer(&lin("1+t"), &chi("11")).unwrap()), [q(1, 2), q(0, 1)]);
        for m in progressive_maps(3) {
            let one = transfer(&m, &CylinderFunction::one()).unwrap();
            assert!(one.equivalent(&CylinderFunction::one()));
        }
        let not_prog = WindowMap::from_rule(2, vec![false, false, true, true]);
        assert_eq!(transfer(&not_prog, &chi("1")), Err(Error::NotProgressive));
    }

    #[test]
    fn inner_product_examples() {
        let s = WindowMap::shift();
        let one = CylinderFunction::one();
        assert!(inner_product(&s, &one, &one).unwrap().equivalent(&one));
        let half = CylinderFunction::constant(q(1, 2));
        assert!(inner_product(&s, &chi("1"), &chi("1")).unwrap().equivalent(&half));
        let frame = standard_frame(&s).unwrap();
        let [a, b] = frame.elements() else { panic!() };
        assert!(inner_product(&s, a, b).unwrap().is_zero());
    }

    #[test]
    fn standard_frame_examples() {
        let f = standard_frame(&WindowMap::shift()).unwrap();
        let r2 = QuadScalar::sqrt2();
        assert_eq!(f.elements(), [chi("0").scale(r2), chi("1").scale(r2)]);
        let f3 = standard_frame(&lin("1+t^2")).unwrap();
        assert_eq!(f3.len(), 4);
        assert!(f3.elements().iter().all(|e| e.values().iter().all(|v| v.is_zero() || *v == QuadScalar::from_int(2))));
        assert!(f.reconstruct(&chi("1")).unwrap().equivalent(&chi("1")));
    }

    #[test]
    fn standard_frames_are_parseval_and_orthonormal() {
        for m in progressive_maps(3) {
            let frame = standard_frame(&m).unwrap();
            frame.verify().unwrap();
            for level in 0..=6 {
                for w in 0..1usize << level {
                    let f = CylinderFunction::basis(w, level);
                    assert!(frame.reconstruct(&f).unwrap().equivalent(&f));
                }
            }
            for (i, a) in frame.elements().iter().enumerate() {
                for (j, b) in frame.elements().iter().enumerate() {
                    let ip = inner_product(&m, a, b).unwrap();
                    let expected = if i == j { QuadScalar::one() } else { QuadScalar::zero() };
                    assert!(ip.equivalent(&CylinderFunction::constant(expected)));
                }
            }
        }
    }

    #[test]
    fn refine_examples() {
        let s = WindowMap::shift();
        let fs = standard_frame(&s).unwrap();
        let ss = refine_frame(&fs, &fs).unwrap();
        let two = QuadScalar::from_int(2);
        let expected: Vec<_> = ["00", "01", "10", "11"].iter().map(|w| chi(w).scale(two)).collect();
        assert_eq!(ss.elements(), expected);
        assert_eq!(ss.elements(), standard_frame(&s.then(&s)).unwrap().elements());

        let led = standard_frame(&lin("1+t")).unwrap();
        let r = refine_frame(&fs, &led).unwrap();
        assert_eq!((r.len(), r.map().window()), (4, 3));
        for w in 0..1usize << 5 {
            let f = CylinderFunction::basis(w, 5);
            assert!(r.reconstruct(&f).unwrap().equivalent(&f));
        }

        let trivial = standard_frame(&WindowMap::identity()).unwrap();
        assert_eq!(trivial.elements(), [CylinderFunction::one()]);
        assert_eq!(refine_frame(&led, &trivial).unwrap().elements(), led.elements());
    }

    #[test]
    fn refined_frames_reconstruct() {
        let maps = [WindowMap::shift(), lin("1+t"), lin("1+t^2"), lin("1+t+t^2")];
        for a in &maps {
            for b in &maps {
                let r = refine_frame(&standard_frame(a).unwrap(), &standard_frame(b).unwrap()).unwrap();
                for level in [0, 3, 6] {
                    for w in 0..1usize << level {
                        let f = CylinderFunction::basis(w, level);
                        assert!(r.reconstruct(&f).unwrap().equivalent(&f));
                    }
                }
            }
        }
    }

    #[test]
    fn bad_frame_is_rejected() {
        let s = WindowMap::shift();
        let r = Frame::new(s.clone(), vec![chi("0").scale(QuadScalar::sqrt2())]);
        assert!(matches!(r, Err(Error::NotAFrame { .. })));
        let fine = Frame::new(s, vec![CylinderFunction::constant(QuadScalar::sqrt2()).mul(&chi("0")), chi("1").scale(QuadScalar::sqrt2())]);
        assert!(fine.is_ok());
    }

    #[test]
    fn operator_commute_examples() {
        let s = WindowMap::shift();
        assert!(operator_commute_check(&s, &lin("1+t"), 6).unwrap().commute);
        let d = operator_commute_check(&s, &s, 3).unwrap();
        assert!(!d.commute);
        assert_eq!(d.witness.as_deref(), Some("000"));
        let d = operator_commute_check(&s, &s, 1).unwrap();
        assert_eq!(d.witness.as_deref(), Some("0"));
        assert!(operator_commute_check(&lin("1+t^2"), &lin("1+t+t^2"), 6).unwrap().commute);
    }

    #[test]
    fn sparse_check_matches_dense_operators() {
        let maps = [WindowMap::shift(), lin("1+t"), lin("t^2"), lin("1+t^2")];
        for a in &maps {
            for b in &maps {
                let d = operator_commute_check(a, b, 4).unwrap();
                let dense = (0..16).find(|&w| {
                    let f = CylinderFunction::basis(w, 4);
                    let lhs = transfer(a, &alpha(b, &f)).unwrap();
                    let rhs = alpha(b, &transfer(a, &f).unwrap());
                    !lhs.equivalent(&rhs)
                });
                assert_eq!(d.witness, dense.map(|w| Word::from_index(w, 4).to_string()));
            }
        }
    }

    #[test]
    fn operator_commutation_is_coprimality() {
        let polys: Vec<Gf2Poly> = (0..=3).flat_map(Gf2Poly::all_of_degree).collect();
        for &a in &polys {
            for &b in &polys {
                let d = operator_commute_check(
                    &WindowMap::from_poly(a).unwrap(),
                    &WindowMap::from_poly(b).unwrap(),
                    6,
                )
                .unwrap();
                assert_eq!(d.commute, poly_gcd(a, b) == Gf2Poly::ONE, "{a}, {b}");
            }
        }
    }

    #[test]
    fn transfer_operator_axiom() {
        // basis functions of lower levels are sums of these, and both
        // operators commute with embeddings
        for m in progressive_maps(3) {
            for fw in 0..16 {
                let f = CylinderFunction::basis(fw, 4);
                let af = alpha(&m, &f);
                for gw in 0..64 {
                    let g = CylinderFunction::basis(gw, 6);
                    let lhs = transfer(&m, &af.mul(&g)).unwrap();
                    let rhs = f.mul(&transfer(&m, &g).unwrap());
                    assert!(lhs.equivalent(&rhs));
                }
            }
        }
    }

    #[test]
    fn expectation_is_idempotent_and_fibrewise_constant() {
        for m in progressive_maps(3) {
            for level in 0..=6 {
                for w in 0..1usize << level {
                    let f = CylinderFunction::basis(w, level);
                    let e = expectation(&m, &f).unwrap();
                    assert!(expectation(&m, &e).unwrap().equivalent(&e));
                    let e = e.embed(e.level().max(m.window() - 1));
                    for x in 0..1usize << e.level() {
                        for y in 0..x {
                            let (lx, ly) = (m.apply_index(x, e.level()), m.apply_index(y, e.level()));
                            if lx == ly {
                                assert_eq!(e.value_index(x), e.value_index(y));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let f = chi("01").scale(QuadScalar::sqrt2()).add(&CylinderFunction::constant(q(1, 2)));
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["level"], 2);
        assert_eq!(v["values"][1], "1/2+1√2");
        let back: CylinderFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<CylinderFunction>(r#"{"level":1,"values":["0"]}"#).is_err());
    }

    fn cylinder(max_level: usize) -> impl Strategy<Value = CylinderFunction> {
        (0..=max_level).prop_flat_map(|level| {
            prop::collection::vec((-4i128..5, -2i128..3), 1 << level).prop_map(move |v| {
                let values = v
                    .into_iter()
                    .map(|(a, b)| QuadScalar::new(Rational::from_integer(a), Rational::new(b, 2)))
                    .collect();
                CylinderFunction::new(level, values).unwrap()
            })
        })
    }

    fn any_progressive() -> impl Strategy<Value = WindowMap> {
        prop::sample::select(progressive_maps(3))
    }

    proptest! {
        #[test]
        fn embedding_naturality(f in cylinder(4), m in any_progressive(), extra in 0usize..3) {
            let g = f.embed(f.level() + extra);
            prop_assert_eq!(g.restrict(f.level()).unwrap(), f.clone());
            prop_assert!(alpha(&m, &g).equivalent(&alpha(&m, &f)));
            prop_assert!(transfer(&m, &g).unwrap().equivalent(&transfer(&m, &f).unwrap()));
            prop_assert!(g.reduced().level() <= f.level());
        }

        #[test]
        fn reconstruction_of_random_functions(f in cylinder(5), m in any_progressive()) {
            let frame = standard_frame(&m).unwrap();
            prop_assert!(frame.reconstruct(&f).unwrap().equivalent(&f));
        }
    }
}
