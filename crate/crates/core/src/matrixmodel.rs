//! Finite-level matrices for the isometries `S_p` and multiplication
//! operators `M_f`, with exact checks of the defining relations.
//!
//! Level `k` means the Hilbert space with orthonormal basis `ξ_w`,
//! `w ∈ X_k`. `S_p` maps level `k` to level `k + n_p - 1` by
//! `S_p ξ_x = N_p^{-1/2} Σ_{θ_p(y) = x} ξ_y`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cylinder::{alpha, standard_frame, transfer, CylinderFunction, Frame};
use crate::dictionary::WindowMap;
use crate::error::{Error, Result};
use crate::gf2poly::{recurrence_kernel, Gf2Poly};
use crate::scalar::{QuadScalar, Rational};
use crate::starcomm::{certify_system, DynamicalSystem, MonoidElement};
use crate::word::{PeriodicSeq, Word};

/// `a + b√2` with integer `a, b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ZSqrt2 {
    pub a: i64,
    pub b: i64,
}

impl ZSqrt2 {
    pub const ZERO: ZSqrt2 = ZSqrt2 { a: 0, b: 0 };
    pub const ONE: ZSqrt2 = ZSqrt2 { a: 1, b: 0 };

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn times_sqrt2(self) -> Self {
        ZSqrt2 {
            a: 2 * self.b,
            b: self.a,
        }
    }

    /// Divisible by √2 in `Z[√2]` exactly when `a` is even.
    fn divisible_by_sqrt2(self) -> bool {
        self.a % 2 == 0
    }

    fn div_sqrt2(self) -> Self {
        ZSqrt2 {
            a: self.b,
            b: self.a / 2,
        }
    }

    pub fn to_quad(self) -> QuadScalar {
        QuadScalar::new(
            Rational::from_integer(self.a as i128),
            Rational::from_integer(self.b as i128),
        )
    }
}

impl Add for ZSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ZSqrt2 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Neg for ZSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        ZSqrt2 {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Mul for ZSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ZSqrt2 {
            a: self.a * o.a + 2 * self.b * o.b,
            b: self.a * o.b + self.b * o.a,
        }
    }
}

impl fmt::Display for ZSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.b {
            0 => write!(f, "{}", self.a),
            b if b < 0 => write!(f, "{}-{}√2", self.a, -b),
            b => write!(f, "{}+{}√2", self.a, b),
        }
    }
}

/// A linear map from level `source_level` to level `target_level`, stored
/// as `2^{scale/2}` times an integer matrix over `Z[√2]`. Only nonzero
/// entries are kept, keyed by `(row, col)`.
///
/// The form is kept normalized: the scale is raised while every entry is
/// divisible by √2, and the zero map has scale 0. Normalized forms are
/// unique, so derived equality is equality of operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelOperator {
    source_level: usize,
    target_level: usize,
    scale: i32,
    entries: BTreeMap<(usize, usize), ZSqrt2>,
}

impl LevelOperator {
    fn from_parts(
        source_level: usize,
        target_level: usize,
        scale: i32,
        mut entries: BTreeMap<(usize, usize), ZSqrt2>,
    ) -> Self {
        entries.retain(|_, e| !e.is_zero());
        let mut op = LevelOperator {
            source_level,
            target_level,
            scale,
            entries,
        };
        op.normalize();
        op
    }

    fn normalize(&mut self) {
        if self.entries.is_empty() {
            self.scale = 0;
            return;
        }
        while self.entries.values().all(|e| e.divisible_by_sqrt2()) {
            self.entries.values_mut().for_each(|e| *e = e.div_sqrt2());
            self.scale += 1;
        }
    }

    pub fn zero(source_level: usize, target_level: usize) -> Self {
        LevelOperator {
            source_level,
            target_level,
            scale: 0,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(level: usize) -> Self {
        let entries = (0..1usize << level).map(|i| ((i, i), ZSqrt2::ONE)).collect();
        Self::from_parts(level, level, 0, entries)
    }

    /// Exact conversion of a row-major matrix of scalars; every rational
    /// component must have a power-of-two denominator.
    pub fn from_values(source_level: usize, target_level: usize, values: &[QuadScalar]) -> Result<Self> {
        assert_eq!(values.len(), (1 << source_level) << target_level);
        let cols = 1usize << source_level;
        let nonzero = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| ((k / cols, k % cols), *v));
        Self::from_sparse(source_level, target_level, nonzero)
    }

    fn from_sparse(
        source_level: usize,
        target_level: usize,
        values: impl Iterator<Item = ((usize, usize), QuadScalar)>,
    ) -> Result<Self> {
        let values: Vec<_> = values.collect();
        let mut d = 0u32;
        for (_, v) in &values {
            for r in [v.a, v.b] {
                let den = *r.denom();
                if den.count_ones() != 1 {
                    return Err(Error::NotDyadic(v.to_string()));
                }
                d = d.max(den.trailing_zeros());
            }
        }
        let lift = Rational::from_integer(1i128 << d);
        let int = |r: Rational| -> Result<i64> {
            (r * lift)
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::NotDyadic(r.to_string()))
        };
        let entries = values
            .into_iter()
            .map(|(rc, v)| Ok((rc, ZSqrt2 { a: int(v.a)?, b: int(v.b)? })))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::from_parts(source_level, target_level, -2 * d as i32, entries))
    }

    /// The multiplication operator `M_f` on level `level`.
    pub fn multiplication(f: &CylinderFunction, level: usize) -> Result<Self> {
        if level < f.level() {
            return Err(Error::LevelTooSmall {
                level,
                need: f.level(),
            });
        }
        let d = level - f.level();
        let diag = f
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .flat_map(|(w, &v)| ((w << d)..((w + 1) << d)).map(move |i| ((i, i), v)));
        Self::from_sparse(level, level, diag)
    }

    pub fn source_level(&self) -> usize {
        self.source_level
    }

    pub fn target_level(&self) -> usize {
        self.target_level
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn rows(&self) -> usize {
        1 << self.target_level
    }

    pub fn cols(&self) -> usize {
        1 << self.source_level
    }

    pub fn nonzero_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn raw_entry(&self, row: usize, col: usize) -> ZSqrt2 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn entry(&self, row: usize, col: usize) -> QuadScalar {
        self.raw_entry(row, col).to_quad() * QuadScalar::sqrt_pow2(self.scale)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        LevelOperator {
            source_level: self.target_level,
            target_level: self.source_level,
            scale: self.scale,
            entries: self.entries.iter().map(|(&(r, c), &e)| ((c, r), e)).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LevelOperator) -> Result<Self> {
        if self.source_level != other.target_level {
            return Err(Error::LevelMismatch {
                expected: self.source_level,
                got: other.target_level,
            });
        }
        let mut other_rows: HashMap<usize, Vec<(usize, ZSqrt2)>> = HashMap::new();
        for (&(k, j), &y) in &other.entries {
            other_rows.entry(k).or_default().push((j, y));
        }
        let mut entries: BTreeMap<(usize, usize), ZSqrt2> = BTreeMap::new();
        for (&(i, k), &x) in &self.entries {
            for &(j, y) in other_rows.get(&k).map_or(&[][..], Vec::as_slice) {
                let e = entries.entry((i, j)).or_default();
                *e = *e + x * y;
            }
        }
        Ok(Self::from_parts(
            other.source_level,
            self.target_level,
            self.scale + other.scale,
            entries,
        ))
    }

    fn check_shape(&self, other: &LevelOperator) -> Result<()> {
        for (a, b) in [
            (self.source_level, other.source_level),
            (self.target_level, other.target_level),
        ] {
            if a != b {
                return Err(Error::LevelMismatch { expected: a, got: b });
            }
        }
        Ok(())
    }

    fn rescaled(&self, scale: i32) -> BTreeMap<(usize, usize), ZSqrt2> {
        let mut entries = self.entries.clone();
        for _ in scale..self.scale {
            entries.values_mut().for_each(|e| *e = e.times_sqrt2());
        }
        entries
    }

    pub fn add(&self, other: &LevelOperator) -> Result<Self> {
        self.check_shape(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let scale = self.scale.min(other.scale);
        let mut entries = self.rescaled(scale);
        for (rc, y) in other.rescaled(scale) {
            let e = entries.entry(rc).or_default();
            *e = *e + y;
        }
        Ok(Self::from_parts(self.source_level, self.target_level, scale, entries))
    }

    pub fn sub(&self, other: &LevelOperator) -> Result<Self> {
        let mut neg = other.clone();
        neg.entries.values_mut().for_each(|e| *e = -*e);
        self.add(&neg)
    }

    /// First entry (row-major) where the two operators differ.
    pub fn first_difference(&self, other: &LevelOperator) -> Result<Option<EntryWitness>> {
        self.check_shape(other)?;
        if self == other {
            return Ok(None);
        }
        let diff = self.sub(other)?;
        Ok(diff.entries.keys().next().map(|&(row, col)| EntryWitness {
            row: Word::from_index(row, self.target_level).to_string(),
            col: Word::from_index(col, self.source_level).to_string(),
            lhs: self.entry(row, col),
            rhs: other.entry(row, col),
        }))
    }

    pub fn diagonal(&self) -> Vec<QuadScalar> {
        (0..self.rows().min(self.cols())).map(|i| self.entry(i, i)).collect()
    }

    /// `src tgt scale; e_11 e_12 …` with all row-major `Z[√2]` entries; the
    /// operator is `2^{scale/2}` times the listed matrix.
    pub fn to_text(&self) -> String {
        let mut body = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                body.push(self.raw_entry(r, c).to_string());
            }
        }
        format!(
            "{} {} {}; {}",
            self.source_level,
            self.target_level,
            self.scale,
            body.join(" ")
        )
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("operator text: {what}"));
        let (head, body) = s.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let [src, tgt, scale] = head[..] else {
            return Err(bad("expected three header fields"));
        };
        let src: usize = src.parse().map_err(|_| bad("source level"))?;
        let tgt: usize = tgt.parse().map_err(|_| bad("target level"))?;
        let scale: i32 = scale.parse().map_err(|_| bad("scale"))?;
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != (1 << src) << tgt {
            return Err(bad("wrong number of entries"));
        }
        let cols = 1usize << src;
        let mut entries = BTreeMap::new();
        for (k, t) in tokens.into_iter().enumerate() {
            let q: QuadScalar = t.parse()?;
            let int = |r: Rational| r.is_integer().then(|| r.to_integer().to_i64()).flatten();
            match (int(q.a), int(q.b)) {
                (Some(a), Some(b)) => entries.insert((k / cols, k % cols), ZSqrt2 { a, b }),
                _ => return Err(bad("entries must lie in Z[√2]")),
            };
        }
        Ok(Self::from_parts(src, tgt, scale, entries))
    }
}

/// `S` for the window map `m` with source level `k`.
pub fn isometry_matrix(m: &WindowMap, k: usize) -> Result<LevelOperator> {
    if !m.is_progressive() {
        return Err(Error::NotProgressive);
    }
    if k == 0 {
        return Err(Error::LevelTooSmall { level: 0, need: 1 });
    }
    let n = m.window();
    let entries = (0..1usize << k)
        .flat_map(|x| m.preimages_index(x, k).into_iter().map(move |y| ((y, x), ZSqrt2::ONE)))
        .collect();
    Ok(LevelOperator::from_parts(k, k + n - 1, -(n as i32 - 1), entries))
}

/// The isometric embedding `ξ_w ↦ 2^{-1/2}(ξ_{w0} + ξ_{w1})` from level `k`
/// into level `k + d`, iterated `d` times.
pub fn cylinder_embedding(k: usize, d: usize) -> LevelOperator {
    let entries = (0..1usize << k)
        .flat_map(|x| ((x << d)..((x + 1) << d)).map(move |y| ((y, x), ZSqrt2::ONE)))
        .collect();
    LevelOperator::from_parts(k, k + d, -(d as i32), entries)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryWitness {
    pub row: String,
    pub col: String,
    pub lhs: QuadScalar,
    pub rhs: QuadScalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub pass: bool,
    pub checks: usize,
    /// Where the first failure occurred, e.g. `generator 1, f = χ_[0101]`.
    pub context: Option<String>,
    pub witness: Option<EntryWitness>,
}

impl RelationCheck {
    fn new() -> Self {
        RelationCheck {
            pass: true,
            checks: 0,
            context: None,
            witness: None,
        }
    }

    fn record(&mut self, lhs: &LevelOperator, rhs: &LevelOperator, context: impl FnOnce() -> String) -> Result<()> {
        self.checks += 1;
        if let Some(w) = lhs.first_difference(rhs)? {
            if self.pass {
                self.pass = false;
                self.context = Some(context());
                self.witness = Some(w);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsometryCheck {
    pub generator: String,
    pub source_level: usize,
    /// `S*S = 1`.
    pub isometry: bool,
    /// `SS* ≠ 1`.
    pub proper: bool,
    pub range_rank_deficiency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub generators: Vec<String>,
    pub level: usize,
    /// `S_p M_f = M_{α_p f} S_p`, `f` over the basis of level `k`.
    pub relation_i: RelationCheck,
    /// `S_p* M_f S_p = M_{L_p f}`, `f` over the basis of level `k + n_p - 1`.
    pub relation_ii: RelationCheck,
    /// `S_p* S_q = S_q S_p*` on level `k`, for every ordered pair `p ≠ q`.
    pub relation_iii: RelationCheck,
    /// `Σ_w M_{ν_w} S_p S_p* M_{ν_w} = 1` on level `k`.
    pub relation_iv: RelationCheck,
    pub frame_independence: RelationCheck,
    pub orthonormal_matrix_units: RelationCheck,
    /// `S_p S_q = S_{pq}` for generator pairs.
    pub monoid_representation: RelationCheck,
    pub isometries: Vec<IsometryCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        [
            &self.relation_i,
            &self.relation_ii,
            &self.relation_iii,
            &self.relation_iv,
            &self.frame_independence,
            &self.orthonormal_matrix_units,
            &self.monoid_representation,
        ]
        .iter()
        .all(|c| c.pass)
            && self.isometries.iter().all(|i| i.isometry)
    }
}

/// Minimum level accepted by [`verify_relations`].
pub fn required_level(sys: &DynamicalSystem) -> usize {
    (0..sys.rank())
        .map(|i| sys.generator_map(i).window())
        .max()
        .unwrap_or(1)
        + 2
}

/// `Σ_ν M_ν S S* M_ν` on level `k`, with `S` for the frame's map.
fn frame_sum(frame: &Frame, k: usize) -> Result<LevelOperator> {
    let m = frame.map();
    let s = isometry_matrix(m, k + 1 - m.window())?;
    let ss = s.compose(&s.adjoint())?;
    let mut acc = LevelOperator::zero(k, k);
    for nu in frame.elements() {
        let mn = LevelOperator::multiplication(nu, k)?;
        acc = acc.add(&mn.compose(&ss)?.compose(&mn)?)?;
    }
    Ok(acc)
}

/// The frame `{√N·χ_[w] : w ∈ X_n}`, one symbol longer than the standard
/// prefix cover.
fn finer_prefix_frame(m: &WindowMap) -> Result<Frame> {
    let k = m.window();
    let root = QuadScalar::sqrt_pow2(k as i32 - 1);
    let elements = (0..1usize << k)
        .map(|w| CylinderFunction::basis(w, k).scale(root))
        .collect();
    Frame::new(m.clone(), elements)
}

/// Checks the relations of the generators at level `k` with exact
/// arithmetic. Level alignment is stated per relation on the report fields.
pub fn verify_relations(sys: &DynamicalSystem, k: usize) -> Result<RelationReport> {
    let need = required_level(sys);
    if k < need {
        return Err(Error::LevelTooSmall { level: k, need });
    }
    let maps: Vec<WindowMap> = (0..sys.rank()).map(|i| sys.generator_map(i)).collect();
    let names = sys.names();
    let mut report = RelationReport {
        generators: names.to_vec(),
        level: k,
        relation_i: RelationCheck::new(),
        relation_ii: RelationCheck::new(),
        relation_iii: RelationCheck::new(),
        relation_iv: RelationCheck::new(),
        frame_independence: RelationCheck::new(),
        orthonormal_matrix_units: RelationCheck::new(),
        monoid_representation: RelationCheck::new(),
        isometries: Vec::new(),
    };

    for (i, m) in maps.iter().enumerate() {
        let n = m.window();
        let s = isometry_matrix(m, k)?;
        let s_adj = s.adjoint();
        let sts = s_adj.compose(&s)?;
        let sst = s.compose(&s_adj)?;
        let top = k + n - 1;
        report.isometries.push(IsometryCheck {
            generator: names[i].clone(),
            source_level: k,
            isometry: sts == LevelOperator::identity(k),
            proper: sst != LevelOperator::identity(top),
            range_rank_deficiency: (1 << top) - (1 << k),
        });

        for w in 0..1usize << k {
            let f = CylinderFunction::basis(w, k);
            let lhs = s.compose(&LevelOperator::multiplication(&f, k)?)?;
            let rhs = LevelOperator::multiplication(&alpha(m, &f), top)?.compose(&s)?;
            report.relation_i.record(&lhs, &rhs, || {
                format!("generator {}, f = χ_[{}]", names[i], Word::from_index(w, k))
            })?;
        }
        for w in 0..1usize << top {
            let f = CylinderFunction::basis(w, top);
            let lhs = s_adj.compose(&LevelOperator::multiplication(&f, top)?)?.compose(&s)?;
            let rhs = LevelOperator::multiplication(&transfer(m, &f)?, k)?;
            report.relation_ii.record(&lhs, &rhs, || {
                format!("generator {}, f = χ_[{}]", names[i], Word::from_index(w, top))
            })?;
        }

        let frame = standard_frame(m)?;
        let sum = frame_sum(&frame, k)?;
        report.relation_iv.record(&sum, &LevelOperator::identity(k), || {
            format!("generator {}", names[i])
        })?;
        let finer = frame_sum(&finer_prefix_frame(m)?, k)?;
        report.frame_independence.record(&finer, &sum, || {
            format!("generator {}, prefix cover of length {n}", names[i])
        })?;
        check_matrix_units(&mut report.orthonormal_matrix_units, &frame, k, &names[i])?;
    }

    for (i, mp) in maps.iter().enumerate() {
        for (j, mq) in maps.iter().enumerate() {
            if i == j {
                continue;
            }
            // S_p* S_q and S_q S_p*, both from level k to k + n_q - n_p
            let (np, nq) = (mp.window(), mq.window());
            let sq = isometry_matrix(mq, k)?;
            let sp_top = isometry_matrix(mp, k + nq - np)?;
            let lhs = sp_top.adjoint().compose(&sq)?;
            let sp_low = isometry_matrix(mp, k + 1 - np)?;
            let rhs = isometry_matrix(mq, k + 1 - np)?.compose(&sp_low.adjoint())?;
            report.relation_iii.record(&lhs, &rhs, || {
                format!("p = {}, q = {}", names[i], names[j])
            })?;

            if i < j {
                let composite = mp.then(mq);
                let level = k.max(composite.window());
                let fp = standard_frame(mp)?;
                let fq = standard_frame(mq)?;
                let refined = crate::cylinder::refine_frame(&fp, &fq)?;
                let direct = frame_sum(&standard_frame(&composite)?, level)?;
                report.frame_independence.record(&frame_sum(&refined, level)?, &direct, || {
                    format!("refined frame of {} then {} at level {level}", names[i], names[j])
                })?;

                let lhs = isometry_matrix(mp, k + nq - 1)?.compose(&sq)?;
                let rhs = isometry_matrix(&composite, k)?;
                report.monoid_representation.record(&lhs, &rhs, || {
                    format!("S_{} S_{}", names[i], names[j])
                })?;
            }
        }
    }
    Ok(report)
}

/// `Θ_{a,b} = M_{ν_a} S S* M_{ν_b}`: `Θ_{a,b} Θ_{c,d} = δ_{bc} Θ_{a,d}`,
/// `Θ_{a,b}* = Θ_{b,a}` and `Σ_a Θ_{a,a} = 1`.
fn check_matrix_units(check: &mut RelationCheck, frame: &Frame, k: usize, name: &str) -> Result<()> {
    let m = frame.map();
    let s = isometry_matrix(m, k + 1 - m.window())?;
    let ss = s.compose(&s.adjoint())?;
    let mults = frame
        .elements()
        .iter()
        .map(|nu| LevelOperator::multiplication(nu, k))
        .collect::<Result<Vec<_>>>()?;
    let r = mults.len();
    let theta: Vec<Vec<LevelOperator>> = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| mults[a].compose(&ss)?.compose(&mults[b]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let zero = LevelOperator::zero(k, k);
    let mut diag = zero.clone();
    for a in 0..r {
        diag = diag.add(&theta[a][a])?;
        for b in 0..r {
            check.record(&theta[a][b].adjoint(), &theta[b][a], || {
                format!("generator {name}, adjoint of Θ_{a},{b}")
            })?;
            for c in 0..r {
                for d in 0..r {
                    let lhs = theta[a][b].compose(&theta[c][d])?;
                    let rhs = if b == c { &theta[a][d] } else { &zero };
                    check.record(&lhs, rhs, || {
                        format!("generator {name}, Θ_{a},{b} Θ_{c},{d}")
                    })?;
                }
            }
        }
    }
    check.record(&diag, &LevelOperator::identity(k), || {
        format!("generator {name}, Σ Θ_a,a")
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub level: usize,
    /// Level of the square operator whose diagonal is reported.
    pub operator_level: usize,
    /// Diagonal of `M_f S_p S_q* M_g`, indexed by words of `operator_level`.
    pub diagonal: Vec<QuadScalar>,
    /// Words of length `level` with some extension where the diagonal
    /// differs from `δ_{pq} N_p^{-1} f g`.
    pub defect: Vec<String>,
    /// `f_p + f_q`.
    pub difference: Gf2Poly,
    /// For `f = g = 1`: the defect is empty when `p = q`, and otherwise
    /// equals the level-`level` truncation of `ker(f_p + f_q)`.
    pub matches_kernel: bool,
}

/// Words of length `level` that are prefixes of solutions of `d(σ)x = 0`.
pub fn truncated_kernel(d: Gf2Poly, level: usize) -> Result<Vec<Word>> {
    if d.is_zero() {
        return Ok(Word::all(level).collect());
    }
    let mut words: Vec<Word> = recurrence_kernel(d)?
        .iter()
        .map(|x: &PeriodicSeq| x.prefix(level))
        .collect();
    words.sort_by_key(Word::index);
    words.dedup();
    Ok(words)
}

/// Diagonal compression of `M_f S_p S_q* M_g`.
///
/// When the windows differ, `S_p* M_f ξ_u` and `S_q* M_g ξ_u` live on
/// different levels; the coarser one is carried to the finer level by
/// [`cylinder_embedding`] before the inner product. The operator acts on
/// level `k + n_max - 1`, and a level-`k` word is in the defect when one of
/// its extensions has a nonzero diagonal entry.
pub fn expectation_defect(
    p: &MonoidElement,
    q: &MonoidElement,
    sys: &DynamicalSystem,
    k: usize,
    f: &CylinderFunction,
    g: &CylinderFunction,
) -> Result<DefectReport> {
    let cert = certify_system(sys);
    if !cert.valid {
        return Err(Error::InvalidSystem("generators are not pairwise coprime".into()));
    }
    if k == 0 {
        return Err(Error::LevelTooSmall { level: 0, need: 1 });
    }
    let (mp, mq) = (sys.element_map(p), sys.element_map(q));
    let (np, nq) = (mp.window(), mq.window());
    let top = k + np.max(nq) - 1;
    if top < f.level().max(g.level()) {
        return Err(Error::LevelTooSmall {
            level: k,
            need: f.level().max(g.level()) + 1 - np.max(nq),
        });
    }
    let lift = |m: &WindowMap, h: &CylinderFunction| -> Result<LevelOperator> {
        let s_adj = isometry_matrix(m, top + 1 - m.window())?.adjoint();
        let x = s_adj.compose(&LevelOperator::multiplication(h, top)?)?;
        cylinder_embedding(top + 1 - m.window(), m.window() - np.min(nq)).compose(&x)
    };
    // ⟨ξ_u, M_f S_p S_q* M_g ξ_u⟩ = ⟨S_p* M_f ξ_u, S_q* M_g ξ_u⟩
    let op = lift(&mp, f)?.adjoint().compose(&lift(&mq, g)?)?;
    let diagonal = op.diagonal();

    // the identity to test: δ_{pq} N_p^{-1} f g
    let expected = if p == q {
        let inv = Rational::new(1, 1i128 << (np - 1));
        f.mul(g).embed(top).values().iter().map(|v| v.scale(inv)).collect()
    } else {
        vec![QuadScalar::zero(); diagonal.len()]
    };
    let shift = top - k;
    let mut defect: Vec<usize> = diagonal
        .iter()
        .zip(&expected)
        .enumerate()
        .filter(|(_, (v, e))| v != e)
        .map(|(u, _)| u >> shift)
        .collect();
    defect.dedup();
    let defect: Vec<Word> = defect.into_iter().map(|w| Word::from_index(w, k)).collect();

    let difference = sys.element_poly(p) + sys.element_poly(q);
    let matches_kernel = if p == q {
        defect.is_empty()
    } else {
        truncated_kernel(difference, k)? == defect
    };
    Ok(DefectReport {
        level: k,
        operator_level: top,
        diagonal,
        defect: defect.iter().map(ToString::to_string).collect(),
        difference,
        matches_kernel,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BumpCertificate {
    /// Prefix `u` of `x` with `θ_p([u])` and `θ_q([u])` disjoint.
    pub cylinder: String,
    /// Level on which `M_{χ_u} S_p S_q* M_{χ_u}` was checked to vanish.
    pub level: usize,
}

/// Default number of prefix lengths tried by [`annihilating_bump`].
pub const DEFAULT_BUMP_HORIZON: usize = 64;

/// Finds a prefix cylinder `[u]` of `x` with `χ_u S_p S_q* χ_u = 0`.
pub fn annihilating_bump(
    p: &MonoidElement,
    q: &MonoidElement,
    sys: &DynamicalSystem,
    x: &PeriodicSeq,
    horizon: usize,
) -> Result<BumpCertificate> {
    let (mp, mq) = (sys.element_map(p), sys.element_map(q));
    let (np, nq) = (mp.window(), mq.window());
    let n_max = np.max(nq);
    for m in n_max..=horizon {
        let u = x.prefix(m);
        let common = m + 1 - n_max;
        let img_p = Word::from_index(mp.apply_index(u.index(), m), m + 1 - np).prefix(common);
        let img_q = Word::from_index(mq.apply_index(u.index(), m), m + 1 - nq).prefix(common);
        if img_p == img_q {
            continue;
        }
        // S_p S_q*: level K → K - n_q + n_p with K = m + n_max - 1
        let level = m + n_max - 1;
        let chi = CylinderFunction::indicator(&u);
        let sq_adj = isometry_matrix(&mq, level + 1 - nq)?.adjoint();
        let sp = isometry_matrix(&mp, level + 1 - nq)?;
        let out = level + np - nq;
        let op = LevelOperator::multiplication(&chi, out)?
            .compose(&sp)?
            .compose(&sq_adj)?
            .compose(&LevelOperator::multiplication(&chi, level)?)?;
        assert!(op.is_zero(), "separated cylinder {u} must annihilate");
        return Ok(BumpCertificate {
            cylinder: u.to_string(),
            level,
        });
    }
    Err(Error::NoSeparation { horizon })
}
