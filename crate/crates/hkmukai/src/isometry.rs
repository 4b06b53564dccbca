//! Isometries of rational quadratic spaces: reflections, B-fields, Eichler
//! transvections, Cartan–Dieudonné decompositions, real spinor norms,
//! discriminant actions, lattice preservation, bounded subgroup generation
//! and constructive transport of primitive vectors by transvections.
//!
//! Matrices act on column vectors: `g(x) = M x`.  Spaces with the extended
//! Mukai layout have basis order `(α, H², β)` with `b(α,β) = -1`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    dot, frac, rat, rat_int, unit_vec, vec_add, vec_is_zero, vec_neg, vec_scale, vec_sub,
    RatMatrix, RatVector, Rational,
};
use crate::lattice::{
    discriminant_group, divisibility, is_primitive, orthogonal_complement, DiscGroup, QuadLattice,
};

/// Largest word length accepted by [`generate_bounded`].
pub const GENERATION_DEPTH_CAP: usize = 12;
/// Largest number of elements produced by [`generate_bounded`].
pub const GENERATION_SIZE_CAP: usize = 200_000;

/// Exact isometry of a rational quadratic space.
#[derive(Clone, Debug)]
pub struct Isometry {
    gram: Arc<RatMatrix>,
    matrix: RatMatrix,
    det: Rational,
    spinor: OnceLock<i8>,
    word: Option<Vec<String>>,
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.gram == other.gram
    }
}

impl Eq for Isometry {}

impl Isometry {
    /// Wraps a matrix after checking `Mᵀ G M = G`.
    pub fn new(gram: Arc<RatMatrix>, matrix: RatMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != gram.rows() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, space has dimension {}",
                matrix.rows(),
                matrix.cols(),
                gram.rows()
            )));
        }
        if matrix.transpose().mul(&gram).mul(&matrix) != *gram {
            return Err(Error::Invalid(
                "matrix does not preserve the quadratic form".into(),
            ));
        }
        let det = matrix.det();
        if det.abs() != rat(1) {
            return Err(Error::Degenerate("isometry of a degenerate space".into()));
        }
        Ok(Isometry {
            gram,
            matrix,
            det,
            spinor: OnceLock::new(),
            word: None,
        })
    }

    pub fn identity(gram: Arc<RatMatrix>) -> Self {
        let n = gram.rows();
        Self::new(gram, RatMatrix::identity(n)).expect("identity is an isometry")
    }

    pub fn minus_identity(gram: Arc<RatMatrix>) -> Self {
        let n = gram.rows();
        Self::new(gram, RatMatrix::identity(n).neg()).expect("-id is an isometry")
    }

    /// Attaches a generator word.
    pub fn with_word(mut self, word: Vec<String>) -> Self {
        self.word = Some(word);
        self
    }

    pub fn word(&self) -> Option<&[String]> {
        self.word.as_deref()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn gram(&self) -> &Arc<RatMatrix> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Determinant, `+1` or `-1`.
    pub fn det(&self) -> i8 {
        if self.det.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn apply(&self, v: &[Rational]) -> RatVector {
        self.matrix.mul_vec(v)
    }

    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.gram.bilinear(x, y)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.gram != other.gram {
            return Err(Error::Dimension(
                "isometries act on different spaces".into(),
            ));
        }
        let mut out = Isometry::new(self.gram.clone(), self.matrix.mul(&other.matrix))?;
        if let (Some(a), Some(b)) = (&other.word, &self.word) {
            out.word = Some(a.iter().chain(b.iter()).cloned().collect());
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Isometry {
        // g⁻¹ = G⁻¹ gᵀ G for an isometry of a nondegenerate form.
        let ginv = self.gram.inverse().expect("nondegenerate space");
        let m = ginv.mul(&self.matrix.transpose()).mul(&self.gram);
        Isometry::new(self.gram.clone(), m).expect("inverse of an isometry")
    }

    /// `-self`.
    pub fn negate(&self) -> Isometry {
        Isometry::new(self.gram.clone(), self.matrix.neg()).expect("negation preserves the form")
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Isometry {
        let mut out = Isometry::identity(self.gram.clone());
        for _ in 0..k {
            out = out.compose(self).expect("same space");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Vectors `v_1, …, v_k` with `self = s_{v_1} ∘ … ∘ s_{v_k}`.
    pub fn cartan_dieudonne(&self) -> Vec<RatVector> {
        cartan_dieudonne_with_basis(
            self,
            &orthogonal_basis(&self.gram).expect("nondegenerate space"),
        )
    }

    /// Real spinor norm with the convention `spin(s_v) = +1` iff `b(v,v) < 0`.
    pub fn spinor_norm(&self) -> i8 {
        *self.spinor.get_or_init(|| {
            let vs = self.cartan_dieudonne();
            spinor_from_vectors(&self.gram, &vs)
        })
    }

    /// True when `g(L) = L`.
    pub fn preserves_lattice(&self, l: &QuadLattice) -> Result<bool> {
        Ok(self.lattice_witness(l)?.is_none())
    }

    /// A basis vector of `L` whose image under `g` or `g⁻¹` leaves `L`.
    pub fn lattice_witness(&self, l: &QuadLattice) -> Result<Option<LatticeWitness>> {
        if l.ambient_dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "lattice lives in dimension {}, isometry in {}",
                l.ambient_dim(),
                self.dim()
            )));
        }
        let inv = self.inverse();
        for (g, direction) in [(self, Direction::Forward), (&inv, Direction::Inverse)] {
            for i in 0..l.rank() {
                let b = l.basis_vector(i);
                let img = g.apply(&b);
                if !l.contains(&img) {
                    return Ok(Some(LatticeWitness {
                        direction,
                        vector: b,
                        image: img,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Induced action on the discriminant group of `L`.
    pub fn disc_action(&self, l: &QuadLattice) -> Result<DiscAction> {
        if !self.preserves_lattice(l)? {
            return Err(Error::Invalid(
                "isometry does not preserve the lattice".into(),
            ));
        }
        let disc = discriminant_group(l)?;
        Ok(self.disc_action_with(l, &disc))
    }

    /// [`Isometry::disc_action`] with a precomputed discriminant group.
    pub fn disc_action_with(&self, l: &QuadLattice, disc: &DiscGroup) -> DiscAction {
        let mut is_id = true;
        let mut is_minus = true;
        let mut witness = None;
        for x in &disc.generators {
            let gx = self.apply(x);
            let plus_ok = l.contains(&vec_sub(&gx, x));
            let minus_ok = l.contains(&vec_add(&gx, x));
            if !plus_ok {
                is_id = false;
            }
            if !minus_ok {
                is_minus = false;
            }
            if !plus_ok && !minus_ok && witness.is_none() {
                witness = Some(x.clone());
            }
        }
        let kind = if is_id {
            DiscKind::Identity
        } else if is_minus {
            DiscKind::MinusIdentity
        } else {
            DiscKind::Other
        };
        if kind == DiscKind::Other && witness.is_none() {
            witness = disc.generators.first().cloned();
        }
        DiscAction {
            kind,
            witness: if kind == DiscKind::Other {
                witness
            } else {
                None
            },
        }
    }
}

/// Which of `g`, `g⁻¹` moved a basis vector out of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Evidence that an isometry does not preserve a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeWitness {
    pub direction: Direction,
    pub vector: RatVector,
    pub image: RatVector,
}

/// Classification of an induced discriminant action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiscKind {
    Identity,
    MinusIdentity,
    Other,
}

impl DiscKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiscKind::Identity => "identity",
            DiscKind::MinusIdentity => "minus_identity",
            DiscKind::Other => "other",
        }
    }
}

/// Induced action on `A(L)` with a witness generator when it is neither `±id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscAction {
    pub kind: DiscKind,
    pub witness: Option<RatVector>,
}

/// Reflection `x ↦ x - 2 b(x,v)/b(v,v) v`.
pub fn reflection(gram: &Arc<RatMatrix>, v: &[Rational]) -> Result<Isometry> {
    let q = gram.bilinear(v, v);
    if q.is_zero() {
        return Err(Error::Isotropic(
            "reflection along an isotropic vector".into(),
        ));
    }
    let n = gram.rows();
    let gv = gram.mul_vec(v);
    let c = rat(2) / q;
    let mut m = RatMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let x = m.get(i, j) - &c * &v[i] * &gv[j];
            m.set(i, j, x);
        }
    }
    Isometry::new(gram.clone(), m)
}

/// Checks the extended Mukai layout `(α, H², β)` of a Gram matrix.
pub fn check_mukai_layout(gram: &RatMatrix) -> Result<()> {
    let n = gram.rows();
    let ok = n >= 2
        && gram.get(0, n - 1) == &rat(-1)
        && gram.get(0, 0).is_zero()
        && gram.get(n - 1, n - 1).is_zero()
        && (1..n - 1).all(|i| gram.get(0, i).is_zero() && gram.get(n - 1, i).is_zero());
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(
            "space does not have the (α, H², β) layout".into(),
        ))
    }
}

/// B-field `B_λ(rα + μ + sβ) = rα + μ + rλ + (s + b(λ,μ) + r b(λ,λ)/2)β`.
pub fn b_field(gram: &Arc<RatMatrix>, lambda: &[Rational]) -> Result<Isometry> {
    check_mukai_layout(gram)?;
    let n = gram.rows();
    if lambda.len() != n {
        return Err(Error::Dimension("λ has the wrong length".into()));
    }
    if !lambda[0].is_zero() || !lambda[n - 1].is_zero() {
        return Err(Error::Invalid("λ has α or β components".into()));
    }
    let q = gram.bilinear(lambda, lambda);
    let gl = gram.mul_vec(lambda);
    let mut m = RatMatrix::identity(n);
    // Column 0: image of α.
    for i in 1..n - 1 {
        m.set(i, 0, lambda[i].clone());
    }
    m.set(n - 1, 0, q / rat(2));
    // Columns of H²: μ ↦ μ + b(λ,μ)β.
    for j in 1..n - 1 {
        m.set(n - 1, j, gl[j].clone());
    }
    Isometry::new(gram.clone(), m)
}

/// Eichler transvection `t(e,a)(v) = v - b(a,v)e + b(e,v)a - ½ b(a,a) b(e,v) e`.
pub fn eichler_transvection(
    gram: &Arc<RatMatrix>,
    e: &[Rational],
    a: &[Rational],
) -> Result<Isometry> {
    if !gram.bilinear(e, e).is_zero() {
        return Err(Error::Invalid("transvection needs an isotropic e".into()));
    }
    if !gram.bilinear(e, a).is_zero() {
        return Err(Error::Invalid("transvection needs a ⟂ e".into()));
    }
    let n = gram.rows();
    let ge = gram.mul_vec(e);
    let ga = gram.mul_vec(a);
    let half_q = gram.bilinear(a, a) / rat(2);
    let mut m = RatMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            // Column j is the image of the basis vector e_j.
            let x = m.get(i, j) - &ga[j] * &e[i] + &ge[j] * &a[i] - &half_q * &ge[j] * &e[i];
            m.set(i, j, x);
        }
    }
    Isometry::new(gram.clone(), m)
}

/// Pairwise orthogonal anisotropic basis of a nondegenerate space, chosen
/// deterministically from the standard basis.
pub fn orthogonal_basis(gram: &RatMatrix) -> Result<Vec<RatVector>> {
    let n = gram.rows();
    let mut pool: Vec<RatVector> = (0..n).map(|i| unit_vec(n, i)).collect();
    let mut out = Vec::with_capacity(n);
    while !pool.is_empty() {
        let idx = pool.iter().position(|w| !gram.bilinear(w, w).is_zero());
        let u = match idx {
            Some(i) => pool.remove(i),
            None => {
                let pair = (0..pool.len())
                    .flat_map(|i| (i + 1..pool.len()).map(move |j| (i, j)))
                    .find(|&(i, j)| !gram.bilinear(&pool[i], &pool[j]).is_zero());
                let Some((i, j)) = pair else {
                    return Err(Error::Degenerate(
                        "orthogonal basis of a degenerate space".into(),
                    ));
                };
                let u = vec_add(&pool[i], &pool[j]);
                pool.remove(i);
                u
            }
        };
        let qu = gram.bilinear(&u, &u);
        let gu = gram.mul_vec(&u);
        for w in pool.iter_mut() {
            let c = dot(w, &gu) / &qu;
            if !c.is_zero() {
                *w = vec_sub(w, &vec_scale(&c, &u));
            }
        }
        out.push(u);
    }
    Ok(out)
}

/// Cartan–Dieudonné decomposition relative to a given orthogonal basis.
pub fn cartan_dieudonne_with_basis(g: &Isometry, basis: &[RatVector]) -> Vec<RatVector> {
    let gram = g.gram().clone();
    let mut h = g.matrix().clone();
    let mut out = Vec::new();
    let reflect = |h: &RatMatrix, w: &RatVector| -> RatMatrix {
        // s_w h = h - (2/q(w)) w (wᵀ G h)
        let q = gram.bilinear(w, w);
        let row = gram.mul_vec(w);
        let wt_g_h: RatVector = (0..h.cols()).map(|j| dot(&row, &h.col(j))).collect();
        let c = rat(2) / q;
        let mut out = h.clone();
        for i in 0..h.rows() {
            if w[i].is_zero() {
                continue;
            }
            for j in 0..h.cols() {
                let x = out.get(i, j) - &c * &w[i] * &wt_g_h[j];
                out.set(i, j, x);
            }
        }
        out
    };
    for u in basis {
        let hu = h.mul_vec(u);
        let w = vec_sub(&hu, u);
        if vec_is_zero(&w) {
            continue;
        }
        if !gram.bilinear(&w, &w).is_zero() {
            h = reflect(&h, &w);
            out.push(w);
        } else {
            // Isotropic difference: s_u ∘ s_{h(u)+u} sends h(u) to u.
            let w2 = vec_add(&hu, u);
            h = reflect(&h, &w2);
            h = reflect(&h, u);
            out.push(w2);
            out.push(u.clone());
        }
    }
    debug_assert!(h.is_identity());
    out
}

/// Product of `sign(-b(v,v))` over the vectors.
pub fn spinor_from_vectors(gram: &RatMatrix, vs: &[RatVector]) -> i8 {
    let negatives = vs
        .iter()
        .filter(|v| gram.bilinear(v, v).is_positive())
        .count();
    if negatives % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Composes reflections `s_{v_1} ∘ … ∘ s_{v_k}`.
pub fn compose_reflections(gram: &Arc<RatMatrix>, vs: &[RatVector]) -> Result<Isometry> {
    let mut out = Isometry::identity(gram.clone());
    for v in vs {
        out = out.compose(&reflection(gram, v)?)?;
    }
    Ok(out)
}

/// An element of a bounded enumeration together with its word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordElement {
    pub word: Vec<usize>,
    pub iso: Isometry,
}

/// All distinct products of at most `depth` generators (including the empty
/// product), sorted by shortest word then matrix.
pub fn generate_bounded(gens: &[Isometry], depth: usize) -> Result<Vec<WordElement>> {
    if depth > GENERATION_DEPTH_CAP {
        return Err(Error::CapExceeded(format!(
            "depth {depth} exceeds the cap {GENERATION_DEPTH_CAP}"
        )));
    }
    let Some(first) = gens.first() else {
        return Err(Error::Invalid("no generators".into()));
    };
    if gens.iter().any(|g| g.gram != first.gram) {
        return Err(Error::Dimension(
            "generators act on different spaces".into(),
        ));
    }
    let id = Isometry::identity(first.gram.clone());
    let mut seen: BTreeMap<RatMatrix, Vec<usize>> = BTreeMap::new();
    seen.insert(id.matrix.clone(), vec![]);
    let mut frontier: VecDeque<(Vec<usize>, Isometry)> = VecDeque::from([(vec![], id)]);
    for _ in 0..depth {
        let mut next = VecDeque::new();
        while let Some((word, g)) = frontier.pop_front() {
            for (k, s) in gens.iter().enumerate() {
                let h = s.compose(&g)?;
                if seen.contains_key(&h.matrix) {
                    continue;
                }
                let mut w = word.clone();
                w.push(k);
                seen.insert(h.matrix.clone(), w.clone());
                if seen.len() > GENERATION_SIZE_CAP {
                    return Err(Error::CapExceeded(format!(
                        "more than {GENERATION_SIZE_CAP} elements"
                    )));
                }
                next.push_back((w, h));
            }
        }
        frontier = next;
    }
    let mut out: Vec<WordElement> = seen
        .into_iter()
        .map(|(m, word)| WordElement {
            iso: Isometry::new(first.gram.clone(), m).expect("product of isometries"),
            word,
        })
        .collect();
    out.sort_by(|a, b| {
        (a.word.len(), &a.word, a.iso.matrix()).cmp(&(b.word.len(), &b.word, b.iso.matrix()))
    });
    Ok(out)
}

/// A single Eichler transvection `t(e, a)` in a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transvection {
    pub e: RatVector,
    pub a: RatVector,
}

impl Transvection {
    pub fn apply(&self, gram: &RatMatrix, v: &[Rational]) -> RatVector {
        let bav = gram.bilinear(&self.a, v);
        let bev = gram.bilinear(&self.e, v);
        let qa = gram.bilinear(&self.a, &self.a);
        let coeff_e = -bav - &qa * &bev / rat(2);
        vec_add(
            &vec_add(v, &vec_scale(&coeff_e, &self.e)),
            &vec_scale(&bev, &self.a),
        )
    }

    pub fn inverse(&self) -> Transvection {
        Transvection {
            e: self.e.clone(),
            a: vec_neg(&self.a),
        }
    }

    pub fn isometry(&self, gram: &Arc<RatMatrix>) -> Result<Isometry> {
        eichler_transvection(gram, &self.e, &self.a)
    }
}

/// Why [`eichler_transport`] refused a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportFailure {
    Square,
    Primitivity,
    DiscClass,
}

impl TransportFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransportFailure::Square => "square",
            TransportFailure::Primitivity => "primitivity",
            TransportFailure::DiscClass => "disc class",
        }
    }
}

/// Outcome of [`eichler_transport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transport {
    /// Transvections in order of application.
    Word(Vec<Transvection>),
    NotFound(TransportFailure),
}

/// An even lattice with two distinguished orthogonal hyperbolic planes
/// `⟨e, f⟩` and `⟨e1, f1⟩` (`b(e,f) = b(e1,f1) = 1`, all four isotropic).
#[derive(Clone, Debug)]
pub struct EichlerFrame {
    lattice: QuadLattice,
    e: RatVector,
    f: RatVector,
    e1: RatVector,
    f1: RatVector,
    rest: QuadLattice,
    rest_disc: DiscGroup,
    disc: DiscGroup,
}

impl EichlerFrame {
    pub fn new(
        lattice: QuadLattice,
        plane: (RatVector, RatVector),
        plane1: (RatVector, RatVector),
    ) -> Result<Self> {
        let (e, f) = plane;
        let (e1, f1) = plane1;
        let vs = [&e, &f, &e1, &f1];
        for v in vs {
            if !lattice.contains(v) {
                return Err(Error::OutsideLattice(
                    "frame vector outside the lattice".into(),
                ));
            }
            if !lattice.pair(v, v).is_zero() {
                return Err(Error::Invalid("frame vectors must be isotropic".into()));
            }
        }
        let one = rat(1);
        if lattice.pair(&e, &f) != one || lattice.pair(&e1, &f1) != one {
            return Err(Error::Invalid(
                "frame planes must satisfy b(e,f) = 1".into(),
            ));
        }
        for x in [&e, &f] {
            for y in [&e1, &f1] {
                if !lattice.pair(x, y).is_zero() {
                    return Err(Error::Invalid("frame planes must be orthogonal".into()));
                }
            }
        }
        let rest =
            orthogonal_complement(&lattice, &[e.clone(), f.clone(), e1.clone(), f1.clone()])?;
        let rest_disc = discriminant_group(&rest)?;
        let disc = discriminant_group(&lattice)?;
        Ok(EichlerFrame {
            lattice,
            e,
            f,
            e1,
            f1,
            rest,
            rest_disc,
            disc,
        })
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    /// The four isotropic frame vectors `(e, f, e1, f1)`.
    pub fn frame(&self) -> [&RatVector; 4] {
        [&self.e, &self.f, &self.e1, &self.f1]
    }

    /// Complement of the two planes.
    pub fn rest(&self) -> &QuadLattice {
        &self.rest
    }

    /// Class of `v / div(v)` in the discriminant group, with the divisibility.
    pub fn class(&self, v: &[Rational]) -> Result<(BigInt, Vec<BigInt>)> {
        let d = divisibility(&self.lattice, v)?;
        let x = vec_scale(&(Rational::one() / rat_int(d.clone())), v);
        Ok((d, self.disc.class_of(&self.lattice, &x)?))
    }

    fn gram(&self) -> &RatMatrix {
        self.lattice.ambient_gram()
    }

    fn push(&self, word: &mut Vec<Transvection>, v: &mut RatVector, e: &RatVector, a: RatVector) {
        if vec_is_zero(&a) {
            return;
        }
        let t = Transvection { e: e.clone(), a };
        *v = t.apply(self.gram(), v);
        word.push(t);
    }

    /// Hyperbolic coordinates `[[a, -a1], [b1, b]]` of `v`.
    fn block(&self, v: &[Rational]) -> [[BigInt; 2]; 2] {
        let p = |x: &RatVector| self.lattice.pair(v, x).numer().clone();
        let a = p(&self.f);
        let b = p(&self.e);
        let a1 = p(&self.f1);
        let b1 = p(&self.e1);
        [[a, -a1], [b1, b]]
    }

    fn elementary(&self, op: Op, k: &BigInt, word: &mut Vec<Transvection>, v: &mut RatVector) {
        if k.is_zero() {
            return;
        }
        let kq = rat_int(k.clone());
        match op {
            Op::Row01 => self.push(word, v, &self.e.clone(), vec_scale(&kq, &self.e1)),
            Op::Row10 => self.push(word, v, &self.f1.clone(), vec_scale(&kq, &self.f)),
            Op::Col01 => self.push(word, v, &self.f.clone(), vec_scale(&kq, &self.e1)),
            Op::Col10 => self.push(word, v, &self.f1.clone(), vec_scale(&kq, &self.e)),
        }
    }

    /// Reduces the hyperbolic block of `v` to `diag(g, h)` with `0 < g | h`
    /// (or the zero block).
    fn reduce_block(&self, word: &mut Vec<Transvection>, v: &mut RatVector) {
        for _ in 0..10_000 {
            let p = self.block(v);
            if !p[1][0].is_zero() {
                // Euclid on column 0 with row operations.
                if p[0][0].is_zero() {
                    if !p[0][1].is_zero() && p[0][1].abs() <= p[1][0].abs() {
                        self.elementary(Op::Col10, &-p[0][1].signum(), word, v);
                    } else {
                        self.elementary(Op::Row01, &-p[1][0].signum(), word, v);
                    }
                    continue;
                }
                let q = p[1][0].div_floor(&p[0][0]);
                if !q.is_zero() {
                    self.elementary(Op::Row10, &q, word, v);
                    continue;
                }
                let q = p[0][0].div_floor(&p[1][0]);
                self.elementary(Op::Row01, &q, word, v);
                continue;
            }
            if !p[0][1].is_zero() {
                // Euclid on row 0 with column operations.
                if p[0][0].is_zero() {
                    self.elementary(Op::Col10, &-p[0][1].signum(), word, v);
                    continue;
                }
                let q = p[0][1].div_floor(&p[0][0]);
                if !q.is_zero() {
                    self.elementary(Op::Col01, &q, word, v);
                    continue;
                }
                let q = p[0][0].div_floor(&p[0][1]);
                self.elementary(Op::Col10, &q, word, v);
                continue;
            }
            // Diagonal block.
            let (g, h) = (&p[0][0], &p[1][1]);
            if g.is_zero() {
                if h.is_zero() {
                    return;
                }
                // Move h into the top-left corner.
                self.elementary(Op::Row01, &-h.signum(), word, v);
                continue;
            }
            if !(h % g).is_zero() {
                self.elementary(Op::Row01, &BigInt::from(-1), word, v);
                continue;
            }
            if g.is_negative() {
                // -I = L(-1) Lo(1) L(-2) Lo(1) L(-1) in SL2(Z).
                for (op, k) in [
                    (Op::Row01, 1),
                    (Op::Row10, -1),
                    (Op::Row01, 2),
                    (Op::Row10, -1),
                    (Op::Row01, 1),
                ] {
                    self.elementary(op, &BigInt::from(k), word, v);
                }
                continue;
            }
            return;
        }
        unreachable!("block reduction did not terminate");
    }

    /// Transvection word carrying `v` to its normal form, and the normal form.
    pub fn normalize(&self, v: &[Rational]) -> Result<(Vec<Transvection>, RatVector)> {
        let mut v = v.to_vec();
        let mut word = Vec::new();
        self.reduce_block(&mut word, &mut v);
        // Fold the divisibility of the complement part into the second plane.
        let m = self.rest_component(&v);
        if !vec_is_zero(&m) {
            let pairings: Vec<BigInt> = (0..self.rest.rank())
                .map(|i| {
                    self.rest
                        .pair(&m, &self.rest.basis_vector(i))
                        .numer()
                        .clone()
                })
                .collect();
            let coeffs = bezout(&pairings);
            let x = self.rest.vector(
                &coeffs
                    .iter()
                    .map(|c| rat_int(c.clone()))
                    .collect::<Vec<_>>(),
            );
            self.push(&mut word, &mut v, &self.e1.clone(), x);
            self.reduce_block(&mut word, &mut v);
        }
        let p = self.block(&v);
        let d = p[0][0].clone();
        if d.is_zero() {
            return Err(Error::Invalid(
                "normal form of a vector orthogonal to both planes".into(),
            ));
        }
        // Replace the complement part y by d·r for the canonical class representative r.
        let y = self.rest_component(&v);
        let dq = rat_int(d.clone());
        let y_over_d = vec_scale(&(Rational::one() / &dq), &y);
        let class = self.rest_disc.class_of(&self.rest, &y_over_d)?;
        let r = self.rest_disc.representative(&class);
        let z = vec_sub(&y_over_d, &r);
        if !self.rest.contains(&z) {
            return Err(Error::Invalid(
                "complement part is not a dual vector".into(),
            ));
        }
        self.push(&mut word, &mut v, &self.f.clone(), vec_neg(&z));
        Ok((word, v))
    }

    /// Component of `v` orthogonal to both hyperbolic planes.
    fn rest_component(&self, v: &[Rational]) -> RatVector {
        let mut y = v.to_vec();
        for (x, dual) in [
            (&self.e, &self.f),
            (&self.f, &self.e),
            (&self.e1, &self.f1),
            (&self.f1, &self.e1),
        ] {
            let c = self.lattice.pair(v, dual);
            y = vec_sub(&y, &vec_scale(&c, x));
        }
        y
    }
}

#[derive(Clone, Copy)]
enum Op {
    /// row0 -= k row1
    Row01,
    /// row1 -= k row0
    Row10,
    /// col1 -= k col0
    Col01,
    /// col0 -= k col1
    Col10,
}

/// Integer coefficients `c` with `Σ c_i x_i = gcd(x)`.
fn bezout(xs: &[BigInt]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); xs.len()];
    let mut g = BigInt::zero();
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let ext = g.extended_gcd(x);
        for c in coeffs.iter_mut().take(i) {
            *c *= &ext.x;
        }
        coeffs[i] = ext.y;
        g = ext.gcd;
    }
    if g.is_negative() {
        for c in coeffs.iter_mut() {
            *c = -c.clone();
        }
    }
    coeffs
}

/// Word of transvections carrying `v` to `w`, or the reason none is sought.
pub fn eichler_transport(
    frame: &EichlerFrame,
    v: &[Rational],
    w: &[Rational],
) -> Result<Transport> {
    let l = frame.lattice();
    if l.pair(v, v) != l.pair(w, w) {
        return Ok(Transport::NotFound(TransportFailure::Square));
    }
    if !is_primitive(l, v)? || !is_primitive(l, w)? {
        return Ok(Transport::NotFound(TransportFailure::Primitivity));
    }
    if frame.class(v)? != frame.class(w)? {
        return Ok(Transport::NotFound(TransportFailure::DiscClass));
    }
    if v == w {
        return Ok(Transport::Word(vec![]));
    }
    let (wv, nv) = frame.normalize(v)?;
    let (ww, nw) = frame.normalize(w)?;
    if nv != nw {
        return Err(Error::Invalid(
            "normal forms disagree for vectors with equal invariants".into(),
        ));
    }
    let mut word = wv;
    word.extend(ww.iter().rev().map(Transvection::inverse));
    let word = cancel_inverse_pairs(word);
    let gram = l.ambient_gram();
    let mut x = v.to_vec();
    for t in &word {
        x = t.apply(gram, &x);
    }
    if x != w {
        return Err(Error::Invalid("transport word failed verification".into()));
    }
    Ok(Transport::Word(word))
}

fn cancel_inverse_pairs(word: Vec<Transvection>) -> Vec<Transvection> {
    let mut out: Vec<Transvection> = Vec::with_capacity(word.len());
    for t in word {
        if out
            .last()
            .is_some_and(|s| s.e == t.e && s.a == vec_neg(&t.a))
        {
            out.pop();
        } else {
            out.push(t);
        }
    }
    out
}

/// `1/2` as a rational, shared by callers building half-integral vectors.
pub fn half() -> Rational {
    frac(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_vec;
    use crate::lattice::{mukai_gram, u_gram};

    fn toy_space() -> Arc<RatMatrix> {
        // (α, U, ⟨-2⟩, β)
        let h = RatMatrix::block_diag(&[&u_gram(), &RatMatrix::from_i64(&[vec![-2]])]);
        Arc::new(mukai_gram(&h))
    }

    #[test]
    fn reflection_basics() {
        let g = toy_space();
        let v = rat_vec(&[1, 0, 0, 0, 1]);
        let s = reflection(&g, &v).unwrap();
        assert_eq!(s.apply(&v), vec_neg(&v));
        assert_eq!(s.det(), -1);
        assert!(s.compose(&s).unwrap().is_identity());
        assert!(reflection(&g, &rat_vec(&[1, 0, 0, 0, 0])).is_err());
        assert_eq!(s.spinor_norm(), 1);
    }

    #[test]
    fn b_field_additive() {
        let g = toy_space();
        let l = rat_vec(&[0, 1, 2, 1, 0]);
        let m = rat_vec(&[0, -3, 1, 2, 0]);
        let bl = b_field(&g, &l).unwrap();
        let bm = b_field(&g, &m).unwrap();
        assert_eq!(
            bl.compose(&bm).unwrap(),
            b_field(&g, &vec_add(&l, &m)).unwrap()
        );
        assert!(b_field(&g, &rat_vec(&[0; 5])).unwrap().is_identity());
        assert!(b_field(&g, &rat_vec(&[1, 0, 0, 0, 0])).is_err());
    }

    #[test]
    fn transvection_matches_b_field() {
        let g = toy_space();
        let lambda = rat_vec(&[0, 1, 1, 1, 0]);
        let minus_beta = rat_vec(&[0, 0, 0, 0, -1]);
        let t = eichler_transvection(&g, &minus_beta, &lambda).unwrap();
        assert_eq!(t, b_field(&g, &lambda).unwrap());
        assert_eq!(t.det(), 1);
        assert_eq!(t.spinor_norm(), 1);
        assert!(eichler_transvection(&g, &minus_beta, &rat_vec(&[0; 5]))
            .unwrap()
            .is_identity());
    }

    #[test]
    fn cartan_dieudonne_recomposes() {
        let g = toy_space();
        let t = b_field(&g, &rat_vec(&[0, 2, -1, 1, 0])).unwrap();
        let vs = t.cartan_dieudonne();
        assert_eq!(compose_reflections(&g, &vs).unwrap(), t);
        assert!(Isometry::identity(g.clone()).cartan_dieudonne().is_empty());
        let m = Isometry::minus_identity(g.clone());
        assert_eq!(compose_reflections(&g, &m.cartan_dieudonne()).unwrap(), m);
    }

    #[test]
    fn generation_examples() {
        let g = toy_space();
        let m = Isometry::minus_identity(g.clone());
        let set = generate_bounded(&[m], 2).unwrap();
        assert_eq!(set.len(), 2);
        let d = rat_vec(&[0, 0, 0, 1, 0]);
        let bd = b_field(&g, &d).unwrap();
        let set = generate_bounded(&[bd], 3).unwrap();
        assert_eq!(set.len(), 4);
        for (k, el) in set.iter().enumerate() {
            assert_eq!(el.iso, b_field(&g, &vec_scale(&rat(k as i64), &d)).unwrap());
        }
        assert!(generate_bounded(&[Isometry::identity(g)], GENERATION_DEPTH_CAP + 1).is_err());
    }

    #[test]
    fn bezout_coefficients() {
        let xs: Vec<BigInt> = [12, -18, 8].iter().map(|&x| BigInt::from(x)).collect();
        let c = bezout(&xs);
        let s: BigInt = c.iter().zip(&xs).map(|(a, b)| a * b).sum();
        assert_eq!(s, BigInt::from(2));
    }
}
