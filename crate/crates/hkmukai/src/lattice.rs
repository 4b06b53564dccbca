//! Integral and rational quadratic lattices: standard constructors, duals and
//! discriminant groups, divisibility, primitivity and orthogonal complements.
//!
//! A [`QuadLattice`] is a basis (rows of a rational matrix) inside an ambient
//! rational quadratic space.  A lattice built directly from a Gram matrix is
//! its own ambient space with the identity basis.  Vectors passed to the
//! functions of this module are always in ambient coordinates.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    format_rational, integer_kernel_basis, is_integral, is_integral_vec, rat, rat_int,
    rational_gcd, row_lattice_basis, smith_normal_form, solve_linear, unit_vec, RatMatrix,
    RatVector, Rational,
};

/// Finite-rank lattice with a rational Gram matrix, embedded in an ambient
/// rational quadratic space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadLattice {
    name: Option<String>,
    gram: RatMatrix,
    basis: RatMatrix,
    ambient_gram: Arc<RatMatrix>,
    embedded: bool,
    /// `(basisᵀ)⁻¹` for full-rank lattices: maps ambient vectors to coordinates.
    coord_map: Option<Arc<RatMatrix>>,
}

impl QuadLattice {
    /// Lattice `Z^r` with the given symmetric Gram matrix.
    pub fn from_gram(gram: RatMatrix, name: Option<&str>) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::Invalid(
                "Gram matrix must be square and symmetric".into(),
            ));
        }
        let r = gram.rows();
        Ok(QuadLattice {
            name: name.map(str::to_owned),
            basis: RatMatrix::identity(r),
            ambient_gram: Arc::new(gram.clone()),
            gram,
            embedded: false,
            coord_map: Some(Arc::new(RatMatrix::identity(r))),
        })
    }

    /// Lattice spanned by the linearly independent rows of `basis` inside the
    /// ambient space with Gram matrix `ambient_gram`.
    pub fn from_basis(
        basis: RatMatrix,
        ambient_gram: Arc<RatMatrix>,
        name: Option<&str>,
    ) -> Result<Self> {
        if !ambient_gram.is_symmetric() {
            return Err(Error::Invalid(
                "ambient Gram matrix must be symmetric".into(),
            ));
        }
        if basis.cols() != ambient_gram.rows() {
            return Err(Error::Dimension(format!(
                "basis has {} columns, ambient space has dimension {}",
                basis.cols(),
                ambient_gram.rows()
            )));
        }
        if basis.rank() != basis.rows() {
            return Err(Error::Invalid(
                "basis vectors are linearly dependent".into(),
            ));
        }
        let gram = basis.mul(&ambient_gram).mul(&basis.transpose());
        let coord_map = if basis.rows() == basis.cols() {
            basis.transpose().inverse().map(Arc::new)
        } else {
            None
        };
        Ok(QuadLattice {
            name: name.map(str::to_owned),
            gram,
            basis,
            ambient_gram,
            embedded: true,
            coord_map,
        })
    }

    /// Lattice generated (over Z) by the rows of `gens`, which may be dependent.
    pub fn from_generators(
        gens: &RatMatrix,
        ambient_gram: Arc<RatMatrix>,
        name: Option<&str>,
    ) -> Result<Self> {
        Self::from_basis(row_lattice_basis(gens), ambient_gram, name)
    }

    /// Checks the stored Gram matrix against the pullback of the ambient form.
    pub fn check_invariants(&self) -> bool {
        self.gram.is_symmetric()
            && self
                .basis
                .mul(&self.ambient_gram)
                .mul(&self.basis.transpose())
                == self.gram
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Copy with a new label.
    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_owned());
        self
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    /// Basis vectors as rows, in ambient coordinates.
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn ambient_gram(&self) -> &Arc<RatMatrix> {
        &self.ambient_gram
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_gram.rows()
    }

    /// True when the lattice was built from an explicit embedding.
    pub fn is_embedded(&self) -> bool {
        self.embedded
    }

    /// Ambient pairing.
    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.ambient_gram.bilinear(x, y)
    }

    /// Ambient vector with the given lattice coordinates.
    pub fn vector(&self, coords: &[Rational]) -> RatVector {
        self.basis.transpose().mul_vec(coords)
    }

    /// `i`-th basis vector in ambient coordinates.
    pub fn basis_vector(&self, i: usize) -> RatVector {
        self.basis.row(i)
    }

    /// Rational coordinates of an ambient vector, or `None` outside the span.
    pub fn rational_coords(&self, v: &[Rational]) -> Option<RatVector> {
        if v.len() != self.ambient_dim() {
            return None;
        }
        match &self.coord_map {
            Some(m) => Some(m.mul_vec(v)),
            None => solve_linear(&self.basis.transpose(), v),
        }
    }

    /// Integral coordinates when `v` lies in the lattice.
    pub fn coords(&self, v: &[Rational]) -> Option<RatVector> {
        self.rational_coords(v).filter(|c| is_integral_vec(c))
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coords(v).is_some()
    }

    /// Same subset of the ambient space.
    pub fn same_set(&self, other: &QuadLattice) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.rank() == other.rank()
            && (0..self.rank()).all(|i| other.contains(&self.basis_vector(i)))
            && (0..other.rank()).all(|i| self.contains(&other.basis_vector(i)))
    }

    /// True when `other` is a subset of `self`.
    pub fn contains_lattice(&self, other: &QuadLattice) -> bool {
        (0..other.rank()).all(|i| self.contains(&other.basis_vector(i)))
    }

    /// Index `[self : other]` for a full-rank sublattice `other`.
    pub fn index_of(&self, other: &QuadLattice) -> Option<Rational> {
        if !self.contains_lattice(other) || other.rank() != self.rank() {
            return None;
        }
        let rows = (0..other.rank())
            .map(|i| self.coords(&other.basis_vector(i)).expect("contained"))
            .collect();
        Some(RatMatrix::from_rows(rows).ok()?.det().abs())
    }

    pub fn det(&self) -> Rational {
        self.gram.det()
    }

    pub fn is_integral(&self) -> bool {
        self.gram.is_integral()
    }

    /// Integral with even diagonal.
    pub fn is_even(&self) -> bool {
        self.is_integral() && (0..self.rank()).all(|i| self.gram.get(i, i).numer().is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.det().abs().is_one()
    }

    /// Signature `(positive, negative)` and nullity.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature(&self.gram)
    }

    /// The lattice with basis scaled by `k`.
    pub fn scaled_basis(&self, k: &Rational) -> Result<Self> {
        Self::from_basis(self.basis.scale(k), self.ambient_gram.clone(), None)
    }

    /// Sublattice generated by `self` and `other` (same ambient space).
    pub fn sum(&self, other: &QuadLattice) -> Result<Self> {
        if self.ambient_gram != other.ambient_gram {
            return Err(Error::Dimension(
                "lattices live in different ambient spaces".into(),
            ));
        }
        let mut rows = self.basis.to_rows();
        rows.extend(other.basis.to_rows());
        let gens = RatMatrix::from_rows_with_cols(rows, self.ambient_dim())?;
        Self::from_generators(&gens, self.ambient_gram.clone(), None)
    }

    /// Orthogonal direct sum of standalone lattices (Gram matrices only).
    pub fn direct_sum(parts: &[&QuadLattice], name: Option<&str>) -> Result<Self> {
        let grams: Vec<&RatMatrix> = parts.iter().map(|l| &l.gram).collect();
        Self::from_gram(RatMatrix::block_diag(&grams), name)
    }
}

/// Signature `(positive, negative, zero)` of a symmetric rational matrix,
/// computed by symmetric Gaussian elimination (Sylvester inertia).
pub fn signature(gram: &RatMatrix) -> (usize, usize, usize) {
    let n = gram.rows();
    let mut a: Vec<Vec<Rational>> = gram.to_rows();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        let piv = (k..n).find(|&i| !a[i][i].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => {
                let off = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = off else { break };
                // Congruence: row_i += row_j, col_i += col_j gives a_ii = 2 a_ij.
                for c in 0..n {
                    let x = a[j][c].clone();
                    a[i][c] += x;
                }
                for r in 0..n {
                    let x = a[r][j].clone();
                    a[r][i] += x;
                }
                i
            }
        };
        a.swap(k, piv);
        for row in a.iter_mut() {
            row.swap(k, piv);
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let x = &f * &a[k][j];
                a[i][j] -= x;
            }
        }
        for j in k + 1..n {
            a[k][j] = Rational::zero();
        }
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

/// Names accepted by [`standard_lattice`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardName {
    U,
    E8Minus,
    K3,
    A1(i64),
    MukaiK3,
}

impl std::str::FromStr for StandardName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(StandardName::U),
            "E8_minus" | "E8(-1)" => Ok(StandardName::E8Minus),
            "K3" => Ok(StandardName::K3),
            "MukaiK3" => Ok(StandardName::MukaiK3),
            _ => {
                let inner = s
                    .strip_prefix("A1(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::UnknownName(s.to_owned()))?;
                let k: i64 = inner
                    .trim()
                    .parse()
                    .map_err(|_| Error::UnknownName(s.to_owned()))?;
                Ok(StandardName::A1(k))
            }
        }
    }
}

/// Negated Cartan matrix of E8 in Bourbaki node order: the chain
/// 1-3-4-5-6-7-8 with node 2 attached to node 4.
pub fn e8_minus_gram() -> RatMatrix {
    let edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
    let mut m = vec![vec![0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = -2;
    }
    for (a, b) in edges {
        m[a - 1][b - 1] = 1;
        m[b - 1][a - 1] = 1;
    }
    RatMatrix::from_i64(&m)
}

/// Gram matrix of the hyperbolic plane `U`.
pub fn u_gram() -> RatMatrix {
    RatMatrix::from_i64(&[vec![0, 1], vec![1, 0]])
}

/// Gram matrix of the K3 lattice `U^3 ⊕ E8(-1)^2` in that block order.
pub fn k3_gram() -> RatMatrix {
    let u = u_gram();
    let e = e8_minus_gram();
    RatMatrix::block_diag(&[&u, &u, &u, &e, &e])
}

/// Standard lattices.
///
/// `MukaiK3` has basis order `(r, K3 basis, s)` with the Mukai pairing
/// `<(r,c,s),(r',c',s')> = c.c' - r s' - r' s`, an orthogonal sum of a
/// hyperbolic plane and the K3 lattice.
pub fn standard_lattice(name: &StandardName) -> Result<QuadLattice> {
    match name {
        StandardName::U => QuadLattice::from_gram(u_gram(), Some("U")),
        StandardName::E8Minus => QuadLattice::from_gram(e8_minus_gram(), Some("E8_minus")),
        StandardName::K3 => QuadLattice::from_gram(k3_gram(), Some("K3")),
        StandardName::A1(k) => {
            if *k == 0 {
                return Err(Error::Invalid("A1(k) requires k != 0".into()));
            }
            QuadLattice::from_gram(RatMatrix::from_i64(&[vec![*k]]), Some(&format!("A1({k})")))
        }
        StandardName::MukaiK3 => QuadLattice::from_gram(mukai_gram(&k3_gram()), Some("MukaiK3")),
    }
}

/// Gram matrix of `Qα ⊕ H ⊕ Qβ` with `b(α,β) = -1`, `α`, `β` isotropic and
/// orthogonal to `H`, basis order `(α, H basis, β)`.
pub fn mukai_gram(h: &RatMatrix) -> RatMatrix {
    let r = h.rows();
    let mut g = RatMatrix::zeros(r + 2, r + 2);
    for i in 0..r {
        for j in 0..r {
            g.set(i + 1, j + 1, h.get(i, j).clone());
        }
    }
    g.set(0, r + 1, rat(-1));
    g.set(r + 1, 0, rat(-1));
    g
}

/// Discriminant group `L^∨/L` of an even integral nondegenerate lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscGroup {
    /// Invariant factors greater than one.
    pub cyclic_orders: Vec<BigInt>,
    /// Generators of the cyclic factors, in ambient coordinates.
    pub generators: Vec<RatVector>,
    /// `q(gen)` reduced into `[0, 2)`.
    pub q_values: Vec<Rational>,
    /// Rows of the Smith transform selecting the nontrivial factors.
    class_rows: Vec<RatVector>,
}

impl DiscGroup {
    /// Order of the group.
    pub fn order(&self) -> BigInt {
        self.cyclic_orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.cyclic_orders.is_empty()
    }

    /// Class of a dual-lattice vector `x` (ambient coordinates) as residues
    /// modulo the cyclic orders.
    pub fn class_of(&self, lattice: &QuadLattice, x: &[Rational]) -> Result<Vec<BigInt>> {
        let pairings: RatVector = (0..lattice.rank())
            .map(|i| lattice.pair(x, &lattice.basis_vector(i)))
            .collect();
        if !is_integral_vec(&pairings) {
            return Err(Error::OutsideLattice(
                "vector is not in the dual lattice".into(),
            ));
        }
        Ok(self
            .class_rows
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(row, d)| {
                let c = crate::exact::dot(row, &pairings);
                c.numer().mod_floor(d)
            })
            .collect())
    }

    /// Ambient vector representing the class with the given residues.
    pub fn representative(&self, class: &[BigInt]) -> RatVector {
        let dim = self.generators.first().map_or(0, Vec::len);
        let mut v = crate::exact::zero_vec(dim);
        for (c, g) in class.iter().zip(&self.generators) {
            v = crate::exact::vec_add(&v, &crate::exact::vec_scale(&rat_int(c.clone()), g));
        }
        v
    }
}

/// Reduces a rational into `[0, 2)`.
pub fn mod2(x: &Rational) -> Rational {
    let two = rat(2);
    let k = (x / &two).floor();
    x - k * two
}

/// Discriminant group with its quadratic form values.
pub fn discriminant_group(l: &QuadLattice) -> Result<DiscGroup> {
    if !l.is_integral() {
        return Err(Error::NotIntegral(
            "discriminant group needs an integral Gram matrix".into(),
        ));
    }
    if !l.is_even() {
        return Err(Error::Invalid(
            "discriminant form needs an even lattice".into(),
        ));
    }
    let g = l.gram();
    let ginv = g
        .inverse()
        .ok_or_else(|| Error::Degenerate("discriminant group of a degenerate lattice".into()))?;
    let s = smith_normal_form(g)?;
    let uinv = s.u.inverse().expect("unimodular");
    let mut out = DiscGroup {
        cyclic_orders: vec![],
        generators: vec![],
        q_values: vec![],
        class_rows: vec![],
    };
    for i in 0..l.rank() {
        let d = s.d.get(i, i).numer().clone();
        if d.is_one() {
            continue;
        }
        let y = uinv.col(i);
        let coords = ginv.mul_vec(&y);
        let x = l.vector(&coords);
        let q = mod2(&l.pair(&x, &x));
        out.cyclic_orders.push(d);
        out.generators.push(x);
        out.q_values.push(q);
        out.class_rows.push(s.u.row(i));
    }
    Ok(out)
}

/// Divisibility: the positive generator of `b(v, L)`.
pub fn divisibility(l: &QuadLattice, v: &[Rational]) -> Result<BigInt> {
    if crate::exact::vec_is_zero(v) {
        return Err(Error::Invalid("divisibility of the zero vector".into()));
    }
    if !l.contains(v) {
        return Err(Error::OutsideLattice("vector not in the lattice".into()));
    }
    let pairings: Vec<Rational> = (0..l.rank())
        .map(|i| l.pair(v, &l.basis_vector(i)))
        .collect();
    let g = rational_gcd(pairings.iter());
    if g.is_zero() {
        return Err(Error::Degenerate("vector lies in the radical".into()));
    }
    if !is_integral(&g) {
        return Err(Error::NotIntegral(format!(
            "pairings generate {}",
            format_rational(&g)
        )));
    }
    Ok(g.numer().clone())
}

/// Saturated sublattice `{x ∈ L : b(x, s) = 0 for all s}`.
pub fn orthogonal_complement(l: &QuadLattice, gens: &[RatVector]) -> Result<QuadLattice> {
    for s in gens {
        if !l.contains(s) {
            return Err(Error::OutsideLattice(
                "generator outside the lattice".into(),
            ));
        }
    }
    let rows: Vec<RatVector> = gens
        .iter()
        .map(|s| {
            (0..l.rank())
                .map(|i| l.pair(&l.basis_vector(i), s))
                .collect()
        })
        .collect();
    let m = RatMatrix::from_rows_with_cols(rows, l.rank())?;
    let kernel = integer_kernel_basis(&m);
    let basis_rows: Vec<RatVector> = kernel.iter().map(|c| l.vector(c)).collect();
    let basis = RatMatrix::from_rows_with_cols(basis_rows, l.ambient_dim())?;
    QuadLattice::from_basis(basis, l.ambient_gram().clone(), None)
}

/// True when `v` is not a proper multiple of a lattice vector.
pub fn is_primitive(l: &QuadLattice, v: &[Rational]) -> Result<bool> {
    if crate::exact::vec_is_zero(v) {
        return Err(Error::Invalid("primitivity of the zero vector".into()));
    }
    let c = l
        .coords(v)
        .ok_or_else(|| Error::OutsideLattice("vector not in the lattice".into()))?;
    Ok(rational_gcd(c.iter()).is_one())
}

/// Outcome of [`brute_force_isometric`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometrySearch {
    /// Matrix whose columns are the images of the basis of `L1` in `L2` coordinates.
    Found(RatMatrix),
    NotFound(String),
}

/// Searches for an isometry `L1 → L2` with image coordinates bounded by `bound`.
pub fn brute_force_isometric(
    l1: &QuadLattice,
    l2: &QuadLattice,
    bound: i64,
) -> Result<IsometrySearch> {
    let r = l1.rank();
    if r > 4 || l2.rank() > 4 {
        return Err(Error::Invalid(
            "brute-force isometry search is limited to rank 4".into(),
        ));
    }
    if r != l2.rank() {
        return Ok(IsometrySearch::NotFound("rank".into()));
    }
    if l1.det() != l2.det() {
        return Ok(IsometrySearch::NotFound("determinant".into()));
    }
    if l1.signature() != l2.signature() {
        return Ok(IsometrySearch::NotFound("signature".into()));
    }
    let g1 = l1.gram();
    let g2 = l2.gram();
    let box_vectors = integer_box(r, bound);
    let candidates: Vec<Vec<RatVector>> = (0..r)
        .map(|i| {
            box_vectors
                .iter()
                .filter(|w| g2.bilinear(w, w) == *g1.get(i, i))
                .cloned()
                .collect()
        })
        .collect();
    let mut chosen: Vec<RatVector> = Vec::with_capacity(r);
    if search_images(g1, g2, &candidates, &mut chosen) {
        let m = RatMatrix::from_cols(&chosen, r)?;
        return Ok(IsometrySearch::Found(m));
    }
    Ok(IsometrySearch::NotFound(format!(
        "no isometry with coordinates bounded by {bound}"
    )))
}

fn search_images(
    g1: &RatMatrix,
    g2: &RatMatrix,
    cands: &[Vec<RatVector>],
    chosen: &mut Vec<RatVector>,
) -> bool {
    let i = chosen.len();
    if i == cands.len() {
        let m = RatMatrix::from_cols(chosen, i).expect("square");
        return m.det().abs().is_one();
    }
    for w in &cands[i] {
        if (0..i).all(|j| g2.bilinear(w, &chosen[j]) == *g1.get(i, j)) {
            chosen.push(w.clone());
            if search_images(g1, g2, cands, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// All integer vectors of length `r` with entries in `[-bound, bound]`, in
/// lexicographic order.
pub fn integer_box(r: usize, bound: i64) -> Vec<RatVector> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v: RatVector| {
                (-bound..=bound).map(move |x| {
                    let mut w = v.clone();
                    w.push(rat(x));
                    w
                })
            })
            .collect();
    }
    out
}

/// Standard basis vector of a standalone lattice.
pub fn e(l: &QuadLattice, i: usize) -> RatVector {
    unit_vec(l.ambient_dim(), i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_vec;

    #[test]
    fn standard_examples() {
        let u = standard_lattice(&StandardName::U).unwrap();
        assert_eq!(u.det(), rat(-1));
        assert_eq!(u.signature(), (1, 1, 0));
        let k3 = standard_lattice(&StandardName::K3).unwrap();
        assert_eq!(k3.rank(), 22);
        assert_eq!(k3.det(), rat(-1));
        assert!(k3.is_even());
        assert_eq!(k3.signature(), (3, 19, 0));
        let a1 = standard_lattice(&StandardName::A1(-2)).unwrap();
        assert_eq!(a1.gram(), &RatMatrix::from_i64(&[vec![-2]]));
        let e8 = standard_lattice(&StandardName::E8Minus).unwrap();
        assert_eq!(e8.det(), rat(1));
        assert_eq!(e8.signature(), (0, 8, 0));
        let muk = standard_lattice(&StandardName::MukaiK3).unwrap();
        assert_eq!(muk.rank(), 24);
        assert_eq!(muk.signature(), (4, 20, 0));
        assert!("A1(0)"
            .parse::<StandardName>()
            .map(|n| standard_lattice(&n))
            .unwrap()
            .is_err());
        assert!("Z7".parse::<StandardName>().is_err());
    }

    #[test]
    fn discriminant_examples() {
        let u = standard_lattice(&StandardName::U).unwrap();
        assert!(discriminant_group(&u).unwrap().is_trivial());
        let a = standard_lattice(&StandardName::A1(-4)).unwrap();
        let d = discriminant_group(&a).unwrap();
        assert_eq!(d.cyclic_orders, vec![BigInt::from(4)]);
        assert_eq!(d.q_values, vec![crate::exact::frac(7, 4)]);
    }

    #[test]
    fn complement_of_mukai_vector() {
        let muk = standard_lattice(&StandardName::MukaiK3).unwrap();
        for n in 2..5i64 {
            let mut v = crate::exact::zero_vec(24);
            v[0] = rat(1);
            v[23] = rat(1 - n);
            assert_eq!(muk.pair(&v, &v), rat(2 * n - 2));
            let c = orthogonal_complement(&muk, &[v]).unwrap();
            assert_eq!(c.rank(), 23);
            assert_eq!(c.det().abs(), rat(2 * n - 2));
        }
        let all: Vec<RatVector> = (0..24).map(|i| e(&muk, i)).collect();
        assert_eq!(orthogonal_complement(&muk, &all).unwrap().rank(), 0);
    }

    #[test]
    fn primitivity_and_divisibility() {
        let u = standard_lattice(&StandardName::U).unwrap();
        assert!(is_primitive(&u, &rat_vec(&[1, 2])).unwrap());
        assert!(!is_primitive(&u, &rat_vec(&[3, 6])).unwrap());
        assert!(is_primitive(&u, &rat_vec(&[0, 0])).is_err());
        assert_eq!(
            divisibility(&u, &rat_vec(&[2, 4])).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn brute_force_examples() {
        let u = standard_lattice(&StandardName::U).unwrap();
        assert!(matches!(
            brute_force_isometric(&u, &u, 1).unwrap(),
            IsometrySearch::Found(_)
        ));
        let g =
            QuadLattice::from_gram(RatMatrix::from_i64(&[vec![2, 2], vec![2, 0]]), None).unwrap();
        assert_eq!(
            brute_force_isometric(&g, &u, 5).unwrap(),
            IsometrySearch::NotFound("determinant".into())
        );
        let m2 = standard_lattice(&StandardName::A1(-2)).unwrap();
        let p2 = standard_lattice(&StandardName::A1(2)).unwrap();
        assert!(matches!(
            brute_force_isometric(&m2, &p2, 3).unwrap(),
            IsometrySearch::NotFound(_)
        ));
        let k3 = standard_lattice(&StandardName::K3).unwrap();
        assert!(brute_force_isometric(&k3, &k3, 1).is_err());
    }

    #[test]
    fn signature_with_zero_diagonal() {
        assert_eq!(
            signature(&RatMatrix::from_i64(&[vec![0, 1], vec![1, 0]])),
            (1, 1, 0)
        );
        assert_eq!(
            signature(&RatMatrix::from_i64(&[vec![0, 0], vec![0, 0]])),
            (0, 0, 2)
        );
        assert_eq!(
            signature(&RatMatrix::from_i64(&[vec![1, 2], vec![2, 4]])),
            (1, 0, 1)
        );
    }
}
