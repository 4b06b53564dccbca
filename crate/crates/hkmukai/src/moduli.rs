//! The K3 side: Mukai vectors in the algebraic Mukai lattice `U ⊕ NS(S)`,
//! the Néron–Severi lattice `v^⊥` of the moduli space, fineness and the
//! discriminant relation `det(v^⊥)·⟨v,v⟩ = |K|²·det(L)` with
//! `K = L/(Zv ⊕ v^⊥)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    format_rational, rat, rat_int, smith_normal_form, to_bigint, RatMatrix, RatVector, Rational,
};
use crate::lattice::{discriminant_group, divisibility, orthogonal_complement, QuadLattice};

/// Mukai vector `(r, c, s)` with `c` in NS coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MukaiVectorK3 {
    pub r: i64,
    pub c: Vec<i64>,
    pub s: i64,
}

impl MukaiVectorK3 {
    pub fn new(r: i64, c: Vec<i64>, s: i64) -> Self {
        MukaiVectorK3 { r, c, s }
    }

    /// Parses `[r, c_1, …, c_ρ, s]`.
    pub fn from_slice(xs: &[i64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Dimension("a Mukai vector needs r and s".into()));
        }
        Ok(MukaiVectorK3 {
            r: xs[0],
            c: xs[1..xs.len() - 1].to_vec(),
            s: xs[xs.len() - 1],
        })
    }

    pub fn to_vec(&self) -> Vec<i64> {
        let mut out = vec![self.r];
        out.extend(&self.c);
        out.push(self.s);
        out
    }

    pub fn neg(&self) -> Self {
        MukaiVectorK3 {
            r: -self.r,
            c: self.c.iter().map(|x| -x).collect(),
            s: -self.s,
        }
    }

    /// Coordinates in the basis `((1,0,0), (0,0,1), NS basis)`.
    pub fn coords(&self) -> RatVector {
        let mut v = vec![rat(self.r), rat(self.s)];
        v.extend(self.c.iter().map(|&x| rat(x)));
        v
    }

    pub fn is_primitive(&self) -> bool {
        self.to_vec().iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
    }
}

/// `U ⊕ NS(S)` with basis `((1,0,0), (0,0,1), NS basis)` and
/// `⟨(1,0,0),(0,0,1)⟩ = -1`.
#[derive(Clone, Debug)]
pub struct AlgebraicMukaiLattice {
    pub ns_gram: RatMatrix,
    pub lattice: QuadLattice,
}

impl AlgebraicMukaiLattice {
    pub fn new(ns_gram: RatMatrix) -> Result<Self> {
        let ns = QuadLattice::from_gram(ns_gram.clone(), Some("NS(S)"))?;
        if !ns.is_even() {
            return Err(Error::Invalid("NS(S) must be an even lattice".into()));
        }
        let (p, _, z) = ns.signature();
        if p != 1 || z != 0 {
            return Err(Error::Invalid("NS(S) must be hyperbolic".into()));
        }
        let u = RatMatrix::from_i64(&[vec![0, -1], vec![-1, 0]]);
        let lattice =
            QuadLattice::from_gram(RatMatrix::block_diag(&[&u, &ns_gram]), Some("H~(S,Z)_alg"))?;
        Ok(AlgebraicMukaiLattice { ns_gram, lattice })
    }

    pub fn rho(&self) -> usize {
        self.ns_gram.rows()
    }

    pub fn pair(&self, v: &MukaiVectorK3, w: &MukaiVectorK3) -> Result<Rational> {
        self.check(v)?;
        self.check(w)?;
        Ok(self.lattice.pair(&v.coords(), &w.coords()))
    }

    fn check(&self, v: &MukaiVectorK3) -> Result<()> {
        if v.c.len() != self.rho() {
            return Err(Error::Dimension(format!(
                "c must have {} NS coordinates",
                self.rho()
            )));
        }
        Ok(())
    }

    fn check_primitive(&self, v: &MukaiVectorK3) -> Result<()> {
        self.check(v)?;
        if !v.is_primitive() {
            return Err(Error::Invalid("Mukai vector must be primitive".into()));
        }
        Ok(())
    }
}

/// `⟨v,v⟩ + 2`.
pub fn moduli_dimension(l: &AlgebraicMukaiLattice, v: &MukaiVectorK3) -> Result<i64> {
    let q = to_bigint(&l.pair(v, v)?)?;
    if q < BigInt::from(-2) {
        return Err(Error::Invalid("⟨v,v⟩ < -2: no moduli space".into()));
    }
    crate::exact::to_i64(&rat_int(q + 2))
}

/// `NS(M) = v^⊥ ⊂ L`, which is saturated by construction.
pub fn ns_of_moduli(l: &AlgebraicMukaiLattice, v: &MukaiVectorK3) -> Result<QuadLattice> {
    l.check_primitive(v)?;
    Ok(orthogonal_complement(&l.lattice, &[v.coords()])?.with_name("NS(M)"))
}

/// Fineness computed three ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fineness {
    pub fine: bool,
    /// gcd of `⟨v, e_i⟩` over the basis.
    pub obstruction_order: BigInt,
    /// Invariant factor of the pairing row `(⟨v, e_i⟩)_i`.
    pub smith_order: BigInt,
    /// `|K| = [L : Zv ⊕ v^⊥]`, absent for isotropic `v`.
    pub k_order: Option<BigInt>,
    /// Fineness read off from the third computation: `|K| = |⟨v,v⟩|`, or
    /// for isotropic `v` an explicit `w` with `⟨v,w⟩ = 1`.
    pub k_verdict: bool,
    /// `w` with `⟨v,w⟩ = 1` in lattice coordinates, when fine.
    pub witness: Option<RatVector>,
}

impl Fineness {
    /// True when the three computations agree.
    pub fn consistent(&self) -> bool {
        let one = BigInt::from(1);
        (self.obstruction_order == one) == self.fine
            && (self.smith_order == one) == self.fine
            && self.k_verdict == self.fine
    }
}

/// Index of `Zv ⊕ v^⊥` in `L` for non-isotropic `v`.
fn k_order(l: &AlgebraicMukaiLattice, v: &MukaiVectorK3) -> Result<Option<BigInt>> {
    if l.pair(v, v)?.is_zero() {
        return Ok(None);
    }
    let perp = ns_of_moduli(l, v)?;
    let mut rows = vec![v.coords()];
    rows.extend(perp.basis().to_rows());
    let det = RatMatrix::from_rows(rows)?.det();
    Ok(Some(to_bigint(&det.abs())?))
}

fn bezout_witness(row: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut coeffs = vec![BigInt::zero(); row.len()];
    let mut g = BigInt::zero();
    for (i, x) in row.iter().enumerate() {
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
        coeffs.iter_mut().for_each(|c| *c = -c.clone());
        g = -g;
    }
    (g == BigInt::from(1)).then_some(coeffs)
}

/// Whether a universal family exists on the lattice level: some `w ∈ L`
/// with `⟨v,w⟩ = 1`.
pub fn fineness(l: &AlgebraicMukaiLattice, v: &MukaiVectorK3) -> Result<Fineness> {
    l.check_primitive(v)?;
    let coords = v.coords();
    let obstruction_order = divisibility(&l.lattice, &coords)?;
    let row: Vec<Rational> = (0..l.lattice.rank())
        .map(|i| l.lattice.pair(&coords, &l.lattice.basis_vector(i)))
        .collect();
    let smith = smith_normal_form(&RatMatrix::from_rows(vec![row.clone()])?)?;
    let smith_order = smith
        .invariant_factors()
        .first()
        .cloned()
        .unwrap_or_else(BigInt::zero)
        .abs();
    let int_row = row.iter().map(to_bigint).collect::<Result<Vec<_>>>()?;
    let witness = bezout_witness(&int_row).map(|c| c.into_iter().map(rat_int).collect::<Vec<_>>());
    if let Some(w) = &witness {
        if l.lattice.pair(&coords, w) != rat(1) {
            return Err(Error::Invalid(
                "fineness witness failed verification".into(),
            ));
        }
    }
    let vv = to_bigint(&l.pair(v, v)?)?;
    let k = k_order(l, v)?;
    let k_verdict = match &k {
        Some(k) => *k == vv.abs(),
        None => witness.is_some(),
    };
    Ok(Fineness {
        fine: obstruction_order == BigInt::from(1),
        obstruction_order,
        smith_order,
        k_order: k,
        k_verdict,
        witness,
    })
}

/// Result of [`disc_lemma_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscLemma {
    pub vv: BigInt,
    pub det_l: Rational,
    pub det_ns_m: Rational,
    pub k_order: BigInt,
    /// `det(v^⊥)·⟨v,v⟩ = |K|²·det(L)`.
    pub product_formula: bool,
    /// `|K|` divides `⟨v,v⟩`.
    pub k_divides: bool,
    pub fine: bool,
    /// `fine ⟺ |K| = |⟨v,v⟩|`.
    pub iff_k: bool,
    /// `fine ⟺ det(v^⊥) = ⟨v,v⟩·det(L)`.
    pub iff_disc: bool,
}

impl DiscLemma {
    pub fn holds(&self) -> bool {
        self.product_formula && self.k_divides && self.iff_k && self.iff_disc
    }
}

/// Checks the discriminant relation for a non-isotropic primitive `v`.
pub fn disc_lemma_check(l: &AlgebraicMukaiLattice, v: &MukaiVectorK3) -> Result<DiscLemma> {
    l.check_primitive(v)?;
    let vv_q = l.pair(v, v)?;
    if vv_q.is_zero() {
        return Err(Error::Isotropic(
            "the discriminant relation needs ⟨v,v⟩ ≠ 0".into(),
        ));
    }
    let vv = to_bigint(&vv_q)?;
    let ns_m = ns_of_moduli(l, v)?;
    let det_ns_m = ns_m.det();
    let det_l = l.lattice.det();
    let k = k_order(l, v)?.expect("non-isotropic");
    let kq = rat_int(k.clone());
    let fine = fineness(l, v)?.fine;
    let product_formula = &det_ns_m * &vv_q == &kq * &kq * &det_l;
    let k_divides = (&vv % &k).is_zero();
    let iff_k = fine == (k == vv.abs());
    let iff_disc = fine == (det_ns_m == &vv_q * &det_l);
    Ok(DiscLemma {
        vv,
        det_l,
        det_ns_m,
        k_order: k,
        product_formula,
        k_divides,
        fine,
        iff_k,
        iff_disc,
    })
}

/// Lattice-level invariants of the moduli space attached to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartnerInvariants {
    pub vv: BigInt,
    pub obstruction_order: BigInt,
    pub ns_det: Rational,
    pub disc_orders: Vec<BigInt>,
    /// Sorted values of the discriminant quadratic form on the generators.
    pub disc_q_values: Vec<String>,
}

pub fn partner_invariants(
    l: &AlgebraicMukaiLattice,
    v: &MukaiVectorK3,
) -> Result<PartnerInvariants> {
    let ns_m = ns_of_moduli(l, v)?;
    let disc = discriminant_group(&ns_m)?;
    let mut q: Vec<String> = disc.q_values.iter().map(format_rational).collect();
    q.sort();
    Ok(PartnerInvariants {
        vv: to_bigint(&l.pair(v, v)?)?,
        obstruction_order: fineness(l, v)?.obstruction_order,
        ns_det: ns_m.det(),
        disc_orders: disc.cyclic_orders.clone(),
        disc_q_values: q,
    })
}
