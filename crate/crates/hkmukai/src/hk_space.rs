//! The extended Mukai space `Qα ⊕ H² ⊕ Qβ` of a deformation type, extended
//! Mukai vectors, the K3^[n] lattices `Λ, Λ_S, Λ_g, Λ_LB`, the algebraic /
//! transcendental splitting and the rank and membership predicates.
//!
//! Ambient coordinates follow the basis order `(α, H² basis, β)`.  For the
//! `K3n` family with `n >= 2` the H² basis is the K3 lattice basis followed
//! by `δ`, so `δ` sits at ambient index `b2` and `β` at `b2 + 1`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    exact_nth_root, factorial_q, frac, integer_kernel_basis, is_integral_vec, kernel_basis, rat,
    rat_int, saturate_rows, unit_vec, vec_add, vec_is_zero, vec_scale, RatMatrix, RatVector,
    Rational,
};
use crate::isometry::{b_field, DiscKind, EichlerFrame, Isometry};
use crate::lattice::{
    discriminant_group, e8_minus_gram, k3_gram, mukai_gram, orthogonal_complement, u_gram,
    QuadLattice,
};

/// Known deformation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    K3n,
    Kumn,
    OG10,
    OG6,
    Custom,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::K3n => "K3n",
            Family::Kumn => "Kumn",
            Family::OG10 => "OG10",
            Family::OG6 => "OG6",
            Family::Custom => "custom",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K3n" => Ok(Family::K3n),
            "Kumn" => Ok(Family::Kumn),
            "OG10" => Ok(Family::OG10),
            "OG6" => Ok(Family::OG6),
            "custom" => Ok(Family::Custom),
            _ => Err(Error::UnknownName(format!("family {s}"))),
        }
    }
}

/// Parameters of a deformation type: half dimension `n`, Fujiki constant
/// `c_X`, the constant `r_X` and the lattice `H²(X,Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationType {
    pub family: Family,
    pub n: u32,
    pub c_x: Rational,
    pub r_x: Rational,
    pub h2: QuadLattice,
}

impl DeformationType {
    /// K3^[n]-type: `c_X = 1`, `r_X = (n+3)/4`, `H² = K3 ⊕ ⟨2-2n⟩`.  For
    /// `n = 1` (a K3 surface) `H²` is the K3 lattice itself.
    pub fn k3n(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        let k3 = k3_gram();
        let gram = if n == 1 {
            k3
        } else {
            RatMatrix::block_diag(&[&k3, &RatMatrix::diagonal(&[rat(2 - 2 * n as i64)])])
        };
        Ok(DeformationType {
            family: Family::K3n,
            n,
            c_x: rat(1),
            r_x: frac(n as i64 + 3, 4),
            h2: QuadLattice::from_gram(gram, Some("H2(K3n)"))?,
        })
    }

    /// Kum^n-type: `c_X = n+1`, `r_X = (n+1)/4`, `H² = U³ ⊕ ⟨-2n-2⟩`.
    pub fn kumn(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        let u = u_gram();
        let gram =
            RatMatrix::block_diag(&[&u, &u, &u, &RatMatrix::diagonal(&[rat(-2 * n as i64 - 2)])]);
        Ok(DeformationType {
            family: Family::Kumn,
            n,
            c_x: rat(n as i64 + 1),
            r_x: frac(n as i64 + 1, 4),
            h2: QuadLattice::from_gram(gram, Some("H2(Kumn)"))?,
        })
    }

    /// OG10-type parameters: `n = 5`, `c_X = 1`, `r_X = 2`, `H² = U³ ⊕ E8(-1)² ⊕ A2(-1)`.
    pub fn og10() -> Result<Self> {
        let u = u_gram();
        let e = e8_minus_gram();
        let a2 = RatMatrix::from_i64(&[vec![-2, 1], vec![1, -2]]);
        let gram = RatMatrix::block_diag(&[&u, &u, &u, &e, &e, &a2]);
        Ok(DeformationType {
            family: Family::OG10,
            n: 5,
            c_x: rat(1),
            r_x: rat(2),
            h2: QuadLattice::from_gram(gram, Some("H2(OG10)"))?,
        })
    }

    /// OG6-type parameters: `n = 3`, `c_X = 4`, `r_X = 1`, `H² = U³ ⊕ ⟨-2⟩²`.
    pub fn og6() -> Result<Self> {
        let u = u_gram();
        let gram = RatMatrix::block_diag(&[&u, &u, &u, &RatMatrix::diagonal(&[rat(-2), rat(-2)])]);
        Ok(DeformationType {
            family: Family::OG6,
            n: 3,
            c_x: rat(4),
            r_x: rat(1),
            h2: QuadLattice::from_gram(gram, Some("H2(OG6)"))?,
        })
    }

    /// Arbitrary parameters with a caller-supplied H² Gram matrix.
    pub fn custom(n: u32, c_x: Rational, r_x: Rational, h2: QuadLattice) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if !c_x.is_positive() {
            return Err(Error::Invalid("c_X must be positive".into()));
        }
        Ok(DeformationType {
            family: Family::Custom,
            n,
            c_x,
            r_x,
            h2,
        })
    }

    /// Built-in family by name.
    pub fn builtin(family: Family, n: u32) -> Result<Self> {
        match family {
            Family::K3n => Self::k3n(n),
            Family::Kumn => Self::kumn(n),
            Family::OG10 => Self::og10(),
            Family::OG6 => Self::og6(),
            Family::Custom => Err(Error::Invalid(
                "custom family needs explicit parameters".into(),
            )),
        }
    }

    pub fn b2(&self) -> usize {
        self.h2.rank()
    }
}

/// The extended Mukai space of a deformation type with an optional
/// designated algebraic sublattice `NS ⊂ H²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtMukaiSpace {
    pub dtype: DeformationType,
    gram: Arc<RatMatrix>,
    ns: Option<RatMatrix>,
}

impl ExtMukaiSpace {
    pub fn new(dtype: DeformationType) -> Self {
        let gram = Arc::new(mukai_gram(dtype.h2.gram()));
        ExtMukaiSpace {
            dtype,
            gram,
            ns: None,
        }
    }

    /// Designates `NS` by generator rows in H² coordinates.
    pub fn with_ns(mut self, ns: RatMatrix) -> Result<Self> {
        if ns.cols() != self.dtype.b2() {
            return Err(Error::Dimension(
                "NS generators must have b2 coordinates".into(),
            ));
        }
        self.ns = Some(ns);
        Ok(self)
    }

    pub fn ns(&self) -> Option<&RatMatrix> {
        self.ns.as_ref()
    }

    pub fn gram(&self) -> &Arc<RatMatrix> {
        &self.gram
    }

    pub fn n(&self) -> u32 {
        self.dtype.n
    }

    pub fn dim(&self) -> usize {
        self.dtype.b2() + 2
    }

    pub fn alpha(&self) -> RatVector {
        unit_vec(self.dim(), 0)
    }

    pub fn beta(&self) -> RatVector {
        unit_vec(self.dim(), self.dim() - 1)
    }

    /// Ambient vector of an H² class given in H² coordinates.
    pub fn h2(&self, mu: &[Rational]) -> RatVector {
        let mut v = vec![Rational::zero()];
        v.extend_from_slice(mu);
        v.push(Rational::zero());
        v
    }

    /// `i`-th H² basis vector in ambient coordinates.
    pub fn h2_basis(&self, i: usize) -> RatVector {
        unit_vec(self.dim(), i + 1)
    }

    /// H² coordinates of an ambient vector.
    pub fn h2_part(&self, v: &[Rational]) -> RatVector {
        v[1..self.dim() - 1].to_vec()
    }

    /// The class `δ` of a K3n space with `n >= 2`.
    pub fn delta(&self) -> Result<RatVector> {
        self.require_k3n()?;
        Ok(self.h2_basis(self.dtype.b2() - 1))
    }

    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.gram.bilinear(x, y)
    }

    /// True when `v` has no α or β component.
    pub fn is_h2(&self, v: &[Rational]) -> bool {
        v.len() == self.dim() && v[0].is_zero() && v[self.dim() - 1].is_zero()
    }

    fn require_k3n(&self) -> Result<()> {
        if self.dtype.family != Family::K3n || self.dtype.n < 2 {
            return Err(Error::Invalid(
                "operation needs the K3n family with n >= 2".into(),
            ));
        }
        Ok(())
    }

    /// The integral lattice `Zα ⊕ H²(X,Z) ⊕ Zβ`.
    pub fn integral_lattice(&self) -> Result<QuadLattice> {
        QuadLattice::from_basis(
            RatMatrix::identity(self.dim()),
            self.gram.clone(),
            Some("H~(X,Z)"),
        )
    }

    pub fn b_field(&self, lambda: &[Rational]) -> Result<Isometry> {
        b_field(&self.gram, lambda)
    }
}

/// Orbit tag of an extended Mukai vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitTag {
    LineBundle,
    OOrbit,
    KxOrbit,
    Plain,
}

impl OrbitTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitTag::LineBundle => "line_bundle",
            OrbitTag::OOrbit => "O_orbit",
            OrbitTag::KxOrbit => "kx_orbit",
            OrbitTag::Plain => "plain",
        }
    }
}

/// Vector of the extended Mukai space with its orbit tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtVector {
    pub coords: RatVector,
    pub tag: OrbitTag,
}

impl ExtVector {
    /// Tagged vector, checking the square required by the tag.
    pub fn tagged(s: &ExtMukaiSpace, coords: RatVector, tag: OrbitTag) -> Result<Self> {
        if coords.len() != s.dim() {
            return Err(Error::Dimension("vector has the wrong length".into()));
        }
        let q = s.pair(&coords, &coords);
        let ok = match tag {
            OrbitTag::LineBundle | OrbitTag::OOrbit => q == -rat(2) * &s.dtype.r_x,
            OrbitTag::KxOrbit => q.is_zero(),
            OrbitTag::Plain => true,
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "square does not match the {} tag",
                tag.as_str()
            )));
        }
        Ok(ExtVector { coords, tag })
    }
}

/// `ṽ(L) = α + λ + (r_X + b(λ,λ)/2)β`.
pub fn ext_vector_line_bundle(s: &ExtMukaiSpace, lambda: &[Rational]) -> Result<ExtVector> {
    if !s.is_h2(lambda) {
        return Err(Error::Invalid("λ must lie in H²".into()));
    }
    let mut v = lambda.to_vec();
    v[0] = rat(1);
    let last = s.dim() - 1;
    v[last] = &s.dtype.r_x + s.pair(lambda, lambda) / rat(2);
    Ok(ExtVector {
        coords: v,
        tag: OrbitTag::LineBundle,
    })
}

/// `ṽ(k(x)) = β`.
pub fn ext_vector_point(s: &ExtMukaiSpace) -> ExtVector {
    ExtVector {
        coords: s.beta(),
        tag: OrbitTag::KxOrbit,
    }
}

/// Sign normalization: the sign of the α-coefficient, else of `b(ω,λ)`,
/// else of the β-coefficient, multiplied by `ε`.
pub fn signum_normalize(
    s: &ExtMukaiSpace,
    v: &ExtVector,
    omega: Option<&[Rational]>,
    eps: i8,
) -> Result<ExtVector> {
    if eps != 1 && eps != -1 {
        return Err(Error::Invalid("ε must be ±1".into()));
    }
    let c = &v.coords;
    let last = s.dim() - 1;
    let lambda = s.h2(&s.h2_part(c));
    let sign = if !c[0].is_zero() {
        c[0].signum()
    } else if !vec_is_zero(&lambda) {
        let omega = omega
            .ok_or_else(|| Error::VeryGeneralRequired("a Kähler surrogate ω is needed".into()))?;
        if !s.is_h2(omega) {
            return Err(Error::Invalid("ω must lie in H²".into()));
        }
        let b = s.pair(omega, &lambda);
        if b.is_zero() {
            return Err(Error::VeryGeneralRequired("b(ω,λ) = 0".into()));
        }
        b.signum()
    } else if !c[last].is_zero() {
        c[last].signum()
    } else {
        return Err(Error::Invalid("cannot normalize the zero vector".into()));
    };
    let f = sign * rat(eps as i64);
    Ok(ExtVector {
        coords: vec_scale(&f, c),
        tag: v.tag,
    })
}

/// The K3^[n] lattices inside the extended Mukai space.
#[derive(Clone, Debug)]
pub struct K3nLattices {
    /// `Λ = B_{-δ/2}(H̃(X,Z)) = Λ_S ⊕ Zδ̃`.
    pub lambda: QuadLattice,
    /// `Λ_S = Zα̃ ⊕ H²(S,Z) ⊕ Zβ`.
    pub lambda_s: QuadLattice,
    /// `Λ_g = Λ_S ⊕ Zδ̃/2`.
    pub lambda_g: QuadLattice,
    /// Lattice generated by the vectors `ṽ(λ)` of integral classes.
    pub lambda_lb: QuadLattice,
    /// `α̃ = B_{-δ/2}(α)`.
    pub alpha_t: RatVector,
    /// `δ̃ = B_{-δ/2}(δ)`.
    pub delta_t: RatVector,
}

/// Builds `Λ, Λ_S, Λ_g, Λ_LB, α̃, δ̃` for a K3n space with `n >= 2`.
pub fn k3n_lattices(s: &ExtMukaiSpace) -> Result<K3nLattices> {
    let delta = s.delta()?;
    let b = s.b_field(&vec_scale(&frac(-1, 2), &delta))?;
    let alpha_t = b.apply(&s.alpha());
    let delta_t = b.apply(&delta);
    let dim = s.dim();
    let mut ls_rows = vec![alpha_t.clone()];
    ls_rows.extend((0..22).map(|i| s.h2_basis(i)));
    ls_rows.push(s.beta());
    let lambda_s = QuadLattice::from_basis(
        RatMatrix::from_rows_with_cols(ls_rows.clone(), dim)?,
        s.gram().clone(),
        Some("Lambda_S"),
    )?;
    let mut l_rows = ls_rows.clone();
    l_rows.push(delta_t.clone());
    let lambda = QuadLattice::from_basis(
        RatMatrix::from_rows_with_cols(l_rows, dim)?,
        s.gram().clone(),
        Some("Lambda"),
    )?;
    let mut g_rows = ls_rows;
    g_rows.push(vec_scale(&frac(1, 2), &delta_t));
    let lambda_g = QuadLattice::from_basis(
        RatMatrix::from_rows_with_cols(g_rows, dim)?,
        s.gram().clone(),
        Some("Lambda_g"),
    )?;
    let lambda_lb = line_bundle_lattice(s)?;
    Ok(K3nLattices {
        lambda,
        lambda_s,
        lambda_g,
        lambda_lb,
        alpha_t,
        delta_t,
    })
}

/// Lattice generated by `ṽ(λ)` for all integral `λ ∈ H²(X,Z)`.  Since `ṽ` is
/// quadratic in `λ`, the values at `0`, `±e_i` and `e_i + e_j` generate it.
pub fn line_bundle_lattice(s: &ExtMukaiSpace) -> Result<QuadLattice> {
    let b2 = s.dtype.b2();
    let v = |lambda: RatVector| ext_vector_line_bundle(s, &lambda).map(|x| x.coords);
    let mut gens = vec![v(crate::exact::zero_vec(s.dim()))?];
    for i in 0..b2 {
        let ei = s.h2_basis(i);
        gens.push(v(ei.clone())?);
        gens.push(v(vec_scale(&rat(-1), &ei))?);
        for j in i + 1..b2 {
            gens.push(v(vec_add(&ei, &s.h2_basis(j)))?);
        }
    }
    QuadLattice::from_generators(
        &RatMatrix::from_rows_with_cols(gens, s.dim())?,
        s.gram().clone(),
        Some("Lambda_LB"),
    )
}

/// `B_{-γ/2}(H̃(X,Z))` for an H² class `γ`.
pub fn b_field_image_lattice(s: &ExtMukaiSpace, gamma: &[Rational]) -> Result<QuadLattice> {
    let b = s.b_field(&vec_scale(&frac(-1, 2), gamma))?;
    let rows: Vec<RatVector> = (0..s.dim())
        .map(|i| b.apply(&unit_vec(s.dim(), i)))
        .collect();
    QuadLattice::from_basis(
        RatMatrix::from_rows_with_cols(rows, s.dim())?,
        s.gram().clone(),
        None,
    )
}

/// `k·Λ_S ⊕ Zδ̃`.
pub fn scaled_lambda_family(s: &ExtMukaiSpace, k: i64) -> Result<QuadLattice> {
    let lat = k3n_lattices(s)?;
    let mut rows: Vec<RatVector> = (0..lat.lambda_s.rank())
        .map(|i| vec_scale(&rat(k), &lat.lambda_s.basis_vector(i)))
        .collect();
    rows.push(lat.delta_t.clone());
    QuadLattice::from_basis(
        RatMatrix::from_rows_with_cols(rows, s.dim())?,
        s.gram().clone(),
        Some(&format!("{k}Lambda_S+Zdelta~")),
    )
}

/// Eichler frame of `Λ` with planes `⟨α̃, -β⟩` and the first hyperbolic
/// plane of the K3 lattice.
pub fn lambda_eichler_frame(s: &ExtMukaiSpace) -> Result<EichlerFrame> {
    let lat = k3n_lattices(s)?;
    let minus_beta = vec_scale(&rat(-1), &s.beta());
    EichlerFrame::new(
        lat.lambda,
        (lat.alpha_t, minus_beta),
        (s.h2_basis(0), s.h2_basis(1)),
    )
}

/// Integral coordinates of `v` when it lies in `L`.
pub fn membership(l: &QuadLattice, v: &ExtVector) -> Option<RatVector> {
    l.coords(&v.coords)
}

/// `(L_alg, L_tr)`: `L ∩ (Qα ⊕ NS_Q ⊕ Qβ)` and its orthogonal complement in `L`.
pub fn split_algebraic(s: &ExtMukaiSpace, l: &QuadLattice) -> Result<(QuadLattice, QuadLattice)> {
    let ns = s
        .ns()
        .ok_or_else(|| Error::Invalid("no algebraic sublattice designated".into()))?;
    if !ns.is_integral() {
        return Err(Error::NotIntegral("NS generators must be integral".into()));
    }
    if ns.rows() > 0 {
        let sat = saturate_rows(ns);
        let span = crate::exact::row_lattice_basis(ns);
        let same = span.rows() == sat.rows()
            && (0..sat.rows()).all(|i| {
                crate::exact::solve_linear(&span.transpose(), &sat.row(i))
                    .is_some_and(|c| is_integral_vec(&c))
            });
        if !same {
            return Err(Error::Invalid("NS is not primitive in H²".into()));
        }
    }
    let dim = s.dim();
    let mut w_rows = vec![s.alpha()];
    w_rows.extend(ns.to_rows().iter().map(|r| s.h2(r)));
    w_rows.push(s.beta());
    let w = RatMatrix::from_rows_with_cols(w_rows, dim)?;
    let annihilator = kernel_basis(&w);
    let alg = if annihilator.is_empty() {
        l.clone()
    } else {
        let phi = RatMatrix::from_rows_with_cols(annihilator, dim)?;
        let cond = phi.mul(&l.basis().transpose());
        let coeffs = integer_kernel_basis(&cond);
        let rows: Vec<RatVector> = coeffs.iter().map(|c| l.vector(c)).collect();
        QuadLattice::from_basis(
            RatMatrix::from_rows_with_cols(rows, dim)?,
            s.gram().clone(),
            Some("alg"),
        )?
    };
    let alg_gens: Vec<RatVector> = (0..alg.rank()).map(|i| alg.basis_vector(i)).collect();
    let tr = orthogonal_complement(l, &alg_gens)?.with_name("tr");
    Ok((alg, tr))
}

/// `|r| = a^n` for an integer `a >= 0`; returns the witness.
pub fn rank_predicate_o_orbit(r: &BigInt, n: u32) -> Result<Option<BigInt>> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    Ok(exact_nth_root(&r.abs(), n))
}

/// Result of [`rank_predicate_kx_orbit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KxRank {
    pub holds: bool,
    pub a: Option<Rational>,
    /// Whether the witness is an integer (reported for integral `c_X`).
    pub a_integral: Option<bool>,
}

/// `r = a^n · n!/c_X` for a rational `a`.
pub fn rank_predicate_kx_orbit(r: &BigInt, n: u32, c_x: &Rational) -> Result<KxRank> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    if !c_x.is_positive() {
        return Err(Error::Invalid("c_X must be positive".into()));
    }
    if let Some(false) = small_kx_rank(r, n, c_x) {
        return Ok(KxRank {
            holds: false,
            a: None,
            a_integral: None,
        });
    }
    let t = rat_int(r.clone()) * c_x / factorial_q(n as u64);
    let root = |x: &Rational| -> Option<Rational> {
        let p = exact_nth_root(x.numer(), n)?;
        let q = exact_nth_root(x.denom(), n)?;
        Some(Rational::new(p, q))
    };
    let a = if t.is_negative() {
        if n.is_multiple_of(2) {
            None
        } else {
            root(&-t).map(|a| -a)
        }
    } else {
        root(&t)
    };
    let a_integral = match (&a, c_x.denom().is_one()) {
        (Some(a), true) => Some(a.denom().is_one()),
        _ => None,
    };
    Ok(KxRank {
        holds: a.is_some(),
        a,
        a_integral,
    })
}

/// Machine-integer evaluation of the rank predicate; `None` when the inputs
/// do not fit.
fn small_kx_rank(r: &BigInt, n: u32, c_x: &Rational) -> Option<bool> {
    use num_integer::{Integer, Roots};
    use num_traits::ToPrimitive;
    if n > 20 {
        return None;
    }
    let nf: i128 = (1..=n as i128).product();
    let num = r.to_i128()?.checked_mul(c_x.numer().to_i128()?)?;
    let den = nf.checked_mul(c_x.denom().to_i128()?)?;
    let g = num.gcd(&den);
    let (num, den) = (num / g, den / g);
    if num < 0 && n.is_multiple_of(2) {
        return Some(false);
    }
    let is_power = |x: u128| x.nth_root(n).checked_pow(n) == Some(x);
    Some(is_power(num.unsigned_abs()) && is_power(den.unsigned_abs()))
}

/// Report of [`in_hat_aut_plus`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatAutReport {
    pub preserves_lambda: bool,
    pub preserves_split: Option<bool>,
    pub spinor_norm: Option<i8>,
    pub disc_action: Option<DiscKind>,
}

impl HatAutReport {
    pub fn holds(&self) -> bool {
        self.preserves_lambda
            && self.preserves_split != Some(false)
            && self.spinor_norm == Some(1)
            && matches!(
                self.disc_action,
                Some(DiscKind::Identity | DiscKind::MinusIdentity)
            )
    }

    /// Failed conditions, in a fixed order.
    pub fn reasons(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.preserves_lambda {
            out.push("lattice");
        }
        if self.preserves_split == Some(false) {
            out.push("hodge split");
        }
        if self.preserves_lambda && self.spinor_norm != Some(1) {
            out.push("spinor norm");
        }
        if self.preserves_lambda
            && !matches!(
                self.disc_action,
                Some(DiscKind::Identity | DiscKind::MinusIdentity)
            )
        {
            out.push("discriminant action");
        }
        out
    }
}

/// Membership in `Ô⁺(Λ)` together with the algebraic/transcendental split.
pub fn in_hat_aut_plus(g: &Isometry, s: &ExtMukaiSpace) -> Result<HatAutReport> {
    if g.gram() != s.gram() {
        return Err(Error::Dimension(
            "isometry acts on a different space".into(),
        ));
    }
    let lat = k3n_lattices(s)?;
    let preserves_lambda = g.preserves_lattice(&lat.lambda)?;
    if !preserves_lambda {
        return Ok(HatAutReport {
            preserves_lambda,
            preserves_split: None,
            spinor_norm: None,
            disc_action: None,
        });
    }
    let preserves_split = if s.ns().is_some() {
        let (alg, tr) = split_algebraic(s, &lat.lambda)?;
        Some(g.preserves_lattice(&alg)? && g.preserves_lattice(&tr)?)
    } else {
        None
    };
    let disc = discriminant_group(&lat.lambda)?;
    Ok(HatAutReport {
        preserves_lambda,
        preserves_split,
        spinor_norm: Some(g.spinor_norm()),
        disc_action: Some(g.disc_action_with(&lat.lambda, &disc).kind),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{vec_sub, zero_vec};
    use crate::lattice::divisibility;

    fn k3n(n: u32) -> ExtMukaiSpace {
        ExtMukaiSpace::new(DeformationType::k3n(n).unwrap())
    }

    #[test]
    fn deformation_parameters() {
        let d = DeformationType::k3n(3).unwrap();
        assert_eq!(
            (d.b2(), d.c_x.clone(), d.r_x.clone()),
            (23, rat(1), frac(3, 2))
        );
        let d = DeformationType::kumn(2).unwrap();
        assert_eq!(
            (d.b2(), d.c_x.clone(), d.r_x.clone()),
            (7, rat(3), frac(3, 4))
        );
        assert_eq!(DeformationType::k3n(1).unwrap().b2(), 22);
        assert_eq!(DeformationType::og10().unwrap().b2(), 24);
        assert_eq!(DeformationType::og6().unwrap().b2(), 8);
    }

    #[test]
    fn line_bundle_vectors() {
        let s = k3n(2);
        let v = ext_vector_line_bundle(&s, &zero_vec(25)).unwrap();
        let mut expect = zero_vec(25);
        expect[0] = rat(1);
        expect[24] = frac(5, 4);
        assert_eq!(v.coords, expect);
        let d = s.delta().unwrap();
        let v = ext_vector_line_bundle(&s, &d).unwrap();
        assert_eq!(v.coords[23], rat(1));
        assert_eq!(v.coords[24], frac(1, 4));
        assert_eq!(s.pair(&v.coords, &v.coords), frac(-5, 2));
        let p = ext_vector_point(&s);
        assert_eq!(s.pair(&p.coords, &p.coords), rat(0));
        let o = ext_vector_line_bundle(&s, &zero_vec(25)).unwrap();
        assert_eq!(s.pair(&p.coords, &o.coords), rat(-1));
    }

    #[test]
    fn signum_rules() {
        let s = k3n(2);
        let lam = s.h2_basis(0);
        let mut v = vec_add(&s.alpha(), &lam);
        v = vec_scale(&rat(-1), &v);
        let x = signum_normalize(
            &s,
            &ExtVector {
                coords: v.clone(),
                tag: OrbitTag::Plain,
            },
            None,
            1,
        )
        .unwrap();
        assert_eq!(x.coords, vec_scale(&rat(-1), &v));
        let w = vec_add(&lam, &vec_scale(&rat(3), &s.beta()));
        let omega = vec_scale(&rat(-1), &s.h2_basis(1));
        let x = signum_normalize(
            &s,
            &ExtVector {
                coords: w.clone(),
                tag: OrbitTag::Plain,
            },
            Some(&omega),
            1,
        )
        .unwrap();
        assert_eq!(x.coords, vec_scale(&rat(-1), &w));
        let err = signum_normalize(
            &s,
            &ExtVector {
                coords: w.clone(),
                tag: OrbitTag::Plain,
            },
            Some(&s.h2_basis(0)),
            1,
        );
        assert!(matches!(err, Err(Error::VeryGeneralRequired(_))));
        let b = vec_scale(&rat(-3), &s.beta());
        let x = signum_normalize(
            &s,
            &ExtVector {
                coords: b,
                tag: OrbitTag::KxOrbit,
            },
            None,
            1,
        )
        .unwrap();
        assert_eq!(x.coords, vec_scale(&rat(3), &s.beta()));
    }

    #[test]
    fn lambda_structure() {
        for n in 2..5u32 {
            let s = k3n(n);
            let l = k3n_lattices(&s).unwrap();
            let mut a = s.alpha();
            a[23] = frac(-1, 2);
            a[24] = frac(1 - n as i64, 4);
            assert_eq!(l.alpha_t, a);
            assert_eq!(s.pair(&l.alpha_t, &l.alpha_t), rat(0));
            assert_eq!(s.pair(&l.alpha_t, &s.beta()), rat(-1));
            assert_eq!(s.pair(&l.alpha_t, &l.delta_t), rat(0));
            assert_eq!(s.pair(&l.delta_t, &l.delta_t), rat(2 - 2 * n as i64));
            assert!(l.lambda_s.is_unimodular());
            assert_eq!(l.lambda_g.index_of(&l.lambda), Some(rat(2)));
            assert!(l.lambda_g.contains_lattice(&l.lambda_lb));
            assert_eq!(
                divisibility(&l.lambda, &l.delta_t).unwrap(),
                BigInt::from(2 * n - 2)
            );
            let d = discriminant_group(&l.lambda).unwrap();
            assert_eq!(d.cyclic_orders, vec![BigInt::from(2 * n - 2)]);
            let comp = orthogonal_complement(&l.lambda, std::slice::from_ref(&l.delta_t)).unwrap();
            assert!(comp.same_set(&l.lambda_s));
        }
    }

    #[test]
    fn lambda_independent_of_delta_representative() {
        for n in [2u32, 3] {
            let s = k3n(n);
            let l = k3n_lattices(&s).unwrap();
            let d = s.delta().unwrap();
            let k = rat(2 * n as i64 - 2);
            for gamma in [
                vec_scale(&rat(-1), &d),
                vec_add(&d, &vec_scale(&k, &s.h2_basis(0))),
                vec_sub(&d, &vec_scale(&k, &s.h2_basis(3))),
            ] {
                assert_eq!(s.pair(&gamma, &gamma), rat(2 - 2 * n as i64));
                assert!(b_field_image_lattice(&s, &gamma)
                    .unwrap()
                    .same_set(&l.lambda));
            }
        }
    }

    #[test]
    fn p_n_vector_membership() {
        let s = k3n(3);
        let l = k3n_lattices(&s).unwrap();
        let lclass = vec_sub(&s.h2_basis(0), &s.h2_basis(1));
        let v = vec_add(
            &vec_add(&lclass, &vec_scale(&frac(1, 2), &l.delta_t)),
            &s.beta(),
        );
        let v = ExtVector {
            coords: v,
            tag: OrbitTag::Plain,
        };
        assert!(membership(&l.lambda_g, &v).is_some());
        assert!(membership(&l.lambda, &v).is_none());
        assert!(membership(&l.lambda, &ext_vector_point(&s)).is_some());
    }

    #[test]
    fn rank_predicates() {
        let r = |x: i64| BigInt::from(x);
        assert_eq!(rank_predicate_o_orbit(&r(8), 3).unwrap(), Some(r(2)));
        assert_eq!(rank_predicate_o_orbit(&r(12), 3).unwrap(), None);
        assert_eq!(rank_predicate_o_orbit(&r(1), 5).unwrap(), Some(r(1)));
        let k = rank_predicate_kx_orbit(&r(0), 2, &rat(1)).unwrap();
        assert_eq!(k.a, Some(rat(0)));
        let k = rank_predicate_kx_orbit(&r(2), 2, &rat(1)).unwrap();
        assert_eq!(
            (k.holds, k.a, k.a_integral),
            (true, Some(rat(1)), Some(true))
        );
        assert!(!rank_predicate_kx_orbit(&r(3), 2, &rat(1)).unwrap().holds);
        let k = rank_predicate_kx_orbit(&r(-6), 3, &rat(1)).unwrap();
        assert_eq!(k.a, Some(rat(-1)));
    }

    #[test]
    fn hat_aut_examples() {
        let s = k3n(3);
        let shift = Isometry::minus_identity(s.gram().clone());
        let rep = in_hat_aut_plus(&shift, &s).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.disc_action, Some(DiscKind::MinusIdentity));
        let b = s.b_field(&s.h2_basis(4)).unwrap();
        assert!(in_hat_aut_plus(&b, &s).unwrap().holds());
        let s10 = k3n(10);
        let b = s10
            .b_field(&vec_scale(&frac(1, 3), &s10.delta().unwrap()))
            .unwrap();
        let rep = in_hat_aut_plus(&b, &s10).unwrap();
        assert!(!rep.holds());
        assert_eq!(rep.reasons(), vec!["lattice"]);
    }

    #[test]
    fn split_examples() {
        let s = k3n(2);
        let mut ns_rows = vec![zero_vec(23), zero_vec(23)];
        ns_rows[0][0] = rat(1);
        ns_rows[0][1] = rat(1);
        ns_rows[1][22] = rat(1);
        let s = s.with_ns(RatMatrix::from_rows(ns_rows).unwrap()).unwrap();
        let l = k3n_lattices(&s).unwrap();
        let (alg, tr) = split_algebraic(&s, &l.lambda).unwrap();
        assert_eq!(alg.rank() + tr.rank(), 25);
        assert_eq!(alg.rank(), 4);
        let full = ExtMukaiSpace::new(DeformationType::k3n(2).unwrap())
            .with_ns(RatMatrix::identity(23))
            .unwrap();
        let (_, tr) = split_algebraic(&full, &l.lambda).unwrap();
        assert_eq!(tr.rank(), 0);
        let bad = ExtMukaiSpace::new(DeformationType::k3n(2).unwrap())
            .with_ns(RatMatrix::from_rows(vec![vec_scale(&rat(2), &unit_vec(23, 0))]).unwrap())
            .unwrap();
        assert!(split_algebraic(&bad, &l.lambda).is_err());
    }

    #[test]
    fn transport_to_hyperbolic_plane() {
        use crate::isometry::{eichler_transport, Transport};
        for n in [2u32, 3, 5] {
            let s = k3n(n);
            let frame = lambda_eichler_frame(&s).unwrap();
            let lat = k3n_lattices(&s).unwrap();
            let v = vec_add(&lat.alpha_t, &s.beta());
            let w = vec_sub(&s.h2_basis(0), &s.h2_basis(1));
            match eichler_transport(&frame, &v, &w).unwrap() {
                Transport::Word(word) => {
                    assert!(word.len() <= 6, "word length {}", word.len());
                    let mut x = v.clone();
                    for t in &word {
                        x = t.apply(s.gram(), &x);
                    }
                    assert_eq!(x, w);
                }
                Transport::NotFound(r) => panic!("no word: {}", r.as_str()),
            }
        }
    }
}
