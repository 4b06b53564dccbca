//! Named isometries of the extended Mukai space of K3^[n]-type induced by
//! derived equivalences, the transfer `d_n` from the K3 surface, and the
//! relative Poincaré exchange on the algebraic part of a Lagrangian fibration.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{frac, rat, unit_vec, vec_add, vec_scale, RatMatrix, RatVector};
use crate::hk_space::{ext_vector_line_bundle, k3n_lattices, DeformationType, ExtMukaiSpace};
use crate::isometry::{reflection, Isometry};
use crate::lattice::{mukai_gram, QuadLattice};

/// All catalog keys, in listing order.
pub const KEYS: [&str; 8] = [
    "shift",
    "tensor_line_bundle",
    "sign_equivalence",
    "spherical_P",
    "fm_ext1",
    "horja_EZ",
    "poincare",
    "dn_transfer",
];

/// A named isometry with its sign metadata.  `iso = epsilon · raw` when an
/// epsilon is recorded, and `iso = raw` otherwise.
#[derive(Clone, Debug)]
pub struct NamedAction {
    pub key: String,
    pub space: Arc<ExtMukaiSpace>,
    pub iso: Isometry,
    pub raw: Isometry,
    pub epsilon: Option<i8>,
    pub description: String,
}

/// Parameters of [`action`].
#[derive(Clone, Debug, Default)]
pub struct ActionParams {
    /// Half dimension of the K3^[n]-type space (default 2).
    pub n: Option<u32>,
    /// H² class for `tensor_line_bundle`, in ambient coordinates.
    pub lambda: Option<RatVector>,
    /// Genus for `poincare`.
    pub g: Option<u32>,
    /// Isometry of the K3 extended space for `dn_transfer`.
    pub source: Option<Isometry>,
}

fn sign(n: u32) -> i8 {
    if n % 2 == 1 {
        1
    } else {
        -1
    }
}

fn signed(raw: &Isometry, eps: i8) -> Isometry {
    if eps == 1 {
        raw.clone()
    } else {
        raw.negate()
    }
}

/// The K3^[n]-type extended Mukai space.
pub fn k3n_space(n: u32) -> Result<Arc<ExtMukaiSpace>> {
    if n < 2 {
        return Err(Error::Invalid("catalog actions need n >= 2".into()));
    }
    Ok(Arc::new(ExtMukaiSpace::new(DeformationType::k3n(n)?)))
}

/// The extended Mukai space of a K3 surface, basis `(α, K3 basis, β)`.
pub fn k3_surface_space() -> Result<Arc<ExtMukaiSpace>> {
    Ok(Arc::new(ExtMukaiSpace::new(DeformationType::k3n(1)?)))
}

/// The rank-4 space `span(α, λ, f, β)` with `λ² = 2g-2`, `λ·f = 2`, `f² = 0`.
pub fn poincare_space(g: u32) -> Result<Arc<ExtMukaiSpace>> {
    if g < 2 {
        return Err(Error::Invalid("g must be at least 2".into()));
    }
    let gi = g as i64;
    let ns = QuadLattice::from_gram(
        RatMatrix::from_i64(&[vec![2 * gi - 2, 2], vec![2, 0]]),
        Some("NS(M)"),
    )?;
    let dtype = DeformationType::custom(g, rat(1), frac(gi + 3, 4), ns)?;
    Ok(Arc::new(ExtMukaiSpace::new(dtype)))
}

/// `h = -λ/2 + (g-1)/4 f + (g+1)/2 β` in the basis `(α, λ, f, β)`.
pub fn poincare_h(g: u32) -> RatVector {
    let gi = g as i64;
    vec![rat(0), frac(-1, 2), frac(gi - 1, 4), frac(gi + 1, 2)]
}

/// `α ↦ h`, `h ↦ α`, `β ↦ f`, `f ↦ β` on `span(α, λ, f, β)`.
pub fn poincare_isometry(g: u32) -> Result<Isometry> {
    let s = poincare_space(g)?;
    let gi = g as i64;
    let cols = vec![
        poincare_h(g),
        vec![rat(-2), rat(0), rat(gi + 1), frac(gi - 1, 2)],
        unit_vec(4, 3),
        unit_vec(4, 2),
    ];
    Isometry::new(s.gram().clone(), RatMatrix::from_cols(&cols, 4)?)
}

/// Gram of the target `span(α', e', f', β')` with `α'·β' = -1`, `e'·f' = 1`.
pub fn poincare_target_gram() -> RatMatrix {
    mukai_gram(&RatMatrix::from_i64(&[vec![0, 1], vec![1, 0]]))
}

/// `β ↦ f'`, `f ↦ β'`, `α ↦ -e' + (g+1)/2 β'`, `h ↦ α'` from `(α, λ, f, β)`
/// to `(α', e', f', β')`.
pub fn poincare_map(g: u32) -> Result<RatMatrix> {
    if g < 2 {
        return Err(Error::Invalid("g must be at least 2".into()));
    }
    let gi = g as i64;
    let img_alpha = vec![rat(0), rat(-1), rat(0), frac(gi + 1, 2)];
    let img_f = unit_vec(4, 3);
    let img_beta = unit_vec(4, 2);
    let img_h = unit_vec(4, 0);
    // λ = -2h + (g-1)/2 f + (g+1) β.
    let img_lambda = vec_add(
        &vec_add(
            &vec_scale(&rat(-2), &img_h),
            &vec_scale(&frac(gi - 1, 2), &img_f),
        ),
        &vec_scale(&rat(gi + 1), &img_beta),
    );
    RatMatrix::from_cols(&[img_alpha, img_lambda, img_f, img_beta], 4)
}

/// `ι(g)`: extends an isometry of the K3 extended space by the identity on `δ`.
fn iota(k3: &ExtMukaiSpace, s: &ExtMukaiSpace, g: &Isometry) -> Result<RatMatrix> {
    if g.gram().as_ref() != k3.gram().as_ref() {
        return Err(Error::Dimension(
            "dn_transfer needs an isometry of the rank-24 K3 extended space".into(),
        ));
    }
    let dim = s.dim();
    let idx = |j: usize| if j == 23 { 24 } else { j };
    let mut m = RatMatrix::zeros(dim, dim);
    m.set(23, 23, rat(1));
    for i in 0..24 {
        for j in 0..24 {
            let x = g.matrix().get(i, j);
            if !x.is_zero() {
                m.set(idx(i), idx(j), x.clone());
            }
        }
    }
    Ok(m)
}

/// `d_n(g) = det(g)^{n+1} B_{-δ/2} ∘ ι(g) ∘ B_{δ/2}`, returned as `(raw, sign)`
/// with `raw = B_{-δ/2} ∘ ι(g) ∘ B_{δ/2}`.
pub fn dn_transfer_parts(s: &ExtMukaiSpace, g: &Isometry) -> Result<(Isometry, i8)> {
    let k3 = k3_surface_space()?;
    let delta = s.delta()?;
    let m = iota(&k3, s, g)?;
    let b_minus = s.b_field(&vec_scale(&frac(-1, 2), &delta))?;
    let b_plus = s.b_field(&vec_scale(&frac(1, 2), &delta))?;
    let conj = b_minus.matrix().mul(&m).mul(b_plus.matrix());
    let raw = Isometry::new(s.gram().clone(), conj)?;
    let eps = if g.det() == -1 && s.n().is_multiple_of(2) {
        -1
    } else {
        1
    };
    Ok((raw, eps))
}

/// `d_n(g)`.
pub fn dn_transfer(s: &ExtMukaiSpace, g: &Isometry) -> Result<Isometry> {
    let (raw, eps) = dn_transfer_parts(s, g)?;
    Ok(signed(&raw, eps))
}

fn make(
    key: &str,
    space: Arc<ExtMukaiSpace>,
    raw: Isometry,
    epsilon: Option<i8>,
    description: &str,
) -> NamedAction {
    let iso = signed(&raw, epsilon.unwrap_or(1));
    NamedAction {
        key: key.to_string(),
        space,
        iso,
        raw,
        epsilon,
        description: description.to_string(),
    }
}

fn require_n2(key: &str, n: u32) -> Result<()> {
    if n != 2 {
        return Err(Error::Invalid(format!("{key} is only defined for n = 2")));
    }
    Ok(())
}

/// Builds the named action for `key`.
pub fn action(key: &str, params: &ActionParams) -> Result<NamedAction> {
    if key == "poincare" {
        let g = params
            .g
            .ok_or_else(|| Error::Invalid("poincare needs a genus g".into()))?;
        let iso = poincare_isometry(g)?;
        return Ok(make(
            key,
            poincare_space(g)?,
            iso,
            None,
            "exchange of the planes (α, β) and (h, f)",
        ));
    }
    let n = params.n.unwrap_or(2);
    let s = k3n_space(n)?;
    let gram = s.gram().clone();
    match key {
        "shift" => Ok(make(
            key,
            s,
            Isometry::minus_identity(gram),
            None,
            "shift by one acts as -id",
        )),
        "tensor_line_bundle" => {
            let lambda = params
                .lambda
                .clone()
                .ok_or_else(|| Error::Invalid("tensor_line_bundle needs λ".into()))?;
            let b = s.b_field(&lambda)?;
            Ok(make(
                key,
                s,
                b,
                None,
                "tensor product with a line bundle acts as B_λ",
            ))
        }
        "sign_equivalence" => {
            let lat = k3n_lattices(&s)?;
            let raw = reflection(&gram, &lat.delta_t)?;
            Ok(make(key, s, raw, Some(sign(n)), "(-1)^(n+1) s_δ̃"))
        }
        "spherical_P" => {
            let lat = k3n_lattices(&s)?;
            let raw = reflection(&gram, &vec_add(&lat.alpha_t, &s.beta()))?;
            Ok(make(
                key,
                s,
                raw,
                Some(sign(n)),
                "(-1)^(n+1) s_v with v = α̃ + β",
            ))
        }
        "fm_ext1" => {
            require_n2(key, n)?;
            let lat = k3n_lattices(&s)?;
            let raw = reflection(&gram, &vec_add(&lat.alpha_t, &s.beta()))?;
            Ok(make(key, s, raw, Some(-1), "-s_v with v = α̃ + β"))
        }
        "horja_EZ" => {
            require_n2(key, n)?;
            let lat = k3n_lattices(&s)?;
            let raw = reflection(&gram, &vec_add(&lat.delta_t, &s.beta()))?;
            Ok(make(key, s, raw, Some(-1), "-s_v with v = δ̃ + β"))
        }
        "dn_transfer" => {
            let g = params
                .source
                .as_ref()
                .ok_or_else(|| Error::Invalid("dn_transfer needs a K3 isometry".into()))?;
            let (raw, eps) = dn_transfer_parts(&s, g)?;
            Ok(make(
                key,
                s,
                raw,
                Some(eps),
                "det(g)^(n+1) B_{-δ/2} ι(g) B_{δ/2}",
            ))
        }
        _ => Err(Error::UnknownName(format!("catalog key {key}"))),
    }
}

/// One named check of [`poincare_checks`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> NamedCheck {
    NamedCheck {
        name: name.to_string(),
        pass,
        detail,
    }
}

/// Checks of the relative Poincaré exchange for genus `g`.
pub fn poincare_checks(g: u32) -> Result<Vec<NamedCheck>> {
    let s = poincare_space(g)?;
    let h = poincare_h(g);
    let f = unit_vec(4, 2);
    let alpha = s.alpha();
    let beta = s.beta();
    let mut out = Vec::new();
    let qh = s.pair(&h, &h);
    out.push(check("q(h) = 0", qh.is_zero(), format!("q(h) = {qh}")));
    let bfh = s.pair(&f, &vec_scale(&rat(-1), &h));
    out.push(check(
        "b(f,-h) = 1",
        bfh == rat(1),
        format!("b(f,-h) = {bfh}"),
    ));
    let iso = poincare_isometry(g);
    out.push(check(
        "isometry",
        iso.is_ok(),
        "M^T G M = G on span(α, λ, f, β)".into(),
    ));
    let iso = iso?;
    let exchanges = iso.apply(&alpha) == h
        && iso.apply(&h) == alpha
        && iso.apply(&beta) == f
        && iso.apply(&f) == beta;
    out.push(check(
        "exchanges the planes",
        exchanges,
        "α ↔ h and β ↔ f".into(),
    ));
    out.push(check(
        "involution",
        iso.compose(&iso)?.is_identity(),
        "square is the identity".into(),
    ));
    let gi = g as i64;
    let section = vec![rat(0), frac(1, 2), frac(-(gi + 1), 2), frac(gi + 1, 2)];
    let sq = s.pair(&section, &section);
    out.push(check(
        "section vector square",
        sq == rat(-2) * &s.dtype.r_x,
        format!("square {sq}"),
    ));
    let lb = ext_vector_line_bundle(&s, &vec_scale(&rat(-(gi + 1)), &f))?;
    let img = iso.apply(&section);
    out.push(check(
        "section maps to a line bundle vector",
        img == vec_scale(&rat(-1), &lb.coords),
        "image equals -ṽ(L) with c_1(L) = -(g+1) f".into(),
    ));
    let m = poincare_map(g)?;
    let target = poincare_target_gram();
    let preserved = m.transpose().mul(&target).mul(&m) == *s.gram().as_ref();
    out.push(check(
        "Poincaré map preserves the pairing",
        preserved,
        "M^T G' M = G".into(),
    ));
    let hits = m.mul_vec(&h) == unit_vec(4, 0)
        && m.mul_vec(&beta) == unit_vec(4, 2)
        && m.mul_vec(&f) == unit_vec(4, 3);
    out.push(check(
        "Poincaré map images",
        hits,
        "h ↦ α', β ↦ f', f ↦ β'".into(),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::vec_sub;

    #[test]
    fn actions_are_isometries() {
        for n in [2u32, 3] {
            for key in KEYS {
                let mut p = ActionParams {
                    n: Some(n),
                    g: Some(3),
                    ..Default::default()
                };
                let s = k3n_space(n).unwrap();
                p.lambda = Some(s.h2_basis(0));
                if key == "dn_transfer" {
                    let k3 = k3_surface_space().unwrap();
                    p.source =
                        Some(reflection(k3.gram(), &vec_add(&k3.alpha(), &k3.beta())).unwrap());
                }
                match action(key, &p) {
                    Ok(a) => assert_eq!(
                        a.iso
                            .matrix()
                            .transpose()
                            .mul(a.space.gram())
                            .mul(a.iso.matrix()),
                        **a.space.gram()
                    ),
                    Err(e) => assert!(
                        n != 2 && (key == "fm_ext1" || key == "horja_EZ"),
                        "{key}: {e}"
                    ),
                }
            }
        }
    }

    #[test]
    fn spherical_twist_image() {
        let a = action(
            "spherical_P",
            &ActionParams {
                n: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        let s = a.space.clone();
        let o = ext_vector_line_bundle(&s, &s.h2(&vec![rat(0); 23])).unwrap();
        let minus_delta = vec_scale(&rat(-1), &s.delta().unwrap());
        let o_delta = ext_vector_line_bundle(&s, &minus_delta).unwrap();
        assert_eq!(a.iso.apply(&o.coords), vec_scale(&rat(-1), &o_delta.coords));
    }

    #[test]
    fn sign_equivalence_swaps_half_delta() {
        let a = action(
            "sign_equivalence",
            &ActionParams {
                n: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        let s = a.space.clone();
        let lat = k3n_lattices(&s).unwrap();
        let base = vec_add(
            &vec_add(&lat.alpha_t, &s.h2_basis(2)),
            &vec_scale(&rat(5), &s.beta()),
        );
        let half = vec_scale(&frac(1, 2), &lat.delta_t);
        assert_eq!(a.iso.apply(&vec_add(&base, &half)), vec_sub(&base, &half));
    }

    #[test]
    fn dn_of_spherical_reflection() {
        let k3 = k3_surface_space().unwrap();
        let g = reflection(k3.gram(), &vec_add(&k3.alpha(), &k3.beta())).unwrap();
        for n in [2u32, 3] {
            let s = k3n_space(n).unwrap();
            let sp = action(
                "spherical_P",
                &ActionParams {
                    n: Some(n),
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(dn_transfer(&s, &g).unwrap().matrix(), sp.iso.matrix());
        }
    }

    #[test]
    fn poincare_all_pass() {
        for g in 2..=6 {
            for c in poincare_checks(g).unwrap() {
                assert!(c.pass, "g={g}: {} ({})", c.name, c.detail);
            }
        }
    }
}
