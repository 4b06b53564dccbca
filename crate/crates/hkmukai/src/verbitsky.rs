//! The graded model `Sym^n(H̃)` of the Verbitsky component.
//!
//! Elements are sparse maps from monomials `α^a · e_{i1}⋯e_{ik} · β^c` to
//! exact rationals, where `e_i` runs over the H² basis.  The monomial has
//! half-degree `d = k + 2c`, so it sits in cohomological degree `2d`.
//! Products of vectors are symmetric products without normalization, so
//! `b_[n](x_1⋯x_n, y_1⋯y_n) = (-1)^n c_X Σ_σ Π b̃(x_i, y_σ(i))`.
//!
//! The projection `T` onto the image of `ψ` is evaluated lazily through the
//! adjunction `b_SH(m, T x) = b_[n](ψ(m), x)`; [`project_t`] materializes it
//! only when the relevant degree pieces are small.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exact::{
    factorial_q, format_rational, parse_rational, rat, solve_linear, RatMatrix, RatVector, Rational,
};
use crate::hk_space::ExtMukaiSpace;

/// Upper bound on the number of H² monomials enumerated per degree in [`project_t`].
pub const PROJECTION_CAP: usize = 4000;

/// `α^a · e_{h_1}⋯e_{h_k} · β^c` with the H² indices sorted (0-based).
/// Ordering is by half-degree, then `a`, then the index multiset, then `c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    half_degree: u32,
    a: u32,
    h: Vec<u16>,
    c: u32,
}

impl Monomial {
    pub fn new(a: u32, mut h: Vec<u16>, c: u32) -> Self {
        h.sort_unstable();
        Monomial {
            half_degree: h.len() as u32 + 2 * c,
            a,
            h,
            c,
        }
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn h(&self) -> &[u16] {
        &self.h
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// `k + 2c`; the cohomological degree is twice this.
    pub fn half_degree(&self) -> u32 {
        self.half_degree
    }

    /// Number of factors.
    pub fn order(&self) -> u32 {
        self.a + self.h.len() as u32 + self.c
    }

    /// Serialization key `a|i1.i2.…|c`.
    pub fn key(&self) -> String {
        let h: Vec<String> = self.h.iter().map(|i| i.to_string()).collect();
        format!("{}|{}|{}", self.a, h.join("."), self.c)
    }

    pub fn parse_key(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("monomial key {s}")));
        }
        let num = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::Parse(format!("monomial key {s}")))
        };
        let h = if parts[1].is_empty() {
            vec![]
        } else {
            parts[1]
                .split('.')
                .map(|t| {
                    t.parse::<u16>()
                        .map_err(|_| Error::Parse(format!("monomial key {s}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Monomial::new(num(parts[0])?, h, num(parts[2])?))
    }
}

/// Element of `Sym^n(H̃)` for an extended Mukai space.
#[derive(Clone, Debug)]
pub struct SymElement {
    space: Arc<ExtMukaiSpace>,
    n: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for SymElement {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms && same_space(&self.space, &other.space)
    }
}

impl Eq for SymElement {}

fn same_space(a: &Arc<ExtMukaiSpace>, b: &Arc<ExtMukaiSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl SymElement {
    pub fn zero(space: &Arc<ExtMukaiSpace>, n: u32) -> Self {
        SymElement {
            space: space.clone(),
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Element with the given terms; each monomial must have `n` factors.
    pub fn from_terms(
        space: &Arc<ExtMukaiSpace>,
        n: u32,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let b2 = space.dtype.b2();
        let mut out = Self::zero(space, n);
        for (m, c) in terms {
            if m.order() != n {
                return Err(Error::Dimension(format!(
                    "monomial {} does not have {n} factors",
                    m.key()
                )));
            }
            if m.h.iter().any(|&i| i as usize >= b2) {
                return Err(Error::Dimension(format!(
                    "monomial {} indexes outside H²",
                    m.key()
                )));
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    /// Symmetric product of ambient vectors; `n` is the number of factors.
    pub fn product(space: &Arc<ExtMukaiSpace>, factors: &[RatVector]) -> Result<Self> {
        let dim = space.dim();
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        acc.insert(Monomial::new(0, vec![], 0), Rational::one());
        for v in factors {
            if v.len() != dim {
                return Err(Error::Dimension("factor has the wrong length".into()));
            }
            let mut next: BTreeMap<Monomial, Rational> = BTreeMap::new();
            for (m, c) in &acc {
                for (j, x) in v.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let nm = if j == 0 {
                        Monomial::new(m.a + 1, m.h.clone(), m.c)
                    } else if j == dim - 1 {
                        Monomial::new(m.a, m.h.clone(), m.c + 1)
                    } else {
                        let mut h = m.h.clone();
                        h.push((j - 1) as u16);
                        Monomial::new(m.a, h, m.c)
                    };
                    add_into(&mut next, nm, c * x);
                }
            }
            acc = next;
        }
        Ok(SymElement {
            space: space.clone(),
            n: factors.len() as u32,
            terms: acc,
        })
    }

    /// `α^n/n!` for the space's `n`.
    pub fn alpha_power(space: &Arc<ExtMukaiSpace>) -> Self {
        Self::alpha_power_of(space, space.n())
    }

    /// `α^N/N!` in `Sym^N`.
    pub fn alpha_power_of(space: &Arc<ExtMukaiSpace>, big_n: u32) -> Self {
        let mut out = Self::zero(space, big_n);
        out.add_term(
            Monomial::new(big_n, vec![], 0),
            Rational::one() / factorial_q(big_n as u64),
        );
        out
    }

    pub fn space(&self) -> &Arc<ExtMukaiSpace> {
        &self.space
    }

    /// Symmetric power this element lives in.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Half-degrees with a nonzero piece, ascending.
    pub fn half_degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.terms.keys().map(|m| m.half_degree).collect();
        ds.dedup();
        ds
    }

    /// The piece of half-degree `d`.
    pub fn piece(&self, d: u32) -> SymElement {
        SymElement {
            space: self.space.clone(),
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.half_degree == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        add_into(&mut self.terms, m, c);
    }

    fn check_compatible(&self, other: &SymElement) -> Result<()> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::Dimension(
                "elements live over different spaces".into(),
            ));
        }
        if self.n != other.n {
            return Err(Error::Dimension(
                "elements live in different symmetric powers".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &SymElement) -> Result<SymElement> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SymElement) -> Result<SymElement> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, k: &Rational) -> SymElement {
        let mut out = Self::zero(&self.space, self.n);
        if !k.is_zero() {
            out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        }
        out
    }

    /// `{"n": n, "pieces": {"<2d>": {"<key>": "<rational>"}}}`.
    pub fn to_json(&self) -> Value {
        let mut pieces: BTreeMap<u32, Map<String, Value>> = BTreeMap::new();
        for (m, c) in &self.terms {
            pieces
                .entry(2 * m.half_degree)
                .or_default()
                .insert(m.key(), Value::String(format_rational(c)));
        }
        let mut p = Map::new();
        for (d, terms) in pieces {
            p.insert(d.to_string(), Value::Object(terms));
        }
        let mut out = Map::new();
        out.insert("n".into(), Value::from(self.n));
        out.insert("pieces".into(), Value::Object(p));
        Value::Object(out)
    }

    pub fn from_json(space: &Arc<ExtMukaiSpace>, v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("SymElement needs an integer \"n\"".into()))?
            as u32;
        let pieces = v
            .get("pieces")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("SymElement needs a \"pieces\" object".into()))?;
        let mut terms = Vec::new();
        for (deg, piece) in pieces {
            let deg: u32 = deg
                .parse()
                .map_err(|_| Error::Parse(format!("degree {deg}")))?;
            let piece = piece
                .as_object()
                .ok_or_else(|| Error::Parse("piece must be an object".into()))?;
            for (key, c) in piece {
                let m = Monomial::parse_key(key)?;
                if 2 * m.half_degree != deg {
                    return Err(Error::Parse(format!(
                        "monomial {key} is not of degree {deg}"
                    )));
                }
                let c = c
                    .as_str()
                    .ok_or_else(|| Error::Parse("coefficients are strings".into()))?;
                terms.push((m, parse_rational(c)?));
            }
        }
        Self::from_terms(space, n, terms)
    }
}

fn add_into(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&m) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                map.remove(&m);
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

fn h2_gram(space: &ExtMukaiSpace) -> &RatMatrix {
    space.dtype.h2.gram()
}

/// H² coordinates of an ambient vector that must lie in H².
fn h2_coords(space: &ExtMukaiSpace, omega: &[Rational]) -> Result<RatVector> {
    if !space.is_h2(omega) {
        return Err(Error::Invalid("class must lie in H²".into()));
    }
    Ok(space.h2_part(omega))
}

/// Permanent of `[b(e_{h_i}, e_{g_j})]` by dynamic programming over column subsets.
fn permanent(gram: &RatMatrix, h: &[u16], g: &[u16]) -> Rational {
    let k = h.len();
    if k == 0 {
        return Rational::one();
    }
    let mut dp = vec![Rational::zero(); 1 << k];
    dp[0] = Rational::one();
    for mask in 0usize..(1 << k) {
        if dp[mask].is_zero() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == k {
            continue;
        }
        let cur = dp[mask].clone();
        for (j, gj) in g.iter().enumerate() {
            if mask & (1 << j) == 0 {
                let b = gram.get(h[row] as usize, *gj as usize);
                if !b.is_zero() {
                    dp[mask | (1 << j)] += &cur * b;
                }
            }
        }
    }
    dp[(1 << k) - 1].clone()
}

fn monomial_pairing(space: &ExtMukaiSpace, n: u32, x: &Monomial, y: &Monomial) -> Rational {
    if x.a != y.c || x.c != y.a || x.h.len() != y.h.len() {
        return Rational::zero();
    }
    let perm = permanent(h2_gram(space), &x.h, &y.h);
    if perm.is_zero() {
        return perm;
    }
    let sign = if (n + x.a + x.c).is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    };
    sign * &space.dtype.c_x * factorial_q(x.a as u64) * factorial_q(x.c as u64) * perm
}

/// `b_[n](x, y)`.
pub fn pairing_bn(x: &SymElement, y: &SymElement) -> Result<Rational> {
    x.check_compatible(y)?;
    let mut index: HashMap<(u32, u32, usize), Vec<(&Monomial, &Rational)>> = HashMap::new();
    for (m, c) in &y.terms {
        index.entry((m.a, m.c, m.h.len())).or_default().push((m, c));
    }
    let mut total = Rational::zero();
    for (mx, cx) in &x.terms {
        if let Some(list) = index.get(&(mx.c, mx.a, mx.h.len())) {
            for (my, cy) in list {
                let p = monomial_pairing(&x.space, x.n, mx, my);
                if !p.is_zero() {
                    total += p * cx * *cy;
                }
            }
        }
    }
    Ok(total)
}

/// `Δ(v_1⋯v_n) = Σ_{i<j} b̃(v_i, v_j) v_1⋯v̂_i⋯v̂_j⋯v_n`, landing in `Sym^{n-2}`.
pub fn laplacian(x: &SymElement) -> Result<SymElement> {
    if x.n < 2 {
        return Err(Error::Invalid("the Laplacian needs n >= 2".into()));
    }
    let gram = h2_gram(&x.space);
    let mut out = SymElement::zero(&x.space, x.n - 2);
    for (m, c) in &x.terms {
        if m.a > 0 && m.c > 0 {
            let k = -rat(m.a as i64) * rat(m.c as i64);
            out.add_term(Monomial::new(m.a - 1, m.h.clone(), m.c - 1), k * c);
        }
        let k = m.h.len();
        for i in 0..k {
            for j in i + 1..k {
                let b = gram.get(m.h[i] as usize, m.h[j] as usize);
                if b.is_zero() {
                    continue;
                }
                let rest: Vec<u16> =
                    m.h.iter()
                        .enumerate()
                        .filter(|(t, _)| *t != i && *t != j)
                        .map(|(_, v)| *v)
                        .collect();
                out.add_term(Monomial::new(m.a, rest, m.c), b * c);
            }
        }
    }
    Ok(out)
}

fn lefschetz_coords(space: &ExtMukaiSpace, w: &[Rational], x: &SymElement) -> SymElement {
    let bw = h2_gram(space).mul_vec(w);
    let mut out = SymElement::zero(&x.space, x.n);
    for (m, c) in &x.terms {
        if m.a > 0 {
            let ca = c * rat(m.a as i64);
            for (j, wj) in w.iter().enumerate() {
                if wj.is_zero() {
                    continue;
                }
                let mut h = m.h.clone();
                h.push(j as u16);
                out.add_term(Monomial::new(m.a - 1, h, m.c), &ca * wj);
            }
        }
        let mut t = 0;
        while t < m.h.len() {
            let i = m.h[t];
            let mult = m.h[t..].iter().take_while(|&&v| v == i).count();
            let b = &bw[i as usize];
            if !b.is_zero() {
                let mut h = m.h.clone();
                h.remove(t);
                out.add_term(Monomial::new(m.a, h, m.c + 1), c * rat(mult as i64) * b);
            }
            t += mult;
        }
    }
    out
}

/// The derivation `e_ω` with `e_ω(α) = ω`, `e_ω(μ) = b(ω,μ)β`, `e_ω(β) = 0`.
pub fn lefschetz_e(omega: &[Rational], x: &SymElement) -> Result<SymElement> {
    let w = h2_coords(&x.space, omega)?;
    Ok(lefschetz_coords(&x.space, &w, x))
}

/// `ψ(ω_1⋯ω_k) = e_{ω_1}∘…∘e_{ω_k}(α^n/n!)`.
pub fn psi_monomial(space: &Arc<ExtMukaiSpace>, omegas: &[RatVector]) -> Result<SymElement> {
    let n = space.n();
    if omegas.len() > 2 * n as usize {
        return Err(Error::Invalid(format!("ψ takes at most {} classes", 2 * n)));
    }
    let coords = omegas
        .iter()
        .map(|w| h2_coords(space, w))
        .collect::<Result<Vec<_>>>()?;
    let mut x = SymElement::alpha_power(space);
    for w in coords.iter().rev() {
        x = lefschetz_coords(space, w, &x);
    }
    Ok(x)
}

/// True when `x` has a nonzero piece pairing with `ψ` of a `k`-fold monomial.
pub fn degree_matches(k: usize, x: &SymElement) -> bool {
    let target = 2 * x.n as usize;
    k <= target && x.terms.keys().any(|m| m.half_degree as usize == target - k)
}

/// `b_[n](ψ(m), x)` for `m = ω_1⋯ω_k`, which equals `b_SH(m, T(x))`.
/// Evaluated as `(-1)^k c_X · [β^n] e_{ω_k}⋯e_{ω_1}(x)` since each `e_ω` is
/// skew-adjoint and `α^n/n!` pairs only with `β^n`.  Degree mismatch gives 0.
pub fn pair_with_sh(m: &[RatVector], x: &SymElement) -> Result<Rational> {
    let space = &x.space;
    if x.n != space.n() {
        return Err(Error::Dimension(
            "element is not in Sym^n for the space's n".into(),
        ));
    }
    let coords = m
        .iter()
        .map(|w| h2_coords(space, w))
        .collect::<Result<Vec<_>>>()?;
    let k = coords.len();
    if !degree_matches(k, x) {
        return Ok(Rational::zero());
    }
    let mut y = x.piece((2 * x.n as usize - k) as u32);
    for w in &coords {
        y = lefschetz_coords(space, w, &y);
    }
    let top = y.coefficient(&Monomial::new(0, vec![], x.n));
    let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
    Ok(sign * &space.dtype.c_x * top)
}

/// `b_[n](ψ(m), x)` with `ψ(m)` materialized; the second path for cross-checks.
pub fn pair_with_sh_direct(m: &[RatVector], x: &SymElement) -> Result<Rational> {
    pairing_bn(&psi_monomial(&x.space, m)?, x)
}

/// Multisets of size `d` from `0..b`, in lexicographic order.
fn multisets(b: usize, d: usize) -> Vec<Vec<u16>> {
    fn rec(start: usize, b: usize, d: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..b {
            cur.push(i as u16);
            rec(i, b, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, b, d, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r.min(usize::MAX as u128) as usize
}

/// Basis of the image of `ψ` in half-degree `d`, chosen greedily from
/// `ψ(e_{i1}⋯e_{id})` in lexicographic order.
fn sh_basis(space: &Arc<ExtMukaiSpace>, d: u32) -> Result<Vec<SymElement>> {
    let b2 = space.dtype.b2();
    let count = binomial(b2 + d as usize - 1, d as usize);
    if count > PROJECTION_CAP {
        return Err(Error::CapExceeded(format!(
            "{count} monomials in degree {}",
            2 * d
        )));
    }
    let n = space.n();
    let target = binomial(
        b2 + d.min(2 * n - d) as usize - 1,
        d.min(2 * n - d) as usize,
    );
    let images: Vec<SymElement> = multisets(b2, d as usize)
        .into_iter()
        .map(|h| {
            let omegas: Vec<RatVector> = h.iter().map(|&i| space.h2_basis(i as usize)).collect();
            psi_monomial(space, &omegas)
        })
        .collect::<Result<_>>()?;
    let mut monos: Vec<&Monomial> = images.iter().flat_map(|x| x.terms.keys()).collect();
    monos.sort();
    monos.dedup();
    let col: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let cols: Vec<RatVector> = images
        .iter()
        .map(|x| {
            let mut v = vec![Rational::zero(); monos.len()];
            for (m, c) in &x.terms {
                v[col[m]] = c.clone();
            }
            v
        })
        .collect();
    let mat = RatMatrix::from_cols(&cols, monos.len())?;
    let (_, pivots) = mat.rref();
    if pivots.len() != target {
        return Err(Error::Degenerate(format!(
            "image of ψ in degree {} has dimension {} instead of {target}",
            2 * d,
            pivots.len()
        )));
    }
    Ok(pivots.into_iter().map(|i| images[i].clone()).collect())
}

/// The `b_[n]`-orthogonal projection onto the image of `ψ`, degree by degree.
pub fn project_t(x: &SymElement) -> Result<SymElement> {
    let space = &x.space;
    let n = space.n();
    if x.n != n {
        return Err(Error::Dimension(
            "element is not in Sym^n for the space's n".into(),
        ));
    }
    let mut out = SymElement::zero(space, n);
    for d in x.half_degrees() {
        let piece = x.piece(d);
        let u = sh_basis(space, d)?;
        let w = sh_basis(space, 2 * n - d)?;
        let m = u.len();
        let mut gram = RatMatrix::zeros(m, m);
        for (i, ui) in u.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                gram.set(j, i, pairing_bn(ui, wj)?);
            }
        }
        let rhs = w
            .iter()
            .map(|wj| pairing_bn(&piece, wj))
            .collect::<Result<Vec<_>>>()?;
        let coeffs = solve_linear(&gram, &rhs)
            .filter(|_| gram.rank() == m)
            .ok_or_else(|| {
                Error::Degenerate(format!(
                    "pairing between degrees {} and {} is degenerate",
                    2 * d,
                    4 * n - 2 * d
                ))
            })?;
        for (ui, ci) in u.iter().zip(coeffs.iter()) {
            out = out.add(&ui.scale(ci))?;
        }
    }
    Ok(out)
}

/// `(α + r_X β)^n / n!`.
pub fn sqrt_todd_bar_raw(space: &Arc<ExtMukaiSpace>) -> Result<SymElement> {
    let n = space.n();
    let mut v = space.alpha();
    v[space.dim() - 1] = space.dtype.r_x.clone();
    let factors = vec![v; n as usize];
    Ok(SymElement::product(space, &factors)?.scale(&(Rational::one() / factorial_q(n as u64))))
}

/// `T((α + r_X β)^n / n!)`.
pub fn sqrt_todd_bar(space: &Arc<ExtMukaiSpace>) -> Result<SymElement> {
    project_t(&sqrt_todd_bar_raw(space)?)
}

/// `(α+2β)⋯(α+(n+1)β)/n!` when `4 r_X - n = 3` (K3n, OG10) and `(α+β)⋯(α+nβ)/n!`
/// when `4 r_X - n = 1` (Kumn, OG6).
pub fn todd_bar_raw(space: &Arc<ExtMukaiSpace>) -> Result<SymElement> {
    let n = space.n() as i64;
    let excess = rat(4) * &space.dtype.r_x - rat(n);
    let shift = if excess == rat(3) {
        1
    } else if excess == rat(1) {
        0
    } else {
        return Err(Error::Invalid(format!(
            "todd_bar needs 4 r_X - n to be 1 or 3, found {}",
            format_rational(&excess)
        )));
    };
    let factors: Vec<RatVector> = (1..=n)
        .map(|i| {
            let mut v = space.alpha();
            v[space.dim() - 1] = rat(i + shift);
            v
        })
        .collect();
    Ok(SymElement::product(space, &factors)?.scale(&(Rational::one() / factorial_q(n as u64))))
}

/// `T` of [`todd_bar_raw`].
pub fn todd_bar(space: &Arc<ExtMukaiSpace>) -> Result<SymElement> {
    project_t(&todd_bar_raw(space)?)
}

/// `c_X Σ_{perfect matchings} Π b(ω_i, ω_j)` over `2n` classes.
pub fn integrate(space: &Arc<ExtMukaiSpace>, omegas: &[RatVector]) -> Result<Rational> {
    if omegas.len() != 2 * space.n() as usize {
        return Err(Error::Dimension(format!(
            "integration needs {} classes",
            2 * space.n()
        )));
    }
    for w in omegas {
        h2_coords(space, w)?;
    }
    let b: Vec<Vec<Rational>> = omegas
        .iter()
        .map(|x| omegas.iter().map(|y| space.pair(x, y)).collect())
        .collect();
    fn matchings(b: &[Vec<Rational>], left: &mut Vec<usize>) -> Rational {
        if left.is_empty() {
            return Rational::one();
        }
        let first = left.remove(0);
        let mut total = Rational::zero();
        for t in 0..left.len() {
            let partner = left.remove(t);
            if !b[first][partner].is_zero() {
                total += &b[first][partner] * matchings(b, left);
            }
            left.insert(t, partner);
        }
        left.insert(0, first);
        total
    }
    let mut idx: Vec<usize> = (0..omegas.len()).collect();
    Ok(&space.dtype.c_x * matchings(&b, &mut idx))
}

/// `Σ_k (1/k!) b_SH(ω^k, T(x))` for `k = 0..=2n`.
pub fn exp_pairing(omega: &[Rational], x: &SymElement) -> Result<Rational> {
    let n = x.space.n() as usize;
    let mut total = Rational::zero();
    let mut m: Vec<RatVector> = Vec::new();
    for k in 0..=2 * n {
        total += pair_with_sh(&m, x)? / factorial_q(k as u64);
        m.push(omega.to_vec());
    }
    Ok(total)
}

/// `χ(L) = Σ_k (1/k!) b_SH(λ^k, t̄d)`.
pub fn euler_char_line_bundle(space: &Arc<ExtMukaiSpace>, lambda: &[Rational]) -> Result<Rational> {
    exp_pairing(lambda, &todd_bar_raw(space)?)
}

/// `∫ q_i ω^{2n-2i} = c_X (2n-2i)! / (2^{n-i} (n-i)!) · b^{n-i}` with `b = b(ω,ω)`.
pub fn q_defining_value(space: &ExtMukaiSpace, i: u32, b: &Rational) -> Rational {
    let n = space.n();
    let m = n - i;
    let mut pow = Rational::one();
    for _ in 0..m {
        pow *= b;
    }
    &space.dtype.c_x * factorial_q(2 * m as u64) / (factorial_q(m as u64) * rat(1i64 << m)) * pow
}

/// Coefficient of `α^{N-j+k} ω^{j-2k} β^k / (N-j+k)!` in `e_ω^j(α^N/N!)`,
/// divided by `b(ω,ω)^k`: `j! / ((j-2k)! k! 2^k)`.
pub fn besse_coefficient(j: u32, k: u32) -> Option<Rational> {
    if 2 * k > j {
        return None;
    }
    Some(
        factorial_q(j as u64)
            / (factorial_q((j - 2 * k) as u64) * factorial_q(k as u64) * rat(1i64 << k)),
    )
}

/// `(m+k)! / ((m-k)! k! 2^k)`, the coefficients of the Bessel polynomial `y_m`.
pub fn bessel_coefficient(m: u32, k: u32) -> Option<Rational> {
    if k > m {
        return None;
    }
    Some(
        factorial_q((m + k) as u64)
            / (factorial_q((m - k) as u64) * factorial_q(k as u64) * rat(1i64 << k)),
    )
}

/// The closed form of `e_ω^j(α^N/N!)` built from [`besse_coefficient`].
pub fn besse_expansion(
    space: &Arc<ExtMukaiSpace>,
    omega: &[Rational],
    j: u32,
    big_n: u32,
) -> Result<SymElement> {
    h2_coords(space, omega)?;
    let b = space.pair(omega, omega);
    let mut out = SymElement::zero(space, big_n);
    for k in 0..=j / 2 {
        let alpha_pow = big_n as i64 - j as i64 + k as i64;
        if alpha_pow < 0 {
            continue;
        }
        let mut factors = vec![space.alpha(); alpha_pow as usize];
        factors.extend(std::iter::repeat_n(omega.to_vec(), (j - 2 * k) as usize));
        factors.extend(std::iter::repeat_n(space.beta(), k as usize));
        let mut coeff = besse_coefficient(j, k).expect("k <= j/2") / factorial_q(alpha_pow as u64);
        for _ in 0..k {
            coeff *= &b;
        }
        out = out.add(&SymElement::product(space, &factors)?.scale(&coeff))?;
    }
    Ok(out)
}

/// `e_ω^j(α^N/N!)` computed by repeated application of the derivation.
pub fn e_power_alpha(
    space: &Arc<ExtMukaiSpace>,
    omega: &[Rational],
    j: u32,
    big_n: u32,
) -> Result<SymElement> {
    let mut x = SymElement::alpha_power_of(space, big_n);
    for _ in 0..j {
        x = lefschetz_e(omega, &x)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, rat_vec};
    use crate::hk_space::DeformationType;
    use crate::lattice::QuadLattice;

    fn toy(n: u32) -> Arc<ExtMukaiSpace> {
        let h2 = QuadLattice::from_gram(
            RatMatrix::from_i64(&[vec![2, 1, 0], vec![1, -2, 0], vec![0, 0, -2]]),
            None,
        )
        .unwrap();
        Arc::new(ExtMukaiSpace::new(
            DeformationType::custom(n, rat(1), frac(n as i64 + 3, 4), h2).unwrap(),
        ))
    }

    fn k3n(n: u32) -> Arc<ExtMukaiSpace> {
        Arc::new(ExtMukaiSpace::new(DeformationType::k3n(n).unwrap()))
    }

    fn kumn(n: u32) -> Arc<ExtMukaiSpace> {
        Arc::new(ExtMukaiSpace::new(DeformationType::kumn(n).unwrap()))
    }

    fn ab(s: &Arc<ExtMukaiSpace>, i: u32) -> SymElement {
        let n = s.n();
        SymElement::from_terms(s, n, [(Monomial::new(i, vec![], n - i), rat(1))]).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let s = toy(3);
        for i in 0..=3u32 {
            let x = ab(&s, i);
            let y = ab(&s, 3 - i);
            let expect = factorial_q(i as u64) * factorial_q(3 - i as u64);
            assert_eq!(pairing_bn(&x, &y).unwrap(), expect);
        }
        assert!(pairing_bn(&ab(&s, 3), &ab(&s, 3)).unwrap().is_zero());
        let s = k3n(2);
        assert_eq!(
            pairing_bn(&SymElement::alpha_power(&s), &todd_bar_raw(&s).unwrap()).unwrap(),
            rat(3)
        );
    }

    #[test]
    fn laplacian_examples() {
        let s = toy(3);
        assert!(laplacian(&ab(&s, 3)).unwrap().is_zero());
        let d = laplacian(&ab(&s, 2)).unwrap();
        assert_eq!(d.coefficient(&Monomial::new(1, vec![], 0)), rat(-2));
        let isotropic = s.h2(&rat_vec(&[1, 0, 1]));
        assert!(s.pair(&isotropic, &isotropic).is_zero());
        let p = SymElement::product(&s, &vec![isotropic.clone(); 3]).unwrap();
        assert!(laplacian(&p).unwrap().is_zero());
        assert_eq!(psi_monomial(&s, &vec![isotropic.clone(); 3]).unwrap(), p);
    }

    #[test]
    fn psi_in_kernel_and_paths_agree() {
        let s = toy(3);
        let vs = [
            rat_vec(&[1, 0, 0]),
            rat_vec(&[0, 1, 1]),
            rat_vec(&[1, -1, 2]),
        ];
        for k in 0..=6usize {
            let m: Vec<RatVector> = (0..k).map(|i| s.h2(&vs[i % 3])).collect();
            let p = psi_monomial(&s, &m).unwrap();
            assert!(laplacian(&p).unwrap().is_zero());
            let x = sqrt_todd_bar_raw(&s).unwrap();
            assert_eq!(
                pair_with_sh(&m, &x).unwrap(),
                pair_with_sh_direct(&m, &x).unwrap()
            );
        }
        let m: Vec<RatVector> = vs.iter().chain(vs.iter()).map(|v| s.h2(v)).collect();
        assert_eq!(
            integrate(&s, &m).unwrap(),
            pair_with_sh(&[], &psi_monomial(&s, &m).unwrap()).unwrap()
        );
    }

    #[test]
    fn projection_properties() {
        let s = toy(2);
        let x = sqrt_todd_bar_raw(&s).unwrap();
        let t = project_t(&x).unwrap();
        assert_eq!(project_t(&t).unwrap(), t);
        assert!(laplacian(&t).unwrap().is_zero());
        let y = SymElement::product(&s, &[s.h2(&rat_vec(&[1, 2, 0])), s.beta()]).unwrap();
        let ty = project_t(&y).unwrap();
        assert_eq!(pairing_bn(&t, &y).unwrap(), pairing_bn(&x, &ty).unwrap());
        let w = s.h2(&rat_vec(&[1, 1, 1]));
        for k in [0usize, 2, 4] {
            let m = vec![w.clone(); k];
            assert_eq!(
                pairing_bn(&psi_monomial(&s, &m).unwrap(), &t).unwrap(),
                pair_with_sh(&m, &x).unwrap()
            );
        }
    }

    #[test]
    fn surface_case() {
        let s = k3n(1);
        let t = sqrt_todd_bar(&s).unwrap();
        assert_eq!(
            t,
            SymElement::product(
                &s,
                &[{
                    let mut v = s.alpha();
                    v[23] = rat(1);
                    v
                }]
            )
            .unwrap()
        );
        let td = todd_bar(&s).unwrap();
        assert_eq!(td.coefficient(&Monomial::new(0, vec![], 1)), rat(2));
        let lambda = s.h2_basis(0);
        let lam = vec_sum(&lambda, &s.h2_basis(1), 3);
        let ell = s.pair(&lam, &lam);
        assert_eq!(
            euler_char_line_bundle(&s, &lam).unwrap(),
            ell / rat(2) + rat(2)
        );
    }

    fn vec_sum(a: &[Rational], b: &[Rational], k: i64) -> RatVector {
        a.iter().zip(b).map(|(x, y)| x + rat(k) * y).collect()
    }

    #[test]
    fn euler_characteristics() {
        let s = k3n(2);
        assert_eq!(
            euler_char_line_bundle(&s, &crate::exact::zero_vec(25)).unwrap(),
            rat(3)
        );
        let lam = vec_sum(&s.h2_basis(0), &s.h2_basis(1), 2);
        let ell = s.pair(&lam, &lam);
        assert_eq!(
            euler_char_line_bundle(&s, &lam).unwrap(),
            &ell * &ell / rat(8) + rat(5) * &ell / rat(4) + rat(3)
        );
        let s = kumn(2);
        assert_eq!(
            euler_char_line_bundle(&s, &crate::exact::zero_vec(9)).unwrap(),
            rat(3)
        );
    }

    #[test]
    fn besse_expansion_matches() {
        let s = toy(2);
        let w = s.h2(&rat_vec(&[1, 2, -1]));
        for j in 0..=6u32 {
            assert_eq!(
                e_power_alpha(&s, &w, j, 6).unwrap(),
                besse_expansion(&s, &w, j, 6).unwrap()
            );
        }
        for j in 0..=8u32 {
            for k in 0..=j / 2 {
                assert_eq!(besse_coefficient(j, k), bessel_coefficient(j - k, k));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let s = toy(2);
        let x = psi_monomial(&s, &[s.h2(&rat_vec(&[1, 0, 2]))]).unwrap();
        let v = x.to_json();
        assert_eq!(SymElement::from_json(&s, &v).unwrap(), x);
        assert_eq!(
            Monomial::parse_key("1|0.2|0").unwrap(),
            Monomial::new(1, vec![2, 0], 0)
        );
    }
}
