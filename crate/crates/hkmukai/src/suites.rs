//! Verification suites behind `verify <suite>`.  Each suite exercises one
//! family of identities with seeded random sampling and returns a [`Report`].

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::catalog::{
    action, dn_transfer, dn_transfer_parts, k3_surface_space, k3n_space, poincare_checks,
    ActionParams, KEYS,
};
use crate::error::{Error, Result};
use crate::exact::{
    factorial, factorial_q, format_rational, frac, rat, vec_add, vec_scale, vec_sub, zero_vec,
    RatMatrix, RatVector, Rational,
};
use crate::hk_space::{
    ext_vector_line_bundle, k3n_lattices, lambda_eichler_frame, rank_predicate_kx_orbit,
    scaled_lambda_family, DeformationType, ExtMukaiSpace,
};
use crate::io::vec_to_json;
use crate::isometry::{
    b_field, eichler_transport, eichler_transvection, reflection, DiscKind, Isometry, Transport,
    TransportFailure,
};
use crate::lattice::{discriminant_group, is_primitive, orthogonal_complement, QuadLattice};
use crate::moduli::{disc_lemma_check, fineness, AlgebraicMukaiLattice, MukaiVectorK3};
use crate::report::Report;
use crate::verbitsky::{
    besse_coefficient, besse_expansion, bessel_coefficient, e_power_alpha, exp_pairing, laplacian,
    lefschetz_e, pair_with_sh, pairing_bn, psi_monomial, q_defining_value, sqrt_todd_bar_raw,
    Monomial, SymElement,
};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_241_018;

/// Suite names accepted by `verify`, in execution order for `all`.
pub const SUITES: [&str; 13] = [
    "linearisation",
    "sqrt-todd",
    "besse",
    "pairing",
    "catalog",
    "dn",
    "lambda-invariance",
    "counterexample",
    "eichler",
    "isotropy",
    "moduli",
    "rank",
    "poincare",
];

/// Options shared by the suites.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Restricts suites that range over `n` to this value.
    pub n: Option<u32>,
    /// Restricts the linearisation suites to a custom H² of this rank.
    pub h2_rank: Option<usize>,
    /// Upper bound on `|r|` in the rank suite.
    pub rank_bound: i64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            n: None,
            h2_rank: None,
            rank_bound: 1_000_000,
        }
    }
}

/// Runs the named suite, or every suite for `all`.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Report> {
    let command = vec!["verify".to_string(), name.to_string()];
    if name == "all" {
        let mut report = Report::new(command);
        for s in SUITES {
            report.merge(s, run_suite(s, opts)?);
        }
        return Ok(report);
    }
    let mut r = Report::new(command);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match name {
        "linearisation" => linearisation(&mut r, opts, &mut rng)?,
        "sqrt-todd" => sqrt_todd(&mut r, opts, &mut rng)?,
        "besse" => besse(&mut r, &mut rng)?,
        "pairing" => pairing(&mut r, opts)?,
        "catalog" => catalog_suite(&mut r, opts, &mut rng)?,
        "dn" => dn_suite(&mut r, opts, &mut rng)?,
        "lambda-invariance" => lambda_invariance(&mut r, opts, &mut rng)?,
        "counterexample" => counterexample(&mut r)?,
        "eichler" => eichler(&mut r, opts, &mut rng)?,
        "isotropy" => isotropy(&mut r, opts, &mut rng)?,
        "moduli" => moduli_suite(&mut r)?,
        "rank" => rank_suite(&mut r, opts)?,
        "poincare" => poincare_suite(&mut r)?,
        _ => return Err(Error::UnknownName(format!("suite {name}"))),
    }
    r.set("seed", json!(opts.seed));
    Ok(r)
}

/// `U ⊕ ⟨-2⟩^{r-2}` for `r >= 2`, `⟨2⟩` for `r = 1`.
pub fn custom_h2(rank: usize) -> Result<QuadLattice> {
    if rank == 0 {
        return Err(Error::Invalid("H² rank must be positive".into()));
    }
    let gram = if rank == 1 {
        RatMatrix::from_i64(&[vec![2]])
    } else {
        let mut d = vec![rat(-2); rank - 2];
        d.insert(0, rat(0));
        d.insert(0, rat(0));
        let mut m = RatMatrix::diagonal(&d);
        m.set(0, 1, rat(1));
        m.set(1, 0, rat(1));
        m
    };
    QuadLattice::from_gram(gram, Some("custom"))
}

/// Custom deformation type with `c_X = 2`, `r_X = 3/4` on [`custom_h2`].
pub fn custom_space(n: u32, rank: usize) -> Result<Arc<ExtMukaiSpace>> {
    Ok(Arc::new(ExtMukaiSpace::new(DeformationType::custom(
        n,
        rat(2),
        frac(3, 4),
        custom_h2(rank)?,
    )?)))
}

fn spaces_for(n: u32, opts: &SuiteOptions) -> Result<Vec<(String, Arc<ExtMukaiSpace>)>> {
    if let Some(rank) = opts.h2_rank {
        return Ok(vec![(format!("custom{rank}"), custom_space(n, rank)?)]);
    }
    Ok(vec![
        (
            "K3n".into(),
            Arc::new(ExtMukaiSpace::new(DeformationType::k3n(n)?)),
        ),
        (
            "Kumn".into(),
            Arc::new(ExtMukaiSpace::new(DeformationType::kumn(n)?)),
        ),
        ("custom3".into(), custom_space(n, 3)?),
    ])
}

/// Random H² class with entries in `[-3, 3]`, supported on at most six
/// coordinates for large H².
pub fn random_h2(rng: &mut ChaCha8Rng, space: &ExtMukaiSpace) -> RatVector {
    let b2 = space.dtype.b2();
    let mut idx: Vec<usize> = (0..b2).collect();
    if b2 > 8 {
        idx.shuffle(rng);
        idx.truncate(6);
    }
    let mut v = zero_vec(space.dim());
    for i in idx {
        v[i + 1] = rat(rng.gen_range(-3..=3));
    }
    v
}

fn pow(x: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}

fn linearisation(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or(vec![2, 3, 4], |n| vec![n]);
    for n in ns {
        for (fam, s) in spaces_for(n, opts)? {
            let raw = sqrt_todd_bar_raw(&s)?;
            let mut count = 0;
            let mut failure = None;
            for _ in 0..10 {
                let w = random_h2(rng, &s);
                let b = s.pair(&w, &w);
                for i in 0..=n {
                    let m = vec![w.clone(); (2 * n - 2 * i) as usize];
                    let lhs = pair_with_sh(&m, &raw)?;
                    let rhs =
                        pow(&s.dtype.r_x, i) / factorial_q(i as u64) * q_defining_value(&s, i, &b);
                    count += 1;
                    if lhs != rhs && failure.is_none() {
                        failure = Some(format!("i={i}, b={b}: {lhs} != {rhs}"));
                    }
                }
            }
            let detail = failure
                .clone()
                .unwrap_or_else(|| format!("{count} identities"));
            r.check(format!("n={n} {fam}"), failure.is_none(), detail);
        }
    }
    Ok(())
}

fn sqrt_todd(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or(vec![1, 2, 3, 4], |n| vec![n]);
    for n in ns {
        for (fam, s) in spaces_for(n, opts)? {
            let raw = sqrt_todd_bar_raw(&s)?;
            let c = &s.dtype.c_x;
            let rx = &s.dtype.r_x;
            let integral = c * pow(rx, n) / factorial_q(n as u64);
            let total = pair_with_sh(&[], &raw)?;
            r.check(
                format!("n={n} {fam} integral"),
                total == integral,
                format!("{total}"),
            );
            let mut seen = BTreeSet::new();
            let mut tries = 0;
            let mut failure = None;
            while seen.len() < 5 && tries < 200 {
                tries += 1;
                let w = random_h2(rng, &s);
                let b = s.pair(&w, &w);
                if !seen.insert(b.clone()) {
                    continue;
                }
                let lhs = exp_pairing(&w, &raw)?;
                let rhs = pow(&(Rational::one() + &b / (rat(2) * rx)), n) * &integral;
                if lhs != rhs && failure.is_none() {
                    failure = Some(format!("b={b}: {lhs} != {rhs}"));
                }
            }
            let ok = failure.is_none() && seen.len() == 5;
            let vals: Vec<String> = seen.iter().map(format_rational).collect();
            r.check(
                format!("n={n} {fam} exp identity"),
                ok,
                failure.unwrap_or_else(|| format!("b(ω,ω) ∈ {{{}}}", vals.join(", "))),
            );
        }
    }
    Ok(())
}

fn besse(r: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let s = custom_space(4, 3)?;
    let big_n = 8;
    for j in 0..=8u32 {
        let mut ok = true;
        for _ in 0..3 {
            let w = random_h2(rng, &s);
            ok &= e_power_alpha(&s, &w, j, big_n)? == besse_expansion(&s, &w, j, big_n)?;
        }
        r.check(
            format!("expansion j={j}"),
            ok,
            "e_ω^j(α^8/8!) against the closed form",
        );
        let bessel = (0..=j / 2).all(|k| besse_coefficient(j, k) == bessel_coefficient(j - k, k));
        r.check(
            format!("bessel index j={j}"),
            bessel,
            "coefficient k equals the Bessel coefficient y_{j-k}",
        );
        if j % 2 == 0 {
            let m = j / 2;
            let top = besse_coefficient(j, m) == bessel_coefficient(m, m);
            r.check(
                format!("fully paired term j={j}"),
                top,
                "index j/2 Bessel form at k = j/2",
            );
        }
    }
    for n in 2..=4u32 {
        let s = custom_space(n, 3)?;
        let w = random_h2(rng, &s);
        let b = s.pair(&w, &w);
        let mut ok = true;
        for i in 0..=n {
            let x = e_power_alpha(&s, &w, 2 * n - 2 * i, n)?;
            let c = x.coefficient(&Monomial::new(i, vec![], n - i));
            let expect = factorial_q(2 * (n - i) as u64)
                / (pow(&rat(2), n - i) * factorial_q((n - i) as u64) * factorial_q(i as u64))
                * pow(&b, n - i);
            ok &= c == expect;
        }
        r.check(
            format!("leading term n={n}"),
            ok,
            "coefficient of α^i β^(n-i) in e_ω^(2n-2i)(ψ(1))",
        );
    }
    Ok(())
}

fn alpha_beta(s: &Arc<ExtMukaiSpace>, i: u32) -> Result<SymElement> {
    let n = s.n();
    SymElement::from_terms(s, n, [(Monomial::new(i, vec![], n - i), rat(1))])
}

fn pairing(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or((1..=6).collect(), |n| vec![n]);
    for n in ns {
        for s in [
            Arc::new(ExtMukaiSpace::new(DeformationType::k3n(n)?)),
            Arc::new(ExtMukaiSpace::new(DeformationType::kumn(n)?)),
        ] {
            let mut ok = true;
            for i in 0..=n {
                let v = pairing_bn(&alpha_beta(&s, i)?, &alpha_beta(&s, n - i)?)?;
                ok &= v == &s.dtype.c_x * factorial_q(i as u64) * factorial_q((n - i) as u64);
            }
            r.check(
                format!("n={n} {}", s.dtype.family.as_str()),
                ok,
                "b_[n](α^i β^(n-i), α^(n-i) β^i) = c_X i!(n-i)!",
            );
        }
    }
    Ok(())
}

fn is_isometry(g: &Isometry) -> bool {
    g.matrix().transpose().mul(g.gram()).mul(g.matrix()) == **g.gram()
}

fn random_k3_element(rng: &mut ChaCha8Rng, k3: &Arc<ExtMukaiSpace>) -> Result<Isometry> {
    let s101 = reflection(k3.gram(), &vec_add(&k3.alpha(), &k3.beta()))?;
    let len = rng.gen_range(1..=3);
    let mut g = Isometry::identity(k3.gram().clone());
    for _ in 0..len {
        let h = match rng.gen_range(0..3) {
            0 => b_field(k3.gram(), &random_h2(rng, k3))?,
            1 => s101.clone(),
            _ => Isometry::minus_identity(k3.gram().clone()),
        };
        g = g.compose(&h)?;
    }
    Ok(g)
}

fn catalog_suite(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or(vec![2, 3], |n| vec![n]);
    let k3 = k3_surface_space()?;
    for n in ns {
        let s = k3n_space(n)?;
        let lat = k3n_lattices(&s)?;
        for key in KEYS {
            if key == "poincare" || ((key == "fm_ext1" || key == "horja_EZ") && n != 2) {
                continue;
            }
            let params = ActionParams {
                n: Some(n),
                lambda: Some(random_h2(rng, &s)),
                g: None,
                source: Some(random_k3_element(rng, &k3)?),
            };
            let a = action(key, &params)?;
            r.check(
                format!("n={n} {key} isometry"),
                is_isometry(&a.iso),
                "M^T G M = G",
            );
            let pres =
                a.iso.preserves_lattice(&lat.lambda)? && a.iso.preserves_lattice(&lat.lambda_g)?;
            r.check(format!("n={n} {key} preserves Λ and Λ_g"), pres, "");
            if matches!(
                key,
                "sign_equivalence" | "spherical_P" | "fm_ext1" | "horja_EZ"
            ) {
                let sq =
                    a.iso.compose(&a.iso)?.is_identity() && a.raw.compose(&a.raw)?.is_identity();
                let eps = a.epsilon.map_or("none".to_string(), |e| e.to_string());
                r.check(
                    format!("n={n} {key} involution"),
                    sq,
                    format!("epsilon {eps}"),
                );
            }
        }
        if n == 3 {
            let a = action(
                "spherical_P",
                &ActionParams {
                    n: Some(3),
                    ..Default::default()
                },
            )?;
            let o = ext_vector_line_bundle(&s, &zero_vec(s.dim()))?;
            let od = ext_vector_line_bundle(&s, &vec_scale(&rat(-1), &s.delta()?))?;
            r.check(
                "n=3 spherical_P image of v(O)",
                a.iso.apply(&o.coords) == vec_scale(&rat(-1), &od.coords),
                "ṽ(O_X) ↦ -ṽ(O_X(-δ))",
            );
        }
    }
    Ok(())
}

fn dn_suite(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or(vec![2, 3], |n| vec![n]);
    let k3 = k3_surface_space()?;
    let s101 = reflection(k3.gram(), &vec_add(&k3.alpha(), &k3.beta()))?;
    for n in ns {
        let s = k3n_space(n)?;
        let lat = k3n_lattices(&s)?;
        let mut ok = true;
        for _ in 0..20 {
            let g = random_k3_element(rng, &k3)?;
            let h = random_k3_element(rng, &k3)?;
            let lhs = dn_transfer(&s, &g.compose(&h)?)?;
            let rhs = dn_transfer(&s, &g)?.compose(&dn_transfer(&s, &h)?)?;
            ok &= lhs.matrix() == rhs.matrix();
        }
        r.check(format!("n={n} homomorphism"), ok, "20 random pairs");
        let expect = reflection(s.gram(), &vec_add(&lat.alpha_t, &s.beta()))?;
        let expect = if n % 2 == 1 { expect } else { expect.negate() };
        r.check(
            format!("n={n} dn(s_(1,0,1))"),
            dn_transfer(&s, &s101)?.matrix() == expect.matrix(),
            "(-1)^(n+1) s_(α̃+β)",
        );
        let root = vec_sub(&k3.h2_basis(0), &k3.h2_basis(1));
        let g = reflection(k3.gram(), &root)?;
        let (d, eps) = dn_transfer_parts(&s, &g)?;
        let fixes = d.apply(&lat.alpha_t) == lat.alpha_t
            && d.apply(&s.beta()) == s.beta()
            && d.apply(&lat.delta_t) == lat.delta_t
            && eps == if n % 2 == 0 { -1 } else { 1 };
        let on_k3 = (0..22).all(|i| {
            let img = g.apply(&k3.h2_basis(i));
            let mut expect = zero_vec(s.dim());
            expect[..23].clone_from_slice(&img[..23]);
            expect[24] = img[23].clone();
            d.apply(&s.h2_basis(i)) == expect
        });
        r.check(
            format!("n={n} dn fixes α̃, β, δ̃"),
            fixes && on_k3,
            "g = s_(e-f): raw part extends g, sign det(g)^(n+1)",
        );
    }
    Ok(())
}

/// Distinguished hyperbolic planes of `Λ`: `(α̃, -β)` and the three
/// hyperbolic planes of the K3 lattice.
fn lambda_planes(s: &ExtMukaiSpace) -> Result<Vec<(RatVector, RatVector)>> {
    let lat = k3n_lattices(s)?;
    let mut planes = vec![(lat.alpha_t.clone(), vec_scale(&rat(-1), &s.beta()))];
    for k in 0..3 {
        planes.push((s.h2_basis(2 * k), s.h2_basis(2 * k + 1)));
    }
    Ok(planes)
}

/// Random Eichler transvections `t(e, a)` with `e` from a distinguished
/// plane `(e, f)` and `a` in `Λ ∩ ⟨e, f⟩^⊥`.
struct TransvectionSampler {
    gram: Arc<RatMatrix>,
    data: Vec<(RatVector, QuadLattice)>,
}

impl TransvectionSampler {
    fn new(s: &ExtMukaiSpace, lambda: &QuadLattice) -> Result<Self> {
        let mut data = Vec::new();
        for (e, f) in lambda_planes(s)? {
            let comp = orthogonal_complement(lambda, &[e.clone(), f.clone()])?;
            data.push((e.clone(), comp.clone()));
            data.push((f, comp));
        }
        Ok(TransvectionSampler {
            gram: s.gram().clone(),
            data,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<(RatVector, RatVector, Isometry)> {
        let (e, comp) = &self.data[rng.gen_range(0..self.data.len())];
        let coords: RatVector = (0..comp.rank())
            .map(|_| {
                if rng.gen_bool(0.3) {
                    rat(rng.gen_range(-2..=2))
                } else {
                    rat(0)
                }
            })
            .collect();
        let a = comp.vector(&coords);
        let t = eichler_transvection(&self.gram, e, &a)?;
        Ok((e.clone(), a, t))
    }
}

fn lambda_invariance(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or(vec![2, 3, 5], |n| vec![n]);
    for n in ns {
        let s = k3n_space(n)?;
        let lat = k3n_lattices(&s)?;
        let disc = discriminant_group(&lat.lambda)?;
        let sampler = TransvectionSampler::new(&s, &lat.lambda)?;
        let s_v = reflection(s.gram(), &vec_add(&lat.alpha_t, &s.beta()))?;
        let s_d = reflection(s.gram(), &lat.delta_t)?;
        let mut counts = [0usize; 4];
        let mut failure: Option<String> = None;
        for k in 0..200 {
            let kind = k % 4;
            let (label, g) = match kind {
                0 => {
                    let lambda = random_h2(rng, &s);
                    ("B_λ", b_field(s.gram(), &lambda)?)
                }
                1 => ("s_(α̃+β)", s_v.clone()),
                2 => ("s_δ̃", s_d.clone()),
                _ => ("t(e,a)", sampler.sample(rng)?.2),
            };
            counts[kind] += 1;
            let pres = g.preserves_lattice(&lat.lambda)? && g.preserves_lattice(&lat.lambda_g)?;
            let spin = g.spinor_norm() == 1;
            let da = g.disc_action_with(&lat.lambda, &disc).kind;
            let disc_ok = matches!(da, DiscKind::Identity | DiscKind::MinusIdentity);
            if !(pres && spin && disc_ok) && failure.is_none() {
                failure = Some(format!(
                    "{label}: preserves {pres}, spinor +1 {spin}, disc {}",
                    da.as_str()
                ));
            }
        }
        let detail = failure.clone().unwrap_or_else(|| {
            format!(
                "{} B-fields, {} s_(α̃+β), {} s_δ̃, {} transvections",
                counts[0], counts[1], counts[2], counts[3]
            )
        });
        r.check(format!("n={n} generators"), failure.is_none(), detail);
    }
    Ok(())
}

fn counterexample(r: &mut Report) -> Result<()> {
    let s = k3n_space(10)?;
    let lat = k3n_lattices(&s)?;
    let fam = scaled_lambda_family(&s, 3)?;
    let b = s.b_field(&vec_scale(&frac(1, 3), &s.delta()?))?;
    r.check(
        "n=10 B_(δ/3) preserves 3Λ_S+Zδ̃",
        b.preserves_lattice(&fam)?,
        "",
    );
    match b.lattice_witness(&lat.lambda)? {
        Some(w) => {
            let verified = lat.lambda.contains(&w.vector) && !lat.lambda.contains(&w.image);
            r.check("n=10 B_(δ/3) fails on Λ", true, "witness found");
            r.check(
                "n=10 witness verified",
                verified,
                "vector in Λ, image outside Λ",
            );
            r.set(
                "witness",
                json!({"vector": vec_to_json(&w.vector), "image": vec_to_json(&w.image)}),
            );
        }
        None => r.check("n=10 B_(δ/3) fails on Λ", false, "B_(δ/3) preserves Λ"),
    }
    Ok(())
}

fn random_primitive(rng: &mut ChaCha8Rng, l: &QuadLattice) -> Result<RatVector> {
    loop {
        let coords: RatVector = (0..l.rank())
            .map(|_| {
                if rng.gen_bool(0.4) {
                    rat(rng.gen_range(-3..=3))
                } else {
                    rat(0)
                }
            })
            .collect();
        let v = l.vector(&coords);
        if !crate::exact::vec_is_zero(&v) && is_primitive(l, &v)? {
            return Ok(v);
        }
    }
}

fn eichler(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = opts.n.unwrap_or(3);
    let s = k3n_space(n)?;
    let lat = k3n_lattices(&s)?;
    let frame = lambda_eichler_frame(&s)?;
    let sampler = TransvectionSampler::new(&s, &lat.lambda)?;
    let mut found = 0;
    let mut longest = 0;
    let mut failure = None;
    for _ in 0..50 {
        let v = random_primitive(rng, &lat.lambda)?;
        let mut w = v.clone();
        for _ in 0..rng.gen_range(1..=4) {
            w = sampler.sample(rng)?.2.apply(&w);
        }
        match eichler_transport(&frame, &v, &w)? {
            Transport::Word(word) => {
                let mut x = v.clone();
                for t in &word {
                    x = t.apply(s.gram(), &x);
                }
                if x == w {
                    found += 1;
                    longest = longest.max(word.len());
                } else if failure.is_none() {
                    failure = Some("word does not reach the target".to_string());
                }
            }
            Transport::NotFound(reason) => {
                failure.get_or_insert_with(|| format!("NotFound ({})", reason.as_str()));
            }
        }
    }
    r.check(
        format!("n={n} matched pairs"),
        found == 50,
        failure.unwrap_or_else(|| format!("50 verified words, longest {longest}")),
    );
    let e = |i: usize| s.h2_basis(i);
    let mut mismatched: Vec<(RatVector, RatVector, TransportFailure)> = Vec::new();
    for k in 1..=4i64 {
        mismatched.push((
            vec_add(&e(0), &vec_scale(&rat(k), &e(1))),
            vec_add(&e(0), &vec_scale(&rat(k + 1), &e(1))),
            TransportFailure::Square,
        ));
    }
    for k in 1..=3i64 {
        let u = vec_add(&e(2), &vec_scale(&rat(k), &e(3)));
        mismatched.push((
            vec_add(&e(0), &vec_scale(&rat(4 * k), &e(1))),
            vec_scale(&rat(2), &u),
            TransportFailure::Primitivity,
        ));
    }
    let dt = lat.delta_t.clone();
    let q = 2 - 2 * n as i64;
    for k in 1..=3i64 {
        let v = vec_add(
            &dt,
            &vec_scale(&rat(2), &vec_add(&e(2), &vec_scale(&rat(k), &e(3)))),
        );
        let w = vec_add(&e(0), &vec_scale(&rat((q + 8 * k) / 2), &e(1)));
        mismatched.push((v, w, TransportFailure::DiscClass));
    }
    let mut correct = 0;
    for (v, w, expect) in &mismatched {
        if eichler_transport(&frame, v, w)? == Transport::NotFound(*expect) {
            correct += 1;
        }
    }
    r.check(
        format!("n={n} mismatched pairs"),
        correct == mismatched.len(),
        format!(
            "{correct} of {} rejected with the expected reason",
            mismatched.len()
        ),
    );
    Ok(())
}

/// Random isotropic integral class `±h0 + b h1 + μ` with `μ` in the second
/// hyperbolic plane and (for K3n) the `δ` line.
pub fn random_isotropic(rng: &mut ChaCha8Rng, s: &ExtMukaiSpace) -> RatVector {
    loop {
        let mut mu = zero_vec(s.dim());
        mu[3] = rat(rng.gen_range(-3..=3));
        mu[4] = rat(rng.gen_range(-3..=3));
        if s.delta().is_ok() {
            mu[s.dim() - 2] = rat(rng.gen_range(-2..=2));
        }
        let q = s.pair(&mu, &mu);
        let a = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut v = mu;
        v[1] = rat(a);
        v[2] = -q / rat(2 * a);
        if !crate::exact::vec_is_zero(&v) {
            return v;
        }
    }
}

fn isotropy(r: &mut Report, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let ns: Vec<u32> = opts.n.map_or(vec![2, 3, 4], |n| vec![n]);
    for n in ns {
        let s = k3n_space(n)?;
        let mut ok = [true; 3];
        for _ in 0..20 {
            let lam = random_isotropic(rng, &s);
            ok[0] &= s.pair(&lam, &lam).is_zero();
            let p = SymElement::product(&s, &vec![lam.clone(); n as usize])?;
            ok[0] &= laplacian(&p)?.is_zero();
            for k in n..=2 * n {
                let m = 2 * n - k;
                let mut factors = vec![s.alpha(); m as usize];
                factors.extend(vec![s.beta(); (k - n) as usize]);
                let mut x = SymElement::product(&s, &factors)?;
                for _ in 0..m {
                    x = lefschetz_e(&lam, &x)?;
                }
                let x = x.scale(&(Rational::one() / factorial_q(m as u64)));
                let mut target = vec![lam.clone(); m as usize];
                target.extend(vec![s.beta(); (k - n) as usize]);
                ok[1] &= x == SymElement::product(&s, &target)?;
            }
            let psi = psi_monomial(&s, &vec![lam.clone(); n as usize])?;
            ok[2] &= lefschetz_e(&lam, &psi)?.is_zero();
        }
        r.check(
            format!("n={n} laplacian of λ^n"),
            ok[0],
            "20 isotropic classes",
        );
        r.check(
            format!("n={n} isotropy chain"),
            ok[1],
            "e_λ^(2n-k)(α^(2n-k) β^(k-n))/(2n-k)! = λ^(2n-k) β^(k-n)",
        );
        r.check(format!("n={n} e_μ^(n+1) ψ(1) = 0"), ok[2], "");
    }
    Ok(())
}

/// Primitive vectors of `Z^len` with entries in `[-b, b]`.
pub fn primitive_box(len: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-b; len];
    loop {
        if cur.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
            i += 1;
        }
    }
}

fn moduli_suite(r: &mut Report) -> Result<()> {
    let cases = [
        ("<2>", RatMatrix::from_i64(&[vec![2]])),
        ("<4>", RatMatrix::from_i64(&[vec![4]])),
        ("U", RatMatrix::from_i64(&[vec![0, 1], vec![1, 0]])),
    ];
    for (name, gram) in cases {
        let l = AlgebraicMukaiLattice::new(gram)?;
        let mut total = 0;
        let mut lemma = 0;
        let mut failure = None;
        for xs in primitive_box(l.rho() + 2, 4) {
            let v = MukaiVectorK3::from_slice(&xs)?;
            total += 1;
            let f = fineness(&l, &v)?;
            if !f.consistent() && failure.is_none() {
                failure = Some(format!("fineness disagreement at {xs:?}"));
            }
            if !l.pair(&v, &v)?.is_zero() {
                lemma += 1;
                if !disc_lemma_check(&l, &v)?.holds() && failure.is_none() {
                    failure = Some(format!("discriminant relation fails at {xs:?}"));
                }
            }
        }
        r.check(
            format!("NS={name}"),
            failure.is_none(),
            failure.unwrap_or_else(|| format!("{total} vectors, {lemma} non-isotropic")),
        );
    }
    Ok(())
}

/// All `r` with `|r| <= bound` of the form `a^n n!/c` for rational `a`,
/// by enumerating `a = p/q`.
pub fn kx_ranks_by_enumeration(n: u32, c: i64, bound: i64) -> BTreeSet<i64> {
    let nf = factorial(n as u64);
    let num = &nf / nf.gcd(&BigInt::from(c));
    let den = BigInt::from(c) / nf.gcd(&BigInt::from(c));
    let mut out = BTreeSet::new();
    let mut q = BigInt::one();
    while q.pow(n) <= num {
        if (&num % q.pow(n)).is_zero() {
            let mut p = BigInt::zero();
            loop {
                if p.gcd(&q).is_one() || p.is_zero() {
                    let rv = p.pow(n) * &num / (&den * q.pow(n));
                    let exact = (p.pow(n) * &num) % (&den * q.pow(n)) == BigInt::zero();
                    if rv.abs() > BigInt::from(bound) {
                        break;
                    }
                    if exact {
                        let rv: i64 = rv.try_into().expect("bounded");
                        out.insert(rv);
                        if n % 2 == 1 {
                            out.insert(-rv);
                        }
                    }
                }
                p += 1;
            }
        }
        q += 1;
    }
    out
}

fn rank_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let bound = opts.rank_bound;
    let ns: Vec<u32> = opts.n.map_or((1..=6).collect(), |n| vec![n]);
    for n in ns {
        for c in [1i64, n as i64 + 1] {
            let hits = kx_ranks_by_enumeration(n, c, bound);
            let cq = rat(c);
            let mut mismatch = None;
            for rv in -bound..=bound {
                let holds = rank_predicate_kx_orbit(&BigInt::from(rv), n, &cq)?.holds;
                if holds != hits.contains(&rv) {
                    mismatch = Some(rv);
                    break;
                }
            }
            let detail = match mismatch {
                Some(rv) => format!("disagreement at r = {rv}"),
                None => format!("{} ranks with |r| <= {bound}", hits.len()),
            };
            r.check(format!("n={n} c_X={c}"), mismatch.is_none(), detail);
        }
    }
    Ok(())
}

fn poincare_suite(r: &mut Report) -> Result<()> {
    for g in 2..=6 {
        for c in poincare_checks(g)? {
            r.check(format!("g={g} {}", c.name), c.pass, c.detail);
        }
    }
    Ok(())
}
