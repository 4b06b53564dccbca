//! Command-line front end.  Every verb prints a report (canonical JSON by
//! default) and exits with 0 when all checks pass, 1 when a check fails and
//! 2 on malformed input.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hkmukai::catalog::{action, k3_surface_space, ActionParams, KEYS};
use hkmukai::error::{Error, Result};
use hkmukai::exact::{format_rational, parse_rational, rat, vec_add, RatMatrix};
use hkmukai::hk_space::{
    ext_vector_line_bundle, ext_vector_point, in_hat_aut_plus, k3n_lattices, lambda_eichler_frame,
    scaled_lambda_family, signum_normalize, DeformationType, ExtMukaiSpace, ExtVector, Family,
    OrbitTag,
};
use hkmukai::io::{
    canonical_json, describe_vector, dtype_from_json, isometry_from_json, isometry_to_json,
    lattice_from_json, matrix_to_json, parse_vector_expr, rat_to_json, read_json_file, vec_to_json,
};
use hkmukai::isometry::{
    b_field, eichler_transport, eichler_transvection, generate_bounded, reflection, Isometry,
    Transport,
};
use hkmukai::lattice::QuadLattice;
use hkmukai::moduli::{
    disc_lemma_check, fineness, moduli_dimension, partner_invariants, AlgebraicMukaiLattice,
    MukaiVectorK3,
};
use hkmukai::report::{error_json, Report};
use hkmukai::suites::{custom_h2, run_suite, SuiteOptions, DEFAULT_SEED, SUITES};
use hkmukai::verbitsky::{euler_char_line_bundle, integrate, sqrt_todd_bar, todd_bar};

#[derive(Parser, Debug)]
#[command(
    name = "hkmukai",
    version,
    about = "Exact computations on extended Mukai lattices of hyper-Kähler manifolds"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized sampling in `verify`.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Deformation type selection shared by most verbs.
#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    /// Built-in family: K3n, Kumn, OG10, OG6.
    #[arg(long, default_value = "K3n")]
    family: String,
    /// Half dimension n.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Deformation-type file; overrides --family and --n.
    #[arg(long)]
    dtype: Option<PathBuf>,
    /// Keep the family constants c_X and r_X but use U ⊕ ⟨-2⟩^(k-2) of rank k as H².
    #[arg(long = "h2-rank")]
    h2_rank: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extended Mukai vector of a line bundle, a point-like object or an expression.
    Vector {
        #[command(flatten)]
        space: SpaceArgs,
        /// First Chern class of a line bundle (vector expression).
        #[arg(long, conflicts_with_all = ["point", "expr"])]
        lambda: Option<String>,
        /// Vector of a point-like object.
        #[arg(long)]
        point: bool,
        /// Arbitrary vector expression.
        #[arg(long)]
        expr: Option<String>,
        /// Kähler class for sign normalization.
        #[arg(long)]
        omega: Option<String>,
        /// Sign of the normalized vector (1 or -1).
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<i8>,
    },
    /// Apply an isometry to a vector.
    Act {
        #[command(flatten)]
        space: SpaceArgs,
        /// Isometry spec (see README).
        #[arg(long)]
        iso: String,
        /// Vector expression.
        #[arg(long)]
        vector: String,
    },
    /// Does an isometry preserve a lattice?
    LatticeCheck {
        #[command(flatten)]
        space: SpaceArgs,
        /// lambda, lambda_s, lambda_g, lambda_lb, integral, scaled:K or a lattice file.
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        iso: String,
    },
    /// Determinant, spinor norm, reflection count and lattice membership of an isometry.
    IsometryInfo {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        iso: String,
        /// Print the matrix in the isometry file format.
        #[arg(long)]
        matrix: bool,
    },
    /// Eichler transvection word carrying one primitive Λ-vector to another.
    Transport {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Elements generated by isometries up to a word length.
    Group {
        #[command(flatten)]
        space: SpaceArgs,
        /// Generator spec; repeat for several generators.
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Check every element against this lattice.
        #[arg(long)]
        lattice: Option<String>,
    },
    /// Todd class (or its square root) in the Sym^n model.
    Todd {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        sqrt: bool,
    },
    /// Euler characteristic of a line bundle.
    Chi {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        lambda: String,
    },
    /// Integral of a product of 2n classes in H².
    Integrate {
        #[command(flatten)]
        space: SpaceArgs,
        /// Class; repeat 2n times, or give once with --power.
        #[arg(long = "omega", required = true)]
        omegas: Vec<String>,
        /// Use the single class to this power.
        #[arg(long)]
        power: Option<usize>,
    },
    /// Lattice invariants of a moduli space of sheaves on a K3 surface.
    Moduli {
        /// Néron–Severi Gram matrix, rows separated by ';' (e.g. "2" or "0,1;1,0").
        #[arg(long)]
        ns: String,
        /// Mukai vector r,c_1..c_ρ,s.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Named isometries.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name or `all`.
        suite: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "h2-rank")]
        h2_rank: Option<usize>,
        /// Bound on |r| for the rank suite.
        #[arg(long, default_value_t = 1_000_000)]
        rank_bound: i64,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    /// List the catalog keys.
    List,
    /// Print a named action in the isometry file format.
    Get {
        key: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Line bundle class for tensor_line_bundle.
        #[arg(long)]
        lambda: Option<String>,
        /// Genus for poincare.
        #[arg(long)]
        g: Option<u32>,
        /// K3 isometry spec for dn_transfer.
        #[arg(long)]
        source: Option<String>,
    },
}

fn build_space(a: &SpaceArgs) -> Result<Arc<ExtMukaiSpace>> {
    let dtype = match &a.dtype {
        Some(p) => dtype_from_json(&read_json_file(p)?)?,
        None => DeformationType::builtin(a.family.parse::<Family>()?, a.n)?,
    };
    let dtype = match a.h2_rank {
        Some(k) => DeformationType::custom(dtype.n, dtype.c_x, dtype.r_x, custom_h2(k)?)?,
        None => dtype,
    };
    Ok(Arc::new(ExtMukaiSpace::new(dtype)))
}

fn space_name(s: &ExtMukaiSpace) -> String {
    format!("{}(n={})", s.dtype.family.as_str(), s.n())
}

/// Parses an isometry spec on `s`: `bfield:EXPR`, `reflection:EXPR`,
/// `transvection:E;A`, `catalog:KEY`, `minus-id`, `id` or a file path.
fn parse_iso(s: &Arc<ExtMukaiSpace>, spec: &str) -> Result<Isometry> {
    let gram = s.gram();
    let word = |g: Isometry| g.with_word(vec![spec.to_string()]);
    if let Some(e) = spec.strip_prefix("bfield:") {
        return Ok(word(b_field(gram, &parse_vector_expr(s, e)?)?));
    }
    if let Some(e) = spec.strip_prefix("reflection:") {
        return Ok(word(reflection(gram, &parse_vector_expr(s, e)?)?));
    }
    if let Some(e) = spec.strip_prefix("transvection:") {
        let (a, b) = e
            .split_once(';')
            .ok_or_else(|| Error::Parse("transvection needs E;A".into()))?;
        return Ok(word(eichler_transvection(
            gram,
            &parse_vector_expr(s, a)?,
            &parse_vector_expr(s, b)?,
        )?));
    }
    if let Some(key) = spec.strip_prefix("catalog:") {
        let a = action(
            key,
            &ActionParams {
                n: Some(s.n()),
                ..Default::default()
            },
        )?;
        if a.iso.gram() != gram {
            return Err(Error::Dimension(format!(
                "catalog:{key} lives on a different space"
            )));
        }
        return Ok(word(a.iso));
    }
    match spec {
        "minus-id" => Ok(word(Isometry::minus_identity(gram.clone()))),
        "id" => Ok(word(Isometry::identity(gram.clone()))),
        path => {
            let p = Path::new(path);
            if !p.exists() {
                return Err(Error::UnknownName(format!("isometry spec {path}")));
            }
            let g = isometry_from_json(&read_json_file(p)?, p.parent().unwrap_or(Path::new(".")))?;
            if g.gram() != gram {
                return Err(Error::Dimension(
                    "isometry file is on a different space".into(),
                ));
            }
            Ok(g)
        }
    }
}

fn parse_lattice(s: &Arc<ExtMukaiSpace>, name: &str) -> Result<QuadLattice> {
    if let Some(k) = name.strip_prefix("scaled:") {
        let k: i64 = k
            .parse()
            .map_err(|_| Error::Parse(format!("scale factor {k}")))?;
        return scaled_lambda_family(s, k);
    }
    match name {
        "integral" => s.integral_lattice(),
        "lambda" | "lambda_s" | "lambda_g" | "lambda_lb" => {
            let l = k3n_lattices(s)?;
            Ok(match name {
                "lambda" => l.lambda,
                "lambda_s" => l.lambda_s,
                "lambda_g" => l.lambda_g,
                _ => l.lambda_lb,
            })
        }
        path => {
            let p = Path::new(path);
            if !p.exists() {
                return Err(Error::UnknownName(format!("lattice {path}")));
            }
            let l = lattice_from_json(&read_json_file(p)?)?;
            if l.ambient_dim() != s.dim() {
                return Err(Error::Dimension(format!(
                    "lattice lives in dimension {}",
                    l.ambient_dim()
                )));
            }
            Ok(l)
        }
    }
}

fn parse_matrix(text: &str) -> Result<RatMatrix> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| parse_rational(x.trim()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let w = rows.first().map_or(0, Vec::len);
    if w == 0 || rows.iter().any(|r| r.len() != w) {
        return Err(Error::Dimension("ragged matrix".into()));
    }
    RatMatrix::from_rows(rows)
}

fn parse_ints(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("integer {x}")))
        })
        .collect()
}

fn vector_json(s: &ExtMukaiSpace, v: &[hkmukai::Rational]) -> Value {
    json!({"coords": vec_to_json(v), "description": describe_vector(s, v), "square": rat_to_json(&s.pair(v, v))})
}

fn run(cli: &Cli, command: Vec<String>) -> Result<Report> {
    let mut r = Report::new(command);
    match &cli.command {
        Command::Vector {
            space,
            lambda,
            point,
            expr,
            omega,
            eps,
        } => {
            let s = build_space(space)?;
            let v: ExtVector = if *point {
                ext_vector_point(&s)
            } else if let Some(l) = lambda {
                ext_vector_line_bundle(&s, &parse_vector_expr(&s, l)?)?
            } else if let Some(e) = expr {
                ExtVector::tagged(&s, parse_vector_expr(&s, e)?, OrbitTag::Plain)?
            } else {
                return Err(Error::Invalid(
                    "vector needs --lambda, --point or --expr".into(),
                ));
            };
            let v = match eps {
                Some(e) => {
                    let w = omega
                        .as_deref()
                        .map(|o| parse_vector_expr(&s, o))
                        .transpose()?;
                    signum_normalize(&s, &v, w.as_deref(), *e)?
                }
                None => v,
            };
            let sq = s.pair(&v.coords, &v.coords);
            match v.tag {
                OrbitTag::LineBundle => r.check(
                    "square -2r_X",
                    sq == rat(-2) * &s.dtype.r_x,
                    format_rational(&sq),
                ),
                OrbitTag::OOrbit | OrbitTag::KxOrbit => {
                    r.check("isotropic", sq == rat(0), format_rational(&sq))
                }
                OrbitTag::Plain => {}
            }
            r.set("space", json!(space_name(&s)));
            r.set("tag", json!(v.tag.as_str()));
            r.set("vector", vector_json(&s, &v.coords));
        }
        Command::Act { space, iso, vector } => {
            let s = build_space(space)?;
            let g = parse_iso(&s, iso)?;
            let v = parse_vector_expr(&s, vector)?;
            let w = g.apply(&v);
            r.check("pairing preserved", s.pair(&v, &v) == s.pair(&w, &w), "");
            r.set("input", vector_json(&s, &v));
            r.set("image", vector_json(&s, &w));
        }
        Command::LatticeCheck {
            space,
            lattice,
            iso,
        } => {
            let s = build_space(space)?;
            let g = parse_iso(&s, iso)?;
            let l = parse_lattice(&s, lattice)?;
            match g.lattice_witness(&l)? {
                None => r.check(format!("preserves {lattice}"), true, ""),
                Some(w) => {
                    let dir = match w.direction {
                        hkmukai::isometry::Direction::Forward => "forward",
                        hkmukai::isometry::Direction::Inverse => "inverse",
                    };
                    r.check(
                        format!("preserves {lattice}"),
                        false,
                        format!("{dir} image of a lattice vector leaves the lattice"),
                    );
                    r.set(
                        "witness",
                        json!({
                            "direction": dir,
                            "vector": vector_json(&s, &w.vector),
                            "image": vector_json(&s, &w.image),
                        }),
                    );
                }
            }
            if let Ok(d) = g.disc_action(&l) {
                r.set("disc_action", json!(d.kind.as_str()));
            }
            r.set("spinor_norm", json!(g.spinor_norm()));
        }
        Command::IsometryInfo { space, iso, matrix } => {
            let s = build_space(space)?;
            let g = parse_iso(&s, iso)?;
            let refl = g.cartan_dieudonne();
            r.check(
                "reflection count <= 2 dim",
                refl.len() <= 2 * g.dim(),
                format!("{} reflections", refl.len()),
            );
            r.set("det", json!(g.det()));
            r.set("spinor_norm", json!(g.spinor_norm()));
            r.set("reflections", json!(refl.len()));
            r.set("identity", json!(g.is_identity()));
            if s.dtype.family == Family::K3n && s.n() >= 2 {
                let h = in_hat_aut_plus(&g, &s)?;
                r.set(
                    "hat_aut_plus",
                    json!({"holds": h.holds(), "fails": h.reasons()}),
                );
            }
            if *matrix {
                r.set("isometry", isometry_to_json(&g, &space_name(&s)));
            }
        }
        Command::Transport { space, from, to } => {
            let s = build_space(space)?;
            let frame = lambda_eichler_frame(&s)?;
            let v = parse_vector_expr(&s, from)?;
            let w = parse_vector_expr(&s, to)?;
            match eichler_transport(&frame, &v, &w)? {
                Transport::Word(word) => {
                    let mut x = v.clone();
                    for t in &word {
                        x = t.apply(s.gram(), &x);
                    }
                    r.check(
                        "transport found",
                        x == w,
                        format!("word of length {}", word.len()),
                    );
                    let steps: Vec<Value> = word
                        .iter()
                        .map(|t| json!({"e": vec_to_json(&t.e), "a": vec_to_json(&t.a)}))
                        .collect();
                    r.set("word", Value::Array(steps));
                }
                Transport::NotFound(reason) => {
                    r.check(
                        "transport found",
                        false,
                        format!("not found: {}", reason.as_str()),
                    );
                    r.set("reason", json!(reason.as_str()));
                }
            }
        }
        Command::Group {
            space,
            gens,
            depth,
            lattice,
        } => {
            let s = build_space(space)?;
            let gs = gens
                .iter()
                .map(|g| parse_iso(&s, g))
                .collect::<Result<Vec<_>>>()?;
            let elems = generate_bounded(&gs, *depth)?;
            r.set("elements", json!(elems.len()));
            r.set("depth", json!(depth));
            if let Some(name) = lattice {
                let l = parse_lattice(&s, name)?;
                let mut bad = None;
                for el in &elems {
                    if !el.iso.preserves_lattice(&l)? {
                        bad = Some(el.word.clone());
                        break;
                    }
                }
                let detail = bad
                    .as_ref()
                    .map_or(String::new(), |w| format!("word {w:?}"));
                r.check(
                    format!("all elements preserve {name}"),
                    bad.is_none(),
                    detail,
                );
            }
            let dets: BTreeSet<i8> = elems.iter().map(|e| e.iso.det()).collect();
            r.set("determinants", json!(dets));
        }
        Command::Todd { space, sqrt } => {
            let s = build_space(space)?;
            let t = if *sqrt {
                sqrt_todd_bar(&s)?
            } else {
                todd_bar(&s)?
            };
            r.set("space", json!(space_name(&s)));
            r.set("element", t.to_json());
        }
        Command::Chi { space, lambda } => {
            let s = build_space(space)?;
            let l = parse_vector_expr(&s, lambda)?;
            r.set("chi", rat_to_json(&euler_char_line_bundle(&s, &l)?));
            r.set("lambda", vector_json(&s, &l));
        }
        Command::Integrate {
            space,
            omegas,
            power,
        } => {
            let s = build_space(space)?;
            let vs = omegas
                .iter()
                .map(|o| parse_vector_expr(&s, o))
                .collect::<Result<Vec<_>>>()?;
            let vs = match power {
                Some(k) if vs.len() == 1 => vec![vs[0].clone(); *k],
                Some(_) => return Err(Error::Invalid("--power takes a single --omega".into())),
                None => vs,
            };
            r.set("integral", rat_to_json(&integrate(&s, &vs)?));
        }
        Command::Moduli { ns, v } => {
            let l = AlgebraicMukaiLattice::new(parse_matrix(ns)?)?;
            let v = MukaiVectorK3::from_slice(&parse_ints(v)?)?;
            let f = fineness(&l, &v)?;
            r.check("fineness computations agree", f.consistent(), "");
            r.set("dimension", json!(moduli_dimension(&l, &v)?));
            r.set(
                "fineness",
                json!({
                    "fine": f.fine,
                    "obstruction_order": f.obstruction_order.to_string(),
                    "smith_order": f.smith_order.to_string(),
                    "k_order": f.k_order.as_ref().map(|k| k.to_string()),
                    "witness": f.witness.as_ref().map(|w| vec_to_json(w)),
                }),
            );
            if l.pair(&v, &v)? != rat(0) {
                let d = disc_lemma_check(&l, &v)?;
                r.check(
                    "discriminant relation",
                    d.holds(),
                    format!("|K| = {}", d.k_order),
                );
                let p = partner_invariants(&l, &v)?;
                r.set(
                    "ns_of_moduli",
                    json!({
                        "det": rat_to_json(&p.ns_det),
                        "disc_orders": p.disc_orders.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "disc_q_values": p.disc_q_values,
                    }),
                );
            }
        }
        Command::Catalog { cmd } => match cmd {
            CatalogCmd::List => {
                r.set("keys", json!(KEYS));
            }
            CatalogCmd::Get {
                key,
                n,
                lambda,
                g,
                source,
            } => {
                let mut params = ActionParams {
                    n: Some(*n),
                    g: *g,
                    ..Default::default()
                };
                if let Some(l) = lambda {
                    let s = build_space(&SpaceArgs {
                        family: "K3n".into(),
                        n: *n,
                        dtype: None,
                        h2_rank: None,
                    })?;
                    params.lambda = Some(parse_vector_expr(&s, l)?);
                }
                if key == "dn_transfer" {
                    let k3 = k3_surface_space()?;
                    params.source = Some(match source {
                        Some(spec) => parse_iso(&k3, spec)?,
                        None => reflection(k3.gram(), &vec_add(&k3.alpha(), &k3.beta()))?,
                    });
                }
                let a = action(key, &params)?;
                let mut out = isometry_to_json(&a.iso, &space_name(&a.space));
                if let Value::Object(m) = &mut out {
                    m.insert("key".into(), json!(a.key));
                    m.insert("provenance".into(), json!(a.description));
                    m.insert("epsilon".into(), json!(a.epsilon));
                    m.insert("raw".into(), matrix_to_json(a.raw.matrix()));
                }
                r.check(
                    "isometry",
                    a.iso
                        .matrix()
                        .transpose()
                        .mul(a.iso.gram())
                        .mul(a.iso.matrix())
                        == **a.iso.gram(),
                    "",
                );
                r.set("action", out);
            }
        },
        Command::Verify {
            suite,
            n,
            h2_rank,
            rank_bound,
        } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                return Err(Error::UnknownName(format!(
                    "suite {suite}; known: {}, all",
                    SUITES.join(", ")
                )));
            }
            let opts = SuiteOptions {
                seed: cli.seed,
                n: *n,
                h2_rank: *h2_rank,
                rank_bound: *rank_bound,
            };
            let mut rep = run_suite(suite, &opts)?;
            rep.command = r.command.clone();
            return Ok(rep);
        }
    }
    Ok(r)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(&cli, args) {
        Ok(report) => {
            match cli.format {
                Format::Json => print!("{}", canonical_json(&report.to_json())),
                Format::Text => print!("{}", report.to_text()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.format {
                Format::Json => print!("{}", canonical_json(&error_json(&e))),
                Format::Text => eprintln!("error ({}): {e}", e.kind()),
            }
            ExitCode::from(2)
        }
    }
}
