//! JSON file formats, canonical serialization and the vector-expression
//! syntax accepted on the command line.
//!
//! Rationals are serialized as strings `"p/q"` (or `"p"`).  Object keys are
//! sorted, so [`canonical_json`] is byte-stable for a fixed value.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::{
    format_rational, parse_rational, rat, vec_add, vec_scale, zero_vec, RatMatrix, RatVector,
    Rational,
};
use crate::hk_space::{k3n_lattices, DeformationType, ExtMukaiSpace, Family};
use crate::isometry::Isometry;
use crate::lattice::QuadLattice;

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

pub fn rat_to_json(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// Accepts a rational string or a JSON integer.
pub fn rat_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(rat)
            .ok_or_else(|| Error::Parse(format!("{n} is not an integer; use a rational string"))),
        _ => Err(Error::Parse(format!("expected a rational, found {v}"))),
    }
}

pub fn vec_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

pub fn vec_from_json(v: &Value) -> Result<RatVector> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(rat_from_json)
        .collect()
}

pub fn matrix_to_json(m: &RatMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vec_to_json(r)).collect())
}

pub fn matrix_from_json(v: &Value) -> Result<RatMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of rows".into()))?
        .iter()
        .map(vec_from_json)
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Ok(RatMatrix::zeros(0, 0));
    }
    RatMatrix::from_rows(rows)
}

pub fn read_json_file(path: &Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Lattice file: `{"name", "gram", "embedding"?, "ambient_gram"?}`.  The
/// embedding rows are basis vectors in the ambient space whose Gram matrix is
/// `ambient_gram`.
pub fn lattice_to_json(l: &QuadLattice) -> Value {
    let mut m = Map::new();
    m.insert(
        "name".into(),
        Value::String(l.name().unwrap_or("").to_string()),
    );
    m.insert("gram".into(), matrix_to_json(l.gram()));
    if l.is_embedded() {
        m.insert("embedding".into(), matrix_to_json(l.basis()));
        m.insert("ambient_gram".into(), matrix_to_json(l.ambient_gram()));
    }
    Value::Object(m)
}

pub fn lattice_from_json(v: &Value) -> Result<QuadLattice> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("lattice file must be an object".into()))?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty());
    let gram = matrix_from_json(
        obj.get("gram")
            .ok_or_else(|| Error::Parse("lattice file needs \"gram\"".into()))?,
    )?;
    match obj.get("embedding") {
        None | Some(Value::Null) => QuadLattice::from_gram(gram, name),
        Some(e) => {
            let basis = matrix_from_json(e)?;
            let ambient = obj
                .get("ambient_gram")
                .ok_or_else(|| Error::Parse("an embedded lattice needs \"ambient_gram\"".into()))?;
            let l = QuadLattice::from_basis(basis, Arc::new(matrix_from_json(ambient)?), name)?;
            if *l.gram() != gram {
                return Err(Error::Invalid(
                    "\"gram\" disagrees with the embedding".into(),
                ));
            }
            Ok(l)
        }
    }
}

/// Isometry file: `{"space": lattice-file, "matrix", "word"?}`.
pub fn isometry_to_json(g: &Isometry, space_name: &str) -> Value {
    let mut m = Map::new();
    m.insert(
        "space".into(),
        json!({"name": space_name, "gram": matrix_to_json(g.gram())}),
    );
    m.insert("matrix".into(), matrix_to_json(g.matrix()));
    if let Some(w) = g.word() {
        m.insert(
            "word".into(),
            Value::Array(w.iter().map(|s| Value::String(s.clone())).collect()),
        );
    }
    Value::Object(m)
}

/// Reads an isometry file; `"space"` may be an inline lattice file or a
/// path relative to `base`.
pub fn isometry_from_json(v: &Value, base: &Path) -> Result<Isometry> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("isometry file must be an object".into()))?;
    let space = obj
        .get("space")
        .ok_or_else(|| Error::Parse("isometry file needs \"space\"".into()))?;
    let space = match space {
        Value::String(p) => {
            let path: PathBuf = base.join(p);
            lattice_from_json(&read_json_file(&path)?)?
        }
        other => lattice_from_json(other)?,
    };
    let matrix = matrix_from_json(
        obj.get("matrix")
            .ok_or_else(|| Error::Parse("isometry file needs \"matrix\"".into()))?,
    )?;
    let g = Isometry::new(Arc::new(space.gram().clone()), matrix)?;
    match obj.get("word") {
        Some(Value::Array(w)) => {
            let word = w
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| Error::Parse("word entries are strings".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(g.with_word(word))
        }
        _ => Ok(g),
    }
}

/// Deformation-type file: `{"family", "n", "c_X", "r_X", "h2"}`.
pub fn dtype_to_json(d: &DeformationType) -> Value {
    json!({
        "family": d.family.as_str(),
        "n": d.n,
        "c_X": rat_to_json(&d.c_x),
        "r_X": rat_to_json(&d.r_x),
        "h2": lattice_to_json(&d.h2),
    })
}

/// Reads a deformation-type file.  For built-in families the optional
/// fields are checked against the built-in values.
pub fn dtype_from_json(v: &Value) -> Result<DeformationType> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("deformation-type file must be an object".into()))?;
    let family: Family = obj
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("deformation-type file needs \"family\"".into()))?
        .parse()?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("deformation-type file needs an integer \"n\"".into()))?
        as u32;
    let c_x = obj.get("c_X").map(rat_from_json).transpose()?;
    let r_x = obj.get("r_X").map(rat_from_json).transpose()?;
    let h2 = obj.get("h2").map(lattice_from_json).transpose()?;
    if family == Family::Custom {
        let missing = || Error::Parse("custom deformation types need c_X, r_X and h2".into());
        return DeformationType::custom(
            n,
            c_x.ok_or_else(missing)?,
            r_x.ok_or_else(missing)?,
            h2.ok_or_else(missing)?,
        );
    }
    let d = DeformationType::builtin(family, n)?;
    if c_x.is_some_and(|c| c != d.c_x) || r_x.is_some_and(|r| r != d.r_x) {
        return Err(Error::Invalid(
            "c_X or r_X disagrees with the built-in family".into(),
        ));
    }
    if h2.is_some_and(|h| h.gram() != d.h2.gram()) {
        return Err(Error::Invalid(
            "h2 disagrees with the built-in family".into(),
        ));
    }
    Ok(d)
}

/// Ambient vector named by `name`: `alpha`, `beta`, `h<i>` (H² basis vector
/// `i`, 0-based), `e<i>` (same), and for K3n spaces `delta`, `alpha_t`,
/// `delta_t`.
pub fn named_vector(space: &ExtMukaiSpace, name: &str) -> Result<RatVector> {
    match name {
        "alpha" => return Ok(space.alpha()),
        "beta" => return Ok(space.beta()),
        "delta" => return space.delta(),
        "alpha_t" | "delta_t" => {
            let l = k3n_lattices(space)?;
            return Ok(if name == "alpha_t" {
                l.alpha_t
            } else {
                l.delta_t
            });
        }
        _ => {}
    }
    let idx = name
        .strip_prefix('h')
        .or_else(|| name.strip_prefix('e'))
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| Error::UnknownName(format!("vector name {name}")))?;
    if idx >= space.dtype.b2() {
        return Err(Error::Dimension(format!("H² index {idx} out of range")));
    }
    Ok(space.h2_basis(idx))
}

/// Parses a vector expression.  Accepted forms:
/// - `0` (the zero vector);
/// - a comma-separated list of `b2` rationals (H² coordinates) or of
///   `b2 + 2` rationals (ambient coordinates);
/// - a sum of terms `[coef*]name[/den]`, e.g. `alpha_t+beta`, `delta/3`,
///   `2*h0-3/2*h1`.
pub fn parse_vector_expr(space: &ExtMukaiSpace, expr: &str) -> Result<RatVector> {
    let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if expr.is_empty() {
        return Err(Error::Parse("empty vector expression".into()));
    }
    if expr == "0" {
        return Ok(zero_vec(space.dim()));
    }
    if expr.contains(',') {
        let xs = expr
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        return if xs.len() == space.dim() {
            Ok(xs)
        } else if xs.len() == space.dtype.b2() {
            Ok(space.h2(&xs))
        } else {
            Err(Error::Dimension(format!(
                "expected {} or {} coordinates, found {}",
                space.dtype.b2(),
                space.dim(),
                xs.len()
            )))
        };
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for ch in expr.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('*') && !cur.ends_with('/')
        {
            terms.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            negative = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("dangling sign in {expr}")));
    }
    terms.push((negative, cur));
    let mut out = zero_vec(space.dim());
    for (neg, term) in terms {
        let (coef, rest) = match term.split_once('*') {
            Some((c, r)) => (parse_rational(c)?, r.to_string()),
            None => (rat(1), term.clone()),
        };
        let (name, den) = match rest.split_once('/') {
            Some((n, d)) => (n.to_string(), parse_rational(d)?),
            None => (rest.clone(), rat(1)),
        };
        if den == rat(0) {
            return Err(Error::Parse(format!("division by zero in {term}")));
        }
        let mut c = coef / den;
        if neg {
            c = -c;
        }
        out = vec_add(&out, &vec_scale(&c, &named_vector(space, &name)?));
    }
    Ok(out)
}

/// Human-readable form `α + 5/4 β` of an ambient vector.
pub fn describe_vector(space: &ExtMukaiSpace, v: &[Rational]) -> String {
    let b2 = space.dtype.b2();
    let label = |i: usize| -> String {
        if i == 0 {
            "α".into()
        } else if i == b2 + 1 {
            "β".into()
        } else if space.delta().is_ok() && i == b2 {
            "δ".into()
        } else {
            format!("h{}", i - 1)
        }
    };
    let mut parts: Vec<String> = Vec::new();
    for (i, x) in v.iter().enumerate() {
        if *x == rat(0) {
            continue;
        }
        let mag = if *x < rat(0) { -x.clone() } else { x.clone() };
        let coeff = if mag == rat(1) {
            String::new()
        } else {
            format!("{} ", format_rational(&mag))
        };
        let sign = if *x < rat(0) { "-" } else { "+" };
        parts.push(format!("{sign} {coeff}{}", label(i)));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let joined = parts.join(" ");
    match joined.strip_prefix("+ ") {
        Some(rest) => rest.to_string(),
        None => format!("-{}", &joined[2..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    fn k3n(n: u32) -> ExtMukaiSpace {
        ExtMukaiSpace::new(DeformationType::k3n(n).unwrap())
    }

    #[test]
    fn expressions() {
        let s = k3n(2);
        assert_eq!(parse_vector_expr(&s, "0").unwrap(), zero_vec(25));
        let d = parse_vector_expr(&s, "delta/3").unwrap();
        assert_eq!(d[23], frac(1, 3));
        let v = parse_vector_expr(&s, "alpha_t+beta").unwrap();
        assert_eq!(v[24], frac(3, 4));
        let v = parse_vector_expr(&s, "2*h0-3/2*h1").unwrap();
        assert_eq!((v[1].clone(), v[2].clone()), (rat(2), frac(-3, 2)));
        let v = parse_vector_expr(&s, "-alpha").unwrap();
        assert_eq!(v[0], rat(-1));
        assert!(parse_vector_expr(&s, "gamma").is_err());
    }

    #[test]
    fn describe() {
        let s = k3n(2);
        let mut v = s.alpha();
        v[24] = frac(5, 4);
        assert_eq!(describe_vector(&s, &v), "α + 5/4 β");
        assert_eq!(describe_vector(&s, &vec_scale(&rat(-1), &v)), "-α - 5/4 β");
    }

    #[test]
    fn round_trips() {
        let d = DeformationType::kumn(3).unwrap();
        assert_eq!(dtype_from_json(&dtype_to_json(&d)).unwrap(), d);
        let s = k3n(2);
        let l = k3n_lattices(&s).unwrap().lambda_g;
        let back = lattice_from_json(&lattice_to_json(&l)).unwrap();
        assert!(back.same_set(&l));
        let g = s.b_field(&s.h2_basis(0)).unwrap();
        let back = isometry_from_json(&isometry_to_json(&g, "ext"), Path::new(".")).unwrap();
        assert_eq!(back.matrix(), g.matrix());
    }
}
