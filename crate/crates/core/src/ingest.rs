//! Corpus directories: `meta.json`, `formulas/*.stl` and `traces/*.csv`.
//!
//! ```text
//! meta.json  {"dims": 1, "domain": [[0, 320]], "x_max": [320], "T": 300,
//!             "order": ["phi_low", "phi_high"]}
//! ```
//!
//! `x_max` defaults to the domain's upper bounds and `order` to file-name
//! order. Values are kept raw; [`normalize`] scales on demand.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::formula::{Formula, Predicate};
use crate::parser::parse_formula;
use crate::scalar::Scalar;
use crate::trace::{Domain, Trace};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusMeta<S> {
    pub domain: Domain<S>,
    pub x_max: Vec<S>,
    pub horizon: usize,
    pub order: Vec<String>,
}

impl<S: Scalar> CorpusMeta<S> {
    pub fn dims(&self) -> usize {
        self.domain.dims()
    }
}

#[derive(Debug, Clone)]
pub struct Corpus<S> {
    pub meta: CorpusMeta<S>,
    /// Formulae in `order`, then the remaining ones by name.
    pub formulas: Vec<(String, Formula<S>)>,
    pub traces: BTreeMap<String, Trace<S>>,
}

impl<S: Scalar> Corpus<S> {
    pub fn formula(&self, name: &str) -> Option<&Formula<S>> {
        self.formulas.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn trace(&self, name: &str) -> Option<&Trace<S>> {
        self.traces.get(name)
    }
}

fn scalar_from_json<S: Scalar>(v: &Value, what: &str) -> Result<S> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::InvalidConfig(format!("{what} must be a number"))),
    };
    S::parse_decimal(&text).ok_or_else(|| Error::InvalidConfig(format!("{what}: bad number '{text}'")))
}

fn parse_meta<S: Scalar>(text: &str) -> Result<CorpusMeta<S>> {
    let v: Value = serde_json::from_str(text)?;
    let field = |name: &str| v.get(name).ok_or_else(|| Error::InvalidConfig(format!("missing field '{name}'")));
    let dims = field("dims")?.as_u64().ok_or_else(|| Error::InvalidConfig("dims must be a positive integer".into()))?
        as usize;
    let bounds = field("domain")?
        .as_array()
        .ok_or_else(|| Error::InvalidConfig("domain must be a list of [lo, hi] pairs".into()))?
        .iter()
        .enumerate()
        .map(|(j, pair)| match pair.as_array().map(Vec::as_slice) {
            Some([lo, hi]) => {
                let what = format!("domain of x{}", j + 1);
                Ok((scalar_from_json(lo, &what)?, scalar_from_json(hi, &what)?))
            }
            _ => Err(Error::InvalidConfig(format!("domain of x{} must be [lo, hi]", j + 1))),
        })
        .collect::<Result<Vec<(S, S)>>>()?;
    if bounds.len() != dims {
        return Err(Error::DimensionMismatch(format!("dims is {dims} but domain lists {} range(s)", bounds.len())));
    }
    let domain = Domain::new(bounds)?;
    let x_max = match v.get("x_max") {
        None => (0..dims).map(|j| domain.hi(j).clone()).collect(),
        Some(list) => list
            .as_array()
            .ok_or_else(|| Error::InvalidConfig("x_max must be a list".into()))?
            .iter()
            .map(|x| scalar_from_json(x, "x_max"))
            .collect::<Result<Vec<S>>>()?,
    };
    if x_max.len() != dims {
        return Err(Error::DimensionMismatch(format!("dims is {dims} but x_max lists {} value(s)", x_max.len())));
    }
    let horizon = field("T")?.as_u64().ok_or_else(|| Error::InvalidConfig("T must be a nonnegative integer".into()))?
        as usize;
    let order = match v.get("order") {
        None => Vec::new(),
        Some(list) => list
            .as_array()
            .and_then(|l| l.iter().map(|x| x.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| Error::InvalidConfig("order must be a list of names".into()))?,
    };
    Ok(CorpusMeta { domain, x_max, horizon, order })
}

/// Reads `meta.json`.
pub fn read_meta<S: Scalar>(path: impl AsRef<Path>) -> Result<CorpusMeta<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_meta(&text).map_err(|e| e.in_file(path))
}

fn line_of(text: &str, byte: usize) -> usize {
    text.as_bytes()[..byte.min(text.len())].iter().filter(|b| **b == b'\n').count() + 1
}

/// Reads a single-formula file; syntax errors name the line.
pub fn read_formula_file<S: Scalar>(path: impl AsRef<Path>, dims: usize) -> Result<Formula<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_formula(&text, dims).map_err(|e| match e {
        Error::Syntax { position, message } | Error::BadInterval { position, message } => {
            Error::File { path: path.into(), message: format!("line {}: {message}", line_of(&text, position)) }
        }
        other => other.in_file(path),
    })
}

fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::from(e).in_file(dir))? {
        let path = entry.map_err(|e| Error::from(e).in_file(dir))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Every `*.stl` file of `dir` by file name.
pub fn read_formula_dir<S: Scalar>(dir: impl AsRef<Path>, dims: usize) -> Result<Vec<(String, Formula<S>)>> {
    files_with_extension(dir.as_ref(), "stl")?
        .into_iter()
        .map(|p| Ok((stem(&p), read_formula_file(&p, dims)?)))
        .collect()
}

/// Loads and validates a corpus directory.
pub fn load_corpus<S: Scalar>(path: impl AsRef<Path>) -> Result<Corpus<S>> {
    let root = path.as_ref();
    let meta: CorpusMeta<S> = read_meta(root.join("meta.json"))?;
    let dims = meta.dims();

    let mut formulas = Vec::new();
    let formula_dir = root.join("formulas");
    if formula_dir.is_dir() {
        for file in files_with_extension(&formula_dir, "stl")? {
            let f: Formula<S> = read_formula_file(&file, dims)?;
            if f.horizon() > meta.horizon {
                return Err(Error::HorizonExceeded { horizon: f.horizon(), bound: meta.horizon }.in_file(&file));
            }
            formulas.push((stem(&file), f));
        }
    }
    let rank = |name: &str| meta.order.iter().position(|n| n == name).unwrap_or(usize::MAX);
    formulas.sort_by(|(a, _), (b, _)| rank(a).cmp(&rank(b)).then_with(|| a.cmp(b)));
    if let Some(missing) = meta.order.iter().find(|n| !formulas.iter().any(|(m, _)| m == *n)) {
        return Err(Error::InvalidConfig(format!("order names '{missing}' but no such formula file")).in_file(root.join("meta.json")));
    }

    let mut traces = BTreeMap::new();
    let trace_dir = root.join("traces");
    if trace_dir.is_dir() {
        for file in files_with_extension(&trace_dir, "csv")? {
            let tr = Trace::read_csv_file(&file, meta.domain.clone())?;
            if tr.last_time() < meta.horizon {
                return Err(Error::TraceTooShort { required: meta.horizon, available: tr.last_time() }.in_file(&file));
            }
            traces.insert(stem(&file), tr);
        }
    }
    Ok(Corpus { meta, formulas, traces })
}

/// Per-dimension division by `x_max`.
pub fn normalize<S: Scalar>(tr: &Trace<S>, x_max: &[S]) -> Result<Trace<S>> {
    tr.normalize(x_max)
}

/// Rescales predicate thresholds to the unit space of [`normalize`].
pub fn normalize_formula<S: Scalar>(f: &Formula<S>, x_max: &[S]) -> Result<Formula<S>> {
    if let Some(d) = f.max_dim() {
        if d >= x_max.len() {
            return Err(Error::DimensionOutOfRange { index: d + 1, dims: x_max.len() });
        }
    }
    if x_max.iter().any(|m| !m.is_positive()) {
        return Err(Error::InvalidConfig("x_max must be positive".into()));
    }
    Ok(f.map_predicates(&|p| Predicate::new(p.dim, p.cmp, p.threshold.clone() / x_max[p.dim].clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::robustness;
    use crate::scalar::Rational;

    fn q(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    #[test]
    fn meta_parsing() {
        let m: CorpusMeta<Rational> = parse_meta(r#"{"dims": 1, "domain": [[0, 320]], "T": 300}"#).unwrap();
        assert_eq!(m.x_max, vec![q("320")]);
        assert_eq!(m.horizon, 300);
        let m: CorpusMeta<Rational> =
            parse_meta(r#"{"dims": 2, "domain": [[0, 1], ["0", "0.5"]], "x_max": [1, 0.5], "T": 10}"#).unwrap();
        assert_eq!(m.domain.hi(1), &q("0.5"));
        assert!(matches!(
            parse_meta::<Rational>(r#"{"dims": 2, "domain": [[0, 1]], "T": 1}"#),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(parse_meta::<Rational>(r#"{"dims": 1, "domain": [[0, 1]]}"#).is_err());
    }

    #[test]
    fn scaling() {
        let domain = Domain::new(vec![(q("0"), q("320"))]).unwrap();
        let tr = Trace::new(vec![vec![q("160")]; 3], domain.clone()).unwrap();
        let n = normalize(&tr, &[q("320")]).unwrap();
        assert!(n.samples().iter().all(|r| r[0] == q("0.5")));
        let over = Trace::new(vec![vec![q("300")]], domain).unwrap();
        assert!(matches!(normalize(&over, &[q("200")]), Err(Error::NormalizationViolated { .. })));

        let f = parse_formula::<Rational>("G[0,2] x1 <= 40", 1).unwrap();
        let g = normalize_formula(&f, &[q("320")]).unwrap();
        assert_eq!(g, parse_formula("G[0,2] x1 <= 0.125", 1).unwrap());
        let raw = robustness(&tr, &f, 0).unwrap();
        let scaled = robustness(&n, &g, 0).unwrap();
        assert_eq!(raw.finite().unwrap().clone() / q("320"), scaled.finite().unwrap().clone());
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let dir = std::env::temp_dir().join(format!("stl-ingest-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let file = dir.join("bad.stl");
        fs::write(&file, "# comment\nG[0,2](x1 <= 0.5 &\n   )\n").unwrap();
        let err = read_formula_file::<Rational>(&file, 1).unwrap_err().to_string();
        assert!(err.contains("bad.stl") && err.contains("line 3"), "{err}");
        fs::remove_dir_all(&dir).unwrap();
    }
}
