//! JSON interchange for band matrices, metrics, Dyson maps and model descriptors.
//!
//! A band matrix is
//! `{"window": N, "scalar": "rational"|"float"|"surd", "diagonals": {"<offset>": [...]}}`.
//! Rationals and surds travel as strings (`"-3/4"`, `"1/2*sqrt(6)"`), floats
//! as numbers printed with `%.15e`. Object keys are sorted, so equal inputs
//! serialize to identical bytes.

use std::fmt;

use quasilocal_core::dyson::{DysonMap, Provenance};
use quasilocal_core::lattice::{
    free_laplacian, multiparam, point_defect, two_center, LatticeHamiltonian,
};
use quasilocal_core::metric::{MetricKind, MetricSpec};
use quasilocal_core::{
    AnyBandMatrix, BandError, BandMatrix, ModelError, Rational, Scalar, ScalarKind, Surd,
};
use serde_json::{json, Map, Number, Value};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("expected scalar kind `{expected}`, found `{found}`")]
    KindMismatch {
        expected: &'static str,
        found: String,
    },
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> JsonError {
    JsonError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

/// A float as a JSON number in `%.15e` form; non-finite values become `null`.
pub fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.15e}");
    serde_json::from_str::<Number>(&text)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Scalars with a JSON encoding.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;
    /// Conversion from a command-line value; exact fields refuse floats.
    fn from_scalar_value(v: &ScalarValue) -> Option<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => s.parse().map_err(|_| format!("bad rational {s:?}")),
            Value::Number(n) => n
                .as_i64()
                .map(<Rational as Scalar>::from_i64)
                .ok_or_else(|| format!("non-integer number {n} in rational matrix")),
            other => Err(format!("expected a rational string, found {other}")),
        }
    }

    fn from_scalar_value(v: &ScalarValue) -> Option<Self> {
        match v {
            ScalarValue::Exact(r) => Some(r.clone()),
            ScalarValue::Float(_) => None,
        }
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        float_value(*self)
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| format!("bad float {n}")),
            Value::Null => Ok(f64::NAN),
            other => Err(format!("expected a number, found {other}")),
        }
    }

    fn from_scalar_value(v: &ScalarValue) -> Option<Self> {
        Some(v.to_f64())
    }
}

impl JsonScalar for Surd {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => s.parse().map_err(|e| format!("{e}")),
            other => Err(format!("expected a surd string, found {other}")),
        }
    }

    fn from_scalar_value(v: &ScalarValue) -> Option<Self> {
        match v {
            ScalarValue::Exact(r) => Some(Surd::from(r.clone())),
            ScalarValue::Float(_) => None,
        }
    }
}

pub fn band_to_json<T: JsonScalar>(m: &BandMatrix<T>) -> Value {
    let diagonals: Map<String, Value> = m
        .diagonals()
        .map(|(d, vals)| {
            (
                d.to_string(),
                Value::Array(vals.iter().map(T::to_json).collect()),
            )
        })
        .collect();
    json!({
        "window": m.window(),
        "scalar": T::KIND.as_str(),
        "diagonals": diagonals,
    })
}

fn field<'a>(v: &'a Value, name: &'static str) -> Result<&'a Value, JsonError> {
    v.get(name).ok_or(JsonError::Missing(name))
}

fn usize_field(v: &Value, name: &'static str) -> Result<usize, JsonError> {
    field(v, name)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| invalid(name, "expected a nonnegative integer"))
}

fn scalar_kind(v: &Value) -> Result<ScalarKind, JsonError> {
    match field(v, "scalar")?.as_str() {
        Some("rational") => Ok(ScalarKind::Rational),
        Some("float") => Ok(ScalarKind::Float),
        Some("surd") => Ok(ScalarKind::Surd),
        _ => Err(invalid("scalar", "expected rational, float or surd")),
    }
}

pub fn band_from_json<T: JsonScalar>(v: &Value) -> Result<BandMatrix<T>, JsonError> {
    let kind = scalar_kind(v)?;
    if kind != T::KIND {
        return Err(JsonError::KindMismatch {
            expected: T::KIND.as_str(),
            found: kind.as_str().to_string(),
        });
    }
    let window = usize_field(v, "window")?;
    let diags = field(v, "diagonals")?
        .as_object()
        .ok_or_else(|| invalid("diagonals", "expected an object"))?;
    let mut parsed = Vec::with_capacity(diags.len());
    for (key, vals) in diags {
        let offset: isize = key
            .parse()
            .map_err(|_| invalid("diagonals", format!("bad offset {key:?}")))?;
        let vals = vals
            .as_array()
            .ok_or_else(|| invalid(format!("diagonals.{key}"), "expected an array"))?
            .iter()
            .map(T::from_json)
            .collect::<Result<Vec<T>, String>>()
            .map_err(|e| invalid(format!("diagonals.{key}"), e))?;
        parsed.push((offset, vals));
    }
    Ok(BandMatrix::from_diagonals(window, parsed)?)
}

pub fn any_band_from_json(v: &Value) -> Result<AnyBandMatrix, JsonError> {
    Ok(match scalar_kind(v)? {
        ScalarKind::Rational => AnyBandMatrix::Rational(band_from_json(v)?),
        ScalarKind::Float => AnyBandMatrix::Float(band_from_json(v)?),
        ScalarKind::Surd => AnyBandMatrix::Surd(band_from_json(v)?),
    })
}

pub fn any_band_to_json(m: &AnyBandMatrix) -> Value {
    match m {
        AnyBandMatrix::Rational(m) => band_to_json(m),
        AnyBandMatrix::Float(m) => band_to_json(m),
        AnyBandMatrix::Surd(m) => band_to_json(m),
    }
}

fn list<T: JsonScalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(T::to_json).collect())
}

pub fn metric_kind_to_json<T: JsonScalar>(kind: &MetricKind<T>) -> Value {
    match kind {
        MetricKind::ClosedForm { range, g } => {
            json!({ "type": "closed_form", "R": range, "g": g.to_json() })
        }
        MetricKind::Solved { range, diamond } => {
            json!({ "type": "solved", "R": range, "diamond": diamond })
        }
        MetricKind::Superposition { alphas, g } => json!({
            "type": "superposition",
            "alphas": list(alphas),
            "g": g.as_ref().map_or(Value::Null, T::to_json),
        }),
        MetricKind::DiagonalMultiparam { params } => {
            json!({ "type": "diagonal_multiparam", "params": list(params) })
        }
        MetricKind::CrossDemo { k } => json!({ "type": "cross_demo", "k": k }),
    }
}

/// Band-matrix JSON with an added `"kind"` descriptor.
pub fn metric_to_json<T: JsonScalar>(spec: &MetricSpec<T>) -> Value {
    let mut v = band_to_json(&spec.matrix);
    v["kind"] = metric_kind_to_json(&spec.kind);
    v
}

pub fn metric_from_json<T: JsonScalar>(v: &Value) -> Result<MetricSpec<T>, JsonError> {
    let matrix = band_from_json(v)?;
    let kind = field(v, "kind")?;
    let scalar = |name: &'static str| -> Result<T, JsonError> {
        T::from_json(field(kind, name)?).map_err(|e| invalid(name, e))
    };
    let scalars = |name: &'static str| -> Result<Vec<T>, JsonError> {
        field(kind, name)?
            .as_array()
            .ok_or_else(|| invalid(name, "expected an array"))?
            .iter()
            .map(|x| T::from_json(x).map_err(|e| invalid(name, e)))
            .collect()
    };
    let kind = match field(kind, "type")?.as_str() {
        Some("closed_form") => MetricKind::ClosedForm {
            range: usize_field(kind, "R")?,
            g: scalar("g")?,
        },
        Some("solved") => MetricKind::Solved {
            range: usize_field(kind, "R")?,
            diamond: usize_field(kind, "diamond")?,
        },
        Some("superposition") => MetricKind::Superposition {
            alphas: scalars("alphas")?,
            g: match kind.get("g") {
                None | Some(Value::Null) => None,
                Some(_) => Some(scalar("g")?),
            },
        },
        Some("diagonal_multiparam") => MetricKind::DiagonalMultiparam {
            params: scalars("params")?,
        },
        Some("cross_demo") => MetricKind::CrossDemo {
            k: usize_field(kind, "k")?,
        },
        _ => return Err(invalid("kind.type", "unknown metric kind")),
    };
    Ok(MetricSpec { kind, matrix })
}

pub fn provenance_to_json<S: JsonScalar>(p: &Provenance<S>) -> Value {
    match p {
        Provenance::Tridiagonal { g } => json!({ "type": p.name(), "g": g.to_json() }),
        _ => json!({ "type": p.name() }),
    }
}

/// `Ω` as band-matrix JSON, plus `"inverse"`, `"provenance"` and `"warning"`.
pub fn dyson_to_json<S: JsonScalar>(map: &DysonMap<S>) -> Value {
    let mut v = band_to_json(&map.omega);
    v["inverse"] = band_to_json(&map.inverse);
    v["provenance"] = provenance_to_json(&map.provenance);
    v["warning"] = map
        .warning
        .map_or(Value::Null, |w| Value::String(w.to_string()));
    v
}

pub fn dyson_from_json<S: JsonScalar>(v: &Value) -> Result<DysonMap<S>, JsonError> {
    let omega = band_from_json(v)?;
    let inverse = band_from_json(field(v, "inverse")?)?;
    let prov = field(v, "provenance")?;
    let provenance = match field(prov, "type")?.as_str() {
        Some("diagonal_sqrt") => Provenance::DiagonalSqrt,
        Some("triangular_factor") => Provenance::TriangularFactor,
        Some("tridiagonal") => Provenance::Tridiagonal {
            g: S::from_json(field(prov, "g")?).map_err(|e| invalid("provenance.g", e))?,
        },
        _ => return Err(invalid("provenance.type", "unknown provenance")),
    };
    let warning = match v.get("warning") {
        Some(Value::String(_)) => Some(quasilocal_core::dyson::BOUNDARY_WARNING),
        _ => None,
    };
    Ok(DysonMap {
        omega,
        inverse,
        provenance,
        warning,
    })
}

/// A scalar as typed on the command line or in a descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarValue {
    Exact(Rational),
    Float(f64),
}

impl ScalarValue {
    /// `"p/q"` or an integer is exact; anything else that parses as a float
    /// is a float.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let exact_syntax = !t.is_empty()
            && t.chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '/' | '-' | '+'));
        if exact_syntax {
            if let Ok(r) = t.trim_start_matches('+').parse::<Rational>() {
                return Ok(ScalarValue::Exact(r));
            }
        }
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(ScalarValue::Float)
            .ok_or_else(|| format!("cannot parse {text:?} as a rational p/q or a number"))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarValue::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Exact(r) => r.to_f64(),
            ScalarValue::Float(x) => *x,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ScalarValue::Exact(r) => r.to_json(),
            ScalarValue::Float(x) => float_value(*x),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => Self::parse(s),
            Value::Number(n) => n
                .as_i64()
                .map(|i| ScalarValue::Exact(<Rational as Scalar>::from_i64(i)))
                .or_else(|| n.as_f64().map(ScalarValue::Float))
                .ok_or_else(|| format!("bad number {n}")),
            other => Err(format!("expected a scalar, found {other}")),
        }
    }
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Exact(r) => write!(f, "{r}"),
            ScalarValue::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    FreeLaplacian,
    PointDefect,
    TwoCenter,
    MultiParam,
}

impl ModelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::FreeLaplacian => "free_laplacian",
            ModelName::PointDefect => "point_defect",
            ModelName::TwoCenter => "two_center",
            ModelName::MultiParam => "multiparam",
        }
    }

    /// Accepts both `point_defect` and `point-defect` spellings.
    pub fn parse(text: &str) -> Option<Self> {
        match text.replace('-', "_").as_str() {
            "free_laplacian" | "free" => Some(ModelName::FreeLaplacian),
            "point_defect" => Some(ModelName::PointDefect),
            "two_center" => Some(ModelName::TwoCenter),
            "multiparam" => Some(ModelName::MultiParam),
            _ => None,
        }
    }
}

/// `{"model": "point_defect", "g": "1/2", "N": 50}`, with `"M"` for the
/// two-center model and `"params"` for the multiparameter chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelDescriptor {
    pub model: ModelName,
    pub g: Option<ScalarValue>,
    pub separation: Option<usize>,
    pub params: Vec<ScalarValue>,
    pub window: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum DescriptorError {
    #[error("model `{0}` needs `{1}`")]
    MissingParameter(&'static str, &'static str),
    #[error("value {0} is not exact; use float mode")]
    NotExact(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ModelDescriptor {
    /// True when every parameter is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.g.iter().chain(&self.params).all(ScalarValue::is_exact)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "model": self.model.as_str(), "N": self.window });
        if let Some(g) = &self.g {
            v["g"] = g.to_json();
        }
        if let Some(m) = self.separation {
            v["M"] = json!(m);
        }
        if !self.params.is_empty() {
            v["params"] = Value::Array(self.params.iter().map(ScalarValue::to_json).collect());
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, JsonError> {
        let model = field(v, "model")?
            .as_str()
            .and_then(ModelName::parse)
            .ok_or_else(|| invalid("model", "unknown model"))?;
        let g = v
            .get("g")
            .map(ScalarValue::from_json)
            .transpose()
            .map_err(|e| invalid("g", e))?;
        let separation = v.get("M").map(|_| usize_field(v, "M")).transpose()?;
        let params = match v.get("params") {
            None => Vec::new(),
            Some(p) => p
                .as_array()
                .ok_or_else(|| invalid("params", "expected an array"))?
                .iter()
                .map(ScalarValue::from_json)
                .collect::<Result<_, _>>()
                .map_err(|e| invalid("params", e))?,
        };
        Ok(ModelDescriptor {
            model,
            g,
            separation,
            params,
            window: usize_field(v, "N")?,
        })
    }

    fn convert<T: JsonScalar>(v: &ScalarValue) -> Result<T, DescriptorError> {
        T::from_scalar_value(v).ok_or_else(|| DescriptorError::NotExact(v.to_string()))
    }

    pub fn coupling<T: JsonScalar>(&self) -> Result<T, DescriptorError> {
        let name = self.model.as_str();
        Self::convert(
            self.g
                .as_ref()
                .ok_or(DescriptorError::MissingParameter(name, "g"))?,
        )
    }

    pub fn build<T: JsonScalar>(&self) -> Result<LatticeHamiltonian<T>, DescriptorError> {
        let name = self.model.as_str();
        Ok(match self.model {
            ModelName::FreeLaplacian => free_laplacian(self.window)?,
            ModelName::PointDefect => point_defect(self.coupling()?, self.window)?,
            ModelName::TwoCenter => two_center(
                self.coupling()?,
                self.separation
                    .ok_or(DescriptorError::MissingParameter(name, "M"))?,
                self.window,
            )?,
            ModelName::MultiParam => {
                if self.params.is_empty() {
                    return Err(DescriptorError::MissingParameter(name, "params"));
                }
                let params = self
                    .params
                    .iter()
                    .map(Self::convert)
                    .collect::<Result<Vec<T>, _>>()?;
                multiparam(params, self.window)?
            }
        })
    }
}
