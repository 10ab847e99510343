//! Reference matrices, transcribed entry by entry and evaluated exactly.
//!
//! Each entry is a small expression in `g` (`+ - * / ^`, parentheses,
//! `sqrt(...)` of a rational, and named symbols). Evaluation happens in the
//! surd field, so entries such as `-sqrt(2*g^2*(1-g^2))` compare exactly
//! against the library's output.

use std::collections::BTreeMap;

use quasilocal_core::dyson::{factor_diagonal, hermitize, tridiagonal_omega, HermitizeOptions};
use quasilocal_core::lattice::point_defect;
use quasilocal_core::metric::{closed_form_theta, gamma_family};
use quasilocal_core::{BandMatrix, DysonError, MetricError, ModelError, Rational, Scalar, Surd};
use serde_json::{json, Value};

const BUNDLED: &str = include_str!("../fixtures/reference_matrices.json");

/// Window used to build the library side of every comparison.
pub const FIXTURE_WINDOW: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture file: {0}")]
    Format(String),
    #[error("expression {expr:?}: {message}")]
    Expression { expr: String, message: String },
    #[error("unknown matrix `{0}`")]
    UnknownMatrix(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Dyson(#[from] DysonError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    /// Unlisted entries with both indices within this radius must be zero.
    pub blank_zero_radius: usize,
    pub entries: Vec<(isize, isize, String)>,
}

/// A printed entry known to disagree with its own defining relations.
#[derive(Clone, Debug)]
pub struct Erratum {
    pub matrix: String,
    pub at: (isize, isize),
    pub printed: String,
    pub corrected: String,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct FixtureSet {
    symbols: BTreeMap<String, String>,
    pub matrices: Vec<Fixture>,
    pub errata: Vec<Erratum>,
}

fn format_err(msg: impl Into<String>) -> FixtureError {
    FixtureError::Format(msg.into())
}

fn site_pair(v: &Value) -> Option<(isize, isize)> {
    let a = v.as_array()?;
    Some((a.first()?.as_i64()? as isize, a.get(1)?.as_i64()? as isize))
}

impl FixtureSet {
    /// The fixture file shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled fixture file is well formed")
    }

    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let v: Value = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
        let symbols = v["symbols"]
            .as_object()
            .ok_or_else(|| format_err("missing symbols"))?
            .iter()
            .map(|(k, e)| {
                e.as_str()
                    .map(|s| (k.clone(), s.to_string()))
                    .ok_or_else(|| format_err(format!("symbol {k} is not a string")))
            })
            .collect::<Result<_, _>>()?;
        let mut matrices = Vec::new();
        for m in v["matrices"]
            .as_array()
            .ok_or_else(|| format_err("missing matrices"))?
        {
            let name = m["name"]
                .as_str()
                .ok_or_else(|| format_err("matrix without a name"))?
                .to_string();
            let mut entries = Vec::new();
            for e in m["entries"]
                .as_array()
                .ok_or_else(|| format_err(format!("{name}: missing entries")))?
            {
                let (i, j) = site_pair(e).ok_or_else(|| format_err(format!("{name}: bad site")))?;
                let expr = e[2]
                    .as_str()
                    .ok_or_else(|| format_err(format!("{name}: bad entry at ({i}, {j})")))?;
                entries.push((i, j, expr.to_string()));
            }
            matrices.push(Fixture {
                blank_zero_radius: m["blank_zero_radius"].as_u64().unwrap_or(0) as usize,
                name,
                entries,
            });
        }
        let mut errata = Vec::new();
        for e in v["errata"].as_array().map(Vec::as_slice).unwrap_or(&[]) {
            let text = |k: &str| {
                e[k].as_str()
                    .map(str::to_string)
                    .ok_or_else(|| format_err(format!("erratum field {k}")))
            };
            errata.push(Erratum {
                matrix: text("matrix")?,
                at: site_pair(&e["at"]).ok_or_else(|| format_err("erratum site"))?,
                printed: text("printed")?,
                corrected: text("corrected")?,
                note: text("note")?,
            });
        }
        Ok(FixtureSet {
            symbols,
            matrices,
            errata,
        })
    }

    pub fn get(&self, name: &str) -> Option<&Fixture> {
        self.matrices.iter().find(|m| m.name == name)
    }

    /// Evaluates an entry expression at coupling `g`.
    pub fn evaluate(&self, expr: &str, g: &Rational) -> Result<Surd, FixtureError> {
        Evaluator {
            symbols: &self.symbols,
            g,
            depth: 0,
        }
        .eval(expr)
    }

    fn erratum(&self, matrix: &str, at: (isize, isize)) -> Option<&Erratum> {
        self.errata
            .iter()
            .find(|e| e.matrix == matrix && e.at == at)
    }
}

struct Evaluator<'a> {
    symbols: &'a BTreeMap<String, String>,
    g: &'a Rational,
    depth: usize,
}

struct Parser<'s, 'a> {
    src: &'s [u8],
    pos: usize,
    ev: &'s Evaluator<'a>,
}

impl Evaluator<'_> {
    fn eval(&self, expr: &str) -> Result<Surd, FixtureError> {
        let mut p = Parser {
            src: expr.as_bytes(),
            pos: 0,
            ev: self,
        };
        let v = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(v)
    }
}

impl Parser<'_, '_> {
    fn error(&self, message: impl Into<String>) -> FixtureError {
        FixtureError::Expression {
            expr: String::from_utf8_lossy(self.src).into_owned(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), FixtureError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn sum(&mut self) -> Result<Surd, FixtureError> {
        let mut acc = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Surd, FixtureError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                acc * rhs
            } else {
                acc.try_div(&rhs)
                    .map_err(|e| self.error(format!("division failed: {e:?}")))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Surd, FixtureError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            return Ok((0..e).fold(Surd::one(), |acc, _| acc * base.clone()));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u32, FixtureError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected an integer"))
    }

    fn atom(&mut self) -> Result<Surd, FixtureError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(Surd::from_i64(i64::from(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(u8::is_ascii_alphanumeric)
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match name {
                    "g" => Ok(Surd::from(self.ev.g.clone())),
                    "sqrt" => {
                        self.expect(b'(')?;
                        let arg = self.sum()?;
                        self.expect(b')')?;
                        let r = arg
                            .as_rational()
                            .ok_or_else(|| self.error("sqrt of a non-rational value"))?;
                        Surd::sqrt_rational(&r)
                            .ok_or_else(|| self.error("sqrt of a negative value"))
                    }
                    _ => self.symbol(name),
                }
            }
            _ => Err(self.error("unexpected input")),
        }
    }

    fn symbol(&self, name: &str) -> Result<Surd, FixtureError> {
        let expr = self
            .ev
            .symbols
            .get(name)
            .ok_or_else(|| self.error(format!("unknown symbol `{name}`")))?;
        if self.ev.depth > 8 {
            return Err(self.error("symbol definitions nest too deeply"));
        }
        Evaluator {
            symbols: self.ev.symbols,
            g: self.ev.g,
            depth: self.ev.depth + 1,
        }
        .eval(expr)
    }
}

/// The library's version of a named fixture matrix at coupling `g`.
pub fn computed_matrix(name: &str, g: &Rational) -> Result<BandMatrix<Surd>, FixtureError> {
    let n = FIXTURE_WINDOW;
    let h =
        || -> Result<BandMatrix<Rational>, FixtureError> { Ok(point_defect(g.clone(), n)?.matrix) };
    let theta = |r: usize| -> Result<BandMatrix<Surd>, FixtureError> {
        Ok(closed_form_theta(r, g.clone(), n)?.matrix.lift())
    };
    let diagonal_map = || -> Result<_, FixtureError> {
        Ok(factor_diagonal(
            &closed_form_theta(1, g.clone(), n)?.matrix,
        )?)
    };
    Ok(match name {
        "hamiltonian" => h()?.lift(),
        "theta_gamma_minus_one" => gamma_family(g.clone(), Rational::from_i64(-1), n)?
            .matrix
            .lift(),
        "omega_diagonal" => diagonal_map()?.omega,
        "h_diagonal" => {
            hermitize(&h()?.lift(), &diagonal_map()?, HermitizeOptions::default())?.matrix
        }
        "omega_tridiagonal" => tridiagonal_omega(g.clone(), n)?.omega,
        "omega_tridiagonal_inverse" => tridiagonal_omega(g.clone(), n)?.inverse,
        "h_tridiagonal" => {
            let map = tridiagonal_omega(g.clone(), n)?;
            hermitize(&h()?.lift(), &map, HermitizeOptions::default())?.matrix
        }
        other => match other.strip_prefix("theta_").and_then(|r| r.parse().ok()) {
            Some(r) => theta(r)?,
            None => return Err(FixtureError::UnknownMatrix(other.to_string())),
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub at: (isize, isize),
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErratumCheck {
    pub at: (isize, isize),
    pub printed: String,
    pub computed: String,
    /// The printed value agrees with the computation after all, so the
    /// erratum is stale.
    pub printed_matches: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixReport {
    pub name: String,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub errata: Vec<ErratumCheck>,
}

impl MatrixReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.errata.iter().all(|e| !e.printed_matches)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub g: Rational,
    pub matrices: Vec<MatrixReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.matrices.iter().all(MatrixReport::passed)
    }

    pub fn to_json(&self) -> Value {
        let site = |(i, j): (isize, isize)| json!([i, j]);
        let matrices: Vec<Value> = self
            .matrices
            .iter()
            .map(|m| {
                json!({
                    "name": m.name,
                    "checked": m.checked,
                    "passed": m.passed(),
                    "mismatches": m.mismatches.iter().map(|x| json!({
                        "at": site(x.at), "expected": x.expected, "found": x.found,
                    })).collect::<Vec<_>>(),
                    "errata": m.errata.iter().map(|x| json!({
                        "at": site(x.at), "printed": x.printed, "computed": x.computed,
                        "printed_matches": x.printed_matches,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "g": self.g.to_string(), "passed": self.passed(), "matrices": matrices })
    }
}

/// Compares one fixture against the library at coupling `g`.
pub fn verify_matrix(
    set: &FixtureSet,
    fixture: &Fixture,
    g: &Rational,
) -> Result<MatrixReport, FixtureError> {
    let computed = computed_matrix(&fixture.name, g)?;
    let mut report = MatrixReport {
        name: fixture.name.clone(),
        checked: 0,
        mismatches: Vec::new(),
        errata: Vec::new(),
    };
    let mut listed = std::collections::BTreeSet::new();
    for (i, j, expr) in &fixture.entries {
        listed.insert((*i, *j));
        let found = computed.get(*i, *j);
        let expected = match set.erratum(&fixture.name, (*i, *j)) {
            Some(e) => {
                let printed = set.evaluate(&e.printed, g)?;
                report.errata.push(ErratumCheck {
                    at: (*i, *j),
                    printed: printed.to_string(),
                    computed: found.to_string(),
                    printed_matches: printed == found,
                });
                set.evaluate(&e.corrected, g)?
            }
            None => set.evaluate(expr, g)?,
        };
        report.checked += 1;
        if expected != found {
            report.mismatches.push(Mismatch {
                at: (*i, *j),
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
    }
    let r = fixture.blank_zero_radius as isize;
    for i in -r..=r {
        for j in -r..=r {
            if listed.contains(&(i, j)) {
                continue;
            }
            report.checked += 1;
            let found = computed.get(i, j);
            if !found.is_zero() {
                report.mismatches.push(Mismatch {
                    at: (i, j),
                    expected: "0".to_string(),
                    found: found.to_string(),
                });
            }
        }
    }
    Ok(report)
}

/// Replays every bundled fixture at coupling `g` (needs `0 < |g| < 1`).
pub fn verify(g: &Rational) -> Result<VerifyReport, FixtureError> {
    let set = FixtureSet::bundled();
    let matrices = set
        .matrices
        .iter()
        .map(|f| verify_matrix(&set, f, g))
        .collect::<Result<_, _>>()?;
    Ok(VerifyReport {
        g: g.clone(),
        matrices,
    })
}
