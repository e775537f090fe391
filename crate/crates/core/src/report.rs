//! Request documents and the reports produced for them.
//!
//! Each computation returns a [`Report`]: a list of exact results, each tagged
//! with the method that produced it, plus an agreement flag whenever the same
//! quantity was obtained in two independent ways.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::{
    check_addition_qpn, htop_oracle, htop_oracle_at, min_scale_search, moeller_scale_oracle, DualEntropy,
    LimitDiagnostics,
};
use crate::error::{Error, Result};
use crate::group::{BlockEndomorphism, EndomorphismDocument, FiniteRankPGroup};
use crate::heisenberg::{
    classify_heisenberg, default_sample, entropy_diagonal, entropy_oracle_diagonal, DiagonalEndo, Ring,
};
use crate::lattice::Lattice;
use crate::matrix::{MonicPolynomial, RationalMatrix};
use crate::newton::{entropy_exponent, newton_polygon, root_valuations, yuzvinski_entropy, yuzvinski_scale};
use crate::padic::{EntropyValue, Prime, Q};
use crate::periodic::{PeriodicDocument, PeriodicGroup};

pub const FORMULA: &str = "p-adic Yuzvinski formula (eigenvalues of absolute value > 1)";
pub const FORMULA_REDUCED: &str = "p-adic Yuzvinski formula on the qp<-qp block (divisible part of the torsion-free quotient)";
pub const ORACLE: &str = "cotrajectory oracle lim log[U : C_n(A, U)] / n";
pub const ORACLE_QUOTIENT: &str = "cotrajectory oracle on the torsion-free quotient";
pub const SUM_OVER_PRIMES: &str = "sum of the entropies of the p-components";
pub const SCALE_FORMULA: &str = "product of |λ|_p over eigenvalues with |λ|_p > 1";
pub const MOELLER: &str = "Moller formula lim [U + A^n U : U]^(1/n)";
pub const MIN_SEARCH: &str = "minimum of [A(U) : A(U) ∩ U] over diagonal lattices";
pub const NEWTON: &str = "lower convex hull of (i, v_p(a_i))";
pub const GROUP_CLASSIFICATION: &str = "finite-rank classification: E0 iff no Q_p factor";
pub const PERIODIC_CLASSIFICATION: &str = "E0 iff every p-component is E0";
pub const RANK: &str = "rank_p = n1 + n2 + n3 + n4";
pub const DUALITY: &str = "Pontryagin duality swaps Z_p and Z(p^inf)";
pub const HEISENBERG_SPLIT: &str = "center plus quotient, Z = Q_p and H/Z = Q_p^2";
pub const HEISENBERG_ORACLE: &str = "cotrajectory oracle at H(p^k Z_p), coordinate boxes";
pub const HEISENBERG_CLASS: &str = "H(Z_p) is E0; H(Q_p) is in E<inf but not E0";
pub const ADDITION: &str = "entropy of A equals entropy on the invariant part plus entropy on the quotient";

/// Output encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub window: usize,
    pub cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            window: crate::engine::DEFAULT_WINDOW,
            cap: crate::engine::DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub quantity: String,
    pub value: Value,
    pub provenance: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Value>,
    #[serde(skip)]
    text: String,
}

impl Entry {
    pub fn new(quantity: impl Into<String>, value: impl Serialize, text: impl Into<String>, provenance: &'static str) -> Self {
        Entry {
            quantity: quantity.into(),
            value: serde_json::to_value(value).expect("report values serialize"),
            provenance,
            diagnostics: None,
            text: text.into(),
        }
    }

    pub fn entropy(quantity: impl Into<String>, h: &EntropyValue, provenance: &'static str) -> Self {
        Entry::new(quantity, h, format!("{h} (~{:.6} nats)", h.approx_nats()), provenance)
    }

    fn with_diagnostics(mut self, d: &LimitDiagnostics) -> Self {
        self.diagnostics = Some(serde_json::to_value(d).expect("diagnostics serialize"));
        self
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub input: Value,
    pub results: Vec<Entry>,
    /// Present when some quantity was computed by two routes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
    #[serde(skip)]
    summary: String,
}

impl Report {
    fn new(command: &'static str, input: Value, summary: impl Into<String>) -> Self {
        Report {
            command,
            input,
            results: Vec::new(),
            agreement: None,
            summary: summary.into(),
        }
    }

    fn push(&mut self, e: Entry) {
        self.results.push(e);
    }

    fn agree(&mut self, ok: bool) {
        self.agreement = Some(self.agreement.unwrap_or(true) && ok);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, self.summary);
        for e in &self.results {
            let _ = writeln!(out, "  {} = {}", e.quantity, e.text);
            let _ = writeln!(out, "      via {}", e.provenance);
            if let Some(d) = &e.diagnostics {
                let inc: Vec<String> = d["increments"]
                    .as_array()
                    .map(|a| a.iter().map(|x| x.to_string()).collect())
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "      increments [{}], stable from step {} with period {}",
                    inc.join(" "),
                    d["stabilized_at"],
                    d["period"]
                );
            }
        }
        if let Some(ok) = self.agreement {
            let _ = writeln!(out, "  agreement: {}", if ok { "yes" } else { "NO" });
        }
        out
    }
}

/// Parses a request document, dropping an optional `"command"` field that
/// must then name `expected`.
fn parse_doc<T: for<'de> Deserialize<'de>>(doc: &Value, expected: &str) -> Result<T> {
    let mut v = doc.clone();
    if let Some(obj) = v.as_object_mut() {
        if let Some(c) = obj.remove("command") {
            if c.as_str() != Some(expected) {
                return Err(Error::Parse(format!("document is for command {c}, not {expected:?}")));
            }
        }
    }
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// `{"p": 3, "matrix": [["1/3", "0"], ["1", "2"]]}`, optionally with a base
/// lattice given by generator columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub p: Prime,
    pub matrix: RationalMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<RationalMatrix>,
}

impl MatrixDocument {
    fn check_square(&self) -> Result<()> {
        if !self.matrix.is_square() || self.matrix.rows() == 0 {
            return Err(Error::Dimension("a nonempty square matrix is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditionDocument {
    pub p: Prime,
    pub a1: RationalMatrix,
    pub b: RationalMatrix,
    pub a2: RationalMatrix,
}

enum Subject {
    Matrix(MatrixDocument),
    Group(BlockEndomorphism),
    Periodic(crate::periodic::PeriodicEndomorphism),
}

fn subject(doc: &Value, command: &str) -> Result<Subject> {
    let has = |k: &str| doc.get(k).is_some();
    if has("components") {
        Ok(Subject::Periodic(parse_doc::<PeriodicDocument>(doc, command)?.into_endomorphism()?))
    } else if has("group") {
        Ok(Subject::Group(parse_doc::<EndomorphismDocument>(doc, command)?.into_endomorphism()?))
    } else if has("matrix") {
        let m: MatrixDocument = parse_doc(doc, command)?;
        m.check_square()?;
        Ok(Subject::Matrix(m))
    } else {
        Err(Error::Parse(
            "expected a document with \"matrix\", \"group\" or \"components\"".into(),
        ))
    }
}

fn canonical<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("inputs serialize")
}

fn push_dual(report: &mut Report, label: &str, d: &DualEntropy, formula: &'static str, oracle: &'static str) {
    report.push(Entry::entropy(label, &d.formula, formula));
    report.push(Entry::entropy(label, &d.oracle, oracle).with_diagnostics(&d.diagnostics));
    report.agree(d.agree());
}

fn block_dual(phi: &BlockEndomorphism, lim: Limits) -> Result<DualEntropy> {
    let formula = phi.entropy()?;
    let (oracle, diagnostics) = htop_oracle(&phi.torsion_free_quotient(), phi.group().p, lim.window, lim.cap)?;
    Ok(DualEntropy { formula, oracle, diagnostics })
}

pub fn entropy_report(doc: &Value, lim: Limits) -> Result<Report> {
    match subject(doc, "entropy")? {
        Subject::Matrix(m) => {
            let mut r = Report::new("entropy", canonical(&m), format!("{} on Q_{}^{}", m.matrix, m.p, m.matrix.rows()));
            let d = DualEntropy::compute(&m.matrix, m.p, lim.window, lim.cap)?;
            push_dual(&mut r, "entropy", &d, FORMULA, ORACLE);
            Ok(r)
        }
        Subject::Group(phi) => {
            phi.validate()?;
            let mut r = Report::new("entropy", canonical(&phi), phi.group().to_string());
            let d = block_dual(&phi, lim)?;
            push_dual(&mut r, "entropy", &d, FORMULA_REDUCED, ORACLE_QUOTIENT);
            Ok(r)
        }
        Subject::Periodic(phi) => {
            phi.validate()?;
            let summary = phi
                .group()
                .components()
                .values()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(" x ");
            let mut r = Report::new("entropy", canonical(&phi), if summary.is_empty() { "0".into() } else { summary });
            let mut formula_total = EntropyValue::zero();
            let mut oracle_total = EntropyValue::zero();
            for p in phi.group().primes() {
                let d = block_dual(phi.restrict(p).expect("component"), lim)?;
                push_dual(&mut r, &format!("entropy at {p}"), &d, FORMULA_REDUCED, ORACLE_QUOTIENT);
                formula_total += &d.formula;
                oracle_total += &d.oracle;
            }
            let total = phi.entropy()?;
            r.agree(total == formula_total && total == oracle_total);
            r.push(Entry::entropy("entropy", &total, SUM_OVER_PRIMES));
            Ok(r)
        }
    }
}

pub fn oracle_report(doc: &Value, lim: Limits) -> Result<Report> {
    let (mut r, (h, diag)) = match subject(doc, "oracle")? {
        Subject::Matrix(m) => {
            let summary = format!("{} on Q_{}^{}", m.matrix, m.p, m.matrix.rows());
            let out = match &m.base {
                Some(gens) => htop_oracle_at(&m.matrix, &Lattice::canonicalize(m.p, gens)?, lim.window, lim.cap)?,
                None => htop_oracle(&m.matrix, m.p, lim.window, lim.cap)?,
            };
            (Report::new("oracle", canonical(&m), summary), out)
        }
        Subject::Group(phi) => {
            phi.validate()?;
            let out = htop_oracle(&phi.torsion_free_quotient(), phi.group().p, lim.window, lim.cap)?;
            (Report::new("oracle", canonical(&phi), phi.group().to_string()), out)
        }
        Subject::Periodic(_) => {
            return Err(Error::Invalid("the oracle runs on one prime at a time; use entropy for periodic groups".into()))
        }
    };
    r.push(Entry::entropy("entropy", &h, ORACLE).with_diagnostics(&diag));
    Ok(r)
}

pub fn scale_report(doc: &Value, lim: Limits, k_range: RangeInclusive<i64>) -> Result<Report> {
    let m: MatrixDocument = parse_doc(doc, "scale")?;
    m.check_square()?;
    let (a, p) = (&m.matrix, m.p);
    let mut r = Report::new("scale", canonical(&m), format!("{a} on Q_{p}^{}", a.rows()));
    let show = |s: &num_bigint::BigUint| json!({ "exact": s.to_string(), "log_p": log_p(s, p) });

    let formula = yuzvinski_scale(a, p)?;
    r.push(Entry::new("scale", show(&formula), formula.to_string(), SCALE_FORMULA));
    let (moeller, diag) = moeller_scale_oracle(a, &Lattice::standard(p, a.rows()), lim.window, lim.cap)?;
    r.push(Entry::new("scale", show(&moeller), moeller.to_string(), MOELLER).with_diagnostics(&diag));
    r.agree(formula == moeller);

    if !a.determinant()?.eq(&Q::from_integer(0.into())) {
        let search = min_scale_search(a, p, k_range.clone())?;
        let text = format!(
            "{} (witness exponents {:?}, {} lattices, k in {}..={})",
            search.best_index,
            search.witness.diagonal_exponents(),
            search.candidates,
            k_range.start(),
            k_range.end()
        );
        r.push(Entry::new("scale", &search, text, MIN_SEARCH));
        r.agree(search.best_index == moeller);
    }
    let h = yuzvinski_entropy(a, p)?;
    r.push(Entry::entropy("entropy", &h, FORMULA));
    r.agree(h.exponent(p) == log_p(&formula, p));
    Ok(r)
}

fn log_p(s: &num_bigint::BigUint, p: Prime) -> u64 {
    let mut k = 0;
    let mut x = s.clone();
    let pb = num_bigint::BigUint::from(p.get());
    while x > num_bigint::BigUint::from(1u8) {
        x /= &pb;
        k += 1;
    }
    k
}

pub fn newton_report(poly: &str, p: Prime) -> Result<Report> {
    let f = MonicPolynomial::parse(poly)?;
    let mut r = Report::new("newton", json!({ "poly": f.to_string(), "p": p }), format!("{f} at p = {p}"));
    let polygon = newton_polygon(&f, p);
    r.push(Entry::new("segments", &polygon, polygon.to_string(), NEWTON));
    let roots = root_valuations(&f, p);
    r.push(Entry::new("root valuations", &roots, roots.to_string(), NEWTON));
    let h = EntropyValue::log_p(p, entropy_exponent(&f, p));
    r.push(Entry::entropy("entropy of any matrix with this characteristic polynomial", &h, NEWTON));
    Ok(r)
}

pub fn check_at_report(doc: &Value, lim: Limits) -> Result<Report> {
    let d: AdditionDocument = parse_doc(doc, "check-at")?;
    let a = RationalMatrix::block_lower(&d.a1, &d.b, &d.a2)?;
    let mut r = Report::new("check-at", canonical(&d), format!("{a} on Q_{}^{}", d.p, a.rows()));
    let rep = check_addition_qpn(&d.a1, &d.b, &d.a2, d.p, lim.window, lim.cap)?;
    push_dual(&mut r, "entropy of A", &rep.whole, FORMULA, ORACLE);
    push_dual(&mut r, "entropy on the invariant part (A2)", &rep.invariant, FORMULA, ORACLE);
    push_dual(&mut r, "entropy on the quotient (A1)", &rep.quotient, FORMULA, ORACLE);
    let flags = json!({
        "formula_additive": rep.formula_additive,
        "oracle_additive": rep.oracle_additive,
        "holds": rep.holds(),
    });
    r.push(Entry::new("addition", flags, if rep.holds() { "holds" } else { "FAILS" }, ADDITION));
    r.agree(rep.holds());
    Ok(r)
}

fn group_entries(r: &mut Report, g: &FiniteRankPGroup, prefix: &str) {
    let c = g.classify();
    r.push(Entry::new(format!("{prefix}class"), c, c.to_string(), GROUP_CLASSIFICATION));
    r.push(Entry::new(format!("{prefix}rank_p"), g.rank_p(), g.rank_p().to_string(), RANK));
    let d = g.dual_group();
    r.push(Entry::new(format!("{prefix}dual"), &d, d.to_string(), DUALITY));
}

pub fn classify_report(doc: &Value) -> Result<Report> {
    if doc.get("components").is_some() {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            components: BTreeMap<Prime, FiniteRankPGroup>,
            #[serde(default, rename = "endo")]
            _endo: Option<Value>,
        }
        let g = PeriodicGroup::from_map(parse_doc::<Doc>(doc, "classify")?.components)?;
        let mut r = Report::new("classify", canonical(&g), format!("periodic group on {} primes", g.components().len()));
        for (p, comp) in g.components() {
            group_entries(&mut r, comp, &format!("{p}: "));
        }
        let c = g.classify();
        r.push(Entry::new("class", c, c.to_string(), PERIODIC_CLASSIFICATION));
        return Ok(r);
    }
    let g: FiniteRankPGroup = match doc.get("group") {
        Some(inner) => {
            let d: BTreeMap<String, Value> = parse_doc(doc, "classify")?;
            if d.keys().any(|k| k != "group" && k != "endo") {
                return Err(Error::Parse("unexpected fields next to \"group\"".into()));
            }
            parse_doc(inner, "classify")?
        }
        None => parse_doc(doc, "classify")?,
    };
    let mut r = Report::new("classify", canonical(&g), g.to_string());
    group_entries(&mut r, &g, "");
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct HeisenbergRequest {
    pub ring: Ring,
    pub p: Prime,
    pub s: Option<Q>,
    pub t: Option<Q>,
    pub oracle: bool,
    pub level: i64,
}

pub fn heisenberg_report(req: &HeisenbergRequest, lim: Limits) -> Result<Report> {
    let p = req.p;
    let input = json!({
        "ring": req.ring,
        "p": p,
        "s": req.s.as_ref().map(crate::padic::format_rational),
        "t": req.t.as_ref().map(crate::padic::format_rational),
        "oracle": req.oracle,
        "level": req.level,
    });
    let ring_name = match req.ring {
        Ring::Zp => format!("H(Z_{p})"),
        Ring::Qp => format!("H(Q_{p})"),
    };
    let mut r = Report::new("heisenberg", input, ring_name.clone());
    let phi = match (&req.s, &req.t) {
        (Some(s), Some(t)) => Some(DiagonalEndo::new(s.clone(), t.clone())),
        (None, None) => None,
        _ => return Err(Error::Parse("--s and --t must be given together".into())),
    };
    if let Some(phi) = &phi {
        if req.ring == Ring::Zp && !phi.is_integral(p) {
            return Err(Error::Invalid(format!("s = {}, t = {} does not map {ring_name} into itself", phi.s, phi.t)));
        }
        r.summary = format!("M(a, b; z) -> M({}a, {}b; {}z) on {ring_name}", phi.s, phi.t, &phi.s * &phi.t);
        let formula = if phi.is_automorphism() {
            let e = entropy_diagonal(phi, p)?;
            r.push(Entry::entropy("entropy on the center", &e.center, FORMULA));
            r.push(Entry::entropy("entropy on the quotient", &e.quotient, FORMULA));
            r.push(Entry::entropy("entropy", &e.total, HEISENBERG_SPLIT));
            Some(e.total)
        } else {
            None
        };
        if req.oracle || formula.is_none() {
            let (h, diag) = entropy_oracle_diagonal(phi, p, req.level, lim.window, lim.cap)?;
            if let Some(f) = &formula {
                r.agree(*f == h);
            }
            r.push(Entry::entropy("entropy", &h, HEISENBERG_ORACLE).with_diagnostics(&diag));
        }
    }
    let sample = if phi.is_some() { Vec::new() } else { default_sample(req.ring, p) };
    let c = classify_heisenberg(req.ring, p, &sample, lim.window, lim.cap)?;
    let text = format!("{} (sample of {}, evidence consistent: {})", c.classification, c.evidence.len(), c.evidence_consistent);
    r.push(Entry::new("class", &c, text, HEISENBERG_CLASS));
    r.agree(c.evidence_consistent);
    Ok(r)
}
