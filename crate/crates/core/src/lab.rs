//! Finite-scale verification suites for the structural theorems about the
//! almost upper triangular groups.
//!
//! Every suite is a pure function of its configuration: randomness comes from
//! a ChaCha stream seeded by `(seed, case)`, and reports carry no timings, so
//! reruns print byte-identical text.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::Mat;
use crate::matgroup::{DeviationRank, FiniteMatrix, Profile, WindowElement};
use crate::preorder::{BaseShape, IndexSet, PreorderSpec};
use crate::truncation::{enumerate_gl, gl_generators, gl_order, FiniteGroupSet, Truncation, DEFAULT_MAX_ORDER};

/// Regions whose general linear group is at most this large are swept
/// exhaustively instead of sampled.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000;
/// Redraws allowed per case when a sample is central.
pub const MAX_REDRAWS: usize = 100;
/// Upper groups up to this order are also searched by brute force, as a
/// cross-check on the linear commutant route.
pub const BRUTE_LIMIT: u128 = 1 << 16;
/// Upper groups up to this order are used whole as conjugators in normality
/// checks; larger ones contribute their generators.
pub const CONJUGATOR_LIMIT: u128 = 1 << 12;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub preorder: Arc<PreorderSpec>,
    pub field: Field,
    pub inner: IndexSet,
    pub outer: IndexSet,
    pub trials: usize,
    pub seed: u64,
    pub max_order: u128,
    /// Classes demanded on each side of `inner` before `outer` counts as
    /// sufficiently larger.
    pub margin: usize,
}

impl SuiteConfig {
    pub fn new(preorder: PreorderSpec, field: Field, inner: IndexSet, outer: IndexSet) -> SuiteConfig {
        SuiteConfig {
            preorder: Arc::new(preorder),
            field,
            inner,
            outer,
            trials: 8,
            seed: 0,
            max_order: DEFAULT_MAX_ORDER,
            margin: 2,
        }
    }

    pub fn trials(mut self, trials: usize) -> SuiteConfig {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> SuiteConfig {
        self.seed = seed;
        self
    }

    pub fn max_order(mut self, max_order: u128) -> SuiteConfig {
        self.max_order = max_order;
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn inputs(&self) -> Vec<(String, String)> {
        vec![
            ("q".into(), self.field.q().to_string()),
            ("inner".into(), region_str(&self.inner, &self.preorder)),
            ("outer".into(), region_str(&self.outer, &self.preorder)),
        ]
    }

    fn check_nested(&self) -> Result<()> {
        for r in [&self.inner, &self.outer] {
            for i in r.iter() {
                self.preorder.check(i)?;
            }
            if !self.preorder.is_convex(r) {
                return Err(Error::RegionNotConvex(r.clone()));
            }
        }
        if !self.inner.is_subset(&self.outer) {
            return Err(Error::RegionNotNested);
        }
        Ok(())
    }
}

/// `lo..hi` for contiguous runs of a unit spec, the set literal otherwise.
fn region_str(r: &IndexSet, spec: &PreorderSpec) -> String {
    if spec.is_unit() && !r.is_empty() {
        let pos: Vec<i64> = r.iter().map(|i| i.block).collect();
        let (lo, hi) = (pos[0], pos[pos.len() - 1]);
        if hi - lo + 1 == pos.len() as i64 {
            return format!("{lo}..{hi}");
        }
        let parts: Vec<String> = pos.iter().map(i64::to_string).collect();
        return format!("{{{}}}", parts.join(","));
    }
    r.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseVerdict {
    Pass,
    Fail,
    /// Outside the hypotheses or the budget; reported, not asserted.
    Excluded,
}

impl fmt::Display for CaseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseVerdict::Pass => "pass",
            CaseVerdict::Fail => "fail",
            CaseVerdict::Excluded => "excluded",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CaseRecord {
    pub id: String,
    pub inputs: Vec<(String, String)>,
    pub expected: String,
    pub observed: String,
    pub verdict: CaseVerdict,
}

impl CaseRecord {
    /// Passes iff the rendered expectation and observation agree.
    pub fn check(id: &str, inputs: Vec<(String, String)>, expected: impl fmt::Display, observed: impl fmt::Display) -> CaseRecord {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        let verdict = if expected == observed {
            CaseVerdict::Pass
        } else {
            CaseVerdict::Fail
        };
        CaseRecord {
            id: id.to_string(),
            inputs,
            expected,
            observed,
            verdict,
        }
    }

    pub fn excluded(id: &str, inputs: Vec<(String, String)>, reason: &str) -> CaseRecord {
        CaseRecord {
            id: id.to_string(),
            inputs,
            expected: "none".into(),
            observed: reason.to_string(),
            verdict: CaseVerdict::Excluded,
        }
    }

    fn with(mut self, key: &str, value: impl fmt::Display) -> CaseRecord {
        self.inputs.push((key.into(), value.to_string()));
        self
    }
}

impl fmt::Display for CaseRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case={}", self.id)?;
        for (k, v) in &self.inputs {
            write!(f, " {k}={v}")?;
        }
        write!(f, " expected={} observed={} verdict={}", self.expected, self.observed, self.verdict)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseRecord>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            cases: Vec::new(),
        }
    }

    pub fn push(&mut self, case: CaseRecord) {
        self.cases.push(case);
    }

    /// Appends another report's cases under `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: SuiteReport) {
        for mut c in other.cases {
            c.id = format!("{prefix}.{}", c.id);
            self.cases.push(c);
        }
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| c.verdict == CaseVerdict::Fail).count()
    }

    pub fn excluded(&self) -> usize {
        self.cases.iter().filter(|c| c.verdict == CaseVerdict::Excluded).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn case(&self, id: &str) -> Option<&CaseRecord> {
        self.cases.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            writeln!(f, "{c}")?;
        }
        write!(f, "suite={} cases={} failures={}", self.suite, self.cases.len(), self.failures())
    }
}

fn pow_u128(q: u32, e: usize) -> Result<u128> {
    (0..e).try_fold(1u128, |acc, _| acc.checked_mul(q as u128).ok_or(Error::OrderOverflow))
}

/// `scalars=k` when every member is scalar, `nonscalar=k` otherwise.
fn describe<'a>(mats: impl IntoIterator<Item = &'a Mat>) -> String {
    let mut scalar = true;
    let mut count = 0;
    for m in mats {
        count += 1;
        scalar &= m.as_scalar().is_some();
    }
    if scalar {
        format!("scalars={count}")
    } else {
        format!("nonscalar={count}")
    }
}

fn random_invertible<R: Rng>(rng: &mut R, n: usize, field: &Field) -> Mat {
    loop {
        let m = Mat::from_vec(n, (0..n * n).map(|_| rng.gen_range(0..field.q())).collect());
        if m.is_invertible(field) {
            return m;
        }
    }
}

/// Copy of `a` with scalar 1 off its window: an element of finite deviation
/// rank.
fn unit_scalar(a: &WindowElement) -> Result<WindowElement> {
    WindowElement::new(a.field().clone(), a.preorder().clone(), 1, a.window().clone(), a.core().clone())
}

fn n_two_small_field(n: usize, q: u32) -> bool {
    n < 2 || (n == 2 && q <= 3)
}

// ---------------------------------------------------------------------------
// Normal closures in GL_n

/// Normal closures of noncentral elements of `GL_n(q)` contain `SL_n(q)`:
/// every noncentral element when `|GL_n| ≤ EXHAUSTIVE_LIMIT`, otherwise
/// `samples` random ones. The cases `n = 2, q ≤ 3` are reported as excluded.
pub fn lab_normal_closures(n: usize, field: &Field, samples: usize, seed: u64, max_order: u128) -> Result<SuiteReport> {
    let q = field.q();
    let mut report = SuiteReport::new("normal-closures");
    let inputs = vec![("n".to_string(), n.to_string()), ("q".to_string(), q.to_string())];
    if n_two_small_field(n, q) {
        report.push(CaseRecord::excluded("normal-closure", inputs, "hypothesis"));
        return Ok(report);
    }
    let order = gl_order(n, q)?;
    if order > max_order {
        return Err(Error::OrderBudgetExceeded(max_order));
    }
    let exhaustive = order <= EXHAUSTIVE_LIMIT;
    let elems: Vec<Mat> = if exhaustive {
        enumerate_gl(n, field, max_order)?.into_iter().filter(|m| m.as_scalar().is_none()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < samples {
            let m = random_invertible(&mut rng, n, field);
            if m.as_scalar().is_none() {
                out.push(m);
            }
        }
        out
    };
    let gens = gl_generators(n, field);
    let mut ok = 0;
    for g in &elems {
        if FiniteGroupSet::normal_closure_under(g, &gens, field, max_order)?.contains_sl()? {
            ok += 1;
        }
    }
    let mode = if exhaustive { "exhaustive" } else { "sampled" };
    report.push(
        CaseRecord::check("normal-closure", inputs, format!("{0}/{0}", elems.len()), format!("{ok}/{}", elems.len()))
            .with("mode", mode),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// Simplicity machinery

/// Finite shadow of the simplicity argument on `inner ⊂ outer`:
/// (a) normal closures of noncentral restrictions contain `SL`,
/// (b) every sampled `f ∈ GL_inner` has a determinant-one lift on `outer`
/// restricting to `f`, and (c) when the lifts were exhaustive, their
/// restrictions exhaust `GL_inner`.
pub fn lab_simplicity_truncated(cfg: &SuiteConfig) -> Result<SuiteReport> {
    simplicity(cfg, true)
}

fn simplicity(cfg: &SuiteConfig, strict: bool) -> Result<SuiteReport> {
    cfg.check_nested()?;
    let n = cfg.inner.len();
    let q = cfg.field.q();
    let field = &cfg.field;
    if cfg.outer.len() <= n {
        return Err(Error::RegionTooSmall("outer must strictly contain inner".into()));
    }
    if !cfg.preorder.is_strongly_convex(&cfg.inner) {
        return Err(Error::WindowNotStronglyConvex(cfg.inner.clone()));
    }
    let excluded = n_two_small_field(n, q);
    if excluded && strict {
        return Err(Error::HypothesisViolated(format!(
            "normal closures in GL_{n}(F_{q}) need n >= 2, and q > 3 when n = 2"
        )));
    }
    let order = gl_order(n, q)?;
    if order > cfg.max_order {
        return Err(Error::OrderBudgetExceeded(cfg.max_order));
    }
    let mut report = SuiteReport::new("simplicity");

    if excluded {
        report.push(CaseRecord::excluded("closure", cfg.inputs(), "hypothesis"));
    } else {
        let gens = gl_generators(n, field);
        for t in 0..cfg.trials {
            let mut rng = cfg.rng(t as u64);
            let mut drawn = None;
            for draws in 1..=MAX_REDRAWS {
                let g = WindowElement::random_with(&mut rng, field.clone(), cfg.preorder.clone(), &cfg.inner, Profile::General)?;
                let r = g.theta(&cfg.inner)?.mat;
                if r.as_scalar().is_none() {
                    drawn = Some((r, draws));
                    break;
                }
            }
            let id = format!("closure#{t}");
            let case = match drawn {
                None => CaseRecord::check(&id, cfg.inputs(), "noncentral", "central-draws"),
                Some((r, draws)) => {
                    let nc = FiniteGroupSet::normal_closure_under(&r, &gens, field, cfg.max_order)?;
                    CaseRecord::check(&id, cfg.inputs(), "contains-sl=true", format!("contains-sl={}", nc.contains_sl()?))
                        .with("draws", draws)
                        .with("closure_order", nc.len())
                }
            };
            report.push(case);
        }
    }

    let exhaustive = order <= EXHAUSTIVE_LIMIT;
    let fs: Vec<Mat> = if exhaustive {
        enumerate_gl(n, field, cfg.max_order)?
    } else {
        let mut rng = cfg.rng(1 << 32);
        (0..cfg.trials).map(|_| random_invertible(&mut rng, n, field)).collect()
    };
    let extra = *cfg.outer.difference(&cfg.inner).first().expect("outer is strictly larger");
    let m = cfg.outer.len();
    let e = cfg.outer.position(&extra).unwrap();
    let inner_pos: Vec<usize> = cfg.inner.iter().map(|i| cfg.outer.position(i).unwrap()).collect();
    let mut ok = 0;
    let mut images = FiniteGroupSet::new(n, field.clone());
    for f in &fs {
        let mut g = Mat::identity(m);
        for (a, &pa) in inner_pos.iter().enumerate() {
            for (b, &pb) in inner_pos.iter().enumerate() {
                g.set(pa, pb, f.get(a, b));
            }
        }
        g.set(e, e, field.inv(f.det(field))?);
        let det_one = g.det(field) == 1;
        let lift = WindowElement::lift(&FiniteMatrix::new(cfg.outer.clone(), g)?, field.clone(), cfg.preorder.clone())?;
        let back = lift.theta(&cfg.inner)?.mat;
        if det_one && back == *f {
            ok += 1;
        }
        images.insert(back);
    }
    let mode = if exhaustive { "exhaustive" } else { "sampled" };
    report.push(
        CaseRecord::check("sl-lift", cfg.inputs(), format!("{0}/{0}", fs.len()), format!("{ok}/{}", fs.len()))
            .with("mode", mode)
            .with("extra", extra),
    );
    if exhaustive {
        report.push(CaseRecord::check("image-order", cfg.inputs(), order, images.len()));
    } else {
        report.push(CaseRecord::excluded("image-order", cfg.inputs(), "sampled"));
    }
    Ok(report)
}

/// `(label, config)` pairs of the default simplicity matrix: `q ∈ {2,3,4,5}`
/// with inner region a chain of two (`q ≥ 4`), a chain of three, or a single
/// class of size two (`q ≤ 3`, where step (a) is excluded).
pub fn simplicity_matrix(trials: usize, seed: u64, max_order: u128) -> Result<Vec<(String, SuiteConfig)>> {
    let mut out = Vec::new();
    for q in [2u64, 3, 4, 5] {
        let field = Field::new(q)?;
        let plain = PreorderSpec::plain(BaseShape::Z);
        if q >= 4 {
            let cfg = SuiteConfig::new(plain.clone(), field.clone(), IndexSet::unit_range(0, 1), IndexSet::unit_range(-2, 3));
            out.push((format!("q{q}.chain2"), cfg));
        }
        let cfg = SuiteConfig::new(plain, field.clone(), IndexSet::unit_range(0, 2), IndexSet::unit_range(-2, 4));
        out.push((format!("q{q}.chain3"), cfg));
        if q <= 3 {
            let pairs = PreorderSpec::periodic_intervals(BaseShape::Z, &[2])?;
            let inner = IndexSet::new(pairs.indices_in_blocks(0, 0));
            let outer = IndexSet::new(pairs.indices_in_blocks(-2, 2));
            out.push((format!("q{q}.class2"), SuiteConfig::new(pairs, field, inner, outer)));
        }
    }
    Ok(out
        .into_iter()
        .map(|(l, c)| (l, c.trials(trials).seed(seed).max_order(max_order)))
        .collect())
}

/// The simplicity suite over [`simplicity_matrix`], hypothesis-excluded
/// steps reported rather than raised.
pub fn lab_simplicity_default(trials: usize, seed: u64, max_order: u128) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("simplicity");
    for (label, cfg) in simplicity_matrix(trials, seed, max_order)? {
        report.absorb(&label, simplicity(&cfg, false)?);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Centre

/// Upper elements on `outer` commuting with the restrictions of every
/// elementary and diagonal windowed element are scalar, and scalars commute
/// with sampled elements.
pub fn lab_centre(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.check_nested()?;
    let field = &cfg.field;
    let pre = &cfg.preorder;
    let region = &cfg.outer;
    let trunc = Truncation::new(pre.clone(), region.clone(), field.clone())?;
    let mut targets = Vec::new();
    for i in region.iter() {
        for j in region.iter() {
            if i != j {
                let e = WindowElement::elementary(field.clone(), pre.clone(), *i, *j, 1)?;
                targets.push(e.theta(region)?.mat);
            }
        }
        let d = WindowElement::diagonal_at(field.clone(), pre.clone(), *i, field.primitive())?;
        targets.push(d.theta(region)?.mat);
    }
    let expected = format!("scalars={}", field.q() - 1);
    let mut report = SuiteReport::new("centre");
    let linear = trunc.centralizer_in_u(&targets, cfg.max_order)?;
    report.push(CaseRecord::check("commutant", cfg.inputs(), &expected, describe(linear.members())));
    push_brute(&mut report, cfg, &trunc, &targets, &linear, &expected)?;

    let window = pre.hull(region)?;
    let mut rng = cfg.rng(0);
    let mut ok = 0;
    for _ in 0..cfg.trials {
        let a = WindowElement::random_with(&mut rng, field.clone(), pre.clone(), &window, Profile::General)?;
        let lambda = 1 + rng.gen_range(0..field.q() - 1);
        let s = WindowElement::scalar_elem(field.clone(), pre.clone(), lambda);
        if a.mul(&s)? == s.mul(&a)? {
            ok += 1;
        }
    }
    report.push(CaseRecord::check(
        "scalars-commute",
        cfg.inputs(),
        format!("{0}/{0}", cfg.trials),
        format!("{ok}/{}", cfg.trials),
    ));
    Ok(report)
}

/// Brute-force centralizer over the enumerated upper group, checked to
/// match the linear route; excluded above [`BRUTE_LIMIT`].
fn push_brute(
    report: &mut SuiteReport,
    cfg: &SuiteConfig,
    trunc: &Truncation,
    targets: &[Mat],
    linear: &FiniteGroupSet,
    expected: &str,
) -> Result<()> {
    let order = trunc.order_u()?;
    if order > BRUTE_LIMIT.min(cfg.max_order) {
        report.push(CaseRecord::excluded("brute", cfg.inputs(), "budget"));
        return Ok(());
    }
    let brute = trunc.enumerate_u(cfg.max_order)?.centralizer(targets);
    let agree = brute.len() == linear.len() && brute.members().iter().all(|m| linear.contains(m));
    let observed = if agree {
        expected_or(expected, &brute)
    } else {
        "routes-disagree".to_string()
    };
    report.push(CaseRecord::check("brute", cfg.inputs(), expected, observed).with("searched", order));
    Ok(())
}

fn expected_or(expected: &str, set: &FiniteGroupSet) -> String {
    if expected.starts_with("scalars=") {
        describe(set.members())
    } else {
        format!("order={}", set.len())
    }
}

// ---------------------------------------------------------------------------
// Quasicentre

/// Classes of the preorder strictly below (or above) `inner`, capped at
/// `cap`; unbounded directions always supply `cap`.
fn available_classes(pre: &PreorderSpec, inner: &IndexSet, below: bool, cap: usize) -> usize {
    let base = pre.base();
    let unbounded = if below {
        base != BaseShape::N
    } else {
        base != BaseShape::NegN
    };
    if unbounded {
        return cap;
    }
    let (lo, hi) = if below {
        (0, inner.first().unwrap().block)
    } else {
        (inner.members().last().unwrap().block, 0)
    };
    let side: IndexSet = pre
        .indices_in_blocks(lo, hi)
        .into_iter()
        .filter(|i| {
            inner
                .iter()
                .all(|j| if below { pre.lt(i, j) } else { pre.lt(j, i) })
        })
        .collect();
    pre.classes_in(&side).len().min(cap)
}

/// Upper elements on `outer` centralizing every block perturbation between
/// strictly ordered classes that are not both inside `inner`.
///
/// At finite size the transvections between a minimal and a maximal class of
/// `outer` always survive, so the suite asserts three things: the
/// centralizer restricted to `outer` minus its extreme classes is exactly the
/// `q − 1` scalars, the full centralizer has order `(q − 1)·q^c` with `c` the
/// number of such corner positions, and the brute-force route agrees.
pub fn lab_quasicentre(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.check_nested()?;
    if cfg.inner.is_empty() {
        return Err(Error::EmptySet);
    }
    let pre = &cfg.preorder;
    let field = &cfg.field;
    let classes = pre.classes_in(&cfg.outer);
    let strictly = |a: &IndexSet, b: &IndexSet| a.iter().all(|i| b.iter().all(|j| pre.lt(i, j)));
    let below = classes.iter().filter(|c| strictly(c, &cfg.inner)).count();
    let above = classes.iter().filter(|c| strictly(&cfg.inner, c)).count();
    let need_below = available_classes(pre, &cfg.inner, true, cfg.margin);
    let need_above = available_classes(pre, &cfg.inner, false, cfg.margin);
    if below < need_below || above < need_above {
        return Err(Error::RegionTooSmall(format!(
            "need {need_below} classes below and {need_above} above the inner region, found {below} and {above}"
        )));
    }

    let trunc = Truncation::new(pre.clone(), cfg.outer.clone(), field.clone())?;
    let n = cfg.outer.len();
    let pos = |i| cfg.outer.position(i).unwrap();
    let mut targets = Vec::new();
    for k in &classes {
        for l in &classes {
            if !strictly(k, l) || (k.is_subset(&cfg.inner) && l.is_subset(&cfg.inner)) {
                continue;
            }
            for a in k.iter() {
                for b in l.iter() {
                    let mut t = Mat::identity(n);
                    t.set(pos(a), pos(b), 1);
                    targets.push(t);
                }
            }
        }
    }

    let minimal: Vec<&IndexSet> = classes.iter().filter(|c| !classes.iter().any(|d| strictly(d, c))).collect();
    let maximal: Vec<&IndexSet> = classes.iter().filter(|c| !classes.iter().any(|d| strictly(c, d))).collect();
    let corners: usize = minimal
        .iter()
        .flat_map(|k| maximal.iter().map(move |l| (k, l)))
        .filter(|(k, l)| strictly(k, l))
        .map(|(k, l)| k.len() * l.len())
        .sum();
    let middle: IndexSet = cfg
        .outer
        .iter()
        .filter(|i| !minimal.iter().chain(&maximal).any(|c| c.contains(i)))
        .copied()
        .collect();
    let middle_pos: Vec<usize> = middle.iter().map(pos).collect();

    let q = field.q();
    let mut report = SuiteReport::new("quasicentre");
    let inputs = || {
        let mut v = cfg.inputs();
        v.push(("margin".into(), cfg.margin.to_string()));
        v
    };
    let linear = trunc.centralizer_in_u(&targets, cfg.max_order)?;
    let mut restricted = FiniteGroupSet::new(middle_pos.len(), field.clone());
    for m in linear.members() {
        restricted.insert(m.select(&middle_pos));
    }
    report.push(
        CaseRecord::check("restricted", inputs(), format!("scalars={}", q - 1), describe(restricted.members()))
            .with("middle", region_str(&middle, pre)),
    );
    let full = (q as u128 - 1) * pow_u128(q, corners)?;
    report.push(CaseRecord::check("full-order", inputs(), full, linear.len()).with("corners", corners));
    push_brute(&mut report, cfg, &trunc, &targets, &linear, &format!("order={}", linear.len()))?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Example subgroups

/// The locally normal subgroups of the plain orders on `N` and `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Off-diagonal entries only in the first row (base `N`).
    H,
    /// Off-diagonal entries only at distance at least `n` above the
    /// diagonal (base `N`).
    L(u32),
    /// Off-diagonal entries only at `(i, j)` with `i < k < j` (base `Z`).
    B(i64),
}

impl Family {
    fn free(&self, i: i64, j: i64) -> bool {
        match *self {
            Family::H => i == 0 && j > 0,
            Family::L(n) => j >= i + n as i64,
            Family::B(k) => i < k && j > k,
        }
    }

    fn abelian(&self) -> bool {
        !matches!(self, Family::L(_))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::H => write!(f, "H"),
            Family::L(n) => write!(f, "L({n})"),
            Family::B(k) => write!(f, "B({k})"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `H`, `L(n)` or `Ln`, `B(k)` or `Bk`.
    fn from_str(s: &str) -> Result<Family> {
        let bad = || Error::InvalidSpec(format!("unknown subgroup family `{s}`"));
        let s = s.trim();
        if s.eq_ignore_ascii_case("h") {
            return Ok(Family::H);
        }
        let (head, rest) = s.split_at(s.chars().next().ok_or_else(bad)?.len_utf8());
        let arg = rest.trim().trim_start_matches('(').trim_end_matches(')').trim();
        match head {
            "L" | "l" => {
                let n: u32 = arg.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(Error::InvalidSpec("L(n) needs n >= 1".into()));
                }
                Ok(Family::L(n))
            }
            "B" | "b" => Ok(Family::B(arg.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Truncations of `H`, `L(n)` or `B(k)` to `outer`: order against the free
/// entry count; abelian (with the additive product law for `B`) and
/// elementary abelian for `H` and `B`; normality in the upper group; and the
/// centralizer contrast. For `H` and `B` the centralizer contains the scalar
/// multiples of the subgroup, so it is strictly larger than the scalars. For
/// `L(n)` its restriction to `outer` minus the last `n` positions is exactly
/// the scalars; the dropped positions carry corner entries at finite size.
pub fn lab_example_subgroups(cfg: &SuiteConfig, family: Family) -> Result<SuiteReport> {
    let pre = &cfg.preorder;
    let need = match family {
        Family::H | Family::L(_) => BaseShape::N,
        Family::B(_) => BaseShape::Z,
    };
    if pre.base() != need {
        return Err(Error::WrongBaseShape(if need == BaseShape::N { "N" } else { "Z" }));
    }
    if !pre.is_unit() {
        return Err(Error::UnsupportedSpec("example subgroups live on the plain order".into()));
    }
    cfg.check_nested()?;
    let field = &cfg.field;
    let q = field.q();
    let n = cfg.outer.len();
    if n < 2 {
        return Err(Error::RegionTooSmall("need at least two indices".into()));
    }
    let at: Vec<i64> = cfg.outer.iter().map(|i| i.block).collect();
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a < b && family.free(at[a], at[b]))
        .collect();

    // An F_p-basis of F_q: powers of a primitive element.
    let omega = field.primitive();
    let basis: Vec<u32> = (0..field.m()).map(|t| field.pow(omega, t as u64)).collect();
    let mut gens = Vec::new();
    for &(a, b) in &free {
        for &c in &basis {
            let mut g = Mat::identity(n);
            g.set(a, b, c);
            gens.push(g);
        }
    }
    let sub = FiniteGroupSet::closure(n, field, &gens, cfg.max_order)?;
    let inputs = || {
        let mut v = cfg.inputs();
        v.push(("family".into(), family.to_string()));
        v
    };
    let mut report = SuiteReport::new("examples");
    report.push(CaseRecord::check("order", inputs(), pow_u128(q, free.len())?, sub.len()).with("free", free.len()));

    let id = Mat::identity(n);
    if family.abelian() {
        let members = sub.members();
        let mut commute = true;
        let mut additive = true;
        for a in members {
            for b in members {
                let ab = a.mul(b, field);
                commute &= ab == b.mul(a, field);
                additive &= ab == a.add(b, field).sub(&id, field);
            }
        }
        report.push(CaseRecord::check("abelian", inputs(), true, commute));
        let p = field.p() as u64;
        let exponent = members.iter().all(|m| mat_pow(m, p, field).is_identity());
        report.push(CaseRecord::check("exponent-p", inputs(), true, exponent));
        if matches!(family, Family::B(_)) {
            report.push(CaseRecord::check("product-law", inputs(), true, additive));
        }
    }

    let trunc = Truncation::new(pre.clone(), cfg.outer.clone(), field.clone())?;
    let u_order = trunc.order_u()?;
    let (conjugators, mode) = if u_order <= CONJUGATOR_LIMIT.min(cfg.max_order) {
        (trunc.enumerate_u(cfg.max_order)?.members().to_vec(), "all")
    } else {
        (trunc.u_generators(), "generators")
    };
    let mut stable = true;
    for u in &conjugators {
        let ui = u.inverse(field).expect("upper elements are invertible");
        stable &= sub.members().iter().all(|s| sub.contains(&u.mul(s, field).mul(&ui, field)));
    }
    report.push(CaseRecord::check("normal", inputs(), true, stable).with("conjugators", mode));

    let cent = trunc.centralizer_in_u(&gens, cfg.max_order)?;
    match family {
        Family::L(k) => {
            let keep: Vec<usize> = (0..n.saturating_sub(k as usize)).collect();
            let mut restricted = FiniteGroupSet::new(keep.len(), field.clone());
            for m in cent.members() {
                restricted.insert(m.select(&keep));
            }
            let observed = if keep.is_empty() {
                "empty".to_string()
            } else {
                describe(restricted.members())
            };
            report.push(
                CaseRecord::check("centralizer", inputs(), format!("scalars={}", q - 1), observed)
                    .with("centralizer_order", cent.len()),
            );
        }
        _ => {
            let mut contains = true;
            for s in sub.members() {
                for lambda in field.units() {
                    contains &= cent.contains(&s.scale(lambda, field));
                }
            }
            let proper = cent.len() as u128 > (q - 1) as u128;
            report.push(
                CaseRecord::check(
                    "centralizer",
                    inputs(),
                    "contains-scaled-subgroup=true proper=true",
                    format!("contains-scaled-subgroup={contains} proper={proper}"),
                )
                .with("centralizer_order", cent.len()),
            );
        }
    }
    Ok(report)
}

fn mat_pow(m: &Mat, e: u64, field: &Field) -> Mat {
    (0..e).fold(Mat::identity(m.n()), |acc, _| acc.mul(m, field))
}

// ---------------------------------------------------------------------------
// Finite-rank dense normal subgroup

/// Deviation rank is conjugation invariant; the lift of a restriction
/// approximates its element on the inner region; rank is subadditive.
pub fn lab_dense_normal(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.check_nested()?;
    let field = &cfg.field;
    let pre = &cfg.preorder;
    let window = pre.hull(&cfg.outer)?;
    let mut report = SuiteReport::new("dense-normal");
    let random = |rng: &mut ChaCha8Rng, profile| -> Result<WindowElement> {
        let a = WindowElement::random_with(rng, field.clone(), pre.clone(), &window, profile)?;
        unit_scalar(&a)
    };
    let rank = |a: &WindowElement| match a.deviation_rank().1 {
        DeviationRank::Finite(r) => Some(r),
        DeviationRank::Infinite => None,
    };
    let count = |ok: usize| (format!("{0}/{0}", cfg.trials), format!("{ok}/{}", cfg.trials));

    if window.len() >= 2 {
        let w = window.members();
        let t = WindowElement::elementary(field.clone(), pre.clone(), w[0], w[1], 1)?;
        let mut rng = cfg.rng(0);
        let g = WindowElement::random_with(&mut rng, field.clone(), pre.clone(), &window, Profile::General)?;
        let c = t.conjugate(&g)?;
        report.push(CaseRecord::check(
            "transvection-rank",
            cfg.inputs(),
            "1",
            rank(&c).map_or("infinite".into(), |r| r.to_string()),
        ));
    }

    let mut rng = cfg.rng(1);
    let mut ok = 0;
    for _ in 0..cfg.trials {
        let a = random(&mut rng, Profile::General)?;
        let g = WindowElement::random_with(&mut rng, field.clone(), pre.clone(), &window, Profile::General)?;
        if rank(&a).is_some() && rank(&a) == rank(&a.conjugate(&g)?) {
            ok += 1;
        }
    }
    let (e, o) = count(ok);
    report.push(CaseRecord::check("conjugation-rank", cfg.inputs(), e, o));

    let mut rng = cfg.rng(2);
    let mut ok = 0;
    for _ in 0..cfg.trials {
        let a = random(&mut rng, Profile::Upper)?;
        let f = WindowElement::lift(&a.theta(&cfg.inner)?, field.clone(), pre.clone())?;
        if rank(&f).is_some() && f.inv().mul(&a)?.in_congruence(&cfg.inner)? {
            ok += 1;
        }
    }
    let (e, o) = count(ok);
    report.push(CaseRecord::check("approximation", cfg.inputs(), e, o));

    let mut rng = cfg.rng(3);
    let mut ok = 0;
    for _ in 0..cfg.trials {
        let a = random(&mut rng, Profile::General)?;
        let b = random(&mut rng, Profile::General)?;
        match (rank(&a), rank(&b), rank(&a.mul(&b)?)) {
            (Some(x), Some(y), Some(z)) if z <= x + y => ok += 1,
            _ => {}
        }
    }
    let (e, o) = count(ok);
    report.push(CaseRecord::check("rank-subadditive", cfg.inputs(), e, o));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Default runs

/// Every suite over its default configurations.
pub fn lab_all(trials: usize, seed: u64, max_order: u128) -> Result<Vec<SuiteReport>> {
    let tune = |c: SuiteConfig| c.trials(trials).seed(seed).max_order(max_order);
    let z = PreorderSpec::plain(BaseShape::Z);
    let nat = PreorderSpec::plain(BaseShape::N);
    let mut out = vec![lab_simplicity_default(trials, seed, max_order)?];

    let mut centre = SuiteReport::new("centre");
    let mut quasi = SuiteReport::new("quasicentre");
    let mut examples = SuiteReport::new("examples");
    let mut dense = SuiteReport::new("dense-normal");
    for q in [2u64, 3] {
        let field = Field::new(q)?;
        let chain3 = IndexSet::unit_range(0, 2);
        let cfg = tune(SuiteConfig::new(z.clone(), field.clone(), chain3.clone(), chain3));
        centre.absorb(&format!("q{q}"), lab_centre(&cfg)?);

        let cfg = tune(SuiteConfig::new(z.clone(), field.clone(), IndexSet::unit_range(0, 1), IndexSet::unit_range(-2, 3)));
        quasi.absorb(&format!("q{q}"), lab_quasicentre(&cfg)?);
        dense.absorb(&format!("q{q}"), lab_dense_normal(&cfg)?);

        // L(1) is the whole unitriangular group, so it gets the smaller region.
        for (family, last) in [(Family::H, 5), (Family::L(1), 4), (Family::L(2), 5)] {
            let region = IndexSet::unit_range(0, last);
            let cfg = tune(SuiteConfig::new(nat.clone(), field.clone(), region.clone(), region));
            examples.absorb(&format!("q{q}.{family}"), lab_example_subgroups(&cfg, family)?);
        }
        for (family, region) in [(Family::B(0), IndexSet::unit_range(-2, 2)), (Family::B(1), IndexSet::unit_range(-2, 3))] {
            let cfg = tune(SuiteConfig::new(z.clone(), field.clone(), region.clone(), region));
            examples.absorb(&format!("q{q}.{family}"), lab_example_subgroups(&cfg, family)?);
        }
    }
    out.extend([centre, quasi, examples, dense]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> PreorderSpec {
        PreorderSpec::plain(BaseShape::Z)
    }

    fn cfg(q: u64, inner: (i64, i64), outer: (i64, i64)) -> SuiteConfig {
        SuiteConfig::new(
            z(),
            Field::new(q).unwrap(),
            IndexSet::unit_range(inner.0, inner.1),
            IndexSet::unit_range(outer.0, outer.1),
        )
        .trials(3)
    }

    #[test]
    fn sl_lift_pads_with_inverse_determinant() {
        let r = lab_simplicity_truncated(&cfg(5, (0, 1), (0, 2))).unwrap();
        assert!(r.passed(), "{r}");
        let lift = r.case("sl-lift").unwrap();
        assert_eq!(lift.expected, "480/480");
        assert_eq!(r.case("image-order").unwrap().observed, "480");
    }

    #[test]
    fn small_field_pair_is_rejected() {
        let e = lab_simplicity_truncated(&cfg(3, (0, 1), (0, 2))).unwrap_err();
        assert!(matches!(e, Error::HypothesisViolated(_)));
    }

    #[test]
    fn centre_is_scalars() {
        for (q, want) in [(2, "scalars=1"), (5, "scalars=4")] {
            let r = lab_centre(&cfg(q, (0, 2), (0, 2))).unwrap();
            assert!(r.passed(), "{r}");
            assert_eq!(r.case("commutant").unwrap().observed, want);
        }
    }

    #[test]
    fn quasicentre_needs_margin() {
        let e = lab_quasicentre(&cfg(2, (0, 1), (0, 1))).unwrap_err();
        assert!(matches!(e, Error::RegionTooSmall(_)));
        let r = lab_quasicentre(&cfg(2, (0, 1), (-2, 3))).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.case("full-order").unwrap().observed, "2");
    }

    #[test]
    fn family_parsing() {
        assert_eq!("H".parse::<Family>().unwrap(), Family::H);
        assert_eq!("L(2)".parse::<Family>().unwrap(), Family::L(2));
        assert_eq!("B-1".parse::<Family>().unwrap(), Family::B(-1));
        assert!("L0".parse::<Family>().is_err());
        assert!("X".parse::<Family>().is_err());
    }

    #[test]
    fn b_zero_is_additive() {
        let r = lab_example_subgroups(&cfg(2, (-2, 2), (-2, 2)), Family::B(0)).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.case("order").unwrap().observed, "16");
    }

    #[test]
    fn examples_check_base_shape() {
        let e = lab_example_subgroups(&cfg(2, (0, 3), (0, 3)), Family::H).unwrap_err();
        assert_eq!(e, Error::WrongBaseShape("N"));
    }

    #[test]
    fn reports_are_reproducible() {
        let c = cfg(3, (0, 1), (-2, 3)).seed(7);
        let a = lab_dense_normal(&c).unwrap().to_string();
        let b = lab_dense_normal(&c).unwrap().to_string();
        assert_eq!(a, b);
        assert!(a.ends_with("failures=0"), "{a}");
    }
}
