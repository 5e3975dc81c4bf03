//! `aut`: command-line frontend for aut-core.
//!
//! Exit codes: 0 on success or a passing verdict, 1 when a verification
//! fails, 2 on input errors (including violated hypotheses).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use aut_core::format::{
    parse_element, parse_index, parse_matrices, parse_preorder, parse_region, print_element,
    print_matrix, print_preorder, print_region,
};
use aut_core::lab::{
    lab_all, lab_centre, lab_dense_normal, lab_example_subgroups, lab_quasicentre, lab_simplicity_default,
    lab_simplicity_truncated,
};
use aut_core::truncation::{gl_generators, matrix_hash, max_order_from_env};
use aut_core::{
    locally_isomorphic_necessary, pgl_quotient_exists, sharp_of, BaseShape, Field, FiniteGroupSet, FiniteMatrix,
    FinitaryPartition, Family, IndexSet, Mat, PreorderSpec, SuiteConfig, SuiteReport, Truncation, WindowElement,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aut", version, about = "Almost upper triangular groups over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Index preorders: hulls, intervals, classes, coarsenings.
    #[command(subcommand)]
    Preorder(PreorderCmd),
    /// Windowed group elements.
    #[command(subcommand)]
    Elem(ElemCmd),
    /// Finite truncation groups.
    #[command(subcommand)]
    Trunc(TruncCmd),
    /// Block-size invariant.
    #[command(subcommand)]
    Invariant(InvariantCmd),
    /// Verification suites.
    Lab(LabArgs),
}

#[derive(Args, Clone)]
struct SpecOpt {
    /// Preorder spec file; plain Z when omitted.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PreorderCmd {
    /// Print the canonical spec.
    Show {
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Strongly convex hull of a set literal.
    Hull {
        #[arg(allow_hyphen_values = true)]
        set: String,
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Indices between two indices.
    Interval {
        #[arg(allow_hyphen_values = true)]
        from: String,
        #[arg(allow_hyphen_values = true)]
        to: String,
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Equivalence class of an index.
    Class {
        #[arg(allow_hyphen_values = true)]
        index: String,
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Merge each given set into one class.
    Coarsen {
        #[arg(required = true, allow_hyphen_values = true)]
        parts: Vec<String>,
        #[command(flatten)]
        spec: SpecOpt,
    },
}

#[derive(Subcommand)]
enum ElemCmd {
    Mul { a: PathBuf, b: PathBuf, #[command(flatten)] spec: SpecOpt },
    Inv { a: PathBuf, #[command(flatten)] spec: SpecOpt },
    /// Inverse through the triangular factorization; upper elements only.
    InvTri { a: PathBuf, #[command(flatten)] spec: SpecOpt },
    /// Split into unitriangular and block-diagonal factors.
    Decompose { a: PathBuf, #[command(flatten)] spec: SpecOpt },
    /// Restriction to a finite region.
    Theta {
        a: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Lift a region matrix to an element acting trivially outside it.
    Lift { matrix: PathBuf, #[command(flatten)] spec: SpecOpt },
    /// Membership predicates.
    Pred { a: PathBuf, #[command(flatten)] spec: SpecOpt },
    /// Rank of the deviation from the nearest scalar.
    Rank { a: PathBuf, #[command(flatten)] spec: SpecOpt },
    Commutator { a: PathBuf, b: PathBuf, #[command(flatten)] spec: SpecOpt },
}

#[derive(Copy, Clone, ValueEnum)]
enum Group {
    U,
    Gl,
}

#[derive(Subcommand)]
enum TruncCmd {
    /// Closed-form group order.
    Order(RegionArgs),
    /// Enumerate the group and compare with the closed form.
    Enumerate(RegionArgs),
    /// Subgroup generated by the matrices in a file.
    Closure { matrices: PathBuf, #[command(flatten)] budget: Budget, #[command(flatten)] spec: SpecOpt },
    /// Normal closure of the first matrix in a file.
    NormalClosure {
        matrices: PathBuf,
        /// Conjugating generators; the standard generators of GL on the region when omitted.
        #[arg(long)]
        ambient: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Centralizer of the matrices in a file.
    Centralizer {
        matrices: PathBuf,
        #[arg(long, value_enum, default_value = "u")]
        within: Group,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        spec: SpecOpt,
    },
    /// Index of the congruence kernel of the inner region.
    Index {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        outer: String,
        #[arg(long, allow_hyphen_values = true)]
        inner: String,
        #[command(flatten)]
        spec: SpecOpt,
    },
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, allow_hyphen_values = true)]
    region: String,
    #[arg(long, value_enum, default_value = "u")]
    group: Group,
    #[command(flatten)]
    budget: Budget,
    #[command(flatten)]
    spec: SpecOpt,
}

#[derive(Args)]
struct Budget {
    /// Enumeration ceiling; AUT_MAX_ORDER or 2^24 when omitted.
    #[arg(long)]
    max_order: Option<u128>,
}

impl Budget {
    fn get(&self) -> u128 {
        self.max_order.unwrap_or_else(max_order_from_env)
    }
}

#[derive(Subcommand)]
enum InvariantCmd {
    /// Sizes and recurring sizes of the classes.
    Sharp { spec: PathBuf },
    /// Necessary condition for local isomorphism.
    Compare { a: PathBuf, b: PathBuf },
    /// Whether PGL_n(q) arises as a quotient.
    Pgl {
        spec: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u32,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    Simplicity,
    Centre,
    Quasicentre,
    Examples,
    DenseNormal,
    All,
}

#[derive(Args)]
struct LabArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[command(flatten)]
    spec: SpecOpt,
    /// Field order; the default runs use 2 and 3.
    #[arg(long)]
    q: Option<u64>,
    /// Inner region; omit to run the default configurations.
    #[arg(long, allow_hyphen_values = true)]
    inner: Option<String>,
    /// Outer region; defaults to the inner region widened by the margin, or
    /// to the inner region itself for centre and examples.
    #[arg(long, allow_hyphen_values = true)]
    outer: Option<String>,
    #[arg(long, default_value_t = 4)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_order: Option<u128>,
    /// Classes added on each side of the inner region.
    #[arg(long, default_value_t = 2)]
    margin: usize,
    /// Example family: H, L(n) or B(k).
    #[arg(long, default_value = "H")]
    family: String,
}

/// Input problems exit 2, failed checks exit 1.
enum Failure {
    Input(String),
    Verify(String),
}

impl From<aut_core::Error> for Failure {
    fn from(e: aut_core::Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: aut_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_spec(opt: &SpecOpt) -> Result<Arc<PreorderSpec>, Failure> {
    Ok(Arc::new(match &opt.spec {
        Some(p) => in_file(p, parse_preorder(&read(p)?))?,
        None => PreorderSpec::plain(BaseShape::Z),
    }))
}

fn load_spec_file(p: &Path) -> Result<PreorderSpec, Failure> {
    in_file(p, parse_preorder(&read(p)?))
}

fn load_elem(p: &Path, spec: &Arc<PreorderSpec>) -> Result<WindowElement, Failure> {
    in_file(p, parse_element(&read(p)?, spec.clone()))
}

/// All matrices of a file, which must share field and region.
fn load_matrices(p: &Path, spec: &PreorderSpec) -> Result<(Field, IndexSet, Vec<Mat>), Failure> {
    let list = in_file(p, parse_matrices(&read(p)?, spec))?;
    let Some((field, first)) = list.first() else {
        return Err(Failure::Input(format!("{}: no matrices", p.display())));
    };
    let (field, region) = (field.clone(), first.region.clone());
    let mut mats = Vec::new();
    for (f, m) in list {
        if f != field || m.region != region {
            return Err(Failure::Input(format!("{}: matrices differ in field or region", p.display())));
        }
        mats.push(m.mat);
    }
    Ok((field, region, mats))
}

fn config_id(spec: &PreorderSpec, field: &Field, region: &IndexSet) -> String {
    format!("q{}:{}", field.q(), print_region(spec, region).replace(' ', ""))
}

fn hashes(mats: &[Mat]) -> String {
    mats.iter().map(|m| format!("{:016x}", matrix_hash(m))).collect::<Vec<_>>().join(",")
}

fn preorder(cmd: PreorderCmd) -> Out {
    Ok(match cmd {
        PreorderCmd::Show { spec } => print_preorder(&*load_spec(&spec)?),
        PreorderCmd::Hull { set, spec } => {
            let s = load_spec(&spec)?;
            let set = parse_region(&set, &s)?;
            print_region(&s, &s.hull(&set)?) + "\n"
        }
        PreorderCmd::Interval { from, to, spec } => {
            let s = load_spec(&spec)?;
            let (i, j) = (parse_index(&from, &s)?, parse_index(&to, &s)?);
            print_region(&s, &s.interval(&i, &j)?) + "\n"
        }
        PreorderCmd::Class { index, spec } => {
            let s = load_spec(&spec)?;
            print_region(&s, &s.class(&parse_index(&index, &s)?)?) + "\n"
        }
        PreorderCmd::Coarsen { parts, spec } => {
            let s = load_spec(&spec)?;
            let parts = parts.iter().map(|p| parse_region(p, &s)).collect::<aut_core::Result<Vec<_>>>()?;
            print_preorder(&s.coarsen(FinitaryPartition::new(parts))?)
        }
    })
}

fn elem(cmd: ElemCmd) -> Out {
    let line = |e: &WindowElement| print_element(e) + "\n";
    Ok(match cmd {
        ElemCmd::Mul { a, b, spec } => {
            let s = load_spec(&spec)?;
            line(&load_elem(&a, &s)?.mul(&load_elem(&b, &s)?)?)
        }
        ElemCmd::Inv { a, spec } => line(&load_elem(&a, &load_spec(&spec)?)?.inv()),
        ElemCmd::InvTri { a, spec } => line(&load_elem(&a, &load_spec(&spec)?)?.inv_triangular()?),
        ElemCmd::Decompose { a, spec } => {
            let (u, d) = load_elem(&a, &load_spec(&spec)?)?.decompose()?;
            line(&u) + &line(&d)
        }
        ElemCmd::Theta { a, region, spec } => {
            let s = load_spec(&spec)?;
            let e = load_elem(&a, &s)?;
            let m = e.theta(&parse_region(&region, &s)?)?;
            print_matrix(e.field(), &s, &m) + "\n"
        }
        ElemCmd::Lift { matrix, spec } => {
            let s = load_spec(&spec)?;
            let (field, region, mats) = load_matrices(&matrix, &s)?;
            let fm = FiniteMatrix::new(region, mats[0].clone())?;
            line(&WindowElement::lift(&fm, field, s)?)
        }
        ElemCmd::Pred { a, spec } => {
            let p = load_elem(&a, &load_spec(&spec)?)?.predicates();
            format!(
                "in_u={} in_u_star={} in_delta={} scalar={} finite_rank={}\n",
                p.in_u, p.in_u_star, p.in_delta, p.is_scalar, p.deviation_finite_rank
            )
        }
        ElemCmd::Rank { a, spec } => {
            let (lambda, rank) = load_elem(&a, &load_spec(&spec)?)?.deviation_rank();
            format!("scalar={lambda} rank={rank}\n")
        }
        ElemCmd::Commutator { a, b, spec } => {
            let s = load_spec(&spec)?;
            line(&load_elem(&a, &s)?.commutator(&load_elem(&b, &s)?)?)
        }
    })
}

fn truncation_of(args: &RegionArgs) -> Result<(Arc<PreorderSpec>, Truncation), Failure> {
    let s = load_spec(&args.spec)?;
    let region = parse_region(&args.region, &s)?;
    let t = Truncation::new(s.clone(), region, Field::new(args.q)?)?;
    Ok((s, t))
}

fn trunc(cmd: TruncCmd) -> Out {
    match cmd {
        TruncCmd::Order(args) => {
            let (s, t) = truncation_of(&args)?;
            let order = match args.group {
                Group::U => t.order_u()?,
                Group::Gl => t.order_gl()?,
            };
            Ok(format!("config={} order_formula={order}\n", config_id(&s, t.field(), t.region())))
        }
        TruncCmd::Enumerate(args) => {
            let (s, t) = truncation_of(&args)?;
            let max = args.budget.get();
            let (formula, set) = match args.group {
                Group::U => (t.order_u()?, t.enumerate_u(max)?),
                Group::Gl => (t.order_gl()?, t.enumerate_gl(max)?),
            };
            let found = set.len() as u128;
            let out = format!(
                "config={} order_formula={formula} order_enum={found} match={}\n",
                config_id(&s, t.field(), t.region()),
                formula == found
            );
            if formula == found {
                Ok(out)
            } else {
                Err(Failure::Verify(out))
            }
        }
        TruncCmd::Closure { matrices, budget, spec } => {
            let s = load_spec(&spec)?;
            let (field, region, mats) = load_matrices(&matrices, &s)?;
            let set = FiniteGroupSet::closure(mats[0].n(), &field, &mats, budget.get())?;
            Ok(format!(
                "config={} generators={} order={}\n",
                config_id(&s, &field, &region),
                hashes(&mats),
                set.len()
            ))
        }
        TruncCmd::NormalClosure { matrices, ambient, budget, spec } => {
            let s = load_spec(&spec)?;
            let (field, region, mats) = load_matrices(&matrices, &s)?;
            let conj = match ambient {
                Some(p) => {
                    let (f, r, c) = load_matrices(&p, &s)?;
                    if f != field || r != region {
                        return Err(Failure::Input(format!("{}: ambient differs in field or region", p.display())));
                    }
                    c
                }
                None => gl_generators(region.len(), &field),
            };
            let set = FiniteGroupSet::normal_closure_under(&mats[0], &conj, &field, budget.get())?;
            Ok(format!(
                "config={} generators={} order={} contains_sl={}\n",
                config_id(&s, &field, &region),
                hashes(&mats[..1]),
                set.len(),
                set.contains_sl()?
            ))
        }
        TruncCmd::Centralizer { matrices, within, budget, spec } => {
            let s = load_spec(&spec)?;
            let (field, region, mats) = load_matrices(&matrices, &s)?;
            let t = Truncation::new(s.clone(), region.clone(), field.clone())?;
            let cent = match within {
                Group::U => t.centralizer_in_u(&mats, budget.get())?,
                Group::Gl => t.enumerate_gl(budget.get())?.centralizer(&mats),
            };
            let scalars = cent.members().iter().filter(|m| m.as_scalar().is_some()).count();
            Ok(format!(
                "config={} targets={} order={} scalars={scalars}\n",
                config_id(&s, &field, &region),
                hashes(&mats),
                cent.len()
            ))
        }
        TruncCmd::Index { q, outer, inner, spec } => {
            let s = load_spec(&spec)?;
            let outer = parse_region(&outer, &s)?;
            let inner = parse_region(&inner, &s)?;
            let field = Field::new(q)?;
            let t = Truncation::new(s.clone(), outer.clone(), field.clone())?;
            Ok(format!("config={} index={}\n", config_id(&s, &field, &outer), t.index_congruence(&inner)?))
        }
    }
}

fn invariant(cmd: InvariantCmd) -> Out {
    match cmd {
        InvariantCmd::Sharp { spec } => Ok(format!("{}\n", sharp_of(&load_spec_file(&spec)?)?)),
        InvariantCmd::Compare { a, b } => {
            let v = locally_isomorphic_necessary(&load_spec_file(&a)?, &load_spec_file(&b)?)?;
            if v.passes() {
                Ok(format!("{v}\n"))
            } else {
                Err(Failure::Verify(format!("{v}\n")))
            }
        }
        InvariantCmd::Pgl { spec, n, q } => {
            Ok(format!("pgl_quotient={}\n", pgl_quotient_exists(&load_spec_file(&spec)?, n, q)?))
        }
    }
}

/// The inner region padded by `margin` blocks on each side, as far as the
/// base allows, then closed under hulls.
fn widen(spec: &PreorderSpec, inner: &IndexSet, margin: usize) -> Result<IndexSet, Failure> {
    let (Some(lo), Some(hi)) = (inner.first(), inner.iter().last()) else {
        return Err(aut_core::Error::EmptySet.into());
    };
    let m = margin as i64;
    let around = IndexSet::new(spec.indices_in_blocks(lo.block - m, hi.block + m)).union(inner);
    Ok(spec.hull(&around)?)
}

fn lab(args: LabArgs) -> Out {
    let max = args.max_order.unwrap_or_else(max_order_from_env);
    let family: Family = args.family.parse()?;
    let reports: Vec<SuiteReport> = match &args.inner {
        None => {
            if args.spec.spec.is_some() || args.outer.is_some() || args.q.is_some() {
                return Err(Failure::Input("--spec, --q and --outer need --inner".into()));
            }
            match args.suite {
                Suite::Simplicity => vec![lab_simplicity_default(args.trials, args.seed, max)?],
                Suite::All => lab_all(args.trials, args.seed, max)?,
                suite => {
                    let name = suite.to_possible_value().expect("no skipped variants").get_name().to_string();
                    lab_all(args.trials, args.seed, max)?.into_iter().filter(|r| r.suite == name).collect()
                }
            }
        }
        Some(inner) => {
            let spec = load_spec(&args.spec)?;
            let inner = parse_region(inner, &spec)?;
            let outer = match &args.outer {
                Some(o) => parse_region(o, &spec)?,
                // These suites work on a single region.
                None if matches!(args.suite, Suite::Centre | Suite::Examples) => inner.clone(),
                None => widen(&spec, &inner, args.margin)?,
            };
            let field = Field::new(args.q.unwrap_or(2))?;
            let mut cfg = SuiteConfig::new((*spec).clone(), field, inner, outer)
                .trials(args.trials)
                .seed(args.seed)
                .max_order(max);
            cfg.margin = args.margin;
            match args.suite {
                Suite::Simplicity => vec![lab_simplicity_truncated(&cfg)?],
                Suite::Centre => vec![lab_centre(&cfg)?],
                Suite::Quasicentre => vec![lab_quasicentre(&cfg)?],
                Suite::Examples => vec![lab_example_subgroups(&cfg, family)?],
                Suite::DenseNormal => vec![lab_dense_normal(&cfg)?],
                Suite::All => vec![
                    lab_simplicity_truncated(&cfg)?,
                    lab_centre(&cfg)?,
                    lab_quasicentre(&cfg)?,
                    lab_dense_normal(&cfg)?,
                ],
            }
        }
    };
    let mut out = String::new();
    for r in &reports {
        write!(out, "{r}").expect("writing to a string");
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    if reports.iter().any(|r| r.failures() > 0) {
        Err(Failure::Verify(out))
    } else {
        Ok(out)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Preorder(c) => preorder(c),
        Cmd::Elem(c) => elem(c),
        Cmd::Trunc(c) => trunc(c),
        Cmd::Invariant(c) => invariant(c),
        Cmd::Lab(a) => lab(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verify(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widen_stops_at_the_base() {
        let nat = PreorderSpec::plain(BaseShape::N);
        let inner = IndexSet::unit_range(0, 1);
        assert_eq!(widen(&nat, &inner, 2).ok().unwrap(), IndexSet::unit_range(0, 3));
        let z = PreorderSpec::plain(BaseShape::Z);
        assert_eq!(widen(&z, &inner, 2).ok().unwrap(), IndexSet::unit_range(-2, 3));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
