use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use schubert::billey::{restrict, SchubertClasses};
use schubert::gkm::chern_class;
use schubert::oracle::{cover_sweep, expand_in_schubert, verify_sweep, Oracle, SweepFilters};
use schubert::polyring::TermJson;
use schubert::recurrence::{
    format_reflection, product_expansion, Engine, EngineKind, EngineOptions, TraceNode,
};
use schubert::rootsys::load_cartan_text;
use schubert::{Basis, ElementId, Error, Polynomial, Result, RootSystem, WeylGroup};

#[derive(Parser)]
#[command(
    name = "schubert",
    version,
    about = "Equivariant Schubert structure constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Recurrence,
    Oracle,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Alpha,
    Y,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Oracle,
    Covers,
    Properties,
}

#[derive(clap::Args)]
struct Common {
    /// Named type (A3, B2, G2, ...) or a file holding a Cartan matrix.
    #[arg(long)]
    group: String,
    #[arg(long, value_enum, default_value = "text")]
    output: Output,
    /// Display basis; defaults to y for type A and alpha otherwise.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Print c_{wv}^u.
    Constant {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        w: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        u: String,
        #[arg(long, value_enum, default_value = "recurrence")]
        engine: EngineArg,
    },
    /// Expand S_w S_v in the Schubert basis.
    Product {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        w: String,
        #[arg(long)]
        v: String,
        #[arg(long, value_enum, default_value = "recurrence")]
        engine: EngineArg,
    },
    /// Print the restriction S_v|_w.
    Restrict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Compare the recurrence with the oracle and run the property checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Largest group the oracle sweep accepts.
        #[arg(long, default_value_t = schubert::oracle::DEFAULT_SWEEP_BOUND)]
        max_order: usize,
    },
    /// Print the derivation of c_{wv}^u, one rule application per line.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        w: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        u: String,
        /// One-based simple reflection to use at the top instead of the least ascent.
        #[arg(long)]
        first_r: Option<usize>,
        /// Re-evaluate the printed tree and confirm the root value.
        #[arg(long)]
        replay: bool,
    },
    /// Print rank, number of positive roots, |W| and w_0.
    Info {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize, Deserialize)]
pub struct ConstantJson {
    pub group: String,
    pub w: String,
    pub v: String,
    pub u: String,
    pub value: Vec<TermJson>,
    pub text: String,
}

#[derive(Serialize, Deserialize)]
pub struct ProductTermJson {
    pub u: String,
    pub coeff: Vec<TermJson>,
    pub text: String,
}

#[derive(Serialize, Deserialize)]
pub struct ProductJson {
    pub group: String,
    pub w: String,
    pub v: String,
    pub terms: Vec<ProductTermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct RestrictJson {
    pub group: String,
    pub v: String,
    pub w: String,
    pub value: Vec<TermJson>,
    pub text: String,
}

#[derive(Serialize, Deserialize)]
pub struct InfoJson {
    pub group: String,
    pub rank: usize,
    pub positive_roots: usize,
    pub order: usize,
    pub longest: String,
    pub cartan: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
pub struct TraceJson {
    pub w: String,
    pub v: String,
    pub u: String,
    pub rule: String,
    pub r: Option<String>,
    pub value: Vec<TermJson>,
    pub children: Vec<TraceChildJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TraceChildJson {
    pub weight: Vec<TermJson>,
    pub node: TraceJson,
}

struct Ctx {
    group: Arc<WeylGroup>,
    classes: Arc<SchubertClasses>,
    basis: Basis,
    output: Output,
}

impl Ctx {
    fn new(common: &Common) -> Result<Ctx> {
        let rs = load_group(&common.group)?;
        let basis = match common.basis {
            Some(BasisArg::Alpha) => Basis::Alpha,
            Some(BasisArg::Y) if !rs.is_type_a() => return Err(Error::NotTypeA),
            Some(BasisArg::Y) => Basis::Y,
            None if rs.is_type_a() => Basis::Y,
            None => Basis::Alpha,
        };
        let group = WeylGroup::new(rs)?;
        Ok(Ctx {
            classes: SchubertClasses::new(group.clone()),
            group,
            basis,
            output: common.output,
        })
    }

    fn element(&self, text: &str) -> Result<ElementId> {
        self.group.parse_element(text)
    }

    fn render(&self, p: &Polynomial) -> String {
        self.group
            .root_system()
            .render(p, self.basis)
            .unwrap_or_else(|_| p.render_alpha())
    }

    fn label(&self) -> String {
        self.group.root_system().label()
    }
}

fn load_group(spec: &str) -> Result<RootSystem> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        load_cartan_text(&text)
    } else {
        RootSystem::named(spec)
    }
}

fn engine_kind(e: EngineArg) -> EngineKind {
    match e {
        EngineArg::Recurrence => EngineKind::Recurrence,
        EngineArg::Oracle => EngineKind::Oracle,
        EngineArg::Both => EngineKind::Both,
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn trace_json(ctx: &Ctx, node: &TraceNode) -> TraceJson {
    let g = &ctx.group;
    TraceJson {
        w: g.format(node.key.w),
        v: g.format(node.key.v),
        u: g.format(node.key.u),
        rule: node.rule.to_string(),
        r: node.chosen_r.map(|r| format_reflection(g, r)),
        value: node.value.to_json(),
        children: node
            .children
            .iter()
            .map(|(wt, child)| TraceChildJson {
                weight: wt.to_json(),
                node: trace_json(ctx, child),
            })
            .collect(),
    }
}

/// Returns `Ok(false)` when a check ran and failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Constant {
            common,
            w,
            v,
            u,
            engine,
        } => {
            let ctx = Ctx::new(&common)?;
            let (w, v, u) = (ctx.element(&w)?, ctx.element(&v)?, ctx.element(&u)?);
            let rec = || Engine::new(ctx.classes.clone()).structure_constant(w, v, u);
            let orc = || Oracle::new(ctx.classes.clone()).constant(w, v, u);
            let value = match engine {
                EngineArg::Recurrence => rec(),
                EngineArg::Oracle => orc()?,
                EngineArg::Both => {
                    let (a, b) = (rec(), orc()?);
                    if a != b {
                        return Err(Error::EngineMismatch {
                            u: ctx.group.format(u),
                            recurrence: a.to_string(),
                            oracle: b.to_string(),
                        });
                    }
                    a
                }
            };
            if ctx.output == Output::Json {
                print_json(&ConstantJson {
                    group: ctx.label(),
                    w: ctx.group.format(w),
                    v: ctx.group.format(v),
                    u: ctx.group.format(u),
                    value: value.to_json(),
                    text: value.render_alpha(),
                });
            } else {
                println!("{}", ctx.render(&value));
            }
            Ok(true)
        }
        Command::Product {
            common,
            w,
            v,
            engine,
        } => {
            let ctx = Ctx::new(&common)?;
            let (w, v) = (ctx.element(&w)?, ctx.element(&v)?);
            let e = Engine::new(ctx.classes.clone());
            let o = Oracle::new(ctx.classes.clone());
            let exp = product_expansion(&e, &o, w, v, engine_kind(engine))?;
            if ctx.output == Output::Json {
                print_json(&ProductJson {
                    group: ctx.label(),
                    w: ctx.group.format(w),
                    v: ctx.group.format(v),
                    terms: exp
                        .iter()
                        .map(|(u, c)| ProductTermJson {
                            u: ctx.group.format(u),
                            coeff: c.to_json(),
                            text: c.render_alpha(),
                        })
                        .collect(),
                });
            } else if exp.is_empty() {
                println!("0");
            } else {
                for (u, c) in exp.iter() {
                    println!("{}: {}", ctx.group.format(u), ctx.render(c));
                }
            }
            Ok(true)
        }
        Command::Restrict { common, v, w } => {
            let ctx = Ctx::new(&common)?;
            let (v, w) = (ctx.element(&v)?, ctx.element(&w)?);
            let value = restrict(&ctx.group, v, w);
            if ctx.output == Output::Json {
                print_json(&RestrictJson {
                    group: ctx.label(),
                    v: ctx.group.format(v),
                    w: ctx.group.format(w),
                    value: value.to_json(),
                    text: value.render_alpha(),
                });
            } else {
                println!("{}", ctx.render(&value));
            }
            Ok(true)
        }
        Command::Verify {
            common,
            suite,
            max_order,
        } => {
            let ctx = Ctx::new(&common)?;
            verify(&ctx, suite, max_order)
        }
        Command::Trace {
            common,
            w,
            v,
            u,
            first_r,
            replay,
        } => {
            let ctx = Ctx::new(&common)?;
            let (w, v, u) = (ctx.element(&w)?, ctx.element(&v)?, ctx.element(&u)?);
            let first_r = match first_r {
                Some(0) => return Err(Error::Parse("simple indices are one-based".into())),
                Some(r) if r > ctx.group.rank() => {
                    return Err(Error::IndexOutOfRange {
                        index: r,
                        rank: ctx.group.rank(),
                    })
                }
                r => r.map(|r| r - 1),
            };
            let e = Engine::with_options(
                ctx.classes.clone(),
                EngineOptions {
                    first_r,
                    ..EngineOptions::default()
                },
            );
            let tree = e.trace(w, v, u);
            if ctx.output == Output::Json {
                print_json(&trace_json(&ctx, &tree));
            } else {
                for line in tree.render(&ctx.group, ctx.basis) {
                    println!("{line}");
                }
            }
            if replay {
                let value = tree.replay(&ctx.classes)?;
                eprintln!("replay: ok, root value {}", ctx.render(&value));
            }
            Ok(true)
        }
        Command::Info { common } => {
            let ctx = Ctx::new(&common)?;
            let g = &ctx.group;
            let info = InfoJson {
                group: ctx.label(),
                rank: g.rank(),
                positive_roots: g.num_positive_roots(),
                order: g.order(),
                longest: g.format(g.longest()),
                cartan: g.root_system().cartan().to_vec(),
            };
            if ctx.output == Output::Json {
                print_json(&info);
            } else {
                println!("group: {}", info.group);
                println!("rank: {}", info.rank);
                println!("positive roots: {}", info.positive_roots);
                println!("order: {}", info.order);
                println!("w0: {}", info.longest);
            }
            Ok(true)
        }
    }
}

fn verify(ctx: &Ctx, suite: Suite, max_order: usize) -> Result<bool> {
    let g = &ctx.group;
    let mut ok = true;
    let mut json = serde_json::Map::new();
    let text = ctx.output == Output::Text;
    if matches!(suite, Suite::All | Suite::Oracle) {
        let e = Engine::new(ctx.classes.clone());
        let o = Oracle::new(ctx.classes.clone());
        let filters = SweepFilters {
            max_order,
            ..SweepFilters::default()
        };
        let rep = verify_sweep(&e, &o, &filters)?;
        ok &= rep.passed();
        if text {
            rep.lines().iter().for_each(|l| println!("{l}"));
        }
        json.insert("oracle".into(), rep.to_json());
    }
    if matches!(suite, Suite::All | Suite::Covers) {
        let rep = cover_sweep(g);
        ok &= rep.passed();
        if text {
            println!(
                "covers: {} covers, {} reduced words, {} violations",
                rep.covers,
                rep.words,
                rep.violations.len()
            );
            rep.violations
                .iter()
                .for_each(|l| println!("violation: {l}"));
        }
        json.insert(
            "covers".into(),
            serde_json::to_value(&rep).expect("serializable"),
        );
    }
    if matches!(suite, Suite::All | Suite::Properties) {
        let failures = property_checks(ctx)?;
        ok &= failures.is_empty();
        if text {
            println!("properties: {} failures", failures.len());
            failures.iter().for_each(|l| println!("failure: {l}"));
        }
        json.insert(
            "properties".into(),
            serde_json::json!({ "failures": failures }),
        );
    }
    if !text {
        print_json(&json);
    }
    Ok(ok)
}

/// GKM conditions, divided differences and Chern multiplication on every
/// Schubert class.
fn property_checks(ctx: &Ctx) -> Result<Vec<String>> {
    let g = &ctx.group;
    let cls = &ctx.classes;
    let mut failures = Vec::new();
    for w in g.ids() {
        let s = cls.schubert_class(w);
        let name = g.format(w);
        if !s.is_gkm() {
            failures.push(format!("S_{name} is not GKM"));
        }
        for i in 0..g.rank() {
            let wr = g.right_mul_simple(w, i);
            let right = s.right_dd(i)?;
            let expected_right = if g.is_right_ascent(w, i) {
                right.is_zero()
            } else {
                &right == cls.schubert_class(wr)
            };
            if !expected_right || !right.is_gkm() {
                failures.push(format!("right divided difference {} on S_{name}", i + 1));
            }
            let left = s.left_dd(i)?;
            let rw = g.left_mul_simple(i, w);
            let expected_left = if g.is_left_ascent(i, w) {
                left.is_zero()
            } else {
                &left == cls.schubert_class(rw)
            };
            if !expected_left || !left.is_gkm() {
                failures.push(format!("left divided difference {} on S_{name}", i + 1));
            }
            let c = chern_class(g, i)?;
            let got = expand_in_schubert(cls, &c.product(s))?.expansion;
            if got != schubert::gkm::chern_times_schubert(g, i, w) {
                failures.push(format!("Chern class {} times S_{name}", i + 1));
            }
        }
    }
    Ok(failures)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EngineMismatch { .. } => 3,
        Error::NotDivisible { .. } | Error::Internal(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
