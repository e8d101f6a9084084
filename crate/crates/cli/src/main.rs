//! Command-line front end: reads and writes JSON documents and runs the
//! verification suite.
//!
//! Exit codes: 0 when the command succeeds and any check it performs holds,
//! 1 when a check fails, 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use chucoal::bisim::{largest_bisimulation, refine, strongly_extensional_quotient};
use chucoal::chu::{biextensional_collapse, check_chu_morphism, compose_chu, ChuMorphism, ChuSpace};
use chucoal::coalgebra::{check_homomorphism, disjoint_union, FiniteCoalgebra};
use chucoal::doc::{
    parse_document, ChuDoc, CoalgebraDoc, Document, MorphismDoc, QuantumDoc, QuestionMapDoc, SemiunitaryDoc,
};
use chucoal::indexed::{
    groth_check, groth_check_chu, groth_compose, reindex_chu, reindex_coalgebra, static_embed, truncate,
    GrothMorphism, QuestionMap,
};
use chucoal::quantum::random::{random_semiunitary, random_system, QuestionStyle};
use chucoal::quantum::{
    embed_system, materialize_system, probe_rays, wigner_reconstruct, QuantumError, RayMap, StateEquality,
};
use chucoal::random::rng;
use chucoal::unfold::{diff_behaviour, unfold};
use chucoal::value::{NumericMode, Tolerance};
use chucoal::verify::{run_suite, SuiteConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// State cap when materializing quantum documents.
const MATERIALIZE_CAP: usize = 100_000;

#[derive(Parser)]
#[command(name = "chucoal", version, about = "Chu spaces, probabilistic coalgebras and quantum systems")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Numeric mode: the mode of generated data, and the mode input
    /// coalgebras must have.
    #[arg(long, global = true)]
    mode: Option<NumericMode>,
    /// Equality tolerance for float probabilities and quantum states.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Grid width used to group float probabilities during refinement.
    #[arg(long, global = true)]
    eps_grid: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Unfolding depth, and materialization depth of quantum documents.
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Hilbert space dimension of generated systems.
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true, default_value_t = chucoal::quantum::DEFAULT_UNIVERSAL_DIM)]
    universal_dim: usize,
}

impl Global {
    fn tolerance(&self) -> Tolerance {
        let mut t = Tolerance::default();
        if let Some(e) = self.eps {
            t.eps_eq = e;
        }
        if let Some(g) = self.eps_grid {
            t.eps_grid = g;
        }
        t
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and check that it is well formed.
    Validate { file: PathBuf },
    /// Check a Chu morphism or a coalgebra homomorphism.
    CheckMorphism { source: PathBuf, target: PathBuf, morphism: PathBuf },
    /// Compose `first: A → B` with `second: B → C`.
    Compose { a: PathBuf, b: PathBuf, c: PathBuf, first: PathBuf, second: PathBuf },
    /// Biextensional collapse of a Chu space.
    Collapse {
        file: PathBuf,
        /// Write the collapse morphism here.
        #[arg(long)]
        morphism_out: Option<PathBuf>,
    },
    /// Bisimilarity classes of a coalgebra, or of two coalgebras side by side.
    Bisim {
        file: PathBuf,
        other: Option<PathBuf>,
        /// Decide a single pair instead: a state of the first coalgebra and a
        /// state of the second (or of the first when only one is given).
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        pair: Option<Vec<String>>,
    },
    /// Strongly extensional quotient of a coalgebra.
    Quotient {
        file: PathBuf,
        /// Write the projection here.
        #[arg(long)]
        morphism_out: Option<PathBuf>,
    },
    /// Reindex a coalgebra or Chu space along a question map.
    Reindex { qmap: PathBuf, file: PathBuf },
    /// Forget successors: the Chu space of answer probabilities.
    Truncate { file: PathBuf },
    /// The static coalgebra of a numeric Chu space.
    EmbedStatic { file: PathBuf },
    /// Check a Grothendieck morphism `(f, h)`: `h` a homomorphism `f*(source) → target`.
    GrothCheck {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        qmap: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Compose Grothendieck morphisms `A → B → C`; prints the carrier map.
    GrothCompose {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        #[arg(long)]
        qmap1: PathBuf,
        #[arg(long)]
        map1: PathBuf,
        #[arg(long)]
        qmap2: PathBuf,
        #[arg(long)]
        map2: PathBuf,
        /// Write the composite question map here.
        #[arg(long)]
        qmap_out: PathBuf,
    },
    /// Generate a random quantum system.
    QuantumGen {
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, value_enum, default_value_t = Style::Discriminating)]
        questions: Style,
        /// Number of questions for `--questions random`.
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Also include a random semiunitary and its action on probe rays.
        #[arg(long, value_enum)]
        semiunitary: Option<Linearity>,
    },
    /// Embed a quantum system into the universal space.
    QuantumEmbed {
        file: PathBuf,
        /// Basis vectors receiving the original basis, e.g. `2,0`.
        #[arg(long, value_delimiter = ',')]
        placement: Option<Vec<usize>>,
        /// Write the question map (universal ids → original ids) here.
        #[arg(long)]
        qmap_out: Option<PathBuf>,
    },
    /// Reconstruct a semiunitary from a ray map.
    Wigner { file: PathBuf },
    /// Behaviour tree of a state.
    Unfold {
        file: PathBuf,
        state: String,
        #[arg(long)]
        json: bool,
    },
    /// Shallowest observable difference between two states.
    DiffBehaviour {
        file: PathBuf,
        x: String,
        y: String,
        /// Look `y` up in this coalgebra instead of the first.
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Run every registered property check.
    VerifySuite {
        /// Multiplies every sample count.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Run only checks whose id starts with one of these prefixes.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Largest carrier in the exhaustive normal-space enumeration.
        #[arg(long, default_value_t = 3)]
        normal_points: usize,
        /// Where to write the JSON report.
        #[arg(long, default_value = "verify-report.json")]
        report: PathBuf,
        /// Leave runtimes out of the JSON report.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Discriminating,
    Coordinate,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Linearity {
    Unitary,
    Antiunitary,
}

/// How a command ended when it did not error.
enum Verdict {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.global, cli.command) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Ok
    } else {
        Verdict::CheckFailed
    }
}

fn read_doc(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_document(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

fn emit(doc: Document) {
    println!("{}", doc.to_json());
}

/// Either side of the Chu/coalgebra divide.
enum Loaded {
    Chu(ChuSpace),
    Coalgebra(FiniteCoalgebra),
}

fn load(path: &Path, g: &Global) -> Result<Loaded> {
    match read_doc(path)? {
        Document::Chu(d) => Ok(Loaded::Chu(d.to_space().with_context(|| path.display().to_string())?)),
        _ => Ok(Loaded::Coalgebra(load_coalgebra(path, g)?)),
    }
}

/// A coalgebra document, or a quantum document materialized to `--depth`.
fn load_coalgebra(path: &Path, g: &Global) -> Result<FiniteCoalgebra> {
    let a = match read_doc(path)? {
        Document::Coalgebra(d) => d.to_coalgebra().with_context(|| path.display().to_string())?,
        Document::Quantum(d) => {
            let system = d.to_system().with_context(|| path.display().to_string())?;
            materialize_system(&system, g.depth, StateEquality::Vector, &g.tolerance(), MATERIALIZE_CAP)?.coalgebra
        }
        other => bail!("{}: expected a coalgebra or quantum document, found `{}`", path.display(), other.kind()),
    };
    if let Some(mode) = g.mode {
        if a.mode() != mode {
            bail!("{}: {} coalgebra but --mode {mode}", path.display(), a.mode());
        }
    }
    Ok(a)
}

fn load_chu(path: &Path) -> Result<ChuSpace> {
    match read_doc(path)? {
        Document::Chu(d) => Ok(d.to_space().with_context(|| path.display().to_string())?),
        other => bail!("{}: expected a chu document, found `{}`", path.display(), other.kind()),
    }
}

fn load_quantum(path: &Path) -> Result<QuantumDoc> {
    match read_doc(path)? {
        Document::Quantum(d) => Ok(d),
        other => bail!("{}: expected a quantum document, found `{}`", path.display(), other.kind()),
    }
}

fn load_morphism(path: &Path) -> Result<MorphismDoc> {
    match read_doc(path)? {
        Document::Morphism(d) => Ok(d),
        other => bail!("{}: expected a morphism document, found `{}`", path.display(), other.kind()),
    }
}

fn load_qmap(path: &Path) -> Result<QuestionMap> {
    match read_doc(path)? {
        Document::QuestionMap(d) => Ok(d.to_map().with_context(|| path.display().to_string())?),
        other => bail!("{}: expected a questionmap document, found `{}`", path.display(), other.kind()),
    }
}

fn pairs(map: &[usize], source: &[String], target: &[String]) -> Vec<(String, String)> {
    map.iter().enumerate().map(|(i, &j)| (source[i].clone(), target[j].clone())).collect()
}

fn chu_morphism_doc(m: &ChuMorphism, source: &ChuSpace, target: &ChuSpace) -> MorphismDoc {
    MorphismDoc::new(
        pairs(&m.forward, source.points(), target.points()),
        Some(pairs(&m.backward, target.attributes(), source.attributes())),
    )
}

fn state_index(a: &FiniteCoalgebra, id: &str) -> Result<usize> {
    Ok(a.state_index(id)?)
}

fn run(g: &Global, command: Command) -> Result<Verdict> {
    let tol = g.tolerance();
    match command {
        Command::Validate { file } => {
            let summary = match read_doc(&file)? {
                Document::Chu(d) => {
                    let c = d.to_space()?;
                    format!("chu: {} points, {} attributes", c.num_points(), c.num_attributes())
                }
                Document::Coalgebra(d) => {
                    let a = d.to_coalgebra()?;
                    format!("coalgebra: {} states, {} questions, {}", a.len(), a.questions().len(), a.mode())
                }
                Document::Morphism(d) => {
                    format!("morphism: {} forward pairs, backward {}", d.forward.len(), d.backward.is_some())
                }
                Document::QuestionMap(d) => {
                    let f = d.to_map()?;
                    format!("questionmap: {} -> {} questions", f.source().len(), f.target().len())
                }
                Document::Quantum(d) => {
                    let h = d.to_system()?;
                    if let Some(u) = &d.semiunitary {
                        u.to_semiunitary()?;
                    }
                    d.to_ray_map(tol.eps_eq)?;
                    format!("quantum: dim {}, {} states, {} questions", h.dim, h.states.len(), h.questions.len())
                }
            };
            println!("{summary}");
            Ok(Verdict::Ok)
        }

        Command::CheckMorphism { source, target, morphism } => {
            let m = load_morphism(&morphism)?;
            let ok = match (load(&source, g)?, load(&target, g)?) {
                (Loaded::Chu(s), Loaded::Chu(t)) => check_chu_morphism(&s, &t, &m.to_chu_morphism(&s, &t)?, tol.eps_eq)?,
                (Loaded::Coalgebra(a), Loaded::Coalgebra(b)) => {
                    let h = m.carrier_map(a.states(), b.states())?;
                    check_homomorphism(&a, &b, &h, tol.eps_eq)?
                }
                _ => bail!("source and target must both be Chu spaces or both coalgebras"),
            };
            println!("{}", if ok { "valid" } else { "invalid" });
            Ok(verdict(ok))
        }

        Command::Compose { a, b, c, first, second } => {
            let (first, second) = (load_morphism(&first)?, load_morphism(&second)?);
            let doc = match (load(&a, g)?, load(&b, g)?, load(&c, g)?) {
                (Loaded::Chu(a), Loaded::Chu(b), Loaded::Chu(c)) => {
                    let m = compose_chu(&second.to_chu_morphism(&b, &c)?, &first.to_chu_morphism(&a, &b)?)?;
                    chu_morphism_doc(&m, &a, &c)
                }
                (Loaded::Coalgebra(a), Loaded::Coalgebra(b), Loaded::Coalgebra(c)) => {
                    let f = first.carrier_map(a.states(), b.states())?;
                    let h = second.carrier_map(b.states(), c.states())?;
                    let composite: Vec<usize> = f.iter().map(|&y| h[y]).collect();
                    MorphismDoc::new(pairs(&composite, a.states(), c.states()), None)
                }
                _ => bail!("all three objects must be Chu spaces or all coalgebras"),
            };
            emit(Document::Morphism(doc));
            Ok(Verdict::Ok)
        }

        Command::Collapse { file, morphism_out } => {
            let c = load_chu(&file)?;
            let collapse = biextensional_collapse(&c);
            if let Some(path) = morphism_out {
                // attributes of the collapse pull back to their representatives
                let reps: Vec<usize> = (0..collapse.space.num_attributes())
                    .map(|a| collapse.attribute_map.iter().position(|&b| b == a).expect("surjective"))
                    .collect();
                let m = ChuMorphism::new(collapse.point_map.clone(), reps);
                write_file(&path, &Document::Morphism(chu_morphism_doc(&m, &c, &collapse.space)).to_json())?;
            }
            emit(Document::Chu(ChuDoc::of(&collapse.space)));
            Ok(Verdict::Ok)
        }

        Command::Bisim { file, other, pair } => {
            let a = load_coalgebra(&file, g)?;
            let b = other.as_deref().map(|p| load_coalgebra(p, g)).transpose()?;
            if let Some(p) = pair {
                let x = state_index(&a, &p[0])?;
                let (rhs, y) = match &b {
                    Some(b) => (b, state_index(b, &p[1])?),
                    None => (&a, state_index(&a, &p[1])?),
                };
                let same = largest_bisimulation(&a, rhs, &tol)?.same_block(x, a.len() + y);
                println!("{}", if same { "bisimilar" } else { "not bisimilar" });
                return Ok(verdict(same));
            }
            let (coalgebra, partition) = match &b {
                Some(b) => {
                    let u = disjoint_union(&a, b)?;
                    let p = refine(&u.coalgebra, &tol).partition;
                    (u.coalgebra, p)
                }
                None => {
                    let p = refine(&a, &tol).partition;
                    (a, p)
                }
            };
            let blocks = partition.render(|x| coalgebra.states()[x].clone());
            println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "blocks": blocks }))?);
            Ok(Verdict::Ok)
        }

        Command::Quotient { file, morphism_out } => {
            let a = load_coalgebra(&file, g)?;
            let q = strongly_extensional_quotient(&a, &tol);
            if let Some(path) = morphism_out {
                let doc = MorphismDoc::new(pairs(&q.projection, a.states(), q.coalgebra.states()), None);
                write_file(&path, &Document::Morphism(doc).to_json())?;
            }
            emit(Document::Coalgebra(CoalgebraDoc::of(&q.coalgebra)));
            Ok(Verdict::Ok)
        }

        Command::Reindex { qmap, file } => {
            let f = load_qmap(&qmap)?;
            match load(&file, g)? {
                Loaded::Chu(c) => emit(Document::Chu(ChuDoc::of(&reindex_chu(&f, &c)?))),
                Loaded::Coalgebra(a) => emit(Document::Coalgebra(CoalgebraDoc::of(&reindex_coalgebra(&f, &a)?))),
            }
            Ok(Verdict::Ok)
        }

        Command::Truncate { file } => {
            emit(Document::Chu(ChuDoc::of(&truncate(&load_coalgebra(&file, g)?))));
            Ok(Verdict::Ok)
        }

        Command::EmbedStatic { file } => {
            emit(Document::Coalgebra(CoalgebraDoc::of(&static_embed(&load_chu(&file)?)?)));
            Ok(Verdict::Ok)
        }

        Command::GrothCheck { source, target, qmap, map } => {
            let f = load_qmap(&qmap)?;
            let m = load_morphism(&map)?;
            let ok = match (load(&source, g)?, load(&target, g)?) {
                (Loaded::Chu(s), Loaded::Chu(t)) => {
                    let carrier = m.carrier_map(s.points(), t.points())?;
                    groth_check_chu(&GrothMorphism { qmap: f, carrier }, &s, &t, tol.eps_eq)?
                }
                (Loaded::Coalgebra(a), Loaded::Coalgebra(b)) => {
                    let carrier = m.carrier_map(a.states(), b.states())?;
                    groth_check(&GrothMorphism { qmap: f, carrier }, &a, &b, tol.eps_eq)?
                }
                _ => bail!("source and target must both be Chu spaces or both coalgebras"),
            };
            println!("{}", if ok { "valid" } else { "invalid" });
            Ok(verdict(ok))
        }

        Command::GrothCompose { a, b, c, qmap1, map1, qmap2, map2, qmap_out } => {
            let ids = |path: &Path| -> Result<Vec<String>> {
                Ok(match load(path, g)? {
                    Loaded::Chu(s) => s.points().to_vec(),
                    Loaded::Coalgebra(x) => x.states().to_vec(),
                })
            };
            let (xa, xb, xc) = (ids(&a)?, ids(&b)?, ids(&c)?);
            let first = GrothMorphism { qmap: load_qmap(&qmap1)?, carrier: load_morphism(&map1)?.carrier_map(&xa, &xb)? };
            let second = GrothMorphism { qmap: load_qmap(&qmap2)?, carrier: load_morphism(&map2)?.carrier_map(&xb, &xc)? };
            let both = groth_compose(&second, &first)?;
            write_file(&qmap_out, &Document::QuestionMap(QuestionMapDoc::of(&both.qmap)).to_json())?;
            emit(Document::Morphism(MorphismDoc::new(pairs(&both.carrier, &xa, &xc), None)));
            Ok(Verdict::Ok)
        }

        Command::QuantumGen { states, questions, count, semiunitary } => {
            let dim = g.dim.ok_or_else(|| anyhow!("quantum-gen needs --dim"))?;
            if dim == 0 {
                bail!("--dim must be positive");
            }
            let mut r = rng(g.seed);
            let style = match questions {
                Style::Discriminating => QuestionStyle::Discriminating,
                Style::Coordinate => QuestionStyle::Coordinate,
                Style::Random => QuestionStyle::Random { count },
            };
            let system = random_system(&mut r, dim, states, style)?;
            let mut doc = QuantumDoc::of(&system);
            if let Some(kind) = semiunitary {
                let u = random_semiunitary(&mut r, dim, matches!(kind, Linearity::Antiunitary));
                let map = RayMap::of_semiunitary(&u, &probe_rays(dim), tol.eps_eq);
                doc.semiunitary = Some(SemiunitaryDoc::of(&u));
                doc.ray_map = Some(QuantumDoc::ray_map_doc(&map));
            }
            emit(Document::Quantum(doc));
            Ok(Verdict::Ok)
        }

        Command::QuantumEmbed { file, placement, qmap_out } => {
            let system = load_quantum(&file)?.to_system()?;
            let e = embed_system(&system, g.universal_dim, placement.as_deref())?;
            if let Some(path) = qmap_out {
                write_file(&path, &Document::QuestionMap(QuestionMapDoc::of(&e.qmap)).to_json())?;
            }
            emit(Document::Quantum(QuantumDoc::of(&e.system)));
            Ok(Verdict::Ok)
        }

        Command::Wigner { file } => {
            let doc = load_quantum(&file)?;
            let eps = g.eps.unwrap_or(1e-7);
            let map = match (doc.to_ray_map(eps)?, &doc.semiunitary) {
                (Some(map), _) => map,
                (None, Some(u)) => RayMap::of_semiunitary(&u.to_semiunitary()?, &probe_rays(doc.dim), eps),
                (None, None) => bail!("{}: no ray_map or semiunitary to reconstruct from", file.display()),
            };
            match wigner_reconstruct(&map, doc.dim, eps) {
                Ok(u) => {
                    let out = QuantumDoc { semiunitary: Some(SemiunitaryDoc::of(&u)), ray_map: None, ..doc };
                    emit(Document::Quantum(out));
                    Ok(Verdict::Ok)
                }
                Err(e @ QuantumError::InconsistentRayMap(..)) => {
                    println!("not induced by a semiunitary: {e}");
                    Ok(Verdict::CheckFailed)
                }
                Err(e) => Err(e.into()),
            }
        }

        Command::Unfold { file, state, json } => {
            let a = load_coalgebra(&file, g)?;
            let tree = unfold(&a, state_index(&a, &state)?, g.depth)?;
            if json {
                let doc = serde_json::json!({
                    "kind": "behaviour",
                    "state": state,
                    "depth": g.depth,
                    "tree": tree.to_json(),
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                print!("{}", tree.render());
            }
            Ok(Verdict::Ok)
        }

        Command::DiffBehaviour { file, x, y, other } => {
            let a = load_coalgebra(&file, g)?;
            let b = match other {
                Some(p) => load_coalgebra(&p, g)?,
                None => a.clone(),
            };
            match diff_behaviour(&a, state_index(&a, &x)?, &b, state_index(&b, &y)?, &tol)? {
                None => {
                    println!("no difference: bisimilar");
                    Ok(Verdict::Ok)
                }
                Some(d) => {
                    println!("{}", d.render());
                    Ok(Verdict::CheckFailed)
                }
            }
        }

        Command::VerifySuite { scale, only, normal_points, report, no_timing } => {
            if scale.is_nan() || scale <= 0.0 {
                bail!("--scale must be positive");
            }
            let mut config = SuiteConfig {
                seed: g.seed,
                mode: g.mode.unwrap_or_default(),
                eps: g.eps,
                scale,
                normal_points,
                only,
                ..SuiteConfig::default()
            };
            if let Some(grid) = g.eps_grid {
                config.eps_grid = grid;
            }
            if g.universal_dim != chucoal::quantum::DEFAULT_UNIVERSAL_DIM {
                config.universal_dim = g.universal_dim;
            }
            let result = run_suite(&config);
            print!("{}", result.table());
            let json = if no_timing { result.without_timing().to_json() } else { result.to_json() };
            write_file(&report, &json)?;
            Ok(verdict(result.passed()))
        }
    }
}
