//! The verification suite: a fixed registry of property checks, each run on
//! seeded random (or exhaustively enumerated) instances, producing a
//! deterministic report.

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::bisim::{is_bisimulation, largest_bisimulation, refine, strongly_extensional_quotient, Partition, Relation};
use crate::chu::{
    check_chu_morphism, check_powerset_homomorphism, chu_morphism_to_homomorphism, coalgebra_to_normal, compose_chu,
    homomorphism_to_chu_morphism, normal_to_coalgebra, preimage_morphism, ChuMorphism, NormalChuSpace,
    PowersetCoalgebra,
};
use crate::coalgebra::{check_homomorphism, disjoint_union, is_static, FiniteCoalgebra};
use crate::indexed::{
    chu_to_groth, groth_check, groth_check_chu, groth_compose, groth_to_chu, integral_truncate, reindex_chu,
    reindex_coalgebra, static_embed, truncate, GrothMorphism, QuestionMap,
};
use crate::oracle;
use crate::quantum::random::{random_scalar, random_semiunitary, random_state, random_subspace, random_system, QuestionStyle};
use crate::quantum::{
    born, discriminating_questions, embed_system, fidelity, materialize_system, probe_rays, projective_equiv,
    projective_quotient, semiunitary_morphism, wigner_reconstruct, HilbertSystem, QuantumError, Ray, RayMap,
    Semiunitary, StateEquality, StateVector,
};
use crate::random::{self as gen, substream, SeededRng};
use crate::unfold::{semantic_equal, tree_classes};
use crate::value::{NumericMode, Tolerance, Value, ValueAlphabet, DEFAULT_EPS_GRID};

/// Pinned tolerances of the floating-point checks.
pub const EPS_BISIM_PROJECTIVE: f64 = 1e-7;
pub const EPS_SEMIUNITARY: f64 = 1e-8;
pub const EPS_WIGNER: f64 = 1e-7;
pub const EPS_EMBEDDING: f64 = 1e-8;
/// Equality slack used while materializing quantum systems.
const EPS_STATES: f64 = 1e-9;
/// State cap for quantum materializations inside the suite.
const SUITE_STATE_CAP: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Numeric mode of the randomly generated coalgebras and Chu spaces.
    pub mode: NumericMode,
    /// Overrides every float tolerance when set.
    pub eps: Option<f64>,
    pub eps_grid: f64,
    /// Multiplies every sample count.
    pub scale: f64,
    /// Largest carrier in the exhaustive normal-space enumeration.
    pub normal_points: usize,
    /// Target dimension of the embedding check.
    pub universal_dim: usize,
    /// Run only the checks whose id starts with one of these prefixes.
    pub only: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            mode: NumericMode::Rational,
            eps: None,
            eps_grid: DEFAULT_EPS_GRID,
            scale: 1.0,
            normal_points: 3,
            universal_dim: 4,
            only: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// A float-sensitive check that failed because tolerances were forced
    /// to zero.
    ExpectedFail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::ExpectedFail => "expected-fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: &'static str,
    pub criterion: u8,
    pub label: &'static str,
    pub params: String,
    pub seed: u64,
    pub stream: u64,
    pub status: Status,
    pub max_residual: f64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub mode: NumericMode,
    pub eps: Option<f64>,
    pub eps_grid: f64,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// The report with timings removed; equal for equal configurations.
    pub fn without_timing(&self) -> SuiteReport {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.runtime_ms = None;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Fixed-width table, one line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>2}  {:<13} {:>10} {:>10}  params", "check", "#", "status", "residual", "ms");
        for c in &self.checks {
            let ms = c.runtime_ms.map_or_else(|| "-".to_string(), |t| format!("{t:.1}"));
            let _ = writeln!(
                out,
                "{:<24} {:>2}  {:<13} {:>10.2e} {:>10}  {}",
                c.id,
                c.criterion,
                c.status.label(),
                c.max_residual,
                ms,
                c.params
            );
            if c.status != Status::Pass && !c.detail.is_empty() {
                let _ = writeln!(out, "{:<24}     {}", "", c.detail);
            }
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

/// What a check reports back.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub pass: bool,
    pub residual: f64,
    pub params: String,
    pub detail: String,
}

struct Ctx<'a> {
    config: &'a SuiteConfig,
    rng: SeededRng,
}

impl Ctx<'_> {
    fn samples(&self, base: usize) -> usize {
        ((base as f64 * self.config.scale).ceil() as usize).max(1)
    }

    fn eps(&self, pinned: f64) -> f64 {
        self.config.eps.unwrap_or(pinned)
    }

    /// Tolerance for quantum materializations and comparisons.
    fn quantum_tol(&self, pinned: f64) -> Tolerance {
        Tolerance { eps_eq: self.eps(pinned), eps_grid: self.config.eps_grid }
    }

    fn state_tol(&self) -> Tolerance {
        Tolerance { eps_eq: self.eps(EPS_STATES), eps_grid: self.config.eps_grid }
    }

    /// Tolerance for the randomly generated coalgebras: exact in rational
    /// mode, and exact on the copied float values too.
    fn coalgebra_tol(&self) -> Tolerance {
        Tolerance { eps_eq: 0.0, eps_grid: 0.0 }
    }
}

type CheckFn = fn(&mut Ctx) -> Result<Outcome, String>;

struct CheckSpec {
    id: &'static str,
    criterion: u8,
    label: &'static str,
    float_sensitive: bool,
    run: CheckFn,
}

const REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        id: "normal-iso-objects",
        criterion: 1,
        label: "normal Chu spaces and K^P-coalgebras correspond bijectively",
        float_sensitive: false,
        run: normal_iso_objects,
    },
    CheckSpec {
        id: "normal-iso-morphisms",
        criterion: 1,
        label: "(f, f^-1) is a Chu morphism iff f is a homomorphism",
        float_sensitive: false,
        run: normal_iso_morphisms,
    },
    CheckSpec {
        id: "bisim-oracles",
        criterion: 2,
        label: "refinement = greatest fixpoint = tree equality",
        float_sensitive: false,
        run: bisim_oracles,
    },
    CheckSpec {
        id: "bisim-projective",
        criterion: 3,
        label: "bisimilarity = projective equivalence",
        float_sensitive: true,
        run: bisim_projective,
    },
    CheckSpec {
        id: "quotient-rays",
        criterion: 4,
        label: "strongly extensional quotient = projective coalgebra",
        float_sensitive: true,
        run: quotient_rays,
    },
    CheckSpec {
        id: "semiunitary-groth",
        criterion: 5,
        label: "semiunitaries induce Grothendieck homomorphisms",
        float_sensitive: true,
        run: semiunitary_groth,
    },
    CheckSpec {
        id: "wigner-round-trip",
        criterion: 6,
        label: "semiunitaries are recovered from their ray maps",
        float_sensitive: true,
        run: wigner_round_trip,
    },
    CheckSpec {
        id: "indexed-laws",
        criterion: 7,
        label: "reindexing, truncation and Grothendieck laws",
        float_sensitive: false,
        run: indexed_laws,
    },
    CheckSpec {
        id: "surjective-reindexing",
        criterion: 8,
        label: "surjective reindexing preserves bisimilarity",
        float_sensitive: false,
        run: surjective_reindexing,
    },
    CheckSpec {
        id: "embedding-invariance",
        criterion: 9,
        label: "embedding into the universal space preserves behaviour",
        float_sensitive: true,
        run: embedding_invariance,
    },
    CheckSpec {
        id: "kernel-injectivity",
        criterion: 10,
        label: "kernels are bisimulations; maps out of quotients are injective",
        float_sensitive: false,
        run: kernel_injectivity,
    },
];

/// Ids and criterion numbers of every registered check, in report order.
pub fn registry() -> Vec<(&'static str, u8, &'static str)> {
    REGISTRY.iter().map(|c| (c.id, c.criterion, c.label)).collect()
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let forced_zero = config.eps == Some(0.0);
    let mut checks = Vec::new();
    for (index, spec) in REGISTRY.iter().enumerate() {
        if !config.only.is_empty() && !config.only.iter().any(|p| spec.id.starts_with(p.as_str())) {
            continue;
        }
        let stream = index as u64;
        let mut ctx = Ctx { config, rng: substream(config.seed, stream) };
        let start = Instant::now();
        let outcome = (spec.run)(&mut ctx).unwrap_or_else(|e| Outcome { pass: false, detail: e, ..Outcome::default() });
        let runtime = start.elapsed().as_secs_f64() * 1e3;
        let status = match (outcome.pass, spec.float_sensitive && forced_zero) {
            (true, _) => Status::Pass,
            (false, true) => Status::ExpectedFail,
            (false, false) => Status::Fail,
        };
        checks.push(CheckRecord {
            id: spec.id,
            criterion: spec.criterion,
            label: spec.label,
            params: outcome.params,
            seed: config.seed,
            stream,
            status,
            max_residual: outcome.residual,
            detail: outcome.detail,
            runtime_ms: Some(runtime),
        });
    }
    SuiteReport { seed: config.seed, mode: config.mode, eps: config.eps, eps_grid: config.eps_grid, checks }
}

fn fail(detail: impl Into<String>) -> Result<Outcome, String> {
    Err(detail.into())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// criterion 1

fn normal_ids(n: usize) -> Vec<String> {
    gen::ids("x", n)
}

fn normal_space(n: usize, bits: u64) -> NormalChuSpace {
    let width = 1usize << n;
    NormalChuSpace::from_fn(ValueAlphabet::boolean(), normal_ids(n), n, |x, m| {
        Value::Symbol((bits >> (x * width + m) & 1) as usize)
    })
    .expect("boolean tables are valid")
}

fn bit_table(cells: usize, bits: u64) -> Vec<Value> {
    (0..cells).map(|i| Value::Symbol((bits >> i & 1) as usize)).collect()
}

fn normal_iso_objects(ctx: &mut Ctx) -> Result<Outcome, String> {
    let max_n = ctx.config.normal_points;
    let mut count: u64 = 0;
    for n in 0..=max_n {
        let cells = n << n;
        let space_template = normal_space(n, 0);
        let coalgebra_template =
            PowersetCoalgebra::new(ValueAlphabet::boolean(), normal_ids(n), bit_table(cells, 0)).map_err(err)?;
        for bits in 0..1u64 << cells {
            let table = bit_table(cells, bits);
            let c = space_template.with_table(table.clone()).map_err(err)?;
            let a = normal_to_coalgebra(&c, max_n).map_err(err)?;
            if coalgebra_to_normal(&a) != c {
                return fail(format!("H(G(C)) differs from C for n = {n}, table {bits:#x}"));
            }
            let b = coalgebra_template.with_table(table).map_err(err)?;
            if normal_to_coalgebra(&coalgebra_to_normal(&b), max_n).map_err(err)? != b {
                return fail(format!("G(H(A)) differs from A for n = {n}, table {bits:#x}"));
            }
            count += 1;
        }
    }
    Ok(Outcome { pass: true, params: format!("|X| <= {max_n}, {count} spaces, exact"), ..Outcome::default() })
}

/// Compares the Chu check of `(f, f^-1)` with the homomorphism check of
/// `f`, and the functor actions on the pair.
fn compare_morphism(c: &NormalChuSpace, d: &NormalChuSpace, f: &[usize], limit: usize) -> Result<bool, String> {
    let ny = d.space().num_points();
    let m = preimage_morphism(f, ny);
    let chu = check_chu_morphism(c.space(), d.space(), &m, 0.0).map_err(err)?;
    let (a, b) = (normal_to_coalgebra(c, limit).map_err(err)?, normal_to_coalgebra(d, limit).map_err(err)?);
    let hom = check_powerset_homomorphism(&a, &b, f, 0.0).map_err(err)?;
    if chu != hom {
        return Err(format!("Chu check {chu} but homomorphism check {hom} for f = {f:?}"));
    }
    if chu_morphism_to_homomorphism(c, d, &m).map_err(err)? != f {
        return Err(format!("G does not recover f = {f:?}"));
    }
    if homomorphism_to_chu_morphism(&a, &b, f).map_err(err)? != m {
        return Err(format!("H(f) is not (f, f^-1) for f = {f:?}"));
    }
    Ok(chu)
}

/// `D` with `e_D(σ(x), σ(S)) = e_C(x, S)`, so that `σ` is a homomorphism.
fn transport(c: &NormalChuSpace, sigma: &[usize]) -> NormalChuSpace {
    let n = sigma.len();
    let mut inv = vec![0; n];
    for (x, &y) in sigma.iter().enumerate() {
        inv[y] = x;
    }
    NormalChuSpace::from_fn(ValueAlphabet::boolean(), normal_ids(n), n, |y, mask| {
        c.space().eval(inv[y], crate::chu::preimage_mask(sigma, mask)).clone()
    })
    .expect("transported tables are valid")
}

fn normal_iso_morphisms(ctx: &mut Ctx) -> Result<Outcome, String> {
    let limit = ctx.config.normal_points.max(2);
    let (mut pairs, mut valid) = (0u64, 0u64);
    // every pair of spaces on at most two points, every carrier map
    for n in 0..=2usize {
        for m in 0..=2usize {
            let maps = oracle::all_functions(n, m);
            for cb in 0..1u64 << (n << n) {
                let c = normal_space(n, cb);
                for db in 0..1u64 << (m << m) {
                    let d = normal_space(m, db);
                    for f in &maps {
                        pairs += 1;
                        valid += u64::from(compare_morphism(&c, &d, f, limit)?);
                    }
                }
            }
        }
    }
    // three points: random pairs and transported pairs, every bijection
    let bijections = oracle::all_bijections(3);
    let samples = ctx.samples(400);
    let mut transported_ok = 0;
    for _ in 0..samples {
        let c = normal_space(3, ctx.rng.random_range(0..1u64 << 24));
        let d = normal_space(3, ctx.rng.random_range(0..1u64 << 24));
        let sigma = &bijections[ctx.rng.random_range(0..bijections.len())];
        let t = transport(&c, sigma);
        for f in &bijections {
            pairs += 2;
            valid += u64::from(compare_morphism(&c, &d, f, limit)?);
            valid += u64::from(compare_morphism(&c, &t, f, limit)?);
        }
        if !compare_morphism(&c, &t, sigma, limit)? {
            return fail(format!("transport along {sigma:?} is not a morphism"));
        }
        transported_ok += 1;
    }
    Ok(Outcome {
        pass: valid > 0 && valid < pairs && transported_ok == samples,
        params: format!("{pairs} (space, space, map) triples, {valid} morphisms, exact"),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 2

fn random_pair(ctx: &mut Ctx) -> (FiniteCoalgebra, FiniteCoalgebra) {
    let mode = ctx.config.mode;
    let rng = &mut ctx.rng;
    let nq = rng.random_range(1..=5);
    let make = |rng: &mut SeededRng| {
        let n = rng.random_range(1..=8);
        if rng.random_bool(0.5) {
            gen::random_coalgebra(rng, n, nq, mode, 0.3)
        } else {
            // many bisimilar states: pull back a smaller coalgebra
            let m = rng.random_range(1..=n);
            let b = gen::random_coalgebra(rng, m, nq, mode, 0.3);
            gen::random_homomorphism_into(rng, &b, n).0
        }
    };
    let a = make(rng);
    let b = make(rng);
    (a, b)
}

fn bisim_oracles(ctx: &mut Ctx) -> Result<Outcome, String> {
    let tol = ctx.coalgebra_tol();
    let samples = ctx.samples(240);
    let mut nontrivial = 0;
    for i in 0..samples {
        let (a, b) = random_pair(ctx);
        let u = disjoint_union(&a, &b).map_err(err)?;
        let refined = largest_bisimulation(&a, &b, &tol).map_err(err)?;
        let naive = Partition::from_labels(&oracle::bisimulation_classes(&u.coalgebra, &tol));
        let depth = a.len() + b.len();
        let trees = Partition::from_labels(&tree_classes(&u.coalgebra, depth, &tol));
        if refined != naive {
            return fail(format!("instance {i}: refinement {:?} vs fixpoint {:?}", refined.blocks(), naive.blocks()));
        }
        if refined != trees {
            return fail(format!("instance {i}: refinement {:?} vs trees {:?}", refined.blocks(), trees.blocks()));
        }
        let cross = oracle::greatest_bisimulation(&a, &b, &tol);
        for (x, row) in cross.iter().enumerate() {
            for (y, &related) in row.iter().enumerate() {
                if semantic_equal(&a, x, &b, y, &tol).map_err(err)? != related {
                    return fail(format!("instance {i}: semantic equality of ({x}, {y}) disagrees"));
                }
            }
        }
        if refined.num_blocks() < refined.len() {
            nontrivial += 1;
        }
    }
    Ok(Outcome {
        pass: true,
        params: format!("{samples} coalgebra pairs (<= 8 states, <= 5 questions), {nontrivial} with merged states, exact"),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 3

fn pair_system(psi: &StateVector, phi: &StateVector) -> Result<HilbertSystem, QuantumError> {
    let dim = psi.dim();
    let qs = discriminating_questions(&[psi.clone(), phi.clone()], dim)?;
    HilbertSystem::new(dim, vec![psi.clone(), phi.clone()], qs)
}

fn bisim_projective(ctx: &mut Ctx) -> Result<Outcome, String> {
    let tol = ctx.quantum_tol(EPS_BISIM_PROJECTIVE);
    let state_tol = ctx.state_tol();
    let samples = ctx.samples(120);
    let mut residual: f64 = 0.0;
    let (mut equivalent, mut separate) = (0, 0);
    for i in 0..2 * samples {
        let dim = 2 + i % 3;
        let psi = random_state(&mut ctx.rng, dim);
        let scaled = i % 2 == 0;
        let phi = if scaled {
            psi.scaled(random_scalar(&mut ctx.rng)).map_err(err)?
        } else {
            random_state(&mut ctx.rng, dim)
        };
        let sys = pair_system(&psi, &phi).map_err(err)?;
        let m = materialize_system(&sys, 2, StateEquality::Vector, &state_tol, SUITE_STATE_CAP).map_err(err)?;
        if m.find(&phi, false, |a, b| StateEquality::Vector.same(a, b, state_tol.eps_eq)) == Some(0) {
            return fail(format!("sample {i}: the two states were merged during materialization"));
        }
        let bisimilar = refine(&m.coalgebra, &tol).partition.same_block(0, 1);
        let equiv = projective_equiv(&psi, &phi, tol.eps_eq).map_err(err)?;
        let ratio = oracle::scalar_multiple(phi.amplitudes(), psi.amplitudes(), tol.eps_eq.sqrt());
        if bisimilar != scaled || equiv != scaled || ratio != scaled {
            return fail(format!(
                "sample {i} (dim {dim}, {}): bisimilar {bisimilar}, projective {equiv}, ratio search {ratio}",
                if scaled { "scaled pair" } else { "independent pair" }
            ));
        }
        if scaled {
            for s in &sys.questions {
                residual = residual.max((born(&psi, s).map_err(err)? - born(&phi, s).map_err(err)?).abs());
            }
            equivalent += 1;
        } else {
            separate += 1;
        }
    }
    Ok(Outcome {
        pass: residual <= tol.eps_eq,
        residual,
        params: format!("dims 2-4, {equivalent} scaled + {separate} independent pairs, eps {:e}", tol.eps_eq),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 4

fn quotient_rays(ctx: &mut Ctx) -> Result<Outcome, String> {
    let tol = ctx.state_tol();
    let samples = ctx.samples(20);
    let dim = 3;
    let mut compared = 0usize;
    for i in 0..samples {
        let psi1 = random_state(&mut ctx.rng, dim);
        let psi2 = random_state(&mut ctx.rng, dim);
        let qs = discriminating_questions(&[psi1.clone(), psi2.clone()], dim).map_err(err)?;
        let seeds = vec![
            psi1.clone(),
            psi2.clone(),
            psi1.scaled(random_scalar(&mut ctx.rng)).map_err(err)?,
            psi2.scaled(random_scalar(&mut ctx.rng)).map_err(err)?,
        ];
        let sys = HilbertSystem::new(dim, seeds, qs).map_err(err)?;

        // Rays as states: the closure is finite and the quotient is discrete.
        let rays = materialize_system(&sys, 2, StateEquality::Projective, &tol, SUITE_STATE_CAP).map_err(err)?;
        if !rays.frontier.is_empty() {
            return fail(format!("sample {i}: ray closure did not finish within depth 2"));
        }
        let pq = projective_quotient(&rays, &tol).map_err(err)?;
        let q = strongly_extensional_quotient(&rays.coalgebra, &tol);
        if q.coalgebra.len() != pq.coalgebra.len() {
            return fail(format!(
                "sample {i}: {} rays but {} bisimilarity classes",
                pq.coalgebra.len(),
                q.coalgebra.len()
            ));
        }
        if !check_homomorphism(&rays.coalgebra, &pq.coalgebra, &(0..rays.states.len()).collect::<Vec<_>>(), tol.eps_eq)
            .map_err(err)?
        {
            return fail(format!("sample {i}: the projective coalgebra does not mirror the materialization"));
        }

        // Vectors as states: blocks agree with rays among states of equal depth.
        let m = materialize_system(&sys, 2, StateEquality::Vector, &tol, SUITE_STATE_CAP).map_err(err)?;
        let p = refine(&m.coalgebra, &tol).partition;
        let canon: Vec<Ray> = m.states.iter().map(|s| Ray::of(s, tol.eps_eq)).collect();
        for x in 0..m.reachable {
            for y in x + 1..m.reachable {
                if m.depths[x] != m.depths[y] {
                    continue;
                }
                let same_ray = projective_equiv(&m.states[x], &m.states[y], tol.eps_eq).map_err(err)?;
                if same_ray != canon[x].approx_eq(&canon[y], tol.eps_eq.sqrt()) {
                    return fail(format!("sample {i}: canonical rays disagree with projective equivalence"));
                }
                if p.same_block(x, y) != same_ray {
                    return fail(format!(
                        "sample {i}: states {} and {} (depth {}) same block {} but same ray {same_ray}",
                        m.coalgebra.states()[x],
                        m.coalgebra.states()[y],
                        m.depths[x],
                        p.same_block(x, y)
                    ));
                }
                compared += 1;
            }
        }
        for x in m.reachable..m.states.len() {
            if (0..m.states.len()).any(|y| p.same_block(x, y) != m.is_absorbing(y)) {
                return fail(format!("sample {i}: absorbing states do not form their own block"));
            }
        }
    }
    Ok(Outcome {
        pass: true,
        params: format!("dim 3, depth 2, {samples} systems, {compared} same-depth pairs"),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 5

fn semiunitary_groth(ctx: &mut Ctx) -> Result<Outcome, String> {
    let eps = ctx.eps(EPS_SEMIUNITARY);
    let state_tol = ctx.state_tol();
    let samples = ctx.samples(60);
    let mut residual: f64 = 0.0;
    let mut checked = [0usize; 2];
    for i in 0..2 * samples {
        let anti = i % 2 == 1;
        let dim = 3 + (i / 2) % 2;
        let u = random_semiunitary(&mut ctx.rng, dim, anti);
        let style = if i % 4 < 2 { QuestionStyle::Random { count: 3 } } else { QuestionStyle::Discriminating };
        let h = random_system(&mut ctx.rng, dim, 2, style).map_err(err)?;
        let k = u.image_system(&h).map_err(err)?;
        let sm = semiunitary_morphism(&u, &h, &k, 1e-8).map_err(err)?;
        let mh = materialize_system(&h, 2, StateEquality::Vector, &state_tol, SUITE_STATE_CAP).map_err(err)?;
        let mk = materialize_system(&k, 2, StateEquality::Vector, &state_tol, SUITE_STATE_CAP).map_err(err)?;
        let g = sm.carrier_map(&mh, &mk, StateEquality::Vector, state_tol.eps_eq).map_err(err)?;
        if !groth_check(&g, &mh.coalgebra, &mk.coalgebra, eps).map_err(err)? {
            return fail(format!("sample {i} (dim {dim}, antiunitary {anti}): Grothendieck check failed"));
        }
        // P_S(Uψ) = U(P_{U⁻¹S} ψ) on a fresh state and subspace
        let psi = random_state(&mut ctx.rng, dim);
        let rank = ctx.rng.random_range(1..dim);
        let s = random_subspace(&mut ctx.rng, dim, rank);
        let lhs = s.project(&u.apply(psi.amplitudes()));
        let rhs = u.apply(&u.preimage(&s).map_err(err)?.project(psi.amplitudes()));
        residual = residual.max((lhs - rhs).norm() / psi.amplitudes().norm());
        checked[usize::from(anti)] += 1;
    }
    Ok(Outcome {
        pass: residual <= eps,
        residual,
        params: format!("dims 3-4, {} unitaries + {} antiunitaries, eps {eps:e}", checked[0], checked[1]),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 6

fn wigner_round_trip(ctx: &mut Ctx) -> Result<Outcome, String> {
    let eps = ctx.eps(EPS_WIGNER);
    let samples = ctx.samples(120);
    let mut residual: f64 = 0.0;
    for i in 0..samples {
        let anti = i % 2 == 1;
        let v = random_semiunitary(&mut ctx.rng, 3, anti);
        let map = RayMap::of_semiunitary(&v, &probe_rays(3), eps);
        let u = wigner_reconstruct(&map, 3, eps).map_err(|e| format!("sample {i}: {e}"))?;
        if u.is_antiunitary() != anti {
            return fail(format!("sample {i}: linearity flag not recovered"));
        }
        for _ in 0..20 {
            let psi = random_state(&mut ctx.rng, 3);
            let (a, b) = (u.apply(psi.amplitudes()), v.apply(psi.amplitudes()));
            residual = residual.max(1.0 - fidelity(&a, &b));
        }
    }
    let small = Semiunitary::identity(2);
    let rejected = matches!(
        wigner_reconstruct(&RayMap::of_semiunitary(&small, &probe_rays(2), eps), 2, eps),
        Err(QuantumError::DimensionTooSmall(2))
    );
    if !rejected {
        return fail("a dimension-2 ray map was not rejected");
    }
    Ok(Outcome {
        pass: residual <= eps,
        residual,
        params: format!("dim 3, {samples} semiunitaries x 20 rays, dim 2 rejected, eps {eps:e}"),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 7

fn random_groth(rng: &mut SeededRng, source_len: usize, target_q: &[String], dom: usize, cod: usize) -> GrothMorphism {
    GrothMorphism {
        qmap: gen::random_question_map(rng, source_len, target_q, false),
        carrier: gen::random_function(rng, dom, cod),
    }
}

fn relabel(f: QuestionMap, prefix: &str) -> QuestionMap {
    let source = gen::ids(prefix, f.source().len());
    QuestionMap::new(source, f.target().to_vec(), f.map().to_vec()).expect("same shape")
}

fn indexed_laws(ctx: &mut Ctx) -> Result<Outcome, String> {
    let mode = ctx.config.mode;
    let tol = ctx.coalgebra_tol();
    let samples = ctx.samples(120);
    let mut valid_groth = 0;
    for i in 0..samples {
        let rng = &mut ctx.rng;
        let nq = rng.random_range(1..=4);
        let n = rng.random_range(1..=6);
        let a = gen::random_coalgebra(rng, n, nq, mode, 0.3);
        let (lf, lg) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let f = gen::random_question_map(rng, lf, a.questions(), false);
        let g = relabel(gen::random_question_map(rng, lg, f.source(), false), "r");
        let fg = f.after(&g).map_err(err)?;
        let bad = |what: &str| fail(format!("instance {i}: {what}"));

        // strict functor laws
        if reindex_coalgebra(&QuestionMap::identity(a.questions()), &a).map_err(err)? != a {
            return bad("identity reindexing changed a coalgebra");
        }
        let fa = reindex_coalgebra(&f, &a).map_err(err)?;
        if reindex_coalgebra(&fg, &a).map_err(err)? != reindex_coalgebra(&g, &fa).map_err(err)? {
            return bad("(f g)* differs from g* f* on a coalgebra");
        }
        let c = truncate(&a);
        if reindex_chu(&QuestionMap::identity(c.attributes()), &c).map_err(err)? != c {
            return bad("identity reindexing changed a Chu space");
        }
        let fc = reindex_chu(&f, &c).map_err(err)?;
        if reindex_chu(&fg, &c).map_err(err)? != reindex_chu(&g, &fc).map_err(err)? {
            return bad("(f g)* differs from g* f* on a Chu space");
        }

        // T commutes with reindexing
        if truncate(&fa) != fc {
            return bad("T(f* A) differs from f* T(A)");
        }

        // E and T
        let points = rng.random_range(1..=5);
        let chu = gen::random_chu(rng, points, nq, mode);
        let e = static_embed(&chu).map_err(err)?;
        if !is_static(&e) || truncate(&e) != chu {
            return bad("T(E(C)) differs from C");
        }
        let s = FiniteCoalgebra::from_fn(mode, a.questions().to_vec(), a.states().to_vec(), |x, q| {
            a.answer(x, q).clone().map_next(|_| x)
        })
        .map_err(err)?;
        if static_embed(&truncate(&s)).map_err(err)? != s {
            return bad("E(T(A)) differs from a static A");
        }

        // the Chu bridge: (id, f) : C → f*C is a Chu morphism
        let m = ChuMorphism::new((0..c.num_points()).collect(), f.map().to_vec());
        let bridged = chu_to_groth(&c, &fc, &m).map_err(err)?;
        if groth_to_chu(&bridged) != m || chu_to_groth(&c, &fc, &groth_to_chu(&bridged)).map_err(err)? != bridged {
            return bad("Chu/Grothendieck bridge is not a bijection");
        }
        if !check_chu_morphism(&c, &fc, &m, 0.0).map_err(err)? || !groth_check_chu(&bridged, &c, &fc, 0.0).map_err(err)? {
            return bad("(id, f) is not a morphism C -> f*C");
        }
        let random_m = ChuMorphism::new(
            gen::random_function(rng, c.num_points(), fc.num_points()),
            gen::random_function(rng, fc.num_attributes(), c.num_attributes()),
        );
        let rb = chu_to_groth(&c, &fc, &random_m).map_err(err)?;
        if check_chu_morphism(&c, &fc, &random_m, 0.0).map_err(err)? != groth_check_chu(&rb, &c, &fc, 0.0).map_err(err)? {
            return bad("bridge changes validity of a random pair");
        }

        // Grothendieck composition: associativity and identities
        let (n1, n2, n3) = (rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=4));
        let q0 = gen::ids("q", nq);
        let h1 = random_groth(rng, 3, &q0, n, n1);
        let h2 = relabel(gen::random_question_map(rng, 2, h1.qmap.source(), false), "s");
        let h2 = GrothMorphism { qmap: h2, carrier: gen::random_function(rng, n1, n2) };
        let h3 = relabel(gen::random_question_map(rng, 3, h2.qmap.source(), false), "t");
        let h3 = GrothMorphism { qmap: h3, carrier: gen::random_function(rng, n2, n3) };
        let left = groth_compose(&h3, &groth_compose(&h2, &h1).map_err(err)?).map_err(err)?;
        let right = groth_compose(&groth_compose(&h3, &h2).map_err(err)?, &h1).map_err(err)?;
        if left != right {
            return bad("Grothendieck composition is not associative");
        }
        let id_src = GrothMorphism::identity(h1.qmap.target(), n);
        let id_tgt = GrothMorphism::identity(h1.qmap.source(), n1);
        if groth_compose(&h1, &id_src).map_err(err)? != h1 || groth_compose(&id_tgt, &h1).map_err(err)? != h1 {
            return bad("identity laws fail");
        }
        if integral_truncate(&groth_compose(&h2, &h1).map_err(err)?)
            != compose_chu(&integral_truncate(&h2), &integral_truncate(&h1)).map_err(err)?
        {
            return bad("the truncation functor does not preserve composition");
        }

        // valid arrows compose to valid arrows and truncate to Chu morphisms
        let first = GrothMorphism { qmap: f.clone(), carrier: (0..n).collect() };
        let quotient = strongly_extensional_quotient(&fa, &tol);
        let second = GrothMorphism { qmap: QuestionMap::identity(fa.questions()), carrier: quotient.projection.clone() };
        let both = groth_compose(&second, &first).map_err(err)?;
        for (arrow, src, tgt) in [(&first, &a, &fa), (&second, &fa, &quotient.coalgebra), (&both, &a, &quotient.coalgebra)] {
            if !groth_check(arrow, src, tgt, 0.0).map_err(err)? {
                return bad("a constructed Grothendieck arrow is invalid");
            }
            if !check_chu_morphism(&truncate(src), &truncate(tgt), &integral_truncate(arrow), 0.0).map_err(err)? {
                return bad("a valid arrow truncates to an invalid Chu morphism");
            }
            valid_groth += 1;
        }
    }
    Ok(Outcome {
        pass: true,
        params: format!("{samples} instances ({valid_groth} valid arrows), {} mode, exact", ctx.config.mode),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 8

fn coarsens(fine: &Partition, coarse: &Partition) -> bool {
    (0..fine.len()).all(|x| (0..fine.len()).all(|y| !fine.same_block(x, y) || coarse.same_block(x, y)))
}

fn surjective_reindexing(ctx: &mut Ctx) -> Result<Outcome, String> {
    let mode = ctx.config.mode;
    let tol = ctx.coalgebra_tol();
    let samples = ctx.samples(120);
    for i in 0..samples {
        let rng = &mut ctx.rng;
        let nq = rng.random_range(1..=4);
        let n = rng.random_range(1..=8);
        let a = gen::random_coalgebra(rng, n, nq, mode, 0.3);
        let np = rng.random_range(nq..=nq + 3);
        let f = gen::random_question_map(rng, np, a.questions(), true);
        let before = refine(&a, &tol).partition;
        let after = refine(&reindex_coalgebra(&f, &a).map_err(err)?, &tol).partition;
        if before != after {
            return fail(format!("instance {i}: surjective reindexing changed {:?} into {:?}", before.blocks(), after.blocks()));
        }
    }
    // A non-surjective map may only coarsen; find a strict instance.
    let mut witness = None;
    for attempt in 0..ctx.samples(500) {
        let rng = &mut ctx.rng;
        let nq = rng.random_range(2..=4);
        let n = rng.random_range(2..=6);
        let a = gen::random_coalgebra(rng, n, nq, mode, 0.3);
        let np = rng.random_range(1..nq);
        let f = gen::random_question_map(rng, np, a.questions(), false);
        let before = refine(&a, &tol).partition;
        let after = refine(&reindex_coalgebra(&f, &a).map_err(err)?, &tol).partition;
        if !coarsens(&before, &after) {
            return fail(format!("attempt {attempt}: reindexing refined a partition"));
        }
        if after.num_blocks() < before.num_blocks() {
            witness = Some((attempt, n, nq, f.source().len(), before.num_blocks(), after.num_blocks()));
            break;
        }
    }
    match witness {
        Some((attempt, n, nq, np, b, c)) => Ok(Outcome {
            pass: true,
            params: format!(
                "{samples} surjective maps; counterexample at attempt {attempt}: {n} states, {np} -> {nq} questions, {b} -> {c} blocks"
            ),
            ..Outcome::default()
        }),
        None => fail("no non-surjective map coarsened a partition"),
    }
}

// ---------------------------------------------------------------------------
// criterion 9

fn embedding_invariance(ctx: &mut Ctx) -> Result<Outcome, String> {
    let eps = ctx.eps(EPS_EMBEDDING);
    let state_tol = ctx.state_tol();
    let universal = ctx.config.universal_dim;
    let samples = ctx.samples(60);
    let mut residual: f64 = 0.0;
    for i in 0..samples {
        let rng = &mut ctx.rng;
        let psi = random_state(rng, 2);
        let states = vec![psi.clone(), psi.scaled(random_scalar(rng)).map_err(err)?, random_state(rng, 2)];
        let qs = if i % 2 == 0 {
            discriminating_questions(&states, 2).map_err(err)?
        } else {
            (0..3).map(|_| random_subspace(rng, 2, 1)).collect()
        };
        let k = HilbertSystem::new(2, states, qs).map_err(err)?;
        let mut placement: Vec<usize> = (0..universal).collect();
        rand::seq::SliceRandom::shuffle(placement.as_mut_slice(), rng);
        placement.truncate(2);
        let emb = embed_system(&k, universal, Some(&placement)).map_err(err)?;
        if !emb.qmap.is_surjective() {
            return fail(format!("sample {i}: question map onto the original list is not surjective"));
        }
        for (psi_u, psi) in emb.system.states.iter().zip(&k.states) {
            for (u, &j) in emb.system.questions.iter().zip(emb.qmap.map()) {
                residual = residual.max((born(psi_u, u).map_err(err)? - born(psi, &k.questions[j]).map_err(err)?).abs());
            }
        }
        let mk = materialize_system(&k, 2, StateEquality::Vector, &state_tol, SUITE_STATE_CAP).map_err(err)?;
        let mu = materialize_system(&emb.system, 2, StateEquality::Vector, &state_tol, SUITE_STATE_CAP).map_err(err)?;
        let pulled = reindex_coalgebra(&emb.qmap, &mk.coalgebra).map_err(err)?;
        let tol = ctx.quantum_tol(EPS_EMBEDDING);
        let mut carrier = Vec::with_capacity(mk.states.len());
        for (x, s) in mk.states.iter().enumerate() {
            let image = StateVector::new(&emb.isometry * s.amplitudes()).map_err(err)?;
            let y = mu
                .find(&image, mk.is_absorbing(x), |a, b| StateEquality::Vector.same(a, b, state_tol.eps_eq))
                .ok_or_else(|| format!("sample {i}: embedded state {} not materialized", mk.coalgebra.states()[x]))?;
            carrier.push(y);
        }
        if !check_homomorphism(&pulled, &mu.coalgebra, &carrier, eps).map_err(err)? {
            return fail(format!("sample {i}: the isometry is not a homomorphism f*(K) -> embedded system"));
        }
        let p_k = refine(&mk.coalgebra, &tol).partition;
        let p_pulled = refine(&pulled, &tol).partition;
        let p_u = refine(&mu.coalgebra, &tol).partition;
        let transported: Vec<usize> = carrier.iter().map(|&y| p_u.block_of(y)).collect();
        if p_k != p_pulled || p_k != Partition::from_labels(&transported) {
            return fail(format!("sample {i}: bisimilarity partitions differ after embedding"));
        }
    }
    Ok(Outcome {
        pass: residual <= eps,
        residual,
        params: format!("dim 2 into {universal}, {samples} systems, eps {eps:e}"),
        ..Outcome::default()
    })
}

// ---------------------------------------------------------------------------
// criterion 10

fn kernel(h: &[usize]) -> Relation {
    Relation::new((0..h.len()).flat_map(|x| (0..h.len()).map(move |y| (x, y))).filter(|&(x, y)| h[x] == h[y]))
}

fn kernel_injectivity(ctx: &mut Ctx) -> Result<Outcome, String> {
    let mode = ctx.config.mode;
    let tol = ctx.coalgebra_tol();
    let samples = ctx.samples(120);
    for i in 0..samples {
        let rng = &mut ctx.rng;
        let nq = rng.random_range(1..=4);
        let m = rng.random_range(1..=5);
        let b = gen::random_coalgebra(rng, m, nq, mode, 0.3);
        let n = rng.random_range(m..=m + 4);
        let (a, h) = gen::random_homomorphism_into(rng, &b, n);
        if !check_homomorphism(&a, &b, &h, 0.0).map_err(err)? {
            return fail(format!("instance {i}: generated map is not a homomorphism"));
        }
        if !is_bisimulation(&kernel(&h), &a, &a, &tol).map_err(err)? {
            return fail(format!("instance {i}: kernel is not a bisimulation"));
        }
    }
    let mut found = 0;
    let extensional = ctx.samples(50);
    for i in 0..extensional {
        let rng = &mut ctx.rng;
        let nq = rng.random_range(1..=3);
        let n = rng.random_range(1..=6);
        let a = gen::random_coalgebra(rng, n, nq, mode, 0.3);
        let s = strongly_extensional_quotient(&a, &tol).coalgebra;
        if s.len() > 5 {
            continue;
        }
        let targets = [gen::random_blow_up(rng, &s), disjoint_union(&s, &a).map_err(err)?.coalgebra];
        for t in &targets {
            let homs = oracle::all_homomorphisms(&s, t, &tol);
            if homs.is_empty() {
                return fail(format!("instance {i}: no homomorphism into a target that has one"));
            }
            for h in &homs {
                if (1..h.len()).any(|x| h[..x].contains(&h[x])) {
                    return fail(format!("instance {i}: non-injective homomorphism {h:?} out of a quotient"));
                }
                if !is_bisimulation(&kernel(h), &s, &s, &tol).map_err(err)? {
                    return fail(format!("instance {i}: kernel of {h:?} is not a bisimulation"));
                }
            }
            found += homs.len();
        }
    }
    Ok(Outcome {
        pass: true,
        params: format!("{samples} kernels; {found} homomorphisms out of {extensional} quotients, all injective"),
        ..Outcome::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_every_criterion() {
        let crits: std::collections::BTreeSet<u8> = registry().iter().map(|c| c.1).collect();
        assert_eq!(crits, (1..=10).collect());
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let config = SuiteConfig { scale: 0.05, normal_points: 2, only: vec!["bisim".into(), "kernel".into()], ..SuiteConfig::default() };
        let a = run_suite(&config);
        assert!(a.passed(), "{}", a.table());
        let b = run_suite(&config);
        assert_eq!(a.without_timing(), b.without_timing());
    }

    #[test]
    fn transport_gives_a_morphism() {
        let c = normal_space(3, 0x5a5a5a);
        let t = transport(&c, &[2, 0, 1]);
        assert!(compare_morphism(&c, &t, &[2, 0, 1], 3).unwrap());
    }

    #[test]
    fn bit_tables_follow_point_major_order() {
        let c = normal_space(2, 0b0010_0001);
        assert_eq!(c.space().eval(0, 0), &Value::Symbol(1));
        assert_eq!(c.space().eval(1, 1), &Value::Symbol(1));
        assert_eq!(c.with_table(bit_table(8, 0b0010_0001)).unwrap(), c);
    }
}
