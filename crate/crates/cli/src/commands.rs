use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use emz_spectral::expansion::{
    build_kernels, expand as expand_vector, kernel_operator, parseval, transform, ExpansionCoefficients, KernelSet,
    ParsevalReport,
};
use emz_spectral::ordered_rep::{
    build_multiplicity_sets_partial, build_ordered_representation, oracle_agreement, OracleAgreement,
    OrderedRepresentation,
};
use emz_spectral::quasidiff::{
    convergence_order, lagrange_residual, ConvergenceFit, LagrangeCheck, OdeOptions, QuasiFunction, QuasiRhs,
    ShinZettlMatrix, Violation,
};
use emz_spectral::realset::{Interval, RealSet};
use emz_spectral::schema::{SystemFile, SCHEMA_VERSION};
use emz_spectral::vectorop::{
    borel_calculus_apply, build_superposition_graph, cyclic_vector_plan, identity_resolution_apply, spectral_index,
    EMZSystem, PartitionResult, PlanVector, SampledFunction, SuperpositionGraph, VectorFunction,
};
use emz_spectral::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{csv_bytes, emit, write_atomic};
use crate::{Failure, KernelFunction, RunConfig, EXIT_BUDGET, EXIT_UNSUPPORTED, EXIT_VALIDATION};

/// Points at which the kernel's Hermitian symmetry is sampled.
const HERMITIAN_PAIRS: usize = 25;
/// Panel counts of the convergence fit in `lagrange-check`.
const FIT_PANELS: [usize; 5] = [4, 8, 16, 32, 64];

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    input: Option<String>,
    seed: u64,
    result: T,
}

fn emit_report<T: Serialize>(cfg: &RunConfig, input: Option<&Path>, result: T) -> Result<(), Failure> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: cfg.command,
        input: input.map(|p| p.display().to_string()),
        seed: cfg.seed,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure {
        code: crate::EXIT_OTHER,
        message: e.to_string(),
    })?;
    text.push('\n');
    emit(cfg.out.as_deref(), &text)?;
    Ok(())
}

fn read_file(cfg: &RunConfig, input: &Path) -> Result<SystemFile, Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure {
        code: crate::EXIT_OTHER,
        message: format!("{}: {e}", input.display()),
    })?;
    let mut file = SystemFile::from_json(&text)?;
    if cfg.eps_atom.is_some() {
        file.eps_atom = cfg.eps_atom;
    }
    Ok(file)
}

fn load(cfg: &RunConfig, input: &Path) -> Result<EMZSystem, Failure> {
    Ok(read_file(cfg, input)?.system(cfg.window)?)
}

#[derive(Serialize)]
struct OperatorSummary {
    id: String,
    family: String,
}

#[derive(Serialize)]
struct MatrixViolation {
    matrix: String,
    violation: Violation,
}

#[derive(Serialize)]
struct ValidateReport {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<[f64; 2]>,
    operators: Vec<OperatorSummary>,
    slots: usize,
    matrices: usize,
    violations: Vec<MatrixViolation>,
    errors: Vec<String>,
}

pub fn validate(cfg: &RunConfig, input: &Path) -> Result<u8, Failure> {
    let mut report = ValidateReport {
        ok: false,
        window: None,
        operators: Vec::new(),
        slots: 0,
        matrices: 0,
        violations: Vec::new(),
        errors: Vec::new(),
    };
    match read_file(cfg, input) {
        Err(f) if f.code == EXIT_VALIDATION => report.errors.push(f.message),
        Err(f) => return Err(f),
        Ok(file) => {
            report.operators = file
                .operators
                .iter()
                .map(|o| OperatorSummary {
                    id: o.id.clone(),
                    family: o.family.clone(),
                })
                .collect();
            report.matrices = file.matrices.len();
            report.violations = file
                .matrix_violations()
                .into_iter()
                .map(|(matrix, violation)| MatrixViolation { matrix, violation })
                .collect();
            match file.system(cfg.window) {
                Ok(sys) => {
                    let w = sys.window();
                    report.window = Some([w.lo, w.hi]);
                    report.slots = sys.slots().len();
                }
                Err(e) => report.errors.push(e.to_string()),
            }
        }
    }
    report.ok = report.errors.is_empty() && report.violations.is_empty();
    let ok = report.ok;
    emit_report(cfg, Some(input), report)?;
    Ok(if ok { 0 } else { EXIT_VALIDATION })
}

pub fn graph(cfg: &RunConfig, input: &Path) -> Result<u8, Failure> {
    let sys = load(cfg, input)?;
    emit_report(cfg, Some(input), build_superposition_graph(&sys)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct IndexReport {
    #[serde(flatten)]
    partition: PartitionResult,
    unique: Option<bool>,
    graph: SuperpositionGraph,
    plan: Vec<PlanVector>,
}

pub fn index(cfg: &RunConfig, input: &Path) -> Result<u8, Failure> {
    let sys = load(cfg, input)?;
    let partition = spectral_index(&sys)?;
    let plan = cyclic_vector_plan(&sys, &partition)?;
    let report = IndexReport {
        unique: partition.is_unique(),
        graph: build_superposition_graph(&sys)?,
        plan,
        partition,
    };
    emit_report(cfg, Some(input), report)?;
    Ok(0)
}

#[derive(Serialize)]
struct OrderedRepReport {
    lambda: usize,
    multiplicity: usize,
    distorted: bool,
    oracle: OracleAgreement,
    representation: OrderedRepresentation,
}

#[derive(Serialize)]
struct BudgetReport {
    error: String,
    budget: usize,
    combinations: usize,
    /// `s_1, s_2, …` completed before the budget ran out.
    partial_s_n: Vec<RealSet>,
}

pub fn ordered_rep(cfg: &RunConfig, input: &Path) -> Result<u8, Failure> {
    let sys = load(cfg, input)?;
    match build_ordered_representation(&sys, cfg.budget) {
        Ok(rep) => {
            let oracle = oracle_agreement(&sys, &rep)?;
            let report = OrderedRepReport {
                lambda: rep.lambda,
                multiplicity: rep.multiplicity,
                distorted: rep.distorted,
                oracle,
                representation: rep,
            };
            emit_report(cfg, Some(input), report)?;
            Ok(0)
        }
        Err(Error::EnumerationBudgetExceeded { budget }) => {
            let partial = match build_multiplicity_sets_partial(&sys, sys.total_multiplicity() + 1, budget) {
                Ok(done) | Err((_, done)) => done,
            };
            let error = Error::EnumerationBudgetExceeded { budget }.to_string();
            eprintln!("error: {error}");
            let report = BudgetReport {
                error,
                budget,
                combinations: partial.combinations,
                partial_s_n: partial.sets,
            };
            emit_report(cfg, Some(input), report)?;
            Ok(EXIT_BUDGET)
        }
        Err(e) => Err(e.into()),
    }
}

fn pure_point_only(e: Error) -> Failure {
    let mut f = Failure::from(e);
    if f.code == EXIT_UNSUPPORTED {
        f.message.push_str(
            " (eigenfunction expansions need a pure-point system of catalog operators: \
             impulse_on_unit or dirichlet_sl_on_pi)",
        );
    }
    f
}

fn kernel_set(sys: &EMZSystem, budget: usize) -> Result<KernelSet, Failure> {
    let rep = build_ordered_representation(sys, budget)?;
    build_kernels(sys, &rep).map_err(pure_point_only)
}

fn random_vector(sys: &EMZSystem, rng: &mut ChaCha8Rng) -> VectorFunction {
    let mut v = VectorFunction::zero(sys);
    for s in v.slots.values_mut() {
        for c in &mut s.coeffs {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    v
}

fn read_vector(sys: &EMZSystem, path: &Path) -> Result<VectorFunction, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: crate::EXIT_OTHER,
        message: format!("{}: {e}", path.display()),
    })?;
    let raw: BTreeMap<String, Vec<[f64; 3]>> =
        serde_json::from_str(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let pairs = raw
        .into_iter()
        .map(|(k, v)| {
            (
                k,
                v.into_iter().map(|[l, re, im]| (l, Complex64::new(re, im))).collect(),
            )
        })
        .collect();
    Ok(VectorFunction::from_pairs(sys, &pairs)?)
}

#[derive(Serialize)]
struct KernelSummary {
    count: usize,
    atoms_per_kernel: Vec<usize>,
    max_residual: f64,
    min_gram_det: f64,
    sup_per_slot: BTreeMap<String, f64>,
}

impl KernelSummary {
    fn new(ks: &KernelSet) -> Self {
        KernelSummary {
            count: ks.kernels.len(),
            atoms_per_kernel: ks.kernels.iter().map(|k| k.entries.len()).collect(),
            max_residual: ks.max_residual,
            min_gram_det: ks.min_gram_det,
            sup_per_slot: ks.sup_per_slot.clone(),
        }
    }
}

#[derive(Serialize)]
struct ReconstructionReport {
    atoms_kept: usize,
    atoms_total: usize,
    error: f64,
    tail: f64,
    /// `|error² − tail|`.
    tail_identity_residual: f64,
}

#[derive(Serialize)]
struct SweepReport {
    samples: usize,
    max_parseval_residual: f64,
    max_round_trip_error: f64,
}

#[derive(Serialize)]
struct ExpandReport {
    kernels: KernelSummary,
    coefficients: ExpansionCoefficients,
    parseval: ParsevalReport,
    reconstruction: ReconstructionReport,
    random_sweep: SweepReport,
}

pub fn expand(
    cfg: &RunConfig,
    input: &Path,
    vector: Option<&Path>,
    truncate: Option<usize>,
    samples: usize,
) -> Result<u8, Failure> {
    let sys = load(cfg, input)?;
    let ks = kernel_set(&sys, cfg.budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = match vector {
        Some(p) => read_vector(&sys, p)?,
        None => random_vector(&sys, &mut rng),
    };
    let coefficients = transform(&sys, &ks, &w)?;
    let rec = expand_vector(&sys, &ks, &coefficients, truncate)?;
    let error = rec.vector.distance(&w);
    let reconstruction = ReconstructionReport {
        atoms_kept: rec.kept.len(),
        atoms_total: ks.atoms().len(),
        error,
        tail: rec.tail,
        tail_identity_residual: (error * error - rec.tail).abs(),
    };
    let mut sweep = SweepReport {
        samples,
        max_parseval_residual: 0.0,
        max_round_trip_error: 0.0,
    };
    for _ in 0..samples {
        let v = random_vector(&sys, &mut rng);
        let u = transform(&sys, &ks, &v)?;
        sweep.max_parseval_residual = sweep.max_parseval_residual.max(parseval(&v, &u).residual);
        let back = expand_vector(&sys, &ks, &u, None)?;
        sweep.max_round_trip_error = sweep.max_round_trip_error.max(back.vector.distance(&v));
    }
    let report = ExpandReport {
        kernels: KernelSummary::new(&ks),
        parseval: parseval(&w, &coefficients),
        coefficients,
        reconstruction,
        random_sweep: sweep,
    };
    emit_report(cfg, Some(input), report)?;
    Ok(0)
}

pub struct KernelopArgs {
    pub delta: Option<(f64, f64)>,
    pub empty_delta: bool,
    pub function: KernelFunction,
    pub function_samples: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub grid: usize,
    pub samples: usize,
}

#[derive(Serialize)]
struct KernelSample {
    slot: String,
    x: f64,
    s: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct KernelopReport {
    delta: RealSet,
    function: String,
    kernels: KernelSummary,
    samples: usize,
    /// `max ‖K(F)f − F(T)χ_Δ(T)f‖` over the random vectors.
    borel_max_diff: f64,
    /// `max ‖K(χ_Δ)f − E(Δ)f‖`, when `F = χ_Δ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution_max_diff: Option<f64>,
    /// `max |K(F; x, s) − conj K(F̄; s, x)|` over sampled pairs.
    hermitian_max_defect: f64,
    max_output_norm: f64,
    zero_operator: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

pub fn kernelop(cfg: &RunConfig, input: &Path, args: &KernelopArgs) -> Result<u8, Failure> {
    let sys = load(cfg, input)?;
    let ks = kernel_set(&sys, cfg.budget)?;
    let window = sys.window();
    let delta = if args.empty_delta {
        RealSet::empty(window)
    } else if let Some((lo, hi)) = args.delta {
        if !(lo <= hi) {
            return Err(Failure::validation(format!("--delta {lo} {hi} is not an interval")));
        }
        RealSet::from_interval(window, Interval::closed(lo, hi))?
    } else {
        RealSet::full(window)
    };
    let sampled = match &args.function_samples {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let f: SampledFunction =
                serde_json::from_str(&text).map_err(|e| Failure::validation(format!("{}: {e}", p.display())))?;
            Some(SampledFunction::new(f.xs, f.values)?)
        }
        None => None,
    };
    let kind = args.function;
    let func = |l: f64| -> Complex64 {
        if let Some(s) = &sampled {
            return s.eval(l);
        }
        match kind {
            KernelFunction::Chi => Complex64::new(1.0, 0.0),
            KernelFunction::Lambda => Complex64::new(l, 0.0),
            KernelFunction::Cos => Complex64::new(l.cos(), 0.0),
            KernelFunction::Zero => Complex64::new(0.0, 0.0),
        }
    };
    let conj = |l: f64| func(l).conj();
    let masked = |l: f64| {
        if delta.contains(l) {
            func(l)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let op = kernel_operator(&sys, &ks, &func, &delta)?;
    let op_conj = kernel_operator(&sys, &ks, &conj, &delta)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut borel: f64 = 0.0;
    let mut resolution: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    for _ in 0..args.samples {
        let f = random_vector(&sys, &mut rng);
        let kf = op.apply(&sys, &f)?;
        max_norm = max_norm.max(kf.norm_sqr().sqrt());
        borel = borel.max(kf.distance(&borel_calculus_apply(&sys, &masked, &f)?));
        if sampled.is_none() && kind == KernelFunction::Chi {
            let (e, _) = identity_resolution_apply(&sys, &delta, &f)?;
            resolution = resolution.max(kf.distance(&e));
        }
    }

    let slots: Vec<(String, f64, f64)> = ks
        .eigen
        .iter()
        .map(|(id, data)| {
            let g = data.check_grid();
            (id.clone(), g[0], g[g.len() - 1])
        })
        .collect();
    let mut hermitian: f64 = 0.0;
    for _ in 0..HERMITIAN_PAIRS {
        if slots.is_empty() {
            break;
        }
        let (id, a, b) = &slots[rng.random_range(0..slots.len())];
        let (x, s) = (rng.random_range(*a..=*b), rng.random_range(*a..=*b));
        let d = (op.sample(id, x, id, s) - op_conj.sample(id, s, id, x).conj()).norm();
        hermitian = hermitian.max(d);
    }

    let csv = match &args.csv {
        Some(path) => {
            let n = args.grid.max(2);
            let mut rows = Vec::new();
            for (id, a, b) in &slots {
                let pts: Vec<f64> = (0..n).map(|j| a + (b - a) * j as f64 / (n - 1) as f64).collect();
                for &x in &pts {
                    for &s in &pts {
                        let k = op.sample(id, x, id, s);
                        rows.push(KernelSample {
                            slot: id.clone(),
                            x,
                            s,
                            re: k.re,
                            im: k.im,
                        });
                    }
                }
            }
            write_atomic(path, &csv_bytes(&rows)?)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let function = match &args.function_samples {
        Some(p) => format!("samples:{}", p.display()),
        None => format!("{kind:?}").to_lowercase(),
    };
    let report = KernelopReport {
        delta,
        function,
        kernels: KernelSummary::new(&ks),
        samples: args.samples,
        borel_max_diff: borel,
        resolution_max_diff: (sampled.is_none() && kind == KernelFunction::Chi).then_some(resolution),
        hermitian_max_defect: hermitian,
        max_output_norm: max_norm,
        zero_operator: max_norm == 0.0,
        csv,
    };
    emit_report(cfg, Some(input), report)?;
    Ok(0)
}

#[derive(Serialize)]
struct PairCheck {
    check: LagrangeCheck,
    bound: f64,
    pass: bool,
}

#[derive(Serialize)]
struct MatrixCheck {
    id: String,
    order: usize,
    interval: (f64, f64),
    violations: Vec<Violation>,
    pairs: Vec<PairCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence: Option<ConvergenceFit>,
}

#[derive(Serialize)]
struct LagrangeReport {
    ok: bool,
    panels: usize,
    tol_quad: f64,
    tol_ode: f64,
    matrices: Vec<MatrixCheck>,
}

fn forcing(x: f64) -> Complex64 {
    Complex64::new((3.0 * x).cos(), x * x)
}

pub fn lagrange_check(cfg: &RunConfig, input: Option<&Path>, pairs: usize, panels: usize) -> Result<u8, Failure> {
    let matrices: Vec<(String, ShinZettlMatrix)> = match input {
        Some(p) => read_file(cfg, p)?
            .matrices
            .into_iter()
            .map(|m| (m.id, m.matrix))
            .collect(),
        None => Vec::new(),
    };
    let matrices = if matrices.is_empty() {
        vec![(
            "second_derivative".to_string(),
            ShinZettlMatrix::second_derivative((0.0, 1.0)),
        )]
    } else {
        matrices
    };
    let opts = OdeOptions {
        tol: cfg.tol_ode,
        ..OdeOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ok = true;
    let mut out = Vec::new();
    for (id, a) in matrices {
        let n = a.order();
        let range = a.interval();
        let violations = a.validate();
        let mut check = MatrixCheck {
            id,
            order: n,
            interval: range,
            violations,
            pairs: Vec::new(),
            convergence: None,
        };
        if !check.violations.is_empty() {
            ok = false;
            out.push(check);
            continue;
        }
        let bound = cfg.tol_quad * (range.1 - range.0);
        for p in 0..pairs {
            let mut init = || -> Vec<Complex64> {
                (0..n)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            };
            let (fi, gi) = (init(), init());
            let lf = rng.random_range(-2.0..2.0);
            let lg = rng.random_range(-2.0..2.0);
            let f = QuasiFunction::new(
                fi,
                QuasiRhs {
                    lambda: Complex64::new(lf, 0.0),
                    forcing: Some(&forcing),
                },
            );
            let g = QuasiFunction::new(gi, QuasiRhs::eigen(lg));
            let res = lagrange_residual(&a, &f, &g, range, panels, opts)?;
            let pass = res.residual < bound;
            ok &= pass;
            check.pairs.push(PairCheck {
                check: res,
                bound,
                pass,
            });
            if p == 0 {
                check.convergence = Some(convergence_order(&a, &f, &g, range, &FIT_PANELS, opts)?);
            }
        }
        out.push(check);
    }
    let report = LagrangeReport {
        ok,
        panels,
        tol_quad: cfg.tol_quad,
        tol_ode: cfg.tol_ode,
        matrices: out,
    };
    emit_report(cfg, input, report)?;
    Ok(if ok { 0 } else { EXIT_VALIDATION })
}
