//! Machine-checkable analysis reports.
//!
//! Every verdict carries the data needed to re-derive it without a search:
//! symmetry generators, effect witnesses for distinguishable pairs, Farkas
//! certificates for the others, and the inner-product matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bits::{bit_symmetry_verdict, DistinguishablePair, PairProgram};
use crate::catalog::AnySpace;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{farkas_certifies, LpStatus};
use crate::scalar::Scalar;
use crate::selfdual::{
    check_statements, duality_under, invariant_inner_product, verify_self_dual, DualityViolation,
    StatementsReport,
};
use crate::space::{Effect, StateSpace};
use crate::symmetry::{automorphism_group, vertex_orbits};
use crate::tensor::{
    chsh_max, chsh_max_lp, max_tensor_with, theorem2_by_search, theorem2_check, ChshSetup,
    SpacePair, TensorSpace,
};

pub const SCHEMA: u32 = 1;

fn vec_json<S: Scalar>(v: &[S]) -> Vec<Value> {
    v.iter().map(Scalar::to_json).collect()
}

fn matrix_json<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<Value>> {
    m.to_rows().iter().map(|r| vec_json(r)).collect()
}

fn vec_from<S: Scalar>(v: &[Value], what: &str) -> Result<Vec<S>> {
    v.iter()
        .enumerate()
        .map(|(k, x)| {
            S::from_json(x).map_err(|message| Error::Parse {
                location: format!("{what}[{k}]"),
                message,
            })
        })
        .collect()
}

fn matrix_from<S: Scalar>(rows: &[Vec<Value>], what: &str) -> Result<Matrix<S>> {
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vec_from(r, &format!("{what}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(&rows))
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCert {
    pub perm: Vec<usize>,
    pub matrix: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCert {
    pub i: usize,
    pub j: usize,
    pub witness: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatementsCert {
    pub advisory: bool,
    pub c_negative: bool,
    pub overlaps_in_range: bool,
    pub overlap_c_distinguishable: bool,
    pub distinguishable_overlap_c: bool,
    pub unit_norm_on_pure: bool,
    pub orthogonal_on_distinguishable: bool,
    pub nonnegative_on_states: bool,
    pub invariant: bool,
    pub positive_definite: bool,
    pub failures: Vec<String>,
}

impl From<StatementsReport> for StatementsCert {
    fn from(r: StatementsReport) -> Self {
        Self {
            advisory: r.advisory,
            c_negative: r.c_negative,
            overlaps_in_range: r.overlaps_in_range,
            overlap_c_distinguishable: r.overlap_c_distinguishable,
            distinguishable_overlap_c: r.distinguishable_overlap_c,
            unit_norm_on_pure: r.unit_norm_on_pure,
            orthogonal_on_distinguishable: r.orthogonal_on_distinguishable,
            nonnegative_on_states: r.nonnegative_on_states,
            invariant: r.invariant,
            positive_definite: r.positive_definite,
            failures: r.failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ViolationCert {
    /// `form⁻¹ effect` violates `facet`.
    #[serde(rename_all = "camelCase")]
    EffectOutsideStates {
        effect: Vec<Value>,
        representative: Vec<Value>,
        violated_facet: Vec<Value>,
    },
    /// `form · v_vertex` is negative on `v_negativeOn`.
    #[serde(rename_all = "camelCase")]
    StateOutsideEffects { vertex: usize, negative_on: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelfDualityCert {
    pub c: Value,
    pub lambda: Value,
    pub form: Vec<Vec<Value>>,
    pub unique_up_to_scale: bool,
    /// Effect ray `k` maps to vertex `matching[k]`.
    pub matching: Option<Vec<usize>>,
    pub violation: Option<ViolationCert>,
    pub statements: StatementsCert,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub schema: u32,
    pub space: String,
    pub dimension: usize,
    pub vertex_count: usize,
    pub backend: String,
    pub group_order: u64,
    pub transitive: bool,
    pub bit_symmetric: bool,
    pub orbit_count: usize,
    /// `None` when the inner product does not exist (not transitive, degenerate).
    pub self_dual: Option<bool>,
    pub c: Option<Value>,
    pub lambda: Option<Value>,
    pub degenerate: bool,
    pub notes: Vec<String>,
    pub generators: Vec<GeneratorCert>,
    pub vertex_orbits: Vec<Vec<usize>>,
    pub pair_orbits: Vec<Vec<(usize, usize)>>,
    pub distinguishable: Vec<PairCert>,
    /// Farkas certificates, for the vertex-pair program, of ordered pairs
    /// that are not distinguishable.
    pub indistinguishable: Vec<PairCert>,
    pub self_duality: Option<SelfDualityCert>,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Full pipeline on one space.
pub fn analyze<S: Scalar>(space: &StateSpace<S>) -> Result<AnalysisReport> {
    let mut timings = BTreeMap::new();
    let mut notes = Vec::new();

    let t = Instant::now();
    let group = automorphism_group(space)?;
    timings.insert("symmetry".into(), millis(t));

    let t = Instant::now();
    let n = space.vertices().len();
    let ordered: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let solved = ordered
        .par_iter()
        .map(|&(i, j)| {
            let program = PairProgram::new(space, i, j)?;
            let res = program.lp.solve()?;
            Ok((
                i,
                j,
                res.status,
                res.witness.map(|x| program.effect(&x)),
                res.farkas,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    let mut indistinguishable = Vec::new();
    for (i, j, status, witness, farkas) in solved {
        match (status, witness, farkas) {
            (LpStatus::Feasible, Some(witness), _) => {
                pairs.push(DistinguishablePair { i, j, witness })
            }
            (LpStatus::Infeasible, _, Some(y)) => indistinguishable.push(PairCert {
                i,
                j,
                witness: vec_json(&y),
            }),
            (status, ..) => {
                return Err(Error::Degenerate(format!(
                    "pair ({i},{j}) program ended {status:?}"
                )));
            }
        }
    }
    let verdict = bit_symmetry_verdict(space, &group, &pairs)?;
    timings.insert("bit_symmetry".into(), millis(t));

    let t = Instant::now();
    let self_duality = match invariant_inner_product(space, &group) {
        Ok(form) => {
            let cert = verify_self_dual(space, &form)?;
            let statements =
                check_statements(space, &group, &form, &pairs, verdict.is_bit_symmetric);
            if statements.advisory {
                notes.push("space is not bit-symmetric; statement checks are advisory".into());
            }
            if !form.unique_up_to_scale {
                notes.push("invariant product on the Bloch space is not unique up to scale".into());
            }
            Some(SelfDualityCert {
                c: form.c.to_json(),
                lambda: form.lambda.to_json(),
                form: matrix_json(&form.full_form),
                unique_up_to_scale: form.unique_up_to_scale,
                matching: cert.matching,
                violation: cert.witness.map(|w| match w {
                    DualityViolation::EffectOutsideStates {
                        effect,
                        representative,
                        violated_facet,
                    } => ViolationCert::EffectOutsideStates {
                        effect: vec_json(&effect),
                        representative: vec_json(&representative),
                        violated_facet: vec_json(&violated_facet),
                    },
                    DualityViolation::StateOutsideEffects {
                        vertex,
                        negative_on,
                        ..
                    } => ViolationCert::StateOutsideEffects {
                        vertex,
                        negative_on,
                    },
                }),
                statements: statements.into(),
            })
        }
        Err(e @ (Error::NotTransitive | Error::Degenerate(_))) => {
            notes.push(format!("no invariant inner product: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    timings.insert("self_duality".into(), millis(t));

    Ok(AnalysisReport {
        schema: SCHEMA,
        space: space.name().to_string(),
        dimension: space.dimension(),
        vertex_count: n,
        backend: space.arithmetic().to_string(),
        group_order: u64::try_from(group.order()).unwrap_or(u64::MAX),
        transitive: verdict.transitive_on_pure_states,
        bit_symmetric: verdict.is_bit_symmetric,
        orbit_count: verdict.orbit_count,
        self_dual: self_duality.as_ref().map(|s| s.violation.is_none()),
        c: self_duality.as_ref().map(|s| s.c.clone()),
        lambda: self_duality.as_ref().map(|s| s.lambda.clone()),
        degenerate: verdict.degenerate,
        notes,
        generators: group
            .generators()
            .iter()
            .map(|g| GeneratorCert {
                perm: g.perm.clone(),
                matrix: matrix_json(&g.matrix),
            })
            .collect(),
        vertex_orbits: vertex_orbits(&group),
        pair_orbits: verdict.orbits,
        distinguishable: pairs
            .iter()
            .map(|p| PairCert {
                i: p.i,
                j: p.j,
                witness: vec_json(&p.witness.0),
            })
            .collect(),
        indistinguishable,
        self_duality,
        timings_ms: timings,
    })
}

pub fn analyze_any(space: &AnySpace) -> Result<AnalysisReport> {
    crate::with_space!(space, s => analyze(s))
}

/// Orbits of a permutation action generated by `gens` on `items`.
fn perm_orbits<T: Ord + Clone>(
    items: &[T],
    gens: &[Vec<usize>],
    act: impl Fn(&[usize], &T) -> T,
) -> Option<usize> {
    let index: BTreeMap<T, usize> = items
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, t)| (t, k))
        .collect();
    let mut owner = vec![usize::MAX; items.len()];
    let mut count = 0;
    for start in 0..items.len() {
        if owner[start] != usize::MAX {
            continue;
        }
        owner[start] = count;
        let mut stack = vec![start];
        while let Some(k) = stack.pop() {
            for g in gens {
                let j = *index.get(&act(g, &items[k]))?;
                if owner[j] == usize::MAX {
                    owner[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    Some(count)
}

/// Re-derives every verdict of `report` from its certificates.
/// Returns the list of discrepancies; empty means the report checks out.
pub fn recheck<S: Scalar>(report: &AnalysisReport, space: &StateSpace<S>) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let n = space.vertices().len();
    if report.schema != SCHEMA {
        bad.push(format!("schema {} is not {SCHEMA}", report.schema));
    }
    if report.vertex_count != n || report.dimension != space.dimension() {
        bad.push("report describes a different space".into());
        return Ok(bad);
    }

    let mut gens = Vec::new();
    for (k, g) in report.generators.iter().enumerate() {
        let sym = crate::symmetry::LinearSymmetry {
            matrix: matrix_from::<S>(&g.matrix, &format!("generators[{k}].matrix"))?,
            perm: g.perm.clone(),
        };
        if !sym.verify(space) {
            bad.push(format!("generator {k} is not a symmetry"));
        }
        gens.push(sym);
    }
    if bad.is_empty() {
        // Only the order of the generated group is checked; maximality would need the search.
        let order = crate::symmetry::SymmetryGroup::from_generators(space, gens.clone())?.order();
        if order != u128::from(report.group_order) {
            bad.push(format!("generators give a group of order {order}"));
        }
    }
    let perms: Vec<Vec<usize>> = gens.iter().map(|g| g.perm.clone()).collect();
    let vertices: Vec<usize> = (0..n).collect();
    let transitive = perm_orbits(&vertices, &perms, |g, &i| g[i]).is_some_and(|c| c <= 1);
    if transitive != report.transitive {
        bad.push("transitivity does not follow from the generators".into());
    }

    let mut listed = vec![vec![false; n]; n];
    for p in &report.distinguishable {
        let w = Effect(vec_from::<S>(&p.witness, "witness")?);
        let pair = DistinguishablePair {
            i: p.i,
            j: p.j,
            witness: w,
        };
        if !pair.verify(space) {
            bad.push(format!("witness for ({}, {}) fails", p.i, p.j));
        }
        listed[p.i][p.j] = true;
    }
    for p in &report.indistinguishable {
        let y = vec_from::<S>(&p.witness, "farkas")?;
        let program = PairProgram::new(space, p.i, p.j)?;
        if !farkas_certifies(&program.lp, &y) {
            bad.push(format!("Farkas certificate for ({}, {}) fails", p.i, p.j));
        }
        listed[p.i][p.j] = true;
    }
    for (i, row) in listed.iter().enumerate() {
        for (j, &seen) in row.iter().enumerate() {
            if i != j && !seen {
                bad.push(format!("pair ({i}, {j}) has no certificate"));
            }
        }
    }
    let keys: Vec<(usize, usize)> = report.distinguishable.iter().map(|p| (p.i, p.j)).collect();
    match perm_orbits(&keys, &perms, |g, &(i, j)| (g[i], g[j])) {
        Some(c) if c == report.orbit_count && (c <= 1) == report.bit_symmetric => {}
        Some(c) => bad.push(format!("generators give {c} pair orbits")),
        None => bad.push("generators do not preserve distinguishable pairs".into()),
    }

    match (&report.self_duality, report.self_dual) {
        (None, None) => {}
        (Some(sd), Some(claimed)) => {
            let form = matrix_from::<S>(&sd.form, "form")?;
            if !form.is_symmetric() {
                bad.push("form is not symmetric".into());
            }
            for (k, g) in gens.iter().enumerate() {
                if !g
                    .matrix
                    .transpose()
                    .mul(&form)
                    .mul(&g.matrix)
                    .approx_eq(&form)
                {
                    bad.push(format!("form is not invariant under generator {k}"));
                }
            }
            let (_, violation) = duality_under(space, &form)?;
            if violation.is_none() != claimed {
                bad.push("self-duality verdict does not follow from the form".into());
            }
            let c = S::from_json(&sd.c).map_err(|message| Error::Parse {
                location: "c".into(),
                message,
            })?;
            let lambda = S::from_json(&sd.lambda).map_err(|message| Error::Parse {
                location: "lambda".into(),
                message,
            })?;
            if !lambda.approx_eq(&(-c.clone() / (S::one() - c))) {
                bad.push("lambda != -c / (1 - c)".into());
            }
            // For unit-norm pure states, overlap c is the same as <v, w> = 0.
            let mut min = S::one();
            for v in space.vertices() {
                let fv = form.mul_vec(v);
                for w in space.vertices() {
                    let x = crate::scalar::dot(&fv, w);
                    if x < min {
                        min = x;
                    }
                }
            }
            if !min.is_negligible() {
                bad.push("minimal product of pure states is not 0".into());
            }
            let iii = report.distinguishable.iter().all(|p| {
                form.bilinear(&space.vertices()[p.i], &space.vertices()[p.j])
                    .is_negligible()
            });
            let ii = report.indistinguishable.iter().all(|p| {
                !form
                    .bilinear(&space.vertices()[p.i], &space.vertices()[p.j])
                    .is_negligible()
            });
            if iii != sd.statements.distinguishable_overlap_c
                || ii != sd.statements.overlap_c_distinguishable
            {
                bad.push("statement verdicts do not follow from the form".into());
            }
        }
        _ => bad.push("self-duality section and verdict disagree".into()),
    }
    Ok(bad)
}

pub fn recheck_any(report: &AnalysisReport, space: &AnySpace) -> Result<Vec<String>> {
    crate::with_space!(space, s => recheck(report, s))
}

fn show(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "space:         {}", r.space);
    let _ = writeln!(out, "dimension:     {}", r.dimension);
    let _ = writeln!(out, "vertices:      {}", r.vertex_count);
    let _ = writeln!(out, "backend:       {}", r.backend);
    let _ = writeln!(out, "group order:   {}", r.group_order);
    let _ = writeln!(out, "transitive:    {}", yes(r.transitive));
    let _ = writeln!(out, "bitSymmetric:  {}", yes(r.bit_symmetric));
    let _ = writeln!(out, "orbitCount:    {}", r.orbit_count);
    let _ = writeln!(out, "selfDual:      {}", r.self_dual.map_or("n/a", yes));
    let _ = writeln!(
        out,
        "c:             {}",
        r.c.as_ref().map_or("n/a".into(), show)
    );
    let _ = writeln!(
        out,
        "lambda:        {}",
        r.lambda.as_ref().map_or("n/a".into(), show)
    );
    if let Some(sd) = &r.self_duality {
        let s = &sd.statements;
        let _ = writeln!(out, "overlaps in [c, 1]:           {}", yes(s.overlaps_in_range));
        let _ = writeln!(out, "overlap c => distinguishable: {}", yes(s.overlap_c_distinguishable));
        let _ = writeln!(out, "distinguishable => overlap c: {}", yes(s.distinguishable_overlap_c));
        let _ = writeln!(out, "advisory only:                {}", yes(s.advisory));
        match &sd.violation {
            Some(ViolationCert::EffectOutsideStates {
                effect,
                representative,
                ..
            }) => {
                let _ = writeln!(
                    out,
                    "witness: effect ray [{}] maps to [{}], outside the state cone",
                    effect.iter().map(show).collect::<Vec<_>>().join(", "),
                    representative
                        .iter()
                        .map(show)
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            Some(ViolationCert::StateOutsideEffects {
                vertex,
                negative_on,
            }) => {
                let _ = writeln!(out, "witness: <v{vertex}, v{negative_on}> < 0");
            }
            None => {}
        }
    }
    for (k, orbit) in r.pair_orbits.iter().enumerate() {
        let pairs: Vec<String> = orbit.iter().map(|(i, j)| format!("({i},{j})")).collect();
        let _ = writeln!(out, "pair orbit {k}: {}", pairs.join(" "));
    }
    for note in &r.notes {
        let _ = writeln!(out, "note: {note}");
    }
    for (stage, ms) in &r.timings_ms {
        let _ = writeln!(out, "time {stage}: {ms:.1} ms");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChshCert {
    pub max: Value,
    pub argmax: usize,
    pub argmax_entangled: bool,
    pub lp_max: Value,
    pub covector: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem2Cert {
    pub verdict: String,
    pub composite_bit_symmetric: Option<bool>,
    pub orbit_count: Option<usize>,
    /// Entangled vertex found by LP search when the composite was not enumerated.
    pub entangled_witness: Option<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TensorReport {
    pub schema: u32,
    pub factors: (String, String),
    pub backend: String,
    pub dimension: usize,
    /// `None` when the vertex enumeration exceeded the ray limit.
    pub vertex_count: Option<usize>,
    pub product: Option<usize>,
    pub entangled: Option<usize>,
    /// Per vertex `"product"` or `"entangled"`, with `--classify`.
    pub classes: Option<Vec<String>>,
    pub chsh: Option<ChshCert>,
    pub theorem2: Option<Theorem2Cert>,
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct TensorOptions<S> {
    pub budget: usize,
    pub ray_limit: usize,
    pub vertex_limit: usize,
    pub classify: bool,
    pub chsh: bool,
    pub theorem2: bool,
    /// Replaces the fiducial measurements.
    pub setup: Option<ChshSetup<S>>,
}

impl<S> TensorOptions<S> {
    fn retyped<T>(&self, setup: Option<ChshSetup<T>>) -> TensorOptions<T> {
        TensorOptions {
            budget: self.budget,
            ray_limit: self.ray_limit,
            vertex_limit: self.vertex_limit,
            classify: self.classify,
            chsh: self.chsh,
            theorem2: self.theorem2,
            setup,
        }
    }
}

/// Builds the maximal tensor product and the requested analyses.
///
/// If only the entanglement check is requested and enumeration exceeds the ray
/// limit, the verdict comes from an LP search for an entangled vertex.
pub fn tensor_report<S: Scalar>(
    a: &StateSpace<S>,
    b: &StateSpace<S>,
    opts: &TensorOptions<S>,
) -> Result<TensorReport> {
    let mut timings = BTreeMap::new();
    let t = Instant::now();
    let tensor: Option<TensorSpace<S>> = match max_tensor_with(a, b, opts.budget, opts.ray_limit) {
        Ok(t) => Some(t),
        Err(Error::BudgetExceeded(_))
            if opts.theorem2
                && !opts.classify
                && !opts.chsh
                && a.dimension() * b.dimension() <= opts.budget =>
        {
            None
        }
        Err(e) => return Err(e),
    };
    timings.insert("max_tensor".into(), millis(t));

    let Some(tensor) = tensor else {
        let t = Instant::now();
        let r = theorem2_by_search(a, b, opts.budget, opts.vertex_limit)?;
        timings.insert("theorem2".into(), millis(t));
        return Ok(TensorReport {
            schema: SCHEMA,
            factors: (a.name().to_string(), b.name().to_string()),
            backend: S::ARITHMETIC.to_string(),
            dimension: a.dimension() * b.dimension(),
            vertex_count: None,
            product: None,
            entangled: None,
            classes: None,
            chsh: None,
            theorem2: Some(Theorem2Cert {
                verdict: r.verdict.label().to_string(),
                composite_bit_symmetric: None,
                orbit_count: None,
                entangled_witness: r.witness.as_deref().map(vec_json),
            }),
            timings_ms: timings,
        });
    };

    let chsh = if opts.chsh {
        let t = Instant::now();
        let setup = match &opts.setup {
            Some(s) => s.clone(),
            None => ChshSetup::fiducial(&tensor)?,
        };
        let (max, argmax) = chsh_max(&tensor, &setup)?;
        let lp_max = chsh_max_lp(&tensor, &setup)?;
        timings.insert("chsh".into(), millis(t));
        Some(ChshCert {
            max: max.to_json(),
            argmax,
            argmax_entangled: !tensor.classes[argmax].is_product(),
            lp_max: lp_max.to_json(),
            covector: vec_json(&setup.covector(&tensor)),
        })
    } else {
        None
    };
    let theorem2 = if opts.theorem2 {
        let t = Instant::now();
        let r = theorem2_check(&tensor, opts.vertex_limit)?;
        timings.insert("theorem2".into(), millis(t));
        Some(Theorem2Cert {
            verdict: r.verdict.label().to_string(),
            composite_bit_symmetric: r.composite_bit_symmetric,
            orbit_count: r.orbit_count,
            entangled_witness: None,
        })
    } else {
        None
    };
    Ok(TensorReport {
        schema: SCHEMA,
        factors: (a.name().to_string(), b.name().to_string()),
        backend: S::ARITHMETIC.to_string(),
        dimension: tensor.composite.dimension(),
        vertex_count: Some(tensor.composite.vertices().len()),
        product: Some(tensor.product_count()),
        entangled: Some(tensor.entangled_count()),
        classes: opts.classify.then(|| {
            tensor
                .classes
                .iter()
                .map(|c| {
                    if c.is_product() {
                        "product"
                    } else {
                        "entangled"
                    }
                    .to_string()
                })
                .collect()
        }),
        chsh,
        theorem2,
        timings_ms: timings,
    })
}

/// Tensor report for factors in any backends; mixed pairs run in floating point.
pub fn tensor_report_any(
    a: &AnySpace,
    b: &AnySpace,
    opts: &TensorOptions<f64>,
    setup_exact: Option<ChshSetup<crate::scalar::Rational>>,
) -> Result<TensorReport> {
    match SpacePair::new(a, b)? {
        SpacePair::Exact(a, b) => tensor_report(&a, &b, &opts.retyped(setup_exact)),
        SpacePair::Float(a, b) => tensor_report(&a, &b, opts),
    }
}

pub fn render_tensor_text(r: &TensorReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "composite:     {} ⊗max {}", r.factors.0, r.factors.1);
    let _ = writeln!(out, "backend:       {}", r.backend);
    let _ = writeln!(out, "dimension:     {}", r.dimension);
    match (r.vertex_count, r.product, r.entangled) {
        (Some(v), Some(p), Some(e)) => {
            let _ = writeln!(out, "vertices:      {v}");
            let _ = writeln!(out, "product:       {p}");
            let _ = writeln!(out, "entangled:     {e}");
        }
        _ => {
            let _ = writeln!(out, "vertices:      not enumerated (ray limit)");
        }
    }
    if let Some(classes) = &r.classes {
        for (k, c) in classes.iter().enumerate() {
            let _ = writeln!(out, "vertex {k}: {c}");
        }
    }
    if let Some(c) = &r.chsh {
        let _ = writeln!(out, "CHSH max:      {}", show(&c.max));
        let _ = writeln!(
            out,
            "CHSH argmax:   vertex {} ({})",
            c.argmax,
            if c.argmax_entangled {
                "entangled"
            } else {
                "product"
            }
        );
        let _ = writeln!(out, "CHSH max (LP): {}", show(&c.lp_max));
    }
    if let Some(t) = &r.theorem2 {
        let _ = writeln!(out, "entanglement:  {}", t.verdict);
        let direct = match t.composite_bit_symmetric {
            Some(b) => format!("composite bitSymmetric = {}", yes(b)),
            None => "direct check skipped (vertex limit)".into(),
        };
        let _ = writeln!(out, "direct check:  {direct}");
        if let Some(w) = &t.entangled_witness {
            let _ = writeln!(
                out,
                "entangled vertex: [{}]",
                w.iter().map(show).collect::<Vec<_>>().join(", ")
            );
        }
    }
    for (stage, ms) in &r.timings_ms {
        let _ = writeln!(out, "time {stage}: {ms:.1} ms");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishReport {
    pub schema: u32,
    pub space: String,
    pub i: usize,
    pub j: usize,
    pub distinguishable: bool,
    pub witness: Option<Vec<Value>>,
}

pub fn distinguish_report<S: Scalar>(
    space: &StateSpace<S>,
    i: usize,
    j: usize,
) -> Result<DistinguishReport> {
    let w = crate::bits::pair_witness(space, i, j)?;
    Ok(DistinguishReport {
        schema: SCHEMA,
        space: space.name().to_string(),
        i,
        j,
        distinguishable: w.is_some(),
        witness: w.map(|e| vec_json(&e.0)),
    })
}

pub fn render_distinguish_text(r: &DistinguishReport) -> String {
    match &r.witness {
        Some(w) => format!(
            "v{} and v{} are perfectly distinguishable\nwitness effect: [{}]\n",
            r.i,
            r.j,
            w.iter().map(show).collect::<Vec<_>>().join(", ")
        ),
        None => format!("v{} and v{}: not distinguishable\n", r.i, r.j),
    }
}
