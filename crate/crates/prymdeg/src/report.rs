//! The full analysis of one input file as a serializable report.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::decomposition::{DELAUNAY_RANK_CAP, SEMI_DELAUNAY_RANK_CAP};
use crate::cells::{CellError, DicingVerdict, PeriodicDecomposition};
use crate::conditions::{
    induced_height, jacobian_decomposition, middle_prym_condition, minus_delaunay, pp_delaunay,
    prym_dicing_condition, sliced_decomposition, sliced_equals_twice, EdgeRestriction, MiddlePrymVerdict,
};
use crate::curve::{parse_curve, CurveError, CurveSpec, CurveWithInvolution, NodeClass, QuotientGraph};
use crate::fans::{an_singularities, as_refined, build_family_fan, minimal_resolution, AnSingularity, DegenerationFan, RefinedFan};
use crate::forms::{check_invariant_weights, minus_form, principal_form, restrict_form, FormError, QuadraticForm};
use crate::lattice::{BlockProfile, IntegerLattice, InvolutionLattices, LatticeError, YMinus};
use crate::linalg::{IMat, Int, Rat};
use crate::prym::{
    cell_map_analysis, dagger_check, fixed_part_analysis, generic_injectivity_check, maximal_half_shift,
    prym_map_verdict, CellMapReport, FixedPartAnalysis, PolarizationSummary, PrymError, PrymVerdict, CELL_POINT_CAP,
    WEIGHT_SEARCH_CAP,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "prymdeg";

/// Window for fans of rank one heights.
const FAN_WINDOW: Int = 12;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Weights(#[from] FormError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl AnalysisError {
    /// Every error here means the input was rejected.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Node weights in input order; all ones when absent.
    pub alpha: Option<Vec<Int>>,
    /// Largest weight tried when looking for two weightings with different `Delta^-`.
    pub max_weight: Int,
    /// Degrees checked when comparing cells with the Jacobian.
    pub degree_bound: u32,
    pub shift_seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { alpha: None, max_weight: 3, degree_bound: 2, shift_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedNode {
    pub id: String,
    pub class: NodeClass,
    pub tail: String,
    pub head: String,
    /// `iota_1(e) = sign * image`.
    pub image: String,
    pub sign: i8,
    /// The orientation differs from the one in the input.
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationSection {
    pub nodes: Vec<OrientedNode>,
    pub quotient: QuotientGraph,
    pub quotient_genus: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub x: IntegerLattice,
    pub x_plus: IntegerLattice,
    pub x_minus_eigen: IntegerLattice,
    pub x_minus: IntegerLattice,
    /// Involution on the cycle basis of `x`, acting on rows.
    pub iota_x: IMat,
    pub profile: BlockProfile,
    pub cokernel_torsion: Vec<Int>,
    pub y_minus: YMinus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormsSection {
    pub alpha: Vec<Int>,
    pub b: QuadraticForm,
    pub b_minus: QuadraticForm,
    /// `[B/2]^-` transported to `X^-`; absent when `Y^-` is unknown.
    pub principal: Option<QuadraticForm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub rank: usize,
    pub period: IMat,
    /// Face orbits by dimension.
    pub census: Vec<usize>,
    pub maximal_cells: usize,
    /// Same count modulo `2X^-`, for decompositions periodic under `X^-`.
    pub maximal_cells_mod_twice: Option<usize>,
    /// Vertex sets of maximal cells, canonical modulo the period, sorted.
    pub cells: Vec<Vec<Vec<Int>>>,
}

// externally tagged: internally tagged enums are buffered and lose i128
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decomposition {
    Computed(DecompositionSummary),
    Unavailable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionsSection {
    /// The arrangement of the `z_j` on `X`.
    pub jacobian: Decomposition,
    /// Delaunay decomposition of `X^-` for `B^-`.
    pub minus: Decomposition,
    /// Slice of the Jacobian decomposition, periodic under `[X]^-`.
    pub sliced: Decomposition,
    /// Delaunay decomposition for the principal form.
    pub principal: Decomposition,
    /// The slice equals twice the principal decomposition as cell sets.
    pub sliced_equals_twice_principal: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsSection {
    pub restrictions: Vec<EdgeRestriction>,
    #[serde(with = "crate::qser::vec")]
    pub multipliers: Vec<Rat>,
    pub prym_dicing: Option<DicingVerdict>,
    pub middle_prym: Option<MiddlePrymVerdict>,
    pub unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section<T> {
    Computed { value: T },
    NotApplicable { reason: String },
    Unavailable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanEntry {
    pub fan: DegenerationFan,
    pub singularities: Vec<AnSingularity>,
    pub resolution: RefinedFan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub delaunay_rank: usize,
    pub semi_delaunay_rank: usize,
    pub weight_search: usize,
    pub cell_points: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub options: AnalysisOptions,
    pub caps: Caps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: CurveSpec,
    pub classification: ClassificationSection,
    pub lattice: LatticeSection,
    pub forms: FormsSection,
    pub decompositions: DecompositionsSection,
    pub conditions: ConditionsSection,
    pub verdict: Section<PrymVerdict>,
    pub fixed_part: FixedPartAnalysis,
    pub polarization: PolarizationSummary,
    pub half_shift: Section<Vec<Int>>,
    pub generic_injectivity: bool,
    pub cell_map: Section<Vec<CellMapReport>>,
    /// Fan of the height induced on a rank one `X^-`.
    pub fan: Option<Section<FanEntry>>,
    /// Some step was skipped because a rank cap was exceeded.
    pub rank_cap_exceeded: bool,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        if self.rank_cap_exceeded {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn summarize(d: &PeriodicDecomposition, twice: bool) -> DecompositionSummary {
    let r = d.rank;
    let two: IMat = (0..r).map(|i| (0..r).map(|j| if i == j { 2 } else { 0 }).collect()).collect();
    DecompositionSummary {
        rank: r,
        period: d.period.clone(),
        census: d.census(),
        maximal_cells: d.maximal_cell_count(),
        maximal_cells_mod_twice: twice.then(|| d.vertex_keys_mod(&two).len()),
        cells: d.vertex_keys().into_iter().collect(),
    }
}

/// Tracks whether any step hit a rank cap.
#[derive(Default)]
struct CapTracker {
    hit: bool,
}

impl CapTracker {
    fn note(&mut self, e: &CellError) -> String {
        if matches!(e, CellError::RankTooLarge { .. }) {
            self.hit = true;
        }
        e.to_string()
    }

    fn note_prym(&mut self, e: &PrymError) -> String {
        if let PrymError::Cells(c) = e {
            return self.note(c);
        }
        e.to_string()
    }

    fn decomposition(&mut self, r: Result<PeriodicDecomposition, CellError>, twice: bool) -> (Decomposition, Option<PeriodicDecomposition>) {
        match r {
            Ok(d) => (Decomposition::Computed(summarize(&d, twice)), Some(d)),
            Err(e) => (Decomposition::Unavailable { reason: self.note(&e) }, None),
        }
    }
}

fn classification_section(c: &CurveWithInvolution) -> ClassificationSection {
    let cl = c.classification();
    let comp = |i: usize| c.spec.components[i].id.clone();
    let nodes = c
        .spec
        .nodes
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let (t, h) = cl.orientation[j];
            OrientedNode {
                id: n.id.clone(),
                class: cl.node_class[j],
                tail: comp(t),
                head: comp(h),
                image: c.spec.nodes[cl.edge_map[j]].id.clone(),
                sign: cl.edge_sign[j],
                reversed: n.tail != comp(t),
            }
        })
        .collect();
    ClassificationSection { nodes, quotient: c.quotient_graph(), quotient_genus: cl.quotient_genus.clone() }
}

fn fan_section(lat: &InvolutionLattices, alpha: &[Int]) -> Option<Section<FanEntry>> {
    if lat.x_minus.rank() != 1 {
        return None;
    }
    let h = induced_height(lat, alpha);
    Some(match build_family_fan(&h, FAN_WINDOW) {
        Ok(fan) => {
            let singularities = an_singularities(&fan);
            let resolution = minimal_resolution(&as_refined(&fan));
            Section::Computed { value: FanEntry { fan, singularities, resolution } }
        }
        Err(e) => Section::Unavailable { reason: e.to_string() },
    })
}

/// Runs the whole pipeline on a parsed curve.
pub fn analyze_curve(curve: CurveWithInvolution, options: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let c = curve.validate_and_classify()?;
    let n = c.num_nodes();
    let alpha = options.alpha.clone().unwrap_or_else(|| vec![1; n]);
    check_invariant_weights(&c, &alpha)?;
    let lat = InvolutionLattices::compute(&c)?;
    let ym = crate::lattice::y_minus_lattice(&c, &lat);
    let mut caps = CapTracker::default();

    let lattice = LatticeSection {
        x: lat.x.clone(),
        x_plus: lat.x_plus.clone(),
        x_minus_eigen: lat.x_minus_eigen.clone(),
        x_minus: lat.x_minus.clone(),
        iota_x: lat.involution.iota_x.clone(),
        profile: lat.profile,
        cokernel_torsion: lat.cokernel_torsion.clone(),
        y_minus: ym.clone(),
    };
    let forms = FormsSection {
        alpha: alpha.clone(),
        b: restrict_form(&alpha, &lat.x),
        b_minus: minus_form(&lat, &alpha),
        principal: principal_form(&lat, &ym, &alpha),
    };

    let (jacobian, _) = caps.decomposition(jacobian_decomposition(&lat), false);
    let (minus, _) = caps.decomposition(minus_delaunay(&lat, &alpha), true);
    let (sliced, sliced_d) = caps.decomposition(sliced_decomposition(&lat), false);
    let (principal, principal_d) = match pp_delaunay(&lat, &ym, &alpha) {
        Some(r) => caps.decomposition(r, true),
        None => (Decomposition::Unavailable { reason: "Y^- is not determined".into() }, None),
    };
    let sliced_equals_twice_principal = match (&sliced_d, &principal_d) {
        (Some(s), Some(p)) => Some(sliced_equals_twice(s, p)),
        _ => None,
    };

    let conditions = match prym_dicing_condition(&lat) {
        Ok(pd) => {
            let middle = middle_prym_condition(&c, &lat, &ym);
            let unavailable = middle.as_ref().err().map(|e| caps.note(e));
            ConditionsSection {
                restrictions: pd.restrictions,
                multipliers: pd.multipliers,
                prym_dicing: Some(pd.verdict),
                middle_prym: middle.ok(),
                unavailable,
            }
        }
        Err(e) => ConditionsSection {
            restrictions: Vec::new(),
            multipliers: Vec::new(),
            prym_dicing: None,
            middle_prym: None,
            unavailable: Some(caps.note(&e)),
        },
    };

    let verdict = match prym_map_verdict(&c, &lat, &ym, options.max_weight) {
        Ok(v) => Section::Computed { value: v },
        Err(e) => Section::Unavailable { reason: caps.note_prym(&e) },
    };
    let fixed_part = fixed_part_analysis(&c);
    let polarization = dagger_check(&c, &fixed_part);

    let (half_shift, cell_map) = match maximal_half_shift(&c, options.shift_seed) {
        Ok(v) => {
            let cm = match cell_map_analysis(&c, &lat, &v, options.degree_bound) {
                Ok(r) => Section::Computed { value: r },
                Err(e) => Section::Unavailable { reason: caps.note_prym(&e) },
            };
            (Section::Computed { value: v.doubled }, cm)
        }
        Err(e) => {
            let reason = e.to_string();
            (Section::NotApplicable { reason: reason.clone() }, Section::NotApplicable { reason })
        }
    };

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        input: c.spec.clone(),
        classification: classification_section(&c),
        generic_injectivity: generic_injectivity_check(&c, &lat),
        fan: fan_section(&lat, &alpha),
        lattice,
        forms,
        decompositions: DecompositionsSection { jacobian, minus, sliced, principal, sliced_equals_twice_principal },
        conditions,
        verdict,
        fixed_part,
        polarization,
        half_shift,
        cell_map,
        rank_cap_exceeded: caps.hit,
        provenance: Provenance {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            options: AnalysisOptions { alpha: Some(alpha), ..options.clone() },
            caps: Caps {
                delaunay_rank: DELAUNAY_RANK_CAP,
                semi_delaunay_rank: SEMI_DELAUNAY_RANK_CAP,
                weight_search: WEIGHT_SEARCH_CAP,
                cell_points: CELL_POINT_CAP,
            },
        },
    })
}

pub fn run_analysis(path: &Path, options: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AnalysisError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    analyze_curve(parse_curve(&text)?, options)
}

/// A named SVG picture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Figure {
    pub name: String,
    pub svg: String,
}

/// Pictures of every decomposition of rank at most 2 and of the rank one fan.
/// The Jacobian picture carries the line `X^-_R` when that is a line.
pub fn render_figures(curve: CurveWithInvolution, options: &AnalysisOptions) -> Result<Vec<Figure>, AnalysisError> {
    let c = curve.validate_and_classify()?;
    let alpha = options.alpha.clone().unwrap_or_else(|| vec![1; c.num_nodes()]);
    check_invariant_weights(&c, &alpha)?;
    let lat = InvolutionLattices::compute(&c)?;
    let ym = crate::lattice::y_minus_lattice(&c, &lat);
    let title = c.spec.name.clone().unwrap_or_else(|| "curve".into());
    let overlay: Option<Vec<Rat>> = (lat.x_minus.rank() == 1).then(|| {
        let twice = lat.x.coords_of(&lat.x_minus.basis[0], 1).expect("2X^- lies in X");
        twice.into_iter().map(Rat::from_integer).collect()
    });
    let mut candidates = vec![
        ("jacobian", jacobian_decomposition(&lat), overlay.as_deref()),
        ("minus", minus_delaunay(&lat, &alpha), None),
        ("sliced", sliced_decomposition(&lat), None),
    ];
    if let Some(p) = pp_delaunay(&lat, &ym, &alpha) {
        candidates.push(("principal", p, None));
    }
    let mut out = Vec::new();
    for (name, d, ov) in candidates {
        let Ok(d) = d else { continue };
        if let Ok(svg) = crate::svg::render_decomposition(&d, ov, 4, &format!("{title}: {name}")) {
            out.push(Figure { name: name.into(), svg });
        }
    }
    if let Some(Section::Computed { value }) = fan_section(&lat, &alpha) {
        out.push(Figure { name: "fan".into(), svg: crate::svg::render_fan(&value.fan, &format!("{title}: fan")) });
    }
    Ok(out)
}
