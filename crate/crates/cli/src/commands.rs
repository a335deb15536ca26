//! One function per subcommand; each returns the text to emit.

use std::collections::BTreeMap;

use mageo::characteristics::{hamiltonian, null_project, trace_bicharacteristic, BicharState, TraceOptions};
use mageo::family::{build_family, FamilySpec};
use mageo::grid::{grid3, Axis};
use mageo::metric::{classify as classify_at, ma_residual, ma_residual_poly, Signature, DEFAULT_ZERO_TOL};
use mageo::poly::parse_rational;
use mageo::sg::{wind_csv, wind_field_sweep, Branch, EpsilonChoice, Section};
use mageo::singular::{branch_csv, caustic_sweep, dpi_det, fiber_sweep, singular_locus_poly, FiberOptions, SliceGrid};
use mageo::table::{fmt_f64, Csv};
use mageo::verify::{list_criteria, run_all, VerifyOptions};
use mageo::{fold_example, GeneratingFunction};
use serde::Serialize;

use crate::config::{parse_file, Format, NullRoot, RunConfig};
use crate::error::CliError;
use crate::json::to_line;

fn gf(cfg: &RunConfig) -> Result<GeneratingFunction, CliError> {
    let rec = match (&cfg.gf, &cfg.gf_file) {
        (Some(r), _) => r.clone(),
        (None, Some(path)) => parse_file(path)?,
        (None, None) => return Ok(fold_example()),
    };
    Ok(GeneratingFunction::try_from(rec)?)
}

fn tol(cfg: &RunConfig) -> f64 {
    cfg.tol.unwrap_or(DEFAULT_ZERO_TOL)
}

fn axes3(cfg: &RunConfig) -> Result<Option<[Axis; 3]>, CliError> {
    match &cfg.grid {
        Some([a, b, c]) => Ok(Some([Axis::from_spec(a)?, Axis::from_spec(b)?, Axis::from_spec(c)?])),
        None => Ok(None),
    }
}

/// The point, or the grid nodes, requested by the config.
fn points(cfg: &RunConfig, what: &str) -> Result<(Vec<[f64; 3]>, bool), CliError> {
    match (cfg.point, axes3(cfg)?) {
        (Some(_), Some(_)) => Err(CliError::Config("give either `point` or `grid`, not both".into())),
        (Some(p), None) => Ok((vec![p], true)),
        (None, Some(axes)) => Ok((grid3(&axes), false)),
        (None, None) => Err(CliError::Config(format!("{what} needs a `point` or a `grid`"))),
    }
}

fn json_only(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Config(format!("{what} reports are JSON only")));
    }
    Ok(())
}

fn line<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(to_line(v)? + "\n")
}

#[derive(Serialize)]
struct ClassifyReport {
    point: [f64; 3],
    eigenvalues: [f64; 3],
    signature: [usize; 3],
    label: String,
}

impl ClassifyReport {
    fn new(point: [f64; 3], s: &Signature) -> Self {
        ClassifyReport {
            point,
            eigenvalues: s.eigenvalues,
            signature: [s.n_pos, s.n_neg, s.n_zero],
            label: s.label.to_string(),
        }
    }
}

pub fn classify(cfg: &RunConfig) -> Result<String, CliError> {
    let gf = gf(cfg)?;
    let (pts, single) = points(cfg, "classify")?;
    let t = tol(cfg);
    let reports: Vec<ClassifyReport> = pts.iter().map(|p| ClassifyReport::new(*p, &classify_at(&gf, p, t))).collect();
    let format = cfg.format.unwrap_or(if single { Format::Json } else { Format::Csv });
    match format {
        Format::Json if single => line(&reports[0]),
        Format::Json => line(&reports),
        Format::Csv => {
            let mut c = Csv::with_header(&["q1", "q2", "q3", "label", "n_pos", "n_neg", "n_zero", "ev1", "ev2", "ev3"]);
            for r in &reports {
                let mut row: Vec<String> = r.point.iter().map(|v| fmt_f64(*v)).collect();
                row.push(r.label.clone());
                row.extend(r.signature.iter().map(|n| n.to_string()));
                row.extend(r.eigenvalues.iter().map(|v| fmt_f64(*v)));
                c.row(row);
            }
            Ok(c.finish())
        }
    }
}

pub fn trace(cfg: &RunConfig) -> Result<String, CliError> {
    let gf = gf(cfg)?;
    let tc = cfg.trace.clone().unwrap_or_default();
    let q = tc.q.or(cfg.point).ok_or_else(|| CliError::Config("trace needs a start point `trace.q`".into()))?;
    let mut p = tc.p.ok_or_else(|| CliError::Config("trace needs a covector `trace.p`".into()))?;
    if let Some(free) = tc.null_free {
        let fixed: Vec<f64> = (0..3).filter(|&i| i != free).map(|i| p[i]).collect();
        let roots = null_project(&gf, &q, [fixed[0], fixed[1]], free)?;
        let pick = match tc.null_root.unwrap_or_default() {
            NullRoot::Min => roots.first(),
            NullRoot::Max => roots.last(),
        };
        p = *pick.ok_or_else(|| CliError::Domain(format!("no real null completion of component {free} at {q:?}")))?;
    }
    let d = TraceOptions::default();
    let opts = TraceOptions {
        step: tc.step.unwrap_or(d.step),
        max_steps: tc.max_steps.unwrap_or(d.max_steps),
        stop_tol: tc.stop_tol.or(d.stop_tol),
        domain: tc.domain.unwrap_or(d.domain),
        null_tol: tc.null_tol.unwrap_or(d.null_tol),
    };
    let start = BicharState::new(q, p);
    hamiltonian(&gf, &start)?;
    let tr = trace_bicharacteristic(&gf, start, &opts)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(tr.to_csv()),
        Format::Json => line(&tr),
    }
}

pub fn verify_list(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg, "verify-paper")?;
    #[derive(Serialize)]
    struct Item {
        id: u8,
        name: &'static str,
    }
    let items: Vec<Item> = list_criteria().into_iter().map(|(id, name)| Item { id, name }).collect();
    line(&items)
}

pub fn verify_paper(cfg: &RunConfig) -> Result<(String, Option<CliError>), CliError> {
    json_only(cfg, "verify-paper")?;
    let report = run_all(&VerifyOptions { perturb: cfg.perturb.unwrap_or(false) });
    let failed: Vec<String> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
    let failure = (!failed.is_empty()).then(|| CliError::Verification(format!("failed criteria: {}", failed.join(", "))));
    Ok((line(&report)?, failure))
}

pub fn residual(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg, "residual")?;
    let gf = gf(cfg)?;
    let r = ma_residual_poly(&gf);
    #[derive(Serialize)]
    struct Report {
        gf: mageo::chart::GfRecord,
        residual: String,
        zero: bool,
        point: Option<[f64; 3]>,
        value: Option<f64>,
    }
    line(&Report {
        gf: gf.to_record(),
        residual: r.to_string(),
        zero: r.is_zero(),
        point: cfg.point,
        value: cfg.point.map(|p| ma_residual(&gf, &p)),
    })
}

pub fn singular(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg, "singular")?;
    let gf = gf(cfg)?;
    #[derive(Serialize)]
    struct Report {
        locus: String,
        point: Option<[f64; 3]>,
        det_dpi: Option<f64>,
        singular: Option<bool>,
    }
    let det = cfg.point.map(|p| dpi_det(&gf, &p));
    line(&Report {
        locus: singular_locus_poly(&gf).to_string(),
        point: cfg.point,
        det_dpi: det,
        singular: det.map(|d| d.abs() < tol(cfg)),
    })
}

pub fn caustic(cfg: &RunConfig) -> Result<String, CliError> {
    let gf = gf(cfg)?;
    let s = cfg.slice.as_ref().ok_or_else(|| CliError::Config("caustic needs a `slice` table".into()))?;
    let grid = SliceGrid::new(s.free, [Axis::from_spec(&s.axes[0])?, Axis::from_spec(&s.axes[1])?])?;
    let sweep = caustic_sweep(&gf, &grid, tol(cfg));
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(sweep.to_csv()),
        Format::Json => line(&sweep),
    }
}

fn fiber_options(cfg: &RunConfig) -> FiberOptions {
    let d = FiberOptions::default();
    let f = cfg.fiber.clone().unwrap_or_default();
    FiberOptions {
        seeds: f.seeds.unwrap_or(d.seeds),
        newton_tol: f.newton_tol.unwrap_or(d.newton_tol),
        max_iter: f.max_iter.unwrap_or(d.max_iter),
        convex_tol: f.convex_tol.unwrap_or(d.convex_tol),
        degenerate_tol: f.degenerate_tol.unwrap_or(d.degenerate_tol),
    }
}

pub fn fiber(cfg: &RunConfig) -> Result<String, CliError> {
    let gf = gf(cfg)?;
    let (bases, _) = points(cfg, "fiber")?;
    let results = fiber_sweep(&gf, &bases, &fiber_options(cfg));
    let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(branch_csv(&points)),
        Format::Json => line(&points),
    }
}

pub fn family(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg, "family")?;
    let spec = match &cfg.family {
        Some(r) => FamilySpec::from_record(r)?,
        None => FamilySpec::fold_example(),
    };
    let sol = build_family(&spec)?;
    #[derive(Serialize)]
    struct Report {
        gf: mageo::chart::GfRecord,
        residual_zero: bool,
        degrees: mageo::family::DegreeReport,
        coefficients: BTreeMap<String, String>,
    }
    line(&Report {
        gf: sol.gf.to_record(),
        residual_zero: ma_residual_poly(&sol.gf).is_zero(),
        degrees: sol.degrees,
        coefficients: sol.coefficients.iter().map(|(k, v)| (k.name().to_string(), v.to_string())).collect(),
    })
}

pub fn wind(cfg: &RunConfig) -> Result<String, CliError> {
    let gf = gf(cfg)?;
    let s = cfg.section.as_ref().ok_or_else(|| CliError::Config("wind needs a `section` table".into()))?;
    let section = Section { x: Axis::from_spec(&s.x)?, z: Axis::from_spec(&s.z)?, y: s.y };
    let sg = cfg.sg.clone().unwrap_or_default();
    let eps = match &sg.epsilon {
        Some(e) => EpsilonChoice::new(parse_rational(e)?)?,
        None => EpsilonChoice::default(),
    };
    let rows = wind_field_sweep(&gf, sg.branch.unwrap_or(Branch::Convex), &section, &eps, &fiber_options(cfg));
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(wind_csv(&rows)),
        Format::Json => line(&rows),
    }
}
