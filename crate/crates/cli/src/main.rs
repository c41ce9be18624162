//! `stacktor`: combinatorial invariants of toric Deligne-Mumford stacks and
//! toric stack bundles from stacky-fan data.
//!
//! Exit codes: 0 success, 1 invalid stacky data, 2 malformed input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stacktor::error::Error;
use stacktor::io::{
    base_from_name, box_element_report, group_to_json, presentation_report, stacky_fan_to_json,
    twist_from_json, BoxElementReport, GroupJson, InputJson, PresentationReport, StackyFanJson,
};
use stacktor::oracle::check_gale_exactness;
use stacktor::presentations::{
    cr_ring_capped, gerbe_presentations, k_ring_capped, KVariables, TwistSpec,
};
use stacktor::stackyfan::StackyFan;
use stacktor::stringy::{
    chern_character_in, chern_ring_check_in, cr_product_check_in, spectrum_points_with_order,
    StringyContext,
};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "stacktor", version, about = "Toric Deligne-Mumford stack invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file with the stacky fan (and optional twist); `-` for stdin.
    input: String,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Base override: `point`, `Pn:r`, or a path to a twist JSON file.
    #[arg(long)]
    base: Option<String>,
    /// Coefficient field: `Q`, `cyclotomic:m`, or `auto`.
    #[arg(long, default_value = "auto")]
    field: String,
    /// Report the literal structure-theorem ideal next to the corrected one
    /// (gerbe inputs).
    #[arg(long)]
    strict_paper: bool,
    /// Groebner pair cap.
    #[arg(long, default_value_t = stacktor::polyring::DEFAULT_PAIR_CAP)]
    max_pairs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the stacky-fan axioms.
    Validate(CommonArgs),
    /// Gale dual of the full lattice map, with the exactness report.
    GaleDual(CommonArgs),
    /// Box elements with their fractional coordinates.
    Box(CommonArgs),
    /// Twisted sectors: box elements with quotient stacky fans.
    Sectors(CommonArgs),
    /// Grothendieck K-theory presentation.
    Kring(CommonArgs),
    /// Chen-Ruan cohomology presentation with the sector decomposition.
    Crring(CommonArgs),
    /// Spectrum points of the complexified K-presentation (point base).
    Spectrum(CommonArgs),
    /// Orbifold Chern character matrix and the product compatibility checks.
    Chern(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&CommonArgs, &StackyFan, &TwistSpec) -> Result<String, Error>) =
        match &cli.command {
            Command::Validate(a) => (a, cmd_validate),
            Command::GaleDual(a) => (a, cmd_gale_dual),
            Command::Box(a) => (a, cmd_box),
            Command::Sectors(a) => (a, cmd_sectors),
            Command::Kring(a) => (a, cmd_kring),
            Command::Crring(a) => (a, cmd_crring),
            Command::Spectrum(a) => (a, cmd_spectrum),
            Command::Chern(a) => (a, cmd_chern),
        };
    match load_job(args) {
        Err(JobError::Schema(msg)) => {
            eprintln!("{}", error_json("schema", &msg));
            ExitCode::from(2)
        }
        Err(JobError::Data(msg)) => {
            eprintln!("{}", error_json("invalid", &msg));
            ExitCode::from(1)
        }
        Ok((sf, twist)) => match run(args, &sf, &twist) {
            Ok(output) => {
                use std::io::Write;
                // tolerate a closed pipe on the consumer side
                let _ = writeln!(std::io::stdout(), "{}", output);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}", error_json("invalid", &e.to_string()));
                ExitCode::from(1)
            }
        },
    }
}

enum JobError {
    Schema(String),
    Data(String),
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::to_string(&serde_json::json!({"error": {"kind": kind, "message": message}}))
        .expect("error serializes")
}

fn load_job(args: &CommonArgs) -> Result<(StackyFan, TwistSpec), JobError> {
    let text = if args.input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| JobError::Schema(e.to_string()))?;
        buf
    } else {
        std::fs::read_to_string(&args.input).map_err(|e| JobError::Schema(e.to_string()))?
    };
    let input: InputJson = serde_json::from_str(&text).map_err(|e| JobError::Schema(e.to_string()))?;
    let sf = stacktor::io::stacky_fan_from_json(input.stacky_fan_json()).map_err(|e| match e {
        Error::InvalidInput(msg) => JobError::Schema(msg),
        other => JobError::Data(other.to_string()),
    })?;
    let d = sf.group().free_rank;
    let twist = match &args.base {
        Some(name) => resolve_base_flag(name, d)?,
        None => match input.twist_json() {
            Some(t) => twist_from_json(t, d).map_err(|e| JobError::Schema(e.to_string()))?,
            None => TwistSpec::point(d),
        },
    };
    Ok((sf, twist))
}

fn resolve_base_flag(name: &str, d: usize) -> Result<TwistSpec, JobError> {
    if name == "point" || name.starts_with("Pn:") {
        base_from_name(name, d).map_err(|e| JobError::Schema(e.to_string()))
    } else {
        let text = std::fs::read_to_string(name).map_err(|e| JobError::Schema(e.to_string()))?;
        let t: stacktor::io::TwistJson =
            serde_json::from_str(&text).map_err(|e| JobError::Schema(e.to_string()))?;
        twist_from_json(&t, d).map_err(|e| JobError::Schema(e.to_string()))
    }
}

fn field_order(args: &CommonArgs) -> Result<Option<u64>, Error> {
    match args.field.as_str() {
        "auto" => Ok(None),
        "Q" => Ok(Some(1)),
        other => match other.strip_prefix("cyclotomic:") {
            Some(m) => m
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Error::invalid(format!("bad field '{}'", other))),
            None => Err(Error::invalid(format!("bad field '{}'", other))),
        },
    }
}

fn emit<T: Serialize>(args: &CommonArgs, value: &T, text: String) -> Result<String, Error> {
    match args.format {
        Format::Json => serde_json::to_string_pretty(value).map_err(|e| Error::invalid(e.to_string())),
        Format::Text => Ok(text),
    }
}

// ---- commands ----

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    errors: Vec<String>,
}

fn cmd_validate(args: &CommonArgs, sf: &StackyFan, _twist: &TwistSpec) -> Result<String, Error> {
    let errors: Vec<String> = sf.validation_report().iter().map(|e| e.to_string()).collect();
    let report = ValidateReport { valid: errors.is_empty(), errors };
    if !report.valid {
        // surface as a data error so the exit code is 1
        return Err(Error::InvalidInput(report.errors.join("; ")));
    }
    emit(args, &report, "valid stacky fan\n".to_string())
}

#[derive(Serialize)]
struct GaleDualReport {
    dual_group: GroupJson,
    dual_map: Vec<Vec<String>>,
    minimal_dual_group: GroupJson,
    exactness_holds: bool,
}

fn cmd_gale_dual(args: &CommonArgs, sf: &StackyFan, _twist: &TwistSpec) -> Result<String, Error> {
    let beta = sf.beta();
    let gd = stacktor::lattice::gale_dual(&beta)?;
    let exact = check_gale_exactness(&beta, &gd);
    let gd_min = sf.gale_dual_min()?;
    let matrix: Vec<Vec<String>> = (0..gd.dual_map.matrix.rows())
        .map(|r| {
            (0..gd.dual_map.matrix.cols())
                .map(|c| gd.dual_map.matrix.at(r, c).to_string())
                .collect()
        })
        .collect();
    let report = GaleDualReport {
        dual_group: group_to_json(&gd.group),
        dual_map: matrix,
        minimal_dual_group: group_to_json(&gd_min.group),
        exactness_holds: exact.all_hold(),
    };
    let text = format!(
        "dual group: {:?}\nexactness: {}\n",
        gd.group,
        exact.all_hold()
    );
    emit(args, &report, text)
}

#[derive(Serialize)]
struct BoxReport {
    count: usize,
    elements: Vec<BoxElementReport>,
}

fn cmd_box(args: &CommonArgs, sf: &StackyFan, _twist: &TwistSpec) -> Result<String, Error> {
    let elements: Vec<BoxElementReport> = sf.box_total().iter().map(box_element_report).collect();
    let mut text = String::new();
    for e in &elements {
        text.push_str(&format!(
            "element {:?} cone {:?} alphas {:?} shift {}\n",
            e.element, e.cone, e.alphas, e.degree_shift
        ));
    }
    let report = BoxReport { count: elements.len(), elements };
    emit(args, &report, text)
}

#[derive(Serialize)]
struct SectorReport {
    #[serde(rename = "box")]
    box_element: BoxElementReport,
    local_group: GroupJson,
    quotient: StackyFanJson,
}

#[derive(Serialize)]
struct SectorsReport {
    count: usize,
    sectors: Vec<SectorReport>,
}

fn cmd_sectors(args: &CommonArgs, sf: &StackyFan, _twist: &TwistSpec) -> Result<String, Error> {
    let mut sectors = Vec::new();
    for (v, q) in sf.sectors()? {
        sectors.push(SectorReport {
            box_element: box_element_report(&v),
            local_group: group_to_json(q.stacky_fan.group()),
            quotient: stacky_fan_to_json(&q.stacky_fan),
        });
    }
    let mut text = String::new();
    for s in &sectors {
        text.push_str(&format!(
            "sector at {:?}: local group {:?}\n",
            s.box_element.element, s.local_group
        ));
    }
    let report = SectorsReport { count: sectors.len(), sectors };
    emit(args, &report, text)
}

#[derive(Serialize)]
struct StrictPaperReport {
    literal_relations: Vec<String>,
    note: String,
}

#[derive(Serialize)]
struct KringReport {
    presentation: PresentationReport,
    x_classes: Vec<String>,
    dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strict_paper: Option<StrictPaperReport>,
}

fn gerbe_factors(sf: &StackyFan) -> Option<Vec<u32>> {
    if sf.num_rays() == 0 && sf.group().is_finite() {
        Some(
            sf.group()
                .torsion
                .iter()
                .map(|q| u32::try_from(q).expect("factor fits"))
                .collect(),
        )
    } else {
        None
    }
}

fn cmd_kring(args: &CommonArgs, sf: &StackyFan, twist: &TwistSpec) -> Result<String, Error> {
    let k = k_ring_capped(sf, twist, args.max_pairs)?;
    let strict_paper = if args.strict_paper {
        gerbe_factors(sf).map(|factors| {
            let g = gerbe_presentations(&factors, twist).expect("gerbe presentations");
            StrictPaperReport {
                literal_relations: g.k_strict_literal.iter().map(|p| format!("{}", p)).collect(),
                note: "the literal torsion-bundle relations t^q; the computed \
                       presentation uses t^q - 1 (torsion line bundles are units)"
                    .to_string(),
            }
        })
    } else {
        None
    };
    let report = KringReport {
        presentation: presentation_report(&k.presentation),
        x_classes: k.x_classes.iter().map(|p| format!("{}", p)).collect(),
        dimension: k.presentation.dimension(),
        strict_paper,
    };
    let mode = match k.variables {
        KVariables::Reduced { .. } => "laurent",
        KVariables::General { .. } => "character",
    };
    let text = format!(
        "K-theory presentation ({} coordinates)\ndimension: {:?}\nrelations:\n  {}\n",
        mode,
        report.dimension,
        report.presentation.relations.join("\n  ")
    );
    emit(args, &report, text)
}

#[derive(Serialize)]
struct CrSectorReport {
    #[serde(rename = "box")]
    box_element: BoxElementReport,
    degree_shift: String,
    presentation: PresentationReport,
}

#[derive(Serialize)]
struct CrringReport {
    global: PresentationReport,
    total_dimension: usize,
    sectors: Vec<CrSectorReport>,
    completeness_warning: bool,
}

fn cmd_crring(args: &CommonArgs, sf: &StackyFan, twist: &TwistSpec) -> Result<String, Error> {
    let cr = cr_ring_capped(sf, twist, args.max_pairs)?;
    let sectors: Vec<CrSectorReport> = cr
        .decomposition
        .sectors
        .iter()
        .map(|s| CrSectorReport {
            box_element: box_element_report(&s.v),
            degree_shift: s.shift.to_string(),
            presentation: presentation_report(&s.presentation),
        })
        .collect();
    let report = CrringReport {
        global: presentation_report(&cr.global),
        total_dimension: cr.decomposition.total_dimension,
        sectors,
        completeness_warning: cr.completeness_warning,
    };
    let text = format!(
        "Chen-Ruan presentation\ntotal dimension: {}\nsector dimensions: {:?}\n",
        report.total_dimension,
        report
            .sectors
            .iter()
            .map(|s| s.presentation.dimension)
            .collect::<Vec<_>>()
    );
    emit(args, &report, text)
}

#[derive(Serialize)]
struct SpectrumPointReport {
    #[serde(rename = "box")]
    box_element: BoxElementReport,
    values: Vec<(String, String)>,
    relations_vanish: bool,
}

#[derive(Serialize)]
struct SpectrumReport {
    count: usize,
    points: Vec<SpectrumPointReport>,
}

fn cmd_spectrum(args: &CommonArgs, sf: &StackyFan, twist: &TwistSpec) -> Result<String, Error> {
    let points = spectrum_points_with_order(sf, twist, field_order(args)?)?;
    let points: Vec<SpectrumPointReport> = points
        .iter()
        .map(|p| SpectrumPointReport {
            box_element: box_element_report(&p.v),
            values: p.values.iter().map(|(n, s)| (n.clone(), s.to_string())).collect(),
            relations_vanish: p.relations_vanish,
        })
        .collect();
    let mut text = String::new();
    for p in &points {
        text.push_str(&format!("{:?} -> {:?}\n", p.box_element.element, p.values));
    }
    let report = SpectrumReport { count: points.len(), points };
    emit(args, &report, text)
}

#[derive(Serialize)]
struct ChernReportJson {
    cyclotomic_order: u64,
    k_dimension: usize,
    cr_dimension: usize,
    bijective: bool,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct CheckReportJson {
    pairs_checked: usize,
    mismatches: Vec<String>,
    triples_checked: usize,
    associativity_failures: Vec<String>,
}

#[derive(Serialize)]
struct RingCheckJson {
    triples_checked: usize,
    euler_identity_failures: Vec<String>,
    todd_identity_failures: Vec<String>,
    todd_transport_cases: usize,
    pairs_checked: usize,
    multiplicativity_failures: Vec<String>,
}

#[derive(Serialize)]
struct ChernCommandReport {
    chern: ChernReportJson,
    product_check: CheckReportJson,
    ring_check: RingCheckJson,
}

fn cmd_chern(args: &CommonArgs, sf: &StackyFan, twist: &TwistSpec) -> Result<String, Error> {
    let ctx = StringyContext::new(sf, twist, field_order(args)?)?;
    let chern = chern_character_in(&ctx)?;
    let product = cr_product_check_in(&ctx)?;
    let ring = chern_ring_check_in(&ctx)?;
    let report = ChernCommandReport {
        chern: ChernReportJson {
            cyclotomic_order: chern.cyclotomic_order,
            k_dimension: chern.k_dimension,
            cr_dimension: chern.cr_dimension,
            bijective: chern.bijective,
            matrix: chern.matrix.clone(),
        },
        product_check: CheckReportJson {
            pairs_checked: product.pairs_checked,
            mismatches: product.mismatches.clone(),
            triples_checked: product.triples_checked,
            associativity_failures: product.associativity_failures.clone(),
        },
        ring_check: RingCheckJson {
            triples_checked: ring.triples_checked,
            euler_identity_failures: ring.euler_identity_failures.clone(),
            todd_identity_failures: ring.todd_identity_failures.clone(),
            todd_transport_cases: ring.todd_transport_cases,
            pairs_checked: ring.pairs_checked,
            multiplicativity_failures: ring.multiplicativity_failures.clone(),
        },
    };
    let text = format!(
        "chern character: {}x{}, bijective: {}\nproduct check clean: {}\nring check clean: {}\n",
        report.chern.cr_dimension,
        report.chern.k_dimension,
        report.chern.bijective,
        product.clean(),
        ring.clean()
    );
    emit(args, &report, text)
}
