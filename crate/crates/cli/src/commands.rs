
use g2strata::bundle_calc::{FibreKind, HorikawaCounts};
use g2strata::classifier::{
    classify_v2, indec_oracle_h1, instance_for_label, sections_with_pattern, verify_classification, ExtensionClass,
    StratumLabel, V1Type,
};
use g2strata::fibration_lab::{
    automorphism_pairs, bicanonical_kernel, build_case_v_with, case_one_invariant_conic, order_three_point,
    zeuthen_segre_check, CaseVInstance, LabOptions, NORMALIZED_COEFFICIENTS,
};
use g2strata::field_curve::{registry, CurvePoint, EllipticCurve};
use g2strata::strata_engine::{
    a6_for_stratum, fibration_invariants, horikawa_k2, moduli_lower_bound, moduli_table, parse_relation,
    stratum_dimension, subcases, CASE_V_FIBRE_DIMENSION,
};
use g2strata::{Error, Result};
use serde_json::{json, Map, Value};

use crate::instance::{self, CaseOneFile, CaseVFile, SplitFile};
use crate::{suite, A6Args, AutArgs, CaseOneArgs, CaseVArgs, ClassifyArgs, Cli, Command, Format, InvariantsArgs};

pub struct Output {
    pub text: String,
    /// Names of the checks that did not hold.
    pub failed: Vec<String>,
}

pub type Checks = Vec<(&'static str, bool)>;

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Attaches the named checks and the overall verdict to a JSON report.
fn with_checks(cli: &Cli, mut report: Value, checks: Checks) -> Result<Output> {
    json_only(cli)?;
    let failed: Vec<String> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.to_string()).collect();
    let obj = report.as_object_mut().expect("reports are objects");
    obj.insert("checks".into(), Value::Object(checks.iter().map(|(n, ok)| (n.to_string(), json!(ok))).collect::<Map<_, _>>()));
    obj.insert("ok".into(), json!(failed.is_empty()));
    Ok(Output { text: pretty(&report), failed })
}

fn json_only(cli: &Cli) -> Result<()> {
    if cli.format != Format::Json {
        return Err(Error::Parse(format!("--format {:?} is only supported by table and verify-all", cli.format).to_lowercase()));
    }
    Ok(())
}

pub fn options(cli: &Cli) -> LabOptions {
    LabOptions { retries: cli.retries, field_ext_max: cli.field_ext_max }
}

fn curve(cli: &Cli) -> Result<EllipticCurve> {
    Ok(registry::resolve(&cli.curve)?.curve)
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Table => table(cli),
        Command::Classify(a) => classify(cli, a),
        Command::A6(a) => a6(cli, a),
        Command::Invariants(a) => invariants(cli, a),
        Command::Crit(a) => crit(cli, a),
        Command::ZsCheck(a) => zs_check(cli, a),
        Command::BkCheck(a) => bk_check(cli, a),
        Command::AutDim(a) => aut_dim(cli, a),
        Command::Case1Conic(a) => case_one(cli, a),
        Command::VerifyAll(a) => suite::verify_all(cli, a),
    }
}

fn table(cli: &Cli) -> Result<Output> {
    let t = moduli_table()?;
    let text = match cli.format {
        Format::Json => pretty(&t.json()),
        Format::Tsv => t.tsv(),
        Format::Markdown => t.markdown(),
    };
    Ok(Output { text, failed: Vec::new() })
}

fn parse_label(s: &str) -> Result<StratumLabel> {
    s.parse()
}

fn classify(cli: &Cli, a: &ClassifyArgs) -> Result<Output> {
    if a.indec {
        let e = curve(cli)?;
        let tau = e.parse_point(a.tau.as_deref().expect("clap requires --tau"))?;
        let q = e.parse_point(a.q.as_deref().expect("clap requires --q"))?;
        let xi = ExtensionClass::Indec { q, im_v_in_w: a.im_v_in_w };
        let c = classify_v2(&e, &V1Type::Indec(CurvePoint::Infinity), &tau, &xi)?;
        let h1 = indec_oracle_h1(&e, &tau, &q, a.im_v_in_w)?;
        let special = c.candidates.len() > 1;
        let report = json!({
            "curve": e.spec(),
            "v1": "indecomposable",
            "tau": e.json_point(&tau),
            "q": e.json_point(&q),
            "im_v_in_w": a.im_v_in_w,
            "classification": c.json(&e),
            "oracle_h1_at_trivial_class": h1,
        });
        return with_checks(cli, report, vec![("oracle h1 at O is 0 exactly in the general case", (h1 == 0) != special)]);
    }
    let file = if let Some(path) = &a.instance {
        SplitFile::parse(&instance::read(path)?)?
    } else if let Some(label) = &a.label {
        let e = curve(cli)?;
        let inst = instance_for_label(&e, parse_label(label)?, cli.seed, cli.retries)?;
        SplitFile { curve: e, p: inst.p, tau: inst.tau, pattern: inst.pattern, seed: inst.seed }
    } else if let Some(p) = &a.p {
        let e = curve(cli)?;
        let p = e.parse_point(p)?;
        let tau = e.parse_point(a.tau.as_deref().expect("clap requires --tau"))?;
        let pattern = a.pattern.as_deref().expect("clap requires --pattern").parse()?;
        SplitFile { curve: e, p, tau, pattern, seed: cli.seed }
    } else {
        return Err(Error::Parse("classify needs one of --label, --p/--tau/--pattern, --indec or --instance".into()));
    };
    if let Some(path) = &a.save_instance {
        instance::write(path, &file.to_json())?;
    }
    let e = &file.curve;
    if file.tau.is_infinity() || file.tau == file.p || file.tau == e.neg(&file.p) {
        return Err(Error::Domain("tau must differ from o, p and -p".into()));
    }
    let sections = sections_with_pattern(e, &file.p, &file.tau, file.pattern, file.seed, cli.retries)?;
    let rep = verify_classification(e, &file.p, &file.tau, &sections)?;
    let report = json!({
        "instance": file.to_json(),
        "sections": sections.iter().map(|s| s.json(e)).collect::<Vec<_>>(),
        "labels": rep.classification.labels().iter().map(|l| l.name()).collect::<Vec<_>>(),
        "verification": rep.json(e),
    });
    with_checks(cli, report, vec![("classifier agrees with the multiplication-map oracle", rep.passed())])
}

fn a6(cli: &Cli, a: &A6Args) -> Result<Output> {
    let label = parse_label(&a.label)?;
    let rels = a.relations.iter().map(|r| parse_relation(r)).collect::<Result<Vec<_>>>()?;
    let data = a6_for_stratum(label, &rels)?;
    let budget = stratum_dimension(label, &rels)?;
    let mut report = json!({
        "a6": data.json(),
        "budget": budget.json(),
    });
    if a.subcases {
        report["subcases"] = Value::Array(subcases(label)?.iter().map(|s| s.json()).collect());
    }
    let rank_ok = data.g2.rank() - data.g1.rank() == 7;
    let w_ok = budget.w.value == data.h0.value - 1;
    with_checks(cli, report, vec![("quotient has rank 7", rank_ok), ("w parameters equal h0 - 1", w_ok)])
}

fn parse_nu(items: &[String]) -> Result<HorikawaCounts> {
    let mut nu = HorikawaCounts::new();
    for item in items {
        let (kind, n) = item.split_once('=').ok_or_else(|| Error::Parse(format!("fibre count '{item}' is not KIND=N")))?;
        let n: u64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad count in '{item}'")))?;
        let kind = kind.trim();
        let digits = kind.trim_start_matches(['I', 'V']);
        let roman = &kind[..kind.len() - digits.len()];
        let k: u32 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| Error::Parse(format!("bad index in '{item}'")))? };
        let kind = match roman {
            "I" => FibreKind::I,
            "II" => FibreKind::II,
            "III" => FibreKind::III,
            "IV" => FibreKind::IV,
            "V" => FibreKind::V,
            _ => return Err(Error::Parse(format!("unknown fibre type '{kind}'"))),
        };
        if k == 0 {
            return Err(Error::Parse(format!("fibre index must be positive in '{item}'")));
        }
        nu = nu.with(kind, k, n);
    }
    Ok(nu)
}

fn invariants(cli: &Cli, a: &InvariantsArgs) -> Result<Output> {
    json_only(cli)?;
    if a.degv1 < 1 || a.degtau < 0 || a.b < 0 {
        return Err(Error::Domain("need degv1 >= 1, degtau >= 0, b >= 0".into()));
    }
    let (chi, k2) = fibration_invariants(a.degv1, a.degtau, a.b);
    let mut report = json!({"chi": chi, "K2": k2});
    if let Some(pa) = a.pa {
        report["K2_from_fibres"] = json!(horikawa_k2(pa, a.b, &parse_nu(&a.nu)?));
    }
    if let Some(pg) = a.pg {
        report["moduli_lower_bound"] = json!(moduli_lower_bound(chi, k2, pg));
    }
    Ok(Output { text: pretty(&report), failed: Vec::new() })
}

/// First rational point of exact order 2.
fn first_two_torsion(e: &EllipticCurve) -> Result<CurvePoint> {
    e.points()
        .into_iter()
        .find(|p| !p.is_infinity() && e.mul(p, 2).is_infinity())
        .ok_or_else(|| Error::Domain(format!("{} has no rational point of order 2", e.spec())))
}

pub fn case_v(cli: &Cli, a: &CaseVArgs) -> Result<CaseVInstance> {
    let file = if let Some(path) = &a.instance {
        CaseVFile::parse(&instance::read(path)?)?
    } else {
        let e = curve(cli)?;
        let tau = match &a.tau {
            Some(t) => e.parse_point(t)?,
            None => first_two_torsion(&e)?,
        };
        let coefficients = NORMALIZED_COEFFICIENTS.map(|r| r.map(|v| e.field.from_i64(v)));
        CaseVFile { curve: e, tau, coefficients, seed: cli.seed }
    };
    if let Some(path) = &a.save_instance {
        instance::write(path, &file.to_json())?;
    }
    build_case_v_with(&file.curve, &file.tau, file.coefficients, file.seed, &options(cli))
}

fn crit(cli: &Cli, a: &CaseVArgs) -> Result<Output> {
    let inst = case_v(cli, a)?;
    let kmax = cli.field_ext_max;
    let rep = inst.crit_points(kmax)?;
    let sing = inst.conic_singularities(kmax)?;
    let report = json!({
        "instance": inst.json(),
        "total": rep.total,
        "distinct": rep.distinct,
        "family_sizes": rep.family_sizes(),
        "critical_points": rep.json(),
        "conic_singularities": sing.json(),
    });
    let single_node = sing.node_count() == 1 && sing.only_nodes() && sing.singular_points().all(|d| d.base == inst.tau);
    with_checks(
        cli,
        report,
        vec![
            ("19 critical points", rep.total == 19),
            ("critical points distinct", rep.distinct),
            ("family sizes 1,3,3,3,3,3,3", rep.family_sizes() == [1, 3, 3, 3, 3, 3, 3]),
            ("coordinate loci carry no critical point", rep.empty_loci.iter().all(|l| l.solutions == 0)),
            ("rational fibre scan matches the families", rep.scan.matches_families),
            ("single A1 node of the conic bundle, over tau", single_node),
        ],
    )
}

fn zs_check(cli: &Cli, a: &CaseVArgs) -> Result<Output> {
    let inst = case_v(cli, a)?;
    let rep = inst.crit_points(cli.field_ext_max)?;
    let zs = zeuthen_segre_check(&rep)?;
    let report = json!({
        "instance": inst.json(),
        "total": rep.total,
        "zeuthen_segre": zs.json(&rep.curve),
    });
    with_checks(
        cli,
        report,
        vec![
            ("Euler numbers add up", zs.holds),
            ("19 singular fibres", zs.fibres.len() == 19),
            ("18 nodal fibres", zs.nodal_fibres == 18),
        ],
    )
}

fn bk_check(cli: &Cli, a: &CaseVArgs) -> Result<Output> {
    let inst = case_v(cli, a)?;
    let rep = inst.crit_points(cli.field_ext_max)?;
    let bk = bicanonical_kernel(&inst, &rep)?;
    let report = json!({
        "instance": inst.json(),
        "total": rep.total,
        "bicanonical": bk.json(&rep.curve.field),
    });
    let over_bezout = bk.bezout.points_per_curve.iter().all(|(_, n)| *n as i64 > bk.bezout.value);
    with_checks(
        cli,
        report,
        vec![
            ("coefficient space of dimension 7", bk.coefficient_dimension == 7),
            ("no nonzero section vanishes on all critical points", bk.kernel == 0),
            ("H^3 = 7", bk.bezout.h_cubed == 7),
            ("Bezout value 3", bk.bezout.value == 3),
            ("each curve carries more critical points than the Bezout value", over_bezout),
            ("h1 of the tangent sheaf equals the dimension of stratum V,2", bk.h1_tangent.is_some() && bk.h1_tangent == bk.stratum_dimension),
        ],
    )
}

fn aut_dim(cli: &Cli, a: &AutArgs) -> Result<Output> {
    let r = automorphism_pairs(a.p)?;
    let report = r.json();
    with_checks(
        cli,
        report,
        vec![
            ("both families commute formally", r.family_commutes.iter().all(|&b| b) && r.example_commutes),
            ("scalars lie in the second family", r.scalars_in_family_two),
            ("no solution outside the two families", r.outside_families.is_empty() && r.solutions == r.family_pairs),
            ("parametrization injective", r.injective),
            ("fibre dimension 1", r.fibre_dimension == CASE_V_FIBRE_DIMENSION && r.dim_z == 2),
            ("stratum dimensions 12 and 11", r.stratum_dimensions == (12, 11)),
        ],
    )
}

fn case_one(cli: &Cli, a: &CaseOneArgs) -> Result<Output> {
    let file = if let Some(path) = &a.instance {
        CaseOneFile::parse(&instance::read(path)?)?
    } else {
        let e = curve(cli)?;
        let generator = match &a.kernel {
            Some(k) => e.parse_point(k)?,
            None => order_three_point(&e).ok_or_else(|| Error::Domain(format!("{} has no rational point of order 3", e.spec())))?,
        };
        CaseOneFile { curve: e, generator, seed: cli.seed }
    };
    if let Some(path) = &a.save_instance {
        instance::write(path, &file.to_json())?;
    }
    let r = case_one_invariant_conic(&file.curve, &file.generator, file.seed, &options(cli))?;
    let report = r.json();
    let inv = &r.invariance;
    with_checks(
        cli,
        report,
        vec![
            ("columns are translates", inv.translates),
            ("conic invariant under shift and translation", inv.invariant),
            ("coefficients match the lambda and mu formulas", inv.lambda_mu),
            ("exactly 3 A1 nodes", r.nodes == 3 && r.singularities.only_nodes()),
            ("nodes over the kernel", r.nodes_over_kernel),
            ("one node on the quotient", r.quotient_nodes == 1),
        ],
    )
}
