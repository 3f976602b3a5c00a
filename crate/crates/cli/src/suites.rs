//! Named experiment suites: data-driven check lists with report emission.
//!
//! Each suite resolves its group specification (configurable, with a
//! suite-specific default), runs a list of checks of the form
//! (name, expected, actual, tolerance) and produces report documents. All
//! tolerances are pinned here; exact checks compare rationals or sets with
//! zero tolerance.

use adictree::constructions::{
    affine_group, extended_tower, finite_type_check, intermediate_group, AffinePart, GroupSpec,
    TowerExtension, TowerSpec,
};
use adictree::engine::FiniteTreeGroup;
use adictree::error::Error;
use adictree::report::{
    to_json, BadCosetReport, FppReport, HdimReport, MartingaleReport, MonodromyReport,
    ProcessReport, ReportHeader,
};
use adictree::spectra::{
    bad_cosets, burnside_mean, euler_formulas, fpp_series, frac, frac_string, hdim_sequence,
    martingale_criterion, monodromy_bound, process_sample, ExactFraction,
};
use adictree::tree::Perm;
use num_bigint::BigUint;

use crate::config::Config;

/// Suite failure modes, mapped to exit codes by the caller.
#[derive(Debug)]
pub enum SuiteError {
    /// Bad configuration: exit 2.
    Config(String),
    /// Enumeration capacity exceeded: exit 3.
    Capacity(String),
    /// Any other runtime failure: exit 1.
    Run(String),
}

impl From<Error> for SuiteError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { cap, reached } => {
                SuiteError::Capacity(format!("cap {cap} exceeded (reached {reached})"))
            }
            other => SuiteError::Run(other.to_string()),
        }
    }
}

/// One executed check.
#[derive(Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub pass: bool,
}

impl Check {
    fn exact(name: &str, expected: impl ToString, actual: impl ToString) -> Check {
        let expected = expected.to_string();
        let actual = actual.to_string();
        Check {
            name: name.to_string(),
            pass: expected == actual,
            expected,
            actual,
            tolerance: "exact".to_string(),
        }
    }

    fn boolean(name: &str, pass: bool, actual: impl ToString) -> Check {
        Check {
            name: name.to_string(),
            expected: "true".to_string(),
            actual: actual.to_string(),
            tolerance: "exact".to_string(),
            pass,
        }
    }

    fn within(name: &str, expected: f64, actual: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            tolerance: tolerance.to_string(),
            pass: (expected - actual).abs() < tolerance,
        }
    }

    fn info(name: &str, actual: impl ToString) -> Check {
        Check {
            name: name.to_string(),
            expected: "reported".to_string(),
            actual: actual.to_string(),
            tolerance: "none".to_string(),
            pass: true,
        }
    }

    /// Folds a fallible check body into a FAIL line instead of aborting the
    /// suite; capacity problems still abort (they are environment limits,
    /// not verdicts).
    fn guarded(
        name: &str,
        body: impl FnOnce() -> Result<Check, SuiteError>,
    ) -> Result<Check, SuiteError> {
        match body() {
            Ok(check) => Ok(check),
            Err(SuiteError::Run(msg)) => Ok(Check {
                name: name.to_string(),
                expected: "true".to_string(),
                actual: format!("error: {msg}"),
                tolerance: "exact".to_string(),
                pass: false,
            }),
            Err(other) => Err(other),
        }
    }
}

/// Everything a suite produces: check lines and report files.
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    /// (file stem, csv content, json content) per report.
    pub reports: Vec<(String, String, String)>,
}

impl SuiteOutput {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const SUITE_NAMES: [&str; 5] = [
    "lemma-theorem",
    "affine-unicritical",
    "gh-algebra",
    "martingale",
    "hdim",
];

pub fn run_suite(name: &str, cfg: &Config) -> Result<SuiteOutput, SuiteError> {
    match name {
        "lemma-theorem" => lemma_theorem(cfg),
        "affine-unicritical" => affine_unicritical(cfg),
        "gh-algebra" => gh_algebra(cfg),
        "martingale" => martingale(cfg),
        "hdim" => hdim(cfg),
        other => Err(SuiteError::Config(format!(
            "unknown suite {other:?}; expected one of {SUITE_NAMES:?}"
        ))),
    }
}

fn extension_from_config(
    cfg: &Config,
    default_depth: usize,
) -> Result<(GroupSpec, TowerSpec, TowerExtension), SuiteError> {
    let spec = cfg.spec.clone().unwrap_or(GroupSpec::ExtendedTower {
        degree: 2,
        sigma: None,
    });
    if !matches!(spec, GroupSpec::ExtendedTower { .. }) {
        return Err(SuiteError::Config(format!(
            "this suite needs an extended-tower spec, got family {:?}",
            spec.family_name()
        )));
    }
    let tower = spec.tower_spec().map_err(SuiteError::from)?;
    let depth = cfg.depth.unwrap_or(default_depth);
    let ext = extended_tower(&tower, depth, cfg.cap)?;
    Ok((spec, tower, ext))
}

/// Factorial as an exact integer.
fn factorial(n: u64) -> u64 {
    (2..=n).product::<u64>().max(1)
}

// ---------------------------------------------------------------------------
// lemma-theorem
// ---------------------------------------------------------------------------

/// The extension-pair identities: second-level order, intermediate-group
/// equality, stabilizer containment, fixed-point bound, constancy family and
/// index stability.
fn lemma_theorem(cfg: &Config) -> Result<SuiteOutput, SuiteError> {
    let (spec, tower, ext) = extension_from_config(cfg, 4)?;
    let d = tower.degree().get() as u64;
    let depth = ext.depth;
    let group = &ext.group;
    let base = &ext.base;
    let mut checks = Vec::new();

    // |pi_2(G)| = d * d^d.
    let pi2 = group.truncated_keys(2).map_err(SuiteError::from)?;
    checks.push(Check::exact(
        "second-level-order",
        d * d.pow(d as u32),
        pi2.len(),
    ));

    // The base is claimed normal in the extension.
    checks.push(Check::boolean(
        "base-normal-in-extension",
        ext.base_is_normal,
        ext.base_is_normal,
    ));

    // G equals its own intermediate group over the base.
    checks.push(Check::guarded("intermediate-group-equality", || {
        let gh = intermediate_group(group, base)?;
        let equal = gh.len() == group.len() && group.elements().iter().all(|g| gh.contains(g));
        Ok(Check::boolean(
            "intermediate-group-equality",
            equal,
            format!("|gh| = {}, |G| = {}", gh.len(), group.len()),
        ))
    })?);

    // St_G(2) is contained in the base.
    let st2 = group.level_stabilizer(2).map_err(SuiteError::from)?;
    let contained = base.contains_all(&st2);
    checks.push(Check::boolean(
        "level-2-stabilizer-in-base",
        contained,
        format!("|St(2)| = {}, contained = {contained}", st2.len()),
    ));

    // p_k >= (d-1)!/d^d for all k, monotone nonincreasing.
    let bound = frac(factorial(d - 1), d.pow(d as u32));
    let series = fpp_series(group)?;
    let all_bounded = series.iter().all(|l| l.proportion >= bound);
    checks.push(Check::boolean(
        "fpp-lower-bound",
        all_bounded,
        series
            .iter()
            .map(|l| frac_string(&l.proportion))
            .collect::<Vec<_>>()
            .join(" "),
    ));

    // Constancy family: every element of St_G(2)-part times a last-letter
    // generator has exactly d fixed vertices per level below the deepest.
    let (family_ok, family_size) = constancy_family(&tower, group, &st2, depth)?;
    checks.push(Check::boolean(
        "constancy-family-trajectories",
        family_ok,
        format!("{family_size} elements"),
    ));
    // Exact measure d!/|pi_2(G)| = (d-1)!/d^d.
    let measure = frac(family_size, group.len() as u64);
    checks.push(Check::exact(
        "constancy-family-measure",
        frac_string(&frac(factorial(d - 1), d.pow(d as u32))),
        frac_string(&measure),
    ));

    // Index |pi_n(G)| / |pi_n(H)| constant for n = 2..=depth.
    let mut indices = Vec::new();
    for n in 2..=depth {
        let g_n = group.truncated_keys(n).map_err(SuiteError::from)?.len();
        let h_n = base.truncated_keys(n).map_err(SuiteError::from)?.len();
        indices.push(g_n / h_n);
    }
    let stable = indices.windows(2).all(|w| w[0] == w[1]);
    checks.push(Check::boolean(
        "index-stability",
        stable,
        format!("{indices:?}"),
    ));

    // Reports: exact per-level proportions with the declared bound.
    let header = ReportHeader::new("fpp", &spec, depth, cfg.seed);
    let report = FppReport::from_series(header, &series, Some((&bound, "constancy-family")));
    let reports = vec![(
        "lemma-theorem-fpp".to_string(),
        report.to_csv(),
        to_json(&report),
    )];
    Ok(SuiteOutput { checks, reports })
}

/// Builds the family {h · g_rho : h in the level-2 stabilizer part, rho a
/// letter permutation} and checks the constancy of its trajectories.
fn constancy_family(
    tower: &TowerSpec,
    group: &FiniteTreeGroup,
    st2: &FiniteTreeGroup,
    depth: usize,
) -> Result<(bool, u64), SuiteError> {
    let d = tower.degree().get() as u64;
    let mut seen = std::collections::HashSet::new();
    let mut ok = true;
    for rho in Perm::all(d as usize) {
        let generator = adictree::constructions::last_letter_generator(tower, &rho, depth)?;
        if !group.contains(&generator) {
            return Err(SuiteError::Run(format!(
                "generator for rho {rho} escapes the enumerated group"
            )));
        }
        for h in st2.elements() {
            let member = h.compose(&generator)?;
            seen.insert(member.canonical_key());
            for k in 1..depth {
                if member.fixed_count(k)? != d {
                    ok = false;
                }
            }
        }
    }
    Ok((ok, seen.len() as u64))
}

// ---------------------------------------------------------------------------
// affine-unicritical
// ---------------------------------------------------------------------------

/// Euler closed forms against brute force over the affine maps, and the
/// monodromy mechanism on the tree model.
fn affine_unicritical(cfg: &Config) -> Result<SuiteOutput, SuiteError> {
    let spec = cfg.spec.clone().unwrap_or(GroupSpec::Intermediate {
        outer: Box::new(GroupSpec::AffineModel {
            degree: 3,
            part: AffinePart::Full,
        }),
        inner: Box::new(GroupSpec::AffineModel {
            degree: 3,
            part: AffinePart::Translations,
        }),
    });
    let degree = spec.degree().map_err(SuiteError::from)?;
    let d = degree.get() as u64;
    let depth = cfg.depth.unwrap_or(2);
    let mut checks = Vec::new();

    // Brute-force bad cosets over the affine maps match the closed forms for
    // every modulus up to 200.
    let mut sweep_ok = true;
    let mut first_mismatch = String::new();
    for m in 2..=200u64 {
        let brute = affine_group(m)?.bad_units().len() as u64;
        let (closed, bound) = euler_formulas(m);
        let phi = adictree::constructions::euler_phi(m);
        let ratio = frac(brute, phi);
        if brute != closed || ratio != bound {
            sweep_ok = false;
            if first_mismatch.is_empty() {
                first_mismatch = format!("d={m}: brute {brute} vs closed {closed}");
            }
        }
    }
    checks.push(Check::boolean(
        "euler-sweep-2-to-200",
        sweep_ok,
        if sweep_ok { "all match".to_string() } else { first_mismatch },
    ));

    // Tree model at the configured degree.
    let full = adictree::constructions::affine_model(d, depth, AffinePart::Full, cfg.cap)?;
    let translations =
        adictree::constructions::affine_model(d, depth, AffinePart::Translations, cfg.cap)?;
    let gh = intermediate_group(&full, &translations)?;
    let analysis = bad_cosets(&full, &translations, Some(&gh))?;
    let (euler_count, euler_bound) = euler_formulas(d);
    checks.push(Check::exact(
        "bad-coset-count",
        euler_count,
        analysis.bad_count,
    ));
    checks.push(Check::exact(
        "bad-coset-ratio",
        frac_string(&euler_bound),
        frac_string(&analysis.ratio),
    ));
    checks.push(Check::boolean(
        "complete-monodromy",
        analysis.complete_monodromy == Some(true),
        format!("{:?}", analysis.complete_monodromy),
    ));

    // Witness totality over the bad cosets (hard failure on violation).
    let monodromy = monodromy_bound(&gh, &analysis)?;
    let expected_over_bad = analysis.bad_count * (gh.len() as u64 / analysis.q_size);
    checks.push(Check::exact(
        "elements-over-bad-cosets",
        expected_over_bad,
        monodromy.over_bad,
    ));

    // Exact fixing proportion of the intermediate group dominates the bound.
    let series = fpp_series(&gh)?;
    let p_depth = &series.last().expect("depth >= 1").proportion;
    checks.push(Check::boolean(
        "gh-fpp-dominates-bound",
        *p_depth >= euler_bound,
        format!("p_{depth} = {}", frac_string(p_depth)),
    ));

    let header = ReportHeader::new("bad-cosets", &spec, depth, cfg.seed);
    let coset_report = BadCosetReport::new(header, &analysis);
    let monodromy_report = MonodromyReport::new(
        ReportHeader::new("monodromy", &spec, depth, cfg.seed),
        &monodromy,
        100,
    );
    let fpp_report = FppReport::from_series(
        ReportHeader::new("fpp", &spec, depth, cfg.seed),
        &series,
        Some((&euler_bound, "bad-monodromy")),
    );
    Ok(SuiteOutput {
        checks,
        reports: vec![
            (
                "affine-bad-cosets".to_string(),
                coset_report.to_csv(),
                to_json(&coset_report),
            ),
            (
                "affine-monodromy".to_string(),
                monodromy_report.to_csv(),
                to_json(&monodromy_report),
            ),
            (
                "affine-gh-fpp".to_string(),
                fpp_report.to_csv(),
                to_json(&fpp_report),
            ),
        ],
    })
}

// ---------------------------------------------------------------------------
// gh-algebra
// ---------------------------------------------------------------------------

/// Structural properties of the intermediate-group construction on the
/// configured pair: inclusion chain, normality verdicts, fractality and
/// finite-type evidence with both candidate indices.
fn gh_algebra(cfg: &Config) -> Result<SuiteOutput, SuiteError> {
    let spec = cfg.spec.clone().unwrap_or(GroupSpec::ExtendedTower {
        degree: 2,
        sigma: None,
    });
    let depth = cfg.depth.unwrap_or(4);
    let mut checks = Vec::new();

    let (outer, inner) = match &spec {
        GroupSpec::ExtendedTower { .. } => {
            let tower = spec.tower_spec().map_err(SuiteError::from)?;
            let ext = extended_tower(&tower, depth, cfg.cap)?;
            (ext.group, ext.base)
        }
        GroupSpec::Intermediate { outer, inner } => {
            let outer_built = outer.build(depth, cfg.cap)?;
            let inner_built = inner.build(depth, cfg.cap)?;
            match (outer_built.group, inner_built.group) {
                (Some(g), Some(h)) => (g, h),
                _ => {
                    return Err(SuiteError::Capacity(
                        "both groups must be enumerable for gh-algebra".to_string(),
                    ))
                }
            }
        }
        other => {
            return Err(SuiteError::Config(format!(
                "gh-algebra needs an extended-tower or intermediate spec, got {:?}",
                other.family_name()
            )))
        }
    };

    let gh = match intermediate_group(&outer, &inner) {
        Ok(gh) => gh,
        Err(Error::Capacity { cap, reached }) => {
            return Err(SuiteError::Capacity(format!(
                "cap {cap} exceeded (reached {reached})"
            )))
        }
        Err(e) => {
            checks.push(Check::boolean(
                "gh-construction",
                false,
                format!("error: {e}"),
            ));
            return Ok(SuiteOutput {
                checks,
                reports: Vec::new(),
            });
        }
    };
    checks.push(Check::boolean(
        "inner-contained-in-gh",
        gh.contains_all(&inner),
        format!("|inner| = {}", inner.len()),
    ));
    checks.push(Check::boolean(
        "gh-contained-in-outer",
        outer.contains_all(&gh),
        format!("|gh| = {}", gh.len()),
    ));
    checks.push(Check::boolean(
        "inner-normal-in-gh",
        gh.subgroup_is_normal(&inner).map_err(SuiteError::from)?,
        "conjugation closure",
    ));
    checks.push(Check::boolean(
        "gh-normal-in-outer",
        outer.subgroup_is_normal(&gh).map_err(SuiteError::from)?,
        "conjugation closure",
    ));
    checks.push(Check::exact("gh-equals-outer", outer.len(), gh.len()));
    if gh.depth() >= 2 {
        checks.push(Check::boolean(
            "gh-fractal",
            gh.is_fractal().map_err(SuiteError::from)?,
            "finite-depth surrogate",
        ));
    }

    if matches!(spec, GroupSpec::ExtendedTower { .. }) && depth >= 4 {
        // Finite-type evidence: the base at pattern depth 2, the
        // intermediate group at pattern depth 3.
        let inner_verdict = finite_type_check(&inner, 2).map_err(SuiteError::from)?;
        checks.push(Check::boolean(
            "base-finite-type-depth-2",
            inner_verdict.holds(),
            format!(
                "quotient_matches = {}, branching = {:?}",
                inner_verdict.quotient_matches, inner_verdict.branching
            ),
        ));
        let gh_verdict = finite_type_check(&gh, 3).map_err(SuiteError::from)?;
        checks.push(Check::boolean(
            "gh-finite-type-depth-3",
            gh_verdict.holds(),
            format!(
                "quotient_matches = {}, branching = {:?}",
                gh_verdict.quotient_matches, gh_verdict.branching
            ),
        ));
        // Both candidate indices are reported: at the base pattern depth D=2
        // and one deeper.
        for n in [2usize, 3] {
            let g_n = gh.truncated_keys(n).map_err(SuiteError::from)?.len();
            let h_n = inner.truncated_keys(n).map_err(SuiteError::from)?.len();
            checks.push(Check::info(
                &format!("index-at-depth-{n}"),
                format!("{}", g_n / h_n),
            ));
        }
    }

    Ok(SuiteOutput {
        checks,
        reports: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// martingale
// ---------------------------------------------------------------------------

/// Subtree transitivity, exact conditional expectations, Burnside means and
/// the sampled fixed-point process.
fn martingale(cfg: &Config) -> Result<SuiteOutput, SuiteError> {
    let spec = cfg.spec.clone().unwrap_or(GroupSpec::ExtendedTower {
        degree: 2,
        sigma: None,
    });
    let depth = cfg.depth.unwrap_or(3);
    let built = spec.build(depth, cfg.cap)?;
    let Some(group) = &built.group else {
        return Err(SuiteError::Capacity(
            "martingale diagnostics need an enumerated group".to_string(),
        ));
    };
    let d = built.degree.get() as u64;
    let mut checks = Vec::new();

    let verdict = martingale_criterion(group)?;
    checks.push(Check::boolean(
        "subtree-transitivity",
        verdict.holds,
        format!("{:?}", verdict.subtree_transitive),
    ));
    if let Some(conditional) = &verdict.conditional {
        checks.push(Check::boolean(
            "conditional-expectation-identity",
            conditional.iter().all(|c| c.matches),
            format!("{} buckets", conditional.len()),
        ));
    }

    let transitive = group.is_level_transitive();
    for k in 1..=depth {
        let (mean, orbits) = burnside_mean(group, k)?;
        let expected = frac(orbits as u64, 1);
        checks.push(Check::exact(
            &format!("burnside-mean-level-{k}"),
            frac_string(&expected),
            frac_string(&mean),
        ));
        if transitive {
            checks.push(Check::exact(
                &format!("transitive-mean-level-{k}"),
                "1/1",
                frac_string(&mean),
            ));
        }
    }

    let outcome = process_sample(&built, cfg.trials, cfg.seed)?;
    if matches!(spec, GroupSpec::ExtendedTower { .. }) {
        let bound = frac(factorial(d - 1), d.pow(d as u32));
        let exact: Option<&ExactFraction> = outcome.exact_event.as_ref();
        checks.push(Check::boolean(
            "constancy-event-bound",
            exact.map(|e| *e >= bound).unwrap_or(false),
            exact.map(frac_string).unwrap_or_default(),
        ));
    }

    let martingale_report = MartingaleReport::new(
        ReportHeader::new("martingale", &spec, depth, cfg.seed),
        &verdict,
    );
    let process_report = ProcessReport::new(
        ReportHeader::new("process", &spec, depth, cfg.seed),
        &outcome,
    );
    Ok(SuiteOutput {
        checks,
        reports: vec![
            (
                "martingale".to_string(),
                martingale_report.to_csv(),
                to_json(&martingale_report),
            ),
            (
                "process".to_string(),
                process_report.to_csv(),
                to_json(&process_report),
            ),
        ],
    })
}

// ---------------------------------------------------------------------------
// hdim
// ---------------------------------------------------------------------------

/// Dimension ratio sequences: closed forms cross-checked against enumeration
/// at small depth; the degree-2 limit asserted, higher degrees reported.
fn hdim(cfg: &Config) -> Result<SuiteOutput, SuiteError> {
    let spec = cfg.spec.clone().unwrap_or(GroupSpec::Tower {
        degree: 2,
        sigma: None,
    });
    let n_max = cfg.depth.unwrap_or(20);
    let degree = spec.degree().map_err(SuiteError::from)?;
    let d = degree.get();
    let points = hdim_sequence(&spec, n_max, cfg.cap)?;
    let mut checks = Vec::new();

    // Closed forms match enumeration-derived orders at small depth.
    let compare_to = n_max.min(4);
    let mut agree = true;
    for n in 1..=compare_to {
        if let Some(order) = spec.order_at(n).map_err(SuiteError::from)? {
            let built = spec.build(n, cfg.cap);
            if let Ok(built) = built {
                if let Some(group) = built.group {
                    if BigUint::from(group.len()) != order {
                        agree = false;
                    }
                }
            }
        }
    }
    checks.push(Check::boolean(
        "closed-form-matches-enumeration",
        agree,
        format!("levels 1..={compare_to}"),
    ));

    let last = points.last().expect("n_max >= 1");
    if d == 2 {
        checks.push(Check::within(
            &format!("ratio-at-{n_max}"),
            0.5,
            last.ratio,
            1e-5,
        ));
    } else {
        checks.push(Check::info(
            &format!("ratio-at-{n_max}"),
            format!("{} (constant reported, not asserted)", last.ratio),
        ));
    }

    let report = HdimReport::new(ReportHeader::new("hdim", &spec, n_max, cfg.seed), &points);
    Ok(SuiteOutput {
        checks,
        reports: vec![("hdim".to_string(), report.to_csv(), to_json(&report))],
    })
}

/// Renders the check list itself as a JSON report document.
pub fn checks_json(suite: &str, cfg: &Config, checks: &[Check]) -> String {
    #[derive(serde::Serialize)]
    struct ChecksReport<'a> {
        schema: &'static str,
        tool_version: &'static str,
        suite: &'a str,
        seed: u64,
        trials: u64,
        cap: usize,
        checks: &'a [Check],
    }
    let mut s = serde_json::to_string_pretty(&ChecksReport {
        schema: "suite-checks",
        tool_version: adictree::TOOL_VERSION,
        suite,
        seed: cfg.seed,
        trials: cfg.trials,
        cap: cfg.cap,
        checks,
    })
    .expect("checks serialization");
    s.push('\n');
    s
}
