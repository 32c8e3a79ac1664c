//! One function per subcommand. Each returns a report; errors are input or
//! usage problems, failed checks are recorded in the report itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use tilescope_core::align::{alignment_graph, connectivity, displacement_identity_check, AlignmentGraph, PathTree};
use tilescope_core::fusion::{parse_rule, validate_rule, FusionRule, Node, Patch, DEFAULT_TILE_BUDGET};
use tilescope_core::shear::{
    build_window_catalog, discrepancy, find_fault_lines, gcd_report, letter_widths, log_slope, offsets, shear_witness,
    synthetic_max, window, OffsetIndex, OffsetSet, WitnessResult,
};
use tilescope_core::spectra::{return_vectors, spectrum_scan, CochainSpec};
use tilescope_core::subst::{eigenvalues, h1_report, Root, Substitution, EIGEN_TOLERANCE};
use tilescope_core::{bundled, Rational, Scalar};

use crate::acceptance;
use crate::render::{count_class, parse_palette, render_svg, Overlay, RenderSpec, DEFAULT_PIXEL_BUDGET};
use crate::report::{sha256_hex, ReportDocument, SourceIdentity};

/// Environment variable overriding the default tile budget.
pub const BUDGET_ENV: &str = "TILESCOPE_TILE_BUDGET";

/// Tile budget: the flag, else the environment, else the library default.
pub fn tile_budget(flag: Option<u64>) -> Result<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("{BUDGET_ENV}={v:?} is not a tile count")),
        Err(_) => Ok(DEFAULT_TILE_BUDGET),
    }
}

/// A bundled rule name or a path to a `.rule` file.
pub fn load_rule(spec: &str) -> Result<(Arc<FusionRule>, SourceIdentity)> {
    let text = match bundled::rule_source(spec) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(spec)
            .with_context(|| format!("--rule {spec}: not a bundled rule and not a readable file"))?,
    };
    let rule = parse_rule(&text).with_context(|| format!("--rule {spec}"))?;
    Ok((Arc::new(rule), SourceIdentity::new(spec, &text)))
}

/// A bundled substitution name or a path to a `.subst` file.
pub fn load_subst(spec: &str) -> Result<(Substitution, SourceIdentity)> {
    let text = match bundled::subst_source(spec) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(spec)
            .with_context(|| format!("--subst {spec}: not a bundled substitution and not a readable file"))?,
    };
    let s = Substitution::parse(&text).with_context(|| format!("--subst {spec}"))?;
    Ok((s, SourceIdentity::new(spec, &text)))
}

fn label_index(rule: &FusionRule, label: &str) -> Result<usize> {
    rule.label_index(label).ok_or_else(|| anyhow!("--label {label}: the rule has no such label"))
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Decimal for approximate values; tiny magnitudes print as 0.
pub fn decimal(v: f64, digits: usize) -> String {
    let s = format!("{v:.digits$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        format!("{:.digits$}", 0.0)
    } else {
        s
    }
}

fn node_json(rule: &FusionRule, n: &Node) -> Value {
    json!({
        "label": rule.label_name(n.label),
        "level": n.level,
        "x": n.x,
        "y": n.y,
        "width": n.width,
        "height": n.height,
    })
}

fn parse_point(flag: &str, text: &str) -> Result<(i64, i64)> {
    let (a, b) = text.split_once(',').ok_or_else(|| anyhow!("{flag} {text}: expected x,y"))?;
    let p = |s: &str| s.trim().parse::<i64>().map_err(|_| anyhow!("{flag} {text}: expected integers"));
    Ok((p(a)?, p(b)?))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BuildArgs {
    /// Bundled rule name or path to a .rule file
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    #[arg(long, default_value = "a")]
    pub label: String,
    /// Supertile level
    #[arg(long)]
    pub n: u32,
    /// Maximum number of unit tiles to materialize
    #[arg(long)]
    pub budget: Option<u64>,
    /// Also write the label grid here, top row first
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

pub fn build(args: &BuildArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let t = label_index(&rule, &args.label)?;
    let patch = Patch::build(Arc::clone(&rule), t, args.n, tile_budget(args.budget)?)?;
    let grid = patch.grid()?;
    let (w, h) = (patch.width(), patch.height());
    let mut counts = vec![0u128; rule.labels.len()];
    for &l in grid {
        counts[l as usize] += 1;
    }
    let from_tree = patch.label_counts(0)?;
    let mut report = ReportDocument::new("build", Some(id), params(args));
    report.require(grid.len() as u128 == (w * h) as u128, "grid size differs from width x height");
    report.require(counts == from_tree, "painted label counts differ from the fusion tree counts");
    let levels: Vec<Value> =
        (0..=args.n).map(|m| json!({"level": m, "supertiles": patch.nodes_at_level(m).map(|v| v.len()).unwrap_or(0)})).collect();
    report.result = json!({
        "label": args.label,
        "level": args.n,
        "width": w.to_string(),
        "height": h.to_string(),
        "tiles": patch.tile_count().to_string(),
        "label_counts": rule.labels.iter().zip(&counts).map(|(l, c)| (l.0.clone(), c.to_string())).collect::<BTreeMap<_, _>>(),
        "levels": levels,
    });
    if let Some(path) = &args.grid {
        let names: Vec<char> = rule.labels.iter().map(|l| l.0.chars().next().unwrap_or('?')).collect();
        let mut text = String::new();
        for y in (0..h).rev() {
            text.extend(grid[(y * w) as usize..((y + 1) * w) as usize].iter().map(|&l| names[l as usize]));
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    /// Check every level up to this one
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
}

pub fn validate(args: &ValidateArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let v = validate_rule(&rule, args.depth)?;
    let mut report = ReportDocument::new("validate", Some(id), params(args));
    for violation in &v.violations {
        report.require(false, violation.to_string());
    }
    report.result = serde_json::to_value(&v)?;
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SizesArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    /// Largest level
    #[arg(long, default_value_t = 30)]
    pub n: u32,
    /// Extra moduli for the residue table (3 is always included)
    #[arg(long, value_delimiter = ',')]
    pub moduli: Vec<u64>,
}

pub fn sizes(args: &SizesArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let mut report = ReportDocument::new("sizes", Some(id), params(args));
    let names: Vec<&str> = rule.lengths.iter().map(|l| l.name.as_str()).collect();
    let mut rows = Vec::new();
    for n in 0..=args.n {
        let g = gcd_report(&rule, n, &args.moduli);
        report.require(g.coprime(), format!("symbol values share the factor {} at level {n}", g.gcd));
        let values: BTreeMap<&str, String> = names.iter().copied().zip(g.values.iter().map(|v| v.to_string())).collect();
        let residues: BTreeMap<String, BTreeMap<&str, u64>> = g
            .residues
            .iter()
            .map(|(p, r)| (p.to_string(), names.iter().copied().zip(r.iter().copied()).collect()))
            .collect();
        rows.push(json!({"level": n, "values": values, "gcd": g.gcd.to_string(), "residues": residues}));
    }
    let mut result = json!({"symbols": names, "rows": rows});
    if names.len() >= 2 {
        let v = rule.symbol_values(args.n);
        let ratio = Rational::new(v[0].clone(), v[1].clone());
        result["ratio"] = json!({
            "of": format!("{}/{}", names[0], names[1]),
            "exact": ratio.to_string(),
            "approx": decimal(ratio.approx(), 12),
        });
    }
    report.result = result;
    Ok(report)
}

fn root_json(r: &Root<f64>) -> Value {
    json!({
        "re": decimal(r.value.re, 12),
        "im": decimal(r.value.im, 12),
        "error_bound": format!("{:.1e}", r.radius.max(0.0)),
        "multiplicity": r.multiplicity,
        "exact": r.exact.as_ref().map(|q| q.to_string()),
        "root_of_unity": r.unit,
    })
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CohomologyArgs {
    /// Bundled substitution name or path to a .subst file
    #[arg(long, default_value = "north")]
    pub subst: String,
    /// Letter generating the language (default: the first letter)
    #[arg(long)]
    pub seed: Option<char>,
}

pub fn cohomology(args: &CohomologyArgs) -> Result<ReportDocument> {
    let (s, id) = load_subst(&args.subst)?;
    let seed = match args.seed {
        Some(c) => s.letter(c).map_err(|_| anyhow!("--seed {c}: not a letter of the substitution"))?,
        None => 0,
    };
    let r = h1_report(&s, seed)?;
    let mut report = ReportDocument::new("cohomology", Some(id), params(args));
    report.require(!r.ambiguous, "an induced eigenvalue could not be separated from the unit circle");
    let matrix: Vec<Vec<String>> = r.matrix.rows().iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect();
    report.result = json!({
        "alphabet": s.alphabet().iter().collect::<String>(),
        "abelianization": matrix,
        "char_poly": r.char_poly.to_string(),
        "eigenvalues": r.eigenvalues.iter().map(root_json).collect::<Vec<_>>(),
        "eigenvalue_tolerance": format!("{EIGEN_TOLERANCE:.0e}"),
        "rank": r.rank,
        "stable_rank": r.stable_rank,
        "bd": {
            "order": r.order,
            "period": r.period,
            "edges": r.graph.edge_names(&s),
            "components": r.graph.components,
            "cycles": r.graph.cycles,
        },
        "cycle_poly": r.cycle_poly.to_string(),
        "cycle_eigenvalues": r.cycle_eigenvalues.iter().map(root_json).collect::<Vec<_>>(),
        "h1_rank": r.h1_rank,
        "an_dimension": r.an_dimension,
    });
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiscrepancyArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    /// Dynamics just above a fault line
    #[arg(long, default_value = "north")]
    pub north: String,
    /// Dynamics just below a fault line
    #[arg(long, default_value = "south")]
    pub south: String,
    /// Supertile level whose widths lay out the words
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    #[arg(long, default_value_t = 20)]
    pub k_max: u32,
    #[arg(long, default_value_t = 6)]
    pub fit_lo: u32,
    #[arg(long, default_value_t = 14)]
    pub fit_hi: u32,
    /// Also scan the real fault lines of P_N(label) at `level`
    #[arg(long)]
    pub patch_level: Option<u32>,
    #[arg(long, default_value = "a")]
    pub label: String,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write `k,max_abs` rows here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Second largest eigenvalue modulus of the abelianization.
pub fn second_modulus(s: &Substitution) -> Result<f64> {
    let mut moduli: Vec<f64> =
        eigenvalues(&s.abelianization().char_poly(), EIGEN_TOLERANCE)?.iter().map(|r| r.modulus()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.get(1).copied().ok_or_else(|| anyhow!("substitution has a single letter"))
}

pub fn discrepancy_cmd(args: &DiscrepancyArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let (north, _) = load_subst(&args.north)?;
    let (south, _) = load_subst(&args.south)?;
    if north.len() != rule.labels.len() || south.len() != rule.labels.len() {
        bail!("--north/--south must have one letter per rule label");
    }
    if args.fit_lo >= args.fit_hi || args.fit_hi > args.k_max {
        bail!("--fit-lo and --fit-hi must satisfy fit_lo < fit_hi <= k_max");
    }
    let widths = letter_widths(&rule, args.level)?;
    let wide = rule.wide_labels(args.level);
    let mut maxima = Vec::new();
    for k in 0..=args.k_max {
        maxima.push((k, synthetic_max(&north, &south, &widths, &wide, k)?));
    }
    let fit: Vec<(u32, u64)> = maxima.iter().copied().filter(|&(k, _)| k >= args.fit_lo && k <= args.fit_hi).collect();
    let slope = log_slope(&fit);
    let expected = second_modulus(&north)?.ln();
    let monotone = maxima.windows(2).all(|w| w[0].1 <= w[1].1);
    let mut report = ReportDocument::new("discrepancy", Some(id), params(args));
    report.require(monotone, "synthetic maxima decrease somewhere");
    let mut result = json!({
        "maxima": maxima.iter().map(|&(k, m)| json!({"k": k, "max_abs": m})).collect::<Vec<_>>(),
        "slope": decimal(slope, 6),
        "expected_slope": decimal(expected, 6),
        "slope_ratio": decimal(slope / expected, 4),
        "monotone": monotone,
    });
    if let Some(n) = args.patch_level {
        let t = label_index(&rule, &args.label)?;
        let patch = Patch::build(Arc::clone(&rule), t, n, tile_budget(args.budget)?)?;
        let lines = find_fault_lines(&patch, args.level, 0)?;
        let mut best = (0u64, 0i64, 0i64);
        for line in &lines {
            let p = discrepancy(&rule, line, false)?;
            if p.max_abs > best.0 {
                best = (p.max_abs, line.y, p.argmax);
            }
        }
        result["fault_lines"] =
            json!({"count": lines.len(), "max_abs": best.0, "at": {"y": best.1, "x": best.2}});
    }
    report.result = result;
    if let Some(path) = &args.csv {
        let mut text = String::from("k,max_abs\n");
        for (k, m) in &maxima {
            let _ = writeln!(text, "{k},{m}");
        }
        write_file(path, &text)?;
    }
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OffsetsArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    #[arg(long, default_value = "a")]
    pub label: String,
    /// Level of the facing supertiles
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 12)]
    pub max_level: u32,
    /// Cross-check levels up to this one against a scan of every fault line
    #[arg(long)]
    pub brute_level: Option<u32>,
    #[arg(long)]
    pub budget: Option<u64>,
}

pub fn offset_set_json(set: &OffsetSet) -> Value {
    json!({
        "distinct": set.offsets.len(),
        "offsets": set.distinct(),
        "residues_wide": set.residues_wide,
        "residues_narrow": set.residues_narrow,
    })
}

/// Offsets of `P_n(t)` from every fault line of the materialized patch.
pub fn fault_scan_offsets(rule: &Arc<FusionRule>, t: usize, n: u32, m: u32, budget: u64) -> Result<OffsetSet> {
    let patch = Patch::build(Arc::clone(rule), t, n, budget)?;
    let mut set = OffsetSet::new(rule, m)?;
    for line in find_fault_lines(&patch, m, 0)? {
        set.merge(&offsets(rule, &line, m)?);
    }
    Ok(set)
}

pub fn offsets_cmd(args: &OffsetsArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let t = label_index(&rule, &args.label)?;
    if args.max_level <= args.m {
        bail!("--max-level must exceed --m");
    }
    let index = OffsetIndex::build(Arc::clone(&rule), args.m, args.max_level)?;
    let mut report = ReportDocument::new("offsets", Some(id), params(args));
    let mut levels = Vec::new();
    let mut previous: Option<BTreeSet<i64>> = None;
    let budget = tile_budget(args.budget)?;
    for n in args.m + 1..=args.max_level {
        let set = index.offsets_in(t, n)?;
        let now = set.distinct();
        if let Some(prev) = &previous {
            report.require(prev.is_subset(&now), format!("offsets of level {} are lost at level {n}", n - 1));
        }
        let mut row = offset_set_json(&set);
        row["level"] = json!(n);
        if args.brute_level.is_some_and(|b| n <= b) {
            let brute = fault_scan_offsets(&rule, t, n, args.m, budget)?;
            report.require(brute.distinct() == now, format!("fault-line scan disagrees at level {n}"));
            row["fault_scan_agrees"] = json!(brute.distinct() == now);
        }
        levels.push(row);
        previous = Some(now);
    }
    let table = rule.level_table(args.m)?;
    let widths: Vec<i64> = (0..rule.labels.len()).map(|l| table.dims(l, args.m).0).collect();
    report.result = json!({
        "m": args.m,
        "wide_width": widths.iter().max(),
        "narrow_width": widths.iter().min(),
        "levels": levels,
    });
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShearWitnessArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    /// Offsets to certify (default: 0 and every offset realized up to --max-level)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub offsets: Vec<i64>,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Window radius
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
    /// Junctions are searched in supertiles up to this level
    #[arg(long, default_value_t = 8)]
    pub max_level: u32,
    /// Windows are harvested from supertiles up to this level
    #[arg(long, default_value_t = 8)]
    pub catalog_level: u32,
    /// Level of the fault lines the windows are harvested from
    #[arg(long, default_value_t = 1)]
    pub fault_level: u32,
}

/// Witness search for each offset, with every window re-read from both the
/// host supertile and its recorded source.
pub fn witness_json(rule: &Arc<FusionRule>, result: &WitnessResult, r: u32) -> Result<(bool, Value)> {
    match result {
        WitnessResult::Found(w) => {
            let host = Patch::build(Arc::clone(rule), w.host_label, w.host_level, DEFAULT_TILE_BUDGET)?;
            let j = w.junction;
            let lo = j.x_above.min(j.x_below);
            let mut legal = true;
            for (i, prov) in w.windows.iter().enumerate() {
                let seen = window(&host, lo + i as i64 + w.host_dx, j.y + w.host_dy, r);
                let source = Patch::lazy(Arc::clone(rule), prov.label, prov.level, DEFAULT_TILE_BUDGET)?;
                legal &= seen.is_some() && window(&source, prov.x, prov.y, r) == seen;
            }
            Ok((
                legal,
                json!({
                    "offset": w.offset,
                    "found": true,
                    "legal": legal,
                    "junction": {
                        "label": rule.label_name(j.label),
                        "level": j.level,
                        "y": j.y,
                        "x_above": j.x_above,
                        "x_below": j.x_below,
                        "above": rule.label_name(j.above),
                        "below": rule.label_name(j.below),
                    },
                    "host": {"label": rule.label_name(w.host_label), "level": w.host_level, "dx": w.host_dx, "dy": w.host_dy},
                    "windows": w.windows.len(),
                    "first_source": w.windows.first().map(|p| json!({
                        "label": rule.label_name(p.label), "level": p.level, "x": p.x, "y": p.y,
                    })),
                }),
            ))
        }
        WitnessResult::NotFound { offset, max_level, candidates } => Ok((
            false,
            json!({"offset": offset, "found": false, "searched_to_level": max_level, "candidates": candidates}),
        )),
    }
}

pub fn shear_witness_cmd(args: &ShearWitnessArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    if args.max_level <= args.m || args.catalog_level <= args.fault_level {
        bail!("--max-level must exceed --m and --catalog-level must exceed --fault-level");
    }
    let index = OffsetIndex::build(Arc::clone(&rule), args.m, args.max_level)?;
    let wanted: BTreeSet<i64> = if args.offsets.is_empty() {
        let mut all: BTreeSet<i64> = [0].into();
        for t in 0..rule.labels.len() {
            all.extend(index.offsets_in(t, args.max_level)?.distinct());
        }
        all
    } else {
        args.offsets.iter().copied().collect()
    };
    let catalog = build_window_catalog(&rule, args.radius, args.catalog_level, args.fault_level)?;
    let mut report = ReportDocument::new("shear-witness", Some(id), params(args));
    let mut rows = Vec::new();
    for &s in &wanted {
        let found = shear_witness(&index, &catalog, &rule, s)?;
        let (ok, row) = witness_json(&rule, &found, args.radius)?;
        report.require(ok, format!("no legal witness for offset {s}"));
        rows.push(row);
    }
    report.result = json!({
        "catalog_windows": catalog.len(),
        "catalog_warnings": catalog.warnings,
        "certifies": format!(
            "each offset is realized at level {} with every radius-{} window seen in some supertile of level <= {}",
            args.m, args.radius, args.catalog_level
        ),
        "witnesses": rows,
    });
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    #[arg(long, default_value = "a")]
    pub label: String,
    #[arg(long, default_value_t = 9)]
    pub n: u32,
    /// Template size is 2*rho+1
    #[arg(long, default_value_t = 50)]
    pub rho: u32,
    #[arg(long, default_value_t = -2.5, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.5, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tol: f64,
    /// Limit on occurrence pairs examined
    #[arg(long, default_value_t = 4_000_000_000)]
    pub pair_budget: u64,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write the survivors as `x,y` rows here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let t = label_index(&rule, &args.label)?;
    let patch = Patch::build(Arc::clone(&rule), t, args.n, tile_budget(args.budget)?)?;
    let set = return_vectors(&patch, args.rho, args.pair_budget)?;
    let scan = spectrum_scan(&set, args.lo, args.hi, args.step, args.tol)?;
    let survivors: BTreeSet<(usize, usize)> = scan.survivors.iter().copied().collect();
    // grid indices of the integer points in the box
    let integer_indices: Vec<usize> = (0..scan.points_per_axis)
        .filter(|&i| (scan.coordinate(i) - scan.coordinate(i).round()).abs() < args.step / 2.0)
        .collect();
    let all_integers = integer_indices.iter().all(|&i| integer_indices.iter().all(|&j| survivors.contains(&(i, j))));
    let dist = scan.max_distance_to_integers();
    let mut report = ReportDocument::new("spectrum", Some(id), params(args));
    report.require(all_integers, "an integer point was eliminated");
    report.result = json!({
        "return_vectors": set.len(),
        "grid_points": scan.points_per_axis * scan.points_per_axis,
        "survivors": scan.survivor_points().map(|(x, y)| [decimal(x, 2), decimal(y, 2)]).collect::<Vec<_>>(),
        "integer_points_survive": all_integers,
        "max_distance_to_integers": decimal(dist, 4),
    });
    if let Some(path) = &args.csv {
        let mut text = String::from("x,y\n");
        for (x, y) in scan.survivor_points() {
            let _ = writeln!(text, "{},{}", decimal(x, 2), decimal(y, 2));
        }
        write_file(path, &text)?;
    }
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AlignArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    #[arg(long, default_value = "a")]
    pub label: String,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    /// Level of the supertiles forming the graph
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Lower-left corner `x,y` of the start supertile (default: the origin)
    #[arg(long)]
    pub from: Option<String>,
    /// Lower-left corner `x,y` of the end supertile (default: the farthest one
    /// with the start's label)
    #[arg(long)]
    pub to: Option<String>,
    /// Coefficients of the linear form checked along the path
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub mu: i64,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub nu: i64,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Also render the patch with the path overlaid
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub scale: u32,
}

/// Start and end supertiles of the default path: the one at the origin and
/// the same-label supertile farthest from it.
pub fn default_endpoints(g: &AlignmentGraph) -> Option<(usize, usize)> {
    let s = g.node_with_corner(0, 0)?;
    let label = g.nodes[s].label;
    let t = (0..g.nodes.len()).filter(|&i| g.nodes[i].label == label).max_by_key(|&i| (g.nodes[i].x + g.nodes[i].y, g.nodes[i].x))?;
    Some((s, t))
}

pub fn align(args: &AlignArgs) -> Result<ReportDocument> {
    let (rule, id) = load_rule(&args.rule)?;
    let t = label_index(&rule, &args.label)?;
    if args.m >= args.n {
        bail!("--m must be below --n");
    }
    let patch = Patch::build(Arc::clone(&rule), t, args.n, tile_budget(args.budget)?)?;
    let g = alignment_graph(&patch, args.m)?;
    let c = connectivity(&g);
    let mut report = ReportDocument::new("align", Some(id), params(args));
    report.require(c.is_connected, format!("alignment graph has {} components", c.components));
    let corner = |flag: &str, text: &Option<String>| -> Result<Option<usize>> {
        let Some(text) = text else { return Ok(None) };
        let (x, y) = parse_point(flag, text)?;
        g.node_with_corner(x, y).map(Some).ok_or_else(|| anyhow!("{flag} {text}: no level-{} supertile has that corner", args.m))
    };
    let (default_s, default_t) = default_endpoints(&g).ok_or_else(|| anyhow!("empty alignment graph"))?;
    let s = corner("--from", &args.from)?.unwrap_or(default_s);
    let target = corner("--to", &args.to)?.unwrap_or(default_t);
    let tree = PathTree::new(&g, s)?;
    let mut result = json!({
        "graph": {"level": g.level, "nodes": g.nodes.len(), "edges": g.edges.len(), "connected": c.is_connected, "components": c.components},
    });
    let mut overlay = None;
    match tree.path_to(target) {
        None => {
            report.require(false, "no aligned path between the endpoints");
            result["path"] = Value::Null;
        }
        Some(path) => {
            let r = |v: i64| Rational::from_integer(BigInt::from(v));
            let form = CochainSpec::linear(r(args.mu), r(args.nu));
            let identity = if g.nodes[s].label == g.nodes[target].label {
                let d = displacement_identity_check(&form, (r(args.mu), r(args.nu)), &patch, &g, &path)?;
                report.require(d.holds(), "displacement identity fails along the path");
                json!({
                    "expected": d.expected.to_string(),
                    "integral": d.integral.as_ref().map(|v| v.to_string()),
                    "error": d.error,
                    "holds": d.holds(),
                })
            } else {
                Value::Null
            };
            result["path"] = json!({
                "nodes": path.nodes.iter().map(|&i| node_json(&rule, &g.nodes[i])).collect::<Vec<_>>(),
                "lattice": path.lattice,
                "length": path.length(),
                "displacement": identity,
            });
            overlay = Some(path.lattice);
        }
    }
    report.result = result;
    if let Some(svg_path) = &args.svg {
        let mut spec = RenderSpec::new(rule.labels.len());
        spec.scale = args.scale;
        if args.m > 0 {
            spec.outlines.push((args.m, 1.5));
        }
        if let Some(points) = overlay {
            spec.overlays.push(Overlay::Path { points, stroke: 4.0 });
        }
        write_file(svg_path, &render_svg(&patch, &spec)?)?;
    }
    Ok(report)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RenderArgs {
    #[arg(long, default_value = "frank-dpv")]
    pub rule: String,
    #[arg(long, default_value = "a")]
    pub label: String,
    #[arg(long)]
    pub n: u32,
    /// Supertile levels to outline, e.g. `1,2`
    #[arg(long, value_delimiter = ',')]
    pub outline: Vec<u32>,
    /// Outline stroke width in pixels; doubles per level
    #[arg(long, default_value_t = 1.0)]
    pub outline_width: f64,
    /// Overlay the fault lines of this level
    #[arg(long)]
    pub faults: Option<u32>,
    /// Overlay the default aligned path between supertiles of this level
    #[arg(long)]
    pub path_level: Option<u32>,
    /// Colour overrides, e.g. `a=#000000,d=#ffffff`
    #[arg(long)]
    pub palette: Option<String>,
    /// Pixels per tile edge
    #[arg(long, default_value_t = 8)]
    pub scale: u32,
    #[arg(long, default_value_t = DEFAULT_PIXEL_BUDGET)]
    pub pixel_budget: u64,
    #[arg(long)]
    pub budget: Option<u64>,
    /// SVG destination; without it the SVG goes to stdout and the report only
    /// to --out
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Renders and reports element counts next to the fusion tree counts.
pub fn render_patch(args: &RenderArgs) -> Result<(String, ReportDocument)> {
    let (rule, id) = load_rule(&args.rule)?;
    let t = label_index(&rule, &args.label)?;
    let patch = Patch::build(Arc::clone(&rule), t, args.n, tile_budget(args.budget)?)?;
    let labels: Vec<String> = rule.labels.iter().map(|l| l.0.clone()).collect();
    let mut spec = RenderSpec::new(labels.len());
    if let Some(p) = &args.palette {
        spec.palette = parse_palette(p, &labels).context("--palette")?;
    }
    spec.scale = args.scale;
    spec.pixel_budget = args.pixel_budget;
    let outline_levels: BTreeSet<u32> = args.outline.iter().copied().collect();
    spec.outlines = outline_levels.iter().map(|&l| (l, args.outline_width * f64::from(1 << l.min(8)))).collect();
    if let Some(level) = args.faults {
        spec.overlays.push(Overlay::FaultLines { level, stroke: 2.0 });
    }
    if let Some(level) = args.path_level {
        if level >= args.n {
            bail!("--path-level must be below --n");
        }
        let g = alignment_graph(&patch, level)?;
        let (s, target) = default_endpoints(&g).ok_or_else(|| anyhow!("empty alignment graph"))?;
        let path = PathTree::new(&g, s)?.path_to(target).ok_or_else(|| anyhow!("no aligned path to draw"))?;
        spec.overlays.push(Overlay::Path { points: path.lattice, stroke: 4.0 });
    }
    let svg = render_svg(&patch, &spec).context("render")?;
    let mut report = ReportDocument::new("render", Some(id), params(args));
    let tiles = count_class(&svg, "tile");
    report.require(tiles as u128 == patch.tile_count(), "tile element count differs from the patch area");
    let mut outlines = BTreeMap::new();
    for &level in &outline_levels {
        let drawn = count_class(&svg, &format!("outline level-{level}"));
        let nodes = patch.nodes_at_level(level)?.len();
        report.require(drawn == nodes, format!("level-{level} outlines differ from the supertile count"));
        outlines.insert(level.to_string(), json!({"drawn": drawn, "supertiles": nodes}));
    }
    report.result = json!({
        "width_px": patch.width() * i64::from(args.scale),
        "height_px": patch.height() * i64::from(args.scale),
        "tiles": tiles,
        "area": patch.tile_count().to_string(),
        "outlines": outlines,
        "fault_lines": count_class(&svg, "fault"),
        "paths": count_class(&svg, "path"),
        "svg_sha256": sha256_hex(svg.as_bytes()),
    });
    Ok((svg, report))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReportAllArgs {
    /// Run only these criteria (default: all)
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}

pub fn report_all(args: &ReportAllArgs, timing: bool) -> Result<ReportDocument> {
    let ids: Vec<u8> = if args.only.is_empty() { acceptance::CRITERIA.iter().map(|c| c.id).collect() } else { args.only.clone() };
    for &i in &ids {
        if acceptance::criterion(i).is_none() {
            bail!("--only {i}: no such criterion");
        }
    }
    let mut report = ReportDocument::new("report-all", None, params(args));
    let mut rows = Vec::new();
    for &i in &ids {
        let outcome = acceptance::run(i);
        eprintln!("{}", outcome.line());
        report.require(outcome.passed, format!("criterion {i}: {}", outcome.title));
        let mut row = json!({"id": i, "title": outcome.title, "passed": outcome.passed, "checks": outcome.checks});
        if timing {
            row["seconds"] = json!(decimal(outcome.elapsed.as_secs_f64(), 2));
            row["limit_seconds"] = json!(outcome.limit.as_secs());
        }
        rows.push(row);
    }
    report.result = json!({ "criteria": rows });
    Ok(report)
}
