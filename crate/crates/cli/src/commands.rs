use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;
use shadowvc::analysis::{
    bit_balance, naive_otp_baseline, share_indistinguishability, simulate_known_rng_attack,
    BitPlaneStats, IndistinguishabilityReport, NaiveShare, RecoveryReport, TrialSource,
    CRITICAL_1DOF,
};
use shadowvc::bitwise::HeldShare;
use shadowvc::io::{encode_image, load_image, ImageFormat};
use shadowvc::manifest::{manifest_path_for, read_manifest, ShareManifest};
use shadowvc::{RandomnessContext, RasterImage, SplitRequest};

use crate::args::{AnalyzeArgs, AttackArgs, CombineArgs, HeldArg, SplitArgs};
use crate::{warn_deterministic, CliError, ExitCode};

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub shares: Vec<PathBuf>,
    pub manifests: Vec<PathBuf>,
}

pub fn split(args: &SplitArgs) -> Result<SplitOutcome, CliError> {
    let mut ctx = match &args.seed {
        Some(seed) => {
            warn_deterministic();
            RandomnessContext::deterministic(seed.clone())
        }
        None => RandomnessContext::os_entropy(),
    };
    split_with_context(args, &mut ctx)
}

/// Runs a split with a caller-supplied context (the `seed` flag is
/// ignored). The context is wiped before returning, on success and failure.
pub fn split_with_context(
    args: &SplitArgs,
    ctx: &mut RandomnessContext,
) -> Result<SplitOutcome, CliError> {
    let result = run_split(args, ctx);
    ctx.wipe();
    result
}

fn run_split(args: &SplitArgs, ctx: &RandomnessContext) -> Result<SplitOutcome, CliError> {
    if args.shares < 2 {
        return Err(CliError::usage(format!(
            "--shares must be at least 2, got {}\n\nUsage: shadowvc split <INPUT> --shares <N> --out-dir <DIR>",
            args.shares
        )));
    }
    let source = load_image(&args.input)?;
    let set = shadowvc::split_n(&SplitRequest {
        source: &source,
        total_shares: args.shares,
        rng: ctx,
        link_shares: args.link,
    })?;
    if shadowvc::combine(set.shares())? != source {
        return Err(CliError::internal("shares do not XOR back to the source"));
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| io_error(&args.out_dir, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".shadowvc-split-")
        .tempdir_in(&args.out_dir)
        .map_err(|e| io_error(&args.out_dir, e))?;

    let mut staged = Vec::new();
    for (k, (share, manifest)) in set.shares().iter().zip(set.manifests()).enumerate() {
        let name = format!("share_{k}.png");
        let image_path = staging.path().join(&name);
        let bytes = encode_image(share, &image_path)?;
        fs::write(&image_path, &bytes).map_err(|e| io_error(&image_path, e))?;
        // every share must decode to exactly what was produced
        if &load_image(&image_path)? != share {
            return Err(CliError::internal(format!(
                "{name} does not reload bit-exactly"
            )));
        }
        let manifest_path = manifest_path_for(&image_path);
        shadowvc::manifest::write_manifest(manifest, &manifest_path)?;
        staged.push(image_path);
        staged.push(manifest_path);
    }

    let mut placed: Vec<PathBuf> = Vec::new();
    for from in &staged {
        let to = args
            .out_dir
            .join(from.file_name().expect("staged file has a name"));
        if let Err(e) = fs::rename(from, &to) {
            for p in &placed {
                let _ = fs::remove_file(p);
            }
            return Err(io_error(&to, e));
        }
        placed.push(to);
    }
    let (shares, manifests) = placed
        .chunks(2)
        .map(|p| (p[0].clone(), p[1].clone()))
        .unzip();
    eprintln!(
        "wrote {} shares of {} to {}",
        args.shares,
        source.geometry(),
        args.out_dir.display()
    );
    Ok(SplitOutcome { shares, manifests })
}

pub fn combine(args: &CombineArgs) -> Result<(), CliError> {
    if args.shares.len() < 2 {
        return Err(CliError::usage(format!(
            "combine needs at least 2 shares, got {}",
            args.shares.len()
        )));
    }
    let mut images = Vec::with_capacity(args.shares.len());
    for path in &args.shares {
        let img = load_image(path)?;
        if let Some(first) = images.first().map(RasterImage::geometry) {
            if img.geometry() != first {
                return Err(CliError::new(
                    ExitCode::Io,
                    format!(
                        "{}: geometry {} does not match {} of {}",
                        path.display(),
                        img.geometry(),
                        first,
                        args.shares[0].display()
                    ),
                ));
            }
        }
        images.push(img);
    }
    check_manifests(&args.shares, &images)?;

    let restored = shadowvc::combine(&images)?;
    write_atomically(&restored, &args.output)?;
    eprintln!(
        "combined {} shares into {}",
        images.len(),
        args.output.display()
    );
    Ok(())
}

fn check_manifests(paths: &[PathBuf], images: &[RasterImage]) -> Result<(), CliError> {
    let mismatch = |path: &Path, why: String| {
        CliError::new(ExitCode::Io, format!("{}: {why}", path.display()))
    };
    let mut found: Vec<(&PathBuf, ShareManifest)> = Vec::new();
    let mut missing = Vec::new();
    for (path, img) in paths.iter().zip(images) {
        let sidecar = manifest_path_for(path);
        if !sidecar.exists() {
            missing.push(path);
            continue;
        }
        let m = read_manifest(&sidecar)?;
        m.check_geometry(img.geometry())
            .map_err(|e| mismatch(path, e.to_string()))?;
        found.push((path, m));
    }
    if found.is_empty() {
        eprintln!(
            "warning: no share manifests found; combining as bare images. \
             A wrong or incomplete share set yields noise, not an error."
        );
        return Ok(());
    }
    for path in &missing {
        eprintln!("warning: {}: no manifest beside this share", path.display());
    }

    let (first_path, first) = &found[0];
    let mut indices = HashSet::new();
    for (path, m) in &found {
        if m.total_shares != first.total_shares {
            return Err(mismatch(
                path,
                format!(
                    "belongs to a {}-share set but {} belongs to a {}-share set",
                    m.total_shares,
                    first_path.display(),
                    first.total_shares
                ),
            ));
        }
        if m.group_id != first.group_id {
            return Err(mismatch(
                path,
                "group_id differs from the other shares".into(),
            ));
        }
        if !indices.insert(m.share_index) {
            return Err(mismatch(
                path,
                format!("duplicate share_index {}", m.share_index),
            ));
        }
    }
    if missing.is_empty() && first.total_shares != paths.len() {
        return Err(mismatch(
            first_path,
            format!(
                "manifest lists {} shares but {} were given",
                first.total_shares,
                paths.len()
            ),
        ));
    }
    Ok(())
}

fn write_atomically(img: &RasterImage, path: &Path) -> Result<(), CliError> {
    ImageFormat::from_path(path)?;
    let bytes = encode_image(img, path)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(&bytes).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ExitCode, CliError> {
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let image = load_image(&args.image)?;
    let balance = bit_balance(&image);
    print_balance(&args.image, &balance);
    let mut passes = balance.passes();

    let mut indist = None;
    if let Some(other_path) = &args.other {
        let other = load_image(other_path)?;
        let source = match &args.seed {
            Some(seed) => {
                warn_deterministic();
                TrialSource::Deterministic(seed.clone())
            }
            None => TrialSource::OsEntropy,
        };
        let report = share_indistinguishability(&image, &other, args.trials, &source)?;
        print_indistinguishability(&report);
        passes &= report.passes();
        indist = Some(report);
    }

    if let Some(path) = &args.report {
        let doc = json!({
            "image": args.image.display().to_string(),
            "bit_balance": {
                "pixels": balance.pixels,
                "critical": CRITICAL_1DOF,
                "passes": balance.passes(),
                "planes": balance.planes,
            },
            "indistinguishability": indist.as_ref().map(|r| json!({
                "other": args.other.as_ref().map(|p| p.display().to_string()),
                "trials": r.trials,
                "passes": r.passes(),
                "channels": r.channels,
            })),
            "passes": passes,
        });
        write_text(
            path,
            &serde_json::to_string_pretty(&doc).expect("report serializes"),
        )?;
        write_text(&sibling(path, "planes.csv"), &balance.to_csv())?;
        if let Some(r) = &indist {
            write_text(&sibling(path, "channels.csv"), &r.to_csv())?;
        }
    }

    if passes {
        println!("result: all gates pass");
        Ok(ExitCode::Success)
    } else {
        println!("result: at least one gate failed");
        Ok(ExitCode::GateFailed)
    }
}

fn print_balance(path: &Path, stats: &BitPlaneStats) {
    println!(
        "bit-plane balance of {} ({} pixels)",
        path.display(),
        stats.pixels
    );
    println!(
        "{:>7} {:>4} {:>10} {:>10} {:>12}  gate",
        "channel", "bit", "ones", "zeros", "chi2"
    );
    for p in &stats.planes {
        println!(
            "{:>7} {:>4} {:>10} {:>10} {:>12.4}  {}",
            p.channel,
            p.bit,
            p.ones,
            p.zeros,
            p.chi_square,
            if p.passes() { "ok" } else { "FAIL" }
        );
    }
    println!("critical value {CRITICAL_1DOF} (1 d.o.f., significance 0.001)");
}

fn print_indistinguishability(report: &IndistinguishabilityReport) {
    println!();
    println!(
        "first-share distributions, {} splits per image",
        report.trials
    );
    println!(
        "{:>7} {:>12} {:>6} {:>10}  gate",
        "channel", "chi2", "dof", "critical"
    );
    for (c, t) in report.channels.iter().enumerate() {
        println!(
            "{:>7} {:>12.4} {:>6} {:>10.3}  {}",
            c,
            t.statistic,
            t.dof,
            t.critical,
            if t.passes() { "ok" } else { "FAIL" }
        );
    }
}

pub fn attack_demo(args: &AttackArgs) -> Result<(RecoveryReport, RecoveryReport), CliError> {
    warn_deterministic();
    let source = load_image(&args.input)?;
    let held = match args.held {
        HeldArg::First => HeldShare::First,
        HeldArg::Second => HeldShare::Second,
    };
    let scheme = simulate_known_rng_attack(&source, &args.seed, held, args.knows_which)?;
    let naive = naive_otp_baseline(&source, &args.seed, NaiveShare::Masked)?;

    let attacker = if args.knows_which {
        "knows which share it holds"
    } else {
        "does not know which share it holds"
    };
    println!(
        "known-randomness attack on {} ({})",
        args.input.display(),
        source.geometry()
    );
    println!("attacker holds the {:?} share and {attacker}", held);
    println!();
    println!(
        "{:<22} {:>12} {:>12} {:>12} {:>10}",
        "scheme", "bits", "determined", "correct", "fraction"
    );
    print_recovery("two-random-word split", &scheme);
    print_recovery("naive XOR pad", &naive);
    let ratio = if naive.determined_fraction() > 0.0 {
        scheme.determined_fraction() / naive.determined_fraction()
    } else {
        f64::NAN
    };
    println!("ratio: {ratio:.4}");
    println!();
    println!("per (r1, r2, q) cell of the two-random-word split:");
    println!(
        "{:>3} {:>3} {:>3} {:>12} {:>12}",
        "r1", "r2", "q", "observed", "determined"
    );
    for (i, cell) in scheme.cells.iter().enumerate() {
        println!(
            "{:>3} {:>3} {:>3} {:>12} {:>12}",
            i >> 2 & 1,
            i >> 1 & 1,
            i & 1,
            cell.observations,
            cell.determined
        );
    }

    if let Some(path) = &args.report {
        let doc = json!({
            "input": args.input.display().to_string(),
            "held": format!("{held:?}").to_lowercase(),
            "knows_which": args.knows_which,
            "scheme": recovery_json(&scheme),
            "naive": recovery_json(&naive),
            "ratio": if ratio.is_finite() { json!(ratio) } else { json!(null) },
        });
        write_text(
            path,
            &serde_json::to_string_pretty(&doc).expect("report serializes"),
        )?;
    }

    if !scheme.is_sound() || !naive.is_sound() {
        return Err(CliError::internal(
            "attack soundness violated: a determined bit disagrees with the source",
        ));
    }
    Ok((scheme, naive))
}

fn print_recovery(name: &str, r: &RecoveryReport) {
    println!(
        "{:<22} {:>12} {:>12} {:>12} {:>10.4}",
        name,
        r.total_bits,
        r.determined_bits,
        r.determined_correct_bits,
        r.determined_fraction()
    );
}

fn recovery_json(r: &RecoveryReport) -> serde_json::Value {
    json!({
        "total_bits": r.total_bits,
        "determined_bits": r.determined_bits,
        "determined_correct_bits": r.determined_correct_bits,
        "determined_fraction": r.determined_fraction(),
        "all_determined_are_ones": r.all_determined_are_ones(),
        "cells": r.cells,
    })
}

/// `out/report.json` -> `out/report.<suffix>`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(ExitCode::Io, format!("{}: {e}", path.display()))
}
