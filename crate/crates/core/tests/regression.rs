//! Frozen outputs of deterministic splits. Set `SHADOWVC_REGENERATE=1` to
//! rewrite the fixture files after an intentional change to the draw layout.

use std::path::PathBuf;

use shadowvc::analysis::bit_balance;
use shadowvc::io::{load_image, save_image};
use shadowvc::{combine, split2, RandomnessContext, Raster8, RasterImage, Seed};

const FIXTURE_SEED: &str = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn regenerate() -> bool {
    std::env::var_os("SHADOWVC_REGENERATE").is_some()
}

fn gradient() -> RasterImage {
    Raster8::from_fn(4, 4, 3, |x, y, c| match c {
        0 => (x * 85) as u8,
        1 => (y * 85) as u8,
        _ => ((x + y) * 42) as u8,
    })
    .unwrap()
    .into()
}

#[test]
fn gradient_split_matches_frozen_shares() {
    let source = gradient();
    let rng = RandomnessContext::deterministic(Seed::from_hex(FIXTURE_SEED).unwrap());
    let (a, b) = split2(&source, &rng).unwrap();
    if regenerate() {
        save_image(&source, fixture("gradient_source.ppm")).unwrap();
        save_image(&a, fixture("gradient_share_0.ppm")).unwrap();
        save_image(&b, fixture("gradient_share_1.ppm")).unwrap();
    }
    assert_eq!(load_image(fixture("gradient_source.ppm")).unwrap(), source);
    assert_eq!(load_image(fixture("gradient_share_0.ppm")).unwrap(), a);
    assert_eq!(load_image(fixture("gradient_share_1.ppm")).unwrap(), b);
    assert_eq!(combine(&[a, b]).unwrap(), source);
}

/// Chi-square per bit plane of both shares of a 256x256 constant-colour
/// image split under the fixture seed, channel-major then bit.
#[test]
fn constant_colour_share_planes_match_frozen_statistics() {
    let source: RasterImage = Raster8::filled(256, 256, &[200, 30, 90]).unwrap().into();
    let rng = RandomnessContext::deterministic(Seed::from_hex(FIXTURE_SEED).unwrap());
    let (a, b) = split2(&source, &rng).unwrap();
    let stats: Vec<Vec<f64>> = [a, b]
        .iter()
        .map(|s| bit_balance(s).planes.iter().map(|p| p.chi_square).collect())
        .collect();
    let path = fixture("constant_share_planes.json");
    if regenerate() {
        std::fs::write(&path, serde_json::to_string_pretty(&stats).unwrap()).unwrap();
    }
    let frozen: Vec<Vec<f64>> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(frozen.len(), 2);
    for (got, want) in stats.iter().zip(&frozen) {
        assert_eq!(got.len(), 24);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }
}
