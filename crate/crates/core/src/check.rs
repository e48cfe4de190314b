//! Closed-form comparison harness behind the `check` command.
//!
//! Every printed ξ expression is evaluated on a fixed grid next to the
//! engine, and the random z-alignment completions are tested against the
//! transverse-expectation conditions they are meant to satisfy.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::linspace;
use crate::error::Error;
use crate::scalar::C;
use crate::spin::{Direction, Frame};
use crate::squeezing::{
    compare_closed_forms, ClosedFormFamily, DiscrepancyFlag, DiscrepancyRecord, FrameGauge, FramePolicy,
};
use crate::states::{config, transverse_residual, ConfigKind, ZAlignmentInput};

/// Residual above which a z-alignment completion counts as a failure.
pub const Z_ALIGNMENT_TOL: f64 = 1e-10;
/// Number of admissible random inputs in the z-alignment section.
pub const Z_ALIGNMENT_TRIALS: usize = 100;
const Z_ALIGNMENT_SEED: u64 = 0x5EED_2A11;

/// All comparisons for one family (or one slice/frame variant of it).
#[derive(Clone, Debug)]
pub struct FamilyCheck {
    pub label: String,
    pub policy: &'static str,
    pub records: Vec<DiscrepancyRecord<f64>>,
    pub note: Option<String>,
}

impl FamilyCheck {
    /// MISMATCH if any defined point disagrees, MATCH if all defined points
    /// agree, UNDEFINED if no point is defined.
    pub fn flag(&self) -> DiscrepancyFlag {
        let defined = self.records.iter().filter(|r| r.flag != DiscrepancyFlag::Undefined);
        let mut any = false;
        for r in defined {
            any = true;
            if r.flag == DiscrepancyFlag::Mismatch {
                return DiscrepancyFlag::Mismatch;
            }
        }
        if any {
            DiscrepancyFlag::Match
        } else {
            DiscrepancyFlag::Undefined
        }
    }

    pub fn max_abs_diff(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.abs_diff).reduce(f64::max)
    }

    pub fn count(&self, flag: DiscrepancyFlag) -> usize {
        self.records.iter().filter(|r| r.flag == flag).count()
    }
}

/// One random z-alignment input whose completion misses the conditions.
#[derive(Clone, Debug)]
pub struct ZAlignmentFailure {
    pub trial: usize,
    pub input: ZAlignmentInput<f64>,
    pub c23: C<f64>,
    pub c21: C<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct ZAlignmentCheck {
    pub seed: u64,
    pub trials: usize,
    /// Draws rejected for a vanishing denominator before reaching `trials`.
    pub rejected: usize,
    pub max_residual: f64,
    pub failures: Vec<ZAlignmentFailure>,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub families: Vec<FamilyCheck>,
    pub z_alignment: ZAlignmentCheck,
}

impl CheckReport {
    pub fn family(&self, label: &str) -> Option<&FamilyCheck> {
        self.families.iter().find(|f| f.label == label)
    }
}

fn run(label: &str, policy: FramePolicy<f64>, fams: impl IntoIterator<Item = ClosedFormFamily<f64>>) -> FamilyCheck {
    let records = fams.into_iter().map(|f| compare_closed_forms(&f, &policy)).collect();
    FamilyCheck {
        label: label.to_string(),
        policy: policy.name(),
        records,
        note: None,
    }
}

/// Real amplitudes on a configuration's support for the (α, β) angles.
fn config_amplitudes(kind: ConfigKind, alpha: f64, beta: f64) -> [f64; 3] {
    let st = config(kind, alpha, beta, 0.0, 0.0).expect("grid avoids all-zero amplitudes");
    let flat = st.flat();
    kind.support().map(|k| flat[k].re)
}

fn config_family(kind: ConfigKind, v: [f64; 3]) -> ClosedFormFamily<f64> {
    match kind {
        ConfigKind::One => ClosedFormFamily::Config1 { c11: v[0], c22: v[1], c33: v[2] },
        ConfigKind::Two => ClosedFormFamily::Config2 { c11: v[0], c13: v[1], c22: v[2] },
        ConfigKind::Three => ClosedFormFamily::Config3 { c12: v[0], c21: v[1], c23: v[2] },
    }
}

fn config_grid(kind: ConfigKind) -> Vec<ClosedFormFamily<f64>> {
    let angles = linspace(0.05, PI - 0.05, 24);
    let mut out = Vec::with_capacity(angles.len() * angles.len());
    for &a in &angles {
        for &b in &angles {
            out.push(config_family(kind, config_amplitudes(kind, a, b)));
        }
    }
    out
}

/// Frame with `n = ẑ` and both perpendicular choices pointing along ŷ.
pub fn y_frame() -> Frame<f64> {
    Frame::new(Direction::unit_z(), Direction::unit_y(), -Direction::unit_x())
        .expect("right-handed frame")
}

/// Runs every family on its canonical grid, then the z-alignment section.
pub fn run_check() -> CheckReport {
    let aligned_lab = FramePolicy::MeanSpinAligned(FrameGauge::Lab);
    let aligned_xz = FramePolicy::MeanSpinAligned(FrameGauge::Xz);
    let mut families = Vec::new();

    let thetas: Vec<f64> = (1..=30).map(|k| k as f64 / 10.0).collect();
    families.push(run(
        "ProductPair",
        aligned_xz,
        thetas
            .iter()
            .flat_map(|&t1| thetas.iter().map(move |&t2| ClosedFormFamily::ProductPair { theta1: t1, theta2: t2 })),
    ));

    let mut cts = run(
        "CoherentTimesSqueezed",
        aligned_xz,
        linspace(0.0, PI, 201)
            .into_iter()
            .map(|theta| ClosedFormFamily::CoherentTimesSqueezed { theta }),
    );
    if let Some((theta, xi)) = cts
        .records
        .iter()
        .filter_map(|r| match (r.family, r.engine) {
            (ClosedFormFamily::CoherentTimesSqueezed { theta }, Some(xi)) => Some((theta, xi)),
            _ => None,
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        cts.note = Some(format!(
            "engine minimum xi={:.6} at theta={:.6} (cos(theta/2)={:.6})",
            xi,
            theta,
            (theta / 2.0).cos()
        ));
    }
    families.push(cts);

    families.push(run("Config1", aligned_lab, config_grid(ConfigKind::One)));
    families.push(run(
        "Config1[c22=0]",
        aligned_lab,
        linspace(0.05, 1.5, 30)
            .into_iter()
            .filter(|g| (g - PI / 4.0).abs() > 1e-3)
            .map(|g| ClosedFormFamily::Config1 { c11: g.cos(), c22: 0.0, c33: g.sin() }),
    ));
    families.push(run("Config2", aligned_lab, config_grid(ConfigKind::Two)));
    families.push(run("Config3", aligned_lab, config_grid(ConfigKind::Three)));
    let mut c3y = run("Config3[fixed y,y]", FramePolicy::Fixed(y_frame(), y_frame()), config_grid(ConfigKind::Three));
    c3y.note = Some("both perpendicular directions fixed to y".into());
    families.push(c3y);

    CheckReport {
        families,
        z_alignment: z_alignment_check(Z_ALIGNMENT_SEED, Z_ALIGNMENT_TRIALS),
    }
}

/// Draws real inputs uniformly from `[-1, 1]`, rejecting those with a
/// vanishing denominator, until `trials` completions have been tested.
pub fn z_alignment_check(seed: u64, trials: usize) -> ZAlignmentCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    let mut failures = Vec::new();
    let mut max_residual = 0.0f64;
    let mut done = 0;
    while done < trials {
        let mut draw = || C::new(rng.random_range(-1.0..=1.0), 0.0);
        let input = ZAlignmentInput {
            c11: draw(),
            c12: draw(),
            c13: draw(),
            c22: draw(),
            c31: draw(),
            c32: draw(),
            c33: draw(),
        };
        let (c23, c21) = match crate::states::solve_z_alignment(&input) {
            Ok(v) => v,
            Err(Error::DegenerateDenominator { .. }) => {
                rejected += 1;
                continue;
            }
            Err(e) => unreachable!("unexpected z-alignment error: {e}"),
        };
        let residual = transverse_residual(&input.complete().expect("nonzero amplitudes"));
        max_residual = max_residual.max(residual);
        if !(residual <= Z_ALIGNMENT_TOL) {
            failures.push(ZAlignmentFailure { trial: done, input, c23, c21, residual });
        }
        done += 1;
    }
    ZAlignmentCheck { seed, trials, rejected, max_residual, failures }
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), |v| format!("{v:.12e}"))
}

fn cplx(z: C<f64>) -> String {
    format!("{:.17e}{:+.17e}i", z.re + 0.0, z.im + 0.0)
}

/// Plain-text discrepancy report.
pub fn render_report(report: &CheckReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# closed-form discrepancy report");
    let _ = writeln!(s, "# match tolerance: abs_diff <= {:e}", crate::squeezing::MATCH_TOL);
    let _ = writeln!(s);
    let _ = writeln!(s, "## summary");
    let _ = writeln!(
        s,
        "{:<24} {:<11} {:<10} {:>6} {:>9} {:>10} {:>20}",
        "family", "policy", "flag", "match", "mismatch", "undefined", "max_abs_diff"
    );
    for f in &report.families {
        let _ = writeln!(
            s,
            "{:<24} {:<11} {:<10} {:>6} {:>9} {:>10} {:>20}",
            f.label,
            f.policy,
            f.flag().to_string(),
            f.count(DiscrepancyFlag::Match),
            f.count(DiscrepancyFlag::Mismatch),
            f.count(DiscrepancyFlag::Undefined),
            num(f.max_abs_diff()),
        );
        if let Some(note) = &f.note {
            let _ = writeln!(s, "  note: {note}");
        }
    }

    let z = &report.z_alignment;
    let _ = writeln!(s);
    let _ = writeln!(s, "## z-alignment completions");
    let _ = writeln!(
        s,
        "seed={:#x} trials={} rejected={} tolerance={:e} failures={} max_residual={:.6e}",
        z.seed,
        z.trials,
        z.rejected,
        Z_ALIGNMENT_TOL,
        z.failures.len(),
        z.max_residual
    );
    let _ = writeln!(s, "flag: {}", if z.failures.is_empty() { "MATCH" } else { "MISMATCH" });
    if !z.failures.is_empty() {
        let _ = writeln!(s, "trial,residual,c11,c12,c13,c22,c31,c32,c33,c23,c21");
        for f in &z.failures {
            let inputs: Vec<String> = f.input.to_array().iter().map(|&a| cplx(a)).collect();
            let _ = writeln!(
                s,
                "{},{:.6e},{},{},{}",
                f.trial,
                f.residual,
                inputs.join(","),
                cplx(f.c23),
                cplx(f.c21)
            );
        }
    }

    let _ = writeln!(s);
    let _ = writeln!(s, "## rows");
    let _ = writeln!(s, "family\tparams\tclosed_form\tengine\tabs_diff\tflag");
    for f in &report.families {
        for r in &f.records {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}",
                f.label,
                r.family.params(),
                num(r.closed_form),
                num(r.engine),
                num(r.abs_diff),
                r.flag
            );
        }
    }
    s
}
