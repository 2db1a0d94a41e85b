//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xdiscord_core::curve::CurveError;
use xdiscord_core::family::{k_grid, transition_family_state, FamilySpec};
use xdiscord_core::{
    ellipse_from_xstate, ensemble_oracle, mutual_information, povm_oracle, quantum_discord, random_xstate,
    validate_xstate, vonneumann_oracle, xstates_from_ellipse, ConvexityClass, DecompositionKind, Degeneracy,
    EntropyCurve, XState,
};

type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.2?}]", out.detail, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.passed = false;
            out.detail = format!("{} exceeds {:?}", out.detail, limit);
        }
    }
    out
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn family_curve(k: f64) -> EntropyCurve {
    EntropyCurve::from(&ellipse_from_xstate(&transition_family_state(k, k).unwrap()))
}

fn shape(c: &Result<ConvexityClass, CurveError>) -> &'static str {
    match c {
        Ok(ConvexityClass::Convex) => "Convex",
        Ok(ConvexityClass::Concave) => "Concave",
        Ok(ConvexityClass::SingleInflection { .. }) => "SingleInflection",
        Err(_) => "Error",
    }
}

fn five_curve_shapes() -> Outcome {
    let expected = [
        (0.2839, "Convex"),
        (0.2827, "SingleInflection"),
        (0.2822, "SingleInflection"),
        (0.2817, "SingleInflection"),
        (0.2805, "Concave"),
    ];
    let mut ok = true;
    let mut got = Vec::new();
    for (k, want) in expected {
        let s = shape(&family_curve(k).classify_convexity());
        ok &= s == want;
        got.push(format!("{k}:{s}"));
    }
    outcome(ok, format!("v = k sqrt(bc) reading: {}", got.join(" ")))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng(2);
    let (mut max_dev, mut max_under, mut max_gap) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut failures = 0;
    for _ in 0..500 {
        let s = random_xstate(&mut rng);
        let r = match quantum_discord(&s) {
            Ok(r) => r,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let s_min = r.decomposition.s_bar_min;
        let e = ellipse_from_xstate(&s);
        if matches!(e.degeneracy, Degeneracy::Full | Degeneracy::FlatY) {
            let est = ensemble_oracle(&e, e.z_b, 4096).unwrap().s_bar_min_estimate;
            max_dev = max_dev.max((est - s_min).abs());
        }
        let vn = vonneumann_oracle(&s, 10_000, false);
        max_under = max_under.max(s_min - vn);
        if !r.decomposition.kind.is_triangle() {
            max_gap = max_gap.max((vn - s_min).abs());
        }
    }
    outcome(
        failures == 0 && max_dev <= 2e-3 && max_under <= 1e-9 && max_gap <= 1e-6,
        format!(
            "500 states: max |ensemble - s_min| = {max_dev:.3e}, max (s_min - vn) = {max_under:.3e}, \
             max two-outcome |vn - s_min| = {max_gap:.3e}, errors = {failures}"
        ),
    )
}

fn triangle_regime() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |label: &str, s: &XState| -> bool {
        let r = quantum_discord(s).unwrap();
        let d = &r.decomposition;
        let vn = vonneumann_oracle(s, 10_000, false);
        let p3 = povm_oracle(s, 3, 48).unwrap();
        let pass =
            d.kind == DecompositionKind::TriangleUpper && d.s_bar_min < vn - 1e-6 && (p3 - d.s_bar_min).abs() <= 1e-4;
        lines.push(format!(
            "{label}: {} vn - s_min = {:.3e}, |povm3 - s_min| = {:.3e}",
            d.kind.as_str(),
            vn - d.s_bar_min,
            (p3 - d.s_bar_min).abs()
        ));
        pass
    };
    ok &= check("k1=0,k2=0.8", &transition_family_state(0.0, 0.8).unwrap());
    let family_hit = [0.2827, 0.2822, 0.2817]
        .iter()
        .any(|&k| check(&format!("k={k}"), &transition_family_state(k, k).unwrap()));
    ok &= family_hit;
    outcome(ok, lines.join("; "))
}

fn four_elements() -> Outcome {
    let mut rng = rng(4);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let s = random_xstate(&mut rng);
        let p3 = povm_oracle(&s, 3, 24).unwrap();
        let p4 = povm_oracle(&s, 4, 24).unwrap();
        worst = worst.max(p3 - p4);
    }
    outcome(worst <= 1e-6, format!("200 states: max (povm3 - povm4) = {worst:.3e}"))
}

fn z_star_invariance() -> Outcome {
    let base = ellipse_from_xstate(&transition_family_state(0.2822, 0.2822).unwrap());
    let z_ref = match quantum_discord(&transition_family_state(0.2822, 0.2822).unwrap()) {
        Ok(r) => r.decomposition.z_star,
        Err(e) => return outcome(false, format!("reference failed: {e}")),
    };
    let Some(z_ref) = z_ref else {
        return outcome(false, "reference state is not a triangle");
    };
    let mut stars = Vec::new();
    let mut support_err = 0.0f64;
    let n = 4096;
    let resolution = 2.0 * (base.z_g - base.z_h) / n as f64;
    // scan candidate heights and keep the first five that are realisable
    for i in 1..40 {
        if stars.len() == 5 {
            break;
        }
        let z_b = z_ref + (base.z_g - z_ref) * i as f64 / 40.0;
        let Some(s) = xstates_from_ellipse(base.l1, base.l2, base.l3, base.z0, z_b)
            .into_iter()
            .next()
        else {
            continue;
        };
        let r = quantum_discord(&s).unwrap();
        let Some(z) = r.decomposition.z_star else {
            return outcome(false, format!("z_B = {z_b:.4}: kind {}", r.decomposition.kind.as_str()));
        };
        stars.push(z);
        let e = ellipse_from_xstate(&s);
        let (lo, hi) = ensemble_oracle(&e, e.z_b, n).unwrap().support_heights();
        support_err = support_err.max((lo - z).abs()).max((hi - e.z_g).abs());
    }
    let spread = stars.iter().map(|z| (z - z_ref).abs()).fold(0.0, f64::max);
    outcome(
        stars.len() == 5 && spread <= 1e-9 && support_err <= resolution,
        format!(
            "{} states, z* = {z_ref:.10}, spread = {spread:.2e}, support error = {support_err:.2e} (grid {resolution:.2e})",
            stars.len()
        ),
    )
}

fn kind_of(s: &XState) -> Option<DecompositionKind> {
    quantum_discord(s).ok().map(|r| r.decomposition.kind)
}

fn sufficient_conditions() -> Outcome {
    let mut rng = rng(6);
    let (mut horizontal, mut vertical, mut root_form) = ((0, 0), (0, 0), (0, 0));
    while horizontal.0 < 500 || vertical.0 < 500 || root_form.0 < 500 {
        let s = random_xstate(&mut rng);
        let [a, b, c, d, u, v] = s.params();
        if horizontal.0 < 500 && u + v >= (a * d - b * c).abs() {
            horizontal.0 += 1;
            horizontal.1 += usize::from(kind_of(&s) == Some(DecompositionKind::Horizontal));
        }
        // diagnostic only: the same premise with square roots of the products
        if root_form.0 < 500 && u + v >= ((a * d).sqrt() - (b * c).sqrt()).abs() {
            root_form.0 += 1;
            root_form.1 += usize::from(kind_of(&s) == Some(DecompositionKind::Horizontal));
        }
        if vertical.0 < 500 && (u + v).powi(2) <= (a - b) * (d - c) {
            vertical.0 += 1;
            vertical.1 += usize::from(kind_of(&s) == Some(DecompositionKind::Vertical));
        }
    }
    let mut oblate = (0, 0);
    while oblate.0 < 500 {
        // ac = bd puts the centre at the origin
        let (a, b, c) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
        let d = a * c / b;
        let norm = a + b + c + d;
        let (a, b, c, d) = (a / norm, b / norm, c / norm, d / norm);
        let u = rng.gen::<f64>() * (a * d).sqrt();
        let v = rng.gen::<f64>() * (b * c).sqrt();
        let Ok(s) = validate_xstate(a, b, c, d, u, v) else {
            continue;
        };
        let e = ellipse_from_xstate(&s);
        oblate.0 += 1;
        let want_horizontal = e.l1 > e.l3;
        oblate.1 += usize::from((kind_of(&s) == Some(DecompositionKind::Horizontal)) == want_horizontal);
    }
    outcome(
        horizontal.1 == 500 && vertical.1 == 500 && oblate.1 == 500,
        format!(
            "u+v >= |ad-bc| Horizontal {}/500; (u+v)^2 <= (a-b)(d-c) Vertical {}/500; \
             z0=0 Horizontal iff l1>l3 {}/500 (diagnostic: u+v >= |sqrt(ad)-sqrt(bc)| Horizontal {}/500)",
            horizontal.1, vertical.1, oblate.1, root_form.1
        ),
    )
}

fn exact_anchors() -> Outcome {
    let bell = quantum_discord(&XState::bell()).unwrap();
    let mixed = quantum_discord(&XState::maximally_mixed()).unwrap();
    let mut rng = rng(7);
    let mut max_diag = 0.0f64;
    let mut max_sum = 0.0f64;
    for _ in 0..1000 {
        let s = random_xstate(&mut rng);
        let diag = validate_xstate(s.a(), s.b(), s.c(), s.d(), 0.0, 0.0).unwrap();
        max_diag = max_diag.max(quantum_discord(&diag).unwrap().discord.abs());
        for st in [s, diag] {
            let r = quantum_discord(&st).unwrap();
            max_sum = max_sum.max((r.discord + r.classical_correlation - mutual_information(&st)).abs());
        }
    }
    let bell_err = (bell.discord - 1.0).abs();
    outcome(
        bell_err <= 1e-9 && mixed.discord.abs() <= 1e-9 && max_diag <= 1e-9 && max_sum <= 1e-10,
        format!(
            "|Q_bell - 1| = {bell_err:.1e}, Q_mixed = {:.1e}, max diagonal |Q| = {max_diag:.1e}, max |Q + C - I| = {max_sum:.1e}",
            mixed.discord
        ),
    )
}

struct Scan {
    kinds: Vec<DecompositionKind>,
    max_jump: f64,
}

fn scan(spec: &FamilySpec, ks: &[f64]) -> Scan {
    let results: Vec<_> = ks
        .iter()
        .map(|&k| quantum_discord(&spec.state_at(k).unwrap()).unwrap())
        .collect();
    Scan {
        kinds: results.iter().map(|r| r.decomposition.kind).collect(),
        max_jump: results
            .windows(2)
            .map(|w| (w[1].discord - w[0].discord).abs())
            .fold(0.0, f64::max),
    }
}

fn flips(kinds: &[DecompositionKind]) -> Vec<(DecompositionKind, DecompositionKind)> {
    kinds
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| (w[0], w[1]))
        .collect()
}

fn transition_scan() -> Outcome {
    let bell_diag = FamilySpec::new(0.4, 0.1, 0.1, 0.4);
    let ks: Vec<f64> = k_grid(0.0, 1.0, 1e-4).unwrap().into_iter().rev().collect();
    let a = scan(&bell_diag, &ks);
    let a_flips = flips(&a.kinds);
    let a_ok = a_flips == [(DecompositionKind::Horizontal, DecompositionKind::Vertical)]
        && !a.kinds.iter().any(|k| k.is_triangle());

    let ks = k_grid(0.27, 0.30, 1e-4).unwrap();
    let b = scan(&FamilySpec::transition(), &ks);
    let tri: Vec<f64> = ks
        .iter()
        .zip(&b.kinds)
        .filter(|(_, k)| k.is_triangle())
        .map(|(k, _)| *k)
        .collect();
    let b_ok = !tri.is_empty();
    let interval = match (tri.first(), tri.last()) {
        (Some(lo), Some(hi)) => format!("[{lo:.4}, {hi:.4}] ({} points)", tri.len()),
        _ => "empty".into(),
    };
    outcome(
        a_ok && b_ok && a.max_jump <= 1e-3 && b.max_jump <= 1e-3,
        format!(
            "Bell-diagonal flips {:?}, max jump {:.2e}; a=0.6717 triangle k {interval}, max jump {:.2e}",
            a_flips, a.max_jump, b.max_jump
        ),
    )
}

/// Central difference of `f` at `z`, Richardson-extrapolated from steps `h`
/// and `h/2`.
fn richardson(f: impl Fn(f64) -> Option<f64>, z: f64, h: f64) -> Option<f64> {
    let central = |h: f64| Some((f(z + h)? - f(z - h)?) / (2.0 * h));
    Some((4.0 * central(h / 2.0)? - central(h)?) / 3.0)
}

/// Largest mismatch of d1 and d2 against differences of the value and of d1,
/// relative to `max(|analytic|, |numeric|, 1)`.
fn derivative_mismatch(c: &EntropyCurve, z: f64, h: f64) -> Option<f64> {
    let d1 = c.s_horizontal_d1(z).ok()?;
    let d2 = c.s_horizontal_d2(z).ok()?;
    let fd1 = richardson(|y| c.s_horizontal(y).ok(), z, h)?;
    let fd2 = richardson(|y| c.s_horizontal_d1(y).ok(), z, h)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    Some(rel(d1, fd1).max(rel(d2, fd2)))
}

fn derivatives_and_lemma() -> Outcome {
    let mut rng = rng(9);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut curves = 0;
    while curves < 200 {
        let c = EntropyCurve::from(&ellipse_from_xstate(&random_xstate(&mut rng)));
        if c.is_flat() || c.z_g - c.z_h < 1e-3 {
            continue;
        }
        curves += 1;
        let mut points = 0;
        while points < 100 {
            let z = c.z_h + 2.0 * h + rng.gen::<f64>() * (c.z_g - c.z_h - 4.0 * h);
            if [z - h, z, z + h]
                .iter()
                .any(|&y| c.r_of_z(y).map_or(true, |r| r > 1.0 - 1e-6))
            {
                points += 1;
                continue;
            }
            worst = worst.max(derivative_mismatch(&c, z, h).unwrap_or(f64::INFINITY));
            points += 1;
        }
    }

    let mut violations = 0;
    let mut classified = 0;
    while classified < 100_000 {
        let c = EntropyCurve::from(&ellipse_from_xstate(&random_xstate(&mut rng)));
        if c.is_flat() {
            continue;
        }
        classified += 1;
        if matches!(c.classify_convexity(), Err(CurveError::LemmaViolation { .. })) {
            violations += 1;
        }
    }
    outcome(
        worst <= 1e-6 && violations == 0,
        format!(
            "max derivative mismatch {worst:.2e} on 200 curves; {violations} LemmaViolation in {classified} curves"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("five-curve convexity sequence", Some(1), five_curve_shapes),
        ("oracle equivalence on 500 states", Some(120), oracle_equivalence),
        ("triangle regime beats von Neumann", None, triangle_regime),
        ("four outcomes never beat three", Some(300), four_elements),
        ("z* independent of z_B", None, z_star_invariance),
        ("sufficient-condition classifications", None, sufficient_conditions),
        ("exact anchors", None, exact_anchors),
        ("transition scans", None, transition_scan),
        ("derivatives and inflection count", Some(180), derivatives_and_lemma),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let out = timed(limit.map(Duration::from_secs), *run);
        if !out.passed {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
