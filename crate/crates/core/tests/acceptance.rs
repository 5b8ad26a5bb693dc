//! Acceptance criteria, each checked at its stated tolerance and time budget.
//! Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clocklat::circle::prefactor;
use clocklat::constructions::{discretize_field, staircase_energy, StaircaseSpec};
use clocklat::continuum::{jump_energy_direct, jump_energy_sliced, GridPartitionField};
use clocklat::experiments::{
    run_gamma_sandwich, run_lemma_sweep, run_oblique_raster, run_prefactor_limit,
};
use clocklat::solvers::{
    anneal_kawasaki, bond_lower_bound_energy, chain_dp, enumerate_min, enumerate_min_with_counts,
    random_with_counts, AnnealSchedule, CellMethod, CellProblemSpec,
};
use clocklat::{CircleValue, Direction, LatticeDomain, PhaseIndex, SpinField};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lemma_sweep() -> Outcome {
    let r = run_lemma_sweep(64, 10_000).map_err(|e| e.to_string())?;
    check(r.min_gap >= -1e-12, format!("min gap {:e}", r.min_gap))?;
    check(r.has_k2_equality(), "no equality node at (2, π/2)")?;
    Ok(format!(
        "min gap {:e}, {} equality node(s)",
        r.min_gap,
        r.equality_nodes.len()
    ))
}

fn chain_vs_lemma() -> Outcome {
    let mut worst = 0f64;
    let mut cases = 0;
    for n in 2..=24u32 {
        let unit = 4.0 * (PI / n as f64).sin().powi(2);
        for k in 0..=n / 2 {
            for m in (k as usize).max(1)..=k as usize + 4 {
                let sol =
                    chain_dp(n, PhaseIndex(0), PhaseIndex(k), m).map_err(|e| e.to_string())?;
                let err = (sol.energy - k as f64 * unit).abs();
                worst = worst.max(err);
                cases += 1;
                check(
                    err <= 1e-12,
                    format!("N={n} k={k} M={m}: {} vs {}", sol.energy, k as f64 * unit),
                )?;
            }
        }
    }
    Ok(format!("{cases} chains, max error {worst:e}"))
}

fn staircase_exactness() -> Outcome {
    let eps = 0.125;
    let mut worst = 0f64;
    let mut cases = 0;
    for d in [2usize, 3] {
        for n in [2u32, 4, 6, 8] {
            let x = PI / n as f64;
            let pre = (x.sin() / x).powi(2);
            for ks in 0..=n / 2 {
                for m in [4usize, 8] {
                    let mut lo = vec![0i64; d];
                    let mut ext = vec![m; d];
                    let mut periodic = vec![true; d];
                    lo[d - 1] = -3;
                    ext[d - 1] = ks as usize + 7;
                    periodic[d - 1] = false;
                    let dom = Arc::new(
                        LatticeDomain::grid(eps, &lo, &ext, &periodic)
                            .map_err(|e| e.to_string())?,
                    );
                    let nu = Direction::axis(d, d - 1).map_err(|e| e.to_string())?;
                    let spec = StaircaseSpec::new(dom, n, PhaseIndex(ks), PhaseIndex(0), nu)
                        .map_err(|e| e.to_string())?;
                    let got = staircase_energy(&spec)
                        .map_err(|e| e.to_string())?
                        .total
                        .scaled;
                    let want = pre
                        * ks as f64
                        * (2.0 * PI / n as f64)
                        * (m as f64 * eps).powi(d as i32 - 1);
                    let err = (got - want).abs();
                    worst = worst.max(err);
                    cases += 1;
                    check(
                        err <= 1e-12,
                        format!("d={d} N={n} k={ks} m={m}: {got} vs {want}"),
                    )?;
                }
            }
        }
    }
    Ok(format!("{cases} staircases, max error {worst:e}"))
}

fn cell_sandwich() -> Outcome {
    let target = 4.0 / PI;
    let nu = Direction::axis(2, 1).map_err(|e| e.to_string())?;
    let spec = CellProblemSpec {
        s: PhaseIndex(1),
        r: PhaseIndex(0),
        nu: nu.clone(),
        eps: 0.125,
        n: 2,
        method: CellMethod::Enumerate,
    };
    let field = spec.constrained_field().map_err(|e| e.to_string())?;
    let exhaustive = enumerate_min(&field).map_err(|e| e.to_string())?;
    check(
        exhaustive.configurations == 512,
        format!("{} configurations", exhaustive.configurations),
    )?;
    let lower = bond_lower_bound_energy(&exhaustive.argmin, None);

    let anneal = CellMethod::Anneal(AnnealSchedule {
        chains: 32,
        ..Default::default()
    });
    let table = run_gamma_sandwich(
        PhaseIndex(1),
        PhaseIndex(0),
        &nu,
        2,
        &[0.125, 0.0625, 0.03125],
        &[CellMethod::Enumerate, anneal.clone(), anneal],
    )
    .map_err(|e| e.to_string())?;
    let coarse = table
        .rows
        .iter()
        .find(|r| r.parameter == 0.125)
        .expect("row");
    check(
        coarse.estimate == exhaustive.energy,
        "table and exhaustive minimum differ",
    )?;
    check(
        lower <= exhaustive.energy + 1e-12 && exhaustive.energy <= coarse.upper + 1e-12,
        format!(
            "sandwich {lower} ≤ {} ≤ {} broken",
            exhaustive.energy, coarse.upper
        ),
    )?;
    check(
        (exhaustive.energy - target).abs() <= 0.25,
        format!("ε=1/8 gap {}", exhaustive.energy - target),
    )?;
    // rows are sorted by ε ascending
    let gaps: Vec<f64> = table
        .rows
        .iter()
        .map(|r| (r.estimate - target).abs())
        .collect();
    check(
        gaps[0] < gaps[1] && gaps[1] < gaps[2],
        format!("gaps not shrinking: {gaps:?}"),
    )?;
    check(gaps[0] <= 0.05, format!("ε=1/32 gap {}", gaps[0]))?;
    check(
        table.sandwich_violations(1e-12).is_empty(),
        "sandwich violated on a ladder row",
    )?;
    Ok(format!(
        "|φ̂ − 4/π| = {:.4}, {:.4}, {:.4} at ε = 1/8, 1/16, 1/32",
        gaps[2], gaps[1], gaps[0]
    ))
}

fn random_partition(
    rng: &mut ChaCha8Rng,
    lambda: f64,
    extent: &[usize],
    n: u32,
) -> GridPartitionField {
    let cells: usize = extent.iter().product();
    let values = (0..cells)
        .map(|_| PhaseIndex(rng.random_range(0..n)))
        .collect();
    GridPartitionField::from_phases(lambda, vec![0; extent.len()], extent.to_vec(), n, values)
        .expect("valid partition")
}

fn slicing_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    for _ in 0..100 {
        let f = random_partition(&mut rng, 1.0 / 16.0, &[16, 16], 8);
        worst = worst.max((jump_energy_sliced(&f) - jump_energy_direct(&f)).abs());
    }
    for _ in 0..20 {
        let f = random_partition(&mut rng, 1.0 / 8.0, &[8, 8, 8], 5);
        worst = worst.max((jump_energy_sliced(&f) - jump_energy_direct(&f)).abs());
    }
    check(worst <= 1e-12, format!("max difference {worst:e}"))?;
    Ok(format!("120 fields, max difference {worst:e}"))
}

fn prefactor_limit() -> Outcome {
    let mut prev = 0.0;
    for n in 2..=10_000u32 {
        let p = prefactor(n).map_err(|e| e.to_string())?;
        check(p > prev, format!("not increasing at N={n}"))?;
        prev = p;
    }
    let p1000 = prefactor(1000).map_err(|e| e.to_string())?;
    check(
        1.0 - p1000 <= 1e-5,
        format!("1 − prefactor(1000) = {}", 1.0 - p1000),
    )?;
    let ladder: Vec<u32> = (3..=13).map(|p| 1 << p).collect();
    let study = run_prefactor_limit(&ladder).map_err(|e| e.to_string())?;
    let rate = study.table.rate.exponent.ok_or("no rate fitted")?;
    check((rate + 2.0).abs() <= 0.1, format!("exponent {rate}"))?;
    Ok(format!(
        "1 − p(1000) = {:.3e}, exponent {rate:.4}",
        1.0 - p1000
    ))
}

/// Minimum over all 16-site two-phase configurations with eight sites per phase.
fn brute_force_4x4() -> f64 {
    let (eps, side) = (0.25f64, 4usize);
    let mut best = usize::MAX;
    for mask in 0u32..1 << 16 {
        if mask.count_ones() != 8 {
            continue;
        }
        let bit = |x: usize, y: usize| (mask >> (x * side + y)) & 1;
        let mut cut = 0;
        for x in 0..side {
            for y in 0..side {
                if x + 1 < side && bit(x, y) != bit(x + 1, y) {
                    cut += 1;
                }
                if y + 1 < side && bit(x, y) != bit(x, y + 1) {
                    cut += 1;
                }
            }
        }
        best = best.min(cut);
    }
    // antipodal bonds cost 4; scaled energy N/(2πε) Σ ε² |Δu|²
    2.0 / (2.0 * PI * eps) * best as f64 * 4.0 * eps * eps
}

fn volume_constraint() -> Outcome {
    let oracle = brute_force_4x4();
    let dom =
        Arc::new(LatticeDomain::grid(0.25, &[0, 0], &[4, 4], &[]).map_err(|e| e.to_string())?);
    let base = SpinField::constant(dom, 2, PhaseIndex(0)).map_err(|e| e.to_string())?;
    let start = random_with_counts(&base, &[8, 8], 3).map_err(|e| e.to_string())?;
    let exact = enumerate_min_with_counts(&start, &[8, 8]).map_err(|e| e.to_string())?;
    check(
        (exact.energy - oracle).abs() <= 1e-12,
        format!("exhaustive {} vs oracle {oracle}", exact.energy),
    )?;
    check(
        (exact.energy - 4.0 / PI).abs() <= 1e-12,
        format!("exhaustive {} vs 4/π", exact.energy),
    )?;

    let dom = Arc::new(
        LatticeDomain::grid(1.0 / 16.0, &[0, 0], &[16, 16], &[]).map_err(|e| e.to_string())?,
    );
    let base = SpinField::constant(dom, 2, PhaseIndex(0)).map_err(|e| e.to_string())?;
    let start = random_with_counts(&base, &[128, 128], 11).map_err(|e| e.to_string())?;
    let schedule = AnnealSchedule {
        sweeps: 4000,
        chains: 32,
        seed: 11,
        ..Default::default()
    };
    let r = anneal_kawasaki(&start, &[128, 128], &schedule).map_err(|e| e.to_string())?;
    let ratio = r.energy / (4.0 / PI);
    check(ratio <= 1.02, format!("Kawasaki ratio {ratio}"))?;
    check(
        r.field.phase_counts() == vec![128, 128],
        "counts not conserved",
    )?;
    Ok(format!(
        "4x4 exact {:.12}, 16x16 ratio {ratio:.4}",
        exact.energy
    ))
}

fn discretization_slack() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..200 {
        let d = rng.random_range(2..=3usize);
        let side = if d == 2 {
            rng.random_range(3..=12)
        } else {
            rng.random_range(2..=5)
        };
        let extent = vec![side; d];
        let cells: usize = extent.iter().product();
        let palette: Vec<f64> = (0..rng.random_range(1..=6))
            .map(|_| rng.random_range(0.0..2.0 * PI))
            .collect();
        let values = (0..cells)
            .map(|_| CircleValue::new(palette[rng.random_range(0..palette.len())]))
            .collect();
        let u = GridPartitionField::from_angles(1.0 / side as f64, vec![0; d], extent, values)
            .map_err(|e| e.to_string())?;
        let (ju, area) = (jump_energy_direct(&u), u.interface_area());
        for n in 3..=64u32 {
            let pu = discretize_field(&u, n).map_err(|e| e.to_string())?;
            let slack = ju + 2.0 * (2.0 * PI / n as f64) * area - jump_energy_direct(&pu);
            tightest = tightest.min(slack);
            checks += 1;
            check(slack >= -1e-12, format!("violated by {} at N={n}", -slack))?;
        }
    }
    Ok(format!("{checks} instances, smallest slack {tightest:.3e}"))
}

fn oblique_anisotropy() -> Outcome {
    let nu = Direction::rational(&[1, 1]).map_err(|e| e.to_string())?;
    let t = run_oblique_raster(
        &nu,
        CircleValue::new(PI),
        CircleValue::e1(),
        &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
    )
    .map_err(|e| e.to_string())?;
    let target = PI * SQRT_2;
    check(
        t.rows.iter().all(|r| (r.analytic - target).abs() <= 1e-12),
        "analytic column is not π√2",
    )?;
    let fine = &t.rows[0];
    let rel = (fine.estimate - target).abs() / target;
    check(rel <= 0.02, format!("relative gap {rel}"))?;
    let gaps: Vec<f64> = t.rows.iter().map(|r| r.gap.abs()).collect();
    check(gaps[0] < gaps[1] && gaps[1] < gaps[2], "gaps not shrinking")?;
    Ok(format!("relative gap at λ=1/64 {:.4}%", 100.0 * rel))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("1 lemma sweep", 1, lemma_sweep),
        ("2 chain DP vs lemma", 1, chain_vs_lemma),
        ("3 staircase exactness", 1, staircase_exactness),
        ("4 cell-formula sandwich", 30, cell_sandwich),
        ("5 slicing agreement", 5, slicing_agreement),
        ("6 prefactor limit", 1, prefactor_limit),
        ("7 volume constraint", 60, volume_constraint),
        ("8 discretization slack", 10, discretization_slack),
        ("9 oblique anisotropy", 5, oblique_anisotropy),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(budget) => {
                Err(format!("{msg}; over the {budget} s budget"))
            }
            o => o,
        };
        match outcome {
            Ok(msg) => println!(
                "PASS criterion {name}: {msg} ({:.3} s)",
                elapsed.as_secs_f64()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "FAIL criterion {name}: {msg} ({:.3} s)",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
