//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain binary
//! (`cargo test -p spin-transfer --test acceptance`) and exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use spin_transfer::analytic::{eigvec_closed_form, find_secular_roots, probability_closed_form};
use spin_transfer::dynamics::{probability, transfer_amplitude, two_spin_time, TimeStep, TransferProbe};
use spin_transfer::experiments::{compute_tables, reproduce, EXPERIMENTS};
use spin_transfer::search::{
    optimize_parameter, perfect_transfer_solutions_n4, Objective, ParamGrid, PerfectBranch, Scheme, SearchSettings,
};
use spin_transfer::{
    eig_dense, eig_tridiagonal, equivalent_xy_frequencies, ChainSpec, ExcitationBlock, Interaction, Model,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn criterion_1() -> Outcome {
    let a = two_spin_time(5.5).unwrap();
    let b = two_spin_time(9.0).unwrap();
    let pass = (a - 522.682).abs() <= 1e-3 && (b - 2290.221).abs() <= 1e-3;
    Outcome::new(pass, format!("tau2(11/2) = {a:.4}, tau2(9) = {b:.4}"))
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for spec in &EXPERIMENTS {
        let r = reproduce(spec).unwrap();
        let dp = (r.probability_at_reference - spec.reference_probability).abs();
        let ok = dp <= 5e-3 && r.time_offset() <= 1e-3;
        pass &= ok;
        lines.push(format!(
            "    {} {}: P(T_ref = {}) = {:.6} (ref {:.3}, diff {:.1e}); nearest peak T = {:.6}, offset {:.1e}",
            if ok { "ok  " } else { "FAIL" },
            spec.id,
            spec.reference_time,
            r.probability_at_reference,
            spec.reference_probability,
            dp,
            r.nearest_peak.time,
            r.time_offset()
        ));
    }
    Outcome::new(pass, format!("8 ten-node experiments\n{}", lines.join("\n")))
}

/// Table, row, column, reported value, size of its last printed digit.
type TableValue = (&'static str, &'static str, &'static str, f64, f64);

const TABLE_VALUES: [TableValue; 16] = [
    ("I", "xy-all", "webm", 0.041, 1e-3),
    ("I", "xxz-all", "webm", 1.262, 1e-3),
    ("I", "xy-nn", "webm", 0.055, 1e-3),
    ("I", "xxz-nn", "webm", 272.228, 1e-3),
    ("I", "xy-all", "elfm", 0.319, 1e-3),
    ("I", "xxz-all", "elfm", 0.144, 1e-3),
    ("I", "xy-nn", "elfm", 212.017, 1e-3),
    ("I", "xxz-nn", "elfm", 21.194, 1e-3),
    ("II", "xy", "webm", 1.334, 1e-3),
    ("II", "xy", "elfm", 664.444, 1e-3),
    ("II", "xxz", "webm", 215.710, 1e-3),
    ("II", "xxz", "elfm", 146.929, 1e-3),
    ("III", "webm", "all", 0.033, 1e-3),
    ("III", "webm", "nn", 2.0e-4, 1e-5),
    ("III", "elfm", "all", 2.212, 1e-3),
    ("III", "elfm", "nn", 10.004, 1e-3),
];

const TABLE_IV: [(&str, &str, f64, f64); 4] = [
    ("xy", "all", 0.129, 1e-3),
    ("xy", "nn", 2.6e-4, 1e-5),
    ("xxz", "all", 8.749, 1e-3),
    ("xxz", "nn", 12.845, 1e-3),
];

fn criterion_3() -> Outcome {
    let tables = compute_tables().unwrap();
    let rows = TABLE_VALUES
        .iter()
        .copied()
        .chain(TABLE_IV.iter().map(|&(r, c, v, u)| ("IV", r, c, v, u)));
    let mut bad = Vec::new();
    let mut count = 0;
    for (table, row, column, reported, unit) in rows {
        count += 1;
        let value = tables.get(table, row, column).expect("table entry present");
        let rounded = (value / unit).round() * unit;
        if (rounded - reported).abs() > unit * (1.0 + 1e-9) {
            bad.push(format!("{table}/{row}/{column}: {value:.6} vs {reported}"));
        }
    }
    let pass = bad.is_empty() && count == 20;
    Outcome::new(
        pass,
        if pass {
            format!("{count} ratios within one unit of the last printed digit")
        } else {
            format!("mismatches: {}", bad.join("; "))
        },
    )
}

fn criterion_4() -> Outcome {
    let (mut worst_eig, mut worst_vec, mut worst_p) = (0.0f64, 0.0f64, 0.0f64);
    for n in 4..=12 {
        for &delta in &[0.125, 1.0, 8.0] {
            for &omega in &[0.0, 1.0, 2.203, 2.651] {
                let roots = find_secular_roots(n, delta, omega).unwrap();
                let chain = ChainSpec::webm(n, delta)
                    .unwrap()
                    .with_larmor({
                        let mut w = vec![0.0; n];
                        w[0] = omega;
                        w[n - 1] = omega;
                        w
                    })
                    .unwrap();
                let block = ExcitationBlock::build(&chain, Model::Xy, Interaction::NearestNeighbor);
                let m = block.matrix();
                let tri = eig_tridiagonal(&m.diagonal(), &m.super_diagonal()).unwrap();
                let dense = eig_dense(m).unwrap();
                for (j, r) in roots.iter().enumerate() {
                    worst_eig = worst_eig
                        .max((r.eigenvalue() - tri.eigenvalues()[j]).abs())
                        .max((r.eigenvalue() - dense.eigenvalues()[j]).abs());
                    // compare against the numeric vector it overlaps most within
                    // its (possibly degenerate) eigenvalue group
                    let v = eigvec_closed_form(r, n, delta).unwrap();
                    let err = (0..n)
                        .filter(|&k| (tri.eigenvalues()[k] - r.eigenvalue()).abs() <= 1e-9)
                        .map(|k| {
                            let u = tri.eigenvector(k);
                            let plus = v.iter().zip(u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                            let minus = v.iter().zip(u).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
                            plus.min(minus)
                        })
                        .fold(f64::INFINITY, f64::min);
                    worst_vec = worst_vec.max(err);
                }
                let probe = TransferProbe::end_to_end(&tri);
                for k in 0..=1000 {
                    let tau = 0.1 * k as f64;
                    let closed = probability_closed_form(&roots, n, delta, tau).unwrap();
                    worst_p = worst_p.max((closed - probe.probability(tau)).abs());
                }
            }
        }
    }
    let pass = worst_eig <= 1e-9 && worst_vec <= 1e-8 && worst_p <= 1e-10;
    Outcome::new(
        pass,
        format!("worst eigenvalue {worst_eig:.1e}, eigenvector {worst_vec:.1e}, P(tau) {worst_p:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let block = ExcitationBlock::build(
        &ChainSpec::webm(10, 8.0).unwrap(),
        Model::Xy,
        Interaction::NearestNeighbor,
    );
    let numeric = block.spectrum().unwrap().min_abs_eigenvalue().abs();
    let secular = find_secular_roots(10, 8.0, 0.0)
        .unwrap()
        .iter()
        .map(|r| r.eigenvalue().abs())
        .fold(f64::INFINITY, f64::min);
    let estimate = PI / 0.118;
    let rel = (estimate - 28.698).abs() / 28.698;
    let pass = (numeric - 0.118).abs() <= 5e-4 && (secular - numeric).abs() <= 1e-12 && rel <= 0.1;
    Outcome::new(
        pass,
        format!(
            "|lambda|_min = {numeric:.6}; pi/0.118 = {estimate:.3} is {:.1}% from 28.698",
            100.0 * rel
        ),
    )
}

fn criterion_6() -> Outcome {
    let report = perfect_transfer_solutions_n4(5).unwrap();
    let mut worst = 0.0f64;
    for s in &report.solutions {
        let mut larmor = vec![0.0; 4];
        larmor[0] = s.omega;
        larmor[3] = s.omega;
        let chain = ChainSpec::webm(4, s.delta).unwrap().with_larmor(larmor).unwrap();
        let block = ExcitationBlock::build(&chain, Model::Xy, Interaction::NearestNeighbor);
        let spec = eig_dense(block.matrix()).unwrap();
        worst = worst.max(1.0 - probability(&spec, 0, 3, s.tau0).unwrap());
    }
    let alternating = report
        .solutions
        .iter()
        .find(|s| s.branch == PerfectBranch::ZeroField && s.n1 == 0 && s.n2 == 1);
    let family_ok = alternating.is_some_and(|s| {
        (s.delta - 2.0 / 3f64.sqrt()).abs() < 1e-12 && (s.tau0 - PI * 3f64.sqrt()).abs() < 1e-12 && s.omega == 0.0
    });
    let pass = !report.solutions.is_empty() && worst <= 1e-9 && family_ok;
    Outcome::new(
        pass,
        format!(
            "{} solutions, worst 1 - P(tau0) = {worst:.1e}, (0,1) alternating point {}",
            report.solutions.len(),
            if family_ok { "found" } else { "missing" }
        ),
    )
}

#[derive(Clone, Debug)]
struct RandomChain {
    spacings: Vec<f64>,
    larmor: Vec<f64>,
    model: Model,
    range: Interaction,
}

fn random_chain() -> impl Strategy<Value = RandomChain> {
    (2usize..=12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.5f64..2.0, n - 1),
            prop::collection::vec(-3.0f64..3.0, n),
            prop_oneof![Just(Model::Xy), Just(Model::Xxz)],
            prop_oneof![Just(Interaction::NearestNeighbor), Just(Interaction::AllNode)],
        )
            .prop_map(|(spacings, larmor, model, range)| RandomChain {
                spacings,
                larmor,
                model,
                range,
            })
    })
}

fn spectrum_of(c: &RandomChain, spacings: Vec<f64>, larmor: Vec<f64>, model: Model) -> spin_transfer::Spectrum {
    let chain = ChainSpec::new(spacings, larmor).unwrap();
    ExcitationBlock::build(&chain, model, c.range).spectrum().unwrap()
}

fn criterion_7() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 200,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let result = runner.run(&(random_chain(), 0.0f64..200.0, -5.0f64..5.0), |(c, tau, shift)| {
        let n = c.larmor.len();
        let spec = spectrum_of(&c, c.spacings.clone(), c.larmor.clone(), c.model);

        // unitarity of every row of the propagator
        for from in 0..n {
            let total: f64 = (0..n)
                .map(|m| transfer_amplitude(&spec, from, m, tau).unwrap().norm_sqr())
                .sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "unitarity defect {}", total - 1.0);
        }
        let f = transfer_amplitude(&spec, 0, n - 1, tau).unwrap().norm();
        let p = f * f;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));

        // XXZ chain against its XY equivalent
        let chain = ChainSpec::new(c.spacings.clone(), c.larmor.clone()).unwrap();
        let xy_larmor = equivalent_xy_frequencies(&chain, c.range, &c.larmor).unwrap();
        let xxz = spectrum_of(&c, c.spacings.clone(), c.larmor.clone(), Model::Xxz);
        let xy = spectrum_of(&c, c.spacings.clone(), xy_larmor, Model::Xy);
        let a = transfer_amplitude(&xxz, 0, n - 1, tau).unwrap().norm();
        let b = transfer_amplitude(&xy, 0, n - 1, tau).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-12, "equivalence {a} vs {b}");

        // a uniform field shift only changes the phase
        let shifted: Vec<f64> = c.larmor.iter().map(|w| w + shift).collect();
        let g = transfer_amplitude(&spectrum_of(&c, c.spacings.clone(), shifted, c.model), 0, n - 1, tau)
            .unwrap()
            .norm();
        prop_assert!((f - g).abs() <= 1e-10, "shift {f} vs {g}");

        // the mirrored chain transfers the same way
        let mut sp = c.spacings.clone();
        sp.reverse();
        let mut la = c.larmor.clone();
        la.reverse();
        let h = transfer_amplitude(&spectrum_of(&c, sp, la, c.model), 0, n - 1, tau)
            .unwrap()
            .norm();
        prop_assert!((f - h).abs() <= 1e-10, "mirror {f} vs {h}");
        Ok(())
    });
    match result {
        Ok(()) => Outcome::new(
            true,
            "200 random chains: unitarity, XY/XXZ equivalence, shift, mirror, 0 <= P <= 1",
        ),
        Err(e) => Outcome::new(false, format!("{e}")),
    }
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (model, tau_max, reported_omega, reported_p) in
        [(Model::Xy, 1000.0, 2.203, 0.985), (Model::Xxz, 600.0, 2.651, 0.971)]
    {
        let settings = SearchSettings {
            model,
            range: Interaction::AllNode,
            n_nodes: 10,
            tau_max,
            step: TimeStep::Auto,
            threshold: 0.97,
            objective: Objective::MinTime,
        };
        let result = optimize_parameter(Scheme::ElfmOmega, ParamGrid::new(0.0, 5.0, 1e-3).unwrap(), &settings).unwrap();
        let best = result.best.expect("some grid value qualifies");
        let peak = best.peak.unwrap();
        let direct = (best.param - reported_omega).abs() <= 0.05 && (peak.probability - reported_p).abs() <= 5e-3;
        let i = result.nearest_index(reported_omega).unwrap();
        let fallback = result.is_local_optimum(i);
        let ok = direct || fallback;
        pass &= ok;
        let at_reported = result.table[i].peak.map_or("no qualifying peak".to_string(), |p| {
            format!("T = {:.3}, P = {:.4}", p.time, p.probability)
        });
        lines.push(format!(
            "    {} {model}: best omega = {:.3} (T = {:.3}, P = {:.4}); at omega = {reported_omega}: {at_reported}, local optimum: {fallback}",
            if ok { "ok  " } else { "FAIL" },
            best.param,
            peak.time,
            peak.probability
        ));
    }
    Outcome::new(pass, format!("omega grid [0, 5] step 1e-3\n{}", lines.join("\n")))
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("two-spin baseline", criterion_1),
        ("ten-node figure reproduction", criterion_2),
        ("tables I-IV", criterion_3),
        ("spectral cross-validation", criterion_4),
        ("smallest eigenvalue estimate", criterion_5),
        ("four-node perfect transfer", criterion_6),
        ("property suites", criterion_7),
        ("optimizer reproduction", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({})",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
