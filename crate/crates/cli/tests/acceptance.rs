//! Acceptance suite: one test per release criterion.
//!
//! Each test checks a single criterion at its stated tolerance and time
//! budget and prints one `[PASS]` line (visible with `--nocapture`); a
//! failed criterion fails its test. Run with
//! `cargo test --test acceptance`.

use std::f64::consts::LN_2;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use infobound::bounds::{check_bounds, check_mutual_bounds, Verdict};
use infobound::fluctuation::{
    averages, build_zero_sigma_model, jarzynski_exhaustive, jarzynski_montecarlo, trajectories,
    FeedbackModel,
};
use infobound::info::{iqc_classical, iqc_quantum};
use infobound::markov::{example1, example2, random_chain, random_cond_matrix, random_prob_vec};
use infobound::search::{grid_oracle, search, Objective};

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn within_budget(elapsed: Duration, budget: Duration, criterion: &str) {
    assert!(
        elapsed <= budget,
        "{criterion} exceeded its time budget: {elapsed:?} > {budget:?}"
    );
}

#[test]
fn c1_first_counterexample_violates_the_lower_bound_exactly() {
    let chain = example1();
    let (report, elapsed) = timed(|| check_bounds(&chain));
    assert!(
        (report.iqc - (-LN_2)).abs() <= 1e-12,
        "iqc was {}",
        report.iqc
    );
    assert_eq!(report.h_x1, 0.0);
    assert!((report.h_x2_given_k - LN_2).abs() <= 1e-12);
    assert_eq!(report.verdict, Verdict::ViolatesLower);
    within_budget(elapsed, Duration::from_millis(1), "criterion 1");
    println!(
        "[PASS] criterion 1: example 1 gives I_QC = -ln 2 = {} and violates the lower bound ({elapsed:?})",
        report.iqc
    );
}

#[test]
fn c2_second_counterexample_violates_the_upper_bound_exactly() {
    let chain = example2();
    let (report, elapsed) = timed(|| check_bounds(&chain));
    assert!((report.iqc - LN_2).abs() <= 1e-12, "iqc was {}", report.iqc);
    assert_eq!(chain.marginal_k().as_slice(), &[0.0, 1.0]);
    assert_eq!(report.h_k, 0.0);
    assert_eq!(report.verdict, Verdict::ViolatesUpper);
    within_budget(elapsed, Duration::from_millis(1), "criterion 2");
    println!(
        "[PASS] criterion 2: example 2 gives I_QC = ln 2 = {} > H(k) = 0 ({elapsed:?})",
        report.iqc
    );
}

#[test]
fn c3_mutual_information_bound_holds_across_ten_thousand_chains() {
    let (checked, elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(31_031);
        let mut checked = 0u32;
        for _ in 0..10_000 {
            let dims = (
                rng.random_range(2..=5),
                rng.random_range(2..=5),
                rng.random_range(2..=5),
            );
            let chain = random_chain(dims, &mut rng);
            let report = check_mutual_bounds(&chain);
            assert!(
                report.holds,
                "I(x1:k) = {} exceeded H(k) = {} on dims {dims:?}",
                report.mutual_x1_k, report.h_k
            );
            checked += 1;
        }
        checked
    });
    within_budget(elapsed, Duration::from_secs(10), "criterion 3");
    println!("[PASS] criterion 3: I(x1:k) <= H(k) held on {checked} random chains ({elapsed:?})");
}

#[test]
fn c4_quantum_and_classical_routes_agree_on_a_thousand_chains() {
    let (max_gap, elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(41_041);
        let mut max_gap: f64 = 0.0;
        for _ in 0..1_000 {
            let dims = (
                rng.random_range(2..=5),
                rng.random_range(2..=5),
                rng.random_range(2..=5),
            );
            let chain = random_chain(dims, &mut rng);
            let (rho1, ensemble) = chain.to_ensemble().expect("chains embed as ensembles");
            let quantum = iqc_quantum(&rho1, &ensemble).expect("matching dimensions");
            let gap = (quantum - iqc_classical(&chain)).abs();
            assert!(gap <= 1e-10, "routes disagree by {gap} on dims {dims:?}");
            max_gap = max_gap.max(gap);
        }
        max_gap
    });
    within_budget(elapsed, Duration::from_secs(10), "criterion 4");
    println!(
        "[PASS] criterion 4: spectral and classical I_QC agreed on 1000 chains, worst gap {max_gap:.2e} ({elapsed:?})"
    );
}

#[test]
fn c5_search_and_oracle_rediscover_both_violations() {
    let (_, elapsed) = timed(|| {
        let minimum = search((2, 2, 2), Objective::MinimizeIqc, 50, 42, 50_000)
            .expect("search arguments are valid");
        assert!(
            minimum.best_value <= -LN_2 + 3e-3,
            "minimization only reached {}",
            minimum.best_value
        );

        let gap = search((2, 2, 2), Objective::MaximizeIqcMinusHk, 50, 42, 50_000)
            .expect("search arguments are valid");
        let best_gap = -gap.best_value;
        assert!(
            best_gap >= LN_2 - 3e-3,
            "maximization only reached {best_gap}"
        );

        let oracle_min = grid_oracle((2, 2, 2), Objective::MinimizeIqc, 10)
            .expect("grid within resource limits");
        assert!(oracle_min <= -0.6, "oracle minimum was {oracle_min}");
        assert_eq!(oracle_min, -LN_2);
        let oracle_gap = grid_oracle((2, 2, 2), Objective::MaximizeIqcMinusHk, 10)
            .expect("grid within resource limits");
        assert_eq!(-oracle_gap, LN_2, "oracle gap maximum was {}", -oracle_gap);
    });
    within_budget(elapsed, Duration::from_secs(60), "criterion 5");
    println!(
        "[PASS] criterion 5: search reached -ln 2 and +ln 2 within 3e-3 and the grid oracle confirmed both exactly ({elapsed:?})"
    );
}

#[test]
fn c6_fluctuation_identity_averages_to_one() {
    let (mc_hits, elapsed) = timed(|| {
        // Exhaustive identity on random Bayesian-reverse models.
        let mut rng = ChaCha8Rng::seed_from_u64(61_061);
        for trial in 0..100 {
            let n0 = rng.random_range(2..=4);
            let nk = rng.random_range(2..=4);
            let n1 = rng.random_range(2..=4);
            let p0 = random_prob_vec(n0, &mut rng);
            let meas = random_cond_matrix(nk, n0, &mut rng);
            let feedback = (0..nk)
                .map(|_| random_cond_matrix(n1, n0, &mut rng))
                .collect();
            let model = FeedbackModel::with_bayesian_reverse(p0, meas, feedback)
                .expect("random Bayesian models satisfy the support condition");
            let value = jarzynski_exhaustive(&model).expect("no infinite entropy production");
            assert!(
                (value - 1.0).abs() <= 1e-10,
                "trial {trial}: identity averaged to {value}"
            );
        }

        // The two counterexample chains embed into models that satisfy the
        // identity as well.
        for chain in [example1(), example2()] {
            let model = build_zero_sigma_model(&chain);
            let value = jarzynski_exhaustive(&model).expect("embedded models are Bayesian");
            assert!((value - 1.0).abs() <= 1e-12);
        }

        // Monte Carlo coverage on one fixed model: the estimate should sit
        // within four standard errors of 1 for essentially every seed.
        let mut fixture_rng = ChaCha8Rng::seed_from_u64(777);
        let p0 = random_prob_vec(2, &mut fixture_rng);
        let meas = random_cond_matrix(2, 2, &mut fixture_rng);
        let feedback = (0..2)
            .map(|_| random_cond_matrix(2, 2, &mut fixture_rng))
            .collect();
        let model = FeedbackModel::with_bayesian_reverse(p0, meas, feedback).unwrap();
        let mut hits = 0u32;
        for seed in 0..100 {
            let estimate = jarzynski_montecarlo(&model, 100_000, seed).unwrap();
            if (estimate.estimate - 1.0).abs() <= 4.0 * estimate.std_error {
                hits += 1;
            }
        }
        assert!(hits >= 99, "only {hits}/100 seeds landed within 4 SE");
        hits
    });
    within_budget(elapsed, Duration::from_secs(60), "criterion 6");
    println!(
        "[PASS] criterion 6: <e^(-sigma - i_c)> = 1 exhaustively on 102 models and within 4 SE for {mc_hits}/100 Monte Carlo seeds ({elapsed:?})"
    );
}

#[test]
fn c7_zero_entropy_production_embedding_breaks_the_modified_second_law() {
    let (summary, elapsed) = timed(|| {
        let chain = example1();
        let model = build_zero_sigma_model(&chain);
        let max_abs_sigma = trajectories(&model)
            .iter()
            .map(|t| t.sigma.abs())
            .fold(0.0, f64::max);
        assert!(max_abs_sigma <= 1e-10, "sigma reached {max_abs_sigma}");

        let avg = averages(&model).expect("embedded models are finite");
        assert!((avg.avg_sigma_plus_ic - avg.avg_ic).abs() <= 1e-12);
        assert!(avg.avg_ic >= -1e-12);

        let iqc = iqc_classical(&chain);
        let second_law_lhs = avg.avg_sigma + iqc;
        assert!(
            (second_law_lhs - (-LN_2)).abs() <= 1e-10,
            "<sigma> + I_QC was {second_law_lhs}"
        );
        (max_abs_sigma, second_law_lhs)
    });
    within_budget(elapsed, Duration::from_secs(1), "criterion 7");
    println!(
        "[PASS] criterion 7: embedding example 1 gives max|sigma| = {:.1e} yet <sigma> + I_QC = {} ({elapsed:?})",
        summary.0, summary.1
    );
}

#[test]
fn c8_command_line_output_is_byte_identical_across_runs() {
    fn run_capture(args: &[&str]) -> Vec<u8> {
        let output = Command::new(env!("CARGO_BIN_EXE_infobound"))
            .args(args)
            .env_remove("INFOBOUND_SEED")
            .output()
            .expect("binary runs");
        assert!(
            output.status.code().is_some(),
            "binary was killed by a signal"
        );
        output.stdout
    }

    let (_, elapsed) = timed(|| {
        let dir = tempfile::tempdir().unwrap();
        let model_path = dir.path().join("model.json");
        std::fs::write(
            &model_path,
            r#"{
  "p0": [0.3, 0.7],
  "meas": [[0.8, 0.25], [0.2, 0.75]],
  "feedback": [
    [[0.9, 0.1], [0.1, 0.9]],
    [[0.2, 0.6], [0.8, 0.4]]
  ]
}"#,
        )
        .unwrap();
        let model = model_path.to_str().unwrap();

        let search_args = [
            "search",
            "--dims",
            "2",
            "3",
            "2",
            "--restarts",
            "16",
            "--budget",
            "20000",
            "--seed",
            "42",
            "--oracle-steps",
            "6",
        ];
        let first = run_capture(&search_args);
        let second = run_capture(&search_args);
        assert!(!first.is_empty());
        assert_eq!(first, second, "search output drifted between runs");

        let mc_args = [
            "jarzynski",
            "--model",
            model,
            "--mode",
            "mc",
            "--samples",
            "100000",
            "--seed",
            "9",
        ];
        let first = run_capture(&mc_args);
        let second = run_capture(&mc_args);
        assert!(!first.is_empty());
        assert_eq!(first, second, "Monte Carlo output drifted between runs");
    });
    within_budget(elapsed, Duration::from_secs(60), "criterion 8");
    println!(
        "[PASS] criterion 8: search and Monte Carlo runs are byte-identical under fixed seeds ({elapsed:?})"
    );
}
