//! Exercises the C ABI through the exported symbols, cross-checking results
//! against the core library directly.

use ewaf::environment::LossFunction;
use ewaf::forecaster::{Decision, Forecaster, Outcome};
use ewaf::schedule::LearningRateSchedule;
use ewaf_ffi::*;

#[test]
fn schedule_constructors_enforce_domains() {
    unsafe {
        // Single-expert √-decay schedules degenerate to rate zero.
        assert!(ewaf_schedule_sqrt4(1).is_null());
        assert!(ewaf_schedule_sqrt8(0).is_null());
        assert!(ewaf_schedule_constant(0.0).is_null());
        assert!(ewaf_schedule_constant(f64::NAN).is_null());
        assert!(ewaf_schedule_custom(std::ptr::null(), 3).is_null());
        assert!(ewaf_schedule_custom([0.5].as_ptr(), 0).is_null());

        let ok = ewaf_schedule_sqrt4(2);
        assert!(!ok.is_null());
        ewaf_schedule_free(ok);
        // Null free is a no-op.
        ewaf_schedule_free(std::ptr::null_mut());
    }
}

#[test]
fn schedule_eta_matches_the_core_library() {
    unsafe {
        let handle = ewaf_schedule_sqrt4(8);
        let reference = LearningRateSchedule::sqrt_decay4(8).unwrap();
        for t in [1usize, 2, 10, 1000] {
            let mut eta = 0.0;
            assert_eq!(ewaf_schedule_eta(handle, t, &mut eta), EwafStatus::Ok);
            assert_eq!(eta, reference.eta(t).unwrap());
        }
        let mut eta = 0.0;
        assert_eq!(
            ewaf_schedule_eta(handle, 0, &mut eta),
            EwafStatus::ScheduleError
        );
        ewaf_schedule_free(handle);
    }
}

#[test]
fn custom_schedule_validation_reports_through_status_codes() {
    unsafe {
        let increasing = [0.4, 0.5];
        let handle = ewaf_schedule_custom(increasing.as_ptr(), increasing.len());
        assert!(!handle.is_null());
        assert_eq!(ewaf_schedule_validate(handle, 2), EwafStatus::ScheduleError);
        ewaf_schedule_free(handle);

        let fine = [0.5, 0.4];
        let handle = ewaf_schedule_custom(fine.as_ptr(), fine.len());
        assert_eq!(ewaf_schedule_validate(handle, 2), EwafStatus::Ok);
        // Horizon past the sequence end is a schedule error.
        assert_eq!(ewaf_schedule_validate(handle, 3), EwafStatus::ScheduleError);
        ewaf_schedule_free(handle);
    }
}

#[test]
fn forecaster_loop_matches_the_core_library() {
    let advice_rounds = [[0.0, 1.0, 0.5], [0.2, 0.9, 0.4], [0.1, 0.8, 0.6]];
    let outcomes = [1.0, 0.0, 0.7];

    // Reference run through the Rust API.
    let mut reference = Forecaster::new(
        3,
        LearningRateSchedule::sqrt_decay4(3).unwrap(),
        LossFunction::Squared,
    )
    .unwrap();
    let mut reference_predictions = Vec::new();
    for (advice, &outcome) in advice_rounds.iter().zip(&outcomes) {
        let advice: Vec<Decision> = advice.iter().map(|&v| Decision::new(v).unwrap()).collect();
        let record = reference
            .step(&advice, Outcome::new(outcome).unwrap())
            .unwrap();
        reference_predictions.push(record.prediction.value());
    }

    unsafe {
        let schedule = ewaf_schedule_sqrt4(3);
        let forecaster = ewaf_forecaster_new(3, schedule, EwafLossKind::Squared);
        assert!(!forecaster.is_null());

        for (advice, &outcome) in advice_rounds.iter().zip(&outcomes) {
            let mut prediction = f64::NAN;
            let mut loss = f64::NAN;
            let status = ewaf_forecaster_step(
                forecaster,
                advice.as_ptr(),
                advice.len(),
                outcome,
                &mut prediction,
                &mut loss,
            );
            assert_eq!(status, EwafStatus::Ok);
            assert!((0.0..=1.0).contains(&loss));
        }

        let mut round = 0usize;
        assert_eq!(
            ewaf_forecaster_round(forecaster, &mut round),
            EwafStatus::Ok
        );
        assert_eq!(round, 3);

        let mut regret = f64::NAN;
        assert_eq!(
            ewaf_forecaster_regret(forecaster, &mut regret),
            EwafStatus::Ok
        );
        assert_eq!(regret, reference.regret());

        let mut best = usize::MAX;
        assert_eq!(
            ewaf_forecaster_best_expert(forecaster, &mut best),
            EwafStatus::Ok
        );
        assert_eq!(best, reference.best_expert());

        let mut losses = [0.0f64; 3];
        assert_eq!(
            ewaf_forecaster_cumulative_losses(forecaster, losses.as_mut_ptr(), 3),
            EwafStatus::Ok
        );
        assert_eq!(&losses[..], reference.cumulative_expert_losses());

        let mut weights = [0.0f64; 3];
        assert_eq!(
            ewaf_forecaster_weights(forecaster, weights.as_mut_ptr(), 3),
            EwafStatus::Ok
        );
        let reference_weights = reference.weights().unwrap();
        assert_eq!(&weights[..], reference_weights.as_slice());

        ewaf_forecaster_free(forecaster);
        ewaf_schedule_free(schedule);
    }
}

#[test]
fn argument_errors_surface_as_status_codes() {
    unsafe {
        let schedule = ewaf_schedule_constant(0.5);
        let forecaster = ewaf_forecaster_new(2, schedule, EwafLossKind::Absolute);

        let mut out = f64::NAN;
        // Wrong advice length.
        assert_eq!(
            ewaf_forecaster_predict(forecaster, [0.5].as_ptr(), 1, &mut out),
            EwafStatus::LengthMismatch
        );
        // Advice outside the unit interval.
        assert_eq!(
            ewaf_forecaster_predict(forecaster, [0.5, 1.5].as_ptr(), 2, &mut out),
            EwafStatus::InvalidArgument
        );
        // Outcome outside the unit interval.
        assert_eq!(
            ewaf_forecaster_step(
                forecaster,
                [0.5, 0.5].as_ptr(),
                2,
                -0.1,
                std::ptr::null_mut(),
                std::ptr::null_mut(),
            ),
            EwafStatus::InvalidArgument
        );
        // Null pointers.
        assert_eq!(
            ewaf_forecaster_predict(std::ptr::null(), [0.5, 0.5].as_ptr(), 2, &mut out),
            EwafStatus::NullPointer
        );
        assert_eq!(
            ewaf_forecaster_weights(forecaster, std::ptr::null_mut(), 2),
            EwafStatus::NullPointer
        );
        // Wrong buffer length.
        let mut buffer = [0.0f64; 5];
        assert_eq!(
            ewaf_forecaster_weights(forecaster, buffer.as_mut_ptr(), 5),
            EwafStatus::LengthMismatch
        );
        // Empty expert pool at construction.
        assert!(ewaf_forecaster_new(0, schedule, EwafLossKind::Absolute).is_null());

        ewaf_forecaster_free(forecaster);
        ewaf_schedule_free(schedule);
    }
}

#[test]
fn bounds_match_the_core_library() {
    unsafe {
        let schedule = ewaf_schedule_sqrt4(2);
        let reference = LearningRateSchedule::sqrt_decay4(2).unwrap();

        let mut tv = f64::NAN;
        assert_eq!(
            ewaf_bound_time_varying(schedule, 2, 100, &mut tv),
            EwafStatus::Ok
        );
        assert_eq!(
            tv,
            ewaf::bounds::bound_time_varying(&reference, 2, 100).unwrap()
        );

        let mut corollary = f64::NAN;
        assert_eq!(ewaf_bound_corollary(2, 100, &mut corollary), EwafStatus::Ok);
        assert!((corollary - 8.325_546_111_576_978).abs() < 1e-12);
        assert!(tv <= corollary + 1e-9);

        let mut comparison = f64::NAN;
        assert_eq!(
            ewaf_bound_comparison(schedule, 2, 100, &mut comparison),
            EwafStatus::Ok
        );
        assert!(comparison > tv);

        // Degenerate arguments.
        assert_eq!(
            ewaf_bound_corollary(1, 100, &mut corollary),
            EwafStatus::InvalidArgument
        );
        assert_eq!(
            ewaf_bound_time_varying(schedule, 0, 100, &mut tv),
            EwafStatus::InvalidArgument
        );

        ewaf_schedule_free(schedule);
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ewaf.h"))
        .expect("build.rs generates include/ewaf.h");
    for symbol in [
        "typedef struct EwafForecaster EwafForecaster;",
        "typedef struct EwafSchedule EwafSchedule;",
        "ewaf_schedule_sqrt4",
        "ewaf_forecaster_step",
        "ewaf_bound_time_varying",
        "EwafStatus_Ok",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
