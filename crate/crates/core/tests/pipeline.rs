use alr_core::analysis::{
    classify_blowup, cloak_admissibility, default_deltas, delta_sweep, predict_blowup, CloakVerdict, Prediction,
    Verdict,
};
use alr_core::error::AlrError;
use alr_core::media::{Profile, RadialLayeredMedium};
use alr_core::solver::ShellSource;

fn verdict_for(m: &RadialLayeredMedium, k: f64, rho: f64) -> Verdict {
    let src = ShellSource::point_like(rho, m.dimension(), 0.0).unwrap();
    classify_blowup(&delta_sweep(m, k, &src, &default_deltas()).unwrap()).verdict
}

#[test]
fn sweeps_agree_with_the_prediction_away_from_the_threshold() {
    let mn = RadialLayeredMedium::core_shell(2, 1.0, 2.0).unwrap();
    let m6 = RadialLayeredMedium::doubly_complementary(2, Profile::Constant(1.0), Profile::Constant(1.0), 1.0, 4.0).unwrap();
    let cases = [(&mn, 0.0, 2.0, 4.0, [2.2, 2.5, 3.3, 5.0]), (&m6, 1.0, 1.0, 4.0, [1.3, 1.6, 2.6, 5.0])];
    for (m, k, r2, r3, radii) in cases {
        for rho in radii {
            let expect = match predict_blowup(rho, r2, r3).unwrap() {
                Prediction::BlowsUp => Verdict::BlowsUp,
                Prediction::Bounded => Verdict::Bounded,
            };
            assert_eq!(verdict_for(m, k, rho), expect, "k = {k}, rho = {rho}");
        }
    }
}

#[test]
fn three_dimensional_media() {
    // constant coefficients are complementary only in the plane
    let mn = RadialLayeredMedium::core_shell(3, 1.0, 2.0).unwrap();
    let src = ShellSource::point_like(2.2, 3, 0.0).unwrap();
    assert!(matches!(delta_sweep(&mn, 0.0, &src, &default_deltas()), Err(AlrError::NotDoublyComplementary { .. })));

    let m = RadialLayeredMedium::doubly_complementary(3, Profile::Constant(1.0), Profile::Constant(1.0), 1.0, 4.0).unwrap();
    assert_eq!(verdict_for(&m, 1.0, 1.4), Verdict::BlowsUp);
    assert_eq!(verdict_for(&m, 1.0, 5.0), Verdict::Bounded);
}

#[test]
fn cloakability_follows_the_source_radius() {
    let inside = ShellSource::point_like(1.5, 2, 0.0).unwrap();
    let outside = ShellSource::point_like(3.0, 2, 0.0).unwrap();
    assert_eq!(cloak_admissibility(&inside, 1.0, 4.0).verdict, CloakVerdict::Cloakable);
    assert_eq!(cloak_admissibility(&outside, 1.0, 4.0).verdict, CloakVerdict::NotCloakable);
}
