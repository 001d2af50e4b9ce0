use heisproj::energy::{discrete_energy, energy_theta_sweep, excluded_domain, Kernel, Modulus};
use heisproj::heisenberg::{dh, group_inv};
use heisproj::measures::{
    dilate_measure, frostman_constant, parabola_measure, product_cantor_measure, pushforward_projection,
    translate_measure, DiscreteMeasure, MeasureMeta, PlanarMeasure,
};
use heisproj::{Angle, HPoint, PlanarPoint};
use proptest::prelude::*;

fn cloud(max: usize) -> impl Strategy<Value = Vec<HPoint>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 2..max)
        .prop_map(|v| v.into_iter().map(|(x, y, t)| HPoint::new(x, y, t)).collect())
}

// Coordinates rather than d_H: the Korányi distance turns rounding in `t`
// into errors of its square root.
fn close(a: HPoint, b: HPoint, tol: f64) -> bool {
    (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && (a.t - b.t).abs() <= tol * 10.0
}

fn measure(points: Vec<HPoint>) -> DiscreteMeasure {
    DiscreteMeasure::uniform(points, MeasureMeta::new("test")).unwrap()
}

fn planar(max: usize) -> impl Strategy<Value = PlanarMeasure> {
    prop::collection::vec((-0.2..0.2f64, -0.02..0.02f64, 0.1..2.0f64), 2..max).prop_map(|v| {
        let pts = v.iter().map(|&(a, b, _)| PlanarPoint::new(a, b)).collect();
        PlanarMeasure::new(pts, v.iter().map(|p| p.2).collect()).unwrap()
    })
}

fn distinct(nu: &PlanarMeasure) -> bool {
    let p = nu.points();
    (0..p.len()).all(|i| (i + 1..p.len()).all(|k| (p[i].v - p[k].v).abs() + (p[i].t - p[k].t).abs() > 1e-9))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn translation_round_trip(pts in cloud(20), g in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)) {
        let mu = measure(pts);
        let g = HPoint::new(g.0, g.1, g.2);
        let back = translate_measure(group_inv(g), &translate_measure(g, &mu));
        for (a, b) in back.points().iter().zip(mu.points()) {
            prop_assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn dilation_round_trip_and_homogeneity(pts in cloud(20), lambda in 0.1..10.0f64) {
        let mu = measure(pts);
        let big = dilate_measure(lambda, &mu).unwrap();
        let back = dilate_measure(1.0 / lambda, &big).unwrap();
        for (a, b) in back.points().iter().zip(mu.points()) {
            prop_assert!(close(*a, *b, 1e-12));
        }
        let (p, q) = (mu.points()[0], mu.points()[1]);
        let (bp, bq) = (big.points()[0], big.points()[1]);
        prop_assert!((dh(bp, bq) - lambda * dh(p, q)).abs() <= 1e-10 * lambda * (1.0 + dh(p, q)));
    }

    #[test]
    fn pushforward_conserves_mass(pts in cloud(30), theta in 0.0..3.2f64) {
        let mu = measure(pts);
        let nu = pushforward_projection(&mu, Angle::new(theta).unwrap());
        prop_assert_eq!(nu.len(), mu.len());
        prop_assert!((nu.mass() - mu.mass()).abs() <= 1e-15 * mu.len() as f64);
    }

    #[test]
    fn frostman_constant_grows_with_alpha(pts in cloud(30), a in 0.2..2.5f64, da in 0.0..0.5f64) {
        let mu = measure(pts);
        let radii: Vec<f64> = (0..6).map(|k| 2f64.powi(-k)).rev().collect();
        let lo = frostman_constant(&mu, a, &radii).unwrap();
        let hi = frostman_constant(&mu, a + da, &radii).unwrap();
        prop_assert!(lo.c_alpha <= hi.c_alpha * (1.0 + 1e-12));
    }

    #[test]
    fn energy_grows_with_s_below_unit_distance(nu in planar(25), s in 0.1..2.5f64, ds in 0.0..0.4f64) {
        prop_assume!(distinct(&nu));
        for kernel in [Kernel::Koranyi, Kernel::Fs] {
            let a = discrete_energy(&nu, s, kernel).unwrap();
            let b = discrete_energy(&nu, s + ds, kernel).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn energy_scales_with_mass_and_dilation(nu in planar(25), c in 0.1..10.0f64, lambda in 0.1..10.0f64, s in 0.1..2.9f64) {
        prop_assume!(distinct(&nu));
        let e = discrete_energy(&nu, s, Kernel::Koranyi).unwrap();
        let scaled = discrete_energy(&nu.scale_mass(c).unwrap(), s, Kernel::Koranyi).unwrap();
        prop_assert!((scaled - c * c * e).abs() <= 1e-11 * c * c * e);
        // Build the measure inside V_0⊥, dilate in the group, and project back at θ = 0.
        let pts: Vec<HPoint> = nu.points().iter().map(|p| HPoint::new(0.0, p.v, p.t)).collect();
        let mu = DiscreteMeasure::new(pts, nu.weights().to_vec(), MeasureMeta::new("plane")).unwrap();
        let theta = Angle::new(0.0).unwrap();
        let fixed = discrete_energy(&pushforward_projection(&mu, theta), s, Kernel::Koranyi).unwrap();
        prop_assert!((fixed - e).abs() <= 1e-11 * e);
        let big = pushforward_projection(&dilate_measure(lambda, &mu).unwrap(), theta);
        let got = discrete_energy(&big, s, Kernel::Koranyi).unwrap();
        prop_assert!((got - lambda.powf(-s) * e).abs() <= 1e-10 * lambda.powf(-s) * e);
    }

    #[test]
    fn modulus_four_domain_is_inside_modulus_two(theta0 in 0.0..3.2f64, eps in 0.0..0.39f64) {
        let t = Angle::new(theta0).unwrap();
        let four = excluded_domain(t, eps, Modulus::Four).unwrap();
        let two = excluded_domain(t, eps, Modulus::Two).unwrap();
        prop_assert!(four.is_subset_of(&two));
        prop_assert!(four.total_length() <= two.total_length() + 1e-12);
    }
}

#[test]
fn generators_are_deterministic_and_on_their_sets() {
    let a = parabola_measure(512, 1.0).unwrap();
    assert_eq!(a.points(), parabola_measure(512, 1.0).unwrap().points());
    for p in a.points() {
        assert_eq!(p.y, 0.0);
        assert!((p.t - p.x * p.x / 4.0).abs() <= 1e-15);
        assert!((1.0..=2.0).contains(&p.x));
    }
    let theta0 = Angle::new(0.8).unwrap();
    let c = product_cantor_measure(theta0, 1.0, 0.5, 6, 2.0).unwrap();
    assert_eq!(c.points(), product_cantor_measure(theta0, 1.0, 0.5, 6, 2.0).unwrap().points());
    for p in c.points() {
        assert!(p.z().dot(theta0.direction()).abs() <= 1e-12);
    }
}

#[test]
fn sweep_is_reproducible_and_fixed_by_its_own_plane() {
    let theta0 = Angle::new(0.3).unwrap();
    let mu = product_cantor_measure(theta0, 1.0, 0.5, 4, 1.0).unwrap();
    let dom = excluded_domain(theta0, 0.2, Modulus::Two).unwrap();
    let a = energy_theta_sweep(&mu, 1.5, &dom, 16, Kernel::Koranyi).unwrap();
    let b = energy_theta_sweep(&mu, 1.5, &dom, 16, Kernel::Koranyi).unwrap();
    assert_eq!(a, b);
    let pts: Vec<PlanarPoint> = mu.points().iter().map(|p| PlanarPoint::new(p.z().dot(theta0.normal()), p.t)).collect();
    let own = PlanarMeasure::new(pts, mu.weights().to_vec()).unwrap();
    let at_theta0 = discrete_energy(&pushforward_projection(&mu, theta0), 1.5, Kernel::Koranyi).unwrap();
    let direct = discrete_energy(&own, 1.5, Kernel::Koranyi).unwrap();
    assert!((at_theta0 - direct).abs() <= 1e-12 * direct);
}
