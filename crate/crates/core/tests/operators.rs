use maxop_core::inequality::CheckOptions;
use maxop_core::operator::{ring_profile, Averager, Maximizer, Operator, ProfileOptions, RingProfile, TGrid};
use maxop_core::quadrature::sphere_rule;
use maxop_core::{Field, FieldTuple};

fn tuple(specs: &[&str], n: usize) -> FieldTuple {
    FieldTuple::new(specs.iter().map(|s| Field::parse(s, n, None).unwrap()).collect()).unwrap()
}

fn profile(t: &FieldTuple, x: &[f64]) -> RingProfile {
    RingProfile::new(t, x, ProfileOptions::default()).unwrap()
}

#[test]
fn block_engine_matches_sphere_rule() {
    // smooth members: a product rule of moderate degree on S^3 is accurate
    let t = tuple(&["gaussian s=1", "gaussian s=0.7 c=0.4,-0.2"], 2);
    let x = [0.3, 0.5];
    let blocks = profile(&t, &x);
    let fine = ProfileOptions { psi_order: 48, angular_order: 64, memo_samples: 16384, ..Default::default() };
    let refined = RingProfile::new(&t, &x, fine).unwrap();
    let rule = sphere_rule(4, 80).unwrap();
    let sphere = ring_profile(&t, &x, &rule).unwrap();
    for s in [0.1, 0.5, 1.0, 1.7, 2.5] {
        let b = sphere.eval(s);
        // default resolution is good to about 1e-9 and converges under refinement
        assert!((blocks.eval(s) - b).abs() < 3e-9, "s={s}: {} vs {b}", blocks.eval(s));
        assert!((refined.eval(s) - b).abs() < 2e-10, "s={s}: {} vs {b}", refined.eval(s));
    }
}

#[test]
fn dilation_covariance() {
    // g(y) = f(λy) gives S(g)(x, t) = S(f)(λx, λt), hence equal maximal values
    let lambda = 2.5;
    let f = tuple(&["gaussian s=1", "ball r=1.2 c=0.3,0"], 2);
    let g = f.dilated(lambda).unwrap();
    let x = [0.4, -0.2];
    let lx = [lambda * x[0], lambda * x[1]];
    let (pf, pg) = (profile(&f, &lx), profile(&g, &x));
    for op in [Operator::HardyLittlewood, Operator::Alpha(0.3), Operator::Alpha(0.8), Operator::Spherical] {
        let avg = Averager::new(op, 32).unwrap();
        for t in [0.2, 0.7, 1.3] {
            let (a, b) = (avg.value(&pg, t), avg.value(&pf, lambda * t));
            // equal up to quadrature error: the panels are not scale free
            assert!((a - b).abs() < 5e-9, "{op:?} t={t}: {a} vs {b}");
        }
    }
    let opts = CheckOptions::default();
    let gf = opts.grid(&pf).unwrap();
    let gg = TGrid::new(gf.t_min / lambda, gf.t_max / lambda, gf.per_decade, gf.refine_depth).unwrap();
    let a = Maximizer::new(&pg, 32).unwrap().run(Operator::Alpha(0.5), &gg).unwrap();
    let b = Maximizer::new(&pf, 32).unwrap().run(Operator::Alpha(0.5), &gf).unwrap();
    assert!((a.value - b.value).abs() < 5e-9, "{} vs {}", a.value, b.value);
}

#[test]
fn translation_covariance() {
    let c = [1.5, -0.5];
    let t0 = tuple(&["gaussian s=1", "bump r=2"], 2);
    let t1 = tuple(&["gaussian s=1 c=1.5,-0.5", "bump r=2 c=1.5,-0.5"], 2);
    let x = [0.2, 0.9];
    let p0 = profile(&t0, &x);
    let p1 = profile(&t1, &[x[0] + c[0], x[1] + c[1]]);
    let avg = Averager::new(Operator::Alpha(0.6), 32).unwrap();
    for t in [0.3, 1.0, 2.0] {
        let (a, b) = (avg.value(&p0, t), avg.value(&p1, t));
        assert!((a - b).abs() < 1e-11, "t={t}: {a} vs {b}");
    }
}

#[test]
fn family_is_continuous_at_both_ends() {
    let t = tuple(&["gaussian s=1", "gaussian s=1"], 2);
    let p = profile(&t, &[0.5, 0.0]);
    let at = |op| Averager::new(op, 32).unwrap().value(&p, 1.2);
    let (m, s) = (at(Operator::HardyLittlewood), at(Operator::Spherical));
    assert!((at(Operator::Alpha(1e-6)) - m).abs() < 1e-5);
    assert!((at(Operator::Alpha(1.0 - 1e-6)) - s).abs() < 1e-5);
}

#[test]
fn constants_are_fixed_points() {
    let t = tuple(&["const v=1", "const v=1", "const v=1"], 3);
    let p = profile(&t, &[0.1, 0.2, 0.3]);
    for op in [Operator::HardyLittlewood, Operator::Alpha(0.4), Operator::Spherical] {
        let v = Averager::new(op, 32).unwrap().value(&p, 2.0);
        assert!((v - 1.0).abs() < 1e-13, "{op:?}: {v}");
    }
}


