use fsos::approx::Rho;
use fsos::certify::{build, build_polynomial, build_rank_one_rational, BuildConfig, Certificate};
use fsos::charfn::{objective, Mode};
use fsos::cnf::CnfFormula;
use fsos::error::FsosError;
use fsos::fourier::Monomial;
use fsos::validate::{validate_exhaustive, validate_l1};

fn cycle_formula() -> CnfFormula {
    CnfFormula::new(
        4,
        &[
            vec![1],
            vec![2],
            vec![3],
            vec![4],
            vec![-1, -2],
            vec![-2, -3],
            vec![-3, -4],
            vec![-1, -4],
        ],
    )
    .unwrap()
}

fn running_formula() -> CnfFormula {
    CnfFormula::new(3, &[vec![1], vec![2], vec![3], vec![-1, -2, -3]]).unwrap()
}

fn only(rho: (u64, u64)) -> BuildConfig {
    BuildConfig {
        rho_schedule: vec![Rho::new(rho.0, rho.1)],
        record_time: false,
        ..BuildConfig::default()
    }
}

fn support_of(c: &Certificate, denominators: bool) -> Vec<Monomial> {
    let polys = if denominators { &c.denominators } else { &c.numerators };
    let mut s: Vec<Monomial> = polys.iter().flat_map(|p| p.support().cloned()).collect();
    s.sort();
    s.dedup();
    s
}

#[test]
fn cycle_formula_half_truncation_finds_published_supports() {
    let phi = cycle_formula();
    let c = build(&phi, Mode::Maxsat, Some(2), &only((1, 2))).unwrap();
    assert_eq!(c.metadata.d, Some(1));
    assert_eq!(c.metadata.t_size, 2);
    assert_eq!(c.metadata.s_size, 8);
    let t = support_of(&c, true);
    let mut want = vec![Monomial::one(4), Monomial::from_vars(4, &[3, 4]).unwrap()];
    want.sort();
    assert_eq!(t, want);
    let r = validate_l1(&phi, &c).unwrap();
    assert!(r.accepted, "{r:?}");
    assert!(validate_exhaustive(&phi, &c).unwrap().accepted);
}

#[test]
fn running_example_builds_rational_certificate() {
    let phi = running_formula();
    let c = build(&phi, Mode::Maxsat, None, &BuildConfig::default()).unwrap();
    assert_eq!(c.l, 1);
    assert!(validate_l1(&phi, &c).unwrap().accepted);
    assert!(validate_exhaustive(&phi, &c).unwrap().accepted);
}

#[test]
fn running_example_builds_polynomial_certificate() {
    let phi = running_formula();
    let c = build_polynomial(&phi, Mode::Maxsat, None, &BuildConfig::default()).unwrap();
    assert!(c.denominators.is_empty());
    assert!(validate_l1(&phi, &c).unwrap().accepted);
}

#[test]
fn zero_bound_gives_constant_certificate() {
    // f = 1/2 everywhere: a single constant square
    let phi = CnfFormula::new(2, &[vec![1, 2], vec![-1, 2], vec![1, -2], vec![-1, -2]]).unwrap();
    let c = build_polynomial(&phi, Mode::Maxsat, Some(1), &BuildConfig::default()).unwrap();
    assert_eq!(c.metadata.d, Some(0));
    assert_eq!(c.numerators.len(), 1);
    assert_eq!(c.numerators[0].len(), 1);
    assert!(validate_l1(&phi, &c).unwrap().residual < fsos::fourier::ratio(1, 1_000_000));
}

#[test]
fn overclaimed_bound_is_refused_before_building() {
    let phi = running_formula();
    assert!(matches!(
        build(&phi, Mode::Maxsat, Some(2), &BuildConfig::default()),
        Err(FsosError::BoundRefused { .. })
    ));
}

#[test]
fn failure_lists_every_attempt() {
    let phi = running_formula();
    let cfg = BuildConfig {
        max_degree: 1,
        solver: fsos::sdp::SolverConfig {
            max_iters: 1,
            ..Default::default()
        },
        ..only((1, 3))
    };
    match build(&phi, Mode::Maxsat, None, &cfg) {
        Err(FsosError::BuildFailed { attempts, .. }) => {
            assert_eq!(attempts.len(), 1);
            assert_eq!(attempts[0].d, 1);
            assert_eq!(attempts[0].rho, "1/3");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let phi = cycle_formula();
    let mut outs = Vec::new();
    for threads in [1, 4] {
        let cfg = BuildConfig {
            threads,
            record_time: false,
            ..BuildConfig::default()
        };
        outs.push(build(&phi, Mode::Maxsat, Some(2), &cfg).unwrap().to_json().unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn rank_one_rational_is_rejected_by_l1_but_passes_pointwise() {
    let phi = running_formula();
    let obj = objective(&phi, Mode::Maxsat, None, 26).unwrap();
    let c = build_rank_one_rational(&phi, &obj, None, 20).unwrap();
    assert!(validate_exhaustive(&phi, &c).unwrap().accepted);
    assert!(!validate_l1(&phi, &c).unwrap().accepted);
}
