use super::*;
use crate::charfn::{objective, Mode};
use crate::cnf::CnfFormula;
use crate::fourier::{ratio, RationalPoly};
use num_traits::ToPrimitive;

fn mono(n: usize, vars: &[usize]) -> Monomial {
    Monomial::from_vars(n, vars).unwrap()
}

fn monos(n: usize, sets: &[&[usize]]) -> Vec<Monomial> {
    sets.iter().map(|v| mono(n, v)).collect()
}

fn running_f() -> RationalPoly {
    let phi = CnfFormula::new(3, &[vec![1], vec![2], vec![3], vec![-1, -2, -3]]).unwrap();
    objective(&phi, Mode::Maxsat, Some(1), 26).unwrap().f
}

/// `28.5 + 6 y1 - 13 y2 + 6 y1 y3 + 5 y1 y2 y4 - 2 y1 y3 y4`.
fn weighted_f() -> RationalPoly {
    RationalPoly::from_var_terms(
        4,
        vec![
            (vec![], ratio(57, 2)),
            (vec![1], ratio(6, 1)),
            (vec![2], ratio(-13, 1)),
            (vec![1, 3], ratio(6, 1)),
            (vec![1, 2, 4], ratio(5, 1)),
            (vec![1, 3, 4], ratio(-2, 1)),
        ],
    )
    .unwrap()
}

fn matrix(rows: &[&[f64]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

#[test]
fn constant_program_is_solved_exactly() {
    let f = FloatPoly::constant(2, 1.0).unwrap();
    let one = monos(2, &[&[]]);
    let p = assemble(&f, &one, &one, ProblemKind::FeasibilityRational, 0.0).unwrap();
    assert_eq!(p.lambda().len(), 1);
    let sol = check_solution(&p, matrix(&[&[1.0]]), matrix(&[&[1.0]]), 0).unwrap();
    assert_eq!(sol.l1_residual, 0.0);
    match solve(&p, &SolverConfig::default()).unwrap() {
        SolveOutcome::Solved { solution, .. } => assert!(solution.l1_residual < 1e-6),
        other => panic!("{other:?}"),
    }
}

#[test]
fn published_gram_matrices_nearly_satisfy_constraints() {
    let f = running_f().to_float();
    let s = monos(3, &[&[], &[1], &[2], &[3]]);
    let t = monos(3, &[&[], &[1, 2, 3]]);
    let p = assemble(&f, &s, &t, ProblemKind::FeasibilityRational, 0.0).unwrap();
    let u = matrix(&[
        &[1.25, 0.589, 0.589, 0.589],
        &[0.589, 0.706, 0.252, 0.252],
        &[0.589, 0.252, 0.706, 0.252],
        &[0.589, 0.252, 0.252, 0.706],
    ]);
    let v = matrix(&[&[1.51, 0.168], &[0.168, 1.51]]);
    let sol = check_solution(&p, u, v, 0).unwrap();
    // three significant digits on roughly a dozen coefficients
    assert!(sol.l1_residual < 0.05, "{}", sol.l1_residual);
    assert!(sol.psd_margins.0 > 0.0 && sol.psd_margins.1 > 0.5);
}

#[test]
fn running_example_program_is_feasible() {
    let f = running_f().to_float();
    let s = monos(3, &[&[], &[1], &[2], &[3]]);
    let t = monos(3, &[&[], &[1, 2, 3]]);
    let p = assemble(&f, &s, &t, ProblemKind::FeasibilityRational, DEFAULT_PSD_MARGIN).unwrap();
    let SolveOutcome::Solved { solution, .. } = solve(&p, &SolverConfig::default()).unwrap() else {
        panic!("no solution");
    };
    assert!(solution.l1_residual < 0.49);
    assert!((solution.l1_residual - l1_residual(&p, &solution.u, &solution.v)).abs() < 1e-12);
    assert!(solution.psd_margins.1 >= 0.5 - 1e-9);
    // the denominator factors reproduce sum h^2 >= 1 on the cube
    let h = psd_extract(3, &solution.v, p.t(), 1e-9).unwrap();
    for bits in 0..8u64 {
        let neg = Monomial::from_low_bits(3, bits);
        let hh: f64 = h.iter().map(|q| q.eval_at(&neg).powi(2)).sum();
        assert!(hh >= 1.0 - 1e-9, "{hh}");
    }
}

#[test]
fn lambda_is_the_union_of_products() {
    // S xor S for S = {0, y1, y2} is {0, y1, y2, y1y2}; T xor T xor supp f adds y3
    let f = FloatPoly::from_var_terms(3, vec![(vec![], 1.0), (vec![3], 0.5)]).unwrap();
    let p = assemble(&f, &monos(3, &[&[], &[1], &[2]]), &monos(3, &[&[]]), ProblemKind::MinL1Poly, 0.0)
        .unwrap();
    let mut want = monos(3, &[&[], &[1], &[2], &[3], &[1, 2]]);
    want.sort();
    assert_eq!(p.lambda(), &want[..]);
}

#[test]
fn assemble_rejects_bad_input() {
    let f = FloatPoly::constant(2, 1.0).unwrap();
    assert!(assemble(&f, &[], &monos(2, &[&[]]), ProblemKind::FeasibilityRational, 0.0).is_err());
    let t = monos(2, &[&[], &[1]]);
    assert!(assemble(&f, &t, &t, ProblemKind::MinL1Poly, 0.0).is_err());
    assert!(assemble(&f, &monos(3, &[&[3]]), &monos(2, &[&[]]), ProblemKind::MinL1Poly, 0.0).is_err());
}

#[test]
fn extract_identity_gives_monomials() {
    let labels = monos(3, &[&[1], &[2, 3]]);
    let g = psd_extract(3, &DMatrix::identity(2, 2), &labels, 1e-12).unwrap();
    assert_eq!(g.len(), 2);
    let sum: FloatPoly = g.iter().fold(FloatPoly::zero(3).unwrap(), |a, q| a.add(&q.square()).unwrap());
    assert!((sum.constant_term() - 2.0).abs() < 1e-12);
    assert!(sum.terms().filter(|(m, _)| !m.is_one()).all(|(_, c)| c.abs() < 1e-12));
}

#[test]
fn extract_rank_one_returns_the_vector() {
    let w = [1.0, -2.0, 0.5];
    let m = DMatrix::from_fn(3, 3, |i, j| w[i] * w[j]);
    let labels = monos(2, &[&[], &[1], &[2]]);
    let g = psd_extract(2, &m, &labels, 1e-12).unwrap();
    assert_eq!(g.len(), 1);
    // sign fixed so the largest entry is positive
    for (l, x) in labels.iter().zip(w) {
        assert!((g[0].coeff(l) + x).abs() < 1e-12);
    }
}

#[test]
fn extract_preserves_quadratic_form() {
    let v = matrix(&[&[1.51, 0.168], &[0.168, 1.51]]);
    let labels = monos(3, &[&[], &[1, 2, 3]]);
    let h = psd_extract(3, &v, &labels, 1e-12).unwrap();
    for bits in 0..8u64 {
        let neg = Monomial::from_low_bits(3, bits);
        let w: Vec<f64> = labels.iter().map(|m| if m.odd_overlap(&neg) { -1.0 } else { 1.0 }).collect();
        let quad: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| w[i] * v[(i, j)] * w[j]).sum();
        let hh: f64 = h.iter().map(|q| q.eval_at(&neg).powi(2)).sum();
        assert!((quad - hh).abs() < 1e-12);
    }
}

#[test]
fn extract_rejects_indefinite() {
    let m = matrix(&[&[1.0, 0.0], &[0.0, -0.5]]);
    let labels = monos(1, &[&[], &[1]]);
    assert!(matches!(psd_extract(1, &m, &labels, 1e-9), Err(FsosError::NotPsd { .. })));
}

#[test]
fn polynomial_program_on_weighted_example_has_exact_lower_bound() {
    let fr = weighted_f();
    let f = fr.to_float();
    let s: Vec<Monomial> = fr.support().cloned().collect();
    let one = monos(4, &[&[]]);
    let p = assemble(&f, &s, &one, ProblemKind::MinL1Poly, 0.0).unwrap();
    let cfg = SolverConfig {
        max_iters: 5000,
        ..SolverConfig::default()
    };
    let SolveOutcome::Solved { solution, dual } = solve(&p, &cfg).unwrap() else {
        panic!("polynomial program always returns its best point");
    };
    let bound = min_l1_dual_bound(&p, &fr, &dual).unwrap().expect("dual bound");
    assert!(bound.bound >= ratio(1, 2), "{}", bound.bound);
    assert!(solution.l1_residual >= bound.bound.to_f64().unwrap() - 1e-9);
}

#[test]
fn weighted_example_is_feasible_with_rational_denominator() {
    let fr = weighted_f();
    let f = fr.to_float();
    let s: Vec<Monomial> = fr.support().cloned().collect();
    let p = assemble(&f, &s, &s, ProblemKind::FeasibilityRational, DEFAULT_PSD_MARGIN).unwrap();
    match solve(&p, &SolverConfig::default()).unwrap() {
        SolveOutcome::Solved { solution, .. } => assert!(solution.l1_residual < 0.5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sdpa_round_trip() {
    let f = running_f().to_float();
    let s = monos(3, &[&[], &[1], &[2], &[3]]);
    let t = monos(3, &[&[], &[1, 2, 3]]);
    let p = assemble(&f, &s, &t, ProblemKind::FeasibilityRational, DEFAULT_PSD_MARGIN).unwrap();
    let dat = export_sdpa(&p);
    let body: Vec<&str> = dat.lines().filter(|l| !l.starts_with(['"', '*'])).collect();
    assert_eq!(body[0], format!("{} = mDIM", p.lambda().len()));
    assert_eq!(body[2], format!("4 2 -{}", 2 * p.lambda().len()));
    let SolveOutcome::Solved { solution, .. } = solve(&p, &SolverConfig::default()).unwrap() else {
        panic!("no solution");
    };
    let mut text = String::from("* Y blocks\n");
    for (blk, m, off) in [(1, &solution.u, 0.0), (2, &solution.v, p.v_floor())] {
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                let v = m[(i, j)] - if i == j { off } else { 0.0 };
                text.push_str(&format!("2 {blk} {} {} {v}\n", i + 1, j + 1));
            }
        }
    }
    let back = import_sdpa_solution(&p, &text).unwrap();
    assert!((back.l1_residual - solution.l1_residual).abs() < 1e-9);
    assert!(import_sdpa_solution(&p, "1 9 1 1 0.5").is_err());
    assert!(import_sdpa_solution(&p, "1 1 5 1 0.5").is_err());
}

#[test]
fn sdpa_constraints_match_the_residual_operator() {
    // evaluate each exported constraint at the published matrices and compare
    // with the direct residual
    let f = running_f().to_float();
    let s = monos(3, &[&[], &[1], &[2], &[3]]);
    let t = monos(3, &[&[], &[1, 2, 3]]);
    let p = assemble(&f, &s, &t, ProblemKind::FeasibilityRational, 0.0).unwrap();
    let u = DMatrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.25 });
    let v0 = matrix(&[&[0.3, 0.1], &[0.1, 0.2]]);
    let v = &v0 + DMatrix::identity(2, 2) * p.v_floor();
    let dat = export_sdpa(&p);
    let mut body = dat.lines().filter(|l| !l.starts_with(['"', '*']));
    let m: usize = body.next().unwrap().split_whitespace().next().unwrap().parse().unwrap();
    body.next();
    body.next();
    let c: Vec<f64> = body.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    let mut lhs = vec![0.0; m];
    for line in body {
        let x: Vec<f64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
        let (k, blk, i, j, val) = (x[0] as usize, x[1] as usize, x[2] as usize - 1, x[3] as usize - 1, x[4]);
        if k == 0 || blk == 3 {
            continue;
        }
        let mat = if blk == 1 { &u } else { &v0 };
        lhs[k - 1] += val * mat[(i, j)] * if i == j { 1.0 } else { 2.0 };
    }
    let l1: f64 = lhs.iter().zip(&c).map(|(a, b)| (a - b).abs()).sum();
    assert!((l1 - l1_residual(&p, &u, &v)).abs() < 1e-9);
}
