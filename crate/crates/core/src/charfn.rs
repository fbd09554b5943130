//! Modified characteristic functions and the per-mode objective.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cnf::{oracle_bounds, Clause, CnfFormula, OracleBounds};
use crate::error::{FsosError, Result};
use crate::fourier::{ratio, Monomial, Rational, RationalPoly};

/// The shift added to the objective so its image avoids 0.
pub fn default_shift() -> Rational {
    ratio(1, 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    Maxsat,
    Sat,
    Unsat,
    Minsat,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Maxsat => "MAXSAT",
            Mode::Sat => "SAT",
            Mode::Unsat => "UNSAT",
            Mode::Minsat => "MINSAT",
        })
    }
}

impl FromStr for Mode {
    type Err = FsosError;

    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "maxsat" => Ok(Mode::Maxsat),
            "sat" => Ok(Mode::Sat),
            "unsat" => Ok(Mode::Unsat),
            "minsat" => Ok(Mode::Minsat),
            other => Err(FsosError::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// `f_c = 2^-w prod (1 +- y_v)`: equals 1 exactly where the clause is falsified.
pub fn clause_char(c: &Clause, n: usize) -> RationalPoly {
    clause_char_counted(c, n, &mut 0)
}

fn clause_char_counted(c: &Clause, n: usize, ops: &mut usize) -> RationalPoly {
    let lits = c.literals();
    let w = lits.len();
    let coeff = Rational::new(BigInt::from(1), BigInt::from(1) << w);
    let mut p = RationalPoly::zero(n).expect("n already validated");
    for subset in 0u64..1 << w {
        let mut m = Monomial::one(n);
        let mut negative = false;
        for (j, l) in lits.iter().enumerate() {
            if subset >> j & 1 == 1 {
                m.toggle(l.var - 1);
                negative ^= l.negated;
            }
            *ops += 1;
        }
        p.add_term(m, if negative { -coeff.clone() } else { coeff.clone() });
    }
    p
}

/// `f_phi = sum_i f_{c_i}`, the falsified-clause counter.
pub fn formula_char(phi: &CnfFormula) -> RationalPoly {
    formula_char_counted(phi).0
}

/// [`formula_char`] together with the number of elementary term operations.
pub fn formula_char_counted(phi: &CnfFormula) -> (RationalPoly, usize) {
    let mut ops = 0;
    let mut f = RationalPoly::zero(phi.n()).expect("n already validated");
    for c in phi.clauses() {
        for (m, v) in clause_char_counted(c, phi.n(), &mut ops).terms() {
            f.add_term(m.clone(), v.clone());
            ops += 1;
        }
    }
    (f, ops)
}

/// Integer-valued polynomial that must be nonnegative for the claim `(mode, L)`.
///
/// MAXSAT `f_phi - L`, UNSAT `f_phi - 1`, MINSAT `L - f_phi`, SAT `-f_phi`.
pub fn target_poly(phi: &CnfFormula, mode: Mode, l: i64) -> RationalPoly {
    let f_phi = formula_char(phi);
    let li = Rational::from_integer(BigInt::from(l));
    match mode {
        Mode::Maxsat | Mode::Unsat => f_phi.add_constant(-li),
        Mode::Minsat => f_phi.scale(&ratio(-1, 1)).add_constant(li),
        Mode::Sat => f_phi.scale(&ratio(-1, 1)).add_constant(-li),
    }
}

/// The polynomial a certificate proves positive, with its provenance.
#[derive(Clone, Debug)]
pub struct Objective {
    pub mode: Mode,
    pub l: i64,
    /// Integer-valued target (see [`target_poly`]).
    pub target: RationalPoly,
    pub shift: Rational,
    /// `target + shift`.
    pub f: RationalPoly,
    /// `(min, max)` of the target over the cube, when the oracle ran.
    pub target_range: Option<(i64, i64)>,
    /// True when `L` came from the user and could not be checked.
    pub unverified: bool,
    pub max_width: usize,
    pub m: usize,
}

impl Objective {
    /// Upper bound on the target's image; falls back to a clause-count bound.
    pub fn image_upper(&self) -> i64 {
        if let Some((_, hi)) = self.target_range {
            return hi;
        }
        let m = self.m as i64;
        match self.mode {
            Mode::Maxsat | Mode::Unsat => m - self.l,
            Mode::Minsat => self.l,
            Mode::Sat => -self.l,
        }
    }
}

/// Builds the objective for `(phi, mode)`.
///
/// `l_opt` overrides the bound. When `n <= oracle_limit` the bound is checked
/// and an impossible claim is refused with a witness assignment.
pub fn objective(
    phi: &CnfFormula,
    mode: Mode,
    l_opt: Option<i64>,
    oracle_limit: usize,
) -> Result<Objective> {
    let oracle: Option<OracleBounds> = if phi.n() <= oracle_limit {
        Some(oracle_bounds(phi, oracle_limit)?)
    } else {
        None
    };
    let l = match (mode, l_opt) {
        (Mode::Unsat, Some(l)) if l != 1 => {
            return Err(FsosError::InvalidArgument(format!(
                "UNSAT mode fixes L = 1, got {l}"
            )))
        }
        (Mode::Sat, Some(l)) if l != 0 => {
            return Err(FsosError::InvalidArgument(format!(
                "SAT mode fixes L = 0, got {l}"
            )))
        }
        (Mode::Unsat, _) => 1,
        (Mode::Sat, _) => 0,
        (_, Some(l)) => l,
        (Mode::Maxsat, None) => match &oracle {
            Some(b) => b.l_min as i64,
            None => {
                return Err(FsosError::InvalidArgument(format!(
                    "n = {} exceeds the oracle limit; supply L explicitly",
                    phi.n()
                )))
            }
        },
        (Mode::Minsat, None) => match &oracle {
            Some(b) => b.l_max as i64,
            None => {
                return Err(FsosError::InvalidArgument(format!(
                    "n = {} exceeds the oracle limit; supply L explicitly",
                    phi.n()
                )))
            }
        },
    };

    let mut target_range = None;
    if let Some(b) = &oracle {
        let (lo, hi) = (b.l_min as i64, b.l_max as i64);
        // the target's extremes and the assignment attaining the minimum
        let (tmin, tmax, witness, actual) = match mode {
            Mode::Maxsat | Mode::Unsat => (lo - l, hi - l, &b.witness_min, lo),
            Mode::Minsat => (l - hi, l - lo, &b.witness_max, hi),
            Mode::Sat => (-hi - l, -lo - l, &b.witness_max, hi),
        };
        if tmin < 0 {
            return Err(FsosError::BoundRefused {
                claimed: l,
                actual,
                witness: witness.clone(),
            });
        }
        target_range = Some((tmin, tmax));
    }

    let target = target_poly(phi, mode, l);
    let shift = default_shift();
    let f = target.add_constant(shift.clone());
    Ok(Objective {
        mode,
        l,
        target,
        shift,
        f,
        target_range,
        unverified: oracle.is_none(),
        max_width: phi.max_width(),
        m: phi.m(),
    })
}
