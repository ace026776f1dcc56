use super::{GExpr, Sign};
use crate::interval::Scalar;

fn is_one(e: &GExpr) -> bool {
    matches!(e, GExpr::Const(c) if c.rational().is_some_and(|q| q == num_rational::BigRational::from_integer(1.into())))
}

fn times(d: GExpr, rest: GExpr) -> GExpr {
    if is_one(&d) {
        rest
    } else {
        GExpr::Product(vec![d, rest])
    }
}

pub(super) fn deriv(e: &GExpr) -> GExpr {
    match e {
        GExpr::Const(_) => GExpr::Const(Scalar::int(0)),
        GExpr::Var => GExpr::Const(Scalar::int(1)),
        GExpr::Affine { sign, .. } => match sign {
            Sign::Plus => GExpr::Const(Scalar::int(1)),
            Sign::Minus => GExpr::Const(Scalar::int(-1)),
        },
        GExpr::Log(u) => GExpr::Quotient(Box::new(deriv(u)), u.clone()),
        GExpr::Exp(u) => times(deriv(u), e.clone()),
        GExpr::Pow(u, p) => {
            let lower = p.sub(&Scalar::int(1));
            let outer = (**u).clone().pow(lower).scale(p.clone());
            times(deriv(u), outer)
        }
        GExpr::Sum(cs) => GExpr::Sum(cs.iter().map(deriv).collect()),
        GExpr::Product(cs) => GExpr::Sum(
            (0..cs.len())
                .map(|i| {
                    let mut fs = cs.clone();
                    fs[i] = deriv(&cs[i]);
                    GExpr::Product(fs)
                })
                .collect(),
        ),
        GExpr::Quotient(n, d) => {
            let num = GExpr::Sum(vec![
                GExpr::Product(vec![deriv(n), (**d).clone()]),
                GExpr::Product(vec![(**n).clone(), deriv(d)]).scale(Scalar::int(-1)),
            ]);
            num.over(GExpr::Product(vec![(**d).clone(), (**d).clone()]))
        }
        GExpr::Scale(c, u) => deriv(u).scale(c.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_and_log() {
        let a = GExpr::affine(Scalar::int(3), Sign::Plus);
        assert_eq!(a.deriv(), GExpr::Const(Scalar::int(1)));
        let l = a.clone().log();
        assert_eq!(l.deriv(), GExpr::Const(Scalar::int(1)).over(a));
    }

    #[test]
    fn sum_is_linear() {
        let a = GExpr::affine(Scalar::int(3), Sign::Plus).log();
        let b = GExpr::affine(Scalar::int(5), Sign::Minus).log();
        let s = GExpr::Sum(vec![a.clone(), b.clone()]);
        assert_eq!(s.deriv(), GExpr::Sum(vec![a.deriv(), b.deriv()]));
    }
}
