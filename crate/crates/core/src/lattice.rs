//! Pointwise lattice operators and the two projections in the product space.
//!
//! `C1 = {(f, g) : f <= g}` is the order cone and `C2(α) = {(f, g) : |f - g| <= α}`
//! the band. Both projections are available twice: through the closed
//! forms [`project_order`]/[`project_band`], and through the planar geometry
//! in [`project_oracle`], which shares no code with them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Field;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BandParam(f64);

impl BandParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::BadAlpha(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BandParam {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<BandParam> for f64 {
    fn from(a: BandParam) -> f64 {
        a.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstraintSet {
    Order,
    Band(BandParam),
}

pub fn sup(f: &Field, g: &Field) -> Result<Field> {
    f.zip_with(g, f64::max)
}

pub fn inf(f: &Field, g: &Field) -> Result<Field> {
    f.zip_with(g, f64::min)
}

/// Scalar clamp of `f` into `[g - α, g + α]`, casewise on `f - g`.
#[inline]
pub fn h_alpha_scalar(f: f64, g: f64, alpha: f64) -> f64 {
    let d = f - g;
    if d < -alpha {
        g - alpha
    } else if d > alpha {
        g + alpha
    } else {
        f
    }
}

/// `H_α(f, g) = (g - α) ∨ f ∧ (g + α)`.
pub fn h_alpha(f: &Field, g: &Field, alpha: BandParam) -> Result<Field> {
    let a = alpha.get();
    f.zip_with(g, |x, y| h_alpha_scalar(x, y, a))
}

/// `((z + α) ∨ 0) + ((z - α) ∧ 0)`.
#[inline]
pub fn phi_alpha(z: f64, alpha: f64) -> f64 {
    (z + alpha).max(0.0) + (z - alpha).min(0.0)
}

/// Projection onto `{f <= g}`: `(f - ½(f-g)⁺, g + ½(f-g)⁺)`.
pub fn project_order(f: &Field, g: &Field) -> Result<(Field, Field)> {
    let excess = f.zip_with(g, |a, b| 0.5 * (a - b).max(0.0))?;
    Ok((f.sub(&excess)?, g.add(&excess)?))
}

/// Projection onto `{|f - g| <= α}`:
/// `(g + ½ φ_α(f - g), f - ½ φ_α(f - g))`.
pub fn project_band(f: &Field, g: &Field, alpha: BandParam) -> Result<(Field, Field)> {
    let a = alpha.get();
    let half = f.zip_with(g, |x, y| 0.5 * phi_alpha(x - y, a))?;
    Ok((g.add(&half)?, f.sub(&half)?))
}

/// Nearest point of the constraint set, computed pointwise in the plane.
pub fn project_oracle(set: ConstraintSet, f: &Field, g: &Field) -> Result<(Field, Field)> {
    f.check_same_space(g)?;
    let (mut p, mut q) = (Vec::with_capacity(f.len()), Vec::with_capacity(f.len()));
    for (&a, &b) in f.values().iter().zip(g.values()) {
        let (x, y) = match set {
            ConstraintSet::Order if a <= b => (a, b),
            // reflect onto the diagonal
            ConstraintSet::Order => {
                let m = 0.5 * (a + b);
                (m, m)
            }
            ConstraintSet::Band(alpha) => {
                let alpha = alpha.get();
                let d = a - b;
                if d.abs() <= alpha {
                    (a, b)
                } else {
                    // keep a + b, shrink the difference to ±α
                    let m = 0.5 * (a + b);
                    let h = 0.5 * alpha * d.signum();
                    (m + h, m - h)
                }
            }
        };
        p.push(x);
        q.push(y);
    }
    Ok((Field::new(f.space(), p)?, Field::new(f.space(), q)?))
}

/// Residuals of the twist relations for `h = H_α(·,·)`, `k = H_α` with swapped
/// arguments, along `u_t = (1-t)u + t h(u,v)` and `v_s = (1-s)v + s k(u,v)`:
/// returns `(‖h(u_t, v_s) - u_{1-s}‖_∞, ‖k(u_t, v_s) - v_{1-t}‖_∞)`.
///
/// The relations hold exactly whenever `t + s <= 1`. For `t + s > 1` a pair
/// separated by much more than `α` makes the interpolants cross and the
/// residuals are nonzero.
pub fn twist_check(
    u: &Field,
    v: &Field,
    alpha: BandParam,
    t: f64,
    s: f64,
) -> Result<(f64, f64)> {
    let h = h_alpha(u, v, alpha)?;
    let k = h_alpha(v, u, alpha)?;
    let u_at = |r: f64| u.lerp(&h, r);
    let v_at = |r: f64| v.lerp(&k, r);
    let (ut, vs) = (u_at(t)?, v_at(s)?);
    let res_h = h_alpha(&ut, &vs, alpha)?.linf_distance(&u_at(1.0 - s)?)?;
    let res_k = h_alpha(&vs, &ut, alpha)?.linf_distance(&v_at(1.0 - t)?)?;
    Ok((res_h, res_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpace;
    use proptest::prelude::*;

    fn pair(a: &[f64], b: &[f64]) -> (Field, Field) {
        let s = MeasureSpace::uniform(a.len()).unwrap();
        (
            Field::new(&s, a.to_vec()).unwrap(),
            Field::new(&s, b.to_vec()).unwrap(),
        )
    }

    fn alpha(a: f64) -> BandParam {
        BandParam::new(a).unwrap()
    }

    #[test]
    fn band_param_guards() {
        assert!(BandParam::new(0.0).is_ok());
        assert_eq!(BandParam::new(-1.0), Err(Error::BadAlpha(-1.0)));
        assert!(BandParam::new(f64::INFINITY).is_err());
        assert!(serde_json::from_str::<BandParam>("-0.5").is_err());
    }

    #[test]
    fn sup_inf_examples() {
        let (f, g) = pair(&[1.0, -1.0], &[0.0, 0.0]);
        assert_eq!(sup(&f, &f).unwrap(), f);
        assert_eq!(sup(&f, &g).unwrap().values(), &[1.0, 0.0]);
        assert_eq!(inf(&f, &g).unwrap().values(), &[0.0, -1.0]);
    }

    #[test]
    fn h_alpha_examples() {
        let (f, g) = pair(&[5.0, 0.3, -4.0], &[1.0, 0.0, 0.0]);
        assert_eq!(h_alpha(&f, &g, alpha(2.0)).unwrap().values(), &[3.0, 0.3, -2.0]);
        assert_eq!(h_alpha(&f, &f, alpha(0.7)).unwrap(), f);
        assert_eq!(h_alpha(&f, &g, alpha(0.0)).unwrap(), g);
    }

    #[test]
    fn phi_alpha_examples() {
        for a in [0.0, 0.5, 3.0] {
            assert_eq!(phi_alpha(0.0, a), 0.0);
        }
        assert_eq!(phi_alpha(1.0, 2.0), 2.0);
        assert_eq!(phi_alpha(3.0, 1.0), 4.0);
        assert_eq!(phi_alpha(-3.0, 1.0), -4.0);
    }

    #[test]
    fn project_order_examples() {
        let (f, g) = pair(&[0.0, -1.0], &[1.0, -1.0]);
        assert_eq!(project_order(&f, &g).unwrap(), (f.clone(), g.clone()));
        let (f, g) = pair(&[2.0], &[0.0]);
        let (p, q) = project_order(&f, &g).unwrap();
        assert_eq!((p.values(), q.values()), (&[1.0][..], &[1.0][..]));
    }

    #[test]
    fn project_band_examples() {
        let (f, g) = pair(&[0.5, -0.2], &[0.0, 0.1]);
        let (p, q) = project_band(&f, &g, alpha(1.0)).unwrap();
        assert!(p.linf_distance(&f).unwrap() <= 1e-15);
        assert!(q.linf_distance(&g).unwrap() <= 1e-15);
        let (f, g) = pair(&[3.0], &[0.0]);
        let (p, q) = project_band(&f, &g, alpha(1.0)).unwrap();
        assert_eq!((p.values(), q.values()), (&[2.0][..], &[1.0][..]));
        let (f, g) = pair(&[3.0, -7.5], &[0.0, 2.0]);
        let big = alpha(f.linf_distance(&g).unwrap());
        let (p, q) = project_band(&f, &g, big).unwrap();
        assert!(p.linf_distance(&f).unwrap() <= 1e-14);
        assert!(q.linf_distance(&g).unwrap() <= 1e-14);
    }

    #[test]
    fn oracle_examples() {
        let (f, g) = pair(&[2.0], &[0.0]);
        let (p, q) = project_oracle(ConstraintSet::Order, &f, &g).unwrap();
        assert_eq!((p.values(), q.values()), (&[1.0][..], &[1.0][..]));
        let (f, g) = pair(&[3.0], &[0.0]);
        let (p, q) = project_oracle(ConstraintSet::Band(alpha(1.0)), &f, &g).unwrap();
        assert_eq!((p.values(), q.values()), (&[2.0][..], &[1.0][..]));
        let (f, g) = pair(&[0.0, -0.1], &[0.5, 0.0]);
        for set in [ConstraintSet::Order, ConstraintSet::Band(alpha(0.5))] {
            assert_eq!(project_oracle(set, &f, &g).unwrap(), (f.clone(), g.clone()));
        }
    }

    #[test]
    fn twist_examples() {
        let (u, v) = pair(&[0.0, 0.5], &[0.3, 0.1]);
        assert_eq!(twist_check(&u, &v, alpha(1.0), 0.4, 0.9).unwrap(), (0.0, 0.0));
        let (u, v) = pair(&[0.0, 4.0, -3.0], &[10.0, 0.0, 1.0]);
        assert_eq!(twist_check(&u, &v, alpha(1.0), 0.0, 0.0).unwrap(), (0.0, 0.0));
        let (r_h, r_k) = twist_check(&u, &v, alpha(1.0), 0.3, 0.6).unwrap();
        assert!(r_h <= 1e-12 && r_k <= 1e-12);
    }

    #[test]
    fn twist_fails_when_interpolants_cross() {
        // u - v = -10 < -α; at t = s = 1 the interpolants have swapped sides
        let (u, v) = pair(&[0.0], &[10.0]);
        let (r_h, r_k) = twist_check(&u, &v, alpha(1.0), 1.0, 1.0).unwrap();
        assert_eq!((r_h, r_k), (2.0, 2.0));
    }

    #[test]
    fn clamp_is_reflection_of_band_projection() {
        let (f, g) = pair(&[5.0, 0.5, -3.0], &[1.0, 0.0, 0.0]);
        let a = alpha(2.0);
        let h = h_alpha(&f, &g, a).unwrap();
        let (p1, _) = project_band(&f, &g, a).unwrap();
        assert_eq!(p1.scale(2.0).sub(&f).unwrap(), h);
        // the half-sum of the two band projections does not reproduce the clamp
        let (_, q2) = project_band(&g, &f, a).unwrap();
        let half_sum = p1.scale(0.5).add(&q2.scale(0.5)).unwrap();
        assert_eq!(half_sum.values()[0], 4.0);
        assert_eq!(h.values()[0], 3.0);
    }

    fn weighted_pairs() -> impl Strategy<Value = (Vec<f64>, [Vec<f64>; 4], f64)> {
        (1usize..6).prop_flat_map(|n| {
            let v = || prop::collection::vec(-5.0f64..5.0, n);
            (
                prop::collection::vec(0.1f64..3.0, n),
                [v(), v(), v(), v()],
                prop_oneof![Just(0.0), 0.001f64..10.0],
            )
        })
    }

    fn product_dist(a: &(Field, Field), b: &(Field, Field)) -> f64 {
        (a.0.sub(&b.0).unwrap().l2_norm_squared() + a.1.sub(&b.1).unwrap().l2_norm_squared()).sqrt()
    }

    proptest! {
        #[test]
        fn projections_match_oracle((w, [a, b, _, _], al) in weighted_pairs()) {
            let s = MeasureSpace::new(w).unwrap();
            let f = Field::new(&s, a).unwrap();
            let g = Field::new(&s, b).unwrap();
            let set = ConstraintSet::Band(alpha(al));
            let (p, q) = project_band(&f, &g, alpha(al)).unwrap();
            let (po, qo) = project_oracle(set, &f, &g).unwrap();
            prop_assert!(p.linf_distance(&po).unwrap() <= 1e-12);
            prop_assert!(q.linf_distance(&qo).unwrap() <= 1e-12);
            let (p, q) = project_order(&f, &g).unwrap();
            let (po, qo) = project_oracle(ConstraintSet::Order, &f, &g).unwrap();
            prop_assert!(p.linf_distance(&po).unwrap() <= 1e-12);
            prop_assert!(q.linf_distance(&qo).unwrap() <= 1e-12);
            prop_assert!(p.order_violation(&q).unwrap() <= 1e-12);
            let (p, q) = project_band(&f, &g, alpha(al)).unwrap();
            prop_assert!(p.linf_distance(&q).unwrap() <= al + 1e-12);
        }

        #[test]
        fn projections_are_idempotent_and_nonexpansive((w, [a, b, c, d], al) in weighted_pairs()) {
            let s = MeasureSpace::new(w).unwrap();
            let x = (Field::new(&s, a).unwrap(), Field::new(&s, b).unwrap());
            let y = (Field::new(&s, c).unwrap(), Field::new(&s, d).unwrap());
            let ops: [&dyn Fn(&Field, &Field) -> (Field, Field); 2] = [
                &|f, g| project_order(f, g).unwrap(),
                &|f, g| project_band(f, g, alpha(al)).unwrap(),
            ];
            for op in ops {
                let px = op(&x.0, &x.1);
                let py = op(&y.0, &y.1);
                let ppx = op(&px.0, &px.1);
                prop_assert!(product_dist(&px, &ppx) <= 1e-12);
                let before = product_dist(&x, &y);
                prop_assert!(product_dist(&px, &py) <= before * (1.0 + 1e-10) + 1e-14);
            }
        }

        #[test]
        fn midpoint_law_and_clamp_bounds((w, [a, b, _, _], al) in weighted_pairs()) {
            let s = MeasureSpace::new(w).unwrap();
            let u = Field::new(&s, a).unwrap();
            let v = Field::new(&s, b).unwrap();
            let al = alpha(al);
            let h = h_alpha(&u, &v, al).unwrap();
            let k = h_alpha(&v, &u, al).unwrap();
            let (p, q) = project_band(&u, &v, al).unwrap();
            prop_assert!(u.lerp(&h, 0.5).unwrap().linf_distance(&p).unwrap() <= 1e-12);
            prop_assert!(v.lerp(&k, 0.5).unwrap().linf_distance(&q).unwrap() <= 1e-12);
            for i in 0..u.len() {
                let (f, g, hv) = (u.values()[i], v.values()[i], h.values()[i]);
                prop_assert!(g - al.get() <= hv && hv <= g + al.get());
                if (f - g).abs() <= al.get() {
                    prop_assert_eq!(hv, f);
                }
            }
        }

        #[test]
        fn twist_holds_below_the_anti_diagonal((w, [a, b, _, _], al) in weighted_pairs(), t in 0.0f64..=1.0, s in 0.0f64..=1.0) {
            let sp = MeasureSpace::new(w).unwrap();
            let u = Field::new(&sp, a).unwrap();
            let v = Field::new(&sp, b).unwrap();
            let (t, s) = if t + s > 1.0 { (1.0 - t, 1.0 - s) } else { (t, s) };
            let (rh, rk) = twist_check(&u, &v, alpha(al), t, s).unwrap();
            prop_assert!(rh <= 1e-12 && rk <= 1e-12, "{} {}", rh, rk);
        }
    }
}
