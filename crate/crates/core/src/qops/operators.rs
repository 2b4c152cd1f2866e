//! Pointwise actions of `x`, `p`, `p_q` and `x_q` on jets, Hermiticity of
//! `p_q`, and the commutator identities.

use num_complex::Complex64;

use super::jet::Jet;
use super::testfn::AnalyticTestFunction;
use crate::error::{Error, Result};
use crate::oracle::quadrature::{integrate, QuadratureSpec};
use crate::qcalc::DeformationParam;
use crate::well::ln1p_ratio;

/// Deformation plus `hbar`; everything an operator action needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorContext {
    dp: DeformationParam,
    hbar: f64,
}

impl OperatorContext {
    pub fn new(dp: DeformationParam, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::invalid(format!("hbar must be finite and > 0, got {hbar}")));
        }
        Ok(Self { dp, hbar })
    }

    /// `hbar = 1`.
    pub fn dimensionless(dp: DeformationParam) -> Self {
        Self { dp, hbar: 1.0 }
    }

    pub fn deformation(&self) -> DeformationParam {
        self.dp
    }

    pub fn gamma(&self) -> f64 {
        self.dp.gamma()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Operators acting on jets taken at `x`. Fails on or beyond the
    /// singularity `x = -1/gamma`.
    pub fn at(&self, x: f64) -> Result<PointOps> {
        let g = self.gamma();
        if !(1.0 + g * x > 0.0) {
            return Err(Error::Singularity { at: -1.0 / g });
        }
        Ok(PointOps {
            x,
            gamma: g,
            hbar: self.hbar,
        })
    }
}

/// Operator algebra at a single point.
#[derive(Debug, Clone, Copy)]
pub struct PointOps {
    x: f64,
    gamma: f64,
    hbar: f64,
}

impl PointOps {
    fn minus_i_hbar(&self) -> Complex64 {
        Complex64::new(0.0, -self.hbar)
    }

    /// Jet of `1 + gamma x`.
    pub fn u(&self) -> Jet {
        Jet::real([1.0 + self.gamma * self.x, self.gamma, 0.0, 0.0])
    }

    /// Jet of `x_q(x) = ln(1 + gamma x)/gamma`.
    pub fn xq(&self) -> Jet {
        let g = self.gamma;
        let u = 1.0 + g * self.x;
        let y = self.x * ln1p_ratio(g * self.x);
        Jet::real([y, 1.0 / u, -g / (u * u), 2.0 * g * g / (u * u * u)])
    }

    pub fn mul_x(&self, f: Jet) -> Jet {
        Jet::position(self.x) * f
    }

    pub fn mul_xq(&self, f: Jet) -> Jet {
        self.xq() * f
    }

    /// `-i hbar f'`.
    pub fn p(&self, f: Jet) -> Jet {
        f.derivative().scale(self.minus_i_hbar())
    }

    /// `-i hbar [(1 + gamma x) f]' + i hbar A f`.
    pub fn p_q_with(&self, f: Jet, a: f64) -> Jet {
        self.p(self.u() * f) + f.scale(Complex64::new(0.0, self.hbar * a))
    }

    /// Hermitian deformed momentum, `A = gamma/2`.
    pub fn p_q(&self, f: Jet) -> Jet {
        self.p_q_with(f, 0.5 * self.gamma)
    }

    /// `[(1 + gamma x) p + p (1 + gamma x)]/2`.
    pub fn p_q_symmetric(&self, f: Jet) -> Jet {
        let u = self.u();
        (u * self.p(f) + self.p(u * f)) * 0.5
    }

    pub fn p_q2(&self, f: Jet) -> Jet {
        self.p_q(self.p_q(f))
    }
}

fn value_of(j: Jet) -> Result<Complex64> {
    j.value()
        .ok_or_else(|| Error::invalid("operator chain needs more derivatives than the jet carries"))
}

/// `p_q f` at `x`, via the `A = gamma/2` form.
pub fn apply_p_q(f: &dyn AnalyticTestFunction, x: f64, ctx: &OperatorContext) -> Result<Complex64> {
    let ops = ctx.at(x)?;
    value_of(ops.p_q(f.jet(x)?))
}

/// `p_q f` at `x`, via the symmetrized form.
pub fn apply_p_q_symmetric(
    f: &dyn AnalyticTestFunction,
    x: f64,
    ctx: &OperatorContext,
) -> Result<Complex64> {
    let ops = ctx.at(x)?;
    value_of(ops.p_q_symmetric(f.jet(x)?))
}

/// `ln(1 + gamma x)/gamma`, which is `x` at `gamma = 0`.
pub fn x_q_of_x(x: f64, dp: &DeformationParam) -> Result<f64> {
    let g = dp.gamma();
    if !(1.0 + g * x > 0.0) {
        return Err(Error::domain(format!(
            "x_q needs 1 + gamma x > 0 (gamma = {g}, x = {x})"
        )));
    }
    Ok(x * ln1p_ratio(g * x))
}

/// Inverse of [`x_q_of_x`]: `(e^{gamma x_q} - 1)/gamma`.
pub fn x_of_x_q(x_q: f64, dp: &DeformationParam) -> f64 {
    let g = dp.gamma();
    if g == 0.0 {
        x_q
    } else {
        (g * x_q).exp_m1() / g
    }
}

fn quadrature() -> QuadratureSpec {
    QuadratureSpec::default()
        .with_panels(32)
        .with_tolerance(1e-14, 1e-16)
}

fn inner_product(
    h: &dyn AnalyticTestFunction,
    f: &dyn AnalyticTestFunction,
    domain: (f64, f64),
    op_h: &dyn Fn(f64, Jet) -> Result<Jet>,
    op_f: &dyn Fn(f64, Jet) -> Result<Jet>,
) -> Result<Complex64> {
    // errors inside the integrand are recorded and surfaced afterwards
    let failure = std::cell::RefCell::new(None);
    let integrand = |x: f64| {
        let r = (|| -> Result<Complex64> {
            let hv = value_of(op_h(x, h.jet(x)?)?)?;
            let fv = value_of(op_f(x, f.jet(x)?)?)?;
            Ok(hv.conj() * fv)
        })();
        r.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        })
    };
    let r = integrate(integrand, domain.0, domain.1, &quadrature())?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r.value)
}

fn check_vanishing(fns: [&dyn AnalyticTestFunction; 2], domain: (f64, f64)) -> Result<()> {
    for f in fns {
        for x in [domain.0, domain.1] {
            let v = f.value(x)?.norm();
            if v > 1e-12 {
                return Err(Error::domain(format!(
                    "{} does not vanish at the domain endpoint {x} (|f| = {v:e})",
                    f.name()
                )));
            }
        }
    }
    Ok(())
}

/// `|<h|p f> - <p h|f>|` with `p = -i hbar d/dx (1 + gamma x) + i hbar A`.
pub fn hermiticity_residual_with(
    f: &dyn AnalyticTestFunction,
    h: &dyn AnalyticTestFunction,
    ctx: &OperatorContext,
    domain: (f64, f64),
    a: f64,
) -> Result<f64> {
    if !(domain.0 < domain.1) {
        return Err(Error::invalid("domain must be a non-empty interval"));
    }
    ctx.at(domain.0)?;
    ctx.at(domain.1)?;
    check_vanishing([f, h], domain)?;
    let ident = |_: f64, j: Jet| Ok(j);
    let op = |x: f64, j: Jet| Ok(ctx.at(x)?.p_q_with(j, a));
    let lhs = inner_product(h, f, domain, &ident, &op)?;
    let rhs = inner_product(h, f, domain, &op, &ident)?;
    Ok((lhs - rhs).norm())
}

/// [`hermiticity_residual_with`] for the Hermitian choice `A = gamma/2`.
pub fn hermiticity_residual(
    f: &dyn AnalyticTestFunction,
    h: &dyn AnalyticTestFunction,
    ctx: &OperatorContext,
    domain: (f64, f64),
) -> Result<f64> {
    hermiticity_residual_with(f, h, ctx, domain, 0.5 * ctx.gamma())
}

/// `<h|f>` by quadrature.
pub fn overlap(
    f: &dyn AnalyticTestFunction,
    h: &dyn AnalyticTestFunction,
    domain: (f64, f64),
) -> Result<Complex64> {
    let ident = |_: f64, j: Jet| Ok(j);
    inner_product(h, f, domain, &ident, &ident)
}

/// One of the commutation relations of the deformed algebra, checked
/// pointwise on a jet.
pub trait CommutatorIdentity: Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    /// `[L, R] f`.
    fn commutator(&self, ops: &PointOps, f: Jet) -> Jet;

    /// What the identity says `[L, R] f` equals.
    fn expected(&self, ops: &PointOps, f: Jet) -> Jet;
}

struct XP;
struct XqPq;
struct XPq2;
struct PPq2;

impl CommutatorIdentity for XP {
    fn name(&self) -> &'static str {
        "xp"
    }
    fn describe(&self) -> &'static str {
        "[x, p] = i hbar"
    }
    fn commutator(&self, o: &PointOps, f: Jet) -> Jet {
        o.mul_x(o.p(f)) - o.p(o.mul_x(f))
    }
    fn expected(&self, o: &PointOps, f: Jet) -> Jet {
        f.scale(Complex64::new(0.0, o.hbar))
    }
}

impl CommutatorIdentity for XqPq {
    fn name(&self) -> &'static str {
        "xqpq"
    }
    fn describe(&self) -> &'static str {
        "[x_q, p_q] = i hbar"
    }
    fn commutator(&self, o: &PointOps, f: Jet) -> Jet {
        o.mul_xq(o.p_q(f)) - o.p_q(o.mul_xq(f))
    }
    fn expected(&self, o: &PointOps, f: Jet) -> Jet {
        f.scale(Complex64::new(0.0, o.hbar))
    }
}

impl CommutatorIdentity for XPq2 {
    fn name(&self) -> &'static str {
        "x_pq2"
    }
    fn describe(&self) -> &'static str {
        "[x, p_q^2] = i hbar [(1 + gamma x)^2 p + p (1 + gamma x)^2]"
    }
    fn commutator(&self, o: &PointOps, f: Jet) -> Jet {
        o.mul_x(o.p_q2(f)) - o.p_q2(o.mul_x(f))
    }
    fn expected(&self, o: &PointOps, f: Jet) -> Jet {
        let u2 = o.u() * o.u();
        (u2 * o.p(f) + o.p(u2 * f)).scale(Complex64::new(0.0, o.hbar))
    }
}

impl CommutatorIdentity for PPq2 {
    fn name(&self) -> &'static str {
        "p_pq2"
    }
    fn describe(&self) -> &'static str {
        "[p, p_q^2] = -i hbar gamma [(1 + gamma x) p^2 + p^2 (1 + gamma x)]"
    }
    fn commutator(&self, o: &PointOps, f: Jet) -> Jet {
        o.p(o.p_q2(f)) - o.p_q2(o.p(f))
    }
    fn expected(&self, o: &PointOps, f: Jet) -> Jet {
        let u = o.u();
        let p2 = |j: Jet| o.p(o.p(j));
        (u * p2(f) + p2(u * f)).scale(Complex64::new(0.0, -o.hbar * o.gamma))
    }
}

/// All commutator identities, in a fixed order.
pub fn commutator_registry() -> Vec<Box<dyn CommutatorIdentity>> {
    vec![Box::new(XP), Box::new(XqPq), Box::new(XPq2), Box::new(PPq2)]
}

pub fn commutator_by_name(name: &str) -> Result<Box<dyn CommutatorIdentity>> {
    commutator_registry()
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| {
            let known: Vec<_> = commutator_registry().iter().map(|c| c.name()).collect();
            Error::invalid(format!(
                "unknown commutator '{name}' (known: {})",
                known.join(", ")
            ))
        })
}

/// `|[L, R] f(x) - RHS f(x)|`.
pub fn commutator_check(
    kind: &dyn CommutatorIdentity,
    f: &dyn AnalyticTestFunction,
    x: f64,
    ctx: &OperatorContext,
) -> Result<f64> {
    let ops = ctx.at(x)?;
    let j = f.jet(x)?;
    let lhs = value_of(kind.commutator(&ops, j))?;
    let rhs = value_of(kind.expected(&ops, j))?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::testfn::{FreeWave, GaussianBump};
    use crate::well::Sign;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn ctx(g: f64) -> OperatorContext {
        OperatorContext::dimensionless(DeformationParam::from_gamma(g).unwrap())
    }

    #[test]
    fn p_q_of_constant() {
        struct One;
        impl AnalyticTestFunction for One {
            fn name(&self) -> String {
                "1".into()
            }
            fn jet(&self, _: f64) -> Result<Jet> {
                Ok(Jet::real([1.0, 0.0, 0.0, 0.0]))
            }
        }
        let c = ctx(2.0);
        let v = apply_p_q(&One, 0.3, &c).unwrap();
        assert_relative_eq!(v.im, -1.0, max_relative = 1e-15);
        assert_eq!(v.re, 0.0);
    }

    #[test]
    fn undeformed_p_q_is_ordinary_momentum() {
        let b = GaussianBump::new(0.2, 0.3, 1).unwrap();
        let c = ctx(0.0);
        for &x in &[-0.3, 0.0, 0.4] {
            let v = apply_p_q(&b, x, &c).unwrap();
            let d = b.jet(x).unwrap().raw()[1];
            assert!((v - Complex64::new(0.0, -1.0) * d).norm() < 1e-15);
        }
    }

    #[test]
    fn two_forms_of_p_q_agree() {
        let c = ctx(2.0);
        for m in 0..3 {
            let b = GaussianBump::new(0.5, 0.2, m).unwrap().with_momentum(4.0);
            for i in 0..20 {
                let x = -0.2 + 0.07 * i as f64;
                let a = apply_p_q(&b, x, &c).unwrap();
                let s = apply_p_q_symmetric(&b, x, &c).unwrap();
                assert!((a - s).norm() <= 1e-12 * a.norm().max(1e-300) + 1e-300);
            }
        }
    }

    #[test]
    fn free_wave_is_p_q_eigenfunction() {
        let dp = DeformationParam::from_gamma(2.0).unwrap();
        let c = OperatorContext::dimensionless(dp);
        let k = 3.5;
        let w = FreeWave { dp, k, sign: Sign::Plus };
        for &x in &[0.1, 0.5, 0.9] {
            let f = w.jet(x).unwrap();
            let ops = c.at(x).unwrap();
            let pf = ops.p_q(f).value().unwrap();
            assert!((pf - f.raw()[0] * k).norm() < 1e-12);
            let p2f = ops.p_q2(f).value().unwrap() * 0.5;
            assert!((p2f - f.raw()[0] * (k * k / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn x_q_examples() {
        let dp = DeformationParam::from_gamma(1.0).unwrap();
        assert_eq!(x_q_of_x(0.0, &dp).unwrap(), 0.0);
        assert_relative_eq!(x_q_of_x(E - 1.0, &dp).unwrap(), 1.0, max_relative = 1e-15);
        let small = DeformationParam::from_gamma(1e-9).unwrap();
        assert!((x_q_of_x(0.7, &small).unwrap() - 0.7).abs() < 1e-9);
        assert!(x_q_of_x(-1.0, &dp).is_err());
        // xi ln exp_q(x/xi)
        let dp = DeformationParam::new(0.6, 0.5).unwrap();
        let x = 0.8;
        let via_exp = dp.xi() * crate::qcalc::q_exp(x / dp.xi(), dp.q()).unwrap().ln();
        assert_relative_eq!(x_q_of_x(x, &dp).unwrap(), via_exp, max_relative = 1e-14);
    }

    #[test]
    fn x_q_round_trip() {
        for &g in &[-0.5, 0.0, 0.3, 2.0, 10.0] {
            let dp = DeformationParam::from_gamma(g).unwrap();
            let mut last = f64::NEG_INFINITY;
            for i in 0..50 {
                let x = -0.9 + 0.04 * i as f64;
                if 1.0 + g * x <= 0.0 {
                    continue;
                }
                let y = x_q_of_x(x, &dp).unwrap();
                assert!(y > last);
                last = y;
                assert!((x_of_x_q(y, &dp) - x).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hermiticity() {
        let f = GaussianBump::new(0.5, 0.1, 1).unwrap().with_momentum(2.0);
        let h = GaussianBump::new(0.55, 0.12, 0).unwrap();
        let dom = (-0.45, 1.5);
        for &g in &[0.0, 2.0] {
            let c = ctx(g);
            assert!(hermiticity_residual(&f, &h, &c, dom).unwrap() < 1e-10);
        }
        let c = ctx(2.0);
        let bad = hermiticity_residual_with(&f, &h, &c, dom, 0.0).unwrap();
        let expected = 2.0 * overlap(&f, &h, dom).unwrap().norm();
        assert!(expected > 1e-3);
        assert_relative_eq!(bad, expected, max_relative = 1e-9);
    }

    #[test]
    fn hermiticity_needs_vanishing_ends() {
        let f = GaussianBump::new(0.5, 0.3, 0).unwrap();
        let c = ctx(1.0);
        assert!(hermiticity_residual(&f, &f, &c, (0.0, 1.0)).is_err());
    }

    #[test]
    fn commutators_on_the_test_family() {
        for &g in &[0.0, 0.7, 2.0] {
            let c = ctx(g);
            for b in GaussianBump::family(0.4, 0.25).unwrap() {
                let b = b.with_momentum(1.5);
                for kind in commutator_registry() {
                    for i in 0..15 {
                        let x = -0.3 + 0.1 * i as f64;
                        let r = commutator_check(kind.as_ref(), &b, x, &c).unwrap();
                        assert!(r < 1e-9, "{} g={g} x={x}: {r}", kind.name());
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_lookup_and_singularity() {
        assert!(commutator_by_name("nope").is_err());
        let k = commutator_by_name("xqpq").unwrap();
        let b = GaussianBump::new(0.0, 1.0, 0).unwrap();
        let c = ctx(2.0);
        assert!(matches!(
            commutator_check(k.as_ref(), &b, -0.5, &c),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn wrong_identity_is_detected() {
        // [p, p_q^2] is nonzero when gamma != 0; comparing it with zero fails
        let c = ctx(2.0);
        let b = GaussianBump::new(0.4, 0.25, 1).unwrap();
        let ops = c.at(0.45).unwrap();
        let j = b.jet(0.45).unwrap();
        let comm = PPq2.commutator(&ops, j).value().unwrap();
        assert!(comm.norm() > 1e-2);
    }
}
