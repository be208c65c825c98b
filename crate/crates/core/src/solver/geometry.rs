//! The pieces of each method that the conjugate gradient loop needs.

use crate::cost::{CostModel, GradAction, HermAction};
use crate::embedded::{self, EigenPoint, EmbeddedTangent};
use crate::error::GeometryError;
use crate::kernel::{c, inner, qr_compact, CMat};
use crate::lowrank::HermLowRank;
use crate::quotient::{self, FactorPoint, MetricTag};

pub trait Geometry {
    type Point: Clone;
    type Vector: Clone;

    fn cost(&self) -> &dyn CostModel;

    fn value(&self, x: &Self::Point) -> f64;

    fn gradient(&self, x: &Self::Point) -> Result<Self::Vector, GeometryError>;

    fn inner(&self, x: &Self::Point, a: &Self::Vector, b: &Self::Vector) -> f64;

    /// `a u + b v`.
    fn lincomb(&self, a: f64, u: &Self::Vector, b: f64, v: &Self::Vector) -> Self::Vector;

    fn retract(
        &self,
        x: &Self::Point,
        v: &Self::Vector,
        t: f64,
    ) -> Result<Self::Point, GeometryError>;

    fn transport(
        &self,
        from: &Self::Point,
        to: &Self::Point,
        v: &Self::Vector,
    ) -> Result<Self::Vector, GeometryError>;

    fn initial_step(&self, x: &Self::Point, eta: &Self::Vector) -> f64;

    /// A factor `Y` with `Y Y* = X`.
    fn factor(&self, x: &Self::Point) -> CMat;
}

/// `‖P^t ∇f(X)‖_F` at `X = Y Y*`, the same number for every method.
pub fn tangent_gradnorm(cost: &dyn CostModel, y: &CMat) -> f64 {
    let (q, _) = qr_compact(y);
    let sq = GradAction::at(cost, &HermLowRank::gram_of(y)).apply(&q);
    let qsq = q.adjoint() * &sq;
    (2.0 * inner(&sq, &sq) - inner(&qsq, &qsq)).max(0.0).sqrt()
}

/// Plain CG on `F(Y) = f(Y Y*)` over `C^{n x p}`.
pub struct BurerMonteiro<'a> {
    pub cost: &'a dyn CostModel,
}

impl Geometry for BurerMonteiro<'_> {
    type Point = CMat;
    type Vector = CMat;

    fn cost(&self) -> &dyn CostModel {
        self.cost
    }

    fn value(&self, y: &CMat) -> f64 {
        self.cost.value(&HermLowRank::gram_of(y))
    }

    fn gradient(&self, y: &CMat) -> Result<CMat, GeometryError> {
        Ok(GradAction::at(self.cost, &HermLowRank::gram_of(y)).apply(y) * c(2.0, 0.0))
    }

    fn inner(&self, _: &CMat, a: &CMat, b: &CMat) -> f64 {
        inner(a, b)
    }

    fn lincomb(&self, a: f64, u: &CMat, b: f64, v: &CMat) -> CMat {
        u * c(a, 0.0) + v * c(b, 0.0)
    }

    fn retract(&self, y: &CMat, v: &CMat, t: f64) -> Result<CMat, GeometryError> {
        Ok(y + v * c(t, 0.0))
    }

    fn transport(&self, _: &CMat, _: &CMat, v: &CMat) -> Result<CMat, GeometryError> {
        Ok(v.clone())
    }

    fn initial_step(&self, y: &CMat, eta: &CMat) -> f64 {
        self.cost.quartic_step(y, eta)
    }

    fn factor(&self, y: &CMat) -> CMat {
        y.clone()
    }
}

/// The quotient with a flat retraction `Y + tA` and projection transport.
pub struct Quotient<'a> {
    pub cost: &'a dyn CostModel,
    pub tag: MetricTag,
}

impl Geometry for Quotient<'_> {
    type Point = FactorPoint;
    type Vector = CMat;

    fn cost(&self) -> &dyn CostModel {
        self.cost
    }

    fn value(&self, y: &FactorPoint) -> f64 {
        self.cost.value(&y.to_lowrank())
    }

    fn gradient(&self, y: &FactorPoint) -> Result<CMat, GeometryError> {
        Ok(quotient::gradient(y, self.tag, self.cost))
    }

    fn inner(&self, y: &FactorPoint, a: &CMat, b: &CMat) -> f64 {
        quotient::metric(y, self.tag, a, b)
    }

    fn lincomb(&self, a: f64, u: &CMat, b: f64, v: &CMat) -> CMat {
        u * c(a, 0.0) + v * c(b, 0.0)
    }

    fn retract(&self, y: &FactorPoint, v: &CMat, t: f64) -> Result<FactorPoint, GeometryError> {
        quotient::retract(y, v, t)
    }

    fn transport(
        &self,
        _: &FactorPoint,
        to: &FactorPoint,
        v: &CMat,
    ) -> Result<CMat, GeometryError> {
        quotient::transport(to, self.tag, v)
    }

    fn initial_step(&self, y: &FactorPoint, eta: &CMat) -> f64 {
        self.cost.quartic_step(y.y(), eta)
    }

    fn factor(&self, y: &FactorPoint) -> CMat {
        y.y().clone()
    }
}

/// The embedded manifold with eigen-based retraction and the simplified
/// two-block transport.
pub struct Embedded<'a> {
    pub cost: &'a dyn CostModel,
}

impl Geometry for Embedded<'_> {
    type Point = EigenPoint;
    type Vector = EmbeddedTangent;

    fn cost(&self) -> &dyn CostModel {
        self.cost
    }

    fn value(&self, x: &EigenPoint) -> f64 {
        self.cost.value(&x.to_lowrank())
    }

    fn gradient(&self, x: &EigenPoint) -> Result<EmbeddedTangent, GeometryError> {
        Ok(embedded::riemannian_grad(x, self.cost))
    }

    fn inner(&self, _: &EigenPoint, a: &EmbeddedTangent, b: &EmbeddedTangent) -> f64 {
        embedded::metric(a, b)
    }

    fn lincomb(&self, a: f64, u: &EmbeddedTangent, b: f64, v: &EmbeddedTangent) -> EmbeddedTangent {
        u.lincomb(a, b, v)
    }

    fn retract(
        &self,
        x: &EigenPoint,
        v: &EmbeddedTangent,
        t: f64,
    ) -> Result<EigenPoint, GeometryError> {
        embedded::retract(x, v, t)
    }

    fn transport(
        &self,
        from: &EigenPoint,
        to: &EigenPoint,
        v: &EmbeddedTangent,
    ) -> Result<EmbeddedTangent, GeometryError> {
        Ok(embedded::vector_transport(from, to, v))
    }

    fn initial_step(&self, x: &EigenPoint, eta: &EmbeddedTangent) -> f64 {
        embedded::initial_step(x, eta, self.cost)
    }

    fn factor(&self, x: &EigenPoint) -> CMat {
        x.factor()
    }
}

/// A point of the quotient carried together with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct PairedPoint {
    pub y: FactorPoint,
    pub x: EigenPoint,
}

impl PairedPoint {
    pub fn from_eigen(x: EigenPoint) -> Result<Self, GeometryError> {
        Ok(Self {
            y: FactorPoint::new(x.factor())?,
            x,
        })
    }
}

/// The quotient with metric g3 and the retraction and transport pulled
/// back from the embedded manifold through `L`.
pub struct QuotientG3Embedded<'a> {
    pub cost: &'a dyn CostModel,
}

impl Geometry for QuotientG3Embedded<'_> {
    type Point = PairedPoint;
    type Vector = CMat;

    fn cost(&self) -> &dyn CostModel {
        self.cost
    }

    fn value(&self, p: &PairedPoint) -> f64 {
        self.cost.value(&p.y.to_lowrank())
    }

    fn gradient(&self, p: &PairedPoint) -> Result<CMat, GeometryError> {
        Ok(quotient::gradient(&p.y, MetricTag::G3, self.cost))
    }

    fn inner(&self, p: &PairedPoint, a: &CMat, b: &CMat) -> f64 {
        quotient::metric(&p.y, MetricTag::G3, a, b)
    }

    fn lincomb(&self, a: f64, u: &CMat, b: f64, v: &CMat) -> CMat {
        u * c(a, 0.0) + v * c(b, 0.0)
    }

    fn retract(&self, p: &PairedPoint, v: &CMat, t: f64) -> Result<PairedPoint, GeometryError> {
        let z = quotient::lift(&p.y, &p.x, v);
        PairedPoint::from_eigen(embedded::retract(&p.x, &z, t)?)
    }

    fn transport(
        &self,
        from: &PairedPoint,
        to: &PairedPoint,
        v: &CMat,
    ) -> Result<CMat, GeometryError> {
        let z = quotient::lift(&from.y, &from.x, v);
        let moved = embedded::vector_transport(&from.x, &to.x, &z);
        Ok(quotient::unlift(&to.y, &to.x, &moved))
    }

    fn initial_step(&self, p: &PairedPoint, eta: &CMat) -> f64 {
        embedded::initial_step(&p.x, &quotient::lift(&p.y, &p.x, eta), self.cost)
    }

    fn factor(&self, p: &PairedPoint) -> CMat {
        p.y.y().clone()
    }
}
