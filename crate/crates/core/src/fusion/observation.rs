use std::sync::Arc;

use nalgebra::{SMatrix, SVector};

use crate::error::Result;
use crate::lie::{GroupElement, LieGroup, Square, Tangent};
use crate::linalg::{check_psd, symmetrize};

/// An observation of a state `g ∈ G₁` seen through the coordinates
/// `z = k̃(x, r)` of the measurement around `k(μ)`.
pub trait Observation<const N: usize, const M: usize> {
    type Measurement;

    /// Covariance `R` of the observation noise `r`.
    fn noise(&self) -> &SMatrix<f64, M, M>;

    /// `k̃(x, r)` for the state `μ exp(x)`.
    fn perturbed<G: LieGroup<N>>(
        &self,
        group: &G,
        mu: &GroupElement<N>,
        x: &Tangent<N>,
        r: &SVector<f64, M>,
    ) -> Result<SVector<f64, M>>;

    /// Coordinates of the actual measurement around `k(μ)`.
    fn innovation<G: LieGroup<N>>(
        &self,
        group: &G,
        mu: &GroupElement<N>,
        measurement: &Self::Measurement,
    ) -> Result<SVector<f64, M>>;
}

pub type VectorMap<const N: usize, const M: usize> = Arc<dyn Fn(&GroupElement<N>) -> SVector<f64, M> + Send + Sync>;
pub type GroupMap<const N: usize, const M: usize> = Arc<dyn Fn(&GroupElement<N>) -> GroupElement<M> + Send + Sync>;

/// `g_z = k(g) + r`, `r ~ N(0, R)`.
#[derive(Clone)]
pub struct EuclideanObservation<const N: usize, const M: usize> {
    k: VectorMap<N, M>,
    noise: SMatrix<f64, M, M>,
}

impl<const N: usize, const M: usize> EuclideanObservation<N, M> {
    pub fn new<F>(k: F, noise: SMatrix<f64, M, M>) -> Result<Self>
    where
        F: Fn(&GroupElement<N>) -> SVector<f64, M> + Send + Sync + 'static,
    {
        let noise = symmetrize(&noise);
        check_psd(&noise)?;
        Ok(Self { k: Arc::new(k), noise })
    }

    pub fn observe(&self, g: &GroupElement<N>) -> SVector<f64, M> {
        (self.k)(g)
    }
}

impl<const N: usize, const M: usize> Observation<N, M> for EuclideanObservation<N, M> {
    type Measurement = SVector<f64, M>;

    fn noise(&self) -> &SMatrix<f64, M, M> {
        &self.noise
    }

    fn perturbed<G: LieGroup<N>>(
        &self,
        group: &G,
        mu: &GroupElement<N>,
        x: &Tangent<N>,
        r: &SVector<f64, M>,
    ) -> Result<SVector<f64, M>> {
        Ok(self.observe(&(mu * &group.exp(x))) - self.observe(mu) + r)
    }

    fn innovation<G: LieGroup<N>>(
        &self,
        _group: &G,
        mu: &GroupElement<N>,
        measurement: &SVector<f64, M>,
    ) -> Result<SVector<f64, M>> {
        Ok(measurement - self.observe(mu))
    }
}

/// `g_z = k(g) exp(r)` on a target group `G₂`, `r ~ N(0, R)`.
#[derive(Clone)]
pub struct GroupObservation<G2, const N: usize, const M: usize> {
    target: G2,
    k: GroupMap<N, M>,
    noise: Square<M>,
}

impl<G2: LieGroup<M>, const N: usize, const M: usize> GroupObservation<G2, N, M> {
    pub fn new<F>(target: G2, k: F, noise: Square<M>) -> Result<Self>
    where
        F: Fn(&GroupElement<N>) -> GroupElement<M> + Send + Sync + 'static,
    {
        let noise = symmetrize(&noise);
        check_psd(&noise)?;
        Ok(Self {
            target,
            k: Arc::new(k),
            noise,
        })
    }

    pub fn observe(&self, g: &GroupElement<N>) -> GroupElement<M> {
        (self.k)(g)
    }
}

impl<G2: LieGroup<N>, const N: usize> GroupObservation<G2, N, N> {
    /// The state observed directly: `k(g) = g`.
    pub fn direct(group: G2, noise: Square<N>) -> Result<Self> {
        Self::new(group, |g| *g, noise)
    }
}

impl<G2: LieGroup<M>, const N: usize, const M: usize> Observation<N, M> for GroupObservation<G2, N, M> {
    type Measurement = GroupElement<M>;

    fn noise(&self) -> &Square<M> {
        &self.noise
    }

    fn perturbed<G: LieGroup<N>>(
        &self,
        group: &G,
        mu: &GroupElement<N>,
        x: &Tangent<N>,
        r: &Tangent<M>,
    ) -> Result<Tangent<M>> {
        let t = &self.target;
        let moved = self.observe(&(mu * &group.exp(x)));
        t.log(&(t.between(&self.observe(mu), &moved) * t.exp(r)))
    }

    fn innovation<G: LieGroup<N>>(
        &self,
        _group: &G,
        mu: &GroupElement<N>,
        measurement: &GroupElement<M>,
    ) -> Result<Tangent<M>> {
        let t = &self.target;
        t.log(&t.between(&self.observe(mu), measurement))
    }
}
