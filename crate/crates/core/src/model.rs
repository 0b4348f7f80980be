//! Pointwise cell dynamics.
//!
//! Kernels are generic over [`CellModel`], so another explicit
//! finite-difference reaction term can be dropped in without touching the
//! stencil code. [`FitzHughNagumo`] is the shipped instance.

use crate::gene::Gene;
use crate::grid::Real;

/// Reaction terms and diffusion coefficients of a two-layer cell.
///
/// Implementations must be pure: identical inputs give bit-identical output.
pub trait CellModel<T: Real>: Send + Sync {
    fn reaction_u(&self, u: T, v: T) -> T;
    fn reaction_v(&self, u: T, v: T) -> T;
    fn diffusion_u(&self) -> T;
    fn diffusion_v(&self) -> T;
    fn time_step(&self) -> T;

    /// One explicit Euler step of a cell given the Laplacians of both layers:
    /// `u + dt*(f1(u,v) + Du*lap_u)`, `v + dt*(f2(u,v) + Dv*lap_v)`.
    #[inline(always)]
    fn cell_update(&self, u: T, v: T, lap_u: T, lap_v: T) -> (T, T) {
        let dt = self.time_step();
        let nu = u + dt * (self.reaction_u(u, v) + self.diffusion_u() * lap_u);
        let nv = v + dt * (self.reaction_v(u, v) + self.diffusion_v() * lap_v);
        (nu, nv)
    }
}

/// FitzHugh-Nagumo cell with its gene cast to the working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitzHughNagumo<T> {
    pub dt: T,
    pub a: T,
    pub b: T,
    pub eps: T,
    pub c: T,
    pub du: T,
    pub dv: T,
    three: T,
}

impl<T: Real> FitzHughNagumo<T> {
    pub fn new(gene: &Gene) -> Self {
        let [dt, a, b, eps, c, du, dv] = gene.to_vector().map(T::from_f64);
        Self {
            dt,
            a,
            b,
            eps,
            c,
            du,
            dv,
            three: T::from_f64(3.0),
        }
    }
}

impl<T: Real> CellModel<T> for FitzHughNagumo<T> {
    /// `c*u - u^3/3 - v`, evaluated as `u*(c - u*u/3) - v`.
    #[inline(always)]
    fn reaction_u(&self, u: T, v: T) -> T {
        u * (self.c - u * u / self.three) - v
    }

    /// `-eps*(u - b*v + a)`, evaluated as `(-eps)*((u - b*v) + a)`.
    #[inline(always)]
    fn reaction_v(&self, u: T, v: T) -> T {
        -self.eps * (u - self.b * v + self.a)
    }

    #[inline(always)]
    fn diffusion_u(&self) -> T {
        self.du
    }

    #[inline(always)]
    fn diffusion_v(&self) -> T {
        self.dv
    }

    #[inline(always)]
    fn time_step(&self) -> T {
        self.dt
    }
}

/// Activator reaction rate `f1` for `gene` at precision `T`.
pub fn reaction_u<T: Real>(u: T, v: T, gene: &Gene) -> T {
    FitzHughNagumo::<T>::new(gene).reaction_u(u, v)
}

/// Recovery reaction rate `f2` for `gene` at precision `T`.
pub fn reaction_v<T: Real>(u: T, v: T, gene: &Gene) -> T {
    FitzHughNagumo::<T>::new(gene).reaction_v(u, v)
}

/// One explicit Euler update of a single cell.
pub fn cell_update<T: Real>(u: T, v: T, lap_u: T, lap_v: T, gene: &Gene) -> (T, T) {
    FitzHughNagumo::<T>::new(gene).cell_update(u, v, lap_u, lap_v)
}
