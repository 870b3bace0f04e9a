use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::norms::sobolev_norm;
use crate::scalar::Real;
use crate::spectral::{helmholtz, Field, GridSpec};

/// Exponents and coefficients of the system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeParams<T> {
    pub p: u32,
    pub q: u32,
    pub a: T,
    pub b: T,
}

impl<T: Real> PdeParams<T> {
    pub fn new(p: u32, q: u32, a: T, b: T) -> Result<Self> {
        let out = Self { p, q, a, b };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.q < 1 {
            return Err(invalid(format!(
                "exponents must be >= 1, got p = {}, q = {}",
                self.p, self.q
            )));
        }
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(invalid("coefficients a, b must be finite"));
        }
        Ok(())
    }

    /// `κ = max(p, q)`.
    pub fn kappa(&self) -> u32 {
        self.p.max(self.q)
    }

    /// Exponents and coefficients with the roles of the two components
    /// exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
            a: self.b,
            b: self.a,
        }
    }
}

/// A pair `(u, v)` on one grid, with its parameters and time stamp.
#[derive(Clone, Debug)]
pub struct FieldState<T: Real> {
    pub u: Field<T>,
    pub v: Field<T>,
    pub params: PdeParams<T>,
    pub time: T,
}

impl<T: Real> FieldState<T> {
    pub fn new(u: Field<T>, v: Field<T>, params: PdeParams<T>) -> Result<Self> {
        u.check_same_grid(&v)?;
        params.validate()?;
        Ok(Self {
            u,
            v,
            params,
            time: T::zero(),
        })
    }

    pub fn zeros(grid: &GridSpec<T>, params: PdeParams<T>) -> Result<Self> {
        Self::new(Field::zeros(grid), Field::zeros(grid), params)
    }

    /// Build the state from momenta by inverting the Helmholtz operator.
    pub fn from_momenta(m: &Field<T>, n: &Field<T>, params: PdeParams<T>) -> Result<Self> {
        use crate::spectral::helmholtz_inv;
        Self::new(helmholtz_inv(m), helmholtz_inv(n), params)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        self.u.grid()
    }

    pub fn m(&self) -> Field<T> {
        helmholtz(&self.u)
    }

    pub fn n(&self) -> Field<T> {
        helmholtz(&self.v)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// `‖u‖_{H^s} + ‖v‖_{H^s}`.
    pub fn pair_norm(&self, s: T) -> T {
        sobolev_norm(&self.u, s) + sobolev_norm(&self.v, s)
    }

    /// The same state with `u` and `v` exchanged (and the parameters with
    /// them).
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
            params: self.params.swapped(),
            time: self.time,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Momentum,
    #[default]
    Velocity,
}

/// Time-stepping policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams<T> {
    pub pde: PdeParams<T>,
    pub dt: T,
    pub cfl: T,
    pub t_final: T,
    pub dealias_degree: usize,
    pub monitor_every: usize,
    pub formulation: Formulation,
    /// Sobolev index of the norms written to the trace.
    pub norm_index: T,
    /// Sup-norm level above which a run is declared blown up.
    pub blowup_ceiling: T,
}

impl<T: Real> SolverParams<T> {
    /// Defaults: `dt = 1e-3`, `cfl = 0.5`, degree `κ + 1`, monitor every
    /// step, velocity form, trace norms in `H^3`.
    pub fn new(pde: PdeParams<T>, t_final: T) -> Self {
        Self {
            pde,
            dt: T::lit(1e-3),
            cfl: T::lit(0.5),
            t_final,
            dealias_degree: pde.kappa() as usize + 1,
            monitor_every: 1,
            formulation: Formulation::Velocity,
            norm_index: T::lit(3.0),
            blowup_ceiling: T::lit(1e8),
        }
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_monitor_every(mut self, every: usize) -> Self {
        self.monitor_every = every;
        self
    }

    pub fn with_formulation(mut self, f: Formulation) -> Self {
        self.formulation = f;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.pde.validate()?;
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(invalid(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_final > T::zero() && self.t_final.is_finite()) {
            return Err(invalid(format!(
                "t_final must be positive and finite, got {}",
                self.t_final
            )));
        }
        let need = self.pde.kappa() as usize + 1;
        if self.dealias_degree < need {
            return Err(invalid(format!(
                "dealias_degree must be at least max(p, q) + 1 = {need}, got {}",
                self.dealias_degree
            )));
        }
        if self.monitor_every == 0 {
            return Err(invalid("monitor_every must be at least 1"));
        }
        if !(self.blowup_ceiling > T::zero()) {
            return Err(invalid("blow-up ceiling must be positive"));
        }
        Ok(())
    }
}
