use super::graph::FeynmanGraph;
use super::symanzik::{Symanzik, SymanzikWorkspace};
use crate::error::{Error, Result};
use crate::permutahedron::SubsetTable;
use crate::sample::{Integrand, TropicalSample};

/// The residual `R = (Psi^tr/Psi)^{D/2} (Psi Phi^tr / (Psi^tr Phi))^omega` of
/// the parametric Feynman integrand, optionally with the coefficients of its
/// expansion in `D -> D - 2 eps`:
/// `R (log Psi + loops * log(Psi/Phi))^k / k!` for `k = 0..=order`.
///
/// Tropical values come from the facet functions stored in the table
/// (`z_Psi = loops`, `z_Phi = loops + mm flag`), so the integrand works with
/// samples from any sampler.
pub struct FeynmanIntegrand<'a> {
    table: &'a SubsetTable,
    symanzik: Symanzik,
    half_d: f64,
    omega: f64,
    loops: f64,
    order: usize,
}

impl<'a> FeynmanIntegrand<'a> {
    pub fn new(graph: &FeynmanGraph, table: &'a SubsetTable, order: usize) -> Result<Self> {
        if table.n() != graph.num_edges() {
            return Err(Error::InvalidInput(format!(
                "table has {} elements but the graph has {} edges",
                table.n(),
                graph.num_edges()
            )));
        }
        let omega = graph.omega();
        if graph.phi_vanishes() && (omega != 0.0 || order > 0) {
            return Err(Error::ExceptionalKinematics { omega });
        }
        Ok(Self {
            table,
            symanzik: Symanzik::new(graph),
            half_d: graph.dim() / 2.0,
            omega,
            loops: f64::from(graph.loops()),
            order,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl Integrand for FeynmanIntegrand<'_> {
    type Workspace = SymanzikWorkspace;

    fn workspace(&self) -> SymanzikWorkspace {
        self.symanzik.workspace()
    }

    fn components(&self) -> usize {
        self.order + 1
    }

    #[inline]
    fn eval(&self, ws: &mut SymanzikWorkspace, s: &TropicalSample, out: &mut [f64]) -> bool {
        let Some(v) = self.symanzik.eval(ws, &s.log_x) else {
            return false;
        };
        let (t_psi, t_phi) = self.table.trop_psi_phi(s);
        let mut log_r = self.half_d * (t_psi - v.log_psi);
        if self.omega != 0.0 {
            log_r += self.omega * (v.log_psi + t_phi - t_psi - v.log_phi);
        }
        let r = log_r.exp();
        if !r.is_finite() {
            return false;
        }
        out[0] = r;
        if self.order > 0 {
            let l = v.log_psi + self.loops * (v.log_psi - v.log_phi);
            if !l.is_finite() {
                return false;
            }
            for k in 1..=self.order {
                out[k] = out[k - 1] * l / k as f64;
            }
        }
        true
    }
}
