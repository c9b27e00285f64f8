//! Name-based lookup of the pluggable strategies (discretizations, PDEs,
//! kernels), so configurations can pick them at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::discretization::{Discretization, PolySpline, Q1, Q2};
use crate::error::{Error, Result};
use crate::pde::{Elasticity, Pde, Poisson};
use crate::poly::{InverseDistance, Kernel, LogKernel};

/// Numeric parameters passed to factories (for example `young`, `poisson_ratio`).
pub type Params = BTreeMap<String, f64>;

type Factory<T> = Box<dyn Fn(&Params) -> Result<T> + Send + Sync>;

pub struct Registry<T> {
    kind: &'static str,
    entries: BTreeMap<String, Factory<T>>,
}

impl<T> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &str, f: impl Fn(&Params) -> Result<T> + Send + Sync + 'static) {
        self.entries.insert(name.to_string(), Box::new(f));
    }

    pub fn create(&self, name: &str, params: &Params) -> Result<T> {
        let f = self.entries.get(name).ok_or_else(|| Error::UnknownStrategy { kind: self.kind, name: name.to_string() })?;
        f(params)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(|s| s.as_str()).collect()
    }
}

fn param(p: &Params, key: &str, default: f64) -> f64 {
    p.get(key).copied().unwrap_or(default)
}

/// All built-in strategies.
pub struct Strategies {
    pub discretizations: Registry<Arc<dyn Discretization>>,
    pub pdes: Registry<Arc<dyn Pde>>,
    pub kernels: Registry<Arc<dyn Kernel>>,
}

impl Default for Strategies {
    fn default() -> Self {
        let mut discretizations: Registry<Arc<dyn Discretization>> = Registry::new("discretization");
        discretizations.register("q1", |_| Ok(Arc::new(Q1)));
        discretizations.register("q2", |_| Ok(Arc::new(Q2)));
        discretizations.register("polyspline", |_| Ok(Arc::new(PolySpline)));

        let mut pdes: Registry<Arc<dyn Pde>> = Registry::new("pde");
        pdes.register("poisson", |_| Ok(Arc::new(Poisson)));
        pdes.register("elasticity", |p| {
            let e = param(p, "young", 200.0);
            let nu = param(p, "poisson_ratio", 0.35);
            if e <= 0.0 || !(-1.0..0.5).contains(&nu) {
                return Err(Error::Invalid(format!("elastic parameters E = {e}, nu = {nu}")));
            }
            Ok(Arc::new(Elasticity::from_young(e, nu)))
        });

        let mut kernels: Registry<Arc<dyn Kernel>> = Registry::new("kernel");
        kernels.register("inverse-distance", |_| Ok(Arc::new(InverseDistance)));
        kernels.register("log", |_| Ok(Arc::new(LogKernel)));
        Self { discretizations, pdes, kernels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name() {
        let s = Strategies::default();
        assert_eq!(s.discretizations.create("q2", &Params::new()).unwrap().name(), "q2");
        assert_eq!(s.pdes.create("elasticity", &Params::new()).unwrap().components(), 2);
        assert_eq!(s.kernels.create("log", &Params::new()).unwrap().name(), "log");
        assert!(matches!(s.pdes.create("heat", &Params::new()), Err(Error::UnknownStrategy { .. })));
        assert_eq!(s.discretizations.names(), vec!["polyspline", "q1", "q2"]);
    }
}
