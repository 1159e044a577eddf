//! Execution policy and run configuration.

/// How independent work items (lattice cells, random trials) are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Exec::Parallel;
        #[cfg(not(feature = "parallel"))]
        Exec::Sequential
    }
}

impl Exec {
    /// Order-preserving map.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
        }
    }
}

pub const DEFAULT_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Config {
    pub tol: f64,
    /// Largest number of ambient matrix entries a computation may touch.
    pub cap: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for Config {
    fn default() -> Self {
        Config { tol: crate::scalar::DEFAULT_TOL, cap: DEFAULT_CAP, seed: 0, exec: Exec::default() }
    }
}

impl Config {
    pub fn sequential(mut self) -> Self {
        self.exec = Exec::Sequential;
        self
    }

    pub fn check_cap(&self, needed: usize) -> crate::Result<()> {
        if needed > self.cap {
            Err(crate::Error::CapExceeded { needed, cap: self.cap })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v: Vec<usize> = (0..100).collect();
        let a = Exec::Sequential.map(v.clone(), |x| x * x);
        let b = Exec::default().map(v, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn cap_check() {
        let c = Config { cap: 10, ..Config::default() };
        assert!(c.check_cap(10).is_ok());
        assert_eq!(c.check_cap(11), Err(crate::Error::CapExceeded { needed: 11, cap: 10 }));
    }
}
