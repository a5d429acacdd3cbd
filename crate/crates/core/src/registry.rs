//! Name-keyed factories for the interchangeable strategy families
//! (fluxes, initial conditions, oracles).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::params::Params;

pub type Factory<T> = Box<dyn Fn(&Params) -> Result<Box<T>> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    family: &'static str,
    entries: BTreeMap<String, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(family: &'static str) -> Self {
        Self {
            family,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: &str, factory: F) -> &mut Self
    where
        F: Fn(&Params) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(factory));
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, params: &Params) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(factory) => factory(params),
            None => Err(Error::UnknownKind {
                kind: self.family,
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("family", &self.family)
            .field("entries", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Named {
        fn name(&self) -> String;
    }
    struct A(f64);
    impl Named for A {
        fn name(&self) -> String {
            format!("a{}", self.0)
        }
    }

    #[test]
    fn build_by_name_and_report_unknown() {
        let mut reg: Registry<dyn Named> = Registry::new("thing");
        reg.register("a", |p| Ok(Box::new(A(p.number_or("k", 1.0)?))));
        let built = reg.build("a", &Params::new().with("k", 2.0)).unwrap();
        assert_eq!(built.name(), "a2");
        let err = reg.build("b", &Params::new()).err().unwrap().to_string();
        assert!(err.contains("unknown thing `b`"), "{err}");
        assert!(err.contains("known: a"), "{err}");
    }
}
