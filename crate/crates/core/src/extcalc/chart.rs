use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::symcore::Symbol;

use super::ExtError;

/// Ordered local coordinates of the manifold forms and fields live on.
#[derive(Clone)]
pub struct Chart {
    coords: Arc<[Symbol]>,
    index: Arc<HashMap<Symbol, usize>>,
}

impl Chart {
    pub fn new(coords: Vec<Symbol>) -> Result<Self, ExtError> {
        let mut index = HashMap::with_capacity(coords.len());
        for (i, s) in coords.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ExtError::DuplicateCoordinate(s.name().to_string()));
            }
        }
        Ok(Chart {
            coords: coords.into(),
            index: Arc::new(index),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Symbol {
        &self.coords[i]
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub(crate) fn check_same(&self, other: &Chart) -> Result<(), ExtError> {
        if self == other {
            Ok(())
        } else {
            Err(ExtError::ChartMismatch)
        }
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.coords, &other.coords) || self.coords == other.coords
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}
