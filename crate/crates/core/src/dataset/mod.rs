//! Integer-encoded categorical datasets.
//!
//! A [`Dataset`] stores an `N x M` matrix of category indices together with a
//! per-attribute dictionary mapping raw tokens to indices. Indices are dense:
//! attribute `m` uses exactly `0..Q_m`, assigned in order of first appearance.

mod discretize;
mod io;

use std::sync::Arc;

use indexmap::IndexSet;

use crate::error::{Error, Result};

pub use discretize::{discretize_numeric, kmeans_1d};
pub use io::{encode_labels, load_csv, load_labels, load_numeric_csv, LabelColumn, LoadOptions, Loaded, NumericTable};

/// Category index of one cell.
pub type Category = u32;

#[derive(Debug, Clone)]
pub struct Dataset {
    n_objects: usize,
    n_attributes: usize,
    values: Vec<Category>,
    categories: Vec<usize>,
    offsets: Vec<usize>,
    dictionaries: Arc<Vec<IndexSet<String>>>,
}

impl Dataset {
    /// Encodes a row-major table of raw tokens.
    pub fn from_tokens<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let n_objects = rows.len();
        if n_objects == 0 {
            return Err(Error::EmptyInput);
        }
        let n_attributes = rows[0].len();
        if n_attributes == 0 {
            return Err(Error::EmptyInput);
        }
        let mut dictionaries = vec![IndexSet::<String>::new(); n_attributes];
        let mut values = Vec::with_capacity(n_objects * n_attributes);
        for row in rows {
            if row.len() != n_attributes {
                return Err(Error::LengthMismatch {
                    expected: n_attributes,
                    got: row.len(),
                });
            }
            for (dict, token) in dictionaries.iter_mut().zip(row) {
                let token = token.as_ref();
                let index = match dict.get_index_of(token) {
                    Some(i) => i,
                    None => dict.insert_full(token.to_owned()).0,
                };
                values.push(index as Category);
            }
        }
        Ok(Self::assemble(n_objects, n_attributes, values, dictionaries))
    }

    /// Builds a dataset from already-coded rows. Codes are re-encoded in
    /// first-appearance order so the result is dense; the dictionary tokens
    /// are the decimal codes.
    pub fn from_codes(rows: &[Vec<Category>]) -> Result<Self> {
        let tokens: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect())
            .collect();
        Self::from_tokens(&tokens)
    }

    fn assemble(
        n_objects: usize,
        n_attributes: usize,
        values: Vec<Category>,
        dictionaries: Vec<IndexSet<String>>,
    ) -> Self {
        let categories: Vec<usize> = dictionaries.iter().map(IndexSet::len).collect();
        let offsets = prefix_offsets(&categories);
        Self {
            n_objects,
            n_attributes,
            values,
            categories,
            offsets,
            dictionaries: Arc::new(dictionaries),
        }
    }

    /// Same dictionaries and shape, different cell values. Used by the null
    /// generators, which only rearrange values within a column.
    pub(crate) fn with_values(&self, values: Vec<Category>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            ..self.clone()
        }
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    /// `Q_m` for every attribute.
    pub fn categories_per_attribute(&self) -> &[usize] {
        &self.categories
    }

    /// `Q = sum_m Q_m`.
    pub fn total_categories(&self) -> usize {
        self.offsets[self.n_attributes]
    }

    /// Start of attribute `m` in a flat per-category layout; the last entry is `Q`.
    pub fn category_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn row(&self, object: usize) -> &[Category] {
        let start = object * self.n_attributes;
        &self.values[start..start + self.n_attributes]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Category]> {
        self.values.chunks_exact(self.n_attributes)
    }

    pub fn value(&self, object: usize, attribute: usize) -> Category {
        self.values[object * self.n_attributes + attribute]
    }

    pub(crate) fn values(&self) -> &[Category] {
        &self.values
    }

    pub fn column(&self, attribute: usize) -> Vec<Category> {
        self.rows().map(|r| r[attribute]).collect()
    }

    pub fn dictionary(&self, attribute: usize) -> &IndexSet<String> {
        &self.dictionaries[attribute]
    }

    pub fn decode(&self, object: usize, attribute: usize) -> &str {
        let code = self.value(object, attribute) as usize;
        &self.dictionaries[attribute][code]
    }

    /// `N_mq` for attribute `m`, indexed by category.
    pub fn histogram(&self, attribute: usize) -> Vec<usize> {
        let mut counts = vec![0; self.categories[attribute]];
        for row in self.rows() {
            counts[row[attribute] as usize] += 1;
        }
        counts
    }

    pub fn histograms(&self) -> Vec<Vec<usize>> {
        (0..self.n_attributes).map(|m| self.histogram(m)).collect()
    }

    /// Restricts the dataset to a subset of objects (in the given order).
    /// Dictionaries are kept, so some categories may end up unused.
    pub fn select_objects(&self, objects: &[usize]) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut values = Vec::with_capacity(objects.len() * self.n_attributes);
        for &o in objects {
            if o >= self.n_objects {
                return Err(Error::InvalidArgument(format!("object {o} out of range")));
            }
            values.extend_from_slice(self.row(o));
        }
        Ok(Self {
            n_objects: objects.len(),
            values,
            ..self.clone()
        })
    }
}

fn prefix_offsets(categories: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(categories.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for q in categories {
        acc += q;
        offsets.push(acc);
    }
    offsets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_in_first_appearance_order() {
        let ds = Dataset::from_tokens(&[vec!["a", "x"], vec!["a", "y"], vec!["b", "x"]]).unwrap();
        assert_eq!(ds.n_objects(), 3);
        assert_eq!(ds.n_attributes(), 2);
        assert_eq!(ds.categories_per_attribute(), &[2, 2]);
        assert_eq!(ds.total_categories(), 4);
        assert_eq!(ds.row(2), &[1, 0]);
        assert_eq!(ds.decode(1, 1), "y");
        assert_eq!(ds.histogram(0), vec![2, 1]);
    }

    #[test]
    fn from_codes_is_dense() {
        let ds = Dataset::from_codes(&[vec![7, 3], vec![2, 3]]).unwrap();
        assert_eq!(ds.categories_per_attribute(), &[2, 1]);
        assert_eq!(ds.row(0), &[0, 0]);
        assert_eq!(ds.row(1), &[1, 0]);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        let empty: Vec<Vec<&str>> = vec![];
        assert!(matches!(Dataset::from_tokens(&empty), Err(Error::EmptyInput)));
        assert!(Dataset::from_tokens(&[vec!["a", "b"], vec!["c"]]).is_err());
    }
}
