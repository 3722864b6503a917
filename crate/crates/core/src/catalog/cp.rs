//! Consumer-product models: the diversification of linear orders, read as
//! consumers with strict preference orders on products.

use std::sync::Arc;

use super::basic::{order_sequence, LinearOrders};
use super::diversify::{diversify, Diversification};
use crate::fraisse::ClassError;
use crate::structures::FinStructure;

/// `D(lo)`.
pub fn consumer_products() -> Result<Diversification, ClassError> {
    diversify(Arc::new(LinearOrders::new()))
}

/// Products of `m` ordered by the preference of consumer `c`, least first.
pub fn preference(div: &Diversification, m: &FinStructure, c: usize) -> Vec<usize> {
    let products = Diversification::products(m);
    order_sequence(&div.slice_on(m, c, &products), 0)
        .into_iter()
        .map(|i| products[i])
        .collect()
}

/// Model with `products` products and one consumer per listed preference
/// (positions `0..products`, least first).
pub fn cp_model(div: &Diversification, products: usize, preferences: &[Vec<usize>]) -> FinStructure {
    let lo = LinearOrders::new();
    let slices: Vec<FinStructure> = preferences.iter().map(|p| lo.from_sequence(p)).collect();
    div.plain_model(products, &slices)
}

/// `Ok` iff every two consumers disagree on some pair of products;
/// otherwise the first pair of consumers with identical preferences.
pub fn cp_preference_distinct(div: &Diversification, m: &FinStructure) -> Result<(), (usize, usize)> {
    distinct_among(div, m, &Diversification::consumers(m))
}

/// [`cp_preference_distinct`] restricted to the listed consumers.
pub fn distinct_among(div: &Diversification, m: &FinStructure, consumers: &[usize]) -> Result<(), (usize, usize)> {
    let prefs: Vec<Vec<usize>> = consumers.iter().map(|&c| preference(div, m, c)).collect();
    for i in 0..consumers.len() {
        for j in i + 1..consumers.len() {
            if prefs[i] == prefs[j] {
                return Err((consumers[i], consumers[j]));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinctness_examples() {
        let d = consumer_products().unwrap();
        let one = cp_model(&d, 2, &[vec![0, 1]]);
        assert!(cp_preference_distinct(&d, &one).is_ok());
        let same = cp_model(&d, 2, &[vec![0, 1], vec![0, 1]]);
        assert_eq!(cp_preference_distinct(&d, &same), Err((2, 3)));
        let diff = cp_model(&d, 2, &[vec![0, 1], vec![1, 0]]);
        assert!(cp_preference_distinct(&d, &diff).is_ok());
        assert_eq!(preference(&d, &diff, 3), vec![1, 0]);
    }
}
