// SPDX-License-Identifier: Apache-2.0

//! Upper quantiles of the studentized range of `K` independent standard
//! normals (infinite degrees of freedom), for `K = 2..=20`.

use crate::error::{Error, Result};

pub const MIN_K: usize = 2;
pub const MAX_K: usize = 20;

const Q_05: [f64; 19] = [
    2.771808, 3.314493, 3.633160, 3.857656, 4.030092, 4.169554, 4.286309, 4.386509, 4.474124,
    4.551864, 4.621655, 4.684920, 4.742732, 4.795924, 4.845154, 4.890951, 4.933745, 4.973892,
    5.011689,
];

const Q_10: [f64; 19] = [
    2.326174, 2.902380, 3.240446, 3.478281, 3.660721, 3.808098, 3.931349, 4.037023, 4.129346,
    4.211200, 4.284635, 4.351158, 4.411913, 4.467782, 4.519464, 4.567519, 4.612403, 4.654494,
    4.694104,
];

/// `q` such that `P(range ≥ q) = alpha`; `alpha` must be 0.05 or 0.10.
pub fn studentized_range(k: usize, alpha: f64) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(Error::UnsupportedCriticalValue { k, alpha });
    };
    if !(MIN_K..=MAX_K).contains(&k) {
        return Err(Error::UnsupportedCriticalValue { k, alpha });
    }
    Ok(table[k - MIN_K])
}
