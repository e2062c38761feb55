use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomotopyGroup {
    Z,
    Z2,
    Zero,
    /// `Z/n`
    Cyclic(u32),
    /// Outside the stable range with no recorded value.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub group: HomotopyGroup,
    pub stable: bool,
    pub k: usize,
    /// Even fiber dimension actually used (odd dimensions are raised by one).
    pub dimension: usize,
}

/// `pi_k` of the space of linear complex structures on `R^dim`
/// (`SO(2n)/U(n)`, `dim = 2n`; odd `2n+1` resolves to `2n+2`).
pub fn stable_group(k: usize, dim: usize) -> Result<GroupDescriptor> {
    if k == 0 {
        return Err(Error::InvalidArgument("homotopy degree k must be at least 1".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("fiber dimension must be positive".into()));
    }
    let dimension = dim + dim % 2;
    let n = dimension / 2;
    let stable = 2 * n >= 2 && k + 2 <= 2 * n;
    let group = if stable {
        match (k % 8, k % 4) {
            (0 | 7, _) => HomotopyGroup::Z2,
            (_, 2) => HomotopyGroup::Z,
            _ => HomotopyGroup::Zero,
        }
    } else {
        unstable(k, n)
    };
    Ok(GroupDescriptor { group, stable, k, dimension })
}

fn unstable(k: usize, n: usize) -> HomotopyGroup {
    use HomotopyGroup::*;
    match n {
        // SO(2)/U(1) is a point
        1 => Zero,
        // SO(4)/U(2) = S^2
        2 => match k {
            3 => Z,
            4 | 5 => Z2,
            6 => Cyclic(12),
            _ => Unknown,
        },
        // SO(6)/U(3) = CP^3, with pi_k = pi_k(S^7) for k >= 3
        3 => match k {
            5 | 6 => Zero,
            7 => Z,
            8 | 9 => Z2,
            _ => Unknown,
        },
        _ => Unknown,
    }
}
