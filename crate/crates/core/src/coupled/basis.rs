use crate::{Error, Result};

/// Spatial parity `(-1)^(j + l)` of a channel block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(j: u32, ell: u32) -> Self {
        if (j + ell) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Rotor levels kept in the basis. Identical nuclei restrict the diatom to
/// even or odd `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotorStates {
    All,
    Even,
    Odd,
}

impl RotorStates {
    fn allows(self, j: u32) -> bool {
        match self {
            RotorStates::All => true,
            RotorStates::Even => j % 2 == 0,
            RotorStates::Odd => j % 2 == 1,
        }
    }
}

/// One channel: diatom rotation `j` and atom-diatom orbital momentum `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Channel {
    pub j: u32,
    pub ell: u32,
}

/// Channels of one `(J, parity)` block, ordered by `j` then `ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBasis {
    pub total_j: u32,
    pub parity: Parity,
    pub rotor: RotorStates,
    pub channels: Vec<Channel>,
    /// Rotational constant `B` in Hartree; thresholds are `B j (j + 1)`.
    pub rotational_constant: f64,
}

/// All `(j, ell)` with `j <= j_max`, `|j - ell| <= J <= j + ell` and the
/// requested parity. Thresholds are zero until a rotational constant is set.
pub fn build_basis(
    total_j: u32,
    j_max: u32,
    parity: Parity,
    rotor: RotorStates,
) -> Result<ChannelBasis> {
    let mut channels = Vec::new();
    for j in (0..=j_max).filter(|&j| rotor.allows(j)) {
        let lo = j.abs_diff(total_j);
        for ell in lo..=j + total_j {
            if Parity::of(j, ell) == parity {
                channels.push(Channel { j, ell });
            }
        }
    }
    if channels.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(ChannelBasis {
        total_j,
        parity,
        rotor,
        channels,
        rotational_constant: 0.0,
    })
}

impl ChannelBasis {
    pub fn with_rotational_constant(mut self, b: f64) -> Self {
        self.rotational_constant = b;
        self
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn threshold(&self, index: usize) -> f64 {
        let j = self.channels[index].j as f64;
        self.rotational_constant * j * (j + 1.0)
    }

    pub fn thresholds(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.threshold(i)).collect()
    }

    pub fn ells(&self) -> Vec<u32> {
        self.channels.iter().map(|c| c.ell).collect()
    }

    pub fn index_of(&self, j: u32, ell: u32) -> Option<usize> {
        self.channels.iter().position(|c| c.j == j && c.ell == ell)
    }
}
