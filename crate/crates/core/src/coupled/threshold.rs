use super::basis::ChannelBasis;
use super::interaction::InteractionModel;
use super::solve::{solve_cc, CcOptions};
use crate::radial::line_fit;
use crate::radial::{ScatteringLength, ThresholdWindow};
use crate::{Error, Result};

/// s-wave scattering length (bohr) of the entrance channel `entrance` of a
/// coupled block, from `k cot(delta)` with `delta = arg(S_ee)/2` over the
/// threshold window. Only meaningful when the entrance channel is the only
/// open one, so the diagonal element has unit modulus.
pub fn cc_scattering_length(
    basis: &ChannelBasis,
    interaction: &InteractionModel,
    entrance: usize,
    options: &CcOptions,
    window: &ThresholdWindow,
) -> Result<ScatteringLength> {
    if basis.channels.get(entrance).map(|c| c.ell) != Some(0) {
        return Err(Error::InvalidInput(
            "entrance channel must be an s wave".into(),
        ));
    }
    let mut xs = Vec::with_capacity(window.points);
    let mut ys = Vec::with_capacity(window.points);
    for e in window.energies() {
        let s = solve_cc(basis, interaction, e, options)?;
        let row = s
            .open_index(entrance)
            .ok_or(Error::ClosedChannel(entrance))?;
        let t = (0.5 * s.s[(row, row)].arg()).tan();
        let k = s.k[row];
        if t == 0.0 {
            return Ok(ScatteringLength {
                a: 0.0,
                r_eff: 0.0,
                residual: 0.0,
            });
        }
        xs.push(k * k);
        ys.push(k / t);
    }
    let (c0, c1, rms) = line_fit(&xs, &ys);
    if c0.abs() < xs[0].sqrt() {
        return Err(Error::Pole {
            inverse_length: -c0,
        });
    }
    Ok(ScatteringLength {
        a: -1.0 / c0,
        r_eff: 2.0 * c1,
        residual: rms / c0.abs(),
    })
}
