// Induced connection of a lift and the second fundamental form of the
// immersion in the quadric model.

use alloc::vec::Vec;

use super::LiftField;
use crate::frames::{difference_tensor_order, GridN, ImmersionDataN};
use crate::grid::{partial, Order};
use crate::paracomplex::{dot, lift_derivatives};
use crate::{Error, Result};

/// Induced `(Gamma, h, psi)` in real coordinates plus the horizontal frame
/// `(xi_a, eta_a)` of the lift.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedData {
    pub data: ImmersionDataN,
    pub xi: Vec<[[f64; 3]; 2]>,
    pub eta: Vec<[[f64; 3]; 2]>,
}

fn order_for(lift: &LiftField) -> Order {
    if lift.grid.nx.min(lift.grid.ny) >= 5 {
        Order::Fourth
    } else {
        Order::Second
    }
}

/// `psi_a = <d_a x, chi>`, `xi_1 - i xi_2 = 2 xi`, `eta_1 - i eta_2 = 2 eta`,
/// `h_ab = <xi_a, eta_b>` and `Gamma^m_{bc}` from
/// `<d_c xi_b, eta_d> = Gamma^m_{bc} h_{md} + psi_c h_{bd}`, symmetrized in `b, c`.
pub fn induced_data(lift: &LiftField) -> Result<InducedData> {
    let g = lift.grid;
    g.require(3)?;
    let order = order_for(lift);
    let d = lift_derivatives(&lift.samples(), order)?;
    let n = g.len();
    let mut psi = Vec::with_capacity(2 * n);
    let mut xi = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(4 * n);
    for k in 0..n {
        let c = &lift.chi[k];
        let p = [dot(&d[0][k], c), dot(&d[1][k], c)];
        let (zx, ze) = (&lift.xi[k], &lift.eta[k]);
        let xk = [
            core::array::from_fn(|i| 2.0 * zx[i].re),
            core::array::from_fn(|i| -2.0 * zx[i].im),
        ];
        let ek = [
            core::array::from_fn(|i| 2.0 * ze[i].re),
            core::array::from_fn(|i| -2.0 * ze[i].im),
        ];
        for a in 0..2 {
            for b in 0..2 {
                h.push(dot(&xk[a], &ek[b]));
            }
        }
        psi.extend_from_slice(&p);
        xi.push(xk);
        eta.push(ek);
    }
    // dxi[c][b][k] = d_c xi_b at point k
    let mut dxi = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
    for b in 0..2 {
        let mut comps = [Vec::new(), Vec::new(), Vec::new()];
        for (i, comp) in comps.iter_mut().enumerate() {
            *comp = xi.iter().map(|v| v[b][i]).collect::<Vec<f64>>();
        }
        for cax in 0..2 {
            let parts: Vec<Vec<f64>> = comps
                .iter()
                .map(|f| partial(f, &g, cax, order))
                .collect::<Result<Vec<_>>>()?;
            dxi[cax][b] = (0..n)
                .map(|k| [parts[0][k], parts[1][k], parts[2][k]])
                .collect::<Vec<[f64; 3]>>();
        }
    }
    let mut gamma = Vec::with_capacity(8 * n);
    for k in 0..n {
        let hk = &h[4 * k..4 * k + 4];
        let det = hk[0] * hk[3] - hk[1] * hk[2];
        if !(det.abs() > 1e-14) {
            return Err(Error::DegenerateTangent);
        }
        let hinv = [hk[3] / det, -hk[1] / det, -hk[2] / det, hk[0] / det];
        let p = &psi[2 * k..2 * k + 2];
        let mut gk = [[[0.0; 2]; 2]; 2];
        for b in 0..2 {
            for c in 0..2 {
                // X_d = <d_c xi_b, eta_d> - psi_c h_bd
                let xd: [f64; 2] = core::array::from_fn(|dd| {
                    dot(&dxi[c][b][k], &eta[k][dd]) - p[c] * hk[b * 2 + dd]
                });
                for m in 0..2 {
                    gk[m][b][c] = xd[0] * hinv[m] + xd[1] * hinv[2 + m];
                }
            }
        }
        for m in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    gamma.push(0.5 * (gk[m][b][c] + gk[m][c][b]));
                }
            }
        }
    }
    let gn = GridN::new(
        alloc::vec![g.nx, g.ny],
        alloc::vec![g.hx, g.hy],
        alloc::vec![g.x0, g.y0],
    )?;
    Ok(InducedData {
        data: ImmersionDataN::new(gn, gamma, h, psi)?,
        xi,
        eta,
    })
}

/// Second fundamental form `II(e_a, e_b)` (ambient 6-vectors `(X, Xt)`) and
/// the mean curvature vector `Tr_g II` at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondFundamentalForm {
    pub ii: Vec<[[[f64; 6]; 2]; 2]>,
    pub mean: Vec<[f64; 6]>,
}

fn ghat(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    0.5 * (a[0] * b[3] + a[1] * b[4] + a[2] * b[5] + b[0] * a[3] + b[1] * a[4] + b[2] * a[5])
}

/// `II(X, Y) = Pi_N Pi_- f_* K(X, Y)`: push `K` forward by the horizontal
/// frame, keep the covector part, then remove the `ghat`-orthogonal
/// projection onto the tangent plane.
pub fn second_fundamental_form_field(lift: &LiftField) -> Result<SecondFundamentalForm> {
    let ind = induced_data(lift)?;
    let k = difference_tensor_order(&ind.data, order_for(lift))?;
    let n = lift.grid.len();
    let mut ii = Vec::with_capacity(n);
    let mut mean = Vec::with_capacity(n);
    for p in 0..n {
        let t: [[f64; 6]; 2] = core::array::from_fn(|a| {
            let mut v = [0.0; 6];
            v[..3].copy_from_slice(&ind.xi[p][a]);
            v[3..].copy_from_slice(&ind.eta[p][a]);
            v
        });
        let gram = [
            [ghat(&t[0], &t[0]), ghat(&t[0], &t[1])],
            [ghat(&t[1], &t[0]), ghat(&t[1], &t[1])],
        ];
        let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
        if !(det.abs() > 1e-10) {
            return Err(Error::DegenerateTangent);
        }
        let ginv = [
            [gram[1][1] / det, -gram[0][1] / det],
            [-gram[1][0] / det, gram[0][0] / det],
        ];
        let kp = &k[8 * p..8 * p + 8];
        let mut iip = [[[0.0; 6]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                let mut v = [0.0; 6];
                for m in 0..2 {
                    for i in 0..3 {
                        v[3 + i] += kp[m * 4 + x * 2 + y] * ind.eta[p][m][i];
                    }
                }
                let r = [ghat(&v, &t[0]), ghat(&v, &t[1])];
                for a in 0..2 {
                    let coef = ginv[a][0] * r[0] + ginv[a][1] * r[1];
                    for i in 0..6 {
                        v[i] -= coef * t[a][i];
                    }
                }
                iip[x][y] = v;
            }
        }
        let mut hv = [0.0; 6];
        for x in 0..2 {
            for y in 0..2 {
                for i in 0..6 {
                    hv[i] += ginv[x][y] * iip[x][y][i];
                }
            }
        }
        ii.push(iip);
        mean.push(hv);
    }
    Ok(SecondFundamentalForm { ii, mean })
}

/// `II(e_x, e_y)` at grid point `at`.
pub fn second_fundamental_form(
    lift: &LiftField,
    at: usize,
    x: usize,
    y: usize,
) -> Result<[f64; 6]> {
    if at >= lift.grid.len() || x > 1 || y > 1 {
        return Err(Error::InvalidParameter(
            "point or tangent index out of range",
        ));
    }
    Ok(second_fundamental_form_field(lift)?.ii[at][x][y])
}

/// Interior maximum of the Euclidean norm of `Tr_g II`.
pub fn mean_curvature_residual(lift: &LiftField) -> Result<f64> {
    let s = second_fundamental_form_field(lift)?;
    let g = lift.grid;
    Ok(crate::par::max_of(g.len(), |k| {
        let (i, j) = g.ij(k);
        if g.is_interior(i, j) {
            crate::math::sqrt(s.mean[k].iter().map(|v| v * v).sum())
        } else {
            0.0
        }
    }))
}
