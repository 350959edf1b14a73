//! Large-genus sinh/cosh expansion of `x_1...x_n V_{g,n}(x) / V_{g,n}`.
//!
//! Only the leading order is known in closed form; the next order is fitted
//! per genus against a parity-constrained basis and reported as empirical.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{least_squares, line_fit};
use crate::volumes::{NumericVolumes, Signature};

/// `2^n prod sinh(x_i / 2)`.
pub fn leading_term(x: &[f64]) -> f64 {
    x.iter().map(|v| 2.0 * (0.5 * v).sinh()).product()
}

/// Sparse real polynomial in `n` variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn constant(n: usize, c: f64) -> Self {
        Polynomial {
            terms: vec![(vec![0; n], c)],
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Total degree in the selected variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(e, _)| vars.iter().map(|&i| e[i]).sum())
            .max()
            .unwrap_or(0)
    }
}

/// `F^{(N)}(x) = sum P^{(N,V+,V-)}(x) prod_{V+} cosh(x_i/2) prod_{V-} sinh(x_i/2)`.
#[derive(Debug, Clone, Serialize)]
pub struct SinhCoshExpansion {
    pub n: usize,
    pub order: u32,
    /// Keyed by `(V+, V-)` as sorted index lists.
    pub terms: BTreeMap<(Vec<usize>, Vec<usize>), Polynomial>,
}

impl SinhCoshExpansion {
    /// The order-zero expansion: a single constant `2^n` on `V- = {1..n}`.
    pub fn leading(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            (Vec::new(), (0..n).collect()),
            Polynomial::constant(n, 2f64.powi(n as i32)),
        );
        SinhCoshExpansion { n, order: 0, terms }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::domain(format!("expected {} lengths, got {}", self.n, x.len())));
        }
        Ok(self
            .terms
            .iter()
            .map(|((plus, minus), p)| {
                let c: f64 = plus.iter().map(|&i| (0.5 * x[i]).cosh()).product();
                let s: f64 = minus.iter().map(|&i| (0.5 * x[i]).sinh()).product();
                p.eval(x) * c * s
            })
            .sum())
    }

    /// Each polynomial is even in `V-` variables and odd in the others, checked
    /// by flipping one coordinate at a time at the given points.
    pub fn parity_holds(&self, points: &[Vec<f64>], tol: f64) -> bool {
        self.terms.iter().all(|((_, minus), p)| {
            points.iter().all(|x| {
                (0..self.n).all(|i| {
                    let mut y = x.clone();
                    y[i] = -y[i];
                    let (a, b) = (p.eval(x), p.eval(&y));
                    let want = if minus.contains(&i) { a } else { -a };
                    (b - want).abs() <= tol * (1.0 + a.abs())
                })
            })
        })
    }

    /// Total degree in `V+ ⊔ V-` is at most `2N` for every term.
    pub fn degree_bound_holds(&self) -> bool {
        self.terms.iter().all(|((plus, minus), p)| {
            let vars: Vec<usize> = plus.iter().chain(minus).copied().collect();
            p.degree_in(&vars) <= 2 * self.order
        })
    }
}

/// Signed difference `x_1...x_n V(x)/V - F^{(0)}(x)`.
pub fn signed_residual(vols: &NumericVolumes, sig: Signature, x: &[f64]) -> Result<f64> {
    if x.len() != sig.n as usize || sig.n == 0 {
        return Err(Error::domain(format!(
            "expected {} positive boundary lengths for {sig}",
            sig.n
        )));
    }
    let v = vols.volume(sig)?;
    let vx = vols.evaluate(sig, x)?;
    let prod: f64 = x.iter().product();
    Ok(prod * vx / v - leading_term(x))
}

/// `|x_1...x_n V_{g,n}(x)/V_{g,n} - F^{(0)}(x)|`.
pub fn residual(vols: &NumericVolumes, sig: Signature, x: &[f64]) -> Result<f64> {
    signed_residual(vols, sig, x).map(f64::abs)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub g: u32,
    pub x: Vec<f64>,
    pub residual: f64,
    /// `(||x|| + 1) e^{sum x_i / 2} / (g + 1)`, the order-zero error shape.
    pub bound_rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorShapeFit {
    pub n: u32,
    pub genera: Vec<u32>,
    pub rows: Vec<ResidualRow>,
    /// Fitted slope of `log residual` against `log(g + 1)`, one per grid point;
    /// `None` where the residual vanishes identically.
    pub exponents: Vec<Option<f64>>,
    /// Largest `residual (g+1) / ((||x||+1) e^{sum x/2})` over the scan.
    pub constant: f64,
    pub exact_zero: bool,
}

impl ErrorShapeFit {
    /// Least negative fitted exponent over the grid.
    pub fn worst_exponent(&self) -> Option<f64> {
        self.exponents.iter().flatten().copied().reduce(f64::max)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn shape(g: u32, x: &[f64]) -> f64 {
    (norm(x) + 1.0) * (0.5 * x.iter().sum::<f64>()).exp() / (g as f64 + 1.0)
}

/// Residual scan over `genera` at each grid point, with the `N = 0` decay fit.
pub fn verify_error_shape(
    vols: &NumericVolumes,
    n: u32,
    grid: &[Vec<f64>],
    genera: &[u32],
) -> Result<ErrorShapeFit> {
    if genera.len() < 4 {
        return Err(Error::domain("need at least four genera for a decay fit"));
    }
    if grid.iter().any(|x| x.len() != n as usize) {
        return Err(Error::domain("grid point of the wrong arity"));
    }
    let rows: Vec<ResidualRow> = grid
        .par_iter()
        .flat_map_iter(|x| {
            genera.iter().map(move |&g| (g, x.clone()))
        })
        .map(|(g, x)| -> Result<ResidualRow> {
            let r = residual(vols, Signature::new(g, n)?, &x)?;
            Ok(ResidualRow {
                g,
                bound_rhs: shape(g, &x),
                x,
                residual: r,
            })
        })
        .collect::<Result<_>>()?;
    let mut exponents = Vec::new();
    let mut all_zero = true;
    for (i, _) in grid.iter().enumerate() {
        let chunk = &rows[i * genera.len()..(i + 1) * genera.len()];
        // exact zeros and float noise at x = 0 both count as vanishing
        if chunk.iter().all(|r| r.residual <= 1e-13 * (1.0 + r.bound_rhs)) {
            exponents.push(None);
            continue;
        }
        all_zero = false;
        let lx: Vec<f64> = chunk.iter().map(|r| (r.g as f64 + 1.0).ln()).collect();
        let ly: Vec<f64> = chunk.iter().map(|r| r.residual.ln()).collect();
        exponents.push(Some(line_fit(&lx, &ly)?.1));
    }
    let constant = rows
        .iter()
        .map(|r| r.residual / r.bound_rhs)
        .fold(0.0, f64::max);
    Ok(ErrorShapeFit {
        n,
        genera: genera.to_vec(),
        rows,
        exponents,
        constant,
        exact_zero: all_zero,
    })
}

/// One basis function of the order-one fit.
#[derive(Debug, Clone, Serialize)]
pub struct BasisTerm {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub exponents: Vec<u32>,
}

impl BasisTerm {
    fn eval(&self, x: &[f64]) -> f64 {
        let mono: f64 = self.exponents.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product();
        let c: f64 = self.plus.iter().map(|&i| (0.5 * x[i]).cosh()).product();
        let s: f64 = self.minus.iter().map(|&i| (0.5 * x[i]).sinh()).product();
        mono * c * s
    }
}

/// Monomials allowed in `P^{(1, V+, V-)}`: even in `V-`, odd elsewhere,
/// total degree at most 2 in `V+ ⊔ V-`, and at most `free_degree` in each
/// remaining variable.
pub fn order_one_basis(n: usize, free_degree: u32) -> Vec<BasisTerm> {
    let mut out = Vec::new();
    // each variable is in V+ (1), V- (2) or neither (0)
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut role = vec![0u8; n];
        let mut c = code;
        for r in role.iter_mut() {
            *r = (c % 3) as u8;
            c /= 3;
        }
        let plus: Vec<usize> = (0..n).filter(|&i| role[i] == 1).collect();
        let minus: Vec<usize> = (0..n).filter(|&i| role[i] == 2).collect();
        let choices: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let even = role[i] == 2;
                let cap = if role[i] == 0 { free_degree } else { 2 };
                (0..=cap).filter(|k| (k % 2 == 0) == even).collect()
            })
            .collect();
        let mut idx = vec![0usize; n];
        'outer: loop {
            let e: Vec<u32> = (0..n).map(|i| choices[i][idx[i]]).collect();
            let deg: u32 = plus.iter().chain(&minus).map(|&i| e[i]).sum();
            if deg <= 2 {
                out.push(BasisTerm {
                    plus: plus.clone(),
                    minus: minus.clone(),
                    exponents: e,
                });
            }
            for i in 0..n {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct NextOrderFit {
    pub n: u32,
    pub basis: Vec<BasisTerm>,
    /// Per genus: fitted coefficients of `g * residual`.
    pub coefficients: Vec<(u32, Vec<f64>)>,
    pub condition_number: f64,
    /// Per genus: largest `|residual - fit / g|` over the grid.
    pub post_fit: Vec<(u32, f64)>,
    pub post_fit_exponent: f64,
    pub pre_fit_exponent: f64,
    /// Largest regression residual of each coefficient sequence against
    /// `c_{g,n}(alpha) / V_{g,n}` features, relative to the sequence scale.
    pub linearity_residual: Vec<f64>,
}

impl NextOrderFit {
    /// The order-one expansion fitted at genus `g`, scaled by `1/g`.
    pub fn expansion_at(&self, g: u32) -> Option<SinhCoshExpansion> {
        let (_, coeffs) = self.coefficients.iter().find(|(gg, _)| *gg == g)?;
        let n = self.n as usize;
        let mut terms: BTreeMap<(Vec<usize>, Vec<usize>), Polynomial> = BTreeMap::new();
        for (b, c) in self.basis.iter().zip(coeffs) {
            terms
                .entry((b.plus.clone(), b.minus.clone()))
                .or_insert_with(|| Polynomial { terms: Vec::new() })
                .terms
                .push((b.exponents.clone(), c / g as f64));
        }
        Some(SinhCoshExpansion { n, order: 1, terms })
    }
}

/// Fits `g (x V/V - F^{(0)})` at each genus against the order-one basis.
pub fn fit_next_order(
    vols: &NumericVolumes,
    n: u32,
    grid: &[Vec<f64>],
    genera: &[u32],
) -> Result<NextOrderFit> {
    if genera.len() < 4 {
        return Err(Error::domain("need at least four genera for a decay fit"));
    }
    let basis = order_one_basis(n as usize, 3);
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .map(|x| basis.iter().map(|b| b.eval(x)).collect())
        .collect();
    let mut coefficients = Vec::new();
    let mut post_fit = Vec::new();
    let mut pre_fit = Vec::new();
    let mut cond: f64 = 0.0;
    for &g in genera {
        let sig = Signature::new(g, n)?;
        let r: Vec<f64> = grid
            .iter()
            .map(|x| signed_residual(vols, sig, x))
            .collect::<Result<_>>()?;
        let y: Vec<f64> = r.iter().map(|v| v * g as f64).collect();
        let fit = least_squares(&rows, &y, 1e12)?;
        cond = cond.max(fit.condition_number);
        post_fit.push((g, fit.max_abs_residual / g as f64));
        pre_fit.push((g, r.iter().fold(0.0f64, |a, v| a.max(v.abs()))));
        coefficients.push((g, fit.coefficients));
    }
    let slope = |data: &[(u32, f64)]| -> Result<f64> {
        let lx: Vec<f64> = data.iter().map(|(g, _)| (*g as f64 + 1.0).ln()).collect();
        let ly: Vec<f64> = data.iter().map(|(_, v)| v.ln()).collect();
        Ok(line_fit(&lx, &ly)?.1)
    };
    let linearity_residual = linearity_check(vols, n, &coefficients)?;
    Ok(NextOrderFit {
        n,
        basis,
        condition_number: cond,
        post_fit_exponent: slope(&post_fit)?,
        pre_fit_exponent: slope(&pre_fit)?,
        post_fit,
        coefficients,
        linearity_residual,
    })
}

/// Regresses each coefficient sequence on `1, g c(alpha)/V - g c_inf(alpha)`
/// for the first few one-variable multi-indices.
fn linearity_check(
    vols: &NumericVolumes,
    n: u32,
    coefficients: &[(u32, Vec<f64>)],
) -> Result<Vec<f64>> {
    if n != 1 || coefficients.len() < 5 {
        return Ok(Vec::new());
    }
    // limiting ratio c(k)/V -> 1 / (4^k (2k+1)!)
    let limit = |k: i32| 1.0 / (4f64.powi(k) * (1..=(2 * k + 1)).map(|v| v as f64).product::<f64>());
    let mut features = Vec::new();
    for (g, _) in coefficients {
        let c = vols.one_holed(*g)?;
        let mut row = vec![1.0];
        for k in 1..=3 {
            row.push(*g as f64 * (c[k as usize] / c[0] - limit(k)));
        }
        features.push(row);
    }
    let m = coefficients[0].1.len();
    let mut out = Vec::new();
    for j in 0..m {
        let y: Vec<f64> = coefficients.iter().map(|(_, c)| c[j]).collect();
        let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        let fit = least_squares(&features, &y, 1e14)?;
        out.push(fit.max_abs_residual / scale);
    }
    Ok(out)
}
