//! Family eigen-lifts: a basis `B(T)` of an ordinary block of family symbols with
//! `U_p B = B C(T)`, solved one `T`-monomial at a time around single-weight eigensymbols.

use std::sync::Arc;

use super::affinoid::{monomial_index, monomials, TruncatedAffinoid};
use super::module::FamilyModule;
use super::FamilyError;
use crate::evalmaps::classical::{hecke_classical, p_stabilize, rational_to_padic, unit_root};
use crate::evalmaps::symbol::{Coefficients, Moments, PolyDual, Symbol};
use crate::evalmaps::{lift_noncritical, EvalError, ManinData};
use crate::padic::{scale_rows, smith, solve_with_smith, PadicNumber, Smith, ZMat, Zmod};
use crate::pardist::MomentDistribution;

type FamilySymbol = Symbol<FamilyModule>;

#[derive(Clone, Debug)]
pub struct FamilyEigenReport {
    pub basis: Vec<FamilySymbol>,
    /// `up[b][a]`: `U_p B_a = sum_b B_b up[b][a]`.
    pub up: Vec<Vec<TruncatedAffinoid>>,
    /// Filtration digits of `U_p B - B C`.
    pub eigen_digits: i64,
    /// Filtration digits of the Manin relations evaluated on `B`.
    pub relation_digits: i64,
}

/// An ordinary block at weight two: the `p`-stabilized first rational newform of `level` with
/// its unit root, together with every rational newform of level `level * p` whose `U_p`
/// eigenvalue is congruent to it. Returns the lifted eigensymbols and their eigenvalues.
pub fn ordinary_block(level: u64, p: u64, m: u32) -> Result<(Vec<Symbol<Moments>>, Vec<PadicNumber>), FamilyError> {
    let prec = m as i64 + 8;
    let low = hecke_classical(level)?;
    let form = low.rational_newforms().into_iter().next().ok_or(EvalError::Unsupported(format!("no rational newform at level {level}")))?;
    let ap = *form.eigenvalues.get(&p).ok_or(EvalError::Unsupported(format!("a_{p} is not recorded")))?;
    let alpha = unit_root(p, ap, prec)?;
    let stab = p_stabilize(&low.space.symbol(form.basis[0].clone()), p, &alpha)?;
    let mut symbols = vec![lift_noncritical(&stab, &alpha, m, m as usize + 2)?.symbol];
    let mut eigenvalues = vec![alpha.clone()];
    let high = hecke_classical(level * p)?;
    for sys in high.rational_newforms() {
        let phi = high.space.symbol(sys.basis[0].clone());
        let up = phi.u_p(p);
        let Some(i) = phi.values.iter().position(|v| !num_traits::Zero::is_zero(v)) else { continue };
        let a = &up.values[i] / &phi.values[i];
        if phi.values.iter().zip(&up.values).any(|(v, w)| &(v * &a) != w) || !a.is_integer() {
            continue;
        }
        let a = rational_to_padic(&a, p, prec)?;
        if a.valuation() != Some(0) || !a.sub(&alpha).valuation().is_none_or(|v| v >= 1) {
            continue;
        }
        let values = phi.values.iter().map(|v| Ok(vec![rational_to_padic(v, p, prec)?])).collect::<Result<Vec<_>, EvalError>>()?;
        let dual = Symbol::new(phi.manin.clone(), PolyDual { p, lambda: [0, 0], prec }, values);
        symbols.push(lift_noncritical(&dual, &a, m, m as usize + 2)?.symbol);
        eigenvalues.push(a);
    }
    Ok((symbols, eigenvalues))
}

/// Filtration digits of a family value vector: the largest `d <= e(M)` with moment `k`
/// divisible by `p^{d - e(M) + e(M - k)}`.
pub fn family_digits(module: &FamilyModule, values: &[Vec<Vec<u64>>]) -> i64 {
    let z = module.z();
    let top = module.moment_precision(0) as i64;
    let mut d = top;
    for v in values {
        for (k, s) in v.iter().enumerate() {
            let shift = top - module.moment_precision(k) as i64;
            for &x in s {
                if x != 0 {
                    d = d.min(z.val(x) as i64 + shift);
                }
            }
        }
    }
    d
}

struct BaseOperators {
    n: usize,
    a0: ZMat,
    u0: ZMat,
    i0: ZMat,
}

fn flatten(values: &[MomentDistribution]) -> Vec<u64> {
    values.iter().flat_map(|v| v.residues().iter().copied()).collect()
}

fn base_operators(manin: &Arc<ManinData>, module: Moments) -> Result<BaseOperators, FamilyError> {
    let mm = module.m as usize;
    let nf = manin.num_free();
    let n = nf * mm;
    let nrel = manin.relations.len();
    let (mut a0, mut u0, mut i0) = (ZMat::zeros(nrel * mm, n), ZMat::zeros(n, n), ZMat::zeros(n, n));
    for c in 0..n {
        let mut values = vec![module.zero(); nf];
        let mut r = vec![0u64; mm];
        r[c % mm] = 1;
        values[c / mm] = MomentDistribution::new(module.p, module.lambda, module.m, r)?;
        let s = Symbol::new(manin.clone(), module, values);
        for (row, x) in flatten(&s.relation_values()).into_iter().enumerate() {
            a0.set(row, c, x);
        }
        for (row, x) in flatten(&s.u_p(module.p).values).into_iter().enumerate() {
            u0.set(row, c, x);
        }
        for (row, x) in flatten(&s.iota().values).into_iter().enumerate() {
            i0.set(row, c, x);
        }
    }
    Ok(BaseOperators { n, a0, u0, i0 })
}

/// Rows on which the columns `cols` have a minor of least valuation, by elimination with
/// minimal-valuation pivots.
fn pivot_rows(z: &Zmod, cols: &[Vec<u64>]) -> Result<Vec<usize>, FamilyError> {
    let mut work: Vec<Vec<u64>> = cols.to_vec();
    let mut chosen = Vec::new();
    for _ in 0..work.len() {
        let best = (0..work.len())
            .filter(|&j| !work[j].is_empty())
            .flat_map(|j| work[j].iter().enumerate().filter(|(_, &x)| x != 0).map(move |(i, &x)| (z.val(x), i, j)))
            .filter(|&(_, i, _)| !chosen.contains(&i))
            .min();
        let Some((v, i, j)) = best else {
            return Err(FamilyError::Unsupported("base eigensymbols are linearly dependent".into()));
        };
        chosen.push(i);
        let (_, unit) = z.split(work[j][i]);
        let uinv = z.inv(unit).expect("unit part");
        let pivot = std::mem::take(&mut work[j]);
        for col in work.iter_mut().filter(|c| !c.is_empty()) {
            let f = z.mul(z.div_p_pow(col[i], v), uinv);
            for (x, y) in col.iter_mut().zip(&pivot) {
                *x = z.sub(*x, z.mul(f, *y));
            }
        }
    }
    Ok(chosen)
}

/// Lifts the single-weight eigensymbols `base` (with `U_p` eigenvalues `eigenvalues`) to a basis
/// of family symbols over the truncated affinoid together with the matrix of `U_p` on it.
///
/// At each monomial `nu` the unknowns `B_nu` and `C_nu` satisfy the relations, the plus
/// condition, `U_0 B_nu - B_nu C_0 - B_0 C_nu = R_nu` with `R_nu` coming from lower degrees, and
/// vanish on a fixed set of coordinates where `B_0` is invertible.
pub fn family_eigen_lift(
    module: &FamilyModule,
    base: &[Symbol<Moments>],
    eigenvalues: &[PadicNumber],
) -> Result<FamilyEigenReport, FamilyError> {
    let r = base.len();
    if r == 0 || eigenvalues.len() != r {
        return Err(FamilyError::Unsupported("need one eigenvalue per base symbol".into()));
    }
    let (p, mm) = (module.p, module.m as usize);
    let z = module.z();
    let manin = base[0].manin.clone();
    let nf = manin.num_free();
    let single = Moments { p, lambda: module.base, m: module.m };
    for b in base {
        if b.module != single {
            return Err(FamilyError::Unsupported("base symbols must match the family truncation and weight".into()));
        }
    }
    let ops = base_operators(&manin, single)?;
    let n = ops.n;
    let v0: Vec<Vec<u64>> = base.iter().map(|b| flatten(&b.values)).collect();
    let alphas: Vec<u64> = eigenvalues.iter().map(|a| a.lift_precision(module.m as i64).to_residue(&z)).collect::<Result<_, _>>()?;
    let sel = pivot_rows(&z, &v0)?;
    let row_prec = |row: usize| module.moment_precision(row % mm);
    let nrel_rows = ops.a0.rows;

    // one system per column a: unknowns (B_nu[:, a], C_nu[:, a])
    let systems: Vec<Smith> = (0..r)
        .map(|a| {
            let rows = nrel_rows + 2 * n + r;
            let mut s = ZMat::zeros(rows, n + r);
            let mut prec = Vec::with_capacity(rows);
            for i in 0..nrel_rows {
                for c in 0..n {
                    s.set(i, c, ops.a0.get(i, c));
                }
                prec.push(module.moment_precision(i % mm));
            }
            for i in 0..n {
                let row = nrel_rows + i;
                for c in 0..n {
                    let d = if i == c { alphas[a] } else { 0 };
                    s.set(row, c, z.sub(ops.u0.get(i, c), d));
                }
                for (b, col) in v0.iter().enumerate() {
                    s.set(row, n + b, z.neg(col[i]));
                }
                prec.push(row_prec(i));
            }
            for i in 0..n {
                let row = nrel_rows + n + i;
                for c in 0..n {
                    let d = if i == c { 1 } else { 0 };
                    s.set(row, c, z.sub(ops.i0.get(i, c), d));
                }
                prec.push(row_prec(i));
            }
            for (j, &i) in sel.iter().enumerate() {
                s.set(nrel_rows + 2 * n + j, i, 1);
                prec.push(module.m);
            }
            (smith(&z, &scale_rows(&z, &s, &prec), true), prec)
        })
        .map(|(s, prec)| {
            debug_assert_eq!(prec.len(), nrel_rows + 2 * n + r);
            s
        })
        .collect();
    let all_prec: Vec<u32> = (0..nrel_rows)
        .map(|i| module.moment_precision(i % mm))
        .chain((0..2 * n).map(|i| row_prec(i % n)))
        .chain(std::iter::repeat_n(module.m, r))
        .collect();

    let ring = &module.ring;
    let len = ring.len();
    let mons = monomials(module.degree());
    let mut basis: Vec<FamilySymbol> =
        base.iter().map(|b| Symbol::new(manin.clone(), module.clone(), b.values.iter().map(|v| module.constant(v)).collect())).collect();
    // c[b][a] as a residue series
    let mut c: Vec<Vec<Vec<u64>>> =
        (0..r).map(|b| (0..r).map(|a| if a == b { ring.constant(alphas[a]) } else { ring.zero() }).collect()).collect();
    for t in 1..=module.degree() {
        let targets: Vec<usize> = (0..len).filter(|&i| mons[i][0] + mons[i][1] == t).collect();
        let images: Vec<_> = basis.iter().map(|b| (b.relation_values(), b.u_p(p), b.iota())).collect();
        let mut updates = Vec::new();
        for a in 0..r {
            let (rel, up, io) = &images[a];
            for &nu in &targets {
                let mut rhs = Vec::with_capacity(all_prec.len());
                rhs.extend(rel.iter().flat_map(|v| v.iter().map(|s| z.neg(s[nu]))));
                for f in 0..nf {
                    for k in 0..mm {
                        let mut x = z.neg(up.values[f][k][nu]);
                        for (mu, e) in mons.iter().enumerate() {
                            let deg = e[0] + e[1];
                            if deg == 0 || deg >= t || e[0] > mons[nu][0] || e[1] > mons[nu][1] {
                                continue;
                            }
                            let diff = monomial_index(module.degree(), [mons[nu][0] - e[0], mons[nu][1] - e[1]]).expect("in range");
                            for (b, bb) in basis.iter().enumerate() {
                                x = z.add(x, z.mul(bb.values[f][k][mu], c[b][a][diff]));
                            }
                        }
                        rhs.push(x);
                    }
                }
                rhs.extend(io.values.iter().flat_map(|v| v.iter().map(|s| z.neg(s[nu]))));
                rhs.extend(std::iter::repeat_n(0, r));
                let scaled: Vec<u64> = rhs.iter().zip(&all_prec).map(|(&x, &rp)| z.mul(x, z.p_pow(module.m - rp))).collect();
                let (sol, _) = solve_with_smith(&z, &systems[a], &scaled).map_err(|_| EvalError::Inconsistent(module.m))?;
                updates.push((a, nu, sol));
            }
        }
        for (a, nu, sol) in updates {
            for f in 0..nf {
                for k in 0..mm {
                    basis[a].values[f][k][nu] = sol[f * mm + k];
                }
            }
            for b in 0..r {
                c[b][a][nu] = sol[n + b];
            }
        }
    }
    let basis: Vec<FamilySymbol> = basis.into_iter().map(|b| Symbol { values: b.values.iter().map(|v| module.canonical(v)).collect(), ..b }).collect();
    let mut eigen_digits = i64::MAX;
    let mut relation_digits = i64::MAX;
    for (a, b) in basis.iter().enumerate() {
        let up = b.u_p(p);
        let bc = (0..r).fold(Symbol::zero(manin.clone(), module.clone()), |acc, j| {
            let scaled = Symbol { values: basis[j].values.iter().map(|v| v.iter().map(|s| ring.mul(s, &c[j][a])).collect()).collect(), ..acc.clone() };
            acc.add(&scaled)
        });
        eigen_digits = eigen_digits.min(family_digits(module, &up.sub(&bc).values));
        relation_digits = relation_digits.min(family_digits(module, &b.relation_values()));
    }
    let prec = module.moment_precision(0) as i64;
    let up = c.iter().map(|row| row.iter().map(|s| TruncatedAffinoid::from_residues(&z, module.degree(), s, prec)).collect()).collect();
    Ok(FamilyEigenReport { basis, up, eigen_digits, relation_digits })
}
