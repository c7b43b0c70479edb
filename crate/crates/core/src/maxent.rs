//! Maximum-entropy distribution under the linear constraints of a knowledge
//! base, and the precision report comparing it with entailed intervals.
//!
//! The exact preprocessing (feasibility, worlds forced to zero, implicit
//! equalities) runs on the rational LP. The entropy problem itself is solved
//! in floating point through its dual: `x_i ∝ exp(λ·a_i)`, minimising
//! `log Σ exp(λ·a_i)` over `λ` with sign constraints on inequality rows, by
//! projected gradient descent with backtracking, then a Newton polish on the
//! active rows.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::entail::{EntailError, LinearEntailment, QueryResult, RatioOutcome, SolveStats};
use crate::kb::{KnowledgeBase, Query, Relation};
use crate::logic::WorldSpace;
use crate::rational::{to_f64, Rational};
use crate::simplex::Sense;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntOptions {
    /// Stop once the KKT residual falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MaxEntOptions {
    fn default() -> Self {
        MaxEntOptions { tolerance: 1e-8, max_iterations: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntSolution {
    /// Probability of each world, in world-space order.
    pub distribution: Vec<f64>,
    /// Natural-log entropy.
    pub entropy: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// False if the iteration cap stopped the solver first.
    pub converged: bool,
}

impl MaxEntSolution {
    pub fn probability(&self, ext: &BTreeSet<usize>) -> f64 {
        ext.iter().map(|&i| self.distribution[i]).sum()
    }

    /// `p(numer | denom)`; `None` when the antecedent has probability zero.
    pub fn conditional(&self, numer: &BTreeSet<usize>, denom: &BTreeSet<usize>) -> Option<f64> {
        let d = self.probability(denom);
        if d <= 0.0 {
            return None;
        }
        let n: f64 = numer.intersection(denom).map(|&i| self.distribution[i]).sum();
        Some((n / d).clamp(0.0, 1.0))
    }
}

pub fn entropy(distribution: &[f64]) -> f64 {
    -distribution.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

/// Dual problem over the worlds that can carry mass.
struct Dual {
    /// Row-major: `rows[j][k]` is the coefficient of support world `k`.
    rows: Vec<Vec<f64>>,
    /// True for rows that must hold with equality (free multiplier).
    equality: Vec<bool>,
    support: Vec<usize>,
}

impl Dual {
    fn primal(&self, lambda: &[f64]) -> (f64, Vec<f64>) {
        let n = self.support.len();
        let mut s = vec![0.0; n];
        for (row, l) in self.rows.iter().zip(lambda) {
            if *l != 0.0 {
                for (sk, a) in s.iter_mut().zip(row) {
                    *sk += l * a;
                }
            }
        }
        let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for v in s.iter_mut() {
            *v = (*v - m).exp();
            z += *v;
        }
        for v in s.iter_mut() {
            *v /= z;
        }
        (m + z.ln(), s)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().zip(x).map(|(a, p)| a * p).sum()).collect()
    }

    fn project(&self, lambda: &mut [f64]) {
        for (l, eq) in lambda.iter_mut().zip(&self.equality) {
            if !eq && *l < 0.0 {
                *l = 0.0;
            }
        }
    }

    fn residual(&self, lambda: &[f64], g: &[f64]) -> f64 {
        lambda
            .iter()
            .zip(g)
            .zip(&self.equality)
            .map(|((l, g), eq)| if *eq { g.abs() } else { l.min(*g).abs() })
            .fold(0.0, f64::max)
    }

    /// Projected gradient with Barzilai-Borwein steps and Armijo backtracking.
    fn descend(&self, lambda: &mut Vec<f64>, opts: &MaxEntOptions) -> (usize, f64) {
        let (mut f, x0) = self.primal(lambda);
        let mut g = self.gradient(&x0);
        let mut step = 1.0;
        let mut res = self.residual(lambda, &g);
        let mut it = 0;
        while res >= opts.tolerance && it < opts.max_iterations {
            it += 1;
            let mut accepted = None;
            let mut alpha = step;
            for _ in 0..60 {
                let mut trial: Vec<f64> = lambda.iter().zip(&g).map(|(l, g)| l - alpha * g).collect();
                self.project(&mut trial);
                let decrease: f64 = trial.iter().zip(lambda.iter()).zip(&g).map(|((t, l), g)| g * (t - l)).sum();
                let (ft, xt) = self.primal(&trial);
                if ft <= f + 1e-4 * decrease || decrease.abs() < 1e-300 {
                    accepted = Some((trial, ft, xt));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((next, fn_, xn)) = accepted else { break };
            let gn = self.gradient(&xn);
            let s: Vec<f64> = next.iter().zip(lambda.iter()).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            step = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e10) } else { (alpha * 2.0).min(1e10) };
            *lambda = next;
            f = fn_;
            g = gn;
            res = self.residual(lambda, &g);
        }
        (it, res)
    }

    /// Newton steps on the active rows, keeping projected feasibility.
    fn polish(&self, lambda: &mut [f64], mut res: f64) -> f64 {
        for _ in 0..100 {
            if res < 1e-14 {
                break;
            }
            let (_, x) = self.primal(lambda);
            let g = self.gradient(&x);
            let active: Vec<usize> = (0..self.rows.len()).filter(|&j| self.equality[j] || lambda[j] > 0.0).collect();
            if active.is_empty() {
                break;
            }
            // Hessian of log Z: covariance of the active rows under x.
            let k = active.len();
            let mut h = vec![vec![0.0; k]; k];
            for (p, &a) in active.iter().enumerate() {
                for (q, &b) in active.iter().enumerate().skip(p) {
                    let exy: f64 = x.iter().enumerate().map(|(i, xi)| xi * self.rows[a][i] * self.rows[b][i]).sum();
                    let v = exy - g[a] * g[b];
                    h[p][q] = v;
                    h[q][p] = v;
                }
            }
            let trace: f64 = (0..k).map(|i| h[i][i]).sum();
            for (i, row) in h.iter_mut().enumerate() {
                row[i] += 1e-13 * trace.max(1e-300);
            }
            let rhs: Vec<f64> = active.iter().map(|&j| -g[j]).collect();
            let Some(d) = solve_dense(h, rhs) else { break };
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let mut trial = lambda.to_vec();
                for (p, &j) in active.iter().enumerate() {
                    trial[j] += t * d[p];
                }
                self.project(&mut trial);
                let (_, xt) = self.primal(&trial);
                let rt = self.residual(&trial, &self.gradient(&xt));
                if rt < res {
                    lambda.copy_from_slice(&trial);
                    res = rt;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        res
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Canonical sign for an equality row, so `a = 0` and `−a = 0` coincide.
fn canonical(row: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
    let flip = row.values().next().is_some_and(Signed::is_negative);
    row.iter().map(|(&i, v)| (i, if flip { -v.clone() } else { v.clone() })).collect()
}

pub fn solve_maxent(kb: &KnowledgeBase, ws: &WorldSpace, opts: &MaxEntOptions) -> Result<MaxEntSolution, EntailError> {
    let lin = LinearEntailment::new(kb, ws)?;
    let system = lin.system();
    let mut stats = SolveStats::default();
    if !system.is_feasible(&mut stats) {
        return Err(EntailError::InfeasibleKb);
    }

    // Worlds some feasible distribution can put mass on.
    let mut positive = vec![false; ws.len()];
    for i in 0..ws.len() {
        if positive[i] {
            continue;
        }
        let target: BTreeSet<usize> = [i].into_iter().collect();
        if let RatioOutcome::Optimal { value, x } = system.optimize(&target, None, Sense::Maximize, &mut stats) {
            if value.is_positive() {
                for (j, v) in x.iter().enumerate().take(ws.len()) {
                    positive[j] |= v.is_positive();
                }
            }
        }
    }
    let support: Vec<usize> = (0..ws.len()).filter(|&i| positive[i]).collect();

    // Every row as `a·x >= 0` or `a·x = 0`; inequalities that cannot be
    // strict are equalities.
    let mut eq_rows: BTreeSet<BTreeMap<usize, Rational>> = BTreeSet::new();
    let mut ge_rows: Vec<BTreeMap<usize, Rational>> = Vec::new();
    for c in lin.constraints() {
        debug_assert!(c.rhs.is_zero());
        let row: BTreeMap<usize, Rational> = match c.relation {
            Relation::Ge | Relation::Eq => c.coefficients.clone(),
            Relation::Le => c.coefficients.iter().map(|(&i, v)| (i, -v.clone())).collect(),
        };
        if c.relation == Relation::Eq {
            eq_rows.insert(canonical(&row));
            continue;
        }
        let pos: BTreeSet<usize> = row.iter().filter(|(_, v)| v.is_positive()).map(|(&i, _)| i).collect();
        let strict = pos.iter().any(|&i| positive[i])
            && system.maximize_linear(&row, &mut stats).is_some_and(|v| v.is_positive());
        if strict {
            ge_rows.push(row);
        } else {
            eq_rows.insert(canonical(&row));
        }
    }

    let column: BTreeMap<usize, usize> = support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let dense = |row: &BTreeMap<usize, Rational>| -> Option<Vec<f64>> {
        let mut v = vec![0.0; support.len()];
        for (i, a) in row {
            if let Some(&k) = column.get(i) {
                v[k] = to_f64(a);
            }
        }
        let scale = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        (scale > 0.0).then(|| v.into_iter().map(|a| a / scale).collect())
    };
    let mut rows = Vec::new();
    let mut equality = Vec::new();
    for r in &eq_rows {
        if let Some(v) = dense(r) {
            rows.push(v);
            equality.push(true);
        }
    }
    for r in &ge_rows {
        if let Some(v) = dense(r) {
            rows.push(v);
            equality.push(false);
        }
    }
    let dual = Dual { rows, equality, support };
    let mut lambda = vec![0.0; dual.rows.len()];
    let (iterations, res) = dual.descend(&mut lambda, opts);
    let res = dual.polish(&mut lambda, res);
    let (_, x) = dual.primal(&lambda);
    let mut distribution = vec![0.0; ws.len()];
    for (k, &i) in dual.support.iter().enumerate() {
        distribution[i] = x[k];
    }
    Ok(MaxEntSolution {
        entropy: entropy(&distribution),
        distribution,
        kkt_residual: res,
        iterations,
        converged: res < opts.tolerance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// The entailed interval is a single point.
    PinnedByK,
    PartiallyDetermined,
    /// The entailed interval is `[0, 1]`.
    FullyUnderdetermined,
}

impl Precision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Precision::PinnedByK => "pinned",
            Precision::PartiallyDetermined => "partial",
            Precision::FullyUnderdetermined => "underdetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionEntry {
    pub query: Query,
    pub entailed: QueryResult,
    /// `None` when the maximum-entropy distribution gives the antecedent zero mass.
    pub maxent: Option<f64>,
    pub precision: Precision,
}

pub fn classify(result: &QueryResult) -> Precision {
    match &result.interval {
        Some(iv) if iv.is_point() => Precision::PinnedByK,
        Some(iv) if !iv.is_vacuous() => Precision::PartiallyDetermined,
        _ => Precision::FullyUnderdetermined,
    }
}

/// Entailed interval, maximum-entropy point and classification per query.
pub fn precision_report(
    kb: &KnowledgeBase,
    ws: &WorldSpace,
    queries: &[Query],
    opts: &MaxEntOptions,
) -> Result<(MaxEntSolution, Vec<PrecisionEntry>), EntailError> {
    let sol = solve_maxent(kb, ws, opts)?;
    let lin = LinearEntailment::new(kb, ws)?;
    let mut entries = Vec::with_capacity(queries.len());
    for q in queries {
        let entailed = lin.entail_query(q)?;
        let numer = ws.extension(&q.target)?;
        let denom = ws.extension(&q.given)?;
        entries.push(PrecisionEntry {
            query: q.clone(),
            maxent: sol.conditional(&numer, &denom),
            precision: classify(&entailed),
            entailed,
        });
    }
    Ok((sol, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::logic::{parse_sentence, DEFAULT_ATOM_CAP};

    fn solve(text: &str) -> (KnowledgeBase, WorldSpace, MaxEntSolution) {
        let kb = parse_kb(text).unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let sol = solve_maxent(&kb, &ws, &MaxEntOptions::default()).unwrap();
        (kb, ws, sol)
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn unconstrained_is_uniform() {
        let (_, _, sol) = solve("atom A B");
        assert_eq!(sol.distribution, vec![0.25; 4]);
        assert!((sol.entropy - 4f64.ln()).abs() < 1e-12);
        assert!(sol.converged);
    }

    #[test]
    fn pinned_examples() {
        // worlds in order ¬A, A
        let (_, _, sol) = solve("atom A\nP(A) = 0.3");
        assert!(close(&sol.distribution, &[0.7, 0.3]), "{:?}", sol.distribution);
        // worlds ¬A¬B, ¬AB, A¬B, AB
        let (_, _, sol) = solve("atom A B\nP(A) = 0.3");
        assert!(close(&sol.distribution, &[0.35, 0.35, 0.15, 0.15]), "{:?}", sol.distribution);
        let (_, _, sol) = solve("atom A B\nP(A) = 0.7\nP(A -> B) = 0.8");
        assert!(close(&sol.distribution, &[0.15, 0.15, 0.2, 0.5]), "{:?}", sol.distribution);
    }

    #[test]
    fn inequalities_active_and_inactive() {
        let (_, _, sol) = solve("atom A B\nP(A) >= 0.8");
        assert!(close(&sol.distribution, &[0.1, 0.1, 0.4, 0.4]), "{:?}", sol.distribution);
        let (_, _, sol) = solve("atom A B\nP(A) <= 0.8");
        assert!(close(&sol.distribution, &[0.25; 4]), "{:?}", sol.distribution);
        let (_, _, sol) = solve("atom A B\n0.6 <= P(B | A) <= 0.9\nP(A) >= 0.7");
        assert!(sol.converged);
    }

    #[test]
    fn forced_zeros_are_eliminated() {
        let (_, _, sol) = solve("atom A B\nP(A) = 1\nP(B | A) >= 0.75");
        assert_eq!(sol.distribution[0], 0.0);
        assert_eq!(sol.distribution[1], 0.0);
        assert!(close(&sol.distribution, &[0.0, 0.0, 0.25, 0.75]), "{:?}", sol.distribution);
        assert!(sol.converged);
    }

    #[test]
    fn infeasible_rejected() {
        let kb = parse_kb("atom A\nP(A) >= 0.6\nP(A) <= 0.4").unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(solve_maxent(&kb, &ws, &MaxEntOptions::default()).unwrap_err(), EntailError::InfeasibleKb);
    }

    #[test]
    fn precision_examples() {
        let q = |t: &str| Query::unconditional(parse_sentence(t).unwrap());
        let kb = parse_kb("atom A\nP(A) = 0.3").unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let (_, r) = precision_report(&kb, &ws, &[q("A")], &MaxEntOptions::default()).unwrap();
        assert_eq!(r[0].precision, Precision::PinnedByK);
        assert!((r[0].maxent.unwrap() - 0.3).abs() < 1e-9);

        let kb = parse_kb("atom A B\nP(A) = 0.3").unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let (_, r) = precision_report(&kb, &ws, &[q("B")], &MaxEntOptions::default()).unwrap();
        assert_eq!(r[0].precision, Precision::FullyUnderdetermined);
        assert!((r[0].maxent.unwrap() - 0.5).abs() < 1e-9);

        let kb = parse_kb("atom A B\nP(A) = 0.7\nP(A -> B) = 0.8").unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let (_, r) = precision_report(&kb, &ws, &[q("B")], &MaxEntOptions::default()).unwrap();
        assert_eq!(r[0].precision, Precision::PartiallyDetermined);
        let v = r[0].maxent.unwrap();
        assert!((v - 0.65).abs() < 1e-9);
        assert!(r[0].entailed.interval.as_ref().unwrap().contains(&crate::rational::ratio(13, 20)));

        let kb = parse_kb("atom A B\nP(B) = 0").unwrap();
        let ws = kb.world_space(DEFAULT_ATOM_CAP).unwrap();
        let cond = Query { target: parse_sentence("A").unwrap(), given: parse_sentence("B").unwrap() };
        let (_, r) = precision_report(&kb, &ws, &[cond], &MaxEntOptions::default()).unwrap();
        assert_eq!(r[0].maxent, None);
        assert_eq!(r[0].precision, Precision::FullyUnderdetermined);
    }
}
