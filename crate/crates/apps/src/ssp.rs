//! Stochastic shortest path with two actions per node, posed as
//! `min_x sum_i |min_k (<u_i^k, x> + v_i^k - x_i)|`.

use rand::Rng;
use rsplit::{LinearOperator, LsSolvePolicy, Matrix, QuadraticRegularizer, RelaxedProblem, SeparableNonsmooth, Vector};

use crate::{seeded, AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SspInstance {
    pub u: [Matrix; 2],
    pub c: [Matrix; 2],
    pub target: usize,
}

/// Action index per node, `1` or `2`.
pub type Policy = Vec<u8>;

impl SspInstance {
    /// Checks row-stochasticity, nonnegative costs and the absorbing target.
    pub fn new(u: [Matrix; 2], c: [Matrix; 2], target: usize) -> Result<Self> {
        let n = u[0].nrows();
        if n == 0 || target >= n {
            return Err(AppError::Invalid(format!("target {target} outside 0..{n}")));
        }
        for k in 0..2 {
            for m in [&u[k], &c[k]] {
                if m.shape() != (n, n) {
                    return Err(AppError::Invalid(format!("graph {} matrices must be {n}x{n}", k + 1)));
                }
            }
            if u[k].iter().chain(c[k].iter()).any(|&v| !(v.is_finite() && v >= 0.0)) {
                return Err(AppError::Invalid(format!("graph {} has negative or non-finite entries", k + 1)));
            }
            for i in 0..n {
                let s: f64 = u[k].row(i).sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(AppError::Invalid(format!("graph {} row {i} sums to {s}", k + 1)));
                }
            }
            if u[k][(target, target)] != 1.0 || c[k][(target, target)] != 0.0 {
                return Err(AppError::Invalid("target must be absorbing with zero cost".into()));
            }
        }
        Ok(Self { u, c, target })
    }

    pub fn n(&self) -> usize {
        self.u[0].nrows()
    }

    /// `v_i^k = <u_i^k, c_i^k>`, the expected one-step cost.
    pub fn offsets(&self, k: usize) -> Vector {
        Vector::from_fn(self.n(), |i, _| self.u[k].row(i).dot(&self.c[k].row(i)))
    }

    /// `q^k = U^k x + v^k`.
    pub fn q_values(&self, x: &Vector, k: usize) -> Vector {
        &self.u[k] * x + self.offsets(k)
    }

    /// `max_i |x_i - min_k q_i^k(x)|`.
    pub fn bellman_residual(&self, x: &Vector) -> f64 {
        let (q1, q2) = (self.q_values(x, 0), self.q_values(x, 1));
        (0..self.n()).map(|i| (x[i] - q1[i].min(q2[i])).abs()).fold(0.0, f64::max)
    }

    /// Original nonconvex objective `sum_i |min_k q_i^k - x_i|`.
    pub fn objective(&self, x: &Vector) -> f64 {
        let (q1, q2) = (self.q_values(x, 0), self.q_values(x, 1));
        (0..self.n()).map(|i| (q1[i].min(q2[i]) - x[i]).abs()).sum()
    }
}

/// Random proper instance on `n` nodes with target `n - 1`. Every node
/// `i < n - 1` has the chain edge `i -> i + 1` in graph 1; both graphs add
/// `extra` random successors per node. Transitions are uniform over
/// successors and edge costs uniform in `[0.1, 1]`.
pub fn generate_ssp(n: usize, extra: usize, seed: u64) -> Result<SspInstance> {
    if n < 2 {
        return Err(AppError::Invalid("need at least two nodes".into()));
    }
    let mut r = seeded(seed);
    let t = n - 1;
    let mut u = [Matrix::zeros(n, n), Matrix::zeros(n, n)];
    let mut c = [Matrix::zeros(n, n), Matrix::zeros(n, n)];
    for k in 0..2 {
        for i in 0..t {
            let mut succ = Vec::new();
            if k == 0 {
                succ.push(i + 1);
            }
            while succ.len() < extra + usize::from(k == 0) {
                let j = r.random_range(0..n);
                if j != i && !succ.contains(&j) {
                    succ.push(j);
                }
                if succ.len() >= n - 1 {
                    break;
                }
            }
            if succ.is_empty() {
                succ.push(t);
            }
            let p = 1.0 / succ.len() as f64;
            let mut placed = 0.0;
            for (s, &j) in succ.iter().enumerate() {
                // last entry absorbs rounding so rows sum to one exactly
                let pj = if s + 1 == succ.len() { 1.0 - placed } else { p };
                placed += pj;
                u[k][(i, j)] = pj;
                c[k][(i, j)] = r.random_range(0.1..=1.0);
            }
        }
        u[k][(t, t)] = 1.0;
    }
    SspInstance::new(u, c, t)
}

/// `A = [U^1 - I; U^2 - I]`, `h(w) = sum_i |min(w_i^1 + v_i^1, w_i^2 + v_i^2)|`,
/// `g = 0`. Both blocks annihilate constants, so the least-squares step
/// takes the minimum-norm solution.
pub fn ssp_setup(inst: &SspInstance, nu: f64) -> Result<RelaxedProblem> {
    let n = inst.n();
    let eye = Matrix::identity(n, n);
    let op = LinearOperator::stack(vec![
        LinearOperator::dense(&inst.u[0] - &eye),
        LinearOperator::dense(&inst.u[1] - &eye),
    ])?;
    let h = SeparableNonsmooth::stacked_pairs(inst.offsets(0).as_slice(), inst.offsets(1).as_slice(), 1.0)?;
    Ok(RelaxedProblem::new(h, op, QuadraticRegularizer::Zero, nu, LsSolvePolicy::default())?)
}

/// Shifts `x` so the target has cost zero.
pub fn normalize_at_target(x: &Vector, inst: &SspInstance) -> Vector {
    x.add_scalar(-x[inst.target])
}

/// Greedy action per node, ties to action 1.
pub fn extract_policy(x: &Vector, inst: &SspInstance) -> Policy {
    let (q1, q2) = (inst.q_values(x, 0), inst.q_values(x, 1));
    (0..inst.n()).map(|i| if q2[i] < q1[i] { 2 } else { 1 }).collect()
}

pub const VALUE_ITERATION_CAP: usize = 1_000_000;

/// `x <- min_k (U^k x + v^k)` from zero until the sup-norm change is at most
/// `tol`.
pub fn value_iteration(inst: &SspInstance, tol: f64) -> Result<Vector> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(AppError::Invalid(format!("tolerance {tol}")));
    }
    let (v1, v2) = (inst.offsets(0), inst.offsets(1));
    let mut x = Vector::zeros(inst.n());
    for _ in 0..VALUE_ITERATION_CAP {
        let q1 = &inst.u[0] * &x + &v1;
        let q2 = &inst.u[1] * &x + &v2;
        let next = q1.zip_map(&q2, f64::min);
        let change = (&next - &x).amax();
        x = next;
        if !change.is_finite() {
            break;
        }
        if change <= tol {
            return Ok(x);
        }
    }
    Err(AppError::NoConvergence { what: "value iteration", iters: VALUE_ITERATION_CAP })
}

/// Expected cost of a stationary policy: solves `(I - U_pi) x = v_pi` with
/// `x_target = 0`. Fails when the policy never reaches the target.
pub fn policy_evaluation(inst: &SspInstance, policy: &[u8]) -> Result<Vector> {
    let n = inst.n();
    if policy.len() != n || policy.iter().any(|&a| a != 1 && a != 2) {
        return Err(AppError::Invalid("policy must list action 1 or 2 for every node".into()));
    }
    let offs = [inst.offsets(0), inst.offsets(1)];
    let idx: Vec<usize> = (0..n).filter(|&i| i != inst.target).collect();
    let mut m = Matrix::zeros(idx.len(), idx.len());
    let mut rhs = Vector::zeros(idx.len());
    for (r, &i) in idx.iter().enumerate() {
        let k = usize::from(policy[i] - 1);
        rhs[r] = offs[k][i];
        for (s, &j) in idx.iter().enumerate() {
            m[(r, s)] = f64::from(u8::from(i == j)) - inst.u[k][(i, j)];
        }
    }
    let sol = m.lu().solve(&rhs).ok_or_else(|| AppError::Invalid("policy is improper".into()))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(AppError::Invalid("policy is improper".into()));
    }
    let mut x = Vector::zeros(n);
    for (r, &i) in idx.iter().enumerate() {
        x[i] = sol[r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(cost: f64) -> SspInstance {
        let u = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]);
        let c = Matrix::from_row_slice(2, 2, &[0.0, cost, 0.0, 0.0]);
        SspInstance::new([u.clone(), u], [c.clone(), c], 1).unwrap()
    }

    #[test]
    fn deterministic_chain() {
        let inst = chain(2.5);
        let x = value_iteration(&inst, 1e-12).unwrap();
        assert_eq!(x, Vector::from_vec(vec![2.5, 0.0]));
        assert_eq!(extract_policy(&x, &inst), vec![1, 1]);
        let p = ssp_setup(&inst, 1.0).unwrap();
        let w = p.op().apply(&x).unwrap();
        assert!(p.objective(&w, &x).unwrap().abs() < 1e-14);
    }

    #[test]
    fn absorbing_only_instance_is_zero() {
        let u = Matrix::identity(1, 1);
        let c = Matrix::zeros(1, 1);
        let inst = SspInstance::new([u.clone(), u], [c.clone(), c], 0).unwrap();
        assert_eq!(value_iteration(&inst, 1e-9).unwrap(), Vector::zeros(1));
    }

    #[test]
    fn generated_instances_are_valid_and_reproducible() {
        let a = generate_ssp(25, 2, 4).unwrap();
        assert_eq!(a, generate_ssp(25, 2, 4).unwrap());
        let x = value_iteration(&a, 1e-12).unwrap();
        assert!(a.bellman_residual(&x) <= 1e-11);
        assert_eq!(x[a.target], 0.0);
    }

    #[test]
    fn dominated_graph_never_chosen() {
        let mut inst = generate_ssp(10, 2, 1).unwrap();
        inst.u[1] = inst.u[0].clone();
        inst.c[1] = inst.c[0].map(|v| v * 2.0);
        inst.c[1][(inst.target, inst.target)] = 0.0;
        let x = value_iteration(&inst, 1e-12).unwrap();
        assert!(extract_policy(&x, &inst).iter().all(|&a| a == 1));
        let same = SspInstance::new([inst.u[0].clone(), inst.u[0].clone()], [inst.c[0].clone(), inst.c[0].clone()], inst.target)
            .unwrap();
        assert!(extract_policy(&x, &same).iter().all(|&a| a == 1));
    }

    #[test]
    fn policy_evaluation_reproduces_value() {
        let inst = generate_ssp(25, 2, 11).unwrap();
        let x = value_iteration(&inst, 1e-13).unwrap();
        let pol = extract_policy(&x, &inst);
        let xe = policy_evaluation(&inst, &pol).unwrap();
        assert!((xe - x).amax() < 1e-6);
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let u = Matrix::from_row_slice(2, 2, &[0.5, 0.4, 0.0, 1.0]);
        let c = Matrix::zeros(2, 2);
        assert!(SspInstance::new([u.clone(), u], [c.clone(), c], 1).is_err());
    }
}
