//! The Gaussian rate region: edge capacities under a power allocation and
//! membership by maximizing the worst cut slack over the power polytope.
//!
//! For an allocation `S`, each cut `T` has slack
//! `Σ_{e leaving T} ½·log2(1 + S_e/σ²_e)  −  Σ_{i in T} R_i`, and a rate
//! tuple is in the region iff some feasible allocation keeps every slack
//! nonnegative — iff the max-min slack is `≥ 0`. The objective is a
//! minimum of concave functions: concave, but flat along single
//! coordinates wherever the binding cut does not cross that edge, which
//! stalls coordinate ascent far from the optimum. The search is therefore
//! a central-cut ellipsoid method: feasibility cuts while the center is
//! outside the polytope, supergradient cuts of the worst cut otherwise.
//! Each supergradient step also yields a proven upper bound
//! `f(c) + √(gᵀQg)` on the optimum, so the run ends with a certified
//! sandwich around the max-min slack, and an outside verdict is a
//! certificate rather than a failed search.

use std::f64::consts::LN_2;

use super::cuts::{enumerate_cuts, Cut, RateTuple};
use super::InfoError;
use crate::net::{all_edges, EdgeId, Network, NetworkKind};
use crate::tol;

/// `½·log2(1 + s/σ²)`, the capacity in bits of one Gaussian edge under
/// power `s`; negative power is treated as zero. `sigma2` must be
/// positive (stored channels are validated).
pub fn awgn_capacity(s: f64, sigma2: f64) -> f64 {
    0.5 * (1.0 + s.max(0.0) / sigma2).log2()
}

/// Transmit power per edge, indexed canonically; entries are finite and
/// nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    n: usize,
    s: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(n: usize, s: Vec<f64>) -> Result<Self, InfoError> {
        if s.len() != n * n {
            return Err(InfoError::AllocLen {
                got: s.len(),
                want: n * n,
            });
        }
        for e in all_edges(n) {
            let v = s[e.index(n)];
            if !v.is_finite() || v < 0.0 {
                return Err(InfoError::BadAlloc(e));
            }
        }
        Ok(PowerAllocation { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.s[e.index(self.n)]
    }

    pub fn entries(&self) -> &[f64] {
        &self.s
    }
}

#[derive(Debug, Clone)]
pub struct AwgnSearchParams {
    /// Iteration cap; `None` derives a generous schedule from the search
    /// dimension and the starting radius.
    pub max_iters: Option<usize>,
    /// Certification gap that ends the run as converged.
    pub gap: f64,
}

impl Default for AwgnSearchParams {
    fn default() -> Self {
        AwgnSearchParams {
            max_iters: None,
            gap: tol::AWGN_GAP_TOL,
        }
    }
}

/// Outcome of the max-min-slack search.
#[derive(Debug, Clone)]
pub struct SlackSearch {
    /// Best allocation found, feasible for the power constraints.
    pub alloc: PowerAllocation,
    /// Worst-cut slack achieved by `alloc` — a lower bound on the optimum.
    pub slack: f64,
    /// Proven upper bound on the worst-cut slack of any feasible
    /// allocation.
    pub upper: f64,
    /// `upper - slack` came within the requested gap.
    pub converged: bool,
    pub iterations: usize,
}

/// Maximizes the minimum cut slack over feasible power allocations.
pub fn maximize_min_slack(
    net: &Network,
    rates: &RateTuple,
    params: &AwgnSearchParams,
) -> Result<SlackSearch, InfoError> {
    let n = net.n();
    if net.kind() != NetworkKind::Awgn {
        return Err(InfoError::NotGaussian);
    }
    if rates.len() != n {
        return Err(InfoError::RateLen {
            got: rates.len(),
            want: n,
        });
    }
    let power = net.power().expect("gaussian networks carry power constraints");
    let cuts = enumerate_cuts(n, net.demand())?;

    let done = |s: Vec<f64>, slack: f64, upper: f64, converged: bool, iterations: usize| {
        Ok(SlackSearch {
            alloc: PowerAllocation::new(n, s).expect("search keeps allocations valid"),
            slack,
            upper,
            converged,
            iterations,
        })
    };

    if cuts.is_empty() {
        // Nothing separates the demand; every rate tuple fits.
        return done(vec![0.0; n * n], f64::INFINITY, f64::INFINITY, true, 0);
    }

    // The most an edge can ever draw; edges crossing no cut stay at zero.
    let mut eff = vec![0.0; n * n];
    for e in all_edges(n) {
        if cuts.iter().any(|t| t.crosses(e)) {
            eff[e.index(n)] = power
                .edge_cap(e, n)
                .min(power.node_cap(e.from))
                .min(power.total());
        }
    }
    let relevant: Vec<EdgeId> = all_edges(n).filter(|e| eff[e.index(n)] > 0.0).collect();
    let d = relevant.len();
    let caps: Vec<f64> = relevant.iter().map(|e| eff[e.index(n)]).collect();
    let sig: Vec<f64> = relevant
        .iter()
        .map(|e| net.sigma2(*e).expect("gaussian edge"))
        .collect();

    // Cuts crossing a live edge drive the search; starved cuts contribute
    // a constant ceiling no allocation can lift.
    let mut terms: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut ceiling = f64::INFINITY;
    for t in &cuts {
        let dims: Vec<usize> = (0..d).filter(|&k| t.crosses(relevant[k])).collect();
        let rsum = rates.sum_inside(t);
        if dims.is_empty() {
            ceiling = ceiling.min(-rsum);
        } else {
            terms.push((dims, rsum));
        }
    }

    let value = |s: &[f64]| -> (f64, usize) {
        let c_now: Vec<f64> = (0..d).map(|k| awgn_capacity(s[k], sig[k])).collect();
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for (i, (dims, rsum)) in terms.iter().enumerate() {
            let v = dims.iter().map(|&k| c_now[k]).sum::<f64>() - rsum;
            if v < best {
                best = v;
                arg = i;
            }
        }
        (best, arg)
    };
    let expand = |s: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; n * n];
        for (k, e) in relevant.iter().enumerate() {
            full[e.index(n)] = s[k];
        }
        full
    };

    if terms.is_empty() {
        return done(vec![0.0; n * n], ceiling, ceiling, true, 0);
    }
    if d == 1 {
        // Every live slack is nondecreasing in the one live edge: max out.
        let (v, _) = value(&caps);
        let best = v.min(ceiling);
        return done(expand(&caps), best, best, true, 0);
    }

    // Node budgets restricted to live dimensions, then the total budget.
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let dims: Vec<usize> = (0..d).filter(|&k| relevant[k].from == i).collect();
        if !dims.is_empty() {
            groups.push((power.node_cap(i), dims));
        }
    }
    let total_cap = power.total();
    let project = |s: &mut [f64]| {
        for k in 0..d {
            s[k] = s[k].clamp(0.0, caps[k]);
        }
        for (cap, dims) in &groups {
            let sum: f64 = dims.iter().map(|&k| s[k]).sum();
            if sum > *cap {
                let f = cap / sum;
                for &k in dims {
                    s[k] *= f;
                }
            }
        }
        let sum: f64 = s.iter().sum();
        if sum > total_cap {
            let f = total_cap / sum;
            for v in s.iter_mut() {
                *v *= f;
            }
        }
    };

    // Start from the capped proportional allocation.
    let mut best_s = caps.clone();
    project(&mut best_s);
    let (mut best_v, _) = value(&best_s);
    let mut best_ub = f64::INFINITY;

    // Ellipsoid covering the cap box, hence the whole polytope.
    let mut c: Vec<f64> = caps.iter().map(|v| v / 2.0).collect();
    let r0 = 0.5 * caps.iter().map(|v| v * v).sum::<f64>().sqrt() + 1e-6;
    let mut q = vec![vec![0.0; d]; d];
    for k in 0..d {
        q[k][k] = r0 * r0;
    }

    let lip: f64 = sig.iter().map(|&s| 1.0 / (2.0 * LN_2 * s)).sum();
    let tau = 1e-12 * (1.0 + caps.iter().cloned().fold(0.0, f64::max));
    let slop = lip * tau * (d as f64).sqrt(); // projection displacement bound
    let max_iters = params.max_iters.unwrap_or_else(|| {
        let spread = (r0 * (1.0 + lip) / params.gap).max(std::f64::consts::E);
        ((2.5 * ((d + 1) * (d + 1)) as f64 * spread.ln()).ceil() as usize).min(400_000)
    });

    let mut iterations = 0;
    let mut g = vec![0.0; d];
    while iterations < max_iters {
        if best_ub.min(ceiling) - best_v.min(ceiling) <= params.gap {
            break;
        }
        iterations += 1;

        // Feasibility cut if the center is outside the polytope, else a
        // supergradient cut of the worst live cut (negated: the update
        // discards the halfspace `g` points into).
        g.iter_mut().for_each(|v| *v = 0.0);
        let mut have_cut = false;
        for k in 0..d {
            if c[k] < -tau {
                g[k] = -1.0;
                have_cut = true;
                break;
            }
            if c[k] > caps[k] + tau {
                g[k] = 1.0;
                have_cut = true;
                break;
            }
        }
        if !have_cut {
            for (cap, dims) in &groups {
                if dims.iter().map(|&k| c[k]).sum::<f64>() > *cap + tau {
                    for &k in dims {
                        g[k] = 1.0;
                    }
                    have_cut = true;
                    break;
                }
            }
        }
        if !have_cut && c.iter().sum::<f64>() > total_cap + tau {
            g.iter_mut().for_each(|v| *v = 1.0);
            have_cut = true;
        }
        let mut objective_step = false;
        if !have_cut {
            let mut s = c.clone();
            project(&mut s);
            let (v, arg) = value(&s);
            if v > best_v {
                best_v = v;
                best_s.copy_from_slice(&s);
            }
            if v >= ceiling {
                // The starved cuts cap the objective and the cap is met.
                break;
            }
            for &k in &terms[arg].0 {
                g[k] = -1.0 / (2.0 * LN_2 * (sig[k] + s[k]));
            }
            objective_step = true;
        }

        let qg: Vec<f64> = (0..d)
            .map(|r| (0..d).map(|k| q[r][k] * g[k]).sum())
            .collect();
        let gqg: f64 = (0..d).map(|k| g[k] * qg[k]).sum();
        if !(gqg > 0.0) {
            break; // region numerically flat along the cut
        }
        let sq = gqg.sqrt();
        if objective_step {
            // f(x*) ≤ f(c) + ∂fᵀ(x* - c) ≤ f(c) + ‖∂f‖_Q for x* in the
            // ellipsoid, which always still holds the maximizer.
            let (v, _) = value(&{
                let mut s = c.clone();
                project(&mut s);
                s
            });
            best_ub = best_ub.min(v + sq + slop);
        }

        let dd = d as f64;
        for k in 0..d {
            c[k] -= qg[k] / ((dd + 1.0) * sq);
        }
        let f1 = dd * dd / (dd * dd - 1.0);
        let f2 = 2.0 / (dd + 1.0);
        for r in 0..d {
            for k in 0..d {
                q[r][k] = f1 * (q[r][k] - f2 * qg[r] * qg[k] / gqg);
            }
        }
        for r in 0..d {
            for k in 0..r {
                let m = 0.5 * (q[r][k] + q[k][r]);
                q[r][k] = m;
                q[k][r] = m;
            }
        }
    }

    let slack = best_v.min(ceiling);
    let upper = best_ub.min(ceiling);
    let converged = upper - slack <= params.gap;
    done(expand(&best_s), slack, upper, converged, iterations)
}

/// Where a rate tuple sits relative to the Gaussian region.
#[derive(Debug, Clone)]
pub enum AwgnMembership {
    /// `witness` keeps every cut slack above `-MEMBERSHIP_TOL`.
    Inside { witness: PowerAllocation, slack: f64 },
    /// Certified out: no feasible allocation lifts the worst slack to the
    /// tolerance. `cut` is the most violated cut at the best allocation.
    Outside { cut: Cut, slack: f64 },
    /// The iteration cap ran out with the verdict still open.
    Undecided { best_slack: f64 },
}

impl AwgnMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, AwgnMembership::Inside { .. })
    }
}

pub fn awgn_region_membership(
    net: &Network,
    rates: &RateTuple,
    params: &AwgnSearchParams,
) -> Result<AwgnMembership, InfoError> {
    let search = maximize_min_slack(net, rates, params)?;
    if search.slack >= -tol::MEMBERSHIP_TOL {
        return Ok(AwgnMembership::Inside {
            witness: search.alloc,
            slack: search.slack,
        });
    }
    if search.upper >= -tol::MEMBERSHIP_TOL {
        return Ok(AwgnMembership::Undecided {
            best_slack: search.slack,
        });
    }
    let mut worst: Option<(Cut, f64)> = None;
    for t in enumerate_cuts(net.n(), net.demand())? {
        let cap: f64 = t
            .crossing_edges()
            .map(|e| awgn_capacity(search.alloc.get(e), net.sigma2(e).expect("gaussian edge")))
            .sum();
        let slack = cap - rates.sum_inside(&t);
        if worst.as_ref().map_or(true, |&(_, w)| slack < w) {
            worst = Some((t, slack));
        }
    }
    let (cut, slack) = worst.expect("a violated cut exists");
    Ok(AwgnMembership::Outside { cut, slack })
}
