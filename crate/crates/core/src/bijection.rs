//! One-to-one correspondence between priority orders and shufflings.
//!
//! For a fixed profile `p`, a priority `π` is *consistent with* a shuffling
//! `σ` when the first-come first-served allocation of `p` under `π` equals
//! the core allocation of the shuffled profile (trader `σ(k)` holding list
//! `p_k`), read back through `σ`. [`pi_to_sigma`] and [`sigma_to_pi`] build
//! mutually inverse maps between all `n!` priorities and all `n!`
//! shufflings with this property.
//!
//! Both constructions work on a [`TruncatedTableau`]: each row is cut just
//! after its allocated ("circled") good, since nothing beyond it matters,
//! and goods are struck out of rows where they are not circled as the
//! construction proceeds.

use crate::alloc::{stable_allocation, uniform_hash_allocation};
use crate::error::Result;
use crate::permutation::Permutation;
use crate::profile::{check_size, shuffle_profile, PreferenceProfile};

/// Rows of a profile truncated at their allocated good, with tombstones for
/// struck-out entries.
#[derive(Clone, Debug)]
pub struct TruncatedTableau {
    rows: Vec<Vec<usize>>,
    live: Vec<Vec<bool>>,
    circled: Permutation,
}

impl TruncatedTableau {
    /// Row `k` is `p_k` up to and including `circled(k)`.
    pub fn new(p: &PreferenceProfile, circled: &Permutation) -> Result<Self> {
        check_size(p.n(), circled)?;
        let rows: Vec<Vec<usize>> = (1..=p.n())
            .map(|k| {
                let r = p.rank_of(k, circled.at(k));
                p.row(k).as_slice()[..r].to_vec()
            })
            .collect();
        let live = rows.iter().map(|r| vec![true; r.len()]).collect();
        Ok(TruncatedTableau {
            rows,
            live,
            circled: circled.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn circled(&self) -> &Permutation {
        &self.circled
    }

    /// Row `k` (1-based), struck-out entries included.
    pub fn row(&self, k: usize) -> &[usize] {
        &self.rows[k - 1]
    }

    /// Live entries of row `k`; the circled good is always the last one.
    pub fn live_row(&self, k: usize) -> Vec<usize> {
        self.rows[k - 1]
            .iter()
            .zip(&self.live[k - 1])
            .filter_map(|(&g, &alive)| alive.then_some(g))
            .collect()
    }

    /// The first live entry of row `k` is its circled good.
    pub fn circled_first(&self, k: usize) -> bool {
        let live = &self.live[k - 1];
        live[..live.len() - 1].iter().all(|&a| !a)
    }

    /// Membership vector (index 0 unused) of rows whose circled good stands
    /// alone.
    pub fn circled_first_rows(&self) -> Vec<bool> {
        let mut out = vec![false; self.n() + 1];
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = self.circled_first(k);
        }
        out
    }

    /// Strike `goods` from every row in which they are not circled.
    pub fn strike(&mut self, goods: impl IntoIterator<Item = usize>) {
        let n = self.n();
        let mut mark = vec![false; n + 1];
        for g in goods {
            mark[g] = true;
        }
        for (row, live) in self.rows.iter().zip(self.live.iter_mut()) {
            let last = row.len() - 1;
            for (i, &g) in row.iter().enumerate().take(last) {
                if mark[g] {
                    live[i] = false;
                }
            }
        }
    }
}

/// The shuffling that corresponds to priority `pi` for profile `p`.
pub fn pi_to_sigma(p: &PreferenceProfile, pi: &Permutation) -> Result<Permutation> {
    let n = p.n();
    let g = uniform_hash_allocation(p, pi)?.goods;
    let mut tableau = TruncatedTableau::new(p, &g)?;

    let mut in_x = vec![false; n + 1];
    let mut in_y = tableau.circled_first_rows();
    let mut sigma = vec![0usize; n];
    let mut m = 0usize;
    loop {
        let lead = pi.at(m + 1);
        debug_assert!((1..=n).all(|k| !in_x[k] || in_y[k]), "X must be a subset of Y");
        debug_assert!(in_y[lead] && !in_x[lead], "next priority must be in Y \\ X");

        let k = (m + 1..=n)
            .find(|&k| {
                if k == n {
                    return true;
                }
                let next = pi.at(k + 1);
                !in_y[next] || (!in_x[next] && next > lead)
            })
            .expect("k = n always qualifies");

        // Rotate the goods of π(m+1), …, π(k) one step backwards.
        for j in m + 1..k {
            sigma[pi.at(j) - 1] = g.at(pi.at(j + 1));
        }
        sigma[pi.at(k) - 1] = g.at(lead);
        if k == n {
            break;
        }

        tableau.strike((m + 1..=k).map(|j| g.at(pi.at(j))));
        if !in_y[pi.at(k + 1)] {
            in_x = in_y;
            in_y = tableau.circled_first_rows();
        }
        m = k;
    }
    Ok(Permutation::from_vec_unchecked(sigma))
}

/// The priority that corresponds to shuffling `sigma` for profile `p`;
/// inverse of [`pi_to_sigma`].
pub fn sigma_to_pi(p: &PreferenceProfile, sigma: &Permutation) -> Result<Permutation> {
    let n = p.n();
    let shuffled = shuffle_profile(p, sigma)?;
    let stable = stable_allocation(&shuffled).goods;
    // Row a of the tableau is list p_a, held by trader σ(a).
    let circled = Permutation::from_vec_unchecked((1..=n).map(|a| stable.at(sigma.at(a))).collect());
    let mut tableau = TruncatedTableau::new(p, &circled)?;

    let sigma_inv = sigma.inverse();
    // succ[b] = a when σ(a) is the circled good of row b; pred inverts it.
    let mut succ = vec![0usize; n + 1];
    let mut pred = vec![0usize; n + 1];
    for (b, slot) in succ.iter_mut().enumerate().skip(1) {
        let a = sigma_inv.at(circled.at(b));
        *slot = a;
        pred[a] = b;
    }

    let mut in_x = vec![false; n + 1];
    let mut in_y = tableau.circled_first_rows();
    let mut placed = vec![false; n + 1];
    let mut pi = Vec::with_capacity(n);
    while pi.len() < n {
        let eligible: Vec<bool> = (0..=n).map(|a| a > 0 && in_y[a] && !placed[a]).collect();
        let Some(leader) = smallest_cycle_leader(&succ, &eligible, &in_x) else {
            let refreshed = tableau.circled_first_rows();
            assert!(refreshed != in_y, "no cycle available and nothing left to refresh");
            in_x = in_y;
            in_y = refreshed;
            continue;
        };
        let mut a = leader;
        let mut goods = Vec::new();
        loop {
            placed[a] = true;
            pi.push(a);
            goods.push(sigma.at(a));
            a = pred[a];
            if a == leader {
                break;
            }
        }
        tableau.strike(goods);
    }
    Ok(Permutation::from_vec_unchecked(pi))
}

/// Among cycles of `succ` lying entirely in `eligible`, the smallest leader,
/// where a cycle's leader is its largest member outside `in_x`.
fn smallest_cycle_leader(succ: &[usize], eligible: &[bool], in_x: &[bool]) -> Option<usize> {
    let n = succ.len() - 1;
    let mut seen = vec![false; n + 1];
    let mut best: Option<usize> = None;
    for start in 1..=n {
        if !eligible[start] || seen[start] {
            continue;
        }
        let mut members = vec![start];
        let mut cur = succ[start];
        let mut closed = true;
        while cur != start {
            if !eligible[cur] {
                closed = false;
                break;
            }
            members.push(cur);
            cur = succ[cur];
        }
        for &m in &members {
            seen[m] = true;
        }
        if !closed {
            continue;
        }
        let leader = members.iter().copied().filter(|&a| !in_x[a]).max();
        debug_assert!(leader.is_some(), "every eligible cycle has a member outside X");
        if let Some(l) = leader {
            best = Some(best.map_or(l, |b| b.min(l)));
        }
    }
    best
}

/// Whether the first-come first-served allocation under `pi` equals the core
/// allocation of `p` shuffled by `sigma`, i.e. `g'_{σ(k)} = g_k` for all `k`.
pub fn is_consistent(p: &PreferenceProfile, pi: &Permutation, sigma: &Permutation) -> Result<bool> {
    let hashed = uniform_hash_allocation(p, pi)?.goods;
    let stable = stable_allocation(&shuffle_profile(p, sigma)?).goods;
    Ok((1..=p.n()).all(|k| stable.at(sigma.at(k)) == hashed.at(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::profile::validate_profile;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn table_round_trip() {
        let p = fixtures::table1_profile();
        let sigma = pi_to_sigma(&p, &fixtures::table1_priority()).unwrap();
        assert_eq!(sigma, fixtures::table2_sigma());
        assert_eq!(sigma_to_pi(&p, &sigma).unwrap(), fixtures::table1_priority());
        assert!(is_consistent(&p, &fixtures::table1_priority(), &sigma).unwrap());
    }

    #[test]
    fn table2_rows_are_shuffled_table1_rows() {
        let t2 = fixtures::table2_profile();
        // List σ(1) = 5 holds p_1, list σ(9) = 3 holds p_9.
        assert_eq!(t2.row(5).at(1), 3);
        assert_eq!(t2.row(3).at(1), 2);
        assert_eq!(t2.row(6).as_slice()[..3], [5, 3, 8]);
    }

    #[test]
    fn singleton() {
        let p = validate_profile(vec![vec![1]]).unwrap();
        assert_eq!(pi_to_sigma(&p, &perm(&[1])).unwrap(), perm(&[1]));
        assert_eq!(sigma_to_pi(&p, &perm(&[1])).unwrap(), perm(&[1]));
    }

    #[test]
    fn two_self_allocating_traders() {
        let p = validate_profile(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(pi_to_sigma(&p, &perm(&[1, 2])).unwrap(), perm(&[1, 2]));
    }

    #[test]
    fn intro_consistency_examples() {
        let p = fixtures::intro_profile();
        assert!(is_consistent(&p, &perm(&[1, 3, 2]), &perm(&[2, 1, 3])).unwrap());
        assert!(!is_consistent(&p, &perm(&[1, 2, 3]), &perm(&[1, 2, 3])).unwrap());
    }

    #[test]
    fn tableau_strikes_only_uncircled() {
        let p = fixtures::table1_profile();
        let mut t = TruncatedTableau::new(&p, &fixtures::table1_circled()).unwrap();
        assert_eq!(t.row(7), &[5, 3, 8]);
        assert!(!t.circled_first(7));
        t.strike([5, 3, 8]);
        assert_eq!(t.live_row(7), vec![8]);
        assert!(t.circled_first(7));
        assert_eq!(t.live_row(4), vec![1, 5]);
        t.strike([1]);
        assert!(t.circled_first(4));
    }
}
