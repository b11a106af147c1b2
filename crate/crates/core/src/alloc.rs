//! Allocation algorithms and brute-force stability oracles.
//!
//! Every trader `k` starts out owning good `k`. An allocation is a
//! permutation `g` with trader `k` receiving `g_k`; the rank `r_k` is the
//! position of `g_k` in trader `k`'s list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::profile::{check_size, PreferenceProfile};

/// Default largest `n` accepted by the exhaustive coalition checks.
pub const DEFAULT_BRUTE_FORCE_BOUND: usize = 6;

/// Goods assigned to each trader together with the rank of each good in
/// the receiving trader's list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub goods: Permutation,
    pub ranks: Vec<usize>,
}

impl AllocationResult {
    /// Pair `goods` with the ranks they have in `p`.
    pub fn from_goods(p: &PreferenceProfile, goods: Permutation) -> Result<Self> {
        check_size(p.n(), &goods)?;
        let ranks = (1..=p.n()).map(|k| p.rank_of(k, goods.at(k))).collect();
        Ok(AllocationResult { goods, ranks })
    }

    pub fn rank_sum(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// The rank multiset as a non-decreasing sequence.
    pub fn sorted_ranks(&self) -> Vec<usize> {
        let mut r = self.ranks.clone();
        r.sort_unstable();
        r
    }

    /// `goods[k] == rows[k][ranks[k]]` for every trader.
    pub fn is_consistent_with(&self, p: &PreferenceProfile) -> bool {
        self.goods.len() == p.n()
            && self.ranks.len() == p.n()
            && (1..=p.n()).all(|k| {
                let r = self.ranks[k - 1];
                (1..=p.n()).contains(&r) && p.choice(k, r) == self.goods.at(k)
            })
    }
}

/// Which waiting trader enters when the algorithm needs a new one.
///
/// The resulting allocation does not depend on this choice; the policy only
/// exists so that independence can be exercised.
#[derive(Clone, Debug, Default)]
pub enum EntryPolicy {
    #[default]
    Smallest,
    Largest,
    /// First unallocated trader in the given order.
    Order(Permutation),
}

impl EntryPolicy {
    fn pick(&self, allocated: &[usize]) -> Option<usize> {
        let n = allocated.len() - 1;
        match self {
            EntryPolicy::Smallest => (1..=n).find(|&k| allocated[k] == 0),
            EntryPolicy::Largest => (1..=n).rev().find(|&k| allocated[k] == 0),
            EntryPolicy::Order(order) => order.as_slice().iter().copied().find(|&k| allocated[k] == 0),
        }
    }
}

/// The unique core allocation, computed by sequential top-trading-cycle
/// removal with the smallest waiting trader entering first.
pub fn stable_allocation(p: &PreferenceProfile) -> AllocationResult {
    stable_allocation_with(p, &EntryPolicy::Smallest)
}

/// [`stable_allocation`] with an explicit entry policy.
///
/// Panics if an `EntryPolicy::Order` has the wrong length.
pub fn stable_allocation_with(p: &PreferenceProfile, policy: &EntryPolicy) -> AllocationResult {
    let n = p.n();
    if let EntryPolicy::Order(order) = policy {
        assert_eq!(order.len(), n, "entry order has wrong length");
    }
    // Index 0 is the "no trader" sentinel.
    // wants[k]: trader who wants k's good, 0 if k proposed but nobody
    // reciprocated yet, -1 if k has not entered.
    let mut wants: Vec<isize> = vec![-1; n + 1];
    let mut pos = vec![0usize; n + 1];
    let mut goods = vec![0usize; n + 1];

    'enter: while let Some(entrant) = policy.pick(&goods) {
        let mut t = entrant;
        wants[t] = 0;
        loop {
            #[cfg(debug_assertions)]
            check_proposal_path(p, &wants, &pos, &goods, t);

            // Propose to the best good still on the market.
            let s = loop {
                pos[t] += 1;
                let s = p.choice(t, pos[t]);
                if goods[s] == 0 {
                    break s;
                }
            };
            if wants[s] < 0 {
                wants[s] = t as isize;
                t = s;
                continue;
            }
            // s is already on the path: freeze the cycle starting at s.
            t = wants[s] as usize;
            let mut s = s;
            while goods[s] == 0 {
                let next = p.choice(s, pos[s]);
                goods[s] = next;
                s = next;
            }
            if t == 0 {
                continue 'enter;
            }
        }
    }

    goods.remove(0);
    pos.remove(0);
    AllocationResult {
        goods: Permutation::from_vec_unchecked(goods),
        ranks: pos,
    }
}

/// Path invariant at the proposal step: the active traders (entered and
/// unallocated) form a single chain `0 → t_1 → … → t_m = t` where each
/// `t_{j+1}` is the best remaining choice of `t_j`.
#[cfg(debug_assertions)]
fn check_proposal_path(p: &PreferenceProfile, wants: &[isize], pos: &[usize], goods: &[usize], t: usize) {
    let active = (1..wants.len())
        .filter(|&k| goods[k] == 0 && wants[k] >= 0)
        .count();
    let mut chain = vec![t];
    let mut cur = t;
    while wants[cur] > 0 {
        cur = wants[cur] as usize;
        chain.push(cur);
        assert!(chain.len() <= active, "proposal path has a cycle");
    }
    assert_eq!(wants[cur], 0, "proposal path does not reach the entrant");
    assert_eq!(chain.len(), active, "proposal path misses an active trader");
    for pair in chain.windows(2) {
        let (next, prev) = (pair[0], pair[1]);
        assert_eq!(goods[next], 0);
        assert_eq!(p.choice(prev, pos[prev]), next);
        assert!((1..pos[prev]).all(|j| goods[p.choice(prev, j)] != 0));
    }
}

/// First-come first-served allocation: trader `π(k)` takes the first good
/// in their list not already taken by `π(1), …, π(k−1)`.
pub fn uniform_hash_allocation(p: &PreferenceProfile, priority: &Permutation) -> Result<AllocationResult> {
    let n = p.n();
    check_size(n, priority)?;
    let mut taken = vec![false; n + 1];
    let mut goods = vec![0; n];
    let mut ranks = vec![0; n];
    for &trader in priority.as_slice() {
        let j = (1..=n)
            .find(|&j| !taken[p.choice(trader, j)])
            .expect("a free good always remains");
        let good = p.choice(trader, j);
        taken[good] = true;
        goods[trader - 1] = good;
        ranks[trader - 1] = j;
    }
    Ok(AllocationResult {
        goods: Permutation::from_vec_unchecked(goods),
        ranks,
    })
}

/// Whether `g` is in the core: no coalition can reallocate its own goods so
/// that every member is at least as well off and someone strictly better.
pub fn is_core_allocation(p: &PreferenceProfile, g: &Permutation) -> Result<bool> {
    is_core_allocation_bounded(p, g, DEFAULT_BRUTE_FORCE_BOUND)
}

pub fn is_core_allocation_bounded(p: &PreferenceProfile, g: &Permutation, bound: usize) -> Result<bool> {
    let n = check_brute_force(p, g, bound)?;
    let full: u32 = (1u32 << n) - 1;
    Ok((1..=full).all(|mask| !coalition_blocks(p, g, mask)))
}

/// Whether `g` cannot be improved by the grand coalition alone.
pub fn is_locally_optimal(p: &PreferenceProfile, g: &Permutation) -> Result<bool> {
    is_locally_optimal_bounded(p, g, DEFAULT_BRUTE_FORCE_BOUND)
}

pub fn is_locally_optimal_bounded(p: &PreferenceProfile, g: &Permutation, bound: usize) -> Result<bool> {
    let n = check_brute_force(p, g, bound)?;
    Ok(!coalition_blocks(p, g, (1u32 << n) - 1))
}

fn check_brute_force(p: &PreferenceProfile, g: &Permutation, bound: usize) -> Result<usize> {
    let n = p.n();
    check_size(n, g)?;
    if n > bound || n > 31 {
        return Err(Error::BoundExceeded { n, bound });
    }
    Ok(n)
}

/// Exhaustive search for a reallocation `h` of the coalition's own goods
/// that every member weakly prefers to `g` and that differs from `g`.
fn coalition_blocks(p: &PreferenceProfile, g: &Permutation, mask: u32) -> bool {
    let members: Vec<usize> = (1..=p.n()).filter(|&k| mask & (1 << (k - 1)) != 0).collect();
    let mut used = 0u32;
    search_blocking(p, g, &members, 0, &mut used, false)
}

fn search_blocking(
    p: &PreferenceProfile,
    g: &Permutation,
    members: &[usize],
    idx: usize,
    used: &mut u32,
    differs: bool,
) -> bool {
    let Some(&k) = members.get(idx) else {
        return differs;
    };
    let limit = p.rank_of(k, g.at(k));
    for &good in members {
        let bit = 1u32 << (good - 1);
        if *used & bit != 0 || p.rank_of(k, good) > limit {
            continue;
        }
        *used |= bit;
        let found = search_blocking(p, g, members, idx + 1, used, differs || good != g.at(k));
        *used &= !bit;
        if found {
            return true;
        }
    }
    false
}

/// A priority order whose first-come first-served allocation is `g`.
///
/// Repeatedly picks the smallest remaining trader whose favourite remaining
/// good is the one `g` gives them, and removes that good. This succeeds
/// exactly when `g` is locally optimal.
pub fn priority_reconstruction(p: &PreferenceProfile, g: &Permutation) -> Result<Permutation> {
    let n = p.n();
    check_size(n, g)?;
    let mut placed = vec![false; n + 1];
    let mut taken = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (1..=n).find(|&k| {
            !placed[k]
                && p.row(k)
                    .as_slice()
                    .iter()
                    .find(|&&good| !taken[good])
                    .is_some_and(|&fav| fav == g.at(k))
        });
        let Some(k) = next else {
            return Err(Error::NotLocallyOptimal(g.to_string()));
        };
        placed[k] = true;
        taken[g.at(k)] = true;
        order.push(k);
    }
    Ok(Permutation::from_vec_unchecked(order))
}
