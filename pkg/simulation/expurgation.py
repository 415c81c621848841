"""Detection of small stopping sets and expurgated code sampling.

A stopping set of size < s_min is searched from every root variable v by
growing a set S whose smallest member is v: while some check has exactly one
edge into S, any stopping set containing S must also contain another
neighbour of that check, so the search branches over those neighbours only.
"""

import logging
from typing import Optional, Sequence, Tuple

import numba as nb
import numpy as np

from models.ensemble import DegreePair
from models.simulation import TannerGraph
from shared.errors import SimulationError
from simulation.graph import sample_graph

logger = logging.getLogger(__name__)

MAX_EXPURGATION_SIZE = 8
DEFAULT_MAX_RESAMPLES = 1000


@nb.njit(cache=True)
def _toggle(v, sign, var_ptr, var_adj, count):
    """Add (sign=1) or remove (sign=-1) v; returns the change in dangling checks."""
    delta = 0
    for k in range(var_ptr[v], var_ptr[v + 1]):
        c = var_adj[k]
        before = count[c]
        after = before + sign
        count[c] = after
        if after == 1:
            delta += 1
        if before == 1:
            delta -= 1
    return delta


@nb.njit(cache=True)
def _dangling_check(members, size, var_ptr, var_adj, count):
    for i in range(size):
        v = members[i]
        for k in range(var_ptr[v], var_ptr[v + 1]):
            if count[var_adj[k]] == 1:
                return var_adj[k]
    return -1


@nb.njit(cache=True)
def _find_small_stopping_set(var_ptr, var_adj, check_ptr, check_adj, limit, dv_max):
    """Members of a stopping set of at most ``limit`` variables, or an empty array."""
    n = var_ptr.size - 1
    m = check_ptr.size - 1
    count = np.zeros(m, np.int64)
    in_set = np.zeros(n, np.bool_)
    members = np.empty(limit, np.int64)
    branch_check = np.empty(limit, np.int64)
    branch_pos = np.empty(limit, np.int64)

    for root in range(n):
        members[0] = root
        in_set[root] = True
        size = 1
        dangling = _toggle(root, 1, var_ptr, var_adj, count)
        while size > 0:
            if dangling == 0:
                return members[:size].copy()
            slots = limit - size
            if slots > 0 and dangling <= slots * dv_max:
                c = _dangling_check(members, size, var_ptr, var_adj, count)
                branch_check[size - 1] = c
                branch_pos[size - 1] = check_ptr[c]
            else:
                v = members[size - 1]
                dangling += _toggle(v, -1, var_ptr, var_adj, count)
                in_set[v] = False
                size -= 1

            added = False
            while size > 0 and not added:
                level = size - 1
                c = branch_check[level]
                pos = branch_pos[level]
                end = check_ptr[c + 1]
                while pos < end:
                    u = check_adj[pos]
                    pos += 1
                    if u > root and not in_set[u]:
                        members[size] = u
                        in_set[u] = True
                        size += 1
                        dangling += _toggle(u, 1, var_ptr, var_adj, count)
                        added = True
                        break
                branch_pos[level] = pos
                if not added:
                    v = members[level]
                    dangling += _toggle(v, -1, var_ptr, var_adj, count)
                    in_set[v] = False
                    size -= 1
    return np.empty(0, np.int64)


def _check_size(s_min: int) -> None:
    if s_min > MAX_EXPURGATION_SIZE:
        raise SimulationError(
            f"expurgation below size {s_min} is not supported "
            f"(exhaustive search is limited to s_min <= {MAX_EXPURGATION_SIZE})"
        )


def small_stopping_set(graph: TannerGraph, s_min: int) -> Optional[np.ndarray]:
    """
    Some stopping set with fewer than ``s_min`` variables, if the code has one.

    Args:
        graph: Sampled code
        s_min: Size bound; sets of size <= s_min - 1 are searched

    Returns:
        Sorted variable indices of a stopping set, or None
    """
    _check_size(s_min)
    if s_min <= 1:
        return None
    found = _find_small_stopping_set(
        graph.var_ptr,
        graph.var_adj,
        graph.check_ptr,
        graph.check_adj,
        s_min - 1,
        graph.max_var_degree,
    )
    return np.sort(found) if found.size else None


def expurgated_graph(
    n: int,
    pair: DegreePair,
    s_min: int,
    seed: int,
    key: Sequence[int] = (),
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
) -> Tuple[TannerGraph, int]:
    """Sample until the code has no stopping set smaller than ``s_min``.

    Returns the accepted graph and the number of rejected samples.
    """
    _check_size(s_min)
    for attempt in range(max_resamples + 1):
        graph = sample_graph(n, pair, seed, (*key, attempt))
        found = small_stopping_set(graph, s_min)
        if found is None:
            return graph, attempt
        logger.debug(
            f"rejected graph {tuple(key)} attempt {attempt}: "
            f"stopping set of size {found.size}"
        )
    raise SimulationError(
        f"no code without stopping sets below {s_min} in {max_resamples + 1} samples"
    )
