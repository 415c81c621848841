"""Peeling decoder and erased-message counting on the binary erasure channel."""

import numba as nb
import numpy as np

from models.simulation import TannerGraph, TrialOutcome


@nb.njit(cache=True)
def _peel(var_ptr, var_adj, check_ptr, erased, capture):
    """Peel ``erased`` down to its maximal stopping set.

    Each check keeps the number of erased edges and the sum of the erased
    variables on them; a check with one erased edge names its variable by
    that sum. Returns the remaining erasures, their mask and, when
    ``capture`` is set, the (residual, degree-one checks) pairs after
    every peeled variable.
    """
    n = var_ptr.size - 1
    m = check_ptr.size - 1
    remaining = erased.copy()
    check_deg = np.zeros(m, np.int64)
    check_sum = np.zeros(m, np.int64)
    residual = 0
    for v in range(n):
        if remaining[v]:
            residual += 1
            for k in range(var_ptr[v], var_ptr[v + 1]):
                c = var_adj[k]
                check_deg[c] += 1
                check_sum[c] += v

    stack = np.empty(m, np.int64)
    top = 0
    for c in range(m):
        if check_deg[c] == 1:
            stack[top] = c
            top += 1
    r1 = top

    trajectory = np.empty((residual + 1 if capture else 0, 2), np.int64)
    steps = 0
    if capture:
        trajectory[0, 0] = residual
        trajectory[0, 1] = r1
        steps = 1

    while top > 0:
        top -= 1
        c = stack[top]
        if check_deg[c] != 1:
            continue
        v = check_sum[c]
        remaining[v] = False
        residual -= 1
        for k in range(var_ptr[v], var_ptr[v + 1]):
            d = var_adj[k]
            check_deg[d] -= 1
            check_sum[d] -= v
            if check_deg[d] == 1:
                stack[top] = d
                top += 1
                r1 += 1
            elif check_deg[d] == 0:
                r1 -= 1
        if capture:
            trajectory[steps, 0] = residual
            trajectory[steps, 1] = r1
            steps += 1
    return residual, remaining, trajectory[:steps]


def residual_mask(graph: TannerGraph, erasure_mask: np.ndarray) -> np.ndarray:
    """Boolean mask of the maximal stopping set inside the erased set."""
    erased = _as_mask(graph, erasure_mask)
    _, remaining, _ = _peel(
        graph.var_ptr, graph.var_adj, graph.check_ptr, erased, False
    )
    return remaining


def peel_decode(
    graph: TannerGraph, erasure_mask: np.ndarray, capture_trajectory: bool = False
) -> TrialOutcome:
    """
    Run the peeling decoder on one erasure pattern.

    Args:
        graph: Sampled code
        erasure_mask: Boolean array of length n, True where the channel erased
        capture_trajectory: Record (residual erasures, R₁) after every step

    Returns:
        TrialOutcome; success exactly when nothing remains erased
    """
    erased = _as_mask(graph, erasure_mask)
    residual, _, trajectory = _peel(
        graph.var_ptr, graph.var_adj, graph.check_ptr, erased, capture_trajectory
    )
    return TrialOutcome(
        erased_initial=int(erased.sum()),
        residual_erasures=int(residual),
        success=residual == 0,
        trajectory=(
            tuple((int(a), int(b)) for a, b in trajectory)
            if capture_trajectory
            else None
        ),
    )


def _as_mask(graph: TannerGraph, erasure_mask: np.ndarray) -> np.ndarray:
    erased = np.ascontiguousarray(erasure_mask, dtype=np.bool_)
    if erased.shape != (graph.n,):
        raise ValueError(f"erasure mask must have length {graph.n}, got {erased.shape}")
    return erased


def erased_messages(graph: TannerGraph, erasure_mask: np.ndarray, ell: int) -> int:
    """Number of erased variable-to-check messages after ℓ rounds of BP.

    Round 0 is the channel message. On the erasure channel a check-to-variable
    message is erased iff another incoming message is erased, and a
    variable-to-check message is erased iff the channel erased the bit and
    every other incoming check message is erased.
    """
    if ell < 0:
        raise ValueError("ell must be >= 0")
    erased = _as_mask(graph, erasure_mask)
    channel = erased[graph.edge_var]
    to_check = channel.copy()
    for _ in range(ell):
        at_check = np.bincount(graph.edge_check, weights=to_check, minlength=graph.m)
        to_var = (at_check[graph.edge_check] - to_check) > 0.5
        known = ~to_var
        at_var = np.bincount(graph.edge_var, weights=known, minlength=graph.n)
        to_check = channel & ((at_var[graph.edge_var] - known) < 0.5)
    return int(to_check.sum())
