"""High relative-accuracy SVD for Cauchy kernel matrices.

The sampled transform matrix is Cauchy: H[i, j] = s / (y_j - x_i).  Its
singular values decay exponentially and reach ~1e-20 within a dozen steps
for overlap-dominated geometries, far below what a conventional backward-
stable SVD can resolve (absolute accuracy eps * sigma_max ~ 1e-16).  The
standard remedy is a rank-revealing decomposition computed without
additive cancellation:

1. Gaussian elimination with complete pivoting.  The Schur complement of
   a Cauchy matrix is again Cauchy-like, and one elimination step
   multiplies every remaining entry by the exact node ratio

       (x_i - x_p)(y_j - y_q) / ((x_i - y_q)(y_j - x_p)),

   so entries, pivots, and multipliers retain relative accuracy however
   small they get.  Complete pivoting keeps |L| <= 1 and |U| <= 1
   entrywise, hence L and U well conditioned:  H = P_r^T (L D U) P_c^T.

2. Pivoted-QR iteration on the core.  After a column-pivoted QR of L*D,
   the problem reduces to a graded triangular core T between accumulated
   orthogonal factors.  Each further pivoted QR of T (alternating sides)
   shrinks the coupling between singular-value scale groups by the
   squared ratio of their magnitudes; with the huge relative gaps of the
   exponential tail a handful of iterations decouples the scales.

3. Scale-split block SVD.  Once the cross-scale coupling is negligible
   both in absolute terms and relative to each column scale, T is treated
   as block diagonal and each moderate-range block is finished by a dense
   SVD, which is accurate relative to that block's own scale.

Every operation on the way is either exact-ratio arithmetic (step 1) or
columnwise backward-stable orthogonal transforms applied to graded
columns, so small singular values and their vectors come out with high
relative accuracy while everything stays in ordinary doubles.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import SpectralError


@dataclass
class CauchyRRD:
    """Rank-revealing factorization matrix[rperm][:, cperm] ~= L @ diag(d) @ U."""

    rperm: np.ndarray
    cperm: np.ndarray
    L: np.ndarray
    d: np.ndarray
    U: np.ndarray

    @property
    def rank(self) -> int:
        return self.d.size


def gecp_cauchy(x_nodes, y_nodes, scale: float, floor_rel: float = 1e-28) -> CauchyRRD:
    """Complete-pivoting elimination of C[i, j] = scale / (y_j - x_i).

    Stops once the pivot magnitude falls below floor_rel times the first
    pivot; the discarded remainder perturbs the spectrum by at most that
    scale.  All Schur updates are multiplicative in exact node
    differences, never additive.
    """
    xa = np.array(x_nodes, dtype=float, copy=True)
    ya = np.array(y_nodes, dtype=float, copy=True)
    m, n = xa.size, ya.size
    S = scale / (ya[None, :] - xa[:, None])
    rperm = np.arange(m)
    cperm = np.arange(n)
    r_max = min(m, n)
    L = np.zeros((m, r_max))
    U = np.zeros((r_max, n))
    d = np.zeros(r_max)
    rank = 0
    piv0 = 0.0
    for k in range(r_max):
        blk = S[k:, k:]
        pi, pj = np.unravel_index(np.abs(blk).argmax(), blk.shape)
        pi += k
        pj += k
        piv = S[pi, pj]
        if k == 0:
            piv0 = abs(piv)
            if piv0 == 0.0:
                break
        if abs(piv) <= floor_rel * piv0:
            break
        if pi != k:
            S[[k, pi], :] = S[[pi, k], :]
            xa[[k, pi]] = xa[[pi, k]]
            rperm[[k, pi]] = rperm[[pi, k]]
            L[[k, pi], :] = L[[pi, k], :]
        if pj != k:
            S[:, [k, pj]] = S[:, [pj, k]]
            ya[[k, pj]] = ya[[pj, k]]
            cperm[[k, pj]] = cperm[[pj, k]]
            U[:, [k, pj]] = U[:, [pj, k]]
        d[k] = S[k, k]
        L[k, k] = 1.0
        U[k, k] = 1.0
        L[k + 1:, k] = S[k + 1:, k] / S[k, k]
        U[k, k + 1:] = S[k, k + 1:] / S[k, k]
        xi = xa[k + 1:]
        yj = ya[k + 1:]
        S[k + 1:, k + 1:] *= ((xi - xa[k]) / (xi - ya[k]))[:, None] \
            * ((yj - ya[k]) / (yj - xa[k]))[None, :]
        rank = k + 1
    return CauchyRRD(rperm=rperm, cperm=cperm, L=L[:, :rank], d=d[:rank], U=U[:rank, :])


def _split_blocks(diag, block_range=1e8, gap_min=30.0):
    """Partition a graded diagonal into moderate-range scale blocks.

    A new block starts only where the running dynamic range exceeds
    block_range AND the local consecutive gap exceeds gap_min, so block
    boundaries always sit at genuine scale gaps (the gap drives the
    decoupling speed of the QR iteration).
    """
    r = diag.size
    if r == 0:
        return []
    blocks = []
    start = 0
    cur_max = diag[0]
    for i in range(1, r):
        di = max(diag[i], 1e-300)
        if cur_max / di > block_range and diag[i - 1] / di > gap_min:
            blocks.append((start, i))
            start = i
            cur_max = diag[i]
        else:
            cur_max = max(cur_max, diag[i])
    blocks.append((start, r))
    return blocks


def svd_from_rrd(L, d, U, max_flips: int = 16, cross_abs_tol: float = 1e-12,
                 cross_rel_tol: float = 1e-9):
    """SVD of L @ diag(d) @ U from a rank-revealing decomposition.

    Returns (left, sigma, right) with left (m x r) and right (n x r)
    orthonormal and sigma descending.  Raises SpectralError if the QR
    iteration fails to decouple the scale blocks, which for graded
    spectra indicates a gap structure outside this solver's assumptions.
    """
    m, r = L.shape
    n = U.shape[1]
    if r == 0:
        return np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0))

    X = L * d[None, :]
    Q0, R0, piv0 = sla.qr(X, mode="economic", pivoting=True)
    W = R0 @ U[piv0, :]

    Q1, R1, p1 = sla.qr(W.T, mode="economic", pivoting=True)
    left = np.zeros((r, r))
    left[p1, np.arange(r)] = 1.0
    T = R1.T
    right = Q1
    lower = True

    crossF = np.inf
    rel = np.inf
    for _ in range(max_flips):
        if lower:
            Q2, R2, p2 = sla.qr(T, mode="economic", pivoting=True)
            left = left @ Q2
            right = right[:, p2]
            T = R2
        else:
            Q2, R2, p2 = sla.qr(T.T, mode="economic", pivoting=True)
            left = left[:, p2]
            right = right @ Q2
            T = R2.T
        lower = not lower
        dg = np.abs(np.diag(T))
        blocks = _split_blocks(dg)
        E = T.copy()
        for a, b in blocks:
            E[a:b, a:b] = 0.0
        crossF = float(np.linalg.norm(E))
        col_f = np.sqrt((E ** 2).sum(axis=0))
        rel = float((col_f / np.maximum(dg, 1e-300)).max()) if r else 0.0
        if crossF <= cross_abs_tol * dg.max() and rel <= cross_rel_tol:
            break
    else:
        raise SpectralError(
            f"scale blocks did not decouple in {max_flips} QR iterations "
            f"(cross norm {crossF:.2e}, worst relative coupling {rel:.2e})")

    dg = np.abs(np.diag(T))
    blocks = _split_blocks(dg)
    Ub = np.zeros((r, r))
    Vb = np.zeros((r, r))
    s = np.zeros(r)
    for a, b in blocks:
        u, sv, vt = np.linalg.svd(T[a:b, a:b])
        Ub[a:b, a:b] = u
        Vb[a:b, a:b] = vt.T
        s[a:b] = sv

    order = np.argsort(s)[::-1]
    left_full = Q0 @ (left @ Ub)
    right_full = right @ Vb
    return left_full[:, order], s[order], right_full[:, order]


def accurate_cauchy_svd(x_nodes, y_nodes, scale: float, floor_rel: float = 1e-28):
    """Full pipeline: returns (data_vectors, sigmas, object_vectors).

    data_vectors is (len(x), r), object_vectors is (len(y), r), both with
    orthonormal columns in the original (unpermuted) index order.
    """
    rrd = gecp_cauchy(x_nodes, y_nodes, scale, floor_rel=floor_rel)
    left, s, right = svd_from_rrd(rrd.L, rrd.d, rrd.U)
    data_vecs = np.zeros_like(left)
    data_vecs[rrd.rperm, :] = left
    obj_vecs = np.zeros_like(right)
    obj_vecs[rrd.cperm, :] = right
    return data_vecs, s, obj_vecs
