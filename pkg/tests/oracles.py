"""Independent reference implementations used to cross-check the library.

The oracle functions in this file deliberately avoid the library's code
paths: the differential is the alternating-sum definition evaluated with
plain loops, the star operator goes through the Levi-Civita symbol, and the
Ricci oracle walks Koszul -> Christoffels -> curvature tensor -> trace.
They are slow and only meant for small dimensions.

The data generators at the bottom may use the library (conjugating a known
nilpotent bracket by a random basis change is generation, not verification).
"""

import itertools
import math

import numpy as np

from nilflow import LieBracket, gl_action


def perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def levi_civita(n):
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        eps[perm] = perm_sign(perm)
    return eps


def dense_ce(omega_dense, m):
    """Chevalley-Eilenberg differential by the alternating-sum definition.

    omega_dense: dense alternating k-tensor (k >= 1); m: bracket array.
    Returns the dense (k+1)-tensor of d omega.
    """
    omega_dense = np.asarray(omega_dense, dtype=float)
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    k = omega_dense.ndim
    out = np.zeros((n,) * (k + 1))
    for idx in itertools.product(range(n), repeat=k + 1):
        acc = 0.0
        for p in range(k + 1):
            for q in range(p + 1, k + 1):
                rest = tuple(idx[r] for r in range(k + 1) if r != p and r != q)
                inner = 0.0
                for l in range(n):
                    c = m[idx[p], idx[q], l]
                    if c != 0.0:
                        inner += c * omega_dense[(l,) + rest]
                acc += (-1) ** (p + q) * inner
        out[idx] = acc
    return out


def dense_inner(a_dense, b_dense, G):
    """<a, b>_g = (1/k!) a_{I} b_{J} g^{i1 j1} ... g^{ik jk}."""
    a = np.asarray(a_dense, dtype=float)
    b = np.asarray(b_dense, dtype=float)
    ginv = np.linalg.inv(np.asarray(G, dtype=float))
    k = a.ndim
    raised = a.copy()
    for ax in range(k):
        raised = np.moveaxis(np.tensordot(raised, ginv, axes=(ax, 0)), -1, ax)
    if k == 0:
        return float(raised * b)
    return float(np.tensordot(raised, b, axes=(tuple(range(k)), tuple(range(k))))
                 / math.factorial(k))


def dense_star(omega_dense, G, orientation=1):
    """Hodge star via the Levi-Civita symbol.

    (star w)_J = (1/k!) w^{I} eps_{I J} * orientation * sqrt(det g).
    Returns the dense (n-k)-tensor.
    """
    w = np.asarray(omega_dense, dtype=float)
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    k = w.ndim
    ginv = np.linalg.inv(G)
    raised = w.copy()
    for ax in range(k):
        raised = np.moveaxis(np.tensordot(raised, ginv, axes=(ax, 0)), -1, ax)
    eps = levi_civita(n)
    scale = orientation * math.sqrt(np.linalg.det(G))
    if k == 0:
        return float(raised) * scale * eps
    out = np.tensordot(raised, eps, axes=(tuple(range(k)), tuple(range(k))))
    return out * (scale / math.factorial(k))


def koszul_christoffels(m, G):
    """Gamma[i, j, k] from the Koszul formula, solved against G with plain loops."""
    m = np.asarray(m, dtype=float)
    G = np.asarray(G, dtype=float)
    n = m.shape[0]
    rhs = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                rhs[i, j, k] = 0.5 * (m[i, j] @ G[:, k]
                                      - m[j, k] @ G[:, i]
                                      + m[k, i] @ G[:, j])
    # rhs[i, j, k] = g(nabla_i e_j, e_k) = Gamma[i, j, l] G[l, k]
    return np.linalg.solve(G.T, rhs.reshape(n * n, n).T).T.reshape(n, n, n)


def ricci_riemann(m, G):
    """Ricci bilinear form via the curvature tensor and a trace.

    R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{mu(X,Y)} Z,
    Ric(Y, Z) = trace of X -> R(X, Y)Z.
    """
    m = np.asarray(m, dtype=float)
    G = np.asarray(G, dtype=float)
    n = m.shape[0]
    gam = koszul_christoffels(m, G)
    grad2 = np.einsum('jkm,iml->ijkl', gam, gam)  # nabla_i nabla_j e_k
    R = grad2 - np.einsum('ikm,jml->ijkl', gam, gam) - np.einsum('ijm,mkl->ijkl', m, gam)
    return np.einsum('ijki->jk', R)


# ---------------------------------------------------------------------------
# reference brackets (0-based entry rows (i, j, k, value), i < j)

HEIS3 = ((0, 1, 2, 1.0),)
# filiform: mu(e1,e2)=e3, mu(e1,e3)=e4
FILIFORM4 = ((0, 1, 2, 1.0), (0, 2, 3, 1.0))
# 5-dim Heisenberg: mu(e1,e2)=e5, mu(e3,e4)=e5
HEIS5 = ((0, 1, 4, 1.0), (2, 3, 4, 1.0))
# sl2-type: not nilpotent
SL2 = ((0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0))
# affine/solvable on R^2 (+ trivial factor): Lie but not nilpotent
AFFINE = ((0, 1, 1, 1.0),)


def bracket_from(entries, dim):
    return LieBracket.from_entries(dim, entries, one_based=False)


_NILPOTENT_SEEDS = {3: HEIS3, 4: FILIFORM4, 5: HEIS5}


def random_basis_change(rng, n, spread=0.3):
    while True:
        A = np.eye(n) + spread * rng.uniform(-1.0, 1.0, size=(n, n))
        if np.linalg.cond(A) < 50.0:
            return A


def random_nilpotent(rng, dim):
    """A Jacobi-exact nilpotent bracket in a random (well-conditioned) basis."""
    seed = _NILPOTENT_SEEDS[min(max(dim, 3), 5)]
    entries = [row for row in seed if max(row[:3]) < dim]
    base = bracket_from(tuple(entries), dim)
    return gl_action(random_basis_change(rng, dim), base)


def random_spd(rng, n, spread=0.8):
    B = rng.uniform(-1.0, 1.0, size=(n, n))
    return spread * (B @ B.T) + np.eye(n) * (0.5 + n * 0.25)


def random_form_coeffs(rng, n, k):
    return rng.standard_normal(math.comb(n, k))


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_skew_bracket(rng, n, scale=1.0):
    """Raw skew (n,n,n) array; generically violates Jacobi."""
    raw = rng.uniform(-1.0, 1.0, size=(n, n, n)) * scale
    return (raw - raw.swapaxes(0, 1)) / 2.0
