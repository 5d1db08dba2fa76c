"""Structure constants, exterior forms, and the basis-change action.

A bilinear bracket on R^n is stored as the dense array mu[i, j, k] with
mu(e_i, e_j) = sum_k mu[i, j, k] e_k, exactly skew in (i, j).  Left-invariant
k-forms are stored packed: one coefficient per strictly increasing index
tuple, lexicographic order.  All in-memory indices are 0-based; file formats
and printed labels are 1-based.

The GL_n change-of-basis action is (A.mu)(X, Y) = A mu(A^-1 X, A^-1 Y) on
brackets and (A.w)(X_1, ..., X_k) = w(A^-1 X_1, ..., A^-1 X_k) on forms; pi
is its derivative at the identity, so curves A(s) = exp(s phi) satisfy
d/ds A(s).mu = pi(phi) mu at s = 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import RANK_TOL_FACTOR, SKEW_TOL
from .errors import ValidationError


@lru_cache(maxsize=None)
def index_tuples(n, k):
    """All strictly increasing k-tuples drawn from range(n), lexicographic."""
    if k < 0:
        return ()
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def _tuple_rank(n, k):
    return {t: r for r, t in enumerate(index_tuples(n, k))}


def sort_sign(indices):
    """Sort an index tuple; return (sorted tuple, permutation sign).

    The sign is 0 when an index repeats, so the tuple addresses no packed slot.
    """
    arr = list(indices)
    sign = 1
    for i in range(1, len(arr)):  # insertion sort; k is tiny
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(arr, arr[1:]):
        if a == b:
            return tuple(arr), 0
    return tuple(arr), sign


def complement(indices, n):
    """Increasing complement of an index tuple inside range(n)."""
    hit = set(indices)
    return tuple(i for i in range(n) if i not in hit)


def shuffle_sign(first, second):
    """Sign of the permutation (first + second) of range(n), both halves increasing."""
    inversions = sum(1 for a in first for b in second if b < a)
    return -1 if inversions % 2 else 1


def compound_matrix(mat, k):
    """k-th compound of a square matrix: entry (R, C) = det(mat[R rows, C cols]).

    Rows and columns run over index_tuples(n, k).  For an SPD inverse metric
    this is the Gram matrix of the induced inner product on k-forms:
    <e^R, e^C>_g = det(g^{r_a c_b}).
    """
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[0]
    if k == 0:
        return np.ones((1, 1))
    idx = index_tuples(n, k)
    m = len(idx)
    subs = np.empty((m, m, k, k))
    for r, rows in enumerate(idx):
        sliced = mat[list(rows), :]
        for c, cols in enumerate(idx):
            subs[r, c] = sliced[:, list(cols)]
    return np.linalg.det(subs)


def _alternation(arr):
    """Full antisymmetrization of a dense tensor (average over signed permutations)."""
    k = arr.ndim
    if k <= 1:
        return np.array(arr, dtype=float)
    out = np.zeros_like(arr, dtype=float)
    for perm in itertools.permutations(range(k)):
        _, sign = sort_sign(perm)
        out += sign * np.transpose(arr, perm)
    return out / math.factorial(k)


@dataclass(frozen=True)
class KForm:
    """Left-invariant alternating k-form in packed storage.

    coeffs has one entry per strictly increasing index tuple (lexicographic);
    comb(dim, degree) entries total, which is 0 when degree > dim.
    """

    dim: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValidationError(f"form dimension must be a positive int, got {self.dim!r}")
        if not isinstance(self.degree, int) or self.degree < 0:
            raise ValidationError(f"form degree must be a nonnegative int, got {self.degree!r}")
        arr = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        want = math.comb(self.dim, self.degree)
        if arr.shape != (want,):
            raise ValidationError(
                f"degree-{self.degree} form on R^{self.dim} needs {want} packed "
                f"coefficients, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("form coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree, np.zeros(math.comb(dim, max(degree, 0))))

    @classmethod
    def from_entries(cls, dim, degree, entries, one_based=True):
        """Build from (index_tuple, value) pairs; indices in any order, sign handled.

        Listing the same slot twice with inconsistent values is an error;
        consistent repeats are allowed.
        """
        shift = 1 if one_based else 0
        ranks = _tuple_rank(dim, degree)
        coeffs = np.zeros(math.comb(dim, degree))
        seen = {}
        for raw_idx, value in entries:
            idx = tuple(int(i) - shift for i in raw_idx)
            if len(idx) != degree:
                raise ValidationError(f"form entry {raw_idx} has {len(idx)} indices, expected {degree}")
            for i in idx:
                if not 0 <= i < dim:
                    raise ValidationError(f"form index out of range in entry {raw_idx} (dim {dim})")
            key, sign = sort_sign(idx)
            if sign == 0:
                raise ValidationError(f"form entry {raw_idx} repeats an index")
            normalized = sign * float(value)
            if key in seen and seen[key] != normalized:
                raise ValidationError(
                    f"inconsistent duplicate form entries for slot {tuple(k + shift for k in key)}")
            seen[key] = normalized
            coeffs[ranks[key]] = normalized
        return cls(dim, degree, coeffs)

    @classmethod
    def from_dense(cls, arr, tol=SKEW_TOL):
        """Pack a dense alternating tensor, checking alternation up to tol (relative)."""
        arr = np.asarray(arr, dtype=float)
        k = arr.ndim
        if k == 0:
            return cls(1, 0, np.array([float(arr)]))  # degenerate; prefer explicit dim
        n = arr.shape[0]
        if arr.shape != (n,) * k:
            raise ValidationError(f"dense form tensor must be cubical, got shape {arr.shape}")
        alt = _alternation(arr)
        scale = 1.0 + float(np.max(np.abs(arr))) if arr.size else 1.0
        if arr.size and float(np.max(np.abs(arr - alt))) > tol * scale:
            raise ValidationError("dense tensor is not alternating")
        coeffs = np.array([alt[t] for t in index_tuples(n, k)])
        return cls(n, k, coeffs)

    def unpack(self):
        """Dense fully alternating tensor of shape (dim,) * degree."""
        n, k = self.dim, self.degree
        dense = np.zeros((n,) * k)
        for r, base in enumerate(index_tuples(n, k)):
            v = self.coeffs[r]
            if v == 0.0:
                continue
            for perm in itertools.permutations(base):
                _, sign = sort_sign(perm)
                dense[perm] = sign * v
        return dense

    def component(self, indices):
        """Value on basis vectors e_{i_1}, ..., e_{i_k} (0-based, any order)."""
        key, sign = sort_sign(indices)
        if sign == 0:
            return 0.0
        rank = _tuple_rank(self.dim, self.degree).get(key)
        if rank is None:
            raise ValidationError(f"index tuple {indices} invalid for dim {self.dim}")
        return sign * float(self.coeffs[rank])

    @property
    def norm_inf(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def _check_compatible(self, other):
        if not isinstance(other, KForm) or other.dim != self.dim or other.degree != self.degree:
            raise ValidationError("form arithmetic requires matching dim and degree")

    def __add__(self, other):
        self._check_compatible(other)
        return KForm(self.dim, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return KForm(self.dim, self.degree, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return KForm(self.dim, self.degree, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return KForm(self.dim, self.degree, -self.coeffs)

    def allclose(self, other, tol=1e-12):
        self._check_compatible(other)
        if self.coeffs.size == 0:
            return True
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)


@dataclass(frozen=True)
class LieBracket:
    """Skew bilinear bracket in a fixed basis; Jacobi is checked, not enforced.

    Storage is exactly skew: the constructor rejects inputs whose symmetric
    leak exceeds SKEW_TOL (relative) and stores the exact skew part
    (m - m.swapaxes(0, 1)) / 2, which is bitwise skew.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float, copy=True)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise ValidationError(f"bracket coefficients must be (n, n, n), got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("bracket coefficients must be finite")
        swapped = arr.swapaxes(0, 1)
        scale = 1.0 + float(np.max(np.abs(arr)))
        if float(np.max(np.abs(arr + swapped))) > SKEW_TOL * scale:
            raise ValidationError("bracket coefficients are not skew in the first two indices")
        arr = (arr - swapped) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def dim(self):
        return self.coeffs.shape[0]

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, dim, dim)))

    @classmethod
    def from_entries(cls, dim, entries, one_based=True):
        """Build from rows (i, j, k, value); only one of (i,j)/(j,i) need be given.

        Skew completion is automatic.  Giving both orders with inconsistent
        values (or repeating a slot with a different value) is an error.
        """
        shift = 1 if one_based else 0
        arr = np.zeros((dim, dim, dim))
        seen = {}
        for row in entries:
            if len(row) != 4:
                raise ValidationError(f"bracket entry {row!r} must be (i, j, k, value)")
            i, j, k = (int(x) - shift for x in row[:3])
            v = float(row[3])
            for x in (i, j, k):
                if not 0 <= x < dim:
                    raise ValidationError(f"bracket index out of range in entry {row!r} (dim {dim})")
            if i == j:
                raise ValidationError(f"bracket entry {row!r} has i == j")
            key, val = ((i, j, k), v) if i < j else ((j, i, k), -v)
            if key in seen and seen[key] != val:
                raise ValidationError(
                    f"inconsistent duplicate bracket entries for slot "
                    f"{(key[0] + shift, key[1] + shift, key[2] + shift)}")
            seen[key] = val
            arr[key] = val
            arr[key[1], key[0], key[2]] = -val
        return cls(arr)

    @property
    def norm_inf(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0


def bracket_coeffs(mu):
    """Dense (n, n, n) coefficient array from a LieBracket or raw array-like.

    Raw arrays pass through without the skewness check so that residual
    diagnostics can be run on corrupted or perturbed data.
    """
    if isinstance(mu, LieBracket):
        return mu.coeffs
    arr = np.asarray(mu, dtype=float)
    if arr.ndim != 3 or len(set(arr.shape)) != 1:
        raise ValidationError(f"bracket coefficients must be (n, n, n), got shape {arr.shape}")
    return arr


def form_dense(H, dim, degree):
    """Dense tensor from a KForm or an already-dense array-like."""
    if isinstance(H, KForm):
        if H.dim != dim or H.degree != degree:
            raise ValidationError(
                f"expected a degree-{degree} form on R^{dim}, got degree {H.degree} on R^{H.dim}")
        return H.unpack()
    arr = np.asarray(H, dtype=float)
    if arr.shape != (dim,) * degree:
        raise ValidationError(f"dense form must have shape {(dim,) * degree}, got {arr.shape}")
    return arr


def jacobi_residual(mu):
    """Sup-norm of the Jacobiator mu(mu(.,.),.) + cyclic over all basis triples."""
    m = bracket_coeffs(mu)
    jac = (np.einsum('ijl,lkm->ijkm', m, m)
           + np.einsum('jkl,lim->ijkm', m, m)
           + np.einsum('kil,ljm->ijkm', m, m))
    return float(np.max(np.abs(jac))) if jac.size else 0.0


def nilpotency_step(mu, rank_tol_factor=RANK_TOL_FACTOR):
    """Nilpotency step of the lower central series, or None if it stabilizes nonzero.

    Ranks are decided by SVD with cutoff rank_tol_factor times the largest
    singular value of the stage matrix.
    """
    m = bracket_coeffs(mu)
    n = m.shape[0]
    basis = np.eye(n)
    prev_rank = n
    step = 1
    scale = None  # largest singular value of the first stage; fixes the rank cutoff
    while True:
        img = np.einsum('ijk,ja->kia', m, basis).reshape(n, -1)
        u, s, _ = np.linalg.svd(img, full_matrices=False)
        if scale is None:
            scale = float(s[0]) if s.size else 0.0
        rank = int(np.sum(s > rank_tol_factor * scale)) if scale > 0.0 else 0
        if rank == 0:
            return step
        if rank >= prev_rank:
            return None
        basis = u[:, :rank]
        prev_rank = rank
        step += 1


def ce_differential(omega, mu):
    """Chevalley-Eilenberg differential of a k-form.

    (d w)(X_0, ..., X_k) = sum_{p<q} (-1)^{p+q} w(mu(X_p, X_q), ..no X_p, X_q..),
    evaluated on basis tuples.  Degree n forms map to the empty degree n+1 space.
    """
    m = bracket_coeffs(mu)
    n, k = omega.dim, omega.degree
    if m.shape[0] != n:
        raise ValidationError("form and bracket dimensions differ")
    out_tuples = index_tuples(n, k + 1)
    out = np.zeros(len(out_tuples))
    for r, T in enumerate(out_tuples):
        acc = 0.0
        for p in range(k + 1):
            for q in range(p + 1, k + 1):
                rest = T[:p] + T[p + 1:q] + T[q + 1:]
                inner = 0.0
                for l in range(n):
                    c = m[T[p], T[q], l]
                    if c != 0.0:
                        inner += c * omega.component((l,) + rest)
                if (p + q) % 2:
                    acc -= inner
                else:
                    acc += inner
        out[r] = acc
    return KForm(n, k + 1, out)


def wedge(alpha, beta):
    """Exterior product, determinant convention: e^I wedge e^J = sign e^{I cup J}."""
    if alpha.dim != beta.dim:
        raise ValidationError("wedge requires forms on the same space")
    n = alpha.dim
    k, l = alpha.degree, beta.degree
    ranks = _tuple_rank(n, k + l)
    out = np.zeros(math.comb(n, k + l))
    for ra, A in enumerate(index_tuples(n, k)):
        va = alpha.coeffs[ra]
        if va == 0.0:
            continue
        for rb, B in enumerate(index_tuples(n, l)):
            vb = beta.coeffs[rb]
            if vb == 0.0:
                continue
            merged, sign = sort_sign(A + B)
            if sign != 0:
                out[ranks[merged]] += sign * va * vb
    return KForm(n, k + l, out)


def _checked_inverse(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"basis change must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("basis change entries must be finite")
    try:
        cond = np.linalg.cond(A)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not cond < 1e12:
        raise ValidationError("basis change matrix is singular or near-singular")
    return A, np.linalg.inv(A)


def gl_action(A, mu):
    """Basis change on brackets: (A.mu)(X, Y) = A mu(A^-1 X, A^-1 Y)."""
    m = bracket_coeffs(mu)
    A, Ainv = _checked_inverse(A)
    out = np.einsum('ai,bj,kl,abl->ijk', Ainv, Ainv, A, m, optimize=True)
    return LieBracket(out)


def gl_action_form(A, omega):
    """Basis change on forms: (A.w)(X_1, ..., X_k) = w(A^-1 X_1, ..., A^-1 X_k)."""
    _, Ainv = _checked_inverse(A)
    comp = compound_matrix(Ainv, omega.degree)
    return KForm(omega.dim, omega.degree, comp.T @ omega.coeffs)


def pi_mu(phi, mu):
    """Derivative of gl_action at the identity, as a dense (n, n, n) array.

    pi(phi)mu = phi mu(.,.) - mu(phi., .) - mu(., phi.), the tangent direction
    of the curve exp(s phi).mu at s = 0.  phi is a matrix acting by phi @ x.
    """
    m = bracket_coeffs(mu)
    P = np.asarray(phi, dtype=float)
    return (np.einsum('kl,ijl->ijk', P, m)
            - np.einsum('li,ljk->ijk', P, m)
            - np.einsum('lj,ilk->ijk', P, m))


def pi_form(phi, omega):
    """Derivative of gl_action_form at the identity: minus phi inserted slotwise."""
    P = np.asarray(phi, dtype=float)
    n, k = omega.dim, omega.degree
    tups = index_tuples(n, k)
    out = np.zeros(len(tups))
    for r, T in enumerate(tups):
        acc = 0.0
        for t in range(k):
            for l in range(n):
                c = P[l, T[t]]
                if c != 0.0:
                    acc -= c * omega.component(T[:t] + (l,) + T[t + 1:])
        out[r] = acc
    return KForm(n, k, out)
