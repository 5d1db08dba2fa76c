"""Derivation spaces and generalized soliton fitting.

A metric g on a Lie algebra (mu, H, theta) is a generalized soliton when

  symmetric part:  Rc_g = lam g + g(D ., .) + 1/4 H.H - 1/2 S(nabla^+ theta)
  skew part:       omega = -d*H + 1/2 d theta - 1/2 iota_{g^-1 theta} H

for a constant lam, a g-symmetric derivation D, and a 2-form omega.  The fit
solves the symmetric equation by linear least squares over lam and the space
of g-symmetric derivations (Frobenius objective, minimum-norm solution when
the decomposition is not unique) and takes omega from the skew equation,
which determines it explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RANK_TOL_FACTOR
from .curvature import (bismut_nabla_theta, h_circ_h, rc_metric, require_closed,
                        symmetric_part, _as_3form, _theta_vector)
from .errors import ValidationError
from .hodge import as_metric, codifferential
from .lie import KForm, bracket_coeffs, ce_differential


@dataclass(frozen=True)
class SolitonData:
    """Result of a soliton fit: the triple (lam, D, omega) and its residuals.

    residual_norm is max(sym_residual, skew_residual), both sup-norms; it is
    what soliton_residual reports back on the fitted data.
    """

    lam: float
    D: np.ndarray
    omega: KForm
    sym_residual: float
    skew_residual: float
    residual_norm: float


def _derivation_constraint_matrix(m):
    # Rows: the linear map phi -> pi(phi)mu flattened to (n^3, n^2); null space = Der(mu).
    n = m.shape[0]
    eye = np.eye(n)
    a1 = np.einsum('kr,ijs->ijkrs', eye, m)
    a2 = np.einsum('is,rjk->ijkrs', eye, m)
    a3 = np.einsum('js,irk->ijkrs', eye, m)
    return (a1 - a2 - a3).reshape(n ** 3, n * n)


def _null_space(mat, rank_tol_factor):
    _, s, vt = np.linalg.svd(mat, full_matrices=False)
    smax = float(s[0]) if s.size else 0.0
    rank = int(np.sum(s > rank_tol_factor * smax)) if smax > 0.0 else 0
    return vt[rank:].copy()


def derivation_space(mu, rank_tol_factor=RANK_TOL_FACTOR):
    """Orthonormal basis of Der(mu) = {phi : pi(phi)mu = 0}, shape (m, n, n)."""
    m = bracket_coeffs(mu)
    n = m.shape[0]
    basis = _null_space(_derivation_constraint_matrix(m), rank_tol_factor)
    return basis.reshape(-1, n, n)


def symmetric_derivations(mu, g, rank_tol_factor=RANK_TOL_FACTOR):
    """Orthonormal basis of the g-symmetric derivations {phi in Der(mu) : g phi = (g phi)^T}."""
    m = bracket_coeffs(mu)
    n = m.shape[0]
    gm = as_metric(g)
    if gm.dim != n:
        raise ValidationError("bracket and metric dimensions differ")
    eye = np.eye(n)
    G = gm.entries
    # (g phi - phi^T g)[i, j] as a linear map of phi[r, s]
    sym = (np.einsum('ir,js->ijrs', G, eye)
           - np.einsum('jr,is->ijrs', G, eye)).reshape(n * n, n * n)
    stacked = np.vstack([_derivation_constraint_matrix(m), sym])
    return _null_space(stacked, rank_tol_factor).reshape(-1, n, n)


def _skew_target(mu, gm, H, theta_vec):
    # -d*H + 1/2 d theta - 1/2 iota_{g^-1 theta} H, as a 2-form
    n = gm.dim
    theta_form = KForm(n, 1, theta_vec)
    dstar = codifferential(H, mu, gm)
    dth = ce_differential(theta_form, mu)
    xi = gm.inverse @ theta_vec
    iota = KForm.from_dense(np.einsum('i,ijk->jk', xi, H.unpack()))
    return -1.0 * dstar + 0.5 * dth - 0.5 * iota


def soliton_residual(mu, g, H, theta, lam, D, omega):
    """Sup-norm residuals (symmetric, skew) of the soliton equations at given data."""
    gm = as_metric(g)
    n = gm.dim
    H = _as_3form(H, n)
    require_closed(mu, H)
    th = _theta_vector(theta, n)
    Dm = np.asarray(D, dtype=float)
    if Dm.shape != (n, n):
        raise ValidationError(f"D must be an {n}x{n} matrix")
    if not (isinstance(omega, KForm) and omega.degree == 2 and omega.dim == n):
        raise ValidationError("omega must be a 2-form matching the problem dimension")
    G = gm.entries
    sym_lhs = (rc_metric(mu, gm) - lam * G - Dm.T @ G
               - 0.25 * h_circ_h(H, gm)
               + 0.5 * symmetric_part(bismut_nabla_theta(mu, gm, H, th)))
    skew_lhs = omega - _skew_target(mu, gm, H, th)
    sym_res = float(np.max(np.abs(sym_lhs)))
    return sym_res, skew_lhs.norm_inf


def soliton_fit(mu, g, H, theta, rank_tol_factor=RANK_TOL_FACTOR):
    """Best generalized-soliton data (lam, D, omega) for (mu, g, H, theta).

    lam and D solve the symmetric equation in the Frobenius norm over
    lam g + g(D .,.) with D in the g-symmetric derivations; rank-deficient
    systems take the minimum-norm solution.  omega is read off the skew
    equation exactly.
    """
    gm = as_metric(g)
    n = gm.dim
    H = _as_3form(H, n)
    require_closed(mu, H)
    th = _theta_vector(theta, n)
    G = gm.entries

    target = (rc_metric(mu, gm)
              - 0.25 * h_circ_h(H, gm)
              + 0.5 * symmetric_part(bismut_nabla_theta(mu, gm, H, th)))

    basis = symmetric_derivations(mu, gm, rank_tol_factor)
    cols = [G.ravel()]
    cols.extend((b.T @ G).ravel() for b in basis)
    design = np.stack(cols, axis=1)
    coef, _, _, _ = np.linalg.lstsq(design, target.ravel(), rcond=None)

    lam = float(coef[0])
    if len(basis):
        Dm = np.einsum('b,bij->ij', coef[1:], basis)
    else:
        Dm = np.zeros((n, n))
    omega = _skew_target(mu, gm, H, th)
    sym_res, skew_res = soliton_residual(mu, gm, H, th, lam, Dm, omega)
    return SolitonData(lam=lam, D=Dm, omega=omega, sym_residual=sym_res,
                       skew_residual=skew_res, residual_norm=max(sym_res, skew_res))
