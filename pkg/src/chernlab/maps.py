"""Holomorphic maps between charted Hermitian manifolds.

Jacobians use complex-direction central differences (valid by holomorphy,
guarded by a Cauchy-Riemann residual check); the energy density is the
metric trace of the pullback ``tr_omega(f* eta)``; singular values and
frames come from a generalized SVD whitened by the two Cholesky factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    BadParams,
    DimensionMismatch,
    DomainMarginError,
    InverseSolveError,
    NearCriticalPoint,
    NotHolomorphicAtPoint,
    NotPositiveDefinite,
    RankDeficient,
    UnknownCatalogName,
)
from .fd import D1_OFFSETS, D1_WEIGHTS, wirtinger_hessian
from .metrics import Domain
from .tensors import hermitian_inverse, hermitize

__all__ = [
    "HolomorphicMapModel",
    "SingularFrameData",
    "catalog_map",
    "energy_density",
    "jacobian",
    "laplacian_energy",
    "laplacian_log_energy",
    "map_compose",
    "map_identity",
    "map_linear",
    "map_mobius",
    "map_power",
    "map_product",
    "map_scaling",
    "map_in_frames",
    "pullback_metric",
    "singular_frames",
]


@dataclass(frozen=True)
class HolomorphicMapModel:
    """A holomorphic map ``f: C^n -> C^m`` between charts.

    ``inverse`` (when known in closed form) maps target points back to the
    source; maps without one fall back to damped Newton preimage solves.
    """

    source_dim: int
    target_dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"
    inverse: Callable[[np.ndarray], np.ndarray] | None = None
    domain: Domain | None = None

    def __call__(self, z):
        w = np.atleast_1d(np.asarray(self.evaluator(np.asarray(z, dtype=complex)), dtype=complex))
        if w.shape != (self.target_dim,):
            raise ValueError(f"map returned shape {w.shape}, expected ({self.target_dim},)")
        return w


def map_identity(n):
    return HolomorphicMapModel(n, n, lambda z: z.copy(), "identity", inverse=lambda w: w.copy())


def map_scaling(c, n=1):
    c = complex(c)
    if c == 0:
        raise BadParams("scaling factor must be nonzero")
    return HolomorphicMapModel(
        n, n, lambda z: c * z, f"scaling({c})", inverse=lambda w: w / c
    )


def map_linear(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise BadParams("linear map expects a matrix")
    m, n = a.shape
    inverse = None
    if m == n and abs(np.linalg.det(a)) > 1e-14:
        a_inv = np.linalg.inv(a)
        inverse = lambda w: a_inv @ w
    return HolomorphicMapModel(n, m, lambda z: a @ z, "linear", inverse=inverse)


def map_power(k):
    k = int(k)
    if k < 1:
        raise BadParams("power exponent must be a positive integer")
    inverse = (lambda w: w.copy()) if k == 1 else None
    return HolomorphicMapModel(1, 1, lambda z: z**k, f"power({k})", inverse=inverse)


def map_mobius(a):
    """Disk automorphism ``z -> (z + a) / (1 + conj(a) z)``, |a| < 1."""
    a = complex(a)
    if abs(a) >= 1:
        raise BadParams("mobius parameter must satisfy |a| < 1")
    ac = a.conjugate()

    def ev(z):
        return (z + a) / (1.0 + ac * z)

    def inv(w):
        return (w - a) / (1.0 - ac * w)

    return HolomorphicMapModel(
        1, 1, ev, f"mobius({a})", inverse=inv, domain=Domain(center=(0.0,), radius=1.0)
    )


def map_product(factors):
    """Product map acting blockwise: ``(z_1, ..) -> (f_1(z_1), ..)``."""
    factors = list(factors)
    n = sum(f.source_dim for f in factors)
    m = sum(f.target_dim for f in factors)

    def ev(z):
        out, pos = [], 0
        for f in factors:
            out.append(f(z[pos : pos + f.source_dim]))
            pos += f.source_dim
        return np.concatenate(out)

    inverse = None
    if all(f.inverse is not None for f in factors):

        def inverse(w):
            out, pos = [], 0
            for f in factors:
                out.append(np.atleast_1d(f.inverse(w[pos : pos + f.target_dim])))
                pos += f.target_dim
            return np.concatenate(out)

    return HolomorphicMapModel(n, m, ev, "product", inverse=inverse)


def map_compose(outer, inner):
    """Composition ``outer o inner`` (target of inner feeds outer)."""
    if inner.target_dim != outer.source_dim:
        raise DimensionMismatch("composition dimensions do not match")
    inverse = None
    if inner.inverse is not None and outer.inverse is not None:
        inverse = lambda w: inner.inverse(np.atleast_1d(outer.inverse(w)))
    return HolomorphicMapModel(
        inner.source_dim,
        outer.target_dim,
        lambda z: outer(inner(z)),
        f"{outer.label}o{inner.label}",
        inverse=inverse,
        domain=inner.domain,
    )


def catalog_map(kind, **params):
    """Scenario-facing dispatcher for the map catalog."""
    if kind == "identity":
        return map_identity(int(params["dim"]))
    if kind == "scaling":
        return map_scaling(params["c"], int(params.get("dim", 1)))
    if kind == "linear":
        return map_linear(params["matrix"])
    if kind == "power":
        return map_power(params["k"])
    if kind == "mobius":
        return map_mobius(params["a"])
    if kind == "product":
        return map_product(params["factors"])
    raise UnknownCatalogName(f"unknown catalog map {kind!r}")


def jacobian(f: HolomorphicMapModel, z, h=None, cr_tol=1e-5):
    """Jacobian ``J[a, i] = d f^a / d z_i`` by 4th-order complex stencils.

    Holomorphy is checked by comparing real-direction and rotated
    (imaginary-direction) difference quotients; a Cauchy-Riemann residual
    above ``cr_tol`` raises NotHolomorphicAtPoint.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (f.source_dim,):
        raise DimensionMismatch(f"point shape {z.shape} vs source dim {f.source_dim}")
    if h is None:
        h = 1e-3 * max(1.0, float(np.linalg.norm(z)))
    if f.domain is not None and not f.domain.contains(z, margin=4.0 * h):
        raise DomainMarginError(f"point {z} too close to the map's domain boundary")

    jac = np.empty((f.target_dim, f.source_dim), dtype=complex)
    residual = 0.0
    for i in range(f.source_dim):
        e = np.zeros(f.source_dim, dtype=complex)
        e[i] = 1.0
        d_real = sum(w * f(z + off * h * e) for off, w in zip(D1_OFFSETS, D1_WEIGHTS)) / h
        d_rot = sum(w * f(z + off * 1j * h * e) for off, w in zip(D1_OFFSETS, D1_WEIGHTS)) / (1j * h)
        residual = max(residual, float(np.max(np.abs(d_real - d_rot))))
        jac[:, i] = (d_real + d_rot) / 2.0
    if residual > cr_tol:
        raise NotHolomorphicAtPoint(
            f"Cauchy-Riemann residual {residual:.3e} exceeds {cr_tol:.1e} at {z}"
        )
    return jac


def pullback_metric(f, z, target_metric, jac=None):
    """Pullback form ``(f* eta)_{i jbar} = h_{a bbar} f_i^a conj(f_j^b)``."""
    if jac is None:
        jac = jacobian(f, z)
    h_mat = target_metric(f(np.atleast_1d(np.asarray(z, dtype=complex))))
    pull = np.einsum("ab,ai,bj->ij", h_mat, jac, np.conj(jac), optimize=True)
    herm, _ = hermitize(pull)
    return herm


def energy_density(f, z, source_metric, target_metric, jac=None):
    """Energy density ``|df|^2 = tr_omega(f* eta)`` (real, nonnegative)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if jac is None:
        jac = jacobian(f, z)
    g = source_metric(z)
    pull = pullback_metric(f, z, target_metric, jac=jac)
    value = float(np.real(np.trace(hermitian_inverse(g) @ pull)))
    return max(value, 0.0)


@dataclass(frozen=True)
class SingularFrameData:
    """Singular values of the differential with realizing unitary frames.

    ``lambdas`` are non-increasing; ``rank`` counts those above tolerance.
    The stored frames satisfy ``e^dag g e = I`` (resp. with the target
    metric), diagonalize the pullback form, and realize the normal form
    through ``map_in_frames``.
    """

    lambdas: np.ndarray
    rank: int
    source_frame: np.ndarray
    target_frame: np.ndarray


def map_in_frames(jac, source_frame, target_frame):
    """Component matrix of the differential in the given unitary frames.

    With frames from ``singular_frames`` this is ``diag(lambdas)`` up to
    roundoff: ``conj(target_frame)^-1 @ jac @ conj(source_frame)``.
    """
    return np.linalg.solve(np.conj(target_frame), jac @ np.conj(source_frame))


def _chol(g, what):
    try:
        return np.linalg.cholesky(np.asarray(g, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"{what} metric is not positive-definite") from exc


def singular_frames(f, z, source_metric, target_metric, rank_tol=1e-9):
    """Generalized SVD of the differential with respect to the two metrics.

    Whitens by the transposed Cholesky factors, takes an ordinary SVD, and
    un-whitens.  ``sum(lambdas^2)`` equals the energy density (enforced).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    jac = jacobian(f, z)
    g = source_metric(z)
    h_mat = target_metric(f(z))
    low_g = _chol(g, "source")
    low_h = _chol(h_mat, "target")
    n, m = f.source_dim, f.target_dim
    inv_gt = scipy.linalg.solve_triangular(low_g.T, np.eye(n), lower=False)
    white = low_h.T @ jac @ inv_gt
    u, s, vh = np.linalg.svd(white)
    v = vh.conj().T

    inv_g_dag = scipy.linalg.solve_triangular(low_g.conj().T, np.eye(n), lower=False)
    inv_h_dag = scipy.linalg.solve_triangular(low_h.conj().T, np.eye(m), lower=False)
    src_frame = inv_g_dag @ np.conj(v)
    tgt_frame = inv_h_dag @ np.conj(u)

    energy = energy_density(f, z, source_metric, target_metric, jac=jac)
    if abs(float(np.sum(s**2)) - energy) > 1e-8 * max(1.0, energy):
        raise ValueError(
            f"singular values inconsistent with energy: {np.sum(s ** 2):.12g} vs {energy:.12g}"
        )
    rank = int(np.sum(s > rank_tol * max(1.0, s[0] if s.size else 0.0)))
    return SingularFrameData(lambdas=s, rank=rank, source_frame=src_frame, target_frame=tgt_frame)


def laplacian_log_energy(f, z, source_metric, target_metric, h=None, critical_tol=1e-10):
    """Source-trace Laplacian ``Delta_omega log |df|^2`` at ``z``.

    Away from critical points only: energy below ``critical_tol`` raises
    NearCriticalPoint.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    base = energy_density(f, z, source_metric, target_metric)
    if base <= critical_tol:
        raise NearCriticalPoint(f"energy {base:.3e} at {z} is below {critical_tol:.1e}")
    if h is None:
        h = 5e-3 * max(1.0, float(np.linalg.norm(z)))

    def u(zz):
        return np.log(energy_density(f, zz, source_metric, target_metric))

    hess = wirtinger_hessian(u, z, h)
    g = source_metric(z)
    return float(np.real(np.trace(hermitian_inverse(g) @ hess)))


def _preimage(f, w, z0, tol=1e-12, max_iter=50):
    """Damped Newton solve of ``f(z) = w`` seeded at ``z0``."""
    z = np.array(z0, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(w)))
    res = f(z) - w
    for _ in range(max_iter):
        if float(np.linalg.norm(res)) < tol * scale:
            return z
        jac = jacobian(f, z)
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise InverseSolveError("singular Jacobian in Newton preimage solve") from exc
        t = 1.0
        while t > 1e-4:
            cand = z + t * step
            cand_res = f(cand) - w
            if float(np.linalg.norm(cand_res)) < float(np.linalg.norm(res)):
                z, res = cand, cand_res
                break
            t /= 2.0
        else:
            raise InverseSolveError(f"Newton damping stalled solving f(z) = {w}")
    raise InverseSolveError(f"Newton did not converge solving f(z) = {w}")


def laplacian_energy(f, z, source_metric, target_metric, h=None, rank_tol=1e-9):
    """Target-trace Laplacian ``Delta_eta |df|^2`` at ``z``.

    Stencils in target coordinates through the inverse map (closed-form
    when the catalog map has one, damped Newton otherwise); requires the
    map to be locally biholomorphic (square full-rank Jacobian).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if f.source_dim != f.target_dim:
        raise RankDeficient("target-trace Laplacian needs equal dimensions")
    jac0 = jacobian(f, z)
    s = np.linalg.svd(jac0, compute_uv=False)
    if s[-1] <= rank_tol * max(1.0, s[0]):
        raise RankDeficient(f"differential is rank-deficient at {z}")
    w0 = f(z)
    if h is None:
        h = 5e-3 * max(1.0, float(np.linalg.norm(w0)))

    if f.inverse is not None:
        pre = lambda w: np.atleast_1d(np.asarray(f.inverse(w), dtype=complex))
    else:
        pre = lambda w: _preimage(f, w, z)

    def u(w):
        return energy_density(f, pre(w), source_metric, target_metric)

    hess = wirtinger_hessian(u, w0, h)
    h_mat = target_metric(w0)
    return float(np.real(np.trace(hermitian_inverse(h_mat) @ hess)))
