"""Hand-derived closed forms for the catalog metrics.

These are the independent oracles the finite-difference pipeline is checked
against: metric derivatives and Chern tensors obtained by differentiating
the chart formulas by hand.  They intentionally share no code with the
package's stencil machinery.
"""

import numpy as np


def _outer_conj(z):
    # matrix with (i, j) entry conj(z_i) z_j
    return np.outer(np.conj(z), z)


# --- metric values -----------------------------------------------------------


def fs_metric(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    q = 1.0 + float(np.vdot(z, z).real)
    return np.eye(n) / q - _outer_conj(z) / q**2


def hyperbolic_metric(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    u = 1.0 - float(np.vdot(z, z).real)
    return np.eye(n) / u + _outer_conj(z) / u**2


def poincare_metric(z, a=1.0):
    u = 1.0 - abs(complex(z[0])) ** 2
    return np.array([[a / u**2]], dtype=complex)


def hopf_metric(z):
    z = np.asarray(z, dtype=complex)
    s = float(np.vdot(z, z).real)
    return np.eye(z.shape[0]) / s


# --- first derivatives d g_{k lbar} / d z_i  (index order [i, k, l]) ----------


def fs_dg(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    q = 1.0 + float(np.vdot(z, z).real)
    zc = np.conj(z)
    eye = np.eye(n)
    out = np.zeros((n, n, n), dtype=complex)
    out -= np.einsum("kl,i->ikl", eye, zc) / q**2
    out -= np.einsum("il,k->ikl", eye, zc) / q**2
    out += 2.0 * np.einsum("i,k,l->ikl", zc, zc, z) / q**3
    return out


def hyperbolic_dg(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    u = 1.0 - float(np.vdot(z, z).real)
    zc = np.conj(z)
    eye = np.eye(n)
    out = np.zeros((n, n, n), dtype=complex)
    out += np.einsum("kl,i->ikl", eye, zc) / u**2
    out += np.einsum("il,k->ikl", eye, zc) / u**2
    out += 2.0 * np.einsum("i,k,l->ikl", zc, zc, z) / u**3
    return out


def poincare_dg(z, a=1.0):
    zc = complex(z[0]).conjugate()
    u = 1.0 - abs(complex(z[0])) ** 2
    return np.array([[[2.0 * a * zc / u**3]]], dtype=complex)


def hopf_dg(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    s = float(np.vdot(z, z).real)
    return -np.einsum("kl,i->ikl", np.eye(n), np.conj(z)) / s**2


# --- mixed second derivatives d^2 g_{k lbar} / dz_i dzbar_j  ([i, j, k, l]) ---


def fs_ddg(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    q = 1.0 + float(np.vdot(z, z).real)
    zc = np.conj(z)
    eye = np.eye(n)
    out = np.zeros((n, n, n, n), dtype=complex)
    out -= np.einsum("kl,ij->ijkl", eye, eye) / q**2
    out += 2.0 * np.einsum("kl,i,j->ijkl", eye, zc, z) / q**3
    out -= np.einsum("il,kj->ijkl", eye, eye) / q**2
    out += 2.0 * np.einsum("il,k,j->ijkl", eye, zc, z) / q**3
    out += 2.0 * np.einsum("ij,k,l->ijkl", eye, zc, z) / q**3
    out += 2.0 * np.einsum("kj,i,l->ijkl", eye, zc, z) / q**3
    out -= 6.0 * np.einsum("i,k,l,j->ijkl", zc, zc, z, z) / q**4
    return out


def hyperbolic_ddg(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    u = 1.0 - float(np.vdot(z, z).real)
    zc = np.conj(z)
    eye = np.eye(n)
    out = np.zeros((n, n, n, n), dtype=complex)
    out += np.einsum("kl,ij->ijkl", eye, eye) / u**2
    out += 2.0 * np.einsum("kl,i,j->ijkl", eye, zc, z) / u**3
    out += np.einsum("il,kj->ijkl", eye, eye) / u**2
    out += 2.0 * np.einsum("il,k,j->ijkl", eye, zc, z) / u**3
    out += 2.0 * np.einsum("ij,k,l->ijkl", eye, zc, z) / u**3
    out += 2.0 * np.einsum("kj,i,l->ijkl", eye, zc, z) / u**3
    out += 6.0 * np.einsum("i,k,l,j->ijkl", zc, zc, z, z) / u**4
    return out


def poincare_ddg(z, a=1.0):
    m = abs(complex(z[0])) ** 2
    u = 1.0 - m
    return np.array([[[[2.0 * a / u**3 + 6.0 * a * m / u**4]]]], dtype=complex)


def hopf_ddg(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    s = float(np.vdot(z, z).real)
    eye = np.eye(n)
    out = (-np.einsum("kl,ij->ijkl", eye, eye) / s**2).astype(complex)
    out += 2.0 * np.einsum("kl,i,j->ijkl", eye, np.conj(z), z) / s**3
    return out


# --- Chern tensors ------------------------------------------------------------


def euclidean_tensor(z, n):
    return np.zeros((n, n, n, n), dtype=complex)


def fs_tensor(z):
    g = fs_metric(z)
    return np.einsum("ij,kl->ijkl", g, g) + np.einsum("il,kj->ijkl", g, g)


def hyperbolic_tensor(z):
    g = hyperbolic_metric(z)
    return -np.einsum("ij,kl->ijkl", g, g) - np.einsum("il,kj->ijkl", g, g)


def poincare_tensor(z, a=1.0):
    u = 1.0 - abs(complex(z[0])) ** 2
    return np.array([[[[-2.0 * a / u**4]]]], dtype=complex)


def hopf_tensor(z):
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    s = float(np.vdot(z, z).real)
    eye = np.eye(n)
    core = eye * s - _outer_conj(z)  # (i, j) entry: delta_ij |z|^2 - conj(z_i) z_j
    return np.einsum("kl,ij->ijkl", eye, core) / s**3
