"""Symmetric eigensolvers for the weighted link Laplacians.

``dense_eigensolve`` is Householder tridiagonalization followed by
implicit-shift QL (the EISPACK tred2/tql2 pair), compiled with numba.
``kappa_of`` reduces L f = kappa M f to S = M^-1/2 L M^-1/2 and extracts the
smallest positive eigenvalue, densely or by Lanczos with full
reorthogonalization after deflating the known kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix

DENSE_MAX = 4000
QL_MAX_SWEEPS = 50
ZERO_REL = 1e-8
DENSE_RESIDUAL = 1e-8
SPARSE_RESIDUAL = 1e-7
# dense solves above this size are routed to Lanczos by kappa_of(mode="auto")
AUTO_DENSE_LIMIT = 1000


class SpectralError(RuntimeError):
    pass


@numba.njit(cache=True)
def _tred2(a, d, e):
    # 1-based arrays of size n+1; on exit a holds the orthogonal transform
    n = a.shape[0] - 1
    for i in range(n, 1, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 1:
            for k in range(1, l + 1):
                scale += abs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(1, l + 1):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                f = 0.0
                for j in range(1, l + 1):
                    a[j, i] = a[i, j] / h
                    g = 0.0
                    for k in range(1, j + 1):
                        g += a[j, k] * a[i, k]
                    for k in range(j + 1, l + 1):
                        g += a[k, j] * a[i, k]
                    e[j] = g / h
                    f += e[j] * a[i, j]
                hh = f / (h + h)
                for j in range(1, l + 1):
                    f = a[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(1, j + 1):
                        a[j, k] -= f * e[k] + g * a[i, k]
        else:
            e[i] = a[i, l]
        d[i] = h
    d[1] = 0.0
    e[1] = 0.0
    for i in range(1, n + 1):
        l = i - 1
        if d[i] != 0.0:
            for j in range(1, l + 1):
                g = 0.0
                for k in range(1, l + 1):
                    g += a[i, k] * a[k, j]
                for k in range(1, l + 1):
                    a[k, j] -= g * a[k, i]
        d[i] = a[i, i]
        a[i, i] = 1.0
        for j in range(1, l + 1):
            a[j, i] = 0.0
            a[i, j] = 0.0


@numba.njit(cache=True)
def _tql2(d, e, zt, max_sweeps):
    # zt holds eigenvectors as ROWS (1-based); returns 0 on success
    n = d.shape[0] - 1
    for i in range(2, n + 1):
        e[i - 1] = e[i]
    e[n] = 0.0
    anorm = 0.0
    for i in range(1, n + 1):
        anorm = max(anorm, abs(d[i]) + abs(e[i]))
    tiny = 2.220446049250313e-16 * anorm
    for l in range(1, n + 1):
        it = 0
        while True:
            m = l
            while m <= n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd or abs(e[m]) <= tiny:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(1, n + 1):
                    f = zt[i + 1, k]
                    zt[i + 1, k] = s * zt[i, k] + c * f
                    zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiagonal_eigensolve(diag, offdiag):
    """Eigenvalues (ascending) and eigenvectors (columns) of a symmetric
    tridiagonal matrix by implicit-shift QL."""
    n = len(diag)
    d = np.zeros(n + 1)
    e = np.zeros(n + 1)
    d[1:] = diag
    e[2:] = offdiag
    zt = np.eye(n + 1)
    if _tql2(d, e, zt, QL_MAX_SWEEPS):
        raise SpectralError("QL iteration did not converge")
    order = np.argsort(d[1:], kind="stable")
    return d[1:][order], zt[1:, 1:][order].T.copy()


def dense_eigensolve(S):
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of a
    symmetric matrix."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if S.ndim != 2 or S.shape[1] != n:
        raise SpectralError("matrix must be square")
    if n > DENSE_MAX:
        raise SpectralError(f"dense solve capped at {DENSE_MAX}, got {n}")
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    scale = float(np.max(np.abs(S))) if n else 0.0
    if np.max(np.abs(S - S.T)) > 1e-12 * max(scale, 1.0):
        raise SpectralError("matrix is not symmetric")
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = (S + S.T) / 2.0
    d = np.zeros(n + 1)
    e = np.zeros(n + 1)
    _tred2(a, d, e)
    zt = np.ascontiguousarray(a.T)
    if _tql2(d, e, zt, QL_MAX_SWEEPS):
        raise SpectralError("QL iteration did not converge")
    w = d[1:]
    order = np.argsort(w, kind="stable")
    return w[order], zt[1:, 1:][order].T.copy()


@dataclass
class LaplacianPair:
    """Weighted graph Laplacian L (edge weights) and vertex weights M.

    ``edges`` is an (E, 2) integer array, ``edge_weights`` has length E and
    ``vertex_weights`` length n.
    """

    edges: np.ndarray
    edge_weights: np.ndarray
    vertex_weights: np.ndarray
    labels: list = field(default_factory=list)

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.edge_weights = np.asarray(self.edge_weights, dtype=float)
        self.vertex_weights = np.asarray(self.vertex_weights, dtype=float)
        if np.any(self.vertex_weights <= 0):
            raise SpectralError("vertex weights must be positive")
        if np.any(self.edge_weights < 0):
            raise SpectralError("edge weights must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.vertex_weights)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self.edges[:, 0], self.edge_weights)
        np.add.at(deg, self.edges[:, 1], self.edge_weights)
        return deg

    def L(self) -> np.ndarray:
        n = self.n
        L = np.zeros((n, n))
        i, j = self.edges[:, 0], self.edges[:, 1]
        np.add.at(L, (i, j), -self.edge_weights)
        np.add.at(L, (j, i), -self.edge_weights)
        L[np.diag_indices(n)] = self.degrees()
        return L

    def M(self) -> np.ndarray:
        return np.diag(self.vertex_weights)

    def matvec(self, x) -> np.ndarray:
        return sparse_matvec_laplacian(self, x)

    def components(self) -> tuple[int, np.ndarray]:
        n = self.n
        g = coo_matrix((np.ones(len(self.edges)), (self.edges[:, 0], self.edges[:, 1])), shape=(n, n))
        return connected_components(g, directed=False)

    @classmethod
    def from_adjacency(cls, A, vertex_weights=None) -> "LaplacianPair":
        """Pair for a (weighted) adjacency matrix; vertex weights default to
        weighted degrees, which gives the normalized Laplacian I - D^-1 A."""
        A = np.asarray(A, dtype=float)
        iu, ju = np.nonzero(np.triu(A, 1))
        w = A[iu, ju]
        if vertex_weights is None:
            vertex_weights = A.sum(axis=1)
        return cls(np.column_stack([iu, ju]), w, vertex_weights)


def sparse_matvec_laplacian(pair: LaplacianPair, x) -> np.ndarray:
    """y(v) = sum_{w ~ v} m(vw) (x(v) - x(w)) from the edge list."""
    x = np.asarray(x, dtype=float)
    i, j = pair.edges[:, 0], pair.edges[:, 1]
    diff = pair.edge_weights * (x[i] - x[j])
    y = np.zeros_like(x)
    np.add.at(y, i, diff)
    np.add.at(y, j, -diff)
    return y


@dataclass
class SpectralReport:
    kappa: float
    kernel_dim: int
    spectrum: np.ndarray
    residual: float
    method: str
    converged: bool = True
    eigenvector: np.ndarray | None = None
    iterations: int = 0

    def as_dict(self):
        return {"kappa": self.kappa, "kernel_dim": self.kernel_dim, "residual": self.residual,
                "method": self.method, "converged": self.converged,
                "spectrum": [float(x) for x in self.spectrum]}


def _generalized_residual(pair, lam, v):
    r = sparse_matvec_laplacian(pair, v) - lam * pair.vertex_weights * v
    return float(np.linalg.norm(r) / np.linalg.norm(v))


def _kappa_dense(pair: LaplacianPair) -> SpectralReport:
    msq = 1.0 / np.sqrt(pair.vertex_weights)
    S = pair.L() * msq[:, None] * msq[None, :]
    w, U = dense_eigensolve(S)
    zero_tol = ZERO_REL * float(np.max(np.diag(S)))
    positive = np.flatnonzero(w > zero_tol)
    kernel_dim = int(np.sum(np.abs(w) <= zero_tol))
    if len(positive) == 0:
        raise SpectralError("Laplacian has no positive eigenvalue")
    V = U * msq[:, None]
    R = pair.L() @ V - (pair.vertex_weights[:, None] * V) * w[None, :]
    residual = float(np.max(np.linalg.norm(R, axis=0) / np.linalg.norm(V, axis=0)))
    k = positive[0]
    return SpectralReport(kappa=float(w[k]), kernel_dim=kernel_dim, spectrum=w,
                          residual=residual, method="dense-householder-ql",
                          converged=residual <= DENSE_RESIDUAL, eigenvector=V[:, k])


def _kappa_lanczos(pair: LaplacianPair, seed: int = 0) -> SpectralReport:
    n = pair.n
    sq = np.sqrt(pair.vertex_weights)
    msq = 1.0 / sq

    def S(x):
        return msq * sparse_matvec_laplacian(pair, msq * x)

    ncomp, lab = pair.components()
    kernel = np.zeros((n, ncomp))
    for c in range(ncomp):
        kernel[lab == c, c] = sq[lab == c]
    kernel /= np.linalg.norm(kernel, axis=0)
    dim = n - ncomp
    if dim <= 0:
        raise SpectralError("Laplacian has no positive eigenvalue")

    def project(x, basis):
        for _ in range(2):
            x = x - basis @ (basis.T @ x)
        return x

    rng = np.random.default_rng(seed)
    q = project(rng.standard_normal(n), kernel)
    q /= np.linalg.norm(q)
    max_iter = min(dim, max(20, int(5 * math.sqrt(n))))
    Q = np.zeros((n, max_iter))
    alphas, betas = [], []
    beta_prev, q_prev = 0.0, np.zeros(n)
    theta = s = None
    ritz_res = np.inf
    j = 0
    for j in range(max_iter):
        Q[:, j] = q
        w = S(q)
        alpha = float(q @ w)
        w = w - alpha * q - beta_prev * q_prev
        w = project(project(w, kernel), Q[:, : j + 1])
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)
        vals, vecs = tridiagonal_eigensolve(np.array(alphas), np.array(betas))
        theta, s = vals[0], vecs[:, 0]
        ritz_res = abs(beta * s[-1])
        if beta <= 1e-12 * max(1.0, abs(alpha)) or ritz_res <= 1e-3 * SPARSE_RESIDUAL:
            break
        betas.append(beta)
        q_prev, q, beta_prev = q, w / beta, beta
    u = Q[:, : len(alphas)] @ s
    v = msq * u
    residual = _generalized_residual(pair, theta, v)
    return SpectralReport(kappa=float(theta), kernel_dim=ncomp,
                          spectrum=np.array(sorted(np.concatenate([np.zeros(ncomp), vals]))),
                          residual=residual, method="lanczos-full-reorth",
                          converged=residual <= SPARSE_RESIDUAL, eigenvector=v,
                          iterations=len(alphas))


def kappa_of(pair: LaplacianPair, mode: str = "auto") -> SpectralReport:
    """Smallest positive eigenvalue of M^-1 L, with the kernel dimension
    checked against the number of connected components."""
    if mode == "auto":
        mode = "dense" if pair.n <= AUTO_DENSE_LIMIT else "sparse"
    if mode == "dense":
        rep = _kappa_dense(pair)
    elif mode == "sparse":
        rep = _kappa_lanczos(pair)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ncomp = pair.components()[0]
    if rep.kernel_dim != ncomp:
        raise SpectralError(f"kernel dimension {rep.kernel_dim} != {ncomp} components")
    if not rep.converged:
        raise SpectralError(f"{rep.method} residual {rep.residual:.3g} above tolerance")
    return rep


def second_adjacency_eigenvalue(A) -> float:
    w, _ = dense_eigensolve(A)
    return float(w[-2])
