"""Coupling-constant arithmetic, discrete zero-boundary Gaussian fields,
orthogonal rotation of field vectors, and the lattice determinant identities.

Conventions, fixed once:

* central charges: c_sle(kappa) = 1 - 6*(2/sqrt(kappa) - sqrt(kappa)/2)^2,
  c_liouville(gamma) = 1 + 6*(2/gamma + gamma/2)^2, matter charge
  c = 1 - 6*chi^2 with chi = sqrt((1-c)/6) >= 0.
* lattice Laplacian: unnormalized combinatorial Laplacian (degree minus
  adjacency) with Dirichlet deletion of boundary rows/columns; on the grid
  every interior vertex keeps degree 4 (boundary neighbors contribute to the
  degree but are pinned to zero).  The continuum normalization constant is
  irrelevant to every identity asserted here and deliberately left arbitrary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    Disconnected,
    FieldsError,
    NegativeChi,
    NotOrthogonal,
    SingularLaplacian,
)

ORTHO_TOL = 1e-12


# --- coupling constants ---------------------------------------------------------

def c_sle(kappa: float) -> float:
    """Central charge of SLE_kappa; satisfies c_sle(kappa) = c_sle(16/kappa)."""
    if kappa <= 0:
        raise FieldsError(f"kappa must be positive, got {kappa}")
    x = 2.0 / math.sqrt(kappa) - math.sqrt(kappa) / 2.0
    return 1.0 - 6.0 * x * x


def c_liouville(gamma: float) -> float:
    """Liouville central charge of gamma-LQG; > 25 for gamma in (0, 2)."""
    if not 0 < gamma < 2:
        raise FieldsError(f"gamma must lie in (0, 2), got {gamma}")
    q = 2.0 / gamma + gamma / 2.0
    return 1.0 + 6.0 * q * q


def chi_of_charge(c: float) -> float:
    """chi(c) = sqrt((1-c)/6) for matter charge c <= 1."""
    if c > 1 + 1e-12:
        raise FieldsError(f"matter central charge must be <= 1, got {c}")
    return math.sqrt(max(0.0, (1.0 - c) / 6.0))


def q_of_charge(c_l: float) -> float:
    """Q(c_L) = sqrt((c_L-1)/6) for Liouville charge c_L > 25."""
    if c_l <= 25:
        raise FieldsError(f"Liouville central charge must be > 25, got {c_l}")
    return math.sqrt((c_l - 1.0) / 6.0)


@dataclass(frozen=True)
class Coupling:
    """A central charge with its coupling constant and role tag."""

    c: float
    role: str = "matter"  # matter | liouville | sle

    @property
    def chi(self):
        return chi_of_charge(self.c)

    @property
    def q(self):
        return q_of_charge(self.c)

    @classmethod
    def matter(cls, c):
        return cls(c=float(c), role="matter")

    @classmethod
    def from_chi(cls, chi):
        return cls(c=1.0 - 6.0 * chi * chi, role="matter")

    @classmethod
    def liouville(cls, gamma):
        return cls(c=c_liouville(gamma), role="liouville")

    @classmethod
    def sle(cls, kappa):
        return cls(c=c_sle(kappa), role="sle")


def charge_sum_check(couplings, target=26.0, tol=1e-9) -> bool:
    """True iff the central charges sum to 26 within tolerance."""
    total = math.fsum(c.c if isinstance(c, Coupling) else float(c) for c in couplings)
    return abs(total - target) <= tol


# --- grid Laplacian and GFF sampling ----------------------------------------------

def interior_indices(L: int):
    """Interior vertices of the L x L lattice square, row-major."""
    if L < 3:
        raise FieldsError(f"grid size must be >= 3, got {L}")
    return [(i, j) for i in range(1, L - 1) for j in range(1, L - 1)]


def grid_dirichlet_laplacian(L: int) -> np.ndarray:
    """Dirichlet Laplacian on the interior of the L x L grid (4-regular)."""
    interior = interior_indices(L)
    index = {v: k for k, v in enumerate(interior)}
    n = len(interior)
    lap = np.zeros((n, n))
    for (i, j), k in index.items():
        lap[k, k] = 4.0
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (i + di, j + dj)
            if nb in index:
                lap[k, index[nb]] = -1.0
    return lap


@dataclass
class FieldVector:
    """n independent zero-boundary discrete GFFs on an L x L grid.

    ``values`` has shape (n, k) with k the interior vertex count; boundary
    vertices are excluded (implicitly zero).  ``charges`` carries one matter
    central charge per field.
    """

    grid: int
    values: np.ndarray
    charges: np.ndarray

    @property
    def n_fields(self):
        return self.values.shape[0]

    @property
    def chis(self):
        return np.array([chi_of_charge(c) for c in self.charges])


def gff_sampling_factor(L: int):
    """Lower-triangular C with C C^T = Laplacian; samples are C^-T g."""
    lap = grid_dirichlet_laplacian(L)
    return scipy.linalg.cholesky(lap, lower=True)


def sample_gff(L: int, n: int, seed, charges=None, rng=None) -> FieldVector:
    """Sample n independent zero-boundary GFFs (covariance = inverse Dirichlet
    Laplacian, in the 4-regular convention)."""
    if rng is None:
        rng = np.random.default_rng(seed)
    chol = gff_sampling_factor(L)
    k = chol.shape[0]
    g = rng.standard_normal((n, k))
    values = scipy.linalg.solve_triangular(chol.T, g.T, lower=False).T
    if charges is None:
        charges = np.ones(n)
    return FieldVector(grid=L, values=values, charges=np.asarray(charges, dtype=float))


def sample_gff_batch(L: int, n: int, samples: int, rng) -> np.ndarray:
    """(samples, n, k) array of independent GFF draws, one Cholesky reused."""
    chol = gff_sampling_factor(L)
    k = chol.shape[0]
    g = rng.standard_normal((samples * n, k))
    vals = scipy.linalg.solve_triangular(chol.T, g.T, lower=False).T
    return vals.reshape(samples, n, k)


# --- rotation of field vectors -----------------------------------------------------

def check_orthogonal(A: np.ndarray, tol=ORTHO_TOL):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotOrthogonal("matrix must be square")
    err = np.max(np.abs(A.T @ A - np.eye(A.shape[0])))
    if err > tol:
        raise NotOrthogonal(f"max |A^T A - I| = {err:.3e} > {tol}")
    return A


def rotate_fields(fv: FieldVector, A, interpret_charges=True) -> FieldVector:
    """Rotate the field vector and its coupling constants by an orthogonal A.

    Values rotate pointwise; the coupling vector rotates the same way and the
    new charges are c_i = 1 - 6 * chi_i^2, so the charge sum is conserved.
    A negative rotated chi is an error only under charge interpretation; the
    linear mixing of field values is always permitted.
    """
    A = check_orthogonal(np.asarray(A, dtype=float))
    if A.shape[0] != fv.n_fields:
        raise FieldsError("matrix size does not match the number of fields")
    new_chis = A @ fv.chis
    if interpret_charges and np.any(new_chis < -1e-12):
        raise NegativeChi(f"rotated chi vector {new_chis} has a negative entry")
    new_values = A @ fv.values
    new_charges = 1.0 - 6.0 * new_chis**2
    return FieldVector(grid=fv.grid, values=new_values, charges=new_charges)


@dataclass(frozen=True)
class RotationReport:
    grid: int
    n_fields: int
    samples: int
    max_cross_z: float
    max_marginal_dev_stderr: float
    charge_sum_before: float
    charge_sum_after: float

    @property
    def charge_sum_drift(self):
        return abs(self.charge_sum_after - self.charge_sum_before)


def rotation_independence_test(L: int, A, samples: int, seed, charges=None) -> RotationReport:
    """Empirical independence/covariance check for rotated field vectors.

    Samples fields, rotates each draw by A, and reports (i) the largest
    z-score among cross-covariance entries between distinct rotated fields,
    and (ii) the largest deviation of the rotated marginal covariance from
    the inverse-Laplacian oracle in estimator-stderr units.
    """
    A = check_orthogonal(np.asarray(A, dtype=float))
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    draws = sample_gff_batch(L, n, samples, rng)       # (S, n, k)
    rotated = np.einsum("ij,sjk->sik", A, draws)
    cov_oracle = np.linalg.inv(grid_dirichlet_laplacian(L))
    diag = np.diag(cov_oracle)

    # cross-covariance z-scores: under independence Var(f_i(x) f_j(y)) = C_xx C_yy
    max_z = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            cross = rotated[:, i, :].T @ rotated[:, j, :] / samples
            stderr = np.sqrt(np.outer(diag, diag) / samples)
            max_z = max(max_z, float(np.max(np.abs(cross / stderr))))

    # marginal covariance vs oracle: Var(f(x) f(y)) = C_xx C_yy + C_xy^2
    max_dev = 0.0
    var_entry = np.outer(diag, diag) + cov_oracle**2
    stderr = np.sqrt(var_entry / samples)
    for i in range(n):
        emp = rotated[:, i, :].T @ rotated[:, i, :] / samples
        max_dev = max(max_dev, float(np.max(np.abs((emp - cov_oracle) / stderr))))

    if charges is None:
        charges = np.ones(n)
    fv = FieldVector(grid=L, values=np.zeros((n, cov_oracle.shape[0])),
                     charges=np.asarray(charges, float))
    rotated_fv = rotate_fields(fv, A, interpret_charges=False)
    return RotationReport(
        grid=L,
        n_fields=n,
        samples=samples,
        max_cross_z=max_z,
        max_marginal_dev_stderr=max_dev,
        charge_sum_before=float(np.sum(fv.charges)),
        charge_sum_after=float(np.sum(rotated_fv.charges)),
    )


def random_orthogonal(n: int, rng) -> np.ndarray:
    """Orthonormalization of a Gaussian matrix (QR with sign fix)."""
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


# --- exact determinants and the matrix-tree theorem ---------------------------------

def bareiss_determinant(matrix) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise FieldsError("matrix must be square")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class Graph:
    """Finite undirected graph with an optional boundary vertex set."""

    n: int
    edges: tuple
    boundary: frozenset = frozenset()

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise FieldsError(f"bad edge {(u, v)}")

    @property
    def interior(self):
        return [v for v in range(self.n) if v not in self.boundary]

    def is_connected(self):
        if self.n == 0:
            return True
        adj = {v: [] for v in range(self.n)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n


def laplacian_matrix(g: Graph):
    lap = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    return lap


def reduced_laplacian(g: Graph, remove: int):
    lap = laplacian_matrix(g)
    keep = [v for v in range(g.n) if v != remove]
    return [[lap[i][j] for j in keep] for i in keep]


def dirichlet_laplacian(g: Graph):
    """Rows/columns of the boundary vertices deleted; degrees keep counting
    boundary neighbors."""
    lap = laplacian_matrix(g)
    keep = g.interior
    return [[lap[i][j] for j in keep] for i in keep]


def spanning_tree_count(g: Graph) -> int:
    """Number of spanning trees via the reduced-Laplacian determinant
    (matrix-tree theorem); exact integer arithmetic."""
    if g.n == 0:
        raise FieldsError("empty graph")
    if not g.is_connected():
        raise Disconnected("graph is not connected")
    if g.n == 1:
        return 1
    return bareiss_determinant(reduced_laplacian(g, 0))


def spanning_trees_brute_force(g: Graph) -> int:
    """Direct enumeration over edge subsets; cross-check for <= 6 vertices."""
    if not g.is_connected():
        raise Disconnected("graph is not connected")
    if g.n == 1:
        return 1
    count = 0
    for subset in itertools.combinations(range(len(g.edges)), g.n - 1):
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for ei in subset:
            u, v = g.edges[ei]
            ru, rv = find(u), find(v)
            if ru == rv:
                acyclic = False
                break
            parent[ru] = rv
        if acyclic:
            count += 1
    return count


# --- Gaussian partition identity ------------------------------------------------

@dataclass(frozen=True)
class PartitionIdentityReport:
    interior_count: int
    det_exact: int
    det_float: float
    residual: float


def gaussian_partition_identity(g: Graph) -> PartitionIdentityReport:
    """Determinant cancellation behind the lattice partition function.

    The Gaussian integral int exp(-sum_edges (phi_x - phi_y)^2) dphi over
    interior values (boundary pinned to zero) equals pi^(k/2) det(D)^(-1/2)
    for the Dirichlet Laplacian D on the k interior vertices.  Squaring and
    multiplying by the matrix-tree-style exact determinant must cancel the
    determinant, leaving pi^k; the report carries the relative residual.
    The two determinants are computed by independent routes (floating LU via
    the integral, fraction-free integer elimination for the exact one).
    """
    interior = g.interior
    k = len(interior)
    if k < 1:
        raise FieldsError("need at least one interior vertex")
    d = dirichlet_laplacian(g)
    det_exact = bareiss_determinant(d)
    if det_exact <= 0:
        raise SingularLaplacian("Dirichlet Laplacian is singular")
    sign, logdet = np.linalg.slogdet(np.asarray(d, dtype=float))
    if sign <= 0:
        raise SingularLaplacian("float determinant is not positive")
    log_integral = 0.5 * k * math.log(math.pi) - 0.5 * logdet
    # [integral]^2 * det_exact should equal pi^k
    log_resid = 2.0 * log_integral + math.log(det_exact) - k * math.log(math.pi)
    residual = abs(math.expm1(log_resid))
    return PartitionIdentityReport(
        interior_count=k,
        det_exact=det_exact,
        det_float=sign * math.exp(logdet),
        residual=residual,
    )


def grid_graph(L: int) -> Graph:
    """L x L lattice square; the outer ring is the boundary."""
    idx = {(i, j): i * L + j for i in range(L) for j in range(L)}
    edges = []
    for i in range(L):
        for j in range(L):
            if i + 1 < L:
                edges.append((idx[(i, j)], idx[(i + 1, j)]))
            if j + 1 < L:
                edges.append((idx[(i, j)], idx[(i, j + 1)]))
    boundary = frozenset(
        idx[(i, j)] for i in range(L) for j in range(L)
        if i in (0, L - 1) or j in (0, L - 1)
    )
    return Graph(n=L * L, edges=tuple(edges), boundary=boundary)


def star_graph_with_boundary(spokes: int) -> Graph:
    """One interior vertex joined to ``spokes`` boundary vertices."""
    edges = tuple((0, i) for i in range(1, spokes + 1))
    return Graph(n=spokes + 1, edges=edges, boundary=frozenset(range(1, spokes + 1)))


# --- graph file format ------------------------------------------------------------

def load_graph(text: str) -> Graph:
    """Parse the edge-list format: ``u v`` per edge, ``B v`` marks boundary."""
    edges = []
    boundary = set()
    max_v = -1
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] == "B":
            v = int(parts[1])
            boundary.add(v)
            max_v = max(max_v, v)
        else:
            u, v = int(parts[0]), int(parts[1])
            edges.append((u, v))
            max_v = max(max_v, u, v)
    return Graph(n=max_v + 1, edges=tuple(edges), boundary=frozenset(boundary))


def dump_graph(g: Graph) -> str:
    lines = [f"{u} {v}" for u, v in g.edges]
    lines += [f"B {v}" for v in sorted(g.boundary)]
    return "\n".join(lines) + "\n"
