"""History-state (clock) Hamiltonians and their complete spectral theory
at desk scale: assembly from unitaries and penalty projectors, rotation to
the path-Laplacian frame, Jordan decomposition of the penalty pair into
five canonical cases, closed-form and root-solved block eigenvalues, the
acceptance amplitude epsilon, and certified extremal eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "ClockSpec",
    "ClockSpecParseError",
    "JordanBlock",
    "SpectralReport",
    "Case5Roots",
    "IterativeConvergenceError",
    "BracketError",
    "case5_spec",
    "path_laplacian",
    "build_hamiltonian",
    "conjugate_rotate",
    "jordan_decompose",
    "reconstruct_projectors",
    "block_hamiltonian",
    "case_eigenvalue",
    "impurity_walk_matrix",
    "root_solve_case5",
    "compute_epsilon",
    "ground_energy",
    "halting_penalty_bounds",
    "gap_law_grid",
    "read_clock_spec",
    "write_clock_spec",
]

UNITARY_ATOL = 1e-12
PROJECTOR_ATOL = 1e-12
KERNEL_EIG_TOL = 1e-10
DEGENERACY_TOL = 1e-10
CLUSTER_TOL = 1e-8
DENSE_DIM_LIMIT = 4000


class ClockSpecParseError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IterativeConvergenceError(RuntimeError):
    def __init__(self, message: str, iterations: int) -> None:
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class BracketError(RuntimeError):
    """Root bracketing failed: mu outside (0,1) or numerical pathology."""


def _is_unitary(u: np.ndarray) -> bool:
    return np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=UNITARY_ATOL)


def _is_projector(p: np.ndarray) -> bool:
    return np.allclose(p, p.conj().T, atol=PROJECTOR_ATOL) and np.allclose(
        p @ p, p, atol=PROJECTOR_ATOL
    )


@dataclass(frozen=True)
class ClockSpec:
    """A T-step computation with penalty projectors on input and output.

    Unitaries must be unitary and projectors idempotent Hermitian within
    1e-12; the output penalty may have any rank for assembly (the tight
    gap law assumes rank one).
    """

    T: int
    comp_dim: int
    unitaries: tuple[np.ndarray, ...]
    input_projectors: tuple[np.ndarray, ...]
    output_projector: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        d = self.comp_dim
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if len(self.unitaries) != self.T:
            raise ValueError(f"expected {self.T} unitaries, got {len(self.unitaries)}")
        for i, u in enumerate(self.unitaries, start=1):
            if u.shape != (d, d):
                raise ValueError(f"U_{i} has shape {u.shape}, expected {(d, d)}")
            if not _is_unitary(u):
                raise ValueError(f"U_{i} is not unitary within {UNITARY_ATOL}")
        for i, p in enumerate(self.input_projectors, start=1):
            if p.shape != (d, d):
                raise ValueError(f"input projector {i} has wrong shape {p.shape}")
            if not _is_projector(p):
                raise ValueError(f"input projector {i} fails the projector check")
        if self.output_projector.shape != (d, d):
            raise ValueError("output projector has wrong shape")
        if not _is_projector(self.output_projector):
            raise ValueError("output projector fails the projector check")

    @property
    def dim(self) -> int:
        return (self.T + 1) * self.comp_dim

    @property
    def input_penalty_total(self) -> np.ndarray:
        total = np.zeros((self.comp_dim, self.comp_dim), dtype=complex)
        for p in self.input_projectors:
            total = total + p
        return total

    @property
    def total_unitary(self) -> np.ndarray:
        return reduce(lambda acc, u: u @ acc, self.unitaries, np.eye(self.comp_dim, dtype=complex))


def case5_spec(T: int, mu: float) -> ClockSpec:
    """The canonical two-level instance whose assembled matrix is the
    impurity-walk chain: identity evolution, input penalty on level 0,
    output penalty the mu-tilted rank-one projector."""
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie strictly in (0, 1), got {mu}")
    xi = math.sqrt(mu * (1.0 - mu))
    p_in = np.diag([1.0, 0.0]).astype(complex)
    p_out = np.array([[1.0 - mu, -xi], [-xi, mu]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return ClockSpec(T, 2, (eye,) * T, (p_in,), p_out)


def path_laplacian(n_vertices: int) -> np.ndarray:
    """Laplacian of the path graph: positive semidefinite, tridiagonal."""
    if n_vertices < 2:
        raise ValueError("path needs at least 2 vertices")
    lap = 2.0 * np.eye(n_vertices)
    lap[0, 0] = lap[-1, -1] = 1.0
    idx = np.arange(n_vertices - 1)
    lap[idx, idx + 1] = -1.0
    lap[idx + 1, idx] = -1.0
    return lap


def _kernel_complement(total: np.ndarray) -> np.ndarray:
    """Projector onto the orthogonal complement of ker(total)."""
    evals, evecs = np.linalg.eigh(total)
    keep = evecs[:, evals > KERNEL_EIG_TOL]
    return keep @ keep.conj().T


def build_hamiltonian(spec: ClockSpec, penalty_variant: str = "raw") -> np.ndarray:
    """Assemble propagation + input penalty at t=0 + output penalty at t=T.

    ``penalty_variant="kernel_complement"`` replaces the summed input
    penalty with the projector complementary to its kernel (the
    lower-bound surrogate used by the block analysis; a true lower bound
    whenever the input projectors commute, so the sum has integer
    spectrum).
    """
    if penalty_variant not in ("raw", "kernel_complement"):
        raise ValueError(f"unknown penalty variant {penalty_variant!r}")
    T, d = spec.T, spec.comp_dim
    dim = spec.dim
    ham = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(d, dtype=complex)

    def blk(t: int, s: int) -> slice:
        return slice(t * d, (t + 1) * d)

    for t in range(T):
        u = spec.unitaries[t]
        ham[blk(t, t), blk(t, t)] += eye
        ham[blk(t + 1, t), blk(t + 1, t)] += eye
        ham[blk(t + 1, t), blk(t, t)] += -u
        ham[blk(t, t), blk(t + 1, t)] += -u.conj().T

    if penalty_variant == "raw":
        ham[blk(0, 0), blk(0, 0)] += spec.input_penalty_total
    else:
        ham[blk(0, 0), blk(0, 0)] += _kernel_complement(spec.input_penalty_total)
    ham[blk(T, T), blk(T, T)] += spec.output_projector
    return ham


def _sparse_hamiltonian(spec: ClockSpec, penalty_variant: str = "raw") -> sp.csr_matrix:
    T, d = spec.T, spec.comp_dim
    eye = sp.identity(d, format="csr", dtype=complex)
    diag = sp.lil_matrix((T + 1, T + 1))
    for t in range(T):
        diag[t, t] += 1.0
        diag[t + 1, t + 1] += 1.0
    ham = sp.kron(diag.tocsr(), eye, format="lil")
    for t in range(T):
        u = sp.csr_matrix(spec.unitaries[t])
        hop = sp.lil_matrix((T + 1, T + 1))
        hop[t + 1, t] = 1.0
        ham -= sp.kron(hop.tocsr(), u, format="lil")
        ham -= sp.kron(hop.T.tocsr(), u.conj().T, format="lil")
    corner0 = sp.lil_matrix((T + 1, T + 1))
    corner0[0, 0] = 1.0
    cornerT = sp.lil_matrix((T + 1, T + 1))
    cornerT[T, T] = 1.0
    p_in = spec.input_penalty_total
    if penalty_variant == "kernel_complement":
        p_in = _kernel_complement(p_in)
    ham += sp.kron(corner0.tocsr(), sp.csr_matrix(p_in), format="lil")
    ham += sp.kron(cornerT.tocsr(), sp.csr_matrix(spec.output_projector), format="lil")
    return ham.tocsr()


@dataclass(frozen=True)
class RotatedClock:
    """Control-unitary-rotated form: Laplacian in time, penalties pinned
    at the two boundary times, output penalty conjugated through the
    whole evolution.  Unitarily equivalent to the direct assembly."""

    T: int
    comp_dim: int
    input_penalty: np.ndarray
    output_penalty_rotated: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        T, d = self.T, self.comp_dim
        ham = np.kron(path_laplacian(T + 1), np.eye(d, dtype=complex))
        ham[:d, :d] += self.input_penalty
        ham[-d:, -d:] += self.output_penalty_rotated
        return ham


def conjugate_rotate(spec: ClockSpec, penalty_variant: str = "raw") -> RotatedClock:
    u_total = spec.total_unitary
    p_out = u_total.conj().T @ spec.output_projector @ u_total
    p_in = spec.input_penalty_total
    if penalty_variant == "kernel_complement":
        p_in = _kernel_complement(p_in)
    return RotatedClock(spec.T, spec.comp_dim, p_in, p_out)


# -- Jordan pair decomposition ----------------------------------------


@dataclass(frozen=True)
class JordanBlock:
    """One invariant subspace of a projector pair.

    case_tag 1..4 are the one-dimensional integer cases
    (in, out) = (0,0), (1,0), (0,1), (1,1); case 5 is the genuinely
    tilted two-dimensional case with principal-angle parameter mu.
    """

    case_tag: int
    basis: np.ndarray = field(repr=False)
    mu: float | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """The canonical small (in, out) projector forms on this block."""
        if self.case_tag == 1:
            return np.zeros((1, 1)), np.zeros((1, 1))
        if self.case_tag == 2:
            return np.eye(1), np.zeros((1, 1))
        if self.case_tag == 3:
            return np.zeros((1, 1)), np.eye(1)
        if self.case_tag == 4:
            return np.eye(1), np.eye(1)
        mu = self.mu
        xi = math.sqrt(mu * (1.0 - mu))
        p_in = np.array([[1.0, 0.0], [0.0, 0.0]])
        p_out = np.array([[1.0 - mu, -xi], [-xi, mu]])
        return p_in, p_out


def jordan_decompose(
    p_in: np.ndarray, p_out: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL
) -> list[JordanBlock]:
    """Split the space into invariant 1- and 2-dimensional blocks on
    which the pair takes one of its five canonical forms.

    Computed from the eigendecomposition of the output projector
    compressed to the range of the input projector; compressed
    eigenvalues within ``degeneracy_tol`` of 0 or 1 are reclassified
    into the adjacent integer cases, since the tilted form requires a
    strictly interior angle.
    """
    if not _is_projector(p_in):
        raise ValueError("first argument fails the projector check")
    if not _is_projector(p_out):
        raise ValueError("second argument fails the projector check")
    if p_in.shape != p_out.shape:
        raise ValueError("projector dimensions differ")
    dim = p_in.shape[0]
    p_in = p_in.astype(complex)
    p_out = p_out.astype(complex)

    blocks: list[JordanBlock] = []
    consumed: list[np.ndarray] = []

    evals, evecs = np.linalg.eigh(p_in)
    range_in = evecs[:, evals > 0.5]
    if range_in.shape[1]:
        compressed = range_in.conj().T @ p_out @ range_in
        compressed = (compressed + compressed.conj().T) / 2.0
        cvals, cvecs = np.linalg.eigh(compressed)
        for overlap, w in zip(cvals, cvecs.T):
            u = range_in @ w
            u = u / np.linalg.norm(u)
            mu = float(min(max(1.0 - overlap, 0.0), 1.0))
            consumed.append(u)
            if mu <= degeneracy_tol:
                blocks.append(JordanBlock(4, u.reshape(-1, 1)))
            elif mu >= 1.0 - degeneracy_tol:
                blocks.append(JordanBlock(2, u.reshape(-1, 1)))
            else:
                xi = math.sqrt(mu * (1.0 - mu))
                v = -(p_out @ u - (1.0 - mu) * u) / xi
                v = v / np.linalg.norm(v)
                consumed.append(v)
                blocks.append(JordanBlock(5, np.column_stack([u, v]), mu=mu))

    if consumed:
        span = np.column_stack(consumed)
        # orthonormal complement of everything consumed so far
        proj = np.eye(dim, dtype=complex) - span @ span.conj().T
    else:
        proj = np.eye(dim, dtype=complex)
    evals, evecs = np.linalg.eigh((proj + proj.conj().T) / 2.0)
    complement = evecs[:, evals > 0.5]
    if complement.shape[1]:
        rest = complement.conj().T @ p_out @ complement
        rest = (rest + rest.conj().T) / 2.0
        rvals, rvecs = np.linalg.eigh(rest)
        for val, w in zip(rvals, rvecs.T):
            x = complement @ w
            x = x / np.linalg.norm(x)
            if val > 1.0 - CLUSTER_TOL:
                blocks.append(JordanBlock(3, x.reshape(-1, 1)))
            elif val < CLUSTER_TOL:
                blocks.append(JordanBlock(1, x.reshape(-1, 1)))
            else:
                raise RuntimeError(
                    f"output projector not 0/1 on the complement (eigenvalue {val}); "
                    "inputs are not a clean projector pair"
                )
    return blocks


def reconstruct_projectors(
    blocks: list[JordanBlock], dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild the pair from its blocks; inverse of the decomposition."""
    p_in = np.zeros((dim, dim), dtype=complex)
    p_out = np.zeros((dim, dim), dtype=complex)
    for block in blocks:
        small_in, small_out = block.projector_pair()
        basis = block.basis
        p_in += basis @ small_in @ basis.conj().T
        p_out += basis @ small_out @ basis.conj().T
    return p_in, p_out


def block_hamiltonian(block: JordanBlock, T: int) -> np.ndarray:
    """The (T+1)- or 2(T+1)-dimensional restriction of the rotated
    Hamiltonian to one Jordan block, in the block's canonical basis."""
    small_in, small_out = block.projector_pair()
    b = small_in.shape[0]
    ham = np.kron(path_laplacian(T + 1), np.eye(b))
    ham[:b, :b] += small_in
    ham[-b:, -b:] += small_out
    return ham


# -- closed forms and the impurity walk --------------------------------


def case_eigenvalue(case_tag: int, T: int, mu: float | None = None) -> float:
    """Ground energy of a single block: 0, the two pinned-endpoint
    closed forms, or the impurity-walk root for the tilted case."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if case_tag == 1:
        return 0.0
    if case_tag in (2, 3):
        return 2.0 - 2.0 * math.cos(math.pi / (2 * T + 3))
    if case_tag == 4:
        return 2.0 - 2.0 * math.cos(math.pi / (T + 2))
    if case_tag == 5:
        if mu is None:
            raise ValueError("case 5 requires mu")
        return 2.0 - 2.0 * math.cos(root_solve_case5(T, mu).k0)
    raise ValueError(f"case_tag must be 1..5, got {case_tag}")


def impurity_walk_matrix(T: int, mu: float) -> np.ndarray:
    """Tridiagonal 2(T+1) chain with a tilted bond in the middle.

    Two pinned path segments joined by the coupling -sqrt(mu(1-mu)),
    with on-site terms 2-mu and 1+mu at the junction; same spectrum as
    the two-level tilted-penalty clock after reordering.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie strictly in (0, 1), got {mu}")
    xi = math.sqrt(mu * (1.0 - mu))
    n = 2 * (T + 1)
    diag = np.full(n, 2.0)
    diag[T] = 2.0 - mu
    diag[T + 1] = 1.0 + mu
    diag[n - 1] = 1.0
    off = np.full(n - 1, -1.0)
    off[T] = -xi
    ham = np.diag(diag)
    idx = np.arange(n - 1)
    ham[idx, idx + 1] = off
    ham[idx + 1, idx] = off
    return ham


@dataclass(frozen=True)
class Case5Roots:
    """All momentum roots of the tilted block's quantisation condition."""

    T: int
    mu: float
    k0: float
    roots: tuple[tuple[float, str], ...]

    @property
    def count(self) -> int:
        return len(self.roots)


def _scan_roots(func, lo: float, hi: float, samples: int, tol: float) -> list[float]:
    grid = np.linspace(lo, hi, samples)
    vals = func(grid)
    roots: list[float] = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
            continue
        if a * b < 0.0:
            x0, x1 = float(grid[i]), float(grid[i + 1])
            f0 = float(a)
            while x1 - x0 > tol:
                mid = 0.5 * (x0 + x1)
                fm = float(func(np.array([mid]))[0])
                if fm == 0.0:
                    x0 = x1 = mid
                    break
                if f0 * fm < 0.0:
                    x1 = mid
                else:
                    x0, f0 = mid, fm
            roots.append(0.5 * (x0 + x1))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def root_solve_case5(T: int, mu: float, tol: float = 1e-13) -> Case5Roots:
    """Roots of cos((T+3/2)k) = -/+ sqrt(1-mu) cos(k/2) on (0, pi), plus
    k = pi which both branches share: 2T+3 momenta in total.

    k0, the smallest root, always comes from the minus branch and is
    bracketed inside (0, pi/(2T+3)) before bisection; the ground energy
    of the impurity walk is 2 - 2cos(k0).
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not 0 < mu < 1:
        raise BracketError(f"mu must lie strictly in (0, 1), got {mu}")
    if tol < 1e-14:
        raise ValueError(f"tolerance below 1e-14 is not supported, got {tol}")
    r = math.sqrt(1.0 - mu)

    def f_minus(k: np.ndarray) -> np.ndarray:
        return np.cos((T + 1.5) * k) - r * np.cos(0.5 * k)

    def f_plus(k: np.ndarray) -> np.ndarray:
        return np.cos((T + 1.5) * k) + r * np.cos(0.5 * k)

    # guaranteed bracket for the smallest root (minus branch)
    lo, hi = tol, math.pi / (2 * T + 3)
    flo = float(f_minus(np.array([lo]))[0])
    fhi = float(f_minus(np.array([hi]))[0])
    if not (flo > 0.0 > fhi):
        raise BracketError(
            f"no sign change on (0, pi/(2T+3)) for T={T}, mu={mu}: "
            f"f({lo})={flo}, f({hi})={fhi}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = float(f_minus(np.array([mid]))[0])
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    k0 = 0.5 * (lo + hi)

    samples = 40 * (T + 2) + 1
    upper = math.pi * (1.0 - 1e-12)
    minus_roots = _scan_roots(f_minus, tol, upper, samples, tol)
    plus_roots = _scan_roots(f_plus, tol, upper, samples, tol)
    if len(minus_roots) != T + 1 or len(plus_roots) != T + 1:
        raise RuntimeError(
            f"expected T+1 = {T + 1} roots per branch on (0, pi), found "
            f"{len(minus_roots)} (minus) and {len(plus_roots)} (plus)"
        )
    labelled = [(k, "minus") for k in minus_roots]
    labelled += [(k, "plus") for k in plus_roots]
    labelled.append((math.pi, "both"))
    labelled.sort()
    return Case5Roots(T, mu, k0, tuple(labelled))


# -- epsilon and extremal eigenvalues ----------------------------------


def compute_epsilon(spec: ClockSpec) -> float:
    """Largest squared overlap between an evolved valid input and an
    accepted output: ||Q_out U_T..U_1 Q_in||^2 for the kernel projectors
    of the two penalties."""
    q_in = np.eye(spec.comp_dim, dtype=complex) - _kernel_complement(
        spec.input_penalty_total
    )
    q_out = np.eye(spec.comp_dim, dtype=complex) - spec.output_projector
    m = q_out @ spec.total_unitary @ q_in
    sigma = np.linalg.svd(m, compute_uv=False)
    top = float(sigma[0]) if sigma.size else 0.0
    return float(min(max(top * top, 0.0), 1.0))


@dataclass(frozen=True)
class SpectralReport:
    lambda0: float
    lambda1: float
    method: str
    residual: float
    iterations: int | None = None

    def __post_init__(self) -> None:
        if self.lambda1 < self.lambda0:
            raise ValueError("lambda1 must be >= lambda0")

    @property
    def gap(self) -> float:
        return self.lambda1 - self.lambda0


def ground_energy(
    spec: ClockSpec,
    method: str = "dense",
    penalty_variant: str = "raw",
    tol: float = 1e-12,
    maxiter: int | None = None,
) -> SpectralReport:
    """Two lowest eigenvalues with a residual certificate.

    Dense diagonalisation is capped at dimension 4000; the iterative
    path is a Lanczos smallest-algebraic run (no shift-invert) and
    reports its iteration budget on non-convergence.
    """
    if method == "dense":
        if spec.dim > DENSE_DIM_LIMIT:
            raise ValueError(
                f"dense path limited to dimension {DENSE_DIM_LIMIT}, got {spec.dim}"
            )
        ham = build_hamiltonian(spec, penalty_variant)
        evals, evecs = np.linalg.eigh(ham)
        v0 = evecs[:, 0]
        residual = float(np.linalg.norm(ham @ v0 - evals[0] * v0))
        return SpectralReport(float(evals[0]), float(evals[1]), "dense", residual)
    if method == "iterative":
        ham = _sparse_hamiltonian(spec, penalty_variant)
        n_iter = maxiter if maxiter is not None else 100 * spec.dim
        try:
            evals, evecs = spla.eigsh(ham, k=2, which="SA", tol=tol, maxiter=n_iter)
        except spla.ArpackNoConvergence as err:
            raise IterativeConvergenceError(
                f"Lanczos did not converge for dimension {spec.dim}", n_iter
            ) from err
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        v0 = evecs[:, 0]
        residual = float(np.linalg.norm(ham @ v0 - evals[0] * v0))
        return SpectralReport(
            float(evals[0]), float(evals[1]), "iterative", residual, n_iter
        )
    raise ValueError(f"method must be 'dense' or 'iterative', got {method!r}")


def halting_penalty_bounds(alpha: float, eta: float) -> tuple[float, float]:
    """Closed-form sandwich on the final output penalty of the wrapped
    computation, as a function of initialisation overlap alpha and
    halting probability eta."""
    if not 0 <= alpha <= 1 or not 0 <= eta <= 1:
        raise ValueError("alpha and eta must lie in [0, 1]")
    lower = 1.0 - (1.0 + alpha * math.sqrt(eta)) ** 2 / 4.0
    upper = 0.75 * abs(
        alpha * math.sqrt(1.0 - eta) + math.sqrt(1.0 - alpha * alpha)
    ) ** 2
    return lower, upper


def gap_law_grid(
    t_values: list[int], mu_values: list[float], dense: bool = True
) -> list[dict]:
    """Sweep (T, mu): root-solved and dense ground energies, epsilon,
    and the two scale-free ratios whose envelopes the law freezes."""
    rows = []
    for T in t_values:
        for mu in mu_values:
            roots = root_solve_case5(T, mu)
            lam_root = 2.0 - 2.0 * math.cos(roots.k0)
            row = {
                "T": T,
                "mu": mu,
                "k0": roots.k0,
                "root_count": roots.count,
                "lambda0_root": lam_root,
                "epsilon": 1.0 - mu,
                "gap_ratio": lam_root * T * T / mu,
                "k0_scaled": roots.k0 * T / math.sqrt(mu),
            }
            if dense:
                evals = np.linalg.eigvalsh(impurity_walk_matrix(T, mu))
                row["lambda0_dense"] = float(evals[0])
            rows.append(row)
    return rows


# -- plain-text spec files ---------------------------------------------


def _format_matrix(matrix: np.ndarray) -> list[str]:
    lines = []
    for row in np.atleast_2d(matrix):
        parts = []
        for entry in row:
            z = complex(entry)
            parts.append(f"{z.real!r} {z.imag!r}")
        lines.append("  ".join(parts))
    return lines


def write_clock_spec(spec: ClockSpec, path) -> None:
    """Plain-text layout: dimensions, then row-major "re im" pairs for
    each unitary, each input projector, and the output projector."""
    lines = [f"T {spec.T}", f"dim {spec.comp_dim}"]
    for t, u in enumerate(spec.unitaries, start=1):
        lines.append(f"U {t}")
        lines.extend(_format_matrix(u))
    for k, p in enumerate(spec.input_projectors, start=1):
        lines.append(f"PI_IN {k}")
        lines.extend(_format_matrix(p))
    lines.append("PI_OUT")
    lines.extend(_format_matrix(spec.output_projector))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_clock_spec(path) -> ClockSpec:
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    T = dim = None
    sections: list[tuple[str, int, list[list[complex]]]] = []
    current: list[list[complex]] | None = None
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head in ("T", "dim") and len(tokens) == 2:
            if head == "T":
                T = int(tokens[1])
            else:
                dim = int(tokens[1])
            continue
        if head in ("U", "PI_IN", "PI_OUT"):
            current = []
            sections.append((head, lineno, current))
            continue
        if current is None:
            raise ClockSpecParseError(f"matrix row before any section: {line!r}", lineno)
        try:
            values = [float(tok) for tok in tokens]
        except ValueError:
            raise ClockSpecParseError(f"bad numeric token in {line!r}", lineno) from None
        if len(values) % 2:
            raise ClockSpecParseError("expected re/im pairs", lineno)
        current.append(
            [complex(values[2 * i], values[2 * i + 1]) for i in range(len(values) // 2)]
        )
    if T is None or dim is None:
        raise ClockSpecParseError("missing T or dim header")
    unitaries: list[np.ndarray] = []
    input_projectors: list[np.ndarray] = []
    output: np.ndarray | None = None
    for head, lineno, rows in sections:
        matrix = np.array(rows, dtype=complex)
        if matrix.shape != (dim, dim):
            raise ClockSpecParseError(
                f"{head} block has shape {matrix.shape}, expected {(dim, dim)}", lineno
            )
        if head == "U":
            unitaries.append(matrix)
        elif head == "PI_IN":
            input_projectors.append(matrix)
        else:
            output = matrix
    if output is None:
        raise ClockSpecParseError("missing PI_OUT section")
    if len(unitaries) != T:
        raise ClockSpecParseError(f"expected {T} unitaries, found {len(unitaries)}")
    try:
        return ClockSpec(T, dim, tuple(unitaries), tuple(input_projectors), output)
    except ValueError as err:
        raise ClockSpecParseError(str(err)) from err
