"""
Variational preparation of discretized standard-normal states.

The loader is an Ry-CNOT ansatz: a layer of single-qubit Ry rotations,
then L blocks of [CNOT ladder, Ry layer], for n(L+1) angles in total.
All amplitudes stay real, so desk-scale statevector simulation works on
plain float vectors.

Training follows a three-phase schedule: a derivative-free warmup and a
quasi-Newton refinement both minimizing the energy of a harmonic
oscillator whose ground state is the target Gaussian (m = 1/(2 sigma^2)),
then a refinement phase targeting the infinity-norm loss between target
cell masses and squared amplitudes.  Rotation angles can afterwards be
digitized to a grid of 2 pi / M_digit with a local search, modeling
discrete fault-tolerant gate synthesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm

from .qarith_resources import ResourceCount

MAX_QUBITS = 12


@dataclass(frozen=True)
class RyCnotAnsatz:
    """Ansatz shape: n qubits, L entangling blocks, n(L+1) angles."""

    n: int
    L: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"n must be in [1, {MAX_QUBITS}]")
        if self.L < 0:
            raise ValueError("L must be nonnegative")

    @property
    def n_params(self) -> int:
        return self.n * (self.L + 1)


def _cnot_ladder_permutation(n: int) -> np.ndarray:
    """Basis permutation of the ladder CNOTs, qubit i-1 controlling i.

    Gates apply in order i = 1 .. n-1; qubit 0 is the most significant
    index bit.
    """
    idx = np.arange(2**n)
    for i in range(1, n):
        control = (idx >> (n - i)) & 1
        idx = np.where(control == 1, idx ^ (1 << (n - i - 1)), idx)
    return idx


def _apply_ry_layer(state: np.ndarray, angles: np.ndarray, n: int) -> np.ndarray:
    """Apply one Ry rotation per qubit to a real statevector."""
    for q in range(n):
        c, s = math.cos(angles[q] / 2.0), math.sin(angles[q] / 2.0)
        view = state.reshape(2**q, 2, 2 ** (n - q - 1))
        v0 = view[:, 0, :].copy()
        v1 = view[:, 1, :].copy()
        view[:, 0, :] = c * v0 - s * v1
        view[:, 1, :] = s * v0 + c * v1
    return state


def simulate_ansatz(ansatz: RyCnotAnsatz, params: np.ndarray) -> np.ndarray:
    """Real statevector U(theta)|0...0> of the Ry-CNOT ansatz."""
    params = np.asarray(params, dtype=float)
    if params.size != ansatz.n_params:
        raise ValueError(
            f"expected {ansatz.n_params} parameters, got {params.size}"
        )
    n = ansatz.n
    layers = params.reshape(ansatz.L + 1, n)
    state = np.zeros(2**n)
    state[0] = 1.0
    perm = _cnot_ladder_permutation(n) if ansatz.L > 0 else None
    state = _apply_ry_layer(state, layers[0], n)
    for block in range(1, ansatz.L + 1):
        permuted = np.empty_like(state)
        permuted[perm] = state
        state = _apply_ry_layer(permuted, layers[block], n)
    return state


@dataclass(frozen=True)
class LoaderTarget:
    """Discretized standard normal on the mesh x_i = -w + i * dx.

    Cell masses g(x_i) * dx are not renormalized; the excluded tail mass
    alpha stays excluded.
    """

    n: int
    w: float = 5.0

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"n must be in [1, {MAX_QUBITS}]")
        if self.w <= 0:
            raise ValueError("w must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.w / 2**self.n

    @property
    def mesh(self) -> np.ndarray:
        return -self.w + self.dx * np.arange(2**self.n)

    @property
    def masses(self) -> np.ndarray:
        return norm.pdf(self.mesh) * self.dx

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.masses)

    @property
    def tail_mass(self) -> float:
        return 1.0 - float(np.sum(self.masses))


def linf_loss(state: np.ndarray, target: LoaderTarget) -> float:
    """Worst-cell deviation max_i |g(x_i) dx - amplitude_i^2|."""
    state = np.asarray(state, dtype=float)
    masses = target.masses
    if state.shape != masses.shape:
        raise ValueError("state and target sizes disagree")
    return float(np.max(np.abs(masses - state**2)))


def harmonic_energy(
    state: np.ndarray, m: float, x0: float, mesh: np.ndarray
) -> float:
    """Energy <H> for H = P^2/(2m) + m (X - x0)^2 / 2 on a uniform mesh.

    The position term reads probabilities off the amplitudes directly;
    the momentum term reads them off the centered Fourier transform,
    with momenta p_k = (k - N/2) * 2 pi / (N dx).
    """
    state = np.asarray(state, dtype=float)
    mesh = np.asarray(mesh, dtype=float)
    N = state.size
    dx = float(mesh[1] - mesh[0])
    probs = state**2
    e_x = 0.5 * m * float(np.sum(probs * (mesh - x0) ** 2))

    signs = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    momentum_amps = np.fft.fft(state * signs) / math.sqrt(N)
    p = (np.arange(N) - N / 2) * (2.0 * math.pi / (N * dx))
    e_p = float(np.sum(np.abs(momentum_amps) ** 2 * p**2)) / (2.0 * m)
    return e_x + e_p


def discretized_hamiltonian(m: float, x0: float, mesh: np.ndarray) -> np.ndarray:
    """Dense matrix of the discretized oscillator, for oracle comparisons."""
    mesh = np.asarray(mesh, dtype=float)
    N = mesh.size
    dx = float(mesh[1] - mesh[0])
    signs = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    # Columns: F @ psi equals the centered transform up to per-row phases,
    # which cancel inside F^dagger diag(...) F.
    F = np.fft.fft(np.diag(signs), axis=0) / math.sqrt(N)
    p = (np.arange(N) - N / 2) * (2.0 * math.pi / (N * dx))
    kinetic = F.conj().T @ np.diag(p**2 / (2.0 * m)) @ F
    potential = np.diag(0.5 * m * (mesh - x0) ** 2)
    H = kinetic + potential
    return 0.5 * (H + H.conj().T)


@dataclass(frozen=True)
class TrainResult:
    """Best parameters found and both phase losses."""

    best_params: np.ndarray
    l_inf: float
    energy: float
    restarts_used: int


def _refine_linf(
    ansatz: RyCnotAnsatz, params: np.ndarray, target: LoaderTarget
) -> np.ndarray:
    """Infinity-norm refinement: smooth surrogate descent, then direct polish."""
    masses = target.masses

    def l2(theta):
        diff = masses - simulate_ansatz(ansatz, theta) ** 2
        return float(np.sum(diff * diff))

    def linf(theta):
        return float(np.max(np.abs(masses - simulate_ansatz(ansatz, theta) ** 2)))

    res = minimize(l2, params, method="BFGS", options={"maxiter": 400, "gtol": 1e-14})
    best = res.x
    res = minimize(
        linf,
        best,
        method="Nelder-Mead",
        options={"maxiter": 4000, "fatol": 1e-14, "xatol": 1e-10},
    )
    return res.x if linf(res.x) < linf(best) else best


def train(
    n: int,
    L: int,
    restarts: int = 8,
    seed: int = 0,
    w: float = 5.0,
    warm_start: np.ndarray | None = None,
) -> TrainResult:
    """Train the loader for an n-qubit standard normal at depth L.

    Each restart runs the two-phase energy schedule (derivative-free
    warmup, then quasi-Newton) followed by infinity-norm refinement; the
    best restart by final infinity-norm wins.  A ``warm_start`` parameter
    vector (padded with zero-angle layers if shorter) joins the restart
    pool.

    Deterministic for fixed (n, L, restarts, seed, warm_start).
    """
    ansatz = RyCnotAnsatz(n=n, L=L)
    target = LoaderTarget(n=n, w=w)
    mesh = target.mesh
    m = 0.5  # 1 / (2 sigma^2) with sigma = 1

    def energy(theta):
        return harmonic_energy(simulate_ansatz(ansatz, theta), m, 0.0, mesh)

    rng = np.random.default_rng(seed)
    inits = [rng.uniform(-math.pi, math.pi, ansatz.n_params) for _ in range(restarts)]
    if warm_start is not None:
        padded = np.zeros(ansatz.n_params)
        padded[: len(warm_start)] = warm_start
        inits.insert(0, padded)

    best_params = None
    best_linf = math.inf
    best_energy = math.inf
    for theta0 in inits:
        res = minimize(
            energy, theta0, method="COBYLA", options={"maxiter": 300, "rhobeg": 0.5}
        )
        res = minimize(
            energy, res.x, method="BFGS", options={"maxiter": 300, "gtol": 1e-12}
        )
        theta = _refine_linf(ansatz, res.x, target)
        li = linf_loss(simulate_ansatz(ansatz, theta), target)
        if li < best_linf:
            best_linf = li
            best_params = theta
            best_energy = energy(theta)
    return TrainResult(
        best_params=np.asarray(best_params),
        l_inf=best_linf,
        energy=best_energy,
        restarts_used=len(inits),
    )


def train_sweep(
    n: int, depths, restarts: int = 8, seed: int = 0, w: float = 5.0
) -> dict[int, TrainResult]:
    """Train over increasing depths, warm-starting each from the previous best.

    Each entry reports the best result over trained depths <= L: a
    shallower circuit fits inside a larger depth budget (the extra
    entangling blocks are simply not applied), so the per-budget loss is
    non-increasing by construction and the carried parameters identify
    the depth that achieved it.
    """
    results: dict[int, TrainResult] = {}
    warm = None
    best: TrainResult | None = None
    for L in sorted(depths):
        result = train(n, L, restarts=restarts, seed=seed + L, w=w, warm_start=warm)
        warm = result.best_params
        if best is None or result.l_inf < best.l_inf:
            best = result
        results[L] = best
    return results


def digitize(
    params: np.ndarray, M_digit: int, ansatz: RyCnotAnsatz, target: LoaderTarget
) -> dict:
    """Snap angles to the grid 2 pi i / M_digit, then local-search on the grid.

    The search sweeps coordinates, trying one grid step in each
    direction, until a full pass makes no improvement (bounded passes).

    Returns the digitized parameters and the resulting infinity-norm.
    """
    if M_digit < 4:
        raise ValueError("M_digit must be >= 4")
    step = 2.0 * math.pi / M_digit
    theta = np.round(np.asarray(params, dtype=float) / step) * step

    def loss(t):
        return linf_loss(simulate_ansatz(ansatz, t), target)

    current = loss(theta)
    for _ in range(50):
        improved = False
        for i in range(theta.size):
            for delta in (step, -step):
                trial = theta.copy()
                trial[i] += delta
                val = loss(trial)
                if val < current - 1e-15:
                    theta, current = trial, val
                    improved = True
        if not improved:
            break
    return {"params": theta, "l_inf": current}


def loader_gate_resources(n: int, L: int, epsilon: float) -> ResourceCount:
    """Fault-tolerant cost of the trained loader: L+1 rotation layers.

    Depth follows the register-rotation model 3 n log2(n/epsilon) per
    layer; each layer holds n parallel rotations of synthesis cost
    3 log2(1/epsilon) T gates.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    layer_depth = math.ceil(3 * n * math.log2(n / epsilon))
    per_rotation = math.ceil(3 * math.log2(1 / epsilon))
    return ResourceCount(
        toffoli_count=0,
        t_count=n * (L + 1) * per_rotation,
        t_depth=layer_depth * (L + 1),
        logical_qubits=n,
    )
