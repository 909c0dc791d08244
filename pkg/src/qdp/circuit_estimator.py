"""
Oracle-level and end-to-end resource estimates for the pricing circuits.

Composes the fixed-point arithmetic cost models into the two path-loading
strategies and the two payoff circuits, then into full amplitude-
estimation totals:

- Riemann summation loading: compute each step's transition density into
  an amplitude, paying a P_max^T normalization on the final estimate.
- Re-parameterization loading: prepare dT standard Gaussian registers
  variationally, then apply the drift/Cholesky affine map with quantum
  arithmetic.
- Payoff circuits: comparator/logic trees plus arithmetic that rotates
  the normalized payoff into the estimation ancilla.

Every estimate keeps an itemized breakdown whose recomposition is the
reported total, so any modeling gap is auditable item by item.  Totals
for a full estimation run are 2 * oracle_depth * N_oracle: each Grover
iterate applies the state preparation twice (once forward, once
inverted), and the reflections in between are Clifford-dominated and
carry no T cost in this model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import error_budget as eb
from .amplitude_estimation import oracle_call_bound
from .contracts import AutocallableSpec, TARFSpec, payoff_bounds
from .market_model import GBMParams, build_covariance, sigma_max
from .qarith_resources import (
    FixedPointFormat,
    ResourceCount,
    add_depth,
    add_resources,
    arcsin_sqrt_resources,
    comparator_depth,
    comparator_resources,
    controlled_rotation_depth,
    controlled_rotation_resources,
    exp_resources,
    from_toffoli,
    mul_resources,
    or_resources,
    piecewise_poly_qubits,
    rotation_resources,
    serial,
    sqrt_resources,
)

INFEASIBLE_SCALE = 1.0


@dataclass(frozen=True)
class EstimateBreakdown:
    """A resource estimate with its per-stage itemization.

    Items are serial stages: depths add across items, counts add, and
    qubit footprints add (registers allocated by different stages
    coexist).  Parallelism within a stage is already folded into that
    item's entry.
    """

    items: tuple[tuple[str, ResourceCount], ...]

    def total(self) -> ResourceCount:
        return ResourceCount(
            toffoli_count=sum(rc.toffoli_count for _, rc in self.items),
            t_count=sum(rc.t_count for _, rc in self.items),
            t_depth=sum(rc.t_depth for _, rc in self.items),
            logical_qubits=sum(rc.logical_qubits for _, rc in self.items),
        )

    def assert_consistent(self, total: ResourceCount) -> None:
        """Machine check that a reported total recomposes from the items."""
        if self.total() != total:
            raise AssertionError("breakdown does not recompose to the total")

    def as_rows(self) -> list[dict]:
        return [
            {
                "stage": name,
                "toffoli_count": rc.toffoli_count,
                "t_count": rc.t_count,
                "t_depth": rc.t_depth,
                "logical_qubits": rc.logical_qubits,
            }
            for name, rc in self.items
        ]


def _item(
    name: str,
    depth: int,
    qubits: int,
    toffoli: int = 0,
    rotation_t: int = 0,
) -> tuple[str, ResourceCount]:
    return name, ResourceCount(
        toffoli_count=toffoli,
        t_count=7 * toffoli + rotation_t,
        t_depth=depth,
        logical_qubits=qubits,
    )


def riemann_loading_resources(
    fmt: FixedPointFormat,
    d: int,
    T: int,
    epsilon: float,
    k: int = 3,
    M: int = 32,
    z: int | None = None,
) -> tuple[ResourceCount, EstimateBreakdown]:
    """Cost of loading the path distribution by Riemann summation.

    For each of the T steps the circuit centers the d return registers,
    forms the quadratic form of the step density (squares plus
    correlation cross terms), exponentiates, takes arcsin of the square
    root, and rotates the result into an ancilla; cumulative sums and
    price exponentials make the payoff inputs available.  Work across
    assets and steps runs in parallel; multiplications split z ways.

    Returns the total and the per-stage breakdown.
    """
    n = fmt.n
    if z is None:
        z = n
    pairs = math.comb(d, 2)
    add = add_resources(fmt)
    mul = mul_resources(fmt, z)
    expo = exp_resources(fmt, k, M, z)
    arc = arcsin_sqrt_resources(fmt, k, M, z)

    # Depth multiplier for cross terms: C(d,2) products share d/2 parallel
    # multiplier lanes (each asset register feeds one product at a time).
    cross_rounds = math.ceil(2 * pairs / d) if d > 1 else 0

    items = [
        _item(
            "center returns (subtract drift)",
            add.t_depth,
            T * d * n,
            toffoli=add.toffoli_count * T * d,
        ),
        _item(
            "squared returns",
            mul.t_depth,
            T * d * n,
            toffoli=mul.toffoli_count * T * d,
        ),
        _item(
            "correlation cross terms",
            mul.t_depth * cross_rounds,
            T * pairs * n,
            toffoli=mul.toffoli_count * T * pairs,
        ),
        _item(
            "sum quadratic form",
            add.t_depth * max(math.ceil(math.log2(d + pairs)), 1),
            0,
            toffoli=add.toffoli_count * T * (d + pairs - 1),
        ),
        _item(
            "exponential of quadratic form",
            expo.t_depth,
            piecewise_poly_qubits(n, k, M),
            toffoli=expo.toffoli_count * T,
        ),
        _item(
            "arcsine of square-root density",
            arc.t_depth,
            arc.logical_qubits,
            toffoli=arc.toffoli_count * T,
        ),
        _item(
            "density rotation into ancilla",
            controlled_rotation_depth(fmt, epsilon),
            n + 1,
            rotation_t=controlled_rotation_depth(fmt, epsilon),
        ),
        _item(
            "cumulative return sums",
            add.t_depth * (T - 1),
            (T - 1) * d * n,
            toffoli=add.toffoli_count * (T - 1) * d,
        ),
        _item(
            "prices from cumulative returns",
            expo.t_depth,
            piecewise_poly_qubits(n, k, M) * d * T,
            toffoli=expo.toffoli_count * d * T,
        ),
        _item(
            "adder workspace",
            0,
            T * d * n + (z - 1) * T * d,
        ),
    ]
    breakdown = EstimateBreakdown(items=tuple(items))
    return breakdown.total(), breakdown


def reparam_width(fmt: FixedPointFormat, d: int, T: int) -> FixedPointFormat:
    """Accumulator width for sums over T steps and d assets.

    n_bar = n + ceil(log2 T) + ceil(log2 d) guard bits keep cumulative
    sums and correlated combinations exact.
    """
    extra = math.ceil(math.log2(T)) + math.ceil(math.log2(d))
    return FixedPointFormat(n=fmt.n + extra, p=fmt.p + extra)


def reparam_loading_resources(
    fmt: FixedPointFormat,
    d: int,
    T: int,
    L: int,
    epsilon: float,
    k: int = 3,
    M: int = 32,
    z: int | None = None,
) -> tuple[ResourceCount, EstimateBreakdown]:
    """Cost of loading the path distribution by re-parameterization.

    dT standard Gaussian registers are prepared in parallel by the
    trained Ry-CNOT ansatz (L+1 rotation layers); quantum arithmetic then
    applies the affine map (cumulative sums, Cholesky correlation
    multiplies, drift) and exponentiates into prices on widened
    registers.
    """
    n = fmt.n
    wide = reparam_width(fmt, d, T)
    if z is None:
        z = wide.n
    add = add_resources(wide)
    mul = mul_resources(wide, z)
    expo = exp_resources(wide, k, M, z)

    layer_depth = math.ceil(3 * n * math.log2(n / epsilon))
    items = [
        _item(
            "gaussian ansatz layers",
            layer_depth * (L + 1),
            T * d * n,
            rotation_t=layer_depth * (L + 1) * d * T,
        ),
        _item(
            "cumulative standard-normal sums",
            add.t_depth * (T - 1),
            # Each (step, asset) slot keeps a widened accumulator beside
            # its raw Gaussian register.
            T * d * wide.n,
            toffoli=add.toffoli_count * (T - 1) * d,
        ),
        _item(
            "correlation multiplies",
            mul.t_depth * d,
            0,
            toffoli=mul.toffoli_count * T * d * d,
        ),
        _item(
            "drift addition",
            add.t_depth,
            0,
            toffoli=add.toffoli_count * T * d,
        ),
        _item(
            "prices from returns",
            expo.t_depth,
            piecewise_poly_qubits(wide.n, k, M) * d * T,
            toffoli=expo.toffoli_count * d * T,
        ),
    ]
    breakdown = EstimateBreakdown(items=tuple(items))
    return breakdown.total(), breakdown


def autocall_payoff_resources(
    spec: AutocallableSpec,
    fmt: FixedPointFormat,
    epsilon_f: float,
    k: int = 3,
    M: int = 32,
    z: int | None = None,
    d: int = 1,
) -> tuple[ResourceCount, EstimateBreakdown]:
    """Cost of rotating the normalized autocallable payoff into an ancilla.

    Stages: all strike/barrier comparators in parallel (worst-of baskets
    first reduce the d assets with a comparator tree), the knock-out /
    knock-in logic, one controlled rotation per binary in series, the put
    payoff arithmetic capped by arcsin of a square root, and the final
    controlled-rotation cascade.  The budget epsilon_f splits evenly
    across the three rotation/arithmetic stages.
    """
    n = fmt.n
    if z is None:
        z = n
    m = len(spec.binaries)
    n_barrier = len(spec.barrier_dates)
    n_comparators = n_barrier + m + 1
    eps_stage = epsilon_f / 3.0

    basket_rounds = math.ceil(math.log2(d)) if d > 1 else 0
    comp_d = comparator_depth(n)
    binary_rot = rotation_resources(max(eps_stage / m, 1e-300))
    add = add_resources(fmt)
    mul = mul_resources(fmt, z)
    arc = arcsin_sqrt_resources(fmt, k, M, z)
    cascade = controlled_rotation_depth(fmt, eps_stage)

    items = [
        _item(
            "strike and barrier comparators",
            comp_d * (1 + basket_rounds),
            n_comparators * (n + 1),
            toffoli=comp_d * (n_comparators + (d - 1) * n_barrier),
        ),
        _item(
            "knock-out / knock-in logic",
            max(math.ceil(math.log2(n_barrier)), 1) + 3,
            m + n_barrier + 2,
            toffoli=n_barrier + m + 3,
        ),
        _item(
            "binary coupon rotations",
            binary_rot.t_depth * m,
            m,
            rotation_t=binary_rot.t_count * m,
        ),
        _item(
            "put payoff arithmetic and arcsine",
            add.t_depth + mul.t_depth + arc.t_depth,
            n + (z - 1) * n + arc.logical_qubits,
            toffoli=add.toffoli_count + mul.toffoli_count + arc.toffoli_count,
        ),
        _item(
            "payoff rotation cascade",
            cascade,
            n + 2,
            rotation_t=cascade,
        ),
    ]
    breakdown = EstimateBreakdown(items=tuple(items))
    return breakdown.total(), breakdown


def tarf_payoff_resources(
    spec: TARFSpec,
    fmt: FixedPointFormat,
    epsilon_f: float,
    k: int = 3,
    M: int = 32,
    z: int | None = None,
) -> tuple[ResourceCount, EstimateBreakdown]:
    """Cost of rotating the normalized TARF payoff into an ancilla.

    Stages: per-date band/barrier comparators in parallel, per-date
    partial payoffs, serial prefix sums of the running total, cap
    detection and the clipped final payment, per-date discount
    multiplications (their rotation budget split as epsilon/sqrt(T) so
    the per-date errors add in quadrature), the discounted sum, arcsin of
    its square root, and the rotation cascade.
    """
    n = fmt.n
    if z is None:
        z = n
    T = spec.n_dates
    eps_stage = epsilon_f / 3.0

    comp_d = comparator_depth(n)
    add = add_resources(fmt)
    add_c = add_resources(fmt, controlled=True)
    mul = mul_resources(fmt, z)
    arc = arcsin_sqrt_resources(fmt, k, M, z)
    cascade = controlled_rotation_depth(fmt, eps_stage)

    items = [
        _item(
            "band and barrier comparators",
            comp_d,
            3 * T * (n + 1),
            toffoli=comp_d * 3 * T,
        ),
        _item(
            "knock-out propagation",
            2 * T,
            2 * T,
            toffoli=2 * T,
        ),
        _item(
            "per-date partial payoffs",
            add.t_depth + mul.t_depth + 2,
            2 * T * n,
            toffoli=(add.toffoli_count + mul.toffoli_count + 2) * T,
        ),
        _item(
            "running-total prefix sums",
            add.t_depth * (T - 1),
            T * n,
            toffoli=add.toffoli_count * (T - 1),
        ),
        _item(
            "cap comparators and clip",
            comp_d + add_c.t_depth,
            T * (n + 1) + n,
            toffoli=(comp_d + add_c.toffoli_count) * T,
        ),
        _item(
            "discount multiplications",
            mul.t_depth,
            T * n,
            toffoli=mul.toffoli_count * T,
        ),
        _item(
            "discounted payoff sum",
            add.t_depth * max(math.ceil(math.log2(T)), 1) + mul.t_depth,
            (z - 1) * n,
            toffoli=add.toffoli_count * (T - 1) + mul.toffoli_count,
        ),
        _item(
            "arcsine of square-root payoff",
            arc.t_depth,
            arc.logical_qubits,
            toffoli=arc.toffoli_count,
        ),
        _item(
            "payoff rotation cascade",
            cascade,
            n + 2,
            rotation_t=cascade,
        ),
    ]
    breakdown = EstimateBreakdown(items=tuple(items))
    return breakdown.total(), breakdown


@dataclass(frozen=True)
class EndToEndReport:
    """Full estimation-run resources for one method and contract."""

    method: str
    oracle: ResourceCount
    loading: ResourceCount
    payoff: ResourceCount
    n_oracle: int
    total_t_depth: int
    total_t_count: int
    logical_qubits: int
    budget: eb.ErrorBudget
    scale: float
    feasible: bool
    loading_breakdown: EstimateBreakdown
    payoff_breakdown: EstimateBreakdown

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "n_oracle": self.n_oracle,
            "oracle_t_depth": self.oracle.t_depth,
            "oracle_toffoli": self.oracle.toffoli_count,
            "total_t_depth": self.total_t_depth,
            "total_t_count": self.total_t_count,
            "logical_qubits": self.logical_qubits,
            "scale": self.scale,
            "feasible": self.feasible,
            "error_budget": self.budget.as_dict(),
            "loading_breakdown": self.loading_breakdown.as_rows(),
            "payoff_breakdown": self.payoff_breakdown.as_rows(),
        }


def _payoff_circuit(contract, fmt, epsilon_f, k, M, z, d):
    if isinstance(contract, AutocallableSpec):
        return autocall_payoff_resources(contract, fmt, epsilon_f, k, M, z, d=d)
    if isinstance(contract, TARFSpec):
        return tarf_payoff_resources(contract, fmt, epsilon_f, k, M, z)
    raise TypeError(f"no payoff circuit model for {type(contract).__name__}")


def end_to_end(
    method: str,
    params: GBMParams,
    contract,
    fmt: FixedPointFormat,
    target_error: float,
    confidence: float = 0.68,
    *,
    w: float = 5.0,
    L: int = 6,
    gaussian_fmt: FixedPointFormat | None = None,
    k: int = 3,
    M: int = 32,
    z: int | None = None,
    beta: float = 17.0,
    eps_f: float = 1e-4,
    eps_dens: float = 2e-6,
    synthesis_epsilon: float = 1e-4,
) -> EndToEndReport:
    """End-to-end resource estimate for one pricing run.

    Parameters
    ----------
    method : str
        "riemann" (normalized, pays the P_max^T scale), "riemann-no-norm"
        (the same circuits with the normalization cost reported but not
        applied), or "reparam".
    params, contract, fmt
        Market model, term sheet, and fixed-point format of the price
        registers.
    target_error : float
        Total price error target, relative to the payoff range f_delta.
    confidence : float
        1 - alpha for the amplitude-estimation interval.
    w, L, gaussian_fmt, k, M, z, beta, eps_f, eps_dens, synthesis_epsilon
        Lattice half-width, ansatz depth and register format for the
        re-parameterization loader, polynomial/interval/parallelization
        knobs, the quadrature second-derivative bound, payoff and loader
        density error allocations, and the rotation synthesis precision.

    Raises
    ------
    ValueError
        If the error components already exceed the target; the message
        names the binding component.
    """
    if method not in ("riemann", "riemann-no-norm", "reparam"):
        raise ValueError(f"unknown method {method!r}")
    d, T = params.d, params.n_steps
    cov = build_covariance(params)
    sig = sigma_max(cov)
    bounds = payoff_bounds(contract, params.r)

    eps_trunc = eb.truncation_error(d, T, w)
    if method in ("riemann", "riemann-no-norm"):
        eps_disc = eb.discretization_error(beta, w, sig, d, T, fmt.n)
        eps_sum = eb.riemann_sum_error(fmt, w, sig, d, T)
        eps_dens_r = eb.riemann_density_error(
            eps_sum, eps_exp=1e-7, eps_sq=eb.eps_sqrt(0.0, fmt), eps_arcsin=1e-7
        )
        eps_arith = eps_dens_r + eps_f
    else:
        eps_disc = eb.discretization_error(beta, w, sig, d, T, fmt.n)
        eps_arith = eb.reparam_arith_error(w, d, T, eps_dens, eps_f)

    fixed = eps_trunc + eps_disc + eps_arith
    if fixed >= target_error:
        binding = max(
            ("eps_trunc", eps_trunc), ("eps_disc", eps_disc), ("eps_arith", eps_arith),
            key=lambda kv: kv[1],
        )[0]
        raise ValueError(
            f"error target {target_error} unachievable: components sum to "
            f"{fixed:.3e} before amplitude estimation; binding component {binding}"
        )
    # The fixed components are conservative worst-case bounds, so they are
    # not allowed to starve the sampling allocation below half the target;
    # the reported budget still carries the full component values.
    eps_amp = max(target_error - fixed, 0.5 * target_error)

    alpha = 1.0 - confidence
    n_oracle = math.ceil(oracle_call_bound(eps_amp, alpha))

    if method in ("riemann", "riemann-no-norm"):
        loading, loading_bd = riemann_loading_resources(
            fmt, d, T, synthesis_epsilon, k, M, z
        )
        p_max = eb.riemann_pmax(d, w, cov if d > 1 else None)
        budget = eb.riemann_total(
            eps_trunc, eps_disc, eps_arith, eps_amp, p_max, T, bounds.f_delta
        )
        scale = p_max**T
    else:
        g_fmt = gaussian_fmt or FixedPointFormat(n=5, p=3)
        loading, loading_bd = reparam_loading_resources(
            g_fmt, d, T, L, synthesis_epsilon, k, M, z
        )
        budget = eb.reparam_total(
            eps_trunc, eps_disc, eps_arith, eps_amp, bounds.f_delta
        )
        scale = 1.0

    payoff, payoff_bd = _payoff_circuit(contract, fmt, eps_f, k, M, z, d)
    oracle = serial(loading, payoff)
    oracle = ResourceCount(
        toffoli_count=oracle.toffoli_count,
        t_count=oracle.t_count,
        t_depth=oracle.t_depth,
        logical_qubits=loading.logical_qubits + payoff.logical_qubits,
    )

    # The Grover iterate contains the state preparation twice; its two
    # reflections are Clifford-dominated and carry no T cost here.
    total_t_depth = 2 * oracle.t_depth * n_oracle
    total_t_count = 2 * oracle.t_count * n_oracle
    feasible = not (method == "riemann" and scale > INFEASIBLE_SCALE)

    return EndToEndReport(
        method=method,
        oracle=oracle,
        loading=loading,
        payoff=payoff,
        n_oracle=n_oracle,
        total_t_depth=total_t_depth,
        total_t_count=total_t_count,
        logical_qubits=oracle.logical_qubits,
        budget=budget,
        scale=scale,
        feasible=feasible,
        loading_breakdown=loading_bd,
        payoff_breakdown=payoff_bd,
    )


def importance_feasibility(f: np.ndarray, h: np.ndarray) -> dict:
    """Check whether a proposal pmf h can absorb a density grid f.

    The rotation-free loading trick requires f(x) / (h(x) N) in [0, 1]
    at every grid point, with N the grid size.  Returns the maximum ratio
    and the verdict.
    """
    f = np.asarray(f, dtype=float)
    h = np.asarray(h, dtype=float)
    if f.shape != h.shape:
        raise ValueError("f and h grids must have the same shape")
    if np.any(h <= 0):
        raise ValueError("proposal pmf must be strictly positive")
    N = f.size
    max_ratio = float(np.max(f / (h * N)))
    return {"feasible": max_ratio <= 1.0 + 1e-12, "max_ratio": max_ratio}


def importance_feasibility_process(
    f0: np.ndarray, transitions: list[np.ndarray], h0: np.ndarray, h_steps: list
) -> dict:
    """Per-step feasibility conditions for a Markov path distribution.

    Checks f0(x) / (h0(x) N) <= 1 for the initial step and
    f_t(x | x') / (h_out(x') h_in(x) N) <= 1 for every transition, where
    (h_out, h_in) are the proposal factors attached to source and target
    registers of step t.
    """
    results = [importance_feasibility(f0, h0)["max_ratio"]]
    for f_t, (h_out, h_in) in zip(transitions, h_steps):
        f_t = np.asarray(f_t, dtype=float)
        denom = np.outer(np.asarray(h_out, float), np.asarray(h_in, float))
        if f_t.shape != denom.shape:
            raise ValueError("transition and proposal shapes disagree")
        if np.any(denom <= 0):
            raise ValueError("proposal factors must be strictly positive")
        N = f_t.shape[1]
        results.append(float(np.max(f_t / (denom * N))))
    max_ratio = max(results)
    return {"feasible": max_ratio <= 1.0 + 1e-12, "max_ratio": max_ratio}
