"""Constant-elasticity-of-substitution (CES) production technology.

Each vessel/target pair is modeled as a price-taking producer with a
generalized CES technology

    output(x) = alpha * (sum_j beta_j * x_j**rho) ** (delta / rho)

where ``x`` is the vector of input levels, the share weights ``beta`` sum
to one, ``rho < 1`` controls input substitutability and ``delta`` in (0, 1)
sets decreasing returns to scale.  ``rho == 0`` is treated as the
Cobb-Douglas limit ``alpha * prod_j x_j**(beta_j * delta)``.

Two reparameterizations tie the technology to observable behavior:

* ``delta_from_eta`` maps a per-vessel supply elasticity to the returns
  parameter (the cost dual gives supply proportional to price**eta);
* ``rho_from_sigma`` maps an elasticity of substitution between inputs to
  the exponent ``rho``.

Everything here is closed form: cost minimization, the cost function
``C(y) = cost_scale * y**(1/delta)``, and the profit-maximizing output at
a given net output price.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .validation import (
    as_float_array,
    check_finite_scalar,
    check_nonnegative,
    check_positive,
    frozen_array,
    require,
)

__all__ = [
    "CesParams",
    "delta_from_eta",
    "rho_from_sigma",
    "production",
    "marginal_products",
    "marginal_product",
    "min_cost_inputs",
    "production_cost",
    "cost_scale",
    "marginal_cost",
    "optimal_output",
    "output_at_price",
]


def delta_from_eta(eta: float) -> float:
    """Returns-to-scale exponent implied by a supply elasticity ``eta``.

    With cost dual ``C(y) = K * y**(1/delta)`` the profit-maximizing output
    responds to the net price as ``y* = (P*delta/K)**(delta/(1-delta))``, so
    the price elasticity of supply is ``delta/(1-delta)``.  Inverting gives
    ``delta = eta/(1+eta)``, which lies in (0, 1) for any positive ``eta``.
    """
    eta = check_positive(eta, "eta")
    return eta / (1.0 + eta)


def rho_from_sigma(sigma: float) -> float:
    """CES exponent implied by an elasticity of substitution ``sigma``.

    ``rho = (sigma - 1)/sigma``; ``sigma == 1`` maps to the Cobb-Douglas
    limit ``rho == 0``, values below one give complementary inputs
    (``rho < 0``).
    """
    sigma = check_positive(sigma, "sigma")
    return (sigma - 1.0) / sigma


@dataclass(frozen=True, eq=False)
class CesParams:
    """Calibrated technology and valuation parameters for one vessel/target.

    ``unobserved_value`` is the per-pound residual value of catch (positive
    or negative) that rationalizes the vessel's observed behavior; it enters
    the net output price but not the technology.
    """

    alpha: float
    beta: np.ndarray
    delta: float
    rho: float
    unobserved_value: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_positive(self.alpha, "alpha"))
        object.__setattr__(self, "delta", check_finite_scalar(self.delta, "delta"))
        object.__setattr__(self, "rho", check_finite_scalar(self.rho, "rho"))
        object.__setattr__(
            self, "unobserved_value", check_finite_scalar(self.unobserved_value, "unobserved_value")
        )
        require(0.0 < self.delta < 1.0, f"delta must lie in (0, 1), got {self.delta}")
        require(self.rho < 1.0, f"rho must be < 1, got {self.rho}")
        beta = frozen_array(self.beta, "beta")
        require(beta.size > 0, "beta must not be empty")
        require(np.all(beta >= 0.0), "beta entries must be non-negative")
        total = float(beta.sum())
        require(abs(total - 1.0) <= 1e-9, f"beta must sum to 1, got {total!r}")
        object.__setattr__(self, "beta", beta)

    @property
    def n_inputs(self) -> int:
        return int(self.beta.size)

    @property
    def active(self) -> np.ndarray:
        """Boolean mask of inputs with positive share weight."""
        return self.beta > 0.0


def _check_levels(params: CesParams, x: np.ndarray | list[float]) -> np.ndarray:
    x = as_float_array(x, "input levels", length=params.n_inputs)
    require(np.all(x >= 0.0), "input levels must be non-negative")
    return x


def _ces_index(beta: np.ndarray, x: np.ndarray, rho: float) -> float:
    # Degree-one aggregate over strictly positive levels; callers handle zeros.
    if rho == 0.0:
        return float(np.exp(np.sum(beta * np.log(x))))
    return float(np.sum(beta * x**rho) ** (1.0 / rho))


def production(params: CesParams, x: np.ndarray | list[float]) -> float:
    """Output (pounds of catch) produced from input levels ``x``.

    Inputs with zero share weight are ignored.  For ``rho <= 0`` the
    technology needs every weighted input: any zero level yields zero
    output (the limit of the aggregator).
    """
    x = _check_levels(params, x)
    a = params.active
    xa, ba = x[a], params.beta[a]
    if np.any(xa == 0.0):
        if params.rho <= 0.0:
            return 0.0
        keep = xa > 0.0
        if not np.any(keep):
            return 0.0
        xa, ba = xa[keep], ba[keep]
    return params.alpha * _ces_index(ba, xa, params.rho) ** params.delta


def marginal_products(params: CesParams, x: np.ndarray | list[float]) -> np.ndarray:
    """Vector of marginal physical products at ``x``.

    For a weighted input ``j``:

        MP_j = delta * y * beta_j * x_j**(rho-1) / sum_k beta_k * x_k**rho

    (``delta * y * beta_j / x_j`` in the Cobb-Douglas limit).  Inputs with
    zero weight have zero marginal product.  Degree-``delta`` homogeneity
    gives the identity ``sum_j x_j * MP_j == delta * y``.
    """
    x = _check_levels(params, x)
    a = params.active
    if np.any(x[a] == 0.0):
        raise ValidationError(
            "marginal products are undefined at a zero level of a weighted input "
            f"(levels {x.tolist()})"
        )
    y = production(params, x)
    mp = np.zeros_like(x)
    if params.rho == 0.0:
        mp[a] = params.delta * y * params.beta[a] / x[a]
    else:
        s = np.sum(params.beta[a] * x[a] ** params.rho)
        mp[a] = params.delta * y * params.beta[a] * x[a] ** (params.rho - 1.0) / s
    return mp


def marginal_product(params: CesParams, x: np.ndarray | list[float], j: int) -> float:
    """Marginal product of the single input at index ``j``."""
    n = params.n_inputs
    require(-n <= int(j) < n, f"input index {j} out of range for {n} inputs")
    return float(marginal_products(params, x)[int(j)])


def _dual_basis(params: CesParams, input_prices: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Cost-minimizing input direction and its aggregate value.

    Returns ``(s, g, kappa)`` where ``s`` solves the first-order conditions
    up to scale (``s_j = (beta_j/c_j)**(1/(1-rho))`` on weighted inputs),
    ``g`` is the CES index of ``s`` and ``kappa = c @ s / g`` is the cost of
    producing one unit of the index.
    """
    a = params.active
    s = np.zeros(params.n_inputs)
    s[a] = (params.beta[a] / input_prices[a]) ** (1.0 / (1.0 - params.rho))
    g = _ces_index(params.beta[a], s[a], params.rho)
    kappa = float(input_prices @ s) / g
    return s, g, kappa


def _resolve_prices(params: CesParams, input_prices: np.ndarray | list[float] | None) -> np.ndarray:
    if input_prices is None:
        return np.ones(params.n_inputs)
    c = as_float_array(input_prices, "input prices", length=params.n_inputs)
    require(np.all(c > 0.0), "input prices must be positive")
    return c


def min_cost_inputs(
    params: CesParams, y: float, input_prices: np.ndarray | list[float] | None = None
) -> np.ndarray:
    """Cheapest input bundle producing output ``y`` at the given prices.

    ``input_prices`` defaults to ones, i.e. levels measured in dollars.
    Inputs with zero share weight are not purchased.  ``y == 0`` returns
    the zero bundle.
    """
    y = check_nonnegative(y, "target output")
    c = _resolve_prices(params, input_prices)
    if y == 0.0:
        return np.zeros(params.n_inputs)
    s, g, _ = _dual_basis(params, c)
    scale = (y / params.alpha) ** (1.0 / params.delta) / g
    return s * scale


def production_cost(
    params: CesParams, y: float, input_prices: np.ndarray | list[float] | None = None
) -> float:
    """Minimized expenditure ``c @ x`` needed to produce ``y``."""
    y = check_nonnegative(y, "target output")
    c = _resolve_prices(params, input_prices)
    if y == 0.0:
        return 0.0
    return cost_scale(params, c) * y ** (1.0 / params.delta)


def cost_scale(params: CesParams, input_prices: np.ndarray | list[float] | None = None) -> float:
    """Coefficient ``K`` of the cost function ``C(y) = K * y**(1/delta)``."""
    c = _resolve_prices(params, input_prices)
    _, _, kappa = _dual_basis(params, c)
    return kappa * params.alpha ** (-1.0 / params.delta)


def marginal_cost(
    params: CesParams, y: float, input_prices: np.ndarray | list[float] | None = None
) -> float:
    y = check_nonnegative(y, "output")
    if y == 0.0:
        return 0.0
    k = cost_scale(params, _resolve_prices(params, input_prices))
    return (k / params.delta) * y ** (1.0 / params.delta - 1.0)


def output_at_price(
    net_price: float | np.ndarray, k: float | np.ndarray, delta: float
) -> float | np.ndarray:
    """Profit-maximizing output given net price and cost coefficient ``k``.

    Setting marginal cost equal to the net output price and solving gives
    ``y* = (net_price * delta / k) ** (delta / (1 - delta))``; the exponent
    equals the supply elasticity ``eta``.  Callers must ensure
    ``net_price > 0`` (a non-positive net price means shutting down).
    """
    return (np.asarray(net_price) * delta / k) ** (delta / (1.0 - delta))


def optimal_output(
    params: CesParams,
    effective_price: float,
    input_prices: np.ndarray | list[float] | None = None,
) -> tuple[float, np.ndarray]:
    """Profit-maximizing output and input bundle at an effective price.

    The effective price is the per-pound value net of any constraint
    charge.  A non-positive effective price shuts the operation down:
    ``(0.0, zero bundle)``.
    """
    effective_price = check_finite_scalar(effective_price, "effective price")
    c = _resolve_prices(params, input_prices)
    if effective_price <= 0.0:
        return 0.0, np.zeros(params.n_inputs)
    k = cost_scale(params, c)
    y = float(output_at_price(effective_price, k, params.delta))
    return y, min_cost_inputs(params, y, c)
