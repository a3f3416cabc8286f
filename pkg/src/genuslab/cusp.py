"""Internally derived q-expansions of the modular generators, and the
verification that every index series equals the substitution of the manifold's
generic genus — the computational form of modularity.

Both cusps are bootstrapped from the catalog, never from tables:

* signature cusp:  delta(q), epsilon(q) are the loop-space signature series of
  CP^2 and HP^2 (their genera are delta and epsilon);
* A-hat cusp:      the raw A-hat-word series of the same two manifolds.

The epsilon-consistency identity epsilon = 3*delta^2 - 2*(series of CP^4)
pins the bootstrap against an independent manifold in both cusps.

Weight conventions: raw series expand the weight-2k form phi(M); weight-0
comparisons divide by epsilon^{k/2} and, for odd k, compare squared series to
avoid square roots of q-series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInconsistencyError, NotInvertibleError, StructuralError
from .genus import (
    DEFAULT_QORDER,
    GenusSpec,
    IndexSeries,
    genus_value,
    loop_sign_series,
    raw_ahat_series,
)
from .manifolds import ManifoldModel, builtin
from .series import QSeries, TruncPoly

SIGNATURE_CUSP = "signature"
AHAT_CUSP = "ahat"
_CUSPS = (SIGNATURE_CUSP, AHAT_CUSP)


@dataclass(frozen=True)
class CuspExpansion:
    cusp: str
    delta_series: QSeries
    epsilon_series: QSeries
    note: str


_EXPANSION_CACHE: dict = {}


def index_series_at(model: ManifoldModel, cusp: str, qorder: int = DEFAULT_QORDER) -> IndexSeries:
    """The manifold's index series in the chosen cusp (raw, weight 2k)."""
    if cusp == SIGNATURE_CUSP:
        return loop_sign_series(model, qorder)
    if cusp == AHAT_CUSP:
        return raw_ahat_series(model, qorder)
    raise StructuralError(f"unknown cusp {cusp!r}")


def generator_expansions(cusp: str, qorder: int = DEFAULT_QORDER) -> CuspExpansion:
    """delta(q), epsilon(q) in the chosen cusp, derived from CP^2 and HP^2."""
    if qorder < 2:
        raise StructuralError("generator expansions need qorder >= 2")
    key = (cusp, qorder)
    hit = _EXPANSION_CACHE.get(key)
    if hit is not None:
        return hit
    delta = index_series_at(builtin("CP2"), cusp, qorder).series
    epsilon = index_series_at(builtin("HP2"), cusp, qorder).series
    if cusp == SIGNATURE_CUSP:
        if delta.q_coefficient(0) != 1 or epsilon.q_coefficient(0) != 1:
            raise InternalInconsistencyError(
                "signature-cusp generators must have constant term 1"
            )
    else:
        if delta.q_coefficient(0) != Fraction(-1, 8):
            raise InternalInconsistencyError("A-hat-cusp delta must start at -1/8")
        if epsilon.lowest_exponent() != 2:
            raise InternalInconsistencyError("A-hat-cusp epsilon must start at q^1")
    cp4 = index_series_at(builtin("CP4"), cusp, qorder).series
    if not epsilon.same_to(delta * delta * 3 - cp4 * 2):
        raise InternalInconsistencyError(
            f"epsilon-consistency identity fails in the {cusp} cusp"
        )
    expansion = CuspExpansion(
        cusp=cusp,
        delta_series=delta,
        epsilon_series=epsilon,
        note="derived from CP2/HP2 index series; consistency via CP4",
    )
    _EXPANSION_CACHE[key] = expansion
    return expansion


def substituted_series(model: ManifoldModel, cusp: str, qorder: int = DEFAULT_QORDER) -> QSeries:
    """The generic genus of the model with delta, epsilon replaced by q-series."""
    expansion = generator_expansions(cusp, qorder)
    value = genus_value(GenusSpec.generic(), model)
    if not isinstance(value, TruncPoly):
        raise StructuralError("substitution needs the generic genus value")
    ring = expansion.delta_series.ring
    if value.is_zero():  # e.g. HP3: signature and A-hat both vanish in weight 6
        return ring.zero()
    result = value.evaluate(
        {"delta": expansion.delta_series, "epsilon": expansion.epsilon_series}
    )
    if isinstance(result, (int, Fraction)):
        result = ring.from_fraction(result)
    return result


def verify_modularity(model: ManifoldModel, cusp: str, qorder: int = DEFAULT_QORDER) -> bool:
    """Index-series pipeline == modular-substitution pipeline, exactly to order."""
    if model.dim_real % 4:
        raise StructuralError("modularity verification needs dim divisible by 4")
    series = index_series_at(model, cusp, qorder).series
    substituted = substituted_series(model, cusp, qorder)
    return series.same_to(substituted)


@dataclass(frozen=True)
class NormalizedPhi:
    """Weight-0 normalized expansion.

    `power` is 1 when the series is Phi itself (k even) and 2 when it is
    Phi^2 (k odd, avoiding square roots of q-series); comparisons must square
    a power-1 series before matching it against a power-2 one.
    """

    series: QSeries
    power: int
    cusp: str
    manifold: str = ""


def normalized_phi(model: ManifoldModel, cusp: str, qorder: int = DEFAULT_QORDER) -> NormalizedPhi:
    """Index series divided by epsilon^{k/2} (squared identity for odd k)."""
    if model.dim_real % 4:
        raise StructuralError("normalization needs dim divisible by 4")
    k = model.dim_real // 4
    ix = index_series_at(model, cusp, qorder).series
    expansion = generator_expansions(cusp, max(qorder, 2))
    eps = expansion.epsilon_series
    if eps.is_zero():
        raise NotInvertibleError("epsilon series is zero to the computed order")
    if k % 2 == 0:
        series = ix * (eps ** (-(k // 2)) if k else eps ** 0)
        return NormalizedPhi(series, 1, cusp, model.name)
    series = (ix * ix) * eps ** (-k)
    return NormalizedPhi(series, 2, cusp, model.name)


def normalized_from_index(ix: IndexSeries, cusp: str, qorder: int = DEFAULT_QORDER) -> NormalizedPhi:
    """Normalize an already computed index series using its dimension tag."""
    k = ix.k
    expansion = generator_expansions(cusp, max(qorder, 2))
    eps = expansion.epsilon_series
    if k % 2 == 0:
        return NormalizedPhi(ix.series * eps ** (-(k // 2)) if k else ix.series * eps ** 0, 1, cusp, ix.manifold)
    return NormalizedPhi((ix.series * ix.series) * eps ** (-k), 2, cusp, ix.manifold)


def self_intersection_compare(a: IndexSeries, b: IndexSeries, cusp: str, qorder: int = DEFAULT_QORDER) -> bool:
    """Weight-0 equality of two index series of possibly different dimensions."""
    na = normalized_from_index(a, cusp, qorder)
    nb = normalized_from_index(b, cusp, qorder)
    sa, sb = na.series, nb.series
    if na.power != nb.power:
        if na.power == 1:
            sa = sa * sa
        else:
            sb = sb * sb
    return sa.same_to(sb)
