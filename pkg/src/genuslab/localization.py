"""Lefschetz fixed-point computation of equivariant twisted-signature series.

A circle action is given by its fixed components: each carries a manifold
model (possibly a point) and the normal data, a list of complex line summands
(first Chern class as a linear form in the component's generators, nonzero
integer rotation weight).  At an exact sample value lambda (rational, or
Gaussian rational for order-4 points) the local term of a component X is

    < T-factors(tangent roots of X) * N-factors(normal summands), [X] >

with the loop-space signature density as T-factor and, per normal summand
(y, w) and q-level n,

    N = (1 + lam^-w e^-y) / (1 - lam^-w e^-y)
        * prod_n (1 + q^n lam^w e^y)(1 + q^n lam^-w e^-y)
                / ((1 - q^n lam^w e^y)(1 - q^n lam^-w e^-y)).

Sample points are admissible when no lam^w = 1 for an occurring weight w;
constancy of a character over three exact off-circle samples certifies it
everywhere, which is how rigidity is checked.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import StructuralError, ValidationError
from .genus import DEFAULT_QORDER, loop_sign_series, word_factor_product
from .manifolds import ManifoldModel, builtin, load_model
from .rings import QI, QQ, GaussianRational, as_fraction
from .series import PolyRing, QSeries, SeriesRing, TruncPoly


@dataclass(frozen=True)
class NormalSummand:
    chern: dict          # {symbol: Fraction} in the component's generators
    weight: int

    def __post_init__(self):
        if self.weight == 0:
            raise ValidationError("normal rotation weights must be nonzero", code="invalid")


@dataclass(frozen=True)
class FixedComponent:
    model: ManifoldModel
    normal: tuple[NormalSummand, ...]

    @property
    def codim(self) -> int:
        return 2 * len(self.normal)

    def weights(self) -> list[int]:
        return [s.weight for s in self.normal]


@dataclass(frozen=True)
class CircleActionData:
    ambient_dim: int
    components: tuple[FixedComponent, ...]
    provenance: str
    ambient_spin: bool
    ambient_model: ManifoldModel | None = field(default=None, compare=False)
    name: str = ""

    def validate(self) -> "CircleActionData":
        for comp in self.components:
            if comp.model.dim_real + comp.codim != self.ambient_dim:
                raise ValidationError(
                    f"component {comp.model.name}: dim {comp.model.dim_real} + "
                    f"codim {comp.codim} != ambient {self.ambient_dim}",
                    code="dimension-mismatch",
                )
        return self

    def all_weights(self) -> list[int]:
        out = []
        for comp in self.components:
            out.extend(comp.weights())
        return out


def detect_parity(action: CircleActionData):
    """'even' if every fixed codimension is 0 mod 4, 'odd' if 2 mod 4, else None."""
    residues = {comp.codim % 4 for comp in action.components}
    if residues <= {0}:
        return "even"
    if residues <= {2}:
        return "odd"
    return None


def odd_action_forces_zero(action: CircleActionData) -> bool:
    """Spin ambient with odd action: the normalized genus vanishes identically."""
    return bool(action.ambient_spin) and detect_parity(action) == "odd"


# -- sample points -------------------------------------------------------------


def base_ring_for(lam):
    return QI if isinstance(lam, GaussianRational) else QQ


def check_admissible(action: CircleActionData, lam) -> None:
    """No lambda^w may equal 1 for any occurring weight w."""
    base = base_ring_for(lam)
    lam = base.from_fraction(lam) if not isinstance(lam, GaussianRational) else lam
    one = base.one()
    if lam == one or base.is_zero(lam):
        raise ValidationError(f"sample {lam} is not admissible", code="inadmissible")
    for w in action.all_weights():
        if lam ** w == one:
            raise ValidationError(
                f"sample {lam} is inadmissible: lambda^{w} = 1", code="inadmissible"
            )


# -- local terms ----------------------------------------------------------------


def _exp_of(form: TruncPoly) -> TruncPoly:
    return form.exp()


def local_term(component: FixedComponent, lam, qorder: int = DEFAULT_QORDER) -> QSeries:
    """Equivariant local contribution of one fixed component at sample lam."""
    base = base_ring_for(lam)
    lam = base.from_fraction(lam)
    sorder = 2 * qorder + 2
    S = SeriesRing(base, sorder)
    model = component.model
    ring = model.poly_ring(S)
    total = word_factor_product(model, "word-loop", S)
    one = ring.one()
    for summand in component.normal:
        lw = lam ** summand.weight
        lwi = lam ** (-summand.weight)
        if lw == base.one():
            raise ValidationError(
                f"sample inadmissible on weight {summand.weight}", code="inadmissible"
            )
        y = ring.linear_form(summand.chern)
        e_pos = _exp_of(y)
        e_neg = _exp_of(-y)
        factor = (one + e_neg * lwi) * (one - e_neg * lwi).inverse()
        n = 1
        while 2 * n < sorder:
            qn_pos = ring.const(S.q_monomial(n, lw))
            qn_neg = ring.const(S.q_monomial(n, lwi))
            numer = (one + qn_pos * e_pos) * (one + qn_neg * e_neg)
            denom = (one - qn_pos * e_pos) * (one - qn_neg * e_neg)
            factor = factor * numer * denom.inverse()
            n += 1
        total = total * factor
    return model.integrate(total)


def equivariant_series(action: CircleActionData, lam, qorder: int = DEFAULT_QORDER) -> QSeries:
    """Sum of the local terms over all fixed components."""
    check_admissible(action, lam)
    terms = [local_term(comp, lam, qorder) for comp in action.components]
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _promote_to_gaussian(series: QSeries) -> QSeries:
    ring = SeriesRing(QI, series.ring.order)
    return QSeries(ring, series.lo, [QI.from_fraction(c) for c in series.coeffs], series.order)


# -- rigidity -------------------------------------------------------------------


@dataclass(frozen=True)
class RigidityReport:
    action: str
    samples: tuple
    qorder: int
    spin: bool
    all_samples_equal: bool
    matches_loop_series: bool | None
    q0_constant: bool
    status: str  # PASS / FAIL / OBSERVATIONAL
    series_repr: str

    def to_dict(self) -> dict:
        return {
            "action": self.action,
            "samples": [str(s) for s in self.samples],
            "qorder": self.qorder,
            "spin": self.spin,
            "all_samples_equal": self.all_samples_equal,
            "matches_loop_series": self.matches_loop_series,
            "q0_constant": self.q0_constant,
            "status": self.status,
            "series": self.series_repr,
        }


def rigidity_check(action: CircleActionData, samples, qorder: int = DEFAULT_QORDER) -> RigidityReport:
    """Evaluate the localization sum at several exact samples and compare.

    Spin ambient: equality across samples and with the nonequivariant series
    is asserted (FAIL signals a bug or bad fixed-point data).  Non-spin
    ambient: the q^0 coefficient must still be constant (signature rigidity);
    higher coefficients are reported observationally.
    """
    samples = tuple(samples)
    if not samples:
        raise ValidationError("rigidity check needs at least one sample", code="invalid")
    gaussian = any(isinstance(s, GaussianRational) for s in samples)
    values = []
    for s in samples:
        v = equivariant_series(action, s, qorder)
        values.append(_promote_to_gaussian(v) if gaussian and v.ring.base == QQ else v)
    all_equal = all(values[0].same_to(v) for v in values[1:])
    q0s = [v.q_coefficient(0) for v in values]
    q0_constant = all(c == q0s[0] for c in q0s)
    matches = None
    if action.ambient_model is not None and action.ambient_model.dim_real % 4 == 0:
        loop = loop_sign_series(action.ambient_model, qorder).series
        if gaussian:
            loop = _promote_to_gaussian(loop)
        matches = all(v.same_to(loop) for v in values)
        q0_constant = q0_constant and q0s[0] == loop.q_coefficient(0)
    if action.ambient_spin:
        status = "PASS" if all_equal and matches in (True, None) else "FAIL"
    else:
        status = "OBSERVATIONAL" if q0_constant else "FAIL"
    return RigidityReport(
        action=action.name or action.provenance,
        samples=samples,
        qorder=qorder,
        spin=action.ambient_spin,
        all_samples_equal=all_equal,
        matches_loop_series=matches,
        q0_constant=q0_constant,
        status=status,
        series_repr=repr(values[0]),
    )


def order4_local_identities(qorder: int = DEFAULT_QORDER) -> dict:
    """The two exact identities for order-4 sample points.

    * a normal pair with opposite roots y, -y at lambda = i multiplies to the
      constant -1 (every q-level cancels);
    * an isolated point with all weights +-1 in ambient dimension 4k
      contributes exactly (-1)^k, again with all q-levels cancelling.
    """
    from .rings import I_UNIT

    sorder = 2 * qorder + 2
    S = SeriesRing(QI, sorder)
    Y = PolyRing(("y",), (3,), S)
    one = Y.one()
    y = Y.gen("y")
    e_pos, e_neg = y.exp(), (-y).exp()

    def n_factor(ep, em, w):
        lw, lwi = I_UNIT ** w, I_UNIT ** (-w)
        f = (one + em * lwi) * (one - em * lwi).inverse()
        n = 1
        while 2 * n < sorder:
            qp = Y.const(S.q_monomial(n, lw))
            qm = Y.const(S.q_monomial(n, lwi))
            f = f * (one + qp * ep) * (one + qm * em)
            f = f * ((one - qp * ep) * (one - qm * em)).inverse()
            n += 1
        return f

    pair_product = n_factor(e_pos, e_neg, 1) * n_factor(e_neg, e_pos, 1)
    pair_is_minus_one = pair_product == -one

    point = FixedComponent(builtin("pt"), tuple(NormalSummand({}, 1) for _ in range(4)))
    term = local_term(point, I_UNIT, qorder)
    point_value = term.q_coefficient(0)
    point_is_unit = term.support() == [0] and point_value in (QI.one(), -QI.one())
    return {
        "normal_pair_is_minus_one": pair_is_minus_one,
        "point_term_is_plus_minus_one": point_is_unit,
        "point_term_value": point_value,
    }


def euler_fixed_check(action: CircleActionData):
    """Sum of component Euler characteristics against the ambient value.

    Returns (ok, flagged): ok is None when a component style is unsupported
    (flagged partial check).
    """
    from .manifolds import euler_characteristic

    total = Fraction(0)
    flagged = False
    for comp in action.components:
        m = comp.model
        if m.dim_real == 0:
            total += 1
        elif m.tangent.style == "chern":
            total += euler_characteristic(m)
        elif m.euler is not None:
            total += m.euler
        else:
            flagged = True
    expected = None
    if action.ambient_model is not None:
        expected = action.ambient_model.euler
    if expected is None:
        return None, True
    if flagged:
        return None, True
    return total == expected, False


# -- builtin actions --------------------------------------------------------------


_ACTION_RE = re.compile(r"^(CP|HP)(\d+)_(linear|diagonal)\(([-\d,\s]+)\)$")


def builtin_action(name: str) -> CircleActionData:
    """CPn_linear(m0,...,mn) or HPn_diagonal(a0,...,an)."""
    m = _ACTION_RE.match(name.strip())
    if not m:
        raise ValidationError(f"unknown builtin action {name!r}", code="invalid")
    family, n, kind, arglist = m.group(1), int(m.group(2)), m.group(3), m.group(4)
    weights = [int(a) for a in arglist.split(",")]
    if len(weights) != n + 1:
        raise ValidationError(
            f"{family}{n} action needs {n + 1} weights, got {len(weights)}", code="invalid"
        )
    if family == "CP" and kind == "linear":
        return cpn_linear_action(weights, name)
    if family == "HP" and kind == "diagonal":
        return hpn_diagonal_action(weights, name)
    raise ValidationError(f"unknown builtin action {name!r}", code="invalid")


def cpn_linear_action(weights, name="") -> CircleActionData:
    """Linear circle action on CP^n with the given coordinate weights.

    Fixed components are the sub-projective spaces on equal-weight index
    groups; the normal summand toward coordinate j has Chern class h and
    rotation weight m_j - m_group.
    """
    n = len(weights) - 1
    if n < 1:
        raise ValidationError("CP^n action needs n >= 1", code="invalid")
    ambient = builtin(f"CP{n}")
    groups: dict[int, list[int]] = {}
    for idx, w in enumerate(weights):
        groups.setdefault(w, []).append(idx)
    components = []
    for value in sorted(groups):
        idxs = groups[value]
        size = len(idxs) - 1
        model = builtin("pt") if size == 0 else builtin(f"CP{size}")
        normal = []
        h = {"h": Fraction(1)} if size > 0 else {}
        for j, wj in enumerate(weights):
            if j in idxs:
                continue
            normal.append(NormalSummand(dict(h), wj - value))
        components.append(FixedComponent(model, tuple(normal)))
    action = CircleActionData(
        ambient_dim=2 * n,
        components=tuple(components),
        provenance=f"builtin CP{n}_linear{tuple(weights)}",
        ambient_spin=ambient.spin,
        ambient_model=ambient,
        name=name or f"CP{n}_linear({','.join(map(str, weights))})",
    ).validate()
    ok, flagged = euler_fixed_check(action)
    if ok is False:
        raise ValidationError("fixed-point data fails the Euler-characteristic check", code="invalid")
    return action


def hpn_diagonal_action(weights, name="") -> CircleActionData:
    """Diagonal circle action on HP^n with distinct positive weights.

    Isolated fixed points; the complex tangent weights at point i are
    {a_j - a_i, -(a_j + a_i) : j != i}.  The recipe is validated by the
    cancellation and epsilon-series tests, not assumed.
    """
    n = len(weights) - 1
    if n < 1:
        raise ValidationError("HP^n action needs n >= 1", code="invalid")
    if len(set(weights)) != len(weights) or any(a < 1 for a in weights):
        raise ValidationError(
            "HP^n diagonal actions need distinct weights >= 1", code="invalid"
        )
    ambient = builtin(f"HP{n}")
    pt = builtin("pt")
    components = []
    for i, ai in enumerate(weights):
        normal = []
        for j, aj in enumerate(weights):
            if j == i:
                continue
            normal.append(NormalSummand({}, aj - ai))
            normal.append(NormalSummand({}, -(aj + ai)))
        components.append(FixedComponent(pt, tuple(normal)))
    return CircleActionData(
        ambient_dim=4 * n,
        components=tuple(components),
        provenance=f"builtin HP{n}_diagonal{tuple(weights)}",
        ambient_spin=True,
        ambient_model=ambient,
        name=name or f"HP{n}_diagonal({','.join(map(str, weights))})",
    ).validate()


def trivial_action(model: ManifoldModel) -> CircleActionData:
    """The trivial action: one fixed component, the manifold itself."""
    return CircleActionData(
        ambient_dim=model.dim_real,
        components=(FixedComponent(model, ()),),
        provenance=f"trivial action on {model.name}",
        ambient_spin=model.spin,
        ambient_model=model,
        name=f"trivial({model.name})",
    ).validate()


# -- action files -----------------------------------------------------------------


def _resolve_model_ref(ref):
    if ref == "point":
        return builtin("pt")
    if isinstance(ref, str):
        if ref.startswith("builtin:"):
            return builtin(ref[len("builtin:") :])
        raise ValidationError(f"bad model reference {ref!r}", code="schema")
    if isinstance(ref, dict):
        return load_model(ref)
    raise ValidationError(f"bad model reference {ref!r}", code="schema")


def load_action(source) -> CircleActionData:
    """Load an action description from a JSON path, file object or dict."""
    from .manifolds import _read_json

    doc = _read_json(source)
    for field_name in ("ambient", "components"):
        if field_name not in doc:
            raise ValidationError(f"missing field {field_name!r}", code="schema")
    ambient = _resolve_model_ref(doc["ambient"])
    components = []
    if not isinstance(doc["components"], list) or not doc["components"]:
        raise ValidationError("components must be a non-empty list", code="schema")
    for c in doc["components"]:
        model = _resolve_model_ref(c.get("model", "point"))
        normal = []
        for s in c.get("normal", []):
            try:
                form, weight = s["chern"], s["weight"]
            except (TypeError, KeyError) as exc:
                raise ValidationError(f"malformed normal entry {s!r}", code="schema") from exc
            if not isinstance(weight, int) or weight == 0:
                raise ValidationError("weights must be nonzero integers", code="schema")
            symbols = {g.symbol for g in model.cohomology.generators}
            parsed = {}
            for sym, coeff in (form or {}).items():
                if sym not in symbols:
                    raise ValidationError(
                        f"normal form uses unknown generator {sym!r}", code="schema"
                    )
                parsed[sym] = as_fraction(Fraction(str(coeff)))
            normal.append(NormalSummand(parsed, weight))
        components.append(FixedComponent(model, tuple(normal)))
    return CircleActionData(
        ambient_dim=ambient.dim_real,
        components=tuple(components),
        provenance=str(doc.get("name", "user action file")),
        ambient_spin=ambient.spin,
        ambient_model=ambient,
        name=str(doc.get("name", "")),
    ).validate()


def dump_action(action: CircleActionData) -> dict:
    """Schema dict for an action whose models are catalog entries."""
    def ref(model: ManifoldModel):
        return "point" if model.dim_real == 0 else f"builtin:{model.name}"

    return {
        "name": action.name,
        "ambient": ref(action.ambient_model) if action.ambient_model else None,
        "components": [
            {
                "model": ref(c.model),
                "normal": [
                    {"chern": {s: str(v) for s, v in n.chern.items()}, "weight": n.weight}
                    for n in c.normal
                ],
            }
            for c in action.components
        ],
    }
