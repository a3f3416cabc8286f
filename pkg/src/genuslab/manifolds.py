"""Manifold models: cohomology ring, fundamental-class pairing, tangent data.

A model is the minimal exact data needed to evaluate characteristic numbers:

* a truncated cohomology ring with even-degree generators (degree 2 or 4) and
  the value of the fundamental class on the top monomial;
* virtual tangent root data: a list of (linear form, multiplicity) entries,
  each in Chern flavour (the form is a degree-2 root) or Pontryagin flavour
  (the form is a degree-4 squared root), plus a trivial-rank correction delta
  = (virtual rank) - (actual rank in root pairs).

Consumers of twisted words must divide out delta copies of the zero-root
factor; the plain genus never needs the correction since Q(0) = 1.

Builtin catalog entries are validated at construction by two independent
classical identities (signature/Euler characteristic/A-hat vanishing).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import StructuralError, ValidationError
from .rings import QQ, as_fraction, format_fraction, parse_fraction
from .series import PolyRing, TruncPoly

CHERN = "chern"
PONTRYAGIN = "pontryagin"


@dataclass(frozen=True)
class Generator:
    symbol: str
    degree: int  # 2 or 4
    cap: int     # nilpotency: symbol^(cap+1) = 0


@dataclass(frozen=True)
class CohomologyModel:
    generators: tuple[Generator, ...]
    pairing: Fraction  # value of the fundamental class on prod(gen^cap)

    def poly_ring(self, base=QQ) -> PolyRing:
        return PolyRing(
            tuple(g.symbol for g in self.generators),
            tuple(g.cap for g in self.generators),
            base,
        )

    @property
    def dim_real(self) -> int:
        return sum(g.degree * g.cap for g in self.generators)

    def top_exponents(self) -> tuple[int, ...]:
        return tuple(g.cap for g in self.generators)

    def betti_count(self) -> int:
        """Number of monomials in the truncated ring (all in even degree)."""
        n = 1
        for g in self.generators:
            n *= g.cap + 1
        return n

    def integrate(self, cls: TruncPoly):
        """Pair a cohomology class with the fundamental class."""
        return cls.coefficient(self.top_exponents()) * self.pairing


@dataclass(frozen=True)
class TangentEntry:
    form: dict          # {symbol: Fraction} linear form in the generators
    mult: int           # signed multiplicity; negative entries invert factors
    kind: str = CHERN   # CHERN: degree-2 root; PONTRYAGIN: degree-4 squared root

    def form_poly(self, ring: PolyRing) -> TruncPoly:
        return ring.linear_form(self.form)


@dataclass(frozen=True)
class TangentData:
    entries: tuple[TangentEntry, ...]
    delta: int  # virtual rank minus actual rank (in complex ranks / root pairs)

    @property
    def style(self) -> str:
        kinds = {e.kind for e in self.entries}
        if kinds <= {CHERN}:
            return CHERN
        if kinds == {PONTRYAGIN}:
            return PONTRYAGIN
        return "mixed"


@dataclass(frozen=True)
class ManifoldModel:
    name: str
    cohomology: CohomologyModel
    tangent: TangentData
    dim_real: int
    spin: bool
    orientation_note: str = ""
    euler: Fraction | None = field(default=None, compare=False)

    @property
    def k(self) -> int:
        """dim = 4k when the dimension is divisible by four, else 0."""
        return self.dim_real // 4 if self.dim_real % 4 == 0 else 0

    def poly_ring(self, base=QQ) -> PolyRing:
        return self.cohomology.poly_ring(base)

    def integrate(self, cls: TruncPoly):
        return self.cohomology.integrate(cls)

    def validate_dimensions(self):
        if self.cohomology.dim_real != self.dim_real:
            raise ValidationError(
                f"{self.name}: generator degrees sum to {self.cohomology.dim_real}, "
                f"declared dimension is {self.dim_real}",
                code="dimension-mismatch",
            )
        if self.dim_real % 2:
            raise ValidationError(
                f"{self.name}: odd real dimension", code="dimension-mismatch"
            )
        ranks = sum(e.mult for e in self.tangent.entries) - self.tangent.delta
        if self.dim_real and ranks != self.dim_real // 2:
            raise ValidationError(
                f"{self.name}: tangent entries give rank {ranks}, expected "
                f"{self.dim_real // 2}",
                code="dimension-mismatch",
            )
        if self.cohomology.pairing == 0:
            raise ValidationError(
                f"{self.name}: fundamental-class pairing is zero", code="zero-pairing"
            )
        return self


def total_chern_class(model: ManifoldModel) -> TruncPoly:
    """prod (1 + root)^mult over Chern entries; trivial summands contribute 1."""
    if model.tangent.style != CHERN:
        raise StructuralError(f"{model.name} does not carry Chern-style tangent data")
    ring = model.poly_ring()
    total = ring.one()
    for entry in model.tangent.entries:
        total = total * (ring.one() + entry.form_poly(ring)) ** entry.mult
    return total


def total_pontryagin_class(model: ManifoldModel) -> TruncPoly:
    """prod (1 + squared root)^mult; for Chern entries the square of the form."""
    ring = model.poly_ring()
    total = ring.one()
    for entry in model.tangent.entries:
        form = entry.form_poly(ring)
        sq = form * form if entry.kind == CHERN else form
        total = total * (ring.one() + sq) ** entry.mult
    return total


def euler_characteristic(model: ManifoldModel) -> Fraction:
    """Top Chern number; requires Chern-style tangent data."""
    if model.dim_real == 0:
        return Fraction(1)
    c = total_chern_class(model)
    ring = model.poly_ring()
    top = ring.zero()
    half = model.dim_real // 2
    for exps, coeff in c.coeffs.items():
        degree = sum(
            e * g.degree for e, g in zip(exps, model.cohomology.generators)
        )
        if degree == 2 * half:
            top = top + TruncPoly(ring, {exps: coeff})
    return model.integrate(top)


def first_chern_class(model: ManifoldModel) -> TruncPoly:
    ring = model.poly_ring()
    c1 = ring.zero()
    for entry in model.tangent.entries:
        if entry.kind != CHERN:
            raise StructuralError(f"{model.name}: c_1 needs Chern-style data")
        c1 = c1 + entry.form_poly(ring) * entry.mult
    return c1


# -- builtin catalog ----------------------------------------------------------


def point() -> ManifoldModel:
    model = ManifoldModel(
        name="pt",
        cohomology=CohomologyModel((), Fraction(1)),
        tangent=TangentData((), 0),
        dim_real=0,
        spin=True,
        orientation_note="positively oriented point",
    )
    return model.validate_dimensions()


def complex_projective_space(n: int) -> ManifoldModel:
    """CP^n: generator h of degree 2, pairing 1, virtual roots (n+1)h, delta 1."""
    if n < 1:
        raise ValidationError("CP^n needs n >= 1", code="invalid")
    coh = CohomologyModel((Generator("h", 2, n),), Fraction(1))
    tangent = TangentData((TangentEntry({"h": Fraction(1)}, n + 1, CHERN),), 1)
    model = ManifoldModel(
        name=f"CP{n}",
        cohomology=coh,
        tangent=tangent,
        dim_real=2 * n,
        spin=(n % 2 == 1),
        orientation_note="complex orientation; sign(CP^{2m}) = +1",
    )
    return model.validate_dimensions()


def quaternionic_projective_space(n: int) -> ManifoldModel:
    """HP^n: generator u of degree 4, Pontryagin class (1+u)^{2n+2}(1+4u)^{-1}."""
    if n < 1:
        raise ValidationError("HP^n needs n >= 1", code="invalid")
    coh = CohomologyModel((Generator("u", 4, n),), Fraction(1))
    tangent = TangentData(
        (
            TangentEntry({"u": Fraction(1)}, 2 * n + 2, PONTRYAGIN),
            TangentEntry({"u": Fraction(4)}, -1, PONTRYAGIN),
        ),
        1,
    )
    model = ManifoldModel(
        name=f"HP{n}",
        cohomology=coh,
        tangent=tangent,
        dim_real=4 * n,
        spin=True,
        orientation_note="orientation with sign(HP^n) = +1 for even n",
    )
    return model.validate_dimensions()


def hypersurface(n: int, degree: int) -> ManifoldModel:
    """Degree-l hypersurface in CP^{n+1}: c = (1+h)^{n+2} (1+l h)^{-1}, <h^n> = l."""
    if n < 1 or degree < 1:
        raise ValidationError("V(n,l) needs n >= 1 and l >= 1", code="invalid")
    coh = CohomologyModel((Generator("h", 2, n),), Fraction(degree))
    tangent = TangentData(
        (
            TangentEntry({"h": Fraction(1)}, n + 2, CHERN),
            TangentEntry({"h": Fraction(degree)}, -1, CHERN),
        ),
        1,
    )
    model = ManifoldModel(
        name=f"V({n},{degree})",
        cohomology=coh,
        tangent=tangent,
        dim_real=2 * n,
        spin=((n + 2 - degree) % 2 == 0),
        orientation_note="complex orientation; <h^n,[V]> = degree",
    )
    return model.validate_dimensions()


def product(factors) -> ManifoldModel:
    """Product model: disjoint generators, pairing and tangent data combined."""
    factors = list(factors)
    if not 1 <= len(factors) <= 3:
        raise ValidationError("products support 1 to 3 factors", code="invalid")
    if len(factors) == 1:
        return factors[0]
    gens = []
    pairing = Fraction(1)
    entries = []
    delta = 0
    dim = 0
    for i, m in enumerate(factors, start=1):
        rename = {g.symbol: f"{g.symbol}{i}" for g in m.cohomology.generators}
        gens.extend(
            Generator(rename[g.symbol], g.degree, g.cap)
            for g in m.cohomology.generators
        )
        pairing *= m.cohomology.pairing
        for e in m.tangent.entries:
            entries.append(
                TangentEntry({rename[s]: c for s, c in e.form.items()}, e.mult, e.kind)
            )
        delta += m.tangent.delta
        dim += m.dim_real
    model = ManifoldModel(
        name="x".join(m.name for m in factors),
        cohomology=CohomologyModel(tuple(gens), pairing),
        tangent=TangentData(tuple(entries), delta),
        dim_real=dim,
        spin=all(m.spin for m in factors),
        orientation_note="product orientation",
    )
    return model.validate_dimensions()


def _self_check(model: ManifoldModel, kind: str, factors=None) -> ManifoldModel:
    """Two independent classical identities per catalog entry, plus chi."""
    from . import genus  # local import: genus consumes models, catalog checks use genus

    name = model.name
    euler = None
    if model.tangent.style == CHERN and model.dim_real > 0:
        euler = euler_characteristic(model)
    checks = []
    if kind == "cp":
        n = model.dim_real // 2
        checks.append(("euler", euler, Fraction(n + 1)))
        if n % 2 == 0:
            checks.append(("signature", genus.genus_value(genus.GenusSpec.signature(), model), Fraction(1)))
        else:
            checks.append(("ahat", genus.genus_value(genus.GenusSpec.ahat(), model), Fraction(0)))
    elif kind == "hp":
        n = model.dim_real // 4
        sig = Fraction(1) if n % 2 == 0 else Fraction(0)
        checks.append(("signature", genus.genus_value(genus.GenusSpec.signature(), model), sig))
        checks.append(("ahat", genus.genus_value(genus.GenusSpec.ahat(), model), Fraction(0)))
        euler = Fraction(model.cohomology.betti_count())
    elif kind == "v":
        n = model.dim_real // 2
        degree = model.cohomology.pairing
        c1 = first_chern_class(model)
        ring = model.poly_ring()
        checks.append(("c1", c1, ring.gen("h") * (n + 2 - degree)))
        if degree == n and (n % 2 == 0 or n == 1):
            closed = Fraction((n - 1) ** (n + 2) - 1, n) + (n + 2)
            checks.append(("euler-closed-form", euler, closed))
    elif kind == "product":
        euler = Fraction(1)
        for factor in factors:
            euler *= factor.euler
        if model.tangent.style == CHERN:
            checks.append(("euler-multiplicative", euler_characteristic(model), euler))
        sig_product = Fraction(1)
        computable = all(f.dim_real % 4 == 0 for f in factors)
        if computable and model.dim_real % 4 == 0:
            for factor in factors:
                sig_product *= genus.genus_value(genus.GenusSpec.signature(), factor)
            checks.append(
                ("signature-multiplicative",
                 genus.genus_value(genus.GenusSpec.signature(), model), sig_product)
            )
    for label, got, want in checks:
        if got != want:
            raise ValidationError(
                f"catalog self-check failed for {name}: {label} = {got}, expected {want}",
                code="catalog-check",
            )
    object.__setattr__(model, "euler", euler)
    return model


_CATALOG_CACHE: dict[str, ManifoldModel] = {}


def builtin(name: str) -> ManifoldModel:
    """Catalog lookup: pt, CPn, HPn, V(n,l), product(a,b,...)."""
    key = name.strip()
    if key in _CATALOG_CACHE:
        return _CATALOG_CACHE[key]
    model = _build(key)
    _CATALOG_CACHE[key] = model
    return model


def _build(key: str) -> ManifoldModel:
    if key == "pt":
        m = point()
        object.__setattr__(m, "euler", Fraction(1))
        return m
    if key.startswith("product(") and key.endswith(")"):
        parts = _split_args(key[len("product(") : -1])
        factors = [builtin(p) for p in parts]
        return _self_check(product(factors), "product", factors)
    if "x" in key and not key.startswith("V("):
        factors = [builtin(p) for p in key.split("x")]
        return _self_check(product(factors), "product", factors)
    if key.startswith("CP"):
        return _self_check(complex_projective_space(_int_suffix(key, "CP")), "cp")
    if key.startswith("HP"):
        return _self_check(quaternionic_projective_space(_int_suffix(key, "HP")), "hp")
    if key.startswith("V(") and key.endswith(")"):
        args = _split_args(key[2:-1])
        if len(args) != 2:
            raise ValidationError(f"V takes two arguments, got {key!r}", code="invalid")
        return _self_check(hypersurface(int(args[0]), int(args[1])), "v")
    raise ValidationError(f"unknown builtin manifold {key!r}", code="invalid")


def _int_suffix(key: str, prefix: str) -> int:
    try:
        return int(key[len(prefix) :])
    except ValueError:
        raise ValidationError(f"malformed builtin name {key!r}", code="invalid") from None


def _split_args(text: str):
    """Split on commas not nested inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur).strip())
    return [p for p in parts if p]


# -- structured-text loader ----------------------------------------------------


def load_model(source) -> ManifoldModel:
    """Load and validate a model from a JSON file path, file object or dict."""
    doc = _read_json(source)
    for field_name in ("name", "dim_real", "spin", "generators", "pairing", "tangent"):
        if field_name not in doc:
            raise ValidationError(f"missing field {field_name!r}", code="schema")
    if not isinstance(doc["name"], str) or not isinstance(doc["spin"], bool):
        raise ValidationError("name must be a string, spin a boolean", code="schema")
    if not isinstance(doc["dim_real"], int):
        raise ValidationError("dim_real must be an integer", code="schema")
    gens = []
    if not isinstance(doc["generators"], list):
        raise ValidationError("generators must be a list", code="schema")
    for g in doc["generators"]:
        try:
            sym, deg, cap = g["symbol"], g["degree"], g["cap"]
        except (TypeError, KeyError) as exc:
            raise ValidationError(f"malformed generator {g!r}", code="schema") from exc
        if deg not in (2, 4) or not isinstance(cap, int) or cap < 1:
            raise ValidationError(
                f"generator {sym!r}: degree must be 2 or 4 and cap >= 1", code="schema"
            )
        gens.append(Generator(str(sym), deg, cap))
    symbols = {g.symbol for g in gens}
    if len(symbols) != len(gens):
        raise ValidationError("duplicate generator symbols", code="schema")
    try:
        pairing = parse_fraction(doc["pairing"])
    except StructuralError as exc:
        raise ValidationError(str(exc), code="schema") from exc
    t = doc["tangent"]
    if not isinstance(t, dict) or t.get("style") not in (CHERN, PONTRYAGIN):
        raise ValidationError('tangent.style must be "chern" or "pontryagin"', code="schema")
    if not isinstance(t.get("delta"), int):
        raise ValidationError("tangent.delta must be an integer", code="schema")
    entries = []
    for e in t.get("entries", []):
        try:
            form, mult = e["form"], e["mult"]
        except (TypeError, KeyError) as exc:
            raise ValidationError(f"malformed tangent entry {e!r}", code="schema") from exc
        if not isinstance(mult, int) or mult == 0:
            raise ValidationError("entry mult must be a nonzero integer", code="schema")
        if not isinstance(form, dict) or not form:
            raise ValidationError("entry form must be a non-empty mapping", code="schema")
        parsed = {}
        for sym, c in form.items():
            if sym not in symbols:
                raise ValidationError(f"form uses unknown generator {sym!r}", code="schema")
            parsed[sym] = parse_fraction(c)
        entries.append(TangentEntry(parsed, mult, t["style"]))
    model = ManifoldModel(
        name=doc["name"],
        cohomology=CohomologyModel(tuple(gens), pairing),
        tangent=TangentData(tuple(entries), t["delta"]),
        dim_real=doc["dim_real"],
        spin=doc["spin"],
        orientation_note=str(doc.get("orientation_note", "")),
    )
    return model.validate_dimensions()


def dump_model(model: ManifoldModel) -> dict:
    """Schema dict for a single-style model (round-trips through load_model)."""
    style = model.tangent.style
    if style not in (CHERN, PONTRYAGIN):
        raise StructuralError("mixed-style models have no file representation")
    return {
        "name": model.name,
        "dim_real": model.dim_real,
        "spin": model.spin,
        "generators": [
            {"symbol": g.symbol, "degree": g.degree, "cap": g.cap}
            for g in model.cohomology.generators
        ],
        "pairing": format_fraction(model.cohomology.pairing),
        "tangent": {
            "style": style,
            "delta": model.tangent.delta,
            "entries": [
                {
                    "form": {s: format_fraction(as_fraction(c)) for s, c in e.form.items()},
                    "mult": e.mult,
                }
                for e in model.tangent.entries
            ],
        },
        "orientation_note": model.orientation_note,
    }


def _read_json(source):
    if isinstance(source, dict):
        return source
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}", code="schema") from exc
    if not isinstance(doc, dict):
        raise ValidationError("top-level JSON value must be an object", code="schema")
    return doc
