"""Combinatorial obstruction machinery.

Three independent layers:

* reduced rotation weights and the m_o invariant of a fixed component,
  with the vanishing-count formulas frozen from the strict inequalities:
    - involution, codim c:            c > 4r       holds iff r <= ceil(c/4)-1
    - cyclic order o via m_o:         m_o > r      holds iff r <= ceil(m_o)-1
    - cyclic order o via codim c:     c > 2*o*r    holds iff r <= ceil(c/(2o))-1
  so the number of leading coefficients forced to vanish is the ceiling.

* integer weight-matrix normal form: restricted row operations
  b_i <- alpha*b_i + beta*b_j (i < j, alpha coprime to p, beta = 0 mod p)
  after a unimodular preconditioning with column permutation, producing an
  exactly diagonal left block with unit diagonal mod p.  The op log is part
  of the result so tests can audit every step.

* binary-code audit: exhaustive enumeration of all 2^(2r) words of the mod-2
  row code, with the weight/co-weight dichotomy, closure of the small-weight
  subset, per-row odd-entry counts and tail-column parities as named booleans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import ResourceCapError, StructuralError, ValidationError
from .genus import DEFAULT_QORDER, phi0_series

CODE_ENUM_CAP = 24  # hard cap on 2r for exhaustive word enumeration


def _ceil(x: Fraction) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


# -- reduced weights and m_o -----------------------------------------------------


def reduced_weight(k: int, order: int) -> int:
    """Representative of +-k mod order in {0..floor(order/2)}."""
    if order < 2:
        raise StructuralError("order must be >= 2")
    r = k % order
    return min(r, order - r)


def m_invariant(weights, order: int) -> Fraction:
    """m_o of one fixed component: sum of reduced weights over the order."""
    return Fraction(sum(reduced_weight(w, order) for w in weights), order)


def m_invariant_min(weight_vectors, order: int) -> Fraction:
    """Minimum of m_o over the components of a fixed-point set."""
    vectors = list(weight_vectors)
    if not vectors:
        raise StructuralError("need at least one component")
    return min(m_invariant(ws, order) for ws in vectors)


def codim_fixed(weights, order: int) -> int:
    """Codimension of the order-o fixed set at this component: 2#{w != 0 mod o}."""
    return 2 * sum(1 for w in weights if w % order != 0)


# -- vanishing predictions ---------------------------------------------------------


def vanish_count_involution(codim: int) -> int:
    if codim <= 0:
        return 0
    return _ceil(Fraction(codim, 4))


def vanish_count_from_m(m) -> int:
    m = Fraction(m)
    if m <= 0:
        return 0
    return _ceil(m)


def vanish_count_cyclic_codim(codim: int, order: int) -> int:
    if order < 2:
        raise StructuralError("order must be >= 2")
    if codim <= 0:
        return 0
    return _ceil(Fraction(codim, 2 * order))


def vanish_prediction(source: str, *, codim=None, m=None, order=None) -> int:
    """Number of leading expansion coefficients forced to vanish."""
    if source == "involution":
        return vanish_count_involution(int(codim))
    if source == "cyclic-m":
        return vanish_count_from_m(m)
    if source == "cyclic-codim":
        return vanish_count_cyclic_codim(int(codim), int(order))
    raise StructuralError(f"unknown prediction source {source!r}")


@dataclass(frozen=True)
class PredictionReport:
    manifold: str
    order: int
    m_value: Fraction
    predicted_vanishing: int
    first_nonzero_index: int | None
    spin: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "order": self.order,
            "m": str(self.m_value),
            "predicted_vanishing": self.predicted_vanishing,
            "first_nonzero_index": self.first_nonzero_index,
            "spin": self.spin,
            "status": "PASS" if self.passed else "FAIL",
        }


def cross_check_prediction(model, action, order: int, qorder: int = DEFAULT_QORDER) -> PredictionReport:
    """No computed nonzero coefficient may sit below the predicted vanish count.

    `action` provides the fixed-point weight vectors (a CircleActionData or a
    bare list of weight lists).  A FAIL on a spin manifold signals fabricated
    fixed-point data or a bug, never geometry.
    """
    vectors = getattr(action, "components", None)
    if vectors is not None:
        weight_vectors = [comp.weights() for comp in action.components]
    else:
        weight_vectors = [list(ws) for ws in action]
    m_value = m_invariant_min(weight_vectors, order)
    predicted = vanish_count_from_m(m_value) if model.spin else 0
    phi0 = phi0_series(model, max(qorder, predicted + 1))
    k = model.dim_real // 4
    first_nonzero = None
    e = phi0.series.lowest_exponent()
    if e is not None:
        first_nonzero = (e + k) // 2
    passed = first_nonzero is None or first_nonzero >= predicted
    return PredictionReport(
        manifold=model.name,
        order=order,
        m_value=m_value,
        predicted_vanishing=predicted,
        first_nonzero_index=first_nonzero,
        spin=model.spin,
        passed=passed,
    )


# -- restricted fixed point dimension ------------------------------------------------


def rfpd_check(table) -> bool:
    """Every pair of distinct components must satisfy dim F1 + dim F2 < dim X.

    `table` is an iterable of (dim_X, [component dims]) pairs (or mappings with
    keys "dim" and "components").
    """
    for entry in table:
        if isinstance(entry, dict):
            dim_x, dims = entry["dim"], entry["components"]
        else:
            dim_x, dims = entry
        dims = list(dims)
        for i in range(len(dims)):
            for j in range(i + 1, len(dims)):
                if dims[i] + dims[j] >= dim_x:
                    return False
    return True


# -- lattice normal form ---------------------------------------------------------------


@dataclass
class NormalFormResult:
    matrix: list              # transformed matrix, columns permuted (pivots first)
    column_order: list        # new column order as indices into the original
    transform: list           # integer row-transformation T with A' = (T A) permuted
    covering_degree: int      # |det T|, coprime to p
    ops: list = field(default_factory=list)  # op log; see audit_ops

    def left_block(self):
        r = len(self.matrix)
        return [row[:r] for row in self.matrix]

    def to_dict(self) -> dict:
        return {
            "matrix": self.matrix,
            "column_order": self.column_order,
            "transform": self.transform,
            "covering_degree": self.covering_degree,
        }


def _mod_rank(rows, p: int) -> int:
    work = [[x % p for x in row] for row in rows]
    rank, col, ncols = 0, 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(work)) if work[r][col] % p), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = pow(work[rank][col], -1, p)
        for r in range(len(work)):
            if r != rank and work[r][col] % p:
                f = (work[r][col] * inv) % p
                work[r] = [(a - f * b) % p for a, b in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def lattice_normal_form(matrix, p: int = 2) -> NormalFormResult:
    """Bring an integer weight matrix to the diagonal-left-block shape.

    Phase 1 uses unimodular row operations and a column permutation to reach
    an exactly upper-triangular left block whose diagonal is coprime to p and
    whose off-diagonal entries vanish mod p.  Phase 2 clears the remaining
    above-diagonal entries exactly with the restricted operations
    b_i <- alpha b_i + beta b_j (i < j, alpha coprime to p, p | beta); these
    scale the lattice by alpha each, and the product is the covering degree.
    """
    A = [list(map(int, row)) for row in matrix]
    if not A or not A[0]:
        raise ValidationError("matrix must be non-empty", code="invalid")
    nrows, ncols = len(A), len(A[0])
    if any(len(row) != ncols for row in A):
        raise ValidationError("ragged matrix", code="invalid")
    if nrows > ncols:
        raise ValidationError("more rows than columns", code="invalid")
    if _mod_rank(A, p) < nrows:
        raise ValidationError(
            f"rows are not independent mod {p}: effectiveness violated", code="rank"
        )
    T = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    ops: list = []
    pivots: list[int] = []

    def row_add(dst, src, factor):
        A[dst] = [a + factor * b for a, b in zip(A[dst], A[src])]
        T[dst] = [a + factor * b for a, b in zip(T[dst], T[src])]
        ops.append(("add", dst, src, factor))

    def row_swap(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            T[i], T[j] = T[j], T[i]
            ops.append(("swap", i, j))

    # phase 1: unimodular preconditioning
    for i in range(nrows):
        pivot_col = None
        for c in range(ncols):
            if c in pivots:
                continue
            if any(A[t][c] % p for t in range(i, nrows)):
                pivot_col = c
                break
        if pivot_col is None:  # unreachable given the rank check
            raise ValidationError("rank collapse during elimination", code="rank")
        t = next(t for t in range(i, nrows) if A[t][pivot_col] % p)
        row_swap(i, t)
        pivots.append(pivot_col)
        # exact clearing below the pivot (Euclid on rows; all unimodular)
        for t in range(i + 1, nrows):
            while A[t][pivot_col] != 0:
                q = A[i][pivot_col] // A[t][pivot_col]
                row_add(i, t, -q)
                row_swap(i, t)
            if A[i][pivot_col] < 0:
                A[i] = [-x for x in A[i]]
                T[i] = [-x for x in T[i]]
                ops.append(("negate", i))
        # clearing above mod p
        for u in range(i):
            rem = A[u][pivot_col] % p
            if rem:
                inv = pow(A[i][pivot_col], -1, p)
                row_add(u, i, -((rem * inv) % p))
    # phase 2: restricted operations make the left block exactly diagonal
    degree = 1
    for i in range(nrows - 2, -1, -1):
        for j in range(i + 1, nrows):
            e = A[i][pivots[j]]
            if e == 0:
                continue
            alpha = A[j][pivots[j]]
            beta = -e
            if beta % p:
                raise StructuralError("phase-1 postcondition violated (beta not 0 mod p)")
            A[i] = [alpha * a + beta * b for a, b in zip(A[i], A[j])]
            T[i] = [alpha * a + beta * b for a, b in zip(T[i], T[j])]
            ops.append(("restricted", i, j, alpha, beta))
            degree *= abs(alpha)
    order = pivots + [c for c in range(ncols) if c not in pivots]
    permuted = [[row[c] for c in order] for row in A]
    result = NormalFormResult(
        matrix=permuted,
        column_order=order,
        transform=T,
        covering_degree=degree,
        ops=ops,
    )
    # postconditions: exact diagonal left block, units mod p
    for i in range(nrows):
        for j in range(nrows):
            if i == j:
                if permuted[i][i] % p == 0:
                    raise StructuralError("normal form diagonal not a unit mod p")
            elif permuted[i][j] != 0:
                raise StructuralError("normal form left block not diagonal")
    if gcd(degree, p) != 1:
        raise StructuralError("covering degree shares a factor with p")
    return result


# -- binary code audit --------------------------------------------------------------


class BinaryCode:
    """Mod-2 row code of an integer matrix, words enumerated as bitmasks."""

    def __init__(self, matrix):
        rows = [list(map(int, row)) for row in matrix]
        if not rows or not rows[0]:
            raise ValidationError("matrix must be non-empty", code="invalid")
        self.length = len(rows[0])
        if any(len(r) != self.length for r in rows):
            raise ValidationError("ragged matrix", code="invalid")
        if len(rows) > CODE_ENUM_CAP:
            raise ResourceCapError(
                f"enumeration cap exceeded: {len(rows)} generators > {CODE_ENUM_CAP}"
            )
        self.generator_rows = rows
        self.masks = [
            sum((x % 2) << c for c, x in enumerate(row)) for row in rows
        ]

    def words(self):
        """All 2^rows code words (with multiplicity-free XOR semantics)."""
        n = len(self.masks)
        for bits in range(1 << n):
            word = 0
            b = bits
            i = 0
            while b:
                if b & 1:
                    word ^= self.masks[i]
                b >>= 1
                i += 1
            yield word

    def weights(self):
        return [w.bit_count() for w in self.words()]


@dataclass(frozen=True)
class CodeAuditReport:
    r: int
    k: int
    weight_distribution: dict
    dichotomy_holds: bool               # wt <= 2r or cowt <= 2r-2 for every word
    closure_applicable: bool            # 2k >= 6r
    small_weight_closed: bool | None    # {wt <= 2r} closed under addition (when applicable)
    closure_inference_consistent: bool  # dichotomy & applicable => closed (theorem audit)
    row_odd_counts: list
    rows_have_two_odd_entries: bool
    tail_column_odd_counts: list
    tail_columns_even_parity: bool
    tail_nonzero_columns: int
    tail_nonzero_le_r: bool
    sublinearity_holds: bool

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "k": self.k,
            "weight_distribution": {str(k_): v for k_, v in sorted(self.weight_distribution.items())},
            "dichotomy_holds": self.dichotomy_holds,
            "closure_applicable": self.closure_applicable,
            "small_weight_closed": self.small_weight_closed,
            "closure_inference_consistent": self.closure_inference_consistent,
            "row_odd_counts": self.row_odd_counts,
            "rows_have_two_odd_entries": self.rows_have_two_odd_entries,
            "tail_column_odd_counts": self.tail_column_odd_counts,
            "tail_columns_even_parity": self.tail_columns_even_parity,
            "tail_nonzero_columns": self.tail_nonzero_columns,
            "tail_nonzero_le_r": self.tail_nonzero_le_r,
            "sublinearity_holds": self.sublinearity_holds,
        }


def code_audit(matrix, r: int | None = None, k: int | None = None) -> CodeAuditReport:
    """Exhaustive audit of the mod-2 row code of a 2r x 2k weight matrix."""
    rows = [list(map(int, row)) for row in matrix]
    nrows, ncols = len(rows), len(rows[0]) if rows else 0
    if nrows % 2 or ncols % 2:
        raise ValidationError("weight matrices have 2r rows and 2k columns", code="invalid")
    r = nrows // 2 if r is None else int(r)
    k = ncols // 2 if k is None else int(k)
    if 2 * r != nrows or 2 * k != ncols:
        raise ValidationError("given r,k do not match the matrix shape", code="invalid")
    if 2 * r > CODE_ENUM_CAP:
        raise ResourceCapError(f"enumeration cap exceeded: 2r = {2 * r} > {CODE_ENUM_CAP}")
    code = BinaryCode(rows)
    words = list(code.words())
    weights = [w.bit_count() for w in words]
    dist: dict[int, int] = {}
    for wt in weights:
        dist[wt] = dist.get(wt, 0) + 1
    dichotomy = all(wt <= 2 * r or (2 * k - wt) <= 2 * r - 2 for wt in weights)
    closure_applicable = 2 * k >= 6 * r
    small_closed = None
    small = [w for w, wt in zip(words, weights) if wt <= 2 * r]
    if closure_applicable:
        small_set = set(small)
        small_closed = all(
            (a ^ b) in small_set for a in small for b in small
        )
    row_odd = [sum(1 for x in row if x % 2) for row in rows]
    tail_cols = list(range(2 * r, 2 * k))
    tail_odd = [sum(1 for row in rows if row[c] % 2) for c in tail_cols]
    sublinear = True
    for a, wa in zip(words, weights):
        for b, wb in zip(words, weights):
            if (a ^ b).bit_count() > wa + wb:
                sublinear = False
                break
        if not sublinear:
            break
    inference_ok = (not (dichotomy and closure_applicable)) or bool(small_closed)
    return CodeAuditReport(
        r=r,
        k=k,
        weight_distribution=dist,
        dichotomy_holds=dichotomy,
        closure_applicable=closure_applicable,
        small_weight_closed=small_closed,
        closure_inference_consistent=inference_ok,
        row_odd_counts=row_odd,
        rows_have_two_odd_entries=all(c == 2 for c in row_odd),
        tail_column_odd_counts=tail_odd,
        tail_columns_even_parity=all(c % 2 == 0 for c in tail_odd),
        tail_nonzero_columns=sum(1 for c in tail_odd if c > 0),
        tail_nonzero_le_r=sum(1 for c in tail_odd if c > 0) <= r,
        sublinearity_holds=sublinear,
    )
