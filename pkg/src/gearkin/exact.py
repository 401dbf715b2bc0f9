"""Exact scalars and exact linear algebra.

Scalars are either :class:`fractions.Fraction` or :class:`RationalFunction`
elements of a :class:`RationalFunctionField` (rational functions in a fixed,
ordered table of named symbols).  Arithmetic between the two mixes freely;
results that turn out to be constant collapse back to ``Fraction``.

Matrices are plain lists of rows.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import GearkinError

__all__ = [
    "ExactScalar",
    "RationalFunctionField",
    "Poly",
    "RationalFunction",
    "SingularMatrixError",
    "UnboundSymbolError",
    "as_exact",
    "is_zero",
    "evaluate",
    "substitute",
    "symbols_of",
    "format_scalar",
    "sign_of",
    "matmul",
    "transpose",
    "identity",
    "rank",
    "dependent_rows",
    "solve_linear",
]


class SingularMatrixError(GearkinError, ArithmeticError):
    """Raised when a square system has no unique solution.

    ``rows`` holds sets of (0-based) row indices, each set linearly dependent.
    """

    def __init__(self, message: str, rows: Sequence[frozenset[int]] = ()):
        super().__init__(message)
        self.rows = [frozenset(r) for r in rows]


class UnboundSymbolError(GearkinError, KeyError):
    def __init__(self, names: Iterable[str]):
        self.names = sorted(set(names))
        super().__init__("unbound symbol(s): " + ", ".join(self.names))

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0]


class RationalFunctionField:
    """The field Q(s1, ..., sk) over an ordered symbol table."""

    def __init__(self, symbols: Iterable[str] = ()):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in {self.symbols!r}")
        for s in self.symbols:
            if not s.isidentifier():
                raise ValueError(f"invalid symbol name {s!r}")
        self.index = {s: i for i, s in enumerate(self.symbols)}
        self.nvars = len(self.symbols)
        self.zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return isinstance(other, RationalFunctionField) and other.symbols == self.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"RationalFunctionField({list(self.symbols)!r})"

    def poly(self, terms: Mapping[tuple, Fraction] | None = None) -> Poly:
        return Poly(self, terms or {})

    def const_poly(self, c) -> Poly:
        c = Fraction(c)
        return Poly(self, {self.zero_exp: c} if c else {})

    def gen_poly(self, name: str) -> Poly:
        try:
            i = self.index[name]
        except KeyError:
            raise ValueError(f"symbol {name!r} not in field {self.symbols!r}") from None
        exp = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Poly(self, {exp: Fraction(1)})

    def gen(self, name: str) -> RationalFunction:
        return RationalFunction(self.gen_poly(name), self.const_poly(1))

    def gens(self) -> tuple[RationalFunction, ...]:
        return tuple(self.gen(s) for s in self.symbols)

    def convert(self, x) -> RationalFunction:
        """Lift a scalar into this field (as a non-collapsed element)."""
        if isinstance(x, RationalFunction):
            if x.field != self:
                raise ValueError("operands belong to different fields")
            return x
        return RationalFunction(self.const_poly(x), self.const_poly(1))


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Sparse multivariate polynomial with rational coefficients.

    Exponent vectors are dense tuples over the field's symbol table; terms with
    zero coefficient are never stored.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field: RationalFunctionField, terms: Mapping[tuple, Fraction]):
        self.field = field
        self.terms = {e: Fraction(c) for e, c in terms.items() if c}

    @classmethod
    def _raw(cls, field, terms):
        p = cls.__new__(cls)
        p.field = field
        p.terms = terms
        return p

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.field.zero_exp in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get(self.field.zero_exp, Fraction(0))

    def nterms(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def leading(self) -> tuple[tuple, Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant() == other
        return NotImplemented

    __hash__ = None

    # -- ring operations --------------------------------------------------
    def __neg__(self):
        return Poly._raw(self.field, {e: -c for e, c in self.terms.items()})

    def __add__(self, other: Poly) -> Poly:
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return Poly._raw(self.field, terms)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        if not self.terms or not other.terms:
            return Poly._raw(self.field, {})
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                v = terms.get(e, 0) + c1 * c2
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return Poly._raw(self.field, terms)

    def scale(self, c) -> Poly:
        c = Fraction(c)
        if not c:
            return Poly._raw(self.field, {})
        return Poly._raw(self.field, {e: v * c for e, v in self.terms.items()})

    def exquo(self, other: Poly) -> Poly | None:
        """Return ``self / other`` if the division is exact, else None."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        le, lc = other.leading()
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            e = max(rem)
            d = tuple(a - b for a, b in zip(e, le))
            if min(d, default=0) < 0:
                return None
            f = rem[e] / lc
            quot[d] = f
            for e2, c2 in other.terms.items():
                e3 = _add_exp(d, e2)
                v = rem.get(e3, 0) - f * c2
                if v:
                    rem[e3] = v
                else:
                    rem.pop(e3, None)
        return Poly._raw(self.field, quot)

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(1)

    def monomial_gcd(self) -> tuple:
        if not self.terms:
            return self.field.zero_exp
        return tuple(map(min, zip(*self.terms)))

    def shift_down(self, exp: tuple) -> Poly:
        return Poly._raw(
            self.field, {tuple(a - b for a, b in zip(e, exp)): c for e, c in self.terms.items()}
        )

    # -- evaluation -------------------------------------------------------
    def used_symbols(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.field.symbols[i])
        return used

    def evaluate(self, values: Sequence) -> object:
        """Evaluate with one value per field symbol (any ring elements)."""
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    # -- printing ---------------------------------------------------------
    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def _monomial_str(self, e) -> str:
        parts = []
        for name, k in zip(self.field.symbols, e):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self._sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = self._monomial_str(e)
            if not mono:
                body = str(a)
            else:
                body = mono if a.numerator == 1 else f"{a.numerator}*{mono}"
                if a.denominator != 1:
                    body = f"{body}/{a.denominator}"
            if i == 0:
                out.append(body if sign == "+" else "-" + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self):
        return f"Poly({self})"


def _canonical(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    field = num.field
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    one = field.const_poly(1)
    if num.is_zero():
        return num, one
    g = tuple(map(min, zip(num.monomial_gcd(), den.monomial_gcd())))
    if any(g):
        num, den = num.shift_down(g), den.shift_down(g)
    if not den.is_constant():
        q = num.exquo(den)
        if q is not None:
            num, den = q, one
        elif not num.is_constant():
            q = den.exquo(num)
            if q is not None:
                num, den = one, q
    cn, cd = num.content(), den.content()
    r = cn / cd
    num = num.scale(r.numerator / cn)
    den = den.scale(r.denominator / cd)
    if den.leading()[1] < 0:
        num, den = -num, -den
    return num, den


class RationalFunction:
    """Element of a rational function field, kept in normalized form.

    Normalization cancels common monomial factors and rational content, and
    any exact polynomial quotient between numerator and denominator; the
    denominator's leading coefficient is positive and all coefficients are
    coprime integers.  This is canonical for the monomial/binomial entries
    gear trains produce; equality falls back to cross-multiplication.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = num.field.const_poly(1)
        if num.field != den.field:
            raise ValueError("numerator and denominator from different fields")
        self.field = num.field
        self.num, self.den = _canonical(num, den)

    # -- helpers ----------------------------------------------------------
    def _coerce(self, other) -> RationalFunction | None:
        if isinstance(other, RationalFunction):
            if other.field != self.field:
                raise ValueError("operands belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.convert(other)
        return None

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant() / self.den.constant()

    def used_symbols(self) -> set[str]:
        return self.num.used_symbols() | self.den.used_symbols()

    def size_key(self) -> tuple[int, int]:
        return (self.num.nterms() + self.den.nterms(), self.num.degree() + self.den.degree())

    # -- field operations -------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return _make(self.num + o.num, self.den)
        return _make(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return _make(-self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _make(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return _make(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        num = den = self.field.const_poly(1)
        for _ in range(k):
            num, den = num * self.num, den * self.den
        return _make(num, den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.num == self.den.scale(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if other.field != self.field:
            return False
        if self.num == other.num and self.den == other.den:
            return True
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        num = self.num
        sign = ""
        if num.nterms() == 1 and next(iter(num.terms.values())) < 0:
            sign, num = "-", -num
        ns, ds = str(num), str(self.den)
        if num.nterms() > 1 or "*" in ns:
            ns = f"({ns})"
        if self.den.nterms() > 1 or "*" in ds:
            ds = f"({ds})"
        return f"{sign}{ns}/{ds}"

    def __repr__(self):
        return f"RationalFunction({self})"


ExactScalar = Union[Fraction, RationalFunction]


def _collapse(x: RationalFunction) -> ExactScalar:
    if x.is_constant():
        return x.constant_value()
    return x


def _make(num: Poly, den: Poly) -> ExactScalar:
    return _collapse(RationalFunction(num, den))


# ---------------------------------------------------------------------------
# scalar helpers


def as_exact(x) -> ExactScalar:
    """Coerce ints/Fractions to Fraction; collapse constant rational functions."""
    if isinstance(x, RationalFunction):
        return _collapse(x)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def is_zero(x) -> bool:
    if isinstance(x, RationalFunction):
        return x.num.is_zero()
    if isinstance(x, Poly):
        return x.is_zero()
    return x == 0


def symbols_of(x) -> set[str]:
    if isinstance(x, RationalFunction):
        return x.used_symbols()
    return set()


def evaluate(x, bindings: Mapping[str, object]) -> Fraction:
    """Evaluate an exact scalar at rational values for its symbols."""
    if not isinstance(x, RationalFunction):
        return Fraction(x)
    missing = x.used_symbols() - set(bindings)
    if missing:
        raise UnboundSymbolError(missing)
    values = [Fraction(bindings[s]) if s in bindings else Fraction(0) for s in x.field.symbols]
    num = x.num.evaluate(values)
    den = x.den.evaluate(values)
    if den == 0:
        raise ZeroDivisionError(f"denominator of {x} vanishes at the binding")
    return num / den


def substitute(x, mapping: Mapping[str, object], target: RationalFunctionField | None = None):
    """Replace symbols by exact scalars; unmapped symbols are kept.

    Kept symbols (and symbolic replacement values) must live in ``target``,
    which defaults to the source field.
    """
    if not isinstance(x, RationalFunction):
        return Fraction(x)
    target = target or x.field
    values = []
    for s in x.field.symbols:
        if s in mapping:
            v = mapping[s]
            values.append(target.convert(v) if isinstance(v, RationalFunction) else Fraction(v))
        elif s in x.used_symbols():
            values.append(target.gen(s))
        else:
            values.append(Fraction(0))
    num = x.num.evaluate(values)
    den = x.den.evaluate(values)
    if is_zero(den):
        raise ZeroDivisionError(f"denominator of {x} vanishes under substitution")
    return as_exact(num / den)


def sign_of(x) -> int | None:
    """Sign of a scalar, assuming every symbol is positive; None if undecidable."""
    if not isinstance(x, RationalFunction):
        return (x > 0) - (x < 0)

    def poly_sign(p: Poly):
        signs = {c > 0 for c in p.terms.values()}
        if len(signs) != 1:
            return None
        return 1 if signs.pop() else -1

    a, b = poly_sign(x.num), poly_sign(x.den)
    if a is None or b is None:
        return None
    return a * b


def format_scalar(x) -> str:
    if isinstance(x, RationalFunction):
        return str(x)
    x = Fraction(x)
    return str(x)


def _pivot_key(x):
    if isinstance(x, Poly):
        return (x.nterms(), x.degree())
    if isinstance(x, RationalFunction):
        return x.size_key()
    return (1, 0, abs(x))


# ---------------------------------------------------------------------------
# matrices


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if A and len(A[0]) != len(B):
        raise ValueError(f"shape mismatch: {len(A)}x{len(A[0])} times {len(B)}x?")
    inner = len(B)
    ncols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(ncols):
            acc = 0
            for k in range(inner):
                a = row[k]
                if is_zero(a):
                    continue
                b = B[k][j]
                if is_zero(b):
                    continue
                acc = acc + a * b
            new.append(as_exact(acc))
        out.append(new)
    return out


def _eliminate(A: Sequence[Sequence]):
    """Gaussian elimination over the field, tracking row provenance."""
    rows = [[as_exact(x) for x in row] for row in A]
    deps = [{i} for i in range(len(rows))]
    ncols = len(rows[0]) if rows else 0
    free = list(range(len(rows)))
    rank = 0
    for col in range(ncols):
        cands = [i for i in free if not is_zero(rows[i][col])]
        if not cands:
            continue
        p = min(cands, key=lambda i: (_pivot_key(rows[i][col]), i))
        free.remove(p)
        rank += 1
        pr = rows[p]
        for i in free:
            f = rows[i][col]
            if is_zero(f):
                continue
            f = f / pr[col]
            rows[i] = [as_exact(a - f * b) for a, b in zip(rows[i], pr)]
            deps[i] |= deps[p]
    return rank, [frozenset(deps[i]) for i in free]


def rank(A: Sequence[Sequence]) -> int:
    """Exact rank by elimination."""
    return _eliminate(A)[0]


def dependent_rows(A: Sequence[Sequence]) -> list[frozenset[int]]:
    """Certificates of rank deficiency: each set of row indices is dependent."""
    return _eliminate(A)[1]


def _common_field(rows) -> RationalFunctionField | None:
    field = None
    for row in rows:
        for x in row:
            if isinstance(x, RationalFunction):
                if field is None:
                    field = x.field
                elif x.field != field:
                    raise ValueError("matrix entries belong to different fields")
    return field


def _clear_row(row, field):
    """Scale a row of field elements to ring elements (ints or Polys)."""
    if field is None:
        fr = [Fraction(x) for x in row]
        m = 1
        for x in fr:
            m = math.lcm(m, x.denominator)
        return [int(x * m) for x in fr]
    elems = [field.convert(x) for x in row]
    dens: list[Poly] = []
    for e in elems:
        if not any(e.den == d for d in dens):
            dens.append(e.den)
    L = field.const_poly(1)
    for d in dens:
        L = L * d
    out = []
    for e in elems:
        q = L.exquo(e.den)
        out.append(e.num * q)
    return out


def _exquo(a, b):
    if isinstance(a, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact integer division in fraction-free elimination")
        return q
    q = a.exquo(b)
    if q is None:
        raise ArithmeticError("inexact polynomial division in fraction-free elimination")
    return q


def _ring_zero(x):
    return x == 0 if isinstance(x, int) else x.is_zero()


def solve_linear(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list[ExactScalar]]:
    """Solve ``A X = B`` exactly for square ``A``.

    Denominators are cleared row by row, then fraction-free (Bareiss)
    elimination runs over the integers or the polynomial ring, pivoting on the
    structurally smallest candidate.  The result is checked by substitution
    before it is returned.

    Raises SingularMatrixError, naming a dependent row set, if ``A`` is
    singular over its field.
    """
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("solve_linear needs a square coefficient matrix")
    if len(B) != n:
        raise ValueError("right-hand side has the wrong number of rows")
    m = len(B[0]) if n else 0
    if n == 0:
        return []
    aug = [list(A[i]) + list(B[i]) for i in range(n)]
    field = _common_field(aug)
    M = [_clear_row(row, field) for row in aug]
    width = n + m

    prev = 1 if field is None else field.const_poly(1)
    for k in range(n):
        cands = [i for i in range(k, n) if not _ring_zero(M[i][k])]
        if not cands:
            deps = dependent_rows(A)
            where = "; ".join("{" + ", ".join(map(str, sorted(d))) + "}" for d in deps)
            raise SingularMatrixError(f"singular system: dependent rows {where}", deps)
        p = min(cands, key=lambda i: (_pivot_key(M[i][k]), i))
        M[k], M[p] = M[p], M[k]
        piv = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, width):
                row_i[j] = _exquo(piv * row_i[j] - mik * row_k[j], prev)
            row_i[k] = 0 if field is None else field.poly()
        prev = piv

    # fraction-free back substitution: Y = det * X has ring entries
    det = M[n - 1][n - 1]
    X = [[None] * m for _ in range(n)]
    for c in range(m):
        Y = [None] * n
        for i in range(n - 1, -1, -1):
            acc = det * M[i][n + c]
            for j in range(i + 1, n):
                acc = acc - M[i][j] * Y[j]
            Y[i] = _exquo(acc, M[i][i])
        for i in range(n):
            if field is None:
                X[i][c] = Fraction(Y[i], det)
            else:
                X[i][c] = _make(Y[i], det)

    check = matmul(A, X)
    for i in range(n):
        for j in range(m):
            if not (check[i][j] == as_exact(B[i][j])):
                raise ArithmeticError("solve_linear self-check failed (A X != B)")
    return X
