"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials are immutable: a ring (variable names plus a monomial order) and
a mapping from exponent tuples to nonzero Fraction coefficients. Everything
downstream (Groebner bases, blowup charts, intersection multiplicities)
assumes exact arithmetic, so coefficients are fractions.Fraction throughout
and no floating point ever enters.

Monomial orders are first-class values because elimination steps need block
orders and canonical output needs one agreed order per ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import ExactDivisionError, PolyParseError, RingMismatchError

Exponents = tuple[int, ...]
Scalar = Union[Fraction, int]


def exp_add(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x + y for x, y in zip(a, b))


def exp_sub(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x - y for x, y in zip(a, b))


def exp_lcm(a: Exponents, b: Exponents) -> Exponents:
    return tuple(max(x, y) for x, y in zip(a, b))


def exp_divides(a: Exponents, b: Exponents) -> bool:
    """True when monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def _grevlex_key(exps: Exponents) -> tuple:
    return (sum(exps), tuple(-e for e in reversed(exps)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order usable as a max() key.

    kind is one of "lex", "grevlex", "elim". For "elim", block is the size
    of the leading variable block; both blocks are compared by grevlex, so
    the order eliminates the first block variables.
    """

    kind: str = "grevlex"
    block: int = 0

    @staticmethod
    def lex() -> "MonomialOrder":
        return MonomialOrder("lex")

    @staticmethod
    def grevlex() -> "MonomialOrder":
        return MonomialOrder("grevlex")

    @staticmethod
    def elim(block: int) -> "MonomialOrder":
        if block <= 0:
            raise ValueError("elimination block must be positive")
        return MonomialOrder("elim", block)

    def sort_key(self, exps: Exponents):
        if self.kind == "lex":
            return exps
        if self.kind == "grevlex":
            return _grevlex_key(exps)
        if self.kind == "elim":
            return (_grevlex_key(exps[: self.block]), _grevlex_key(exps[self.block :]))
        raise ValueError(f"unknown order kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "elim":
            return f"elim({self.block})"
        return self.kind


@dataclass(frozen=True)
class PolynomialRing:
    """QQ[names] with a fixed monomial order."""

    names: tuple[str, ...]
    order: MonomialOrder = MonomialOrder()

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        if self.order.kind == "elim" and not 0 < self.order.block < len(self.names):
            raise ValueError("elimination block must split the variables")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in ring {self}") from None

    def var(self, name: str) -> "Polynomial":
        exps = [0] * self.nvars
        exps[self.index(name)] = 1
        return Polynomial(self, {tuple(exps): Fraction(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, value: Scalar) -> "Polynomial":
        value = Fraction(value)
        if value == 0:
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * self.nvars: value})

    def with_order(self, order: MonomialOrder) -> "PolynomialRing":
        return PolynomialRing(self.names, order)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def monomial(self, exps: Exponents, coeff: Scalar = 1) -> "Polynomial":
        if len(exps) != self.nvars:
            raise ValueError("exponent tuple has wrong length")
        coeff = Fraction(coeff)
        if coeff == 0:
            return self.zero()
        return Polynomial(self, {tuple(exps): coeff})

    def __str__(self) -> str:
        return f"QQ[{', '.join(self.names)}; {self.order}]"


class Polynomial:
    """Immutable polynomial: exponent tuple -> nonzero Fraction."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolynomialRing, terms: Mapping[Exponents, Fraction]) -> None:
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", {e: c for e, c in terms.items() if c != 0})

    def __setattr__(self, name, value) -> None:
        raise AttributeError("Polynomial is immutable")

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Max total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.ring.index(name)
        return max(e[i] for e in self.terms)

    def variables_used(self) -> set[str]:
        used: set[str] = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k > 0:
                    used.add(self.ring.names[i])
        return used

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in decreasing monomial order."""
        key = self.ring.order.sort_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_monomial(self) -> Exponents:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        key = self.ring.order.sort_key
        return max(self.terms, key=key)

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def leading_term(self) -> "Polynomial":
        lm = self.leading_monomial()
        return Polynomial(self.ring, {lm: self.terms[lm]})

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if lc == 1:
            return self
        return Polynomial(self.ring, {e: c / lc for e, c in self.terms.items()})

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return Polynomial(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return self.ring.const(other) - self

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return self.ring.zero()
            return Polynomial(self.ring, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        terms: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = exp_add(e1, e2)
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return Polynomial(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """Quotient self/other when the division is exact."""
        self._check(other)
        if other.is_zero():
            raise ExactDivisionError("division by zero polynomial")
        quotient = self.ring.zero()
        rem = self
        lm_o = other.leading_monomial()
        lc_o = other.leading_coefficient()
        while not rem.is_zero():
            lm_r = rem.leading_monomial()
            if not exp_divides(lm_o, lm_r):
                raise ExactDivisionError(f"{other} does not divide {self}")
            t = Polynomial(self.ring, {exp_sub(lm_r, lm_o): rem.terms[lm_r] / lc_o})
            quotient = quotient + t
            rem = rem - t * other
        return quotient

    def divides(self, other: "Polynomial") -> bool:
        try:
            other.exact_div(self)
            return True
        except ExactDivisionError:
            return False

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- mapping to other rings -------------------------------------------

    def substitute(
        self,
        bindings: Mapping[str, Union["Polynomial", Scalar]],
        ring: PolynomialRing | None = None,
    ) -> "Polynomial":
        """Substitute for variables; unbound names map to same-named variables.

        The target ring defaults to the ring of the first Polynomial binding,
        falling back to self.ring. Every variable actually used must either be
        bound or exist in the target ring.
        """
        if ring is None:
            for v in bindings.values():
                if isinstance(v, Polynomial):
                    ring = v.ring
                    break
            else:
                ring = self.ring
        images: dict[str, Polynomial] = {}
        for name, value in bindings.items():
            self.ring.index(name)  # reject bindings for foreign variables
            if isinstance(value, (int, Fraction)):
                images[name] = ring.const(value)
            else:
                if value.ring != ring:
                    raise RingMismatchError("binding values must share the target ring")
                images[name] = value
        for name in self.variables_used():
            if name not in images:
                images[name] = ring.var(name)
        powers: dict[tuple[str, int], Polynomial] = {}

        def power(name: str, k: int) -> Polynomial:
            got = powers.get((name, k))
            if got is None:
                got = images[name] ** k
                powers[(name, k)] = got
            return got

        out = ring.zero()
        for e, c in self.terms.items():
            piece = ring.const(c)
            for i, k in enumerate(e):
                if k:
                    piece = piece * power(self.ring.names[i], k)
            out = out + piece
        return out

    def in_ring(self, ring: PolynomialRing) -> "Polynomial":
        """Transport to another ring by variable name."""
        if ring == self.ring:
            return self
        return self.substitute({}, ring)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            val = c
            for i, k in enumerate(e):
                if k:
                    name = self.ring.names[i]
                    if name not in point:
                        raise KeyError(f"no value for variable {name!r}")
                    val *= Fraction(point[name]) ** k
            total += val
        return total

    def differentiate(self, name: str) -> "Polynomial":
        i = self.ring.index(name)
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            new = list(e)
            new[i] -= 1
            key = tuple(new)
            s = terms.get(key, Fraction(0)) + c * e[i]
            if s == 0:
                terms.pop(key, None)
            else:
                terms[key] = s
        return Polynomial(self.ring, terms)

    def homogenize(self, ring: PolynomialRing, var: str) -> "Polynomial":
        """Homogenize with respect to var, writing the result in ring."""
        j = ring.index(var)
        d = self.total_degree()
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            new = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    new[ring.index(self.ring.names[i])] = k
            new[j] += d - sum(e)
            terms[tuple(new)] = c
        return Polynomial(ring, terms)

    # -- printing ----------------------------------------------------------

    def _monomial_str(self, e: Exponents) -> str:
        parts = []
        for i, k in enumerate(e):
            if k == 1:
                parts.append(self.ring.names[i])
            elif k > 1:
                parts.append(f"{self.ring.names[i]}^{k}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks: list[str] = []
        for e, c in self.sorted_terms():
            mono = self._monomial_str(e)
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if not chunks:
                chunks.append(body if c > 0 else f"-{body}")
            else:
                chunks.append(f"{'+' if c > 0 else '-'} {body}")
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"<{self} in {self.ring}>"


# -- parsing ----------------------------------------------------------------


class _Parser:
    """Recursive descent for +, -, *, ^ (or **), parentheses, fractions.

    Multiplication must be explicit: names may be several characters long, so
    juxtaposition like 2xy would be ambiguous.
    """

    def __init__(self, text: str, ring: PolynomialRing) -> None:
        self.text = text
        self.ring = ring
        self.pos = 0

    def error(self, message: str) -> PolyParseError:
        return PolyParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Polynomial:
        result = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error(f"unexpected {self.text[self.pos]!r}")
        return result

    def expr(self) -> Polynomial:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.text[self.pos] == "-":
                sign = -sign
            self.pos += 1
        result = self.term() * sign
        while True:
            ch = self.peek()
            if ch not in ("+", "-"):
                return result
            self.pos += 1
            sign = 1 if ch == "+" else -1
            while self.peek() in ("+", "-"):
                if self.text[self.pos] == "-":
                    sign = -sign
                self.pos += 1
            result = result + self.term() * sign

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            self.skip_ws()
            if self.text.startswith("**", self.pos):
                return result  # power handled inside factor
            if self.peek() == "*":
                self.pos += 1
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Polynomial:
        base = self.base()
        self.skip_ws()
        if self.text.startswith("**", self.pos):
            self.pos += 2
            return base ** self.integer("exponent")
        if self.peek() == "^":
            self.pos += 1
            return base ** self.integer("exponent")
        return base

    def base(self) -> Polynomial:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            return inner
        if ch.isdigit():
            num = self.integer("number")
            self.skip_ws()
            if self.peek() == "/" :
                self.pos += 1
                den = self.integer("denominator")
                if den == 0:
                    raise self.error("zero denominator")
                return self.ring.const(Fraction(num, den))
            return self.ring.const(num)
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            name = self.text[start : self.pos]
            if name not in self.ring.names:
                self.pos = start
                raise self.error(f"unknown variable {name!r}")
            return self.ring.var(name)
        raise self.error("expected a number, variable, or '('" if ch else "unexpected end of input")

    def integer(self, what: str) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error(f"expected {what}")
        return int(self.text[start : self.pos])


def parse_polynomial(text: str, ring: PolynomialRing) -> Polynomial:
    return _Parser(text, ring).parse()


def parse_many(text: str, ring: PolynomialRing, sep: str = ";") -> list[Polynomial]:
    """Parse a separator-delimited generator list, skipping empty pieces."""
    out = []
    for piece in text.split(sep):
        if piece.strip():
            out.append(parse_polynomial(piece, ring))
    return out
