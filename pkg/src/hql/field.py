"""Exact arithmetic for GF(2^h) and its quadratic extension GF(q^2).

Elements of GF(q), q = 2^h, are plain ints in [0, q): the binary digits
of the int are the coefficients of the polynomial-basis representation
(bit i = coefficient of x^i).  Addition is XOR; multiplication reduces
modulo a fixed irreducible polynomial per degree.

GF(q^2) is built directly as a two-dimensional algebra over GF(q) on the
basis {1, eps}, where eps^2 = eps + nu and nu in GF(q) has absolute trace
one (which makes X^2 + X + nu irreducible over GF(q) and forces
eps^q = eps + 1).  An element x0 + eps*x1 is coded as the int
x0 | (x1 << h), so splitting into coordinates is pure bit surgery and
addition is again XOR.
"""

from __future__ import annotations

# Lexicographically least irreducible polynomial of each degree over GF(2),
# coded with bit i = coefficient of x^i (so 0b1011 = x^3 + x + 1).
IRREDUCIBLE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
}

# Python lookup tables for GF(q^2) are built only up to this degree; the
# exhaustive machinery never needs more, and larger fields fall back to
# component formulas.
_TABLE_MAX_H = 4


def _carryless_mul_mod(a: int, b: int, modulus: int, h: int) -> int:
    p = 0
    while b:
        if b & 1:
            p ^= a
        a <<= 1
        if a >> h:
            a ^= modulus
        b >>= 1
    return p


class FieldContext:
    """Shared, read-only arithmetic context for GF(q) and GF(q^2).

    All tables are built once in the constructor; instances are safe to
    share across threads and processes.
    """

    def __init__(self, h: int):
        if h not in IRREDUCIBLE:
            raise ValueError(f"unsupported extension degree h={h}; supported: {sorted(IRREDUCIBLE)}")
        self.h = h
        self.q = 1 << h
        self.q2 = 1 << (2 * h)
        self.modulus = IRREDUCIBLE[h]
        q = self.q

        self.mul = [[_carryless_mul_mod(a, b, self.modulus, h) for b in range(q)] for a in range(q)]
        mul = self.mul
        self.sq = [mul[a][a] for a in range(q)]

        # inverse via exponent a^(q-2)
        self.inv = [0] * q
        for a in range(1, q):
            acc, base, e = 1, a, q - 2
            while e:
                if e & 1:
                    acc = mul[acc][base]
                base = mul[base][base]
                e >>= 1
            self.inv[a] = acc

        # absolute trace GF(q) -> GF(2)
        self.trace = [0] * q
        for a in range(q):
            t, x = 0, a
            for _ in range(h):
                t ^= x
                x = mul[x][x]
            self.trace[a] = t

        # x -> sqrt(x) = x^(q/2); unique square root in characteristic 2
        self.sqrt = [0] * q
        for a in range(q):
            self.sqrt[self.sq[a]] = a

        # small powers x^e for e <= 4, used by polynomial specialization
        self.pow_small = [[1, a, self.sq[a], mul[self.sq[a]][a], self.sq[self.sq[a]]] for a in range(q)]

        # nu: least trace-one element, excluding 1 whenever an alternative
        # exists (only q = 2 has no trace-one element other than 1)
        candidates = [a for a in range(q) if self.trace[a] == 1]
        non_one = [a for a in candidates if a != 1]
        self.nu = non_one[0] if non_one else candidates[0]

        self.eps = 1 << h  # the basis element 0 + eps*1

        self.frob2 = [self._frob2_formula(a) for a in range(self.q2)]
        self.norm2 = [self._norm2_formula(a) for a in range(self.q2)]
        # absolute trace GF(q^2) -> GF(2): trace transitivity through x + x^q = x1
        self.trace2 = [self.trace[a >> h] for a in range(self.q2)]

        # GF(q^2) full tables only for small h; larger fields use the formulas
        if h <= _TABLE_MAX_H:
            self.mul2 = [[self._mul2_formula(a, b) for b in range(self.q2)] for a in range(self.q2)]
            m2 = self.mul2
            self.sq2 = [m2[a][a] for a in range(self.q2)]
            self.inv2 = [0] * self.q2
            for a in range(1, self.q2):
                self.inv2[a] = self._inv2_formula(a)
        else:
            self.mul2 = None
            self.sq2 = None
            self.inv2 = None

        self.norm_one = tuple(a for a in range(1, self.q2) if self.norm2[a] == 1)

        self._np_tables = None

    # -- GF(q) ----------------------------------------------------------

    def gf_pow(self, a: int, e: int) -> int:
        acc, mul = 1, self.mul
        base = a
        while e:
            if e & 1:
                acc = mul[acc][base]
            base = mul[base][base]
            e >>= 1
        return acc

    # -- GF(q^2) --------------------------------------------------------

    def split(self, x: int) -> tuple[int, int]:
        """Coordinates (x0, x1) of x = x0 + eps*x1 over GF(q)."""
        return x & (self.q - 1), x >> self.h

    def join(self, x0: int, x1: int) -> int:
        return x0 | (x1 << self.h)

    def _mul2_formula(self, a: int, b: int) -> int:
        h, mask = self.h, self.q - 1
        a0, a1 = a & mask, a >> h
        b0, b1 = b & mask, b >> h
        mul, nu = self.mul, self.nu
        c0 = mul[a0][b0] ^ mul[nu][mul[a1][b1]]
        c1 = mul[a0][b1] ^ mul[a1][b0] ^ mul[a1][b1]
        return c0 | (c1 << h)

    def _frob2_formula(self, a: int) -> int:
        a0, a1 = a & (self.q - 1), a >> self.h
        return (a0 ^ a1) | (a1 << self.h)

    def _norm2_formula(self, a: int) -> int:
        # x * x^q = x0^2 + x0*x1 + nu*x1^2, an element of GF(q)
        a0, a1 = a & (self.q - 1), a >> self.h
        mul = self.mul
        return self.sq[a0] ^ mul[a0][a1] ^ mul[self.nu][self.sq[a1]]

    def _inv2_formula(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(q^2)")
        ninv = self.inv[self.norm2[a]]
        fr = self.frob2[a]
        f0, f1 = fr & (self.q - 1), fr >> self.h
        mul = self.mul
        return mul[f0][ninv] | (mul[f1][ninv] << self.h)

    def m2(self, a: int, b: int) -> int:
        if self.mul2 is not None:
            return self.mul2[a][b]
        return self._mul2_formula(a, b)

    def i2(self, a: int) -> int:
        if self.inv2 is not None:
            if a == 0:
                raise ZeroDivisionError("inverse of zero in GF(q^2)")
            return self.inv2[a]
        return self._inv2_formula(a)

    def s2(self, a: int) -> int:
        if self.sq2 is not None:
            return self.sq2[a]
        return self._mul2_formula(a, a)

    def rel_trace(self, x: int) -> int:
        """x + x^q, an element of GF(q); equals the eps-coordinate of x."""
        return x >> self.h

    def abs_trace2(self, x: int) -> int:
        return self.trace2[x]

    def pow2(self, a: int, e: int) -> int:
        acc, base = 1, a
        while e:
            if e & 1:
                acc = self.m2(acc, base)
            base = self.m2(base, base)
            e >>= 1
        return acc

    # -- serialization ----------------------------------------------------

    def format_q(self, x: int) -> str:
        """Little-endian bit string of the polynomial-basis coordinates."""
        return format(x, f"0{self.h}b")[::-1]

    def format_q2(self, x: int) -> str:
        x0, x1 = self.split(x)
        return f"{x0}+e*{x1}"

    def parse_q2(self, text: str) -> int:
        text = text.strip()
        if "+e*" in text:
            p0, p1 = text.split("+e*")
            x0, x1 = int(p0), int(p1)
            if not (0 <= x0 < self.q and 0 <= x1 < self.q):
                raise ValueError(f"coordinates out of range for q={self.q}: {text!r}")
            return self.join(x0, x1)
        v = int(text)
        if not 0 <= v < self.q2:
            raise ValueError(f"element code out of range for q^2={self.q2}: {text!r}")
        return v

    def modulus_str(self) -> str:
        terms = [("x^%d" % i if i > 1 else ("x" if i == 1 else "1"))
                 for i in range(self.h, -1, -1) if (self.modulus >> i) & 1]
        return "+".join(terms)

    # -- numpy mirrors for bulk evaluation --------------------------------

    def numpy_tables(self):
        """Lazily built numpy views of the GF(q^2) tables used for bulk work."""
        if self._np_tables is None:
            import numpy as np

            q2 = self.q2
            mul2 = np.empty((q2, q2), dtype=np.uint16)
            for a in range(q2):
                if self.mul2 is not None:
                    mul2[a] = self.mul2[a]
                else:
                    mul2[a] = [self._mul2_formula(a, b) for b in range(q2)]
            sq2 = mul2[np.arange(q2), np.arange(q2)]
            norm2 = np.array(self.norm2, dtype=np.uint16)
            frob2 = np.array(self.frob2, dtype=np.uint16)
            trace2 = np.array(self.trace2, dtype=np.uint8)
            self._np_tables = {"mul2": mul2, "sq2": sq2, "norm2": norm2,
                               "frob2": frob2, "trace2": trace2}
        return self._np_tables

    def __repr__(self):
        return f"FieldContext(h={self.h}, q={self.q}, modulus={self.modulus:#b}, nu={self.nu})"


_CONTEXTS: dict[int, FieldContext] = {}


def context_for_q(q: int) -> FieldContext:
    """Shared FieldContext for GF(q); q must be a power of two >= 2."""
    h = q.bit_length() - 1
    if q != 1 << h or h not in IRREDUCIBLE:
        raise ValueError(f"q={q} is not a supported power of two")
    if h not in _CONTEXTS:
        _CONTEXTS[h] = FieldContext(h)
    return _CONTEXTS[h]
