"""Polynomial maps with coefficients in a commutative ring.

A "map" is a list of components; each component is a dict sending an
exponent tuple (in the offset variables u) to a ring element.  Constant
terms are excluded: maps are centered, sending 0 to 0.  Truncation is by
total u-degree.

The ring is abstracted so the same composition/inversion code serves
plain rationals (series reversion), truncated series (jet-groupoid
arithmetic), and first-order dual numbers over series (curves of jets).
"""

from __future__ import annotations

from fractions import Fraction

from .series import TruncatedSeries, index_add, index_order, unit_index


class RationalRing:
    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return Fraction(1) / a

    @staticmethod
    def is_zero(a):
        return a == 0

    @staticmethod
    def is_unit(a):
        return a != 0

    @staticmethod
    def rat(c):
        return Fraction(c)


class SeriesRing:
    def __init__(self, n, trunc):
        self.n = n
        self.trunc = trunc
        self.zero = TruncatedSeries.zero(n, trunc)
        self.one = TruncatedSeries.const(1, n, trunc)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        return a.reciprocal()

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    @staticmethod
    def is_unit(a):
        return a.constant_term() != 0

    @staticmethod
    def derive(a, j):
        return a.derive(j)

    def rat(self, c):
        return TruncatedSeries.const(c, self.n, self.trunc)


class DualRing:
    """Elements a + t*b with t^2 = 0 over an arbitrary base ring."""

    def __init__(self, base):
        self.base = base
        self.zero = (base.zero, base.zero)
        self.one = (base.one, base.zero)

    def add(self, a, b):
        return (self.base.add(a[0], b[0]), self.base.add(a[1], b[1]))

    def mul(self, a, b):
        base = self.base
        return (base.mul(a[0], b[0]),
                base.add(base.mul(a[0], b[1]), base.mul(a[1], b[0])))

    def neg(self, a):
        return (self.base.neg(a[0]), self.base.neg(a[1]))

    def inv(self, a):
        base = self.base
        r = base.inv(a[0])
        return (r, base.neg(base.mul(base.mul(r, r), a[1])))

    def is_zero(self, a):
        return self.base.is_zero(a[0]) and self.base.is_zero(a[1])

    def is_unit(self, a):
        return self.base.is_unit(a[0])

    def rat(self, c):
        return (self.base.rat(c), self.base.zero)

    def lift(self, a):
        return (a, self.base.zero)

    def derive(self, a, j):
        return (self.base.derive(a[0], j), self.base.derive(a[1], j))


# -- polynomials (dict exponent -> ring element) ----------------------

def poly_add(ring, p, q):
    out = dict(p)
    for k, v in q.items():
        s = ring.add(out.get(k, ring.zero), v)
        if ring.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def poly_mul(ring, p, q, deg):
    out = {}
    for a, ca in p.items():
        da = index_order(a)
        for b, cb in q.items():
            if da + index_order(b) > deg:
                continue
            key = index_add(a, b)
            s = ring.add(out.get(key, ring.zero), ring.mul(ca, cb))
            if ring.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
    return out


def poly_scale(ring, p, c):
    out = {}
    for k, v in p.items():
        w = ring.mul(c, v)
        if not ring.is_zero(w):
            out[k] = w
    return out


def poly_derive(ring, p, var):
    out = {}
    for alpha, c in p.items():
        e = alpha[var]
        if e == 0:
            continue
        beta = alpha[:var] + (e - 1,) + alpha[var + 1:]
        out[beta] = ring.mul(ring.rat(e), c)
    return out


def pm_compose(ring, outer, inner, deg):
    """Components of outer(inner(u)), truncated at total u-degree deg.

    ``outer`` has len(inner) input variables; ``inner`` components share
    the final variable count.
    """
    powers = []
    maxdeg = [0] * len(inner)
    for comp in outer:
        for alpha in comp:
            for i, a in enumerate(alpha):
                maxdeg[i] = max(maxdeg[i], a)
    for i, g in enumerate(inner):
        g = {a: c for a, c in g.items() if index_order(a) <= deg}
        p = [None]  # powers[i][e] = g^e; e=0 handled separately
        acc = g
        p.append(acc)
        for _ in range(2, maxdeg[i] + 1):
            acc = poly_mul(ring, acc, g, deg)
            p.append(acc)
        powers.append(p)
    out = []
    for comp in outer:
        res = {}
        for alpha, c in comp.items():
            term = None
            for i, a in enumerate(alpha):
                if a == 0:
                    continue
                f = powers[i][a]
                term = f if term is None else poly_mul(ring, term, f, deg)
            if term is None:
                # constant term of outer is not allowed for centered maps
                raise ValueError("outer map has a constant term")
            res = poly_add(ring, res, poly_scale(ring, term, c))
        out.append(res)
    return out


def pm_identity(ring, n):
    return [{unit_index(n, i): ring.one} for i in range(n)]


def pm_linear_part(ring, pmap, n):
    return [[comp.get(unit_index(n, j), ring.zero) for j in range(n)]
            for comp in pmap]


def matrix_inverse(ring, m):
    """Invert a square matrix over the ring (pivots must be units)."""
    n = len(m)
    aug = [[m[i][j] for j in range(n)] +
           [ring.one if i == j else ring.zero for j in range(n)]
           for i in range(n)]
    for c in range(n):
        pr = None
        for r in range(c, n):
            if ring.is_unit(aug[r][c]):
                pr = r
                break
        if pr is None:
            return None
        aug[c], aug[pr] = aug[pr], aug[c]
        inv = ring.inv(aug[c][c])
        aug[c] = [ring.mul(inv, x) for x in aug[c]]
        for r in range(n):
            if r != c and not ring.is_zero(aug[r][c]):
                f = aug[r][c]
                aug[r] = [ring.add(x, ring.neg(ring.mul(f, y)))
                          for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def pm_invert(ring, pmap, deg):
    """Compositional inverse of a square centered polynomial map with
    invertible linear part, to total degree deg."""
    n = len(pmap)
    lin = pm_linear_part(ring, pmap, n)
    linv = matrix_inverse(ring, lin)
    if linv is None:
        raise ValueError("singular linear part, jet not invertible")
    inv_lin = []
    for i in range(n):
        comp = {}
        for j in range(n):
            if not ring.is_zero(linv[i][j]):
                comp[unit_index(n, j)] = linv[i][j]
        inv_lin.append(comp)
    g = [dict(comp) for comp in inv_lin]
    ident = pm_identity(ring, n)
    for _ in range(2, deg + 1):
        err = pm_compose(ring, pmap, g, deg)
        for i in range(n):
            err[i] = poly_add(ring, err[i],
                              poly_scale(ring, ident[i], ring.neg(ring.one)))
        if all(not e for e in err):
            break
        for i in range(n):
            corr = {}
            for j in range(n):
                if not ring.is_zero(linv[i][j]):
                    corr = poly_add(ring, corr,
                                    poly_scale(ring, err[j], linv[i][j]))
            g[i] = poly_add(ring, g[i], poly_scale(ring, corr,
                                                   ring.neg(ring.one)))
    return g
