"""Exact linear algebra over the rationals.

Matrices are dense, row-major and immutable. Rank is computed by
fraction-free elimination; kernels and row spaces come back as
:py:class:`SubspaceBasis` objects in reduced row echelon form, so two
computations of the same subspace compare equal.

Row vectors act on matrices from the left throughout: the kernel of ``m``
is the set of ``v`` with ``v * m == 0``.

"""

from fractions import Fraction
import math
import random
import warnings

from sympy import isprime, nextprime


#: Matrices with more rows than this use the modular rank in auto mode
EXACT_ROW_LIMIT = 400

#: Number of distinct primes a modular rank certificate needs
MODULAR_PRIME_COUNT = 3

#: Every prime used by the modular rank is larger than this
PRIME_LOWER_BOUND = 2**31

#: Seed used to draw primes when none is given
DEFAULT_SEED = 0

#: Rank computation methods
METHOD_EXACT = "exact"
METHOD_MODULAR = "modular"


class ShapeError(ValueError):
    pass


class PrimeDivisorError(ValueError):
    pass


class ModularRankDisagreement(ArithmeticError):
    pass


class ModularRankWarning(UserWarning):
    pass


def to_rational(value):
    """Converts ``value`` to an exact rational

    Integral values come back as ``int``, everything else as a
    ``Fraction`` in lowest terms.

    :arg value: an int, a Fraction or a string like ``"3/4"`` or ``"-2"``

    :returns: int or Fraction

    :raises TypeError: for floats and other inexact types

    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return to_rational(Fraction(value.strip()))
    raise TypeError(
        f"argument cannot be of {value.__class__.__name__!r} type, "
        + "must be int, Fraction or str"
    )


def normalize(value):
    if type(value) is Fraction and value.denominator == 1:
        return value.numerator
    return value


def format_rational(value):
    """Formats a rational as ``"p/q"`` in lowest terms, integers as ``"n/1"``"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class MatQ:
    """Dense rational matrix

    Entries are stored row-major in a tuple and never change after
    construction.

    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = tuple(to_rational(e) for e in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ShapeError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, "
                + f"got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [tuple(row) for row in rows]
        if cols is None:
            if not rows:
                raise ShapeError("cols must be given for a matrix without rows")
            cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ShapeError(f"ragged row of length {len(row)}, expected {cols}")
        return cls(len(rows), cols, [e for row in rows for e in row])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n):
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    def __getitem__(self, index):
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i):
        start = i * self.cols
        return self.entries[start : start + self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self):
        return MatQ(
            self.cols,
            self.rows,
            [self[i, j] for j in range(self.cols) for i in range(self.rows)],
        )

    def stack(self, other):
        """Returns the rows of ``self`` followed by the rows of ``other``"""
        if self.cols != other.cols:
            raise ShapeError(
                f"cannot stack {self.rows}x{self.cols} on {other.rows}x{other.cols}"
            )
        return MatQ(self.rows + other.rows, self.cols, self.entries + other.entries)

    def __sub__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError(
                f"cannot subtract {other.rows}x{other.cols} "
                + f"from {self.rows}x{self.cols}"
            )
        return MatQ(
            self.rows,
            self.cols,
            [normalize(a - b) for a, b in zip(self.entries, other.entries)],
        )

    def is_integral(self):
        return all(isinstance(e, int) for e in self.entries)

    def is_zero(self):
        return not any(self.entries)

    def __eq__(self, other):
        if not isinstance(other, MatQ):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (
            other.rows,
            other.cols,
            other.entries,
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"<MatQ {self.rows}x{self.cols}>"


class RankCertificate:
    """Rank of a matrix together with how it was obtained

    ``verified`` is true for a modular rank that was confirmed by exact
    elimination.

    """

    __slots__ = ("rank", "method", "primes", "verified")

    def __init__(self, rank, method=METHOD_EXACT, primes=(), verified=False):
        primes = tuple(primes)
        if method == METHOD_MODULAR:
            if len(set(primes)) < MODULAR_PRIME_COUNT:
                raise ValueError(
                    f"modular certificate needs {MODULAR_PRIME_COUNT} distinct primes"
                )
        elif method == METHOD_EXACT:
            if primes:
                raise ValueError("exact certificate carries no primes")
        else:
            raise ValueError(f"unknown rank method {method!r}")
        self.rank = rank
        self.method = method
        self.primes = primes
        self.verified = bool(verified) and method == METHOD_MODULAR

    def to_json(self):
        data = {"rank": self.rank, "method": self.method, "primes": list(self.primes)}
        if self.method == METHOD_MODULAR:
            data["verified"] = self.verified
        return data

    @classmethod
    def from_json(cls, data):
        return cls(
            data["rank"], data["method"], data["primes"], data.get("verified", False)
        )

    def satisfies(self, verify):
        """Whether this certificate answers a request with ``verify`` set"""
        return not verify or self.method == METHOD_EXACT or self.verified

    def __eq__(self, other):
        if not isinstance(other, RankCertificate):
            return NotImplemented
        return (self.rank, self.method, self.primes, self.verified) == (
            other.rank,
            other.method,
            other.primes,
            other.verified,
        )

    def __repr__(self):
        return f"<RankCertificate rank={self.rank} method={self.method}>"


class SubspaceBasis:
    """Basis of a subspace of Q^n in reduced row echelon form

    Build these with :py:func:`reduce_basis` (or the kernel and row space
    functions), which normalize the vectors; the constructor trusts its
    input.

    """

    __slots__ = ("ambient_dim", "vectors", "pivots")

    def __init__(self, ambient_dim, vectors, pivots):
        self.ambient_dim = ambient_dim
        self.vectors = tuple(tuple(v) for v in vectors)
        self.pivots = tuple(pivots)

    @property
    def dimension(self):
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __eq__(self, other):
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return (self.ambient_dim, self.vectors) == (other.ambient_dim, other.vectors)

    def __repr__(self):
        return f"<SubspaceBasis dim={self.dimension} in Q^{self.ambient_dim}>"

    def to_mat(self):
        return MatQ.from_rows(self.vectors, cols=self.ambient_dim)

    def contains(self, other):
        """Whether every vector of ``other`` lies in this subspace"""
        if other.ambient_dim != self.ambient_dim:
            raise ShapeError("subspaces live in different ambient spaces")
        if not other.vectors:
            return True
        joined = self.to_mat().stack(other.to_mat())
        return rank_exact(joined) == self.dimension

    def as_dicts(self, labels):
        """Exports the basis as ``{label: "p/q"}`` maps, dropping zeros

        :arg list labels: one label string per ambient coordinate

        """
        if len(labels) != self.ambient_dim:
            raise ShapeError(
                f"{len(labels)} labels for a space of dimension {self.ambient_dim}"
            )
        return [
            {label: format_rational(c) for label, c in zip(labels, v) if c}
            for v in self.vectors
        ]


def _integer_rows(m):
    """Scales each row of ``m`` by the lcm of its denominators"""
    rows = []
    for i in range(m.rows):
        row = m.row(i)
        den = 1
        for e in row:
            if not isinstance(e, int):
                den = den * e.denominator // math.gcd(den, e.denominator)
        if den == 1:
            rows.append(list(row))
        else:
            rows.append([int(e * den) for e in row])
    return rows


def _bareiss(rows, ncols):
    """Fraction-free forward elimination in place

    Every entry stays an integer minor of the input, so the division by
    the previous pivot is exact.

    :returns: list of pivot columns

    """
    nrows = len(rows)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot_row = rows[r]
        pivot = pivot_row[c]
        for i in range(r + 1, nrows):
            row = rows[i]
            factor = row[c]
            for j in range(c + 1, ncols):
                row[j] = (pivot * row[j] - factor * pivot_row[j]) // prev
            row[c] = 0
        prev = pivot
        pivots.append(c)
        r += 1
    return pivots


def rank_exact(m):
    """Returns the rank of ``m`` over Q

    Rows are scaled to integers, then reduced by fraction-free (Bareiss)
    elimination.

    :arg MatQ m: the matrix

    :returns: int

    """
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_bareiss(_integer_rows(m), m.cols))


def _rref(rows, ncols):
    """Gauss-Jordan elimination over Q in place

    :returns: list of pivot columns; ``rows[:len(pivots)]`` is the reduced
        row echelon form with unit pivots

    """
    nrows = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot = rows[r][c]
        if pivot != 1:
            rows[r] = [normalize(Fraction(e) / pivot) if e else 0 for e in rows[r]]
        pivot_row = rows[r]
        for i in range(nrows):
            if i == r:
                continue
            factor = rows[i][c]
            if factor:
                rows[i] = [
                    normalize(e - factor * pe) if pe else e
                    for e, pe in zip(rows[i], pivot_row)
                ]
        pivots.append(c)
        r += 1
    return pivots


def reduce_basis(vectors, ambient_dim):
    """Returns the reduced echelon basis of the span of ``vectors``

    :arg vectors: iterable of sequences of rationals, each of length
        ``ambient_dim``

    :arg int ambient_dim: dimension of the ambient space

    :returns: SubspaceBasis

    """
    rows = []
    for v in vectors:
        v = [to_rational(e) for e in v]
        if len(v) != ambient_dim:
            raise ShapeError(f"vector of length {len(v)} in Q^{ambient_dim}")
        rows.append(v)
    pivots = _rref(rows, ambient_dim)
    return SubspaceBasis(ambient_dim, rows[: len(pivots)], pivots)


def row_space_basis(m):
    """Returns the reduced basis of the span of the rows of ``m``"""
    return reduce_basis(m.to_rows(), m.cols)


def left_kernel_basis(m):
    """Returns a basis of ``{v : v * m == 0}``

    The basis is in reduced row echelon form with unit pivots, ordered by
    pivot position; its dimension is ``m.rows - rank(m)``.

    :arg MatQ m: the matrix

    :returns: SubspaceBasis in Q^rows

    """
    n = m.rows
    if n == 0:
        return SubspaceBasis(0, [], [])
    # v * m == 0 is the null space of the transpose
    rows = m.transpose().to_rows()
    pivots = _rref(rows, n)
    pivot_set = set(pivots)
    vectors = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [0] * n
        v[free] = 1
        for k, p in enumerate(pivots):
            v[p] = normalize(-rows[k][free])
        vectors.append(v)
    return reduce_basis(vectors, n)


def mat_mul(a, b):
    """Returns the exact product ``a * b``

    :raises ShapeError: if ``a.cols != b.rows``

    """
    if a.cols != b.rows:
        raise ShapeError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}: "
            + "incompatible shapes"
        )
    b_rows = [b.row(k) for k in range(b.rows)]
    entries = []
    for i in range(a.rows):
        acc = [0] * b.cols
        for k, aik in enumerate(a.row(i)):
            if not aik:
                continue
            for j, bkj in enumerate(b_rows[k]):
                if bkj:
                    acc[j] += aik * bkj
        entries.extend(normalize(x) for x in acc)
    return MatQ(a.rows, b.cols, entries)


def vec_mul(v, m):
    """Returns the row vector ``v * m`` as a tuple"""
    if len(v) != m.rows:
        raise ShapeError(f"cannot multiply a {len(v)}-vector by {m.rows}x{m.cols}")
    acc = [0] * m.cols
    for k, vk in enumerate(v):
        if not vk:
            continue
        for j, mkj in enumerate(m.row(k)):
            if mkj:
                acc[j] += vk * mkj
    return tuple(normalize(x) for x in acc)


def _rows_mod(m, p):
    rows = []
    for i in range(m.rows):
        row = []
        for e in m.row(i):
            if isinstance(e, int):
                row.append(e % p)
            else:
                if e.denominator % p == 0:
                    raise PrimeDivisorError(
                        f"prime {p} divides the denominator of entry {e}; "
                        + "draw another prime"
                    )
                row.append(e.numerator * pow(e.denominator, -1, p) % p)
        rows.append(row)
    return rows


def _rank_mod_p(rows, ncols, p):
    nrows = len(rows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        pivot_row = [x * inv % p for x in rows[r]]
        rows[r] = pivot_row
        for i in range(r + 1, nrows):
            factor = rows[i][c]
            if factor:
                rows[i] = [(x - factor * y) % p for x, y in zip(rows[i], pivot_row)]
        r += 1
    return r


def draw_primes(count=MODULAR_PRIME_COUNT, seed=DEFAULT_SEED):
    """Draws ``count`` distinct primes above ``PRIME_LOWER_BOUND``

    The same seed always yields the same primes.

    :returns: sorted tuple of primes

    """
    rng = random.Random(seed)
    primes = set()
    while len(primes) < count:
        start = rng.randrange(PRIME_LOWER_BOUND, 2 * PRIME_LOWER_BOUND)
        primes.add(int(nextprime(start)))
    return tuple(sorted(primes))


def rank_modular(m, primes):
    """Returns the rank of ``m`` reduced modulo each prime, certified

    The rank modulo a prime never exceeds the rational rank, and equals it
    unless the prime divides one of finitely many minors.

    :arg MatQ m: the matrix

    :arg list primes: at least ``MODULAR_PRIME_COUNT`` distinct primes,
        each larger than ``PRIME_LOWER_BOUND``

    :returns: RankCertificate with method ``"modular"``

    :raises PrimeDivisorError: if a prime divides an entry denominator

    :raises ModularRankDisagreement: if the primes disagree on the rank

    """
    primes = tuple(primes)
    if len(set(primes)) != len(primes) or len(primes) < MODULAR_PRIME_COUNT:
        raise ValueError(
            f"need at least {MODULAR_PRIME_COUNT} distinct primes, got {primes}"
        )
    for p in primes:
        if p <= PRIME_LOWER_BOUND or not isprime(p):
            raise ValueError(f"{p} is not a prime larger than {PRIME_LOWER_BOUND}")

    ranks = [_rank_mod_p(_rows_mod(m, p), m.cols, p) for p in primes]
    if len(set(ranks)) != 1:
        detail = ", ".join(f"{p}: {r}" for p, r in zip(primes, ranks))
        raise ModularRankDisagreement(f"modular ranks disagree ({detail})")
    return RankCertificate(ranks[0], METHOD_MODULAR, primes)


def rank(m, mode=None, seed=DEFAULT_SEED, verify=False):
    """Returns a :py:class:`RankCertificate` for ``m``

    :arg MatQ m: the matrix

    :arg str mode: ``"exact"``, ``"modular"`` or None to pick exact for
        matrices with at most ``EXACT_ROW_LIMIT`` rows

    :arg int seed: seed for drawing primes in modular mode

    :arg bool verify: in modular mode, also run the exact rank and raise
        ``ModularRankDisagreement`` if they differ

    """
    if mode is None:
        mode = METHOD_EXACT if m.rows <= EXACT_ROW_LIMIT else METHOD_MODULAR

    if mode == METHOD_EXACT:
        return RankCertificate(rank_exact(m))
    if mode != METHOD_MODULAR:
        raise ValueError(f"unknown rank mode {mode!r}")

    while True:
        try:
            cert = rank_modular(m, draw_primes(seed=seed))
            break
        except PrimeDivisorError:
            seed += 1

    if verify:
        exact = rank_exact(m)
        if exact != cert.rank:
            raise ModularRankDisagreement(
                f"modular rank {cert.rank} differs from exact rank {exact}"
            )
        cert.verified = True
    else:
        warnings.warn(
            f"rank {cert.rank} certified modulo {len(cert.primes)} primes only",
            category=ModularRankWarning,
        )
    return cert


def interchange_dict(
    mat, kind, weight, depth, level=None, row_index=(), col_index=()
):
    """Builds the JSON interchange object for a matrix

    :returns: dict with keys ``kind``, ``weight``, ``depth``, ``level``,
        ``row_index``, ``col_index`` and ``entries`` (row-major ``"p/q"``
        strings)

    """
    row_index = [list(t) for t in row_index]
    col_index = [list(t) for t in col_index]
    if len(row_index) != mat.rows or len(col_index) != mat.cols:
        raise ShapeError("index lists do not match the matrix shape")
    return {
        "kind": kind,
        "weight": weight,
        "depth": depth,
        "level": level,
        "row_index": row_index,
        "col_index": col_index,
        "entries": [format_rational(e) for e in mat.entries],
    }


def matrix_from_interchange(data):
    """Reads back the matrix of an interchange object"""
    rows = len(data["row_index"])
    cols = len(data["col_index"])
    return MatQ(rows, cols, [to_rational(e) for e in data["entries"]])
