"""Tasaka's matrices and the polynomial spaces they are compared against.

Every matrix here is square, indexed on both sides by the
:py:class:`~mdlie.liealg.IndexSet` of its weight and depth, and acts on
row vectors from the right.

"""

from collections import Counter
from functools import lru_cache
import logging
from math import comb

from mdlie.exactlin import (
    MatQ,
    format_rational,
    interchange_dict,
    left_kernel_basis,
    mat_mul,
    normalize,
    rank_exact,
    reduce_basis,
    vec_mul,
)
from mdlie.liealg import chain_coefficient, compose_sigma_chain, enumerate_index_set


log = logging.getLogger(__name__)


#: Matrix kinds
KIND_E = "E"
KIND_C = "C"
KIND_ETA_TILDE = "EtaTilde"

#: Number of matrices built in this process, by kind
BUILD_STATS = Counter()


class StrayMonomialError(ValueError):
    pass


class PeriodSpanError(ValueError):
    pass


def _binom(n, k):
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def b_coeff(m, n, n2):
    """Returns ``(-1)^n C(m-1, n-1) + (-1)^(n2-m) C(m-1, n2-1)``

    Binomial coefficients outside their range are 0.

    """
    return (-1) ** n * _binom(m - 1, n - 1) + (-1) ** ((n2 - m) % 2) * _binom(
        m - 1, n2 - 1
    )


@lru_cache(maxsize=None)
def _e_entry(m, n):
    value = 1 if m == n else 0
    for i in range(1, len(m)):
        if m[1:i] + m[i + 1 :] == n[: i - 1] + n[i + 1 :]:
            value += b_coeff(m[0], n[i - 1], n[i])
    return value


def e_entry(m, n):
    """Returns the entry ``e(m; n)`` of Tasaka's matrix ``E``

    ``e(m; n) = delta(m, n) + sum_{i=1..r-1} delta(m_2..m_i, m_{i+2}..m_r;
    n_1..n_{i-1}, n_{i+2}..n_r) * b(m_1; n_i, n_{i+1})``

    :arg tuple m: row index tuple

    :arg tuple n: column index tuple of the same length

    :raises ValueError: if the tuples differ in length

    """
    m = tuple(m)
    n = tuple(n)
    if len(m) != len(n):
        raise ValueError(f"index tuples {m} and {n} differ in length")
    return _e_entry(m, n)


class TasakaMatrix:
    """A matrix over ``S_{N,r}`` tagged with its weight, depth and kind"""

    __slots__ = ("weight", "depth", "kind", "level", "mat", "index")

    def __init__(self, weight, depth, kind, mat, index, level=None):
        if mat.rows != len(index) or mat.cols != len(index):
            raise ValueError(
                f"{kind} matrix of shape {mat.rows}x{mat.cols} "
                + f"does not match |S_{weight},{depth}| = {len(index)}"
            )
        self.weight = weight
        self.depth = depth
        self.kind = kind
        self.level = level
        self.mat = mat
        self.index = index

    def __repr__(self):
        level = "" if self.level is None else f"({self.level})"
        return f"<TasakaMatrix {self.kind}{level}_{self.weight},{self.depth}>"

    def to_interchange(self):
        return interchange_dict(
            self.mat,
            self.kind,
            self.weight,
            self.depth,
            level=self.level,
            row_index=self.index.tuples,
            col_index=self.index.tuples,
        )


def _block_matrix(index, leading):
    # delta on the first ``leading`` parts, e on the rest
    entries = []
    for m in index:
        for n in index:
            if m[:leading] != n[:leading]:
                entries.append(0)
            else:
                entries.append(_e_entry(m[leading:], n[leading:]))
    return MatQ(len(index), len(index), entries)


def build_E(N, r, k=None):
    """Builds ``E^(k)_{N,r}``

    Level ``k`` fixes the first ``r - k`` parts of row and column indices
    (a Kronecker delta) and evaluates ``e`` on the remaining ``k`` parts.
    ``build_E(N, r, r)`` is ``E_{N,r}``.

    :arg int N: weight

    :arg int r: depth, at least 2

    :arg int k: level in ``2..r``; defaults to ``r``

    :returns: TasakaMatrix

    :raises ValueError: if the level is out of range

    """
    if k is None:
        k = r
    if not 2 <= k <= r:
        raise ValueError(f"level {k} out of range 2..{r} for depth {r}")
    return _build_E(N, r, k)


@lru_cache(maxsize=None)
def _build_E(N, r, k):
    index = enumerate_index_set(N, r)
    BUILD_STATS[KIND_E] += 1
    log.debug("building E(%d)_%d,%d over %d indices", k, N, r, len(index))
    return TasakaMatrix(N, r, KIND_E, _block_matrix(index, r - k), index, level=k)


@lru_cache(maxsize=None)
def build_C(N, r):
    """Builds ``C_{N,r} = E^(2)_{N,r} E^(3)_{N,r} ... E_{N,r}``

    Depth 1 gives the identity on ``S_{N,1}`` and depth 2 gives
    ``E_{N,2}``. An empty index set gives the 0x0 matrix.

    :raises ValueError: for depth below 1

    """
    if r < 1:
        raise ValueError(f"depth must be at least 1, not {r}")
    index = enumerate_index_set(N, r)
    BUILD_STATS[KIND_C] += 1
    log.debug("building C_%d,%d over %d indices", N, r, len(index))
    if r == 1 or not index:
        return TasakaMatrix(N, r, KIND_C, MatQ.identity(len(index)), index)
    product = build_E(N, r, 2).mat
    for k in range(3, r + 1):
        product = mat_mul(product, build_E(N, r, k).mat)
    return TasakaMatrix(N, r, KIND_C, product, index)


@lru_cache(maxsize=None)
def build_partial_product(N, r):
    """Builds ``E^(2)_{N,r} ... E^(r-1)_{N,r}``, the identity at depth 2"""
    if r < 2:
        raise ValueError(f"depth must be at least 2, not {r}")
    index = enumerate_index_set(N, r)
    product = MatQ.identity(len(index))
    for k in range(2, r):
        product = mat_mul(product, build_E(N, r, k).mat)
    return product


@lru_cache(maxsize=None)
def build_eta_tilde(N, r):
    """Builds the matrix with entries ``delta(m_1; n_1) e(m_2..m_r; n_2..n_r)``

    At depth 2 this is the identity; above it equals ``E^(r-1)_{N,r}``.

    """
    if r < 2:
        raise ValueError(f"depth must be at least 2, not {r}")
    index = enumerate_index_set(N, r)
    BUILD_STATS[KIND_ETA_TILDE] += 1
    log.debug("building EtaTilde_%d,%d over %d indices", N, r, len(index))
    return TasakaMatrix(N, r, KIND_ETA_TILDE, _block_matrix(index, 1), index)


def clear_caches():
    """Drops every memoized matrix and chain"""
    for fn in (
        _e_entry,
        _build_E,
        build_C,
        build_partial_product,
        build_eta_tilde,
        period_basis,
        w_basis,
        chain_coefficient_matrix,
        compose_sigma_chain,
    ):
        fn.cache_clear()


class CoeffVector:
    """Row vector with one rational per tuple of ``S_{N,r}``"""

    __slots__ = ("index", "coords")

    def __init__(self, index, coords):
        coords = tuple(coords)
        if len(coords) != len(index):
            raise ValueError(
                f"vector of length {len(coords)} for |S_{index.weight},{index.depth}| "
                + f"= {len(index)}"
            )
        self.index = index
        self.coords = coords

    @classmethod
    def zero(cls, N, r):
        index = enumerate_index_set(N, r)
        return cls(index, [0] * len(index))

    @property
    def weight(self):
        return self.index.weight

    @property
    def depth(self):
        return self.index.depth

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, CoeffVector):
            return NotImplemented
        return self.index == other.index and self.coords == other.coords

    def __add__(self, other):
        if self.index != other.index:
            raise ValueError("vectors live over different index sets")
        return CoeffVector(
            self.index, [normalize(a + b) for a, b in zip(self.coords, other.coords)]
        )

    def __repr__(self):
        return f"<CoeffVector S_{self.weight},{self.depth} {self.coords}>"

    def to_json(self):
        return {
            label: format_rational(c)
            for label, c in zip(self.index.labels(), self.coords)
            if c
        }


class BivarPolySpace:
    """Span of homogeneous polynomials in ``x1, x2`` of degree ``weight - 2``

    ``monomials`` lists the ambient exponent pairs in the coordinate order
    of ``basis``.

    """

    __slots__ = ("weight", "monomials", "basis")

    def __init__(self, weight, monomials, basis):
        self.weight = weight
        self.monomials = tuple(monomials)
        self.basis = basis

    @property
    def dimension(self):
        return self.basis.dimension

    def polynomials(self):
        """Returns each basis element as ``{(a, b): coefficient}``"""
        return [
            {mono: c for mono, c in zip(self.monomials, v) if c} for v in self.basis
        ]

    def to_json(self):
        labels = [f"{a},{b}" for a, b in self.monomials]
        return {"weight": self.weight, "basis": self.basis.as_dicts(labels)}


class MultivarPolySpace:
    """Subspace of the span of ``x1^(n1-1) ... xr^(nr-1)`` over ``S_{N,r}``

    ``basis`` holds coordinate vectors in the order of ``index``; a
    coordinate vector is the image of its polynomial under ``pi``.

    """

    __slots__ = ("index", "basis")

    def __init__(self, index, basis):
        self.index = index
        self.basis = basis

    @property
    def weight(self):
        return self.index.weight

    @property
    def depth(self):
        return self.index.depth

    @property
    def dimension(self):
        return self.basis.dimension

    def polynomials(self):
        """Returns each basis element as ``{exponent tuple: coefficient}``"""
        return [
            {tuple(k - 1 for k in t): c for t, c in zip(self.index, v) if c}
            for v in self.basis
        ]

    def coeff_vectors(self):
        return [CoeffVector(self.index, v) for v in self.basis]

    def to_json(self):
        return {
            "weight": self.weight,
            "depth": self.depth,
            "basis": self.basis.as_dicts(self.index.labels()),
        }


def _substitution_rows(domain, expand):
    """Builds the matrix of a linear operator on polynomials

    ``expand`` maps an exponent tuple to ``{exponent tuple: coefficient}``,
    the image of that monomial. Columns are the image monomials, sorted.

    """
    images = [expand(mono) for mono in domain]
    columns = sorted({mono for image in images for mono in image})
    position = {mono: k for k, mono in enumerate(columns)}
    rows = []
    for image in images:
        row = [0] * len(columns)
        for mono, c in image.items():
            row[position[mono]] += c
        rows.append(row)
    return MatQ.from_rows(rows, cols=len(columns))


def _period_relation(mono):
    # p(x1, x2) + p(x1 - x2, x1) - p(x1 - x2, x2) on x1^a x2^b
    a, b = mono
    image = Counter({(a, b): 1})
    for k in range(a + 1):
        c = comb(a, k) * (-1) ** (a - k)
        image[(k + b, a - k)] += c
        image[(k, a - k + b)] -= c
    return {m: c for m, c in image.items() if c}


@lru_cache(maxsize=None)
def period_basis(N):
    """Returns the space of restricted even period polynomials of weight ``N``

    These are the homogeneous ``p(x1, x2)`` of degree ``N - 2`` with
    ``p(x1, 0) = 0``, even in each variable, and satisfying
    ``p(x1, x2) + p(x1 - x2, x1) - p(x1 - x2, x2) = 0``.

    The basis is in reduced echelon form with monomials ordered by
    descending power of ``x1``.

    :arg int N: weight, at least 3

    :returns: BivarPolySpace

    :raises PeriodSpanError: if a solution leaves the span of
        ``x1^(n1-1) x2^(n2-1)`` with ``n1, n2 >= 3`` odd

    """
    if N < 3:
        raise ValueError(f"weight must be at least 3, not {N}")
    degree = N - 2
    monomials = [
        (a, degree - a)
        for a in range(degree, -1, -1)
        if a % 2 == 0 and (degree - a) % 2 == 0 and degree - a >= 2
    ]
    if not monomials:
        return BivarPolySpace(N, [], reduce_basis([], 0))
    relation = _substitution_rows(monomials, _period_relation)
    basis = left_kernel_basis(relation)
    space = BivarPolySpace(N, monomials, basis)
    for poly in space.polynomials():
        for a, b in poly:
            if a < 2:
                raise PeriodSpanError(
                    f"period polynomial of weight {N} has monomial x1^{a} x2^{b}"
                )
    log.debug("period space of weight %d has dimension %d", N, space.dimension)
    return space


def period_dimension(N):
    """``dim P_N``, zero below weight 3 or for odd weight"""
    if N < 3 or N % 2:
        return 0
    return period_basis(N).dimension


def _w_relation(mono):
    # p - p(x2 - x1, x2, ...) + p(x2 - x1, x1, ...) on x^mono
    a1, a2 = mono[0], mono[1]
    rest = tuple(mono[2:])
    image = Counter({tuple(mono): 1})
    for k in range(a1 + 1):
        c = comb(a1, k) * (-1) ** (a1 - k)
        image[(a1 - k, a2 + k) + rest] -= c
        image[(a1 - k + a2, k) + rest] += c
    return {m: c for m, c in image.items() if c}


@lru_cache(maxsize=None)
def w_basis(N, r):
    """Returns ``W_{N,r}`` as coordinate vectors over ``S_{N,r}``

    ``W_{N,r}`` holds the ``p`` in the span of ``x1^(n1-1) ... xr^(nr-1)``
    with ``p(x1, ..., xr) = p(x2 - x1, x2, x3, ...) - p(x2 - x1, x1, x3, ...)``.
    The relation is solved in the full polynomial ring.

    :arg int N: weight

    :arg int r: depth, at least 2

    :returns: MultivarPolySpace

    """
    if r < 2:
        raise ValueError(f"depth must be at least 2, not {r}")
    index = enumerate_index_set(N, r)
    if not index:
        return MultivarPolySpace(index, reduce_basis([], 0))
    domain = [tuple(k - 1 for k in t) for t in index]
    relation = _substitution_rows(domain, _w_relation)
    return MultivarPolySpace(index, left_kernel_basis(relation))


def pi_coords(poly, N, r):
    """Reads off coefficients of ``x1^(n1-1) ... xr^(nr-1)``

    :arg dict poly: map from exponent tuples to coefficients

    :returns: CoeffVector over ``S_{N,r}``

    :raises StrayMonomialError: for a monomial outside the span

    """
    index = enumerate_index_set(N, r)
    coords = [0] * len(index)
    for exps, c in poly.items():
        if not c:
            continue
        t = tuple(a + 1 for a in exps)
        if t not in index:
            mono = " ".join(f"x{k + 1}^{a}" for k, a in enumerate(exps))
            raise StrayMonomialError(
                f"monomial {mono} is not in the span of S_{N},{r}"
            )
        coords[index.position(t)] += c
    return CoeffVector(index, coords)


def eta(a):
    """Returns ``a (E_{N,r} - I)``

    :arg CoeffVector a: vector over ``S_{N,r}``, depth at least 2

    """
    if not a.index:
        return a
    mat = build_E(a.weight, a.depth).mat
    image = vec_mul(a.coords, mat)
    return CoeffVector(a.index, [x - y for x, y in zip(image, a.coords)])


def eta_tilde(a):
    """Returns ``a`` times :py:func:`build_eta_tilde`"""
    if not a.index:
        return a
    mat = build_eta_tilde(a.weight, a.depth).mat
    return CoeffVector(a.index, vec_mul(a.coords, mat))


class TasakaResult:
    """Outcome of :py:func:`verify_tasaka` at one weight and depth

    ``inclusion_ok``, ``eta_tilde_inclusion_ok`` and ``eta_sum_zero`` hold
    by theorem; ``injective`` is proven at depth 3; ``surjective`` is open.
    ``witnesses`` holds the offending vectors of any failed statement.

    """

    def __init__(self, weight, depth, dim_w, dim_kernel, dim_image):
        self.weight = weight
        self.depth = depth
        self.dim_w = dim_w
        self.dim_kernel = dim_kernel
        self.dim_image = dim_image
        self.inclusion_ok = True
        self.eta_tilde_inclusion_ok = True
        self.eta_sum_zero = True
        self.witnesses = {}

    @property
    def injective(self):
        return self.dim_image == self.dim_w

    @property
    def surjective(self):
        return self.dim_image == self.dim_kernel

    def to_json(self):
        return {
            "weight": self.weight,
            "depth": self.depth,
            "dim_w": self.dim_w,
            "dim_kernel": self.dim_kernel,
            "dim_image": self.dim_image,
            "inclusion_ok": self.inclusion_ok,
            "eta_tilde_inclusion_ok": self.eta_tilde_inclusion_ok,
            "eta_sum_zero": self.eta_sum_zero,
            "injective": self.injective,
            "surjective": self.surjective,
            "witnesses": self.witnesses,
        }


def _witness(key, result, vector):
    result.witnesses.setdefault(key, []).append(vector.to_json())


def verify_tasaka(N, r):
    """Tests whether ``eta`` maps ``pi(W_{N,r})`` isomorphically onto ``Ker E_{N,r}``

    Also checks that ``eta_tilde`` lands in ``Ker E_{N,r}`` and that
    ``eta_tilde(a) + eta(a) = 0`` on ``pi(W_{N,r})``. Failures are recorded
    in the result, never raised.

    :arg int N: weight

    :arg int r: depth, at least 2

    :returns: TasakaResult

    """
    if r < 2:
        raise ValueError(f"depth must be at least 2, not {r}")
    index = enumerate_index_set(N, r)
    if not index:
        return TasakaResult(N, r, 0, 0, 0)

    e_mat = build_E(N, r).mat
    vectors = w_basis(N, r).coeff_vectors()
    images = [eta(a) for a in vectors]
    dim_image = rank_exact(MatQ.from_rows([v.coords for v in images], cols=len(index)))
    dim_kernel = len(index) - rank_exact(e_mat)
    result = TasakaResult(N, r, len(vectors), dim_kernel, dim_image)

    for a, image in zip(vectors, images):
        if any(vec_mul(image.coords, e_mat)):
            result.inclusion_ok = False
            _witness("inclusion", result, a)
        tilde = eta_tilde(a)
        if any(vec_mul(tilde.coords, e_mat)):
            result.eta_tilde_inclusion_ok = False
            _witness("eta_tilde_inclusion", result, a)
        if tilde + image:
            result.eta_sum_zero = False
            _witness("eta_sum", result, a)

    log.debug(
        "tasaka %d,%d: dim W %d, dim image %d, dim ker %d",
        N,
        r,
        result.dim_w,
        result.dim_image,
        result.dim_kernel,
    )
    return result


@lru_cache(maxsize=None)
def chain_coefficient_matrix(N, r):
    """Coefficient of ``y1^(n1-1) ... yr^(nr-1)`` in the chain of ``m``, per ``(m, n)``"""
    index = enumerate_index_set(N, r)
    entries = []
    for m in index:
        chain = compose_sigma_chain(m)
        entries.extend(chain_coefficient(chain, n) for n in index)
    return MatQ(len(index), len(index), entries)


def crosscheck(N, r):
    """Whether :py:func:`chain_coefficient_matrix` equals ``C_{N,r}``"""
    return chain_coefficient_matrix(N, r) == build_C(N, r).mat
