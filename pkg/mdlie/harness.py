"""Verification harness: generating series, rank tables and reported checks.

Every check carries a status. ``proven-pass`` and ``conjectural-pass``
mean the computed numbers agree with the statement; ``FAIL`` means they
do not, and the check carries a witness. Only a failed proven check is
an error; a failed conjectural check is a finding.

"""

from concurrent.futures import ProcessPoolExecutor
import csv
from fractions import Fraction
from functools import lru_cache, partial
import io
import logging

from mdlie import exactlin
from mdlie.exactlin import (
    RankCertificate,
    left_kernel_basis,
    normalize,
    rank_exact,
    row_space_basis,
)
from mdlie.liealg import enumerate_index_set
from mdlie.tasaka import (
    build_C,
    build_E,
    build_partial_product,
    crosscheck,
    period_dimension,
    verify_tasaka,
)


log = logging.getLogger(__name__)


#: Check statuses
PROVEN_PASS = "proven-pass"
CONJECTURAL_PASS = "conjectural-pass"
FAIL = "FAIL"

#: Comparison of a rank with its series coefficient
EQUAL = "equal"
GREATER = "greater"
SMALLER = "smaller"

#: Lowest weight carrying a period polynomial
FIRST_CUSP_WEIGHT = 12


class MissingEntryError(KeyError):
    pass


class Series2:
    """Bivariate power series in ``x`` and ``y``, truncated at ``x_max, y_max``

    Coefficients are exact; terms of higher degree are dropped after every
    operation.

    """

    __slots__ = ("x_max", "y_max", "coeffs")

    def __init__(self, x_max, y_max, coeffs=None):
        if x_max < 0 or y_max < 0:
            raise ValueError(f"truncation orders must be nonnegative: {x_max}, {y_max}")
        self.x_max = x_max
        self.y_max = y_max
        self.coeffs = {}
        for (i, j), c in (coeffs or {}).items():
            c = exactlin.to_rational(c)
            if c and i <= x_max and j <= y_max:
                self.coeffs[(i, j)] = c

    @classmethod
    def one(cls, x_max, y_max):
        return cls(x_max, y_max, {(0, 0): 1})

    @classmethod
    def in_x(cls, coeffs, x_max, y_max, y_degree=0):
        """Series ``y^y_degree * sum_i coeffs[i] x^i``"""
        return cls(x_max, y_max, {(i, y_degree): c for i, c in enumerate(coeffs)})

    def __getitem__(self, index):
        return self.coeffs.get(index, 0)

    def __eq__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        return (self.x_max, self.y_max, self.coeffs) == (
            other.x_max,
            other.y_max,
            other.coeffs,
        )

    def __repr__(self):
        return f"<Series2 O(x^{self.x_max + 1}, y^{self.y_max + 1})>"

    def _orders(self, other):
        return min(self.x_max, other.x_max), min(self.y_max, other.y_max)

    def __add__(self, other):
        x_max, y_max = self._orders(other)
        coeffs = dict(self.coeffs)
        for key, c in other.coeffs.items():
            coeffs[key] = normalize(coeffs.get(key, 0) + c)
        return Series2(x_max, y_max, coeffs)

    def __neg__(self):
        return Series2(self.x_max, self.y_max, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        x_max, y_max = self._orders(other)
        coeffs = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                i, j = i1 + i2, j1 + j2
                if i <= x_max and j <= y_max:
                    coeffs[(i, j)] = coeffs.get((i, j), 0) + c1 * c2
        return Series2(x_max, y_max, {k: normalize(c) for k, c in coeffs.items()})

    def reciprocal(self):
        """Returns ``1 / self``

        :raises ZeroDivisionError: if the constant term is zero

        """
        c0 = self[0, 0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        inv0 = Fraction(1) / c0
        result = {}
        for i in range(self.x_max + 1):
            for j in range(self.y_max + 1):
                if (i, j) == (0, 0):
                    acc = 1
                else:
                    acc = 0
                    for (k, l), a in self.coeffs.items():
                        if (k, l) != (0, 0) and k <= i and l <= j:
                            acc -= a * result.get((i - k, j - l), 0)
                if acc:
                    result[(i, j)] = normalize(acc * inv0)
        return Series2(self.x_max, self.y_max, result)


def odd_series(x_max, y_max=0):
    """``O(x) = x^3 / (1 - x^2)``"""
    return Series2.in_x(
        [1 if i >= 3 and i % 2 else 0 for i in range(x_max + 1)], x_max, y_max
    )


def cusp_series(x_max, y_max=0):
    """``S(x) = x^12 / ((1 - x^4)(1 - x^6))``"""
    numerator = Series2(x_max, y_max, {(FIRST_CUSP_WEIGHT, 0): 1})
    one = Series2.one(x_max, y_max)
    x4 = Series2(x_max, y_max, {(4, 0): 1})
    x6 = Series2(x_max, y_max, {(6, 0): 1})
    return numerator * (one - x4).reciprocal() * (one - x6).reciprocal()


@lru_cache(maxsize=None)
def cusp_coefficient(m):
    """``[x^m] S(x)``, the number of ``4a + 6b = m - 12``"""
    if m < FIRST_CUSP_WEIGHT or m % 2:
        return 0
    rest = m - FIRST_CUSP_WEIGHT
    return sum(1 for b in range(rest // 6 + 1) if (rest - 6 * b) % 4 == 0)


def hilbert_denominator(x_max, y_max):
    """``1 - O(x) y + S(x) y^2``"""
    y = Series2(x_max, y_max, {(0, 1): 1})
    return (
        Series2.one(x_max, y_max)
        - odd_series(x_max, y_max) * y
        + cusp_series(x_max, y_max) * y * y
    )


def hilbert_target(x_max, y_max):
    """Returns ``1 / (1 - O(x) y + S(x) y^2)`` truncated at ``x^x_max, y^y_max``

    The coefficient of ``x^N y^r`` is the conjectured dimension of the
    depth-graded Lie algebra in weight ``N`` and depth ``r``.

    :arg int x_max: highest power of x kept, at least 1

    :arg int y_max: highest power of y kept, at least 1

    :returns: Series2

    """
    if x_max < 1 or y_max < 1:
        raise ValueError(f"truncation orders must be positive: {x_max}, {y_max}")
    return hilbert_denominator(x_max, y_max).reciprocal()


class RankEntry:
    __slots__ = ("size", "certificate")

    def __init__(self, size, certificate):
        if certificate.rank > size:
            raise ValueError(f"rank {certificate.rank} exceeds size {size}")
        self.size = size
        self.certificate = certificate

    @property
    def rank(self):
        return self.certificate.rank

    def to_json(self):
        data = {"size": self.size}
        data.update(self.certificate.to_json())
        return data

    @classmethod
    def from_json(cls, data):
        return cls(data["size"], RankCertificate.from_json(data))


class RankTable:
    """Ranks of ``C_{N,r}`` over a range of weights and depths

    Only cells with a nonempty index set carry entries. :py:meth:`rank`
    also answers for depths 0 and 1 and for empty index sets.

    """

    def __init__(self, weight_max, depth_max, entries=None):
        self.weight_max = weight_max
        self.depth_max = depth_max
        self.entries = dict(entries or {})

    def __repr__(self):
        return f"<RankTable N<={self.weight_max} r<={self.depth_max}>"

    def __contains__(self, cell):
        return cell in self.entries

    def cells(self):
        return sorted(self.entries)

    def size(self, N, r):
        if N < 0 or r < 0:
            return 0
        return len(enumerate_index_set(N, r))

    def rank(self, N, r):
        """Returns ``rank C_{N,r}``

        By convention ``rank C_{0,0} = 1`` and ``rank C_{N,1} = 1`` for odd
        ``N >= 3``; an empty index set has rank 0.

        :raises MissingEntryError: if the cell has no entry

        """
        if r == 0:
            return 1 if N == 0 else 0
        if self.size(N, r) == 0:
            return 0
        if r == 1:
            return 1
        try:
            return self.entries[(N, r)].rank
        except KeyError:
            raise MissingEntryError(f"rank table has no entry for (N, r) = ({N}, {r})")

    def require(self, cells):
        """Raises :py:class:`MissingEntryError` naming every cell not answerable"""
        missing = []
        for N, r in cells:
            if r >= 2 and self.size(N, r) and (N, r) not in self.entries:
                missing.append((N, r))
        if missing:
            listed = ", ".join(f"({N}, {r})" for N, r in sorted(set(missing)))
            raise MissingEntryError(f"rank table has no entries for {listed}")

    def to_json(self):
        return {
            "weight_max": self.weight_max,
            "depth_max": self.depth_max,
            "entries": [
                dict(weight=N, depth=r, **self.entries[(N, r)].to_json())
                for N, r in self.cells()
            ],
        }

    def to_csv(self, target=None):
        """Returns CSV with columns N, r, size, rank, method, status

        ``status`` compares the rank with the coefficient of
        :py:func:`hilbert_target`.

        """
        if target is None:
            target = hilbert_target(max(self.weight_max, 1), max(self.depth_max, 1))
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["N", "r", "size", "rank", "method", "status"])
        for N, r in self.cells():
            entry = self.entries[(N, r)]
            writer.writerow(
                [
                    N,
                    r,
                    entry.size,
                    entry.rank,
                    entry.certificate.method,
                    compare(entry.rank, target[N, r]),
                ]
            )
        return out.getvalue()


def compare(rank, coefficient):
    if rank == coefficient:
        return EQUAL
    return GREATER if rank > coefficient else SMALLER


def _method_for(size, mode):
    if mode is not None:
        return mode
    if size <= exactlin.EXACT_ROW_LIMIT:
        return exactlin.METHOD_EXACT
    return exactlin.METHOD_MODULAR


def _cache_kind(method, seed):
    if method == exactlin.METHOD_MODULAR:
        return f"rank-modular-{seed}"
    return "rank-exact"


def _rank_cell(N, r, method, seed, verify):
    mat = build_C(N, r).mat
    return exactlin.rank(mat, mode=method, seed=seed, verify=verify).to_json()


def rank_entry(
    N, r, mode=None, seed=exactlin.DEFAULT_SEED, verify=False, cache=None
):
    """Returns the :py:class:`RankEntry` of one cell, or None if ``S_{N,r}`` is empty"""
    size = len(enumerate_index_set(N, r))
    if not size:
        return None
    method = _method_for(size, mode)

    def compute():
        return {"size": size, **_rank_cell(N, r, method, seed, verify)}

    if cache is None:
        return RankEntry.from_json(compute())
    kind = _cache_kind(method, seed)
    payload = _cached_rank(cache, kind, N, r, verify)
    if payload is None:
        payload = compute()
        cache.put(kind, N, r, payload)
    return RankEntry.from_json(payload)


def _cached_rank(cache, kind, N, r, verify):
    """Returns a cached rank payload, or None if absent or not verified enough"""
    payload = cache.get(kind, N, r)
    if payload is None:
        return None
    if not RankCertificate.from_json(payload).satisfies(verify):
        log.debug("cached rank %d,%d is unverified; recomputing", N, r)
        return None
    return payload


def rank_table(
    weight_max,
    depth_max,
    mode=None,
    seed=exactlin.DEFAULT_SEED,
    verify=False,
    cache=None,
    jobs=1,
):
    """Computes ``rank C_{N,r}`` for every nonempty ``S_{N,r}`` in range

    :arg int weight_max: largest weight N

    :arg int depth_max: largest depth r

    :arg str mode: ``"exact"``, ``"modular"`` or None for the size-based
        choice of :py:func:`mdlie.exactlin.rank`

    :arg int seed: prime seed for modular ranks

    :arg bool verify: verify modular ranks exactly

    :arg ResultCache cache: persistent cache, or None

    :arg int jobs: number of worker processes for uncached cells

    :returns: RankTable

    :raises ModularRankDisagreement: propagated from modular ranks

    """
    cells = []
    for N in range(weight_max + 1):
        for r in range(1, depth_max + 1):
            size = len(enumerate_index_set(N, r))
            if size:
                cells.append((N, r, size, _method_for(size, mode)))

    results = {}
    pending = []
    for N, r, size, method in cells:
        payload = None
        if cache is not None:
            payload = _cached_rank(cache, _cache_kind(method, seed), N, r, verify)
        if payload is None:
            pending.append((N, r, size, method))
        else:
            results[(N, r)] = payload

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                (N, r): pool.submit(_rank_cell, N, r, method, seed, verify)
                for N, r, _, method in pending
            }
            computed = {cell: future.result() for cell, future in futures.items()}
    else:
        computed = {
            (N, r): _rank_cell(N, r, method, seed, verify)
            for N, r, _, method in pending
        }

    for N, r, size, method in pending:
        cert = computed[(N, r)]
        payload = {"size": size, **cert}
        if cache is not None:
            cache.put(_cache_kind(method, seed), N, r, payload)
        results[(N, r)] = payload

    log.info(
        "rank table N<=%d r<=%d: %d cells, %d computed",
        weight_max,
        depth_max,
        len(cells),
        len(pending),
    )
    return RankTable(
        weight_max,
        depth_max,
        {cell: RankEntry.from_json(payload) for cell, payload in results.items()},
    )


class Check:
    """One verified statement with its status and evidence"""

    __slots__ = ("name", "anchor", "status", "proven", "details", "witness")

    def __init__(self, name, anchor, status, proven, details=None, witness=None):
        if status not in (PROVEN_PASS, CONJECTURAL_PASS, FAIL):
            raise ValueError(f"unknown status {status!r}")
        self.name = name
        self.anchor = anchor
        self.status = status
        self.proven = proven
        self.details = details or {}
        self.witness = witness

    @classmethod
    def evaluate(cls, name, anchor, ok, proven, details=None, witness=None):
        """Builds a check; ``witness`` is kept only when ``ok`` is false"""
        if ok:
            status = PROVEN_PASS if proven else CONJECTURAL_PASS
            witness = None
        else:
            status = FAIL
        return cls(name, anchor, status, proven, details, witness)

    @property
    def failed(self):
        return self.status == FAIL

    def __repr__(self):
        return f"<Check {self.name} {self.status}>"

    def to_json(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "status": self.status,
            "proven": self.proven,
            "details": self.details,
            "witness": self.witness,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["name"],
            data["anchor"],
            data["status"],
            data["proven"],
            data["details"],
            data["witness"],
        )


def _cached_checks(cache, kind, N, r, compute):
    """Runs ``compute()`` for one cell, or reads its checks back from ``cache``"""
    if cache is None:
        return compute()
    payload = cache.get_or_compute(
        kind, N, r, lambda: [check.to_json() for check in compute()]
    )
    return [Check.from_json(item) for item in payload]


def _matrix_witness(N, r, cache=None):
    """Interchange form of ``C_{N,r}``, read through ``cache`` when given"""
    if cache is None:
        return build_C(N, r).to_interchange()
    return cache.get_or_compute(
        "matrix-C", N, r, lambda: build_C(N, r).to_interchange()
    )


class VerificationReport:
    """Checks over a range of weights and depths, in a fixed order"""

    def __init__(self, title, weight_max, depth_max, checks=(), summary=None):
        self.title = title
        self.weight_max = weight_max
        self.depth_max = depth_max
        self.checks = list(checks)
        self.summary = dict(summary or {})

    def __repr__(self):
        return f"<VerificationReport {self.title} checks={len(self.checks)}>"

    def proven_failures(self):
        return [c for c in self.checks if c.failed and c.proven]

    def findings(self):
        return [c for c in self.checks if c.failed and not c.proven]

    @property
    def ok(self):
        return not self.proven_failures()

    def counts(self):
        counts = {PROVEN_PASS: 0, CONJECTURAL_PASS: 0, FAIL: 0}
        for check in self.checks:
            counts[check.status] += 1
        return counts

    def to_json(self):
        return {
            "title": self.title,
            "scope": {"weight_max": self.weight_max, "depth_max": self.depth_max},
            "counts": self.counts(),
            "summary": self.summary,
            "checks": [c.to_json() for c in self.checks],
        }

    def render_table(self):
        """Plain-text table, one line per check"""
        name_width = max([len("check")] + [len(c.name) for c in self.checks])
        status_width = max(len(s) for s in (PROVEN_PASS, CONJECTURAL_PASS, FAIL))
        lines = [
            f"{self.title} (N <= {self.weight_max}, r <= {self.depth_max})",
            f"{'check'.ljust(name_width)}  {'status'.ljust(status_width)}  anchor",
        ]
        for check in self.checks:
            lines.append(
                f"{check.name.ljust(name_width)}  "
                + f"{check.status.ljust(status_width)}  {check.anchor}"
            )
        counts = self.counts()
        lines.append(
            f"{counts[PROVEN_PASS]} proven, {counts[CONJECTURAL_PASS]} conjectural, "
            + f"{counts[FAIL]} failed"
        )
        for key, value in self.summary.items():
            lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"


def _odd_parts(N, r):
    """Weights ``m`` of the first part with ``S_{N-m,r-1}`` nonempty"""
    return [m for m in range(3, N + 1, 2) if len(enumerate_index_set(N - m, r - 1))]


def _even_parts(N, r):
    """Weights ``m`` of a period polynomial with ``S_{N-m,r-2}`` nonempty"""
    if r < 2:
        return []
    return [
        m
        for m in range(FIRST_CUSP_WEIGHT, N + 1, 2)
        if len(enumerate_index_set(N - m, r - 2))
    ]


def _recurrence_cells(N, r):
    cells = [(N, r)]
    cells += [(N - m, r - 1) for m in _odd_parts(N, r)]
    cells += [(N - m, r - 2) for m in _even_parts(N, r)]
    return cells


def sequence_dimensions(N, r, table):
    """Dimensions of ``P (x) L_{r-2} -> L_1 (x) L_{r-1} -> L_r`` in weight ``N``

    :raises MissingEntryError: if the table lacks a needed entry

    """
    table.require(_recurrence_cells(N, r))
    left = sum(
        cusp_coefficient(m) * table.rank(N - m, r - 2) for m in _even_parts(N, r)
    )
    middle = sum(table.rank(N - m, r - 1) for m in _odd_parts(N, r))
    right = table.rank(N, r)
    return {
        "left": left,
        "middle": middle,
        "right": right,
        "exact": middle == left + right,
    }


def recurrence_value(N, r, table):
    """``rank C_{N,r} - sum_m rank C_{N-m,r-1} + sum_m [x^m]S rank C_{N-m,r-2}``

    ``m`` runs over odd ``m >= 3`` in the first sum and even ``m >= 12`` in
    the second.

    """
    dims = sequence_dimensions(N, r, table)
    return dims["right"] - dims["middle"] + dims["left"]


def recurrence_check(N, r, table):
    """Checks the dimension recurrence at one cell

    Proven for depth at most 2; conjectural above.

    :raises MissingEntryError: if the table lacks a needed entry

    """
    value = recurrence_value(N, r, table)
    return Check.evaluate(
        f"recurrence[{N},{r}]",
        "dimension recurrence from 1 - O(x)y + S(x)y^2",
        value == 0,
        r <= 2,
        details={"value": value},
        witness={"weight": N, "depth": r, "value": value},
    )


def kernel_series_check(N, r, table):
    """Checks ``dim Ker C_{N,r} = sum Ker C_{N-m,r-1} + sum [x^m]S rank C_{N-m,r-2}``"""
    table.require(_recurrence_cells(N, r))

    def kernel(n, depth):
        return table.size(n, depth) - table.rank(n, depth)

    lhs = kernel(N, r)
    rhs = sum(kernel(N - m, r - 1) for m in _odd_parts(N, r))
    rhs += sum(
        cusp_coefficient(m) * table.rank(N - m, r - 2) for m in _even_parts(N, r)
    )
    return Check.evaluate(
        f"kernel-series[{N},{r}]",
        "kernel generating series of C",
        lhs == rhs,
        r <= 2,
        details={"kernel": lhs, "expected": rhs},
        witness={"weight": N, "depth": r, "kernel": lhs, "expected": rhs},
    )


def _intersection_dimension(a, b):
    if not a.dimension or not b.dimension:
        return 0
    return a.dimension + b.dimension - rank_exact(a.to_mat().stack(b.to_mat()))


def decomposition_check(N, r):
    """Checks the splitting of ``Ker C_{N,r}`` along ``C = P E``

    Here ``P = E^(2) ... E^(r-1)``. Returns three checks:

    * ``dim Ker C = dim Ker P + dim(Row P & Ker E)`` (linear algebra, proven);
    * ``dim Ker P = sum_m dim Ker C_{N-m,r-1}`` (block structure, proven);
    * ``dim(Row P & Ker E) = sum_m dim P_m rank C_{N-m,r-2}`` (conjectural).

    :arg int N: weight

    :arg int r: depth, at least 3

    :returns: list of Check

    """
    if r < 3:
        raise ValueError(f"depth must be at least 3, not {r}")
    size = len(enumerate_index_set(N, r))
    if size:
        partial = build_partial_product(N, r)
        e_mat = build_E(N, r).mat
        kernel_c = size - rank_exact(build_C(N, r).mat)
        kernel_p = size - rank_exact(partial)
        meet = _intersection_dimension(row_space_basis(partial), left_kernel_basis(e_mat))
    else:
        kernel_c = kernel_p = meet = 0

    blocks = 0
    for m in _odd_parts(N, r):
        sub = build_C(N - m, r - 1).mat
        blocks += sub.rows - rank_exact(sub)

    periodic = 0
    for m in _even_parts(N, r):
        dim_p = period_dimension(m)
        if dim_p:
            periodic += dim_p * rank_exact(build_C(N - m, r - 2).mat)

    cell = {"weight": N, "depth": r}
    return [
        Check.evaluate(
            f"decomposition-split[{N},{r}]",
            "kernel of a product splits along its last factor",
            kernel_c == kernel_p + meet,
            True,
            details={"ker_C": kernel_c, "ker_P": kernel_p, "row_P_meet_ker_E": meet},
            witness=dict(cell, ker_C=kernel_c, ker_P=kernel_p, meet=meet),
        ),
        Check.evaluate(
            f"decomposition-blocks[{N},{r}]",
            "block structure of E^(2) ... E^(r-1)",
            kernel_p == blocks,
            True,
            details={"ker_P": kernel_p, "sum_ker_C_lower": blocks},
            witness=dict(cell, ker_P=kernel_p, blocks=blocks),
        ),
        Check.evaluate(
            f"decomposition-periods[{N},{r}]",
            "period polynomials tensor image of C in depth r-2",
            meet == periodic,
            False,
            details={"row_P_meet_ker_E": meet, "sum_P_times_rank": periodic},
            witness=dict(cell, meet=meet, expected=periodic),
        ),
    ]


def tasaka_checks(N, r):
    """Checks for the map ``eta`` from ``pi(W_{N,r})`` to ``Ker E_{N,r}``"""
    result = verify_tasaka(N, r)
    details = result.to_json()
    details.pop("witnesses")
    cell = {"weight": N, "depth": r}
    witnesses = result.witnesses
    return [
        Check.evaluate(
            f"tasaka-inclusion[{N},{r}]",
            "eta maps W into the kernel of E",
            result.inclusion_ok,
            True,
            details,
            dict(cell, vectors=witnesses.get("inclusion")),
        ),
        Check.evaluate(
            f"tasaka-eta-tilde[{N},{r}]",
            "eta-tilde maps W into the kernel of E",
            result.eta_tilde_inclusion_ok,
            True,
            details,
            dict(cell, vectors=witnesses.get("eta_tilde_inclusion")),
        ),
        Check.evaluate(
            f"tasaka-eta-sum[{N},{r}]",
            "eta-tilde(a) + eta(a) = 0 on W",
            result.eta_sum_zero,
            True,
            details,
            dict(cell, vectors=witnesses.get("eta_sum")),
        ),
        Check.evaluate(
            f"tasaka-injective[{N},{r}]",
            "injectivity of eta",
            result.injective,
            r <= 3,
            details,
            dict(cell, dim_w=result.dim_w, dim_image=result.dim_image),
        ),
        Check.evaluate(
            f"tasaka-surjective[{N},{r}]",
            "Tasaka conjecture: eta is onto the kernel of E",
            result.surjective,
            r == 2,
            details,
            dict(cell, dim_kernel=result.dim_kernel, dim_image=result.dim_image),
        ),
    ]


def _nonempty_cells(weight_max, depths):
    return [
        (N, r)
        for r in depths
        for N in range(weight_max + 1)
        if len(enumerate_index_set(N, r))
    ]


def tasaka_report(weight_max, depth, cache=None):
    """Runs :py:func:`tasaka_checks` for every weight up to ``weight_max``

    Each cell's checks are stored in ``cache`` when one is given.

    """
    checks = []
    for N, r in _nonempty_cells(weight_max, [depth]):
        checks.extend(
            _cached_checks(cache, "checks-tasaka", N, r, partial(tasaka_checks, N, r))
        )
    log.info("tasaka report at depth %d: %d checks", depth, len(checks))
    return VerificationReport("tasaka", weight_max, depth, checks)


def recurrence_report(weight_max, depth_max, table):
    checks = []
    for N, r in _nonempty_cells(weight_max, range(1, depth_max + 1)):
        checks.append(recurrence_check(N, r, table))
        checks.append(kernel_series_check(N, r, table))
    return VerificationReport("recurrence", weight_max, depth_max, checks)


def decomposition_report(weight_max, depth_max, cache=None):
    checks = []
    for N, r in _nonempty_cells(weight_max, range(3, depth_max + 1)):
        checks.extend(
            _cached_checks(
                cache, "checks-decomposition", N, r, partial(decomposition_check, N, r)
            )
        )
    return VerificationReport("decomposition", weight_max, depth_max, checks)


def _crosscheck_cell(N, r):
    return [
        Check.evaluate(
            f"crosscheck[{N},{r}]",
            "C entries are coefficients of composed depth-one generators",
            crosscheck(N, r),
            True,
            witness={"weight": N, "depth": r, "matrix": build_C(N, r).to_interchange()},
        )
    ]


def crosscheck_report(weight_max, depth_max, cache=None):
    """Compares ``C_{N,r}`` with the coefficients of the composed generators"""
    checks = []
    for N, r in _nonempty_cells(weight_max, range(1, depth_max + 1)):
        checks.extend(
            _cached_checks(
                cache, "checks-crosscheck", N, r, partial(_crosscheck_cell, N, r)
            )
        )
    return VerificationReport("crosscheck", weight_max, depth_max, checks)


def exactness_report(weight_max, depth_max, table, cache=None):
    """Compares every ``rank C_{N,r}`` with the conjectured Hilbert series

    Each cell records whether the rank is equal to, greater or smaller than
    the series coefficient, together with the dimensions of the short
    exact sequence in that weight. The summary states, per depth, whether
    the rank is at least the coefficient throughout and whether the
    sequence dimensions add up.

    A failed cell carries ``C_{N,r}`` in its witness, read through
    ``cache`` when one is given.

    """
    target = hilbert_target(max(weight_max, 1), max(depth_max, 1))
    checks = []

    negative = sorted(
        (i, j) for (i, j), c in target.coeffs.items() if c < 0 or not isinstance(c, int)
    )
    checks.append(
        Check.evaluate(
            "hilbert-coefficients",
            "conjectured dimensions are nonnegative integers",
            not negative,
            False,
            details={"bad_cells": len(negative)},
            witness={"cells": [list(c) for c in negative]},
        )
    )

    summary = {}
    for r in range(1, depth_max + 1):
        cells = _nonempty_cells(weight_max, [r])
        at_least = True
        exact = True
        for N, _ in cells:
            rank = table.rank(N, r)
            coefficient = target[N, r]
            comparison = compare(rank, coefficient)
            details = {"rank": rank, "coefficient": coefficient, "comparison": comparison}
            details["sequence"] = sequence_dimensions(N, r, table)
            at_least = at_least and comparison != SMALLER
            exact = exact and details["sequence"]["exact"]
            witness = None
            if comparison != EQUAL:
                witness = {
                    "weight": N,
                    "depth": r,
                    "rank": rank,
                    "coefficient": coefficient,
                    "matrix": _matrix_witness(N, r, cache),
                }
            checks.append(
                Check.evaluate(
                    f"brown[{N},{r}]",
                    "Brown's matrix conjecture: rank C equals the series coefficient",
                    comparison == EQUAL,
                    r <= 2,
                    details=details,
                    witness=witness,
                )
            )
        summary[f"depth {r}"] = (
            ("rank >= coefficient throughout" if at_least else "rank below coefficient")
            + ("; exact sequence dimensions hold" if exact else "; sequence not exact")
        )
    log.info("exactness report N<=%d r<=%d", weight_max, depth_max)
    return VerificationReport("brown", weight_max, depth_max, checks, summary)
