from fractions import Fraction
import random

import pytest

from mdlie.exactlin import (
    MODULAR_PRIME_COUNT,
    PRIME_LOWER_BOUND,
    MatQ,
    ModularRankDisagreement,
    ModularRankWarning,
    PrimeDivisorError,
    RankCertificate,
    ShapeError,
    draw_primes,
    format_rational,
    interchange_dict,
    left_kernel_basis,
    mat_mul,
    matrix_from_interchange,
    rank,
    rank_exact,
    rank_modular,
    reduce_basis,
    row_space_basis,
    to_rational,
    vec_mul,
)
from mdlie.tasaka import build_C


E_12_2 = MatQ.from_rows(
    [
        [0, 0, 0, 1],
        [-6, 0, 1, 6],
        [-15, -14, 15, 15],
        [-27, -42, 42, 28],
    ]
)


def random_matrix(rng, rows, cols, low=-3, high=3):
    return MatQ.from_rows(
        [[rng.randint(low, high) for _ in range(cols)] for _ in range(rows)]
    )


def low_rank_matrix(rng, rows, cols, k):
    a = random_matrix(rng, rows, k)
    b = random_matrix(rng, k, cols)
    return mat_mul(a, b)


@pytest.mark.parametrize(
    "value, expected",
    [
        (3, 3),
        (Fraction(6, 3), 2),
        (Fraction(3, 4), Fraction(3, 4)),
        ("3/4", Fraction(3, 4)),
        ("-2", -2),
        ("10/5", 2),
    ],
)
def test_to_rational(value, expected):
    result = to_rational(value)
    assert result == expected
    assert type(result) is type(expected)


@pytest.mark.parametrize("value", [1.5, True, None])
def test_to_rational_rejects_inexact(value):
    with pytest.raises(TypeError):
        to_rational(value)


@pytest.mark.parametrize(
    "value, expected",
    [(0, "0/1"), (2, "2/1"), (Fraction(-6, 4), "-3/2")],
)
def test_format_rational(value, expected):
    assert format_rational(value) == expected


class TestMatQ:
    def test_entry_count_checked(self):
        with pytest.raises(ShapeError):
            MatQ(2, 2, [1, 2, 3])

    def test_ragged_rows(self):
        with pytest.raises(ShapeError):
            MatQ.from_rows([[1, 2], [3]])

    def test_integral_entries_stay_int(self):
        m = MatQ.from_rows([[Fraction(4, 2), "1/3"]])
        assert m[0, 0] == 2
        assert type(m[0, 0]) is int
        assert not m.is_integral()

    def test_transpose(self):
        m = MatQ.from_rows([[1, 2, 3], [4, 5, 6]])
        assert m.transpose() == MatQ.from_rows([[1, 4], [2, 5], [3, 6]])

    def test_stack_shape(self):
        with pytest.raises(ShapeError):
            MatQ.zeros(1, 2).stack(MatQ.zeros(1, 3))


class TestRankExact:
    def test_identity(self):
        assert rank_exact(MatQ.identity(2)) == 2

    def test_zero(self):
        assert rank_exact(MatQ.zeros(3, 4)) == 0

    def test_empty(self):
        assert rank_exact(MatQ.zeros(0, 0)) == 0

    def test_e_12_2(self):
        assert rank_exact(E_12_2) == 3

    def test_rational_entries(self):
        m = MatQ.from_rows([["1/2", "1/3"], [3, 2]])
        assert rank_exact(m) == 1

    def test_column_skipping(self):
        m = MatQ.from_rows([[0, 1, 2], [0, 2, 4], [0, 0, 1]])
        assert rank_exact(m) == 2

    @pytest.mark.parametrize("seed", range(10))
    def test_low_rank_products(self, seed):
        rng = random.Random(seed)
        k = rng.randint(1, 4)
        m = low_rank_matrix(rng, 6, 7, k)
        assert rank_exact(m) <= k


class TestLeftKernel:
    def test_identity(self):
        assert left_kernel_basis(MatQ.identity(4)).dimension == 0

    def test_one_by_one(self):
        assert left_kernel_basis(MatQ.from_rows([[1]])).dimension == 0

    def test_e_12_2(self):
        basis = left_kernel_basis(E_12_2)
        assert basis.vectors == ((1, -3, 3, -1),)
        assert vec_mul(basis.vectors[0], E_12_2) == (0, 0, 0, 0)

    def test_zero_matrix(self):
        basis = left_kernel_basis(MatQ.zeros(3, 2))
        assert basis.vectors == ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def test_rows_normalized(self):
        m = MatQ.from_rows([[2, 4], [1, 2], [3, 6]])
        for v in left_kernel_basis(m):
            pivot = next(c for c in v if c)
            assert pivot == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_rank_nullity(self, seed):
        rng = random.Random(seed)
        m = low_rank_matrix(rng, rng.randint(1, 7), rng.randint(1, 7), rng.randint(1, 4))
        basis = left_kernel_basis(m)
        assert rank_exact(m) + basis.dimension == m.rows
        for v in basis:
            assert not any(vec_mul(v, m))

    @pytest.mark.parametrize("seed", range(5))
    def test_independent_of_column_order(self, seed):
        rng = random.Random(seed)
        m = low_rank_matrix(rng, 6, 5, 3)
        order = list(range(m.cols))
        rng.shuffle(order)
        shuffled = MatQ.from_rows([[row[j] for j in order] for row in m.to_rows()])
        assert left_kernel_basis(shuffled) == left_kernel_basis(m)

    def test_rereduction_is_idempotent(self):
        basis = left_kernel_basis(E_12_2.stack(E_12_2))
        assert reduce_basis(basis.vectors, basis.ambient_dim) == basis


class TestRowSpace:
    def test_identity(self):
        basis = row_space_basis(MatQ.identity(3))
        assert basis.vectors == ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def test_zero(self):
        assert row_space_basis(MatQ.zeros(3, 3)).dimension == 0

    def test_row_order_does_not_matter(self):
        rng = random.Random(7)
        rows = low_rank_matrix(rng, 5, 6, 3).to_rows()
        shuffled = list(rows)
        rng.shuffle(shuffled)
        assert reduce_basis(shuffled, 6) == reduce_basis(rows, 6)

    def test_contains(self):
        space = row_space_basis(E_12_2)
        kernel = left_kernel_basis(E_12_2)
        first_rows = MatQ.from_rows(E_12_2.to_rows()[:2])
        assert space.contains(row_space_basis(first_rows))
        assert not kernel.contains(space)

    def test_as_dicts_drops_zeros(self):
        basis = reduce_basis([[0, 2, 0]], 3)
        assert basis.as_dicts(["a", "b", "c"]) == [{"b": "1/1"}]


class TestMatMul:
    def test_identity(self):
        assert mat_mul(MatQ.identity(4), E_12_2) == E_12_2

    def test_zero(self):
        assert mat_mul(E_12_2, MatQ.zeros(4, 2)) == MatQ.zeros(4, 2)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mat_mul(MatQ.zeros(2, 3), MatQ.zeros(2, 3))

    def test_rationals(self):
        a = MatQ.from_rows([["1/2", 0], [0, "1/3"]])
        b = MatQ.from_rows([[2, 0], [0, 3]])
        assert mat_mul(a, b) == MatQ.identity(2)

    @pytest.mark.parametrize("seed", range(10))
    def test_rank_of_product(self, seed):
        rng = random.Random(seed)
        a = random_matrix(rng, 5, 4)
        b = random_matrix(rng, 4, 6)
        assert rank_exact(mat_mul(a, b)) <= min(rank_exact(a), rank_exact(b))


class TestModularRank:
    def test_draw_primes(self):
        primes = draw_primes(seed=3)
        assert len(set(primes)) == MODULAR_PRIME_COUNT
        assert all(p > PRIME_LOWER_BOUND for p in primes)
        assert draw_primes(seed=3) == primes

    def test_identity(self):
        cert = rank_modular(MatQ.identity(5), draw_primes())
        assert cert.rank == 5
        assert cert.method == "modular"

    def test_e_12_2(self):
        assert rank_modular(E_12_2, draw_primes(seed=1)).rank == rank_exact(E_12_2)

    @pytest.mark.parametrize("seed", range(10))
    def test_agrees_with_exact(self, seed):
        rng = random.Random(seed)
        m = low_rank_matrix(rng, 8, 8, rng.randint(1, 8))
        assert rank_modular(m, draw_primes(seed=seed)).rank == rank_exact(m)

    def test_rational_entries(self):
        m = MatQ.from_rows([["1/2", "1/3"], [3, 2]])
        assert rank_modular(m, draw_primes()).rank == 1

    def test_prime_dividing_denominator(self):
        primes = draw_primes()
        m = MatQ.from_rows([[Fraction(1, primes[0])]])
        with pytest.raises(PrimeDivisorError):
            rank_modular(m, primes)

    def test_disagreement_is_reported(self):
        primes = draw_primes()
        m = MatQ.from_rows([[primes[0]]])
        with pytest.raises(ModularRankDisagreement) as excinfo:
            rank_modular(m, primes)
        assert str(primes[0]) in str(excinfo.value)

    @pytest.mark.parametrize("primes", [(), (2, 3, 5), None])
    def test_bad_primes(self, primes):
        if primes is None:
            p = draw_primes()[0]
            primes = (p, p, p)
        with pytest.raises(ValueError):
            rank_modular(MatQ.identity(2), primes)


class TestRank:
    def test_auto_picks_exact(self):
        assert rank(E_12_2) == RankCertificate(3)

    def test_modular_warns(self):
        with pytest.warns(ModularRankWarning):
            cert = rank(E_12_2, mode="modular")
        assert cert.rank == 3
        assert len(cert.primes) == MODULAR_PRIME_COUNT
        assert not cert.verified
        assert cert.to_json()["verified"] is False
        assert not cert.satisfies(verify=True)

    def test_modular_verified(self):
        cert = rank(E_12_2, mode="modular", verify=True)
        assert cert.rank == 3
        assert cert.verified
        assert cert.satisfies(verify=True)
        assert RankCertificate.from_json(cert.to_json()) == cert

    def test_exact_needs_no_verification(self):
        cert = rank(E_12_2)
        assert "verified" not in cert.to_json()
        assert cert.satisfies(verify=True)

    def test_c_24_4_modular_matches_exact(self):
        mat = build_C(24, 4).mat
        assert (mat.rows, mat.cols) == (84, 84)
        with pytest.warns(ModularRankWarning):
            cert = rank(mat, mode="modular")
        assert cert.rank == rank_exact(mat) == 64

    def test_auto_switches_to_modular(self):
        with pytest.warns(ModularRankWarning):
            cert = rank(MatQ.identity(401))
        assert cert.method == "modular"
        assert cert.rank == 401

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            rank(E_12_2, mode="float")

    def test_certificate_invariants(self):
        with pytest.raises(ValueError):
            RankCertificate(1, "modular", (3, 5))
        with pytest.raises(ValueError):
            RankCertificate(1, "exact", (3,))


def test_interchange():
    labels = [(3, 9), (5, 7), (7, 5), (9, 3)]
    data = interchange_dict(E_12_2, "E", 12, 2, level=2, row_index=labels, col_index=labels)
    assert data["kind"] == "E"
    assert data["row_index"][3] == [9, 3]
    assert data["entries"][:4] == ["0/1", "0/1", "0/1", "1/1"]
    assert matrix_from_interchange(data) == E_12_2


def test_interchange_shape_checked():
    with pytest.raises(ShapeError):
        interchange_dict(E_12_2, "E", 12, 2, row_index=[(3, 9)], col_index=[(3, 9)])
