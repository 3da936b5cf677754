from mdlie.exactlin import (
    DEFAULT_SEED,
    rank,
)
from mdlie.tasaka import (
    KIND_C,
    KIND_E,
    KIND_ETA_TILDE,
    build_C,
    build_E,
    build_eta_tilde,
)


# yyyymmdd
__releasedate__ = "20261018"
# x.y.z or x.y.z.dev0 -- semver
__version__ = "1.0.0"


__all__ = ["tasaka_matrix", "brown_rank"]


def tasaka_matrix(N, r, kind=KIND_C, level=None):
    """Build one of Tasaka's matrices over ``S_{N,r}``

    ``S_{N,r}`` is the set of tuples of ``r`` odd integers ``>= 3`` summing
    to ``N``, in lexicographic order. It indexes both the rows and the
    columns of every matrix. Matrices act on row vectors from the right.

    Example::

        import mdlie

        c = mdlie.tasaka_matrix(15, 3)
        print(c.mat.rows, c.mat.cols)


    .. Note::

       Matrices are memoized per process. For persistent results across
       runs use :py:class:`mdlie.cache.ResultCache` or the ``mdlie``
       command.

    :arg int N: the weight

    :arg int r: the depth

    :arg str kind: ``"C"`` for ``C_{N,r} = E^(2) ... E^(r)``, ``"E"`` for
        ``E^(level)_{N,r}`` or ``"EtaTilde"`` for the block matrix of
        ``eta-tilde``

    :arg int level: level of an ``E`` matrix in ``2..r``; defaults to ``r``

    :returns: :py:class:`mdlie.tasaka.TasakaMatrix`

    :raises ValueError: if the kind, level or depth is out of range

    """
    if kind == KIND_C:
        return build_C(N, r)
    if kind == KIND_E:
        return build_E(N, r, level)
    if kind == KIND_ETA_TILDE:
        return build_eta_tilde(N, r)
    raise ValueError(f"unknown matrix kind {kind!r}")


def brown_rank(N, r, mode=None, seed=DEFAULT_SEED):
    """Return the rank of ``C_{N,r}``

    Brown's matrix conjecture predicts this rank to be the coefficient of
    ``x^N y^r`` in ``1 / (1 - O(x) y + S(x) y^2)``; see
    :py:func:`mdlie.harness.hilbert_target`.

    Example::

        import mdlie

        assert mdlie.brown_rank(12, 2) == 3

    :arg int N: the weight

    :arg int r: the depth, at least 1

    :arg str mode: ``"exact"``, ``"modular"`` or None to choose by size

    :arg int seed: seed for drawing primes in modular mode

    :returns: int

    """
    return rank(build_C(N, r).mat, mode=mode, seed=seed).rank
