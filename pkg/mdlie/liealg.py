"""Noncommutative words in e0, e1 and their depth-graded polynomial images.

Two representations live here:

* :py:class:`NCPoly`, linear combinations of words in the letters ``E0``
  and ``E1``, carrying the commutator and the Ihara bracket;
* :py:class:`DepthPoly`, commutative polynomials in ``y0 .. yr`` that the
  words of depth ``r`` map to under :py:func:`rho`, carrying Brown's
  composition :py:func:`ucirc` and the depth-graded bracket.

Words are tuples of letters. A word has weight ``len(word)`` and depth
equal to the number of ``E1`` letters in it.

"""

from functools import lru_cache
from math import comb

from mdlie.exactlin import format_rational, normalize, to_rational


#: The letter e0
E0 = 0

#: The letter e1
E1 = 1

LETTER_NAMES = {E0: "e0", E1: "e1"}


class MixedDepthError(ValueError):
    pass


class NonHomogeneousError(ValueError):
    pass


def word_depth(word):
    return sum(1 for letter in word if letter == E1)


def format_word(word):
    """Formats a word as ``"e0e1e0"``; the empty word is ``"1"``"""
    if not word:
        return "1"
    return "".join(LETTER_NAMES[letter] for letter in word)


def _add_into(terms, key, coeff):
    value = terms.get(key, 0) + coeff
    if value:
        terms[key] = normalize(value)
    else:
        terms.pop(key, None)


class NCPoly:
    """Finite linear combination of words in ``E0`` and ``E1``

    Zero coefficients are never stored. Instances are treated as
    immutable; every operation returns a new polynomial.

    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        cleaned = {}
        for word, coeff in (terms or {}).items():
            word = tuple(word)
            for letter in word:
                if letter not in LETTER_NAMES:
                    raise ValueError(f"unknown letter {letter!r} in word {word!r}")
            coeff = to_rational(coeff)
            if coeff:
                _add_into(cleaned, word, coeff)
        self.terms = cleaned

    @classmethod
    def _wrap(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def word(cls, *letters):
        return cls({tuple(letters): 1})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"<NCPoly {self}>"

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            f"{format_rational(c)}*{format_word(w)}" for w, c in sorted(self.terms.items())
        )

    def __add__(self, other):
        terms = dict(self.terms)
        for word, coeff in other.terms.items():
            _add_into(terms, word, coeff)
        return NCPoly._wrap(terms)

    def __neg__(self):
        return NCPoly._wrap({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = to_rational(factor)
        if not factor:
            return NCPoly()
        return NCPoly._wrap({w: normalize(c * factor) for w, c in self.terms.items()})

    def __rmul__(self, factor):
        return self.scale(factor)

    def __mul__(self, other):
        """Concatenation product, or scaling when ``other`` is a number"""
        if not isinstance(other, NCPoly):
            return self.scale(other)
        terms = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                _add_into(terms, w1 + w2, c1 * c2)
        return NCPoly._wrap(terms)

    def depths(self):
        return sorted({word_depth(w) for w in self.terms})

    def weights(self):
        return sorted({len(w) for w in self.terms})

    def min_depth(self):
        return min((word_depth(w) for w in self.terms), default=None)

    def depth_part(self, depth):
        """Returns the terms whose words have exactly ``depth`` letters ``E1``"""
        return NCPoly._wrap(
            {w: c for w, c in self.terms.items() if word_depth(w) == depth}
        )

    def to_json(self):
        return {format_word(w): format_rational(c) for w, c in sorted(self.terms.items())}


#: e0 as a polynomial
e0 = NCPoly.word(E0)

#: e1 as a polynomial
e1 = NCPoly.word(E1)


def commutator(f, g):
    """Returns ``fg - gf``"""
    return f * g - g * f


def derivation(f, g):
    """Applies ``D_f`` to ``g``

    ``D_f`` kills ``e0`` and sends ``e1`` to ``[e1, f]``; it is extended to
    words by the Leibniz rule.

    """
    image = commutator(e1, f)
    terms = {}
    for word, coeff in g.terms.items():
        for pos, letter in enumerate(word):
            if letter != E1:
                continue
            prefix = word[:pos]
            suffix = word[pos + 1 :]
            for mid, c in image.terms.items():
                _add_into(terms, prefix + mid + suffix, coeff * c)
    return NCPoly._wrap(terms)


def ihara_bracket(f, g):
    """Returns the Ihara bracket ``{f, g} = [f, g] + D_f(g) - D_g(f)``

    The bracket is defined for Lie elements; on other polynomials it
    is the same formula with the derivations extended by the Leibniz rule.

    :arg NCPoly f: first argument

    :arg NCPoly g: second argument

    :returns: NCPoly

    """
    return commutator(f, g) + derivation(f, g) - derivation(g, f)


@lru_cache(maxsize=None)
def sigma_bar_word(m):
    """Returns the depth-one generator ``(ad e0)^(m-1)(e1)``

    :arg int m: odd integer, at least 3

    :raises ValueError: for even or small ``m``

    """
    if not isinstance(m, int) or m < 3 or m % 2 == 0:
        raise ValueError(f"generator index must be an odd integer >= 3, not {m!r}")
    result = e1
    for _ in range(m - 1):
        result = commutator(e0, result)
    return result


def _exponents_of(word):
    exps = [0]
    for letter in word:
        if letter == E1:
            exps.append(0)
        else:
            exps[-1] += 1
    return tuple(exps)


def _word_of(exps):
    word = []
    for k, a in enumerate(exps):
        if k:
            word.append(E1)
        word.extend([E0] * a)
    return tuple(word)


class DepthPoly:
    """Polynomial in ``y0, ..., y_depth`` with rational coefficients

    Terms map exponent tuples of length ``depth + 1`` to nonzero
    coefficients. Instances are treated as immutable.

    """

    __slots__ = ("depth", "terms")

    def __init__(self, depth, terms=None):
        if depth < 0:
            raise ValueError(f"depth must be nonnegative, not {depth}")
        cleaned = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != depth + 1 or any(a < 0 for a in exps):
                raise ValueError(
                    f"exponent tuple {exps!r} does not fit depth {depth}"
                )
            coeff = to_rational(coeff)
            if coeff:
                _add_into(cleaned, exps, coeff)
        self.depth = depth
        self.terms = cleaned

    @classmethod
    def _wrap(cls, depth, terms):
        obj = cls.__new__(cls)
        obj.depth = depth
        obj.terms = terms
        return obj

    @classmethod
    def one(cls, depth=0):
        return cls._wrap(depth, {(0,) * (depth + 1): 1})

    @classmethod
    def difference_power(cls, depth, i, j, n):
        """Returns ``(y_j - y_i)^n`` as a polynomial of the given depth"""
        terms = {}
        for k in range(n + 1):
            exps = [0] * (depth + 1)
            exps[j] += k
            exps[i] += n - k
            _add_into(terms, tuple(exps), (-1) ** (n - k) * comb(n, k))
        return cls._wrap(depth, terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DepthPoly):
            return NotImplemented
        return self.depth == other.depth and self.terms == other.terms

    def __hash__(self):
        return hash((self.depth, frozenset(self.terms.items())))

    def __repr__(self):
        return f"<DepthPoly depth={self.depth} terms={len(self.terms)}>"

    def _check_depth(self, other):
        if self.depth != other.depth:
            raise MixedDepthError(
                f"cannot combine polynomials of depth {self.depth} and {other.depth}"
            )

    def __add__(self, other):
        self._check_depth(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            _add_into(terms, exps, coeff)
        return DepthPoly._wrap(self.depth, terms)

    def __neg__(self):
        return DepthPoly._wrap(self.depth, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = to_rational(factor)
        if not factor:
            return DepthPoly(self.depth)
        return DepthPoly._wrap(
            self.depth, {e: normalize(c * factor) for e, c in self.terms.items()}
        )

    def __rmul__(self, factor):
        return self.scale(factor)

    def __mul__(self, other):
        if not isinstance(other, DepthPoly):
            return self.scale(other)
        self._check_depth(other)
        terms = {}
        for a_exps, c1 in self.terms.items():
            for b_exps, c2 in other.terms.items():
                _add_into(terms, tuple(a + b for a, b in zip(a_exps, b_exps)), c1 * c2)
        return DepthPoly._wrap(self.depth, terms)

    def degrees(self):
        return sorted({sum(e) for e in self.terms})

    def degree(self):
        """Returns the total degree of a homogeneous polynomial

        :raises NonHomogeneousError: for zero or mixed-degree polynomials

        """
        degrees = self.degrees()
        if len(degrees) != 1:
            raise NonHomogeneousError(
                f"polynomial is not homogeneous (degrees {degrees})"
            )
        return degrees[0]

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), 0)

    def relabel(self, targets, depth):
        """Substitutes ``y_k -> y_targets[k]`` into a polynomial of depth ``depth``"""
        terms = {}
        for exps, coeff in self.terms.items():
            new = [0] * (depth + 1)
            for k, a in enumerate(exps):
                new[targets[k]] += a
            _add_into(terms, tuple(new), coeff)
        return DepthPoly._wrap(depth, terms)

    def to_json(self):
        """Maps ``"a0,a1,...,ar"`` to ``"p/q"``, keys in sorted order"""
        items = {",".join(map(str, e)): format_rational(c) for e, c in self.terms.items()}
        return dict(sorted(items.items()))

    @classmethod
    def from_json(cls, depth, data):
        return cls(
            depth,
            {tuple(int(a) for a in key.split(",")): value for key, value in data.items()},
        )


def rho(p, depth=None):
    """Maps words of a fixed depth to monomials

    ``e0^a0 e1 e0^a1 ... e1 e0^ar`` goes to ``y0^a0 y1^a1 ... yr^ar``.

    :arg NCPoly p: polynomial whose words all have the same depth

    :arg int depth: the depth, needed only when ``p`` is zero

    :returns: DepthPoly

    :raises MixedDepthError: if ``p`` has words of two different depths

    """
    depths = p.depths()
    if len(depths) > 1:
        raise MixedDepthError(
            f"words of depth {depths[0]} and {depths[1]} cannot be mapped together"
        )
    if depths:
        if depth is not None and depth != depths[0]:
            raise MixedDepthError(
                f"words of depth {depths[0]} and {depth} cannot be mapped together"
            )
        depth = depths[0]
    elif depth is None:
        depth = 0
    return DepthPoly._wrap(
        depth, {_exponents_of(w): c for w, c in p.terms.items()}
    )


def rho_inverse(q):
    """Maps a :py:class:`DepthPoly` back to words"""
    return NCPoly._wrap({_word_of(e): c for e, c in q.terms.items()})


@lru_cache(maxsize=None)
def sigma_bar_poly(m):
    """Returns ``(y1 - y0)^(m-1)``, the image of :py:func:`sigma_bar_word`"""
    if not isinstance(m, int) or m < 3 or m % 2 == 0:
        raise ValueError(f"generator index must be an odd integer >= 3, not {m!r}")
    return DepthPoly.difference_power(1, 0, 1, m - 1)


def ucirc(f, g):
    """Brown's composition of a depth ``r`` with a depth ``s`` polynomial

    The result has depth ``r + s``::

        sum_{i=0..s} f(y_i, ..., y_{i+r}) g(y_0, ..., y_i, y_{i+r+1}, ..., y_{r+s})
        + (-1)^(deg f + r) sum_{i=1..s} f(y_{i+r}, ..., y_i)
                                         g(y_0, ..., y_{i-1}, y_{i+r}, ..., y_{r+s})

    where ``deg f`` is the total degree of ``f`` in the y variables.

    :arg DepthPoly f: homogeneous polynomial

    :arg DepthPoly g: any polynomial

    :returns: DepthPoly

    :raises NonHomogeneousError: if ``f`` is not homogeneous

    """
    r, s = f.depth, g.depth
    depth = r + s
    if not f or not g:
        return DepthPoly(depth)
    sign = -1 if (f.degree() + r) % 2 else 1

    result = DepthPoly(depth)
    for i in range(s + 1):
        f_part = f.relabel([i + k for k in range(r + 1)], depth)
        g_part = g.relabel([k if k <= i else k + r for k in range(s + 1)], depth)
        result = result + f_part * g_part
    for i in range(1, s + 1):
        f_part = f.relabel([i + r - k for k in range(r + 1)], depth)
        g_part = g.relabel([k if k < i else k + r for k in range(s + 1)], depth)
        result = result + (f_part * g_part).scale(sign)
    return result


def dg_bracket(f, g):
    """Returns the depth-graded Ihara bracket of two polynomial representatives

    This is ``g ucirc f - f ucirc g``, with the second argument on the
    left of the first ``ucirc``. With this sign ``rho`` of the lowest-depth
    part of ``ihara_bracket(f, g)`` equals ``dg_bracket(rho f, rho g)``;
    the opposite order ``f ucirc g - g ucirc f`` gives its negative.

    """
    return ucirc(g, f) - ucirc(f, g)


@lru_cache(maxsize=None)
def compose_sigma_chain(m):
    """Evaluates ``s_m1 ucirc (s_m2 ucirc (... ucirc s_mr))``

    where ``s_n = (y1 - y0)^(n-1)``.

    :arg tuple m: an index tuple, odd parts >= 3

    :returns: DepthPoly of depth ``len(m)`` and total degree ``sum(m) - len(m)``

    """
    m = tuple(m)
    if not m:
        return DepthPoly.one(0)
    if len(m) == 1:
        return sigma_bar_poly(m[0])
    return ucirc(sigma_bar_poly(m[0]), compose_sigma_chain(m[1:]))


def chain_coefficient(chain, n):
    """Returns the coefficient of ``y1^(n1-1) ... yr^(nr-1)`` in ``chain``"""
    return chain.coefficient((0,) + tuple(k - 1 for k in n))


def _compositions(total, depth):
    if depth == 0:
        if total == 0:
            yield ()
        return
    for first in range(3, total - 3 * (depth - 1) + 1, 2):
        for rest in _compositions(total - first, depth - 1):
            yield (first,) + rest


class IndexSet:
    """The tuples of ``depth`` odd integers >= 3 summing to ``weight``

    Tuples are kept in lexicographic ascending order.

    """

    __slots__ = ("weight", "depth", "tuples", "_positions")

    def __init__(self, weight, depth, tuples):
        self.weight = weight
        self.depth = depth
        self.tuples = tuple(tuples)
        self._positions = {t: k for k, t in enumerate(self.tuples)}

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __getitem__(self, k):
        return self.tuples[k]

    def __contains__(self, t):
        return tuple(t) in self._positions

    def __eq__(self, other):
        if not isinstance(other, IndexSet):
            return NotImplemented
        return (self.weight, self.depth, self.tuples) == (
            other.weight,
            other.depth,
            other.tuples,
        )

    def __hash__(self):
        return hash((self.weight, self.depth, self.tuples))

    def __repr__(self):
        return f"<IndexSet S_{self.weight},{self.depth} size={len(self)}>"

    def position(self, t):
        return self._positions[tuple(t)]

    def labels(self):
        """Returns ``"n1,n2,...,nr"`` labels in order"""
        return [",".join(map(str, t)) for t in self.tuples]


@lru_cache(maxsize=None)
def enumerate_index_set(N, r):
    """Returns the :py:class:`IndexSet` of weight ``N`` and depth ``r``

    The set is empty when ``N < 3r`` or ``N`` and ``r`` differ in parity.
    Depth 0 is allowed: it holds the empty tuple at weight 0 only.

    :raises ValueError: for negative weight or depth

    """
    if N < 0 or r < 0:
        raise ValueError(f"weight and depth must be nonnegative, not ({N}, {r})")
    return IndexSet(N, r, _compositions(N, r))
