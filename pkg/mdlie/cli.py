"""Command line interface.

Every subcommand prints exact output (rationals as ``"p/q"``) and is
deterministic for fixed arguments. Exit status is 0 on success and for
conjectural findings, 1 when a proven statement fails, and 2 on usage
errors.

example::

    $ mdlie matrix --kind E --weight 12 --depth 2 --format json
    $ mdlie verify tasaka --depth 3 --weight-max 23

"""

import argparse
from functools import partial
import json
import logging
import re
import sys

from mdlie import __version__, exactlin
from mdlie.cache import CacheCorruptError, ResultCache
from mdlie.exactlin import (
    ModularRankDisagreement,
    format_rational,
    left_kernel_basis,
)
from mdlie.harness import (
    crosscheck_report,
    decomposition_report,
    exactness_report,
    hilbert_target,
    rank_entry,
    rank_table,
    recurrence_report,
    tasaka_report,
)
from mdlie.liealg import (
    DepthPoly,
    NCPoly,
    compose_sigma_chain,
    dg_bracket,
    enumerate_index_set,
    ihara_bracket,
    sigma_bar_poly,
    sigma_bar_word,
)
from mdlie.tasaka import (
    KIND_C,
    KIND_E,
    KIND_ETA_TILDE,
    PeriodSpanError,
    StrayMonomialError,
    build_C,
    build_E,
    build_eta_tilde,
    period_basis,
    w_basis,
)


log = logging.getLogger(__name__)


#: Exit statuses
EXIT_OK = 0
EXIT_PROVEN_FAILURE = 1
EXIT_USAGE = 2

FORMATS = ("table", "json", "csv")

#: Errors mapped to exit status 1, caught ahead of usage errors
PROVEN_FAILURES = (
    CacheCorruptError,
    ModularRankDisagreement,
    PeriodSpanError,
    StrayMonomialError,
)


#: The statement or definition each subcommand computes, shown by --help
ANCHORS = {
    "matrix": (
        "Anchor: Tasaka's matrices. E^(k)_{N,r} has entries "
        + "delta(m_1..m_{r-k}; n_1..n_{r-k}) e(m_{r-k+1}..; n_{r-k+1}..) and "
        + "C_{N,r} = E^(2)_{N,r} E^(3)_{N,r} ... E_{N,r}."
    ),
    "rank": (
        "Anchor: Brown's matrix conjecture, 1 + sum rank C_{N,r} x^N y^r = "
        + "1/(1 - O(x)y + S(x)y^2)."
    ),
    "basis": (
        "Anchor: restricted even period polynomials P_N, the relation spaces "
        + "W_{N,r}, and the left kernels Ker E_{N,r} and Ker C_{N,r}."
    ),
    "verify": (
        "Anchor: Tasaka's conjecture (eta: pi(W_{N,r}) -> Ker E_{N,r} is an "
        + "isomorphism), Brown's matrix conjecture, the dimension recurrence of "
        + "0 -> P (x) L_{r-2} -> L_1 (x) L_{r-1} -> L_r -> 0, the kernel "
        + "decomposition of C = E^(2) ... E^(r), and the identity between "
        + "entries of C and coefficients of composed generators."
    ),
    "hilbert": (
        "Anchor: the conjectured Hilbert series 1/(1 - O(x)y + S(x)y^2) with "
        + "O(x) = x^3/(1-x^2) and S(x) = x^12/((1-x^4)(1-x^6))."
    ),
    "bracket": (
        "Anchor: the Ihara bracket {f,g} = [f,g] + D_f(g) - D_g(f) with "
        + "D_f(e1) = [e1,f], and its depth-graded image g ucirc f - f ucirc g."
    ),
    "compose": (
        "Anchor: the composition formula (y1-y0)^(m1-1) ucirc ((y1-y0)^(m2-1) "
        + "ucirc ...), with sign (-1)^(deg f + r) in ucirc."
    ),
}


class UsageError(ValueError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(s\d+)|(\d+(?:/\d+)?)|([{}(),+\-*]))")


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise UsageError(f"unexpected character {text[pos:].lstrip()[:1]!r} in {text!r}")
        tokens.append(next(group for group in match.groups() if group))
        pos = match.end()
    return tokens


class _ExpressionParser:
    """Recursive descent over generators ``s3, s5, ...``

    Grammar::

        expr := ["-"] term (("+" | "-") term)*
        term := [number "*"] factor
        factor := generator | "{" expr "," expr "}" | "(" expr ")"

    """

    def __init__(self, tokens, generator, bracket):
        self.tokens = tokens
        self.pos = 0
        self.generator = generator
        self.bracket = bracket

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            want = expected or "more input"
            raise UsageError(f"expected {want!r} at token {self.pos}, got {token!r}")
        self.pos += 1
        return token

    def parse(self):
        value = self.expr()
        if self.peek() is not None:
            raise UsageError(f"trailing input starting at {self.peek()!r}")
        return value

    def expr(self):
        negate = False
        if self.peek() == "-":
            self.take()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.peek() in ("+", "-"):
            op = self.take()
            other = self.term()
            value = value + other if op == "+" else value - other
        return value

    def term(self):
        token = self.peek()
        if token is not None and token[0].isdigit():
            coeff = exactlin.to_rational(self.take())
            self.take("*")
            return self.factor().scale(coeff)
        return self.factor()

    def factor(self):
        token = self.take()
        if token.startswith("s"):
            return self.generator(int(token[1:]))
        if token == "{":
            left = self.expr()
            self.take(",")
            right = self.expr()
            self.take("}")
            return self.bracket(left, right)
        if token == "(":
            value = self.expr()
            self.take(")")
            return value
        raise UsageError(f"unexpected token {token!r}")


def parse_expression(text, kind="ihara"):
    """Evaluates a bracket expression in generators ``s3, s5, ...``

    :arg str text: e.g. ``"{s3,s9} - 3*{s5,s7}"``

    :arg str kind: ``"ihara"`` for words and the Ihara bracket, ``"dg"``
        for polynomial representatives and the depth-graded bracket

    :returns: NCPoly or DepthPoly

    """
    if kind == "ihara":
        generator, bracket = sigma_bar_word, ihara_bracket
    elif kind == "dg":
        generator, bracket = sigma_bar_poly, dg_bracket
    else:
        raise UsageError(f"unknown bracket kind {kind!r}")
    return _ExpressionParser(_tokenize(text), generator, bracket).parse()


def _dump_json(data):
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _matrix_table(mat, labels):
    cells = [[format_rational(mat[i, j]) for j in range(mat.cols)] for i in range(mat.rows)]
    width = max([len(x) for row in cells for x in row] + [len(x) for x in labels] + [1])
    label_width = max([len(x) for x in labels] + [1])
    lines = [" " * label_width + " " + " ".join(x.rjust(width) for x in labels)]
    for label, row in zip(labels, cells):
        lines.append(label.rjust(label_width) + " " + " ".join(x.rjust(width) for x in row))
    return "\n".join(lines) + "\n"


def _basis_table(vectors):
    if not vectors:
        return "(empty basis)\n"
    lines = []
    for k, vec in enumerate(vectors):
        terms = " + ".join(f"{c}*[{label}]" for label, c in vec.items())
        lines.append(f"{k}: {terms}")
    return "\n".join(lines) + "\n"


def _check_format(args, allowed):
    if args.format not in allowed:
        raise UsageError(f"{args.command} does not support --format {args.format}")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command} needs {flags}")


def cmd_matrix(args, cache, out):
    _check_format(args, ("table", "json"))
    _require(args, "weight", "depth")
    N, r = args.weight, args.depth
    if args.kind == KIND_E:
        level = args.level if args.level is not None else r
        kind = f"matrix-E{level}"
        build = partial(build_E, N, r, level)
    elif args.kind == KIND_C:
        kind = "matrix-C"
        build = partial(build_C, N, r)
    else:
        kind = "matrix-EtaTilde"
        build = partial(build_eta_tilde, N, r)

    data = cache.get_or_compute(kind, N, r, lambda: build().to_interchange())
    if args.format == "json":
        out.write(_dump_json(data))
    else:
        mat = exactlin.matrix_from_interchange(data)
        labels = [",".join(map(str, t)) for t in data["row_index"]]
        out.write(_matrix_table(mat, labels))
    return EXIT_OK


def cmd_rank(args, cache, out):
    if args.weight is not None and args.depth is not None:
        _check_format(args, ("table", "json"))
        entry = rank_entry(
            args.weight,
            args.depth,
            mode=args.mode,
            seed=args.seed,
            verify=args.verify,
            cache=cache,
        )
        data = {"weight": args.weight, "depth": args.depth}
        if entry is None:
            data.update(size=0, rank=0, method=exactlin.METHOD_EXACT, primes=[])
        else:
            data.update(entry.to_json())
        if args.format == "json":
            out.write(_dump_json(data))
        else:
            out.write(
                f"rank C_{args.weight},{args.depth} = {data['rank']} "
                + f"(size {data['size']}, {data['method']})\n"
            )
        return EXIT_OK

    _require(args, "weight_max", "depth_max")
    table = rank_table(
        args.weight_max,
        args.depth_max,
        mode=args.mode,
        seed=args.seed,
        verify=args.verify,
        cache=cache,
        jobs=args.jobs,
    )
    if args.format == "json":
        out.write(_dump_json(table.to_json()))
    elif args.format == "csv":
        out.write(table.to_csv())
    else:
        out.write(f"{'N':>4} {'r':>3} {'size':>6} {'rank':>6}  method\n")
        for N, r in table.cells():
            entry = table.entries[(N, r)]
            out.write(
                f"{N:>4} {r:>3} {entry.size:>6} {entry.rank:>6}  "
                + f"{entry.certificate.method}\n"
            )
    return EXIT_OK


def cmd_basis(args, cache, out):
    _check_format(args, ("table", "json"))
    _require(args, "weight")
    N = args.weight
    if args.space == "period":
        data = cache.get_or_compute(
            "basis-period", N, 2, lambda: period_basis(N).to_json()
        )
    elif args.space == "w":
        _require(args, "depth")
        data = cache.get_or_compute(
            "basis-w", N, args.depth, lambda: w_basis(N, args.depth).to_json()
        )
    else:
        _require(args, "depth")
        r = args.depth
        builder = build_E if args.kind == KIND_E else build_C

        def compute():
            index = enumerate_index_set(N, r)
            basis = left_kernel_basis(builder(N, r).mat)
            return {"weight": N, "depth": r, "basis": basis.as_dicts(index.labels())}

        data = cache.get_or_compute(f"basis-kernel-{args.kind}", N, r, compute)

    if args.format == "json":
        out.write(_dump_json(data))
    else:
        out.write(_basis_table(data["basis"]))
    return EXIT_OK


def cmd_verify(args, cache, out):
    _check_format(args, ("table", "json"))
    _require(args, "weight_max")
    if args.check == "tasaka":
        _require(args, "depth")
        report = tasaka_report(args.weight_max, args.depth, cache=cache)
    else:
        _require(args, "depth_max")
        if args.check == "decomposition":
            report = decomposition_report(args.weight_max, args.depth_max, cache=cache)
        elif args.check == "crosscheck":
            report = crosscheck_report(args.weight_max, args.depth_max, cache=cache)
        else:
            table = rank_table(
                args.weight_max,
                args.depth_max,
                mode=args.mode,
                seed=args.seed,
                verify=args.verify,
                cache=cache,
                jobs=args.jobs,
            )
            if args.check == "brown":
                report = exactness_report(
                    args.weight_max, args.depth_max, table, cache=cache
                )
            else:
                report = recurrence_report(args.weight_max, args.depth_max, table)

    if args.report:
        with open(args.report, "w", encoding="utf-8") as fp:
            fp.write(_dump_json(report.to_json()))
    if args.format == "json":
        out.write(_dump_json(report.to_json()))
    else:
        out.write(report.render_table())
    return EXIT_OK if report.ok else EXIT_PROVEN_FAILURE


def cmd_hilbert(args, cache, out):
    _require(args, "weight_max", "depth_max")
    series = hilbert_target(args.weight_max, args.depth_max)
    cells = [
        (N, r, series[N, r])
        for r in range(1, args.depth_max + 1)
        for N in range(args.weight_max + 1)
        if series[N, r]
    ]
    if args.format == "json":
        data = [
            {"weight": N, "depth": r, "coefficient": format_rational(c)}
            for N, r, c in cells
        ]
        out.write(_dump_json(data))
    elif args.format == "csv":
        out.write("N,r,coefficient\n")
        for N, r, c in cells:
            out.write(f"{N},{r},{c}\n")
    else:
        for N, r, c in cells:
            out.write(f"x^{N} y^{r}: {c}\n")
    return EXIT_OK


def _poly_output(value, args, out):
    data = value.to_json()
    if args.format == "json":
        payload = {"terms": data}
        if isinstance(value, DepthPoly):
            payload["depth"] = value.depth
        out.write(_dump_json(payload))
    elif not data:
        out.write("0\n")
    else:
        for key, c in data.items():
            out.write(f"{c}  {key}\n")


def cmd_bracket(args, cache, out):
    _check_format(args, ("table", "json"))
    value = parse_expression(args.expression, args.kind)
    if isinstance(value, NCPoly) and args.depth is not None:
        value = value.depth_part(args.depth)
    _poly_output(value, args, out)
    return EXIT_OK


def cmd_compose(args, cache, out):
    _check_format(args, ("table", "json"))
    for m in args.indices:
        if m < 3 or m % 2 == 0:
            raise UsageError(f"index {m} is not an odd integer >= 3")
    _poly_output(compose_sigma_chain(tuple(args.indices)), args, out)
    return EXIT_OK


def _add_common(parser):
    parser.add_argument(
        "--format",
        choices=FORMATS,
        default="table",
        help="output format (default: table)",
    )
    parser.add_argument(
        "--cache-dir",
        default=None,
        help="result cache directory (default: $MDL_CACHE_DIR or ./.mdl-cache)",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log at debug level"
    )


def _add_cell(parser, weight=True, depth=True):
    if weight:
        parser.add_argument("-N", "--weight", type=int, help="weight N")
    if depth:
        parser.add_argument("-r", "--depth", type=int, help="depth r")


def _add_range(parser):
    parser.add_argument("--weight-max", type=int, help="largest weight")
    parser.add_argument("--depth-max", type=int, help="largest depth")


def _add_rank_options(parser):
    parser.add_argument(
        "--mode",
        choices=(exactlin.METHOD_EXACT, exactlin.METHOD_MODULAR),
        default=None,
        help=f"rank method (default: exact up to {exactlin.EXACT_ROW_LIMIT} rows)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=exactlin.DEFAULT_SEED,
        help="seed for drawing primes in modular mode",
    )
    parser.add_argument(
        "--verify",
        action="store_true",
        help="check modular ranks against exact elimination",
    )
    parser.add_argument(
        "--jobs", type=int, default=1, help="worker processes for rank tables"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mdlie",
        description=(
            "Exact computations with the depth-graded motivic Lie algebra: "
            + "Tasaka's matrices, period polynomials and Brown's conjectures."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    p = commands.add_parser(
        "matrix",
        help="emit Tasaka's E^(k)_{N,r}, C_{N,r} or the eta-tilde matrix over S_{N,r}",
        description=ANCHORS["matrix"],
    )
    p.add_argument(
        "--kind", choices=(KIND_E, KIND_C, KIND_ETA_TILDE), default=KIND_E
    )
    p.add_argument("--level", type=int, help="level k of E^(k) (default: r)")
    _add_cell(p)
    _add_common(p)
    p.set_defaults(handler=cmd_matrix)

    p = commands.add_parser(
        "rank",
        help="rank of C_{N,r} (Brown's matrix conjecture), one cell or a table",
        description=ANCHORS["rank"],
    )
    _add_cell(p)
    _add_range(p)
    _add_rank_options(p)
    _add_common(p)
    p.set_defaults(handler=cmd_rank)

    p = commands.add_parser(
        "basis",
        help="bases of period polynomials P_N, of W_{N,r}, or of left kernels",
        description=ANCHORS["basis"],
    )
    p.add_argument("space", choices=("period", "w", "kernel"))
    p.add_argument(
        "--kind", choices=(KIND_E, KIND_C), default=KIND_E, help="matrix for kernel"
    )
    _add_cell(p)
    _add_common(p)
    p.set_defaults(handler=cmd_basis)

    p = commands.add_parser(
        "verify",
        help="Tasaka's conjecture, Brown's series, the dimension recurrence, "
        + "kernel decompositions or the coefficient identity for C",
        description=ANCHORS["verify"],
    )
    p.add_argument(
        "check", choices=("tasaka", "brown", "recurrence", "decomposition", "crosscheck")
    )
    _add_cell(p, weight=False)
    _add_range(p)
    _add_rank_options(p)
    p.add_argument("--report", help="also write the JSON report to this file")
    _add_common(p)
    p.set_defaults(handler=cmd_verify)

    p = commands.add_parser(
        "hilbert",
        help="coefficients of Brown's conjectured series 1/(1 - O(x)y + S(x)y^2)",
        description=ANCHORS["hilbert"],
    )
    _add_range(p)
    _add_common(p)
    p.set_defaults(handler=cmd_hilbert)

    p = commands.add_parser(
        "bracket",
        help="evaluate an expression like '{s3,s9} - 3*{s5,s7}'",
        description=ANCHORS["bracket"],
    )
    p.add_argument("expression")
    p.add_argument(
        "--kind",
        choices=("ihara", "dg"),
        default="ihara",
        help="Ihara bracket on words or depth-graded bracket on polynomials",
    )
    _add_cell(p, weight=False)
    _add_common(p)
    p.set_defaults(handler=cmd_bracket)

    p = commands.add_parser(
        "compose",
        help="right-nested composition of (y1-y0)^(m-1) under Brown's ucirc product",
        description=ANCHORS["compose"],
    )
    p.add_argument("indices", type=int, nargs="+")
    _add_common(p)
    p.set_defaults(handler=cmd_compose)

    return parser


def main(argv=None, out=None):
    """Runs the command line and returns the exit status"""
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)

    cache = ResultCache(args.cache_dir)
    try:
        return args.handler(args, cache, out)
    except PROVEN_FAILURES as exc:
        print(f"mdlie: {exc}", file=sys.stderr)
        return EXIT_PROVEN_FAILURE
    except ValueError as exc:
        parser.error(str(exc))


def run():
    sys.exit(main())
