"""Desk-scale stand-ins for infinite-dimensional operators.

A small expression grammar describes kernel values k(x, y) on [0,1]^2 or
infinite-matrix entries a(i, j) over 1-based indices.  Kernels are
discretized by the midpoint rule on a uniform grid (all quadrature weights
equal and positive, so the discretization is again a non-negative matrix);
infinite matrices are approximated by their leading principal sections,
whose spectral radii grow monotonically.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := base ('^' unary)?          # right-associative
    base   := number | var | func '(' expr (',' expr)* ')' | '(' expr ')'

Variables are i, j (indices >= 1) or x, y (reals in [0, 1]); functions are
exp (one argument) and min, max (two arguments).  A formula must evaluate
to a finite value >= 0 everywhere on its domain; this is checked by
sampling at construction and again on every concrete grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chains import ChainId, ChainReport, DEFAULT_CHAIN_TOL, build_report
from .nnmatrix import DomainError, NonNegativeMatrix, matmul_chain
from .spectral import DEFAULT_CONFIG, SpectralEstimate, ToleranceConfig, spectral_radius

INDEX_VARS = frozenset({"i", "j"})
COORD_VARS = frozenset({"x", "y"})
FUNCTIONS = {"exp": 1, "min": 2, "max": 2}


class FormulaSyntaxError(ValueError):
    """Malformed formula text; `position` is the 0-based offset of the fault."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class FormulaDomainError(ValueError):
    """A formula produced a negative or non-finite value on its domain."""


# -- tokenizer ---------------------------------------------------------------

_OPERATORS = set("+-*/^(),")


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    """Tokens are (kind, text, position) with kind in {num, ident, op, end}."""
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _OPERATORS:
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        if ch.isdigit() or ch == ".":
            start = pos
            while pos < n and (source[pos].isdigit() or source[pos] == "."):
                pos += 1
            if pos < n and source[pos] in "eE":
                mark = pos
                pos += 1
                if pos < n and source[pos] in "+-":
                    pos += 1
                if pos < n and source[pos].isdigit():
                    while pos < n and source[pos].isdigit():
                        pos += 1
                else:
                    pos = mark  # the e belongs to an identifier, not this number
            text = source[start:pos]
            try:
                float(text)
            except ValueError:
                raise FormulaSyntaxError(f"malformed number {text!r}", start) from None
            tokens.append(("num", text, start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (source[pos].isalnum() or source[pos] == "_"):
                pos += 1
            tokens.append(("ident", source[start:pos], start))
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", n))
    return tokens


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = _tokenize(source)
        self.idx = 0

    def peek(self):
        return self.tokens[self.idx]

    def advance(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect_op(self, symbol: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != symbol:
            raise FormulaSyntaxError(f"expected {symbol!r}", pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected trailing {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = (text, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = (text, node, self.unary())
            else:
                return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return ("^", node, self.unary())
        return node

    def base(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return ("num", float(text))
        if kind == "ident":
            if text in FUNCTIONS:
                self.expect_op("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.advance()
                    args.append(self.expr())
                self.expect_op(")")
                if len(args) != FUNCTIONS[text]:
                    raise FormulaSyntaxError(
                        f"{text} takes {FUNCTIONS[text]} argument(s), got {len(args)}", pos)
                return (text, *args)
            if text in INDEX_VARS or text in COORD_VARS:
                return ("var", text)
            raise FormulaSyntaxError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise FormulaSyntaxError(f"expected a number, variable or '(', got {text or 'end of input'!r}", pos)


def _collect_vars(node, out: set[str]) -> None:
    if node[0] == "var":
        out.add(node[1])
    elif node[0] != "num":
        for child in node[1:]:
            _collect_vars(child, out)


def _eval_node(node, env: dict):
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return env[node[1]]
    if op == "neg":
        return -_eval_node(node[1], env)
    if op == "exp":
        return np.exp(_eval_node(node[1], env))
    if op == "min":
        return np.minimum(_eval_node(node[1], env), _eval_node(node[2], env))
    if op == "max":
        return np.maximum(_eval_node(node[1], env), _eval_node(node[2], env))
    left = _eval_node(node[1], env)
    right = _eval_node(node[2], env)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        return np.divide(left, right)
    return np.power(left, right)


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def format_expr(node) -> str:
    """Pretty-print an AST back to grammar text (used by the round-trip check)."""
    op = node[0]
    if op == "num":
        return repr(node[1])
    if op == "var":
        return node[1]
    if op in FUNCTIONS:
        return f"{op}({', '.join(format_expr(a) for a in node[1:])})"
    if op == "neg":
        inner = format_expr(node[1])
        if node[1][0] in ("+", "-", "*", "/", "neg"):
            inner = f"({inner})"
        return f"-{inner}"
    left, right = node[1], node[2]
    lp, rp = format_expr(left), format_expr(right)
    prec = _PRECEDENCE[op]
    if left[0] in _PRECEDENCE and (_PRECEDENCE[left[0]] < prec or (op == "^" and left[0] == "^")):
        lp = f"({lp})"
    # left-associative operators need parens around same-precedence right children
    if right[0] in _PRECEDENCE and (
        _PRECEDENCE[right[0]] < prec
        or (op in ("-", "/") and _PRECEDENCE[right[0]] == prec)
    ):
        rp = f"({rp})"
    return f"{lp} {op} {rp}" if op != "^" else f"{lp}^{rp}"


@dataclass(frozen=True)
class EntryFormula:
    """Parsed formula over (i, j) indices or (x, y) coordinates."""

    source: str
    ast: tuple
    variables: frozenset[str]

    def __call__(self, **env):
        with np.errstate(all="ignore"):
            return _eval_node(self.ast, env)

    def evaluate_grid(self, first, second) -> np.ndarray:
        """Evaluate on the outer product of two 1-d coordinate arrays."""
        names = sorted(self.variables) if self.variables else []
        env = {}
        if self.variables <= INDEX_VARS:
            env = {"i": np.asarray(first)[:, None], "j": np.asarray(second)[None, :]}
        else:
            env = {"x": np.asarray(first)[:, None], "y": np.asarray(second)[None, :]}
        with np.errstate(all="ignore"):
            out = _eval_node(self.ast, env)
        return np.broadcast_to(out, (len(first), len(second))).astype(float)


def _check_samples(formula: EntryFormula, values: np.ndarray, first, second, what: str) -> None:
    bad = ~np.isfinite(values) | (values < 0.0)
    if np.any(bad):
        a, b = np.argwhere(bad)[0]
        point = (float(np.asarray(first)[a]), float(np.asarray(second)[b]))
        raise FormulaDomainError(
            f"formula {formula.source!r} is invalid on {what} at {point}: value {values[a, b]}")


def parse_entry_expr(source: str) -> EntryFormula:
    """Parse and domain-validate a formula.

    Variables must come from one domain only ({i, j} or {x, y}); the result
    is sampled over that domain and rejected if any sample is negative, NaN
    or infinite.
    """
    ast = _Parser(source).parse()
    used: set[str] = set()
    _collect_vars(ast, used)
    if used & INDEX_VARS and used & COORD_VARS:
        raise DomainError(f"formula {source!r} mixes index variables (i, j) with coordinates (x, y)")
    formula = EntryFormula(source=source, ast=ast, variables=frozenset(used))
    if used <= COORD_VARS:
        pts = np.concatenate([np.linspace(0.0, 1.0, 9), (np.arange(1, 14) * 0.07129) % 1.0])
        _check_samples(formula, formula.evaluate_grid(pts, pts), pts, pts, "[0,1]^2")
    if used <= INDEX_VARS and used:
        idx = np.array([1, 2, 3, 4, 5, 6, 7, 8, 13, 21, 34, 64], dtype=float)
        _check_samples(formula, formula.evaluate_grid(idx, idx), idx, idx, "index pairs")
    return formula


@dataclass(frozen=True)
class KernelSpec:
    """A kernel k(x, y) on [0,1]^2 given by a formula over x and y."""

    formula: EntryFormula
    description: str = ""

    def __post_init__(self) -> None:
        if not self.formula.variables <= COORD_VARS:
            raise DomainError(
                f"kernel formula must use only x and y, got {sorted(self.formula.variables)}")

    @classmethod
    def parse(cls, source: str, description: str = "") -> "KernelSpec":
        return cls(parse_entry_expr(source), description)


@dataclass(frozen=True)
class TruncatedMatrixSpec:
    """An infinite matrix a(i, j) over 1-based indices plus section sizes."""

    formula: EntryFormula
    sizes: tuple[int, ...]

    def __init__(self, formula: EntryFormula, sizes: Sequence[int]) -> None:
        if not formula.variables <= INDEX_VARS:
            raise DomainError(
                f"entry formula must use only i and j, got {sorted(formula.variables)}")
        sizes = tuple(int(s) for s in sizes)
        if not sizes:
            raise DomainError("sizes must be non-empty")
        if sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise DomainError(f"sizes must be positive and strictly increasing, got {sizes}")
        object.__setattr__(self, "formula", formula)
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def parse(cls, source: str, sizes: Sequence[int]) -> "TruncatedMatrixSpec":
        return cls(parse_entry_expr(source), sizes)


def midpoints(n: int) -> np.ndarray:
    """Midpoint-rule nodes (i - 1/2)/n on [0, 1]."""
    return (np.arange(n) + 0.5) / n


def kernel_samples(kernel: KernelSpec, n: int) -> np.ndarray:
    """Kernel values on the n x n midpoint grid, without the quadrature weight.

    Hadamard products and powers of kernels act on these samples; the 1/n
    weight is attached exactly once when a matrix operator is formed, since
    the kernel of a Hadamard power is k^alpha, not (k/n)^alpha.
    """
    if n < 1:
        raise DomainError(f"grid size must be >= 1, got {n}")
    xs = midpoints(n)
    values = kernel.formula.evaluate_grid(xs, xs)
    _check_samples(kernel.formula, values, xs, xs, f"the {n}-point midpoint grid")
    return values


def discretize(kernel: KernelSpec, n: int) -> NonNegativeMatrix:
    """Midpoint-rule matrix of the kernel operator: entry (a, b) = k(x_a, x_b)/n.

    Row sums approximate integrals, so the matrix spectral radius
    approximates the operator spectral radius.
    """
    return NonNegativeMatrix(kernel_samples(kernel, n) / n)


def kernel_geomean_check(kernels: Sequence[KernelSpec], n: int,
                         cfg: ToleranceConfig = DEFAULT_CONFIG,
                         tol: float = DEFAULT_CHAIN_TOL) -> ChainReport:
    """rho(geometric-mean kernel) vs rho(K1 ... Km)^{1/m} on the n-grid.

    The geometric mean is taken on kernel samples and the quadrature weight
    attached once, which makes the comparison an exact instance of the
    matrix geometric-mean chain.
    """
    if not kernels:
        raise DomainError("kernel_geomean_check: no kernels")
    m = len(kernels)
    samples = [kernel_samples(k, n) for k in kernels]
    geo = np.ones_like(samples[0])
    for s in samples:
        geo = geo * np.power(s, 1.0 / m)
    t1 = spectral_radius(NonNegativeMatrix(geo / n), cfg)
    prod = matmul_chain([NonNegativeMatrix(s / n) for s in samples])
    t2 = spectral_radius(prod, cfg)
    return build_report(
        ChainId.GEO_MEAN,
        {"n": n, "m": m, "formulas": [k.formula.source for k in kernels]},
        [
            ("rho(K1^(1/m) o ... o Km^(1/m))", t1.value, t1.converged),
            ("rho(K1 K2 ... Km)^{1/m}", t2.value ** (1.0 / m), t2.converged),
        ],
        tol,
    )


def truncation_sequence(spec: TruncatedMatrixSpec,
                        cfg: ToleranceConfig = DEFAULT_CONFIG) -> list[tuple[int, SpectralEstimate]]:
    """Spectral radius of each leading principal section of the infinite matrix.

    Sections are upper-left corners, so after zero-padding they increase in
    the elementwise order and the radius sequence is non-decreasing.
    """
    idx_max = np.arange(1, spec.sizes[-1] + 1, dtype=float)
    values = spec.formula.evaluate_grid(idx_max, idx_max)
    _check_samples(spec.formula, values, idx_max, idx_max, f"indices up to {spec.sizes[-1]}")
    out = []
    for size in spec.sizes:
        section = NonNegativeMatrix(values[:size, :size])
        out.append((size, spectral_radius(section, cfg)))
    return out
