"""A small, safe expression language for surface and map definitions.

Expressions are ordinary Python arithmetic over two variables (``t1``, ``t2`` by
default) using ``+ - * / **``, unary minus, numeric literals, ``pi`` and the
functions sin, cos, sinh, cosh, exp, log, sqrt, arcsinh and pow. The parsed
tree is whitelisted and then evaluated against one of two namespaces: a numeric
one (numpy arrays or hyper-dual numbers) or a symbolic one (sympy).
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from types import SimpleNamespace

import sympy as sp

from . import hyperdual as hd
from .errors import InputError

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt", "arcsinh", "pow")
CONSTANTS = ("pi",)

NUMERIC = SimpleNamespace(
    sin=hd.sin, cos=hd.cos, sinh=hd.sinh, cosh=hd.cosh, exp=hd.exp, log=hd.log,
    sqrt=hd.sqrt, arcsinh=hd.arcsinh, pow=hd.power, pi=hd.pi,
)

SYMBOLIC = SimpleNamespace(
    sin=sp.sin, cos=sp.cos, sinh=sp.sinh, cosh=sp.cosh, exp=sp.exp, log=sp.log,
    sqrt=sp.sqrt, arcsinh=sp.asinh, pow=sp.Pow, pi=sp.pi,
)

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


def _check(node, variables):
    if isinstance(node, ast.Expression):
        return _check(node.body, variables)
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
        _check(node.left, variables)
        _check(node.right, variables)
        return
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, _ALLOWED_UNARY):
        return _check(node.operand, variables)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return
    if isinstance(node, ast.Name):
        if node.id in variables or node.id in CONSTANTS:
            return
        raise InputError(f"unknown name {node.id!r}")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise InputError("only sin, cos, sinh, cosh, exp, log, sqrt, arcsinh, pow may be called")
        if node.keywords:
            raise InputError("keyword arguments are not allowed")
        expected = 2 if node.func.id == "pow" else 1
        if len(node.args) != expected:
            raise InputError(f"{node.func.id} takes {expected} argument(s)")
        for arg in node.args:
            _check(arg, variables)
        return
    raise InputError(f"unsupported syntax: {ast.dump(node)[:60]}")


@dataclass(frozen=True)
class Expression:
    """A validated scalar expression in the named variables."""

    source: str
    variables: tuple = ("t1", "t2")
    _code: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        src = str(self.source).replace("^", "**")
        try:
            tree = ast.parse(src.strip(), mode="eval")
        except SyntaxError as exc:
            raise InputError(f"cannot parse expression {self.source!r}: {exc.msg}") from None
        _check(tree, self.variables)
        object.__setattr__(self, "_code", compile(tree, "<expression>", "eval"))

    def __call__(self, *args, ns=NUMERIC):
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments")
        scope = {name: getattr(ns, name) for name in FUNCTIONS + CONSTANTS}
        scope.update(zip(self.variables, args))
        return eval(self._code, {"__builtins__": {}}, scope)

    def symbolic(self, symbols=None):
        symbols = symbols or sp.symbols(self.variables, real=True)
        return self(*symbols, ns=SYMBOLIC)


def compile_vector(sources, variables=("t1", "t2")):
    """Turn a list of expression strings into ``fn(t1, t2, ns) -> list``."""
    exprs = tuple(Expression(s, tuple(variables)) for s in sources)

    def fn(a, b, ns=NUMERIC):
        return [e(a, b, ns=ns) for e in exprs]

    fn.expressions = exprs
    return fn
