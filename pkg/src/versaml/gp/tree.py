"""Expression trees, the function set, protected evaluation and s-expression I/O."""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, ModelLoadError

# node results are clamped here so evaluation stays finite and squared errors
# of clamped values still fit in a double
VALUE_LIMIT = 1e150
EXP_LIMIT = 80.0
DIV_EPSILON = 1e-12


@dataclass(frozen=True)
class GpNode:
    """Immutable tree node: a function application, a variable or a constant."""

    kind: str
    name: str = ""
    index: int = 0
    value: float = 0.0
    children: tuple = ()

    @property
    def is_function(self):
        return self.kind == "function"

    @property
    def is_terminal(self):
        return self.kind != "function"

    def __str__(self):
        return to_sexpr(self)


def func(name, *children):
    return GpNode("function", name=name, children=tuple(children))


def var(index):
    return GpNode("variable", index=int(index))


def const(value):
    return GpNode("constant", value=float(value))


def _clamp(values):
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        values = values.reshape(1)
    np.nan_to_num(values, copy=False, nan=0.0, posinf=VALUE_LIMIT, neginf=-VALUE_LIMIT)
    return np.clip(values, -VALUE_LIMIT, VALUE_LIMIT, out=values)


def protected_div(a, b):
    small = np.abs(b) < DIV_EPSILON
    return np.where(small, 1.0, a / np.where(small, 1.0, b))


def protected_exp(a):
    return np.exp(np.minimum(a, EXP_LIMIT))


def protected_pow(a, b):
    bad = (a < 0) & (b != np.round(b))
    out = np.power(np.where(bad, 1.0, a), np.where(bad, 1.0, b))
    return np.where(bad, 1.0, out)


@dataclass(frozen=True)
class GpFunction:
    name: str
    arity: int
    fn: object = field(compare=False)


class FunctionSet:
    """Named functions available to evolved programs.

    The default set is ``+ - * / sin cos exp pow`` where ``/``, ``exp`` and
    ``pow`` are protected. :meth:`add` registers further functions; they
    receive numpy arrays and their results are clamped like the built-ins.
    """

    def __init__(self, functions=None):
        self._functions = {}
        for f in functions if functions is not None else _DEFAULT_FUNCTIONS:
            self.add(f.name, f.arity, f.fn)

    def add(self, name, arity, fn):
        if name in self._functions:
            raise ConfigurationError(f"function {name!r} is already defined")
        if arity < 1:
            raise ConfigurationError("functions need at least one argument")
        if not name or any(ch in name for ch in "() \t\n") or re.fullmatch(r"x\d+", name):
            raise ConfigurationError(f"invalid function name {name!r}")
        self._functions[name] = GpFunction(name, int(arity), fn)
        return self

    def __getitem__(self, name):
        return self._functions[name]

    def __contains__(self, name):
        return name in self._functions

    def __iter__(self):
        return iter(self._functions.values())

    def __len__(self):
        return len(self._functions)

    @property
    def names(self):
        return list(self._functions)

    def with_arity(self, arity):
        return [f for f in self._functions.values() if f.arity == arity]

    def subset(self, names):
        return FunctionSet([self._functions[n] for n in names])


_DEFAULT_FUNCTIONS = [
    GpFunction("+", 2, np.add),
    GpFunction("-", 2, np.subtract),
    GpFunction("*", 2, np.multiply),
    GpFunction("/", 2, protected_div),
    GpFunction("sin", 1, np.sin),
    GpFunction("cos", 1, np.cos),
    GpFunction("exp", 1, protected_exp),
    GpFunction("pow", 2, protected_pow),
]

DEFAULT_FUNCTIONS = FunctionSet()


def eval_batch(tree, inputs, functions=DEFAULT_FUNCTIONS):
    """Evaluate ``tree`` on every row of ``inputs`` (shape (N, variables))."""
    inputs = np.asarray(inputs, dtype=float)
    with np.errstate(all="ignore"):
        return _eval(tree, inputs, functions)


def _eval(node, inputs, functions):
    if node.kind == "constant":
        return np.full(inputs.shape[0], node.value)
    if node.kind == "variable":
        return inputs[:, node.index].copy()
    args = [_eval(c, inputs, functions) for c in node.children]
    return _clamp(functions[node.name].fn(*args))


def eval_tree(tree, variables, functions=DEFAULT_FUNCTIONS):
    """Scalar evaluation at one point; never NaN or infinite for finite input."""
    x = np.asarray(variables, dtype=float).reshape(1, -1)
    return float(eval_batch(tree, x, functions)[0])


def node_count(tree):
    return 1 + sum(node_count(c) for c in tree.children)


def depth(tree):
    """Edges on the longest root-to-leaf path (a lone terminal has depth 0)."""
    if not tree.children:
        return 0
    return 1 + max(depth(c) for c in tree.children)


def max_variable(tree):
    if tree.kind == "variable":
        return tree.index
    return max((max_variable(c) for c in tree.children), default=-1)


def nodes_with_paths(tree, path=()):
    """Preorder list of ``(path, node)``; a path is a tuple of child positions."""
    out = [(path, tree)]
    for i, c in enumerate(tree.children):
        out.extend(nodes_with_paths(c, path + (i,)))
    return out


def subtree_at(tree, path):
    for i in path:
        tree = tree.children[i]
    return tree


def replace_at(tree, path, replacement):
    if not path:
        return replacement
    i = path[0]
    children = list(tree.children)
    children[i] = replace_at(children[i], path[1:], replacement)
    return GpNode(tree.kind, tree.name, tree.index, tree.value, tuple(children))


def format_constant(value):
    text = repr(float(value))
    return text if any(ch in text for ch in ".e") or "inf" in text or "nan" in text else text + ".0"


def to_sexpr(tree):
    """``(+ (* 2.0 x0) 1.0)`` style text; parse with :func:`parse_sexpr`."""
    if tree.kind == "constant":
        return format_constant(tree.value)
    if tree.kind == "variable":
        return f"x{tree.index}"
    return "(" + " ".join([tree.name] + [to_sexpr(c) for c in tree.children]) + ")"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_VARIABLE = re.compile(r"x(\d+)")


def parse_sexpr(text, functions=DEFAULT_FUNCTIONS, wildcard=False):
    """Parse s-expression text into a tree.

    With ``wildcard`` the token ``?`` is accepted as a match-anything leaf
    (used for penalty patterns).
    """
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ModelLoadError("empty expression")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ModelLoadError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise ModelLoadError("unexpected end of expression")
            name = tokens[pos]
            pos += 1
            if name not in functions:
                raise ModelLoadError(f"unknown function {name!r}")
            children = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(parse())
            if pos >= len(tokens):
                raise ModelLoadError("missing ')'")
            pos += 1
            if len(children) != functions[name].arity:
                raise ModelLoadError(f"{name} takes {functions[name].arity} arguments, "
                                     f"got {len(children)}")
            return func(name, *children)
        if tok == ")":
            raise ModelLoadError("unexpected ')'")
        if wildcard and tok == "?":
            return GpNode("wildcard")
        m = _VARIABLE.fullmatch(tok)
        if m:
            return var(int(m.group(1)))
        try:
            value = float(tok)
        except ValueError:
            raise ModelLoadError(f"bad token {tok!r}") from None
        if not math.isfinite(value):
            raise ModelLoadError(f"non-finite constant {tok!r}")
        return const(value)

    tree = parse()
    if pos != len(tokens):
        raise ModelLoadError("trailing tokens after expression")
    return tree
