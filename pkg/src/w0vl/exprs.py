"""Tiny whitelisted evaluator for integer/boolean expressions in data files.

Supports integer literals, named variables, + - * // % and exact /, chained
comparisons, ``and``/``or``/``not`` and parentheses.  Anything else is
rejected, so the shipped catalog files stay declarative.
"""

from __future__ import annotations

import ast
from fractions import Fraction


class ExprError(ValueError):
    pass


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.FloorDiv: lambda a, b: a // b,
    ast.Mod: lambda a, b: a % b,
}

_CMPOPS = {
    ast.Lt: lambda a, b: a < b,
    ast.LtE: lambda a, b: a <= b,
    ast.Gt: lambda a, b: a > b,
    ast.GtE: lambda a, b: a >= b,
    ast.Eq: lambda a, b: a == b,
    ast.NotEq: lambda a, b: a != b,
}


def _exact_div(a, b):
    q = Fraction(a, b)
    if q.denominator != 1:
        raise ExprError(f"non-exact division {a}/{b}")
    return int(q)


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or isinstance(node.value, int):
            return node.value
        raise ExprError(f"bad literal {node.value!r}")
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        raise ExprError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        if isinstance(node.op, ast.Not):
            return not v
        raise ExprError("bad unary operator")
    if isinstance(node, ast.BinOp):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        if isinstance(node.op, ast.Div):
            return _exact_div(a, b)
        fn = _BINOPS.get(type(node.op))
        if fn is None:
            raise ExprError("bad binary operator")
        return fn(a, b)
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env)
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env)
            fn = _CMPOPS.get(type(op))
            if fn is None:
                raise ExprError("bad comparison")
            if not fn(left, right):
                return False
            left = right
        return True
    if isinstance(node, ast.BoolOp):
        if isinstance(node.op, ast.And):
            return all(_eval(v, env) for v in node.values)
        return any(_eval(v, env) for v in node.values)
    raise ExprError(f"unsupported syntax: {ast.dump(node)}")


def eval_expr(text: str, env: dict):
    """Evaluate an expression against env; returns int or bool."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ExprError(f"syntax error in {text!r}: {e}") from None
    return _eval(tree, env)


def eval_int(text: str, env: dict) -> int:
    v = eval_expr(text, env)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ExprError(f"{text!r} is not an integer expression")
    return v


def eval_bool(text: str, env: dict) -> bool:
    v = eval_expr(text, env)
    if not isinstance(v, bool):
        raise ExprError(f"{text!r} is not a boolean expression")
    return v


def parse_node_list(text: str, env: dict) -> list:
    """Parse comma separated node items: ints, exprs, and a..b / a..b..step ranges."""
    out: list[int] = []
    text = text.strip()
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if ".." in item:
            parts = item.split("..")
            if len(parts) == 2:
                a, b, step = eval_int(parts[0], env), eval_int(parts[1], env), 1
            elif len(parts) == 3:
                a, b = eval_int(parts[0], env), eval_int(parts[1], env)
                step = eval_int(parts[2], env)
            else:
                raise ExprError(f"bad range {item!r}")
            out.extend(range(a, b + 1, step))
        else:
            out.append(eval_int(item, env))
    return out
