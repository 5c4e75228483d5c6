"""Shared generators for randomized test corpora."""

import numpy as np

from lorentzw import exprlang

# building blocks that stay finite and smooth on [-1, 1]
_LEAVES = ["t", "2", "0.5", "3.25", "-1.5"]
_UNARY = [
    "sin({})", "cos({})", "exp({}/3)", "sinh({}/2)", "cosh({}/2)", "tanh({})",
    "sqrt(({})^2+1)", "ln(({})^2+2)", "-({})",
]
_BINARY = ["({})+({})", "({})-({})", "({})*({})", "({})/(({})^2+1)", "({})^2", "({})^3"]


def random_expression(rng, depth=3):
    """Expression text smooth on [-1, 1]; bounded growth keeps derivatives moderate."""
    if depth == 0 or rng.random() < 0.25:
        return _LEAVES[rng.integers(len(_LEAVES))]
    if rng.random() < 0.5:
        return _UNARY[rng.integers(len(_UNARY))].format(random_expression(rng, depth - 1))
    template = _BINARY[rng.integers(len(_BINARY))]
    args = [random_expression(rng, depth - 1) for _ in range(template.count("{}"))]
    return template.format(*args)


def expression_corpus(n=200, seed=20241015):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        text = random_expression(rng)
        if exprlang.depends_on_t(exprlang.parse(text)):
            out.append(text)
    return out


def fd_bound(e, t, h):
    """Central-difference error bound C h^2 from the third derivative, plus rounding."""
    third = exprlang.differentiate(exprlang.differentiate(exprlang.differentiate(e)))
    worst = max(abs(exprlang.evaluate(third, s)) for s in np.linspace(t - h, t + h, 5))
    scale = max(abs(exprlang.evaluate(e, s)) for s in (t - h, t, t + h))
    return 2.0 * worst * h * h / 6.0 + 1e-14 * (1 + scale) / h


def random_type2_specs(n=20, seed=7):
    """(f, g, h) texts with f bounded away from zero on [-1, 1]."""
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(n):
        a, b, c = rng.uniform(0.2, 2.0, 3)
        f = f"{a:.3f}+0.1*sin({b:.3f}*t)"
        g = f"{c:.3f}*t+{rng.uniform(-1, 1):.3f}*t^2"
        h = f"exp({rng.uniform(-1, 1):.3f}*t)-{rng.uniform(0, 1):.3f}"
        specs.append((f, g, h))
    return specs


# (text, byte offset of the error, exception name)
MALFORMED = [
    ("t+*2", 2, "ExprSyntaxError"),
    ("(t", 2, "ExprSyntaxError"),
    ("t)", 1, "ExprSyntaxError"),
    ("2**t", 2, "ExprSyntaxError"),
    ("sin t", 4, "ExprSyntaxError"),
    ("sin()", 4, "ExprSyntaxError"),
    ("t^", 2, "ExprSyntaxError"),
    ("foo(t)", 0, "UnknownIdentifier"),
    ("t + x", 4, "UnknownIdentifier"),
    ("3t", 1, "ExprSyntaxError"),
    ("((t)", 4, "ExprSyntaxError"),
    ("t+", 2, "ExprSyntaxError"),
    ("exp(t", 5, "ExprSyntaxError"),
    ("  *t", 2, "ExprSyntaxError"),
    ("t # 2", 2, "ExprSyntaxError"),
    ("abs(t,2)", 5, "ExprSyntaxError"),
    ("sqrt(t))", 7, "ExprSyntaxError"),
    ("t^^2", 2, "ExprSyntaxError"),
    ("-", 1, "ExprSyntaxError"),
    ("t/ )", 3, "ExprSyntaxError"),
]
