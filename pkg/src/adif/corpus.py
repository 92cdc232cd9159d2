"""Deterministic formula and sentence corpora for the property suites."""

from __future__ import annotations

import random

from .formulas import Formula, free_vars, parse_formula
from .structures import Structure


def corpus_structures() -> list[tuple[str, Structure]]:
    return [
        ("eq2", Structure.make(["0", "1"])),
        ("mix2", Structure.make(["0", "1"], [
            ("P", 1, [("0",)]),
            ("R", 2, [("0", "1"), ("1", "0")]),
        ])),
        ("diag2", Structure.make(["0", "1"], [
            ("P", 1, [("1",)]),
            ("R", 2, [("0", "0"), ("1", "1"), ("1", "0")]),
        ])),
    ]


_MATRICES_BY_VARS = {
    ("x",): ["P(x)", "~P(x)", "x = x", "P(x) | ~P(x)", "P(x) & ~P(x)"],
    ("x", "y"): [
        "x = y", "~(x = y)", "R(x,y)", "~R(x,y)", "R(y,x)",
        "P(x) & R(x,y)", "P(y) | ~R(x,y)", "x = y | R(x,y)",
        "(x = y | P(x)) & R(y,x)", "~(R(x,y) & R(y,x))",
    ],
    ("x", "y", "z"): [
        "x = y & y = z", "R(x,y) | P(z)", "~(x = y) | R(y,z)",
        "P(x) & ~R(z,y)", "(x = z | y = z) & R(x,y)",
        "R(x,z) & (P(y) | z = x)", "~R(z,z) | x = y",
    ],
}

_PREFIXES = {
    1: ["E[+{}] x", "A[+{}] x"],
    2: [
        "E[+{}] x . E[+{x}] y", "E[+{}] x . A[+{}] y", "E[+{}] x . A[+{x}] y",
        "A[+{}] x . E[+{}] y", "A[+{}] x . E[+{x}] y", "A[+{}] x . A[+{}] y",
        "E[+{}] x . E[+{}] y", "A[+{}] x . A[+{x}] y",
    ],
    3: [
        "E[+{}] x . A[+{}] y . E[+{x}] z",
        "E[+{}] x . A[+{x}] y . E[+{x,y}] z",
        "A[+{}] x . E[+{}] y . A[+{y}] z",
        "A[+{}] x . E[+{x}] y . E[+{}] z",
        "E[+{}] x . E[+{x}] y . A[+{x,y}] z",
        "A[+{}] x . A[+{}] y . E[+{y}] z",
        "E[+{}] x . A[+{}] y . A[+{x}] z",
        "A[+{}] x . E[+{x}] y . A[+{}] z",
    ],
}

# Shapes that stress the corners: vacuous quantifiers (skip moves), bare -{}
# constraints on vacuous binders, and constraint variables that never reach
# the matrix.
_SPECIAL_SENTENCES = [
    "E[+{}] x . A[-{}] w . P(x)",
    "A[+{}] x . E[-{}] w . ~P(x)",
    "E[+{}] w . E[+{}] x . A[+{w}] y . R(x,y)",
    "E[+{}] w . E[+{w}] x . A[+{w}] y . x = y",
    "A[+{}] w . E[+{}] x . A[+{w}] y . (x = y | P(w))",
    "E[+{}] x . A[+{x}] y . P(y)",
    "E[+{}] x . A[+{x}] y . y = y",
    "A[+{}] x . E[+{}] y . true",
    "E[+{}] x . false",
]


def prenex_sentences(max_quantifiers: int = 3, per_prefix: int = 5,
                     seed: int = 7) -> list[Formula]:
    """A deterministic spread of prenex sentences; >= 200 with the defaults
    once paired with the corpus structures."""
    rng = random.Random(seed)
    out: list[Formula] = []
    for count in range(1, max_quantifiers + 1):
        names = tuple("xyz"[:count])
        matrices = _MATRICES_BY_VARS[names]
        for prefix in _PREFIXES[count]:
            chosen = rng.sample(matrices, min(per_prefix, len(matrices)))
            for matrix in chosen:
                out.append(parse_formula(f"{prefix} . ({matrix})"))
    for text in _SPECIAL_SENTENCES:
        out.append(parse_formula(text))
    for phi in out:
        assert free_vars(phi).is_empty(), f"corpus sentence is open: {phi}"
    return out


def quantifier_free_pool() -> list[Formula]:
    """Connective-heavy formulae over {x, y} for the Boolean-law checks."""
    texts = [
        "true", "false", "P(x)", "x = y", "R(x,y)", "~P(x)", "~(x = y)",
        "P(x) & R(x,y)", "P(x) | ~R(x,y)", "~(P(x) & x = y)",
        "R(x,y) | (P(y) & x = y)",
    ]
    return [parse_formula(t) for t in texts]


def quantified_pool() -> list[Formula]:
    """Prefix-over-matrix formulae with free variables among {x, y}."""
    texts = [
        "E z . R(x,z)", "A[+{}] z . (R(x,z) | P(z))", "E[-{x}] z . z = y",
        "A[+{x}] z . ~(z = y)", "E[+{}] z . A[+{z}] w . (R(z,w) | x = y)",
        "A[+{}] z . E[+{x}] w . R(z,w)",
    ]
    return [parse_formula(t) for t in texts]
