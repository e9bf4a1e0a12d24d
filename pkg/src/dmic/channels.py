"""Registry of the named example channels.

Names accept numeric parameters either as ``example2(0.05)`` or
``example2:0.05``; ``example4`` takes ``eps,delta``.
"""

from __future__ import annotations

import re

import numpy as np

from .channel import Dmic

DEFAULT_EPS = 0.1
DEFAULT_DELTA = 0.2

# y2' = x1 xor y2, indexed [x1][y2]
EXAMPLE5_Y2_MAP = np.array([[0, 1], [1, 0]])


def _bsc(eps: float) -> np.ndarray:
    return np.array([[1 - eps, eps], [eps, 1 - eps]])


def _check_param(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value} outside [0, 1]")
    return value


def from_functions(nx1, nx2, ny1, ny2, law, name="", description="") -> Dmic:
    """Build a tensor from ``law(x1, x2) -> {(y1, y2): prob}``."""
    t = np.zeros((nx1, nx2, ny1, ny2))
    for x1 in range(nx1):
        for x2 in range(nx2):
            for (y1, y2), p in law(x1, x2).items():
                t[x1, x2, y1, y2] += p
    return Dmic(t, name=name, description=description)


def compose_weak(py2: np.ndarray, p_prime: np.ndarray, name: str = "", description: str = "") -> Dmic:
    """t[x1,x2,y1,y2] = p(y2|x2) p'(y1|x1,y2) from arrays (x2,y2) and (x1,y2,y1)."""
    t = np.einsum("bd,adc->abcd", np.asarray(py2, float), np.asarray(p_prime, float))
    return Dmic(t, name=name, description=description)


def example1() -> Dmic:
    return from_functions(
        2, 2, 2, 2,
        lambda x1, x2: {(x1 * x2, x2): 1.0},
        name="example1",
        description="binary multiplier: y1 = x1*x2, y2 = x2",
    )


def example2(eps: float = DEFAULT_EPS) -> Dmic:
    eps = _check_param("eps", eps)
    p_prime = np.zeros((2, 2, 2))
    for x1 in range(2):
        for y2 in range(2):
            p_prime[x1, y2, x1 ^ y2] = 1.0
    return compose_weak(
        _bsc(eps), p_prime,
        name=f"example2({eps:g})",
        description="y1 = x1 xor y2, y2 = x2 xor Bern(eps)",
    )


def example3(eps: float = DEFAULT_EPS) -> Dmic:
    eps = _check_param("eps", eps)
    p_prime = np.zeros((2, 2, 2))
    for x1 in range(2):
        for y2 in range(2):
            p_prime[x1, y2, x1 * y2] = 1.0
    return compose_weak(
        _bsc(eps), p_prime,
        name=f"example3({eps:g})",
        description="y1 = x1*y2, y2 = x2 xor Bern(eps)",
    )


def example4(eps: float = DEFAULT_EPS, delta: float = DEFAULT_DELTA) -> Dmic:
    eps = _check_param("eps", eps)
    delta = _check_param("delta", delta)
    # y1 symbols 0, 1 and the erasure e encoded as 2
    p_prime = np.zeros((2, 2, 3))
    for x1 in range(2):
        for y2 in range(2):
            p_prime[x1, y2, x1 ^ y2] = 1.0 - delta
            p_prime[x1, y2, 2] = delta
    return compose_weak(
        _bsc(eps), p_prime,
        name=f"example4({eps:g},{delta:g})",
        description="y1 = x1 xor y2 erased w.p. delta (e=2), y2 = x2 xor Bern(eps)",
    )


def example5() -> Dmic:
    py2 = np.array([[0.1, 0.9], [0.9, 0.1]])
    p_prime = np.zeros((2, 2, 2))
    for x1 in range(2):
        for y2 in range(2):
            p_prime[x1, y2] = [0.75, 0.25] if x1 == y2 else [0.0, 1.0]
    return compose_weak(py2, p_prime, name="example5", description="p(y2|x2) flips w.p. 0.9; p'(y1=1|x1,y2) is .25 if x1 = y2 else 1")


def example6() -> Dmic:
    return from_functions(
        2, 2, 2, 2,
        lambda x1, x2: {(x1 * x2, x1 ^ x2): 1.0},
        name="example6",
        description="y1 = x1*x2, y2 = x1 xor x2",
    )


APPENDIX_F = np.array([[0.1, 0.3], [0.5, 0.25]])  # p(y1=1 | x1=i, x2=j)
APPENDIX_G = np.array([0.1, 0.5])  # p(y2=1 | x2=j)


def appendix() -> Dmic:
    """One-sided channel given only by its marginals; outputs coupled conditionally independently.

    Only the two marginal channels are pinned down, so the joint law is taken as
    p(y1|x1,x2) p(y2|x2). No coupling makes the channel degraded, because the
    marginal equations themselves force a negative entry.
    """
    py1 = np.stack([1 - APPENDIX_F, APPENDIX_F], axis=-1)
    py2 = np.stack([1 - APPENDIX_G, APPENDIX_G], axis=-1)
    t = np.einsum("abc,bd->abcd", py1, py2)
    return Dmic(t, name="appendix", description="one-sided channel with f/g marginals")


BUILTINS = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "example4": example4,
    "example5": example5,
    "example6": example6,
    "appendix": appendix,
}

_NAME_RE = re.compile(r"^\s*([a-z0-9]+)\s*(?:\(([^)]*)\)|:(.*))?\s*$")


def builtin_channel(name: str) -> Dmic:
    m = _NAME_RE.match(name)
    if not m or m.group(1) not in BUILTINS:
        raise KeyError(f"unknown built-in channel {name!r}; known: {', '.join(BUILTINS)}")
    raw = m.group(2) if m.group(2) is not None else m.group(3)
    params = [float(s) for s in raw.split(",") if s.strip()] if raw else []
    try:
        return BUILTINS[m.group(1)](*params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {m.group(1)}: {params}") from exc
