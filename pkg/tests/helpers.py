"""Property-check helpers shared between module tests and the acceptance
suite.  Each returns a (worst, detail) pair so callers can assert with a
useful message."""

import math
import random

from trapcorr import eval_jet, eval_value, parse, reference_integral

# safe evaluation domains per grammar function
FD_DOMAINS = {
    "sin(x)": (-10.0, 10.0),
    "cos(x)": (-10.0, 10.0),
    "tan(x)": (-1.0, 1.0),
    "exp(x)": (-3.0, 3.0),
    "ln(x)": (0.5, 10.0),
    "log10(x)": (0.5, 10.0),
    "sqrt(x)": (0.5, 10.0),
}

# steps tuned per derivative order for the 4th-order stencils below
FD_STEPS = {1: 1e-3, 2: 2e-3, 3: 5e-3}


def fd_derivative(f, k: int, x: float) -> float:
    """4th-order central difference estimate of the k-th derivative."""
    h = FD_STEPS[k]
    if k == 1:
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)
    if k == 2:
        return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h)
                - f(x - 2 * h)) / (12 * h * h)
    return (-f(x + 3 * h) + 8 * f(x + 2 * h) - 13 * f(x + h) + 13 * f(x - h)
            - 8 * f(x - 2 * h) + f(x - 3 * h)) / (8 * h ** 3)


def worst_jet_fd_deviation(text: str, lo: float, hi: float, n: int = 1000,
                           seed: int = 20240817):
    """Largest |jet_k - fd_k| / scale over n random points, where scale
    is the jet's own magnitude floored at 1."""
    ast = parse(text)
    rng = random.Random(seed)
    pad = 3 * FD_STEPS[3]
    worst = 0.0
    where = None

    def f(t):
        return eval_value(ast, t)

    for _ in range(n):
        x = rng.uniform(lo + pad, hi - pad)
        jet = eval_jet(ast, x)
        scale = max(1.0, abs(jet.d0), abs(jet.d1), abs(jet.d2), abs(jet.d3))
        for k, got in ((1, jet.d1), (2, jet.d2), (3, jet.d3)):
            dev = abs(fd_derivative(f, k, x) - got) / scale
            if dev > worst:
                worst, where = dev, (x, k)
    return worst, where


def worst_additivity_defect(text: str, lo: float, hi: float, tol: float = 1e-12,
                            trials: int = 25, seed: int = 7):
    """Largest |I(a,c) + I(c,b) - I(a,b)| over random a < c < b."""
    ast = parse(text)
    rng = random.Random(seed)
    worst = 0.0
    where = None
    for _ in range(trials):
        a, c, b = sorted(rng.uniform(lo, hi) for _ in range(3))
        if b - a < 1e-3:
            continue
        whole = reference_integral(ast, a, b, tol).value
        split = (reference_integral(ast, a, c, tol).value
                 + reference_integral(ast, c, b, tol).value)
        defect = abs(split - whole)
        if defect > worst:
            worst, where = defect, (a, c, b)
    return worst, where


def composite_loglog_slope(errors_by_n) -> float:
    """Least-squares slope of log(error) against log(n)."""
    pts = [(math.log(n), math.log(e)) for n, e in errors_by_n if e > 0.0]
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    num = sum((px - mx) * (py - my) for px, py in pts)
    den = sum((px - mx) ** 2 for px, py in pts)
    return num / den
