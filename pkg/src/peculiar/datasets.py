"""Built-in curve data."""

from __future__ import annotations

from math import gcd

import numpy as np

from . import f2
from .algebra import Matching
from .curves import Loop, Multicurve, Slope, assign_absolute_gradings, irrational, irrational_pairs, rational

# ends joined by the two strands of the (2,-3)-pretzel tangle
PRETZEL_MATCHING = Matching(((1, 2), (3, 4)), ("t", "t"))


def pretzel_2m3() -> Multicurve:
    """The immersed curve invariant of the (2,-3)-pretzel tangle.

    The two irrational components share their reference delta grading; the
    relative grading of the rational component is a convention (delta 0).
    """
    comps = (rational("1/2"), irrational(1, "0/1", (1, 4)), irrational(1, "0/1", (2, 3)))
    return assign_absolute_gradings(Multicurve(comps))


# Like b_1, but the horizontal run leaving b along p2 has two segments
# before it returns to b along q2.  Valid and wrapping-free, yet no
# extension over the minus algebra exists.
EVEN_SEGMENT = "loop b:p2 a:q32 c:p23 a:q2 b:p412 c:q14 a:p41 c:q214"


def even_segment_curve() -> Loop:
    from .textio import parse_loop

    return parse_loop(EVEN_SEGMENT)


CURVESETS = {"pretzel-2m3": pretzel_2m3}


def curveset(name: str) -> Multicurve:
    try:
        return CURVESETS[name]()
    except KeyError:
        raise KeyError(f"unknown curve set {name!r}; known: {', '.join(sorted(CURVESETS))}") from None


def slopes_up_to(n: int) -> list[Slope]:
    """Reduced slopes p/q with |p|, |q| <= n."""
    return sorted({Slope(p, q) for p in range(-n, n + 1) for q in range(0, n + 1)
                   if (p, q) != (0, 0) and gcd(p, q) == 1})


def generated_family(max_slope: int = 5, max_n: int = 3, n_random: int = 20,
                     max_dim: int = 3, seed: int = 0) -> list[tuple[str, Loop]]:
    """Labelled test curves: every rational and irrational curve up to the
    bounds, plus ``n_random`` rationals with seeded random local systems."""
    out: list[tuple[str, Loop]] = []
    slopes = slopes_up_to(max_slope)
    for s in slopes:
        out.append((f"r({s})", rational(s)))
        for pr in sorted({tuple(sorted(x)) for x in irrational_pairs(s)}):
            for n in range(1, max_n + 1):
                out.append((f"i{n}({s};{pr[0]},{pr[1]})", irrational(n, s, pr)))
    rng = np.random.default_rng(seed)
    for k in range(n_random):
        s = slopes[int(rng.integers(len(slopes)))]
        X = f2.random_invertible(int(rng.integers(1, max_dim + 1)), rng)
        out.append((f"r({s};X{k})", rational(s, X)))
    return out
