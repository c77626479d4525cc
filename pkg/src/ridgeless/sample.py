"""Random members of the interpolant family, and counterexample generation.

Members are built per free block by drawing one tangent slope per block
knot from its admissible bracket and taking, on every subinterval, the
upper (convex block) or lower (concave block) envelope of the two knot
tangents.  The construction stays inside the family by design, spans the
chord and the support-line extremes, and is deterministic in
(seed, knobs, dataset).

No distribution on the family is canonical; the uniform-on-bracket draw
here is an artifact choice, not a derived fact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .characterize import Characterization
from .plfun import PiecewiseLinear, breakpoints_in, evaluate, from_knots

# draw(rng, knot_index, lo, hi) -> slope in [lo, hi]
TangentDraw = Callable[[np.random.Generator, int, float, float], float]

# relative margin below which a tangent crossing collapses onto the chord
_CROSSING_MARGIN = 1e-12


@dataclass(frozen=True)
class SampleKnobs:
    """Sampling controls.

    ``pin="chord"`` forces every tangent to its chord-side bracket end and
    reproduces the connect-the-dots interpolant; ``pin="support"`` pins the
    block-edge tangents to the support-line slopes (for a single-gap block
    this is exactly the support-line envelope member).  ``tangent_draw``
    replaces the default uniform draw on the closed bracket.
    """

    pin: Optional[str] = None
    tangent_draw: Optional[TangentDraw] = None


def _uniform_draw(rng: np.random.Generator, knot: int, lo: float, hi: float) -> float:
    return float(rng.uniform(lo, hi))


def sample_member(
    ch: Characterization, seed: int, knobs: SampleKnobs = SampleKnobs()
) -> PiecewiseLinear:
    """Draw one member of the family characterized by ``ch``."""
    if knobs.pin not in (None, "chord", "support"):
        raise ValueError(f"unknown pin mode {knobs.pin!r}")
    rng = np.random.default_rng(int(seed) % 2**64)
    draw = knobs.tangent_draw or _uniform_draw
    d = ch.dataset
    s = ch.profile.slopes
    xs, ys = d.xs, d.ys
    if not ch.blocks:
        return ch.f_D

    knots: list[tuple[float, float]] = list(d.points)
    for blk in ch.blocks:
        a, b = blk.knot_range
        tangents: dict[int, float] = {}
        for j in range(a, b + 1):
            lo, hi = sorted((s[j - 2], s[j - 1]))
            if knobs.pin == "chord":
                t = s[j - 1]
            elif knobs.pin == "support":
                t = s[a - 2] if j == a else (s[b - 1] if j == b else s[j - 1])
            else:
                t = min(max(draw(rng, j, lo, hi), lo), hi)
            tangents[j] = t
        for j in range(a, b):
            knot = _tangent_crossing(
                float(xs[j - 1]), float(ys[j - 1]), tangents[j],
                float(xs[j]), float(ys[j]), tangents[j + 1],
            )
            if knot is not None:
                knots.append(knot)
    knots.sort()
    return from_knots(knots, s[0], s[-1])


def _tangent_crossing(
    xj: float, yj: float, tj: float, xk: float, yk: float, tk: float
) -> tuple[float, float] | None:
    """Intersection of the two knot tangents, or None when it degenerates.

    A crossing at (or numerically indistinguishable from) either endpoint
    means the envelope of the tangents is just the chord there.
    """
    denom = tj - tk
    if abs(denom) <= _CROSSING_MARGIN * max(1.0, abs(tj), abs(tk)):
        return None
    xi = ((yk - yj) + tj * xj - tk * xk) / denom
    margin = _CROSSING_MARGIN * (xk - xj)
    if xi <= xj + margin or xi >= xk - margin:
        return None
    return (xi, yj + tj * (xi - xj))


def perturb_to_nonmember(
    ch: Characterization, f: PiecewiseLinear, seed: int
) -> PiecewiseLinear:
    """Turn the member ``f`` into an interpolant outside the family.

    Preferred move: displace one of ``f``'s interior block kinks to just
    outside the envelope (above the chord on convex blocks, below on
    concave ones).  Members without usable kinks get a fresh kink at a
    gap midpoint; two-point datasets get a kink beyond the data range,
    which breaks the required affine tails.
    """
    rng = np.random.default_rng(int(seed) % 2**64)
    d = ch.dataset
    xs, ys = d.xs, d.ys
    s = ch.profile.slopes
    m = d.m
    f_d = ch.f_D

    if m == 2:
        xk = float(xs[-1]) + 1.0
        bump = 1.0 + float(rng.uniform(0.5, 1.5))
        knots = list(d.points) + [(xk, float(evaluate(f_d, xk)))]
        return from_knots(knots, s[0], s[-1] + bump)

    inner: list[tuple[float, float, int]] = []  # (xi, value, block sign)
    for blk in ch.blocks:
        a, b = blk.knot_range
        data_x = set(float(x) for x in xs[a - 1 : b])
        for xi, _ in breakpoints_in(f, float(xs[a - 1]), float(xs[b - 1])):
            if xi not in data_x:
                inner.append((xi, float(evaluate(f, xi)), blk.sign))

    def bumped(x: float, sigma: int) -> tuple[float, float]:
        cv = float(evaluate(f_d, x))
        delta = (0.5 + float(rng.uniform())) * 0.5 * (1.0 + abs(cv))
        return (x, cv + sigma * delta)

    if inner:
        pick = int(rng.integers(len(inner)))
        knots = list(d.points)
        for k, (xi, v, sigma) in enumerate(inner):
            knots.append(bumped(xi, sigma) if k == pick else (xi, v))
    elif ch.blocks:
        blk = ch.blocks[int(rng.integers(len(ch.blocks)))]
        a, b = blk.knot_range
        j = int(rng.integers(a, b))
        mid = 0.5 * (float(xs[j - 1]) + float(xs[j]))
        knots = list(d.points) + [bumped(mid, blk.sign)]
    else:
        j = int(rng.integers(1, m))
        mid = 0.5 * (float(xs[j - 1]) + float(xs[j]))
        sigma = 1 if rng.uniform() < 0.5 else -1
        knots = list(d.points) + [bumped(mid, sigma)]
    knots.sort()
    return from_knots(knots, s[0], s[-1])
