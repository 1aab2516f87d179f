"""Discrete-time dynamics of a greedy setpoint-tracking local controller.

The controller receives a requested setpoint, implements the feasible point
closest to request-plus-carried-error, and carries the remainder forward:

    e[n+1] = e[n] + x[n] - y[n],    y[n] = proj(S[n], e[n] + x[n]).

Two prediction disciplines are supported.  With perfect prediction the
advertisement for step n is the hull of S[n] itself.  With persistent
prediction the advertisement is the hull of the previous feasible set, and
the natural state variable becomes the modified request z[n] = e[n] + x[n]:

    z[n+1] = z[n] + x[n+1] - proj(S[n], z[n]),    e[n] = z[n] - x[n].

All arithmetic is exact; the recursion above holds as an identity of
rationals in every trace.
"""

from __future__ import annotations

import csv
import hashlib
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Protocol, Sequence, Union

from .geometry import (
    ORIGIN,
    ConvexPolygon,
    Point2,
    PointSet,
    dist2,
    project_convex_polygon,
    project_point_set,
)
from .operators import FeasibleSet, Mode, feasible_hull


class InfeasibleRequestError(ValueError):
    """The requested setpoint lies outside the advertised convex set."""


def project_feasible(feasible: FeasibleSet, z: Point2) -> Point2:
    """Closest feasible point: exact over finite sets and convex polygons."""
    if isinstance(feasible, PointSet):
        return project_point_set(feasible, z)
    return project_convex_polygon(feasible, z)


@dataclass(frozen=True)
class ControllerState:
    """Controller memory between steps.

    ``modified_request`` is only used in persistent mode, where it carries
    z[n] = e[n] + x[n] once the first request has been received.
    """

    error: Point2 = ORIGIN
    modified_request: Optional[Point2] = None
    step: int = 0

    def start_persistent(self, first_request: Point2) -> "ControllerState":
        return replace(self, modified_request=self.error + first_request)


def step_perfect(
    state: ControllerState, request: Point2, feasible: FeasibleSet
) -> tuple[Point2, ControllerState]:
    """One greedy step under perfect prediction.

    The request must lie in the hull of the current feasible set; a
    violation is a protocol error, not something to clamp silently.
    """
    if not feasible_hull(feasible).contains_point(request):
        raise InfeasibleRequestError(f"request {request} outside advertised set")
    target = state.error + request
    implemented = project_feasible(feasible, target)
    next_state = ControllerState(
        error=target - implemented,
        modified_request=None,
        step=state.step + 1,
    )
    return implemented, next_state


def step_persistent(
    state: ControllerState, next_request: Point2, feasible: FeasibleSet
) -> tuple[Point2, ControllerState]:
    """One greedy step under persistent prediction.

    ``feasible`` is the set valid now; its hull is the advertisement from
    which ``next_request`` was chosen.  Returns the setpoint implemented now
    and the state carrying the updated modified request.
    """
    if state.modified_request is None:
        raise ValueError("persistent state not initialized; call start_persistent first")
    if not feasible_hull(feasible).contains_point(next_request):
        raise InfeasibleRequestError(f"request {next_request} outside advertised set")
    z = state.modified_request
    implemented = project_feasible(feasible, z)
    z_next = z + next_request - implemented
    next_state = ControllerState(
        error=z_next - next_request,
        modified_request=z_next,
        step=state.step + 1,
    )
    return implemented, next_state


@dataclass(frozen=True)
class StepRecord:
    """One step of a trace; ``error`` is the accumulated error entering the step."""

    step: int
    feasible: FeasibleSet
    advertised: ConvexPolygon
    requested: Point2
    implemented: Point2
    error: Point2


@dataclass
class ControllerTrace:
    mode: Mode
    records: list[StepRecord] = field(default_factory=list)
    initial_error: Point2 = ORIGIN

    @property
    def final_error(self) -> Point2:
        if not self.records:
            return self.initial_error
        last = self.records[-1]
        return last.error + last.requested - last.implemented

    def errors(self) -> list[Point2]:
        """Accumulated errors e[0..N], including the post-horizon value."""
        return [r.error for r in self.records] + [self.final_error]

    def max_error_norm2(self) -> Fraction:
        return max(e.norm2() for e in self.errors())

    def average_requested(self) -> Point2:
        if not self.records:
            raise ValueError("empty trace has no averages")
        inv = Fraction(1, len(self.records))
        return Point2(
            sum((r.requested.x for r in self.records), Fraction(0)) * inv,
            sum((r.requested.y for r in self.records), Fraction(0)) * inv,
        )

    def average_implemented(self) -> Point2:
        if not self.records:
            raise ValueError("empty trace has no averages")
        inv = Fraction(1, len(self.records))
        return Point2(
            sum((r.implemented.x for r in self.records), Fraction(0)) * inv,
            sum((r.implemented.y for r in self.records), Fraction(0)) * inv,
        )

    def write_csv(self, fh) -> None:
        """Exact trace dump: rational strings plus float renderings."""
        writer = csv.writer(fh)
        writer.writerow(
            [
                "n", "set_id",
                "x_p", "x_q", "y_p", "y_q", "e_p", "e_q",
                "x_p_float", "x_q_float", "y_p_float", "y_q_float",
                "e_p_float", "e_q_float",
            ]
        )
        for r in self.records:
            writer.writerow(
                [
                    r.step,
                    feasible_set_id(r.feasible),
                    str(r.requested.x), str(r.requested.y),
                    str(r.implemented.x), str(r.implemented.y),
                    str(r.error.x), str(r.error.y),
                    float(r.requested.x), float(r.requested.y),
                    float(r.implemented.x), float(r.implemented.y),
                    float(r.error.x), float(r.error.y),
                ]
            )


def feasible_set_id(feasible: FeasibleSet) -> str:
    """Short stable identifier of a feasible set's exact contents."""
    if isinstance(feasible, PointSet):
        text = "ps:" + ";".join(f"{p.x},{p.y}" for p in feasible.points)
    else:
        text = "cp:" + ";".join(f"{p.x},{p.y}" for p in feasible.vertices)
    return hashlib.sha256(text.encode("ascii")).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Request policies
# ---------------------------------------------------------------------------


class RequestPolicy(Protocol):
    def __call__(self, advertised: ConvexPolygon, error: Point2, rng: random.Random) -> Point2:
        ...


def fixed_request(point: Point2) -> RequestPolicy:
    """Always request the same setpoint."""

    def policy(advertised: ConvexPolygon, error: Point2, rng: random.Random) -> Point2:
        return point

    return policy


def uniform_request(denominator: int = 1024) -> RequestPolicy:
    """Random rational request in the advertised set.

    Points are drawn on a denominator-bounded grid: rejection sampling from
    the bounding box for full polygons, parameter sampling for segments.
    """

    def rand_unit(rng: random.Random) -> Fraction:
        return Fraction(rng.randrange(denominator + 1), denominator)

    def policy(advertised: ConvexPolygon, error: Point2, rng: random.Random) -> Point2:
        verts = advertised.vertices
        if not verts:
            raise ValueError("cannot sample from an empty advertisement")
        if len(verts) == 1:
            return verts[0]
        if len(verts) == 2:
            u, v = verts
            return u + (v - u) * rand_unit(rng)
        xmin, ymin, xmax, ymax = advertised.bbox()
        for _ in range(200):
            p = Point2(xmin + (xmax - xmin) * rand_unit(rng), ymin + (ymax - ymin) * rand_unit(rng))
            if advertised.contains_point(p):
                return p
        # Thin polygon: fall back to a random convex combination of vertices.
        weights = [Fraction(rng.randrange(1, denominator)) for _ in verts]
        total = sum(weights)
        x = sum((v.x * w for v, w in zip(verts, weights)), Fraction(0)) / total
        y = sum((v.y * w for v, w in zip(verts, weights)), Fraction(0)) / total
        return Point2(x, y)

    return policy


def adversarial_request() -> RequestPolicy:
    """Request the advertised vertex farthest from the error-cancelling point.

    A tightness probe: it pushes the accumulated error outward as hard as a
    vertex request can.  Ties go to the lexicographically smallest vertex.
    """

    def policy(advertised: ConvexPolygon, error: Point2, rng: random.Random) -> Point2:
        target = -error
        verts = advertised.vertices
        if not verts:
            raise ValueError("cannot sample from an empty advertisement")
        best = verts[0]
        best_d = dist2(best, target)
        for v in verts[1:]:
            d = dist2(v, target)
            if d > best_d or (d == best_d and v < best):
                best, best_d = v, d
        return best

    return policy


# ---------------------------------------------------------------------------
# Open-loop trace runner
# ---------------------------------------------------------------------------

SetSource = Union[Sequence[FeasibleSet], Callable[[int], FeasibleSet]]


def _set_at(sets: SetSource, n: int) -> FeasibleSet:
    if callable(sets):
        return sets(n)
    return sets[n]


def run_trace(
    mode: Mode,
    sets: SetSource,
    requests: RequestPolicy,
    horizon: int,
    *,
    initial_error: Point2 = ORIGIN,
    seed: int = 0,
    diffusion: bool = True,
) -> ControllerTrace:
    """Run the controller against a given sequence of feasible sets.

    ``sets`` may be a sequence or a function of the step index (the sets do
    not depend on what gets implemented; closed-loop resources live in the
    simulation harness).  With ``diffusion`` off the controller projects the
    bare request instead, which is the unbounded-error baseline.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    rng = random.Random(seed)
    trace = ControllerTrace(mode=mode, initial_error=initial_error)
    if horizon == 0:
        return trace

    if mode == "perfect":
        state = ControllerState(error=initial_error)
        for n in range(horizon):
            feasible = _set_at(sets, n)
            advertised = feasible_hull(feasible)
            request = requests(advertised, state.error, rng)
            error_before = state.error
            if diffusion:
                implemented, state = step_perfect(state, request, feasible)
            else:
                if not advertised.contains_point(request):
                    raise InfeasibleRequestError(f"request {request} outside advertised set")
                implemented = project_feasible(feasible, request)
                state = ControllerState(
                    error=state.error + request - implemented, step=n + 1
                )
            trace.records.append(
                StepRecord(n, feasible, advertised, request, implemented, error_before)
            )
        return trace

    if mode != "persistent":
        raise ValueError(f"unknown mode {mode!r}")

    feasible = _set_at(sets, 0)
    advertised = feasible_hull(feasible)  # the very first advertisement
    request = requests(advertised, initial_error, rng)
    state = ControllerState(error=initial_error).start_persistent(request)
    for n in range(horizon):
        feasible = _set_at(sets, n)
        if diffusion:
            assert state.modified_request is not None
            implemented = project_feasible(feasible, state.modified_request)
        else:
            implemented = project_feasible(feasible, request)
        error_before = state.error
        trace.records.append(
            StepRecord(n, feasible, advertised, request, implemented, error_before)
        )
        next_advertised = feasible_hull(feasible)
        error_after = error_before + request - implemented
        next_request = requests(next_advertised, error_after, rng)
        if diffusion:
            _, state = step_persistent(state, next_request, feasible)
        else:
            state = ControllerState(error=error_after, step=n + 1)
        advertised = next_advertised
        request = next_request
    return trace
