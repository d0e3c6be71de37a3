"""Warm-started continuation families of disk solutions."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigInvalid, NewtonDiverged, NonConvergedContinuationHint
from .grid import DEFAULT_N
from .solve import solve_local


@dataclass
class FamilyResult:
    t_values: list
    members: list                      # PlanarField per parameter
    max_xi: list = field(default_factory=list)
    stepping_stones: list = field(default_factory=list)  # (index, t) pairs

    def steepest(self):
        return self.members[-1]


def continuation_family(make_problem, schedule, newton_cfg=None, n=DEFAULT_N,
                        init=None, max_bisections=8):
    """Solve make_problem(t) along `schedule`, warm-starting each member
    from the previous one. The schedule must be strictly decreasing unless
    it is constant (a frozen schedule is the determinism fixed point).

    `init` seeds the first member; pass an exact-profile sample to select
    the blow-up branch, since a zero start converges to the small solution.

    When a member diverges, geometric midpoints are inserted between the
    last good parameter and the failing one (warm-start basins on steep
    branches can be narrower than any fixed schedule anticipates); the
    stepping stones are recorded but only requested members are reported.
    Raises NonConvergedContinuationHint naming the failing parameter once
    `max_bisections` levels are exhausted, or immediately if the first
    member diverges (there is no parameter to bisect from).
    """
    ts = [float(t) for t in schedule]
    if not ts:
        raise ConfigInvalid("empty continuation schedule")
    frozen = all(t == ts[0] for t in ts)
    if not frozen and any(b >= a for a, b in zip(ts, ts[1:])):
        raise ConfigInvalid("schedule must be strictly decreasing")

    members = []
    max_xi = []
    stones = []

    def hint(k, t, e):
        return NonConvergedContinuationHint(
            "family member %d (t = %g) diverged; refine the schedule"
            % (k, t),
            t_failed=t,
            t_last_good=ts[k - 1] if k else None,
            index=k,
            last_iterate=e.last_iterate,
            residual_history=e.residual_history)

    def reach(k, t_from, fld_from, t_to, depth):
        try:
            return solve_local(make_problem(t_to), init=fld_from,
                               newton_cfg=newton_cfg, n=n)
        except NewtonDiverged as e:
            if t_from is None or depth >= max_bisections:
                raise hint(k, ts[k], e) from e
            t_mid = float(np.sqrt(t_from * t_to))
            if not (t_to < t_mid < t_from):
                raise hint(k, ts[k], e) from e
            stones.append((k, t_mid))
            mid = reach(k, t_from, fld_from, t_mid, depth + 1)
            return reach(k, t_mid, mid, t_to, depth + 1)

    prev = init
    for k, t in enumerate(ts):
        t_from = ts[k - 1] if (k and not frozen) else None
        fld = reach(k, t_from, prev, t, 0)
        fld.meta["t"] = t
        members.append(fld)
        max_xi.append(fld.max_value())
        prev = fld
    return FamilyResult(t_values=ts, members=members, max_xi=max_xi,
                        stepping_stones=stones)
