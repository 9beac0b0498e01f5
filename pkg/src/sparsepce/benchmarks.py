"""Analytic benchmarks and the room-scenario coordinate reformulation.

Room geometry: a 4 m x 3 m floor plan with the origin in one corner. Walls:

========  ==========  ==============  ===============
wall      position    inward normal   theta offset
========  ==========  ==============  ===============
``W1``    y = 0       +y              0
``W2``    x = 0       +x              90
``W3``    y = 3       -y              180
``W4``    x = 4       -x              270
========  ==========  ==============  ===============

The local frame of a box on a wall has its y axis along the inward normal;
switching walls is a rigid rotation of the scene. Boxes sit 0.3 m in front of
their wall, so the along-wall and cross-wall coordinates both stay inside the
source ranges (x in [0.3, 3.7], y in [0.3, 2.7]).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError, DomainError
from .input_model import InputSpace, Kind, MarginalDistribution, lhs_unit, make_rng

ROOM = (4.0, 3.0, 2.0)
BOX_OFFSET = 0.3


class Wall(str, Enum):
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"


WALLS = (Wall.W1, Wall.W2, Wall.W3, Wall.W4)
THETA_OFFSET = {Wall.W1: 0.0, Wall.W2: 90.0, Wall.W3: 180.0, Wall.W4: 270.0}


# ---------------------------------------------------------------------------
# analytic functions
# ---------------------------------------------------------------------------
def ishigami(x, a: float = 7.0, b: float = 0.1):
    """sin x1 + a sin^2 x2 + b x3^4 sin x1, for one triple or an (M, 3) batch."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    out = np.sin(x1) + a * np.sin(x2) ** 2 + b * x3**4 * np.sin(x1)
    return float(out) if out.ndim == 0 else out


BOREHOLE_NAMES = ("r_w", "r", "T_u", "H_u", "T_l", "H_l", "L", "K_w")


def borehole(x):
    """Water flow through a borehole; inputs ordered (r_w, r, T_u, H_u, T_l, H_l, L, K_w)."""
    x = np.asarray(x, dtype=float)
    rw, r, tu, hu, tl, hl, length, kw = (x[..., i] for i in range(8))
    checks = (
        ("r_w", rw > 0),
        ("r", r > rw),
        ("T_l", tl > 0),
        ("K_w", kw > 0),
        ("L", length > 0),
    )
    for i, (name, ok) in enumerate(checks):
        if not np.all(ok):
            raise DomainError(f"borehole precondition violated for {name}", variable=BOREHOLE_NAMES.index(name))
    log_ratio = np.log(r / rw)
    out = 2.0 * np.pi * tu * (hu - hl) / (log_ratio * (1.0 + tu / tl) + 2.0 * length * tu / (rw**2 * kw))
    return float(out) if out.ndim == 0 else out


def ishigami_space() -> InputSpace:
    u = MarginalDistribution(Kind.UNIFORM, (-np.pi, np.pi))
    return InputSpace((u, u, u), ("x1", "x2", "x3"))


def borehole_space() -> InputSpace:
    uni = lambda lo, hi: MarginalDistribution(Kind.UNIFORM, (lo, hi))  # noqa: E731
    return InputSpace(
        (
            MarginalDistribution(Kind.GAUSSIAN, (0.10, 0.0161812), (0.05, 0.15)),
            MarginalDistribution(Kind.LOGNORMAL, (7.71, 1.0056), (100.0, 50000.0)),
            uni(63070.0, 115600.0),
            uni(990.0, 1110.0),
            uni(63.1, 116.0),
            uni(700.0, 820.0),
            uni(1120.0, 1680.0),
            uni(9855.0, 12045.0),
        ),
        BOREHOLE_NAMES,
    )


# ---------------------------------------------------------------------------
# scenario geometry
# ---------------------------------------------------------------------------
SIX_NAMES = ("xs", "ys", "zs", "xp", "yp", "theta_p")
FOUR_NAMES = ("r", "psi", "theta_s", "zs")
TWO_NAMES = ("r", "zs")


def scenario_space() -> InputSpace:
    """Six global inputs, uniform over the room ranges."""
    uni = lambda lo, hi: MarginalDistribution(Kind.UNIFORM, (lo, hi))  # noqa: E731
    return InputSpace(
        (uni(0.3, 3.7), uni(0.3, 2.7), uni(0.25, 2.0), uni(0.05, 3.95), uni(0.05, 2.95), uni(0.0, 360.0)),
        SIX_NAMES,
    )


def reduced_space(mode: str) -> InputSpace:
    """Uniform marginals over the reachable range of the local coordinates."""
    uni = lambda lo, hi: MarginalDistribution(Kind.UNIFORM, (lo, hi))  # noqa: E731
    r = uni(0.0, float(np.hypot(ROOM[0], ROOM[1])))
    z = uni(0.25, 2.0)
    mode = Mode(mode)
    if mode is Mode.FOUR:
        return InputSpace((r, uni(0.0, 360.0), uni(0.0, 360.0), z), FOUR_NAMES)
    if mode is Mode.TWO:
        return InputSpace((r, z), TWO_NAMES)
    return scenario_space()


@dataclass(frozen=True)
class ScenarioPose:
    source: tuple[float, float, float]
    wall: Wall
    person: tuple[float, float]
    theta_p: float

    def __post_init__(self):
        object.__setattr__(self, "wall", Wall(self.wall))
        xs, ys, zs = self.source
        xp, yp = self.person
        w, h, c = ROOM
        if not (0 <= xs <= w and 0 <= ys <= h and 0 <= zs <= c and 0 <= xp <= w and 0 <= yp <= h):
            raise DomainError(f"pose outside the {w}x{h}x{c} m room: source={self.source}, person={self.person}")
        object.__setattr__(self, "theta_p", float(self.theta_p) % 360.0)


@dataclass(frozen=True)
class LocalPose:
    r: float
    psi: float
    theta_s: float
    zs: float


def _wall_codes(walls) -> np.ndarray:
    if isinstance(walls, (Wall, str)):
        walls = [walls]
    # enum members go through their value; numpy would mangle them into short strings
    labels = [w.value if isinstance(w, Wall) else str(w) for w in (walls if isinstance(walls, (list, tuple)) else np.atleast_1d(walls))]
    try:
        return np.array([WALLS.index(Wall(w)) for w in labels], dtype=np.int64)
    except ValueError as exc:
        raise DataError(f"unknown wall label: {exc}") from exc


def local_coordinates(walls, xs, ys, xp, yp, theta_p):
    """Vectorized wall-case map to local (x, y, theta_s)."""
    code = _wall_codes(walls)
    xs, ys, xp, yp, theta_p = (np.broadcast_to(np.asarray(v, dtype=float), code.shape) for v in (xs, ys, xp, yp, theta_p))
    lx = np.select([code == 0, code == 1, code == 2, code == 3], [xp - xs, ys - yp, xs - xp, yp - ys])
    ly = np.select([code == 0, code == 1, code == 2, code == 3], [yp - ys, xp - xs, ys - yp, xs - xp])
    offset = np.array([THETA_OFFSET[w] for w in WALLS])[code]
    theta_s = np.mod(theta_p + offset, 360.0)
    return lx, ly, theta_s


def polar(lx, ly):
    """(r, psi) with psi from atan2 in degrees, shifted into [0, 360)."""
    r = np.hypot(lx, ly)
    psi = np.degrees(np.arctan2(ly, lx))
    psi = np.where(psi < 0.0, psi + 360.0, psi)
    psi = np.where(psi >= 360.0, psi - 360.0, psi)
    return r, psi


def to_local(pose: ScenarioPose) -> LocalPose:
    lx, ly, theta_s = local_coordinates([pose.wall], pose.source[0], pose.source[1], pose.person[0], pose.person[1], pose.theta_p)
    r, psi = polar(lx, ly)
    return LocalPose(float(r[0]), float(psi[0]), float(theta_s[0]), float(pose.source[2]))


class Mode(str, Enum):
    SIX = "six"
    FOUR = "four"
    TWO = "two"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for m in cls:
                if m.value == value.lower():
                    return m
        return None


def reduce_inputs(x6, walls, mode) -> np.ndarray:
    """Map six global inputs (xs, ys, zs, xp, yp, theta_p) plus walls to a reduced design.

    Four mode returns columns (r, psi, theta_s, zs); two mode returns (r, zs).
    """
    mode = Mode(mode)
    x6 = np.atleast_2d(np.asarray(x6, dtype=float))
    if walls is None:
        raise DataError("reduction needs a wall label for every sample")
    walls = np.atleast_1d(walls)
    if walls.shape[0] != x6.shape[0]:
        raise DataError(f"{x6.shape[0]} samples but {walls.shape[0]} wall labels")
    if mode is Mode.SIX:
        return x6.copy()
    xs, ys, zs, xp, yp, th = x6.T
    lx, ly, theta_s = local_coordinates(walls, xs, ys, xp, yp, th)
    r, psi = polar(lx, ly)
    if mode is Mode.FOUR:
        return np.column_stack([r, psi, theta_s, zs])
    return np.column_stack([r, zs])


# ---------------------------------------------------------------------------
# synthetic SAR stand-in
# ---------------------------------------------------------------------------
SAR_SCALE = 0.2
SAR_Z_CENTER = 0.75
SAR_Z_WIDTH = 0.35


def sar_synthetic(r, zs, psi=None, theta_s=None):
    """SYNTHETIC stand-in for whole-body SAR: c (1 + r)^-2 h(z).

    ``h`` is a Gaussian bump in source height centred on 0.75 m. Not a
    physical model; ``psi`` and ``theta_s`` are accepted and ignored.
    """
    r = np.asarray(r, dtype=float)
    zs = np.asarray(zs, dtype=float)
    h = np.exp(-0.5 * ((zs - SAR_Z_CENTER) / SAR_Z_WIDTH) ** 2)
    return SAR_SCALE * (1.0 + r) ** -2 * h


@dataclass(frozen=True)
class Scenario:
    walls: np.ndarray
    x6: np.ndarray  # columns xs, ys, zs, xp, yp, theta_p
    y: np.ndarray


def _cross_wall(code):
    w, h, _ = ROOM
    return np.array([BOX_OFFSET, BOX_OFFSET, h - BOX_OFFSET, w - BOX_OFFSET])[code]


def sample_scenarios(n: int, seed: int) -> Scenario:
    """Latin hypercube scenario generator for the synthetic SAR problem.

    Six LHS columns drive: wall choice (four equal strata), the box position
    along its wall, box height, person x, person y and orientation.
    """
    u = lhs_unit(n, 6, make_rng(seed))
    space = scenario_space()
    code = np.minimum((u[:, 0] * 4).astype(int), 3)
    walls = np.array([WALLS[c].value for c in code])
    xs_range, ys_range = space.marginals[0].params, space.marginals[1].params
    along_x = xs_range[0] + u[:, 1] * (xs_range[1] - xs_range[0])
    along_y = ys_range[0] + u[:, 1] * (ys_range[1] - ys_range[0])
    cross = _cross_wall(code)
    horizontal = (code == 0) | (code == 2)  # walls parallel to the x axis
    xs = np.where(horizontal, along_x, cross)
    ys = np.where(horizontal, cross, along_y)
    rest = np.column_stack([space.marginals[i].params[0] + u[:, i] * (space.marginals[i].params[1] - space.marginals[i].params[0]) for i in (2, 3, 4, 5)])
    x6 = np.column_stack([xs, ys, rest[:, 0], rest[:, 1], rest[:, 2], rest[:, 3]])
    lx, ly, _ = local_coordinates(walls, xs, ys, x6[:, 3], x6[:, 4], x6[:, 5])
    r, _ = polar(lx, ly)
    return Scenario(walls, x6, sar_synthetic(r, x6[:, 2]))


# ---------------------------------------------------------------------------
# problem registry used by the replication study and the CLI
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Problem:
    """A benchmark: its input space and a seeded design generator."""

    name: str
    space: InputSpace
    mode: str | None = None

    def sample(self, n: int, seed: int):
        """Return (natural inputs, responses) of an n-point LHS design."""
        if self.name == "sar-synthetic":
            sc = sample_scenarios(n, seed)
            return reduce_inputs(sc.x6, sc.walls, self.mode), sc.y
        from .input_model import lhs_sample

        x = lhs_sample(n, self.space, seed).natural
        return x, self.evaluate(x)

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.name == "ishigami":
            return ishigami(x)
        if self.name == "borehole":
            return borehole(x)
        if Mode(self.mode) is Mode.SIX:
            raise DataError("six-input synthetic SAR needs wall labels; evaluate through sample_scenarios")
        return sar_synthetic(x[:, 0], x[:, -1])


PROBLEMS = ("ishigami", "borehole", "sar-synthetic")


def get_problem(name: str, mode: str | None = None) -> Problem:
    if name == "ishigami":
        return Problem(name, ishigami_space())
    if name == "borehole":
        return Problem(name, borehole_space())
    if name == "sar-synthetic":
        mode = Mode(mode or "six").value
        return Problem(name, reduced_space(mode), mode)
    raise DataError(f"unknown benchmark id {name!r}; expected one of {PROBLEMS}")
