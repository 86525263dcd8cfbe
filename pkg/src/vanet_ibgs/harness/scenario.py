"""Traffic scenarios: which vehicles talk, how often, how urgently.

Config files are plain ``key = value`` lines (``#`` comments).  Keys:

    vehicles         total vehicle count                          (20)
    groups           comma list of ``gm-id:size``; sizes sum to
                     ``vehicles``. A bare integer k splits evenly
                     into k groups                                 (1)
    rate_hz          mean messages per second per vehicle          (5)
    horizon_ms       length of the arrival window                  (1000)
    jitter_ms        uniform delivery jitter added to arrivals     (0)
    classes          comma list ``name:weight:due_ms:fraction``    (normal:1:300:1)
    p_ticks          part-1 processing time per signature (ms)     (2)
    forgery_rate     probability a message is forged               (0)
    backend          ``transparent`` or ``curve:<id>``             (transparent)
    l                small-exponent bit length                     (20)
    batch_size       integer or ``auto``                           (auto)
    lateness_budget  max tolerated L_max_b when batch_size=auto    (inf)
    setup_ticks      per-batch setup time s_b                      (1)
    seed             master seed                                   (0)

Default rates follow the usual VANET figure of one beacon every 100-300 ms.
"""

import math
import random
from dataclasses import dataclass, field
from typing import List, Tuple


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class PriorityClass:
    name: str
    weight: int
    due_ms: int
    fraction: float


@dataclass
class Scenario:
    vehicles: int = 20
    groups: List[Tuple[str, int]] = field(default_factory=lambda: [("gm-0", 20)])
    rate_hz: float = 5.0
    horizon_ms: int = 1000
    jitter_ms: int = 0
    classes: List[PriorityClass] = field(default_factory=lambda: [PriorityClass("normal", 1, 300, 1.0)])
    p_ticks: int = 2
    forgery_rate: float = 0.0
    backend: str = "transparent"
    l: int = 20
    batch_size: object = "auto"
    lateness_budget: float = math.inf
    setup_ticks: float = 1.0
    seed: int = 0

    def validate(self):
        if self.rate_hz <= 0 or self.horizon_ms <= 0:
            raise ScenarioError("rates and horizon must be positive")
        if not 0.0 <= self.forgery_rate <= 1.0:
            raise ScenarioError("forgery_rate must lie in [0, 1]")
        if sum(size for _, size in self.groups) != self.vehicles:
            raise ScenarioError("group sizes must add up to the vehicle count")
        if not self.classes or abs(sum(c.fraction for c in self.classes) - 1.0) > 1e-9:
            raise ScenarioError("class fractions must sum to 1")
        if self.p_ticks < 1:
            raise ScenarioError("p_ticks must be >= 1")
        if self.batch_size != "auto" and (not isinstance(self.batch_size, int) or self.batch_size < 1):
            raise ScenarioError("batch_size must be a positive integer or 'auto'")
        return self


@dataclass(frozen=True)
class Arrival:
    tick: int
    due: int
    weight: int
    cls: str
    vehicle: str
    group: str
    message: bytes
    forged: bool


def _parse_groups(text, vehicles):
    text = text.strip()
    if text.isdigit():
        k = int(text)
        if k < 1:
            raise ValueError("need at least one group")
        sizes = [vehicles // k + (1 if i < vehicles % k else 0) for i in range(k)]
        return [(f"gm-{i}", s) for i, s in enumerate(sizes)]
    out = []
    for part in text.split(","):
        name, size = part.split(":")
        out.append((name.strip(), int(size)))
    return out


def _parse_classes(text):
    out = []
    for part in text.split(","):
        name, w, due, frac = part.split(":")
        out.append(PriorityClass(name.strip(), int(w), int(due), float(frac)))
    return out


def parse_scenario(text: str, source: str = "<config>") -> Scenario:
    sc = Scenario()
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{source}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = (lineno, value)

    converters = {
        "vehicles": int, "rate_hz": float, "horizon_ms": int, "jitter_ms": int,
        "p_ticks": int, "forgery_rate": float, "backend": str, "l": int,
        "lateness_budget": float, "setup_ticks": float, "seed": int,
    }
    for key, (lineno, value) in raw.items():
        try:
            if key in converters:
                setattr(sc, key, converters[key](value))
            elif key == "batch_size":
                sc.batch_size = value if value == "auto" else int(value)
            elif key in ("groups", "classes"):
                pass
            else:
                raise ScenarioError(f"{source}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{source}:{lineno}: bad value for {key}: {value!r}") from None
    for key, parse in (("groups", lambda v: _parse_groups(v, sc.vehicles)), ("classes", _parse_classes)):
        if key in raw:
            lineno, value = raw[key]
            try:
                setattr(sc, key, parse(value))
            except ValueError:
                raise ScenarioError(f"{source}:{lineno}: bad value for {key}: {value!r}") from None
    if "groups" not in raw:
        sc.groups = [("gm-0", sc.vehicles)]
    try:
        return sc.validate()
    except ScenarioError as exc:
        raise ScenarioError(f"{source}: {exc}") from None


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return parse_scenario(fh.read(), str(path))


def vehicle_roster(sc: Scenario):
    """[(vehicle id, group id)] in a fixed order."""
    roster = []
    for gid, size in sc.groups:
        roster.extend((f"{gid}/v{i}", gid) for i in range(size))
    return roster


def arrivals(sc: Scenario, seed=None) -> List[Arrival]:
    """Poisson arrivals per vehicle over the horizon, sorted by tick."""
    rng = random.Random(f"arrivals:{sc.seed if seed is None else seed}")
    rate_per_ms = sc.rate_hz / 1000.0
    weights = [c.fraction for c in sc.classes]
    out = []
    for vid, gid in vehicle_roster(sc):
        t = rng.expovariate(rate_per_ms)
        seq = 0
        while t < sc.horizon_ms:
            cls = rng.choices(sc.classes, weights)[0]
            tick = int(t) + (rng.randint(0, sc.jitter_ms) if sc.jitter_ms else 0)
            forged = rng.random() < sc.forgery_rate
            msg = f"{vid}|seq={seq}|t={tick}|{cls.name}".encode()
            out.append(Arrival(tick, tick + cls.due_ms, cls.weight, cls.name, vid, gid, msg, forged))
            seq += 1
            t += rng.expovariate(rate_per_ms)
    out.sort(key=lambda a: (a.tick, a.vehicle))
    return out


def gen_scenario(config, seed=None):
    """Config path, text or :class:`Scenario` -> ``(Scenario, arrivals)``."""
    if isinstance(config, Scenario):
        sc = config.validate()
    elif "\n" in str(config) or "=" in str(config):
        sc = parse_scenario(str(config))
    else:
        sc = load_scenario(config)
    if seed is not None:
        sc.seed = seed
    return sc, arrivals(sc)
