"""Exception types shared across the engine."""


class SimulationFault(RuntimeError):
    """The engine's integrity assumptions were violated at runtime."""


class ObstaclePenetration(SimulationFault):
    """An agent or query point ended up strictly inside an obstacle."""


class ArenaEscape(SimulationFault):
    """An agent or query point ended up outside the arena."""


class ScenarioError(ValueError):
    """A scenario file is malformed or violates a parameter invariant."""
