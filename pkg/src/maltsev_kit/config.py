"""Resource limits, with environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

ENV = {"cap": "MALTSEVKIT_CAP", "table_cap": "MALTSEVKIT_TABLE_CAP"}


@dataclass(frozen=True)
class Limits:
    cap: int = 500_000            # free-algebra elements
    table_cap: int = 20_000_000   # free-algebra operation-table entries
    congruence_bound: int = 60    # largest algebra whose congruences are enumerated
    max_pairs: int = 2            # pair sets generating sampled tolerances
    max_ell: int = 5              # composition budget for the (bip) checks

    @classmethod
    def from_env(cls, **overrides) -> "Limits":
        values = {}
        for f in fields(cls):
            env = ENV.get(f.name)
            if env and os.environ.get(env):
                values[f.name] = int(os.environ[env])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
