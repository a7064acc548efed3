"""Run configuration: truncation bounds, search budgets and output style."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

ENV_BUDGETS = "SEGAL_LAB_BUDGETS"

_BUDGET_KEYS = {
    "lifting": "lifting_budget",
    "lifting_budget": "lifting_budget",
    "congruence": "congruence_budget",
    "congruence_budget": "congruence_budget",
    "stages": "max_stages",
    "max_stages": "max_stages",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    bounds: tuple = (3, 3)
    lifting_budget: int = 10 ** 6
    congruence_budget: int = 10 ** 5
    max_stages: int = 4
    corpus_paths: tuple = field(default_factory=tuple)
    output: str = "human"

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(int(b) for b in self.bounds))
        object.__setattr__(self, "corpus_paths", tuple(str(p) for p in self.corpus_paths))
        if len(self.bounds) != 2 or min(self.bounds) < 2:
            raise ConfigError(f"bounds must be two integers >= 2, got {self.bounds}")
        for name in ("lifting_budget", "congruence_budget", "max_stages"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.output not in ("human", "machine"):
            raise ConfigError(f"output must be 'human' or 'machine', got {self.output!r}")

    def with_env(self, environ=None) -> "RunConfig":
        """Apply budget overrides from ``SEGAL_LAB_BUDGETS``.

        Accepted forms: a JSON object, or comma-separated ``key=value`` pairs
        with keys ``lifting``, ``congruence`` and ``stages``.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_BUDGETS, "").strip()
        if not raw:
            return self
        return replace(self, **parse_budgets(raw))


def parse_budgets(raw: str) -> dict:
    if raw.startswith("{"):
        try:
            items = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{ENV_BUDGETS}: {exc}") from None
        if not isinstance(items, dict):
            raise ConfigError(f"{ENV_BUDGETS} must be a JSON object")
        items = list(items.items())
    else:
        items = []
        for part in raw.split(","):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise ConfigError(f"{ENV_BUDGETS}: expected key=value, got {part!r}")
            items.append((key.strip(), value.strip()))
    out = {}
    for key, value in items:
        if key not in _BUDGET_KEYS:
            raise ConfigError(f"{ENV_BUDGETS}: unknown budget {key!r}")
        try:
            number = int(float(value))
        except (TypeError, ValueError):
            raise ConfigError(f"{ENV_BUDGETS}: {key} must be a number, got {value!r}") from None
        out[_BUDGET_KEYS[key]] = number
    return out
