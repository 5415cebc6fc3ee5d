"""Per-source client settings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..textprep.pipeline import SOURCES

FORMATS = ("documents", "guardian", "alphavantage")


@dataclass(frozen=True)
class Identity:
    user_agent: str
    proxy: str | None = None


@dataclass(frozen=True)
class SourceConfig:
    """How to query one text source.

    ``query`` is a ``str.format`` template with ``{ticker}``, ``{start}`` and
    ``{end}`` slots appended to ``endpoint``. ``auth_env`` names the
    environment variable holding the API token; tokens never live in config.
    """

    source: str
    endpoint: str
    query: str = "?q={ticker}&from={start}&to={end}"
    auth_env: str | None = None
    min_delay: float = 1.0
    max_delay: float = 2.0
    user_agents: tuple[str, ...] = ("stocksignals/0.1",)
    proxies: tuple[str, ...] = ()
    rotate: bool = True
    max_concurrency: int = 1
    format: str = "documents"
    live: bool = False
    extra: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "user_agents", tuple(self.user_agents))
        object.__setattr__(self, "proxies", tuple(self.proxies))
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.source not in SOURCES:
            out.append(f"source {self.source!r} not one of {SOURCES}")
        if self.min_delay < 0 or self.min_delay > self.max_delay:
            out.append(f"delay bounds must satisfy 0 <= min <= max, got [{self.min_delay}, {self.max_delay}]")
        if self.rotate and not self.user_agents:
            out.append("identity pool is empty but rotation is enabled")
        if self.max_concurrency < 1:
            out.append("max_concurrency must be at least 1")
        if self.format not in FORMATS:
            out.append(f"format {self.format!r} not one of {FORMATS}")
        return out

    @property
    def identities(self) -> tuple[Identity, ...]:
        uas = self.user_agents or ("stocksignals/0.1",)
        if not self.proxies:
            return tuple(Identity(ua) for ua in uas)
        n = max(len(uas), len(self.proxies))
        return tuple(Identity(uas[i % len(uas)], self.proxies[i % len(self.proxies)]) for i in range(n))

    @classmethod
    def from_mapping(cls, m: Mapping) -> "SourceConfig":
        kw = dict(m)
        for key in ("user_agents", "proxies"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)
