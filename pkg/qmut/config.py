"""

Runtime settings.

"""
from dataclasses import dataclass, field
import os
from typing import Mapping, Optional

THREADS_ENV_VAR = "QMUT_THREADS"

#: Interval precision (in bits) used for the first attempt at deciding a sign.
SIGN_START_BITS = 64
#: Precision cap; reaching it means a nonzero value could not be separated from zero.
SIGN_MAX_BITS = 2 ** 14

SCHEMA_VERSION = 1


def _default_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Settings:
    """Knobs shared by the explorer, the realization checker and the CLI.

    - threads: workers used to expand a BFS frontier
    - max_nodes: default exploration budget, in canonical forms
    - canonical_rank_bound: largest rank canonical_form accepts
    - sample_size: number of non-acyclic representatives kept in a ClassReport

    """

    threads: int = field(default_factory=_default_threads)
    max_nodes: int = 10 ** 6
    canonical_rank_bound: int = 10
    sample_size: int = 20

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise ValueError(f"threads must be positive, not {self.threads}")
        if self.max_nodes < 1:
            raise ValueError(f"max_nodes must be positive, not {self.max_nodes}")

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Builds settings, honouring QMUT_THREADS when it is set."""
        if environ is None:
            environ = os.environ
        raw = environ.get(THREADS_ENV_VAR)
        if raw is None or not raw.strip():
            return cls()
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, not {raw!r}")
        return cls(threads=threads)


DEFAULT_SETTINGS = Settings()
