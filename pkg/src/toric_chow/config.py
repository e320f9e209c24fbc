import tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path

from .chow import DEFAULT_DEGREE_CAP

CONFIG_NAME = "toric_chow.toml"


@dataclass
class RunConfig:
    """Settings for computing an instance.

    A `toric_chow.toml` next to the target, or in any parent, sets the defaults.
    Inside a golden directory each instance may carry its own file, merged over them.
    """

    degree_cap: int = DEFAULT_DEGREE_CAP
    order: int = 1
    multifan: bool = False
    hypertoric: bool = False
    skip: list[str] = field(default_factory=list)
    review: bool = False

    def override(self, **flags: object) -> "RunConfig":
        "Replace the fields given on the command line; None means not given."
        return replace(self, **{name: value for name, value in flags.items() if value is not None})


def get_run_config_path(start: Path) -> Path | None:
    current = start.resolve()
    if current.is_file():
        current = current.parent
    while True:
        candidate = current / CONFIG_NAME
        if candidate.exists():
            return candidate
        if current.parent == current:
            return None
        current = current.parent


def get_run_config(target: Path) -> RunConfig:
    config_path = get_run_config_path(target)
    if config_path is not None:
        with open(config_path, "rb") as f:
            config = RunConfig(**tomllib.load(f))
    else:
        config = RunConfig()

    return config
