from __future__ import annotations

import logging
import tomllib
from abc import ABC, abstractmethod
from dataclasses import asdict
from pathlib import Path

import tomli_w

from .config import CONFIG_NAME, RunConfig
from .instance import Instance, Tag

INSTANCE_NAME = "instance.json"

logger = logging.getLogger(__name__)


class Repository(ABC):
    @abstractmethod
    def get(self) -> list[Instance]:
        raise NotImplementedError

    @abstractmethod
    def read_result(self, instance: Instance, command: str) -> str:
        raise NotImplementedError

    @abstractmethod
    def write_result(self, instance: Instance, command: str, text: str) -> None:
        raise NotImplementedError

    @abstractmethod
    def add_tag(self, instance: Instance, tag: Tag, command: str) -> None:
        raise NotImplementedError


class InstanceRepository(Repository):
    """A directory tree of golden instances: each `instance.json` with one `<command>.json` per checked command."""

    def __init__(self, config: RunConfig, dir: Path):
        self.config = config
        self.dir = dir

    def get(self) -> list[Instance]:
        print(f"Looking for instances in directory '{self.dir}'...")

        instances: list[Instance] = []
        for dirpath, _, filenames in sorted(self.dir.walk()):
            if INSTANCE_NAME not in filenames:
                continue
            instance_path = dirpath / INSTANCE_NAME
            try:
                text = instance_path.read_text(encoding="utf-8")
            except UnicodeDecodeError as e:
                logger.error("Skipping %s: not UTF-8 (%s at byte %d)", instance_path, e.reason, e.start)
                continue

            try:
                with open(dirpath / CONFIG_NAME, "rb") as f:
                    instance_config = tomllib.load(f)
            except FileNotFoundError:
                instance_config = {}
            config = RunConfig(**(asdict(self.config) | instance_config))

            instances.append(Instance(instance_path, text, config))

        return instances

    def read_result(self, instance: Instance, command: str) -> str:
        "The golden document, empty when there is none yet."
        try:
            return (instance.id.parent / f"{command}.json").read_text()
        except FileNotFoundError:
            return ""

    def write_result(self, instance: Instance, command: str, text: str) -> None:
        (instance.id.parent / f"{command}.json").write_text(text)

    def add_tag(self, instance: Instance, tag: Tag, command: str) -> None:
        """Write a tag to toric_chow.toml in the instance's directory.
        The tag indicates special treatment, e.g. don't check this command."""
        config_path = instance.id.parent / CONFIG_NAME

        try:
            with open(config_path, "rb") as f:
                config = dict(tomllib.load(f))
        except FileNotFoundError:
            config = {}

        if tag == Tag.REVIEW:
            config["review"] = True
        elif tag == Tag.SKIP:
            config["skip"] = sorted({*config.get("skip", []), command})

        with open(config_path, "wb") as f:
            tomli_w.dump(config, f)
