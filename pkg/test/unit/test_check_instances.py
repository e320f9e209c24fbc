from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from pytest import mark, raises

from toric_chow.check_instances import UserInput, check_results, colour_print, get_user_input
from toric_chow.config import RunConfig
from toric_chow.instance import Instance, Tag
from toric_chow.repository import Repository

P12 = json.dumps({"group": {"free_rank": 1}, "beta": [[1], [-2]], "fan": {"max_cones": [[0], [1]]}})
P12_BETTI = '{\n  "0": 1,\n  "1/2": 1,\n  "1": 1\n}\n'


@dataclass
class FakeRepository(Repository):
    """In-memory golden results keyed by (instance id, command)."""

    instances: list[Instance]
    results: dict[tuple[Path, str], str] = field(default_factory=dict)
    tags: list[tuple[Path, Tag, str]] = field(default_factory=list)

    def get(self) -> list[Instance]:
        return self.instances

    def read_result(self, instance: Instance, command: str) -> str:
        return self.results.get((instance.id, command), "")

    def write_result(self, instance: Instance, command: str, text: str) -> None:
        self.results[(instance.id, command)] = text

    def add_tag(self, instance: Instance, tag: Tag, command: str) -> None:
        self.tags.append((instance.id, tag, command))


def p12(name: str, **config) -> Instance:
    return Instance(Path(name) / "instance.json", P12, RunConfig(**config))


@mark.parametrize("response, expected", [("r", UserInput.REPLACE), ("s", UserInput.SKIP), ("v", UserInput.REVIEW), ("", UserInput.MOVE_ON)])
def test_get_user_input(monkeypatch, response, expected):
    monkeypatch.setattr("builtins.input", lambda _: response)
    assert get_user_input() == expected


def test_check_all_good(capsys):
    good = p12("good")
    repo = FakeRepository([good], {(good.id, "betti"): P12_BETTI})
    assert check_results(repo, "betti", "check") == 0
    out = capsys.readouterr().out
    assert "Found 1 instances." in out
    assert "Will check 1." in out
    assert "All good." in out


def test_check_reports_mismatch(capsys):
    bad = p12("bad")
    repo = FakeRepository([bad, p12("skipped", skip=["betti"])])
    assert check_results(repo, "betti", "check") == 1
    out = capsys.readouterr().out
    assert "Found 2 instances." in out
    assert "Will check 1." in out
    assert "Bad betti result for bad/instance.json." in out
    assert "(nothing)" in out
    assert "1 instances had a bad betti result (0 fixed, 0 will be skipped in future, 1 remaining)." in out
    assert repo.results == {}


def test_fix_writes_results():
    bad = p12("bad")
    repo = FakeRepository([bad], {(bad.id, "betti"): "{}\n"})
    assert check_results(repo, "betti", "fix") == 1
    assert repo.results[(bad.id, "betti")] == P12_BETTI
    assert check_results(repo, "betti", "check") == 0


def test_error_documents_are_results():
    bad = Instance(Path("bad") / "instance.json", "{", RunConfig())
    repo = FakeRepository([bad])
    check_results(repo, "gale", "fix")
    assert json.loads(repo.results[(bad.id, "gale")])["error"] == "invalid_instance"


@mark.parametrize(
    "response, tags, fixed",
    [
        ("r", [], True),
        ("s", [(Tag.SKIP, "betti")], False),
        ("v", [(Tag.REVIEW, "betti")], False),
        ("x", [], False),
    ],
)
def test_interactive(monkeypatch, capsys, response, tags, fixed):
    monkeypatch.setattr("builtins.input", lambda _: response)
    bad = p12("bad")
    repo = FakeRepository([bad])
    assert check_results(repo, "betti", "interactive") == 1
    assert [(tag, command) for _, tag, command in repo.tags] == tags
    assert ((bad.id, "betti") in repo.results) is fixed


def test_colour_print(capsys):
    colour_print("ok", colour="green")
    assert capsys.readouterr().out == "\033[92mok\033[0m\n"
    with raises(ValueError):
        colour_print("ok", colour="blue")
