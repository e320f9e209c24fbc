from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Literal

from .instance import Instance, Tag
from .repository import Repository

logger = logging.getLogger(__name__)
Mode = Literal["check", "interactive", "fix"]


class UserInput(Enum):
    REPLACE = "REPLACE"
    SKIP = "SKIP"
    MOVE_ON = "MOVE ON"
    REVIEW = "REVIEW"


def get_user_input() -> UserInput:
    print()
    response = input("Enter 'r' to replace, 's' to skip in future, 'v' to tag for review and move on, anything else to just move on: ")
    if response == "r":
        return UserInput("REPLACE")
    elif response == "s":
        return UserInput("SKIP")
    elif response == "v":
        return UserInput("REVIEW")
    else:
        return UserInput("MOVE ON")


def check_results(repository: Repository, command: str, mode: Mode) -> int:
    """Compare the computed document for `command` with each instance's golden document."""
    failed: list[Instance] = []
    fixed: list[Instance] = []
    skipped: list[Instance] = []
    instances = repository.get()
    instances_to_check = [instance for instance in instances if not instance.skips(command)]

    print(f"Found {len(instances)} instances.")
    print(f"Will check {len(instances_to_check)}.")

    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 8)) as executor:
        futures = [executor.submit(instance.result, command) for instance in instances_to_check]

    for instance, future in zip(instances_to_check, futures, strict=True):
        actual = future.result().text
        given = repository.read_result(instance, command)
        logger.debug("%s: %s", instance.id, "matches" if actual == given else "differs")
        if actual != given:
            print("----------")
            print(f"\N{CROSS MARK} Bad {command} result for {instance.id}.", end="\n\n")
            print("Computed:")
            colour_print(actual, colour="green", end="\n")
            print("Given:")
            colour_print(given or "(nothing)", colour="red")
            failed.append(instance)
            if mode == "interactive":
                response = get_user_input()
                if response == UserInput.REPLACE:
                    repository.write_result(instance, command, actual)
                    fixed.append(instance)
                    print("\N{SPARKLES} Replaced.")
                elif response == UserInput.SKIP:
                    repository.add_tag(instance, Tag.SKIP, command)
                    skipped.append(instance)
                    print("\N{SEE-NO-EVIL MONKEY} Will skip in future.")
                elif response == UserInput.REVIEW:
                    repository.add_tag(instance, Tag.REVIEW, command)
                    print("\N{RIGHT-POINTING MAGNIFYING GLASS} Added 'review' tag.")
                else:
                    print("\N{FACE WITHOUT MOUTH} Moving on.")
            elif mode == "fix":
                repository.write_result(instance, command, actual)
                fixed.append(instance)
                print("\N{SPARKLES} Auto-fixed.")

    print("----------")
    if failed:
        print(
            f"{len(failed)} instances had a bad {command} result "
            "("
            f"{len(fixed)} fixed, "
            f"{len(skipped)} will be skipped in future, "
            f"{len(failed) - len(fixed) - len(skipped)} remaining"
            ")."
        )
        return 1
    else:
        print("\N{WHITE HEAVY CHECK MARK} All good.")
        return 0


def colour_print(string: str, colour: str, **kwargs) -> None:
    if colour == "green":
        print("\033[92m" + string + "\033[0m", **kwargs)
    elif colour == "red":
        print("\033[91m" + string + "\033[0m", **kwargs)
    else:
        raise ValueError(f"unsupported colour: {colour}")
