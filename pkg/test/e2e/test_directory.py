import re
import subprocess

from pytest import mark


@mark.parametrize("command", ["gale", "betti", "check"])
def test_check_directory_ok(command):
    proc = subprocess.run(
        ["toric-chow", command, "test/e2e/instances"],
        timeout=120,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout
    m = re.search(r"Will check (\d+)", proc.stdout)
    assert m is not None
    num_instances_checked = int(m.group(1))
    assert num_instances_checked > 0


def test_fix_writes_missing_results(tmp_path):
    (tmp_path / "p12").mkdir()
    (tmp_path / "p12" / "instance.json").write_text('{"group": {"free_rank": 1}, "beta": [[1], [-2]], "fan": {"max_cones": [[0], [1]]}}')
    proc = subprocess.run(["toric-chow", "--fix", "betti", str(tmp_path)], timeout=120, capture_output=True, text=True)
    assert proc.returncode == 1
    assert (tmp_path / "p12" / "betti.json").read_text() == '{\n  "0": 1,\n  "1/2": 1,\n  "1": 1\n}\n'
    proc = subprocess.run(["toric-chow", "betti", str(tmp_path)], timeout=120, capture_output=True, text=True)
    assert proc.returncode == 0
