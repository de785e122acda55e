"""Run every ``$ kitaev-mpe`` example in README.md.

Data rows shown under a command (lines not starting with ``#``) must match
the actual output: text fields exactly, numbers to 1e-9 relative.
``<!-- file: NAME -->`` before a code block writes that block to NAME first.
"""
import io
import math
import re
import shlex
from pathlib import Path

import pytest

from kitaev_mpe.cli import run

README = Path(__file__).resolve().parents[1] / "README.md"
BLOCK = re.compile(r"(?:<!-- file: (?P<file>\S+) -->\n)?```(?P<lang>\w*)\n(?P<body>.*?)```", re.S)


def _examples():
    files, examples = {}, []
    for match in BLOCK.finditer(README.read_text()):
        if match.group("file"):
            files[match.group("file")] = match.group("body")
            continue
        if match.group("lang") != "console":
            continue
        current = None
        for line in match.group("body").splitlines():
            if line.startswith("$ kitaev-mpe "):
                current = (line[2:], [])
                examples.append((current, dict(files)))
            elif current is not None and line and not line.startswith("#"):
                current[1].append(line)
    return examples


EXAMPLES = _examples()


def _same(shown, actual):
    if shown == actual:
        return True
    try:
        return math.isclose(float(shown), float(actual), rel_tol=1e-9, abs_tol=1e-12)
    except ValueError:
        return False


def test_readme_has_examples():
    assert len(EXAMPLES) >= 8


@pytest.mark.parametrize("example", EXAMPLES, ids=[e[0][0][len("kitaev-mpe "):][:60] for e in EXAMPLES])
def test_readme_example(example, tmp_path, monkeypatch):
    (command, shown), files = example
    monkeypatch.chdir(tmp_path)
    for name, body in files.items():
        (tmp_path / name).write_text(body)
    out, err = io.StringIO(), io.StringIO()
    code = run(shlex.split(command)[1:], stdout=out, stderr=err)
    assert code == 0, err.getvalue()
    actual = [line for line in out.getvalue().splitlines() if line and not line.startswith("#")]
    if "--format" not in command and "--out" not in command:
        assert actual, "no data rows"
    for want, got in zip(shown, actual):
        assert all(_same(a, b) for a, b in zip(want.split(","), got.split(","))), (want, got)
        assert len(want.split(",")) == len(got.split(","))
    assert len(shown) <= len(actual)
