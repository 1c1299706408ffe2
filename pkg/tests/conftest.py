"""Common helpers for tests"""
import json
from pathlib import Path

TEST_BASEDIR = Path(__file__).parent / "outputs"
TEST_BASEDIR.mkdir(exist_ok=True)


def write_json(name: str, data) -> str:
    """Write a JSON input file in the test output dir, return its path."""
    path = TEST_BASEDIR / name
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f)
    return str(path)
