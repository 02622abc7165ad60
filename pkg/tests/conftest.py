from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuserag.config import data_dir, load_config
from fuserag.kg import load_graph, load_schema
from fuserag.pipeline import Pipeline, build_kg, ingest


@pytest.fixture(scope="session")
def schema():
    return load_schema()


@pytest.fixture(scope="session")
def fixture_graph(schema):
    return load_graph(data_dir() / "graph.jsonl", schema)


@pytest.fixture(scope="session")
def gazetteer(fixture_graph):
    return fixture_graph.gazetteer


@pytest.fixture(scope="session")
def built_config(tmp_path_factory):
    """Config whose artifact directory holds an index and graph built from the shipped data."""
    root = tmp_path_factory.mktemp("artifacts")
    cfg = load_config(env={"FUSERAG_PATHS_ARTIFACTS": str(root)})
    ingest(cfg)
    build_kg(cfg)
    return cfg


@pytest.fixture(scope="session")
def pipeline(built_config):
    return Pipeline.load(built_config)


@pytest.fixture(scope="session")
def evalset():
    from fuserag.evaluation import read_evalset

    return read_evalset(data_dir() / "evalset.jsonl")


@pytest.fixture(scope="session")
def planted():
    path = data_dir() / "planted_contradictions.jsonl"
    return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line.strip()]


def write_jsonl(path: Path, records) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), "utf-8")
    return path


# ---------------------------------------------------------------- acceptance report
#
# Tests marked @pytest.mark.acceptance(n, "title") roll up into one PASS/FAIL
# line per criterion at the end of the run.

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (report.when != "call" and not report.failed):
        return
    n, title = mark.args
    entry = _ACCEPTANCE.setdefault(n, {"title": title, "passed": 0, "failed": []})
    if report.passed:
        entry["passed"] += 1
    else:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[n]
        status = "PASS" if not e["failed"] else "FAIL"
        total = e["passed"] + len(e["failed"])
        line = f"[{status}] {n:>2}. {e['title']} ({e['passed']}/{total} checks)"
        if e["failed"]:
            line += " failing: " + ", ".join(e["failed"])
        tr.write_line(line)
