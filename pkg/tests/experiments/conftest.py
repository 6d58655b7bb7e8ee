import json
from pathlib import Path

import pytest

from stability_arena.experiments.config import apply_full_scale, load_experiment_config


def small_document(**sections):
    """A desk-sized document: short horizon, minimum quantile sample."""
    doc = {
        "model": {"id": "simple-queue"},
        "set": {"kind": "box", "lower": 0.0, "upper": 0.4},
        "engine": {"k_star": 2000, "seed": 7},
        "dominating": {"n_reps": 100},
        "replications": 3,
    }
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(doc.get(key), dict):
            doc[key].update(value)
        else:
            doc[key] = value
    return doc


@pytest.fixture
def small_doc():
    return small_document


@pytest.fixture
def write_config(tmp_path):
    def _write(doc, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path

    return _write


REGISTRY = Path(__file__).resolve().parents[2] / "configs" / "registry.json"


@pytest.fixture
def preset():
    """Load a shipped preset, overlaying sections the way ``small_document`` does."""

    def _load(name, full_scale=False, **sections):
        cfg = load_experiment_config(name, registry_path=REGISTRY)
        if full_scale:
            cfg = apply_full_scale(cfg)
        doc = cfg.to_document()
        for key, value in sections.items():
            if isinstance(value, dict) and isinstance(doc.get(key), dict):
                doc[key].update(value)
            else:
                doc[key] = value
        return load_experiment_config(doc)

    return _load


@pytest.fixture
def registry_path():
    return REGISTRY
