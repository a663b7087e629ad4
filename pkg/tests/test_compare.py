"""Head-to-head policy comparison over the archival churn scenario."""

import pytest

from apexsim.compare import (
    CompareRow,
    CompareSettings,
    compare_report,
    run_cell,
    run_compare,
)
from apexsim.model import DiskGeometry, Hyperparams, Neighborhood

GEO = DiskGeometry(16, 16, 4096, Neighborhood.grid_row())
HP = Hyperparams(4, 7, 1, 9)


def small_settings(**kw):
    base = dict(
        primary_count=2,
        primary_data_blocks=6,
        secondary_targets=(30,),
        secondary_min_blocks=2,
        secondary_max_blocks=5,
        seeds=(0, 1),
        policies=("apex", "first-fit"),
    )
    base.update(kw)
    return CompareSettings(**base)


def test_settings_validation():
    with pytest.raises(ValueError):
        small_settings(primary_count=0)
    with pytest.raises(ValueError):
        small_settings(secondary_min_blocks=6)  # above the max of 5
    with pytest.raises(ValueError):
        small_settings(seeds=())
    with pytest.raises(ValueError):
        small_settings(policies=())


def test_zero_churn_leaves_everything_recoverable():
    row = run_cell(GEO, HP, small_settings(secondary_targets=(0,)), "apex", 0, 0)
    assert row.weighted_rr == pytest.approx(100.0)
    assert row.per_file_rr == (1.0,) * 2


def test_full_capacity_churn_destroys_everything():
    settings = small_settings(secondary_targets=(256,))
    for policy in ("apex", "first-fit"):
        row = run_cell(GEO, HP, settings, policy, 256, 0)
        assert row.weighted_rr == pytest.approx(0.0)
        assert row.per_file_rr == (0.0,) * 2


def test_cell_is_deterministic():
    settings = small_settings()
    a = run_cell(GEO, HP, settings, "apex", 30, 7)
    b = run_cell(GEO, HP, settings, "apex", 30, 7)
    assert a == b


def test_run_compare_row_grid():
    settings = small_settings()
    rows = run_compare(GEO, HP, settings)
    assert len(rows) == 2 * 1 * 2  # policies x targets x seeds
    keys = {(r.policy, r.secondary_blocks, r.seed) for r in rows}
    assert keys == {
        ("apex", 30, 0), ("apex", 30, 1),
        ("first-fit", 30, 0), ("first-fit", 30, 1),
    }
    for r in rows:
        assert isinstance(r, CompareRow)
        assert len(r.per_file_rr) == 2
        assert all(0.0 <= v <= 1.0 for v in r.per_file_rr)
        assert 0.0 <= r.weighted_rr <= 100.0


def test_report_document_shape():
    settings = small_settings()
    rows = run_compare(GEO, HP, settings)
    doc = compare_report(settings, rows, GEO, HP)
    assert doc["hyperparams"] == [4, 7, 1, 9]
    assert doc["settings"]["secondary_targets"] == [30]
    assert len(doc["rows"]) == 4
    assert set(doc["rows"][0]) == {
        "policy", "secondary_blocks", "seed", "weighted_rr", "per_file_rr",
    }
