import pytest

from apexsim.disk import new_disk
from apexsim.model import DiskGeometry, Hyperparams, Neighborhood
from apexsim.vfs import FileSystem


def make_disk(rows=4, cols=4, hp=(4, 7, 1, 9), neighborhood="grid-row", block_size=4096):
    geo = DiskGeometry(
        rows=rows,
        cols=cols,
        block_size_bytes=block_size,
        neighborhood=Neighborhood.parse(neighborhood),
    )
    return new_disk(geo, Hyperparams(*hp))


def make_fs(disk=None, policy=None, invert_link_rule=False, **disk_kw):
    if disk is None:
        disk = make_disk(**disk_kw)
    return FileSystem(disk, policy=policy, invert_link_rule=invert_link_rule)


class ScriptedPolicy:
    """Hands out pre-chosen address lists, one per create call."""

    name = "scripted"

    def __init__(self, *picks):
        self._picks = list(picks)

    def select(self, disk, count):
        pick = self._picks.pop(0)
        assert len(pick) == count, f"script expected {len(pick)} blocks, create wants {count}"
        return list(pick)


@pytest.fixture
def fs4():
    """4x4 disk with the reference coefficients and an apex policy."""
    return make_fs(rows=4, cols=4)
