"""Surveillance-style policy comparison: write a primary corpus, delete it,
flood the disk with secondary data under each policy, and measure how much of
the primary corpus is still recoverable.

Every cell (policy, secondary size, seed) runs on a fresh disk. The sweep
counts secondary data blocks, so targets map directly onto fractions of the
device.
"""

import json
import random
from dataclasses import dataclass

from .disk import new_disk
from .model import DiskGeometry, Hyperparams
from .policies import make_policy
from .priority import update_spatial_factors
from .recovery import recover_file, weighted_rr
from .vfs import PARTIAL, FileSystem


@dataclass(frozen=True)
class CompareSettings:
    primary_count: int = 5
    primary_data_blocks: int = 25
    primary_type: str = PARTIAL
    secondary_targets: tuple = (102, 200)  # data blocks per sweep point
    secondary_min_blocks: int = 4
    secondary_max_blocks: int = 16
    seeds: tuple = tuple(range(50))
    policies: tuple = ("apex", "first-fit")

    def __post_init__(self):
        if self.primary_count < 1 or self.primary_data_blocks < 1:
            raise ValueError("primary corpus must have at least one one-block file")
        if not 1 <= self.secondary_min_blocks <= self.secondary_max_blocks:
            raise ValueError("secondary file size range is invalid")
        if not self.seeds or not self.policies or not self.secondary_targets:
            raise ValueError("seeds, policies and secondary_targets must be non-empty")

    def to_dict(self) -> dict:
        return {
            "primary_count": self.primary_count,
            "primary_data_blocks": self.primary_data_blocks,
            "primary_type": self.primary_type,
            "secondary_targets": list(self.secondary_targets),
            "secondary_min_blocks": self.secondary_min_blocks,
            "secondary_max_blocks": self.secondary_max_blocks,
            "seeds": list(self.seeds),
            "policies": list(self.policies),
        }


@dataclass(frozen=True)
class CompareRow:
    policy: str
    secondary_blocks: int
    seed: int
    weighted_rr: float
    per_file_rr: tuple

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "secondary_blocks": self.secondary_blocks,
            "seed": self.seed,
            "weighted_rr": self.weighted_rr,
            "per_file_rr": list(self.per_file_rr),
        }


def run_cell(
    geometry: DiskGeometry,
    hp: Hyperparams,
    settings: CompareSettings,
    policy_kind: str,
    target_blocks: int,
    seed: int,
    invert_link_rule: bool = False,
) -> CompareRow:
    disk = new_disk(geometry, hp)
    policy = make_policy(policy_kind, seed=seed + 1000003)
    fs = FileSystem(disk, policy=policy, invert_link_rule=invert_link_rule)
    rng = random.Random(seed)
    bs = geometry.block_size_bytes

    def step(fn):
        disk.tick()
        fn()
        update_spatial_factors(disk)

    primary_ext = ".avi" if settings.primary_type == PARTIAL else ".zip"
    primary_paths = [f"/primary{i}{primary_ext}" for i in range(settings.primary_count)]
    for path in primary_paths:
        step(
            lambda p=path: fs.create_file(
                p, settings.primary_data_blocks * bs, settings.primary_type
            )
        )
    for path in primary_paths:
        step(lambda p=path: fs.delete_file(p))

    written = 0
    seq = 0
    while written < target_blocks:
        free = fs.free_blocks()
        if free < 2:
            break
        size = rng.randint(settings.secondary_min_blocks, settings.secondary_max_blocks)
        size = min(size, target_blocks - written, free - 1)
        size = max(size, 1)
        seq += 1
        path = f"/secondary{seq:04d}.dat"
        step(lambda p=path, s=size: fs.create_file(p, s * bs, PARTIAL))
        written += size

    fs.mark_obsolete_sweep()
    primary = [fs.files[fid] for fid in sorted(fs.files) if fs.files[fid].path in primary_paths]
    per_file = tuple(recover_file(disk, f).rr for f in primary)
    return CompareRow(
        policy=policy_kind,
        secondary_blocks=target_blocks,
        seed=seed,
        weighted_rr=weighted_rr(disk, fs.deleted_files()),
        per_file_rr=per_file,
    )


def run_compare(
    geometry: DiskGeometry,
    hp: Hyperparams,
    settings: CompareSettings,
    invert_link_rule: bool = False,
) -> list[CompareRow]:
    rows = []
    for policy_kind in settings.policies:
        for target in settings.secondary_targets:
            for seed in settings.seeds:
                rows.append(
                    run_cell(
                        geometry, hp, settings, policy_kind, target, seed, invert_link_rule
                    )
                )
    return rows


def compare_report(settings: CompareSettings, rows, geometry, hp) -> dict:
    return {
        "settings": settings.to_dict(),
        "geometry": geometry.to_dict(),
        "hyperparams": list(hp.as_tuple()),
        "rows": [r.to_dict() for r in rows],
    }


def compare_report_json(settings, rows, geometry, hp) -> str:
    return json.dumps(compare_report(settings, rows, geometry, hp), sort_keys=True, separators=(",", ":"))
