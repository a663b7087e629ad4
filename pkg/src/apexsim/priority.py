"""Ranking engine: block scores and the event-driven factor updates.

Scores are refreshed when an event changes a factor, not on a timer. Every
public filesystem operation leaves the unused-heap keys equal to a fresh
recomputation of the score from the block factors.
"""

import numpy as np

from .errors import DiskFullError
from .model import CONTIGUOUS, GRID_ROW, NONE, SF_LIMIT, BlockFactors, Hyperparams


def priority_factor(factors: BlockFactors, hp: Hyperparams, spatial_enabled: bool = True) -> float:
    """Score of a block: churn and linkage push it up, usage protects it.

    Higher score means overwritten sooner. With spatial ranking disabled the
    spatial term is dropped entirely, not just zeroed.
    """
    score = hp.hist * factors.hf - hp.usage * factors.uf
    if spatial_enabled:
        score += hp.spatial * factors.sf
    score += hp.link * factors.lf
    return float(score)


def record_file_access(disk, file) -> None:
    """One read or write of a file: bump usage on every block it owns.

    Fires once per operation regardless of byte count. A zero-block file is a
    legal no-op for the block factors.
    """
    if file.status != "used":
        raise ValueError(f"cannot record access on a {file.status} file")
    for addr in file.block_list:
        disk.uf[addr] += 1
    file.uf_counter += 1
    file.last_access_tick = disk.clock
    disk.emit("access", file.id)


def record_overwrite_event(disk, address: int) -> None:
    """A block with lineage is being claimed: its still-unused siblings that
    carry the same parent file get one unit of churn each and fresh keys.

    Deletion never calls this; it fires only when new data lands on a block.
    """
    rec = disk.blocks[address].mrpf
    if rec is None:
        return
    for sib in sorted(rec.siblings):
        if sib == address or disk.is_used(sib):
            continue
        other = disk.blocks[sib].mrpf
        if other is None or other.file_id != rec.file_id:
            continue
        disk.hf[sib] += 1
        disk.refresh_key(sib)


def update_spatial_factors(disk) -> None:
    """One spatial pass: every unused block's sf becomes the mean pre-pass
    score of its neighbors; used blocks stay at 0.

    All new values are computed from a frozen snapshot of the pre-pass scores
    (Jacobi style), then committed together. The mean is evaluated in the
    canonical form (neighborhood_sum - own_score) / neighbor_count so that any
    independent reimplementation of the same formula agrees bitwise. A block
    with no neighbors gets sf = 0. Runs once per workload operation.
    """
    disk.emit("spatial")
    geo = disk.geometry
    nb = geo.neighborhood
    if nb.kind == NONE:
        return
    pf = disk.pf_array()
    n = geo.total_blocks
    if nb.kind == GRID_ROW:
        deg = geo.cols - 1
        if deg == 0:
            new_sf = np.zeros(n)
        else:
            row_sums = pf.reshape(geo.rows, geo.cols).sum(axis=1)
            new_sf = (np.repeat(row_sums, geo.cols) - pf) / deg
    elif nb.kind == CONTIGUOUS:
        kernel = np.ones(2 * nb.span + 1)
        window = np.convolve(pf, kernel, mode="same")
        counts = np.convolve(np.ones(n), kernel, mode="same") - 1.0
        new_sf = np.where(counts > 0, (window - pf) / np.maximum(counts, 1.0), 0.0)
    else:  # pragma: no cover - kinds validated at construction
        raise ValueError(f"unknown neighborhood kind {nb.kind!r}")
    np.clip(new_sf, -SF_LIMIT, SF_LIMIT, out=new_sf)
    new_sf[disk.used_mask] = 0.0
    disk.sf[:] = new_sf
    disk.rebuild_unused_keys()


def top_unused(disk, count: int) -> list:
    """The count highest-scored unused addresses, descending score, lower
    address first on ties. Read-only; raises when the disk cannot supply."""
    free = len(disk.unused)
    if count > free:
        raise DiskFullError(f"need {count} unused blocks, only {free} free")
    return disk.unused.n_best(count)
