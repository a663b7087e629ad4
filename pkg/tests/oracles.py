"""Independent reference implementations the test suite checks the engine
against. Everything here recomputes from first principles: factor bookkeeping
is replayed literally from the event log, rankings come from a full sort, and
recovery is reconstructed from claim history instead of epoch records.
"""

import numpy as np

from apexsim.model import CONTIGUOUS, GRID_ROW, NONE, SF_LIMIT


def score_of(hf, uf, sf, lf, hp, spatial_enabled=True):
    # same canonical grouping the engine documents, recomputed from scratch
    s = hp.hist * hf - hp.usage * uf
    if spatial_enabled:
        s += hp.spatial * sf
    s += hp.link * lf
    return float(s)


def rank_by_full_sort(disk, count=None):
    """Unused addresses ordered by (-score, address), recomputed from factors."""
    hp = disk.hyperparams
    enabled = disk.spatial_enabled
    scored = []
    for addr in range(disk.geometry.total_blocks):
        if disk.is_used(addr):
            continue
        f = disk.factors(addr)
        scored.append((-score_of(f.hf, f.uf, f.sf, f.lf, hp, enabled), addr))
    scored.sort()
    addrs = [a for _, a in scored]
    return addrs if count is None else addrs[:count]


def assert_conservation(disk):
    total = disk.geometry.total_blocks
    used = set(disk.used)
    unused = set(disk.unused.addresses())
    assert len(used) + len(unused) == total
    assert not (used & unused)
    assert used | unused == set(range(total))


def assert_heap_keys_fresh(disk):
    hp = disk.hyperparams
    enabled = disk.spatial_enabled
    for addr in disk.unused.addresses():
        f = disk.factors(addr)
        assert disk.unused.key(addr) == score_of(f.hf, f.uf, f.sf, f.lf, hp, enabled)


class FactorOracle:
    """Replays the factor transition rules against the disk's event log.

    The oracle keeps its own copies of hf/uf/sf/lf, the used set, and block
    lineage, and applies each rule literally as the events arrive:

      create: per claimed block in claim order, first bump hf on every
        still-unused same-lineage sibling of the block's previous owner, then
        claim it (hf=1, uf=1, sf=0) and install the new lineage.
      delete: per freed block, hf=0 and the owning class's linkage bit;
        uf keeps its last value.
      access: +1 uf on every block the file currently owns.
      spatial: Jacobi pass, each unused block's sf becomes the mean pre-pass
        score of its neighbors (clamped), used blocks 0. Computed here with
        deliberately different array operations than the engine uses.
    """

    def __init__(self, geometry, hp, invert_link_rule=False):
        n = geometry.total_blocks
        self.geometry = geometry
        self.hp = hp
        self.invert = invert_link_rule
        self.hf = np.zeros(n)
        self.uf = np.zeros(n)
        self.sf = np.zeros(n)
        self.lf = np.ones(n)
        self.used = np.zeros(n, dtype=bool)
        self.lineage = [None] * n  # (file_id, sibling tuple) or None
        self.file_blocks = {}  # live file id -> block tuple

    def apply(self, event):
        kind = event[0]
        if kind == "create":
            self._create(*event[1:])
        elif kind == "delete":
            self._delete(*event[1:])
        elif kind == "access":
            self._access(event[1])
        elif kind == "spatial":
            self._spatial()
        else:
            raise AssertionError(f"unknown event {event!r}")

    def apply_all(self, events):
        for ev in events:
            self.apply(ev)

    def _create(self, fid, type_class, addrs, size_bytes):
        for addr in addrs:
            prior = self.lineage[addr]
            if prior is not None:
                owner, sibs = prior
                for sib in sibs:
                    if sib == addr or self.used[sib]:
                        continue
                    other = self.lineage[sib]
                    if other is None or other[0] != owner:
                        continue
                    self.hf[sib] += 1
            self.used[addr] = True
            self.hf[addr] = 1
            self.uf[addr] = 1
            self.sf[addr] = 0.0
            self.lineage[addr] = (fid, tuple(addrs))
        self.file_blocks[fid] = tuple(addrs)

    def _delete(self, fid, type_class, addrs):
        lf_value = 0.0 if (type_class == "partial") != self.invert else 1.0
        for addr in addrs:
            self.used[addr] = False
            self.hf[addr] = 0
            self.lf[addr] = lf_value
        self.file_blocks.pop(fid, None)

    def _access(self, fid):
        for addr in self.file_blocks[fid]:
            self.uf[addr] += 1

    def _score_array(self):
        s = self.hp.hist * self.hf - self.hp.usage * self.uf
        if self.geometry.neighborhood.kind != NONE:
            s = s + self.hp.spatial * self.sf
        return s + self.hp.link * self.lf

    def _spatial(self):
        nb = self.geometry.neighborhood
        if nb.kind == NONE:
            return
        pf = self._score_array()
        n = self.geometry.total_blocks
        if nb.kind == GRID_ROW:
            cols = self.geometry.cols
            if cols == 1:
                new_sf = np.zeros(n)
            else:
                grid = pf.reshape(self.geometry.rows, cols)
                totals = grid @ np.ones(cols)
                new_sf = ((totals[:, None] - grid) / (cols - 1)).ravel()
        elif nb.kind == CONTIGUOUS:
            acc = np.zeros(n)
            cnt = np.zeros(n)
            for d in range(1, nb.span + 1):
                acc[d:] += pf[:-d]
                cnt[d:] += 1.0
                acc[:-d] += pf[d:]
                cnt[:-d] += 1.0
            new_sf = np.where(cnt > 0, acc / np.maximum(cnt, 1.0), 0.0)
        else:
            raise AssertionError(f"unknown neighborhood {nb.kind!r}")
        np.clip(new_sf, -SF_LIMIT, SF_LIMIT, out=new_sf)
        new_sf[self.used] = 0.0
        self.sf = new_sf

    def assert_matches(self, disk, context=""):
        assert np.array_equal(self.hf, disk.hf), f"hf mismatch {context}"
        assert np.array_equal(self.uf, disk.uf), f"uf mismatch {context}"
        assert np.array_equal(self.lf, disk.lf), f"lf mismatch {context}"
        assert np.allclose(self.sf, disk.sf, rtol=0.0, atol=1e-9), f"sf mismatch {context}"
        engine_used = np.zeros(self.geometry.total_blocks, dtype=bool)
        engine_used[sorted(disk.used)] = True
        assert np.array_equal(self.used, engine_used), f"used-set mismatch {context}"


class ClaimHistoryRecovery:
    """Recovery reconstructed purely from the claim/delete order in the event
    log: a block survives for a file exactly when no later create claimed it
    after that file's delete. No epoch bookkeeping involved."""

    def __init__(self, block_size_bytes):
        self.bs = block_size_bytes
        self.claimed_at = {}  # addr -> event position of last claim
        self.created = {}  # fid -> (type_class, addrs, size_bytes)
        self.deleted_at = {}  # fid -> event position
        self.position = 0

    def apply(self, event):
        kind = event[0]
        if kind == "create":
            fid, type_class, addrs, size_bytes = event[1:]
            self.created[fid] = (type_class, tuple(addrs), size_bytes)
            for addr in addrs:
                self.claimed_at[addr] = self.position
        elif kind == "delete":
            self.deleted_at[event[1]] = self.position
        self.position += 1

    def apply_all(self, events):
        for ev in events:
            self.apply(ev)

    def surviving(self, fid):
        type_class, addrs, size_bytes = self.created[fid]
        gone = self.deleted_at[fid]
        return frozenset(a for a in addrs if self.claimed_at[a] < gone)

    def rr(self, fid):
        type_class, addrs, size_bytes = self.created[fid]
        alive = self.surviving(fid)
        if type_class == "linked":
            return 1.0 if addrs and len(alive) == len(addrs) else 0.0
        if not addrs or addrs[0] not in alive or size_bytes <= 0:
            return 0.0
        data_alive = sum(1 for a in addrs[1:] if a in alive)
        return min(data_alive * self.bs, size_bytes) / size_bytes
