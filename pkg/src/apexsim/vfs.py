"""Minimal file layer over the disk model.

Paths form a tree rooted at "/". Files are fixed-size at creation: block 0 of
every non-empty file is its metadata block, the rest carry data in order.
Deletion is logical - blocks are freed but their payload and lineage stay put
until someone allocates over them.
"""

import math

from .disk import TO_UNUSED, TO_USED, transition_block
from .errors import DiskFullError
from .model import MrpfRecord
from .priority import record_file_access, record_overwrite_event

LINKED = "linked"
PARTIAL = "partial"

USED = "used"
DELETED = "deleted"
OBSOLETE = "obsolete"

# Format classes by extension: linked formats are all-or-nothing at recovery
# time, partial formats recover block by block once their metadata survives.
LINKED_EXTENSIONS = {".exe", ".o", ".zip"}
PARTIAL_EXTENSIONS = {".txt", ".jpg", ".mp3", ".avi", ".pdf"}


def type_class_for_path(path: str) -> str:
    name = path.rsplit("/", 1)[-1]
    dot = name.rfind(".")
    ext = name[dot:].lower() if dot >= 0 else ""
    if ext in LINKED_EXTENSIONS:
        return LINKED
    # anything without a known linkage table recovers per block
    return PARTIAL


class FileRecord:
    __slots__ = (
        "id",
        "path",
        "type_class",
        "status",
        "block_list",
        "size_bytes",
        "uf_counter",
        "created_tick",
        "last_access_tick",
        "_live_index",
    )

    def __init__(self, file_id, path, type_class, block_list, size_bytes, tick):
        self.id = file_id
        self.path = path
        self.type_class = type_class
        self.status = USED
        self.block_list = block_list
        self.size_bytes = size_bytes
        self.uf_counter = 1  # creation counts as the first use
        self.created_tick = tick
        self.last_access_tick = tick
        self._live_index = -1

    @property
    def data_blocks(self) -> int:
        return max(len(self.block_list) - 1, 0)

    @property
    def metadata_block(self):
        return self.block_list[0] if self.block_list else None


class PathNode:
    __slots__ = ("name", "children", "file_id")

    def __init__(self, name, is_dir, file_id=None):
        self.name = name
        self.children = {} if is_dir else None
        self.file_id = file_id

    @property
    def is_dir(self):
        return self.children is not None


def _components(path: str) -> list[str]:
    if not isinstance(path, str) or not path.startswith("/"):
        raise ValueError(f"path must be absolute: {path!r}")
    if path == "/":
        return []
    parts = path[1:].split("/")
    if any(p in ("", ".", "..") for p in parts):
        raise ValueError(f"malformed path: {path!r}")
    return parts


class FileSystem:
    """Path tree plus file table, bound to one disk and one allocation policy."""

    def __init__(self, disk, policy=None, invert_link_rule: bool = False):
        if policy is None:
            from .policies import ApexPolicy

            policy = ApexPolicy()
        self.disk = disk
        self.policy = policy
        self.invert_link_rule = invert_link_rule
        self.root = PathNode("/", is_dir=True)
        self.files: dict[int, FileRecord] = {}
        self._live: list[FileRecord] = []  # swap-remove list for uniform sampling
        self._by_path: dict[str, FileRecord] = {}
        self._retired: list[FileRecord] = []  # deleted and obsolete, in delete order
        self._deleted_active: list[FileRecord] = []  # deleted, not yet obsolete
        self._next_id = 1

    # -- path plumbing -------------------------------------------------------

    def _resolve_dir(self, parts) -> PathNode:
        node = self.root
        for name in parts:
            child = node.children.get(name)
            if child is None:
                raise FileNotFoundError(f"no such directory: /{'/'.join(parts)}")
            if not child.is_dir:
                raise NotADirectoryError(f"not a directory: {name}")
            node = child
        return node

    def mkdir(self, path: str) -> None:
        parts = _components(path)
        if not parts:
            raise FileExistsError("/")
        parent = self._resolve_dir(parts[:-1])
        if parts[-1] in parent.children:
            raise FileExistsError(path)
        parent.children[parts[-1]] = PathNode(parts[-1], is_dir=True)

    def _normalize(self, path: str) -> str:
        return "/" + "/".join(_components(path))

    # -- queries -------------------------------------------------------------

    def live_files(self) -> list[FileRecord]:
        return list(self._live)

    def deleted_files(self) -> list[FileRecord]:
        return list(self._retired)

    def lookup(self, path: str) -> FileRecord:
        rec = self._by_path.get(self._normalize(path))
        if rec is None:
            raise FileNotFoundError(path)
        return rec

    def utilization(self) -> float:
        return len(self.disk.used) / self.disk.geometry.total_blocks

    def free_blocks(self) -> int:
        return len(self.disk.unused)

    # -- operations ----------------------------------------------------------

    def create_file(self, path, size_bytes, type_class=None, data=None) -> FileRecord:
        """Allocate and install a new fixed-size file.

        Validation happens before any mutation, so a failed create leaves the
        disk untouched. Blocks are claimed in ranking order; the first becomes
        the metadata block. Claiming a block with live lineage fires the
        overwrite event for its siblings before the claim lands.
        """
        parts = _components(path)
        if not parts:
            raise ValueError("cannot create a file at /")
        norm = "/" + "/".join(parts)
        parent = self._resolve_dir(parts[:-1])
        if parts[-1] in parent.children:
            raise FileExistsError(norm)
        if size_bytes < 0:
            raise ValueError("negative size")
        if data is not None and len(data) != size_bytes:
            raise ValueError("data length must equal size_bytes")
        if type_class is None:
            type_class = type_class_for_path(norm)
        if type_class not in (LINKED, PARTIAL):
            raise ValueError(f"unknown type class {type_class!r}")
        bs = self.disk.geometry.block_size_bytes
        needed = math.ceil(size_bytes / bs) + 1 if size_bytes > 0 else 0
        if needed > self.free_blocks():
            raise DiskFullError(
                f"{norm}: need {needed} blocks, {self.free_blocks()} free"
            )

        addrs = self.policy.select(self.disk, needed)
        fid = self._next_id
        self._next_id += 1
        siblings = frozenset(addrs)
        for i, addr in enumerate(addrs):
            record_overwrite_event(self.disk, addr)
            transition_block(self.disk, addr, TO_USED)
            blk = self.disk.blocks[addr]
            blk.version += 1
            if data is not None and i > 0:
                blk.payload = data[(i - 1) * bs : i * bs].ljust(
                    min(bs, size_bytes - (i - 1) * bs), b"\x00"
                )
            else:
                blk.payload = None
            blk.mrpf = MrpfRecord(fid, siblings, blk.version)

        rec = FileRecord(fid, norm, type_class, list(addrs), size_bytes, self.disk.clock)
        self.files[fid] = rec
        self._by_path[norm] = rec
        rec._live_index = len(self._live)
        self._live.append(rec)
        parent.children[parts[-1]] = PathNode(parts[-1], is_dir=False, file_id=fid)
        self.disk.emit("create", fid, type_class, tuple(addrs), size_bytes)
        return rec

    def delete_file(self, path: str) -> FileRecord:
        """Logical delete: free the blocks, freeze usage, keep lineage.

        No overwrite event fires here; churn only moves when new data lands.
        Freed blocks take the linkage flag of this file's format class.
        """
        rec = self.lookup(path)
        lf_value = 0 if (rec.type_class == PARTIAL) != self.invert_link_rule else 1
        for addr in rec.block_list:
            transition_block(self.disk, addr, TO_UNUSED)
            self.disk.lf[addr] = lf_value
            self.disk.refresh_key(addr)
        rec.status = DELETED
        self._drop_live(rec)
        self._retired.append(rec)
        self._deleted_active.append(rec)
        self.disk.emit("delete", rec.id, rec.type_class, tuple(rec.block_list))
        return rec

    def read_file(self, path: str) -> bytes:
        rec = self.lookup(path)
        bs = self.disk.geometry.block_size_bytes
        parts = []
        for addr in rec.block_list[1:]:
            payload = self.disk.blocks[addr].payload
            parts.append(payload if payload is not None else bytes(bs))
        record_file_access(self.disk, rec)
        return b"".join(parts)[: rec.size_bytes]

    def write_file(self, path: str, offset: int, data: bytes) -> None:
        """Overwrite bytes inside the current size; files never grow here.

        Affected data blocks bump their payload epoch and lineage epoch;
        untouched blocks keep theirs. Usage increments once even for a
        zero-length write.
        """
        rec = self.lookup(path)
        if offset < 0 or offset + len(data) > rec.size_bytes:
            raise ValueError(
                f"write [{offset}, {offset + len(data)}) outside size {rec.size_bytes}"
            )
        bs = self.disk.geometry.block_size_bytes
        if data:
            first = offset // bs
            last = (offset + len(data) - 1) // bs
            for j in range(first, last + 1):
                addr = rec.block_list[1 + j]
                blk = self.disk.blocks[addr]
                span = min(bs, rec.size_bytes - j * bs)
                base = bytearray(blk.payload) if blk.payload is not None else bytearray(span)
                lo = max(offset, j * bs)
                hi = min(offset + len(data), (j + 1) * bs)
                base[lo - j * bs : hi - j * bs] = data[lo - offset : hi - offset]
                blk.payload = bytes(base)
                blk.version += 1
                blk.mrpf.content_epoch = blk.version
        record_file_access(self.disk, rec)

    def mark_obsolete_sweep(self) -> int:
        """Deleted files with no surviving lineage become obsolete. Returns
        how many flipped this sweep."""
        flipped = 0
        still_active = []
        for rec in self._deleted_active:
            if any(self.disk.lineage_intact(a, rec.id) for a in rec.block_list):
                still_active.append(rec)
            else:
                rec.status = OBSOLETE
                flipped += 1
        self._deleted_active = still_active
        return flipped

    # -- internals -----------------------------------------------------------

    def _drop_live(self, rec: FileRecord) -> None:
        i = rec._live_index
        last = self._live[-1]
        self._live[i] = last
        last._live_index = i
        self._live.pop()
        rec._live_index = -1
        del self._by_path[rec.path]
        parts = _components(rec.path)
        parent = self._resolve_dir(parts[:-1])
        del parent.children[parts[-1]]
