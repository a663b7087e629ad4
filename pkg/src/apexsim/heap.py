"""Indexed max-heap of block addresses keyed by priority score.

Ties break toward the lower address, so the heap actually orders by the pair
(-score, address) in a classic array min-heap. A slot map (address -> array
index) makes key updates and removals O(log n) without lazy tombstones; the
sift routines follow the usual textbook shape but keep the map in sync.
"""

import heapq


class PriorityHeap:
    def __init__(self):
        self._data = []  # entries are (-score, address)
        self._slot = {}  # address -> index into _data

    def __len__(self):
        return len(self._data)

    def __contains__(self, address) -> bool:
        return address in self._slot

    def addresses(self):
        """Member addresses in arbitrary but deterministic order."""
        return list(self._slot.keys())

    def key(self, address) -> float:
        """Stored score for a member address."""
        return -self._data[self._slot[address]][0]

    def insert(self, address, score) -> None:
        if address in self._slot:
            raise KeyError(f"address {address} already queued")
        self._data.append((-score, address))
        self._slot[address] = len(self._data) - 1
        self._sift_toward_root(len(self._data) - 1)

    def remove(self, address) -> None:
        i = self._slot.pop(address)
        last = self._data.pop()
        if i < len(self._data):
            self._data[i] = last
            self._slot[last[1]] = i
            self._sift_toward_root(i)
            self._sift_toward_leaves(i)

    def update(self, address, score) -> None:
        """Change a member's key in place."""
        i = self._slot[address]
        old = self._data[i]
        self._data[i] = (-score, address)
        if self._data[i] < old:
            self._sift_toward_root(i)
        else:
            self._sift_toward_leaves(i)

    def peek(self):
        """Best address (highest score, lowest address on ties)."""
        if not self._data:
            raise IndexError("empty heap")
        return self._data[0][1]

    def n_best(self, count: int) -> list:
        """The count best addresses, best first. Does not mutate the heap."""
        if count > len(self._data):
            raise IndexError(f"asked for {count} of {len(self._data)} entries")
        return [addr for _, addr in heapq.nsmallest(count, self._data)]

    def reload(self, pairs) -> None:
        """Replace the entire contents with (address, score) pairs."""
        self._data = [(-score, addr) for addr, score in pairs]
        heapq.heapify(self._data)
        self._slot = {entry[1]: i for i, entry in enumerate(self._data)}
        if len(self._slot) != len(self._data):
            raise KeyError("duplicate address in reload")

    def _sift_toward_root(self, i: int) -> None:
        entry = self._data[i]
        while i > 0:
            parent = (i - 1) >> 1
            if entry < self._data[parent]:
                self._data[i] = self._data[parent]
                self._slot[self._data[i][1]] = i
                i = parent
            else:
                break
        self._data[i] = entry
        self._slot[entry[1]] = i

    def _sift_toward_leaves(self, i: int) -> None:
        n = len(self._data)
        entry = self._data[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            right = child + 1
            if right < n and self._data[right] < self._data[child]:
                child = right
            if self._data[child] < entry:
                self._data[i] = self._data[child]
                self._slot[self._data[i][1]] = i
                i = child
            else:
                break
        self._data[i] = entry
        self._slot[entry[1]] = i
