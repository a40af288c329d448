import numpy as np


def popcount(mask: int) -> int:
    return mask.bit_count()


def full_mask(width: int) -> int:
    """Bit-set with the lowest `width` bits set."""
    return (1 << width) - 1


def to_indices(mask: int) -> list:
    """Indices of the set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def from_bools(column) -> int:
    """
    Pack a boolean vector into an integer bit-set (entry i -> bit i).

    Goes through numpy's little-endian packbits so large columns are not
    walked element by element in Python.
    """
    column = np.asarray(column, dtype=bool)
    if column.size == 0:
        return 0
    packed = np.packbits(column, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def drop_bit(mask: int, index: int) -> int:
    """Remove bit `index` and shift every higher bit down by one."""
    low = mask & ((1 << index) - 1)
    high = mask >> (index + 1)
    return low | (high << index)


class BitMatrix:
    """
    Row-major 0/1 incidence matrix stored as one integer bit-set per row.

    Row r holds the column indices set in row r. For a set system the rows are
    sets and the columns are universe elements, so a marginal-gain update is a
    single `&` plus a popcount over n/64 machine words.
    """

    def __init__(self, rows, width: int):
        if width < 0:
            raise ValueError("width must be non-negative")
        limit = 1 << width
        for r, row in enumerate(rows):
            if row < 0 or row >= limit:
                raise ValueError(f"Row {r} has bits outside [0, {width})")
        self.rows = tuple(rows)
        self.width = width

    def row_counts(self):
        return [popcount(row) for row in self.rows]

    def masked_counts(self, mask: int, rows=None):
        """Popcount of `row & mask` for the requested rows (all rows by default)."""
        if rows is None:
            return [popcount(row & mask) for row in self.rows]
        return [popcount(self.rows[r] & mask) for r in rows]

    def __getitem__(self, index):
        return self.rows[index]

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return f"BitMatrix({len(self.rows)}x{self.width})"
