import csv
import io

SCHEMA_VERSION = "dppc-v2"

RUN_HEADER = [
    "schema", "command", "algo", "instance", "seed", "trial",
    "n", "m", "rho", "eps", "delta", "gamma", "k", "alpha_mode", "alpha_constant",
    "status", "solution_size", "solution", "coverage", "exhausted", "objective", "objective_original",
    "radius", "budget_multiplier", "rounds", "ledger_eps", "ledger_delta", "wall_time", "message",
]

BENCH_HEADER = [
    "schema", "problem", "instance", "seed", "trials", "failures",
    "rho", "eps", "delta", "gamma", "k", "alpha_mode", "alpha_constant",
    "objective_mean", "objective_median", "objective_std",
    "size_mean", "size_median", "size_std",
    "baseline_objective", "baseline_size", "size_ratio", "ledger_eps", "ledger_delta", "message",
]


class ResultCsv:
    """
    Result table with a fixed, versioned header.

    Every row is stored as a list of strings aligned with the header, so a
    table written by one run and loaded back compares equal cell by cell.
    Files are RFC-4180: comma separated, CRLF line ends, minimal quoting.

    Args:
        header (list): Column names. Defaults to RUN_HEADER.
        file_path (str, optional): Load an existing table instead.
    """

    def __init__(self, header=None, file_path: str = None):
        self.header = list(header) if header is not None else list(RUN_HEADER)
        self.rows = []
        if file_path:
            self.file_path = file_path
            with open(file_path, newline="", encoding="utf-8") as f:
                self._load(f)

    @classmethod
    def from_text(cls, text: str):
        table = cls()
        table._load(io.StringIO(text, newline=""))
        return table

    def _load(self, stream):
        reader = csv.reader(stream)
        try:
            self.header = next(reader)
        except StopIteration:
            raise ValueError("CSV file is empty") from None
        for row in reader:
            if len(row) != len(self.header):
                raise ValueError(f"row has {len(row)} columns, header has {len(self.header)}")
            self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def add_row(self, row) -> None:
        """
        Append a row given as a list aligned with the header or as a mapping.

        Mapping keys must be header columns; missing columns stay empty and the
        schema column is filled in.

        Raises:
            ValueError: wrong column count or an unknown column name.
        """
        if isinstance(row, dict):
            unknown = set(row) - set(self.header)
            if unknown:
                raise ValueError(f"unknown columns {sorted(unknown)}")
            values = {"schema": SCHEMA_VERSION, **row}
            row = [values.get(column, "") for column in self.header]
        if len(row) != len(self.header):
            raise ValueError(
                f"The new row's column count ({len(row)}) is different from the header's column count ({len(self.header)})"
            )
        self.rows.append([format_cell(value) for value in row])

    def get_row(self, index: int) -> list:
        return self.rows[index]

    def get_record(self, index: int) -> dict:
        return dict(zip(self.header, self.rows[index]))

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def set_header(self, header: list) -> None:
        if self.rows:
            raise ValueError("cannot change the header of a non-empty table")
        self.header = list(header)

    def get_header(self) -> list:
        return self.header

    def to_text(self) -> str:
        out = io.StringIO(newline="")
        writer = csv.writer(out, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return out.getvalue()

    def save(self, output) -> None:
        """
        Write the table to a path or to an open text stream.

        Args:
            output (str or file-like): Destination.
        """
        if hasattr(output, "write"):
            output.write(self.to_text())
            return
        with open(output, mode="w", newline="", encoding="utf-8") as f:
            f.write(self.to_text())


def format_cell(value) -> str:
    """Canonical text of a cell: repr for floats, space-joined ids for sequences."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return str(value)
