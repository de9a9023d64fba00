# MIT License
# 
# Copyright (c) 2026 pysgdct contributors
# 
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""
CSV writers. Every file starts with `#` comment lines of `key=value` metadata,
followed by a header row and the data rows.
"""

__all__ = ["write_trace_csv", "write_summary_csv", "write_long_csv", "read_csv_comments"]

from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Sequence, Union
import csv
import logging
from pysgdct.errors import UsageError
from pysgdct.experiment import SweepRow
from pysgdct.run import RunTrace

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

L2_CONVENTION = "root-mean-square over seeds of the final iterate (or of the windowed time average) minus target"


def _open(path : PathLike):
    path = Path(path)
    try:
        path.parent.mkdir(parents = True, exist_ok = True)
        return path.open("w", newline = "", encoding = "utf-8")
    except OSError as exc:
        raise UsageError(f"can't write '{path}': {exc.strerror}") from None


def _write(path : PathLike, metadata : Mapping[str, Any], header : Sequence[str], rows : Iterable[Sequence[Any]]) -> None:
    with _open(path) as file:
        for key, value in metadata.items():
            file.write(f"# {key}={value}\n")
        writer = csv.writer(file, lineterminator = "\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug("wrote '%s'", path)


def write_trace_csv(trace : RunTrace, path : PathLike) -> None:
    """
    Writes one trace. The header is `step,time,theta_1..theta_p` followed by
    `vartheta_1..vartheta_p` when the particlewise estimator ran too.

    Raises:
        UsageError: if the path can't be written.
    """
    _write(path, trace.metadata, trace.columns, trace.rows())


def write_summary_csv(rows : Sequence[SweepRow], path : PathLike, metadata : Mapping[str, Any] = {}) -> None:
    """
    Writes L² error rows, one per axis value and variant.
    """
    if not rows:
        raise UsageError("summary has no rows")
    meta = dict(metadata)
    meta.setdefault("l2", L2_CONVENTION)
    _write(path, meta, SweepRow.header(rows[0].error.shape[0]), (x.as_row() for x in rows))


def write_long_csv(traces : Mapping[Any, Sequence[RunTrace]], path : PathLike, metadata : Mapping[str, Any] = {}) -> None:
    """
    Writes traces in long format, one line per record, variant and coordinate:
    `group,seed,variant,step,time,coordinate,value`. `traces` maps a group label
    (an axis value, or an empty string) to its traces.
    """
    def rows():
        for group, items in traces.items():
            for trace in items:
                for variant in trace.variants:
                    values = trace.thetas[variant]
                    for index in range(trace.records):
                        step, time = int(trace.steps[index]), float(trace.times[index])
                        for coordinate in range(trace.p):
                            yield [group, trace.seed, variant.value, step, time, coordinate + 1, float(values[index, coordinate])]

    _write(path, metadata, ["group", "seed", "variant", "step", "time", "coordinate", "value"], rows())


def read_csv_comments(path : PathLike) -> Dict[str, str]:
    """
    Reads the `# key=value` metadata lines at the top of a file written by this module.
    """
    data : Dict[str, str] = {}
    with Path(path).open(encoding = "utf-8") as file:
        for line in file:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            data[key] = value
    return data
