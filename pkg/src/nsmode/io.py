"""CSV artifacts with a reproducible parameter header and matching gnuplot scripts."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, dump_config


def echo_header(cfg: RunConfig, command: str) -> str:
    """'# '-prefixed INI echo of the full resolved config (no timestamps)."""
    lines = [f"nsmode {__version__} {command}"]
    lines += dump_config(cfg).rstrip("\n").splitlines()
    return "".join(f"# {ln}\n" if ln else "#\n" for ln in lines)


def atomic_write(path, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def format_csv(columns: list[str], rows, header: str = "") -> str:
    out = [header, ",".join(columns), "\n"]
    body = "\n".join(",".join(_cell(v) for v in row) for row in rows)
    return "".join(out) + body + ("\n" if body else "")


def write_csv(path, columns: list[str], rows, header: str = "") -> Path:
    return atomic_write(path, format_csv(columns, list(rows), header))


def gnuplot_script(csv_path, x: str, ys: list[str], columns: list[str], *,
                   xlabel: str = "", ylabel: str = "", title: str = "") -> str:
    csv_name = Path(csv_path).name
    png = Path(csv_path).with_suffix(".png").name
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f"set output '{png}'",
        f"set xlabel '{xlabel or x}'",
        f"set ylabel '{ylabel}'",
    ]
    if title:
        lines.append(f"set title '{title}'")
    xi = columns.index(x) + 1
    plots = [f"'{csv_name}' using {xi}:{columns.index(y) + 1} with lines title '{y}'"
             for y in ys]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_plot(csv_path, x, ys, columns, **kw) -> Path:
    return atomic_write(Path(csv_path).with_suffix(".gp"),
                        gnuplot_script(csv_path, x, ys, columns, **kw))
