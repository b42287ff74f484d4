"""CSV and JSON serialisation with exact float round-tripping.

Numbers are written with 17 significant digits, so ``read(write(x)) == x``
bitwise. Complex matrices are stored as paired ``<name>_re``/``<name>_im``
columns.
"""
import csv
import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = [
    "fmt",
    "write_matrix",
    "read_matrix",
    "write_vector",
    "read_vector",
    "write_labels",
    "read_labels",
    "write_json",
    "read_json",
    "canonical_json",
    "config_hash",
]


def fmt(x):
    return format(float(x), ".17g")


def _open_w(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def write_matrix(path, M, prefix="x", columns=None):
    """Write a 2-D real or complex array with a header row."""
    M = np.asarray(M)
    if M.ndim == 1:
        M = M[:, None]
    names = list(columns) if columns is not None else [f"{prefix}{j}" for j in range(M.shape[1])]
    is_complex = np.iscomplexobj(M)
    header = [h for n in names for h in (f"{n}_re", f"{n}_im")] if is_complex else names
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in M:
            if is_complex:
                w.writerow([v for z in row for v in (fmt(z.real), fmt(z.imag))])
            else:
                w.writerow([fmt(v) for v in row])


def read_matrix(path):
    """Read a matrix written by :func:`write_matrix`; paired re/im columns become complex."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
    if data.size == 0:
        data = data.reshape(0, len(header))
    paired = (len(header) % 2 == 0 and len(header) > 0
              and all(h.endswith("_re") for h in header[0::2])
              and all(h.endswith("_im") for h in header[1::2]))
    if paired:
        return data[:, 0::2] + 1j * data[:, 1::2]
    return data


def write_vector(path, v, name="value"):
    write_matrix(path, np.asarray(v)[:, None], columns=[name])


def read_vector(path):
    return read_matrix(path)[:, 0]


def write_labels(path, labels):
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["label"])
        for v in labels:
            w.writerow([int(v)])


def read_labels(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return np.array([int(r[0]) for r in rows[1:]], dtype=np.int64)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def canonical_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    with _open_w(path) as fh:
        fh.write(canonical_json(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def config_hash(config):
    return hashlib.sha256(
        json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
