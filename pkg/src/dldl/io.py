"""Text formats: feature and label files, the label prior, predictions and models.

Model files are line-oriented text starting with the magic line ``DLDL/1``.
Every float is written with 17 significant digits so a load reproduces the
saved matrices bit for bit. All writers go through a temporary file and an
atomic rename, so a failed write never leaves a partial artifact behind.
"""
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidArgumentError, UnsupportedVersionError
from .model import HyperParams, LabelPrior, ModelState

MAGIC = "DLDL/1"
_HP_FIELDS = {
    "alpha": float, "beta": float, "delta": float, "dict_size": int,
    "knn": int, "max_iter": int, "rel_tol": float, "seed": int,
}


def _fmt(v):
    return format(float(v), ".17g")


def write_text_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _parse_float(token, line, col=None):
    try:
        v = float(token)
    except ValueError:
        where = f" column {col}" if col is not None else ""
        raise FormatError(f"non-numeric value {token.strip()!r}{where}", line=line) from None
    if not math.isfinite(v):
        where = f" column {col}" if col is not None else ""
        raise FormatError(f"non-finite value {token.strip()!r}{where}", line=line)
    return v


def _parse_int(token, line):
    try:
        return int(token.strip())
    except ValueError:
        raise FormatError(f"expected an integer, got {token.strip()!r}", line=line) from None


def load_features(path):
    """Read one comma-separated sample per row; returns a dim x N matrix."""
    rows = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            tokens = raw.split(",")
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise FormatError(f"expected {width} values, found {len(tokens)}", line=lineno)
            rows.append([_parse_float(t, lineno, c + 1) for c, t in enumerate(tokens)])
    if not rows:
        raise FormatError(f"no samples in {path}")
    return np.array(rows, dtype=np.float64).T


def read_index_labels(path):
    """Parse ``index,label`` lines into two integer arrays; rejects duplicates."""
    indices, labels = [], []
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            parts = raw.split(",")
            if len(parts) < 2:
                raise FormatError("expected 'index,label'", line=lineno)
            idx = _parse_int(parts[0], lineno)
            lab = _parse_int(parts[1], lineno)
            if idx < 0:
                raise FormatError(f"negative index {idx}", line=lineno)
            if lab < 0:
                raise FormatError(f"negative label {lab}; omit the line to mark a sample unlabeled",
                                  line=lineno)
            if idx in seen:
                raise FormatError(f"duplicate index {idx}", line=lineno)
            seen.add(idx)
            indices.append(idx)
            labels.append(lab)
    return np.array(indices, dtype=np.int64), np.array(labels, dtype=np.int64)


def load_labels(path, n_samples, n_classes=None):
    """Return ``(labels, C)`` with -1 marking samples absent from the file.

    ``C`` is ``1 + max label`` unless ``n_classes`` is given explicitly, which
    is required when the file holds no labels at all.
    """
    indices, labs = read_index_labels(path)
    if indices.size and indices.max() >= n_samples:
        raise FormatError(f"index {int(indices.max())} out of range for {n_samples} samples")
    labels = np.full(n_samples, -1, dtype=np.int64)
    labels[indices] = labs
    c = int(labs.max()) + 1 if labs.size else 0
    if n_classes is not None:
        if n_classes < c:
            raise InvalidArgumentError(f"label {c - 1} does not fit in {n_classes} classes")
        c = int(n_classes)
    if c < 1:
        raise InvalidArgumentError("no labels found; pass the class count explicitly")
    return labels, c


def build_prior(labels, n_classes):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or labels.size < 1:
        raise InvalidArgumentError("labels must be a non-empty vector")
    if n_classes < 1 or np.any(labels < -1) or np.any(labels >= n_classes):
        raise InvalidArgumentError(f"labels must lie in {{-1}} or [0, {n_classes})")
    mask = labels >= 0
    o = np.full((n_classes, labels.size), 0.5)
    o[:, mask] = 0.0
    o[labels[mask], np.flatnonzero(mask)] = 1.0
    return LabelPrior(o=o, labeled_mask=mask)


def _matrix_block(name, m):
    m = np.atleast_2d(m)
    lines = [f"[{name}] {m.shape[0]} {m.shape[1]}"]
    lines.extend(",".join(_fmt(v) for v in row) for row in m)
    return lines


def dumps_model(state, hp, prior=None):
    prior = prior if prior is not None else state.prior
    lines = [MAGIC, "[hyperparams]"]
    lines.extend(f"{name}={_fmt(getattr(hp, name)) if kind is float else getattr(hp, name)}"
                 for name, kind in _HP_FIELDS.items())
    lines.append("[meta]")
    lines.append(f"variant={state.variant}")
    lines.append(f"initial_loss={'' if state.initial_loss is None else _fmt(state.initial_loss)}")
    lines.append(f"loss={','.join(_fmt(v) for v in state.loss_history)}")
    for name, m in (("D", state.d), ("S", state.s), ("B", state.b), ("F", state.f)):
        lines.extend(_matrix_block(name, m))
    if prior is not None:
        lines.extend(_matrix_block("O", prior.o))
        lines.extend(_matrix_block("mask", prior.labeled_mask.astype(np.float64)[None, :]))
    lines.append("[end]")
    return "\n".join(lines) + "\n"


def save_model(state, hp, path, prior=None):
    write_text_atomic(path, dumps_model(state, hp, prior))


class _Reader:
    def __init__(self, lines):
        self.lines = lines
        self.pos = 0

    def next(self, section):
        if self.pos >= len(self.lines):
            raise FormatError("unexpected end of file", section=section)
        self.pos += 1
        return self.lines[self.pos - 1].rstrip("\r\n")

    def expect_header(self, name):
        line = self.next(name)
        if line.split(" ", 1)[0] != f"[{name}]":
            raise FormatError(f"expected [{name}], found {line[:40]!r}", line=self.pos, section=name)
        return line

    def key_values(self, section, keys):
        self.expect_header(section)
        out = {}
        for key in keys:
            line = self.next(section)
            k, sep, v = line.partition("=")
            if not sep or k != key:
                raise FormatError(f"expected '{key}=...'", line=self.pos, section=section)
            out[key] = v
        return out

    def matrix(self, name):
        header = self.expect_header(name).split()
        if len(header) != 3:
            raise FormatError("header must give rows and columns", line=self.pos, section=name)
        rows, cols = _parse_int(header[1], self.pos), _parse_int(header[2], self.pos)
        if rows < 1 or cols < 1:
            raise FormatError(f"invalid shape {rows}x{cols}", line=self.pos, section=name)
        out = np.empty((rows, cols))
        for r in range(rows):
            line = self.next(name)
            if line.startswith("["):
                raise FormatError(f"truncated: {r} of {rows} rows present", line=self.pos, section=name)
            tokens = line.split(",")
            if len(tokens) != cols:
                raise FormatError(f"expected {cols} values, found {len(tokens)}", line=self.pos, section=name)
            out[r] = [_parse_float(t, self.pos) for t in tokens]
        return out


def loads_model(text):
    """Parse a model file body; returns ``(state, hp)``."""
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty model file", line=1)
    if lines[0] != MAGIC:
        if lines[0].startswith("DLDL/"):
            raise UnsupportedVersionError(f"unsupported model version {lines[0]!r}", line=1)
        raise FormatError(f"missing {MAGIC} magic line", line=1)
    rd = _Reader(lines)
    rd.pos = 1
    raw = rd.key_values("hyperparams", list(_HP_FIELDS))
    try:
        hp = HyperParams(**{k: kind(raw[k]) for k, kind in _HP_FIELDS.items()})
    except (ValueError, InvalidArgumentError) as exc:
        raise FormatError(f"bad hyperparameters: {exc}", section="hyperparams") from None
    meta = rd.key_values("meta", ["variant", "initial_loss", "loss"])
    loss = [_parse_float(t, rd.pos) for t in meta["loss"].split(",")] if meta["loss"] else []
    initial = _parse_float(meta["initial_loss"], rd.pos) if meta["initial_loss"] else None

    d, s, b, f = (rd.matrix(name) for name in ("D", "S", "B", "F"))
    k = d.shape[1]
    if s.shape[0] != k or b.shape[1] != k or f.shape != (b.shape[0], s.shape[1]):
        raise FormatError(
            f"inconsistent shapes D{d.shape} S{s.shape} B{b.shape} F{f.shape}", section="F")
    prior = None
    nxt = rd.next("end")
    if nxt.startswith("[O]"):
        rd.pos -= 1
        o = rd.matrix("O")
        mask = rd.matrix("mask")
        if o.shape != f.shape or mask.shape != (1, f.shape[1]):
            raise FormatError("prior shapes do not match F", section="mask")
        try:
            prior = LabelPrior(o=o, labeled_mask=mask[0] != 0)
        except InvalidArgumentError as exc:
            raise FormatError(str(exc), section="O") from None
        nxt = rd.next("end")
    if nxt != "[end]":
        raise FormatError(f"expected [end], found {nxt[:40]!r}", line=rd.pos, section="end")
    state = ModelState(d=d, s=s, b=b, f=f, prior=prior, loss_history=loss,
                       initial_loss=initial, variant=meta["variant"])
    return state, hp


def load_model(path):
    with open(path) as fh:
        return loads_model(fh.read())


def format_predictions(report, with_scores=False):
    lines = []
    for col, (idx, dec) in enumerate(zip(report.indices, report.decisions)):
        parts = [str(int(idx)), str(int(dec))]
        if with_scores:
            parts.extend(_fmt(v) for v in report.scores[:, col])
        lines.append(",".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def save_predictions(report, path, with_scores=False):
    write_text_atomic(path, format_predictions(report, with_scores))


def load_predictions(path):
    """Return ``(indices, decisions)`` from a predictions file; score columns are ignored."""
    return read_index_labels(path)


def save_loss_log(history, path):
    write_text_atomic(path, "".join(_fmt(v) + "\n" for v in history))
