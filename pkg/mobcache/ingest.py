"""
Module supporting reading and writing of the files the command line works
with: mobility traces, estimated model files and placement files.

Placement files are CSV matrices in sparse form, ``node,file,fraction``
rows preceded by a ``# nodes=N files=F`` comment. Transition model files
hold ``kind,i,j,value`` rows where kind is ``transition`` (i to j),
``initial`` (cell i) or ``sojourn`` (cell i); contact model files hold
``user_a,user_b,rate`` rows for pairs with a positive rate preceded by a
``# num_users=K`` comment.
"""
from __future__ import absolute_import, division, print_function
import csv
import io
import logging
import re

import numpy as np
import six

from .mobility import CellTransitionModel, ContactModel, \
    parse_association_trace, parse_contact_trace
from .model import CodedPlacement, DiscretePlacement


logger = logging.getLogger(__name__)


PLACEMENT_HEADER = ("node", "file", "fraction")
TRANSITION_HEADER = ("kind", "i", "j", "value")
CONTACT_MODEL_HEADER = ("user_a", "user_b", "rate")


class InvalidModelFile(ValueError):
    """
    Exception class for model or placement files not in the expected format.
    The message names the file.
    """
    pass


def read_text(path):
    """
    Returns the content of ``path`` as text.

    :raises IOError: naming the path when it cannot be read
    """
    try:
        with io.open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except (IOError, OSError) as e:
        raise IOError("cannot read %s: %s" % (path, e.strerror or e))


def write_text(path, text):
    try:
        with io.open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(six.text_type(text))
    except (IOError, OSError) as e:
        raise IOError("cannot write %s: %s" % (path, e.strerror or e))


def load_association_trace(path):
    trace = parse_association_trace(read_text(path))
    logger.info("read %d association records from %s", len(trace), path)
    return trace


def load_contact_trace(path, num_users=None):
    trace = parse_contact_trace(read_text(path), num_users=num_users)
    logger.info("read %d contacts from %s", len(trace), path)
    return trace


def _comment_value(text, key, path):
    match = re.search(r"^#.*\b%s=(\d+)" % key, text, re.MULTILINE)
    if match is None:
        raise InvalidModelFile("%s: missing '# %s=' line" % (path, key))
    return int(match.group(1))


def _data_rows(text, header, path):
    """
    Iterator yielding the fields of the rows after ``header``, skipping
    blank lines and ``#`` comments.
    """
    reader = csv.reader(line for line in six.StringIO(text)
                        if line.strip() and not line.startswith("#"))
    for number, fields in enumerate(reader):
        fields = [f.strip() for f in fields]
        if number == 0:
            if fields != list(header):
                raise InvalidModelFile("%s: expected header %s"
                                       % (path, ",".join(header)))
            continue
        if len(fields) != len(header):
            raise InvalidModelFile("%s: expected %d fields, got %r"
                                   % (path, len(header), fields))
        yield fields


def _csv_text(header, rows, comments=()):
    out = six.StringIO()
    for comment in comments:
        out.write("# %s\n" % comment)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def format_placement(placement):
    fractions = placement.fractions()
    rows = [(node, f, "%.9g" % fractions[node, f])
            for node, f in zip(*np.nonzero(fractions))]
    return _csv_text(PLACEMENT_HEADER, rows,
                     ["nodes=%d files=%d" % fractions.shape])


def write_placement(placement, path):
    write_text(path, format_placement(placement))


def read_placement(path):
    """
    Reads a placement file. A file holding only whole files gives a
    :py:class:`DiscretePlacement`, anything else a
    :py:class:`CodedPlacement`.
    """
    text = read_text(path)
    shape = (_comment_value(text, "nodes", path),
             _comment_value(text, "files", path))
    fractions = np.zeros(shape)
    try:
        for node, f, value in _data_rows(text, PLACEMENT_HEADER, path):
            node, f = int(node), int(f)
            if node < 0 or f < 0:
                raise InvalidModelFile("%s: negative index in placement row "
                                       "%d,%d" % (path, node, f))
            fractions[node, f] = float(value)
    except InvalidModelFile:
        raise
    except (ValueError, IndexError) as e:
        raise InvalidModelFile("%s: bad placement row (%s)" % (path, e))
    if np.all((fractions == 0) | (fractions == 1)):
        return DiscretePlacement(fractions > 0)
    return CodedPlacement(fractions)


def format_transition_model(model):
    rows = [("transition", i, j, repr(float(model.transition[i, j])))
            for i, j in zip(*np.nonzero(model.transition))]
    rows.extend(("initial", i, "", repr(float(p)))
                for i, p in enumerate(model.initial))
    rows.extend(("sojourn", i, "", repr(float(t)))
                for i, t in enumerate(model.mean_sojourn))
    return _csv_text(TRANSITION_HEADER, rows)


def write_transition_model(model, path):
    write_text(path, format_transition_model(model))


def read_transition_model(path):
    text = read_text(path)
    rows = list(_data_rows(text, TRANSITION_HEADER, path))
    try:
        num_cells = 1 + max(int(i) for _, i, _, _ in rows)
        transition = np.zeros((num_cells, num_cells))
        initial = np.zeros(num_cells)
        sojourn = np.zeros(num_cells)
        for kind, i, j, value in rows:
            if kind == "transition":
                transition[int(i), int(j)] = float(value)
            elif kind == "initial":
                initial[int(i)] = float(value)
            elif kind == "sojourn":
                sojourn[int(i)] = float(value)
            else:
                raise InvalidModelFile("%s: unknown row kind %r"
                                       % (path, kind))
    except InvalidModelFile:
        raise
    except (ValueError, IndexError) as e:
        raise InvalidModelFile("%s: bad transition model row (%s)"
                               % (path, e))
    return CellTransitionModel(transition, initial, sojourn)


def format_contact_model(model):
    rows = [(a, b, repr(float(model.rate[a, b])))
            for a, b in zip(*np.nonzero(np.triu(model.rate, k=1)))]
    return _csv_text(CONTACT_MODEL_HEADER, rows,
                     ["num_users=%d" % model.num_users])


def write_contact_model(model, path):
    write_text(path, format_contact_model(model))


def read_contact_model(path):
    text = read_text(path)
    num_users = _comment_value(text, "num_users", path)
    rate = np.zeros((num_users, num_users))
    try:
        for a, b, value in _data_rows(text, CONTACT_MODEL_HEADER, path):
            rate[int(a), int(b)] = rate[int(b), int(a)] = float(value)
    except InvalidModelFile:
        raise
    except (ValueError, IndexError) as e:
        raise InvalidModelFile("%s: bad contact model row (%s)" % (path, e))
    return ContactModel(rate)
