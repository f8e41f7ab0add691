"""Flat ``key = value`` configuration files.

Relative paths are taken relative to the directory of the config file.
"""

import os
from dataclasses import dataclass, fields
from typing import Optional

from .errors import ValidationError

CONFIG_ENV = "NP_CHUNKER_CONFIG"
PATH_KEYS = ("tag_map", "syntactic_table", "semantic_table", "fsm_spec",
             "model")
REPORT_FORMATS = ("json", "text")


@dataclass
class Config:
    tag_map: Optional[str] = None
    syntactic_table: Optional[str] = None
    semantic_table: Optional[str] = None
    fsm_spec: Optional[str] = None
    model: Optional[str] = None
    chunk_len_cap: Optional[int] = None
    epsilon: float = 0.0
    np_label_prefix: str = "N"
    report_format: str = "json"

    def validate(self):
        for key in PATH_KEYS:
            path = getattr(self, key)
            if path is not None and not os.path.isfile(path):
                raise ValidationError("%s: no such file %s" % (key, path))
        if self.chunk_len_cap is not None and self.chunk_len_cap < 1:
            raise ValidationError("chunk_len_cap must be at least 1")
        if self.epsilon < 0:
            raise ValidationError("epsilon must not be negative")
        if not self.np_label_prefix:
            raise ValidationError("np_label_prefix must not be empty")
        if self.report_format not in REPORT_FORMATS:
            raise ValidationError("report_format must be one of %s"
                                  % ", ".join(REPORT_FORMATS))
        return self

    def updated(self, **overrides):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return Config(**values).validate()


def parse_config(lines, base_dir="."):
    known = {f.name for f in fields(Config)}
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValidationError("config line %d: expected key = value"
                                  % lineno)
        if key not in known:
            raise ValidationError("config line %d: unknown key %r"
                                  % (lineno, key))
        if key in values:
            raise ValidationError("config line %d: %s given twice"
                                  % (lineno, key))
        try:
            if key in PATH_KEYS:
                value = os.path.join(base_dir, value)
            elif key == "chunk_len_cap":
                value = int(value)
            elif key == "epsilon":
                value = float(value)
        except ValueError:
            raise ValidationError("config line %d: bad value for %s"
                                  % (lineno, key)) from None
        values[key] = value
    return Config(**values).validate()


def load_config(path=None) -> Config:
    """Read ``path``, or the file named by $NP_CHUNKER_CONFIG, or defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return Config()
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise ValidationError("cannot read config %s: %s"
                              % (path, e.strerror)) from None
    return parse_config(lines, os.path.dirname(os.path.abspath(path)))
