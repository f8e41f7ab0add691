"""Tag patterns: an exact tag, or a prefix followed by a single '*'."""

from .errors import ValidationError


def check_pattern(pattern):
    if not pattern or any(c.isspace() for c in pattern):
        raise ValidationError("bad tag pattern %r" % pattern)
    if "*" in pattern[:-1]:
        raise ValidationError("'*' is only allowed at the end of a pattern: %r"
                              % pattern)
    return pattern


def matches(pattern, tag):
    if pattern.endswith("*"):
        return tag.startswith(pattern[:-1])
    return tag == pattern


def overlap(p, q):
    """True if some tag matches both patterns."""
    if p.endswith("*") and q.endswith("*"):
        a, b = p[:-1], q[:-1]
        return a.startswith(b) or b.startswith(a)
    if p.endswith("*"):
        return matches(p, q)
    if q.endswith("*"):
        return matches(q, p)
    return p == q
