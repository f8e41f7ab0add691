"""Command line: train, chunk, extract-np, evaluate, stats."""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .chunker import chunks_from_spans, read_chunked, render_chunks
from .config import Config, load_config
from .corpus import (TagMap, build_parse_tree, parse_susanne_stream,
                     read_vertical_tagged, records_to_sentence, split_annotation)
from .errors import DataError, FormatError, NpChunkerError, UsageError
from .evaluation import (ContingencyTable, EvalReport, NpTaxonomyCounts,
                         chunker_eval, classify_extracted_nps,
                         np_label_predicate, np_taxonomy_counts)
from .fsm import load_fsm_spec, phrases_from_json, phrases_to_json, \
    render_np_brackets
from .grammar import (CHUNK_LEN_CAP, extract_training_instances, fit_model,
                      load_model, save_model)
from .heads import HeadFinder, PriorityTable
from .pipeline import Pipeline
from .util import atomic_write

INPUT_FORMATS = ("auto", "susanne", "vertical", "chunks")


# -- input ---------------------------------------------------------------------

def _expand(paths):
    out = []
    for p in paths:
        if os.path.isdir(p):
            out.extend(os.path.join(p, f) for f in sorted(os.listdir(p))
                       if os.path.isfile(os.path.join(p, f))
                       and not f.startswith("."))
        else:
            out.append(p)
    return out


def _read_text(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="latin-1") as f:
            return f.read()
    except OSError as e:
        raise DataError("cannot read %s: %s" % (path, e.strerror)) from None


def detect_format(text):
    for line in text.splitlines():
        if not line.strip():
            continue
        fields = line.split("\t") if line.count("\t") == 5 else line.split()
        if len(fields) == 6:
            try:
                split_annotation(fields[5])
                return "susanne"
            except FormatError:
                pass
        items = line.split()
        if items[0] == "[" and "]" in items:
            return "chunks"
        if all("_" in it[1:] for it in items):
            return "vertical"
        break
    raise UsageError("cannot tell the input format; use --input-format")


def _susanne_groups(paths):
    groups = []
    for path in paths:
        text = _read_text(path)
        groups.extend(parse_susanne_stream(text.splitlines()))
    return groups


def read_sentences(paths, fmt, tag_map):
    """Returns a list of (sentence, chunk spans or None, group or None)."""
    out = []
    for path in paths:
        text = _read_text(path)
        kind = detect_format(text) if fmt == "auto" else fmt
        lines = text.splitlines()
        if kind == "susanne":
            for g in parse_susanne_stream(lines):
                out.append((records_to_sentence(g, tag_map), None, g))
        elif kind == "vertical":
            for s in read_vertical_tagged(lines):
                out.append((s, None, None))
        else:
            for s, spans in read_chunked(lines):
                out.append((s, spans, None))
    # plain text carries no ids; number its sentences by position
    for i, (s, _, group) in enumerate(out, 1):
        if group is None:
            s.source_id = "s%d" % i
    return out


# -- setup -----------------------------------------------------------------------

def _config(args):
    cfg = load_config(args.config)
    over = {}
    for key in ("model", "tag_map", "fsm_spec", "syntactic_table",
                "semantic_table"):
        over[key] = getattr(args, key, None)
    over["chunk_len_cap"] = getattr(args, "cap", None)
    over["report_format"] = getattr(args, "format", None)
    over["epsilon"] = getattr(args, "epsilon", None)
    return cfg.updated(**over)


def _tag_map(cfg):
    return TagMap.load(cfg.tag_map) if cfg.tag_map else None


def _pipeline(cfg: Config, need_model=True):
    model = None
    if cfg.model:
        model = load_model(cfg.model)
    elif need_model:
        raise UsageError("no model given (use --model or the config file)")
    syn = PriorityTable.load(cfg.syntactic_table) if cfg.syntactic_table \
        else None
    sem = PriorityTable.load(cfg.semantic_table) if cfg.semantic_table \
        else None
    return Pipeline(model, HeadFinder(syn, sem), load_fsm_spec(cfg.fsm_spec),
                    cfg.chunk_len_cap)


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


# -- workers ---------------------------------------------------------------------

_worker = {}


def _init_worker(cfg, need_model):
    _worker["pipe"] = _pipeline(cfg, need_model)


def _chunk_one(sentence):
    return _worker["pipe"].chunk(sentence).spans()


def _extract_one(item):
    sentence, spans = item
    pipe = _worker["pipe"]
    if spans is None:
        spans = pipe.chunk(sentence).spans()
    return spans, pipe.extract_from_spans(sentence, spans)


def _map(func, items, cfg, jobs, need_model=True):
    if jobs <= 1 or len(items) < 2:
        _init_worker(cfg, need_model)
        return [func(x) for x in items]
    with ProcessPoolExecutor(jobs, initializer=_init_worker,
                             initargs=(cfg, need_model)) as ex:
        return list(ex.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- commands --------------------------------------------------------------------

def cmd_train(args):
    cfg = _config(args)
    tag_map = _tag_map(cfg)
    cap = cfg.chunk_len_cap or CHUNK_LEN_CAP
    paths = _expand(args.inputs)
    instances, pairs = [], []
    sentences = 0
    for g in _susanne_groups(paths):
        tree = build_parse_tree(g)
        inst, prs = extract_training_instances(tree, g, tag_map, cap)
        instances.extend(inst)
        pairs.extend(prs)
        sentences += 1
    provenance = {
        "files": ",".join(os.path.basename(p) for p in paths),
        "sentences": str(sentences),
        "chunk_len_cap": str(cap),
    }
    model = fit_model(instances, pairs, cfg.epsilon, provenance)
    save_model(model, args.output)
    return 0


def cmd_chunk(args):
    cfg = _config(args)
    items = read_sentences(_expand(args.inputs), args.input_format,
                           _tag_map(cfg))
    sentences = [s for s, _, _ in items]
    results = _map(_chunk_one, sentences, cfg, args.jobs)
    lines = []
    for s, spans in zip(sentences, results):
        lines.append(render_chunks(chunks_from_spans(s, spans)))
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_extract(args):
    cfg = _config(args)
    items = read_sentences(_expand(args.inputs), args.input_format,
                           _tag_map(cfg))
    need_model = any(spans is None for _, spans, _ in items)
    work = [(s, spans) for s, spans, _ in items]
    results = _map(_extract_one, work, cfg, args.jobs, need_model)
    lines = []
    rows = []
    for (s, _), (_, phrases) in zip(work, results):
        lines.append(render_np_brackets(s.tokens, phrases))
        rows.append((s.source_id, phrases))
    _emit("".join(line + "\n" for line in lines), args.output)
    if args.json:
        _emit(phrases_to_json(rows), args.json)
    return 0


def _category(group):
    return group[0].ref_id[:1] if group and group[0].ref_id else "?"


def cmd_evaluate(args):
    cfg = _config(args)
    if args.system and cfg.model:
        raise UsageError("give either a model or --system, not both")
    tag_map = _tag_map(cfg)
    groups = _susanne_groups(_expand(args.gold))
    is_np = np_label_predicate(cfg.np_label_prefix)
    sentences = [records_to_sentence(g, tag_map) for g in groups]
    trees = [build_parse_tree(g) for g in groups]
    chunk_items = []
    if args.system:
        by_id = phrases_from_json(_read_text(args.system))
        unknown = set(by_id) - {s.source_id for s in sentences}
        if unknown:
            raise DataError("system spans name unknown sentences: %s"
                            % ", ".join(sorted(unknown)[:5]))
        extracted = [by_id.get(s.source_id, []) for s in sentences]
        elapsed = None
    else:
        t0 = time.perf_counter()
        results = _map(_extract_one, [(s, None) for s in sentences], cfg,
                       args.jobs)
        elapsed = time.perf_counter() - t0
        extracted = [p for _, p in results]
        chunk_items = [(_category(g), t, spans)
                       for g, t, (spans, _) in zip(groups, trees, results)]
    taxonomy, tables = {}, {}
    for g, t, s, phrases in zip(groups, trees, sentences, extracted):
        words = s.words
        counts = np_taxonomy_counts(t, words, is_np)
        ext, table = classify_extracted_nps(phrases, t, words, is_np)
        for f in ("enp", "cnp", "cmnp", "cmnp_min", "cmmnp"):
            setattr(counts, f, getattr(ext, f))
        for key in (_category(g), "total"):
            taxonomy.setdefault(key, NpTaxonomyCounts()).add(counts)
            tables.setdefault(key, ContingencyTable()).add(table)
    taxonomy = _total_last(taxonomy)
    tables = _total_last(tables)
    words = sum(len(s) for s in sentences)
    report = EvalReport(chunker_eval(chunk_items) if chunk_items else {},
                        taxonomy, tables,
                        words / elapsed if elapsed else None)
    _emit(report.to_json() if cfg.report_format == "json"
          else report.to_text(), args.output)
    return 0


def _total_last(d):
    out = {k: d[k] for k in sorted(d) if k != "total"}
    if "total" in d:
        out["total"] = d["total"]
    return out


def cmd_stats(args):
    cfg = _config(args)
    is_np = np_label_predicate(cfg.np_label_prefix)
    per = {}
    for g in _susanne_groups(_expand(args.inputs)):
        tree = build_parse_tree(g)
        words = [r.surface for r in g]
        c = np_taxonomy_counts(tree, words, is_np)
        for key in (_category(g), "total"):
            row = per.setdefault(key, {"sentences": 0, "words": 0,
                                       "counts": NpTaxonomyCounts()})
            row["sentences"] += 1
            row["words"] += len(g)
            row["counts"].add(c)
    per = _total_last(per)
    if cfg.report_format == "json":
        data = {"schema": 1, "categories": {
            k: {"sentences": v["sentences"], "words": v["words"],
                "np": v["counts"].np, "mnp": v["counts"].mnp,
                "mnp_min": v["counts"].mnp_min, "mmnp": v["counts"].mmnp,
                "anp": v["counts"].anp} for k, v in per.items()}}
        text = json.dumps(data, indent=1) + "\n"
    else:
        lines = ["%-8s %9s %8s %7s %7s %7s %7s %7s" % (
            "category", "sentences", "words", "NP", "MNP", "mNP", "MmNP",
            "ANP")]
        for k, v in per.items():
            c = v["counts"]
            lines.append("%-8s %9d %8d %7d %7d %7d %7d %7d" % (
                k, v["sentences"], v["words"], c.np, c.mnp, c.mnp_min,
                c.mmnp, c.anp))
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="npchunker",
        description="Probabilistic chunking and noun-phrase extraction.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="key=value config file "
                   "(default: $NP_CHUNKER_CONFIG)")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(sp, model=True):
        sp.add_argument("-o", "--output", help="output file (default stdout)")
        sp.add_argument("--tag-map", dest="tag_map")
        if model:
            sp.add_argument("--model")
            sp.add_argument("--cap", type=int, help="longest chunk considered")
            sp.add_argument("--fsm-spec", dest="fsm_spec")
            sp.add_argument("--syntactic-table", dest="syntactic_table")
            sp.add_argument("--semantic-table", dest="semantic_table")
            sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("train", help="fit a chunk model from SUSANNE files")
    sp.add_argument("inputs", nargs="+", help="files or directories")
    sp.add_argument("-o", "--output", required=True, help="model file")
    sp.add_argument("--tag-map", dest="tag_map")
    sp.add_argument("--cap", type=int, help="longest training chunk")
    sp.add_argument("--epsilon", type=float)
    sp.set_defaults(func=cmd_train)

    for name, func, formats, helptext in (
            ("chunk", cmd_chunk, INPUT_FORMATS[:3], "chunk tagged text"),
            ("extract-np", cmd_extract, INPUT_FORMATS,
             "extract noun phrases")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("inputs", nargs="+")
        sp.add_argument("--input-format", choices=formats, default="auto")
        common(sp)
        if name == "extract-np":
            sp.add_argument("--json", help="also write the spans as JSON")
        sp.set_defaults(func=func)

    sp = sub.add_parser("evaluate", help="score against SUSANNE parses")
    sp.add_argument("gold", nargs="+")
    sp.add_argument("--system", help="extracted spans (JSON from extract-np)")
    sp.add_argument("--format", choices=("json", "text"))
    common(sp)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("stats", help="noun-phrase counts of a treebank")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--format", choices=("json", "text"))
    common(sp, model=False)
    sp.set_defaults(func=cmd_stats)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NpChunkerError as e:
        sys.stderr.write("error: %s: %s\n" % (e.code, e))
        return e.exit_status
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
