"""Command line front-end.

Every subcommand reads UTF-8 token files and writes data to files or stdout;
diagnostics go to stderr. Exit status: 0 success, 1 validation failure,
2 I/O or contract failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .annotate import (
    DEFAULT_BRACKETED_LABELS,
    OPEN_BRACKET,
    CLOSE_BRACKET,
    PENN_TO_LUCY,
    PosTagMap,
    annotate_catcl,
    annotate_pos,
    disambiguate_catcl,
    linearize_tree,
    parse_bracketed_tree,
    strip_sentinels,
)
from .corpus import (
    ASCII_SEP,
    FEATURE_SEP,
    ParallelPair,
    Sentence,
    StatsAccumulator,
    corpus_stats,
    iter_lines,
    lowercase,
    parse_token_line,
    read_alignment_line,
    render_token_line,
    validate_arity,
)
from .entity import (
    AttentionMatrix,
    PhraseTable,
    build_phrase_table,
    check_reserved_tags,
    duplicate_augment,
    parse_sidecar,
    parse_spans,
    prepare_training_pair,
    render_sidecar,
    replace_unknowns,
    restore_tags,
    tag_entities,
)
from .errors import EmptyCorpus, LineCountMismatch, ToolkitError
from .lexicon import TermDictionary, build_ambiguity_index, parse_lexicon, parse_term_dictionary
from .metrics import (
    bleu_from_stats,
    bleu_stats,
    bootstrap_significance,
    chrf_from_stats,
    chrf_stats,
    count_unks,
    ter_stats,
)
from .pipeline import (
    SPAN_PRESENCE,
    SURFACE_SET,
    Config,
    FocusPredicate,
    TranslatorContract,
    backtranslate_round,
    cap_vocabulary,
    exclusion_set,
    select_focused,
    take_random,
)
from .subword import MAX_MERGES, PREFIX, SUFFIX, BpeModel, bpe_apply, bpe_learn, bpe_undo

log = logging.getLogger("rbmtkit")


# I/O helpers

def _lines(path) -> list[str]:
    if str(path) == "-":
        out = []
        for raw in sys.stdin.buffer:
            line = raw.decode("utf-8").rstrip("\n")
            out.append(line[:-1] if line.endswith("\r") else line)
        return out
    return list(iter_lines(path))


def _sentences(path, sep) -> list[Sentence]:
    return [parse_token_line(line, sep) for line in _lines(path)]


@contextlib.contextmanager
def _out(path):
    if path is None or str(path) == "-":
        fh = open(sys.stdout.fileno(), "w", encoding="utf-8", newline="\n", closefd=False)
        try:
            yield fh
        finally:
            fh.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _write_lines(path, lines) -> None:
    with _out(path) as fh:
        for line in lines:
            fh.write(line + "\n")


def _write_sentences(path, sentences, sep) -> None:
    _write_lines(path, (render_token_line(s, sep) for s in sentences))


def _same_length(what, *seqs):
    if len({len(s) for s in seqs}) > 1:
        raise LineCountMismatch(f"{what}: line counts differ {[len(s) for s in seqs]}")


def _csv(value: str) -> list[str]:
    return [v for v in (x.strip() for x in value.split(",")) if v]


def _spans_file(path, n):
    if path is None:
        return [[] for _ in range(n)]
    spans = [parse_spans(line) for line in _lines(path)]
    _same_length("spans vs corpus", spans, range(n))
    return spans


def _align_file(path, n):
    links = [read_alignment_line(line) for line in _lines(path)]
    _same_length("alignments vs corpus", links, range(n))
    return links


def _tag_map(path) -> PosTagMap:
    if path is None:
        return PosTagMap.from_mapping(PENN_TO_LUCY)
    return PosTagMap.parse(Path(path).read_text(encoding="utf-8"))


def _index(path):
    return build_ambiguity_index(parse_lexicon(Path(path).read_text(encoding="utf-8")))


def _attention(path, n):
    mats = [AttentionMatrix.from_json(line) for line in _lines(path) if line.strip()]
    _same_length("attention vs hypotheses", mats, range(n))
    return mats


# subcommands

def cmd_annotate(args):
    index = _index(args.lexicon)
    _write_sentences(args.output, (annotate_catcl(s, index) for s in _sentences(args.input, args.sep)), args.sep)


def cmd_disambiguate(args):
    index, tag_map = _index(args.lexicon), _tag_map(args.tag_map)
    sents, tags = _sentences(args.input, args.sep), [line.split() for line in _lines(args.tags)]
    _same_length("corpus vs tags", sents, tags)
    _write_sentences(
        args.output, (disambiguate_catcl(s, t, tag_map, index) for s, t in zip(sents, tags)), args.sep
    )


def cmd_pos_annotate(args):
    sents, tags = _sentences(args.input, args.sep), [line.split() for line in _lines(args.tags)]
    _same_length("corpus vs tags", sents, tags)
    _write_sentences(args.output, (annotate_pos(s, t) for s, t in zip(sents, tags)), args.sep)


def cmd_linearize(args):
    labels = _csv(args.labels) if args.labels is not None else sorted(DEFAULT_BRACKETED_LABELS)
    out = []
    for line in _lines(args.input):
        if not line.strip():
            out.append(Sentence())
            continue
        tree = strip_sentinels(parse_bracketed_tree(line), args.sentinel)
        out.append(linearize_tree(tree, labels, args.min_span) if tree else Sentence())
    _write_sentences(args.output, out, args.sep)


def cmd_bpe_learn(args):
    model = bpe_learn(_sentences(args.input, args.sep), args.max_merges, args.min_frequency, args.marker)
    with _out(args.output) as fh:
        fh.write(model.dumps())
    log.info("learned %d merges", len(model))


def cmd_bpe_apply(args):
    model = BpeModel.loads(Path(args.model).read_text(encoding="utf-8"))
    _write_sentences(args.output, (bpe_apply(s, model) for s in _sentences(args.input, args.sep)), args.sep)


def cmd_bpe_undo(args):
    warnings = Counter()
    _write_sentences(
        args.output, [bpe_undo(s, args.marker, warnings) for s in _sentences(args.input, args.sep)], args.sep
    )
    if warnings:
        log.warning("dangling markers: %d", warnings["dangling_marker"])


def _entity_opts(args):
    return dict(mode=args.mode, tagset=args.tagset, default_label=args.default_label, binary_tag=args.binary_tag)


def cmd_entity_tag(args):
    sents = _sentences(args.input, args.sep)
    spans = _spans_file(args.spans, len(sents))
    results = [tag_entities(s, sp, **_entity_opts(args)) for s, sp in zip(sents, spans)]
    _write_sentences(args.output, (r[0] for r in results), args.sep)
    if args.sidecar:
        _write_lines(args.sidecar, (render_sidecar(r[1]) for r in results))


def _pairs(args):
    src, tgt = _sentences(args.src, args.sep), _sentences(args.tgt, args.sep)
    _same_length("source vs target", src, tgt)
    return [ParallelPair(i, s, t) for i, (s, t) in enumerate(zip(src, tgt))]


def cmd_prepare_pairs(args):
    pairs = _pairs(args)
    spans = _spans_file(args.spans, len(pairs))
    links = _align_file(args.align, len(pairs))
    warnings = Counter()
    out = [prepare_training_pair(p, sp, al, warnings=warnings, **_entity_opts(args)) for p, sp, al in zip(pairs, spans, links)]
    _write_sentences(args.out_src, (p.source for p in out), args.sep)
    _write_sentences(args.out_tgt, (p.target for p in out), args.sep)


def cmd_duplicate(args):
    pairs = _pairs(args)
    spans = _spans_file(args.spans, len(pairs))
    links = _align_file(args.align, len(pairs)) if args.align else None
    out = list(duplicate_augment(pairs, spans, links, **_entity_opts(args)))
    _write_sentences(args.out_src, (p.source for p in out), args.sep)
    _write_sentences(args.out_tgt, (p.target for p in out), args.sep)
    log.info("%d input pairs -> %d output pairs", len(pairs), len(out))


def cmd_restore(args):
    hyps, srcs = _sentences(args.hyp, args.sep), _sentences(args.src, args.sep)
    sidecars = [parse_sidecar(line) for line in _lines(args.sidecar)]
    _same_length("hypotheses vs sources vs sidecar", hyps, srcs, sidecars)
    attn = _attention(args.attention, len(hyps))
    terms = parse_term_dictionary(Path(args.terms).read_text(encoding="utf-8")) if args.terms else TermDictionary()
    labels = _csv(args.tags)
    warnings = Counter()
    out = [restore_tags(h, s, sc, a, terms, labels, warnings) for h, s, sc, a in zip(hyps, srcs, sidecars, attn)]
    _write_sentences(args.output, out, args.sep)
    for key, n in sorted(warnings.items()):
        log.warning("%s: %d", key, n)


def cmd_phrase_table(args):
    pairs = _pairs(args)
    table = build_phrase_table(pairs, _align_file(args.align, len(pairs)))
    with _out(args.output) as fh:
        fh.write(table.dumps())


def cmd_unk_replace(args):
    hyps, srcs = _sentences(args.hyp, args.sep), _sentences(args.src, args.sep)
    _same_length("hypotheses vs sources", hyps, srcs)
    attn = _attention(args.attention, len(hyps))
    table = PhraseTable.loads(Path(args.table).read_text(encoding="utf-8"))
    out = [replace_unknowns(h, s, a, table, args.unk) for h, s, a in zip(hyps, srcs, attn)]
    _write_sentences(args.output, out, args.sep)


def cmd_cap_vocab(args):
    capped, vocab = cap_vocabulary(_sentences(args.input, args.sep), args.max_size, args.unk)
    _write_sentences(args.output, capped, args.sep)
    if args.vocab_out:
        _write_lines(args.vocab_out, (f"{w}\t{n}" for w, n in vocab))


def cmd_select_testset(args):
    pairs = _pairs(args)
    exclusion = set()
    for path in args.exclude or []:
        exclusion |= exclusion_set(_lines(path))
    if args.spans:
        predicate = FocusPredicate(SPAN_PRESENCE)
        spans = _spans_file(args.spans, len(pairs))
    else:
        forms = set(_csv(args.forms or ""))
        if args.forms_file:
            forms |= {line.strip() for line in _lines(args.forms_file) if line.strip()}
        predicate = FocusPredicate(SURFACE_SET, frozenset(forms))
        spans = None
    selected = list(select_focused(pairs, predicate, exclusion, spans))
    if args.take_random is not None:
        selected = take_random(selected, args.take_random, args.seed)
    _write_sentences(args.out_src, (p.source for p in selected), args.sep)
    _write_sentences(args.out_tgt, (p.target for p in selected), args.sep)
    log.info("selected %d of %d pairs", len(selected), len(pairs))


def cmd_stats(args):
    exclude = (OPEN_BRACKET, CLOSE_BRACKET) if args.exclude_brackets else ()
    report = {}
    for i, path in enumerate(args.input):
        words = _sentences(path, args.sep)
        subwords = _sentences(args.subwords[i], args.sep) if args.subwords else None
        report[str(path)] = corpus_stats(words, subwords, exclude).as_dict()
    if len(report) > 1:
        total = StatsAccumulator(exclude=frozenset(exclude))
        for i, path in enumerate(args.input):
            chunk = StatsAccumulator(exclude=frozenset(exclude))
            subs = _sentences(args.subwords[i], args.sep) if args.subwords else None
            for k, sent in enumerate(_sentences(path, args.sep)):
                chunk.add(sent, subs[k] if subs else None)
            total = total.merge(chunk)
        report["total"] = total.result().as_dict()
    keys = ["words", "vocab", "subwords", "subword_vocab", "lines"]
    with _out(args.output) as fh:
        if args.format == "kv":
            for name, stats in report.items():
                fh.write(" ".join([f"file={name}"] + [f"{k}={stats[k]}" for k in keys]) + "\n")
        else:
            width = max(len("file"), *(len(n) for n in report))
            fh.write(f"{'file':<{width}}" + "".join(f"{k:>15}" for k in keys) + "\n")
            for name, stats in report.items():
                fh.write(f"{name:<{width}}" + "".join(f"{stats[k]:>15}" for k in keys) + "\n")
    if args.plot:
        from .plotting import plot_corpus_stats

        plot_corpus_stats(report, args.plot)


def _scored_streams(args):
    hyps, refs = _sentences(args.hyp, args.sep), _sentences(args.ref, args.sep)
    _same_length("hypotheses vs references", hyps, refs)
    if args.lowercase:
        hyps, refs = [lowercase(s) for s in hyps], [lowercase(s) for s in refs]
    return hyps, refs


def cmd_score(args):
    hyps, refs = _scored_streams(args)
    if not hyps:
        raise EmptyCorpus("no sentences to score")
    metrics = _csv(args.metrics)
    rows: list[tuple[str, float]] = []
    per_sentence: dict[str, list[float]] = {}
    for m in metrics:
        if m == "bleu":
            stats = [bleu_stats(h, r) for h, r in zip(hyps, refs)]
            rows.append(("bleu", bleu_from_stats(sum(stats), smoothing=args.smoothing)))
            per_sentence["bleu"] = [bleu_from_stats(s, smoothing=args.smoothing) for s in stats]
        elif m == "ter":
            stats = [ter_stats(h, r) for h, r in zip(hyps, refs)]
            ref_len = sum(n for _, n in stats)
            rows.append(("ter", sum(e for e, _ in stats) / ref_len if ref_len else 0.0))
            per_sentence["ter"] = [e / n if n else 0.0 for e, n in stats]
        elif m == "chrf":
            stats = [chrf_stats(h, r) for h, r in zip(hyps, refs)]
            rows.append(("chrf", chrf_from_stats(sum(stats))))
            per_sentence["chrf"] = [chrf_from_stats(s) for s in stats]
        elif m == "unk":
            rows.append(("unk", float(count_unks(hyps, args.unk))))
        else:
            raise SystemExit(f"unknown metric {m!r}")
    with _out(args.output) as fh:
        if args.sentence_level:
            names = [m for m in metrics if m in per_sentence]
            for i in range(len(hyps)):
                vals = {n: round(per_sentence[n][i], 6) for n in names}
                if args.json:
                    fh.write(json.dumps({"line": i, **vals}, sort_keys=True) + "\n")
                else:
                    fh.write("\t".join([str(i)] + [f"{vals[n]:.4f}" for n in names]) + "\n")
        for name, value in rows:
            if args.json:
                fh.write(json.dumps({"metric": name, "value": round(value, 6)}) + "\n")
            elif name == "unk":
                fh.write(f"unk\t{int(value)}\n")
            else:
                fh.write(f"{name}\t{value:.4f}\n")
    if args.plot and per_sentence:
        from .plotting import plot_sentence_scores

        plot_sentence_scores(per_sentence, args.plot)


def cmd_significance(args):
    hyps_a = _sentences(args.hyp_a, args.sep)
    hyps_b = _sentences(args.hyp_b, args.sep)
    refs = _sentences(args.ref, args.sep)
    if args.lowercase:
        hyps_a, hyps_b, refs = ([lowercase(s) for s in x] for x in (hyps_a, hyps_b, refs))
    report = bootstrap_significance(
        hyps_a, hyps_b, refs, args.metric, args.sample_size, args.iterations, args.alpha, args.seed
    )
    with _out(args.output) as fh:
        if args.json:
            fh.write(json.dumps(report.as_dict(), sort_keys=True) + "\n")
        else:
            fh.write(f"metric\t{report.metric}\n")
            fh.write(f"score_a\t{report.score_a:.4f}\n")
            fh.write(f"score_b\t{report.score_b:.4f}\n")
            fh.write(f"win_fraction\t{report.win_fraction:.4f}\n")
            fh.write(f"p_value\t{report.p_value:.4f}\n")
            fh.write(f"verdict\t{report.verdict}\n")
    if args.plot:
        from .plotting import plot_bootstrap

        plot_bootstrap(report, args.plot)


def cmd_backtranslate(args):
    mono = _sentences(args.input, args.sep)
    pairs = backtranslate_round(mono, TranslatorContract(args.translator, args.timeout))
    _write_sentences(args.out_src, (p.source for p in pairs), args.sep)
    _write_sentences(args.out_tgt, (p.target for p in pairs), args.sep)


def cmd_validate(args):
    sents = _sentences(args.input, args.sep)
    arity = validate_arity(sents)
    if args.tags:
        labels = _csv(args.tags)
        spans = _spans_file(args.spans, len(sents))
        for lineno, (s, sp) in enumerate(zip(sents, spans), 1):
            try:
                check_reserved_tags(s, sp, labels)
            except ToolkitError as exc:
                raise type(exc)(f"line {lineno}: {exc}") from None
    print(f"ok: {len(sents)} lines, feature arity {arity if arity is not None else 0}", file=sys.stderr)


# parser

def _add_io(p, inp=True, out=True):
    if inp:
        p.add_argument("-i", "--input", default="-", help="input file (default: stdin)")
    if out:
        p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")


def _add_entity_opts(p):
    p.add_argument("--mode", choices=("feature", "replace"), default="replace")
    p.add_argument("--tagset", choices=("binary", "class"), default="class")
    p.add_argument("--default-label", default="GEN")
    p.add_argument("--binary-tag", default="NE")


def _add_pair_io(p):
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbmtkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--sep", default=FEATURE_SEP, help="feature separator (default U+FFE8)")
    parser.add_argument("--ascii-sep", dest="sep", action="store_const", const=ASCII_SEP,
                        help="use '|' as the feature separator")
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--emit-config", metavar="PATH", help="write the effective configuration")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name, func, help):
        p = sub.add_parser(name, help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = command("annotate", cmd_annotate, "add CAT and CL ambiguity-class features")
    p.add_argument("--lexicon", required=True)
    _add_io(p)

    p = command("disambiguate", cmd_disambiguate, "CAT/CL features filtered by external POS tags")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--tags", required=True, help="tag file, line-parallel to the input")
    p.add_argument("--tag-map", help="TSV tag -> CAT+CAT (default: built-in Penn map)")
    _add_io(p)

    p = command("pos-annotate", cmd_pos_annotate, "attach external POS tags as features")
    p.add_argument("--tags", required=True)
    _add_io(p)

    p = command("linearize", cmd_linearize, "bracketed trees to bracket tokens with phrase features")
    p.add_argument("--labels", help="comma-separated labels to bracket")
    p.add_argument("--min-span", type=int, default=2)
    p.add_argument("--sentinel", default="$")
    _add_io(p)

    p = command("bpe-learn", cmd_bpe_learn, "learn BPE merges")
    p.add_argument("--max-merges", type=int, default=MAX_MERGES)
    p.add_argument("--min-frequency", type=int, default=2)
    p.add_argument("--marker", choices=(SUFFIX, PREFIX), default=SUFFIX)
    _add_io(p)

    p = command("bpe-apply", cmd_bpe_apply, "segment words, copying features to pieces")
    p.add_argument("--model", required=True)
    _add_io(p)

    p = command("bpe-undo", cmd_bpe_undo, "rejoin BPE pieces")
    p.add_argument("--marker", choices=(SUFFIX, PREFIX), default=SUFFIX)
    _add_io(p)

    p = command("entity-tag", cmd_entity_tag, "mark or replace entity spans")
    p.add_argument("--spans", help="span file (start:end:label per span)")
    p.add_argument("--sidecar", help="write replaced phrases here")
    _add_entity_opts(p)
    _add_io(p)

    p = command("prepare-pairs", cmd_prepare_pairs, "tag training pairs via alignment projection")
    _add_pair_io(p)
    p.add_argument("--spans", required=True)
    p.add_argument("--align", required=True)
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    _add_entity_opts(p)

    p = command("duplicate", cmd_duplicate, "tag pairs and keep untouched copies of pairs with spans")
    _add_pair_io(p)
    p.add_argument("--spans", required=True)
    p.add_argument("--align")
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    _add_entity_opts(p)

    p = command("restore", cmd_restore, "replace hypothesis tags with dictionary translations")
    p.add_argument("--hyp", required=True)
    p.add_argument("--src", required=True, help="processed (tagged) source")
    p.add_argument("--sidecar", required=True)
    p.add_argument("--attention", required=True, help="JSON lines {\"attn\": [[...]]}")
    p.add_argument("--terms", help="term dictionary TSV")
    p.add_argument("--tags", required=True, help="comma-separated tag labels")
    p.add_argument("-o", "--output", default="-")

    p = command("phrase-table", cmd_phrase_table, "count aligned single-token translations")
    _add_pair_io(p)
    p.add_argument("--align", required=True)
    p.add_argument("-o", "--output", default="-")

    p = command("unk-replace", cmd_unk_replace, "replace UNK tokens via attention and a phrase table")
    p.add_argument("--hyp", required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--attention", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--unk", default="<unk>")
    p.add_argument("-o", "--output", default="-")

    p = command("cap-vocab", cmd_cap_vocab, "keep the most frequent surfaces, map the rest to UNK")
    p.add_argument("--max-size", type=int, default=50000)
    p.add_argument("--unk", default="<unk>")
    p.add_argument("--vocab-out")
    _add_io(p)

    p = command("select-testset", cmd_select_testset, "select a focused, unseen test set")
    _add_pair_io(p)
    p.add_argument("--exclude", action="append", help="train/dev source file (repeatable)")
    p.add_argument("--forms", help="comma-separated surface forms")
    p.add_argument("--forms-file")
    p.add_argument("--spans", help="select lines with at least one span")
    p.add_argument("--take-random", type=int)
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)

    p = command("stats", cmd_stats, "word, vocabulary and line counts")
    p.add_argument("-i", "--input", nargs="+", required=True)
    p.add_argument("--subwords", nargs="+", help="BPE-segmented files, parallel to --input")
    p.add_argument("--format", choices=("table", "kv"), default="table")
    p.add_argument("--exclude-brackets", action="store_true")
    p.add_argument("--plot", help="write a bar chart (png/pdf/svg)")
    p.add_argument("-o", "--output", default="-")

    p = command("score", cmd_score, "BLEU, TER, chrF and UNK counts")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--metrics", default="bleu,ter,chrf")
    p.add_argument("--smoothing", choices=("none", "add1"), default="none")
    p.add_argument("--unk", default="<unk>")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--sentence-level", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--plot", help="histogram of sentence-level scores")
    p.add_argument("-o", "--output", default="-")

    p = command("significance", cmd_significance, "paired bootstrap resampling")
    p.add_argument("--hyp-a", required=True)
    p.add_argument("--hyp-b", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--metric", choices=("bleu", "ter", "chrf"), default="bleu")
    p.add_argument("--sample-size", type=int, default=1000)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--plot", help="histogram of bootstrap score differences")
    p.add_argument("-o", "--output", default="-")

    p = command("backtranslate", cmd_backtranslate, "one back-translation round via an external command")
    p.add_argument("--translator", required=True, help="command with {input} and {output} placeholders")
    p.add_argument("--timeout", type=float)
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    _add_io(p, out=False)

    p = command("validate", cmd_validate, "check feature arity and reserved tag usage")
    p.add_argument("--tags", help="comma-separated reserved tag labels")
    p.add_argument("--spans")
    _add_io(p, out=False)

    return parser


_INTERNAL = {"func", "config", "emit_config", "command", "verbose"}


def _apply_config(parser, config: Config) -> None:
    """Install config values as defaults; explicit flags still win."""
    subparsers = parser._subparsers._group_actions[0].choices.values()
    for p in (parser, *subparsers):
        for action in p._actions:
            if action.dest not in config.values or action.dest in _INTERNAL:
                continue
            value = config.values[action.dest]
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                value = value.lower() in ("1", "true", "yes", "on")
            elif action.nargs in ("+", "*") or isinstance(action, argparse._AppendAction):
                value = value.split()
            elif action.type is not None:
                value = action.type(value)
            action.required = False
            p.set_defaults(**{action.dest: value})


def main(argv=None) -> int:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    config_path = pre.parse_known_args(argv)[0].config
    if config_path:
        try:
            _apply_config(parser, Config.load(config_path))
        except ToolkitError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return exc.exit_code
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if args.emit_config:
        effective = {
            k: " ".join(map(str, v)) if isinstance(v, list) else str(v)
            for k, v in vars(args).items()
            if k not in _INTERNAL and v is not None
        }
        Path(args.emit_config).write_text(Config({"command": args.command, **effective}).dumps(), encoding="utf-8")
    try:
        args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 1
    return 0
