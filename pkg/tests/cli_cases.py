"""A small on-disk workspace with one invocation per CLI subcommand."""

import json
import sys
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"

FILES = {
    "words.txt": "I own the house down the street\nthe snake sleeps\ncardiologist cardiologist\n",
    "tags.txt": "PRP VBP DT NN IN DT NN\nDT NN VBZ\nNN NN\n",
    "tree.txt": (FIXTURES / "house.tree").read_text(encoding="utf-8"),
    "src.txt": "the cardiologist said hello\nhello world\nhello hello\n",
    "tgt.txt": "el cardiólogo dijo hola\nhola mundo\nhola hola\n",
    "spans.txt": "1:2:MED\n\n0:1:GEN\n",
    "align.txt": "0-0 1-1 2-2 3-3\n0-0 1-1\n0-0 1-1\n",
    "hyp.txt": "el MED dijo hola\n",
    "hsrc.txt": "the MED said hello\n",
    "sidecar.txt": "MED␟cardiologist\n",
    "attn.jsonl": json.dumps({"attn": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}) + "\n",
    "terms.tsv": "cardiologist\tcardiólogo\tMED\n",
    "unk.hyp": "el <unk> dijo <unk>\n",
    "unk.src": "the cardiologist said hello\n",
    "unk.attn": json.dumps({"attn": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}) + "\n",
    "ref.txt": "the cat sat on the mat\nhello there world\na b c d\n",
    "sys_a.txt": "the cat sat on the mat\nhello there world\na b c d\n",
    "sys_b.txt": "a cat sat on a mat\nhello world\na c b d\n",
    "train.txt": "hello world\n",
}

MT = "import sys\nopen(sys.argv[2], 'w').write(open(sys.argv[1]).read())\n"


def build(root: Path) -> list[tuple[str, list[str], list[str]]]:
    """Write inputs under ``root`` and return (name, argv, output files)."""
    root.mkdir(parents=True, exist_ok=True)
    for name, text in FILES.items():
        (root / name).write_text(text, encoding="utf-8")
    (root / "snake.lex").write_text((FIXTURES / "snake.lex").read_text(encoding="utf-8"), encoding="utf-8")
    (root / "mt.py").write_text(MT, encoding="utf-8")
    p = lambda name: str(root / name)  # noqa: E731
    out = lambda name: str(root / "out" / name)  # noqa: E731
    (root / "out").mkdir(exist_ok=True)
    cases = [
        ("annotate", ["annotate", "--lexicon", p("snake.lex"), "-i", p("words.txt"), "-o", out("annotate")]),
        ("disambiguate", ["disambiguate", "--lexicon", p("snake.lex"), "--tags", p("tags.txt"),
                          "-i", p("words.txt"), "-o", out("disambiguate")]),
        ("pos-annotate", ["pos-annotate", "--tags", p("tags.txt"), "-i", p("words.txt"), "-o", out("pos-annotate")]),
        ("linearize", ["linearize", "-i", p("tree.txt"), "-o", out("linearize")]),
        ("bpe-learn", ["bpe-learn", "--max-merges", "20", "-i", p("src.txt"), "-o", out("bpe-learn")]),
        ("bpe-apply", ["bpe-apply", "--model", out("bpe-learn"), "-i", p("src.txt"), "-o", out("bpe-apply")]),
        ("bpe-undo", ["bpe-undo", "-i", out("bpe-apply"), "-o", out("bpe-undo")]),
        ("entity-tag", ["entity-tag", "--spans", p("spans.txt"), "--sidecar", out("entity-tag.sidecar"),
                        "-i", p("src.txt"), "-o", out("entity-tag")]),
        ("prepare-pairs", ["prepare-pairs", "--src", p("src.txt"), "--tgt", p("tgt.txt"), "--spans", p("spans.txt"),
                           "--align", p("align.txt"), "--out-src", out("pp.src"), "--out-tgt", out("pp.tgt")]),
        ("duplicate", ["duplicate", "--src", p("src.txt"), "--tgt", p("tgt.txt"), "--spans", p("spans.txt"),
                       "--align", p("align.txt"), "--out-src", out("dup.src"), "--out-tgt", out("dup.tgt")]),
        ("restore", ["restore", "--hyp", p("hyp.txt"), "--src", p("hsrc.txt"), "--sidecar", p("sidecar.txt"),
                     "--attention", p("attn.jsonl"), "--terms", p("terms.tsv"), "--tags", "MED",
                     "-o", out("restore")]),
        ("phrase-table", ["phrase-table", "--src", p("src.txt"), "--tgt", p("tgt.txt"), "--align", p("align.txt"),
                          "-o", out("phrase-table")]),
        ("unk-replace", ["unk-replace", "--hyp", p("unk.hyp"), "--src", p("unk.src"), "--attention", p("unk.attn"),
                         "--table", out("phrase-table"), "-o", out("unk-replace")]),
        ("cap-vocab", ["cap-vocab", "--max-size", "3", "--vocab-out", out("cap.vocab"), "-i", p("src.txt"),
                       "-o", out("cap-vocab")]),
        ("select-testset", ["select-testset", "--src", p("src.txt"), "--tgt", p("tgt.txt"), "--forms", "hello",
                            "--exclude", p("train.txt"), "--take-random", "1",
                            "--out-src", out("sel.src"), "--out-tgt", out("sel.tgt")]),
        ("stats", ["stats", "-i", p("src.txt"), p("tgt.txt"), "--plot", out("stats.png"), "-o", out("stats")]),
        ("score", ["score", "--hyp", p("sys_b.txt"), "--ref", p("ref.txt"), "--metrics", "bleu,ter,chrf,unk",
                   "--plot", out("score.png"), "-o", out("score")]),
        ("significance", ["significance", "--hyp-a", p("sys_a.txt"), "--hyp-b", p("sys_b.txt"), "--ref", p("ref.txt"),
                          "--iterations", "50", "--sample-size", "3", "--plot", out("sig.svg"),
                          "-o", out("significance")]),
        ("backtranslate", ["backtranslate", "--translator", f"{sys.executable} {p('mt.py')} {{input}} {{output}}",
                           "-i", p("tgt.txt"), "--out-src", out("bt.src"), "--out-tgt", out("bt.tgt")]),
        ("validate", ["validate", "--tags", "MED", "--spans", p("spans.txt"), "-i", p("src.txt")]),
    ]
    result = []
    for name, argv in cases:
        outputs = [a for a in argv if a.startswith(str(root / "out"))]
        if name in ("bpe-apply", "unk-replace"):
            outputs = outputs[-1:]  # first entry is an input produced earlier
        result.append((name, ["--seed", "3", "--ascii-sep", *argv], outputs))
    return result
