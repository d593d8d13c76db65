import json
import os
import subprocess
import sys

import pytest

from toto.cli import main

EXAMPLE = "Let x be NewTag[Top] in Extract{New{< >}(x)}\n"


@pytest.fixture
def prog(tmp_path):
    def write(text, name="p.toto"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_typecheck_example(capsys, prog):
    assert run(capsys, "typecheck", prog(EXAMPLE)) == (0, "Top\n", "")


def test_eval_trace_example(capsys, prog):
    code, out, _ = run(capsys, "eval", "--trace", prog(EXAMPLE))
    trace = [l for l in out.splitlines() if l[:1].isdigit()]
    assert code == 0 and len(trace) == 4
    assert trace[1] == "1: r_let/r_cls  e := Let x be #0 in Extract{New{< >}(x)}  store := #0 -> ."
    assert trace[2] == "2: r_letv  e := Extract{New{< >}(#0)}"
    assert trace[3] == "3: r_untag2  e := < >"
    assert "result: < >" in out and "#0 -> ." in out


def test_eval_json(capsys, prog):
    code, out, _ = run(capsys, "eval", "--json", prog(EXAMPLE))
    data = json.loads(out)
    assert code == 0
    assert data == {"status": "Value", "steps": 3, "type": "Top", "term": "< >",
                    "store": {"entries": [[0]], "next_id": 1}}


def test_exit_codes(capsys, prog):
    assert run(capsys, "parse", prog("Match{e}("))[0] == 1
    assert run(capsys, "typecheck", prog("Extract{< >}"))[0] == 1
    assert run(capsys, "eval", "--no-check", prog("Extract{< >}"))[0] == 2
    loop = "LetRec f : Prod[x:Top],Top be /x:Top, f x in f < >"
    code, _, err = run(capsys, "eval", "--fuel", "20", prog(loop))
    assert code == 3 and "out of fuel" in err


def test_parse_error_location(capsys, prog):
    code, _, err = run(capsys, "parse", prog("Match{e}("))
    assert code == 1 and "1:9" in err


def test_parse_pretty_prints(capsys, prog):
    code, out, _ = run(capsys, "parse", prog("tag #0 : Top\nNew{ < > }( #0 )"))
    assert (code, out) == (0, "tag #0 : Top\nNew{< >}(#0)\n")


def test_subtype_derivation(capsys):
    code, out, _ = run(capsys, "subtype", "{f:Top ;; g:Top}", "{g:Top}")
    assert code == 0 and out.startswith("ST-Record")
    assert run(capsys, "subtype", "Top", "nil")[0] == 1


def test_selftest_exit_zero_and_deterministic(capsys):
    a = run(capsys, "selftest", "--cases", "30", "--seed", "7", "--subtype-depth", "2")
    b = run(capsys, "selftest", "--cases", "30", "--seed", "7", "--subtype-depth", "2")
    assert a[0] == 0 and a == b


def test_module_entry_point(prog):
    out = subprocess.run([sys.executable, "-m", "toto", "typecheck", prog(EXAMPLE)],
                         capture_output=True, text=True, env={**os.environ})
    assert out.returncode == 0 and out.stdout == "Top\n"
