import json

import numpy as np
import pytest

from textexplain.cli import main
from textexplain.explain import METHOD_NAMES
from textexplain.models import load_checkpoint
from textexplain.numerics import SeededRng


def write_corpus(path, n_docs, seed=0, n_sentences=2, sent_len=4):
    """Keyword corpus as JSONL: token 'yes' marks class 1, 'no' class 0."""
    rng = SeededRng(seed)
    filler = [f"w{i}" for i in range(30)]
    with open(path, "w", encoding="utf-8") as fh:
        for _ in range(n_docs):
            label = rng.uniform_int(0, 1)
            sentences = []
            for _ in range(n_sentences):
                sent = [filler[rng.uniform_int(0, 29)]
                        for _ in range(sent_len)]
                sentences.append(sent)
            si = rng.uniform_int(0, n_sentences - 1)
            ti = rng.uniform_int(0, sent_len - 1)
            sentences[si][ti] = "yes" if label == 1 else "no"
            fh.write(json.dumps({"label": label, "sentences": sentences})
                     + "\n")


@pytest.fixture(scope="module")
def trained_checkpoint(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    corpus = base / "corpus.jsonl"
    ckpt = base / "model.npz"
    write_corpus(corpus, 80)
    rc = main(["train", str(corpus), "--out", str(ckpt), "--arch", "GRU",
               "--d-embed", "8", "--d-hidden", "8", "--epochs", "4",
               "--seed", "0"])
    assert rc == 0
    return base, corpus, ckpt


class TestTrain:
    def test_checkpoint_loads(self, trained_checkpoint):
        _, _, ckpt = trained_checkpoint
        p = load_checkpoint(ckpt)
        assert p.arch == "GRU"
        assert p.vocab is not None

    def test_deterministic_given_seed(self, tmp_path, trained_checkpoint):
        base, corpus, ckpt = trained_checkpoint
        other = tmp_path / "again.npz"
        rc = main(["train", str(corpus), "--out", str(other), "--arch", "GRU",
                   "--d-embed", "8", "--d-hidden", "8", "--epochs", "4",
                   "--seed", "0"])
        assert rc == 0
        a = load_checkpoint(ckpt)
        b = load_checkpoint(other)
        np.testing.assert_array_equal(a.embedding, b.embedding)
        np.testing.assert_array_equal(a.w_cls, b.w_cls)

    def test_epoch_log(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_corpus(corpus, 20)
        log = tmp_path / "log.jsonl"
        rc = main(["train", str(corpus), "--out", str(tmp_path / "m.npz"),
                   "--epochs", "3", "--log", str(log)])
        assert rc == 0
        records = [json.loads(l) for l in log.read_text().splitlines()]
        assert [r["epoch"] for r in records] == [1, 2, 3]
        assert all("loss" in r and "accuracy" in r for r in records)

    def test_unknown_arch_is_data_error(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_corpus(corpus, 10)
        rc = main(["train", str(corpus), "--out", str(tmp_path / "m.npz"),
                   "--arch", "Transformer"])
        assert rc == 2

    def test_missing_corpus_is_data_error(self, tmp_path):
        rc = main(["train", str(tmp_path / "nope.jsonl"),
                   "--out", str(tmp_path / "m.npz")])
        assert rc == 2

    def test_malformed_json_is_data_error(self, tmp_path):
        corpus = tmp_path / "bad.jsonl"
        corpus.write_text("{not json}\n")
        rc = main(["train", str(corpus), "--out", str(tmp_path / "m.npz")])
        assert rc == 2


class TestExplain:
    def test_full_catalog_runs_and_decomp_error_is_recorded(self, tmp_path):
        """On a CNN checkpoint every method except decomp yields scores;
        decomp is recorded as an error and the run still exits 0."""
        corpus = tmp_path / "c.jsonl"
        write_corpus(corpus, 40)
        ckpt = tmp_path / "cnn.npz"
        assert main(["train", str(corpus), "--out", str(ckpt), "--arch",
                     "CNN", "--d-embed", "8", "--d-hidden", "8",
                     "--epochs", "2"]) == 0
        docs = tmp_path / "docs.jsonl"
        write_corpus(docs, 2, seed=9)
        out = tmp_path / "rel.jsonl"
        rc = main(["explain", str(ckpt), str(docs), "--out", str(out),
                   "--methods", *METHOD_NAMES, "--limsse-n", "60",
                   "--int-steps", "3"])
        assert rc == 0
        records = [json.loads(l) for l in out.read_text().splitlines()]
        by_method = {}
        for r in records:
            by_method.setdefault(r["method"], []).append(r)
        assert set(by_method) == set(METHOD_NAMES)
        for name, rs in by_method.items():
            for r in rs:
                if name == "decomp":
                    assert "error" in r
                else:
                    assert len(r["scores"]) == len(r["tokens"])

    def test_fixed_k_and_html(self, trained_checkpoint, tmp_path):
        _, corpus, ckpt = trained_checkpoint
        out = tmp_path / "rel.jsonl"
        page = tmp_path / "rel.html"
        rc = main(["explain", str(ckpt), str(corpus), "--out", str(out),
                   "--html", str(page), "--k", "1",
                   "--methods", "grad1_s_dot"])
        assert rc == 0
        records = [json.loads(l) for l in out.read_text().splitlines()]
        assert all(r["k"] == 1 for r in records)
        assert "<span" in page.read_text()

    def test_unknown_method_is_data_error(self, trained_checkpoint, tmp_path):
        _, corpus, ckpt = trained_checkpoint
        rc = main(["explain", str(ckpt), str(corpus),
                   "--methods", "shapley"])
        assert rc == 2


class TestEvalHybrid:
    def test_report_rows(self, trained_checkpoint, tmp_path):
        _, corpus, ckpt = trained_checkpoint
        out = tmp_path / "report.tsv"
        rc = main(["eval-hybrid", str(ckpt), str(corpus), "--out", str(out),
                   "--group-size", "10", "--methods", "grad1_s_dot",
                   "omit_1"])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("method\t")
        methods = {l.split("\t")[0] for l in lines[1:]}
        assert methods == {"grad1_s_dot", "omit_1", "random"}

    def test_too_few_sentences_is_data_error(self, trained_checkpoint,
                                             tmp_path):
        _, _, ckpt = trained_checkpoint
        corpus = tmp_path / "small.jsonl"
        write_corpus(corpus, 2)
        rc = main(["eval-hybrid", str(ckpt), str(corpus),
                   "--group-size", "10", "--methods", "grad1_s_dot"])
        assert rc == 2


class TestEvalAgreement:
    def test_report(self, trained_checkpoint, tmp_path):
        _, _, ckpt = trained_checkpoint
        tsv = tmp_path / "agree.tsv"
        tsv.write_text("the w1 yes\tDT NN VBZ\t2\tSg\n"
                       "w2 no w3\tNNS DT VBP\t1\tPl\n")
        out = tmp_path / "report.tsv"
        rc = main(["eval-agreement", str(ckpt), str(tsv), "--out", str(out),
                   "--methods", "grad1_s_l2"])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        # 3 methods (incl. random+last) x 3 metrics
        assert len(lines) == 1 + 9

    def test_bad_tsv_is_data_error(self, trained_checkpoint, tmp_path):
        _, _, ckpt = trained_checkpoint
        tsv = tmp_path / "bad.tsv"
        tsv.write_text("only two\tcolumns\n")
        rc = main(["eval-agreement", str(ckpt), str(tsv),
                   "--methods", "grad1_s_l2"])
        assert rc == 2


class TestRender:
    def test_round_trip_from_explain(self, trained_checkpoint, tmp_path):
        _, corpus, ckpt = trained_checkpoint
        rel = tmp_path / "rel.jsonl"
        assert main(["explain", str(ckpt), str(corpus), "--out", str(rel),
                     "--methods", "grad1_s_dot"]) == 0
        out = tmp_path / "heat.txt"
        assert main(["render", str(rel), "--out", str(out)]) == 0
        assert "\x1b[38;2;" in out.read_text()
        html_out = tmp_path / "heat.html"
        assert main(["render", str(rel), "--mode", "html", "--out",
                     str(html_out)]) == 0
        assert "<span" in html_out.read_text()

    def test_missing_file_is_data_error(self, tmp_path):
        assert main(["render", str(tmp_path / "nope.jsonl")]) == 2


class TestUsageErrors:
    def test_no_command(self):
        assert main([]) == 1

    def test_unknown_flag(self):
        assert main(["render", "x.jsonl", "--nope"]) == 1

    def test_missing_required_flag(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_corpus(corpus, 5)
        assert main(["train", str(corpus)]) == 1
