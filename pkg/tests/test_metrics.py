import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from meetcap.metrics import (
    REPORT_COLUMNS,
    MetricsReport,
    MissingReferenceError,
    StreamingEvaluator,
    TranscriptPair,
    UtteranceLog,
    bleu_tokenize,
    burstiness,
    corpus_bleu,
    edit_rate,
    erasure,
    evaluate_session,
    lags,
    levenshtein,
)
from meetcap.types import CaptionUpdate

from oracles import (
    brute_force_utterance_stats,
    reference_bleu,
    reference_edit_distance,
)


def log_from(updates, start=0, end=None, uid="u0", lang="en"):
    end = end if end is not None else updates[-1][0]
    return UtteranceLog(
        utterance_id=uid,
        target_lang=lang,
        speech_start_ms=start,
        speech_end_ms=end,
        updates=[(t, list(tok)) for t, tok in updates],
        final_tokens=list(updates[-1][1]),
    )


THREE_UPDATE = [
    (100, ["a", "b"]),
    (200, ["a", "c"]),
    (300, ["a", "c", "d"]),
]


class TestErasure:
    def test_worked_example(self):
        m, n = erasure(log_from(THREE_UPDATE))
        assert (m, n) == (1, 3)

    def test_single_update_no_erasure(self):
        assert erasure(log_from([(10, ["x", "y"])])) == (0, 2)

    def test_shrink_and_regrow(self):
        log = log_from([(1, ["a", "b", "c"]), (2, ["a"]), (3, ["a", "b", "c"])])
        assert erasure(log) == (2, 3)


class TestBurstiness:
    def test_worked_example(self):
        mean_b, max_b = burstiness(log_from(THREE_UPDATE))
        assert mean_b == pytest.approx(5 / 3)
        assert max_b == 2

    def test_single_update(self):
        mean_b, max_b = burstiness(log_from([(10, ["a"] * 5)]))
        assert mean_b == max_b == 5

    def test_identical_consecutive_updates_zero_churn(self):
        mean_b, max_b = burstiness(log_from([(1, ["a", "b"]), (2, ["a", "b"])]))
        assert mean_b == pytest.approx(1.0)  # [2, 0]
        assert max_b == 2


class TestLags:
    def test_worked_example(self):
        log = log_from(
            [(1000, ["hello"]), (2500, ["hello", "world"])], start=0, end=2000
        )
        initial, incremental, tl = lags(log)
        assert initial == pytest.approx(1.0)
        assert incremental == pytest.approx(1.5)
        assert tl == pytest.approx(0.75)

    def test_instant_final(self):
        log = log_from([(0, ["a", "b"])], start=0, end=2000)
        initial, incremental, tl = lags(log)
        assert initial == 0.0
        assert incremental == 0.0
        assert tl <= 1.0  # bounded by half the span

    def test_equal_timestamps_zero_incremental(self):
        log = log_from([(500, ["a"]), (500, ["a", "b"])], start=0, end=500)
        _, incremental, _ = lags(log)
        assert incremental == 0.0

    def test_per_token_floor_at_zero(self):
        # Caption final long before the word is even spoken.
        log = log_from([(0, ["a", "b", "c", "d"])], start=0, end=100_000)
        _, _, tl = lags(log)
        assert tl == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.integers(0, 2**31 - 1))
    def test_shift_invariance(self, delta, seed):
        rng = random.Random(seed)
        updates = []
        t = 0
        toks = []
        for _ in range(rng.randint(1, 6)):
            t += rng.randint(1, 500)
            toks = toks[: rng.randint(0, len(toks))] + [
                rng.choice("abcdef") for _ in range(rng.randint(1, 3))
            ]
            updates.append((t, list(toks)))
        end = t + rng.randint(0, 500)
        base = log_from(updates, start=0, end=end)
        shifted = log_from(
            [(t + delta, tok) for t, tok in updates], start=delta, end=end + delta
        )
        b_init, b_inc, b_tl = lags(base)
        s_init, s_inc, s_tl = lags(shifted)
        assert s_init == pytest.approx(b_init)
        assert s_inc == pytest.approx(b_inc)
        assert s_tl == pytest.approx(b_tl)
        assert erasure(base) == erasure(shifted)
        assert burstiness(base) == pytest.approx(burstiness(shifted))


class TestEditRate:
    def test_identity_zero(self):
        assert edit_rate(["a", "b"], ["a", "b"]) == 0.0

    def test_single_substitution(self):
        assert edit_rate("a b c".split(), "a x c".split()) == pytest.approx(1 / 3)

    def test_empty_hyp_all_deletions(self):
        assert edit_rate([], ["w", "x", "y", "z"]) == 1.0

    def test_empty_ref_error(self):
        with pytest.raises(ValueError):
            edit_rate(["a"], [])

    @given(
        st.lists(st.sampled_from("abc"), max_size=8),
        st.lists(st.sampled_from("abc"), max_size=8),
    )
    def test_levenshtein_matches_full_matrix(self, a, b):
        assert levenshtein(a, b) == reference_edit_distance(a, b)


class TestCorpusBleu:
    def test_identity_is_100(self):
        corpus = [["the", "cat", "sat", "on", "the", "mat"]]
        assert corpus_bleu(corpus, corpus) == pytest.approx(100.0)

    def test_worked_example(self):
        hyp = "the cat sat on the mat".split()
        ref = "the cat sat on a mat".split()
        score = corpus_bleu([hyp], [ref])
        assert score == pytest.approx(53.73, abs=0.05)
        assert score == pytest.approx(reference_bleu([hyp], [ref]), abs=1e-9)

    def test_disjoint_vocabulary_zero(self):
        assert corpus_bleu([["a", "b", "c", "d"]], [["w", "x", "y", "z"]]) == 0.0

    def test_length_mismatch_error(self):
        with pytest.raises(ValueError):
            corpus_bleu([["a"]], [["a"], ["b"]])

    def test_brevity_penalty_applied(self):
        hyp = ["the", "cat", "sat", "on"]
        ref = ["the", "cat", "sat", "on", "the", "mat"]
        assert corpus_bleu([hyp], [ref]) == pytest.approx(
            reference_bleu([hyp], [ref]), abs=1e-9
        )

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_matches_reference_implementation(self, seed):
        rng = random.Random(seed)
        vocab = ["the", "cat", "dog", "sat", "ran", "on", "mat", "rug"]
        hyps, refs = [], []
        for _ in range(rng.randint(1, 6)):
            ref = [rng.choice(vocab) for _ in range(rng.randint(4, 12))]
            hyp = [
                t if rng.random() > 0.3 else rng.choice(vocab) for t in ref
            ]
            if rng.random() < 0.3:
                hyp = hyp[: rng.randint(4, len(hyp))]
            hyps.append(hyp)
            refs.append(ref)
        assert corpus_bleu(hyps, refs) == pytest.approx(
            reference_bleu(hyps, refs), abs=1e-9
        )

    def test_bounds(self):
        hyp = [["the", "cat", "sat", "on"]]
        ref = [["the", "dog", "sat", "on"]]
        score = corpus_bleu(hyp, ref)
        assert 0.0 <= score <= 100.0


class TestBleuTokenize:
    def test_casefold_and_punct_split(self):
        assert bleu_tokenize("en", "Hello, world!") == ["hello", ",", "world", "!"]

    def test_zh_character_level(self):
        assert bleu_tokenize("zh", "你好 世界") == ["你", "好", "世", "界"]


class TestEvaluateSession:
    def refs_for(self, logs):
        from meetcap.text import join_tokens

        return {
            (log.utterance_id, log.target_lang): join_tokens(
                log.target_lang, log.final_tokens
            )
            for log in logs
        }

    def test_worked_example_composition(self):
        log = log_from(THREE_UPDATE, start=0, end=300)
        report = evaluate_session([log], self.refs_for([log]))
        assert report.normalized_erasure == pytest.approx(1 / 3)
        assert report.mean_word_burstiness == pytest.approx(5 / 3)
        assert report.max_word_burstiness == 2
        assert report.utterance_count == 1

    def test_single_update_identity_refs(self):
        logs = [
            log_from([(10, ["w", "x", "y", "z", "q"])], uid=f"u{i}") for i in range(3)
        ]
        report = evaluate_session(logs, self.refs_for(logs))
        assert report.final_bleu == pytest.approx(100.0)
        assert report.normalized_erasure == 0.0
        assert report.mean_word_burstiness == pytest.approx(5.0)

    def test_missing_reference_names_utterance(self):
        log = log_from(THREE_UPDATE, uid="u77")
        with pytest.raises(MissingReferenceError, match="u77"):
            evaluate_session([log], {})

    def test_report_columns_match_expected_header_set(self):
        assert REPORT_COLUMNS == (
            "final bleu",
            "translation lag (s)",
            "normalized erasure",
            "initial lag (s)",
            "incremental caption lag (s)",
            "mean word burstiness",
            "max word burstiness",
        )

    def test_utterance_order_permutation_invariant(self):
        logs = [
            log_from(THREE_UPDATE, uid="u0"),
            log_from([(50, ["p", "q", "r", "s"])], uid="u1"),
        ]
        refs = self.refs_for(logs)
        a = evaluate_session(logs, refs)
        b = evaluate_session(list(reversed(logs)), refs)
        assert a == b

    def test_wer_cer(self):
        pairs = [
            TranscriptPair("u0", "en", "a b c", "a x c"),
        ]
        log = log_from([(10, ["a", "b", "c", "d"])])
        report = evaluate_session([log], self.refs_for([log]), pairs)
        assert report.wer == pytest.approx(1 / 3)
        assert report.cer == pytest.approx(1 / 3)

    def test_erasure_bounded_by_churn(self):
        rng = random.Random(5)
        for _ in range(20):
            updates = []
            t = 0
            toks = []
            for _ in range(rng.randint(1, 6)):
                t += rng.randint(1, 100)
                toks = toks[: rng.randint(0, len(toks))] + [
                    rng.choice("ab") for _ in range(rng.randint(1, 3))
                ]
                updates.append((t, list(toks)))
            log = log_from(updates)
            m, _ = erasure(log)
            mean_b, _ = burstiness(log)
            assert m <= mean_b * len(updates) + 1e-9

    def test_report_table_format(self):
        log = log_from(THREE_UPDATE)
        report = evaluate_session([log], self.refs_for([log]))
        table = report.to_table()
        for col in REPORT_COLUMNS:
            assert col in table


class TestStreamingEquivalence:
    def _random_session(self, seed):
        rng = random.Random(seed)
        logs = []
        for u in range(rng.randint(1, 5)):
            updates = []
            t = rng.randint(0, 100)
            start = t
            toks = []
            for i in range(rng.randint(1, 7)):
                t += rng.randint(1, 400)
                keep = rng.randint(0, len(toks))
                toks = toks[:keep] + [
                    rng.choice(["aa", "bb", "cc", "dd"])
                    for _ in range(rng.randint(1, 4))
                ]
                updates.append((t, list(toks)))
            logs.append(
                log_from(updates, start=start, end=t + rng.randint(0, 300), uid=f"u{u}")
            )
        return logs

    def _stream(self, logs):
        ev = StreamingEvaluator()
        for log in logs:
            for i, (t, toks) in enumerate(log.updates):
                ev.observe_update(
                    CaptionUpdate(
                        utterance_id=log.utterance_id,
                        speaker_id="s0",
                        target_lang=log.target_lang,
                        update_seq=i,
                        timestamp_ms=t,
                        tokens=tuple(toks),
                        stable_prefix_len=0,
                        lines=(),
                        line_ids=(),
                        is_final=i == len(log.updates) - 1,
                    )
                )
            ev._speech[log.utterance_id] = (log.speech_start_ms, log.speech_end_ms)
        return ev

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_streaming_equals_batch(self, seed):
        logs = self._random_session(seed)
        refs = TestEvaluateSession().refs_for(logs)
        batch = evaluate_session(logs, refs)
        streamed = self._stream(logs).report(refs)
        for name in (
            "final_bleu",
            "translation_lag_s",
            "normalized_erasure",
            "initial_lag_s",
            "incremental_caption_lag_s",
            "mean_word_burstiness",
            "max_word_burstiness",
        ):
            assert getattr(streamed, name) == pytest.approx(
                getattr(batch, name), abs=1e-9
            )

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_batch_matches_brute_force(self, seed):
        logs = self._random_session(seed)
        for log in logs:
            stats = brute_force_utterance_stats(
                log.updates, log.speech_start_ms, log.speech_end_ms
            )
            m, n = erasure(log)
            assert (m, n) == (stats["m"], stats["n"])
            mean_b, max_b = burstiness(log)
            bs = stats["burstiness"]
            assert mean_b == pytest.approx(sum(bs) / len(bs))
            assert max_b == max(bs)
            init, inc, tl = lags(log)
            assert init == pytest.approx(stats["initial_lag_s"])
            assert inc == pytest.approx(stats["incremental_lag_s"])
            assert tl == pytest.approx(stats["translation_lag_s"])
