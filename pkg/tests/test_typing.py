import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazekit.arbiter import NoGazeFix, TriggerEvent
from gazekit.bundled import BUNDLED_PHRASES, default_layout
from gazekit.core import GazeSample
from gazekit.keyboard import (
    BACKSPACE,
    EmptySession,
    Key,
    KeyboardLayout,
    Keystroke,
    TypingSession,
    compute_metrics,
    dump_layout,
    key_at,
    parse_layout,
    replay_log,
    typing_step,
)
from gazekit.rng import SplitMix64
from gazekit.synth import NoiseModel, synth_typist

LAYOUT = default_layout()


def _center(key_id):
    k = LAYOUT.get(key_id)
    return k.x + k.w / 2, k.y + k.h / 2


def _press_at(session, key_id, t):
    x, y = _center(key_id)
    typing_step(session, GazeSample(t, x, y))
    typing_step(session, TriggerEvent(t + 1, "press"))
    typing_step(session, TriggerEvent(t + 40, "release"))


class TestKeyAt:
    def test_inside_key(self):
        x, y = _center("a")
        assert key_at(LAYOUT, x, y) == "a"

    def test_gap_is_none(self):
        k = LAYOUT.get("q")
        assert key_at(LAYOUT, k.x + k.w + 4, k.y + 10) is None

    def test_boundary_inclusive(self):
        k = LAYOUT.get("q")
        assert key_at(LAYOUT, k.x, k.y) == "q"
        assert key_at(LAYOUT, k.x + k.w, k.y + k.h) == "q"

    def test_overlapping_layout_rejected(self):
        with pytest.raises(ValueError):
            KeyboardLayout(
                keys=(
                    Key("a", "a", "a", 0, 0, 100, 100),
                    Key("b", "b", "b", 50, 50, 100, 100),
                )
            )


class TestTypingStep:
    def test_press_types_key_under_gaze(self):
        s = TypingSession(layout=LAYOUT, target_phrase="h")
        _press_at(s, "h", 0)
        assert s.transcribed == "h"
        assert s.keystrokes == 1

    def test_backspace_removes_last(self):
        s = TypingSession(layout=LAYOUT, target_phrase="h")
        _press_at(s, "h", 0)
        _press_at(s, "e", 100)
        _press_at(s, "backspace", 200)
        assert s.transcribed == "h"

    def test_backspace_on_empty_is_logged_noop(self):
        s = TypingSession(layout=LAYOUT, target_phrase="")
        _press_at(s, "backspace", 0)
        assert s.transcribed == ""
        assert s.keystrokes == 1

    def test_miss_counts_keystroke_changes_nothing(self):
        s = TypingSession(layout=LAYOUT, target_phrase="")
        k = LAYOUT.get("q")
        typing_step(s, GazeSample(0, k.x + k.w + 4, k.y + 10))
        typing_step(s, TriggerEvent(1, "press"))
        assert s.keystrokes == 1
        assert s.log[0].key_id is None
        assert s.transcribed == ""

    def test_press_before_gaze_raises(self):
        s = TypingSession(layout=LAYOUT, target_phrase="")
        with pytest.raises(NoGazeFix):
            typing_step(s, TriggerEvent(0, "press"))
        assert s.keystrokes == 0  # state unchanged

    def test_release_ignored(self):
        s = TypingSession(layout=LAYOUT, target_phrase="")
        typing_step(s, GazeSample(0, *_center("a")))
        typing_step(s, TriggerEvent(1, "release"))
        assert s.keystrokes == 0

    def test_space_and_enter(self):
        s = TypingSession(layout=LAYOUT, target_phrase="a b")
        _press_at(s, "a", 0)
        _press_at(s, "space", 100)
        _press_at(s, "b", 200)
        _press_at(s, "enter", 300)
        assert s.transcribed == "a b"
        assert s.keystrokes == 4


class TestMetrics:
    def test_eleven_chars_sixty_seconds(self):
        # "hello world": 11 chars, 11 keystrokes, first-to-last span 60 s
        s = TypingSession(layout=LAYOUT, target_phrase="hello world")
        for i, ch in enumerate("hello world"):
            key = LAYOUT.key_for_char(ch)
            _press_at(s, key.key_id, i * 6000)
        # first press t=1, last press t=60001: shift so the span is exactly 60 s
        assert s.log[-1].t_ms - s.log[0].t_ms == 60000
        m = compute_metrics(s)
        assert m.wpm == pytest.approx(2.0, abs=1e-9)
        assert m.kspc == pytest.approx(1.0, abs=1e-9)
        assert m.rba == 0.0

    def test_backspace_case(self):
        # 13 keystrokes including 1 backspace, producing 11 chars
        s = TypingSession(layout=LAYOUT, target_phrase="hello world")
        text = "hello worlx"
        for i, ch in enumerate(text):
            _press_at(s, LAYOUT.key_for_char(ch).key_id, i * 500)
        _press_at(s, "backspace", 12 * 500)
        _press_at(s, "d", 13 * 500)
        assert s.transcribed == "hello world"
        assert s.keystrokes == 13
        m = compute_metrics(s)
        assert m.kspc == pytest.approx(13 / 11, abs=1e-9)
        assert m.rba == pytest.approx(1 / 13, abs=1e-9)

    def test_empty_session_raises(self):
        with pytest.raises(EmptySession):
            compute_metrics(TypingSession(layout=LAYOUT, target_phrase="x"))

    def test_rba_per_characters(self):
        s = TypingSession(layout=LAYOUT, target_phrase="ab")
        _press_at(s, "a", 0)
        _press_at(s, "x", 100)
        _press_at(s, "backspace", 200)
        _press_at(s, "b", 300)
        m = compute_metrics(s, rba_per="characters")
        assert m.rba == pytest.approx(1 / 2)

    def test_reference_baselines(self):
        from gazekit.bundled import TYPING_BASELINE_ABLE, TYPING_BASELINE_IMPAIRED

        assert TYPING_BASELINE_IMPAIRED == {"wpm": 7.39, "kspc": 1.06, "rba": 0.06}
        assert TYPING_BASELINE_ABLE["wpm"] == 10.48
        assert TYPING_BASELINE_ABLE["kspc"] == 1.09
        assert TYPING_BASELINE_ABLE["rba"] == 0.09


class TestLogInvariants:
    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=40, deadline=None)
    def test_transcription_reconstructible(self, seed):
        rng = SplitMix64(seed)
        ids = [k.key_id for k in LAYOUT.keys]
        s = TypingSession(layout=LAYOUT, target_phrase="")
        t = 0
        for _ in range(rng.randint(40)):
            if rng.uniform() < 0.1:
                s.log.append(Keystroke(t_ms=t, key_id=None))
                t += 100
                continue
            _press_at(s, rng.choice(ids), t)
            t += 100
        rebuilt = replay_log(LAYOUT, s.log)
        assert rebuilt == s.transcribed

    @given(
        st.integers(min_value=0, max_value=2**32),
        st.integers(min_value=1, max_value=100_000),
        st.integers(min_value=2, max_value=8),
    )
    @settings(max_examples=40, deadline=None)
    def test_wpm_translation_and_dilation(self, seed, shift, dilation):
        rng = SplitMix64(seed)
        letters = "abcdefgh"
        s = TypingSession(layout=LAYOUT, target_phrase="")
        t = 0
        for _ in range(3 + rng.randint(10)):
            _press_at(s, rng.choice(letters), t)
            t += 200 + rng.randint(500)
        base = compute_metrics(s)

        def remap(f):
            out = TypingSession(layout=LAYOUT, target_phrase="")
            out.log = [Keystroke(t_ms=f(k.t_ms), key_id=k.key_id) for k in s.log]
            out.transcribed = s.transcribed
            return out

        shifted = compute_metrics(remap(lambda ms: ms + shift))
        assert shifted.wpm == pytest.approx(base.wpm, rel=1e-12)
        dilated = compute_metrics(remap(lambda ms: ms * dilation))
        assert dilated.wpm == pytest.approx(base.wpm / dilation, rel=1e-12)


class TestSyntheticTypist:
    def test_perfect_typist_all_bundled_phrases(self):
        for phrase in BUNDLED_PHRASES:
            s = TypingSession(layout=LAYOUT, target_phrase=phrase)
            for ev in synth_typist(LAYOUT, phrase, NoiseModel()):
                typing_step(s, ev)
            assert s.transcribed == phrase
            assert all(k.key_id is not None for k in s.log)  # zero misses
            m = compute_metrics(s)
            assert m.kspc == 1.0
            assert m.rba == 0.0

    def test_noisy_typist_corrects_itself(self):
        phrase = "hello world"
        s = TypingSession(layout=LAYOUT, target_phrase=phrase)
        for ev in synth_typist(LAYOUT, phrase, NoiseModel(sigma_px=45.0, seed=3)):
            typing_step(s, ev)
        assert s.transcribed == phrase
        m = compute_metrics(s)
        assert m.kspc > 1.0
        assert m.rba > 0.0

    def test_deterministic(self):
        a = synth_typist(LAYOUT, "fox", NoiseModel(sigma_px=30, seed=9))
        b = synth_typist(LAYOUT, "fox", NoiseModel(sigma_px=30, seed=9))
        assert a == b


class TestLayoutFile:
    def test_roundtrip(self):
        text = dump_layout(LAYOUT)
        loaded = parse_layout(text)
        assert loaded == LAYOUT

    def test_bundled_file_matches_default(self):
        from gazekit.bundled import data_text

        assert parse_layout(data_text("qwerty.layout")) == default_layout()

    def test_bad_line(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_layout("key q q\n")

    def test_controls_parse(self):
        lay = parse_layout(
            "key a a a 0 0 10 10\nkey bs bksp BACKSPACE 20 0 10 10\n"
            "key sp sp SPACE 40 0 10 10\nkey en en ENTER 60 0 10 10\n"
        )
        assert lay.get("bs").output == BACKSPACE
