import io

import numpy as np
import pytest
from scipy.stats import norm

from nbldpc.code import save_alist, random_regular, syndrome
from nbldpc.errors import ConfigurationError
from nbldpc.modem import build_qam
from nbldpc.sim import (CURVE_COLUMNS, CodeSource, Context, ErrorStats, SimConfig,
                        curve_csv_text, format_config, load_config,
                        mean_distance_to_constellation, parse_config, run_point, run_sweep,
                        scatter_dump, wilson, write_scatter_csv)

SMALL = "code = random_regular 64 4 8 1\nq = 16\n"


def cfg_of(text, **kw):
    return parse_config(text, **kw)


# --- config ------------------------------------------------------------------

def test_parse_config_full():
    cfg = parse_config("""
        # comment
        code = random_regular 255 16 16 7
        q = 16
        ebn0 = 6.5, 7.0 7.5
        decoder = fft-qspa   # inline comment
        k_max = 20
        r_factor = 1.2
        T = 2
        min_word_errors = 50
        max_frames = 1000
        seed = 9
        source = random-coset
        rate = 175/255
        batch = 16
    """.replace("\n        ", "\n"))
    assert cfg.code == CodeSource(n=255, d_v=16, d_c=16, seed=7)
    assert cfg.ebn0 == (6.5, 7.0, 7.5)
    assert cfg.decoder == "fft-qspa" and cfg.k_max == 20 and cfg.T == 2
    assert cfg.rate == pytest.approx(175 / 255)
    assert cfg.source == "random-coset" and cfg.batch == 16


def test_format_round_trip():
    cfg = cfg_of(SMALL + "ebn0 = 1, 2.5\nrate = 0.5\nseed = 3\n")
    assert parse_config(format_config(cfg)) == cfg


def test_overrides_take_precedence():
    cfg = cfg_of(SMALL + "ebn0 = 1\nseed = 3\n", seed=11, decoder=None)
    assert cfg.seed == 11 and cfg.decoder == "ijdd"


def test_load_config_relative_code_path(tmp_path):
    h = random_regular(16, 2, 4, 4, seed=0)
    save_alist(h, tmp_path / "h.alist")
    (tmp_path / "a.cfg").write_text("code = h.alist\nq = 4\nebn0 = 3\n")
    cfg = load_config(tmp_path / "a.cfg")
    assert Context(cfg).h == h


@pytest.mark.parametrize("text", [
    "q = 16\nebn0 = 1\n",
    SMALL,
    SMALL + "ebn0 = 2, 1\n",
    SMALL + "ebn0 = 1\ndecoder = bp\n",
    SMALL + "ebn0 = 1\nsource = ones\n",
    SMALL + "ebn0 = 1\nk_max = 0\n",
    SMALL + "ebn0 = 1\nrate = 1.5\n",
    SMALL + "ebn0 = 1\nbogus = 3\n",
    SMALL + "ebn0 = 1\nq = sixteen\n",
    "code = random_regular 64 4\nq = 16\nebn0 = 1\n",
    "this is not a config\n",
])
def test_config_errors(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)


def test_code_field_mismatch(tmp_path):
    save_alist(random_regular(16, 2, 4, 4, seed=0), tmp_path / "h.alist")
    cfg = parse_config("code = h.alist\nq = 16\nebn0 = 3\n", base_dir=str(tmp_path))
    with pytest.raises(ConfigurationError):
        run_point(cfg, 3.0)


def test_zero_dimension_code_needs_rate():
    cfg = cfg_of("code = random_regular 32 4 4 0\nq = 16\nebn0 = 5\nsource = random-coset\n")
    with pytest.raises(ConfigurationError):
        Context(cfg).rate
    assert Context(cfg_of("code = random_regular 32 4 4 0\nq = 16\nebn0 = 5\n"
                          "source = random-coset\nrate = 0.5\n")).rate == 0.5


# --- statistics --------------------------------------------------------------

def test_wilson_known_value():
    lo, hi = wilson(10, 100)
    # closed form of the Wilson score interval
    z = norm.ppf(0.975)
    p, n = 0.1, 100
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    assert lo == pytest.approx(centre - half, abs=1e-12)
    assert hi == pytest.approx(centre + half, abs=1e-12)
    assert wilson(0, 0) == (0.0, 1.0)


def test_error_stats_counting():
    st = ErrorStats(N=10, p=4)
    st.add_frame(0, 0, 0, 0)
    st.add_frame(2, 3, 1, 5)
    assert st.word_errors == 1 and st.symbol_errors == 2 and st.bit_errors == 3
    assert st.ser == 2 / 20 and st.ber == 3 / 80 and st.wer == 0.5
    assert st.avg_iters == 2.5


# --- simulation --------------------------------------------------------------

@pytest.mark.parametrize("decoder", ["ijdd", "fft-qspa", "uncoded"])
@pytest.mark.parametrize("source", ["random-information", "all-zero", "random-coset"])
def test_noiseless_point_has_no_errors(decoder, source):
    cfg = cfg_of(f"code = random_regular 48 3 6 2\nq = 16\nebn0 = 100\ndecoder = {decoder}\n"
                 f"source = {source}\nmax_frames = 40\nbatch = 16\n")
    st = run_point(cfg, 100.0)
    assert st.frames == 40
    assert st.ser == st.ber == st.wer == 0.0


def _qam16_ser(es_n0):
    p = 2 * (1 - 1 / 4) * norm.sf(np.sqrt(3 * es_n0 / 15))
    return 1 - (1 - p) ** 2


def test_uncoded_ser_matches_closed_form():
    ebn0 = 10 - 10 * np.log10(4)
    cfg = cfg_of(SMALL + f"ebn0 = {ebn0}\ndecoder = uncoded\nmin_word_errors = 100000\n"
                 "max_frames = 2000\nbatch = 250\nseed = 5\n")
    st = run_point(cfg, ebn0)
    n = st.frames * 64
    p = _qam16_ser(10.0)
    assert p == pytest.approx(0.22203085, abs=1e-8)
    assert abs(st.ser - p) < 3 * np.sqrt(p * (1 - p) / n)
    # a frame is in error iff any of its symbols is
    assert st.bit_errors <= 4 * st.symbol_errors
    assert st.bit_errors >= st.symbol_errors


def test_stop_rule():
    cfg = cfg_of(SMALL + "ebn0 = 0\ndecoder = uncoded\nmin_word_errors = 37\nbatch = 10\n")
    st = run_point(cfg, 0.0)
    assert st.word_errors == 37 and st.frames == 37
    cfg = cfg_of(SMALL + "ebn0 = 30\nmax_frames = 23\nbatch = 10\n")
    assert run_point(cfg, 30.0).frames == 23


def test_counting_consistency():
    cfg = cfg_of(SMALL + "ebn0 = 4\nmax_frames = 200\nmin_word_errors = 30\nbatch = 8\n")
    ctx = Context(cfg)
    rows = ctx.run_chunk(123, 0, 20, ctx.n0(4.0))
    st = run_point(cfg, 4.0)
    assert st.word_errors <= st.frames
    assert st.bit_errors <= 4 * st.symbol_errors
    assert np.all(rows[:, 1] <= 4 * rows[:, 0])
    assert np.all((rows[:, 0] > 0) == (rows[:, 1] > 0))


def test_frames_are_independent_of_batch():
    base = SMALL + "ebn0 = 5\nmax_frames = 60\nmin_word_errors = 1000\n"
    a = run_point(cfg_of(base + "batch = 7\n"), 5.0)
    b = run_point(cfg_of(base + "batch = 60\n"), 5.0)
    assert a == b


def test_sweep_of_one_point_is_run_point():
    cfg = cfg_of(SMALL + "ebn0 = 5.5\nmax_frames = 50\nbatch = 10\n")
    [(e, st)] = run_sweep(cfg)
    assert e == 5.5 and st == run_point(cfg, 5.5)


def test_determinism_across_workers():
    cfg = cfg_of(SMALL + "ebn0 = 4, 5\nmin_word_errors = 20\nmax_frames = 300\nbatch = 8\n")
    one = curve_csv_text(run_sweep(cfg, workers=1))
    many = curve_csv_text(run_sweep(cfg, workers=3))
    assert one == many
    assert one.splitlines()[0] == ",".join(CURVE_COLUMNS)
    assert len(one.splitlines()) == 3


def test_seed_changes_results():
    base = SMALL + "ebn0 = 4\nmax_frames = 40\nmin_word_errors = 1000\n"
    assert run_point(cfg_of(base + "seed = 1\n"), 4.0) != run_point(cfg_of(base + "seed = 2\n"), 4.0)


def test_coset_frames_carry_target():
    cfg = cfg_of(SMALL + "ebn0 = 6\nsource = random-coset\n")
    ctx = Context(cfg)
    v, t, y = ctx.frame(1, 0, ctx.n0(6.0))
    assert np.array_equal(t, syndrome(ctx.h, v))
    v, t, y = Context(cfg_of(SMALL + "ebn0 = 6\n")).frame(1, 0, 0.1)
    assert t is None and not syndrome(Context(cfg_of(SMALL + "ebn0 = 6\n")).h, v).any()


# --- scatter -----------------------------------------------------------------

def test_scatter_extreme_snr_lands_on_points():
    cfg = cfg_of(SMALL + "ebn0 = 1\n")
    data = scatter_dump(cfg, 250.0, 5)
    c = build_qam(16)
    d = np.min(np.abs(data.final_y[..., None] - c.points), axis=-1)
    assert np.all(d < 1e-9)
    assert data.success.all()


def test_scatter_denoises_successful_frames():
    cfg = cfg_of("code = random_regular 255 16 16 7\nq = 16\nebn0 = 8\n"
                 "source = random-coset\nrate = 175/255\n")
    data = scatter_dump(cfg, 8.0, 30)
    c = build_qam(16)
    ok = data.success
    assert ok.mean() >= 0.9
    before = mean_distance_to_constellation(c, data.initial_y[ok])
    after = mean_distance_to_constellation(c, data.final_y[ok])
    assert after < before
    # the final vector detects to the decoded word
    from nbldpc.modem import detect
    assert np.array_equal(detect(c, data.final_y[ok])[1], data.codewords[ok])


def test_scatter_csv_layout():
    data = scatter_dump(cfg_of(SMALL + "ebn0 = 6\n"), 6.0, 3, k_max=4)
    buf = io.StringIO()
    write_scatter_csv(data, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "frame,iter,symbol_index,re,im"
    assert len(lines) == 1 + 3 * 2 * 64
    first = lines[1].split(",")
    assert first[:3] == ["0", "0", "0"]
    assert float(first[3]) == pytest.approx(data.initial_y[0, 0].real, abs=1e-9)
