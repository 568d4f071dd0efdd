import numpy as np
import pytest

from infodyn.discretization import PartitionSpec, SymbolSeries, discretize, estimate_joint_pmf
from infodyn.signals import SignalMatrix, read_csv, read_raw, write_csv, write_raw


def test_signal_matrix_validation():
    with pytest.raises(ValueError, match="2 time samples"):
        SignalMatrix(np.zeros((1, 2)), ("a", "b"))
    with pytest.raises(ValueError, match="names length"):
        SignalMatrix(np.zeros((5, 2)), ("a",))
    with pytest.raises(ValueError, match="NaN or Inf"):
        SignalMatrix(np.array([[0.0], [np.nan]]), ("a",))


def test_signal_column_and_select():
    sig = SignalMatrix(np.arange(6.0).reshape(3, 2), ("a", "b"), dt=0.5)
    assert np.array_equal(sig.column("b"), [1.0, 3.0, 5.0])
    sub = sig.select(["b"])
    assert sub.names == ("b",)
    assert sub.dt == 0.5


def test_csv_roundtrip(tmp_path):
    sig = SignalMatrix(np.random.default_rng(0).standard_normal((20, 3)), ("x", "y", "z"))
    write_csv(sig, tmp_path / "s.csv")
    back = read_csv(tmp_path / "s.csv")
    assert back.names == sig.names
    assert np.array_equal(back.values, sig.values)


def test_raw_roundtrip(tmp_path):
    sig = SignalMatrix(np.random.default_rng(1).standard_normal((10, 2)), ("u", "v"), dt=0.01)
    write_raw(sig, tmp_path / "s.bin")
    back = read_raw(tmp_path / "s.bin")
    assert back.names == sig.names
    assert back.dt == sig.dt
    assert np.array_equal(back.values, sig.values)


def test_read_csv_malformed(tmp_path):
    (tmp_path / "bad.csv").write_text("a,b\n1.0,oops\n")
    with pytest.raises(ValueError, match="malformed"):
        read_csv(tmp_path / "bad.csv")


# --- discretization ---

def test_quantile_codes_equal_counts():
    x = np.random.default_rng(2).standard_normal((800, 1))
    sym = discretize(SignalMatrix(x, ("x",)), PartitionSpec(bins_per_variable=8))
    counts = np.bincount(sym.codes[:, 0], minlength=8)
    assert np.all(counts == 100)


def test_quantile_codes_invariant_under_monotone_transform():
    x = np.random.default_rng(3).standard_normal(500)
    a = discretize(SignalMatrix(x[:, None], ("x",)), PartitionSpec())
    b = discretize(SignalMatrix(np.exp(x)[:, None], ("x",)), PartitionSpec())
    assert np.array_equal(a.codes, b.codes)


def test_constant_column_rejected_under_quantile():
    sig = SignalMatrix(np.ones((10, 1)), ("x",))
    with pytest.raises(ValueError, match="degenerate variable"):
        discretize(sig, PartitionSpec())


def test_uniform_width_half_open_cells():
    # values land in [e_k, e_{k+1}) with the top cell closed
    sig = SignalMatrix(np.array([0.0, 1.0, 2.0, 3.0, 4.0])[:, None], ("x",))
    sym = discretize(sig, PartitionSpec("uniform-width", bins_per_variable=4))
    assert np.array_equal(sym.codes[:, 0], [0, 1, 2, 3, 3])


def test_explicit_edges_clip_out_of_range():
    spec = PartitionSpec("explicit-edges", edges=(np.array([0.0, 1.0, 2.0]),))
    sig = SignalMatrix(np.array([-5.0, 0.5, 1.5, 9.0])[:, None], ("x",))
    sym = discretize(sig, spec)
    assert np.array_equal(sym.codes[:, 0], [0, 0, 1, 1])


def test_partition_spec_validation():
    with pytest.raises(ValueError, match="unknown scheme"):
        PartitionSpec("nope")
    with pytest.raises(ValueError, match="requires edges"):
        PartitionSpec("explicit-edges")
    with pytest.raises(ValueError, match="at least 2 bins"):
        PartitionSpec(bins_per_variable=1)
    with pytest.raises(ValueError, match="strictly increasing"):
        PartitionSpec("explicit-edges", edges=(np.array([0.0, 0.0, 1.0]),))


def test_symbol_series_validation():
    with pytest.raises(ValueError, match="code outside"):
        SymbolSeries(np.array([[0], [3]]), (2,))


def test_estimate_joint_pmf_lagged_pairs():
    # deterministic alternation: x lags itself perfectly
    codes = np.array([0, 1] * 50)[:, None]
    sym = SymbolSeries(codes, (2,))
    pmf = estimate_joint_pmf(sym, [(0, 1), (0, 0)])
    assert pmf.prob((1, 0)) == pytest.approx(0.5, abs=0.02)
    assert pmf.prob((0, 0)) == 0.0


def test_estimate_joint_pmf_lag_bounds():
    sym = SymbolSeries(np.zeros((5, 1), dtype=int), (2,))
    with pytest.raises(ValueError, match="no valid samples"):
        estimate_joint_pmf(sym, [(0, 10), (0, 0)])


def test_occupancy_warning():
    rng = np.random.default_rng(4)
    sym = SymbolSeries(rng.integers(0, 50, size=(150, 2)), (50, 50))
    with pytest.warns(UserWarning, match="occupied cells"):
        estimate_joint_pmf(sym, [(0, 0), (1, 0)])
